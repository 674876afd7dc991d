// Copyright 2026 The hetsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "hetsim/hwmodel.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace hetsim {

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr const char* kHardwareSchema = "hetsim.hardware.v1";

void require_positive(double value, const char* field) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw std::runtime_error(std::string("hardware config: ") + field +
                             " must be positive and finite");
  }
}

void require_positive(std::int64_t value, const char* field) {
  if (value <= 0) {
    throw std::runtime_error(std::string("hardware config: ") + field +
                             " must be positive");
  }
}

}  // namespace

HardwareConfig default_hardware() { return HardwareConfig{}; }

void validate(const HardwareConfig& hw) {
  require_positive(hw.gpu.peak_flops_per_s, "gpu.peak_flops_per_s");
  require_positive(hw.gpu.mem_bandwidth_bytes_per_s,
                   "gpu.mem_bandwidth_bytes_per_s");
  if (hw.gpu.fixed_kernel_overhead_us < 0) {
    throw std::runtime_error(
        "hardware config: gpu.fixed_kernel_overhead_us must be >= 0");
  }
  require_positive(hw.npu.array_dim, "npu.array_dim");
  require_positive(hw.npu.array_count, "npu.array_count");
  require_positive(hw.npu.peak_flops_per_s, "npu.peak_flops_per_s");
  require_positive(hw.npu.weight_stream_bandwidth_bytes_per_s,
                   "npu.weight_stream_bandwidth_bytes_per_s");
  require_positive(hw.npu.act_stream_bandwidth_bytes_per_s,
                   "npu.act_stream_bandwidth_bytes_per_s");
  require_positive(hw.npu.input_buffer_rows, "npu.input_buffer_rows");
  if (hw.npu.fixed_kernel_overhead_us < 0) {
    throw std::runtime_error(
        "hardware config: npu.fixed_kernel_overhead_us must be >= 0");
  }
  require_positive(hw.memory.soc_bandwidth_cap_bytes_per_s,
                   "memory.soc_bandwidth_cap_bytes_per_s");
  require_positive(hw.memory.theoretical_bandwidth_bytes_per_s,
                   "memory.theoretical_bandwidth_bytes_per_s");
  for (const auto& [device, cap] : hw.memory.per_device_cap_bytes_per_s) {
    (void)device;
    require_positive(cap, "memory.per_device_cap_bytes_per_s");
  }
  require_positive(hw.sync.naive_sync_us, "sync.naive_sync_us");
  require_positive(hw.sync.sleep_quantum_us, "sync.sleep_quantum_us");
  require_positive(hw.sync.poll_slice_us, "sync.poll_slice_us");
  if (hw.sync.submit_cost_us < 0) {
    throw std::runtime_error("hardware config: sync.submit_cost_us must be >= 0");
  }
  if (hw.sync.copy_cost_per_byte_s < 0) {
    throw std::runtime_error(
        "hardware config: sync.copy_cost_per_byte_s must be >= 0");
  }
  if (hw.graph_gen.base_us < 0 || hw.graph_gen.per_element_us < 0) {
    throw std::runtime_error("hardware config: graph_gen costs must be >= 0");
  }
}

std::string hardware_config_to_json(const HardwareConfig& hw) {
  ordered_json j;
  j["schema"] = kHardwareSchema;
  j["gpu"] = {{"peak_flops_per_s", hw.gpu.peak_flops_per_s},
              {"mem_bandwidth_bytes_per_s", hw.gpu.mem_bandwidth_bytes_per_s},
              {"fixed_kernel_overhead_us", hw.gpu.fixed_kernel_overhead_us}};
  j["npu"] = {{"array_dim", hw.npu.array_dim},
              {"array_count", hw.npu.array_count},
              {"peak_flops_per_s", hw.npu.peak_flops_per_s},
              {"weight_stream_bandwidth_bytes_per_s",
               hw.npu.weight_stream_bandwidth_bytes_per_s},
              {"act_stream_bandwidth_bytes_per_s",
               hw.npu.act_stream_bandwidth_bytes_per_s},
              {"input_buffer_rows", hw.npu.input_buffer_rows},
              {"fixed_kernel_overhead_us", hw.npu.fixed_kernel_overhead_us}};
  ordered_json caps;
  for (const auto& [device, cap] : hw.memory.per_device_cap_bytes_per_s) {
    caps[to_string(device)] = cap;
  }
  j["memory"] = {{"soc_bandwidth_cap_bytes_per_s",
                  hw.memory.soc_bandwidth_cap_bytes_per_s},
                 {"theoretical_bandwidth_bytes_per_s",
                  hw.memory.theoretical_bandwidth_bytes_per_s},
                 {"per_device_cap_bytes_per_s", caps}};
  j["sync"] = {{"naive_sync_us", hw.sync.naive_sync_us},
               {"sleep_quantum_us", hw.sync.sleep_quantum_us},
               {"poll_slice_us", hw.sync.poll_slice_us},
               {"submit_cost_us", hw.sync.submit_cost_us},
               {"copy_cost_per_byte_s", hw.sync.copy_cost_per_byte_s}};
  j["graph_gen"] = {{"base_us", hw.graph_gen.base_us},
                    {"per_element_us", hw.graph_gen.per_element_us}};
  j["unified_memory"] = hw.unified_memory;
  return j.dump(2) + "\n";
}

HardwareConfig hardware_config_from_json(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const std::exception& e) {
    throw std::runtime_error(std::string("hardware config: invalid JSON: ") +
                             e.what());
  }
  if (!j.contains("schema") || j["schema"] != kHardwareSchema) {
    throw std::runtime_error(
        std::string("hardware config: expected schema \"") + kHardwareSchema +
        "\"");
  }
  HardwareConfig hw = default_hardware();
  try {
    const auto& g = j.at("gpu");
    hw.gpu.peak_flops_per_s = g.at("peak_flops_per_s").get<double>();
    hw.gpu.mem_bandwidth_bytes_per_s =
        g.at("mem_bandwidth_bytes_per_s").get<double>();
    hw.gpu.fixed_kernel_overhead_us =
        g.at("fixed_kernel_overhead_us").get<double>();

    const auto& n = j.at("npu");
    hw.npu.array_dim = n.at("array_dim").get<std::int64_t>();
    hw.npu.array_count = n.at("array_count").get<std::int64_t>();
    hw.npu.peak_flops_per_s = n.at("peak_flops_per_s").get<double>();
    hw.npu.weight_stream_bandwidth_bytes_per_s =
        n.at("weight_stream_bandwidth_bytes_per_s").get<double>();
    // Optional: absent in configs that predate the split streaming paths.
    if (n.contains("act_stream_bandwidth_bytes_per_s")) {
      hw.npu.act_stream_bandwidth_bytes_per_s =
          n.at("act_stream_bandwidth_bytes_per_s").get<double>();
    } else {
      hw.npu.act_stream_bandwidth_bytes_per_s =
          NpuModel{}.act_stream_bandwidth_bytes_per_s;
    }
    hw.npu.input_buffer_rows = n.at("input_buffer_rows").get<std::int64_t>();
    hw.npu.fixed_kernel_overhead_us =
        n.at("fixed_kernel_overhead_us").get<double>();

    const auto& m = j.at("memory");
    hw.memory.soc_bandwidth_cap_bytes_per_s =
        m.at("soc_bandwidth_cap_bytes_per_s").get<double>();
    hw.memory.theoretical_bandwidth_bytes_per_s =
        m.at("theoretical_bandwidth_bytes_per_s").get<double>();
    hw.memory.per_device_cap_bytes_per_s.clear();
    for (const auto& [name, cap] :
         m.at("per_device_cap_bytes_per_s").items()) {
      hw.memory.per_device_cap_bytes_per_s[device_from_string(name)] =
          cap.get<double>();
    }

    const auto& s = j.at("sync");
    hw.sync.naive_sync_us = s.at("naive_sync_us").get<double>();
    hw.sync.sleep_quantum_us = s.at("sleep_quantum_us").get<double>();
    hw.sync.poll_slice_us = s.at("poll_slice_us").get<double>();
    hw.sync.submit_cost_us = s.at("submit_cost_us").get<double>();
    hw.sync.copy_cost_per_byte_s = s.at("copy_cost_per_byte_s").get<double>();

    const auto& gg = j.at("graph_gen");
    hw.graph_gen.base_us = gg.at("base_us").get<double>();
    hw.graph_gen.per_element_us = gg.at("per_element_us").get<double>();

    hw.unified_memory = j.at("unified_memory").get<bool>();
  } catch (const ordered_json::exception& e) {
    throw std::runtime_error(std::string("hardware config: ") + e.what());
  }
  validate(hw);
  return hw;
}

HardwareConfig load_hardware_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open hardware config: " + path.string());
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  return hardware_config_from_json(buffer.str());
}

void save_hardware_config(const std::filesystem::path& path,
                          const HardwareConfig& hw) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot write hardware config: " + path.string());
  }
  out << hardware_config_to_json(hw);
}

double gpu_matmul_latency_us(const MatmulDesc& desc, const GpuModel& gpu) {
  validate(desc);
  const double flops = 2.0 * static_cast<double>(desc.m()) *
                       static_cast<double>(desc.n()) *
                       static_cast<double>(desc.k());
  const std::int64_t bytes =
      operand_bytes(desc.activation) + operand_bytes(desc.weight) +
      desc.m() * desc.k() * output_element_bytes(desc.activation.dtype);
  const double compute_s = flops / gpu.peak_flops_per_s;
  const double memory_s =
      static_cast<double>(bytes) / gpu.mem_bandwidth_bytes_per_s;
  return std::max(compute_s, memory_s) * 1e6 + gpu.fixed_kernel_overhead_us;
}

double gpu_memmove_latency_us(std::int64_t bytes, const GpuModel& gpu) {
  if (bytes < 0) throw std::invalid_argument("negative byte count");
  return static_cast<double>(bytes) / gpu.mem_bandwidth_bytes_per_s * 1e6 +
         gpu.fixed_kernel_overhead_us;
}

double npu_matmul_latency_us(const MatmulDesc& desc, const NpuModel& npu) {
  validate(desc);
  const std::int64_t m = round_up(desc.m(), npu.array_dim);
  const std::int64_t n = round_up(desc.n(), npu.array_dim);
  const std::int64_t k = round_up(desc.k(), npu.array_dim);

  const double compute_s = 2.0 * static_cast<double>(m) *
                           static_cast<double>(n) * static_cast<double>(k) /
                           npu.peak_flops_per_s;
  const double stream_s =
      static_cast<double>(tensor_bytes(m * n, desc.activation.dtype)) /
      npu.act_stream_bandwidth_bytes_per_s;
  const std::int64_t reloads =
      (m + npu.input_buffer_rows - 1) / npu.input_buffer_rows;
  const double reload_s =
      static_cast<double>(reloads) *
      static_cast<double>(tensor_bytes(n * k, desc.weight.dtype)) /
      npu.weight_stream_bandwidth_bytes_per_s;
  return (std::max(compute_s, stream_s) + reload_s) * 1e6 +
         npu.fixed_kernel_overhead_us;
}

MatmulDesc order_exchange(const MatmulDesc& desc) {
  validate(desc);
  MatmulDesc swapped;
  swapped.activation = Operand{desc.weight.cols, desc.weight.rows,
                               desc.weight.dtype};
  swapped.weight = Operand{desc.activation.cols, desc.activation.rows,
                           desc.activation.dtype};
  return swapped;
}

double npu_matmul_best_latency_us(const MatmulDesc& desc, const NpuModel& npu,
                                  bool* exchanged) {
  const double direct = npu_matmul_latency_us(desc, npu);
  const double swapped = npu_matmul_latency_us(order_exchange(desc), npu);
  if (swapped < direct) {
    if (exchanged) *exchanged = true;
    return swapped;
  }
  if (exchanged) *exchanged = false;
  return direct;
}

SyncPolicy sync_policy_from_string(const std::string& name) {
  if (name == "fast") return SyncPolicy::Fast;
  if (name == "naive") return SyncPolicy::Naive;
  throw std::invalid_argument("unknown sync policy: " + name);
}

const char* to_string(SyncPolicy policy) {
  return policy == SyncPolicy::Fast ? "fast" : "naive";
}

SyncOutcome sync_cost(SyncPolicy policy, double predicted_wait_us,
                      const SyncModel& sync) {
  if (predicted_wait_us < 0) {
    throw std::invalid_argument("predicted wait must be >= 0");
  }
  if (policy == SyncPolicy::Naive) {
    return SyncOutcome{sync.naive_sync_us, 0.0};
  }
  const double slept =
      std::floor(predicted_wait_us / sync.sleep_quantum_us) *
      sync.sleep_quantum_us;
  return SyncOutcome{sync.poll_slice_us, predicted_wait_us - slept};
}

double fast_sync_exposed_overhead_us(double predicted_us, double actual_us,
                                     const SyncModel& sync) {
  if (predicted_us < 0 || actual_us < 0) {
    throw std::invalid_argument("sync durations must be >= 0");
  }
  const double slept =
      std::floor(predicted_us / sync.sleep_quantum_us) * sync.sleep_quantum_us;
  return sync.poll_slice_us + std::max(0.0, slept - actual_us);
}

std::map<Device, double> effective_bandwidth(
    const std::map<Device, double>& demand_bytes_per_s,
    const MemoryModel& memory) {
  std::map<Device, double> alloc;
  double total = 0.0;
  for (const auto& [device, demand] : demand_bytes_per_s) {
    if (demand < 0) throw std::invalid_argument("negative bandwidth demand");
    double clipped = demand;
    auto cap = memory.per_device_cap_bytes_per_s.find(device);
    if (cap != memory.per_device_cap_bytes_per_s.end()) {
      clipped = std::min(clipped, cap->second);
    }
    alloc[device] = clipped;
    total += clipped;
  }
  if (total > memory.soc_bandwidth_cap_bytes_per_s && total > 0.0) {
    const double scale = memory.soc_bandwidth_cap_bytes_per_s / total;
    for (auto& [device, value] : alloc) {
      (void)device;
      value *= scale;
    }
  }
  return alloc;
}

double graph_gen_cost_us(const MatmulDesc& desc, const GraphGenModel& gen) {
  validate(desc);
  const double elements =
      static_cast<double>(desc.m()) * static_cast<double>(desc.n()) +
      static_cast<double>(desc.n()) * static_cast<double>(desc.k()) +
      static_cast<double>(desc.m()) * static_cast<double>(desc.k());
  return gen.base_us + gen.per_element_us * elements;
}

double boundary_copy_us(std::int64_t bytes, const HardwareConfig& hw) {
  if (bytes < 0) throw std::invalid_argument("negative byte count");
  if (hw.unified_memory) return 0.0;
  return static_cast<double>(bytes) * hw.sync.copy_cost_per_byte_s * 1e6;
}

}  // namespace hetsim
