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

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

#include "hetsim/types.hpp"

namespace hetsim {

// Roofline-style GPU kernel model: max(compute, memory) plus a fixed launch
// overhead per kernel.
struct GpuModel {
  double peak_flops_per_s = 1e12;
  double mem_bandwidth_bytes_per_s = 4.5e10;
  double fixed_kernel_overhead_us = 20.0;
};

// Systolic-array NPU executing pre-generated static graphs. Activations
// stream through an input buffer of `input_buffer_rows` rows; the stationary
// weight tile is refilled once per buffer pass through a narrower link.
struct NpuModel {
  std::int64_t array_dim = 32;
  std::int64_t array_count = 8;
  double peak_flops_per_s = 1e13;
  double weight_stream_bandwidth_bytes_per_s = 8e9;
  double act_stream_bandwidth_bytes_per_s = 4.5e10;
  std::int64_t input_buffer_rows = 2048;
  double fixed_kernel_overhead_us = 50.0;
};

// Shared-DRAM contention: each client is clipped to its own cap, then all
// clients are scaled proportionally if their sum exceeds the SoC cap.
struct MemoryModel {
  double soc_bandwidth_cap_bytes_per_s = 6.19e10;
  double theoretical_bandwidth_bytes_per_s = 6.8e10;
  std::map<Device, double> per_device_cap_bytes_per_s = {
      {Device::Cpu, 4.5e10}, {Device::Gpu, 4.5e10}, {Device::Npu, 4.5e10}};
};

// Host-side costs of driving the accelerators.
struct SyncModel {
  double naive_sync_us = 400.0;   // blocking driver wait (e.g. queue finish)
  double sleep_quantum_us = 100.0;  // granularity of timed sleeps
  double poll_slice_us = 5.0;     // one completion-flag poll / doorbell write
  double submit_cost_us = 30.0;   // enqueue of a GPU kernel chain
  double copy_cost_per_byte_s = 2.2e-11;  // device copy when memory not unified
};

// Cost of building an NPU graph for one matmul, linear in operand elements.
struct GraphGenModel {
  double base_us = 200.0;
  double per_element_us = 5.16e-5;
};

struct HardwareConfig {
  GpuModel gpu;
  NpuModel npu;
  MemoryModel memory;
  SyncModel sync;
  GraphGenModel graph_gen;
  bool unified_memory = true;
};

HardwareConfig default_hardware();

// Throws std::runtime_error with a field name on invalid values.
void validate(const HardwareConfig& hw);

// JSON round-trip ("schema": "hetsim.hardware.v1").
HardwareConfig load_hardware_config(const std::filesystem::path& path);
void save_hardware_config(const std::filesystem::path& path,
                          const HardwareConfig& hw);
std::string hardware_config_to_json(const HardwareConfig& hw);
HardwareConfig hardware_config_from_json(const std::string& text);

// --- Kernel latency models (all results in microseconds) ---

double gpu_matmul_latency_us(const MatmulDesc& desc, const GpuModel& gpu);

// Bandwidth-bound elementwise GPU kernel moving `bytes` (norms, activations).
double gpu_memmove_latency_us(std::int64_t bytes, const GpuModel& gpu);

// Latency of `desc` in the given orientation.
double npu_matmul_latency_us(const MatmulDesc& desc, const NpuModel& npu);

// Transposed-orientation equivalent: C^T = B^T x A^T. The old weights become
// the streaming operand and vice versa; byte widths travel with the operands.
MatmulDesc order_exchange(const MatmulDesc& desc);

// min(original, exchanged); reports which orientation won.
double npu_matmul_best_latency_us(const MatmulDesc& desc, const NpuModel& npu,
                                  bool* exchanged = nullptr);

// --- Synchronization ---

enum class SyncPolicy { Fast, Naive };
SyncPolicy sync_policy_from_string(const std::string& name);
const char* to_string(SyncPolicy policy);

struct SyncOutcome {
  double overhead_us = 0.0;    // host cost beyond the awaited work itself
  double wake_error_us = 0.0;  // predicted residual after the last full sleep
};

// Cost of waiting for a kernel predicted to take `predicted_wait_us`.
// Fast: sleep whole quanta, then poll once. Naive: blocking driver wait.
SyncOutcome sync_cost(SyncPolicy policy, double predicted_wait_us,
                      const SyncModel& sync);

// Overhead exposed beyond the kernel's actual end when the fast path slept
// floor(predicted/quantum) quanta and the kernel ran `actual_us`.
double fast_sync_exposed_overhead_us(double predicted_us, double actual_us,
                                     const SyncModel& sync);

// --- Shared memory ---

// Allocate bandwidth to concurrent demands (bytes/s per device).
std::map<Device, double> effective_bandwidth(
    const std::map<Device, double>& demand_bytes_per_s,
    const MemoryModel& memory);

// --- Graph generation / data movement ---

double graph_gen_cost_us(const MatmulDesc& desc, const GraphGenModel& gen);

// Cross-device handoff cost; zero when memory is unified.
double boundary_copy_us(std::int64_t bytes, const HardwareConfig& hw);

}  // namespace hetsim
