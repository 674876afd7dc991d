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

#include "hetsim/profiler.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>

namespace hetsim {

namespace {

constexpr const char* kCsvHeader =
    "device,weight_rows,weight_cols,activation_len,latency_us,"
    "bandwidth_bytes_per_s,source";

std::int64_t parse_int(const std::string& field, const char* what) {
  std::int64_t value = 0;
  const auto [ptr, ec] =
      std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size()) {
    throw std::runtime_error(std::string("profile csv: bad ") + what + ": " +
                             field);
  }
  return value;
}

double parse_double(const std::string& field, const char* what) {
  double value = 0.0;
  const auto [ptr, ec] =
      std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size()) {
    throw std::runtime_error(std::string("profile csv: bad ") + what + ": " +
                             field);
  }
  return value;
}

}  // namespace

std::string format_double(double value) {
  char buffer[64];
  const auto [ptr, ec] =
      std::to_chars(buffer, buffer + sizeof(buffer), value);
  if (ec != std::errc{}) throw std::runtime_error("format_double failed");
  return std::string(buffer, ptr);
}

Profile::Profile(std::vector<ProfileEntry> entries,
                 std::int64_t npu_min_subtensor)
    : entries_(std::move(entries)), npu_min_subtensor_(npu_min_subtensor) {
  if (npu_min_subtensor_ <= 0) {
    throw std::invalid_argument("npu_min_subtensor must be positive");
  }
  std::sort(entries_.begin(), entries_.end(),
            [](const ProfileEntry& a, const ProfileEntry& b) {
              return std::tie(a.weight_rows, a.weight_cols, a.device,
                              a.activation_len) <
                     std::tie(b.weight_rows, b.weight_cols, b.device,
                              b.activation_len);
            });
  for (const ProfileEntry& entry : entries_) {
    if (entry.activation_len <= 0 || entry.weight_rows <= 0 ||
        entry.weight_cols <= 0) {
      throw std::runtime_error("profile entry with non-positive dimension");
    }
    if (!(entry.latency_us > 0.0)) {
      throw std::runtime_error("profile entry with non-positive latency");
    }
    if (entry.device == Device::Cpu) {
      throw std::runtime_error("profile entries must be GPU or NPU");
    }
    auto& table = tables_[{entry.weight_rows, entry.weight_cols}];
    auto& lane = entry.device == Device::Gpu ? table.gpu : table.npu;
    if (!lane.empty() && lane.back().first == entry.activation_len) {
      throw std::runtime_error("duplicate profile entry");
    }
    lane.emplace_back(entry.activation_len, entry.latency_us);
  }
}

const Profile::ShapeTable* Profile::find(const WeightShape& shape) const {
  const auto it = tables_.find(shape);
  return it == tables_.end() ? nullptr : &it->second;
}

bool Profile::has_shape(const WeightShape& shape) const {
  return find(shape) != nullptr;
}

std::vector<WeightShape> Profile::shapes() const {
  std::vector<WeightShape> out;
  out.reserve(tables_.size());
  for (const auto& [shape, table] : tables_) {
    (void)table;
    out.push_back(shape);
  }
  return out;
}

double Profile::gpu_latency_us(const WeightShape& shape,
                               std::int64_t len) const {
  if (len <= 0) throw std::invalid_argument("activation length must be > 0");
  const ShapeTable* table = find(shape);
  if (table == nullptr || table->gpu.empty()) {
    throw std::runtime_error(
        "no GPU profile for weight shape [" + std::to_string(shape.first) +
        ", " + std::to_string(shape.second) + "]");
  }
  const auto& knots = table->gpu;
  if (knots.size() == 1) return knots.front().second;
  if (len <= knots.front().first) {
    // Virtual origin: proportional below the first measurement.
    return knots.front().second * static_cast<double>(len) /
           static_cast<double>(knots.front().first);
  }
  auto hi = std::lower_bound(
      knots.begin(), knots.end(), len,
      [](const auto& knot, std::int64_t value) { return knot.first < value; });
  if (hi == knots.end()) hi = knots.end() - 1;  // extrapolate last segment
  const auto lo = hi - 1;
  const double slope = (hi->second - lo->second) /
                       static_cast<double>(hi->first - lo->first);
  return lo->second + slope * static_cast<double>(len - lo->first);
}

std::optional<std::int64_t> Profile::npu_step_length(const WeightShape& shape,
                                                     std::int64_t len) const {
  if (len <= 0) throw std::invalid_argument("activation length must be > 0");
  const ShapeTable* table = find(shape);
  if (table == nullptr) return std::nullopt;
  for (const auto& [knot_len, latency] : table->npu) {
    (void)latency;
    if (knot_len >= len) return knot_len;
  }
  return std::nullopt;
}

std::optional<double> Profile::npu_latency_us(const WeightShape& shape,
                                              std::int64_t len) const {
  const auto step = npu_step_length(shape, len);
  if (!step) return std::nullopt;
  const ShapeTable* table = find(shape);
  for (const auto& [knot_len, latency] : table->npu) {
    if (knot_len == *step) return latency;
  }
  return std::nullopt;
}

bool Profile::has_npu_exact(const WeightShape& shape, std::int64_t len) const {
  const auto step = npu_step_length(shape, len);
  return step && *step == len;
}

std::vector<std::int64_t> Profile::npu_lengths(const WeightShape& shape) const {
  std::vector<std::int64_t> out;
  const ShapeTable* table = find(shape);
  if (table == nullptr) return out;
  for (const auto& [len, latency] : table->npu) {
    (void)latency;
    out.push_back(len);
  }
  return out;
}

std::vector<std::int64_t> Profile::npu_segment_lengths(
    const WeightShape& shape) const {
  std::vector<std::int64_t> out;
  for (std::int64_t len : npu_lengths(shape)) {
    if (len >= npu_min_subtensor_) out.push_back(len);
  }
  return out;
}

std::vector<std::int64_t> default_profile_lengths() {
  return {1, 32, 64, 128, 256, 512, 1024};
}

Profile build_profile(const ModelSpec& model, const HardwareConfig& hw,
                      std::vector<std::int64_t> lengths,
                      std::vector<WeightShape> shapes) {
  validate(model);
  validate(hw);
  if (lengths.empty()) lengths = default_profile_lengths();
  for (std::int64_t len : lengths) {
    if (len <= 0) throw std::runtime_error("profile length must be positive");
  }
  // The decode graph is always measured: every serving step needs it.
  if (std::find(lengths.begin(), lengths.end(), 1) == lengths.end()) {
    lengths.push_back(1);
  }
  std::sort(lengths.begin(), lengths.end());
  lengths.erase(std::unique(lengths.begin(), lengths.end()), lengths.end());

  if (shapes.empty()) shapes = model.distinct_weight_shapes();
  std::sort(shapes.begin(), shapes.end());
  shapes.erase(std::unique(shapes.begin(), shapes.end()), shapes.end());

  const std::int64_t min_subtensor = hw.npu.array_dim;
  std::vector<ProfileEntry> entries;
  for (const WeightShape& shape : shapes) {
    for (std::int64_t len : lengths) {
      MatmulDesc desc;
      desc.activation = Operand{len, shape.first, model.act_dtype};
      desc.weight = Operand{shape.first, shape.second, model.weight_dtype};
      const double logical_bytes = static_cast<double>(
          operand_bytes(desc.activation) + operand_bytes(desc.weight) +
          desc.m() * desc.k() * output_element_bytes(desc.activation.dtype));

      ProfileEntry gpu;
      gpu.device = Device::Gpu;
      gpu.weight_rows = shape.first;
      gpu.weight_cols = shape.second;
      gpu.activation_len = len;
      gpu.latency_us = gpu_matmul_latency_us(desc, hw.gpu);
      gpu.bandwidth_bytes_per_s = logical_bytes / (gpu.latency_us * 1e-6);
      gpu.source = "model";
      entries.push_back(gpu);

      // No NPU graph exists between the decode graph and the smallest tile.
      if (len != 1 && len < min_subtensor) continue;
      ProfileEntry npu = gpu;
      npu.device = Device::Npu;
      npu.latency_us = npu_matmul_best_latency_us(desc, hw.npu);
      npu.bandwidth_bytes_per_s = logical_bytes / (npu.latency_us * 1e-6);
      entries.push_back(npu);
    }
  }
  return Profile(std::move(entries), min_subtensor);
}

std::string profile_to_csv(const Profile& profile) {
  std::ostringstream out;
  out << kCsvHeader << "\n";
  for (const ProfileEntry& e : profile.entries()) {
    out << to_string(e.device) << ',' << e.weight_rows << ',' << e.weight_cols
        << ',' << e.activation_len << ',' << format_double(e.latency_us) << ','
        << format_double(e.bandwidth_bytes_per_s) << ',' << e.source << "\n";
  }
  return out.str();
}

Profile profile_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) {
    throw std::runtime_error(std::string("profile csv: expected header \"") +
                             kCsvHeader + "\"");
  }
  std::vector<ProfileEntry> entries;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::string field;
    std::istringstream row(line);
    while (std::getline(row, field, ',')) fields.push_back(field);
    if (fields.size() != 7) {
      throw std::runtime_error("profile csv: expected 7 fields, got " +
                               std::to_string(fields.size()) + ": " + line);
    }
    ProfileEntry entry;
    entry.device = device_from_string(fields[0]);
    entry.weight_rows = parse_int(fields[1], "weight_rows");
    entry.weight_cols = parse_int(fields[2], "weight_cols");
    entry.activation_len = parse_int(fields[3], "activation_len");
    entry.latency_us = parse_double(fields[4], "latency_us");
    entry.bandwidth_bytes_per_s =
        parse_double(fields[5], "bandwidth_bytes_per_s");
    entry.source = fields[6];
    entries.push_back(entry);
  }
  // The minimum-subtensor policy value is not a CSV column; imports use the
  // default tile width.
  return Profile(std::move(entries), NpuModel{}.array_dim);
}

Profile load_profile_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open profile: " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return profile_from_csv(buffer.str());
}

void save_profile_csv(const std::filesystem::path& path,
                      const Profile& profile) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write profile: " + path.string());
  out << profile_to_csv(profile);
}

}  // namespace hetsim
