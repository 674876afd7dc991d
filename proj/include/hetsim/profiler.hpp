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
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hetsim/hwmodel.hpp"
#include "hetsim/modelspec.hpp"

namespace hetsim {

using WeightShape = std::pair<std::int64_t, std::int64_t>;  // [rows, cols]

// One measured (or model-synthesized) kernel data point.
struct ProfileEntry {
  Device device = Device::Gpu;
  std::int64_t weight_rows = 0;
  std::int64_t weight_cols = 0;
  std::int64_t activation_len = 0;
  double latency_us = 0.0;
  double bandwidth_bytes_per_s = 0.0;
  std::string source;

  bool operator==(const ProfileEntry&) const = default;
};

// Indexed kernel-latency table.
//
// GPU lookups interpolate piecewise-linearly through the measured lengths
// (virtual origin below the first knot, last-segment slope beyond the last):
// GPU kernels take arbitrary shapes. NPU lookups are a right-continuous step
// function over the measured lengths: the NPU only runs pre-generated graphs,
// so a request is served by the smallest measured graph that fits it.
class Profile {
 public:
  Profile() = default;
  Profile(std::vector<ProfileEntry> entries, std::int64_t npu_min_subtensor);

  const std::vector<ProfileEntry>& entries() const { return entries_; }
  std::int64_t npu_min_subtensor() const { return npu_min_subtensor_; }

  bool has_shape(const WeightShape& shape) const;
  std::vector<WeightShape> shapes() const;

  // Throws std::runtime_error if the shape has no GPU measurements.
  double gpu_latency_us(const WeightShape& shape, std::int64_t len) const;

  // Smallest measured NPU graph length >= len, and its latency.
  std::optional<std::int64_t> npu_step_length(const WeightShape& shape,
                                              std::int64_t len) const;
  std::optional<double> npu_latency_us(const WeightShape& shape,
                                       std::int64_t len) const;
  bool has_npu_exact(const WeightShape& shape, std::int64_t len) const;

  // Measured NPU graph lengths for a shape, ascending.
  std::vector<std::int64_t> npu_lengths(const WeightShape& shape) const;
  // The subset usable as decomposition segments (>= npu_min_subtensor).
  std::vector<std::int64_t> npu_segment_lengths(const WeightShape& shape) const;

 private:
  struct ShapeTable {
    std::vector<std::pair<std::int64_t, double>> gpu;  // (len, us) ascending
    std::vector<std::pair<std::int64_t, double>> npu;
  };
  const ShapeTable* find(const WeightShape& shape) const;

  std::vector<ProfileEntry> entries_;
  std::int64_t npu_min_subtensor_ = 32;
  std::map<WeightShape, ShapeTable> tables_;
};

// Lengths profiled when the caller does not pass an explicit list.
std::vector<std::int64_t> default_profile_lengths();

// Synthesizes a profile from the hardware model: every shape at every
// requested length on the GPU, and on the NPU wherever a graph can exist
// (length 1, or >= the minimum subtensor). Length 1 is always included.
// `shapes` defaults to the model's distinct partitionable weight shapes.
Profile build_profile(const ModelSpec& model, const HardwareConfig& hw,
                      std::vector<std::int64_t> lengths = {},
                      std::vector<WeightShape> shapes = {});

// CSV round-trip. Columns (exact order):
// device,weight_rows,weight_cols,activation_len,latency_us,bandwidth_bytes_per_s,source
std::string profile_to_csv(const Profile& profile);
Profile profile_from_csv(const std::string& text);
Profile load_profile_csv(const std::filesystem::path& path);
void save_profile_csv(const std::filesystem::path& path,
                      const Profile& profile);

// Locale-independent shortest-round-trip decimal formatting used by all
// text output (CSV cells, NDJSON numbers, CLI tables).
std::string format_double(double value);

}  // namespace hetsim
