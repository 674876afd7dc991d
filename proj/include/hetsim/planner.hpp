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
#include <limits>
#include <list>
#include <map>
#include <string>
#include <vector>

#include "hetsim/hwmodel.hpp"
#include "hetsim/modelspec.hpp"
#include "hetsim/profiler.hpp"

namespace hetsim {

// Forward-pass execution strategies the planner can emit.
enum class ExecMode {
  GpuOnly,         // every op on the GPU, one submitted chain
  NpuOnly,         // matmuls on the NPU graph that fits, glue on the GPU
  HeteroLayer,     // per-layer device choice
  HeteroTensor,    // per-op candidate search (partitioning allowed)
  OnlinePrepare,   // NPU graphs built at the exact length on first use
  PaddingBaseline, // whole forward padded to the next measured graph
  NpuPipe,         // matmuls decomposed into a chained NPU segment pipe
  ChunkedPrefill,  // prefill split into fixed-size NPU chunks
};

const char* to_string(ExecMode mode);
ExecMode exec_mode_from_string(const std::string& name);
std::vector<ExecMode> all_exec_modes();

// How one partitionable op is executed.
enum class CandidateKind {
  NpuOnly,
  GpuOnly,
  WeightCut,      // output features split across devices, same rows
  ActivationCut,  // rows split: NPU runs standard segments, GPU the remainder
  Hybrid,         // activation-cut whose units are themselves weight-cut
  Padding,        // rows padded up to the next measured NPU graph
};

const char* to_string(CandidateKind kind);
CandidateKind candidate_kind_from_string(const std::string& name);

// Fraction of a profiled kernel time that a partition slice cannot shed
// (launch, bandwidth floor); the rest scales with the assigned fraction.
inline constexpr double kPartitionFixedFraction = 0.2;

inline double partition_scale(double fraction) {
  return kPartitionFixedFraction + (1.0 - kPartitionFixedFraction) * fraction;
}

// One host-driven phase of an op: optional exposed host cost before the
// kernels (submit/trigger), concurrent GPU/NPU kernel spans, exposed host
// cost after them (merge poll or blocking wait).
struct UnitSpan {
  double pre_us = 0.0;
  double gpu_us = 0.0;
  double npu_us = 0.0;
  double post_us = 0.0;
  std::int64_t npu_len = 0;  // NPU graph length driving npu_us (0 = none)

  bool operator==(const UnitSpan&) const = default;
};

struct CandidateEval {
  CandidateKind kind = CandidateKind::GpuOnly;
  bool feasible = false;
  std::string infeasible_reason;

  double total_us = std::numeric_limits<double>::infinity();
  double kernel_us = 0.0;  // makespan of the kernel phases
  double sync_us = 0.0;    // exposed host cost (total - kernel)
  double t_gpu_us = 0.0;   // summed GPU kernel time
  double t_npu_us = 0.0;   // summed NPU kernel time

  // Weight-cut / hybrid split of the output features.
  std::int64_t npu_rows = 0;
  std::int64_t gpu_rows = 0;
  // Activation-cut / hybrid row segments (hybrid includes the padded tail).
  std::vector<std::int64_t> segments;
  std::int64_t remainder = 0;
  // Padding target (padding candidates and hybrid tails).
  std::int64_t padded_len = 0;

  // Weight bytes streamed by each device (drives bandwidth accounting).
  double gpu_weight_bytes = 0.0;
  double npu_weight_bytes = 0.0;

  double graph_prep_us = 0.0;  // online-prepare graph generation cost

  std::vector<UnitSpan> units;  // replay script for the simulator

  bool operator==(const CandidateEval&) const = default;
};

struct OpPlan {
  OpKind op = OpKind::RmsNorm;
  bool partitionable = false;
  std::int64_t weight_rows = 0;
  std::int64_t weight_cols = 0;
  CandidateEval chosen;

  bool operator==(const OpPlan&) const = default;
};

struct LayerPlan {
  // Exposed per-layer host cost outside any op (hetero-layer GPU layers pay
  // one submit plus one completion wait).
  double overhead_us = 0.0;
  std::vector<OpPlan> ops;

  bool operator==(const LayerPlan&) const = default;
};

struct Plan {
  std::string model_name;
  ExecMode mode = ExecMode::HeteroTensor;
  SyncPolicy policy = SyncPolicy::Fast;
  std::int64_t activation_len = 0;
  std::int64_t num_chunks = 1;     // chunked prefill repeats the layers
  std::int64_t chunk_len = 0;      // 0 = not chunked
  double step_submit_us = 0.0;     // one-time chain submit per forward
  std::vector<LayerPlan> layers;

  double total_us = 0.0;              // closed-form forward latency
  double weight_stream_bytes = 0.0;   // summed over the whole forward
  double predicted_bandwidth_bytes_per_s = 0.0;  // decode forwards only
  double graph_prep_us = 0.0;         // summed graph generation cost

  bool operator==(const Plan&) const = default;
};

// Greedy decomposition of `len` into the given segment sizes (descending
// greedy; sizes need not divide len). Segments may repeat.
struct Decomposition {
  std::vector<std::int64_t> segments;
  std::int64_t remainder = 0;
};
Decomposition standard_decomposition(std::int64_t len,
                                     std::vector<std::int64_t> sizes);

// LRU cache of generated NPU graphs: each op instance (layer, op index)
// remembers the last `capacity` activation lengths it has graphs for.
class GraphCache {
 public:
  explicit GraphCache(std::size_t capacity = 4);
  // Returns true when a graph for this length is already cached; otherwise
  // records it (evicting the least recently used) and returns false.
  bool touch(std::int64_t layer, std::int64_t op_index, std::int64_t len);
  std::size_t capacity() const { return capacity_; }

 private:
  std::size_t capacity_;
  std::map<std::pair<std::int64_t, std::int64_t>, std::list<std::int64_t>>
      lru_;
};

// Candidate search for a single partitionable op in the hetero-tensor
// context. `shape` is the weight matrix; dtypes come from `model`.
struct OpSolveResult {
  CandidateEval chosen;
  std::vector<CandidateEval> candidates;  // all classes, incl. infeasible
};
OpSolveResult solve_op(const WeightShape& shape, std::int64_t seq_len,
                       const ModelSpec& model, const Profile& profile,
                       const HardwareConfig& hw, SyncPolicy policy);

// Full-forward planning. `parallel` evaluates (layer, op) cells with OpenMP
// when available; the serial path is the reference implementation and both
// produce identical plans. `cache` (online-prepare only) carries graph-cache
// state across calls; pass nullptr for a cold cache.
Plan solve_model(const ModelSpec& model, const Profile& profile,
                 const HardwareConfig& hw, std::int64_t seq_len, ExecMode mode,
                 SyncPolicy policy, bool parallel = true,
                 GraphCache* cache = nullptr);

// JSON round-trip ("schema": "hetsim.plan.v1").
std::string plan_to_json(const Plan& plan);
Plan plan_from_json(const std::string& text);
Plan load_plan(const std::filesystem::path& path);
void save_plan(const std::filesystem::path& path, const Plan& plan);

}  // namespace hetsim
