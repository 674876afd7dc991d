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

#include "hetsim/planner.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace hetsim {

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr const char* kPlanSchema = "hetsim.plan.v1";

// Everything a single-op evaluation needs.
struct Ctx {
  const ModelSpec& model;
  const Profile& profile;
  const HardwareConfig& hw;
  SyncPolicy policy;

  bool decode(std::int64_t seq_len) const { return seq_len == 1; }
  double trigger_us() const { return hw.sync.poll_slice_us; }
  double submit_us() const { return hw.sync.submit_cost_us; }
  // Wait for one device to finish.
  double wait_us() const {
    return policy == SyncPolicy::Fast ? hw.sync.poll_slice_us
                                      : hw.sync.naive_sync_us;
  }
  // Wait for both devices after a concurrent phase. The fast path polls one
  // shared fence; the naive path blocks on each queue in turn.
  double merge_wait_us() const {
    return policy == SyncPolicy::Fast ? hw.sync.poll_slice_us
                                      : 2.0 * hw.sync.naive_sync_us;
  }
  double weight_bytes(const WeightShape& shape) const {
    return static_cast<double>(
        tensor_bytes(shape.first * shape.second, model.weight_dtype));
  }
};

int candidate_rank(CandidateKind kind) {
  switch (kind) {
    case CandidateKind::NpuOnly: return 0;
    case CandidateKind::GpuOnly: return 1;
    case CandidateKind::WeightCut: return 2;
    case CandidateKind::ActivationCut: return 3;
    case CandidateKind::Hybrid: return 4;
    case CandidateKind::Padding: return 5;
  }
  return 6;
}

CandidateEval infeasible(CandidateKind kind, std::string reason) {
  CandidateEval ev;
  ev.kind = kind;
  ev.feasible = false;
  ev.infeasible_reason = std::move(reason);
  return ev;
}

void finalize(CandidateEval& ev) {
  ev.feasible = true;
  double kernel = 0.0;
  double sync = 0.0;
  for (const UnitSpan& unit : ev.units) {
    kernel += std::max(unit.gpu_us, unit.npu_us);
    sync += unit.pre_us + unit.post_us;
  }
  ev.kernel_us = kernel;
  ev.sync_us = sync;
  ev.total_us = ev.graph_prep_us + kernel + sync;
}

// Split positions for the output-feature grid: sixteenths of the output
// dimension, rounded up to whole NPU tiles.
std::vector<std::int64_t> weight_cut_grid(std::int64_t out_features,
                                          std::int64_t min_subtensor) {
  std::vector<std::int64_t> npu_rows;
  const std::int64_t step =
      round_up((out_features + 15) / 16, min_subtensor);
  for (std::int64_t rows = step; rows < out_features; rows += step) {
    npu_rows.push_back(rows);
  }
  return npu_rows;
}

// Decode kernels are weight-bandwidth bound, so concurrent slices contend
// for DRAM: reprice both slices at the bandwidth each can actually get.
void refine_decode_slices(double bytes_gpu, double bytes_npu, double& t_gpu_us,
                          double& t_npu_us, const MemoryModel& memory) {
  if (bytes_gpu <= 0.0 || bytes_npu <= 0.0) return;
  const std::map<Device, double> demand = {
      {Device::Gpu, bytes_gpu / (t_gpu_us * 1e-6)},
      {Device::Npu, bytes_npu / (t_npu_us * 1e-6)}};
  const auto alloc = effective_bandwidth(demand, memory);
  t_gpu_us = std::max(t_gpu_us, bytes_gpu / alloc.at(Device::Gpu) * 1e6);
  t_npu_us = std::max(t_npu_us, bytes_npu / alloc.at(Device::Npu) * 1e6);
}

CandidateEval eval_gpu_only(const WeightShape& shape, std::int64_t seq_len,
                            const Ctx& ctx) {
  CandidateEval ev;
  ev.kind = CandidateKind::GpuOnly;
  const double latency = ctx.profile.gpu_latency_us(shape, seq_len);
  ev.t_gpu_us = latency;
  ev.gpu_weight_bytes = ctx.weight_bytes(shape);
  ev.units = {UnitSpan{0.0, latency, 0.0, ctx.wait_us(), 0}};
  finalize(ev);
  return ev;
}

CandidateEval eval_npu_only(const WeightShape& shape, std::int64_t seq_len,
                            const Ctx& ctx) {
  if (!ctx.profile.has_npu_exact(shape, seq_len)) {
    return infeasible(CandidateKind::NpuOnly,
                      "no NPU graph measured at this exact length");
  }
  CandidateEval ev;
  ev.kind = CandidateKind::NpuOnly;
  const double latency = *ctx.profile.npu_latency_us(shape, seq_len);
  ev.t_npu_us = latency;
  ev.npu_weight_bytes = ctx.weight_bytes(shape);
  ev.units = {UnitSpan{ctx.trigger_us(), 0.0, latency, ctx.wait_us(), seq_len}};
  finalize(ev);
  return ev;
}

CandidateEval eval_padding(const WeightShape& shape, std::int64_t seq_len,
                           const Ctx& ctx) {
  if (ctx.profile.has_npu_exact(shape, seq_len)) {
    return infeasible(CandidateKind::Padding,
                      "an exact NPU graph exists; padding not needed");
  }
  const auto step = ctx.profile.npu_step_length(shape, seq_len);
  if (!step) {
    return infeasible(CandidateKind::Padding,
                      "no measured NPU graph is large enough");
  }
  CandidateEval ev;
  ev.kind = CandidateKind::Padding;
  ev.padded_len = *step;
  const double latency = *ctx.profile.npu_latency_us(shape, seq_len);
  ev.t_npu_us = latency;
  ev.npu_weight_bytes = ctx.weight_bytes(shape);
  ev.units = {UnitSpan{ctx.trigger_us(), 0.0, latency, ctx.wait_us(), *step}};
  finalize(ev);
  return ev;
}

CandidateEval eval_weight_cut(const WeightShape& shape, std::int64_t seq_len,
                              const Ctx& ctx) {
  const auto npu_latency = ctx.profile.npu_latency_us(shape, seq_len);
  if (!npu_latency) {
    return infeasible(CandidateKind::WeightCut,
                      "no measured NPU graph is large enough");
  }
  const auto grid =
      weight_cut_grid(shape.second, ctx.profile.npu_min_subtensor());
  if (grid.empty()) {
    return infeasible(CandidateKind::WeightCut,
                      "output dimension too small to split");
  }
  const double gpu_full = ctx.profile.gpu_latency_us(shape, seq_len);
  const double bytes = ctx.weight_bytes(shape);
  const bool decode = ctx.decode(seq_len);
  const double pre =
      decode ? ctx.trigger_us() : ctx.submit_us() + ctx.trigger_us();
  const double post = ctx.merge_wait_us();

  CandidateEval best = infeasible(CandidateKind::WeightCut, "empty grid");
  for (std::int64_t npu_rows : grid) {
    const double fn = static_cast<double>(npu_rows) /
                      static_cast<double>(shape.second);
    const double fg = 1.0 - fn;
    double t_gpu = partition_scale(fg) * gpu_full;
    double t_npu = partition_scale(fn) * *npu_latency;
    const double bytes_gpu = fg * bytes;
    const double bytes_npu = fn * bytes;
    if (decode) {
      refine_decode_slices(bytes_gpu, bytes_npu, t_gpu, t_npu,
                           ctx.hw.memory);
    }
    CandidateEval ev;
    ev.kind = CandidateKind::WeightCut;
    ev.npu_rows = npu_rows;
    ev.gpu_rows = shape.second - npu_rows;
    ev.t_gpu_us = t_gpu;
    ev.t_npu_us = t_npu;
    ev.gpu_weight_bytes = bytes_gpu;
    ev.npu_weight_bytes = bytes_npu;
    ev.units = {UnitSpan{pre, t_gpu, t_npu, post,
                         *ctx.profile.npu_step_length(shape, seq_len)}};
    finalize(ev);
    // Strict <: ties keep the earlier (larger GPU share) split.
    if (!best.feasible || ev.total_us < best.total_us) best = ev;
  }
  return best;
}

CandidateEval eval_activation_cut(const WeightShape& shape,
                                  std::int64_t seq_len, const Ctx& ctx) {
  const auto basis = ctx.profile.npu_segment_lengths(shape);
  const Decomposition decomp = standard_decomposition(seq_len, basis);
  if (decomp.segments.empty()) {
    return infeasible(CandidateKind::ActivationCut,
                      "no standard NPU segment fits this length");
  }
  CandidateEval ev;
  ev.kind = CandidateKind::ActivationCut;
  ev.segments = decomp.segments;
  ev.remainder = decomp.remainder;
  double npu_sum = 0.0;
  for (std::int64_t seg : decomp.segments) {
    npu_sum += *ctx.profile.npu_latency_us(shape, seg);
  }
  ev.t_npu_us = npu_sum;
  ev.npu_weight_bytes =
      ctx.weight_bytes(shape) * static_cast<double>(decomp.segments.size());
  double gpu_rem = 0.0;
  double pre = ctx.trigger_us();
  double post = ctx.wait_us();
  if (decomp.remainder > 0) {
    gpu_rem = ctx.profile.gpu_latency_us(shape, decomp.remainder);
    ev.t_gpu_us = gpu_rem;
    ev.gpu_weight_bytes = ctx.weight_bytes(shape);
    pre = ctx.submit_us() + ctx.trigger_us();
    post = ctx.merge_wait_us();
  }
  ev.units = {UnitSpan{pre, gpu_rem, npu_sum, post, 0}};
  finalize(ev);
  return ev;
}

CandidateEval eval_hybrid(const WeightShape& shape, std::int64_t seq_len,
                          const Ctx& ctx) {
  const auto basis = ctx.profile.npu_segment_lengths(shape);
  const Decomposition decomp = standard_decomposition(seq_len, basis);
  if (decomp.segments.empty()) {
    return infeasible(CandidateKind::Hybrid,
                      "no standard NPU segment fits this length");
  }
  if (decomp.remainder == 0) {
    return infeasible(CandidateKind::Hybrid,
                      "decomposition has no remainder to pad");
  }
  const auto pad = ctx.profile.npu_step_length(shape, decomp.remainder);
  if (!pad) {
    return infeasible(CandidateKind::Hybrid,
                      "no measured NPU graph covers the remainder");
  }
  std::vector<std::int64_t> unit_lens = decomp.segments;
  unit_lens.push_back(*pad);

  const auto grid =
      weight_cut_grid(shape.second, ctx.profile.npu_min_subtensor());
  if (grid.empty()) {
    return infeasible(CandidateKind::Hybrid,
                      "output dimension too small to split");
  }
  std::vector<double> gpu_unit(unit_lens.size());
  std::vector<double> npu_unit(unit_lens.size());
  for (std::size_t i = 0; i < unit_lens.size(); ++i) {
    gpu_unit[i] = ctx.profile.gpu_latency_us(shape, unit_lens[i]);
    npu_unit[i] = *ctx.profile.npu_latency_us(shape, unit_lens[i]);
  }
  const double bytes = ctx.weight_bytes(shape);
  const double pre = ctx.submit_us() + ctx.trigger_us();
  const double post = ctx.merge_wait_us();

  CandidateEval best = infeasible(CandidateKind::Hybrid, "empty grid");
  for (std::int64_t npu_rows : grid) {
    const double fn = static_cast<double>(npu_rows) /
                      static_cast<double>(shape.second);
    const double fg = 1.0 - fn;
    CandidateEval ev;
    ev.kind = CandidateKind::Hybrid;
    ev.npu_rows = npu_rows;
    ev.gpu_rows = shape.second - npu_rows;
    ev.segments = unit_lens;
    ev.remainder = decomp.remainder;
    ev.padded_len = *pad;
    for (std::size_t i = 0; i < unit_lens.size(); ++i) {
      const double t_gpu = partition_scale(fg) * gpu_unit[i];
      const double t_npu = partition_scale(fn) * npu_unit[i];
      ev.t_gpu_us += t_gpu;
      ev.t_npu_us += t_npu;
      ev.units.push_back(UnitSpan{pre, t_gpu, t_npu, post, unit_lens[i]});
    }
    ev.gpu_weight_bytes =
        fg * bytes * static_cast<double>(unit_lens.size());
    ev.npu_weight_bytes =
        fn * bytes * static_cast<double>(unit_lens.size());
    finalize(ev);
    if (!best.feasible || ev.total_us < best.total_us) best = ev;
  }
  return best;
}

CandidateEval best_candidate(const std::vector<CandidateEval>& candidates) {
  const CandidateEval* best = nullptr;
  for (const CandidateEval& ev : candidates) {
    if (!ev.feasible) continue;
    if (best == nullptr) {
      best = &ev;
      continue;
    }
    const auto key = [](const CandidateEval& e) {
      return std::make_tuple(e.total_us, candidate_rank(e.kind), -e.gpu_rows);
    };
    if (key(ev) < key(*best)) best = &ev;
  }
  if (best == nullptr) {
    throw std::runtime_error("no feasible execution candidate for op");
  }
  return *best;
}

// Elementwise glue kernel on the GPU. Inside a submitted chain the host pays
// nothing; in hetero context the host waits before driving the NPU again.
CandidateEval eval_glue(OpKind kind, std::int64_t seq_len, const Ctx& ctx,
                        bool in_gpu_chain) {
  CandidateEval ev;
  ev.kind = CandidateKind::GpuOnly;
  const double latency = gpu_memmove_latency_us(
      glue_bytes(kind, seq_len, ctx.model), ctx.hw.gpu);
  ev.t_gpu_us = latency;
  ev.units = {
      UnitSpan{0.0, latency, 0.0, in_gpu_chain ? 0.0 : ctx.wait_us(), 0}};
  finalize(ev);
  return ev;
}

CandidateEval eval_gpu_chain_matmul(const WeightShape& shape,
                                    std::int64_t seq_len, const Ctx& ctx) {
  CandidateEval ev;
  ev.kind = CandidateKind::GpuOnly;
  const double latency = ctx.profile.gpu_latency_us(shape, seq_len);
  ev.t_gpu_us = latency;
  ev.gpu_weight_bytes = ctx.weight_bytes(shape);
  ev.units = {UnitSpan{0.0, latency, 0.0, 0.0, 0}};
  finalize(ev);
  return ev;
}

// NPU-side execution for whole-op offload modes: the exact graph when one
// exists, otherwise the next larger one (padding).
CandidateEval eval_npu_step(const WeightShape& shape, std::int64_t seq_len,
                            const Ctx& ctx) {
  CandidateEval ev = eval_npu_only(shape, seq_len, ctx);
  if (ev.feasible) return ev;
  ev = eval_padding(shape, seq_len, ctx);
  if (!ev.feasible) {
    throw std::runtime_error(
        "no NPU graph can run length " + std::to_string(seq_len) +
        " for weight shape [" + std::to_string(shape.first) + ", " +
        std::to_string(shape.second) + "]");
  }
  return ev;
}

// Chained NPU execution (segment pipe): standard segments plus a padded
// tail, all back-to-back behind one trigger.
CandidateEval eval_npu_pipe(const WeightShape& shape, std::int64_t seq_len,
                            const Ctx& ctx) {
  const auto basis = ctx.profile.npu_segment_lengths(shape);
  const Decomposition decomp = standard_decomposition(seq_len, basis);
  if (decomp.segments.empty()) return eval_npu_step(shape, seq_len, ctx);

  CandidateEval ev;
  ev.kind = CandidateKind::ActivationCut;
  ev.segments = decomp.segments;
  if (decomp.remainder > 0) {
    const auto pad = ctx.profile.npu_step_length(shape, decomp.remainder);
    if (!pad) {
      throw std::runtime_error("no NPU graph covers the segment-pipe tail");
    }
    ev.segments.push_back(*pad);
    ev.padded_len = *pad;
  }
  double npu_sum = 0.0;
  for (std::int64_t seg : ev.segments) {
    npu_sum += *ctx.profile.npu_latency_us(shape, seg);
  }
  ev.t_npu_us = npu_sum;
  ev.npu_weight_bytes =
      ctx.weight_bytes(shape) * static_cast<double>(ev.segments.size());
  ev.units = {UnitSpan{ctx.trigger_us(), 0.0, npu_sum, ctx.wait_us(), 0}};
  finalize(ev);
  return ev;
}

}  // namespace

const char* to_string(ExecMode mode) {
  switch (mode) {
    case ExecMode::GpuOnly: return "gpu_only";
    case ExecMode::NpuOnly: return "npu_only";
    case ExecMode::HeteroLayer: return "hetero_layer";
    case ExecMode::HeteroTensor: return "hetero_tensor";
    case ExecMode::OnlinePrepare: return "online_prepare";
    case ExecMode::PaddingBaseline: return "padding_baseline";
    case ExecMode::NpuPipe: return "npu_pipe";
    case ExecMode::ChunkedPrefill: return "chunked_prefill";
  }
  throw std::invalid_argument("unknown ExecMode");
}

ExecMode exec_mode_from_string(const std::string& name) {
  for (ExecMode mode : all_exec_modes()) {
    if (name == to_string(mode)) return mode;
  }
  throw std::invalid_argument("unknown execution mode: " + name);
}

std::vector<ExecMode> all_exec_modes() {
  return {ExecMode::GpuOnly,        ExecMode::NpuOnly,
          ExecMode::HeteroLayer,    ExecMode::HeteroTensor,
          ExecMode::OnlinePrepare,  ExecMode::PaddingBaseline,
          ExecMode::NpuPipe,        ExecMode::ChunkedPrefill};
}

const char* to_string(CandidateKind kind) {
  switch (kind) {
    case CandidateKind::NpuOnly: return "npu_only";
    case CandidateKind::GpuOnly: return "gpu_only";
    case CandidateKind::WeightCut: return "weight_cut";
    case CandidateKind::ActivationCut: return "activation_cut";
    case CandidateKind::Hybrid: return "hybrid";
    case CandidateKind::Padding: return "padding";
  }
  throw std::invalid_argument("unknown CandidateKind");
}

CandidateKind candidate_kind_from_string(const std::string& name) {
  for (CandidateKind kind :
       {CandidateKind::NpuOnly, CandidateKind::GpuOnly,
        CandidateKind::WeightCut, CandidateKind::ActivationCut,
        CandidateKind::Hybrid, CandidateKind::Padding}) {
    if (name == to_string(kind)) return kind;
  }
  throw std::invalid_argument("unknown candidate kind: " + name);
}

Decomposition standard_decomposition(std::int64_t len,
                                     std::vector<std::int64_t> sizes) {
  if (len <= 0) throw std::invalid_argument("length must be positive");
  std::sort(sizes.begin(), sizes.end(), std::greater<>());
  Decomposition out;
  std::int64_t remaining = len;
  for (std::int64_t size : sizes) {
    if (size <= 0) throw std::invalid_argument("segment sizes must be > 0");
    while (remaining >= size) {
      out.segments.push_back(size);
      remaining -= size;
    }
  }
  out.remainder = remaining;
  return out;
}

GraphCache::GraphCache(std::size_t capacity) : capacity_(capacity) {
  if (capacity_ == 0) throw std::invalid_argument("cache capacity must be > 0");
}

bool GraphCache::touch(std::int64_t layer, std::int64_t op_index,
                       std::int64_t len) {
  auto& recent = lru_[{layer, op_index}];
  const auto it = std::find(recent.begin(), recent.end(), len);
  if (it != recent.end()) {
    recent.splice(recent.begin(), recent, it);
    return true;
  }
  recent.push_front(len);
  if (recent.size() > capacity_) recent.pop_back();
  return false;
}

OpSolveResult solve_op(const WeightShape& shape, std::int64_t seq_len,
                       const ModelSpec& model, const Profile& profile,
                       const HardwareConfig& hw, SyncPolicy policy) {
  if (seq_len <= 0) throw std::invalid_argument("seq_len must be positive");
  const Ctx ctx{model, profile, hw, policy};
  OpSolveResult result;
  result.candidates = {
      eval_npu_only(shape, seq_len, ctx),
      eval_gpu_only(shape, seq_len, ctx),
      eval_weight_cut(shape, seq_len, ctx),
      eval_activation_cut(shape, seq_len, ctx),
      eval_hybrid(shape, seq_len, ctx),
      eval_padding(shape, seq_len, ctx),
  };
  result.chosen = best_candidate(result.candidates);
  return result;
}

namespace {

OpPlan make_op_plan(const OpDesc& op, CandidateEval eval) {
  OpPlan plan;
  plan.op = op.kind;
  plan.partitionable = op.partitionable;
  plan.weight_rows = op.weight_rows;
  plan.weight_cols = op.weight_cols;
  plan.chosen = std::move(eval);
  return plan;
}

// Per-(layer, op) evaluation for one mode. OnlinePrepare is handled outside
// (it is stateful through the graph cache).
OpPlan plan_cell(ExecMode mode, const OpDesc& op, std::int64_t seq_len,
                 std::int64_t global_pad, const Ctx& ctx) {
  const WeightShape shape{op.weight_rows, op.weight_cols};
  switch (mode) {
    case ExecMode::GpuOnly:
      if (!op.partitionable) {
        return make_op_plan(op, eval_glue(op.kind, seq_len, ctx, true));
      }
      return make_op_plan(op, eval_gpu_chain_matmul(shape, seq_len, ctx));
    case ExecMode::NpuOnly:
    case ExecMode::ChunkedPrefill:  // chunks run as whole-forward NPU passes
      if (!op.partitionable) {
        return make_op_plan(op, eval_glue(op.kind, seq_len, ctx, false));
      }
      return make_op_plan(op, eval_npu_step(shape, seq_len, ctx));
    case ExecMode::HeteroTensor: {
      if (!op.partitionable) {
        return make_op_plan(op, eval_glue(op.kind, seq_len, ctx, false));
      }
      OpSolveResult solved =
          solve_op(shape, seq_len, ctx.model, ctx.profile, ctx.hw, ctx.policy);
      return make_op_plan(op, std::move(solved.chosen));
    }
    case ExecMode::PaddingBaseline:
      if (!op.partitionable) {
        return make_op_plan(op, eval_glue(op.kind, global_pad, ctx, false));
      }
      return make_op_plan(op, eval_npu_step(shape, global_pad, ctx));
    case ExecMode::NpuPipe:
      if (!op.partitionable) {
        return make_op_plan(op, eval_glue(op.kind, seq_len, ctx, false));
      }
      return make_op_plan(op, eval_npu_pipe(shape, seq_len, ctx));
    default:
      throw std::logic_error("plan_cell: unhandled mode");
  }
}

double layer_total_us(const LayerPlan& layer) {
  double total = layer.overhead_us;
  for (const OpPlan& op : layer.ops) total += op.chosen.total_us;
  return total;
}

}  // namespace

Plan solve_model(const ModelSpec& model, const Profile& profile,
                 const HardwareConfig& hw, std::int64_t seq_len, ExecMode mode,
                 SyncPolicy policy, bool parallel, GraphCache* cache) {
  validate(model);
  validate(hw);
  if (seq_len <= 0) throw std::invalid_argument("seq_len must be positive");

  const Ctx ctx{model, profile, hw, policy};
  const auto ops = model.layer_ops();
  const std::int64_t num_layers = model.num_layers;

  Plan plan;
  plan.model_name = model.name;
  plan.mode = mode;
  plan.policy = policy;
  plan.activation_len = seq_len;
  plan.step_submit_us = hw.sync.submit_cost_us;
  plan.layers.assign(static_cast<std::size_t>(num_layers), LayerPlan{});

  std::int64_t eval_len = seq_len;
  if (mode == ExecMode::ChunkedPrefill) {
    plan.chunk_len = 256;
    plan.num_chunks = (seq_len + plan.chunk_len - 1) / plan.chunk_len;
    eval_len = plan.chunk_len;
  }

  // The whole-forward padding target: largest next-graph length over the
  // partitionable shapes, so every op (and the glue) runs one shape set.
  std::int64_t global_pad = 0;
  if (mode == ExecMode::PaddingBaseline) {
    for (const OpDesc& op : ops) {
      if (!op.partitionable) continue;
      const auto step = ctx.profile.npu_step_length(
          {op.weight_rows, op.weight_cols}, eval_len);
      if (!step) {
        throw std::runtime_error(
            "padding baseline: no NPU graph is large enough for length " +
            std::to_string(eval_len));
      }
      global_pad = std::max(global_pad, *step);
    }
  }

  if (mode == ExecMode::OnlinePrepare) {
    // Stateful through the graph cache: evaluate serially in program order.
    GraphCache local_cache;
    GraphCache& graphs = cache ? *cache : local_cache;
    for (std::int64_t layer = 0; layer < num_layers; ++layer) {
      auto& layer_plan = plan.layers[static_cast<std::size_t>(layer)];
      for (std::size_t i = 0; i < ops.size(); ++i) {
        const OpDesc& op = ops[i];
        if (!op.partitionable) {
          layer_plan.ops.push_back(
              make_op_plan(op, eval_glue(op.kind, eval_len, ctx, false)));
          continue;
        }
        const WeightShape shape{op.weight_rows, op.weight_cols};
        CandidateEval ev = eval_npu_step(shape, eval_len, ctx);
        // The graph is built for the true length; execution is estimated by
        // the measured graph class it falls into.
        ev.kind = CandidateKind::NpuOnly;
        ev.padded_len = 0;
        ev.units.front().npu_len = eval_len;
        if (!graphs.touch(layer, static_cast<std::int64_t>(i), eval_len)) {
          ev.graph_prep_us =
              graph_gen_cost_us(op_matmul(op, eval_len, model), hw.graph_gen);
        }
        finalize(ev);
        layer_plan.ops.push_back(make_op_plan(op, std::move(ev)));
      }
    }
  } else if (mode == ExecMode::HeteroLayer) {
    // Evaluate both whole-layer assignments, then take the cheaper one.
    LayerPlan gpu_layer;
    gpu_layer.overhead_us = ctx.submit_us() + ctx.wait_us();
    for (const OpDesc& op : ops) {
      gpu_layer.ops.push_back(
          plan_cell(ExecMode::GpuOnly, op, eval_len, 0, ctx));
    }
    bool npu_feasible = true;
    LayerPlan npu_layer;
    try {
      for (const OpDesc& op : ops) {
        npu_layer.ops.push_back(
            plan_cell(ExecMode::NpuOnly, op, eval_len, 0, ctx));
      }
    } catch (const std::runtime_error&) {
      npu_feasible = false;
    }
    const LayerPlan& pick =
        (!npu_feasible ||
         layer_total_us(gpu_layer) <= layer_total_us(npu_layer))
            ? gpu_layer
            : npu_layer;
    for (auto& layer_plan : plan.layers) layer_plan = pick;
  } else {
    // Independent (layer, op) cells.
    const std::size_t cells =
        static_cast<std::size_t>(num_layers) * ops.size();
    std::vector<OpPlan> results(cells);
    std::exception_ptr failure;
#if defined(HETSIM_HAVE_OPENMP)
#pragma omp parallel for schedule(static) if (parallel)
#endif
    for (std::size_t cell = 0; cell < cells; ++cell) {
      try {
        const OpDesc& op = ops[cell % ops.size()];
        results[cell] = plan_cell(mode, op, eval_len, global_pad, ctx);
      } catch (...) {
#if defined(HETSIM_HAVE_OPENMP)
#pragma omp critical
#endif
        if (!failure) failure = std::current_exception();
      }
    }
    if (failure) std::rethrow_exception(failure);
    for (std::int64_t layer = 0; layer < num_layers; ++layer) {
      auto& layer_plan = plan.layers[static_cast<std::size_t>(layer)];
      const std::size_t base = static_cast<std::size_t>(layer) * ops.size();
      layer_plan.ops.assign(results.begin() + base,
                            results.begin() + base + ops.size());
    }
  }

  double per_forward = 0.0;
  double weight_bytes = 0.0;
  double graph_prep = 0.0;
  for (const LayerPlan& layer : plan.layers) {
    per_forward += layer_total_us(layer);
    for (const OpPlan& op : layer.ops) {
      weight_bytes += op.chosen.gpu_weight_bytes + op.chosen.npu_weight_bytes;
      graph_prep += op.chosen.graph_prep_us;
    }
  }
  plan.total_us = plan.step_submit_us +
                  static_cast<double>(plan.num_chunks) * per_forward;
  plan.weight_stream_bytes =
      static_cast<double>(plan.num_chunks) * weight_bytes;
  plan.graph_prep_us = static_cast<double>(plan.num_chunks) * graph_prep;
  if (seq_len == 1) {
    plan.predicted_bandwidth_bytes_per_s =
        plan.weight_stream_bytes / (plan.total_us * 1e-6);
  }
  return plan;
}

namespace {

ordered_json unit_to_json(const UnitSpan& unit) {
  return ordered_json{{"pre_us", unit.pre_us},
                      {"gpu_us", unit.gpu_us},
                      {"npu_us", unit.npu_us},
                      {"post_us", unit.post_us},
                      {"npu_len", unit.npu_len}};
}

UnitSpan unit_from_json(const ordered_json& j) {
  UnitSpan unit;
  unit.pre_us = j.at("pre_us").get<double>();
  unit.gpu_us = j.at("gpu_us").get<double>();
  unit.npu_us = j.at("npu_us").get<double>();
  unit.post_us = j.at("post_us").get<double>();
  unit.npu_len = j.at("npu_len").get<std::int64_t>();
  return unit;
}

ordered_json op_to_json(const OpPlan& op) {
  const CandidateEval& ev = op.chosen;
  ordered_json j;
  j["op"] = to_string(op.op);
  j["partitionable"] = op.partitionable;
  j["weight_rows"] = op.weight_rows;
  j["weight_cols"] = op.weight_cols;
  j["kind"] = to_string(ev.kind);
  j["total_us"] = ev.total_us;
  j["kernel_us"] = ev.kernel_us;
  j["sync_us"] = ev.sync_us;
  j["t_gpu_us"] = ev.t_gpu_us;
  j["t_npu_us"] = ev.t_npu_us;
  j["npu_rows"] = ev.npu_rows;
  j["gpu_rows"] = ev.gpu_rows;
  j["segments"] = ev.segments;
  j["remainder"] = ev.remainder;
  j["padded_len"] = ev.padded_len;
  j["gpu_weight_bytes"] = ev.gpu_weight_bytes;
  j["npu_weight_bytes"] = ev.npu_weight_bytes;
  j["graph_prep_us"] = ev.graph_prep_us;
  ordered_json units = ordered_json::array();
  for (const UnitSpan& unit : ev.units) units.push_back(unit_to_json(unit));
  j["units"] = units;
  return j;
}

OpPlan op_from_json(const ordered_json& j) {
  OpPlan op;
  op.op = op_kind_from_string(j.at("op").get<std::string>());
  op.partitionable = j.at("partitionable").get<bool>();
  op.weight_rows = j.at("weight_rows").get<std::int64_t>();
  op.weight_cols = j.at("weight_cols").get<std::int64_t>();
  CandidateEval& ev = op.chosen;
  ev.feasible = true;
  ev.kind = candidate_kind_from_string(j.at("kind").get<std::string>());
  ev.total_us = j.at("total_us").get<double>();
  ev.kernel_us = j.at("kernel_us").get<double>();
  ev.sync_us = j.at("sync_us").get<double>();
  ev.t_gpu_us = j.at("t_gpu_us").get<double>();
  ev.t_npu_us = j.at("t_npu_us").get<double>();
  ev.npu_rows = j.at("npu_rows").get<std::int64_t>();
  ev.gpu_rows = j.at("gpu_rows").get<std::int64_t>();
  ev.segments = j.at("segments").get<std::vector<std::int64_t>>();
  ev.remainder = j.at("remainder").get<std::int64_t>();
  ev.padded_len = j.at("padded_len").get<std::int64_t>();
  ev.gpu_weight_bytes = j.at("gpu_weight_bytes").get<double>();
  ev.npu_weight_bytes = j.at("npu_weight_bytes").get<double>();
  ev.graph_prep_us = j.at("graph_prep_us").get<double>();
  for (const auto& unit : j.at("units")) {
    ev.units.push_back(unit_from_json(unit));
  }
  return op;
}

}  // namespace

std::string plan_to_json(const Plan& plan) {
  ordered_json j;
  j["schema"] = kPlanSchema;
  j["model"] = plan.model_name;
  j["mode"] = to_string(plan.mode);
  j["sync_policy"] = to_string(plan.policy);
  j["activation_len"] = plan.activation_len;
  j["num_chunks"] = plan.num_chunks;
  j["chunk_len"] = plan.chunk_len;
  j["step_submit_us"] = plan.step_submit_us;
  j["total_us"] = plan.total_us;
  j["weight_stream_bytes"] = plan.weight_stream_bytes;
  j["predicted_bandwidth_bytes_per_s"] = plan.predicted_bandwidth_bytes_per_s;
  j["graph_prep_us"] = plan.graph_prep_us;
  ordered_json layers = ordered_json::array();
  for (const LayerPlan& layer : plan.layers) {
    ordered_json ops = ordered_json::array();
    for (const OpPlan& op : layer.ops) ops.push_back(op_to_json(op));
    layers.push_back(
        ordered_json{{"overhead_us", layer.overhead_us}, {"ops", ops}});
  }
  j["layers"] = layers;
  return j.dump(2) + "\n";
}

Plan plan_from_json(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const std::exception& e) {
    throw std::runtime_error(std::string("plan: invalid JSON: ") + e.what());
  }
  if (!j.contains("schema") || j["schema"] != kPlanSchema) {
    throw std::runtime_error(std::string("plan: expected schema \"") +
                             kPlanSchema + "\"");
  }
  Plan plan;
  try {
    plan.model_name = j.at("model").get<std::string>();
    plan.mode = exec_mode_from_string(j.at("mode").get<std::string>());
    plan.policy = sync_policy_from_string(j.at("sync_policy"));
    plan.activation_len = j.at("activation_len").get<std::int64_t>();
    plan.num_chunks = j.at("num_chunks").get<std::int64_t>();
    plan.chunk_len = j.at("chunk_len").get<std::int64_t>();
    plan.step_submit_us = j.at("step_submit_us").get<double>();
    plan.total_us = j.at("total_us").get<double>();
    plan.weight_stream_bytes = j.at("weight_stream_bytes").get<double>();
    plan.predicted_bandwidth_bytes_per_s =
        j.at("predicted_bandwidth_bytes_per_s").get<double>();
    plan.graph_prep_us = j.at("graph_prep_us").get<double>();
    for (const auto& layer_json : j.at("layers")) {
      LayerPlan layer;
      layer.overhead_us = layer_json.at("overhead_us").get<double>();
      for (const auto& op_json : layer_json.at("ops")) {
        layer.ops.push_back(op_from_json(op_json));
      }
      plan.layers.push_back(std::move(layer));
    }
  } catch (const ordered_json::exception& e) {
    throw std::runtime_error(std::string("plan: ") + e.what());
  }
  return plan;
}

Plan load_plan(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open plan: " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return plan_from_json(buffer.str());
}

void save_plan(const std::filesystem::path& path, const Plan& plan) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write plan: " + path.string());
  out << plan_to_json(plan);
}

}  // namespace hetsim
