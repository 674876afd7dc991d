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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>

#include "hetsim/planner.hpp"

namespace hetsim {
namespace {

const HardwareConfig& hw() {
  static const HardwareConfig config = default_hardware();
  return config;
}

const ModelSpec& llama8b() {
  static const ModelSpec model = llama8b_model();
  return model;
}

const Profile& default_prof() {
  static const Profile profile = build_profile(llama8b(), hw());
  return profile;
}

// Hand-written measurement table: three weight shapes, a handful of lengths.
// Latencies are deliberately not from the analytic model so the solver's
// choices are exercised against independent numbers.
Profile fixture_profile() {
  std::vector<ProfileEntry> entries;
  const auto add = [&entries](Device device, std::int64_t rows,
                              std::int64_t cols, std::int64_t len,
                              double latency) {
    entries.push_back(
        ProfileEntry{device, rows, cols, len, latency, 0.0, "measured"});
  };
  add(Device::Gpu, 4096, 4096, 1, 511.0);
  add(Device::Gpu, 4096, 4096, 128, 7306.0);
  add(Device::Gpu, 4096, 4096, 256, 10841.0);
  add(Device::Npu, 4096, 4096, 1, 693.0);
  add(Device::Npu, 4096, 4096, 128, 912.0);
  add(Device::Npu, 4096, 4096, 256, 1884.0);
  add(Device::Gpu, 28672, 4096, 1, 1903.0);
  add(Device::Npu, 28672, 4096, 1, 3886.0);
  add(Device::Gpu, 4096, 14336, 1, 1467.0);
  add(Device::Gpu, 4096, 14336, 256, 35231.0);
  add(Device::Npu, 4096, 14336, 1, 6506.0);
  add(Device::Npu, 4096, 14336, 256, 23445.0);
  return Profile(std::move(entries), 32);
}

OpSolveResult solve_fixture(const WeightShape& shape, std::int64_t len) {
  static const Profile profile = fixture_profile();
  return solve_op(shape, len, llama8b(), profile, hw(), SyncPolicy::Fast);
}

const CandidateEval& candidate_of(const OpSolveResult& result,
                                  CandidateKind kind) {
  for (const CandidateEval& ev : result.candidates) {
    if (ev.kind == kind) return ev;
  }
  throw std::logic_error("candidate kind not present");
}

}  // namespace

TEST_CASE("standard decomposition is greedy over descending sizes") {
  const std::vector<std::int64_t> sizes{32, 64, 128, 256, 512, 1024};

  const Decomposition a = standard_decomposition(700, sizes);
  CHECK(a.segments == std::vector<std::int64_t>{512, 128, 32});
  CHECK(a.remainder == 28);

  const Decomposition b = standard_decomposition(300, sizes);
  CHECK(b.segments == std::vector<std::int64_t>{256, 32});
  CHECK(b.remainder == 12);

  const Decomposition c =
      standard_decomposition(300, {128, 256, 512, 1024});
  CHECK(c.segments == std::vector<std::int64_t>{256});
  CHECK(c.remainder == 44);

  const Decomposition d = standard_decomposition(16, sizes);
  CHECK(d.segments.empty());
  CHECK(d.remainder == 16);

  CHECK_THROWS_AS(standard_decomposition(0, sizes), std::invalid_argument);

  std::mt19937_64 rng(7);
  std::uniform_int_distribution<std::int64_t> dist(1, 5000);
  for (int i = 0; i < 50; ++i) {
    const std::int64_t len = dist(rng);
    const Decomposition dec = standard_decomposition(len, sizes);
    std::int64_t sum = dec.remainder;
    for (std::int64_t seg : dec.segments) sum += seg;
    CHECK(sum == len);
    CHECK(dec.remainder < 32);
    CHECK(std::is_sorted(dec.segments.rbegin(), dec.segments.rend()));
    for (std::int64_t seg : dec.segments) {
      CHECK(std::count(sizes.begin(), sizes.end(), seg) == 1);
    }
  }
}

TEST_CASE("graph cache is LRU per op instance") {
  GraphCache cache(4);
  CHECK_FALSE(cache.touch(0, 0, 1));
  CHECK(cache.touch(0, 0, 1));
  // A different op instance does not share entries.
  CHECK_FALSE(cache.touch(0, 1, 1));
  CHECK_FALSE(cache.touch(1, 0, 1));

  // Fill to capacity, then evict the least recently used.
  CHECK_FALSE(cache.touch(2, 0, 10));
  CHECK_FALSE(cache.touch(2, 0, 20));
  CHECK_FALSE(cache.touch(2, 0, 30));
  CHECK_FALSE(cache.touch(2, 0, 40));
  CHECK(cache.touch(2, 0, 10));          // refresh 10
  CHECK_FALSE(cache.touch(2, 0, 50));    // evicts 20
  CHECK_FALSE(cache.touch(2, 0, 20));    // 20 gone (evicts 30)
  CHECK(cache.touch(2, 0, 10));          // 10 survived

  CHECK_THROWS_AS(GraphCache(0), std::invalid_argument);
}

TEST_CASE("exec mode and candidate kind names round-trip") {
  for (ExecMode mode : all_exec_modes()) {
    CHECK(exec_mode_from_string(to_string(mode)) == mode);
  }
  CHECK_THROWS_AS(exec_mode_from_string("warp_drive"), std::invalid_argument);
  for (CandidateKind kind :
       {CandidateKind::NpuOnly, CandidateKind::GpuOnly,
        CandidateKind::WeightCut, CandidateKind::ActivationCut,
        CandidateKind::Hybrid, CandidateKind::Padding}) {
    CHECK(candidate_kind_from_string(to_string(kind)) == kind);
  }
}

TEST_CASE("decode weight-cut picks the bandwidth-balanced split") {
  // 4096x4096 at length 1: NPU takes 6/16 of the output features.
  const OpSolveResult r = solve_fixture({4096, 4096}, 1);
  CHECK(r.chosen.kind == CandidateKind::WeightCut);
  CHECK(r.chosen.npu_rows == 1536);
  CHECK(r.chosen.gpu_rows == 2560);
  CHECK(r.chosen.t_gpu_us == doctest::Approx(0.7 * 511.0).epsilon(1e-9));
  CHECK(r.chosen.t_npu_us == doctest::Approx(0.5 * 693.0).epsilon(1e-9));
  CHECK(r.chosen.total_us == doctest::Approx(367.7).epsilon(1e-9));
  CHECK(r.chosen.sync_us == doctest::Approx(10.0).epsilon(1e-12));
  CHECK(r.chosen.gpu_weight_bytes + r.chosen.npu_weight_bytes ==
        doctest::Approx(8650752.0).epsilon(1e-12));

  // A taller weight shifts the balance toward the GPU.
  const OpSolveResult tall = solve_fixture({28672, 4096}, 1);
  CHECK(tall.chosen.kind == CandidateKind::WeightCut);
  CHECK(tall.chosen.npu_rows == 1024);
  CHECK(tall.chosen.total_us == doctest::Approx(1564.4).epsilon(1e-9));
}

TEST_CASE("decode keeps wide FFN-style weights on the GPU") {
  const OpSolveResult r = solve_fixture({4096, 14336}, 1);
  CHECK(r.chosen.kind == CandidateKind::GpuOnly);
  CHECK(r.chosen.total_us == doctest::Approx(1472.0).epsilon(1e-12));
  CHECK(r.chosen.sync_us == doctest::Approx(5.0).epsilon(1e-12));
}

TEST_CASE("prefill picks exact graphs, padding, and activation cuts") {
  // Exact graph at 128.
  const OpSolveResult exact = solve_fixture({4096, 4096}, 128);
  CHECK(exact.chosen.kind == CandidateKind::NpuOnly);
  CHECK(exact.chosen.total_us == doctest::Approx(922.0).epsilon(1e-12));

  // 224 has no exact graph: run the 256 graph padded.
  const OpSolveResult padded = solve_fixture({4096, 4096}, 224);
  CHECK(padded.chosen.kind == CandidateKind::Padding);
  CHECK(padded.chosen.padded_len == 256);
  CHECK(padded.chosen.total_us == doctest::Approx(1894.0).epsilon(1e-12));

  // 256 exact again; activation-cut ties on cost and loses the tie-break.
  const OpSolveResult at256 = solve_fixture({4096, 4096}, 256);
  CHECK(at256.chosen.kind == CandidateKind::NpuOnly);
  CHECK(at256.chosen.total_us == doctest::Approx(1894.0).epsilon(1e-12));
  const CandidateEval& cut256 =
      candidate_of(at256, CandidateKind::ActivationCut);
  CHECK(cut256.feasible);
  CHECK(cut256.total_us == doctest::Approx(1894.0).epsilon(1e-12));

  // 264 = 256 + a GPU remainder of 8 rows, hidden under the NPU segment.
  const OpSolveResult cut = solve_fixture({4096, 4096}, 264);
  CHECK(cut.chosen.kind == CandidateKind::ActivationCut);
  CHECK(cut.chosen.segments == std::vector<std::int64_t>{256});
  CHECK(cut.chosen.remainder == 8);
  CHECK(cut.chosen.t_gpu_us ==
        doctest::Approx(885.5275590551181).epsilon(1e-12));
  CHECK(cut.chosen.total_us == doctest::Approx(1924.0).epsilon(1e-12));
}

TEST_CASE("prefill weight-cut and hybrid cover the large shapes") {
  const OpSolveResult wc = solve_fixture({4096, 14336}, 256);
  CHECK(wc.chosen.kind == CandidateKind::WeightCut);
  CHECK(wc.chosen.npu_rows == 9856);
  CHECK(wc.chosen.gpu_rows == 4480);
  CHECK(wc.chosen.total_us == doctest::Approx(17623.75).epsilon(1e-9));

  // 257 exceeds every measured graph: no weight cut, no padding. The hybrid
  // splits features and runs 256 + a padded tail of 1 on both devices.
  const OpSolveResult hy = solve_fixture({4096, 14336}, 257);
  CHECK_FALSE(candidate_of(hy, CandidateKind::WeightCut).feasible);
  CHECK_FALSE(candidate_of(hy, CandidateKind::Padding).feasible);
  CHECK_FALSE(candidate_of(hy, CandidateKind::NpuOnly).feasible);
  CHECK(hy.chosen.kind == CandidateKind::Hybrid);
  CHECK(hy.chosen.segments == std::vector<std::int64_t>{256, 1});
  CHECK(hy.chosen.remainder == 1);
  CHECK(hy.chosen.padded_len == 1);
  CHECK(hy.chosen.npu_rows == 8960);
  CHECK(hy.chosen.units.size() == 2);
  CHECK(hy.chosen.total_us == doctest::Approx(22249.7).epsilon(1e-9));
}

TEST_CASE("missing GPU coverage for a shape is a hard error") {
  std::vector<ProfileEntry> entries{
      ProfileEntry{Device::Npu, 64, 64, 1, 50.0, 0.0, "measured"}};
  const Profile profile(std::move(entries), 32);
  CHECK_THROWS_AS(
      solve_op({64, 64}, 1, llama8b(), profile, hw(), SyncPolicy::Fast),
      std::runtime_error);
}

TEST_CASE("model-built profile reproduces the decode splits") {
  const Profile& profile = default_prof();

  const OpSolveResult qkv =
      solve_op({4096, 6144}, 1, llama8b(), profile, hw(), SyncPolicy::Fast);
  CHECK(qkv.chosen.kind == CandidateKind::WeightCut);
  CHECK(qkv.chosen.npu_rows == 2304);  // 6/16 of the output features
  CHECK(qkv.chosen.total_us == doctest::Approx(228.33).epsilon(1e-3));

  const OpSolveResult oproj =
      solve_op({4096, 4096}, 1, llama8b(), profile, hw(), SyncPolicy::Fast);
  CHECK(oproj.chosen.kind == CandidateKind::WeightCut);
  CHECK(oproj.chosen.npu_rows == 1536);
  CHECK(oproj.chosen.total_us == doctest::Approx(163.89).epsilon(1e-3));

  // FFN slices saturate DRAM together: the refinement pushes both sides
  // above their standalone estimates.
  const OpSolveResult ffn =
      solve_op({4096, 14336}, 1, llama8b(), profile, hw(), SyncPolicy::Fast);
  CHECK(ffn.chosen.kind == CandidateKind::WeightCut);
  CHECK(ffn.chosen.npu_rows == 5376);
  const double gpu_alone =
      partition_scale(5.0 / 8.0) * profile.gpu_latency_us({4096, 14336}, 1);
  CHECK(ffn.chosen.t_gpu_us > gpu_alone);
  CHECK(ffn.chosen.t_gpu_us == doctest::Approx(492.78).epsilon(1e-3));
  CHECK(ffn.chosen.kernel_us == doctest::Approx(ffn.chosen.t_gpu_us));
  CHECK(ffn.chosen.total_us == doctest::Approx(502.78).epsilon(1e-3));

  // The down projection has the same fractions, so the same refined cost.
  const OpSolveResult down =
      solve_op({14336, 4096}, 1, llama8b(), profile, hw(), SyncPolicy::Fast);
  CHECK(down.chosen.kind == CandidateKind::WeightCut);
  CHECK(down.chosen.npu_rows == 1536);
  CHECK(down.chosen.total_us == doctest::Approx(502.78).epsilon(1e-3));
}

TEST_CASE("gpu-only planning is one submitted chain") {
  const Plan fast = solve_model(llama8b(), default_prof(), hw(), 1,
                                ExecMode::GpuOnly, SyncPolicy::Fast);
  const Plan naive = solve_model(llama8b(), default_prof(), hw(), 1,
                                 ExecMode::GpuOnly, SyncPolicy::Naive);
  // No per-op sync anywhere, so the policy cannot matter.
  CHECK(fast.total_us == naive.total_us);
  CHECK(fast.layers.size() == 32);
  double op_sum = 0.0;
  for (const LayerPlan& layer : fast.layers) {
    CHECK(layer.overhead_us == 0.0);
    for (const OpPlan& op : layer.ops) {
      CHECK(op.chosen.kind == CandidateKind::GpuOnly);
      CHECK(op.chosen.sync_us == 0.0);
      op_sum += op.chosen.total_us;
    }
  }
  CHECK(fast.total_us == doctest::Approx(30.0 + op_sum).epsilon(1e-12));
  CHECK(fast.weight_stream_bytes == doctest::Approx(3598712832.0));
  // Streaming every weight once per token bounds decode bandwidth.
  CHECK(fast.predicted_bandwidth_bytes_per_s > 40.0e9);
  CHECK(fast.predicted_bandwidth_bytes_per_s < 45.0e9);
}

TEST_CASE("hetero-tensor decode beats gpu-only and lifts bandwidth") {
  const Plan gpu = solve_model(llama8b(), default_prof(), hw(), 1,
                               ExecMode::GpuOnly, SyncPolicy::Fast);
  const Plan het = solve_model(llama8b(), default_prof(), hw(), 1,
                               ExecMode::HeteroTensor, SyncPolicy::Fast);
  CHECK(het.total_us < gpu.total_us);
  CHECK(het.weight_stream_bytes == doctest::Approx(3598712832.0));
  CHECK(het.predicted_bandwidth_bytes_per_s > 55.0e9);
  CHECK(het.predicted_bandwidth_bytes_per_s <
        hw().memory.soc_bandwidth_cap_bytes_per_s);

  // All layers identical; QKV runs as a 6/16 weight cut.
  CHECK(het.layers.front() == het.layers.back());
  const OpPlan& qkv = het.layers.front().ops.at(1);
  CHECK(qkv.op == OpKind::QkvProj);
  CHECK(qkv.chosen.kind == CandidateKind::WeightCut);
  CHECK(qkv.chosen.npu_rows == 2304);

  // Naive sync erases most of the benefit.
  const Plan het_naive = solve_model(llama8b(), default_prof(), hw(), 1,
                                     ExecMode::HeteroTensor,
                                     SyncPolicy::Naive);
  const double ratio = het_naive.total_us / het.total_us;
  CHECK(ratio > 2.0);
  CHECK(ratio < 4.5);
}

TEST_CASE("hetero-tensor prefill offloads whole ops to the NPU") {
  const Plan het = solve_model(llama8b(), default_prof(), hw(), 256,
                               ExecMode::HeteroTensor, SyncPolicy::Fast);
  const OpPlan& qkv = het.layers.front().ops.at(1);
  CHECK(qkv.chosen.kind == CandidateKind::NpuOnly);
  const OpPlan& ffn_up = het.layers.front().ops.at(5);
  CHECK(ffn_up.chosen.kind == CandidateKind::NpuOnly);

  const Plan naive = solve_model(llama8b(), default_prof(), hw(), 256,
                                 ExecMode::HeteroTensor, SyncPolicy::Naive);
  const double ratio = naive.total_us / het.total_us;
  CHECK(ratio > 1.10);
  CHECK(ratio < 1.40);
}

TEST_CASE("hetero-layer matches the better whole-layer assignment") {
  // Decode: GPU layers win; the only extra cost is one submit+poll per layer.
  const Plan hl = solve_model(llama8b(), default_prof(), hw(), 1,
                              ExecMode::HeteroLayer, SyncPolicy::Fast);
  const Plan gpu = solve_model(llama8b(), default_prof(), hw(), 1,
                               ExecMode::GpuOnly, SyncPolicy::Fast);
  CHECK(hl.layers.front().overhead_us == doctest::Approx(35.0));
  CHECK(hl.total_us ==
        doctest::Approx(gpu.total_us + 32.0 * 35.0).epsilon(1e-12));

  // Prefill: NPU layers win and carry their own per-op sync.
  const Plan hl_pre = solve_model(llama8b(), default_prof(), hw(), 256,
                                  ExecMode::HeteroLayer, SyncPolicy::Fast);
  const Plan npu_pre = solve_model(llama8b(), default_prof(), hw(), 256,
                                   ExecMode::NpuOnly, SyncPolicy::Fast);
  CHECK(hl_pre.layers.front().overhead_us == 0.0);
  CHECK(hl_pre.total_us == doctest::Approx(npu_pre.total_us).epsilon(1e-12));

  // Tensor-level flexibility can only help.
  const Plan ht = solve_model(llama8b(), default_prof(), hw(), 1,
                              ExecMode::HeteroTensor, SyncPolicy::Fast);
  CHECK(ht.total_us <= hl.total_us);
  const Plan ht_pre = solve_model(llama8b(), default_prof(), hw(), 256,
                                  ExecMode::HeteroTensor, SyncPolicy::Fast);
  CHECK(ht_pre.total_us <= hl_pre.total_us + 1e-9);
}

TEST_CASE("hetero-tensor latency is monotone in sequence length") {
  const std::vector<std::int64_t> grid{1,   2,   3,   8,   31,  32,  33,
                                       63,  64,  65,  127, 128, 129, 200,
                                       255, 256, 257, 300, 383, 384, 385,
                                       511, 512, 513, 520};
  double prev = 0.0;
  for (std::int64_t len : grid) {
    const Plan plan = solve_model(llama8b(), default_prof(), hw(), len,
                                  ExecMode::HeteroTensor, SyncPolicy::Fast);
    INFO("len ", len);
    CHECK(plan.total_us >= prev);
    prev = plan.total_us;
  }
}

TEST_CASE("padding baseline is piecewise constant between graph lengths") {
  const auto total_at = [](std::int64_t len) {
    return solve_model(llama8b(), default_prof(), hw(), len,
                       ExecMode::PaddingBaseline, SyncPolicy::Fast)
        .total_us;
  };
  const double at257 = total_at(257);
  CHECK(total_at(300) == at257);
  CHECK(total_at(511) == at257);
  CHECK(total_at(512) == at257);
  CHECK(total_at(256) < at257);
  CHECK(total_at(513) > at257);

  // The solver's mixed plan beats whole-forward padding comfortably.
  const Plan het = solve_model(llama8b(), default_prof(), hw(), 260,
                               ExecMode::HeteroTensor, SyncPolicy::Fast);
  CHECK(total_at(260) / het.total_us > 1.3);
}

TEST_CASE("online prepare pays graph generation only on cache misses") {
  GraphCache cache;
  const Plan cold = solve_model(llama8b(), default_prof(), hw(), 135,
                                ExecMode::OnlinePrepare, SyncPolicy::Fast,
                                true, &cache);
  // Every matmul op instance misses once: 32 layers x 5 matmuls.
  double expected_prep = 0.0;
  for (const OpDesc& op : llama8b().layer_ops()) {
    if (!op.partitionable) continue;
    expected_prep +=
        32.0 * graph_gen_cost_us(op_matmul(op, 135, llama8b()), hw().graph_gen);
  }
  CHECK(cold.graph_prep_us == doctest::Approx(expected_prep).epsilon(1e-12));
  CHECK(cold.graph_prep_us > 350.0e3);
  CHECK(cold.graph_prep_us < 470.0e3);

  const Plan warm = solve_model(llama8b(), default_prof(), hw(), 135,
                                ExecMode::OnlinePrepare, SyncPolicy::Fast,
                                true, &cache);
  CHECK(warm.graph_prep_us == 0.0);
  CHECK(warm.total_us ==
        doctest::Approx(cold.total_us - cold.graph_prep_us).epsilon(1e-12));
}

TEST_CASE("npu pipe chains standard segments plus a padded tail") {
  const Plan pipe = solve_model(llama8b(), default_prof(), hw(), 300,
                                ExecMode::NpuPipe, SyncPolicy::Fast);
  const OpPlan& qkv = pipe.layers.front().ops.at(1);
  CHECK(qkv.chosen.kind == CandidateKind::ActivationCut);
  CHECK(qkv.chosen.segments == std::vector<std::int64_t>{256, 32, 32});
  CHECK(qkv.chosen.padded_len == 32);
  CHECK(qkv.chosen.t_gpu_us == 0.0);
  CHECK(qkv.chosen.sync_us == doctest::Approx(10.0));
}

TEST_CASE("chunked prefill repeats whole NPU forwards") {
  const Plan chunked = solve_model(llama8b(), default_prof(), hw(), 300,
                                   ExecMode::ChunkedPrefill, SyncPolicy::Fast);
  CHECK(chunked.num_chunks == 2);
  CHECK(chunked.chunk_len == 256);
  const Plan npu = solve_model(llama8b(), default_prof(), hw(), 256,
                               ExecMode::NpuOnly, SyncPolicy::Fast);
  CHECK(chunked.total_us - 30.0 ==
        doctest::Approx(2.0 * (npu.total_us - 30.0)).epsilon(1e-12));

  const Plan single = solve_model(llama8b(), default_prof(), hw(), 256,
                                  ExecMode::ChunkedPrefill, SyncPolicy::Fast);
  CHECK(single.num_chunks == 1);
  CHECK(single.total_us == doctest::Approx(npu.total_us).epsilon(1e-12));
}

TEST_CASE("parallel and serial planning produce identical plans") {
  for (ExecMode mode : {ExecMode::HeteroTensor, ExecMode::GpuOnly,
                        ExecMode::NpuPipe}) {
    for (std::int64_t len : {std::int64_t{1}, std::int64_t{256}}) {
      const Plan par = solve_model(llama8b(), default_prof(), hw(), len, mode,
                                   SyncPolicy::Fast, true);
      const Plan ser = solve_model(llama8b(), default_prof(), hw(), len, mode,
                                   SyncPolicy::Fast, false);
      CHECK(par == ser);
    }
  }
}

TEST_CASE("plans round-trip through JSON byte-identically") {
  const Plan plan = solve_model(llama8b(), default_prof(), hw(), 257,
                                ExecMode::HeteroTensor, SyncPolicy::Fast);
  const std::string text = plan_to_json(plan);
  const Plan parsed = plan_from_json(text);
  CHECK(parsed == plan);
  CHECK(plan_to_json(parsed) == text);

  CHECK_THROWS_AS(plan_from_json("{}"), std::runtime_error);
  CHECK_THROWS_AS(plan_from_json("not json"), std::runtime_error);
}

TEST_CASE("planner rejects invalid requests") {
  CHECK_THROWS_AS(solve_model(llama8b(), default_prof(), hw(), 0,
                              ExecMode::GpuOnly, SyncPolicy::Fast),
                  std::invalid_argument);
  CHECK_THROWS_AS(solve_op({4096, 4096}, -3, llama8b(), default_prof(), hw(),
                           SyncPolicy::Fast),
                  std::invalid_argument);
  // Whole-op NPU offload past the largest measured graph is a hard error.
  CHECK_THROWS_AS(solve_model(llama8b(), default_prof(), hw(), 2000,
                              ExecMode::NpuOnly, SyncPolicy::Fast),
                  std::runtime_error);
}

}  // namespace hetsim
