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

#include <chrono>
#include <iostream>
#include <string>

#if defined(HETSIM_HAVE_OPENMP)
#include <omp.h>
#endif

#include "hetsim/planner.hpp"

namespace {

// Times repeated full-model planning with the OpenMP cell loop on and off.
// The serial path is the reference implementation; both must produce the
// same plan bit for bit.

double time_ms(int iters, bool parallel, const hetsim::ModelSpec& model,
               const hetsim::Profile& profile,
               const hetsim::HardwareConfig& hw, std::int64_t seq_len) {
  const auto start = std::chrono::steady_clock::now();
  for (int i = 0; i < iters; ++i) {
    const hetsim::Plan plan =
        hetsim::solve_model(model, profile, hw, seq_len,
                            hetsim::ExecMode::HeteroTensor,
                            hetsim::SyncPolicy::Fast, parallel);
    if (plan.layers.empty()) std::abort();  // keep the work observable
  }
  const auto end = std::chrono::steady_clock::now();
  return std::chrono::duration<double, std::milli>(end - start).count() /
         iters;
}

}  // namespace

int main(int argc, char** argv) {
  std::int64_t seq_len = 257;  // exercises the hybrid search too
  int iters = 20;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--seq-len" && i + 1 < argc) {
      seq_len = std::stoll(argv[++i]);
    } else if (arg == "--iters" && i + 1 < argc) {
      iters = std::stoi(argv[++i]);
    } else {
      std::cerr << "usage: bench_planner [--seq-len N] [--iters N]\n";
      return 2;
    }
  }

  const hetsim::ModelSpec model = hetsim::llama8b_model();
  const hetsim::HardwareConfig hw = hetsim::default_hardware();
  const hetsim::Profile profile = hetsim::build_profile(model, hw);

  const hetsim::Plan serial_plan =
      hetsim::solve_model(model, profile, hw, seq_len,
                          hetsim::ExecMode::HeteroTensor,
                          hetsim::SyncPolicy::Fast, false);
  const hetsim::Plan parallel_plan =
      hetsim::solve_model(model, profile, hw, seq_len,
                          hetsim::ExecMode::HeteroTensor,
                          hetsim::SyncPolicy::Fast, true);
  if (!(serial_plan == parallel_plan)) {
    std::cerr << "FAIL: serial and parallel planners disagree\n";
    return 1;
  }

#if defined(HETSIM_HAVE_OPENMP)
  const int threads = omp_get_max_threads();
#else
  const int threads = 1;
#endif

  // Warm up, then measure.
  time_ms(2, false, model, profile, hw, seq_len);
  const double serial_ms = time_ms(iters, false, model, profile, hw, seq_len);
  time_ms(2, true, model, profile, hw, seq_len);
  const double parallel_ms = time_ms(iters, true, model, profile, hw, seq_len);

  std::cout << "planner benchmark: seq_len=" << seq_len << " iters=" << iters
            << " threads=" << threads << "\n";
  std::cout << "  serial reference: " << serial_ms << " ms/solve\n";
  std::cout << "  openmp cells:     " << parallel_ms << " ms/solve\n";
  std::cout << "  ratio serial/openmp: " << serial_ms / parallel_ms << "\n";
  std::cout << "  plans identical: yes\n";
  return 0;
}
