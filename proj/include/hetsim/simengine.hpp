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
#include <string>
#include <vector>

#include "hetsim/hwmodel.hpp"
#include "hetsim/planner.hpp"

namespace hetsim {

// One occupancy span on a device lane.
enum class SimEventKind {
  Submit,     // host submits a chain / triggers an accelerator
  GraphGen,   // host builds an NPU graph (online prepare)
  Kernel,     // GPU or NPU kernel execution
  SyncSleep,  // host sleeps in whole quanta while kernels run
  SyncPoll,   // host polls the completion flag (fast sync)
  SyncWait,   // host blocks in the driver (naive sync)
};

const char* to_string(SimEventKind kind);

struct SimEvent {
  double start_us = 0.0;
  double end_us = 0.0;
  Device device = Device::Cpu;
  SimEventKind kind = SimEventKind::Submit;
  std::int64_t chunk = 0;
  std::int64_t layer = -1;     // -1 = outside any layer (step submit)
  std::int64_t op_index = -1;  // -1 = layer-level span
  std::int64_t unit = 0;
  OpKind op = OpKind::RmsNorm;

  bool operator==(const SimEvent&) const = default;
};

struct SimSummary {
  double makespan_us = 0.0;
  double cpu_busy_us = 0.0;  // submits, polls, graph generation
  double gpu_busy_us = 0.0;
  double npu_busy_us = 0.0;
  double sync_overhead_us = 0.0;  // exposed host cost (submit/poll/wait)
  double graph_prep_us = 0.0;
  // Weight bytes streamed divided by makespan; decode plans only, else 0.
  double achieved_bandwidth_bytes_per_s = 0.0;
  std::int64_t num_events = 0;
};

struct SimResult {
  SimSummary summary;
  std::vector<SimEvent> events;  // chronological
};

// Replays a plan as a discrete-event timeline: the host drives each unit
// (submit/trigger, concurrent kernels, predicted-sleep + poll or blocking
// wait) and the engine sweeps the events to check lane occupancy and
// accumulate busy time. The makespan reproduces the plan's closed-form
// latency; divergence means the plan and engine disagree and is a bug.
SimResult simulate_plan(const Plan& plan, const HardwareConfig& hw);

// One JSON object per line, chronological. Ends with a summary line.
void save_timeline(const std::filesystem::path& path, const SimResult& result);

std::string summary_to_json(const SimSummary& summary);

}  // namespace hetsim
