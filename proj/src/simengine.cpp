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

#include "hetsim/simengine.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace hetsim {

namespace {

using ordered_json = nlohmann::ordered_json;

int device_rank(Device device) {
  switch (device) {
    case Device::Cpu: return 0;
    case Device::Gpu: return 1;
    case Device::Npu: return 2;
  }
  return 3;
}

bool cpu_busy_kind(SimEventKind kind) {
  return kind == SimEventKind::Submit || kind == SimEventKind::GraphGen ||
         kind == SimEventKind::SyncPoll;
}

bool host_overhead_kind(SimEventKind kind) {
  return kind == SimEventKind::Submit || kind == SimEventKind::SyncPoll ||
         kind == SimEventKind::SyncWait;
}

struct Replay {
  const Plan& plan;
  const HardwareConfig& hw;
  std::vector<SimEvent> events;
  double now = 0.0;

  SimEvent meta;  // chunk/layer/op template for emitted spans

  void emit(double start, double dur, Device device, SimEventKind kind) {
    if (dur <= 0.0) return;
    SimEvent ev = meta;
    ev.start_us = start;
    ev.end_us = start + dur;
    ev.device = device;
    ev.kind = kind;
    events.push_back(ev);
  }

  // Host-side exposed span at the cursor.
  void host(double dur, SimEventKind kind) {
    emit(now, dur, Device::Cpu, kind);
    now += dur;
  }

  // Predicted-duration sleep: whole quanta while the kernels run, then the
  // completion handling (poll or blocking wait) after they finish.
  void wait_for_kernels(double kernel_us, double post_us) {
    if (post_us <= 0.0) {
      now += kernel_us;
      return;
    }
    if (plan.policy == SyncPolicy::Fast) {
      const double quantum = hw.sync.sleep_quantum_us;
      const double sleep =
          quantum > 0.0 ? std::floor(kernel_us / quantum) * quantum : 0.0;
      emit(now, sleep, Device::Cpu, SimEventKind::SyncSleep);
      now += kernel_us;
      host(post_us, SimEventKind::SyncPoll);
    } else {
      now += kernel_us;
      host(post_us, SimEventKind::SyncWait);
    }
  }

  void run_unit(const UnitSpan& unit) {
    host(unit.pre_us, SimEventKind::Submit);
    const double kernel = std::max(unit.gpu_us, unit.npu_us);
    emit(now, unit.gpu_us, Device::Gpu, SimEventKind::Kernel);
    emit(now, unit.npu_us, Device::Npu, SimEventKind::Kernel);
    wait_for_kernels(kernel, unit.post_us);
  }

  void run_op(const OpPlan& op) {
    meta.op = op.op;
    host(op.chosen.graph_prep_us, SimEventKind::GraphGen);
    for (std::size_t u = 0; u < op.chosen.units.size(); ++u) {
      meta.unit = static_cast<std::int64_t>(u);
      run_unit(op.chosen.units[u]);
    }
    meta.unit = 0;
  }

  void run_layer(const LayerPlan& layer) {
    // A whole-layer chain: one submit up front, one completion wait at the
    // end, kernels back-to-back in between.
    double tail_wait = 0.0;
    if (layer.overhead_us > 0.0) {
      double submit = plan.step_submit_us;
      tail_wait = layer.overhead_us - submit;
      if (tail_wait < 0.0) {
        submit = layer.overhead_us;
        tail_wait = 0.0;
      }
      meta.op_index = -1;
      host(submit, SimEventKind::Submit);
    }
    const double chain_start = now;
    for (std::size_t i = 0; i < layer.ops.size(); ++i) {
      meta.op_index = static_cast<std::int64_t>(i);
      run_op(layer.ops[i]);
    }
    meta.op_index = -1;
    if (tail_wait > 0.0) {
      if (plan.policy == SyncPolicy::Fast) {
        const double quantum = hw.sync.sleep_quantum_us;
        const double chain = now - chain_start;
        const double sleep =
            quantum > 0.0 ? std::floor(chain / quantum) * quantum : 0.0;
        emit(chain_start, sleep, Device::Cpu, SimEventKind::SyncSleep);
        host(tail_wait, SimEventKind::SyncPoll);
      } else {
        host(tail_wait, SimEventKind::SyncWait);
      }
    }
  }

  void run() {
    meta.chunk = 0;
    meta.layer = -1;
    meta.op_index = -1;
    host(plan.step_submit_us, SimEventKind::Submit);
    for (std::int64_t chunk = 0; chunk < plan.num_chunks; ++chunk) {
      meta.chunk = chunk;
      for (std::size_t li = 0; li < plan.layers.size(); ++li) {
        meta.layer = static_cast<std::int64_t>(li);
        run_layer(plan.layers[li]);
      }
      meta.layer = -1;
    }
  }
};

// Boundary sweep over the emitted spans: verifies each lane runs one span at
// a time and accumulates makespan and per-lane busy time.
SimSummary sweep(const std::vector<SimEvent>& events, const Plan& plan) {
  struct Boundary {
    double time;
    int delta;  // -1 = span end, +1 = span start (ends first on ties)
    const SimEvent* event;
  };
  std::vector<Boundary> boundaries;
  boundaries.reserve(events.size() * 2);
  for (const SimEvent& ev : events) {
    if (!(ev.end_us >= ev.start_us) || ev.start_us < 0.0) {
      throw std::logic_error("simulator produced an invalid span");
    }
    boundaries.push_back(Boundary{ev.start_us, +1, &ev});
    boundaries.push_back(Boundary{ev.end_us, -1, &ev});
  }
  std::sort(boundaries.begin(), boundaries.end(),
            [](const Boundary& a, const Boundary& b) {
              if (a.time != b.time) return a.time < b.time;
              return a.delta < b.delta;
            });

  SimSummary summary;
  int occupancy[3] = {0, 0, 0};
  for (const Boundary& b : boundaries) {
    int& count = occupancy[device_rank(b.event->device)];
    count += b.delta;
    if (count < 0 || count > 1) {
      throw std::logic_error("device lane double-booked at t=" +
                             std::to_string(b.time));
    }
    summary.makespan_us = std::max(summary.makespan_us, b.time);
  }

  for (const SimEvent& ev : events) {
    const double dur = ev.end_us - ev.start_us;
    switch (ev.device) {
      case Device::Cpu:
        if (cpu_busy_kind(ev.kind)) summary.cpu_busy_us += dur;
        break;
      case Device::Gpu: summary.gpu_busy_us += dur; break;
      case Device::Npu: summary.npu_busy_us += dur; break;
    }
    if (ev.device == Device::Cpu && host_overhead_kind(ev.kind)) {
      summary.sync_overhead_us += dur;
    }
    if (ev.kind == SimEventKind::GraphGen) summary.graph_prep_us += dur;
  }
  summary.num_events = static_cast<std::int64_t>(events.size());
  if (plan.activation_len == 1 && summary.makespan_us > 0.0) {
    summary.achieved_bandwidth_bytes_per_s =
        plan.weight_stream_bytes / (summary.makespan_us * 1e-6);
  }
  return summary;
}

ordered_json event_to_json(const SimEvent& ev) {
  return ordered_json{{"t_start_us", ev.start_us},
                      {"t_end_us", ev.end_us},
                      {"device", to_string(ev.device)},
                      {"kind", to_string(ev.kind)},
                      {"chunk", ev.chunk},
                      {"layer", ev.layer},
                      {"op_index", ev.op_index},
                      {"unit", ev.unit},
                      {"op", to_string(ev.op)}};
}

ordered_json summary_json(const SimSummary& s) {
  return ordered_json{
      {"makespan_us", s.makespan_us},
      {"cpu_busy_us", s.cpu_busy_us},
      {"gpu_busy_us", s.gpu_busy_us},
      {"npu_busy_us", s.npu_busy_us},
      {"sync_overhead_us", s.sync_overhead_us},
      {"graph_prep_us", s.graph_prep_us},
      {"achieved_bandwidth_bytes_per_s", s.achieved_bandwidth_bytes_per_s},
      {"num_events", s.num_events}};
}

}  // namespace

const char* to_string(SimEventKind kind) {
  switch (kind) {
    case SimEventKind::Submit: return "submit";
    case SimEventKind::GraphGen: return "graph_gen";
    case SimEventKind::Kernel: return "kernel";
    case SimEventKind::SyncSleep: return "sync_sleep";
    case SimEventKind::SyncPoll: return "sync_poll";
    case SimEventKind::SyncWait: return "sync_wait";
  }
  throw std::invalid_argument("unknown SimEventKind");
}

SimResult simulate_plan(const Plan& plan, const HardwareConfig& hw) {
  validate(hw);
  if (plan.layers.empty()) {
    throw std::invalid_argument("plan has no layers");
  }
  if (plan.num_chunks < 1) {
    throw std::invalid_argument("plan chunk count must be >= 1");
  }
  Replay replay{plan, hw, {}, 0.0, SimEvent{}};
  replay.run();

  SimResult result;
  result.events = std::move(replay.events);
  std::stable_sort(result.events.begin(), result.events.end(),
                   [](const SimEvent& a, const SimEvent& b) {
                     if (a.start_us != b.start_us) {
                       return a.start_us < b.start_us;
                     }
                     return device_rank(a.device) < device_rank(b.device);
                   });
  result.summary = sweep(result.events, plan);
  return result;
}

void save_timeline(const std::filesystem::path& path,
                   const SimResult& result) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot write timeline: " + path.string());
  }
  for (const SimEvent& ev : result.events) {
    out << event_to_json(ev).dump() << "\n";
  }
  out << ordered_json{{"summary", summary_json(result.summary)}}.dump()
      << "\n";
}

std::string summary_to_json(const SimSummary& summary) {
  return summary_json(summary).dump(2) + "\n";
}

}  // namespace hetsim
