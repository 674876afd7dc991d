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

#include <algorithm>
#include <charconv>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hetsim/planner.hpp"
#include "hetsim/profiler.hpp"
#include "hetsim/simengine.hpp"

namespace {

using ordered_json = nlohmann::ordered_json;

struct CommonInputs {
  std::string model = "llama8b";
  std::string hw_path;
  std::string profile_path;
};

hetsim::ModelSpec resolve_model(const std::string& spec) {
  const auto names = hetsim::preset_model_names();
  if (std::find(names.begin(), names.end(), spec) != names.end()) {
    return hetsim::preset_model(spec);
  }
  return hetsim::load_model_spec(spec);
}

hetsim::HardwareConfig resolve_hw(const CommonInputs& in) {
  if (in.hw_path.empty()) return hetsim::default_hardware();
  return hetsim::load_hardware_config(in.hw_path);
}

hetsim::Profile resolve_profile(const CommonInputs& in,
                                const hetsim::ModelSpec& model,
                                const hetsim::HardwareConfig& hw) {
  if (in.profile_path.empty()) return hetsim::build_profile(model, hw);
  return hetsim::load_profile_csv(in.profile_path);
}

void add_common(CLI::App* cmd, CommonInputs& in) {
  cmd->add_option("--model", in.model,
                  "Preset model name or model spec JSON path");
  cmd->add_option("--hw", in.hw_path,
                  "Hardware config JSON (default: built-in)");
  cmd->add_option("--profile", in.profile_path,
                  "Kernel profile CSV (default: synthesized from the model)");
}

// Fixed-precision decimal for table output (deterministic across runs).
std::string fixed(double value, int precision) {
  char buf[64];
  const auto result = std::to_chars(buf, buf + sizeof(buf), value,
                                    std::chars_format::fixed, precision);
  return std::string(buf, result.ptr);
}

ordered_json candidate_json(const hetsim::CandidateEval& ev) {
  ordered_json j;
  j["kind"] = hetsim::to_string(ev.kind);
  j["feasible"] = ev.feasible;
  if (!ev.feasible) {
    j["reason"] = ev.infeasible_reason;
    return j;
  }
  j["total_us"] = ev.total_us;
  j["kernel_us"] = ev.kernel_us;
  j["sync_us"] = ev.sync_us;
  j["t_gpu_us"] = ev.t_gpu_us;
  j["t_npu_us"] = ev.t_npu_us;
  if (ev.npu_rows > 0) {
    j["npu_rows"] = ev.npu_rows;
    j["gpu_rows"] = ev.gpu_rows;
  }
  if (!ev.segments.empty()) {
    j["segments"] = ev.segments;
    j["remainder"] = ev.remainder;
  }
  if (ev.padded_len > 0) j["padded_len"] = ev.padded_len;
  return j;
}

ordered_json plan_summary(const hetsim::Plan& plan) {
  std::map<std::string, std::int64_t> kinds;
  for (const auto& layer : plan.layers) {
    for (const auto& op : layer.ops) {
      ++kinds[hetsim::to_string(op.chosen.kind)];
    }
  }
  ordered_json j;
  j["model"] = plan.model_name;
  j["mode"] = hetsim::to_string(plan.mode);
  j["sync_policy"] = hetsim::to_string(plan.policy);
  j["activation_len"] = plan.activation_len;
  if (plan.num_chunks > 1) {
    j["num_chunks"] = plan.num_chunks;
    j["chunk_len"] = plan.chunk_len;
  }
  j["total_us"] = plan.total_us;
  j["weight_stream_bytes"] = plan.weight_stream_bytes;
  if (plan.activation_len == 1) {
    j["predicted_bandwidth_bytes_per_s"] =
        plan.predicted_bandwidth_bytes_per_s;
  }
  if (plan.graph_prep_us > 0.0) j["graph_prep_us"] = plan.graph_prep_us;
  j["op_kinds"] = ordered_json(kinds);
  return j;
}

int run(int argc, char** argv) {
  CLI::App app{
      "Planner and discrete-event simulator for heterogeneous GPU+NPU "
      "LLM inference"};
  app.require_subcommand(1);

  // ---- profile ----
  CommonInputs prof_in;
  std::string prof_out;
  std::vector<std::int64_t> prof_lengths;
  CLI::App* prof_cmd = app.add_subcommand(
      "profile", "Synthesize a kernel latency profile and emit CSV");
  add_common(prof_cmd, prof_in);
  prof_cmd->add_option("--lengths", prof_lengths,
                       "Activation lengths to profile (comma separated)")
      ->delimiter(',');
  prof_cmd->add_option("--out", prof_out, "Output CSV path (default: stdout)");

  // ---- solve ----
  CommonInputs solve_in;
  std::int64_t solve_len = 1;
  std::string solve_mode = "hetero_tensor";
  std::string solve_sync = "fast";
  std::string solve_out;
  bool solve_serial = false;
  CLI::App* solve_cmd =
      app.add_subcommand("solve", "Plan one forward pass and emit the plan");
  add_common(solve_cmd, solve_in);
  solve_cmd->add_option("--seq-len", solve_len, "Activation length (tokens)")
      ->required();
  solve_cmd->add_option("--mode", solve_mode, "Execution mode");
  solve_cmd->add_option("--sync", solve_sync, "Sync policy: fast | naive");
  solve_cmd->add_option("--out", solve_out, "Plan JSON output path");
  solve_cmd->add_flag("--serial", solve_serial,
                      "Use the serial reference planner");

  // ---- simulate ----
  std::string sim_plan_path;
  std::string sim_hw_path;
  std::string sim_timeline;
  CLI::App* sim_cmd = app.add_subcommand(
      "simulate", "Replay a plan on the event timeline and report busy time");
  sim_cmd->add_option("--plan", sim_plan_path, "Plan JSON path")->required();
  sim_cmd->add_option("--hw", sim_hw_path,
                      "Hardware config JSON (default: built-in)");
  sim_cmd->add_option("--timeline", sim_timeline,
                      "Write the event timeline as NDJSON");

  // ---- compare ----
  CommonInputs cmp_in;
  std::int64_t cmp_len = 1;
  std::string cmp_sync = "fast";
  bool cmp_json = false;
  CLI::App* cmp_cmd = app.add_subcommand(
      "compare", "Plan every execution mode at one length and tabulate");
  add_common(cmp_cmd, cmp_in);
  cmp_cmd->add_option("--seq-len", cmp_len, "Activation length (tokens)")
      ->required();
  cmp_cmd->add_option("--sync", cmp_sync, "Sync policy: fast | naive");
  cmp_cmd->add_flag("--json", cmp_json, "Emit JSON instead of a table");

  // ---- explain ----
  CommonInputs exp_in;
  std::int64_t exp_len = 1;
  std::int64_t exp_rows = 0;
  std::int64_t exp_cols = 0;
  std::string exp_sync = "fast";
  CLI::App* exp_cmd = app.add_subcommand(
      "explain", "Show every placement candidate for one weight shape");
  add_common(exp_cmd, exp_in);
  exp_cmd->add_option("--seq-len", exp_len, "Activation length (tokens)")
      ->required();
  exp_cmd->add_option("--rows", exp_rows, "Weight rows (input features)")
      ->required();
  exp_cmd->add_option("--cols", exp_cols, "Weight cols (output features)")
      ->required();
  exp_cmd->add_option("--sync", exp_sync, "Sync policy: fast | naive");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;  // usage error
  }

  if (prof_cmd->parsed()) {
    const auto model = resolve_model(prof_in.model);
    const auto hw = prof_in.hw_path.empty()
                        ? hetsim::default_hardware()
                        : hetsim::load_hardware_config(prof_in.hw_path);
    const auto profile = hetsim::build_profile(model, hw, prof_lengths);
    if (prof_out.empty()) {
      std::cout << hetsim::profile_to_csv(profile);
    } else {
      hetsim::save_profile_csv(prof_out, profile);
      std::cout << "wrote " << profile.entries().size() << " entries to "
                << prof_out << "\n";
    }
    return 0;
  }

  if (solve_cmd->parsed()) {
    const auto model = resolve_model(solve_in.model);
    const auto hw = resolve_hw(solve_in);
    const auto profile = resolve_profile(solve_in, model, hw);
    const hetsim::Plan plan = hetsim::solve_model(
        model, profile, hw, solve_len, hetsim::exec_mode_from_string(solve_mode),
        hetsim::sync_policy_from_string(solve_sync), !solve_serial);
    ordered_json summary = plan_summary(plan);
    if (!solve_out.empty()) {
      hetsim::save_plan(solve_out, plan);
      summary["plan_path"] = solve_out;
    }
    std::cout << summary.dump(2) << "\n";
    return 0;
  }

  if (sim_cmd->parsed()) {
    const hetsim::Plan plan = hetsim::load_plan(sim_plan_path);
    const auto hw = sim_hw_path.empty()
                        ? hetsim::default_hardware()
                        : hetsim::load_hardware_config(sim_hw_path);
    const hetsim::SimResult result = hetsim::simulate_plan(plan, hw);
    if (!sim_timeline.empty()) {
      hetsim::save_timeline(sim_timeline, result);
    }
    std::cout << hetsim::summary_to_json(result.summary);
    return 0;
  }

  if (cmp_cmd->parsed()) {
    const auto model = resolve_model(cmp_in.model);
    const auto hw = resolve_hw(cmp_in);
    const auto profile = resolve_profile(cmp_in, model, hw);
    const auto policy = hetsim::sync_policy_from_string(cmp_sync);

    struct Row {
      std::string mode;
      bool ok = false;
      std::string error;
      double total_us = 0.0;
      double bandwidth = 0.0;
    };
    std::vector<Row> rows;
    double gpu_total = 0.0;
    for (hetsim::ExecMode mode : hetsim::all_exec_modes()) {
      Row row;
      row.mode = hetsim::to_string(mode);
      try {
        const hetsim::Plan plan =
            hetsim::solve_model(model, profile, hw, cmp_len, mode, policy);
        row.ok = true;
        row.total_us = plan.total_us;
        row.bandwidth = plan.predicted_bandwidth_bytes_per_s;
        if (mode == hetsim::ExecMode::GpuOnly) gpu_total = plan.total_us;
      } catch (const std::exception& e) {
        row.error = e.what();
      }
      rows.push_back(std::move(row));
    }

    if (cmp_json) {
      ordered_json out = ordered_json::array();
      for (const Row& row : rows) {
        ordered_json j;
        j["mode"] = row.mode;
        if (row.ok) {
          j["total_us"] = row.total_us;
          if (gpu_total > 0.0) j["speedup_vs_gpu"] = gpu_total / row.total_us;
          if (row.bandwidth > 0.0) {
            j["predicted_bandwidth_bytes_per_s"] = row.bandwidth;
          }
        } else {
          j["error"] = row.error;
        }
        out.push_back(std::move(j));
      }
      std::cout << out.dump(2) << "\n";
    } else {
      std::cout << "mode               total_us        vs_gpu   bw_gb_s\n";
      for (const Row& row : rows) {
        std::string line = row.mode;
        line.resize(19, ' ');
        if (row.ok) {
          std::string total = fixed(row.total_us, 3);
          total.resize(std::max<std::size_t>(total.size(), 15), ' ');
          line += total + " ";
          line += fixed(gpu_total / row.total_us, 3) + "    ";
          line += row.bandwidth > 0.0 ? fixed(row.bandwidth / 1e9, 2) : "-";
        } else {
          line += "n/a (" + row.error + ")";
        }
        std::cout << line << "\n";
      }
    }
    return 0;
  }

  if (exp_cmd->parsed()) {
    const auto model = resolve_model(exp_in.model);
    const auto hw = resolve_hw(exp_in);
    const auto profile = resolve_profile(exp_in, model, hw);
    const hetsim::OpSolveResult result = hetsim::solve_op(
        {exp_rows, exp_cols}, exp_len, model, profile, hw,
        hetsim::sync_policy_from_string(exp_sync));
    ordered_json j;
    j["weight_rows"] = exp_rows;
    j["weight_cols"] = exp_cols;
    j["activation_len"] = exp_len;
    j["chosen"] = hetsim::to_string(result.chosen.kind);
    ordered_json cands = ordered_json::array();
    for (const auto& ev : result.candidates) {
      cands.push_back(candidate_json(ev));
    }
    j["candidates"] = cands;
    std::cout << j.dump(2) << "\n";
    return 0;
  }

  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
