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
#include <utility>
#include <vector>

#include "hetsim/types.hpp"

namespace hetsim {

// One decoder-layer operator. Matmul ops carry a weight matrix and can be
// partitioned across devices; glue ops (norms, attention combine, gating)
// are bandwidth-bound elementwise kernels that stay on the GPU.
enum class OpKind {
  RmsNorm,
  QkvProj,
  AttentionGlue,
  OProj,
  FfnUp,
  FfnGate,
  SwiGlu,
  FfnDown,
};

const char* to_string(OpKind kind);
OpKind op_kind_from_string(const std::string& name);

struct OpDesc {
  OpKind kind = OpKind::RmsNorm;
  bool partitionable = false;
  // Weight is [weight_rows, weight_cols] = [in_features, out_features];
  // zero for glue ops.
  std::int64_t weight_rows = 0;
  std::int64_t weight_cols = 0;

  bool operator==(const OpDesc&) const = default;
};

// Decoder-only transformer described by its repeated layer.
struct ModelSpec {
  std::string name;
  std::int64_t num_layers = 0;
  std::int64_t hidden_dim = 0;
  std::int64_t ffn_dim = 0;
  std::int64_t num_heads = 0;
  std::int64_t num_kv_heads = 0;
  std::int64_t vocab_size = 0;
  DType weight_dtype = DType::W4A16;
  DType act_dtype = DType::F16;

  // Fused QKV output width: Q plus two grouped KV projections.
  std::int64_t qkv_out_features() const;

  // The nine ops of one decoder layer, in execution order.
  std::vector<OpDesc> layer_ops() const;

  // Deduplicated weight shapes of the partitionable ops.
  std::vector<std::pair<std::int64_t, std::int64_t>> distinct_weight_shapes()
      const;

  // Total stored weight bytes of the partitionable ops in one layer.
  std::int64_t weight_bytes_per_layer() const;
};

// Matmul executed by `op` on a sequence of `seq_len` rows.
MatmulDesc op_matmul(const OpDesc& op, std::int64_t seq_len,
                     const ModelSpec& model);

// Bytes moved by a glue op at `seq_len` rows (drives its GPU latency).
std::int64_t glue_bytes(OpKind kind, std::int64_t seq_len,
                        const ModelSpec& model);

// Built-in presets.
ModelSpec llama8b_model();
ModelSpec llama7b_model();
ModelSpec internlm1_8b_model();
ModelSpec preset_model(const std::string& name);
std::vector<std::string> preset_model_names();

void validate(const ModelSpec& model);

// JSON round-trip ("schema": "hetsim.model.v1").
ModelSpec load_model_spec(const std::filesystem::path& path);
void save_model_spec(const std::filesystem::path& path, const ModelSpec& model);
std::string model_spec_to_json(const ModelSpec& model);
ModelSpec model_spec_from_json(const std::string& text);

}  // namespace hetsim
