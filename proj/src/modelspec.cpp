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

#include "hetsim/modelspec.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace hetsim {

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr const char* kModelSchema = "hetsim.model.v1";

}  // namespace

const char* to_string(OpKind kind) {
  switch (kind) {
    case OpKind::RmsNorm: return "rms_norm";
    case OpKind::QkvProj: return "qkv_proj";
    case OpKind::AttentionGlue: return "attention_glue";
    case OpKind::OProj: return "o_proj";
    case OpKind::FfnUp: return "ffn_up";
    case OpKind::FfnGate: return "ffn_gate";
    case OpKind::SwiGlu: return "swiglu";
    case OpKind::FfnDown: return "ffn_down";
  }
  throw std::invalid_argument("unknown OpKind");
}

OpKind op_kind_from_string(const std::string& name) {
  for (OpKind kind : {OpKind::RmsNorm, OpKind::QkvProj, OpKind::AttentionGlue,
                      OpKind::OProj, OpKind::FfnUp, OpKind::FfnGate,
                      OpKind::SwiGlu, OpKind::FfnDown}) {
    if (name == to_string(kind)) return kind;
  }
  throw std::invalid_argument("unknown op kind: " + name);
}

std::int64_t ModelSpec::qkv_out_features() const {
  return hidden_dim + 2 * hidden_dim * num_kv_heads / num_heads;
}

std::vector<OpDesc> ModelSpec::layer_ops() const {
  const std::int64_t qkv = qkv_out_features();
  return {
      OpDesc{OpKind::RmsNorm, false, 0, 0},
      OpDesc{OpKind::QkvProj, true, hidden_dim, qkv},
      OpDesc{OpKind::AttentionGlue, false, 0, 0},
      OpDesc{OpKind::OProj, true, hidden_dim, hidden_dim},
      OpDesc{OpKind::RmsNorm, false, 0, 0},
      OpDesc{OpKind::FfnUp, true, hidden_dim, ffn_dim},
      OpDesc{OpKind::FfnGate, true, hidden_dim, ffn_dim},
      OpDesc{OpKind::SwiGlu, false, 0, 0},
      OpDesc{OpKind::FfnDown, true, ffn_dim, hidden_dim},
  };
}

std::vector<std::pair<std::int64_t, std::int64_t>>
ModelSpec::distinct_weight_shapes() const {
  std::vector<std::pair<std::int64_t, std::int64_t>> shapes;
  for (const OpDesc& op : layer_ops()) {
    if (!op.partitionable) continue;
    const auto shape = std::make_pair(op.weight_rows, op.weight_cols);
    if (std::find(shapes.begin(), shapes.end(), shape) == shapes.end()) {
      shapes.push_back(shape);
    }
  }
  return shapes;
}

std::int64_t ModelSpec::weight_bytes_per_layer() const {
  std::int64_t total = 0;
  for (const OpDesc& op : layer_ops()) {
    if (!op.partitionable) continue;
    total += tensor_bytes(op.weight_rows * op.weight_cols, weight_dtype);
  }
  return total;
}

MatmulDesc op_matmul(const OpDesc& op, std::int64_t seq_len,
                     const ModelSpec& model) {
  if (!op.partitionable) {
    throw std::invalid_argument(std::string("op has no matmul: ") +
                                to_string(op.kind));
  }
  if (seq_len <= 0) throw std::invalid_argument("seq_len must be positive");
  MatmulDesc desc;
  desc.activation = Operand{seq_len, op.weight_rows, model.act_dtype};
  desc.weight = Operand{op.weight_rows, op.weight_cols, model.weight_dtype};
  return desc;
}

std::int64_t glue_bytes(OpKind kind, std::int64_t seq_len,
                        const ModelSpec& model) {
  if (seq_len <= 0) throw std::invalid_argument("seq_len must be positive");
  const std::int64_t act = output_element_bytes(model.act_dtype);
  switch (kind) {
    case OpKind::RmsNorm:
      // Read and write one hidden-dim row per token.
      return 2 * seq_len * model.hidden_dim * act;
    case OpKind::SwiGlu:
      // Two ffn-dim inputs, one ffn-dim output.
      return 3 * seq_len * model.ffn_dim * act;
    case OpKind::AttentionGlue:
      // Score/combine traffic proportional to the hidden state.
      return seq_len * model.hidden_dim * act;
    default:
      throw std::invalid_argument(std::string("not a glue op: ") +
                                  to_string(kind));
  }
}

ModelSpec llama8b_model() {
  ModelSpec model;
  model.name = "llama8b";
  model.num_layers = 32;
  model.hidden_dim = 4096;
  model.ffn_dim = 14336;
  model.num_heads = 32;
  model.num_kv_heads = 8;
  model.vocab_size = 128256;
  return model;
}

ModelSpec llama7b_model() {
  ModelSpec model;
  model.name = "llama7b";
  model.num_layers = 32;
  model.hidden_dim = 4096;
  model.ffn_dim = 11008;
  model.num_heads = 32;
  model.num_kv_heads = 32;
  model.vocab_size = 32000;
  return model;
}

ModelSpec internlm1_8b_model() {
  ModelSpec model;
  model.name = "internlm1.8b";
  model.num_layers = 24;
  model.hidden_dim = 2048;
  model.ffn_dim = 8192;
  model.num_heads = 16;
  model.num_kv_heads = 8;
  model.vocab_size = 92544;
  return model;
}

ModelSpec preset_model(const std::string& name) {
  for (const ModelSpec& model :
       {llama8b_model(), llama7b_model(), internlm1_8b_model()}) {
    if (model.name == name) return model;
  }
  throw std::runtime_error("unknown model preset: " + name);
}

std::vector<std::string> preset_model_names() {
  return {llama8b_model().name, llama7b_model().name,
          internlm1_8b_model().name};
}

void validate(const ModelSpec& model) {
  auto positive = [](std::int64_t v, const char* field) {
    if (v <= 0) {
      throw std::runtime_error(std::string("model spec: ") + field +
                               " must be positive");
    }
  };
  if (model.name.empty()) throw std::runtime_error("model spec: empty name");
  positive(model.num_layers, "num_layers");
  positive(model.hidden_dim, "hidden_dim");
  positive(model.ffn_dim, "ffn_dim");
  positive(model.num_heads, "num_heads");
  positive(model.num_kv_heads, "num_kv_heads");
  positive(model.vocab_size, "vocab_size");
  if (model.num_kv_heads > model.num_heads) {
    throw std::runtime_error("model spec: num_kv_heads > num_heads");
  }
  if (model.hidden_dim % model.num_heads != 0) {
    throw std::runtime_error("model spec: hidden_dim not divisible by heads");
  }
  if ((2 * model.hidden_dim * model.num_kv_heads) % model.num_heads != 0) {
    throw std::runtime_error("model spec: grouped KV width is fractional");
  }
}

std::string model_spec_to_json(const ModelSpec& model) {
  ordered_json j;
  j["schema"] = kModelSchema;
  j["name"] = model.name;
  j["num_layers"] = model.num_layers;
  j["hidden_dim"] = model.hidden_dim;
  j["ffn_dim"] = model.ffn_dim;
  j["num_heads"] = model.num_heads;
  j["num_kv_heads"] = model.num_kv_heads;
  j["vocab_size"] = model.vocab_size;
  j["weight_dtype"] = to_string(model.weight_dtype);
  j["act_dtype"] = to_string(model.act_dtype);
  return j.dump(2) + "\n";
}

ModelSpec model_spec_from_json(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const std::exception& e) {
    throw std::runtime_error(std::string("model spec: invalid JSON: ") +
                             e.what());
  }
  if (!j.contains("schema") || j["schema"] != kModelSchema) {
    throw std::runtime_error(std::string("model spec: expected schema \"") +
                             kModelSchema + "\"");
  }
  ModelSpec model;
  try {
    model.name = j.at("name").get<std::string>();
    model.num_layers = j.at("num_layers").get<std::int64_t>();
    model.hidden_dim = j.at("hidden_dim").get<std::int64_t>();
    model.ffn_dim = j.at("ffn_dim").get<std::int64_t>();
    model.num_heads = j.at("num_heads").get<std::int64_t>();
    model.num_kv_heads = j.at("num_kv_heads").get<std::int64_t>();
    model.vocab_size = j.at("vocab_size").get<std::int64_t>();
    model.weight_dtype = dtype_from_string(j.at("weight_dtype"));
    model.act_dtype = dtype_from_string(j.at("act_dtype"));
  } catch (const ordered_json::exception& e) {
    throw std::runtime_error(std::string("model spec: ") + e.what());
  }
  validate(model);
  return model;
}

ModelSpec load_model_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open model spec: " + path.string());
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  return model_spec_from_json(buffer.str());
}

void save_model_spec(const std::filesystem::path& path,
                     const ModelSpec& model) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot write model spec: " + path.string());
  }
  out << model_spec_to_json(model);
}

}  // namespace hetsim
