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

#include "hetsim/types.hpp"

#include <stdexcept>

namespace hetsim {

const char* to_string(Device device) {
  switch (device) {
    case Device::Cpu: return "CPU";
    case Device::Gpu: return "GPU";
    case Device::Npu: return "NPU";
  }
  throw std::invalid_argument("unknown Device");
}

const char* to_string(DType dtype) {
  switch (dtype) {
    case DType::F32: return "f32";
    case DType::F16: return "f16";
    case DType::W4A16: return "w4a16";
  }
  throw std::invalid_argument("unknown DType");
}

Device device_from_string(const std::string& name) {
  if (name == "CPU") return Device::Cpu;
  if (name == "GPU") return Device::Gpu;
  if (name == "NPU") return Device::Npu;
  throw std::invalid_argument("unknown device name: " + name);
}

DType dtype_from_string(const std::string& name) {
  if (name == "f32") return DType::F32;
  if (name == "f16") return DType::F16;
  if (name == "w4a16") return DType::W4A16;
  throw std::invalid_argument("unknown dtype name: " + name);
}

std::int64_t tensor_bytes(std::int64_t elements, DType dtype) {
  if (elements < 0) throw std::invalid_argument("negative element count");
  switch (dtype) {
    case DType::F32: return 4 * elements;
    case DType::F16: return 2 * elements;
    case DType::W4A16:
      // Two packed values per byte plus an fp16 scale per 128-element group.
      return (elements + 1) / 2 + 2 * ((elements + 127) / 128);
  }
  throw std::invalid_argument("unknown DType");
}

std::int64_t operand_bytes(const Operand& operand) {
  return tensor_bytes(operand.elements(), operand.dtype);
}

std::int64_t output_element_bytes(DType act) {
  // W4A16 keeps fp16 activations, so matmul outputs are fp16 as well.
  return act == DType::F32 ? 4 : 2;
}

void validate(const MatmulDesc& desc) {
  if (desc.activation.rows <= 0 || desc.activation.cols <= 0 ||
      desc.weight.rows <= 0 || desc.weight.cols <= 0) {
    throw std::invalid_argument("matmul dimensions must be positive");
  }
  if (desc.activation.cols != desc.weight.rows) {
    throw std::invalid_argument("matmul inner dimensions disagree");
  }
}

std::int64_t round_up(std::int64_t value, std::int64_t quantum) {
  if (quantum <= 0) throw std::invalid_argument("round_up quantum must be > 0");
  return (value + quantum - 1) / quantum * quantum;
}

}  // namespace hetsim
