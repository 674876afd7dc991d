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
#include <string>

namespace hetsim {

enum class Device { Cpu, Gpu, Npu };

// Numeric formats handled by the cost model. W4A16 is 4-bit weights with one
// fp16 scale per 128-element group; activations stay fp16.
enum class DType { F32, F16, W4A16 };

const char* to_string(Device device);
const char* to_string(DType dtype);
Device device_from_string(const std::string& name);
DType dtype_from_string(const std::string& name);

// Dense rows x cols tensor stored in `dtype`.
struct Operand {
  std::int64_t rows = 0;
  std::int64_t cols = 0;
  DType dtype = DType::F16;

  std::int64_t elements() const { return rows * cols; }
  bool operator==(const Operand&) const = default;
};

// Storage bytes of `elements` values in `dtype`. W4A16 packs two values per
// byte plus 2 bytes of fp16 scale per 128-element quantization group.
std::int64_t tensor_bytes(std::int64_t elements, DType dtype);
std::int64_t operand_bytes(const Operand& operand);

// Output element width for a matmul whose streaming operand has `act` dtype.
std::int64_t output_element_bytes(DType act);

// C[m,k] = A[m,n] x B[n,k]. A is the streaming operand (activations), B is
// the stationary operand (weights).
struct MatmulDesc {
  Operand activation;  // [m, n]
  Operand weight;      // [n, k]

  std::int64_t m() const { return activation.rows; }
  std::int64_t n() const { return activation.cols; }
  std::int64_t k() const { return weight.cols; }
  bool operator==(const MatmulDesc&) const = default;
};

// Throws std::invalid_argument if inner dimensions disagree or any dimension
// is non-positive.
void validate(const MatmulDesc& desc);

// Smallest multiple of `quantum` that is >= `value`. quantum must be > 0.
std::int64_t round_up(std::int64_t value, std::int64_t quantum);

}  // namespace hetsim
