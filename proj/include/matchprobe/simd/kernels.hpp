// Copyright 2026 The matchprobe Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <span>
#include <string_view>

// Dense double-precision kernels behind cosine similarity and the reference
// embedder. Every variant reduces in the same canonical order: four
// interleaved partial sums (element i goes to lane i % 4 over the largest
// multiple-of-4 prefix), combined as (l0 + l1) + (l2 + l3), then the tail
// added left to right. With contraction disabled this makes every variant
// bit-identical to the scalar reference.
namespace matchprobe::simd {

enum class Isa { scalar, avx2, neon };

std::string_view isa_name(Isa isa);

struct KernelTable {
  Isa isa;
  double (*dot)(const double* a, const double* b, std::size_t n);
  double (*squared_norm)(const double* a, std::size_t n);
  void (*scale)(double* a, std::size_t n, double factor);
};

const KernelTable& scalar_kernels();
// nullptr when the variant was not compiled for this target.
const KernelTable* avx2_kernels();
const KernelTable* neon_kernels();

// Compiled in and supported by the running CPU.
bool isa_available(Isa isa);

// Best available variant, unless MATCHPROBE_SIMD=scalar|avx2|neon overrides it
// or force_isa() was called.
const KernelTable& active();
void force_isa(Isa isa);

inline double dot(std::span<const double> a, std::span<const double> b) {
  return active().dot(a.data(), b.data(), a.size() < b.size() ? a.size() : b.size());
}
inline double squared_norm(std::span<const double> a) {
  return active().squared_norm(a.data(), a.size());
}
inline void scale(std::span<double> a, double factor) {
  active().scale(a.data(), a.size(), factor);
}

}  // namespace matchprobe::simd
