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

#include "matchprobe/simd/kernels.hpp"

#if defined(__x86_64__) && defined(__AVX2__)
#include <immintrin.h>

namespace matchprobe::simd {
namespace {

// Horizontal reduction in the canonical (l0 + l1) + (l2 + l3) order.
inline double reduce(__m256d acc) {
  alignas(32) double lane[4];
  _mm256_store_pd(lane, acc);
  return (lane[0] + lane[1]) + (lane[2] + lane[3]);
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  const std::size_t body = n - n % 4;
  for (std::size_t i = 0; i < body; i += 4) {
    const __m256d va = _mm256_loadu_pd(a + i);
    const __m256d vb = _mm256_loadu_pd(b + i);
    acc = _mm256_add_pd(acc, _mm256_mul_pd(va, vb));
  }
  double sum = reduce(acc);
  for (std::size_t i = body; i < n; ++i) sum = sum + a[i] * b[i];
  return sum;
}

double squared_norm_avx2(const double* a, std::size_t n) { return dot_avx2(a, a, n); }

void scale_avx2(double* a, std::size_t n, double factor) {
  const __m256d f = _mm256_set1_pd(factor);
  const std::size_t body = n - n % 4;
  for (std::size_t i = 0; i < body; i += 4) {
    _mm256_storeu_pd(a + i, _mm256_mul_pd(_mm256_loadu_pd(a + i), f));
  }
  for (std::size_t i = body; i < n; ++i) a[i] *= factor;
}

}  // namespace

const KernelTable* avx2_kernels() {
  static const KernelTable table{Isa::avx2, dot_avx2, squared_norm_avx2, scale_avx2};
  return &table;
}

}  // namespace matchprobe::simd

#else

namespace matchprobe::simd {
const KernelTable* avx2_kernels() { return nullptr; }
}  // namespace matchprobe::simd

#endif
