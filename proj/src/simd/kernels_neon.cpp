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

#if defined(__aarch64__) && defined(__ARM_NEON)
#include <arm_neon.h>

namespace matchprobe::simd {
namespace {

// Two 2-lane registers hold lanes {0,1} and {2,3} of the canonical order.
double dot_neon(const double* a, const double* b, std::size_t n) {
  float64x2_t lo = vdupq_n_f64(0.0);
  float64x2_t hi = vdupq_n_f64(0.0);
  const std::size_t body = n - n % 4;
  for (std::size_t i = 0; i < body; i += 4) {
    lo = vaddq_f64(lo, vmulq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
    hi = vaddq_f64(hi, vmulq_f64(vld1q_f64(a + i + 2), vld1q_f64(b + i + 2)));
  }
  double sum = (vgetq_lane_f64(lo, 0) + vgetq_lane_f64(lo, 1)) +
               (vgetq_lane_f64(hi, 0) + vgetq_lane_f64(hi, 1));
  for (std::size_t i = body; i < n; ++i) sum = sum + a[i] * b[i];
  return sum;
}

double squared_norm_neon(const double* a, std::size_t n) { return dot_neon(a, a, n); }

void scale_neon(double* a, std::size_t n, double factor) {
  const float64x2_t f = vdupq_n_f64(factor);
  const std::size_t body = n - n % 2;
  for (std::size_t i = 0; i < body; i += 2) vst1q_f64(a + i, vmulq_f64(vld1q_f64(a + i), f));
  for (std::size_t i = body; i < n; ++i) a[i] *= factor;
}

}  // namespace

const KernelTable* neon_kernels() {
  static const KernelTable table{Isa::neon, dot_neon, squared_norm_neon, scale_neon};
  return &table;
}

}  // namespace matchprobe::simd

#else

namespace matchprobe::simd {
const KernelTable* neon_kernels() { return nullptr; }
}  // namespace matchprobe::simd

#endif
