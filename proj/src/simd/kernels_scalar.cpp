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

namespace matchprobe::simd {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double lane[4] = {0.0, 0.0, 0.0, 0.0};
  const std::size_t body = n - n % 4;
  for (std::size_t i = 0; i < body; i += 4) {
    lane[0] = lane[0] + a[i] * b[i];
    lane[1] = lane[1] + a[i + 1] * b[i + 1];
    lane[2] = lane[2] + a[i + 2] * b[i + 2];
    lane[3] = lane[3] + a[i + 3] * b[i + 3];
  }
  double sum = (lane[0] + lane[1]) + (lane[2] + lane[3]);
  for (std::size_t i = body; i < n; ++i) sum = sum + a[i] * b[i];
  return sum;
}

double squared_norm_scalar(const double* a, std::size_t n) { return dot_scalar(a, a, n); }

void scale_scalar(double* a, std::size_t n, double factor) {
  for (std::size_t i = 0; i < n; ++i) a[i] *= factor;
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table{Isa::scalar, dot_scalar, squared_norm_scalar, scale_scalar};
  return table;
}

}  // namespace matchprobe::simd
