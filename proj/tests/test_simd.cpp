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

#include <gtest/gtest.h>

#include <cstring>
#include <random>
#include <vector>

#include "matchprobe/rng.hpp"
#include "matchprobe/simd/kernels.hpp"

using namespace matchprobe;

namespace {

std::vector<double> random_vector(SplitMix64& rng, std::size_t n) {
  std::vector<double> v(n);
  for (auto& x : v) x = (static_cast<double>(rng.next() >> 11) * 0x1.0p-53 - 0.5) * 1e3;
  return v;
}

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

std::vector<const simd::KernelTable*> variants() {
  std::vector<const simd::KernelTable*> out;
  if (simd::isa_available(simd::Isa::avx2)) out.push_back(simd::avx2_kernels());
  if (simd::isa_available(simd::Isa::neon)) out.push_back(simd::neon_kernels());
  return out;
}

}  // namespace

TEST(Simd, ScalarReductionOrderIsCanonical) {
  // Left-to-right summation gives 2 here; the lane order absorbs both 1s.
  const std::vector<double> a{1e16, 1.0, -1e16, 1.0, 1.0};
  const std::vector<double> ones(a.size(), 1.0);
  const double l0 = 1e16, l1 = 1.0, l2 = -1e16, l3 = 1.0;
  const double expected = ((l0 + l1) + (l2 + l3)) + 1.0;
  EXPECT_EQ(expected, 1.0);
  EXPECT_TRUE(same_bits(simd::scalar_kernels().dot(a.data(), ones.data(), a.size()), expected));
}

TEST(Simd, VariantsMatchScalarBitForBit) {
  const auto tables = variants();
  if (tables.empty()) GTEST_SKIP() << "no vector ISA available";
  SplitMix64 rng(99);
  const auto& ref = simd::scalar_kernels();
  for (std::size_t n = 0; n <= 67; ++n) {
    for (int rep = 0; rep < 20; ++rep) {
      const auto a = random_vector(rng, n);
      const auto b = random_vector(rng, n);
      for (const auto* t : tables) {
        ASSERT_TRUE(same_bits(ref.dot(a.data(), b.data(), n), t->dot(a.data(), b.data(), n)))
            << simd::isa_name(t->isa) << " n=" << n;
        ASSERT_TRUE(same_bits(ref.squared_norm(a.data(), n), t->squared_norm(a.data(), n)));
        auto x = a, y = a;
        ref.scale(x.data(), n, 0.37);
        t->scale(y.data(), n, 0.37);
        for (std::size_t i = 0; i < n; ++i) ASSERT_TRUE(same_bits(x[i], y[i]));
      }
    }
  }
}

TEST(Simd, ForceIsaSwitchesActiveTable) {
  const auto before = simd::active().isa;
  simd::force_isa(simd::Isa::scalar);
  EXPECT_EQ(simd::active().isa, simd::Isa::scalar);
  simd::force_isa(before);
  EXPECT_EQ(simd::active().isa, before);
}
