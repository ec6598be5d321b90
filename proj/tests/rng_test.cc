// Copyright 2026 The advgrasp Authors
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

#include "advgrasp/rng.h"

#include <set>
#include <vector>

#include "gtest/gtest.h"

namespace advgrasp {
namespace {

TEST(RngTest, SameSeedSameStream) {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.NextU64(), b.NextU64());
}

TEST(RngTest, DeriveSeedDependsOnEveryTag) {
  std::set<std::uint64_t> seen;
  seen.insert(DeriveSeed(1, {}));
  seen.insert(DeriveSeed(1, {0}));
  seen.insert(DeriveSeed(1, {1}));
  seen.insert(DeriveSeed(1, {0, 1}));
  seen.insert(DeriveSeed(1, {1, 0}));
  seen.insert(DeriveSeed(2, {0}));
  EXPECT_EQ(seen.size(), 6u);
}

TEST(RngTest, UniformRange) {
  Rng rng(3);
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.Uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    const double v = rng.Uniform(-2.0, 5.0);
    ASSERT_GE(v, -2.0);
    ASSERT_LT(v, 5.0);
  }
}

// Chi-square goodness of fit of Below(7) over 70000 draws.
TEST(RngTest, BelowIsUniform) {
  Rng rng(9);
  std::vector<int> counts(7, 0);
  const int n = 70000;
  for (int i = 0; i < n; ++i) ++counts[rng.Below(7)];
  double chi2 = 0.0;
  for (int c : counts) chi2 += (c - n / 7.0) * (c - n / 7.0) / (n / 7.0);
  EXPECT_LT(chi2, 22.46);  // p = 0.001 at 6 degrees of freedom
}

}  // namespace
}  // namespace advgrasp
