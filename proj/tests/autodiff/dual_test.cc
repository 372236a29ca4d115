// Copyright 2026 The DiffABM Authors
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

#include "diffabm/autodiff/dual.h"

#include <cmath>

#include "diffabm/autodiff/scalar.h"
#include "gtest/gtest.h"

namespace diffabm::ad {
namespace {

TEST(DualTest, ProductAndQuotientRules) {
  const auto a = Dual<2>::Seeded(2.0, 0);
  const auto b = Dual<2>::Seeded(5.0, 1);
  const auto p = a * b;
  EXPECT_EQ(p.v, 10.0);
  EXPECT_EQ(p.d[0], 5.0);
  EXPECT_EQ(p.d[1], 2.0);
  const auto q = a / b;
  EXPECT_DOUBLE_EQ(q.d[0], 1.0 / 5.0);
  EXPECT_DOUBLE_EQ(q.d[1], -2.0 / 25.0);
}

TEST(DualTest, MatchesTapeGradient) {
  auto f = [](const auto& x, const auto& y) {
    return Exp(-x * y) + Tanh(x) * Log1p(y) - Sqrt(x + y) / Sigmoid(y);
  };
  Tape tape;
  Var x = tape.Input("x", 0.7);
  Var y = tape.Input("y", 1.3);
  const auto grad = tape.Backward(f(x, y));
  const auto d = f(Dual<2>::Seeded(0.7, 0), Dual<2>::Seeded(1.3, 1));
  EXPECT_NEAR(d.d[0], grad[0], 1e-14);
  EXPECT_NEAR(d.d[1], grad[1], 1e-14);
  EXPECT_NEAR(d.v, f(0.7, 1.3), 1e-15);
}

TEST(ScalarTest, ClampIsConstantOutside) {
  const auto x = Dual<1>::Seeded(2.0, 0);
  EXPECT_EQ(Clamp(x, 0.0, 1.0).d[0], 0.0);
  EXPECT_EQ(Clamp(x, 0.0, 3.0).d[0], 1.0);
}

TEST(ScalarTest, StraightThroughKeepsSoftDerivative) {
  const auto soft = Dual<1>::Seeded(0.3, 0);
  const auto st = StraightThrough(1.0, soft);
  EXPECT_EQ(st.v, 1.0);
  EXPECT_EQ(st.d[0], 1.0);
  Tape tape;
  Var s = tape.Input("s", 0.3);
  Var h = StraightThrough(0.0, s * 2.0);
  EXPECT_EQ(h.value(), 0.0);
  EXPECT_EQ(tape.Backward(h)[0], 2.0);
}

}  // namespace
}  // namespace diffabm::ad
