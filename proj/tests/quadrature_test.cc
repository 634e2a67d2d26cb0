//
// Copyright 2026 The rpac Authors
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
//

#include <cmath>

#include <gtest/gtest.h>

#include "rpac/quadrature.hpp"

namespace rpac {
namespace {

TEST(GaussLegendre, IntegratesPolynomialsExactly) {
  const GaussLegendreRule& rule = GaussLegendre(16);
  EXPECT_NEAR(rule.weights.sum(), 2.0, 1e-14);
  // x^30 is the highest even power a 16-point rule integrates exactly.
  const double integral = (rule.nodes.array().pow(30) * rule.weights.array()).sum();
  EXPECT_NEAR(integral, 2.0 / 31.0, 1e-14);
}

TEST(BuildRule, CoversIntervalsAndBreakpoints) {
  const Rule1d rule =
      BuildRule({{-1.0, 0.5}, {0.0, 2.0}, {5.0, 6.0}}, 160, QuadratureRule::kGaussLegendre, {1.0});
  // Integrates 1 over [-1, 2] u [5, 6].
  EXPECT_NEAR(rule.weights.sum(), 4.0, 1e-13);
  // |x - 1| has its kink on a panel edge, so the rule is exact.
  const double kink = (rule.weights.array() * (rule.nodes.array() - 1.0).abs()).sum();
  EXPECT_NEAR(kink, 2.0 + 0.5 + 0.5 * (25.0 - 16.0), 1e-12);
}

TEST(BuildRule, Trapezoid) {
  const Rule1d rule = BuildRule({{0.0, 1.0}}, 1001, QuadratureRule::kTrapezoid);
  EXPECT_NEAR((rule.weights.array() * rule.nodes.array().square()).sum(), 1.0 / 3.0, 1e-6);
}

TEST(BuildRule, RejectsEmpty) {
  EXPECT_THROW(BuildRule({{1.0, 1.0}}, 100, QuadratureRule::kGaussLegendre), InvalidArgument);
  EXPECT_THROW(BuildRule({{0.0, 1.0}}, 1, QuadratureRule::kGaussLegendre), InvalidArgument);
}

TEST(WithRefinement, RecordsCheck) {
  QuadratureSpec quad;
  quad.nodes = 64;
  const OracleValue v = WithRefinement(
      [](int n) {
        const Rule1d r = BuildRule({{0.0, M_PI}}, n, QuadratureRule::kGaussLegendre);
        return (r.weights.array() * r.nodes.array().sin()).sum();
      },
      quad);
  EXPECT_NEAR(v.value, 2.0, 1e-12);
  EXPECT_TRUE(v.converged);
  EXPECT_EQ(v.nodes, 64);
  EXPECT_LE(v.refinement_change(), 1e-6);
}

TEST(WithRefinement, EscalatesUntilSettled) {
  QuadratureSpec quad;
  quad.nodes = 32;
  const auto cubic = [](int n) { return 1.0 / (double(n) * n * n); };
  const OracleValue v = WithRefinement(cubic, quad);
  EXPECT_EQ(v.nodes, 128);
  EXPECT_EQ(v.value, cubic(128));
  EXPECT_TRUE(v.converged);
  quad.escalations = 1;
  EXPECT_THROW(WithRefinement(cubic, quad), NumericalError);
}

TEST(WithRefinement, ThrowsWhenUnsettled) {
  QuadratureSpec quad;
  quad.nodes = 32;
  EXPECT_THROW(WithRefinement([](int n) { return 1.0 / n; }, quad), NumericalError);
}

TEST(QuadratureRule, NamesRoundTrip) {
  for (auto r : {QuadratureRule::kGaussLegendre, QuadratureRule::kTrapezoid}) {
    EXPECT_EQ(ParseQuadratureRule(ToString(r)), r);
  }
  EXPECT_THROW(ParseQuadratureRule("simpson"), InvalidArgument);
}

}  // namespace
}  // namespace rpac
