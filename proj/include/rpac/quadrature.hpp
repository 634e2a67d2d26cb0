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

#ifndef RPAC_QUADRATURE_HPP_
#define RPAC_QUADRATURE_HPP_

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rpac/core.hpp"

namespace rpac {

enum class QuadratureRule { kGaussLegendre, kTrapezoid };

std::string ToString(QuadratureRule rule);
QuadratureRule ParseQuadratureRule(const std::string& name);

// Per-dimension integration rule. Without explicit bounds each oracle uses
// mean +- 12 standard deviations of its own density.
struct QuadratureSpec {
  std::optional<Eigen::VectorXd> lower;
  std::optional<Eigen::VectorXd> upper;
  int nodes = 2001;  // per dimension
  QuadratureRule rule = QuadratureRule::kGaussLegendre;
  double half_width_sigmas = 12.0;
  double refinement_tolerance = 1e-6;
  // Times the base rule may double when the check fails.
  int escalations = 2;

  bool operator==(const QuadratureSpec&) const = default;
};

// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
struct GaussLegendreRule {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;
};
const GaussLegendreRule& GaussLegendre(int n);

// A one-dimensional rule: nodes with weights.
struct Rule1d {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;
};

// Composite rule over the union of `intervals` (merged when they overlap),
// using about `nodes` points in total. Gauss-Legendre panels hold 16 nodes;
// panel edges always include every interval endpoint and every breakpoint.
Rule1d BuildRule(std::vector<std::pair<double, double>> intervals, int nodes,
                 QuadratureRule rule, const std::vector<double>& breakpoints = {});

// An oracle value with its node-doubling check.
struct OracleValue {
  double value = 0.0;
  double refined_value = 0.0;
  int nodes = 0;
  bool converged = false;

  double refinement_change() const { return std::abs(refined_value - value); }
};

// Evaluates `compute(nodes)` and `compute(2 * nodes)`; `value` is the first.
// While the change exceeds the tolerance the base rule doubles, up to
// `escalations` times; then throws NumericalError.
OracleValue WithRefinement(const std::function<double(int)>& compute,
                           const QuadratureSpec& quad);

}  // namespace rpac

#endif  // RPAC_QUADRATURE_HPP_
