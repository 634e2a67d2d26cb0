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

#include "rpac/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

namespace rpac {

std::string ToString(QuadratureRule rule) {
  return rule == QuadratureRule::kGaussLegendre ? "gauss_legendre" : "trapezoid";
}

QuadratureRule ParseQuadratureRule(const std::string& name) {
  if (name == "gauss_legendre") return QuadratureRule::kGaussLegendre;
  if (name == "trapezoid") return QuadratureRule::kTrapezoid;
  throw InvalidArgument("unknown quadrature rule '" + name + "'");
}

const GaussLegendreRule& GaussLegendre(int n) {
  if (n < 1) throw InvalidArgument("Gauss-Legendre needs at least one node");
  static std::mutex mutex;
  static std::map<int, GaussLegendreRule> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;

  GaussLegendreRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  // Newton iteration on P_n from the Chebyshev-like initial guess.
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double step = p1 / dp;
      x -= step;
      if (std::abs(step) < 1e-16) break;
    }
    double p0 = 1.0;
    double p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    if (n == 1) p0 = 1.0;
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return cache.emplace(n, std::move(rule)).first->second;
}

Rule1d BuildRule(std::vector<std::pair<double, double>> intervals, int nodes,
                 QuadratureRule rule, const std::vector<double>& breakpoints) {
  if (intervals.empty()) throw InvalidArgument("quadrature: no intervals");
  if (nodes < 2) throw InvalidArgument("quadrature: need at least 2 nodes");
  for (const auto& [a, b] : intervals) {
    if (!(a < b) || !std::isfinite(a) || !std::isfinite(b)) {
      throw InvalidArgument("quadrature: invalid interval");
    }
  }
  std::sort(intervals.begin(), intervals.end());
  std::vector<std::pair<double, double>> merged;
  for (const auto& iv : intervals) {
    if (!merged.empty() && iv.first <= merged.back().second) {
      merged.back().second = std::max(merged.back().second, iv.second);
    } else {
      merged.push_back(iv);
    }
  }
  // Split at breakpoints that fall inside an interval.
  std::vector<std::pair<double, double>> pieces;
  for (const auto& [a, b] : merged) {
    std::vector<double> cuts{a};
    for (double t : breakpoints) {
      if (t > a && t < b) cuts.push_back(t);
    }
    cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
      if (cuts[i + 1] > cuts[i]) pieces.emplace_back(cuts[i], cuts[i + 1]);
    }
  }
  double total = 0.0;
  for (const auto& [a, b] : pieces) total += b - a;

  std::vector<double> xs;
  std::vector<double> ws;
  if (rule == QuadratureRule::kGaussLegendre) {
    constexpr int kPanelNodes = 16;
    const int panels_total =
        std::max<int>(static_cast<int>(pieces.size()), nodes / kPanelNodes);
    const GaussLegendreRule& gl = GaussLegendre(kPanelNodes);
    for (const auto& [a, b] : pieces) {
      const int panels = std::max(
          1, static_cast<int>(std::lround(panels_total * (b - a) / total)));
      const double h = (b - a) / panels;
      for (int p = 0; p < panels; ++p) {
        const double lo = a + p * h;
        for (int i = 0; i < kPanelNodes; ++i) {
          xs.push_back(lo + 0.5 * h * (gl.nodes[i] + 1.0));
          ws.push_back(0.5 * h * gl.weights[i]);
        }
      }
    }
  } else {
    for (const auto& [a, b] : pieces) {
      const int n = std::max(
          2, static_cast<int>(std::lround(nodes * (b - a) / total)));
      const double h = (b - a) / (n - 1);
      for (int i = 0; i < n; ++i) {
        xs.push_back(a + i * h);
        ws.push_back((i == 0 || i == n - 1) ? 0.5 * h : h);
      }
    }
  }
  Rule1d out;
  out.nodes = Eigen::Map<Eigen::VectorXd>(xs.data(), xs.size());
  out.weights = Eigen::Map<Eigen::VectorXd>(ws.data(), ws.size());
  return out;
}

OracleValue WithRefinement(const std::function<double(int)>& compute,
                           const QuadratureSpec& quad) {
  if (quad.nodes < 2) throw InvalidArgument("quadrature: need at least 2 nodes");
  if (quad.escalations < 0) throw InvalidArgument("quadrature: escalations must be >= 0");
  OracleValue out;
  int nodes = quad.nodes;
  double coarse = compute(nodes);
  for (int level = 0;; ++level) {
    const double fine = compute(2 * nodes);
    if (!std::isfinite(coarse) || !std::isfinite(fine)) {
      throw NumericalError("quadrature produced a non-finite value");
    }
    out.nodes = nodes;
    out.value = coarse;
    out.refined_value = fine;
    out.converged = out.refinement_change() <= quad.refinement_tolerance;
    if (out.converged) return out;
    if (level == quad.escalations) break;
    nodes *= 2;
    coarse = fine;
  }
  throw NumericalError("quadrature did not settle under node doubling (change " +
                       std::to_string(out.refinement_change()) + " at " +
                       std::to_string(out.nodes) + " nodes)");
}

}  // namespace rpac
