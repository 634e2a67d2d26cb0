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

#include "rpac/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>

#include <boost/math/special_functions/digamma.hpp>

namespace rpac {

SpectralDecomposition Eigendecompose(const Eigen::MatrixXd& cov) {
  if (cov.rows() != cov.cols() || cov.rows() < 1) {
    throw InvalidArgument("eigendecompose needs a non-empty square matrix");
  }
  const double scale = std::max(1.0, cov.cwiseAbs().maxCoeff());
  if ((cov - cov.transpose()).cwiseAbs().maxCoeff() > 1e-8 * scale) {
    throw InvalidArgument("eigendecompose needs a symmetric matrix");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(
      0.5 * (cov + cov.transpose()));
  if (eig.info() != Eigen::Success) {
    throw NumericalError("symmetric eigensolver did not converge");
  }
  // Eigen returns ascending order.
  SpectralDecomposition out;
  out.eigenvalues = eig.eigenvalues().reverse();
  out.eigenvectors = eig.eigenvectors().rowwise().reverse();
  return out;
}

double KnnEntropy(const Eigen::MatrixXd& samples, int k) {
  const Eigen::Index m = samples.rows();
  const Eigen::Index d = samples.cols();
  if (k < 1) throw InvalidArgument("knn_entropy: k must be at least 1");
  if (m <= k) throw InvalidArgument("knn_entropy: need more samples than k");
  if (d < 1) throw InvalidArgument("knn_entropy: empty sample dimension");
  if (!samples.allFinite()) throw InvalidArgument("knn_entropy: non-finite sample");

  // Sort by the first coordinate; sweep outwards and prune on that coordinate.
  std::vector<Eigen::Index> order(m);
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    return samples(a, 0) < samples(b, 0);
  });
  Eigen::MatrixXd sorted(m, d);
  for (Eigen::Index i = 0; i < m; ++i) sorted.row(i) = samples.row(order[i]);

  constexpr double kFloor = 1e-12;
  double sum_log = 0.0;
  std::priority_queue<double> best;  // max-heap of squared distances
  for (Eigen::Index i = 0; i < m; ++i) {
    best = {};
    auto consider = [&](Eigen::Index j) {
      const double dist2 = (sorted.row(j) - sorted.row(i)).squaredNorm();
      if (static_cast<int>(best.size()) < k) {
        best.push(dist2);
      } else if (dist2 < best.top()) {
        best.pop();
        best.push(dist2);
      }
    };
    Eigen::Index lo = i - 1;
    Eigen::Index hi = i + 1;
    while (lo >= 0 || hi < m) {
      const double gap_lo =
          lo >= 0 ? sorted(i, 0) - sorted(lo, 0) : HUGE_VAL;
      const double gap_hi =
          hi < m ? sorted(hi, 0) - sorted(i, 0) : HUGE_VAL;
      const double gap = std::min(gap_lo, gap_hi);
      if (static_cast<int>(best.size()) == k && gap * gap > best.top()) break;
      if (gap_lo <= gap_hi) {
        consider(lo--);
      } else {
        consider(hi++);
      }
    }
    sum_log += std::log(std::max(std::sqrt(best.top()), kFloor));
  }
  const double dd = static_cast<double>(d);
  const double log_unit_ball =
      0.5 * dd * std::log(M_PI) - std::lgamma(0.5 * dd + 1.0);
  return boost::math::digamma(static_cast<double>(m)) -
         boost::math::digamma(static_cast<double>(k)) + log_unit_ball +
         dd * sum_log / static_cast<double>(m);
}

double DiscreteEntropy(const std::vector<double>& pmf) {
  if (pmf.empty()) throw InvalidArgument("discrete_entropy: empty pmf");
  double total = 0.0;
  double h = 0.0;
  for (double p : pmf) {
    if (!(p >= 0.0) || !std::isfinite(p)) {
      throw InvalidArgument("discrete_entropy: negative or non-finite entry");
    }
    total += p;
    if (p > 0.0) h -= p * std::log(p);
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw InvalidArgument("discrete_entropy: pmf does not sum to 1");
  }
  return h;
}

KurtosisMoments ExcessKurtosis(const Eigen::VectorXd& samples) {
  if (samples.size() < 4) {
    throw InvalidArgument("excess_kurtosis needs at least 4 samples");
  }
  const Eigen::ArrayXd z = samples.array() - samples.mean();
  const double m2 = z.square().mean();
  const double m4 = z.square().square().mean();
  return {m2, m4 - 3.0 * m2 * m2};
}

}  // namespace rpac
