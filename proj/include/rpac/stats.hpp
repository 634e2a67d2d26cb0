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

#ifndef RPAC_STATS_HPP_
#define RPAC_STATS_HPP_

#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "rpac/core.hpp"

namespace rpac {

// Mean and covariance with 1/m normalization.
template <typename Derived>
std::pair<Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1>,
          Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>>
EmpiricalMeanCov(const Eigen::MatrixBase<Derived>& samples) {
  using Scalar = typename Derived::Scalar;
  using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  if (samples.rows() < 2) {
    throw InvalidArgument("empirical covariance needs at least 2 samples");
  }
  const Scalar m = static_cast<Scalar>(samples.rows());
  Vec mean = samples.colwise().sum().transpose() / m;
  Mat centered = samples.rowwise() - mean.transpose();
  Mat cov = (centered.transpose() * centered) / m;
  cov = (cov + cov.transpose()).eval() / Scalar(2);
  return {std::move(mean), std::move(cov)};
}

template <typename Derived>
bool IsUnitary(const Eigen::MatrixBase<Derived>& a, double tol = 1e-8) {
  if (a.rows() != a.cols()) return false;
  const auto gram = (a.transpose() * a).eval();
  return (gram - decltype(gram)::Identity(a.rows(), a.cols()))
             .cwiseAbs()
             .maxCoeff() <= tol;
}

// Per-column empirical variance (1/m) of samples * basis.
template <typename DerivedS, typename DerivedA>
Eigen::Matrix<typename DerivedS::Scalar, Eigen::Dynamic, 1> ProjectedVariances(
    const Eigen::MatrixBase<DerivedS>& samples,
    const Eigen::MatrixBase<DerivedA>& basis) {
  using Scalar = typename DerivedS::Scalar;
  if (basis.rows() != samples.cols() || !IsUnitary(basis)) {
    throw InvalidArgument("projection basis must be a d x d unitary matrix");
  }
  if (samples.rows() < 1) throw InvalidArgument("no samples to project");
  const auto g = (samples * basis).eval();
  const auto mean = g.colwise().mean().eval();
  return (g.rowwise() - mean).colwise().squaredNorm().transpose() /
         static_cast<Scalar>(samples.rows());
}

struct SpectralDecomposition {
  Eigen::VectorXd eigenvalues;   // descending
  Eigen::MatrixXd eigenvectors;  // columns

  Eigen::MatrixXd Reconstruct() const {
    return eigenvectors * eigenvalues.asDiagonal() * eigenvectors.transpose();
  }
};

SpectralDecomposition Eigendecompose(const Eigen::MatrixXd& cov);

// Kozachenko-Leonenko differential entropy in nats, Euclidean metric.
double KnnEntropy(const Eigen::MatrixXd& samples, int k = 3);

// -sum p ln p with 0 ln 0 = 0.
double DiscreteEntropy(const std::vector<double>& pmf);

struct KurtosisMoments {
  double sigma2 = 0.0;
  double kappa4 = 0.0;
};

KurtosisMoments ExcessKurtosis(const Eigen::VectorXd& samples);

}  // namespace rpac

#endif  // RPAC_STATS_HPP_
