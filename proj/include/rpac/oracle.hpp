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

#ifndef RPAC_ORACLE_HPP_
#define RPAC_ORACLE_HPP_

#include <vector>

#include <Eigen/Dense>

#include "rpac/core.hpp"
#include "rpac/quadrature.hpp"

namespace rpac {

// ---------------------------------------------------------------------------
// Discrete X through a Gaussian channel, d <= 2.
//
// `locations` holds one row per symbol (K x d). Integration runs in the
// eigenbasis of the noise covariance, where the mixture density of Y is a
// sum of separable terms.

// Differential entropy of Y = loc(X) + B.
OracleValue MixtureOutputEntropy(const std::vector<double>& pmf,
                                 const Eigen::MatrixXd& locations,
                                 const Eigen::MatrixXd& noise_cov,
                                 const QuadratureSpec& quad = {});

// H(Y) - H(Y|X).
OracleValue MiOracleDiscreteX(const std::vector<double>& pmf,
                              const Eigen::MatrixXd& locations,
                              const Eigen::MatrixXd& noise_cov,
                              const QuadratureSpec& quad = {});

// H(X) - MI.
OracleValue ConditionalEntropyOracle(const std::vector<double>& pmf,
                                     const Eigen::MatrixXd& locations,
                                     const Eigen::MatrixXd& noise_cov,
                                     const QuadratureSpec& quad = {});

struct DirectionalMmseResult {
  OracleValue mmse;  // E[(<Z,w> - E[<Z,w>|Y])^2]
  double g = 0.0;    // mmse / 2
};

DirectionalMmseResult DirectionalMmse(const std::vector<double>& pmf,
                                      const Eigen::MatrixXd& locations,
                                      const Eigen::MatrixXd& noise_cov,
                                      const Eigen::VectorXd& direction,
                                      const QuadratureSpec& quad = {});

// Entry (i, k) is ln P(X = k | Y = y_i) for each row y_i of `outputs`.
Eigen::MatrixXd PosteriorLogProbs(const std::vector<double>& pmf,
                                  const Eigen::MatrixXd& locations,
                                  const Eigen::MatrixXd& noise_cov,
                                  const Eigen::MatrixXd& outputs);

// ---------------------------------------------------------------------------
// One-dimensional Z = X + B with X from a named base density and
// B ~ N(0, noise_var). noise_var = 0 gives the base density itself.

enum class BaseDensity { kGaussian, kLaplace, kUniform, kGaussianMixture };

class ConvolvedDensity {
 public:
  static ConvolvedDensity Gaussian(double mean, double var, double noise_var);
  static ConvolvedDensity Laplace(double loc, double scale, double noise_var);
  static ConvolvedDensity Uniform(double a, double b, double noise_var);
  static ConvolvedDensity Mixture(std::vector<double> weights,
                                  std::vector<double> means,
                                  std::vector<double> vars, double noise_var);

  BaseDensity base() const { return base_; }
  double noise_var() const { return noise_var_; }
  double mean() const;
  double variance() const;
  double base_variance() const { return variance() - noise_var_; }

  // Vectorized log-density; -inf outside the support.
  Eigen::ArrayXd LogPdf(const Eigen::ArrayXd& z) const;
  double LogPdf(double z) const;

  // Same base density under a different noise variance.
  ConvolvedDensity WithNoise(double noise_var) const;

  // Support intervals and interior kinks for the quadrature rule.
  std::vector<std::pair<double, double>> Intervals(double half_width_sigmas) const;
  std::vector<double> Breakpoints() const;

  // Draws from Z.
  double Draw(Rng& rng) const;

 private:
  ConvolvedDensity() = default;

  BaseDensity base_ = BaseDensity::kGaussian;
  double noise_var_ = 0.0;
  double p0_ = 0.0;  // gaussian: mean; laplace: loc; uniform: a
  double p1_ = 0.0;  // gaussian: var; laplace: scale; uniform: b
  std::vector<double> weights_;
  std::vector<double> means_;
  std::vector<double> vars_;
};

// Differential entropy of Z by quadrature.
OracleValue DifferentialEntropy(const ConvolvedDensity& density,
                                const QuadratureSpec& quad = {});

// D_KL(P_Z || N(E Z, Var Z)), moments taken by the same quadrature.
OracleValue KlToMomentMatchedGaussian(const ConvolvedDensity& density,
                                      const QuadratureSpec& quad = {});

// I(X; X + B) = h(Z) - h(B) for noise_var > 0.
OracleValue MiOracleContinuous(const ConvolvedDensity& density,
                               const QuadratureSpec& quad = {});

// ---------------------------------------------------------------------------
// Grid oracle for the trace-minimal diagonal allocation, d = 2.

struct BruteForceResult {
  double trace = 0.0;
  Eigen::Vector2d ell = Eigen::Vector2d::Zero();
  bool boundary_hit = false;
  long feasible_points = 0;
};

struct BruteForceGrid {
  int resolution = 801;   // points per axis and pass
  double lower = 1e-6;    // initial log-grid bounds on each l_i
  double upper = 1e6;
  double band = 1e-4;     // feasibility band around beta
  int zoom_passes = 8;
};

BruteForceResult BruteForceTraceMin(const Eigen::Vector2d& r, double beta,
                                    const BruteForceGrid& grid = {});

}  // namespace rpac

#endif  // RPAC_ORACLE_HPP_
