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

#ifndef RPAC_CALIBRATORS_HPP_
#define RPAC_CALIBRATORS_HPP_

#include <cstdint>
#include <string>

#include <Eigen/Dense>

#include "rpac/core.hpp"
#include "rpac/stats.hpp"

namespace rpac {

// 1/2 ln det(I + sigma_M sigma_B^{-1}) from the generalized eigenvalues of
// (sigma_M, sigma_B). Rejects a sigma_B that is not positive definite.
double LogdetBound(const Eigen::MatrixXd& sigma_m, const Eigen::MatrixXd& sigma_b);

// 1/2 [ln det(sigma_M + sigma_B) - ln det sigma_B], the exact MI of a
// Gaussian signal through a Gaussian channel.
double GaussianMiExact(const Eigen::MatrixXd& sigma_m,
                       const Eigen::MatrixXd& sigma_b);

// Same quantity for a diagonal problem: 1/2 sum ln(1 + r_i / l_i).
double DiagonalLogdet(const Eigen::VectorXd& signal, const Eigen::VectorXd& noise);

// ---------------------------------------------------------------------------
// Auto-PAC

struct AutoPacParams {
  int m = 1000;
  double c = 1e-6;           // variance floor
  double v = 1.0;            // MI target, nats
  double beta_prime = 1.0;   // MI slack
  std::uint64_t seed = 0;
};

// Noise from an estimated spectrum. `c` may be zero here, which removes the
// estimation slack; `r` is the output norm bound used by the branch test.
CalibrationReport AutoPacFromSpectrum(const SpectralDecomposition& spectrum,
                                      double r, const AutoPacParams& params);

// Samples the mechanism, estimates the output covariance and calibrates.
// Without a declared norm bound the empirical maximum is used and the report
// is flagged heuristic.
CalibrationReport AutoPacCalibrate(const Mechanism& mech,
                                   const DataDistribution& dist,
                                   const AutoPacParams& params);

// ---------------------------------------------------------------------------
// Efficient-PAC

struct EfficientPacParams {
  double tau = 1e-3;
  double beta = 1.0;
  Eigen::MatrixXd basis;  // empty means identity
  long max_samples = 100000;
  int check_every = 100;
  std::uint64_t seed = 0;
};

// e_i = sqrt(sigma_i) * sum_j sqrt(sigma_j) / (2 beta).
Eigen::VectorXd EfficientPacAllocation(const Eigen::VectorXd& sigma, double beta);

// Streams projected outputs until the max relative change of per-direction
// variance between checks falls below tau, or max_samples is hit
// (report.converged = false, last iterate kept).
CalibrationReport EfficientPacCalibrate(const Mechanism& mech,
                                        const DataDistribution& dist,
                                        const EfficientPacParams& params);

// ---------------------------------------------------------------------------
// Water-filling

struct WaterfillSolution {
  Eigen::VectorXd noise_eigenvalues;
  double multiplier = 0.0;
  double achieved_bound = 0.0;
  Eigen::MatrixXd basis;
};

// l_i(lambda) = lambda r_i / (r_i + sqrt(r_i^2 + 2 lambda r_i)).
double WaterLevel(double r, double lambda);

// Trace-minimal Gaussian noise with 1/2 sum ln(1 + r_i / l_i) = beta.
// An empty basis means the identity.
WaterfillSolution WaterfillCalibrate(const Eigen::VectorXd& signal_eigenvalues,
                                     const Eigen::MatrixXd& basis, double beta);

// Water-filling on an estimated covariance; directions with no signal
// (eigenvalue below 1e-12 of the largest) get zero noise.
WaterfillSolution WaterfillFromCovariance(const Eigen::MatrixXd& sigma_m,
                                          double beta);

CalibrationReport ToReport(const WaterfillSolution& solution,
                           const Eigen::VectorXd& signal_eigenvalues);

}  // namespace rpac

#endif  // RPAC_CALIBRATORS_HPP_
