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

#include "rpac/calibrators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rpac {
namespace {

void CheckSquarePair(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows() ||
      a.rows() < 1) {
    throw InvalidArgument("covariances must be square and of equal size");
  }
}

Eigen::LLT<Eigen::MatrixXd> FactorNoise(const Eigen::MatrixXd& sigma_b) {
  Eigen::LLT<Eigen::MatrixXd> llt(0.5 * (sigma_b + sigma_b.transpose()));
  if (llt.info() != Eigen::Success ||
      llt.matrixLLT().diagonal().minCoeff() <= 0.0) {
    throw InvalidArgument("noise covariance must be positive definite");
  }
  return llt;
}

double LogDetLlt(const Eigen::LLT<Eigen::MatrixXd>& llt) {
  return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

}  // namespace

double LogdetBound(const Eigen::MatrixXd& sigma_m, const Eigen::MatrixXd& sigma_b) {
  CheckSquarePair(sigma_m, sigma_b);
  const auto llt = FactorNoise(sigma_b);
  // L^{-1} sigma_M L^{-T} shares its eigenvalues with sigma_M sigma_B^{-1}.
  Eigen::MatrixXd w = llt.matrixL().solve(sigma_m);
  w = llt.matrixL().solve(w.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (w + w.transpose()),
                                                     Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) {
    throw NumericalError("generalized eigenvalue solve failed");
  }
  double total = 0.0;
  for (Eigen::Index i = 0; i < eig.eigenvalues().size(); ++i) {
    total += std::log1p(std::max(0.0, eig.eigenvalues()[i]));
  }
  return 0.5 * total;
}

double GaussianMiExact(const Eigen::MatrixXd& sigma_m,
                       const Eigen::MatrixXd& sigma_b) {
  CheckSquarePair(sigma_m, sigma_b);
  const auto llt_b = FactorNoise(sigma_b);
  Eigen::LLT<Eigen::MatrixXd> llt_z(sigma_m + sigma_b);
  if (llt_z.info() != Eigen::Success) {
    throw NumericalError("output covariance is not positive definite");
  }
  return 0.5 * (LogDetLlt(llt_z) - LogDetLlt(llt_b));
}

double DiagonalLogdet(const Eigen::VectorXd& signal, const Eigen::VectorXd& noise) {
  if (signal.size() != noise.size()) {
    throw InvalidArgument("signal and noise spectra differ in length");
  }
  double total = 0.0;
  for (Eigen::Index i = 0; i < signal.size(); ++i) {
    if (signal[i] <= 0.0) continue;
    if (!(noise[i] > 0.0)) return std::numeric_limits<double>::infinity();
    total += std::log1p(signal[i] / noise[i]);
  }
  return 0.5 * total;
}

// ---------------------------------------------------------------------------

CalibrationReport AutoPacFromSpectrum(const SpectralDecomposition& spectrum,
                                      double r, const AutoPacParams& params) {
  if (!(params.c >= 0.0) || !(params.v > 0.0) || !(params.beta_prime > 0.0)) {
    throw InvalidArgument("auto_pac needs c >= 0, v > 0 and beta' > 0");
  }
  if (!(r >= 0.0)) throw InvalidArgument("auto_pac needs a norm bound r >= 0");
  const Eigen::VectorXd lambda = spectrum.eigenvalues.cwiseMax(0.0);
  const Eigen::MatrixXd& u = spectrum.eigenvectors;
  const Eigen::Index d = lambda.size();
  const double c = params.c;
  const double v = params.v;

  int j0 = 0;
  for (Eigen::Index j = 0; j < d; ++j) {
    if (lambda[j] > c) ++j0;
  }
  // Branch test over j <= j0 against every other l.
  bool anisotropic = j0 > 0;
  const double threshold = r * std::sqrt(static_cast<double>(d) * c) + 2.0 * c;
  for (int j = 0; j < j0 && anisotropic; ++j) {
    for (Eigen::Index l = 0; l < d; ++l) {
      if (l != j && std::abs(lambda[j] - lambda[l]) <= threshold) {
        anisotropic = false;
        break;
      }
    }
  }

  CalibrationReport report;
  report.method = CalibrationMethod::kAutoPac;
  report.seed = params.seed;
  report.j0 = j0;
  report.norm_bound = r;
  report.signal_eigenvalues = lambda;
  Eigen::MatrixXd sigma_b;
  if (anisotropic) {
    report.branch = "anisotropic";
    const Eigen::ArrayXd shifted =
        (lambda.array() + 10.0 * c * v / params.beta_prime).sqrt();
    const double total = shifted.sum();
    // Noise variance is the reciprocal of the allocated precision.
    const Eigen::VectorXd variance = (shifted * total / (2.0 * v)).matrix();
    sigma_b = u * variance.asDiagonal() * u.transpose();
    report.noise_eigenvalues = variance;
  } else {
    report.branch = "isotropic";
    const double level = (lambda.sum() + static_cast<double>(d) * c) / (2.0 * v);
    sigma_b = level * Eigen::MatrixXd::Identity(d, d);
    report.noise_eigenvalues = Eigen::VectorXd::Constant(d, level);
  }
  report.noise = NoiseModel::GaussianFixed(sigma_b);
  report.noise_power = report.noise.power();
  if (report.noise_eigenvalues.minCoeff() > 0.0) {
    report.certified_bound =
        DiagonalLogdet(lambda, report.noise_eigenvalues);
  } else {
    report.certified_bound = lambda.sum() > 0.0
                                 ? std::numeric_limits<double>::infinity()
                                 : 0.0;
  }
  return report;
}

CalibrationReport AutoPacCalibrate(const Mechanism& mech,
                                   const DataDistribution& dist,
                                   const AutoPacParams& params) {
  if (params.m < 2) throw InvalidArgument("auto_pac needs m >= 2");
  if (!(params.c > 0.0)) throw InvalidArgument("auto_pac needs c > 0");
  const Eigen::MatrixXd y = SampleMechanismOutputs(
      mech, dist, params.m, DeriveSeed(params.seed, stream::kInputs));
  const auto [mean, cov] = EmpiricalMeanCov(y);
  const SpectralDecomposition spectrum = Eigendecompose(cov);
  double r = 0.0;
  bool heuristic = false;
  if (mech.output_norm_bound()) {
    r = *mech.output_norm_bound();
  } else {
    r = y.rowwise().norm().maxCoeff();
    heuristic = true;
  }
  CalibrationReport report = AutoPacFromSpectrum(spectrum, r, params);
  report.heuristic_norm_bound = heuristic;
  report.sample_count = params.m;
  return report;
}

// ---------------------------------------------------------------------------

Eigen::VectorXd EfficientPacAllocation(const Eigen::VectorXd& sigma, double beta) {
  if (!(beta > 0.0)) throw InvalidArgument("efficient_pac needs beta > 0");
  if (sigma.size() < 1 || sigma.minCoeff() < 0.0) {
    throw InvalidArgument("efficient_pac needs nonnegative variances");
  }
  const Eigen::ArrayXd root = sigma.array().sqrt();
  return (root * root.sum() / (2.0 * beta)).matrix();
}

CalibrationReport EfficientPacCalibrate(const Mechanism& mech,
                                        const DataDistribution& dist,
                                        const EfficientPacParams& params) {
  if (!(params.tau > 0.0)) throw InvalidArgument("efficient_pac needs tau > 0");
  if (!(params.beta > 0.0)) throw InvalidArgument("efficient_pac needs beta > 0");
  if (params.check_every < 2 || params.max_samples < 2 * params.check_every) {
    throw InvalidArgument("efficient_pac needs max_samples >= 2 * check_every");
  }
  if (mech.input_dim() != dist.support_dim()) {
    throw InvalidArgument("mechanism and distribution dimensions differ");
  }
  const int d = mech.output_dim();
  const Eigen::MatrixXd a =
      params.basis.size() == 0 ? Eigen::MatrixXd::Identity(d, d) : params.basis;
  if (a.rows() != d || !IsUnitary(a)) {
    throw InvalidArgument("efficient_pac basis must be a d x d unitary matrix");
  }

  Rng rng(DeriveSeed(params.seed, stream::kInputs));
  // Welford accumulators of the projected outputs g = A^T y.
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(d);
  Eigen::VectorXd m2 = Eigen::VectorXd::Zero(d);
  Eigen::VectorXd previous;
  bool converged = false;
  long n = 0;
  while (n < params.max_samples) {
    const Eigen::VectorXd y = mech(dist.Draw(rng));
    if (const auto& r = mech.output_norm_bound()) {
      if (y.norm() > *r * (1.0 + 1e-12)) {
        throw InvalidArgument("mechanism violated its output norm bound");
      }
    }
    const Eigen::VectorXd g = a.transpose() * y;
    ++n;
    const Eigen::VectorXd delta = g - mean;
    mean += delta / static_cast<double>(n);
    m2 += delta.cwiseProduct(g - mean);
    if (n % params.check_every != 0) continue;
    const Eigen::VectorXd current = m2 / static_cast<double>(n);
    if (previous.size() == d) {
      double change = 0.0;
      for (int i = 0; i < d; ++i) {
        const double denom = std::max(std::abs(previous[i]), 1e-300);
        const double diff = std::abs(current[i] - previous[i]);
        change = std::max(change, diff == 0.0 ? 0.0 : diff / denom);
      }
      if (change < params.tau) {
        previous = current;
        converged = true;
        break;
      }
    }
    previous = current;
  }
  const Eigen::VectorXd sigma = m2 / static_cast<double>(n);

  CalibrationReport report;
  report.method = CalibrationMethod::kEfficientPac;
  report.seed = params.seed;
  report.sample_count = n;
  report.converged = converged;
  report.convergence_rule =
      "max_relative_variance_change_every_" + std::to_string(params.check_every);
  const Eigen::VectorXd e = EfficientPacAllocation(sigma, params.beta);
  report.signal_eigenvalues = sigma;
  report.noise_eigenvalues = e;
  report.noise = NoiseModel::GaussianFixed(a * e.asDiagonal() * a.transpose());
  report.noise_power = report.noise.power();
  report.certified_bound = DiagonalLogdet(sigma, e);
  return report;
}

// ---------------------------------------------------------------------------

double WaterLevel(double r, double lambda) {
  return lambda * r / (r + std::sqrt(r * r + 2.0 * lambda * r));
}

namespace {

double WaterfillF(const Eigen::VectorXd& r, double lambda) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < r.size(); ++i) {
    total += std::log1p(r[i] / WaterLevel(r[i], lambda));
  }
  return 0.5 * total;
}

}  // namespace

WaterfillSolution WaterfillCalibrate(const Eigen::VectorXd& signal_eigenvalues,
                                     const Eigen::MatrixXd& basis, double beta) {
  const Eigen::VectorXd& r = signal_eigenvalues;
  const Eigen::Index d = r.size();
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    throw InvalidArgument("waterfill needs a finite beta > 0");
  }
  if (d < 1 || !(r.minCoeff() > 0.0) || !r.allFinite()) {
    throw InvalidArgument("waterfill needs positive signal eigenvalues");
  }
  WaterfillSolution out;
  out.basis = basis.size() == 0 ? Eigen::MatrixXd::Identity(d, d) : basis;
  if (out.basis.rows() != d || !IsUnitary(out.basis)) {
    throw InvalidArgument("waterfill basis must be a d x d unitary matrix");
  }

  // F is strictly decreasing in lambda; grow a bracket from 1.
  double lo = 1.0;
  double hi = 1.0;
  for (int it = 0; WaterfillF(r, lo) <= beta; ++it) {
    if (it > 2000) throw NumericalError("waterfill: cannot bracket from below");
    lo *= 0.5;
  }
  for (int it = 0; WaterfillF(r, hi) >= beta; ++it) {
    if (it > 2000) throw NumericalError("waterfill: cannot bracket from above");
    hi *= 2.0;
  }
  double lambda = std::sqrt(lo * hi);
  for (int it = 0; it < 4000; ++it) {
    lambda = std::sqrt(lo * hi);
    const double f = WaterfillF(r, lambda);
    if (std::abs(f - beta) <= 1e-10) break;
    if (f > beta) {
      lo = lambda;
    } else {
      hi = lambda;
    }
    if (hi / lo - 1.0 < 1e-15) break;
  }
  out.multiplier = lambda;
  out.noise_eigenvalues.resize(d);
  for (Eigen::Index i = 0; i < d; ++i) {
    out.noise_eigenvalues[i] = WaterLevel(r[i], lambda);
  }
  out.achieved_bound = WaterfillF(r, lambda);
  if (std::abs(out.achieved_bound - beta) > 1e-9) {
    throw NumericalError("waterfill bisection did not meet the budget");
  }
  return out;
}

WaterfillSolution WaterfillFromCovariance(const Eigen::MatrixXd& sigma_m,
                                          double beta) {
  const SpectralDecomposition spectrum = Eigendecompose(sigma_m);
  const Eigen::Index d = spectrum.eigenvalues.size();
  const double top = spectrum.eigenvalues.maxCoeff();
  if (!(top > 0.0)) {
    throw InvalidArgument("waterfill needs a covariance with some signal");
  }
  std::vector<Eigen::Index> active;
  for (Eigen::Index i = 0; i < d; ++i) {
    if (spectrum.eigenvalues[i] > 1e-12 * top) active.push_back(i);
  }
  Eigen::VectorXd r(active.size());
  for (std::size_t i = 0; i < active.size(); ++i) {
    r[i] = spectrum.eigenvalues[active[i]];
  }
  const WaterfillSolution sub = WaterfillCalibrate(r, {}, beta);
  WaterfillSolution out;
  out.basis = spectrum.eigenvectors;
  out.multiplier = sub.multiplier;
  out.achieved_bound = sub.achieved_bound;
  out.noise_eigenvalues = Eigen::VectorXd::Zero(d);
  for (std::size_t i = 0; i < active.size(); ++i) {
    out.noise_eigenvalues[active[i]] = sub.noise_eigenvalues[i];
  }
  return out;
}

CalibrationReport ToReport(const WaterfillSolution& solution,
                           const Eigen::VectorXd& signal_eigenvalues) {
  CalibrationReport report;
  report.method = CalibrationMethod::kWaterfill;
  report.noise = NoiseModel::GaussianFixed(
      solution.basis * solution.noise_eigenvalues.asDiagonal() *
      solution.basis.transpose());
  report.noise_power = report.noise.power();
  report.certified_bound = solution.achieved_bound;
  report.multiplier = solution.multiplier;
  report.signal_eigenvalues = signal_eigenvalues;
  report.noise_eigenvalues = solution.noise_eigenvalues;
  return report;
}

}  // namespace rpac
