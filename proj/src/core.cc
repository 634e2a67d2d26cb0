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

#include "rpac/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>

namespace rpac {
namespace {

std::uint64_t SplitMix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double XLogX(double t) { return t > 0.0 ? t * std::log(t) : 0.0; }

}  // namespace

std::uint64_t DeriveSeed(std::uint64_t master, std::uint64_t stream,
                         std::uint64_t index) {
  return SplitMix64(master ^ (SplitMix64(stream) + index));
}

void StandardNormal(Rng& rng, Eigen::Ref<Eigen::VectorXd> out) {
  std::normal_distribution<double> normal(0.0, 1.0);
  for (Eigen::Index i = 0; i < out.size(); ++i) out[i] = normal(rng);
}

// ---------------------------------------------------------------------------

DataDistribution DataDistribution::Discrete(std::vector<double> pmf,
                                            std::vector<Eigen::VectorXd> atoms,
                                            std::string name) {
  if (pmf.empty()) throw InvalidArgument("discrete distribution: empty pmf");
  if (pmf.size() != atoms.size()) {
    throw InvalidArgument("discrete distribution: pmf and atoms differ in size");
  }
  double total = 0.0;
  for (double p : pmf) {
    if (!(p >= 0.0) || !std::isfinite(p)) {
      throw InvalidArgument("discrete distribution: negative pmf entry");
    }
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw InvalidArgument("discrete distribution: pmf does not sum to 1");
  }
  const Eigen::Index dim = atoms.front().size();
  if (dim < 1) throw InvalidArgument("discrete distribution: empty atom");
  for (const auto& a : atoms) {
    if (a.size() != dim) {
      throw InvalidArgument("discrete distribution: atoms differ in dimension");
    }
  }
  DataDistribution dist;
  dist.kind_ = DistributionKind::kDiscrete;
  dist.support_dim_ = static_cast<int>(dim);
  dist.name_ = std::move(name);
  dist.cdf_.resize(pmf.size());
  std::partial_sum(pmf.begin(), pmf.end(), dist.cdf_.begin());
  dist.pmf_ = std::move(pmf);
  dist.atoms_ = std::move(atoms);
  return dist;
}

DataDistribution DataDistribution::Continuous(
    int support_dim, Sampler sampler, std::optional<LogDensity> log_density,
    std::string name) {
  if (support_dim < 1) throw InvalidArgument("support_dim must be positive");
  if (!sampler) throw InvalidArgument("continuous distribution needs a sampler");
  DataDistribution dist;
  dist.kind_ = DistributionKind::kContinuous;
  dist.support_dim_ = support_dim;
  dist.name_ = std::move(name);
  dist.sampler_ = std::move(sampler);
  dist.log_density_ = std::move(log_density);
  return dist;
}

double DataDistribution::log_density(const Eigen::VectorXd& x) const {
  if (!log_density_) {
    throw InvalidArgument("distribution '" + name_ + "' has no log-density");
  }
  return (*log_density_)(x);
}

Eigen::VectorXd DataDistribution::Draw(Rng& rng, int* symbol) const {
  if (kind_ == DistributionKind::kContinuous) {
    if (symbol != nullptr) *symbol = -1;
    return sampler_(rng);
  }
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  const double u = uniform(rng) * cdf_.back();
  auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  int k = static_cast<int>(std::distance(cdf_.begin(), it));
  k = std::min<int>(k, static_cast<int>(pmf_.size()) - 1);
  // Skip zero-mass symbols that share a cdf value with their predecessor.
  while (pmf_[k] == 0.0 && k > 0) --k;
  if (symbol != nullptr) *symbol = k;
  return atoms_[k];
}

Draws DataDistribution::Sample(int m, std::uint64_t seed) const {
  if (m < 1) throw InvalidArgument("sample count must be at least 1");
  Rng rng(seed);
  Draws out;
  out.values.resize(m, support_dim_);
  if (is_discrete()) out.symbols.resize(m);
  for (int k = 0; k < m; ++k) {
    int symbol = -1;
    Eigen::VectorXd x = Draw(rng, &symbol);
    if (x.size() != support_dim_) {
      throw InvalidArgument("sampler returned a value of the wrong dimension");
    }
    out.values.row(k) = x.transpose();
    if (is_discrete()) out.symbols[k] = symbol;
  }
  return out;
}

// ---------------------------------------------------------------------------

Mechanism::Mechanism(std::string name, int input_dim, int output_dim, Map eval,
                     std::optional<double> output_norm_bound)
    : name_(std::move(name)),
      input_dim_(input_dim),
      output_dim_(output_dim),
      eval_(std::move(eval)),
      norm_bound_(output_norm_bound) {
  if (input_dim_ < 1 || output_dim_ < 1) {
    throw InvalidArgument("mechanism dimensions must be positive");
  }
  if (!eval_) throw InvalidArgument("mechanism needs an evaluation map");
  if (norm_bound_ && !(*norm_bound_ >= 0.0)) {
    throw InvalidArgument("output norm bound must be nonnegative");
  }
}

Eigen::VectorXd Mechanism::operator()(const Eigen::VectorXd& x) const {
  if (x.size() != input_dim_) {
    throw InvalidArgument("mechanism '" + name_ + "' expects input dimension " +
                          std::to_string(input_dim_));
  }
  Eigen::VectorXd y = eval_(x);
  if (y.size() != output_dim_) {
    throw InvalidArgument("mechanism '" + name_ +
                          "' produced an output of the wrong dimension");
  }
  return y;
}

MechanismSample SampleMechanism(const Mechanism& mech,
                                const DataDistribution& dist, int m,
                                std::uint64_t seed) {
  if (m < 1) throw InvalidArgument("sample count must be at least 1");
  if (mech.input_dim() != dist.support_dim()) {
    throw InvalidArgument("mechanism input dimension " +
                          std::to_string(mech.input_dim()) +
                          " does not match distribution dimension " +
                          std::to_string(dist.support_dim()));
  }
  Draws draws = dist.Sample(m, seed);
  MechanismSample out;
  out.outputs.resize(m, mech.output_dim());
  for (int k = 0; k < m; ++k) {
    out.outputs.row(k) = mech(draws.values.row(k).transpose()).transpose();
  }
  if (const auto& r = mech.output_norm_bound()) {
    const double worst = out.outputs.rowwise().norm().maxCoeff();
    if (worst > *r * (1.0 + 1e-12) + 1e-300) {
      throw InvalidArgument("mechanism '" + mech.name() +
                            "' violated its output norm bound");
    }
  }
  out.symbols = std::move(draws.symbols);
  return out;
}

Eigen::MatrixXd SampleMechanismOutputs(const Mechanism& mech,
                                       const DataDistribution& dist, int m,
                                       std::uint64_t seed) {
  return SampleMechanism(mech, dist, m, seed).outputs;
}

// ---------------------------------------------------------------------------

NoiseModel NoiseModel::GaussianFixed(const Eigen::MatrixXd& covariance) {
  if (covariance.rows() != covariance.cols() || covariance.rows() < 1) {
    throw InvalidArgument("noise covariance must be square and non-empty");
  }
  if (!covariance.allFinite()) {
    throw InvalidArgument("noise covariance has non-finite entries");
  }
  if ((covariance - covariance.transpose()).cwiseAbs().maxCoeff() > 1e-10) {
    throw InvalidArgument("noise covariance is not symmetric");
  }
  NoiseModel noise;
  noise.kind_ = NoiseKind::kGaussianFixed;
  noise.dim_ = static_cast<int>(covariance.rows());
  noise.covariance_ = 0.5 * (covariance + covariance.transpose());
  noise.power_ = noise.covariance_.trace();
  noise.diagonal_ = noise.covariance_.isDiagonal(0.0);
  if (noise.diagonal_) {
    const Eigen::VectorXd diag = noise.covariance_.diagonal();
    if (diag.minCoeff() < -1e-10) {
      throw InvalidArgument("noise covariance has a negative eigenvalue");
    }
    noise.factor_ = diag.cwiseMax(0.0).cwiseSqrt().asDiagonal();
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(noise.covariance_);
    if (eig.info() != Eigen::Success) {
      throw NumericalError("eigendecomposition of noise covariance failed");
    }
    if (eig.eigenvalues().minCoeff() < -1e-10) {
      throw InvalidArgument("noise covariance has a negative eigenvalue");
    }
    noise.factor_ = eig.eigenvectors() *
                    eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
  }
  return noise;
}

NoiseModel NoiseModel::GaussianDiag(const Eigen::VectorXd& log_std,
                                    const Eigen::MatrixXd& basis) {
  const Eigen::Index d = log_std.size();
  if (d < 1) throw InvalidArgument("log_std must be non-empty");
  if (!log_std.allFinite()) throw InvalidArgument("log_std must be finite");
  NoiseModel noise;
  noise.kind_ = NoiseKind::kGaussianDiagParam;
  noise.dim_ = static_cast<int>(d);
  noise.log_std_ = log_std;
  noise.basis_ = basis.size() == 0 ? Eigen::MatrixXd::Identity(d, d) : basis;
  if (noise.basis_.rows() != d || noise.basis_.cols() != d) {
    throw InvalidArgument("noise basis must be d x d");
  }
  const Eigen::MatrixXd gram = noise.basis_.transpose() * noise.basis_;
  if ((gram - Eigen::MatrixXd::Identity(d, d)).cwiseAbs().maxCoeff() > 1e-8) {
    throw InvalidArgument("noise basis must be orthonormal");
  }
  const Eigen::VectorXd var = (2.0 * log_std.array()).exp().matrix();
  noise.covariance_ =
      noise.basis_ * var.asDiagonal() * noise.basis_.transpose();
  noise.factor_ = noise.basis_ * log_std.array().exp().matrix().asDiagonal();
  noise.power_ = var.sum();
  return noise;
}

NoiseModel NoiseModel::General(int dim, Sampler sampler, LogDensity log_density,
                               double power) {
  if (dim < 1) throw InvalidArgument("noise dimension must be positive");
  if (!sampler) throw InvalidArgument("general noise needs a sampler");
  NoiseModel noise;
  noise.kind_ = NoiseKind::kGeneral;
  noise.dim_ = dim;
  noise.sampler_ = std::move(sampler);
  noise.log_density_ = std::move(log_density);
  noise.power_ = power;
  return noise;
}

const Eigen::MatrixXd& NoiseModel::covariance() const {
  if (!is_gaussian()) {
    throw InvalidArgument("covariance requested from a non-Gaussian noise model");
  }
  return covariance_;
}

double NoiseModel::power() const { return power_; }

Eigen::VectorXd NoiseModel::Draw(Rng& rng) const {
  if (kind_ == NoiseKind::kGeneral) return sampler_(rng);
  Eigen::VectorXd eps(dim_);
  StandardNormal(rng, eps);
  if (kind_ == NoiseKind::kGaussianFixed && diagonal_) {
    return factor_.diagonal().cwiseProduct(eps);
  }
  if (kind_ == NoiseKind::kGaussianDiagParam) {
    // Reparametrization: basis * (sigma .* eps).
    return basis_ * log_std_.array().exp().matrix().cwiseProduct(eps);
  }
  return factor_ * eps;
}

double NoiseModel::log_density(const Eigen::VectorXd& b) const {
  if (kind_ == NoiseKind::kGeneral) {
    if (!log_density_) throw InvalidArgument("noise model has no log-density");
    return log_density_(b);
  }
  Eigen::LLT<Eigen::MatrixXd> llt(covariance_);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("noise covariance is singular; no density");
  }
  const Eigen::VectorXd w = llt.matrixL().solve(b);
  const double logdet =
      2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
  return -0.5 * (w.squaredNorm() + logdet + dim_ * std::log(2.0 * M_PI));
}

Eigen::MatrixXd Perturb(const Eigen::MatrixXd& outputs, const NoiseModel& noise,
                        std::uint64_t seed) {
  if (outputs.cols() != noise.dim()) {
    throw InvalidArgument("noise dimension " + std::to_string(noise.dim()) +
                          " does not match output dimension " +
                          std::to_string(outputs.cols()));
  }
  Rng rng(seed);
  Eigen::MatrixXd out = outputs;
  for (Eigen::Index k = 0; k < out.rows(); ++k) {
    out.row(k) += noise.Draw(rng).transpose();
  }
  return out;
}

// ---------------------------------------------------------------------------

BudgetSpec ResidualToMiBudget(const BudgetSpec& spec) {
  if (!spec.data_entropy) {
    throw InvalidArgument(
        "budget conversion needs H(X); supply an entropy estimate");
  }
  const double h = *spec.data_entropy;
  BudgetSpec out = spec;
  if (out.residual_floor && !out.mi_cap) {
    out.mi_cap = h - *out.residual_floor;
  } else if (out.mi_cap && !out.residual_floor) {
    out.residual_floor = h - *out.mi_cap;
  } else if (!out.mi_cap && !out.residual_floor) {
    throw InvalidArgument("budget spec carries neither beta nor beta-hat");
  } else if (std::abs(*out.mi_cap - (h - *out.residual_floor)) > 1e-9) {
    throw InvalidArgument("budget spec is inconsistent: beta != H - beta-hat");
  }
  if (*out.mi_cap < 0.0) {
    throw InvalidArgument("budget implies a negative MI cap");
  }
  out.primary = spec.primary == BudgetConvention::kResidualFloor
                    ? BudgetConvention::kMiCap
                    : BudgetConvention::kResidualFloor;
  return out;
}

double PacAdvantageKl(double delta, double delta_o) {
  if (!(delta >= 0.0 && delta <= 1.0)) {
    throw InvalidArgument("delta must lie in [0, 1]");
  }
  if (!(delta_o > 0.0 && delta_o < 1.0)) {
    throw InvalidArgument("delta_o must lie in (0, 1)");
  }
  return delta_o * XLogX(delta / delta_o) +
         (1.0 - delta_o) * XLogX((1.0 - delta) / (1.0 - delta_o));
}

double ResidualPacAccounting(double intrinsic, double advantage) {
  return intrinsic - advantage;
}

double IntrinsicPrivacyDiscrete(const std::vector<double>& pmf) {
  double h = 0.0;
  for (double p : pmf) h -= XLogX(p);
  return h - std::log(static_cast<double>(pmf.size()));
}

// ---------------------------------------------------------------------------

std::string ToString(CalibrationMethod method) {
  switch (method) {
    case CalibrationMethod::kAutoPac:
      return "auto_pac";
    case CalibrationMethod::kEfficientPac:
      return "efficient_pac";
    case CalibrationMethod::kWaterfill:
      return "waterfill";
    case CalibrationMethod::kSrpac:
      return "srpac";
  }
  return "unknown";
}

CalibrationMethod ParseCalibrationMethod(const std::string& name) {
  if (name == "auto_pac") return CalibrationMethod::kAutoPac;
  if (name == "efficient_pac") return CalibrationMethod::kEfficientPac;
  if (name == "waterfill") return CalibrationMethod::kWaterfill;
  if (name == "srpac") return CalibrationMethod::kSrpac;
  throw InvalidArgument("unknown calibration method '" + name + "'");
}

void AttachGapCorrection(CalibrationReport& report, double gap_value) {
  if (!(gap_value > 0.0)) {
    throw InvalidArgument("gap correction must be positive");
  }
  report.gap_estimate = gap_value;
  report.corrected_mi = std::max(0.0, report.certified_bound - gap_value);
}

}  // namespace rpac
