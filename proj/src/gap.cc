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

#include "rpac/gap.hpp"

#include <algorithm>
#include <cmath>

#include "rpac/stats.hpp"

namespace rpac {

std::string ToString(ScoreFamily family) {
  switch (family) {
    case ScoreFamily::kLinear:
      return "linear";
    case ScoreFamily::kQuadraticFeatures:
      return "quadratic_features";
    case ScoreFamily::kTwoLayer:
      return "two_layer";
  }
  return "unknown";
}

ScoreFamily ParseScoreFamily(const std::string& name) {
  if (name == "linear") return ScoreFamily::kLinear;
  if (name == "quadratic_features") return ScoreFamily::kQuadraticFeatures;
  if (name == "two_layer") return ScoreFamily::kTwoLayer;
  throw InvalidArgument("unknown score family '" + name + "'");
}

std::string ToString(GapMethod method) {
  switch (method) {
    case GapMethod::kSteinRaw:
      return "stein_raw";
    case GapMethod::kSteinRelative:
      return "stein_relative";
    case GapMethod::kKurtosis:
      return "kurtosis";
  }
  return "unknown";
}

GapMethod ParseGapMethod(const std::string& name) {
  if (name == "stein_raw") return GapMethod::kSteinRaw;
  if (name == "stein_relative") return GapMethod::kSteinRelative;
  if (name == "kurtosis") return GapMethod::kKurtosis;
  throw InvalidArgument("unknown gap method '" + name + "'");
}

// ---------------------------------------------------------------------------
// ScoreModel

namespace {

int FeatureCount(ScoreFamily family, int d) {
  if (family == ScoreFamily::kLinear) return 1 + d;
  return 1 + d + d * (d + 1) / 2;
}

}  // namespace

ScoreModel::ScoreModel(ScoreFamily family, int dim, Eigen::VectorXd scale,
                       int hidden)
    : family_(family), dim_(dim), hidden_(hidden), scale_(std::move(scale)) {
  if (dim_ < 1) throw InvalidArgument("score model dimension must be positive");
  if (scale_.size() != dim_ || !(scale_.minCoeff() > 0.0)) {
    throw InvalidArgument("score model scale must be positive per coordinate");
  }
  if (family_ == ScoreFamily::kTwoLayer) {
    if (hidden_ < 1) throw InvalidArgument("two_layer needs hidden units");
    params_ = Eigen::VectorXd::Zero(hidden_ * dim_ + hidden_ + dim_ * hidden_ + dim_);
  } else {
    params_ = Eigen::VectorXd::Zero(dim_ * FeatureCount(family_, dim_));
  }
}

void ScoreModel::set_params(const Eigen::VectorXd& params) {
  if (params.size() != params_.size()) {
    throw InvalidArgument("score model parameter vector has the wrong size");
  }
  params_ = params;
}

void ScoreModel::Initialize(std::uint64_t seed) {
  if (family_ != ScoreFamily::kTwoLayer) return;
  Rng rng(seed);
  // First layer and its bias are random; the output layer starts at zero.
  Eigen::VectorXd draw(hidden_ * dim_ + hidden_);
  StandardNormal(rng, draw);
  params_.head(draw.size()) = draw;
}

Eigen::MatrixXd ScoreModel::Features(const Eigen::MatrixXd& u) const {
  const Eigen::Index n = u.cols();
  Eigen::MatrixXd phi(FeatureCount(family_, dim_), n);
  phi.row(0).setOnes();
  phi.middleRows(1, dim_) = u;
  if (family_ == ScoreFamily::kQuadraticFeatures) {
    int p = 1 + dim_;
    for (int i = 0; i < dim_; ++i) {
      for (int j = i; j < dim_; ++j) {
        phi.row(p++) = u.row(i).cwiseProduct(u.row(j));
      }
    }
  }
  return phi;
}

Eigen::MatrixXd ScoreModel::Forward(const Eigen::MatrixXd& u,
                                    Eigen::MatrixXd* hidden) const {
  if (family_ != ScoreFamily::kTwoLayer) {
    const int p = FeatureCount(family_, dim_);
    Eigen::Map<const Eigen::MatrixXd> w(params_.data(), dim_, p);
    return w * Features(u);
  }
  const int h = hidden_;
  Eigen::Map<const Eigen::MatrixXd> w1(params_.data(), h, dim_);
  Eigen::Map<const Eigen::VectorXd> b1(params_.data() + h * dim_, h);
  Eigen::Map<const Eigen::MatrixXd> w2(params_.data() + h * dim_ + h, dim_, h);
  Eigen::Map<const Eigen::VectorXd> b2(params_.data() + 2 * h * dim_ + h, dim_);
  Eigen::MatrixXd t = ((w1 * u).colwise() + b1).array().tanh().matrix();
  Eigen::MatrixXd g = (w2 * t).colwise() + b2;
  if (hidden != nullptr) *hidden = std::move(t);
  return g;
}

Eigen::VectorXd ScoreModel::ScaledDivergence(const Eigen::MatrixXd& u) const {
  const Eigen::Index n = u.cols();
  const Eigen::ArrayXd inv_s2 = scale_.array().square().inverse();
  Eigen::VectorXd div = Eigen::VectorXd::Zero(n);
  if (family_ == ScoreFamily::kTwoLayer) {
    const int h = hidden_;
    Eigen::Map<const Eigen::MatrixXd> w1(params_.data(), h, dim_);
    Eigen::Map<const Eigen::MatrixXd> w2(params_.data() + h * dim_ + h, dim_, h);
    Eigen::MatrixXd t;
    Forward(u, &t);
    const Eigen::MatrixXd dt = (1.0 - t.array().square()).matrix();
    // c_h = sum_k inv_s2_k W2(k, h) W1(h, k).
    Eigen::VectorXd c(h);
    for (int j = 0; j < h; ++j) {
      double acc = 0.0;
      for (int k = 0; k < dim_; ++k) acc += inv_s2[k] * w2(k, j) * w1(j, k);
      c[j] = acc;
    }
    return dt.transpose() * c;
  }
  const int p = FeatureCount(family_, dim_);
  Eigen::Map<const Eigen::MatrixXd> w(params_.data(), dim_, p);
  for (int k = 0; k < dim_; ++k) div.array() += inv_s2[k] * w(k, 1 + k);
  if (family_ == ScoreFamily::kQuadraticFeatures) {
    int q = 1 + dim_;
    for (int i = 0; i < dim_; ++i) {
      for (int j = i; j < dim_; ++j, ++q) {
        if (i == j) {
          div.array() += inv_s2[i] * w(i, q) * 2.0 * u.row(i).transpose().array();
        } else {
          div.array() += inv_s2[i] * w(i, q) * u.row(j).transpose().array();
          div.array() += inv_s2[j] * w(j, q) * u.row(i).transpose().array();
        }
      }
    }
  }
  return div;
}

Eigen::MatrixXd ScoreModel::Evaluate(const Eigen::MatrixXd& z) const {
  if (z.rows() != dim_) throw InvalidArgument("score input has the wrong dimension");
  const Eigen::MatrixXd u = scale_.cwiseInverse().asDiagonal() * z;
  return scale_.cwiseInverse().asDiagonal() * Forward(u, nullptr);
}

Eigen::VectorXd ScoreModel::Divergence(const Eigen::MatrixXd& z) const {
  if (z.rows() != dim_) throw InvalidArgument("score input has the wrong dimension");
  return ScaledDivergence(scale_.cwiseInverse().asDiagonal() * z);
}

Eigen::VectorXd ScoreModel::Evaluate(const Eigen::VectorXd& z) const {
  return Evaluate(Eigen::MatrixXd(z)).col(0);
}

double ScoreModel::Divergence(const Eigen::VectorXd& z) const {
  return Divergence(Eigen::MatrixXd(z))[0];
}

double ScoreModel::LossAndGradient(const Eigen::MatrixXd& u,
                                   const Eigen::MatrixXd& target,
                                   Eigen::VectorXd* grad) const {
  const double n = static_cast<double>(u.cols());
  Eigen::MatrixXd t;
  const Eigen::MatrixXd r = Forward(u, &t) + target;
  const double loss = r.colwise().squaredNorm().sum() / n;
  if (grad == nullptr) return loss;
  grad->resize(params_.size());
  if (family_ != ScoreFamily::kTwoLayer) {
    const int p = FeatureCount(family_, dim_);
    Eigen::Map<Eigen::MatrixXd> gw(grad->data(), dim_, p);
    gw = (2.0 / n) * r * Features(u).transpose();
    return loss;
  }
  const int h = hidden_;
  Eigen::Map<const Eigen::MatrixXd> w2(params_.data() + h * dim_ + h, dim_, h);
  Eigen::Map<Eigen::MatrixXd> gw1(grad->data(), h, dim_);
  Eigen::Map<Eigen::VectorXd> gb1(grad->data() + h * dim_, h);
  Eigen::Map<Eigen::MatrixXd> gw2(grad->data() + h * dim_ + h, dim_, h);
  Eigen::Map<Eigen::VectorXd> gb2(grad->data() + 2 * h * dim_ + h, dim_);
  gw2 = (2.0 / n) * r * t.transpose();
  gb2 = (2.0 / n) * r.rowwise().sum();
  const Eigen::MatrixXd dh =
      ((2.0 / n) * (w2.transpose() * r)).cwiseProduct(
          (1.0 - t.array().square()).matrix());
  gw1 = dh * u.transpose();
  gb1 = dh.rowwise().sum();
  return loss;
}

// ---------------------------------------------------------------------------
// Training

DsmFit DsmTrain(const Eigen::MatrixXd& samples, const DsmOptions& options) {
  const Eigen::Index m = samples.rows();
  const int d = static_cast<int>(samples.cols());
  if (m < 2 || d < 1) throw InvalidArgument("dsm_train needs at least 2 samples");
  if (!(options.epsilon > 0.0)) throw InvalidArgument("dsm_train needs epsilon > 0");
  if (options.steps < 1) throw InvalidArgument("dsm_train needs steps >= 1");
  if (!(options.learning_rate >= 0.0)) {
    throw InvalidArgument("dsm_train needs a nonnegative learning rate");
  }
  const Eigen::RowVectorXd mean = samples.colwise().mean();
  const Eigen::MatrixXd centered = (samples.rowwise() - mean).transpose();  // d x m
  Eigen::VectorXd scale = (centered.rowwise().squaredNorm() / static_cast<double>(m))
                              .cwiseSqrt();
  for (int k = 0; k < d; ++k) {
    if (!(scale[k] > 0.0)) scale[k] = 1.0;
  }
  DsmFit fit{ScoreModel(options.family, d, scale, options.hidden), {}, 0.0};
  ScoreModel& model = fit.model;
  model.Initialize(DeriveSeed(options.seed, stream::kDsmInit));

  const Eigen::Index batch =
      options.batch <= 0 ? m : std::min<Eigen::Index>(options.batch, m);
  const double root_eps = std::sqrt(options.epsilon);
  Rng rng(DeriveSeed(options.seed, stream::kDsmPerturbation));
  std::uniform_int_distribution<Eigen::Index> pick(0, m - 1);
  const Eigen::VectorXd inv_scale = scale.cwiseInverse();

  Eigen::VectorXd params = model.params();
  Eigen::VectorXd average = Eigen::VectorXd::Zero(params.size());
  int averaged = 0;
  Eigen::MatrixXd z(d, batch);
  Eigen::MatrixXd v(d, batch);
  Eigen::VectorXd grad;
  for (int step = 0; step < options.steps; ++step) {
    if (batch == m) {
      z = centered;
    } else {
      for (Eigen::Index j = 0; j < batch; ++j) z.col(j) = centered.col(pick(rng));
    }
    for (Eigen::Index j = 0; j < batch; ++j) StandardNormal(rng, v.col(j));
    // Perturbed points in scaled units; the target is scale .* v / sqrt(eps).
    const Eigen::MatrixXd u = inv_scale.asDiagonal() * (z + root_eps * v);
    const Eigen::MatrixXd target = (scale / root_eps).asDiagonal() * v;
    model.set_params(params);
    const double loss = model.LossAndGradient(u, target, &grad);
    if (!std::isfinite(loss) || !grad.allFinite()) {
      throw NumericalError("dsm_train diverged at step " + std::to_string(step));
    }
    fit.loss_trace.push_back(loss);
    params -= options.learning_rate * grad;
    if (2 * (step + 1) > options.steps) {
      average += params;
      ++averaged;
    }
  }
  model.set_params(average / static_cast<double>(averaged));
  fit.final_loss = fit.loss_trace.back();
  return fit;
}

// ---------------------------------------------------------------------------
// Estimators

GapEstimate SteinGapEstimate(const Eigen::MatrixXd& samples,
                             const ScoreModel& score, SteinVariant variant,
                             double ridge) {
  const Eigen::Index m = samples.rows();
  const int d = static_cast<int>(samples.cols());
  if (m < 2) throw InvalidArgument("stein estimate needs at least 2 samples");
  if (d != score.dim()) throw InvalidArgument("score model dimension mismatch");
  if (!(ridge >= 0.0)) throw InvalidArgument("ridge must be nonnegative");
  const Eigen::RowVectorXd mean = samples.colwise().mean();
  const Eigen::MatrixXd z = (samples.rowwise() - mean).transpose();  // d x m
  const Eigen::MatrixXd s = score.Evaluate(z);
  GapEstimate out;
  out.ridge = ridge;
  if (variant == SteinVariant::kRaw) {
    out.method = GapMethod::kSteinRaw;
    const Eigen::VectorXd div = score.Divergence(z);
    out.value = 0.5 * s.colwise().squaredNorm().mean() - div.mean();
    return out;
  }
  out.method = GapMethod::kSteinRelative;
  const Eigen::MatrixXd cov = z * z.transpose() / static_cast<double>(m);
  Eigen::LDLT<Eigen::MatrixXd> ldlt(cov);
  if (ldlt.info() != Eigen::Success || !(ldlt.vectorD().minCoeff() > 0.0)) {
    throw InvalidArgument("stein relative variant: sample covariance is singular");
  }
  const Eigen::MatrixXd precision_z = ldlt.solve(z);
  Eigen::MatrixXd t = s + precision_z;
  if (ridge > 0.0) t += precision_z + ridge * z;
  out.value = 0.5 * t.colwise().squaredNorm().mean() - 0.5 * d;
  return out;
}

GapEstimate KurtosisGapEstimate(const Eigen::VectorXd& samples,
                                const KurtosisOptions& options) {
  if (!(options.clamp_c > 0.0)) throw InvalidArgument("clamp constant must be > 0");
  if (!(options.noise_floor_sigmas >= 0.0)) {
    throw InvalidArgument("noise floor must be nonnegative");
  }
  const KurtosisMoments mom = ExcessKurtosis(samples);
  const double n = static_cast<double>(samples.size());
  const double floor_value = options.clamp_c / n;
  const double s4 = mom.sigma2 * mom.sigma2;
  const double standard_error = std::sqrt(24.0 / n) * s4;
  double magnitude = std::abs(mom.kappa4);
  if (magnitude <= options.noise_floor_sigmas * standard_error) magnitude = 0.0;
  GapEstimate out;
  out.method = GapMethod::kKurtosis;
  out.dimensional_fix = options.dimensional_fix;
  out.sigma2 = mom.sigma2;
  out.kappa4 = mom.kappa4;
  out.clamp_active = magnitude <= floor_value;
  const double k = std::max(magnitude, floor_value);
  if (!(mom.sigma2 > 0.0)) {
    throw InvalidArgument("kurtosis estimate needs non-constant samples");
  }
  const double denom = options.dimensional_fix ? s4 * s4 : s4;
  out.value = k * k / (48.0 * denom);
  return out;
}

CorrectedMiValue CorrectedMi(double certified_bound, const GapEstimate& gap) {
  if (!(gap.value > 0.0)) throw InvalidArgument("gap estimate must be positive");
  CorrectedMiValue out;
  out.value = certified_bound - gap.value;
  if (out.value < 0.0) {
    out.value = 0.0;
    out.clamped = true;
  }
  return out;
}

GateDecision GapGate(const GapEstimate& gap, double oracle_kl, double slack) {
  GateDecision out;
  out.estimate = gap.value;
  out.oracle_kl = oracle_kl;
  out.admitted = gap.value > 0.0 && gap.value <= oracle_kl + slack;
  return out;
}

GapMethod DefaultGapMethod(int dim) {
  return dim == 1 ? GapMethod::kKurtosis : GapMethod::kSteinRelative;
}

ScoreFamily DefaultScoreFamily(int dim) {
  return dim == 1 ? ScoreFamily::kQuadraticFeatures : ScoreFamily::kLinear;
}

}  // namespace rpac
