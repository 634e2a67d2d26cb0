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

#include "rpac/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "rpac/stats.hpp"

namespace rpac {
namespace {

constexpr double kLog2Pi = 1.8378770664093453;  // ln(2 pi)
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// --- discrete X -------------------------------------------------------------

// The channel in the noise eigenbasis: Y' = V^T Y has diagonal noise.
struct RotatedMixture {
  std::vector<double> weights;
  Eigen::MatrixXd means;  // K x d, rotated
  Eigen::VectorXd sd;     // per rotated axis
  double noise_logdet = 0.0;
  int dim = 1;
};

RotatedMixture Rotate(const std::vector<double>& pmf,
                      const Eigen::MatrixXd& locations,
                      const Eigen::MatrixXd& noise_cov) {
  if (pmf.empty() || static_cast<Eigen::Index>(pmf.size()) != locations.rows()) {
    throw InvalidArgument("oracle: pmf and locations differ in size");
  }
  const Eigen::Index d = locations.cols();
  if (d < 1 || d > 2) throw InvalidArgument("oracle: only d <= 2 is supported");
  if (noise_cov.rows() != d || noise_cov.cols() != d) {
    throw InvalidArgument("oracle: noise covariance has the wrong shape");
  }
  DiscreteEntropy(pmf);  // validates the pmf
  Eigen::MatrixXd v;
  Eigen::VectorXd var;
  if (noise_cov.isDiagonal(0.0)) {
    v = Eigen::MatrixXd::Identity(d, d);
    var = noise_cov.diagonal();
  } else {
    const SpectralDecomposition spectrum = Eigendecompose(noise_cov);
    v = spectrum.eigenvectors;
    var = spectrum.eigenvalues;
  }
  if (!(var.minCoeff() > 0.0)) {
    throw InvalidArgument("oracle: noise covariance must be positive definite");
  }
  RotatedMixture out;
  out.dim = static_cast<int>(d);
  out.sd = var.cwiseSqrt();
  out.noise_logdet = var.array().log().sum();
  std::vector<Eigen::Index> keep;
  for (std::size_t k = 0; k < pmf.size(); ++k) {
    if (pmf[k] > 0.0) keep.push_back(static_cast<Eigen::Index>(k));
  }
  out.means.resize(keep.size(), d);
  for (std::size_t i = 0; i < keep.size(); ++i) {
    out.weights.push_back(pmf[keep[i]]);
    out.means.row(i) = locations.row(keep[i]) * v;
  }
  return out;
}

Rule1d AxisRule(const RotatedMixture& mix, int axis, int nodes,
                const QuadratureSpec& quad) {
  std::vector<std::pair<double, double>> intervals;
  if (quad.lower && quad.upper) {
    if (quad.lower->size() != mix.dim || quad.upper->size() != mix.dim) {
      throw InvalidArgument("oracle: quadrature bounds have the wrong dimension");
    }
    intervals.emplace_back((*quad.lower)[axis], (*quad.upper)[axis]);
  } else {
    const double half = quad.half_width_sigmas * mix.sd[axis];
    for (Eigen::Index k = 0; k < mix.means.rows(); ++k) {
      intervals.emplace_back(mix.means(k, axis) - half, mix.means(k, axis) + half);
    }
  }
  return BuildRule(intervals, nodes, quad.rule);
}

// A(j, k) = N(node_j; mean_k, sd^2) along one axis.
Eigen::MatrixXd AxisFactor(const RotatedMixture& mix, int axis,
                           const Rule1d& rule) {
  const double sd = mix.sd[axis];
  const double norm = 1.0 / (std::sqrt(2.0 * M_PI) * sd);
  const Eigen::Index n = rule.nodes.size();
  const Eigen::Index k = mix.means.rows();
  Eigen::MatrixXd a(n, k);
  for (Eigen::Index c = 0; c < k; ++c) {
    const Eigen::ArrayXd t = (rule.nodes.array() - mix.means(c, axis)) / sd;
    a.col(c) = (norm * (-0.5 * t.square()).exp()).matrix();
  }
  return a;
}

// Tensor-grid values of sum_k c_k prod_i A_i(., k) together with the weights.
struct GridValues {
  Eigen::MatrixXd values;   // n1 x n2 (n2 = 1 in d = 1)
  Eigen::MatrixXd weights;  // same shape
};

class MixtureGrid {
 public:
  MixtureGrid(const RotatedMixture& mix, int nodes, const QuadratureSpec& quad)
      : mix_(mix) {
    for (int axis = 0; axis < mix.dim; ++axis) {
      rules_.push_back(AxisRule(mix, axis, nodes, quad));
      factors_.push_back(AxisFactor(mix, axis, rules_.back()));
    }
  }

  GridValues Evaluate(const Eigen::VectorXd& coeffs) const {
    GridValues out;
    if (mix_.dim == 1) {
      out.values = factors_[0] * coeffs;
      out.weights = rules_[0].weights;
    } else {
      out.values = factors_[0] * coeffs.asDiagonal() * factors_[1].transpose();
      out.weights = rules_[0].weights * rules_[1].weights.transpose();
    }
    return out;
  }

 private:
  const RotatedMixture& mix_;
  std::vector<Rule1d> rules_;
  std::vector<Eigen::MatrixXd> factors_;
};

double NegPLogP(const GridValues& g) {
  double total = 0.0;
  for (Eigen::Index j = 0; j < g.values.cols(); ++j) {
    for (Eigen::Index i = 0; i < g.values.rows(); ++i) {
      const double p = g.values(i, j);
      if (p > 0.0) total -= g.weights(i, j) * p * std::log(p);
    }
  }
  return total;
}

Eigen::VectorXd WeightVector(const RotatedMixture& mix) {
  return Eigen::Map<const Eigen::VectorXd>(mix.weights.data(), mix.weights.size());
}

double NoiseEntropy(const RotatedMixture& mix) {
  return 0.5 * (mix.dim * (kLog2Pi + 1.0) + mix.noise_logdet);
}

// --- continuous 1-d ------------------------------------------------------------

double LogSumExp2(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double m = std::max(a, b);
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

// exp(u^2) erfc(u) for u >= 0.
double Erfcx(double u) {
  if (u < 25.0) return std::exp(u * u) * std::erfc(u);
  const double inv2 = 1.0 / (u * u);
  return (1.0 - 0.5 * inv2 + 0.75 * inv2 * inv2 - 1.875 * inv2 * inv2 * inv2) /
         (u * std::sqrt(M_PI));
}

// ln of exp(s^2 / (2 b^2) - x / b) erfc((s^2 / b - x) / (s sqrt 2)).
double LaplaceBranch(double x, double b, double s) {
  const double u = (s * s / b - x) / (s * M_SQRT2);
  if (u >= 0.0) return std::log(Erfcx(u)) - x * x / (2.0 * s * s);
  return s * s / (2.0 * b * b) - x / b + std::log(std::erfc(u));
}

// ln Q(t), Q the standard normal upper tail.
double LogUpperTail(double t) {
  const double u = t / M_SQRT2;
  if (u < 25.0) return std::log(0.5 * std::erfc(u));
  return std::log(0.5 * Erfcx(u)) - u * u;
}

// ln(Phi(alpha) - Phi(gamma)) for alpha > gamma.
double LogNormalMass(double alpha, double gamma) {
  if (gamma >= 0.0) {
    const double lq_g = LogUpperTail(gamma);
    const double lq_a = LogUpperTail(alpha);
    return lq_g + std::log1p(-std::exp(lq_a - lq_g));
  }
  if (alpha <= 0.0) return LogNormalMass(-gamma, -alpha);
  return std::log1p(-0.5 * std::erfc(alpha / M_SQRT2) -
                    0.5 * std::erfc(-gamma / M_SQRT2));
}

struct QuadratureMoments {
  double mass = 0.0;
  double mean = 0.0;
  double variance = 0.0;
  double neg_plogp = 0.0;  // -int p ln p
};

QuadratureMoments Integrate1d(const ConvolvedDensity& density,
                              const QuadratureSpec& quad, int nodes) {
  std::vector<std::pair<double, double>> intervals;
  if (quad.lower && quad.upper) {
    if (quad.lower->size() != 1 || quad.upper->size() != 1) {
      throw InvalidArgument("oracle: 1-d quadrature needs scalar bounds");
    }
    intervals.emplace_back((*quad.lower)[0], (*quad.upper)[0]);
  } else {
    intervals = density.Intervals(quad.half_width_sigmas);
  }
  const Rule1d rule =
      BuildRule(intervals, nodes, quad.rule, density.Breakpoints());
  const Eigen::ArrayXd logp = density.LogPdf(rule.nodes.array());
  const Eigen::ArrayXd& z = rule.nodes.array();
  const Eigen::ArrayXd& w = rule.weights.array();
  QuadratureMoments out;
  double first = 0.0;
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    if (logp[i] == kNegInf) continue;
    const double p = std::exp(logp[i]);
    out.mass += w[i] * p;
    first += w[i] * p * z[i];
    out.neg_plogp -= w[i] * p * logp[i];
  }
  out.mean = first / out.mass;
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    if (logp[i] == kNegInf) continue;
    const double dz = z[i] - out.mean;
    out.variance += w[i] * std::exp(logp[i]) * dz * dz;
  }
  out.variance /= out.mass;
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------

OracleValue MixtureOutputEntropy(const std::vector<double>& pmf,
                                 const Eigen::MatrixXd& locations,
                                 const Eigen::MatrixXd& noise_cov,
                                 const QuadratureSpec& quad) {
  const RotatedMixture mix = Rotate(pmf, locations, noise_cov);
  const Eigen::VectorXd w = WeightVector(mix);
  return WithRefinement(
      [&](int nodes) {
        return NegPLogP(MixtureGrid(mix, nodes, quad).Evaluate(w));
      },
      quad);
}

OracleValue MiOracleDiscreteX(const std::vector<double>& pmf,
                              const Eigen::MatrixXd& locations,
                              const Eigen::MatrixXd& noise_cov,
                              const QuadratureSpec& quad) {
  const RotatedMixture mix = Rotate(pmf, locations, noise_cov);
  const Eigen::VectorXd w = WeightVector(mix);
  const double h_noise = NoiseEntropy(mix);
  return WithRefinement(
      [&](int nodes) {
        return NegPLogP(MixtureGrid(mix, nodes, quad).Evaluate(w)) - h_noise;
      },
      quad);
}

OracleValue ConditionalEntropyOracle(const std::vector<double>& pmf,
                                     const Eigen::MatrixXd& locations,
                                     const Eigen::MatrixXd& noise_cov,
                                     const QuadratureSpec& quad) {
  const double h_x = DiscreteEntropy(pmf);
  OracleValue mi = MiOracleDiscreteX(pmf, locations, noise_cov, quad);
  mi.value = h_x - mi.value;
  mi.refined_value = h_x - mi.refined_value;
  return mi;
}

DirectionalMmseResult DirectionalMmse(const std::vector<double>& pmf,
                                      const Eigen::MatrixXd& locations,
                                      const Eigen::MatrixXd& noise_cov,
                                      const Eigen::VectorXd& direction,
                                      const QuadratureSpec& quad) {
  if (direction.size() != locations.cols()) {
    throw InvalidArgument("directional_mmse: direction has the wrong dimension");
  }
  if (std::abs(direction.norm() - 1.0) > 1e-9) {
    throw InvalidArgument("directional_mmse: direction must be a unit vector");
  }
  const RotatedMixture mix = Rotate(pmf, locations, noise_cov);
  const Eigen::VectorXd w = WeightVector(mix);
  // Projections of the retained symbols; rotation preserves inner products
  // once the direction is rotated as well.
  Eigen::VectorXd s(mix.means.rows());
  Eigen::MatrixXd v = Eigen::MatrixXd::Identity(mix.dim, mix.dim);
  if (!noise_cov.isDiagonal(0.0)) v = Eigendecompose(noise_cov).eigenvectors;
  const Eigen::VectorXd w_rot = v.transpose() * direction;
  s = mix.means * w_rot;
  const double second = w.dot(s.cwiseProduct(s));
  const Eigen::VectorXd ws = w.cwiseProduct(s);
  DirectionalMmseResult out;
  out.mmse = WithRefinement(
      [&](int nodes) {
        const MixtureGrid grid(mix, nodes, quad);
        const GridValues p = grid.Evaluate(w);
        const GridValues num = grid.Evaluate(ws);
        double explained = 0.0;
        for (Eigen::Index j = 0; j < p.values.cols(); ++j) {
          for (Eigen::Index i = 0; i < p.values.rows(); ++i) {
            const double pv = p.values(i, j);
            if (pv > 0.0) {
              const double nv = num.values(i, j);
              explained += p.weights(i, j) * nv * nv / pv;
            }
          }
        }
        return std::max(0.0, second - explained);
      },
      quad);
  out.g = 0.5 * out.mmse.value;
  return out;
}

Eigen::MatrixXd PosteriorLogProbs(const std::vector<double>& pmf,
                                  const Eigen::MatrixXd& locations,
                                  const Eigen::MatrixXd& noise_cov,
                                  const Eigen::MatrixXd& outputs) {
  const Eigen::Index k = locations.rows();
  if (static_cast<Eigen::Index>(pmf.size()) != k) {
    throw InvalidArgument("posterior: pmf and locations differ in size");
  }
  if (outputs.cols() != locations.cols()) {
    throw InvalidArgument("posterior: outputs have the wrong dimension");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(noise_cov);
  if (llt.info() != Eigen::Success) {
    throw InvalidArgument("posterior: noise covariance must be positive definite");
  }
  Eigen::MatrixXd out(outputs.rows(), k);
  for (Eigen::Index c = 0; c < k; ++c) {
    const Eigen::MatrixXd diff =
        (outputs.rowwise() - locations.row(c)).transpose();
    const Eigen::MatrixXd white = llt.matrixL().solve(diff);
    const double log_prior = pmf[c] > 0.0 ? std::log(pmf[c]) : kNegInf;
    out.col(c) = (-0.5 * white.colwise().squaredNorm()).transpose().array() +
                 log_prior;
  }
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    const double m = out.row(i).maxCoeff();
    const double lse = m + std::log((out.row(i).array() - m).exp().sum());
    out.row(i).array() -= lse;
  }
  return out;
}

// ---------------------------------------------------------------------------

ConvolvedDensity ConvolvedDensity::Gaussian(double mean, double var,
                                            double noise_var) {
  if (!(var >= 0.0) || !(noise_var >= 0.0) || !(var + noise_var > 0.0)) {
    throw InvalidArgument("gaussian density needs a positive total variance");
  }
  ConvolvedDensity d;
  d.base_ = BaseDensity::kGaussian;
  d.p0_ = mean;
  d.p1_ = var;
  d.noise_var_ = noise_var;
  return d;
}

ConvolvedDensity ConvolvedDensity::Laplace(double loc, double scale,
                                           double noise_var) {
  if (!(scale > 0.0) || !(noise_var >= 0.0)) {
    throw InvalidArgument("laplace density needs scale > 0 and noise_var >= 0");
  }
  ConvolvedDensity d;
  d.base_ = BaseDensity::kLaplace;
  d.p0_ = loc;
  d.p1_ = scale;
  d.noise_var_ = noise_var;
  return d;
}

ConvolvedDensity ConvolvedDensity::Uniform(double a, double b, double noise_var) {
  if (!(a < b) || !(noise_var >= 0.0)) {
    throw InvalidArgument("uniform density needs a < b and noise_var >= 0");
  }
  ConvolvedDensity d;
  d.base_ = BaseDensity::kUniform;
  d.p0_ = a;
  d.p1_ = b;
  d.noise_var_ = noise_var;
  return d;
}

ConvolvedDensity ConvolvedDensity::Mixture(std::vector<double> weights,
                                           std::vector<double> means,
                                           std::vector<double> vars,
                                           double noise_var) {
  if (weights.empty() || weights.size() != means.size() ||
      weights.size() != vars.size()) {
    throw InvalidArgument("mixture density: parameter lists differ in length");
  }
  DiscreteEntropy(weights);  // validates the weights
  for (double v : vars) {
    if (!(v >= 0.0) || !(v + noise_var > 0.0)) {
      throw InvalidArgument("mixture density needs positive component variances");
    }
  }
  if (!(noise_var >= 0.0)) throw InvalidArgument("noise_var must be nonnegative");
  ConvolvedDensity d;
  d.base_ = BaseDensity::kGaussianMixture;
  d.weights_ = std::move(weights);
  d.means_ = std::move(means);
  d.vars_ = std::move(vars);
  d.noise_var_ = noise_var;
  return d;
}

ConvolvedDensity ConvolvedDensity::WithNoise(double noise_var) const {
  if (!(noise_var >= 0.0)) throw InvalidArgument("noise_var must be nonnegative");
  ConvolvedDensity d = *this;
  d.noise_var_ = noise_var;
  if (base_ == BaseDensity::kGaussian && !(d.p1_ + noise_var > 0.0)) {
    throw InvalidArgument("gaussian density needs a positive total variance");
  }
  return d;
}

double ConvolvedDensity::mean() const {
  switch (base_) {
    case BaseDensity::kGaussian:
    case BaseDensity::kLaplace:
      return p0_;
    case BaseDensity::kUniform:
      return 0.5 * (p0_ + p1_);
    case BaseDensity::kGaussianMixture: {
      double m = 0.0;
      for (std::size_t k = 0; k < weights_.size(); ++k) m += weights_[k] * means_[k];
      return m;
    }
  }
  return 0.0;
}

double ConvolvedDensity::variance() const {
  switch (base_) {
    case BaseDensity::kGaussian:
      return p1_ + noise_var_;
    case BaseDensity::kLaplace:
      return 2.0 * p1_ * p1_ + noise_var_;
    case BaseDensity::kUniform:
      return (p1_ - p0_) * (p1_ - p0_) / 12.0 + noise_var_;
    case BaseDensity::kGaussianMixture: {
      const double m = mean();
      double second = 0.0;
      for (std::size_t k = 0; k < weights_.size(); ++k) {
        second += weights_[k] * (vars_[k] + means_[k] * means_[k]);
      }
      return second - m * m + noise_var_;
    }
  }
  return 0.0;
}

double ConvolvedDensity::LogPdf(double z) const {
  const double s2 = noise_var_;
  switch (base_) {
    case BaseDensity::kGaussian: {
      const double v = p1_ + s2;
      const double t = z - p0_;
      return -0.5 * (kLog2Pi + std::log(v) + t * t / v);
    }
    case BaseDensity::kLaplace: {
      const double b = p1_;
      const double x = z - p0_;
      if (s2 == 0.0) return -std::log(2.0 * b) - std::abs(x) / b;
      const double s = std::sqrt(s2);
      return -std::log(4.0 * b) +
             LogSumExp2(LaplaceBranch(x, b, s), LaplaceBranch(-x, b, s));
    }
    case BaseDensity::kUniform: {
      const double a = p0_;
      const double b = p1_;
      if (s2 == 0.0) return (z >= a && z <= b) ? -std::log(b - a) : kNegInf;
      const double s = std::sqrt(s2);
      return LogNormalMass((z - a) / s, (z - b) / s) - std::log(b - a);
    }
    case BaseDensity::kGaussianMixture: {
      double out = kNegInf;
      for (std::size_t k = 0; k < weights_.size(); ++k) {
        if (weights_[k] <= 0.0) continue;
        const double v = vars_[k] + s2;
        const double t = z - means_[k];
        out = LogSumExp2(out, std::log(weights_[k]) -
                                  0.5 * (kLog2Pi + std::log(v) + t * t / v));
      }
      return out;
    }
  }
  return kNegInf;
}

Eigen::ArrayXd ConvolvedDensity::LogPdf(const Eigen::ArrayXd& z) const {
  Eigen::ArrayXd out(z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) out[i] = LogPdf(z[i]);
  return out;
}

std::vector<std::pair<double, double>> ConvolvedDensity::Intervals(
    double half_width_sigmas) const {
  const double hw = half_width_sigmas;
  const double s = std::sqrt(noise_var_);
  switch (base_) {
    case BaseDensity::kGaussian: {
      const double half = hw * std::sqrt(p1_ + noise_var_);
      return {{p0_ - half, p0_ + half}};
    }
    case BaseDensity::kLaplace: {
      // Exponential tails need more room than the Gaussian rule of thumb.
      const double half = hw * std::sqrt(variance()) + 3.0 * hw * p1_;
      return {{p0_ - half, p0_ + half}};
    }
    case BaseDensity::kUniform:
      if (noise_var_ == 0.0) return {{p0_, p1_}};
      return {{p0_ - hw * s, p1_ + hw * s}};
    case BaseDensity::kGaussianMixture: {
      std::vector<std::pair<double, double>> out;
      for (std::size_t k = 0; k < weights_.size(); ++k) {
        const double half = hw * std::sqrt(vars_[k] + noise_var_);
        out.emplace_back(means_[k] - half, means_[k] + half);
      }
      return out;
    }
  }
  return {};
}

std::vector<double> ConvolvedDensity::Breakpoints() const {
  switch (base_) {
    case BaseDensity::kLaplace:
      return {p0_};
    case BaseDensity::kUniform:
      return {p0_, p1_};
    default:
      return {};
  }
}

double ConvolvedDensity::Draw(Rng& rng) const {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  double x = 0.0;
  switch (base_) {
    case BaseDensity::kGaussian:
      x = p0_ + std::sqrt(p1_) * normal(rng);
      break;
    case BaseDensity::kLaplace: {
      std::exponential_distribution<double> expo(1.0 / p1_);
      const double e = expo(rng);
      x = p0_ + (uniform(rng) < 0.5 ? -e : e);
      break;
    }
    case BaseDensity::kUniform:
      x = p0_ + (p1_ - p0_) * uniform(rng);
      break;
    case BaseDensity::kGaussianMixture: {
      std::discrete_distribution<int> pick(weights_.begin(), weights_.end());
      const int k = pick(rng);
      x = means_[k] + std::sqrt(vars_[k]) * normal(rng);
      break;
    }
  }
  if (noise_var_ > 0.0) x += std::sqrt(noise_var_) * normal(rng);
  return x;
}

OracleValue DifferentialEntropy(const ConvolvedDensity& density,
                                const QuadratureSpec& quad) {
  return WithRefinement(
      [&](int nodes) {
        const QuadratureMoments q = Integrate1d(density, quad, nodes);
        return q.neg_plogp / q.mass + std::log(q.mass);
      },
      quad);
}

OracleValue KlToMomentMatchedGaussian(const ConvolvedDensity& density,
                                      const QuadratureSpec& quad) {
  OracleValue out = WithRefinement(
      [&](int nodes) {
        const QuadratureMoments q = Integrate1d(density, quad, nodes);
        const double h = q.neg_plogp / q.mass + std::log(q.mass);
        return 0.5 * (kLog2Pi + std::log(q.variance) + 1.0) - h;
      },
      quad);
  // Rounding can leave a Gaussian a hair below zero.
  out.value = std::max(0.0, out.value);
  out.refined_value = std::max(0.0, out.refined_value);
  return out;
}

OracleValue MiOracleContinuous(const ConvolvedDensity& density,
                               const QuadratureSpec& quad) {
  if (!(density.noise_var() > 0.0)) {
    throw InvalidArgument("continuous MI oracle needs positive noise variance");
  }
  const double h_noise = 0.5 * (kLog2Pi + 1.0 + std::log(density.noise_var()));
  OracleValue out = DifferentialEntropy(density, quad);
  out.value -= h_noise;
  out.refined_value -= h_noise;
  return out;
}

// ---------------------------------------------------------------------------

BruteForceResult BruteForceTraceMin(const Eigen::Vector2d& r, double beta,
                                    const BruteForceGrid& grid) {
  if (!(r.minCoeff() > 0.0)) throw InvalidArgument("brute force needs r > 0");
  if (!(beta > 0.0)) throw InvalidArgument("brute force needs beta > 0");
  if (grid.resolution < 3 || !(grid.lower > 0.0) || !(grid.upper > grid.lower)) {
    throw InvalidArgument("brute force grid is malformed");
  }
  auto constraint = [&](double l1, double l2) {
    return 0.5 * (std::log1p(r[0] / l1) + std::log1p(r[1] / l2));
  };

  BruteForceResult best;
  best.trace = std::numeric_limits<double>::infinity();
  // The budget is unreachable inside the grid bounds.
  const double most_noise = constraint(grid.upper, grid.upper);
  const double least_noise = constraint(grid.lower, grid.lower);
  if (most_noise > beta + grid.band || least_noise < beta - grid.band) {
    best.boundary_hit = true;
    best.ell = Eigen::Vector2d::Constant(most_noise > beta ? grid.upper : grid.lower);
    best.trace = best.ell.sum();
    return best;
  }
  double lo1 = std::log(grid.lower);
  double hi1 = std::log(grid.upper);
  double lo2 = lo1;
  double hi2 = hi1;
  int resolution = grid.resolution;
  bool refined = false;
  for (int pass = 0; pass <= grid.zoom_passes; ++pass) {
    const double step1 = (hi1 - lo1) / (resolution - 1);
    const double step2 = (hi2 - lo2) / (resolution - 1);
    // Coarse passes widen the band to the grid's own resolution so the
    // feasible set is never skipped; the final band is the configured one.
    const double band = std::max(grid.band, std::max(step1, step2));
    long feasible = 0;
    double pass_best = std::numeric_limits<double>::infinity();
    int bi = -1;
    int bj = -1;
    for (int i = 0; i < resolution; ++i) {
      const double l1 = std::exp(lo1 + i * step1);
      for (int j = 0; j < resolution; ++j) {
        const double l2 = std::exp(lo2 + j * step2);
        if (std::abs(constraint(l1, l2) - beta) > band) continue;
        ++feasible;
        if (l1 + l2 < pass_best) {
          pass_best = l1 + l2;
          bi = i;
          bj = j;
        }
      }
    }
    if (feasible == 0) {
      if (pass == 0 && !refined) {
        refined = true;
        resolution *= 2;
        --pass;
        continue;
      }
      if (pass == 0) throw NumericalError("brute force: empty feasible grid");
      break;  // keep the previous pass
    }
    const double l1 = std::exp(lo1 + bi * step1);
    const double l2 = std::exp(lo2 + bj * step2);
    if (pass == 0) {
      best.boundary_hit = bi == 0 || bj == 0 || bi == resolution - 1 ||
                          bj == resolution - 1;
    }
    best.trace = l1 + l2;
    best.ell = Eigen::Vector2d(l1, l2);
    best.feasible_points = feasible;
    if (band <= grid.band && std::max(step1, step2) < 1e-6) break;
    // The wide coarse band shifts the optimum by a few cells at most.
    constexpr double kZoomCells = 20.0;
    lo1 = std::log(l1) - kZoomCells * step1;
    hi1 = std::log(l1) + kZoomCells * step1;
    lo2 = std::log(l2) - kZoomCells * step2;
    hi2 = std::log(l2) + kZoomCells * step2;
  }
  return best;
}

}  // namespace rpac
