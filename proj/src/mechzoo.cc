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

#include "rpac/mechzoo.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/distributions/normal.hpp>

#include "rpac/stats.hpp"

namespace rpac {
namespace {

const std::vector<double>& Require(const ZooParams& params, const std::string& key) {
  auto it = params.find(key);
  if (it == params.end() || it->second.empty()) {
    throw InvalidArgument("zoo: missing parameter '" + key + "'");
  }
  return it->second;
}

double Scalar(const ZooParams& params, const std::string& key, double fallback) {
  auto it = params.find(key);
  if (it == params.end()) return fallback;
  if (it->second.size() != 1) {
    throw InvalidArgument("zoo: parameter '" + key + "' must be a scalar");
  }
  return it->second[0];
}

int Count(const ZooParams& params, const std::string& key, int fallback) {
  const double v = Scalar(params, key, fallback);
  if (v != std::floor(v) || v < 1) {
    throw InvalidArgument("zoo: parameter '" + key + "' must be a positive integer");
  }
  return static_cast<int>(v);
}

std::vector<Eigen::VectorXd> Atoms(const ZooParams& params, int k) {
  const int dim = Count(params, "dim", 1);
  std::vector<Eigen::VectorXd> atoms;
  auto it = params.find("values");
  if (it == params.end()) {
    if (dim != 1) throw InvalidArgument("zoo: default atoms are 1-d");
    for (int i = 0; i < k; ++i) atoms.push_back(Eigen::VectorXd::Constant(1, i));
    return atoms;
  }
  if (static_cast<int>(it->second.size()) != k * dim) {
    throw InvalidArgument("zoo: 'values' must hold k * dim entries");
  }
  for (int i = 0; i < k; ++i) {
    atoms.push_back(Eigen::Map<const Eigen::VectorXd>(it->second.data() + i * dim, dim));
  }
  return atoms;
}

}  // namespace

Eigen::VectorXd StandardizedQuantileLevels(int k) {
  if (k < 1) throw InvalidArgument("quantile levels need k >= 1");
  if (k == 1) return Eigen::VectorXd::Zero(1);
  boost::math::normal_distribution<double> normal;
  Eigen::VectorXd q(k);
  for (int j = 0; j < k; ++j) q[j] = boost::math::quantile(normal, (j + 0.5) / k);
  q.array() -= q.mean();
  return q / std::sqrt(q.squaredNorm() / k);
}

DataDistribution MakeDistribution(const std::string& name, const ZooParams& params) {
  if (name == "discrete_uniform_k") {
    const int k = Count(params, "k", 2);
    return DataDistribution::Discrete(std::vector<double>(k, 1.0 / k),
                                      Atoms(params, k), name);
  }
  if (name == "discrete_pmf") {
    const std::vector<double>& pmf = Require(params, "pmf");
    return DataDistribution::Discrete(pmf, Atoms(params, static_cast<int>(pmf.size())),
                                      name);
  }
  if (name == "gaussian") {
    const std::vector<double>& mean_list = Require(params, "mean");
    const int d = static_cast<int>(mean_list.size());
    const Eigen::VectorXd mean = Eigen::Map<const Eigen::VectorXd>(mean_list.data(), d);
    Eigen::MatrixXd cov;
    if (params.count("cov")) {
      const std::vector<double>& c = Require(params, "cov");
      if (static_cast<int>(c.size()) != d * d) {
        throw InvalidArgument("zoo: gaussian 'cov' must hold d * d entries");
      }
      cov = Eigen::Map<const Eigen::MatrixXd>(c.data(), d, d).transpose();
    } else {
      const std::vector<double>& v = Require(params, "var");
      if (static_cast<int>(v.size()) != d) {
        throw InvalidArgument("zoo: gaussian 'var' must hold d entries");
      }
      cov = Eigen::Map<const Eigen::VectorXd>(v.data(), d).asDiagonal();
    }
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success) {
      throw InvalidArgument("zoo: gaussian covariance must be positive definite");
    }
    const Eigen::MatrixXd factor = llt.matrixL();
    const double log_norm = -0.5 * d * std::log(2.0 * M_PI) -
                            factor.diagonal().array().log().sum();
    auto sampler = [mean, factor](Rng& rng) {
      Eigen::VectorXd eps(mean.size());
      StandardNormal(rng, eps);
      return Eigen::VectorXd(mean + factor * eps);
    };
    auto log_density = [mean, factor, log_norm](const Eigen::VectorXd& x) {
      const Eigen::VectorXd w =
          factor.triangularView<Eigen::Lower>().solve(x - mean);
      return log_norm - 0.5 * w.squaredNorm();
    };
    return DataDistribution::Continuous(d, sampler, log_density, name);
  }
  if (name == "gaussian_mixture") {
    const std::vector<double>& weights = Require(params, "weights");
    const std::vector<double>& means = Require(params, "means");
    const std::vector<double>& vars = Require(params, "vars");
    const int k = static_cast<int>(weights.size());
    const int d = Count(params, "dim", 1);
    double total = 0.0;
    for (double w : weights) {
      if (!(w >= 0.0)) throw InvalidArgument("zoo: mixture weights must be >= 0");
      total += w;
    }
    if (std::abs(total - 1.0) > 1e-12) {
      throw InvalidArgument("zoo: mixture weights must sum to 1");
    }
    if (static_cast<int>(means.size()) != k * d || static_cast<int>(vars.size()) != k) {
      throw InvalidArgument("zoo: mixture needs k * dim means and k variances");
    }
    for (double v : vars) {
      if (!(v > 0.0)) throw InvalidArgument("zoo: mixture variances must be > 0");
    }
    auto sampler = [weights, means, vars, d](Rng& rng) {
      std::discrete_distribution<int> pick(weights.begin(), weights.end());
      const int c = pick(rng);
      Eigen::VectorXd eps(d);
      StandardNormal(rng, eps);
      return Eigen::VectorXd(
          Eigen::Map<const Eigen::VectorXd>(means.data() + c * d, d) +
          std::sqrt(vars[c]) * eps);
    };
    auto log_density = [weights, means, vars, d](const Eigen::VectorXd& x) {
      double best = -HUGE_VAL;
      std::vector<double> terms;
      for (std::size_t c = 0; c < weights.size(); ++c) {
        if (weights[c] <= 0.0) continue;
        const Eigen::Map<const Eigen::VectorXd> mu(means.data() + c * d, d);
        const double t = std::log(weights[c]) -
                         0.5 * d * std::log(2.0 * M_PI * vars[c]) -
                         0.5 * (x - mu).squaredNorm() / vars[c];
        terms.push_back(t);
        best = std::max(best, t);
      }
      double acc = 0.0;
      for (double t : terms) acc += std::exp(t - best);
      return best + std::log(acc);
    };
    return DataDistribution::Continuous(d, sampler, log_density, name);
  }
  if (name == "uniform_interval") {
    const double a = Scalar(params, "a", 0.0);
    const double b = Scalar(params, "b", 1.0);
    if (!(a < b)) throw InvalidArgument("zoo: uniform_interval needs a < b");
    auto sampler = [a, b](Rng& rng) {
      std::uniform_real_distribution<double> uniform(a, b);
      return Eigen::VectorXd::Constant(1, uniform(rng)).eval();
    };
    auto log_density = [a, b](const Eigen::VectorXd& x) {
      return (x[0] >= a && x[0] <= b) ? -std::log(b - a) : -HUGE_VAL;
    };
    return DataDistribution::Continuous(1, sampler, log_density, name);
  }
  if (name == "label_nuisance_grid") {
    const std::vector<double>& labels = Require(params, "label_values");
    const int levels = Count(params, "levels", 8);
    const double scale = Scalar(params, "nuisance_scale", 1.0);
    const Eigen::VectorXd q = StandardizedQuantileLevels(levels);
    std::vector<Eigen::VectorXd> atoms;
    for (double label : labels) {
      for (int j = 0; j < levels; ++j) atoms.push_back(Eigen::Vector2d(label, scale * q[j]));
    }
    const double p = 1.0 / static_cast<double>(atoms.size());
    return DataDistribution::Discrete(std::vector<double>(atoms.size(), p), atoms, name);
  }
  throw InvalidArgument("unknown distribution '" + name + "'");
}

Mechanism MakeMechanism(const std::string& name, const ZooParams& params) {
  if (name == "identity") {
    const int d = Count(params, "dim", 1);
    return Mechanism(name, d, d, [](const Eigen::VectorXd& x) { return x; });
  }
  if (name == "linear") {
    const std::vector<double>& entries = Require(params, "matrix");
    const int rows = Count(params, "rows", 1);
    const int cols = Count(params, "cols", 1);
    if (static_cast<int>(entries.size()) != rows * cols) {
      throw InvalidArgument("zoo: linear 'matrix' must hold rows * cols entries");
    }
    const Eigen::MatrixXd a =
        Eigen::Map<const Eigen::MatrixXd>(entries.data(), cols, rows).transpose();
    return Mechanism(name, cols, rows,
                     [a](const Eigen::VectorXd& x) { return Eigen::VectorXd(a * x); });
  }
  if (name == "clipped_norm") {
    const double r = Scalar(params, "r", 1.0);
    const int d = Count(params, "dim", 1);
    if (!(r > 0.0)) throw InvalidArgument("zoo: clipped_norm needs r > 0");
    return Mechanism(
        name, d, d,
        [r](const Eigen::VectorXd& x) {
          const double norm = x.norm();
          return norm > r ? Eigen::VectorXd(x * (r / norm)) : x;
        },
        r);
  }
  if (name == "symbol_locations") {
    const std::vector<double>& entries = Require(params, "locations");
    const int d = Count(params, "dim", 1);
    if (entries.size() % d != 0) {
      throw InvalidArgument("zoo: 'locations' must hold k * dim entries");
    }
    const int k = static_cast<int>(entries.size()) / d;
    const Eigen::MatrixXd loc =
        Eigen::Map<const Eigen::MatrixXd>(entries.data(), d, k).transpose();
    return Mechanism(name, 1, d, [loc, k](const Eigen::VectorXd& x) {
      const double idx = std::round(x[0]);
      if (idx < 0 || idx >= k || idx != x[0]) {
        throw InvalidArgument("symbol_locations: input is not a symbol index");
      }
      return Eigen::VectorXd(loc.row(static_cast<int>(idx)).transpose());
    });
  }
  if (name == "toy_logit") {
    const double margin_scale = Scalar(params, "margin_scale", 0.5);
    const double nuisance_scale = Scalar(params, "nuisance_scale", 5.0);
    return Mechanism(name, 2, 2, [margin_scale, nuisance_scale](const Eigen::VectorXd& x) {
      const double m = margin_scale * x[0];
      const double n = nuisance_scale * x[1];
      return Eigen::VectorXd(Eigen::Vector2d(n + m, n - m) / std::sqrt(2.0));
    });
  }
  throw InvalidArgument("unknown mechanism '" + name + "'");
}

ZooInstance MakeZoo(const ZooSpec& spec) {
  ZooInstance out{MakeDistribution(spec.distribution, spec.distribution_params),
                  MakeMechanism(spec.mechanism, spec.mechanism_params), false};
  if (out.mechanism.input_dim() != out.distribution.support_dim()) {
    throw InvalidArgument("zoo '" + spec.name +
                          "': mechanism and distribution dimensions differ");
  }
  out.oracle_supported =
      out.distribution.is_discrete() && out.mechanism.output_dim() <= 2;
  return out;
}

Eigen::MatrixXd SymbolLocations(const Mechanism& mech, const DataDistribution& dist) {
  if (!dist.is_discrete()) throw InvalidArgument("symbol locations need discrete X");
  Eigen::MatrixXd out(dist.atoms().size(), mech.output_dim());
  for (std::size_t k = 0; k < dist.atoms().size(); ++k) {
    out.row(k) = mech(dist.atoms()[k]).transpose();
  }
  return out;
}

Eigen::Vector2d ToyLogitLabelDirection() {
  return Eigen::Vector2d(1.0, -1.0) / std::sqrt(2.0);
}

double AccuracyProxy(const Eigen::MatrixXd& clean, const Eigen::MatrixXd& noisy) {
  if (clean.rows() != noisy.rows() || clean.cols() != noisy.cols() || clean.rows() == 0) {
    throw InvalidArgument("accuracy proxy: shape mismatch");
  }
  long agree = 0;
  for (Eigen::Index i = 0; i < clean.rows(); ++i) {
    Eigen::Index a = 0;
    Eigen::Index b = 0;
    clean.row(i).maxCoeff(&a);
    noisy.row(i).maxCoeff(&b);
    if (a == b) ++agree;
  }
  return static_cast<double>(agree) / static_cast<double>(clean.rows());
}

double ArgmaxPreservation2(const std::vector<double>& pmf,
                           const Eigen::MatrixXd& locations,
                           const Eigen::MatrixXd& noise_cov) {
  if (locations.cols() != 2 || noise_cov.rows() != 2 || noise_cov.cols() != 2) {
    throw InvalidArgument("argmax preservation needs 2-class outputs");
  }
  const Eigen::Vector2d w(1.0, -1.0);
  const double sd = std::sqrt(w.dot(noise_cov * w));
  boost::math::normal_distribution<double> normal;
  double total = 0.0;
  for (std::size_t k = 0; k < pmf.size(); ++k) {
    const double gap = std::abs(locations.row(k).dot(w));
    total += pmf[k] * (sd > 0.0 ? boost::math::cdf(normal, gap / sd) : 1.0);
  }
  return total;
}

}  // namespace rpac
