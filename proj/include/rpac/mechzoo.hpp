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

#ifndef RPAC_MECHZOO_HPP_
#define RPAC_MECHZOO_HPP_

#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rpac/core.hpp"

namespace rpac {

// Named numeric parameters; scalars are one-element lists.
using ZooParams = std::map<std::string, std::vector<double>>;

struct ZooSpec {
  std::string name;
  std::string distribution;
  ZooParams distribution_params;
  std::string mechanism;
  ZooParams mechanism_params;

  bool operator==(const ZooSpec&) const = default;
};

// Distributions:
//   discrete_uniform_k   k, optional values (k * dim), dim
//   discrete_pmf         pmf, optional values, dim
//   gaussian             mean (d), var (d) or cov (d * d)
//   gaussian_mixture     weights, means (k * dim), vars (k), dim
//   uniform_interval     a, b
//   label_nuisance_grid  label_values, levels, nuisance_scale; uniform over
//                        (label, nuisance_scale * q_j) with q the
//                        standardized normal quantile levels
DataDistribution MakeDistribution(const std::string& name, const ZooParams& params);

// Mechanisms:
//   identity          dim
//   linear            matrix (rows * cols, row-major), rows, cols
//   clipped_norm      r, dim
//   symbol_locations  locations (k * dim, row-major), dim; input is the
//                     symbol index
//   toy_logit         margin_scale, nuisance_scale; input (label, u) gives
//                     logits ((n + m) / sqrt 2, (n - m) / sqrt 2) with
//                     m = margin_scale * label and n = nuisance_scale * u
Mechanism MakeMechanism(const std::string& name, const ZooParams& params);

struct ZooInstance {
  DataDistribution distribution;
  Mechanism mechanism;
  bool oracle_supported = false;
};

ZooInstance MakeZoo(const ZooSpec& spec);

// q_j = Phi^{-1}((j + 1/2) / k), rescaled to unit empirical variance.
Eigen::VectorXd StandardizedQuantileLevels(int k);

// Row k is mech(atom_k) for a discrete distribution.
Eigen::MatrixXd SymbolLocations(const Mechanism& mech, const DataDistribution& dist);

// Label direction of toy_logit output, (e1 - e2) / sqrt 2.
Eigen::Vector2d ToyLogitLabelDirection();

// Fraction of rows whose argmax matches between clean and perturbed outputs.
double AccuracyProxy(const Eigen::MatrixXd& clean, const Eigen::MatrixXd& noisy);

// Argmax preservation on a discrete instance under Gaussian noise, in closed
// form for 2-class outputs: mean over symbols of Phi(|margin gap| / sd).
double ArgmaxPreservation2(const std::vector<double>& pmf,
                           const Eigen::MatrixXd& locations,
                           const Eigen::MatrixXd& noise_cov);

}  // namespace rpac

#endif  // RPAC_MECHZOO_HPP_
