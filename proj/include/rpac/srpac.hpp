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

#ifndef RPAC_SRPAC_HPP_
#define RPAC_SRPAC_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rpac/core.hpp"
#include "rpac/decoder.hpp"
#include "rpac/quadrature.hpp"

namespace rpac {

// Diagonal Gaussian noise b = basis * (exp(log_std) .* eps).
struct NoiseRuleFamily {
  Eigen::VectorXd log_std;
  Eigen::MatrixXd basis;

  NoiseModel ToNoise() const { return NoiseModel::GaussianDiag(log_std, basis); }
};

struct SrpacConfig {
  double residual_budget = 1.0;  // nats
  std::string utility_loss = "squared_norm";
  double eta_phi = 0.5;
  double eta_lambda = 5e-4;
  double penalty_weight = 1000.0;
  int t_lambda = 3000;
  int t_phi = 10;
  int batch = 2048;
  int warmup_decoder_steps = 500;
  int eval_decoder_steps = 2000;
  int eval_batch = 65536;
  double min_log_std = -12.0;
  Eigen::VectorXd initial_log_std;  // empty means zeros
  Eigen::MatrixXd basis;            // empty means identity
  bool eigenbasis = false;          // use the output covariance eigenbasis
  DecoderKind decoder = DecoderKind::kSoftmaxLinear;
  int hidden = 16;
  std::uint64_t seed = 0;
};

void Validate(const SrpacConfig& config);

struct SrpacTraceRow {
  int iteration = 0;
  double log_score = 0.0;  // batch H_c
  double utility = 0.0;    // mean ||b||^2
  double penalty = 0.0;    // weight * (H_c - beta-hat)^2
};

struct SrpacResult {
  NoiseModel noise = NoiseModel::GaussianFixed(Eigen::MatrixXd::Zero(1, 1));
  NoiseRuleFamily rule;
  Decoder decoder;
  double achieved_log_score = 0.0;
  std::optional<double> oracle_conditional_entropy;
  double noise_power = 0.0;
  std::vector<SrpacTraceRow> trace;
  bool converged = false;
  long capped_nll = 0;
};

// A seeded batch of (x, y = mech(x) + b) with the standard draws eps.
struct SrpacBatch {
  DecoderTargets targets;
  Eigen::MatrixXd clean;  // d x n
  Eigen::MatrixXd eps;    // d x n
  Eigen::MatrixXd y;      // d x n
};

SrpacBatch DrawBatch(const DataDistribution& dist, const Mechanism& mech,
                     const NoiseRuleFamily& rule, int m, std::uint64_t seed);

inline constexpr double kNllCap = 50.0;

struct LogScore {
  double value = 0.0;
  double standard_error = 0.0;
  long capped = 0;
};

// Monte Carlo mean of -ln pi(x | mech(x) + b), each term capped at 50 nats.
LogScore EmpiricalLogScore(const DataDistribution& dist, const Mechanism& mech,
                           const NoiseModel& noise, const Decoder& decoder, int m,
                           std::uint64_t seed);

// `steps` gradient steps on the decoder with a fresh batch per step.
Decoder FollowerUpdate(const Decoder& decoder, const DataDistribution& dist,
                       const Mechanism& mech, const NoiseRuleFamily& rule,
                       int steps, double eta_phi, int m, std::uint64_t seed,
                       std::vector<double>* loss_trace = nullptr);

struct LeaderStep {
  double log_score = 0.0;
  double utility = 0.0;
  double penalty = 0.0;
  Eigen::VectorXd gradient;
};

// One gradient step on log_std of mean ||b||^2 + w (H_c - beta-hat)^2 with
// gradients through b by reparametrization.
NoiseRuleFamily LeaderUpdate(const NoiseRuleFamily& rule, const Decoder& decoder,
                             const DataDistribution& dist, const Mechanism& mech,
                             const SrpacConfig& config, std::uint64_t seed,
                             LeaderStep* diagnostics = nullptr);

// Decoder matching the configured kind with inputs normalized by the
// clean-output spread plus the initial noise, in the rule's basis.
Decoder MakeSrpacDecoder(const DataDistribution& dist, const Mechanism& mech,
                         const NoiseRuleFamily& rule, const SrpacConfig& config);

SrpacResult SrpacSolve(const DataDistribution& dist, const Mechanism& mech,
                       const SrpacConfig& config);

struct ComposedBudget {
  double residual = 0.0;     // sum beta-hat_i - (k - 1) H
  double additive_mi = 0.0;  // sum (H - beta-hat_i)
};

ComposedBudget ComposeResidualBudgets(const std::vector<double>& budgets,
                                      double data_entropy);

}  // namespace rpac

#endif  // RPAC_SRPAC_HPP_
