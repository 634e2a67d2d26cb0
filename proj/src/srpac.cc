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

#include "rpac/srpac.hpp"

#include <algorithm>
#include <cmath>

#include "rpac/mechzoo.hpp"
#include "rpac/oracle.hpp"
#include "rpac/stats.hpp"

namespace rpac {

void Validate(const SrpacConfig& config) {
  if (config.utility_loss != "squared_norm") {
    throw InvalidArgument("srpac: only the squared_norm utility loss is supported");
  }
  if (!std::isfinite(config.residual_budget)) {
    throw InvalidArgument("srpac: residual budget must be finite");
  }
  if (!(config.eta_phi >= 0.0) || !(config.eta_lambda >= 0.0)) {
    throw InvalidArgument("srpac: learning rates must be nonnegative");
  }
  if (!(config.penalty_weight >= 0.0)) {
    throw InvalidArgument("srpac: penalty weight must be nonnegative");
  }
  if (config.t_lambda < 1 || config.t_phi < 1 || config.batch < 1 ||
      config.eval_batch < 1 || config.warmup_decoder_steps < 0 ||
      config.eval_decoder_steps < 0) {
    throw InvalidArgument("srpac: iteration counts and batch sizes must be positive");
  }
}

SrpacBatch DrawBatch(const DataDistribution& dist, const Mechanism& mech,
                     const NoiseRuleFamily& rule, int m, std::uint64_t seed) {
  if (mech.input_dim() != dist.support_dim()) {
    throw InvalidArgument("srpac: mechanism and distribution dimensions differ");
  }
  const int d = mech.output_dim();
  if (rule.log_std.size() != d || rule.basis.rows() != d || rule.basis.cols() != d) {
    throw InvalidArgument("srpac: noise rule does not match the output dimension");
  }
  Rng rng(seed);
  SrpacBatch batch;
  batch.clean.resize(d, m);
  batch.eps.resize(d, m);
  if (dist.is_discrete()) {
    batch.targets.symbols.resize(m);
  } else {
    batch.targets.values.resize(dist.support_dim(), m);
  }
  for (int j = 0; j < m; ++j) {
    int symbol = -1;
    const Eigen::VectorXd x = dist.Draw(rng, &symbol);
    batch.clean.col(j) = mech(x);
    if (dist.is_discrete()) {
      batch.targets.symbols[j] = symbol;
    } else {
      batch.targets.values.col(j) = x;
    }
  }
  for (int j = 0; j < m; ++j) StandardNormal(rng, batch.eps.col(j));
  const Eigen::VectorXd sigma = rule.log_std.array().exp().matrix();
  batch.y = batch.clean + rule.basis * (sigma.asDiagonal() * batch.eps);
  return batch;
}

LogScore EmpiricalLogScore(const DataDistribution& dist, const Mechanism& mech,
                           const NoiseModel& noise, const Decoder& decoder, int m,
                           std::uint64_t seed) {
  if (m < 1) throw InvalidArgument("log score needs m >= 1");
  if (noise.dim() != mech.output_dim() || decoder.input_dim() != mech.output_dim()) {
    throw InvalidArgument("log score: noise, decoder and mechanism dimensions differ");
  }
  const MechanismSample sample = SampleMechanism(mech, dist, m, DeriveSeed(seed, stream::kInputs));
  const Eigen::MatrixXd y =
      Perturb(sample.outputs, noise, DeriveSeed(seed, stream::kNoise)).transpose();
  DecoderTargets targets;
  if (dist.is_discrete()) {
    targets.symbols = sample.symbols;
  } else {
    targets.values = dist.Sample(m, DeriveSeed(seed, stream::kInputs)).values.transpose();
  }
  Eigen::VectorXd nll = decoder.Nll(y, targets);
  LogScore out;
  for (Eigen::Index j = 0; j < nll.size(); ++j) {
    if (!(nll[j] <= kNllCap)) {
      nll[j] = kNllCap;
      ++out.capped;
    }
  }
  out.value = nll.mean();
  const double var = (nll.array() - out.value).square().sum() / std::max<Eigen::Index>(1, m - 1);
  out.standard_error = std::sqrt(var / m);
  return out;
}

Decoder FollowerUpdate(const Decoder& decoder, const DataDistribution& dist,
                       const Mechanism& mech, const NoiseRuleFamily& rule,
                       int steps, double eta_phi, int m, std::uint64_t seed,
                       std::vector<double>* loss_trace) {
  if (steps < 0 || m < 1) throw InvalidArgument("follower: bad step or batch count");
  Decoder out = decoder;
  Eigen::VectorXd params = out.params();
  Eigen::VectorXd grad;
  for (int step = 0; step < steps; ++step) {
    const SrpacBatch batch =
        DrawBatch(dist, mech, rule, m, DeriveSeed(seed, stream::kFollower, step));
    const Eigen::VectorXd nll = out.NllWithGradients(batch.y, batch.targets, &grad, nullptr);
    const double loss = nll.mean();
    if (!std::isfinite(loss) || !grad.allFinite()) {
      throw NumericalError("follower: non-finite loss at step " + std::to_string(step));
    }
    if (loss_trace != nullptr) loss_trace->push_back(loss);
    if (eta_phi == 0.0) continue;
    params -= eta_phi * out.StepScaling().cwiseProduct(grad);
    out.set_params(params);
  }
  return out;
}

NoiseRuleFamily LeaderUpdate(const NoiseRuleFamily& rule, const Decoder& decoder,
                             const DataDistribution& dist, const Mechanism& mech,
                             const SrpacConfig& config, std::uint64_t seed,
                             LeaderStep* diagnostics) {
  const SrpacBatch batch = DrawBatch(dist, mech, rule, config.batch, seed);
  Eigen::MatrixXd grad_y;
  Eigen::VectorXd nll = decoder.NllWithGradients(batch.y, batch.targets, nullptr, &grad_y);
  for (Eigen::Index j = 0; j < nll.size(); ++j) {
    if (!(nll[j] <= kNllCap)) {
      nll[j] = kNllCap;
      grad_y.col(j).setZero();
    }
  }
  const double n = static_cast<double>(config.batch);
  const double h_c = nll.mean();
  const Eigen::VectorXd sigma = rule.log_std.array().exp().matrix();
  const Eigen::MatrixXd b = sigma.asDiagonal() * batch.eps;  // noise coordinates
  const Eigen::MatrixXd g = rule.basis.transpose() * grad_y;  // d nll / d b
  const double gap = h_c - config.residual_budget;
  // d b_i / d log_std_i = b_i.
  const Eigen::VectorXd utility_grad = 2.0 * b.array().square().rowwise().sum().matrix() / n;
  const Eigen::VectorXd score_grad = g.cwiseProduct(b).rowwise().sum() / n;
  const Eigen::VectorXd gradient =
      utility_grad + 2.0 * config.penalty_weight * gap * score_grad;
  if (!gradient.allFinite()) throw NumericalError("leader: non-finite gradient");
  NoiseRuleFamily out = rule;
  out.log_std = (rule.log_std - config.eta_lambda * gradient).cwiseMax(config.min_log_std);
  if (diagnostics != nullptr) {
    diagnostics->log_score = h_c;
    diagnostics->utility = b.colwise().squaredNorm().mean();
    diagnostics->penalty = config.penalty_weight * gap * gap;
    diagnostics->gradient = gradient;
  }
  return out;
}

Decoder MakeSrpacDecoder(const DataDistribution& dist, const Mechanism& mech,
                         const NoiseRuleFamily& rule, const SrpacConfig& config) {
  const int d = mech.output_dim();
  const Eigen::MatrixXd clean =
      SampleMechanismOutputs(mech, dist, 4096, DeriveSeed(config.seed, stream::kDecoderInit));
  const Eigen::VectorXd shift = clean.colwise().mean().transpose();
  const Eigen::VectorXd spread = ProjectedVariances(clean, rule.basis);
  const Eigen::VectorXd noise_var = (2.0 * rule.log_std.array()).exp().matrix();
  InputTransform transform{rule.basis, shift, (spread + noise_var).cwiseSqrt()};
  for (int i = 0; i < d; ++i) {
    if (!(transform.scale[i] > 0.0)) transform.scale[i] = 1.0;
  }
  int target = 0;
  if (dist.is_discrete()) {
    target = static_cast<int>(dist.pmf().size());
    if (config.decoder == DecoderKind::kGaussianLinear) {
      throw InvalidArgument("srpac: gaussian_linear decoder needs continuous X");
    }
  } else {
    target = dist.support_dim();
    if (config.decoder != DecoderKind::kGaussianLinear) {
      throw InvalidArgument("srpac: continuous X needs the gaussian_linear decoder");
    }
  }
  Decoder decoder(config.decoder, d, target, transform, config.hidden);
  if (config.decoder == DecoderKind::kSoftmaxSharedPrecision) {
    decoder.InitializeFromLocations(dist.pmf(), SymbolLocations(mech, dist));
  } else {
    decoder.Initialize(DeriveSeed(config.seed, stream::kDecoderInit, 1));
  }
  return decoder;
}

SrpacResult SrpacSolve(const DataDistribution& dist, const Mechanism& mech,
                       const SrpacConfig& config) {
  Validate(config);
  const int d = mech.output_dim();
  NoiseRuleFamily rule;
  if (config.basis.size() != 0) {
    rule.basis = config.basis;
  } else if (config.eigenbasis) {
    const Eigen::MatrixXd clean = SampleMechanismOutputs(
        mech, dist, 8192, DeriveSeed(config.seed, stream::kDecoderInit, 2));
    rule.basis = Eigendecompose(EmpiricalMeanCov(clean).second).eigenvectors;
  } else {
    rule.basis = Eigen::MatrixXd::Identity(d, d);
  }
  if (rule.basis.rows() != d || !IsUnitary(rule.basis)) {
    throw InvalidArgument("srpac: basis must be a d x d unitary matrix");
  }
  rule.log_std = config.initial_log_std.size() == 0 ? Eigen::VectorXd::Zero(d)
                                                    : config.initial_log_std;
  if (rule.log_std.size() != d) {
    throw InvalidArgument("srpac: initial_log_std must have one entry per output");
  }

  SrpacResult result;
  Decoder decoder = MakeSrpacDecoder(dist, mech, rule, config);
  std::uint64_t follower_call = 0;
  auto follow = [&](int steps) {
    decoder = FollowerUpdate(decoder, dist, mech, rule, steps, config.eta_phi,
                             config.batch,
                             DeriveSeed(config.seed, stream::kFollower, follower_call++));
  };
  follow(config.warmup_decoder_steps);
  for (int t = 1; t <= config.t_lambda; ++t) {
    if (t % config.t_phi == 0) follow(config.t_phi);
    LeaderStep step;
    rule = LeaderUpdate(rule, decoder, dist, mech, config,
                        DeriveSeed(config.seed, stream::kLeader, t), &step);
    result.trace.push_back({t, step.log_score, step.utility, step.penalty});
  }
  follow(config.eval_decoder_steps);

  result.rule = rule;
  result.noise = rule.ToNoise();
  result.noise_power = result.noise.power();
  result.decoder = decoder;
  const LogScore score =
      EmpiricalLogScore(dist, mech, result.noise, decoder, config.eval_batch,
                        DeriveSeed(config.seed, stream::kEvaluation));
  result.achieved_log_score = score.value;
  result.capped_nll = score.capped;
  result.converged = std::abs(score.value - config.residual_budget) <= 0.1;
  if (dist.is_discrete() && d <= 2) {
    result.oracle_conditional_entropy =
        ConditionalEntropyOracle(dist.pmf(), SymbolLocations(mech, dist),
                                 result.noise.covariance())
            .value;
  }
  return result;
}

ComposedBudget ComposeResidualBudgets(const std::vector<double>& budgets,
                                      double data_entropy) {
  if (budgets.empty()) throw InvalidArgument("compose: need at least one budget");
  ComposedBudget out;
  const double k = static_cast<double>(budgets.size());
  double sum = 0.0;
  for (double b : budgets) {
    sum += b;
    out.additive_mi += data_entropy - b;
  }
  out.residual = sum - (k - 1.0) * data_entropy;
  return out;
}

}  // namespace rpac
