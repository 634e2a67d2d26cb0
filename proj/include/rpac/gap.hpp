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

#ifndef RPAC_GAP_HPP_
#define RPAC_GAP_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rpac/core.hpp"

namespace rpac {

enum class ScoreFamily { kLinear, kQuadraticFeatures, kTwoLayer };

std::string ToString(ScoreFamily family);
ScoreFamily ParseScoreFamily(const std::string& name);

// Score model s(z) on centered data. Internally the model sees u = z / scale
// (per coordinate) and returns s_k(z) = g_k(u) / scale_k.
class ScoreModel {
 public:
  ScoreModel(ScoreFamily family, int dim, Eigen::VectorXd scale,
             int hidden = 16);

  ScoreFamily family() const { return family_; }
  int dim() const { return dim_; }
  int hidden() const { return hidden_; }
  const Eigen::VectorXd& scale() const { return scale_; }
  const Eigen::VectorXd& params() const { return params_; }
  void set_params(const Eigen::VectorXd& params);
  Eigen::Index num_params() const { return params_.size(); }

  // Columns of `z` are points (d x n).
  Eigen::MatrixXd Evaluate(const Eigen::MatrixXd& z) const;
  Eigen::VectorXd Divergence(const Eigen::MatrixXd& z) const;
  Eigen::VectorXd Evaluate(const Eigen::VectorXd& z) const;
  double Divergence(const Eigen::VectorXd& z) const;

  // Loss mean_j sum_k (g_k(u_j) + target_kj)^2 in scaled units and its
  // gradient in the parameters.
  double LossAndGradient(const Eigen::MatrixXd& u, const Eigen::MatrixXd& target,
                         Eigen::VectorXd* grad) const;

  // Random initial parameters where the family needs them.
  void Initialize(std::uint64_t seed);

 private:
  Eigen::MatrixXd Features(const Eigen::MatrixXd& u) const;
  Eigen::MatrixXd Forward(const Eigen::MatrixXd& u, Eigen::MatrixXd* hidden) const;
  Eigen::VectorXd ScaledDivergence(const Eigen::MatrixXd& u) const;

  ScoreFamily family_;
  int dim_;
  int hidden_;
  Eigen::VectorXd scale_;
  Eigen::VectorXd params_;
};

struct DsmOptions {
  ScoreFamily family = ScoreFamily::kQuadraticFeatures;
  double epsilon = 1e-2;  // smoothing variance
  int steps = 400;
  double learning_rate = 0.05;
  int batch = 0;          // 0 means the full sample per step
  int hidden = 16;
  std::uint64_t seed = 0;
};

struct DsmFit {
  ScoreModel model;
  std::vector<double> loss_trace;
  double final_loss = 0.0;
};

// Centers the samples (m x d), then runs plain gradient descent on the
// denoising score-matching loss with fresh perturbations each step. The
// returned parameters are the average over the second half of the iterates.
DsmFit DsmTrain(const Eigen::MatrixXd& samples, const DsmOptions& options);

enum class GapMethod { kSteinRaw, kSteinRelative, kKurtosis };

std::string ToString(GapMethod method);
GapMethod ParseGapMethod(const std::string& name);

struct GapEstimate {
  double value = 0.0;
  GapMethod method = GapMethod::kKurtosis;
  bool clamp_active = false;
  bool dimensional_fix = true;
  double ridge = 0.0;
  std::optional<double> sigma2;
  std::optional<double> kappa4;
  std::vector<double> loss_trace;
};

enum class SteinVariant { kRaw, kRelative };

// Raw: mean ||s||^2 / 2 - mean div s. Relative: 1/2 mean ||T||^2 - d/2 with
// T = s + inv(Sigma) z when ridge = 0 and, for ridge > 0,
// T = s~ + inv(Sigma) z with s~ = s + (inv(Sigma) + ridge I) z.
GapEstimate SteinGapEstimate(const Eigen::MatrixXd& samples,
                             const ScoreModel& score, SteinVariant variant,
                             double ridge = 0.0);

struct KurtosisOptions {
  double clamp_c = 1.0;
  bool dimensional_fix = true;
  // |kappa4| within this many Gaussian-null standard errors of zero is
  // treated as zero and the clamp c / N takes over. 0 disables.
  double noise_floor_sigmas = 3.0;
};

// (max(|kappa4|, c / N))^2 / (48 sigma^8) with the fix, / (48 sigma^4)
// without it.
GapEstimate KurtosisGapEstimate(const Eigen::VectorXd& samples,
                                const KurtosisOptions& options = {});

struct CorrectedMiValue {
  double value = 0.0;
  bool clamped = false;
};

// beta - gap, floored at zero.
CorrectedMiValue CorrectedMi(double certified_bound, const GapEstimate& gap);

// An estimate is admitted for reporting only when it is positive and does
// not exceed the oracle KL by more than `slack`.
struct GateDecision {
  bool admitted = false;
  double estimate = 0.0;
  double oracle_kl = 0.0;
};

GateDecision GapGate(const GapEstimate& gap, double oracle_kl,
                     double slack = 0.02);

GapMethod DefaultGapMethod(int dim);
ScoreFamily DefaultScoreFamily(int dim);

}  // namespace rpac

#endif  // RPAC_GAP_HPP_
