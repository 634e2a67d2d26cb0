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

#ifndef RPAC_DECODER_HPP_
#define RPAC_DECODER_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rpac/core.hpp"

namespace rpac {

enum class DecoderKind {
  kSoftmaxLinear,
  kSoftmaxMlp,
  kGaussianLinear,
  kSoftmaxSharedPrecision,
};

std::string ToString(DecoderKind kind);
DecoderKind ParseDecoderKind(const std::string& name);

// u = diag(1 / scale) * basis^T * (y - shift).
struct InputTransform {
  Eigen::MatrixXd basis;
  Eigen::VectorXd shift;
  Eigen::VectorXd scale;

  static InputTransform Identity(int dim);
  Eigen::MatrixXd Apply(const Eigen::MatrixXd& y) const;  // d x n -> d x n
  // Maps a gradient in u back to a gradient in y.
  Eigen::MatrixXd PullBack(const Eigen::MatrixXd& grad_u) const;
};

// Targets for a batch: discrete symbols or continuous values (p x n).
struct DecoderTargets {
  std::vector<int> symbols;
  Eigen::MatrixXd values;
};

// A parametric decoder pi_phi(x | y).
//   softmax_linear:           logits = A u + a
//   softmax_mlp:              logits = W2 tanh(W1 u + b1) + b2
//   softmax_shared_precision: logits_k = a_k - 1/2 sum_i P_i (u_i - m_ki)^2,
//                             P = exp(rho), a Gaussian class model with a
//                             shared diagonal precision
//   gaussian_linear:          x ~ N(W u + b, diag(exp(2 c)))
class Decoder {
 public:
  Decoder(DecoderKind kind, int input_dim, int target, InputTransform transform,
          int hidden = 16);
  Decoder() : Decoder(DecoderKind::kSoftmaxLinear, 1, 2, InputTransform::Identity(1)) {}

  DecoderKind kind() const { return kind_; }
  int input_dim() const { return input_dim_; }
  // Alphabet size for softmax kinds, target dimension for gaussian_linear.
  int target() const { return target_; }
  int hidden() const { return hidden_; }
  bool is_discrete() const { return kind_ != DecoderKind::kGaussianLinear; }
  const InputTransform& transform() const { return transform_; }

  const Eigen::VectorXd& params() const { return params_; }
  void set_params(const Eigen::VectorXd& params);

  // Small random weights where the kind needs symmetry breaking.
  void Initialize(std::uint64_t seed);
  // Shared-precision only: a = ln pmf, means at the transformed symbol
  // locations (K x d rows in y space), unit precision.
  void InitializeFromLocations(const std::vector<double>& pmf,
                               const Eigen::MatrixXd& locations);

  // ln pi(k | y) for every k (K x n); softmax kinds only.
  Eigen::MatrixXd LogProbs(const Eigen::MatrixXd& y) const;

  // Per-sample -ln pi(x_j | y_j).
  Eigen::VectorXd Nll(const Eigen::MatrixXd& y, const DecoderTargets& t) const;

  // Per-sample NLL plus optional gradients: `grad_params` of the batch mean,
  // `grad_y` column j holds d nll_j / d y_j.
  Eigen::VectorXd NllWithGradients(const Eigen::MatrixXd& y,
                                   const DecoderTargets& t,
                                   Eigen::VectorXd* grad_params,
                                   Eigen::MatrixXd* grad_y) const;

  // Step-size scaling applied by the follower; ones except the shared
  // precision kind, whose mean block is divided by the current precision.
  Eigen::VectorXd StepScaling() const;

 private:
  DecoderKind kind_;
  int input_dim_;
  int target_;
  int hidden_;
  InputTransform transform_;
  Eigen::VectorXd params_;
};

}  // namespace rpac

#endif  // RPAC_DECODER_HPP_
