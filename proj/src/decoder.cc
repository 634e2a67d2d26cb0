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

#include "rpac/decoder.hpp"

#include <cmath>

namespace rpac {

std::string ToString(DecoderKind kind) {
  switch (kind) {
    case DecoderKind::kSoftmaxLinear:
      return "softmax_linear";
    case DecoderKind::kSoftmaxMlp:
      return "softmax_mlp";
    case DecoderKind::kGaussianLinear:
      return "gaussian_linear";
    case DecoderKind::kSoftmaxSharedPrecision:
      return "softmax_shared_precision";
  }
  return "unknown";
}

DecoderKind ParseDecoderKind(const std::string& name) {
  if (name == "softmax_linear") return DecoderKind::kSoftmaxLinear;
  if (name == "softmax_mlp") return DecoderKind::kSoftmaxMlp;
  if (name == "gaussian_linear") return DecoderKind::kGaussianLinear;
  if (name == "softmax_shared_precision") return DecoderKind::kSoftmaxSharedPrecision;
  throw InvalidArgument("unknown decoder kind '" + name + "'");
}

InputTransform InputTransform::Identity(int dim) {
  return {Eigen::MatrixXd::Identity(dim, dim), Eigen::VectorXd::Zero(dim),
          Eigen::VectorXd::Ones(dim)};
}

Eigen::MatrixXd InputTransform::Apply(const Eigen::MatrixXd& y) const {
  return scale.cwiseInverse().asDiagonal() *
         (basis.transpose() * (y.colwise() - shift));
}

Eigen::MatrixXd InputTransform::PullBack(const Eigen::MatrixXd& grad_u) const {
  return basis * (scale.cwiseInverse().asDiagonal() * grad_u);
}

namespace {

constexpr double kLog2Pi = 1.8378770664093453;

Eigen::Index ParamCount(DecoderKind kind, int d, int k, int h) {
  switch (kind) {
    case DecoderKind::kSoftmaxLinear:
      return k * d + k;
    case DecoderKind::kSoftmaxMlp:
      return h * d + h + k * h + k;
    case DecoderKind::kSoftmaxSharedPrecision:
      return k + k * d + d;
    case DecoderKind::kGaussianLinear:
      return k * d + 2 * k;
  }
  return 0;
}

// Column-wise log-softmax.
Eigen::MatrixXd LogSoftmax(const Eigen::MatrixXd& logits) {
  Eigen::MatrixXd out = logits;
  for (Eigen::Index j = 0; j < out.cols(); ++j) {
    const double m = out.col(j).maxCoeff();
    const double lse = m + std::log((out.col(j).array() - m).exp().sum());
    out.col(j).array() -= lse;
  }
  return out;
}

}  // namespace

Decoder::Decoder(DecoderKind kind, int input_dim, int target,
                 InputTransform transform, int hidden)
    : kind_(kind),
      input_dim_(input_dim),
      target_(target),
      hidden_(hidden),
      transform_(std::move(transform)) {
  if (input_dim_ < 1 || target_ < 1) {
    throw InvalidArgument("decoder dimensions must be positive");
  }
  if (is_discrete() && target_ < 2) {
    throw InvalidArgument("softmax decoders need at least 2 symbols");
  }
  if (kind_ == DecoderKind::kSoftmaxMlp && hidden_ < 1) {
    throw InvalidArgument("softmax_mlp needs hidden units");
  }
  if (transform_.basis.rows() != input_dim_ || transform_.basis.cols() != input_dim_ ||
      transform_.shift.size() != input_dim_ || transform_.scale.size() != input_dim_ ||
      !(transform_.scale.minCoeff() > 0.0)) {
    throw InvalidArgument("decoder input transform has the wrong shape");
  }
  params_ = Eigen::VectorXd::Zero(ParamCount(kind_, input_dim_, target_, hidden_));
}

void Decoder::set_params(const Eigen::VectorXd& params) {
  if (params.size() != params_.size()) {
    throw InvalidArgument("decoder parameter vector has the wrong size");
  }
  params_ = params;
}

void Decoder::Initialize(std::uint64_t seed) {
  Rng rng(seed);
  Eigen::VectorXd draw(params_.size());
  StandardNormal(rng, draw);
  const int d = input_dim_;
  const int k = target_;
  const int h = hidden_;
  params_.setZero();
  switch (kind_) {
    case DecoderKind::kSoftmaxLinear:
      params_.head(k * d) = 0.1 * draw.head(k * d);
      break;
    case DecoderKind::kSoftmaxMlp:
      params_.head(h * d) = draw.head(h * d) / std::sqrt(static_cast<double>(d));
      params_.segment(h * d + h, k * h) = 0.1 * draw.segment(h * d + h, k * h);
      break;
    case DecoderKind::kSoftmaxSharedPrecision:
      params_.segment(k, k * d) = 0.1 * draw.segment(k, k * d);
      break;
    case DecoderKind::kGaussianLinear:
      params_.head(k * d) = 0.1 * draw.head(k * d);
      break;
  }
}

void Decoder::InitializeFromLocations(const std::vector<double>& pmf,
                                      const Eigen::MatrixXd& locations) {
  if (kind_ != DecoderKind::kSoftmaxSharedPrecision) {
    throw InvalidArgument("location initialization needs softmax_shared_precision");
  }
  const int d = input_dim_;
  const int k = target_;
  if (static_cast<int>(pmf.size()) != k || locations.rows() != k ||
      locations.cols() != d) {
    throw InvalidArgument("location initialization: shape mismatch");
  }
  params_.setZero();
  for (int c = 0; c < k; ++c) {
    params_[c] = pmf[c] > 0.0 ? std::log(pmf[c]) : -50.0;
  }
  Eigen::Map<Eigen::MatrixXd> means(params_.data() + k, k, d);
  means = transform_.Apply(locations.transpose()).transpose();
}

Eigen::VectorXd Decoder::StepScaling() const {
  Eigen::VectorXd out = Eigen::VectorXd::Ones(params_.size());
  if (kind_ != DecoderKind::kSoftmaxSharedPrecision) return out;
  const int d = input_dim_;
  const int k = target_;
  Eigen::Map<const Eigen::VectorXd> rho(params_.data() + k + k * d, d);
  Eigen::Map<Eigen::MatrixXd> mean_block(out.data() + k, k, d);
  for (int i = 0; i < d; ++i) mean_block.col(i).setConstant(std::exp(-rho[i]));
  return out;
}

Eigen::MatrixXd Decoder::LogProbs(const Eigen::MatrixXd& y) const {
  if (!is_discrete()) throw InvalidArgument("LogProbs needs a softmax decoder");
  if (y.rows() != input_dim_) throw InvalidArgument("decoder input dimension mismatch");
  const Eigen::MatrixXd u = transform_.Apply(y);
  const int d = input_dim_;
  const int k = target_;
  const int h = hidden_;
  Eigen::MatrixXd logits;
  switch (kind_) {
    case DecoderKind::kSoftmaxLinear: {
      Eigen::Map<const Eigen::MatrixXd> a(params_.data(), k, d);
      Eigen::Map<const Eigen::VectorXd> bias(params_.data() + k * d, k);
      logits = (a * u).colwise() + bias;
      break;
    }
    case DecoderKind::kSoftmaxMlp: {
      Eigen::Map<const Eigen::MatrixXd> w1(params_.data(), h, d);
      Eigen::Map<const Eigen::VectorXd> b1(params_.data() + h * d, h);
      Eigen::Map<const Eigen::MatrixXd> w2(params_.data() + h * d + h, k, h);
      Eigen::Map<const Eigen::VectorXd> b2(params_.data() + h * d + h + k * h, k);
      const Eigen::MatrixXd t = ((w1 * u).colwise() + b1).array().tanh().matrix();
      logits = (w2 * t).colwise() + b2;
      break;
    }
    case DecoderKind::kSoftmaxSharedPrecision: {
      Eigen::Map<const Eigen::VectorXd> a(params_.data(), k);
      Eigen::Map<const Eigen::MatrixXd> m(params_.data() + k, k, d);
      Eigen::Map<const Eigen::VectorXd> rho(params_.data() + k + k * d, d);
      const Eigen::VectorXd p = rho.array().exp().matrix();
      // The -u^T P u / 2 term is shared by every class and cancels.
      const Eigen::VectorXd offset =
          a - 0.5 * (m.array().square().matrix() * p);
      logits = (m * p.asDiagonal() * u).colwise() + offset;
      break;
    }
    case DecoderKind::kGaussianLinear:
      break;
  }
  return LogSoftmax(logits);
}

Eigen::VectorXd Decoder::Nll(const Eigen::MatrixXd& y,
                             const DecoderTargets& t) const {
  return NllWithGradients(y, t, nullptr, nullptr);
}

Eigen::VectorXd Decoder::NllWithGradients(const Eigen::MatrixXd& y,
                                          const DecoderTargets& t,
                                          Eigen::VectorXd* grad_params,
                                          Eigen::MatrixXd* grad_y) const {
  if (y.rows() != input_dim_) throw InvalidArgument("decoder input dimension mismatch");
  const Eigen::Index n = y.cols();
  const double inv_n = 1.0 / static_cast<double>(n);
  const int d = input_dim_;
  const int k = target_;
  const int h = hidden_;
  const Eigen::MatrixXd u = transform_.Apply(y);
  Eigen::VectorXd nll(n);
  if (grad_params != nullptr) grad_params->setZero(params_.size());

  if (kind_ == DecoderKind::kGaussianLinear) {
    if (t.values.rows() != k || t.values.cols() != n) {
      throw InvalidArgument("gaussian decoder targets have the wrong shape");
    }
    Eigen::Map<const Eigen::MatrixXd> w(params_.data(), k, d);
    Eigen::Map<const Eigen::VectorXd> b(params_.data() + k * d, k);
    Eigen::Map<const Eigen::VectorXd> c(params_.data() + k * d + k, k);
    const Eigen::ArrayXd inv_sigma = (-c.array()).exp();
    const Eigen::MatrixXd mu = (w * u).colwise() + b;
    const Eigen::MatrixXd r =
        inv_sigma.matrix().asDiagonal() * (t.values - mu);  // standardized
    nll = (0.5 * r.colwise().squaredNorm().array() + c.sum() + 0.5 * k * kLog2Pi)
              .matrix()
              .transpose();
    // d nll / d mu = -r / sigma.
    const Eigen::MatrixXd g_mu = -(inv_sigma.matrix().asDiagonal() * r);
    if (grad_params != nullptr) {
      Eigen::Map<Eigen::MatrixXd> gw(grad_params->data(), k, d);
      Eigen::Map<Eigen::VectorXd> gb(grad_params->data() + k * d, k);
      Eigen::Map<Eigen::VectorXd> gc(grad_params->data() + k * d + k, k);
      gw = inv_n * g_mu * u.transpose();
      gb = inv_n * g_mu.rowwise().sum();
      gc = (1.0 - (r.array().square().rowwise().sum() * inv_n)).matrix();
    }
    if (grad_y != nullptr) *grad_y = transform_.PullBack(w.transpose() * g_mu);
    return nll;
  }

  if (static_cast<Eigen::Index>(t.symbols.size()) != n) {
    throw InvalidArgument("decoder needs one symbol per output");
  }
  const Eigen::MatrixXd logp = LogProbs(y);
  Eigen::MatrixXd g = logp.array().exp().matrix();  // d nll / d logits
  for (Eigen::Index j = 0; j < n; ++j) {
    const int x = t.symbols[j];
    if (x < 0 || x >= k) throw InvalidArgument("decoder target symbol out of range");
    nll[j] = -logp(x, j);
    g(x, j) -= 1.0;
  }
  if (grad_params == nullptr && grad_y == nullptr) return nll;

  switch (kind_) {
    case DecoderKind::kSoftmaxLinear: {
      Eigen::Map<const Eigen::MatrixXd> a(params_.data(), k, d);
      if (grad_params != nullptr) {
        Eigen::Map<Eigen::MatrixXd> ga(grad_params->data(), k, d);
        Eigen::Map<Eigen::VectorXd> gbias(grad_params->data() + k * d, k);
        ga = inv_n * g * u.transpose();
        gbias = inv_n * g.rowwise().sum();
      }
      if (grad_y != nullptr) *grad_y = transform_.PullBack(a.transpose() * g);
      break;
    }
    case DecoderKind::kSoftmaxMlp: {
      Eigen::Map<const Eigen::MatrixXd> w1(params_.data(), h, d);
      Eigen::Map<const Eigen::VectorXd> b1(params_.data() + h * d, h);
      Eigen::Map<const Eigen::MatrixXd> w2(params_.data() + h * d + h, k, h);
      const Eigen::MatrixXd th = ((w1 * u).colwise() + b1).array().tanh().matrix();
      const Eigen::MatrixXd dh =
          (w2.transpose() * g).cwiseProduct((1.0 - th.array().square()).matrix());
      if (grad_params != nullptr) {
        Eigen::Map<Eigen::MatrixXd> gw1(grad_params->data(), h, d);
        Eigen::Map<Eigen::VectorXd> gb1(grad_params->data() + h * d, h);
        Eigen::Map<Eigen::MatrixXd> gw2(grad_params->data() + h * d + h, k, h);
        Eigen::Map<Eigen::VectorXd> gb2(grad_params->data() + h * d + h + k * h, k);
        gw2 = inv_n * g * th.transpose();
        gb2 = inv_n * g.rowwise().sum();
        gw1 = inv_n * dh * u.transpose();
        gb1 = inv_n * dh.rowwise().sum();
      }
      if (grad_y != nullptr) *grad_y = transform_.PullBack(w1.transpose() * dh);
      break;
    }
    case DecoderKind::kSoftmaxSharedPrecision: {
      Eigen::Map<const Eigen::MatrixXd> m(params_.data() + k, k, d);
      Eigen::Map<const Eigen::VectorXd> rho(params_.data() + k + k * d, d);
      const Eigen::VectorXd p = rho.array().exp().matrix();
      if (grad_params != nullptr) {
        Eigen::Map<Eigen::VectorXd> ga(grad_params->data(), k);
        Eigen::Map<Eigen::MatrixXd> gm(grad_params->data() + k, k, d);
        Eigen::Map<Eigen::VectorXd> grho(grad_params->data() + k + k * d, d);
        const Eigen::VectorXd row_sum = g.rowwise().sum();
        const Eigen::MatrixXd gu = g * u.transpose();  // K x d
        ga = inv_n * row_sum;
        gm = inv_n * (gu - row_sum.asDiagonal() * m) * p.asDiagonal();
        // Columns of g sum to zero, so the u_i^2 term drops out.
        for (int i = 0; i < d; ++i) {
          const double cross = m.col(i).dot(gu.col(i));
          const double square = m.col(i).array().square().matrix().dot(row_sum);
          grho[i] = -0.5 * p[i] * inv_n * (square - 2.0 * cross);
        }
      }
      if (grad_y != nullptr) {
        *grad_y = transform_.PullBack(p.asDiagonal() * (m.transpose() * g));
      }
      break;
    }
    case DecoderKind::kGaussianLinear:
      break;
  }
  return nll;
}

}  // namespace rpac
