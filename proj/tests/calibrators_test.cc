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

#include <cmath>

#include <gtest/gtest.h>

#include "rpac/calibrators.hpp"
#include "rpac/mechzoo.hpp"
#include "rpac/stats.hpp"

namespace rpac {
namespace {

SpectralDecomposition AxisSpectrum(const Eigen::VectorXd& lambda) {
  return {lambda, Eigen::MatrixXd::Identity(lambda.size(), lambda.size())};
}

Eigen::MatrixXd Diag(std::initializer_list<double> v) {
  Eigen::VectorXd d(v.size());
  int i = 0;
  for (double x : v) d[i++] = x;
  return d.asDiagonal();
}

TEST(LogdetBound, Examples) {
  EXPECT_EQ(LogdetBound(Eigen::MatrixXd::Zero(2, 2), Eigen::MatrixXd::Identity(2, 2)), 0.0);
  EXPECT_NEAR(LogdetBound(Eigen::MatrixXd::Identity(2, 2), Eigen::MatrixXd::Identity(2, 2)),
              std::log(2.0), 1e-12);
  EXPECT_NEAR(LogdetBound(Diag({4, 1}), Diag({6, 3})), 0.39925, 1e-5);
  EXPECT_NEAR(GaussianMiExact(Diag({4, 1}), Diag({6, 3})), 0.39925, 1e-5);
  EXPECT_NEAR(GaussianMiExact(Eigen::MatrixXd::Identity(2, 2), Eigen::MatrixXd::Identity(2, 2)),
              std::log(2.0), 1e-12);
  EXPECT_THROW(LogdetBound(Diag({1, 1}), Diag({1, 0})), InvalidArgument);
}

TEST(LogdetBound, MatchesExactOnCorrelatedPairs) {
  Rng rng(3);
  std::normal_distribution<double> n;
  for (int t = 0; t < 10; ++t) {
    Eigen::Matrix3d a, b;
    for (int i = 0; i < 9; ++i) {
      a.data()[i] = n(rng);
      b.data()[i] = n(rng);
    }
    const Eigen::Matrix3d sm = a * a.transpose();
    const Eigen::Matrix3d sb = b * b.transpose() + 0.1 * Eigen::Matrix3d::Identity();
    EXPECT_NEAR(LogdetBound(sm, sb), GaussianMiExact(sm, sb), 1e-9);
  }
}

TEST(AutoPac, AnisotropicZeroSlack) {
  AutoPacParams p;
  p.c = 0.0;
  p.v = 0.5;
  const CalibrationReport r = AutoPacFromSpectrum(AxisSpectrum(Eigen::Vector2d(4, 1)), 2.0, p);
  EXPECT_EQ(r.branch, "anisotropic");
  EXPECT_NEAR(r.noise_eigenvalues[0], 6.0, 1e-12);
  EXPECT_NEAR(r.noise_eigenvalues[1], 3.0, 1e-12);
  EXPECT_NEAR(r.certified_bound, 0.39925, 1e-5);
  EXPECT_LE(r.certified_bound, p.v);
  EXPECT_NEAR(r.noise_power, 9.0, 1e-9);
}

TEST(AutoPac, IsotropicFallback) {
  AutoPacParams p;
  p.c = 0.01;
  p.v = 0.5;
  const CalibrationReport r = AutoPacFromSpectrum(AxisSpectrum(Eigen::Vector2d(1, 1)), 1.0, p);
  EXPECT_EQ(r.branch, "isotropic");
  EXPECT_TRUE(r.noise.covariance().isApprox(2.02 * Eigen::Matrix2d::Identity(), 1e-12));
}

TEST(AutoPac, ConstantMechanism) {
  AutoPacParams p;
  p.c = 0.01;
  p.v = 0.5;
  const CalibrationReport r = AutoPacFromSpectrum(AxisSpectrum(Eigen::Vector2d(0, 0)), 0.0, p);
  EXPECT_EQ(r.branch, "isotropic");
  EXPECT_NEAR(r.noise_eigenvalues[0], 2 * 0.01 / (2 * 0.5), 1e-12);
  EXPECT_TRUE(std::isfinite(r.noise_power));
}

TEST(AutoPac, CalibrateOnZooRecordsBound) {
  ZooSpec spec{"g", "gaussian", {{"mean", {0, 0}}, {"var", {4, 1}}}, "clipped_norm",
               {{"r", {20}}, {"dim", {2}}}};
  const ZooInstance zoo = MakeZoo(spec);
  AutoPacParams p;
  p.m = 20000;
  p.v = 0.5;
  p.seed = 4;
  const CalibrationReport r = AutoPacCalibrate(zoo.mechanism, zoo.distribution, p);
  EXPECT_LE(r.certified_bound, p.v);
  EXPECT_FALSE(r.heuristic_norm_bound);
  EXPECT_EQ(r.sample_count, 20000);
  EXPECT_NEAR(r.noise_power, r.noise.covariance().trace(), 1e-9);
}

TEST(AutoPac, HeuristicNormBoundFlag) {
  ZooSpec spec{"g", "gaussian", {{"mean", {0}}, {"var", {1}}}, "identity", {{"dim", {1}}}};
  const ZooInstance zoo = MakeZoo(spec);
  AutoPacParams p;
  p.m = 1000;
  const CalibrationReport r = AutoPacCalibrate(zoo.mechanism, zoo.distribution, p);
  EXPECT_TRUE(r.heuristic_norm_bound);
}

TEST(EfficientPac, Allocation) {
  const Eigen::VectorXd e = EfficientPacAllocation(Eigen::Vector2d(1, 4), 1.0);
  EXPECT_NEAR(e[0], 1.5, 1e-12);
  EXPECT_NEAR(e[1], 3.0, 1e-12);
  const Eigen::VectorXd flat = EfficientPacAllocation(Eigen::VectorXd::Ones(5), 0.7);
  for (int i = 0; i < 5; ++i) EXPECT_NEAR(flat[i], 5 / (2 * 0.7), 1e-12);
  const Eigen::VectorXd sigma = Eigen::Vector3d(0.3, 2.0, 7.0);
  EXPECT_TRUE(EfficientPacAllocation(sigma, 2.0).isApprox(0.5 * EfficientPacAllocation(sigma, 1.0)));
}

TEST(EfficientPac, CalibrateConvergesAndIsSafe) {
  ZooSpec spec{"g", "gaussian", {{"mean", {0, 0}}, {"var", {4, 1}}}, "identity", {{"dim", {2}}}};
  const ZooInstance zoo = MakeZoo(spec);
  EfficientPacParams p;
  p.tau = 1e-3;
  p.beta = 0.5;
  p.max_samples = 200000;
  p.seed = 8;
  const CalibrationReport r = EfficientPacCalibrate(zoo.mechanism, zoo.distribution, p);
  EXPECT_TRUE(r.converged);
  EXPECT_FALSE(r.convergence_rule.empty());
  EXPECT_LE(LogdetBound(Diag({4, 1}), r.noise.covariance()), 0.5 + 0.02);
}

TEST(EfficientPac, NonConvergenceKeepsLastIterate) {
  ZooSpec spec{"g", "gaussian", {{"mean", {0}}, {"var", {1}}}, "identity", {{"dim", {1}}}};
  const ZooInstance zoo = MakeZoo(spec);
  EfficientPacParams p;
  p.tau = 1e-12;
  p.max_samples = 400;
  const CalibrationReport r = EfficientPacCalibrate(zoo.mechanism, zoo.distribution, p);
  EXPECT_FALSE(r.converged);
  EXPECT_GT(r.noise_power, 0.0);
  EXPECT_EQ(r.sample_count, 400);
}

TEST(EfficientPac, RejectsNonUnitaryBasis) {
  ZooSpec spec{"g", "gaussian", {{"mean", {0}}, {"var", {1}}}, "identity", {{"dim", {1}}}};
  const ZooInstance zoo = MakeZoo(spec);
  EfficientPacParams p;
  p.basis = 2.0 * Eigen::MatrixXd::Identity(1, 1);
  EXPECT_THROW(EfficientPacCalibrate(zoo.mechanism, zoo.distribution, p), InvalidArgument);
}

TEST(Waterfill, ClosedForms) {
  const WaterfillSolution a = WaterfillCalibrate(Eigen::VectorXd::Ones(1), {}, 0.5);
  EXPECT_NEAR(a.noise_eigenvalues[0], 1.0 / (std::exp(1.0) - 1.0), 1e-8);
  EXPECT_NEAR(a.noise_eigenvalues[0], 0.58198, 1e-5);
  const WaterfillSolution b = WaterfillCalibrate(Eigen::VectorXd::Ones(1), {}, 0.5 * std::log(2.0));
  EXPECT_NEAR(b.noise_eigenvalues[0], 1.0, 1e-8);
  EXPECT_THROW(WaterfillCalibrate(Eigen::VectorXd::Ones(1), {}, 0.0), InvalidArgument);
}

TEST(Waterfill, KktAndConstraint) {
  Rng rng(21);
  std::uniform_real_distribution<double> u(-3, 3);
  for (int t = 0; t < 50; ++t) {
    const int d = 1 + t % 8;
    Eigen::VectorXd r(d);
    for (int i = 0; i < d; ++i) r[i] = std::exp(u(rng));
    const double beta = std::exp(u(rng) / 2);
    const WaterfillSolution s = WaterfillCalibrate(r, {}, beta);
    for (int i = 0; i < d; ++i) {
      const double l = s.noise_eigenvalues[i];
      EXPECT_LE(std::abs(2 * l * (l + r[i]) - s.multiplier * r[i]), 1e-8 * s.multiplier * r[i]);
    }
    EXPECT_LE(std::abs(DiagonalLogdet(r, s.noise_eigenvalues) - beta), 1e-9);
    EXPECT_NEAR(s.achieved_bound, beta, 1e-9);
  }
}

TEST(Waterfill, MonotoneInBudget) {
  const Eigen::Vector3d r(5, 1, 0.2);
  double previous = std::numeric_limits<double>::infinity();
  Eigen::VectorXd previous_l = Eigen::VectorXd::Constant(3, previous);
  for (double beta = 0.1; beta < 6; beta *= 1.5) {
    const WaterfillSolution s = WaterfillCalibrate(r, {}, beta);
    EXPECT_LE(s.noise_eigenvalues.sum(), previous);
    EXPECT_TRUE((s.noise_eigenvalues.array() <= previous_l.array()).all());
    previous = s.noise_eigenvalues.sum();
    previous_l = s.noise_eigenvalues;
  }
}

TEST(Waterfill, NoWorseThanAutoPac) {
  Rng rng(22);
  std::uniform_real_distribution<double> u(-2, 2);
  for (int t = 0; t < 30; ++t) {
    const int d = 2 + t % 6;
    Eigen::VectorXd r(d);
    for (int i = 0; i < d; ++i) r[i] = std::exp(u(rng));
    std::sort(r.data(), r.data() + d, std::greater<>());
    const double beta = 0.5;
    AutoPacParams p;
    p.c = 0.0;
    p.v = beta;
    const CalibrationReport ap = AutoPacFromSpectrum(AxisSpectrum(r), 0.0, p);
    const WaterfillSolution s = WaterfillCalibrate(r, {}, beta);
    EXPECT_LT(s.noise_eigenvalues.sum(), ap.noise_power);
  }
}

TEST(Waterfill, ScaledSpectrumStillSatisfiesKkt) {
  const Eigen::Vector2d r(3, 0.5);
  const WaterfillSolution s = WaterfillCalibrate(9.0 * r, {}, 0.8);
  for (int i = 0; i < 2; ++i) {
    const double l = s.noise_eigenvalues[i];
    EXPECT_LE(std::abs(2 * l * (l + 9 * r[i]) - s.multiplier * 9 * r[i]),
              1e-8 * s.multiplier * 9 * r[i]);
  }
}

TEST(Waterfill, WaterLevelFormula) {
  const double r = 2.0, lambda = 3.0;
  EXPECT_NEAR(WaterLevel(r, lambda), (-r + std::sqrt(r * r + 2 * lambda * r)) / 2, 1e-12);
  EXPECT_NEAR(WaterLevel(1e-8, 1e8), (-1e-8 + std::sqrt(1e-16 + 2.0)) / 2, 1e-12);
}

TEST(Waterfill, FromCovarianceZeroesNullDirections) {
  Eigen::Matrix2d cov;
  cov << 2, 2, 2, 2;
  const WaterfillSolution s = WaterfillFromCovariance(cov, 0.5);
  const CalibrationReport report = ToReport(s, Eigendecompose(cov).eigenvalues);
  EXPECT_NEAR(report.noise_power, 4.0 / (std::exp(1.0) - 1.0), 1e-8);
  EXPECT_NEAR(s.noise_eigenvalues.minCoeff(), 0.0, 0.0);
}

}  // namespace
}  // namespace rpac
