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

#include "rpac/core.hpp"
#include "rpac/stats.hpp"

namespace rpac {
namespace {

DataDistribution PointMass(double value) {
  return DataDistribution::Discrete({1.0}, {Eigen::VectorXd::Constant(1, value)});
}

Mechanism Identity1() {
  return Mechanism("identity", 1, 1, [](const Eigen::VectorXd& x) { return x; });
}

TEST(DeriveSeed, DeterministicAndStreamSeparated) {
  EXPECT_EQ(DeriveSeed(7, 1, 0), DeriveSeed(7, 1, 0));
  EXPECT_NE(DeriveSeed(7, 1, 0), DeriveSeed(7, 2, 0));
  EXPECT_NE(DeriveSeed(7, 1, 0), DeriveSeed(7, 1, 1));
  EXPECT_NE(DeriveSeed(7, 1, 0), DeriveSeed(8, 1, 0));
}

TEST(SampleMechanismOutputs, PointMassRepeats) {
  const Eigen::MatrixXd rows = SampleMechanismOutputs(Identity1(), PointMass(3.0), 2, 1);
  ASSERT_EQ(rows.rows(), 2);
  EXPECT_EQ(rows(0, 0), 3.0);
  EXPECT_EQ(rows(1, 0), 3.0);
}

TEST(SampleMechanismOutputs, LinearOnConstant) {
  Mechanism twice("linear", 1, 1, [](const Eigen::VectorXd& x) { return Eigen::VectorXd(2 * x); });
  const Eigen::MatrixXd rows = SampleMechanismOutputs(twice, PointMass(1.5), 1, 1);
  EXPECT_EQ(rows(0, 0), 3.0);
}

TEST(SampleMechanismOutputs, StandardNormalMean) {
  auto dist = DataDistribution::Continuous(
      1,
      [](Rng& rng) {
        Eigen::VectorXd v(1);
        StandardNormal(rng, v);
        return v;
      },
      std::nullopt);
  const Eigen::MatrixXd rows = SampleMechanismOutputs(Identity1(), dist, 10000, 42);
  EXPECT_LT(std::abs(rows.mean()), 0.05);
  EXPECT_EQ(rows, SampleMechanismOutputs(Identity1(), dist, 10000, 42));
}

TEST(SampleMechanismOutputs, RejectsDimensionMismatch) {
  Mechanism two("identity", 2, 2, [](const Eigen::VectorXd& x) { return x; });
  EXPECT_THROW(SampleMechanismOutputs(two, PointMass(1.0), 1, 1), InvalidArgument);
}

TEST(SampleMechanism, RejectsNormBoundViolation) {
  Mechanism bounded("identity", 1, 1, [](const Eigen::VectorXd& x) { return x; }, 1.0);
  EXPECT_THROW(SampleMechanismOutputs(bounded, PointMass(3.0), 1, 1), InvalidArgument);
}

TEST(Perturb, ZeroNoiseIsIdentity) {
  Eigen::MatrixXd out(3, 2);
  out << 1, 2, 3, 4, 5, 6;
  EXPECT_EQ(Perturb(out, NoiseModel::GaussianFixed(Eigen::MatrixXd::Zero(2, 2)), 3), out);
}

TEST(Perturb, ReparametrizationIdentity) {
  const Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(1, 2);
  Eigen::Vector2d diag(1.0, 4.0);
  const Eigen::MatrixXd y =
      Perturb(zero, NoiseModel::GaussianFixed(diag.asDiagonal().toDenseMatrix()), 99);
  Rng rng(99);
  Eigen::VectorXd eps(2);
  StandardNormal(rng, eps);
  EXPECT_DOUBLE_EQ(y(0, 0), 1.0 * eps[0]);
  EXPECT_DOUBLE_EQ(y(0, 1), 2.0 * eps[1]);

  const Eigen::MatrixXd y2 =
      Perturb(zero, NoiseModel::GaussianDiag(Eigen::Vector2d(0.0, std::log(2.0))), 99);
  EXPECT_NEAR(y2(0, 0), eps[0], 1e-15);
  EXPECT_NEAR(y2(0, 1), 2.0 * eps[1], 1e-15);
}

TEST(Perturb, EmpiricalCovariance) {
  const Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(100000, 2);
  const Eigen::MatrixXd cov = Eigen::Vector2d(1.0, 4.0).asDiagonal();
  const auto [mean, est] = EmpiricalMeanCov(Perturb(zero, NoiseModel::GaussianFixed(cov), 5));
  EXPECT_NEAR(est(0, 0), 1.0, 0.05);
  EXPECT_NEAR(est(1, 1), 4.0, 0.2);
  EXPECT_LT(std::abs(est(0, 1)), 0.05);
}

TEST(Perturb, RejectsDimensionMismatch) {
  EXPECT_THROW(Perturb(Eigen::MatrixXd::Zero(2, 3),
                       NoiseModel::GaussianFixed(Eigen::MatrixXd::Identity(2, 2)), 1),
               InvalidArgument);
}

TEST(NoiseModel, ValidatesCovariance) {
  Eigen::Matrix2d asym;
  asym << 1, 0.5, 0, 1;
  EXPECT_THROW(NoiseModel::GaussianFixed(asym), InvalidArgument);
  Eigen::Matrix2d indefinite;
  indefinite << 1, 2, 2, 1;
  EXPECT_THROW(NoiseModel::GaussianFixed(indefinite), InvalidArgument);
}

TEST(NoiseModel, PowerIsTrace) {
  Eigen::Matrix2d cov;
  cov << 2, 0.3, 0.3, 1;
  EXPECT_NEAR(NoiseModel::GaussianFixed(cov).power(), 3.0, 1e-12);
  const double theta = 0.4;
  Eigen::Matrix2d rot;
  rot << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
  const NoiseModel diag = NoiseModel::GaussianDiag(Eigen::Vector2d(0.1, -0.7), rot);
  EXPECT_NEAR(diag.power(), std::exp(0.2) + std::exp(-1.4), 1e-12);
  EXPECT_NEAR(diag.covariance().trace(), diag.power(), 1e-9);
}

TEST(NoiseModel, DiagRejectsNonOrthonormalBasis) {
  EXPECT_THROW(NoiseModel::GaussianDiag(Eigen::Vector2d::Zero(), 2 * Eigen::Matrix2d::Identity()),
               InvalidArgument);
}

TEST(Budget, ResidualToMi) {
  BudgetSpec spec;
  spec.data_entropy = std::log(4.0);
  spec.residual_floor = 1.0;
  const BudgetSpec out = ResidualToMiBudget(spec);
  EXPECT_NEAR(*out.mi_cap, 0.386294, 1e-6);
  EXPECT_EQ(out.primary, BudgetConvention::kMiCap);
}

TEST(Budget, Endpoints) {
  BudgetSpec full;
  full.data_entropy = 2.0;
  full.mi_cap = 2.0;
  full.primary = BudgetConvention::kMiCap;
  EXPECT_EQ(*ResidualToMiBudget(full).residual_floor, 0.0);
  BudgetSpec none = full;
  none.mi_cap = 0.0;
  EXPECT_EQ(*ResidualToMiBudget(none).residual_floor, 2.0);
}

TEST(Budget, ConversionIsInvolution) {
  BudgetSpec spec;
  spec.data_entropy = 1.7;
  spec.residual_floor = 0.45;
  const BudgetSpec once = ResidualToMiBudget(spec);
  EXPECT_EQ(ResidualToMiBudget(ResidualToMiBudget(once)), once);
}

TEST(Budget, MissingEntropyRejected) {
  BudgetSpec spec;
  spec.residual_floor = 1.0;
  EXPECT_THROW(ResidualToMiBudget(spec), InvalidArgument);
}

TEST(Budget, InconsistentRejected) {
  BudgetSpec spec;
  spec.data_entropy = 2.0;
  spec.residual_floor = 1.0;
  spec.mi_cap = 0.5;
  EXPECT_THROW(ResidualToMiBudget(spec), InvalidArgument);
}

TEST(PacAdvantageKl, Examples) {
  EXPECT_NEAR(PacAdvantageKl(0.5, 0.5), 0.0, 1e-15);
  EXPECT_NEAR(PacAdvantageKl(0.25, 0.5), 0.13081, 1e-5);
  EXPECT_NEAR(PacAdvantageKl(0.0, 0.5), std::log(2.0), 1e-12);
  EXPECT_THROW(PacAdvantageKl(0.5, 0.0), InvalidArgument);
  EXPECT_THROW(PacAdvantageKl(0.5, 1.0), InvalidArgument);
  EXPECT_THROW(PacAdvantageKl(1.5, 0.5), InvalidArgument);
}

TEST(PacAdvantageKl, NonnegativeZeroOnlyOnDiagonal) {
  for (double d = 0.0; d <= 1.0; d += 0.05) {
    for (double o = 0.05; o < 1.0; o += 0.05) {
      const double kl = PacAdvantageKl(d, o);
      EXPECT_GE(kl, 0.0);
      if (std::abs(d - o) > 1e-9) EXPECT_GT(kl, 0.0);
    }
  }
}

TEST(Intrinsic, Examples) {
  EXPECT_NEAR(IntrinsicPrivacyDiscrete({0.25, 0.25, 0.25, 0.25}), 0.0, 1e-15);
  EXPECT_NEAR(IntrinsicPrivacyDiscrete({0.5, 0.25, 0.25}), -0.05889, 1e-5);
  EXPECT_EQ(ResidualPacAccounting(0.0, 0.2), -0.2);
}

TEST(Intrinsic, DecompositionIdentity) {
  for (double intrinsic : {-1.3, -0.2, 0.0}) {
    for (double advantage : {0.0, 0.1, 0.77}) {
      EXPECT_DOUBLE_EQ(ResidualPacAccounting(intrinsic, advantage) + advantage, intrinsic);
    }
  }
}

TEST(CalibrationReport, GapCorrection) {
  CalibrationReport report;
  report.certified_bound = 0.5;
  AttachGapCorrection(report, 0.0724);
  EXPECT_NEAR(*report.corrected_mi, 0.4276, 1e-12);
  EXPECT_NEAR(*report.corrected_mi, report.certified_bound - *report.gap_estimate, 1e-12);
}

TEST(CalibrationMethod, NamesRoundTrip) {
  for (auto m : {CalibrationMethod::kAutoPac, CalibrationMethod::kEfficientPac,
                 CalibrationMethod::kWaterfill, CalibrationMethod::kSrpac}) {
    EXPECT_EQ(ParseCalibrationMethod(ToString(m)), m);
  }
  EXPECT_THROW(ParseCalibrationMethod("bogus"), InvalidArgument);
}

TEST(DataDistribution, DiscreteValidation) {
  EXPECT_THROW(DataDistribution::Discrete({0.5, 0.4}, {Eigen::VectorXd::Zero(1),
                                                       Eigen::VectorXd::Ones(1)}),
               InvalidArgument);
}

}  // namespace
}  // namespace rpac
