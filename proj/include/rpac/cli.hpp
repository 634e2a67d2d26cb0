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

#ifndef RPAC_CLI_HPP_
#define RPAC_CLI_HPP_

#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rpac/report_io.hpp"

namespace rpac {

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;

// Logdet bound of Gaussian noise against an output covariance. A singular
// noise covariance is allowed when the signal has no mass on its null space;
// otherwise the bound is +inf.
double CertifiedBound(const Eigen::MatrixXd& sigma_m, const Eigen::MatrixXd& sigma_b);

// Scales `noise_cov` by a scalar so that the quadrature MI of the discrete
// instance equals `target_mi`, by bisection in the log scale.
Eigen::MatrixXd ScaleToOracleMi(const std::vector<double>& pmf,
                                const Eigen::MatrixXd& locations,
                                const Eigen::MatrixXd& noise_cov, double target_mi,
                                const QuadratureSpec& quad = {});

// Calibrates the zoo instance (or the configured spectrum for waterfill) at
// an MI budget `beta` under `method`.
CalibrationReport RunCalibrate(const RunConfig& config, const std::string& method,
                               double beta);

GapReport RunGap(const RunConfig& config);

SrpacResult RunSrpac(const RunConfig& config);

// One row per (budget, method), budgets outermost, in configured order.
std::vector<SweepRow> RunSweep(const RunConfig& config);

// Entry point behind the rpac_cli binary. `args` excludes the program name.
int RunCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rpac

#endif  // RPAC_CLI_HPP_
