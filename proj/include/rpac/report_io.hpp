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

#ifndef RPAC_REPORT_IO_HPP_
#define RPAC_REPORT_IO_HPP_

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "rpac/calibrators.hpp"
#include "rpac/core.hpp"
#include "rpac/gap.hpp"
#include "rpac/mechzoo.hpp"
#include "rpac/oracle.hpp"
#include "rpac/quadrature.hpp"
#include "rpac/srpac.hpp"

namespace rpac {

using Json = nlohmann::json;

// Structured reports are JSON with round-trip double precision.
Json ToJson(const Eigen::VectorXd& v);
Json ToJson(const Eigen::MatrixXd& m);
Eigen::VectorXd VectorFromJson(const Json& j);
Eigen::MatrixXd MatrixFromJson(const Json& j);

Json ToJson(const NoiseModel& noise);
NoiseModel NoiseModelFromJson(const Json& j);

Json ToJson(const CalibrationReport& report);
CalibrationReport CalibrationReportFromJson(const Json& j);

// Gap estimate with its oracle comparison and corrected MI.
struct GapReport {
  GapEstimate estimate;
  std::optional<double> oracle_kl;
  std::optional<bool> admitted;
  std::optional<double> certified_bound;
  std::optional<double> corrected_mi;
  bool corrected_mi_clamped = false;
};

Json ToJson(const GapEstimate& gap);
GapEstimate GapEstimateFromJson(const Json& j);
Json ToJson(const GapReport& report);
GapReport GapReportFromJson(const Json& j);

Json ToJson(const Decoder& decoder);
Decoder DecoderFromJson(const Json& j);

Json ToJson(const SrpacResult& result);
SrpacResult SrpacResultFromJson(const Json& j);

Json ToJson(const ComposedBudget& composed);

// ---------------------------------------------------------------------------
// Run configuration

// A one-dimensional gap benchmark: Z = X + B with X from `base`.
struct DensitySpec {
  std::string base = "gaussian";  // gaussian | laplace | uniform | gaussian_mixture
  std::vector<double> params;     // gaussian (mean, var); laplace (loc, scale);
                                  // uniform (a, b); mixture (w, mean, var)*
  double noise_var = 0.0;

  bool operator==(const DensitySpec&) const = default;
};

ConvolvedDensity MakeDensity(const DensitySpec& spec);

struct GapConfig {
  GapMethod method = GapMethod::kKurtosis;
  DensitySpec density;
  int samples = 1000000;
  KurtosisOptions kurtosis;
  DsmOptions dsm;
  double ridge = 1e-2;
  std::optional<double> certified_bound;
  double gate_slack = 0.02;
};

struct WaterfillConfig {
  Eigen::VectorXd signal_eigenvalues;  // empty: estimate from the zoo instance
  double beta = 1.0;
  int samples = 100000;
};

struct SweepConfig {
  std::vector<double> grid;
  std::string convention = "residual";  // residual | mi
  std::vector<std::string> methods;
  bool match_oracle_mi = false;
  int accuracy_samples = 100000;
};

struct ComposeConfig {
  std::vector<double> budgets;
  double data_entropy = 0.0;
};

struct RunConfig {
  std::uint64_t seed = 0;
  std::string method = "waterfill";
  std::optional<ZooSpec> zoo;
  AutoPacParams auto_pac;
  EfficientPacParams efficient_pac;
  WaterfillConfig waterfill;
  GapConfig gap;
  SrpacConfig srpac;
  QuadratureSpec quadrature;
  SweepConfig sweep;
  ComposeConfig compose;
};

// Sets every per-procedure seed from config.seed.
void DeriveSubSeeds(RunConfig& config);

Json ToJson(const RunConfig& config);
RunConfig RunConfigFromJson(const Json& j);

// ---------------------------------------------------------------------------
// Sweep tables: CSV, numbers with 9 significant digits, empty optional cells.

inline constexpr const char* kSweepHeader =
    "budget,convention,method,noise_power,certified_bound,corrected_mi,"
    "oracle_mi,accuracy_proxy,flags";

struct SweepRow {
  double budget = 0.0;
  std::string convention;
  std::string method;
  double noise_power = 0.0;
  double certified_bound = 0.0;
  std::optional<double> corrected_mi;
  std::optional<double> oracle_mi;
  std::optional<double> accuracy_proxy;
  std::string flags;  // ';'-separated

  bool operator==(const SweepRow&) const = default;
};

std::string FormatNumber(double value);
std::string WriteSweepCsv(const std::vector<SweepRow>& rows);
std::vector<SweepRow> ReadSweepCsv(const std::string& text);

std::string ReadFile(const std::string& path);
void WriteFile(const std::string& path, const std::string& contents);

}  // namespace rpac

#endif  // RPAC_REPORT_IO_HPP_
