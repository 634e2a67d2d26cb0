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

#include "rpac/cli.hpp"

#include <cmath>
#include <limits>
#include <memory>

#include <CLI11.hpp>

#include "rpac/calibrators.hpp"
#include "rpac/gap.hpp"
#include "rpac/mechzoo.hpp"
#include "rpac/oracle.hpp"
#include "rpac/srpac.hpp"
#include "rpac/stats.hpp"

namespace rpac {

double CertifiedBound(const Eigen::MatrixXd& sigma_m, const Eigen::MatrixXd& sigma_b) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sigma_b);
  if (eig.info() != Eigen::Success) throw NumericalError("noise eigendecomposition failed");
  const Eigen::VectorXd& values = eig.eigenvalues();
  const double top = values.maxCoeff();
  if (!(top > 0.0)) return std::numeric_limits<double>::infinity();
  std::vector<Eigen::Index> range, null;
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    (values[i] > 1e-12 * top ? range : null).push_back(i);
  }
  if (null.empty()) return LogdetBound(sigma_m, sigma_b);
  const double scale = std::max(sigma_m.trace(), 1e-300);
  for (Eigen::Index i : null) {
    const Eigen::VectorXd u = eig.eigenvectors().col(i);
    if (u.dot(sigma_m * u) > 1e-12 * scale) return std::numeric_limits<double>::infinity();
  }
  Eigen::MatrixXd basis(sigma_b.rows(), range.size());
  for (std::size_t k = 0; k < range.size(); ++k) basis.col(k) = eig.eigenvectors().col(range[k]);
  return LogdetBound(basis.transpose() * sigma_m * basis,
                     basis.transpose() * sigma_b * basis);
}

Eigen::MatrixXd ScaleToOracleMi(const std::vector<double>& pmf,
                                const Eigen::MatrixXd& locations,
                                const Eigen::MatrixXd& noise_cov, double target_mi,
                                const QuadratureSpec& quad) {
  const double entropy = DiscreteEntropy(pmf);
  if (!(target_mi > 0.0 && target_mi < entropy)) {
    throw InvalidArgument("target MI must lie strictly between 0 and H(X)");
  }
  auto mi = [&](double log_s) {
    return MiOracleDiscreteX(pmf, locations, std::exp(log_s) * noise_cov, quad).value;
  };
  double lo = 0.0, hi = 0.0;
  double mi_lo = mi(lo), mi_hi = mi_lo;
  while (mi_lo < target_mi) {
    lo -= std::log(4.0);
    mi_lo = mi(lo);
    if (lo < -60.0) throw NumericalError("cannot reach the target MI by shrinking noise");
  }
  while (mi_hi > target_mi) {
    hi += std::log(4.0);
    mi_hi = mi(hi);
    if (hi > 60.0) throw NumericalError("cannot reach the target MI by growing noise");
  }
  double mid = 0.5 * (lo + hi);
  for (int it = 0; it < 80; ++it) {
    mid = 0.5 * (lo + hi);
    const double value = mi(mid);
    if (std::abs(value - target_mi) < 1e-7) break;
    (value > target_mi ? lo : hi) = mid;
  }
  return std::exp(mid) * noise_cov;
}

namespace {

ZooInstance RequireZoo(const RunConfig& config) {
  if (!config.zoo) throw InvalidArgument("this command needs a zoo instance");
  return MakeZoo(*config.zoo);
}

struct EntropyValue {
  double value = 0.0;
  bool knn = false;
};

EntropyValue DataEntropy(const DataDistribution& dist, int samples, std::uint64_t seed) {
  if (dist.is_discrete()) return {DiscreteEntropy(dist.pmf()), false};
  return {KnnEntropy(dist.Sample(samples, seed).values), true};
}

// Exact for discrete inputs, sampled otherwise.
Eigen::MatrixXd OutputCovariance(const ZooInstance& zoo, int samples, std::uint64_t seed) {
  if (zoo.distribution.is_discrete()) {
    const Eigen::MatrixXd loc = SymbolLocations(zoo.mechanism, zoo.distribution);
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(loc.cols());
    Eigen::MatrixXd second = Eigen::MatrixXd::Zero(loc.cols(), loc.cols());
    const std::vector<double>& pmf = zoo.distribution.pmf();
    for (Eigen::Index k = 0; k < loc.rows(); ++k) {
      mean += pmf[k] * loc.row(k).transpose();
      second += pmf[k] * loc.row(k).transpose() * loc.row(k);
    }
    return second - mean * mean.transpose();
  }
  return EmpiricalMeanCov(
             SampleMechanismOutputs(zoo.mechanism, zoo.distribution, samples, seed))
      .second;
}

CalibrationReport SrpacReport(const SrpacResult& result, const Eigen::MatrixXd& sigma_m,
                              const SrpacConfig& config) {
  CalibrationReport report;
  report.method = CalibrationMethod::kSrpac;
  report.noise = result.noise;
  report.noise_power = result.noise_power;
  report.certified_bound = CertifiedBound(sigma_m, result.noise.covariance());
  report.seed = config.seed;
  report.sample_count = static_cast<long>(config.t_lambda) * config.batch;
  report.converged = result.converged;
  return report;
}

GapEstimate EstimateGap(const Eigen::MatrixXd& samples, const GapConfig& config,
                        std::uint64_t seed) {
  GapMethod method = config.method;
  if (samples.cols() > 1 && method == GapMethod::kKurtosis) {
    method = DefaultGapMethod(static_cast<int>(samples.cols()));
  }
  if (method == GapMethod::kKurtosis) {
    return KurtosisGapEstimate(samples.col(0), config.kurtosis);
  }
  DsmOptions dsm = config.dsm;
  dsm.seed = seed;
  const DsmFit fit = DsmTrain(samples, dsm);
  GapEstimate est =
      method == GapMethod::kSteinRaw
          ? SteinGapEstimate(samples, fit.model, SteinVariant::kRaw)
          : SteinGapEstimate(samples, fit.model, SteinVariant::kRelative, config.ridge);
  est.loss_trace = fit.loss_trace;
  return est;
}

void AddFlag(std::string& flags, const std::string& flag) {
  if (!flags.empty()) flags += ";";
  flags += flag;
}

}  // namespace

CalibrationReport RunCalibrate(const RunConfig& config, const std::string& method,
                               double beta) {
  const CalibrationMethod kind = ParseCalibrationMethod(method);
  if (kind == CalibrationMethod::kWaterfill && config.waterfill.signal_eigenvalues.size() > 0) {
    const WaterfillSolution sol =
        WaterfillCalibrate(config.waterfill.signal_eigenvalues, {}, beta);
    CalibrationReport report = ToReport(sol, config.waterfill.signal_eigenvalues);
    report.seed = config.seed;
    return report;
  }
  const ZooInstance zoo = RequireZoo(config);
  switch (kind) {
    case CalibrationMethod::kWaterfill: {
      const std::uint64_t seed = DeriveSeed(config.seed, stream::kCalibration, 5);
      const Eigen::MatrixXd sigma_m = OutputCovariance(zoo, config.waterfill.samples, seed);
      CalibrationReport report = ToReport(WaterfillFromCovariance(sigma_m, beta),
                                          Eigendecompose(sigma_m).eigenvalues);
      report.seed = seed;
      report.sample_count = zoo.distribution.is_discrete() ? 0 : config.waterfill.samples;
      return report;
    }
    case CalibrationMethod::kAutoPac: {
      AutoPacParams params = config.auto_pac;
      params.v = beta;
      return AutoPacCalibrate(zoo.mechanism, zoo.distribution, params);
    }
    case CalibrationMethod::kEfficientPac: {
      EfficientPacParams params = config.efficient_pac;
      params.beta = beta;
      return EfficientPacCalibrate(zoo.mechanism, zoo.distribution, params);
    }
    case CalibrationMethod::kSrpac: {
      const EntropyValue h = DataEntropy(zoo.distribution, config.waterfill.samples,
                                         DeriveSeed(config.seed, stream::kInputs));
      SrpacConfig srpac = config.srpac;
      srpac.residual_budget = h.value - beta;
      const SrpacResult result = SrpacSolve(zoo.distribution, zoo.mechanism, srpac);
      const Eigen::MatrixXd sigma_m = OutputCovariance(
          zoo, config.waterfill.samples, DeriveSeed(config.seed, stream::kCalibration, 5));
      return SrpacReport(result, sigma_m, srpac);
    }
  }
  throw InvalidArgument("unknown calibration method");
}

GapReport RunGap(const RunConfig& config) {
  const ConvolvedDensity density = MakeDensity(config.gap.density);
  if (config.gap.samples < 2) throw InvalidArgument("gap needs at least 2 samples");
  Rng rng(DeriveSeed(config.seed, stream::kInputs));
  Eigen::MatrixXd samples(config.gap.samples, 1);
  for (int i = 0; i < config.gap.samples; ++i) samples(i, 0) = density.Draw(rng);

  GapReport report;
  report.estimate = EstimateGap(samples, config.gap, config.gap.dsm.seed);
  const OracleValue kl = KlToMomentMatchedGaussian(density, config.quadrature);
  report.oracle_kl = kl.value;
  const GateDecision gate = GapGate(report.estimate, kl.value, config.gap.gate_slack);
  report.admitted = gate.admitted;
  if (config.gap.certified_bound) {
    report.certified_bound = config.gap.certified_bound;
  } else if (density.noise_var() > 0.0) {
    report.certified_bound = 0.5 * std::log1p(density.base_variance() / density.noise_var());
  }
  if (report.certified_bound && gate.admitted) {
    const CorrectedMiValue corrected = CorrectedMi(*report.certified_bound, report.estimate);
    report.corrected_mi = corrected.value;
    report.corrected_mi_clamped = corrected.clamped;
  }
  return report;
}

SrpacResult RunSrpac(const RunConfig& config) {
  const ZooInstance zoo = RequireZoo(config);
  return SrpacSolve(zoo.distribution, zoo.mechanism, config.srpac);
}

std::vector<SweepRow> RunSweep(const RunConfig& config) {
  const SweepConfig& sweep = config.sweep;
  std::vector<SweepRow> rows;
  if (sweep.grid.empty()) return rows;
  if (sweep.methods.empty()) throw InvalidArgument("sweep needs at least one method");
  for (const std::string& m : sweep.methods) ParseCalibrationMethod(m);
  const ZooInstance zoo = RequireZoo(config);
  const EntropyValue h = DataEntropy(zoo.distribution, config.waterfill.samples,
                                     DeriveSeed(config.seed, stream::kInputs));
  const Eigen::MatrixXd sigma_m = OutputCovariance(
      zoo, config.waterfill.samples, DeriveSeed(config.seed, stream::kCalibration, 5));
  const bool oracle = zoo.oracle_supported;
  const int d = zoo.mechanism.output_dim();
  Eigen::MatrixXd locations;
  if (oracle) locations = SymbolLocations(zoo.mechanism, zoo.distribution);
  const std::vector<double>& pmf = zoo.distribution.pmf();

  // Order of evaluation within a budget: srpac first so the other methods
  // can match its oracle MI.
  std::vector<std::size_t> order;
  for (std::size_t k = 0; k < sweep.methods.size(); ++k) {
    if (sweep.methods[k] == "srpac") order.push_back(k);
  }
  for (std::size_t k = 0; k < sweep.methods.size(); ++k) {
    if (sweep.methods[k] != "srpac") order.push_back(k);
  }

  const std::size_t per_budget = sweep.methods.size();
  rows.resize(sweep.grid.size() * per_budget);
  for (std::size_t b = 0; b < sweep.grid.size(); ++b) {
    const double budget = sweep.grid[b];
    const double beta = sweep.convention == "mi" ? budget : h.value - budget;
    std::optional<double> srpac_oracle_mi;
    for (std::size_t k : order) {
      const std::size_t index = b * per_budget + k;
      const std::uint64_t row_seed = DeriveSeed(config.seed, stream::kSweepRow, index);
      const std::string& method = sweep.methods[k];
      SweepRow& row = rows[index];
      row.budget = budget;
      row.convention = sweep.convention;
      row.method = method;
      row.noise_power = std::numeric_limits<double>::quiet_NaN();
      row.certified_bound = std::numeric_limits<double>::quiet_NaN();
      if (h.knn) AddFlag(row.flags, "entropy_knn");
      try {
        if (!(beta > 0.0)) throw InvalidArgument("budget leaves no MI to spend");
        RunConfig local = config;
        local.seed = row_seed;
        DeriveSubSeeds(local);
        CalibrationReport report;
        if (method == "srpac") {
          local.srpac.residual_budget = h.value - beta;
          const SrpacResult result = SrpacSolve(zoo.distribution, zoo.mechanism, local.srpac);
          report = SrpacReport(result, sigma_m, local.srpac);
          if (!result.converged) AddFlag(row.flags, "nonconverged");
          if (result.capped_nll > 0) AddFlag(row.flags, "capped_nll");
        } else {
          report = RunCalibrate(local, method, beta);
          if (!report.converged) AddFlag(row.flags, "nonconverged");
          if (report.heuristic_norm_bound) AddFlag(row.flags, "heuristic_norm_bound");
        }
        Eigen::MatrixXd noise_cov = report.noise.covariance();
        if (sweep.match_oracle_mi && method != "srpac") {
          if (!oracle) {
            AddFlag(row.flags, "match_unsupported");
          } else {
            const double target = srpac_oracle_mi.value_or(beta);
            noise_cov = ScaleToOracleMi(pmf, locations, noise_cov, target, config.quadrature);
            report.noise = NoiseModel::GaussianFixed(noise_cov);
            report.certified_bound = CertifiedBound(sigma_m, noise_cov);
            AddFlag(row.flags, "matched_oracle_mi");
          }
        }
        row.noise_power = noise_cov.trace();
        row.certified_bound = report.certified_bound;

        if (oracle) {
          const OracleValue mi = MiOracleDiscreteX(pmf, locations, noise_cov, config.quadrature);
          row.oracle_mi = mi.value;
          if (!mi.converged) AddFlag(row.flags, "oracle_unconverged");
          if (method == "srpac") srpac_oracle_mi = mi.value;

          // Gated gap correction, oracle KL = exact Gaussian MI - true MI.
          Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(noise_cov);
          if (eig.eigenvalues().minCoeff() > 1e-12 * eig.eigenvalues().maxCoeff() &&
              std::isfinite(report.certified_bound)) {
            const double oracle_kl = std::max(0.0, GaussianMiExact(sigma_m, noise_cov) - mi.value);
            const Eigen::MatrixXd clean = SampleMechanismOutputs(
                zoo.mechanism, zoo.distribution, config.gap.samples,
                DeriveSeed(row_seed, stream::kInputs));
            const Eigen::MatrixXd z =
                Perturb(clean, report.noise, DeriveSeed(row_seed, stream::kNoise));
            const GapEstimate est = EstimateGap(z, config.gap, local.gap.dsm.seed);
            const GateDecision gate = GapGate(est, oracle_kl, config.gap.gate_slack);
            if (gate.admitted) {
              const CorrectedMiValue corrected = CorrectedMi(report.certified_bound, est);
              row.corrected_mi = corrected.value;
              if (corrected.clamped) AddFlag(row.flags, "corrected_mi_clamped");
            } else {
              AddFlag(row.flags, "gap_rejected");
            }
          } else {
            AddFlag(row.flags, "gap_skipped");
          }
        }

        if (d >= 2) {
          const int n = sweep.accuracy_samples;
          const Eigen::MatrixXd clean = SampleMechanismOutputs(
              zoo.mechanism, zoo.distribution, n, DeriveSeed(row_seed, stream::kEvaluation, 1));
          const Eigen::MatrixXd noisy = Perturb(
              clean, report.noise, DeriveSeed(row_seed, stream::kEvaluation, 2));
          row.accuracy_proxy = AccuracyProxy(clean, noisy);
        }
      } catch (const InvalidArgument&) {
        AddFlag(row.flags, "error_invalid_argument");
      } catch (const NumericalError&) {
        AddFlag(row.flags, "error_numerical");
      }
    }
  }
  return rows;
}

// ---------------------------------------------------------------------------

namespace {

Json MethodParams(const Json& config_json, const std::string& method) {
  if (method == "auto_pac") return config_json.at("auto_pac");
  if (method == "efficient_pac") return config_json.at("efficient_pac");
  if (method == "waterfill") return config_json.at("waterfill");
  return config_json.at("srpac");
}

double MethodBudget(const RunConfig& config, const std::string& method) {
  switch (ParseCalibrationMethod(method)) {
    case CalibrationMethod::kAutoPac:
      return config.auto_pac.v;
    case CalibrationMethod::kEfficientPac:
      return config.efficient_pac.beta;
    case CalibrationMethod::kWaterfill:
      return config.waterfill.beta;
    case CalibrationMethod::kSrpac:
      break;
  }
  const ZooInstance zoo = RequireZoo(config);
  const double h = DataEntropy(zoo.distribution, config.waterfill.samples,
                               DeriveSeed(config.seed, stream::kInputs))
                       .value;
  return h - config.srpac.residual_budget;
}

std::string Execute(const std::string& verb, const RunConfig& config) {
  const Json config_json = ToJson(config);
  Json out;
  out["verb"] = verb;
  if (verb == "calibrate") {
    const std::string& method = config.method;
    out["method"] = method;
    out["params"] = MethodParams(config_json, method);
    out["report"] = ToJson(RunCalibrate(config, method, MethodBudget(config, method)));
  } else if (verb == "gap") {
    out["gap"] = ToJson(RunGap(config));
  } else if (verb == "srpac") {
    out["srpac"] = ToJson(RunSrpac(config));
  } else if (verb == "compose") {
    out["compose"] = ToJson(ComposeResidualBudgets(config.compose.budgets,
                                                   config.compose.data_entropy));
  } else {
    return WriteSweepCsv(RunSweep(config));
  }
  out["config"] = config_json;
  return out.dump(2) + "\n";
}

}  // namespace

int RunCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"rpac: noise calibration and residual privacy accounting"};
  std::string verb, config_path, out_path, method;
  std::optional<std::uint64_t> seed;
  bool quiet = false;
  app.add_option("verb", verb, "calibrate | gap | srpac | sweep | compose")
      ->required()
      ->check(CLI::IsMember({"calibrate", "gap", "srpac", "sweep", "compose"}));
  app.add_option("--config", config_path, "JSON config file")->required();
  app.add_option("--out", out_path, "output file; standard output when absent");
  app.add_option("--seed", seed, "master seed, overrides the config");
  app.add_option("--method", method, "calibration method, overrides the config");
  app.add_flag("--quiet", quiet, "suppress progress messages");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }

  try {
    Json parsed;
    try {
      parsed = Json::parse(ReadFile(config_path));
    } catch (const nlohmann::json::exception& e) {
      throw InvalidArgument(std::string("config is not valid JSON: ") + e.what());
    }
    RunConfig config = RunConfigFromJson(parsed);
    if (seed) {
      config.seed = *seed;
      DeriveSubSeeds(config);
    }
    if (!method.empty()) config.method = method;
    if (verb == "calibrate") ParseCalibrationMethod(config.method);
    if (!quiet) err << "rpac: running " << verb << "\n";
    const std::string result = Execute(verb, config);
    if (out_path.empty()) {
      out << result;
    } else {
      WriteFile(out_path, result);
      if (!quiet) err << "rpac: wrote " << out_path << "\n";
    }
    return kExitOk;
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  }
}

}  // namespace rpac
