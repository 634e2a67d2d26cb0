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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero when any criterion fails. Arguments, when given, select criteria
// by number.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rpac/calibrators.hpp"
#include "rpac/cli.hpp"
#include "rpac/core.hpp"
#include "rpac/gap.hpp"
#include "rpac/mechzoo.hpp"
#include "rpac/oracle.hpp"
#include "rpac/report_io.hpp"
#include "rpac/srpac.hpp"
#include "rpac/stats.hpp"

namespace rpac {
namespace {

constexpr std::uint64_t kMasterSeed = 20261016;

std::uint64_t SeedFor(int criterion, std::uint64_t index = 0) {
  return DeriveSeed(kMasterSeed, stream::kEvaluation, 1000 * criterion + index);
}

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void Require(bool condition, const std::string& what) {
    if (!condition) {
      pass = false;
      detail << "[violated] " << what << "; ";
    }
  }
};

std::string Fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

Eigen::MatrixXd RandomOrthogonal(int d, Rng& rng) {
  Eigen::MatrixXd g(d, d);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) g(i, j) = n(rng);
  }
  return Eigen::HouseholderQR<Eigen::MatrixXd>(g).householderQ();
}

// The 1-d gap benchmark suite, each convolved with water-fill noise at
// beta = 0.5 so that the certified bound is exactly 0.5.
struct Benchmark {
  std::string name;
  ConvolvedDensity density;
};

constexpr double kSuiteBeta = 0.5;

std::vector<Benchmark> BenchmarkSuite() {
  const double scale = 1.0 / std::expm1(2.0 * kSuiteBeta);
  return {
      {"gaussian", ConvolvedDensity::Gaussian(0.0, 1.0, scale * 1.0)},
      {"laplace", ConvolvedDensity::Laplace(0.0, 1.0, scale * 2.0)},
      {"uniform", ConvolvedDensity::Uniform(-1.0, 1.0, scale / 3.0)},
      {"mixture", ConvolvedDensity::Mixture({0.5, 0.5}, {-1.5, 1.5}, {0.25, 0.25},
                                            scale * 2.5)},
  };
}

Eigen::VectorXd Draw(const ConvolvedDensity& density, int m, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::VectorXd z(m);
  for (int i = 0; i < m; ++i) z[i] = density.Draw(rng);
  return z;
}

double OracleMi(const std::vector<double>& pmf, const Eigen::MatrixXd& loc,
                const Eigen::MatrixXd& cov) {
  return MiOracleDiscreteX(pmf, loc, cov).value;
}

// ---------------------------------------------------------------------------

void Criterion1(Outcome& o) {
  double worst = 0.0;
  for (double var : {0.5, 1.0, 4.0}) {
    const ZooInstance zoo = MakeZoo(
        {"gaussian", "gaussian", {{"mean", {0.0}}, {"var", {var}}}, "identity", {{"dim", {1}}}});
    const Eigen::MatrixXd sigma_m = Eigen::MatrixXd::Constant(1, 1, var);
    for (double beta : {0.25, 0.5, 1.0}) {
      const CalibrationReport r = ToReport(WaterfillFromCovariance(sigma_m, beta),
                                           Eigen::VectorXd::Constant(1, var));
      const double logdet = LogdetBound(sigma_m, r.noise.covariance());
      const double mi = MiOracleContinuous(
                            ConvolvedDensity::Gaussian(0.0, var, r.noise.covariance()(0, 0)))
                            .value;
      worst = std::max(worst, std::abs(mi - logdet));
    }
  }
  o.Require(worst <= 1e-3, "|oracle MI - logdet| <= 1e-3");
  o.detail << "max |oracle MI - logdet| = " << Fmt(worst) << " over 9 instances";
}

void Criterion2(Outcome& o) {
  Rng rng(SeedFor(2));
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int violations = 0;
  double worst_margin = -1e300;
  for (int t = 0; t < 100; ++t) {
    const int d = 1 + static_cast<int>(u(rng) * 8.0);
    Eigen::VectorXd lambda(d);
    for (int i = 0; i < d; ++i) lambda[i] = std::exp(-3.0 + 6.0 * u(rng));
    const Eigen::MatrixXd q = RandomOrthogonal(d, rng);
    const Eigen::MatrixXd sigma = q * lambda.asDiagonal() * q.transpose();
    const double budget = 0.05 + 2.0 * u(rng);

    AutoPacParams ap;
    ap.v = budget;
    ap.c = 1e-6;
    const double r = 3.0 * std::sqrt(lambda.sum());
    const CalibrationReport auto_pac = AutoPacFromSpectrum(Eigendecompose(sigma), r, ap);
    const double auto_logdet = LogdetBound(sigma, auto_pac.noise.covariance());

    // Efficient-PAC in the eigenbasis and in the axis basis.
    double eff_logdet = 0.0;
    for (const Eigen::MatrixXd& basis : {q, Eigen::MatrixXd(Eigen::MatrixXd::Identity(d, d))}) {
      const Eigen::VectorXd proj = (basis.transpose() * sigma * basis).diagonal();
      const Eigen::VectorXd e = EfficientPacAllocation(proj, budget);
      const Eigen::MatrixXd sigma_b = basis * e.asDiagonal() * basis.transpose();
      eff_logdet = std::max(eff_logdet, LogdetBound(sigma, sigma_b));
    }
    for (double logdet : {auto_logdet, eff_logdet}) {
      worst_margin = std::max(worst_margin, logdet - budget);
      if (logdet > budget) ++violations;
    }
  }
  o.Require(violations == 0, "zero logdet > budget violations");
  o.detail << violations << " violations in 300 allocations, max logdet - budget = "
           << Fmt(worst_margin);
}

void Criterion3(Outcome& o) {
  Rng rng(SeedFor(3));
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst_rel = 0.0;
  double worst_kkt = 0.0;
  int boundary = 0;
  for (int t = 0; t < 20; ++t) {
    const Eigen::Vector2d r(std::exp(-2.0 + 4.0 * u(rng)), std::exp(-2.0 + 4.0 * u(rng)));
    const double beta = std::exp(-2.0 + 3.0 * u(rng));
    const WaterfillSolution wf = WaterfillCalibrate(r, {}, beta);
    const BruteForceResult bf = BruteForceTraceMin(r, beta);
    if (bf.boundary_hit) ++boundary;
    const double trace = wf.noise_eigenvalues.sum();
    worst_rel = std::max(worst_rel, std::abs(bf.trace - trace) / trace);
    for (int i = 0; i < 2; ++i) {
      const double l = wf.noise_eigenvalues[i];
      const double scale = wf.multiplier * r[i];
      worst_kkt = std::max(worst_kkt, std::abs(2.0 * l * (l + r[i]) - scale) / scale);
    }
  }
  o.Require(worst_rel <= 1e-3, "grid trace within 1e-3 relative");
  o.Require(worst_kkt <= 1e-8, "KKT residual <= 1e-8");
  o.Require(boundary == 0, "grid optimum away from the grid boundary");
  o.detail << "max relative trace gap = " << Fmt(worst_rel)
           << ", max KKT residual = " << Fmt(worst_kkt) << ", boundary hits = " << boundary;
}

void Criterion4(Outcome& o) {
  const double base_var = 2.5;  // 1.5^2 + 0.25
  double previous = -1.0;
  double worst_drop = 0.0;
  std::ostringstream values;
  for (int i = 0; i < 10; ++i) {
    const double beta = 0.1 + 0.2 * i;
    const double noise = base_var / std::expm1(2.0 * beta);
    const double kl = KlToMomentMatchedGaussian(
                          ConvolvedDensity::Mixture({0.5, 0.5}, {-1.5, 1.5}, {0.25, 0.25}, noise))
                          .value;
    if (previous >= 0.0) worst_drop = std::max(worst_drop, previous - kl);
    previous = kl;
    values << Fmt(kl) << (i < 9 ? " " : "");
  }
  o.Require(worst_drop <= 1e-4, "oracle gap nondecreasing within 1e-4");
  o.detail << "max decrease = " << Fmt(worst_drop) << ", gaps = [" << values.str() << "]";
}

constexpr int kKurtosisSamples = 1000000;

void Criterion5(Outcome& o) {
  const Eigen::VectorXd uniform =
      Draw(ConvolvedDensity::Uniform(-1.0, 1.0, 0.0), kKurtosisSamples, SeedFor(5, 1));
  const double u_est = KurtosisGapEstimate(uniform).value;
  o.Require(std::abs(u_est - 0.030) <= 0.003, "uniform estimate 0.030 +- 0.003");

  const Eigen::VectorXd gauss =
      Draw(ConvolvedDensity::Gaussian(0.0, 1.0, 0.0), kKurtosisSamples, SeedFor(5, 2));
  const GapEstimate g_est = KurtosisGapEstimate(gauss);
  o.Require(g_est.value > 0.0 && g_est.value < 1e-9, "gaussian null in (0, 1e-9)");
  o.Require(g_est.clamp_active, "gaussian null clamp active");
  o.detail << "uniform = " << Fmt(u_est) << ", gaussian null = " << Fmt(g_est.value);

  int index = 3;
  for (const Benchmark& b : BenchmarkSuite()) {
    const double est =
        KurtosisGapEstimate(Draw(b.density, kKurtosisSamples, SeedFor(5, index++))).value;
    const double kl = KlToMomentMatchedGaussian(b.density).value;
    o.Require(est <= kl + 0.02, b.name + " estimate <= oracle KL + 0.02");
    o.detail << ", " << b.name << " " << Fmt(est) << " vs KL " << Fmt(kl);
  }
}

constexpr int kSteinSamples = 200000;
constexpr double kSteinRidge = 0.25;

GapEstimate SteinOn(const Eigen::VectorXd& z, SteinVariant variant, double ridge,
                    std::uint64_t seed) {
  DsmOptions opt;
  opt.seed = seed;
  const DsmFit fit = DsmTrain(Eigen::MatrixXd(z), opt);
  return SteinGapEstimate(Eigen::MatrixXd(z), fit.model, variant, ridge);
}

void Criterion6(Outcome& o) {
  const ConvolvedDensity laplace = ConvolvedDensity::Laplace(0.0, 1.0, 0.0);
  const double kl = KlToMomentMatchedGaussian(laplace).value;
  const Eigen::VectorXd z = Draw(laplace, kSteinSamples, SeedFor(6, 1));
  const GapEstimate rel = SteinOn(z, SteinVariant::kRelative, kSteinRidge, SeedFor(6, 2));
  o.Require(rel.value > 0.0, "laplace relative estimate positive");
  o.Require(rel.value <= 0.0724 + 0.02, "laplace relative estimate <= 0.0724 + 0.02");
  o.detail << "laplace relative = " << Fmt(rel.value) << " (oracle KL " << Fmt(kl) << ")";

  // Gaussian null: both variants recorded; the gate decision must agree with
  // the oracle on every estimate.
  const Eigen::VectorXd g = Draw(ConvolvedDensity::Gaussian(0.0, 1.0, 0.0), kSteinSamples,
                                 SeedFor(6, 3));
  const GapEstimate g_raw = SteinOn(g, SteinVariant::kRaw, 0.0, SeedFor(6, 4));
  const GapEstimate g_rel = SteinOn(g, SteinVariant::kRelative, kSteinRidge, SeedFor(6, 5));
  const GapEstimate g_rel0 = SteinOn(g, SteinVariant::kRelative, 0.0, SeedFor(6, 6));
  o.detail << ", gaussian null raw = " << Fmt(g_raw.value) << ", relative = "
           << Fmt(g_rel.value) << " (ridge " << kSteinRidge << "), " << Fmt(g_rel0.value)
           << " (ridge 0)";
  const double slack = GapConfig{}.gate_slack;
  int admitted = 0;
  for (const auto& [estimate, oracle] :
       std::vector<std::pair<GapEstimate, double>>{{rel, kl}, {g_raw, 0.0}, {g_rel, 0.0},
                                                   {g_rel0, 0.0}}) {
    const GateDecision gate = GapGate(estimate, oracle, slack);
    const bool valid = estimate.value > 0.0 && estimate.value <= oracle + slack;
    o.Require(gate.admitted == valid, "gate admits exactly the oracle-valid estimates");
    if (gate.admitted) ++admitted;
  }
  o.Require(GapGate(rel, kl, slack).admitted, "laplace relative estimate admitted");
  o.detail << ", admitted " << admitted << " of 4";
}

void Criterion7(Outcome& o) {
  const double slack = GapConfig{}.gate_slack;
  int gated = 0;
  int index = 0;
  double worst_low = 1e300;
  for (const Benchmark& b : BenchmarkSuite()) {
    const double kl = KlToMomentMatchedGaussian(b.density).value;
    const double mi = MiOracleContinuous(b.density).value;
    const double certified = kSuiteBeta;
    const Eigen::VectorXd z = Draw(b.density, kKurtosisSamples, SeedFor(7, index++));
    std::vector<GapEstimate> estimates{
        KurtosisGapEstimate(z),
        SteinOn(z.head(kSteinSamples), SteinVariant::kRelative, 0.0, SeedFor(7, 100 + index)),
        SteinOn(z.head(kSteinSamples), SteinVariant::kRaw, 0.0, SeedFor(7, 200 + index))};
    for (const GapEstimate& e : estimates) {
      if (!GapGate(e, kl, slack).admitted) continue;
      ++gated;
      const double corrected = CorrectedMi(certified, e).value;
      worst_low = std::min(worst_low, corrected - (mi - 0.02));
      o.Require(corrected >= mi - 0.02 && corrected <= certified,
                b.name + "/" + ToString(e.method) + " corrected MI in [MI - 0.02, bound]");
    }
  }
  o.Require(gated > 0, "at least one gated instance");
  o.detail << gated << " gated instances, min margin above MI - 0.02 = " << Fmt(worst_low);
}

// The four-symbol benchmark at positions (-3, -1, 1, 3).
ZooInstance FourSymbols() {
  return MakeZoo({"four_symbols",
                  "discrete_uniform_k",
                  {{"k", {4}}, {"values", {-3, -1, 1, 3}}, {"dim", {1}}},
                  "identity",
                  {{"dim", {1}}}});
}

void Criterion8(Outcome& o) {
  const ZooInstance zoo = FourSymbols();
  int index = 0;
  for (double target : {0.3, 0.5, 0.7, 0.9, 1.1}) {
    SrpacConfig c;
    c.residual_budget = target;
    c.seed = SeedFor(8, index++);
    const SrpacResult r = SrpacSolve(zoo.distribution, zoo.mechanism, c);
    const double h = r.oracle_conditional_entropy.value_or(NAN);
    o.Require(std::abs(h - target) <= 0.05, "|H(X|Y) - " + Fmt(target) + "| <= 0.05");
    o.detail << Fmt(target) << "->" << Fmt(h) << " ";
  }
}

// Auto-PAC noise rescaled to a target oracle MI.
Eigen::MatrixXd MatchedAutoPac(const ZooInstance& zoo, const Eigen::MatrixXd& loc,
                               double target_mi, std::uint64_t seed) {
  AutoPacParams ap;
  ap.m = 10000;
  ap.v = target_mi;
  ap.seed = seed;
  const CalibrationReport r = AutoPacCalibrate(zoo.mechanism, zoo.distribution, ap);
  return ScaleToOracleMi(zoo.distribution.pmf(), loc, r.noise.covariance(), target_mi);
}

void Criterion9(Outcome& o) {
  const ZooInstance zoo = MakeZoo(
      {"label_nuisance",
       "label_nuisance_grid",
       {{"label_values", {-3, 3}}, {"levels", {8}}, {"nuisance_scale", {1}}},
       "identity",
       {{"dim", {2}}}});
  const Eigen::MatrixXd loc = SymbolLocations(zoo.mechanism, zoo.distribution);
  const double h = DiscreteEntropy(zoo.distribution.pmf());
  SrpacConfig c;
  c.residual_budget = h - 1.0;
  c.decoder = DecoderKind::kSoftmaxSharedPrecision;
  c.seed = SeedFor(9, 1);
  const SrpacResult sr = SrpacSolve(zoo.distribution, zoo.mechanism, c);
  const double sr_mi = OracleMi(zoo.distribution.pmf(), loc, sr.noise.covariance());
  const Eigen::MatrixXd auto_cov = MatchedAutoPac(zoo, loc, sr_mi, SeedFor(9, 2));
  const double auto_power = auto_cov.trace();
  o.Require(sr.noise_power <= 0.95 * auto_power, "SR-PAC power <= 0.95 x Auto-PAC power");
  o.detail << "oracle MI " << Fmt(sr_mi) << ", SR-PAC power " << Fmt(sr.noise_power)
           << ", Auto-PAC power " << Fmt(auto_power) << ", ratio "
           << Fmt(sr.noise_power / auto_power);
}

constexpr double kToyResidual = 1.0;

void Criterion10(Outcome& o) {
  const ZooInstance zoo = MakeZoo({"toy_logit",
                                   "label_nuisance_grid",
                                   {{"label_values", {-1, 1}}, {"levels", {32}}},
                                   "toy_logit",
                                   {}});
  const Eigen::MatrixXd loc = SymbolLocations(zoo.mechanism, zoo.distribution);
  SrpacConfig c;
  c.residual_budget = kToyResidual;
  c.decoder = DecoderKind::kSoftmaxSharedPrecision;
  c.eigenbasis = true;
  c.penalty_weight = 100.0;
  c.eta_lambda = 5e-3;
  c.t_lambda = 10000;
  c.seed = SeedFor(10, 1);
  const SrpacResult sr = SrpacSolve(zoo.distribution, zoo.mechanism, c);
  const Eigen::MatrixXd cov = sr.noise.covariance();
  const Eigen::Vector2d label = ToyLogitLabelDirection();
  const Eigen::Vector2d nuisance(label[1], -label[0]);
  const double v_label = label.dot(cov * label);
  const double v_nuisance = nuisance.dot(cov * nuisance);
  o.Require(sr.converged, "SR-PAC converged");
  o.Require(v_label < 0.1 * v_nuisance, "label variance < 10% of nuisance variance");

  const int m = 200000;
  const Eigen::MatrixXd clean =
      SampleMechanismOutputs(zoo.mechanism, zoo.distribution, m, SeedFor(10, 2));
  const double sr_acc = AccuracyProxy(clean, Perturb(clean, sr.noise, SeedFor(10, 3)));
  o.Require(sr_acc >= 0.99, "argmax preserved on >= 99% of draws");

  const double sr_mi = OracleMi(zoo.distribution.pmf(), loc, cov);
  const Eigen::MatrixXd auto_cov = MatchedAutoPac(zoo, loc, sr_mi, SeedFor(10, 4));
  const double auto_acc = AccuracyProxy(
      clean, Perturb(clean, NoiseModel::GaussianFixed(auto_cov), SeedFor(10, 3)));
  o.Require(sr_acc >= auto_acc, "accuracy_proxy(SR-PAC) >= accuracy_proxy(Auto-PAC)");
  o.detail << "label/nuisance variance " << Fmt(v_label) << "/" << Fmt(v_nuisance)
           << ", oracle H(X|Y) " << Fmt(sr.oracle_conditional_entropy.value_or(NAN))
           << ", oracle MI " << Fmt(sr_mi) << ", accuracy SR-PAC " << Fmt(sr_acc)
           << " vs Auto-PAC " << Fmt(auto_acc) << " (closed form "
           << Fmt(ArgmaxPreservation2(zoo.distribution.pmf(), loc, cov)) << " vs "
           << Fmt(ArgmaxPreservation2(zoo.distribution.pmf(), loc, auto_cov)) << ")";
}

void Criterion11(Outcome& o) {
  // Budgets on a 2^-20 grid make every double operation exact, so the
  // result must equal integer arithmetic bit for bit.
  constexpr double kUnit = 1.0 / 1048576.0;
  Rng rng(SeedFor(11));
  std::uniform_int_distribution<int> k_dist(1, 12);
  int mismatches = 0;
  for (int t = 0; t < 1000; ++t) {
    const std::int64_t h_units = std::uniform_int_distribution<std::int64_t>(0, 1 << 24)(rng);
    const int k = k_dist(rng);
    std::vector<double> budgets;
    std::int64_t sum = 0;
    for (int i = 0; i < k; ++i) {
      const std::int64_t b = std::uniform_int_distribution<std::int64_t>(0, h_units)(rng);
      budgets.push_back(static_cast<double>(b) * kUnit);
      sum += b;
    }
    const ComposedBudget c = ComposeResidualBudgets(budgets, static_cast<double>(h_units) * kUnit);
    const double residual = static_cast<double>(sum - (k - 1) * h_units) * kUnit;
    const double additive = static_cast<double>(k * h_units - sum) * kUnit;
    if (c.residual != residual || c.additive_mi != additive) ++mismatches;
  }
  o.Require(mismatches == 0, "exact on every tuple");
  o.detail << mismatches << " mismatches in 1000 tuples";
}

void Criterion12(Outcome& o) {
  RunConfig config = RunConfigFromJson(Json::parse(R"({
    "seed": 20261016,
    "zoo": {"distribution": "discrete_uniform_k",
            "distribution_params": {"k": 4, "values": [-3, -1, 1, 3], "dim": 1},
            "mechanism": "identity", "mechanism_params": {"dim": 1}},
    "auto_pac": {"m": 2000},
    "efficient_pac": {"max_samples": 20000},
    "srpac": {"t_lambda": 1000, "eval_decoder_steps": 500, "eval_batch": 16384},
    "sweep": {"grid": [0.5, 0.9], "convention": "residual",
              "methods": ["srpac", "waterfill", "auto_pac", "efficient_pac"],
              "match_oracle_mi": true, "accuracy_samples": 20000}
  })"));
  const std::string first = WriteSweepCsv(RunSweep(config));
  const std::string second = WriteSweepCsv(RunSweep(config));
  o.Require(first == second, "byte-identical sweep tables");
  config.seed += 1;
  DeriveSubSeeds(config);
  const std::string other = WriteSweepCsv(RunSweep(config));
  o.Require(other != first, "a different master seed changes the table");
  const std::size_t rows = ReadSweepCsv(first).size();
  o.Require(rows == 8, "8 sweep rows");
  o.detail << rows << " rows, " << first.size() << " bytes, identical = "
           << (first == second ? "yes" : "no");
}

struct Criterion {
  int id;
  const char* name;
  double limit_seconds;
  std::function<void(Outcome&)> run;
};

}  // namespace
}  // namespace rpac

int main(int argc, char** argv) {
  using namespace rpac;
  const std::vector<Criterion> criteria{
      {1, "gaussian_equality", 10, Criterion1},
      {2, "budget_safety", 30, Criterion2},
      {3, "waterfill_optimality", 120, Criterion3},
      {4, "gap_monotonicity", 120, Criterion4},
      {5, "kurtosis_estimator", 60, Criterion5},
      {6, "stein_dsm_estimator", 300, Criterion6},
      {7, "corrected_mi", 360, Criterion7},
      {8, "srpac_budget_attainment", 600, Criterion8},
      {9, "srpac_utility_dominance", 600, Criterion9},
      {10, "anisotropy_directional_selectivity", 600, Criterion10},
      {11, "composition_arithmetic", 1, Criterion11},
      {12, "reproducibility", 1800, Criterion12},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

  int failures = 0;
  for (const Criterion& c : criteria) {
    if (!selected.empty() && selected.count(c.id) == 0) continue;
    Outcome outcome;
    const auto start = std::chrono::steady_clock::now();
    try {
      c.run(outcome);
    } catch (const std::exception& e) {
      outcome.pass = false;
      outcome.detail << "[exception] " << e.what();
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (seconds > c.limit_seconds) {
      outcome.pass = false;
      outcome.detail << " [violated] runtime limit " << c.limit_seconds << " s";
    }
    if (!outcome.pass) ++failures;
    std::printf("%s criterion %d %s (%.2f s): %s\n", outcome.pass ? "PASS" : "FAIL", c.id,
                c.name, seconds, outcome.detail.str().c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
