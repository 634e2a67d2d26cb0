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

#include "rpac/report_io.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace rpac {

Json ToJson(const Eigen::VectorXd& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

Json ToJson(const Eigen::MatrixXd& m) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    out.push_back(row);
  }
  return out;
}

Eigen::VectorXd VectorFromJson(const Json& j) {
  if (!j.is_array()) throw InvalidArgument("expected a numeric array");
  Eigen::VectorXd v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v[i] = j[i].get<double>();
  return v;
}

Eigen::MatrixXd MatrixFromJson(const Json& j) {
  if (!j.is_array()) throw InvalidArgument("expected an array of rows");
  if (j.empty()) return Eigen::MatrixXd();
  const std::size_t cols = j[0].size();
  Eigen::MatrixXd m(j.size(), cols);
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_array() || j[i].size() != cols) {
      throw InvalidArgument("matrix rows differ in length");
    }
    for (std::size_t c = 0; c < cols; ++c) m(i, c) = j[i][c].get<double>();
  }
  return m;
}

namespace {

template <typename T>
Json Optional(const std::optional<T>& v) {
  return v ? Json(*v) : Json(nullptr);
}

std::optional<double> OptionalDouble(const Json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<double>();
}

void CheckKeys(const Json& j, const std::set<std::string>& allowed,
               const std::string& where) {
  if (!j.is_object()) throw InvalidArgument(where + " must be an object");
  for (const auto& item : j.items()) {
    if (!allowed.count(item.key())) {
      throw InvalidArgument("unknown key '" + item.key() + "' in " + where);
    }
  }
}

template <typename T>
void Read(const Json& j, const char* key, T& target) {
  if (j.contains(key)) target = j.at(key).get<T>();
}

}  // namespace

// ---------------------------------------------------------------------------

Json ToJson(const NoiseModel& noise) {
  switch (noise.kind()) {
    case NoiseKind::kGaussianFixed:
      return {{"kind", "gaussian_fixed"}, {"covariance", ToJson(noise.covariance())}};
    case NoiseKind::kGaussianDiagParam:
      return {{"kind", "gaussian_diag_param"},
              {"log_std", ToJson(noise.log_std())},
              {"basis", ToJson(noise.basis())}};
    case NoiseKind::kGeneral:
      break;
  }
  throw InvalidArgument("general noise models cannot be serialized");
}

NoiseModel NoiseModelFromJson(const Json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "gaussian_fixed") {
    return NoiseModel::GaussianFixed(MatrixFromJson(j.at("covariance")));
  }
  if (kind == "gaussian_diag_param") {
    return NoiseModel::GaussianDiag(VectorFromJson(j.at("log_std")),
                                    MatrixFromJson(j.at("basis")));
  }
  throw InvalidArgument("unknown noise kind '" + kind + "'");
}

Json ToJson(const CalibrationReport& r) {
  return {
      {"noise", ToJson(r.noise)},
      {"certified_bound", r.certified_bound},
      {"corrected_mi", Optional(r.corrected_mi)},
      {"gap_estimate", Optional(r.gap_estimate)},
      {"noise_power", r.noise_power},
      {"method", ToString(r.method)},
      {"seed", r.seed},
      {"sample_count", r.sample_count},
      {"branch", r.branch},
      {"j0", Optional(r.j0)},
      {"heuristic_norm_bound", r.heuristic_norm_bound},
      {"norm_bound", Optional(r.norm_bound)},
      {"converged", r.converged},
      {"convergence_rule", r.convergence_rule},
      {"multiplier", Optional(r.multiplier)},
      {"signal_eigenvalues", ToJson(r.signal_eigenvalues)},
      {"noise_eigenvalues", ToJson(r.noise_eigenvalues)},
  };
}

CalibrationReport CalibrationReportFromJson(const Json& j) {
  CalibrationReport r;
  r.noise = NoiseModelFromJson(j.at("noise"));
  r.certified_bound = j.at("certified_bound").get<double>();
  r.corrected_mi = OptionalDouble(j, "corrected_mi");
  r.gap_estimate = OptionalDouble(j, "gap_estimate");
  r.noise_power = j.at("noise_power").get<double>();
  r.method = ParseCalibrationMethod(j.at("method").get<std::string>());
  r.seed = j.at("seed").get<std::uint64_t>();
  r.sample_count = j.at("sample_count").get<long>();
  r.branch = j.at("branch").get<std::string>();
  if (!j.at("j0").is_null()) r.j0 = j.at("j0").get<int>();
  r.heuristic_norm_bound = j.at("heuristic_norm_bound").get<bool>();
  r.norm_bound = OptionalDouble(j, "norm_bound");
  r.converged = j.at("converged").get<bool>();
  r.convergence_rule = j.at("convergence_rule").get<std::string>();
  r.multiplier = OptionalDouble(j, "multiplier");
  r.signal_eigenvalues = VectorFromJson(j.at("signal_eigenvalues"));
  r.noise_eigenvalues = VectorFromJson(j.at("noise_eigenvalues"));
  return r;
}

Json ToJson(const GapEstimate& g) {
  return {{"value", g.value},
          {"method", ToString(g.method)},
          {"clamp_active", g.clamp_active},
          {"dimensional_fix", g.dimensional_fix},
          {"ridge", g.ridge},
          {"sigma2", Optional(g.sigma2)},
          {"kappa4", Optional(g.kappa4)},
          {"loss_trace", g.loss_trace}};
}

GapEstimate GapEstimateFromJson(const Json& j) {
  GapEstimate g;
  g.value = j.at("value").get<double>();
  g.method = ParseGapMethod(j.at("method").get<std::string>());
  g.clamp_active = j.at("clamp_active").get<bool>();
  g.dimensional_fix = j.at("dimensional_fix").get<bool>();
  g.ridge = j.at("ridge").get<double>();
  g.sigma2 = OptionalDouble(j, "sigma2");
  g.kappa4 = OptionalDouble(j, "kappa4");
  g.loss_trace = j.at("loss_trace").get<std::vector<double>>();
  return g;
}

Json ToJson(const GapReport& r) {
  return {{"estimate", ToJson(r.estimate)},
          {"oracle_kl", Optional(r.oracle_kl)},
          {"admitted", Optional(r.admitted)},
          {"certified_bound", Optional(r.certified_bound)},
          {"corrected_mi", Optional(r.corrected_mi)},
          {"corrected_mi_clamped", r.corrected_mi_clamped}};
}

GapReport GapReportFromJson(const Json& j) {
  GapReport r;
  r.estimate = GapEstimateFromJson(j.at("estimate"));
  r.oracle_kl = OptionalDouble(j, "oracle_kl");
  if (!j.at("admitted").is_null()) r.admitted = j.at("admitted").get<bool>();
  r.certified_bound = OptionalDouble(j, "certified_bound");
  r.corrected_mi = OptionalDouble(j, "corrected_mi");
  r.corrected_mi_clamped = j.at("corrected_mi_clamped").get<bool>();
  return r;
}

Json ToJson(const Decoder& d) {
  return {{"kind", ToString(d.kind())},
          {"input_dim", d.input_dim()},
          {"target", d.target()},
          {"hidden", d.hidden()},
          {"transform",
           {{"basis", ToJson(d.transform().basis)},
            {"shift", ToJson(d.transform().shift)},
            {"scale", ToJson(d.transform().scale)}}},
          {"params", ToJson(d.params())}};
}

Decoder DecoderFromJson(const Json& j) {
  const Json& t = j.at("transform");
  InputTransform transform{MatrixFromJson(t.at("basis")), VectorFromJson(t.at("shift")),
                           VectorFromJson(t.at("scale"))};
  Decoder d(ParseDecoderKind(j.at("kind").get<std::string>()), j.at("input_dim").get<int>(),
            j.at("target").get<int>(), transform, j.at("hidden").get<int>());
  d.set_params(VectorFromJson(j.at("params")));
  return d;
}

Json ToJson(const SrpacResult& r) {
  Json trace = Json::array();
  for (const SrpacTraceRow& row : r.trace) {
    trace.push_back({{"iteration", row.iteration},
                     {"log_score", row.log_score},
                     {"utility", row.utility},
                     {"penalty", row.penalty}});
  }
  return {{"noise", ToJson(r.noise)},
          {"decoder", ToJson(r.decoder)},
          {"achieved_log_score", r.achieved_log_score},
          {"oracle_conditional_entropy", Optional(r.oracle_conditional_entropy)},
          {"noise_power", r.noise_power},
          {"converged", r.converged},
          {"capped_nll", r.capped_nll},
          {"trace", trace}};
}

SrpacResult SrpacResultFromJson(const Json& j) {
  SrpacResult r;
  r.noise = NoiseModelFromJson(j.at("noise"));
  if (r.noise.kind() == NoiseKind::kGaussianDiagParam) {
    r.rule = {r.noise.log_std(), r.noise.basis()};
  }
  r.decoder = DecoderFromJson(j.at("decoder"));
  r.achieved_log_score = j.at("achieved_log_score").get<double>();
  r.oracle_conditional_entropy = OptionalDouble(j, "oracle_conditional_entropy");
  r.noise_power = j.at("noise_power").get<double>();
  r.converged = j.at("converged").get<bool>();
  r.capped_nll = j.at("capped_nll").get<long>();
  for (const Json& row : j.at("trace")) {
    r.trace.push_back({row.at("iteration").get<int>(), row.at("log_score").get<double>(),
                       row.at("utility").get<double>(), row.at("penalty").get<double>()});
  }
  return r;
}

Json ToJson(const ComposedBudget& c) {
  return {{"residual", c.residual}, {"additive_mi", c.additive_mi}};
}

// ---------------------------------------------------------------------------

ConvolvedDensity MakeDensity(const DensitySpec& spec) {
  const std::vector<double>& p = spec.params;
  auto need = [&](std::size_t n) {
    if (p.size() != n) {
      throw InvalidArgument("density '" + spec.base + "' needs " + std::to_string(n) +
                            " parameters");
    }
  };
  if (spec.base == "gaussian") {
    need(2);
    return ConvolvedDensity::Gaussian(p[0], p[1], spec.noise_var);
  }
  if (spec.base == "laplace") {
    need(2);
    return ConvolvedDensity::Laplace(p[0], p[1], spec.noise_var);
  }
  if (spec.base == "uniform") {
    need(2);
    return ConvolvedDensity::Uniform(p[0], p[1], spec.noise_var);
  }
  if (spec.base == "gaussian_mixture") {
    if (p.empty() || p.size() % 3 != 0) {
      throw InvalidArgument("mixture density needs (weight, mean, var) triples");
    }
    std::vector<double> w, m, v;
    for (std::size_t i = 0; i < p.size(); i += 3) {
      w.push_back(p[i]);
      m.push_back(p[i + 1]);
      v.push_back(p[i + 2]);
    }
    return ConvolvedDensity::Mixture(w, m, v, spec.noise_var);
  }
  throw InvalidArgument("unknown density base '" + spec.base + "'");
}

namespace {

Json ToJson(const ZooParams& params) {
  Json out = Json::object();
  for (const auto& [key, values] : params) out[key] = values;
  return out;
}

ZooParams ZooParamsFromJson(const Json& j) {
  if (!j.is_object()) throw InvalidArgument("zoo parameters must be an object");
  ZooParams out;
  for (const auto& item : j.items()) {
    if (item.value().is_number()) {
      out[item.key()] = {item.value().get<double>()};
    } else {
      out[item.key()] = item.value().get<std::vector<double>>();
    }
  }
  return out;
}

Json SrpacToJson(const SrpacConfig& c) {
  return {{"residual_budget", c.residual_budget},
          {"utility_loss", c.utility_loss},
          {"eta_phi", c.eta_phi},
          {"eta_lambda", c.eta_lambda},
          {"penalty_weight", c.penalty_weight},
          {"t_lambda", c.t_lambda},
          {"t_phi", c.t_phi},
          {"batch", c.batch},
          {"warmup_decoder_steps", c.warmup_decoder_steps},
          {"eval_decoder_steps", c.eval_decoder_steps},
          {"eval_batch", c.eval_batch},
          {"min_log_std", c.min_log_std},
          {"initial_log_std", rpac::ToJson(c.initial_log_std)},
          {"basis", rpac::ToJson(c.basis)},
          {"eigenbasis", c.eigenbasis},
          {"decoder", ToString(c.decoder)},
          {"hidden", c.hidden}};
}

SrpacConfig SrpacFromJson(const Json& j) {
  CheckKeys(j,
            {"residual_budget", "utility_loss", "eta_phi", "eta_lambda", "penalty_weight",
             "t_lambda", "t_phi", "batch", "warmup_decoder_steps", "eval_decoder_steps",
             "eval_batch", "min_log_std", "initial_log_std", "basis", "eigenbasis",
             "decoder", "hidden"},
            "srpac");
  SrpacConfig c;
  Read(j, "residual_budget", c.residual_budget);
  Read(j, "utility_loss", c.utility_loss);
  Read(j, "eta_phi", c.eta_phi);
  Read(j, "eta_lambda", c.eta_lambda);
  Read(j, "penalty_weight", c.penalty_weight);
  Read(j, "t_lambda", c.t_lambda);
  Read(j, "t_phi", c.t_phi);
  Read(j, "batch", c.batch);
  Read(j, "warmup_decoder_steps", c.warmup_decoder_steps);
  Read(j, "eval_decoder_steps", c.eval_decoder_steps);
  Read(j, "eval_batch", c.eval_batch);
  Read(j, "min_log_std", c.min_log_std);
  if (j.contains("initial_log_std")) c.initial_log_std = VectorFromJson(j.at("initial_log_std"));
  if (j.contains("basis")) c.basis = MatrixFromJson(j.at("basis"));
  Read(j, "eigenbasis", c.eigenbasis);
  if (j.contains("decoder")) c.decoder = ParseDecoderKind(j.at("decoder").get<std::string>());
  Read(j, "hidden", c.hidden);
  Validate(c);
  return c;
}


}  // namespace

void DeriveSubSeeds(RunConfig& c) {
  c.auto_pac.seed = DeriveSeed(c.seed, stream::kCalibration, 1);
  c.efficient_pac.seed = DeriveSeed(c.seed, stream::kCalibration, 2);
  c.gap.dsm.seed = DeriveSeed(c.seed, stream::kCalibration, 3);
  c.srpac.seed = DeriveSeed(c.seed, stream::kCalibration, 4);
}

Json ToJson(const RunConfig& c) {
  Json out;
  out["seed"] = c.seed;
  out["method"] = c.method;
  if (c.zoo) {
    out["zoo"] = {{"name", c.zoo->name},
                  {"distribution", c.zoo->distribution},
                  {"distribution_params", ToJson(c.zoo->distribution_params)},
                  {"mechanism", c.zoo->mechanism},
                  {"mechanism_params", ToJson(c.zoo->mechanism_params)}};
  }
  out["auto_pac"] = {{"m", c.auto_pac.m},
                     {"c", c.auto_pac.c},
                     {"v", c.auto_pac.v},
                     {"beta_prime", c.auto_pac.beta_prime}};
  out["efficient_pac"] = {{"tau", c.efficient_pac.tau},
                          {"beta", c.efficient_pac.beta},
                          {"basis", rpac::ToJson(c.efficient_pac.basis)},
                          {"max_samples", c.efficient_pac.max_samples},
                          {"check_every", c.efficient_pac.check_every}};
  out["waterfill"] = {{"signal_eigenvalues", rpac::ToJson(c.waterfill.signal_eigenvalues)},
                      {"beta", c.waterfill.beta},
                      {"samples", c.waterfill.samples}};
  out["gap"] = {{"method", ToString(c.gap.method)},
                {"density",
                 {{"base", c.gap.density.base},
                  {"params", c.gap.density.params},
                  {"noise_var", c.gap.density.noise_var}}},
                {"samples", c.gap.samples},
                {"kurtosis",
                 {{"clamp_c", c.gap.kurtosis.clamp_c},
                  {"dimensional_fix", c.gap.kurtosis.dimensional_fix},
                  {"noise_floor_sigmas", c.gap.kurtosis.noise_floor_sigmas}}},
                {"dsm",
                 {{"family", ToString(c.gap.dsm.family)},
                  {"epsilon", c.gap.dsm.epsilon},
                  {"steps", c.gap.dsm.steps},
                  {"learning_rate", c.gap.dsm.learning_rate},
                  {"batch", c.gap.dsm.batch},
                  {"hidden", c.gap.dsm.hidden}}},
                {"ridge", c.gap.ridge},
                {"certified_bound", Optional(c.gap.certified_bound)},
                {"gate_slack", c.gap.gate_slack}};
  out["srpac"] = SrpacToJson(c.srpac);
  out["quadrature"] = {{"lower", c.quadrature.lower ? rpac::ToJson(*c.quadrature.lower) : Json(nullptr)},
                       {"upper", c.quadrature.upper ? rpac::ToJson(*c.quadrature.upper) : Json(nullptr)},
                       {"nodes", c.quadrature.nodes},
                       {"rule", ToString(c.quadrature.rule)},
                       {"half_width_sigmas", c.quadrature.half_width_sigmas},
                       {"refinement_tolerance", c.quadrature.refinement_tolerance},
                       {"escalations", c.quadrature.escalations}};
  out["sweep"] = {{"grid", c.sweep.grid},
                  {"convention", c.sweep.convention},
                  {"methods", c.sweep.methods},
                  {"match_oracle_mi", c.sweep.match_oracle_mi},
                  {"accuracy_samples", c.sweep.accuracy_samples}};
  out["compose"] = {{"budgets", c.compose.budgets}, {"data_entropy", c.compose.data_entropy}};
  return out;
}

RunConfig RunConfigFromJson(const Json& j) {
  try {
    CheckKeys(j,
              {"seed", "method", "zoo", "auto_pac", "efficient_pac", "waterfill", "gap",
               "srpac", "quadrature", "sweep", "compose"},
              "config");
    RunConfig c;
    Read(j, "seed", c.seed);
    Read(j, "method", c.method);
    if (j.contains("zoo")) {
      const Json& z = j.at("zoo");
      CheckKeys(z, {"name", "distribution", "distribution_params", "mechanism",
                    "mechanism_params"},
                "zoo");
      ZooSpec spec;
      spec.name = z.value("name", std::string("instance"));
      spec.distribution = z.at("distribution").get<std::string>();
      if (z.contains("distribution_params")) {
        spec.distribution_params = ZooParamsFromJson(z.at("distribution_params"));
      }
      spec.mechanism = z.at("mechanism").get<std::string>();
      if (z.contains("mechanism_params")) {
        spec.mechanism_params = ZooParamsFromJson(z.at("mechanism_params"));
      }
      c.zoo = spec;
    }
    if (j.contains("auto_pac")) {
      const Json& a = j.at("auto_pac");
      CheckKeys(a, {"m", "c", "v", "beta_prime"}, "auto_pac");
      Read(a, "m", c.auto_pac.m);
      Read(a, "c", c.auto_pac.c);
      Read(a, "v", c.auto_pac.v);
      Read(a, "beta_prime", c.auto_pac.beta_prime);
    }
    if (j.contains("efficient_pac")) {
      const Json& e = j.at("efficient_pac");
      CheckKeys(e, {"tau", "beta", "basis", "max_samples", "check_every"}, "efficient_pac");
      Read(e, "tau", c.efficient_pac.tau);
      Read(e, "beta", c.efficient_pac.beta);
      if (e.contains("basis")) c.efficient_pac.basis = MatrixFromJson(e.at("basis"));
      Read(e, "max_samples", c.efficient_pac.max_samples);
      Read(e, "check_every", c.efficient_pac.check_every);
    }
    if (j.contains("waterfill")) {
      const Json& w = j.at("waterfill");
      CheckKeys(w, {"signal_eigenvalues", "beta", "samples"}, "waterfill");
      if (w.contains("signal_eigenvalues")) {
        c.waterfill.signal_eigenvalues = VectorFromJson(w.at("signal_eigenvalues"));
      }
      Read(w, "beta", c.waterfill.beta);
      Read(w, "samples", c.waterfill.samples);
    }
    if (j.contains("gap")) {
      const Json& g = j.at("gap");
      CheckKeys(g, {"method", "density", "samples", "kurtosis", "dsm", "ridge",
                    "certified_bound", "gate_slack"},
                "gap");
      if (g.contains("method")) c.gap.method = ParseGapMethod(g.at("method").get<std::string>());
      if (g.contains("density")) {
        const Json& d = g.at("density");
        CheckKeys(d, {"base", "params", "noise_var"}, "gap.density");
        Read(d, "base", c.gap.density.base);
        Read(d, "params", c.gap.density.params);
        Read(d, "noise_var", c.gap.density.noise_var);
      }
      Read(g, "samples", c.gap.samples);
      if (g.contains("kurtosis")) {
        const Json& k = g.at("kurtosis");
        CheckKeys(k, {"clamp_c", "dimensional_fix", "noise_floor_sigmas"}, "gap.kurtosis");
        Read(k, "clamp_c", c.gap.kurtosis.clamp_c);
        Read(k, "dimensional_fix", c.gap.kurtosis.dimensional_fix);
        Read(k, "noise_floor_sigmas", c.gap.kurtosis.noise_floor_sigmas);
      }
      if (g.contains("dsm")) {
        const Json& d = g.at("dsm");
        CheckKeys(d, {"family", "epsilon", "steps", "learning_rate", "batch", "hidden"},
                  "gap.dsm");
        if (d.contains("family")) {
          c.gap.dsm.family = ParseScoreFamily(d.at("family").get<std::string>());
        }
        Read(d, "epsilon", c.gap.dsm.epsilon);
        Read(d, "steps", c.gap.dsm.steps);
        Read(d, "learning_rate", c.gap.dsm.learning_rate);
        Read(d, "batch", c.gap.dsm.batch);
        Read(d, "hidden", c.gap.dsm.hidden);
      }
      Read(g, "ridge", c.gap.ridge);
      c.gap.certified_bound = OptionalDouble(g, "certified_bound");
      Read(g, "gate_slack", c.gap.gate_slack);
    }
    if (j.contains("srpac")) c.srpac = SrpacFromJson(j.at("srpac"));
    if (j.contains("quadrature")) {
      const Json& q = j.at("quadrature");
      CheckKeys(q, {"lower", "upper", "nodes", "rule", "half_width_sigmas",
                    "refinement_tolerance", "escalations"},
                "quadrature");
      if (q.contains("lower") && !q.at("lower").is_null()) {
        c.quadrature.lower = VectorFromJson(q.at("lower"));
      }
      if (q.contains("upper") && !q.at("upper").is_null()) {
        c.quadrature.upper = VectorFromJson(q.at("upper"));
      }
      Read(q, "nodes", c.quadrature.nodes);
      if (q.contains("rule")) c.quadrature.rule = ParseQuadratureRule(q.at("rule").get<std::string>());
      Read(q, "half_width_sigmas", c.quadrature.half_width_sigmas);
      Read(q, "refinement_tolerance", c.quadrature.refinement_tolerance);
      Read(q, "escalations", c.quadrature.escalations);
    }
    if (j.contains("sweep")) {
      const Json& s = j.at("sweep");
      CheckKeys(s, {"grid", "convention", "methods", "match_oracle_mi", "accuracy_samples"},
                "sweep");
      Read(s, "grid", c.sweep.grid);
      Read(s, "convention", c.sweep.convention);
      Read(s, "methods", c.sweep.methods);
      Read(s, "match_oracle_mi", c.sweep.match_oracle_mi);
      Read(s, "accuracy_samples", c.sweep.accuracy_samples);
      if (c.sweep.convention != "residual" && c.sweep.convention != "mi") {
        throw InvalidArgument("sweep convention must be 'residual' or 'mi'");
      }
    }
    if (j.contains("compose")) {
      const Json& k = j.at("compose");
      CheckKeys(k, {"budgets", "data_entropy"}, "compose");
      Read(k, "budgets", c.compose.budgets);
      Read(k, "data_entropy", c.compose.data_entropy);
    }
    DeriveSubSeeds(c);
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("malformed config: ") + e.what());
  }
}

// ---------------------------------------------------------------------------

std::string FormatNumber(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", value);
  return buf;
}

namespace {

std::string Cell(const std::optional<double>& v) { return v ? FormatNumber(*v) : ""; }

std::optional<double> ParseCell(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return std::stod(s);
}

}  // namespace

std::string WriteSweepCsv(const std::vector<SweepRow>& rows) {
  std::ostringstream out;
  out << kSweepHeader << "\n";
  for (const SweepRow& r : rows) {
    if (r.flags.find(',') != std::string::npos || r.method.find(',') != std::string::npos) {
      throw InvalidArgument("sweep cells must not contain commas");
    }
    out << FormatNumber(r.budget) << "," << r.convention << "," << r.method << ","
        << FormatNumber(r.noise_power) << "," << FormatNumber(r.certified_bound) << ","
        << Cell(r.corrected_mi) << "," << Cell(r.oracle_mi) << "," << Cell(r.accuracy_proxy)
        << "," << r.flags << "\n";
  }
  return out.str();
}

std::vector<SweepRow> ReadSweepCsv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kSweepHeader) {
    throw InvalidArgument("sweep table: missing or unexpected header");
  }
  std::vector<SweepRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    if (cells.size() != 9) throw InvalidArgument("sweep table: row needs 9 cells");
    SweepRow r;
    r.budget = std::stod(cells[0]);
    r.convention = cells[1];
    r.method = cells[2];
    r.noise_power = std::stod(cells[3]);
    r.certified_bound = std::stod(cells[4]);
    r.corrected_mi = ParseCell(cells[5]);
    r.oracle_mi = ParseCell(cells[6]);
    r.accuracy_proxy = ParseCell(cells[7]);
    r.flags = cells[8];
    rows.push_back(r);
  }
  return rows;
}

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriteFile(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidArgument("cannot write '" + path + "'");
  out << contents;
  if (!out) throw NumericalError("write to '" + path + "' failed");
}

}  // namespace rpac
