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

#ifndef RPAC_CORE_HPP_
#define RPAC_CORE_HPP_

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace rpac {

// Invalid arguments, malformed configs and violated preconditions.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Non-finite values, failed factorizations, quadrature that does not settle.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Rng = std::mt19937_64;

// Child seeds are derived as splitmix64(master ^ (splitmix64(stream) + index)).
// Every composite procedure names its streams with a fixed constant so the
// sequence of draws is a pure function of the master seed.
std::uint64_t DeriveSeed(std::uint64_t master, std::uint64_t stream,
                         std::uint64_t index = 0);

namespace stream {
inline constexpr std::uint64_t kInputs = 1;
inline constexpr std::uint64_t kNoise = 2;
inline constexpr std::uint64_t kDsmPerturbation = 3;
inline constexpr std::uint64_t kDsmInit = 4;
inline constexpr std::uint64_t kDecoderInit = 5;
inline constexpr std::uint64_t kFollower = 6;
inline constexpr std::uint64_t kLeader = 7;
inline constexpr std::uint64_t kEvaluation = 8;
inline constexpr std::uint64_t kSweepRow = 9;
inline constexpr std::uint64_t kCalibration = 10;
}  // namespace stream

// Fills `out` with i.i.d. standard normal draws.
void StandardNormal(Rng& rng, Eigen::Ref<Eigen::VectorXd> out);

// ---------------------------------------------------------------------------
// DataDistribution

enum class DistributionKind { kDiscrete, kContinuous };

struct Draws {
  Eigen::MatrixXd values;    // m x support_dim
  std::vector<int> symbols;  // discrete only: alphabet index per row
};

class DataDistribution {
 public:
  using Sampler = std::function<Eigen::VectorXd(Rng&)>;
  using LogDensity = std::function<double(const Eigen::VectorXd&)>;

  // `atoms[k]` is the input value of symbol k; pmf must sum to 1 within 1e-12.
  static DataDistribution Discrete(std::vector<double> pmf,
                                   std::vector<Eigen::VectorXd> atoms,
                                   std::string name = "discrete_pmf");
  static DataDistribution Continuous(int support_dim, Sampler sampler,
                                     std::optional<LogDensity> log_density,
                                     std::string name = "continuous");

  DistributionKind kind() const { return kind_; }
  bool is_discrete() const { return kind_ == DistributionKind::kDiscrete; }
  int support_dim() const { return support_dim_; }
  const std::string& name() const { return name_; }
  const std::vector<double>& pmf() const { return pmf_; }
  const std::vector<Eigen::VectorXd>& atoms() const { return atoms_; }
  bool has_log_density() const { return log_density_.has_value(); }
  double log_density(const Eigen::VectorXd& x) const;

  // Draws one value; `symbol` receives the alphabet index for discrete kinds.
  Eigen::VectorXd Draw(Rng& rng, int* symbol = nullptr) const;
  Draws Sample(int m, std::uint64_t seed) const;

 private:
  DataDistribution() = default;

  DistributionKind kind_ = DistributionKind::kDiscrete;
  int support_dim_ = 1;
  std::string name_;
  std::vector<double> pmf_;
  std::vector<double> cdf_;
  std::vector<Eigen::VectorXd> atoms_;
  Sampler sampler_;
  std::optional<LogDensity> log_density_;
};

// ---------------------------------------------------------------------------
// Mechanism

class Mechanism {
 public:
  using Map = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

  Mechanism(std::string name, int input_dim, int output_dim, Map eval,
            std::optional<double> output_norm_bound = std::nullopt);

  const std::string& name() const { return name_; }
  int input_dim() const { return input_dim_; }
  int output_dim() const { return output_dim_; }
  const std::optional<double>& output_norm_bound() const { return norm_bound_; }

  Eigen::VectorXd operator()(const Eigen::VectorXd& x) const;

 private:
  std::string name_;
  int input_dim_;
  int output_dim_;
  Map eval_;
  std::optional<double> norm_bound_;
};

struct MechanismSample {
  Eigen::MatrixXd outputs;   // m x d
  std::vector<int> symbols;  // empty for continuous inputs
};

// Row k is mech(x_k) for the k-th draw of dist under `seed`. Rejects a
// dimension mismatch and any output that breaks the mechanism's norm bound.
MechanismSample SampleMechanism(const Mechanism& mech,
                                const DataDistribution& dist, int m,
                                std::uint64_t seed);

Eigen::MatrixXd SampleMechanismOutputs(const Mechanism& mech,
                                       const DataDistribution& dist, int m,
                                       std::uint64_t seed);

// ---------------------------------------------------------------------------
// NoiseModel

enum class NoiseKind { kGaussianFixed, kGaussianDiagParam, kGeneral };

class NoiseModel {
 public:
  using Sampler = std::function<Eigen::VectorXd(Rng&)>;
  using LogDensity = std::function<double(const Eigen::VectorXd&)>;

  // Covariance must be symmetric within 1e-10 with no eigenvalue below -1e-10.
  static NoiseModel GaussianFixed(const Eigen::MatrixXd& covariance);
  // b = basis * (exp(log_std) .* eps). An empty basis means the identity.
  static NoiseModel GaussianDiag(const Eigen::VectorXd& log_std,
                                 const Eigen::MatrixXd& basis = {});
  static NoiseModel General(int dim, Sampler sampler, LogDensity log_density,
                            double power);

  NoiseKind kind() const { return kind_; }
  int dim() const { return dim_; }
  bool is_gaussian() const { return kind_ != NoiseKind::kGeneral; }

  // Gaussian kinds only.
  const Eigen::MatrixXd& covariance() const;
  const Eigen::VectorXd& log_std() const { return log_std_; }
  const Eigen::MatrixXd& basis() const { return basis_; }

  // E||B||^2.
  double power() const;

  Eigen::VectorXd Draw(Rng& rng) const;
  double log_density(const Eigen::VectorXd& b) const;

 private:
  NoiseModel() = default;

  NoiseKind kind_ = NoiseKind::kGaussianFixed;
  int dim_ = 0;
  Eigen::MatrixXd covariance_;
  Eigen::MatrixXd factor_;  // covariance = factor * factor^T
  bool diagonal_ = false;
  Eigen::VectorXd log_std_;
  Eigen::MatrixXd basis_;
  Sampler sampler_;
  LogDensity log_density_;
  double power_ = 0.0;
};

// Row-wise addition of independent noise draws.
Eigen::MatrixXd Perturb(const Eigen::MatrixXd& outputs, const NoiseModel& noise,
                        std::uint64_t seed);

// ---------------------------------------------------------------------------
// Budgets

enum class EntropyProvenance { kAnalytic, kKnnEstimated, kPlugIn };

enum class BudgetConvention { kMiCap, kResidualFloor };

struct BudgetSpec {
  std::optional<double> mi_cap;          // beta, nats
  std::optional<double> residual_floor;  // beta-hat, nats
  std::optional<double> data_entropy;    // H(X), nats
  EntropyProvenance entropy_provenance = EntropyProvenance::kAnalytic;
  // The convention the caller last set; conversion flips it.
  BudgetConvention primary = BudgetConvention::kResidualFloor;

  bool operator==(const BudgetSpec&) const = default;
};

// Fills whichever convention is missing from beta = H - beta-hat and flips
// `primary`. Populated fields are never recomputed, so two conversions of a
// populated spec return it unchanged.
BudgetSpec ResidualToMiBudget(const BudgetSpec& spec);

// KL(Bernoulli(delta) || Bernoulli(delta_o)); delta_o in {0, 1} is rejected.
double PacAdvantageKl(double delta, double delta_o);

// R = intrinsic - advantage.
double ResidualPacAccounting(double intrinsic, double advantage);

// H(X) - ln |X| for a discrete distribution.
double IntrinsicPrivacyDiscrete(const std::vector<double>& pmf);

// ---------------------------------------------------------------------------
// CalibrationReport

enum class CalibrationMethod { kAutoPac, kEfficientPac, kWaterfill, kSrpac };

std::string ToString(CalibrationMethod method);
CalibrationMethod ParseCalibrationMethod(const std::string& name);

struct CalibrationReport {
  NoiseModel noise = NoiseModel::GaussianFixed(Eigen::MatrixXd::Zero(1, 1));
  double certified_bound = 0.0;
  std::optional<double> corrected_mi;
  std::optional<double> gap_estimate;
  double noise_power = 0.0;
  CalibrationMethod method = CalibrationMethod::kWaterfill;
  std::uint64_t seed = 0;
  long sample_count = 0;

  // Method diagnostics.
  std::string branch;            // auto_pac: "anisotropic" | "isotropic"
  std::optional<int> j0;         // auto_pac
  bool heuristic_norm_bound = false;
  std::optional<double> norm_bound;
  bool converged = true;         // efficient_pac
  std::string convergence_rule;  // efficient_pac
  std::optional<double> multiplier;  // waterfill
  Eigen::VectorXd signal_eigenvalues;
  Eigen::VectorXd noise_eigenvalues;
};

// Sets corrected_mi = certified_bound - gap (floored at 0) with the estimate.
void AttachGapCorrection(CalibrationReport& report, double gap_value);

}  // namespace rpac

#endif  // RPAC_CORE_HPP_
