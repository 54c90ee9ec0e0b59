// Copyright 2026 The robust-is Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef RIS_HARNESS_EXPERIMENTS_HPP
#define RIS_HARNESS_EXPERIMENTS_HPP

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "ris/inference.hpp"
#include "ris/serialization.hpp"

namespace ris::harness {

using Json = nlohmann::json;

inline constexpr std::uint64_t kDefaultSeed = 20260101;

// ---------------------------------------------------------------------------
// Data generation

/// y_t ~ Poisson(exp(beta + alpha_t)) with a stationary zero-mean AR(1) alpha.
/// sigma2 = 0 gives alpha = 0 throughout.
[[nodiscard]] Dataset simulate_poisson_ssm(double beta, double phi, double sigma2, std::size_t length,
                                           std::uint64_t seed);

/// m panels of length T with x_it = (1, z_it), z_it ~ U(0, 1).
[[nodiscard]] Dataset simulate_panel(std::size_t panels, std::size_t length, const Vector& beta, double phi,
                                     double sigma2, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Bernoulli posterior-mean study

struct Table1Config {
  int trials = 100;
  int successes = 7;
  double prior_precision = 0.1;
  std::size_t reps = 20;
  std::size_t samples = 100000;
  double pi = kDefaultMixtureWeight;
  double nu = kDefaultStudentNu;
  double n_moment = 2.0;
  double percentile = kKscPercentile;
  std::uint64_t seed = kDefaultSeed;
};

struct Table1Row {
  std::size_t rep = 0;
  std::string sampler;
  double estimate = 0.0;
  double variance = 0.0;
  bool ksc_available = false;
  double shape = 0.0;
  double p_value = 1.0;
  bool reject = false;
  double seconds = 0.0;
  std::string error;
};

struct SamplerSummary {
  std::string sampler;
  double mean_estimate = 0.0;
  double variance_ratio = 1.0;       // mean variance / mean baseline variance
  double mean_variance_ratio = 1.0;  // mean of per-replication ratios
  std::size_t rejections = 0;
  std::size_t ksc_available = 0;
  double mean_seconds = 0.0;
  std::size_t failures = 0;
};

struct Table1Result {
  std::vector<Table1Row> rows;
  std::vector<SamplerSummary> summary;  // normal, t, 2nd-IS
  std::size_t failures = 0;
};

[[nodiscard]] Table1Result run_table1(const Table1Config& config);

// ---------------------------------------------------------------------------
// Poisson state-space likelihood study

struct Table2Config {
  std::size_t datasets = 20;
  std::size_t evaluations = 20;
  std::size_t samples = 10000;
  std::size_t length = 500;
  double n_moment = 2.0;
  double pi = kDefaultMixtureWeight;
  double eps_inflate = kDefaultInflation;
  std::vector<ParameterVector> psis;  // defaults to the extreme and generating values
  std::uint64_t seed = kDefaultSeed;
};

struct Table2Row {
  std::size_t dataset = 0;
  std::size_t psi_index = 0;
  bool condition_holds = false;
  int imposition_steps = 0;
  double weight_var_spdk = 0.0;     // mean of var(w) / L_ref^2, L_ref pooled over both samplers' estimates
  double weight_var_imposed = 0.0;
  double self_var_spdk = 0.0;       // mean of var(w / L^) per evaluation
  double self_var_imposed = 0.0;
  double mce_spdk = 0.0;           // sd of log L^ over evaluations
  double mce_imposed = 0.0;
  double mean_loglik_spdk = 0.0;
  double mean_loglik_imposed = 0.0;
  double seconds_spdk = 0.0;       // per evaluation
  double seconds_imposed = 0.0;
  std::string error;
};

struct Table2Summary {
  ParameterVector psi;
  double variance_ratio = 1.0;                  // weights on the shared likelihood scale
  double self_normalized_variance_ratio = 1.0;  // each evaluation normalized by its own estimate
  double mce_ratio = 1.0;
  double finite_variance_fraction = 0.0;
  double seconds_spdk = 0.0;
  double seconds_imposed = 0.0;
  std::size_t failures = 0;
};

struct Table2Result {
  std::vector<Table2Row> rows;
  std::vector<Table2Summary> summary;
  std::size_t failures = 0;
};

[[nodiscard]] std::vector<ParameterVector> default_table2_psis();
[[nodiscard]] Table2Result run_table2(const Table2Config& config);

// ---------------------------------------------------------------------------
// Panel likelihood study

struct Table3Config {
  std::size_t panels = 20;
  std::size_t length = 20;
  double stationary_variance = 0.5;
  double phi = 0.8;
  std::vector<double> beta{1.4, -1.0};
  std::size_t datasets = 10;
  std::size_t evaluations = 20;
  std::size_t samples = 1000;
  double n_moment = 2.0;
  double pi = kDefaultMixtureWeight;
  double nu = kDefaultStudentNu;
  std::uint64_t seed = kDefaultSeed;
};

struct Table3Row {
  std::size_t dataset = 0;
  std::size_t case_index = 0;   // 0: generating values, 1: (0, 0, 0, 1)
  double weight_var_t = 0.0;    // shared-scale variance averaged over panels and evaluations
  double weight_var_mixture = 0.0;
  double self_var_t = 0.0;
  double self_var_mixture = 0.0;
  double mce_t = 0.0;
  double mce_mixture = 0.0;
  double seconds_t = 0.0;
  double seconds_mixture = 0.0;
  std::string error;
};

struct Table3Summary {
  ParameterVector psi;
  double variance_ratio = 1.0;
  double self_normalized_variance_ratio = 1.0;
  double mce_ratio = 1.0;
  double seconds_t = 0.0;
  double seconds_mixture = 0.0;
  std::size_t failures = 0;
};

struct Table3Result {
  std::vector<Table3Row> rows;
  std::vector<Table3Summary> summary;
  std::size_t failures = 0;
};

[[nodiscard]] Table3Result run_table3(const Table3Config& config);

// ---------------------------------------------------------------------------
// Panel MCMC study

struct Table5Config {
  std::size_t panels = 20;
  std::size_t length = 20;
  double stationary_variance = 1.0;
  double phi = 0.8;
  std::vector<double> beta{1.4, -1.0};
  std::size_t reps = 3;
  std::size_t iterations = 5000;
  std::size_t burn_in = 5000;
  std::size_t samples = 200;
  double n_moment = 2.0;
  double pi = kDefaultMixtureWeight;
  double nu = kDefaultStudentNu;
  std::uint64_t seed = kDefaultSeed;
};

struct Table5Row {
  std::size_t rep = 0;
  std::string sampler;
  double acceptance_rate = 0.0;
  double mean_iact = 0.0;
  std::vector<double> iact;
  double seconds_per_iteration = 0.0;
  std::size_t estimator_failures = 0;
  std::string error;
};

struct Table5Result {
  std::vector<Table5Row> rows;
  double acceptance_t = 0.0;
  double acceptance_mixture = 0.0;
  double iact_ratio = 1.0;           // mean over replications of IACT(mixture) / IACT(t)
  double pooled_iact_ratio = 1.0;    // mean IACT(mixture) / mean IACT(t)
  double seconds_t = 0.0;
  double seconds_mixture = 0.0;
  std::size_t failures = 0;
};

[[nodiscard]] Table5Result run_table5(const Table5Config& config);

// ---------------------------------------------------------------------------
// Determinant paths

struct Fig2Config {
  double phi = 0.975;
  double stationary_variance = 0.5;
  double n_moment = 2.0;
  std::size_t length = 500;
  std::vector<double> variances{5.0, 10.0, 25.0, 40.0};
};

struct Fig2Path {
  double v = 0.0;
  SylvesterTrace trace;
};

[[nodiscard]] std::vector<Fig2Path> run_fig2(const Fig2Config& config);

// ---------------------------------------------------------------------------
// Reporting

[[nodiscard]] Json to_json(const Table1Config& c);
[[nodiscard]] Json to_json(const Table2Config& c);
[[nodiscard]] Json to_json(const Table3Config& c);
[[nodiscard]] Json to_json(const Table5Config& c);
[[nodiscard]] Json to_json(const Fig2Config& c);
[[nodiscard]] Json to_json(const ParameterVector& psi);

[[nodiscard]] Json summary_json(const Table1Result& r);
[[nodiscard]] Json summary_json(const Table2Result& r);
[[nodiscard]] Json summary_json(const Table3Result& r);
[[nodiscard]] Json summary_json(const Table5Result& r);

/// RFC 4180 field quoting.
[[nodiscard]] std::string csv_field(const std::string& s);
[[nodiscard]] std::string csv_number(double x);

[[nodiscard]] std::string rows_csv(const Table1Result& r);
[[nodiscard]] std::string rows_csv(const Table2Result& r);
[[nodiscard]] std::string rows_csv(const Table3Result& r);
[[nodiscard]] std::string rows_csv(const Table5Result& r);
[[nodiscard]] std::string path_csv(const Fig2Path& p);

}  // namespace ris::harness

#endif  // RIS_HARNESS_EXPERIMENTS_HPP
