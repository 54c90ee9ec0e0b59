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

#ifndef RIS_INFERENCE_HPP
#define RIS_INFERENCE_HPP

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "ris/band_linalg.hpp"
#include "ris/estimators.hpp"
#include "ris/models.hpp"
#include "ris/proposal.hpp"
#include "ris/statespace.hpp"

namespace ris {

/// psi = (beta, phi, sigma2). The sampler works on (beta, atanh(phi), log(sigma2)).
struct ParameterVector {
  Vector beta;
  double phi = 0.0;
  double sigma2 = 1.0;

  [[nodiscard]] std::size_t size() const noexcept { return static_cast<std::size_t>(beta.size()) + 2; }
  [[nodiscard]] Vector to_unconstrained() const;
  [[nodiscard]] Vector to_natural() const;
  [[nodiscard]] static ParameterVector from_unconstrained(const Vector& theta);
  [[nodiscard]] static ParameterVector from_natural(const Vector& psi);
  /// beta1..betap, phi, sigma2.
  [[nodiscard]] std::vector<std::string> names() const;
};

inline constexpr double kBetaPriorVariance = 100.0;

/// log N(beta | 0, tau I) - log sqrt(1 - phi^2) - log sigma2 on the natural scale;
/// -infinity outside |phi| < 1, sigma2 > 0.
[[nodiscard]] double log_prior_natural(const ParameterVector& psi, double beta_variance = kBetaPriorVariance);

/// Prior density of the unconstrained vector: natural log prior plus log Jacobian.
[[nodiscard]] double log_prior(const Vector& theta, double beta_variance = kBetaPriorVariance);

// ---------------------------------------------------------------------------

enum class SamplerKind {
  kGaussian,        // fitted Gaussian N(mode, (C + Q)^{-1})
  kStudentT,        // t with the fitted location and scale
  kMixture,         // eigenvalue-modified heavy component, dense
  kImposedMixture,  // heavy component from the inflated approximating model (scalar AR(1) states)
};

[[nodiscard]] std::string to_string(SamplerKind kind);
[[nodiscard]] SamplerKind sampler_from_string(const std::string& name);

inline constexpr double kDefaultStudentNu = 5.0;

struct SamplerConfig {
  SamplerKind kind = SamplerKind::kMixture;
  MomentOrder order{};
  double pi = kDefaultMixtureWeight;
  double nu = kDefaultStudentNu;
  double eps_inflate = kDefaultInflation;
  Clamp clamp = Clamp::kHard;
  std::size_t samples = 200;
};

struct SsmDensity {
  std::unique_ptr<ImportanceDensity> density;
  SpdkFit fit;
  bool condition_holds = false;  // the fitted Gaussian alone satisfies the moment condition
  int imposition_steps = 0;
};

/// Fits the approximating model for one AR(1) latent series and builds the
/// configured importance density around it. `prior` must come from ar1_precision(spec).
[[nodiscard]] SsmDensity build_ssm_density(const MeasurementModel& model, const GaussianPrior& prior,
                                           const Ar1Spec& spec, const SamplerConfig& config);

struct PanelLikelihood {
  double log_value = 0.0;
  std::vector<double> panel_log_values;
  std::vector<WeightSample> weights;  // filled when requested
};

/**
 * Sum over panels of log L^_i. Panel i draws from derive_seed(seed, i). Draws
 * consume the stream identically for every psi, so calling twice with the same
 * seed at different psi gives common random numbers.
 */
[[nodiscard]] PanelLikelihood estimate_panel_likelihood(const PanelData& data, const ParameterVector& psi,
                                                        const SamplerConfig& config, std::uint64_t seed,
                                                        bool keep_weights = false);

/// log L^ for a single Poisson series with intercept beta and stationary AR(1) latent.
[[nodiscard]] LikelihoodEstimate estimate_ssm_likelihood(const std::vector<int>& y, const ParameterVector& psi,
                                                         const SamplerConfig& config, std::uint64_t seed);

// ---------------------------------------------------------------------------

/// Returns log L^(theta) on the unconstrained scale using the given seed; may throw.
using LogLikelihoodEstimator = std::function<double(const Vector& theta, std::uint64_t seed)>;
using LogDensityFn = std::function<double(const Vector& theta)>;

struct PmmhConfig {
  std::size_t iterations = 50000;
  std::size_t burn_in = 50000;
  std::size_t adapt_start = 1000;   // fixed diagonal proposal before this iteration
  double initial_scale = 0.1;       // per-coordinate sd of the fixed proposal times sqrt(dim)
  double jitter = 1e-8;
  std::uint64_t seed = 1;
};

struct PmmhResult {
  Matrix chain;                       // kept draws, unconstrained scale, one row per iteration
  std::vector<double> log_post;       // log L^ + log prior of the kept draws
  std::vector<char> accepted;         // per kept iteration
  double acceptance_rate = 0.0;       // over kept iterations
  std::size_t estimator_failures = 0;
  double seconds = 0.0;
};

/**
 * Pseudo-marginal adaptive random-walk Metropolis. The stored estimate for
 * the current state is reused until a proposal is accepted. Each proposal is
 * evaluated with derive_seed(seed, 1, iteration). Proposals whose estimator
 * throws are rejected and counted.
 */
[[nodiscard]] PmmhResult run_pmmh(const LogLikelihoodEstimator& log_lik, const LogDensityFn& log_prior_fn,
                                  const Vector& theta0, const PmmhConfig& config);

struct ChainDiagnostics {
  std::vector<IactResult> iact;
  double mean_iact = 0.0;
};

[[nodiscard]] ChainDiagnostics chain_diagnostics(const Matrix& chain);

/// Chain mapped to (beta, phi, sigma2).
[[nodiscard]] Matrix natural_chain(const Matrix& unconstrained);

/// Pseudo-marginal run on a panel data set; chain and diagnostics on the natural scale.
struct PanelMcmcResult {
  PmmhResult run;
  Matrix natural;
  ChainDiagnostics diagnostics;
};

[[nodiscard]] PanelMcmcResult run_panel_pmmh(const PanelData& data, const ParameterVector& start,
                                             const SamplerConfig& sampler, const PmmhConfig& config);

/// CSV header: iter, parameter names, log_post_est, accepted.
void write_chain_csv(std::ostream& out, const Matrix& natural, const std::vector<std::string>& names,
                     const PmmhResult& run);

}  // namespace ris

#endif  // RIS_INFERENCE_HPP
