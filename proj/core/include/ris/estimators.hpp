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

#ifndef RIS_ESTIMATORS_HPP
#define RIS_ESTIMATORS_HPP

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ris/band_linalg.hpp"
#include "ris/models.hpp"
#include "ris/proposal.hpp"

namespace ris {

/// Log importance weights of one run, with optional scalar payload h(alpha_s).
struct WeightSample {
  std::vector<double> log_weights;
  std::optional<std::vector<double>> payload;
  std::string tag;
  std::uint64_t seed = 0;

  [[nodiscard]] std::size_t size() const noexcept { return log_weights.size(); }
};

struct LikelihoodEstimate {
  double log_value = 0.0;  // log of (1/S) sum w_s
  double value = 0.0;      // exp(log_value); may underflow to 0 or overflow to inf
  WeightSample weights;
};

using Payload = std::function<double(const Vector&)>;

/// Plain-Monte-Carlo importance sampling estimate of the normalizing constant
/// of `target` with S draws from `proposal` seeded by `seed`. Throws
/// DegenerateSample when every weight is zero.
[[nodiscard]] LikelihoodEstimate estimate_likelihood(const LatentTarget& target, const ImportanceDensity& proposal,
                                                     std::size_t samples, std::uint64_t seed,
                                                     const Payload& payload = {});

/// log((1/S) sum exp(log_weights)).
[[nodiscard]] double log_mean_exp(const std::vector<double>& log_weights);

struct RatioEstimate {
  double estimate = 0.0;  // sum h w / sum w
  double variance = 0.0;  // S sum (h - I)^2 w^2 / (sum w)^2
};

/// Self-normalized estimate of E[h] and its asymptotic variance.
[[nodiscard]] RatioEstimate ratio_estimate(const WeightSample& ws);

struct GpdFit {
  double shape = 0.0;       // xi
  double gpd_scale = 0.0;   // beta, on the max-normalized weight scale
  double threshold = 0.0;   // u, on the max-normalized weight scale
  std::size_t exceedances = 0;
  double shape_se = 0.0;
  double wald_statistic = 0.0;
  double p_value = 1.0;     // one-sided, H0: xi <= 1/2
  bool reject = false;      // p < significance
};

inline constexpr double kKscPercentile = 90.0;
inline constexpr double kKscSignificance = 0.01;
inline constexpr std::size_t kKscMinExceedances = 10;
inline constexpr std::size_t kKscMinWeights = 100;

/// Maximum-likelihood generalized Pareto fit to positive excesses.
/// Standard error of the shape from the observed information.
[[nodiscard]] GpdFit fit_gpd(const std::vector<double>& excesses);

/// Wald test for infinite weight variance: GPD fit to the weights above the
/// given percentile. Throws InsufficientTail below 10 exceedances.
[[nodiscard]] GpdFit ksc_test(const WeightSample& ws, double percentile = kKscPercentile,
                              double significance = kKscSignificance);

struct IactResult {
  double estimate = 1.0;
  std::size_t cutoff = 0;       // L* = min(1000, L)
  std::size_t first_small = 0;  // L, or 0 when no lag up to 1000 qualified
  std::vector<double> autocorrelations;  // rho_1..rho_{L*}
};

inline constexpr std::size_t kIactMaxLag = 1000;
inline constexpr std::size_t kIactMinLength = 50;

/// 1 + 2 sum_{j <= L*} rho_j with L the first lag where |rho_j| <= 2/sqrt(K).
[[nodiscard]] IactResult iact(const std::vector<double>& chain);

/// Sample variance of weights divided by their mean.
[[nodiscard]] double normalized_weight_variance(const std::vector<double>& log_weights);

/// normalized_weight_variance(a) / normalized_weight_variance(b).
[[nodiscard]] double weight_variance_ratio(const WeightSample& a, const WeightSample& b);

/// CSV with header `log_weight[,payload]`.
void write_weight_csv(std::ostream& out, const WeightSample& ws);
[[nodiscard]] WeightSample read_weight_csv(std::istream& in);

}  // namespace ris

#endif  // RIS_ESTIMATORS_HPP
