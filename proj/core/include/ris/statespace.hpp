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

#ifndef RIS_STATESPACE_HPP
#define RIS_STATESPACE_HPP

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "ris/band_linalg.hpp"
#include "ris/models.hpp"
#include "ris/proposal.hpp"

namespace ris {

/// Stationary scalar AR(1): alpha_{t+1} = mu (1 - phi) + phi alpha_t + eta_t,
/// eta_t ~ N(0, sigma2), alpha_1 ~ N(mu, sigma2 / (1 - phi^2)).
class Ar1Spec {
 public:
  Ar1Spec(double mu, double phi, double sigma2, std::size_t length);

  [[nodiscard]] double mu() const noexcept { return mu_; }
  [[nodiscard]] double phi() const noexcept { return phi_; }
  [[nodiscard]] double sigma2() const noexcept { return sigma2_; }
  [[nodiscard]] std::size_t length() const noexcept { return length_; }
  [[nodiscard]] double stationary_variance() const noexcept { return sigma2_ / (1.0 - phi_ * phi_); }

  /// Spec with the given stationary variance sigma_alpha^2.
  static Ar1Spec from_stationary_variance(double mu, double phi, double stationary_variance, std::size_t length);

 private:
  double mu_;
  double phi_;
  double sigma2_;
  std::size_t length_;
};

/// Solves X = A X A' + S by squared Smith iteration until the update is below tol.
[[nodiscard]] Matrix solve_discrete_lyapunov(const Matrix& a, const Matrix& s, double tol = 1e-12);

/// Stationary vector AR(1): alpha_{t+1} = d + Phi alpha_t + eta_t, eta_t ~ N(0, Sigma).
class BlockAr1Spec {
 public:
  BlockAr1Spec(Vector intercept, Matrix transition, Matrix innovation_cov, std::size_t length);

  [[nodiscard]] std::size_t state_dim() const noexcept { return static_cast<std::size_t>(intercept_.size()); }
  [[nodiscard]] std::size_t length() const noexcept { return length_; }
  [[nodiscard]] const Vector& intercept() const noexcept { return intercept_; }
  [[nodiscard]] const Matrix& transition() const noexcept { return transition_; }
  [[nodiscard]] const Matrix& innovation_cov() const noexcept { return innovation_cov_; }
  /// Sigma_alpha solving Sigma_alpha = Phi Sigma_alpha Phi' + Sigma.
  [[nodiscard]] const Matrix& stationary_cov() const noexcept { return stationary_cov_; }
  /// (I - Phi)^{-1} d.
  [[nodiscard]] const Vector& stationary_mean() const noexcept { return stationary_mean_; }

  // Optional observation link theta_t = c_t + Z_t alpha_t (time-invariant).
  std::optional<Matrix> signal_loading;
  std::optional<Vector> signal_offset;

 private:
  Vector intercept_;
  Matrix transition_;
  Matrix innovation_cov_;
  std::size_t length_;
  Matrix stationary_cov_;
  Vector stationary_mean_;
};

/// Prior mean and (block-)tridiagonal precision of the stacked latent path.
[[nodiscard]] std::pair<Vector, SymBandMatrix> ar1_precision(const Ar1Spec& spec);
[[nodiscard]] std::pair<Vector, SymBandMatrix> ar1_precision(const BlockAr1Spec& spec);

// ---------------------------------------------------------------------------

/**
 * Gaussian approximating model from iterated second-order expansion of l at
 * the mode: g(y_t | alpha_t) proportional to exp(b_t' alpha_t - alpha_t' C_t alpha_t / 2).
 * The importance density is N(mode, (C + Q)^{-1}).
 */
struct SpdkFit {
  Vector b;         // stacked b_t
  SymBandMatrix c;  // block-diagonal C_t
  Vector mode;
  int iterations = 0;
  bool converged = false;

  /// Scalar states: v_t = 1 / C_t.
  [[nodiscard]] Vector variances() const;
  /// Scalar states: pseudo-observations y^_t = b_t / C_t.
  [[nodiscard]] Vector pseudo_observations() const;
};

/// Newton fixed-point iteration started at the prior mean. Converged when the
/// sup-norm change of the mode is <= tol; C and B are then refreshed at the mode.
/// Throws DivergedError<SpdkFit> after max_iter iterations.
[[nodiscard]] SpdkFit spdk_fit(const MeasurementModel& model, const GaussianPrior& prior, double tol = 1e-8,
                               int max_iter = 100);

/// (C + Q)^{-1} (B + Q mu).
[[nodiscard]] Vector approximating_mean(const SpdkFit& fit, const GaussianPrior& prior);

/// N(approximating_mean, C + Q).
[[nodiscard]] GaussianProposal spdk_proposal(const SpdkFit& fit, const GaussianPrior& prior);

// ---------------------------------------------------------------------------

/// Leading principal minors of sigma2 * (Q - (n-1) C) for scalar states.
struct SylvesterTrace {
  bool positive_definite = false;
  std::vector<double> log_abs_minor;  // log |Lambda_t|, t = 1..T
  std::vector<int> sign;              // sign of Lambda_t (0 when exactly zero)

  [[nodiscard]] bool changes_sign() const;
};

/// Three-term determinant recursion over the tridiagonal Q - (n-1) diag(1/v),
/// rescaled at every step so T in the thousands cannot under- or overflow.
/// `scale` multiplies the matrix before taking minors (sigma^2 reproduces the
/// usual normalization with Lambda_0 = 1); it does not affect the verdict.
[[nodiscard]] SylvesterTrace sylvester_check(const SymBandMatrix& q, const Vector& v, double n, double scale = 1.0);
[[nodiscard]] SylvesterTrace sylvester_check(const Ar1Spec& spec, const Vector& v, double n);

/// Smallest constant measurement variance v with Q - (n-1) I / v > 0 for every T:
/// (n-1) sigma_alpha^2 (1+|phi|)/(1-|phi|), or (n-1) sigma_alpha^2 + 1e-5 when phi = 0.
[[nodiscard]] double constant_variance_bound(const Ar1Spec& spec, double n);

inline constexpr double kDefaultInflation = 0.05;

struct ScalarImposition {
  SpdkFit fit;  // v_t replaced by v_t*, b_t rebuilt from y^_t, mode refreshed
  int steps = 0;
  double bound = 0.0;
};

/// Inflates every v_t below the constant-variance bound by (1 + eps) until the
/// Sylvester check passes. steps == 0 iff the input already passes.
[[nodiscard]] ScalarImposition impose_scalar(const SpdkFit& fit, const Ar1Spec& spec, double n,
                                             double eps_inflate = kDefaultInflation);

struct BlockImposition {
  SymBandMatrix c_star;
  int steps = 0;
  double shrink = 1.0;  // (1 + eps)^{-steps}
};

/// Shrinks C by (1 + eps) until the smallest eigenvalue of Q - (n-1) C is positive.
[[nodiscard]] BlockImposition impose_block(const SymBandMatrix& c, const SymBandMatrix& q, double n,
                                           double eps_inflate = kDefaultInflation);

/// Fit whose C is replaced by the imposed C*, keeping the pseudo-observations.
[[nodiscard]] SpdkFit apply_imposition(const SpdkFit& fit, const BlockImposition& imposition,
                                       const GaussianPrior& prior);

/// pi * N from the imposed approximating model + (1 - pi) * N from the original.
[[nodiscard]] MixtureProposal build_ssm_mixture(const SpdkFit& original, const SpdkFit& imposed,
                                                const GaussianPrior& prior, double pi = kDefaultMixtureWeight);

}  // namespace ris

#endif  // RIS_STATESPACE_HPP
