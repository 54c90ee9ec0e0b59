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

#ifndef RIS_MODELS_HPP
#define RIS_MODELS_HPP

#include <cstddef>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "ris/band_linalg.hpp"
#include "ris/proposal.hpp"

namespace ris {

/// log p(y | alpha) for a latent vector alpha, with derivatives.
class MeasurementModel {
 public:
  virtual ~MeasurementModel() = default;

  [[nodiscard]] virtual std::size_t dim() const = 0;
  /// Size of the diagonal blocks of the Hessian (1 for scalar states).
  [[nodiscard]] virtual std::size_t block_size() const { return 1; }
  [[nodiscard]] virtual double log_meas(const Vector& alpha) const = 0;
  [[nodiscard]] virtual Vector grad(const Vector& alpha) const = 0;
  [[nodiscard]] virtual SymBandMatrix hess(const Vector& alpha) const = 0;
  /// The Hessian is negative semidefinite everywhere.
  [[nodiscard]] virtual bool concave() const = 0;
  /// (k, delta) with log_meas(alpha) <= k + delta' alpha for all alpha, when such a bound is known.
  [[nodiscard]] virtual std::optional<std::pair<double, Vector>> linear_bound() const = 0;
};

/// Gaussian latent prior N(mean, precision^{-1}) with a cached factor.
class GaussianPrior {
 public:
  GaussianPrior(Vector mean, SymBandMatrix precision);

  [[nodiscard]] std::size_t dim() const noexcept { return static_cast<std::size_t>(mean_.size()); }
  [[nodiscard]] const Vector& mean() const noexcept { return mean_; }
  [[nodiscard]] const SymBandMatrix& precision() const noexcept { return precision_; }
  [[nodiscard]] const BandCholesky& cholesky() const noexcept { return chol_; }
  [[nodiscard]] double log_density(const Vector& alpha) const;

 private:
  Vector mean_;
  SymBandMatrix precision_;
  BandCholesky chol_;
};

/// Unnormalized log target log p(y | alpha) + log p(alpha) evaluated on draws.
class LatentTarget {
 public:
  virtual ~LatentTarget() = default;
  [[nodiscard]] virtual std::size_t dim() const = 0;
  /// -infinity outside the support.
  [[nodiscard]] virtual double log_joint(const Vector& alpha) const = 0;
};

/// Measurement model paired with a Gaussian prior.
class GaussianLatentTarget final : public LatentTarget {
 public:
  GaussianLatentTarget(const MeasurementModel& model, const GaussianPrior& prior);
  [[nodiscard]] std::size_t dim() const override { return model_->dim(); }
  [[nodiscard]] double log_joint(const Vector& alpha) const override;

 private:
  const MeasurementModel* model_;
  const GaussianPrior* prior_;
};

[[nodiscard]] double log_joint(const MeasurementModel& model, const GaussianPrior& prior, const Vector& alpha);

// ---------------------------------------------------------------------------

/// Poisson counts with log-intensity offset_t + alpha_t:
/// l_t = y_t (o_t + alpha_t) - exp(o_t + alpha_t) - log(y_t!).
class PoissonSsmModel final : public MeasurementModel {
 public:
  PoissonSsmModel(std::vector<int> y, double intercept);
  PoissonSsmModel(std::vector<int> y, Vector offsets);

  [[nodiscard]] std::size_t dim() const override { return y_.size(); }
  [[nodiscard]] double log_meas(const Vector& alpha) const override;
  [[nodiscard]] Vector grad(const Vector& alpha) const override;
  [[nodiscard]] SymBandMatrix hess(const Vector& alpha) const override;
  [[nodiscard]] bool concave() const override { return true; }
  [[nodiscard]] std::optional<std::pair<double, Vector>> linear_bound() const override;

  [[nodiscard]] const std::vector<int>& y() const noexcept { return y_; }
  [[nodiscard]] const Vector& offsets() const noexcept { return offsets_; }

 private:
  std::vector<int> y_;
  Vector offsets_;
  double log_factorial_sum_ = 0.0;
};

/// y_t = alpha_t + e_t, e_t ~ N(0, r_t). Quadratic in alpha, so the Gaussian
/// approximation is exact.
class GaussianMeasurementModel final : public MeasurementModel {
 public:
  GaussianMeasurementModel(Vector y, Vector variances);

  [[nodiscard]] std::size_t dim() const override { return static_cast<std::size_t>(y_.size()); }
  [[nodiscard]] double log_meas(const Vector& alpha) const override;
  [[nodiscard]] Vector grad(const Vector& alpha) const override;
  [[nodiscard]] SymBandMatrix hess(const Vector& alpha) const override;
  [[nodiscard]] bool concave() const override { return true; }
  [[nodiscard]] std::optional<std::pair<double, Vector>> linear_bound() const override;

  [[nodiscard]] const Vector& y() const noexcept { return y_; }
  [[nodiscard]] const Vector& variances() const noexcept { return var_; }

 private:
  Vector y_;
  Vector var_;
};

/// k successes in N Bernoulli trials with success probability alpha in (0,1),
/// under a N(prior_mean, 1/prior_precision) prior truncated to (0,1).
class BernoulliToyModel final : public MeasurementModel {
 public:
  BernoulliToyModel(int trials, int successes, double prior_precision, double prior_mean = 0.5);

  [[nodiscard]] std::size_t dim() const override { return 1; }
  [[nodiscard]] double log_meas(const Vector& alpha) const override;
  [[nodiscard]] Vector grad(const Vector& alpha) const override;
  [[nodiscard]] SymBandMatrix hess(const Vector& alpha) const override;
  [[nodiscard]] bool concave() const override { return true; }
  [[nodiscard]] std::optional<std::pair<double, Vector>> linear_bound() const override;

  /// l(alpha) minus half Q (alpha - prior_mean)^2, or -infinity outside (0,1).
  [[nodiscard]] double log_joint_kernel(double alpha) const;

  [[nodiscard]] int trials() const noexcept { return trials_; }
  [[nodiscard]] int successes() const noexcept { return successes_; }
  [[nodiscard]] double prior_precision() const noexcept { return prior_precision_; }
  [[nodiscard]] double prior_mean() const noexcept { return prior_mean_; }

 private:
  int trials_;
  int successes_;
  double prior_precision_;
  double prior_mean_;
};

/// Truncated-prior Bernoulli posterior kernel as an importance-sampling target.
class BernoulliTarget final : public LatentTarget {
 public:
  explicit BernoulliTarget(const BernoulliToyModel& model) : model_(&model) {}
  [[nodiscard]] std::size_t dim() const override { return 1; }
  [[nodiscard]] double log_joint(const Vector& alpha) const override { return model_->log_joint_kernel(alpha[0]); }

 private:
  const BernoulliToyModel* model_;
};

/// Gaussian proposal from a second-order expansion of l at the MLE k/N.
/// Boundary cases k in {0, N} expand at 1/(2N) or 1 - 1/(2N).
[[nodiscard]] GaussianProposal bernoulli_taylor_proposal(const BernoulliToyModel& model);

// ---------------------------------------------------------------------------

/// One cluster of a Poisson GLMM with canonical log link:
/// eta = X beta + Z alpha, alpha ~ N(0, Q^{-1}), known dispersion.
class GlmmPoissonModel final : public MeasurementModel {
 public:
  GlmmPoissonModel(std::vector<int> y, Matrix x, Matrix z, Vector beta, Matrix random_precision,
                   double dispersion = 1.0);

  [[nodiscard]] std::size_t dim() const override { return static_cast<std::size_t>(z_.cols()); }
  [[nodiscard]] std::size_t block_size() const override { return dim(); }
  [[nodiscard]] double log_meas(const Vector& alpha) const override;
  [[nodiscard]] Vector grad(const Vector& alpha) const override;
  [[nodiscard]] SymBandMatrix hess(const Vector& alpha) const override;
  [[nodiscard]] bool concave() const override { return true; }
  [[nodiscard]] std::optional<std::pair<double, Vector>> linear_bound() const override;

  [[nodiscard]] Vector linear_predictor(const Vector& alpha) const;
  [[nodiscard]] GaussianPrior prior() const;

  [[nodiscard]] const std::vector<int>& y() const noexcept { return y_; }
  [[nodiscard]] const Matrix& x() const noexcept { return x_; }
  [[nodiscard]] const Matrix& z() const noexcept { return z_; }
  [[nodiscard]] const Vector& beta() const noexcept { return beta_; }
  [[nodiscard]] const Matrix& random_precision() const noexcept { return q_; }
  [[nodiscard]] double dispersion() const noexcept { return dispersion_; }

 private:
  std::vector<int> y_;
  Matrix x_;
  Matrix z_;
  Vector beta_;
  Matrix q_;
  double dispersion_;
  Vector fixed_part_;
  double log_factorial_sum_ = 0.0;
};

struct GlmmMode {
  Vector mode;
  SymBandMatrix precision;  // Q* = -H(mode), dense
  int iterations = 0;
  double gradient_norm = 0.0;
};

/// Newton ascent on F(alpha) = l(alpha) + log N(alpha | 0, Q^{-1}) with step
/// halving; stops when the sup-norm of the gradient is <= tol.
[[nodiscard]] GlmmMode glmm_newton_mode(const GlmmPoissonModel& model, double tol = 1e-8, int max_iter = 100);

// ---------------------------------------------------------------------------

enum class PanelFamily { kPoisson, kGaussian };

/// Panel of m short series, each with its own AR(1) latent path and
/// covariates: eta_it = x_it' beta + alpha_it.
struct PanelData {
  std::vector<std::vector<int>> counts;         // Poisson family
  std::vector<Vector> responses;                // Gaussian family
  std::vector<Matrix> covariates;               // T_i x p per panel
  double gaussian_variance = 1.0;
  PanelFamily family = PanelFamily::kPoisson;

  [[nodiscard]] std::size_t num_panels() const noexcept { return covariates.size(); }
  [[nodiscard]] std::size_t length(std::size_t i) const { return static_cast<std::size_t>(covariates[i].rows()); }
  [[nodiscard]] std::size_t num_covariates() const { return covariates.empty() ? 0 : static_cast<std::size_t>(covariates[0].cols()); }
};

struct Ar1Params {
  double mu = 0.0;
  double phi = 0.0;
  double sigma2 = 1.0;
};

class PanelAr1Model {
 public:
  PanelAr1Model(PanelData data, Vector beta, Ar1Params latent);

  [[nodiscard]] std::size_t num_panels() const noexcept { return data_.num_panels(); }
  [[nodiscard]] const PanelData& data() const noexcept { return data_; }
  [[nodiscard]] const Vector& beta() const noexcept { return beta_; }
  [[nodiscard]] const Ar1Params& latent() const noexcept { return latent_; }

  /// Measurement model of panel i at the current beta.
  [[nodiscard]] std::unique_ptr<MeasurementModel> panel_model(std::size_t i) const;
  /// Stationary AR(1) prior of panel i.
  [[nodiscard]] GaussianPrior panel_prior(std::size_t i) const;

 private:
  PanelData data_;
  Vector beta_;
  Ar1Params latent_;
};

}  // namespace ris

#endif  // RIS_MODELS_HPP
