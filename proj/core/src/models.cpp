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

#include "ris/models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "ris/error.hpp"
#include "ris/statespace.hpp"

namespace ris {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_factorial_sum(const std::vector<int>& y) {
  double s = 0.0;
  for (int v : y) {
    require(v >= 0, "counts must be non-negative");
    s += std::lgamma(static_cast<double>(v) + 1.0);
  }
  return s;
}

}  // namespace

GaussianPrior::GaussianPrior(Vector mean, SymBandMatrix precision)
    : mean_(std::move(mean)), precision_(std::move(precision)) {
  require(static_cast<std::size_t>(mean_.size()) == precision_.dim(), "GaussianPrior: dimension mismatch");
  chol_ = factorize_or_throw(precision_, "prior precision");
}

double GaussianPrior::log_density(const Vector& alpha) const { return ris::log_density(alpha, mean_, chol_); }

GaussianLatentTarget::GaussianLatentTarget(const MeasurementModel& model, const GaussianPrior& prior)
    : model_(&model), prior_(&prior) {
  require(model.dim() == prior.dim(), "GaussianLatentTarget: dimension mismatch");
}

double GaussianLatentTarget::log_joint(const Vector& alpha) const {
  const double l = model_->log_meas(alpha);
  if (l == kNegInf) return l;
  return l + prior_->log_density(alpha);
}

double log_joint(const MeasurementModel& model, const GaussianPrior& prior, const Vector& alpha) {
  return GaussianLatentTarget(model, prior).log_joint(alpha);
}

// ---------------------------------------------------------------------------
// Poisson

PoissonSsmModel::PoissonSsmModel(std::vector<int> y, double intercept)
    : PoissonSsmModel(y, Vector::Constant(static_cast<Eigen::Index>(y.size()), intercept)) {}

PoissonSsmModel::PoissonSsmModel(std::vector<int> y, Vector offsets) : y_(std::move(y)), offsets_(std::move(offsets)) {
  require(!y_.empty(), "PoissonSsmModel: empty series");
  require(static_cast<std::size_t>(offsets_.size()) == y_.size(), "PoissonSsmModel: offsets length mismatch");
  log_factorial_sum_ = log_factorial_sum(y_);
}

double PoissonSsmModel::log_meas(const Vector& alpha) const {
  require(static_cast<std::size_t>(alpha.size()) == y_.size(), "PoissonSsmModel: dimension mismatch");
  double s = -log_factorial_sum_;
  for (std::size_t t = 0; t < y_.size(); ++t) {
    const double eta = offsets_[static_cast<Eigen::Index>(t)] + alpha[static_cast<Eigen::Index>(t)];
    s += y_[t] * eta - std::exp(eta);
  }
  return s;
}

Vector PoissonSsmModel::grad(const Vector& alpha) const {
  Vector g(alpha.size());
  for (Eigen::Index t = 0; t < alpha.size(); ++t) g[t] = y_[static_cast<std::size_t>(t)] - std::exp(offsets_[t] + alpha[t]);
  return g;
}

SymBandMatrix PoissonSsmModel::hess(const Vector& alpha) const {
  Vector h(alpha.size());
  for (Eigen::Index t = 0; t < alpha.size(); ++t) h[t] = -std::exp(offsets_[t] + alpha[t]);
  return SymBandMatrix::diagonal(h);
}

std::optional<std::pair<double, Vector>> PoissonSsmModel::linear_bound() const {
  // Dropping -exp(eta) leaves k + y' alpha.
  double k = -log_factorial_sum_;
  Vector delta(static_cast<Eigen::Index>(y_.size()));
  for (std::size_t t = 0; t < y_.size(); ++t) {
    k += y_[t] * offsets_[static_cast<Eigen::Index>(t)];
    delta[static_cast<Eigen::Index>(t)] = y_[t];
  }
  return std::make_pair(k, delta);
}

// ---------------------------------------------------------------------------
// Gaussian measurement

GaussianMeasurementModel::GaussianMeasurementModel(Vector y, Vector variances)
    : y_(std::move(y)), var_(std::move(variances)) {
  require(y_.size() == var_.size() && y_.size() > 0, "GaussianMeasurementModel: length mismatch");
  require((var_.array() > 0.0).all(), "GaussianMeasurementModel: variances must be positive");
}

double GaussianMeasurementModel::log_meas(const Vector& alpha) const {
  require(alpha.size() == y_.size(), "GaussianMeasurementModel: dimension mismatch");
  const double log2pi = std::log(2.0 * std::numbers::pi);
  double s = 0.0;
  for (Eigen::Index t = 0; t < y_.size(); ++t) {
    const double e = y_[t] - alpha[t];
    s += -0.5 * (log2pi + std::log(var_[t])) - 0.5 * e * e / var_[t];
  }
  return s;
}

Vector GaussianMeasurementModel::grad(const Vector& alpha) const {
  return ((y_ - alpha).array() / var_.array()).matrix();
}

SymBandMatrix GaussianMeasurementModel::hess(const Vector&) const {
  return SymBandMatrix::diagonal((-var_.array().inverse()).matrix());
}

std::optional<std::pair<double, Vector>> GaussianMeasurementModel::linear_bound() const {
  const double log2pi = std::log(2.0 * std::numbers::pi);
  double k = 0.0;
  for (Eigen::Index t = 0; t < y_.size(); ++t) k += -0.5 * (log2pi + std::log(var_[t]));
  return std::make_pair(k, Vector::Zero(y_.size()).eval());
}

// ---------------------------------------------------------------------------
// Bernoulli

BernoulliToyModel::BernoulliToyModel(int trials, int successes, double prior_precision, double prior_mean)
    : trials_(trials), successes_(successes), prior_precision_(prior_precision), prior_mean_(prior_mean) {
  require(trials >= 0, "BernoulliToyModel: N must be non-negative");
  require(successes >= 0 && successes <= trials, "BernoulliToyModel: k must lie in [0, N]");
  require(prior_precision > 0.0, "BernoulliToyModel: prior precision must be positive");
}

double BernoulliToyModel::log_meas(const Vector& alpha) const {
  const double a = alpha[0];
  if (!(a > 0.0 && a < 1.0)) return kNegInf;
  double s = 0.0;
  if (successes_ > 0) s += successes_ * std::log(a);
  if (trials_ - successes_ > 0) s += (trials_ - successes_) * std::log1p(-a);
  return s;
}

Vector BernoulliToyModel::grad(const Vector& alpha) const {
  const double a = alpha[0];
  Vector g(1);
  g[0] = successes_ / a - (trials_ - successes_) / (1.0 - a);
  return g;
}

SymBandMatrix BernoulliToyModel::hess(const Vector& alpha) const {
  const double a = alpha[0];
  Vector h(1);
  h[0] = -successes_ / (a * a) - (trials_ - successes_) / ((1.0 - a) * (1.0 - a));
  return SymBandMatrix::diagonal(h);
}

std::optional<std::pair<double, Vector>> BernoulliToyModel::linear_bound() const {
  // Both log terms are non-positive on (0,1).
  return std::make_pair(0.0, Vector::Zero(1).eval());
}

double BernoulliToyModel::log_joint_kernel(double alpha) const {
  Vector a(1);
  a[0] = alpha;
  const double l = log_meas(a);
  if (l == kNegInf) return l;
  const double e = alpha - prior_mean_;
  return l - 0.5 * prior_precision_ * e * e;
}

GaussianProposal bernoulli_taylor_proposal(const BernoulliToyModel& model) {
  require(model.trials() > 0, "bernoulli_taylor_proposal: N must be positive");
  const double n = model.trials();
  const double k = model.successes();
  double a_hat = k / n;
  a_hat = std::clamp(a_hat, 1.0 / (2.0 * n), 1.0 - 1.0 / (2.0 * n));
  const double d = -k / (a_hat * a_hat) - (n - k) / ((1.0 - a_hat) * (1.0 - a_hat));
  const double q = model.prior_precision();
  const double q_star = q - d;
  const double mean = (model.prior_mean() * q - d * a_hat) / q_star;
  Vector mu(1);
  mu[0] = mean;
  Vector prec(1);
  prec[0] = q_star;
  return GaussianProposal(mu, SymBandMatrix::diagonal(prec));
}

// ---------------------------------------------------------------------------
// GLMM

GlmmPoissonModel::GlmmPoissonModel(std::vector<int> y, Matrix x, Matrix z, Vector beta, Matrix random_precision,
                                   double dispersion)
    : y_(std::move(y)),
      x_(std::move(x)),
      z_(std::move(z)),
      beta_(std::move(beta)),
      q_(std::move(random_precision)),
      dispersion_(dispersion) {
  const auto n = static_cast<Eigen::Index>(y_.size());
  require(n > 0, "GlmmPoissonModel: empty cluster");
  require(x_.rows() == n && z_.rows() == n, "GlmmPoissonModel: design rows must match responses");
  require(x_.cols() == beta_.size(), "GlmmPoissonModel: beta length must match X columns");
  require(z_.cols() > 0 && q_.rows() == z_.cols() && q_.cols() == z_.cols(),
          "GlmmPoissonModel: Q must be u x u with u = columns of Z");
  require(dispersion_ > 0.0, "GlmmPoissonModel: dispersion must be positive");
  fixed_part_ = x_ * beta_;
  log_factorial_sum_ = log_factorial_sum(y_);
}

Vector GlmmPoissonModel::linear_predictor(const Vector& alpha) const { return fixed_part_ + z_ * alpha; }

double GlmmPoissonModel::log_meas(const Vector& alpha) const {
  require(alpha.size() == z_.cols(), "GlmmPoissonModel: dimension mismatch");
  const Vector eta = linear_predictor(alpha);
  double s = 0.0;
  for (Eigen::Index j = 0; j < eta.size(); ++j) s += y_[static_cast<std::size_t>(j)] * eta[j] - std::exp(eta[j]);
  return s / dispersion_ - log_factorial_sum_;
}

Vector GlmmPoissonModel::grad(const Vector& alpha) const {
  const Vector eta = linear_predictor(alpha);
  Vector r(eta.size());
  for (Eigen::Index j = 0; j < eta.size(); ++j) r[j] = y_[static_cast<std::size_t>(j)] - std::exp(eta[j]);
  return z_.transpose() * r / dispersion_;
}

SymBandMatrix GlmmPoissonModel::hess(const Vector& alpha) const {
  const Vector w = linear_predictor(alpha).array().exp().matrix();
  const Matrix h = -(z_.transpose() * w.asDiagonal() * z_) / dispersion_;
  return SymBandMatrix::dense(h);
}

std::optional<std::pair<double, Vector>> GlmmPoissonModel::linear_bound() const {
  double k = -log_factorial_sum_;
  Vector yv(static_cast<Eigen::Index>(y_.size()));
  for (std::size_t j = 0; j < y_.size(); ++j) yv[static_cast<Eigen::Index>(j)] = y_[j];
  k += yv.dot(fixed_part_) / dispersion_;
  return std::make_pair(k, (z_.transpose() * yv / dispersion_).eval());
}

GaussianPrior GlmmPoissonModel::prior() const {
  return GaussianPrior(Vector::Zero(z_.cols()), SymBandMatrix::dense(q_));
}

GlmmMode glmm_newton_mode(const GlmmPoissonModel& model, double tol, int max_iter) {
  require(tol > 0.0 && max_iter > 0, "glmm_newton_mode: tol and max_iter must be positive");
  const Matrix& q = model.random_precision();
  auto objective = [&](const Vector& a) { return model.log_meas(a) - 0.5 * a.dot(q * a); };
  auto gradient = [&](const Vector& a) -> Vector { return model.grad(a) - q * a; };

  Vector alpha = Vector::Zero(static_cast<Eigen::Index>(model.dim()));
  double f = objective(alpha);
  Vector g = gradient(alpha);
  int iter = 0;
  while (g.lpNorm<Eigen::Infinity>() > tol) {
    if (iter == max_iter) {
      const Matrix neg_h = -model.hess(alpha).to_dense() + q;
      throw DivergedError<GlmmMode>("glmm_newton_mode: no convergence in " + std::to_string(max_iter) + " iterations",
                                    GlmmMode{alpha, SymBandMatrix::dense(neg_h), iter, g.lpNorm<Eigen::Infinity>()});
    }
    const Matrix neg_h = -model.hess(alpha).to_dense() + q;
    const Vector step = neg_h.llt().solve(g);
    double scale = 1.0;
    Vector next = alpha + step;
    double f_next = objective(next);
    for (int halvings = 0; !(f_next >= f) && halvings < 60; ++halvings) {
      scale *= 0.5;
      next = alpha + scale * step;
      f_next = objective(next);
    }
    alpha = next;
    f = f_next;
    g = gradient(alpha);
    ++iter;
  }
  const Matrix q_star = -model.hess(alpha).to_dense() + q;
  return GlmmMode{alpha, SymBandMatrix::dense(q_star), iter, g.lpNorm<Eigen::Infinity>()};
}

// ---------------------------------------------------------------------------
// Panel

PanelAr1Model::PanelAr1Model(PanelData data, Vector beta, Ar1Params latent)
    : data_(std::move(data)), beta_(std::move(beta)), latent_(latent) {
  require(data_.num_panels() > 0, "PanelAr1Model: no panels");
  for (std::size_t i = 0; i < data_.num_panels(); ++i) {
    require(data_.covariates[i].cols() == beta_.size(), "PanelAr1Model: covariate width must match beta");
    const auto len = static_cast<std::size_t>(data_.covariates[i].rows());
    if (data_.family == PanelFamily::kPoisson) {
      require(data_.counts.size() == data_.num_panels() && data_.counts[i].size() == len,
              "PanelAr1Model: counts must match covariate rows");
    } else {
      require(data_.responses.size() == data_.num_panels() && static_cast<std::size_t>(data_.responses[i].size()) == len,
              "PanelAr1Model: responses must match covariate rows");
    }
  }
  require(std::abs(latent_.phi) < 1.0 && latent_.sigma2 > 0.0, "PanelAr1Model: need |phi| < 1 and sigma2 > 0");
}

std::unique_ptr<MeasurementModel> PanelAr1Model::panel_model(std::size_t i) const {
  const Vector offsets = data_.covariates[i] * beta_;
  if (data_.family == PanelFamily::kPoisson) return std::make_unique<PoissonSsmModel>(data_.counts[i], offsets);
  return std::make_unique<GaussianMeasurementModel>(
      (data_.responses[i] - offsets).eval(),
      Vector::Constant(offsets.size(), data_.gaussian_variance));
}

GaussianPrior PanelAr1Model::panel_prior(std::size_t i) const {
  const Ar1Spec spec(latent_.mu, latent_.phi, latent_.sigma2, data_.length(i));
  auto [mean, precision] = ar1_precision(spec);
  return GaussianPrior(std::move(mean), std::move(precision));
}

}  // namespace ris
