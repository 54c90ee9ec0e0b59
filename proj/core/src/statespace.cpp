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

#include "ris/statespace.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Eigenvalues>

#include "ris/error.hpp"

namespace ris {

Ar1Spec::Ar1Spec(double mu, double phi, double sigma2, std::size_t length)
    : mu_(mu), phi_(phi), sigma2_(sigma2), length_(length) {
  require(std::abs(phi) < 1.0, "Ar1Spec: |phi| must be below 1");
  require(sigma2 > 0.0, "Ar1Spec: sigma2 must be positive");
  require(length > 0, "Ar1Spec: length must be positive");
  require(std::isfinite(mu), "Ar1Spec: mu must be finite");
}

Ar1Spec Ar1Spec::from_stationary_variance(double mu, double phi, double stationary_variance, std::size_t length) {
  return Ar1Spec(mu, phi, stationary_variance * (1.0 - phi * phi), length);
}

Matrix solve_discrete_lyapunov(const Matrix& a, const Matrix& s, double tol) {
  Matrix x = s;
  Matrix ak = a;
  for (int iter = 0; iter < 200; ++iter) {
    const Matrix update = ak * x * ak.transpose();
    x += update;
    if (update.cwiseAbs().maxCoeff() <= tol * std::max(1.0, x.cwiseAbs().maxCoeff())) {
      return 0.5 * (x + x.transpose());
    }
    ak = (ak * ak).eval();
  }
  throw Error(ErrorCode::kDiverged, "solve_discrete_lyapunov: no convergence");
}

BlockAr1Spec::BlockAr1Spec(Vector intercept, Matrix transition, Matrix innovation_cov, std::size_t length)
    : intercept_(std::move(intercept)),
      transition_(std::move(transition)),
      innovation_cov_(std::move(innovation_cov)),
      length_(length) {
  const Eigen::Index m = intercept_.size();
  require(m > 0 && length > 0, "BlockAr1Spec: empty state or path");
  require(transition_.rows() == m && transition_.cols() == m, "BlockAr1Spec: Phi must be m x m");
  require(innovation_cov_.rows() == m && innovation_cov_.cols() == m, "BlockAr1Spec: Sigma must be m x m");
  const double radius = Eigen::EigenSolver<Matrix>(transition_, false).eigenvalues().cwiseAbs().maxCoeff();
  require(radius < 1.0, "BlockAr1Spec: spectral radius of Phi must be below 1");
  Eigen::LLT<Matrix> llt(innovation_cov_);
  require(llt.info() == Eigen::Success && innovation_cov_.isApprox(innovation_cov_.transpose()),
          "BlockAr1Spec: Sigma must be symmetric positive definite");
  stationary_cov_ = solve_discrete_lyapunov(transition_, innovation_cov_);
  stationary_mean_ = (Matrix::Identity(m, m) - transition_).lu().solve(intercept_);
}

std::pair<Vector, SymBandMatrix> ar1_precision(const Ar1Spec& spec) {
  const std::size_t n = spec.length();
  const double inv = 1.0 / spec.sigma2();
  const double phi = spec.phi();
  Vector diag = Vector::Constant(static_cast<Eigen::Index>(n), (1.0 + phi * phi) * inv);
  Vector sub = Vector::Constant(static_cast<Eigen::Index>(n - 1), -phi * inv);
  if (n == 1) {
    diag[0] = (1.0 - phi * phi) * inv;
  } else {
    diag[0] = inv;
    diag[static_cast<Eigen::Index>(n - 1)] = inv;
  }
  return {Vector::Constant(static_cast<Eigen::Index>(n), spec.mu()), SymBandMatrix::tridiagonal(diag, sub)};
}

std::pair<Vector, SymBandMatrix> ar1_precision(const BlockAr1Spec& spec) {
  const std::size_t n = spec.length();
  const auto m = static_cast<Eigen::Index>(spec.state_dim());
  const Matrix& phi = spec.transition();
  const Matrix sigma_inv = spec.innovation_cov().llt().solve(Matrix::Identity(m, m));
  const Matrix stat_inv = spec.stationary_cov().llt().solve(Matrix::Identity(m, m));
  const Matrix coupling = phi.transpose() * sigma_inv * phi;
  const Matrix off = -sigma_inv * phi;  // block (t+1, t)

  SymBandMatrix q(n, static_cast<std::size_t>(m));
  auto put = [m](std::span<double> dst, const Matrix& src) {
    for (Eigen::Index i = 0; i < m; ++i)
      for (Eigen::Index j = 0; j < m; ++j) dst[static_cast<std::size_t>(i * m + j)] = src(i, j);
  };
  for (std::size_t t = 0; t < n; ++t) {
    Matrix block;
    if (n == 1) {
      block = stat_inv;
    } else if (t == 0) {
      block = stat_inv + coupling;
    } else if (t + 1 == n) {
      block = sigma_inv;
    } else {
      block = sigma_inv + coupling;
    }
    put(q.diag_block(t), 0.5 * (block + block.transpose()));
    if (t + 1 < n) put(q.sub_block(t), off);
  }
  Vector mean(static_cast<Eigen::Index>(n) * m);
  for (std::size_t t = 0; t < n; ++t) mean.segment(static_cast<Eigen::Index>(t) * m, m) = spec.stationary_mean();
  return {mean, q};
}

// ---------------------------------------------------------------------------
// SPDK

Vector SpdkFit::variances() const {
  require(c.block_size() == 1, "variances: scalar states only");
  return c.diagonal_entries().array().inverse().matrix();
}

Vector SpdkFit::pseudo_observations() const {
  require(c.block_size() == 1, "pseudo_observations: scalar states only");
  return (b.array() / c.diagonal_entries().array()).matrix();
}

namespace {

void refresh_expansion(const MeasurementModel& model, const Vector& alpha, SpdkFit& fit) {
  fit.c = model.hess(alpha);
  fit.c *= -1.0;
  fit.b = model.grad(alpha) + fit.c.multiply(alpha);
}

}  // namespace

SpdkFit spdk_fit(const MeasurementModel& model, const GaussianPrior& prior, double tol, int max_iter) {
  require(model.dim() == prior.dim(), "spdk_fit: model and prior dimensions differ");
  require(tol > 0.0 && max_iter > 0, "spdk_fit: tol and max_iter must be positive");
  const SymBandMatrix& q = prior.precision();
  const Vector q_mu = q.multiply(prior.mean());

  SpdkFit fit;
  fit.mode = prior.mean();
  for (int iter = 1; iter <= max_iter; ++iter) {
    refresh_expansion(model, fit.mode, fit);
    require(fit.c.dim() == q.dim(), "spdk_fit: Hessian layout does not conform to the prior");
    const BandCholesky chol = factorize_or_throw(fit.c + q, "C + Q");
    Vector next = chol.solve(fit.b + q_mu);
    const double change = (next - fit.mode).lpNorm<Eigen::Infinity>();
    fit.mode = std::move(next);
    fit.iterations = iter;
    if (!std::isfinite(change)) break;
    if (change <= tol) {
      fit.converged = true;
      refresh_expansion(model, fit.mode, fit);
      return fit;
    }
  }
  throw DivergedError<SpdkFit>("spdk_fit: no convergence in " + std::to_string(max_iter) + " iterations", fit);
}

Vector approximating_mean(const SpdkFit& fit, const GaussianPrior& prior) {
  const SymBandMatrix& q = prior.precision();
  const BandCholesky chol = factorize_or_throw(fit.c + q, "C + Q");
  return chol.solve(fit.b + q.multiply(prior.mean()));
}

GaussianProposal spdk_proposal(const SpdkFit& fit, const GaussianPrior& prior) {
  return GaussianProposal(approximating_mean(fit, prior), fit.c + prior.precision());
}

// ---------------------------------------------------------------------------
// Checking and imposing

bool SylvesterTrace::changes_sign() const {
  return std::any_of(sign.begin(), sign.end(), [](int s) { return s <= 0; });
}

SylvesterTrace sylvester_check(const SymBandMatrix& q, const Vector& v, double n, double scale) {
  require(q.block_size() == 1 && q.storage() == Storage::kBanded, "sylvester_check: scalar tridiagonal Q required");
  require(static_cast<std::size_t>(v.size()) == q.dim(), "sylvester_check: v length mismatch");
  require(scale > 0.0, "sylvester_check: scale must be positive");
  const std::size_t len = q.dim();
  const auto& diag = q.diag_storage();
  const auto& sub = q.sub_storage();

  SylvesterTrace trace;
  trace.log_abs_minor.reserve(len);
  trace.sign.reserve(len);
  // Lambda_t = a_t Lambda_{t-1} - b_{t-1}^2 Lambda_{t-2}, carried as
  // (prev, prev2) * exp(log_scale).
  double prev = 1.0;
  double prev2 = 0.0;
  double log_scale = 0.0;
  bool ok = true;
  for (std::size_t t = 0; t < len; ++t) {
    const double a = scale * (diag[t] - (n - 1.0) / v[static_cast<Eigen::Index>(t)]);
    const double b = t > 0 ? scale * sub[t - 1] : 0.0;
    const double cur = a * prev - b * b * prev2;
    const int s = (cur > 0.0) - (cur < 0.0);
    trace.sign.push_back(s);
    trace.log_abs_minor.push_back(s == 0 ? -std::numeric_limits<double>::infinity() : std::log(std::abs(cur)) + log_scale);
    if (s <= 0) ok = false;
    prev2 = prev;
    prev = cur;
    const double mag = std::max(std::abs(prev), std::abs(prev2));
    if (mag > 0.0 && std::isfinite(mag)) {
      prev /= mag;
      prev2 /= mag;
      log_scale += std::log(mag);
    }
  }
  trace.positive_definite = ok;
  return trace;
}

SylvesterTrace sylvester_check(const Ar1Spec& spec, const Vector& v, double n) {
  return sylvester_check(ar1_precision(spec).second, v, n, spec.sigma2());
}

double constant_variance_bound(const Ar1Spec& spec, double n) {
  require(n > 1.0, "constant_variance_bound: n must exceed 1");
  const double abs_phi = std::abs(spec.phi());
  const double base = (n - 1.0) * spec.stationary_variance();
  if (spec.phi() == 0.0) return base + 1e-5;
  return base * (1.0 + abs_phi) / (1.0 - abs_phi);
}

ScalarImposition impose_scalar(const SpdkFit& fit, const Ar1Spec& spec, double n, double eps_inflate) {
  require(eps_inflate > 0.0, "impose_scalar: eps must be positive");
  require(fit.c.block_size() == 1 && fit.c.dim() == spec.length(), "impose_scalar: fit does not match the AR(1) spec");
  const auto [mean, q] = ar1_precision(spec);
  const double bound = constant_variance_bound(spec, n);
  const Vector v0 = fit.variances();
  Vector v = v0;

  int steps = 0;
  constexpr int kMaxSteps = 1'000'000;
  while (!sylvester_check(q, v, n, spec.sigma2()).positive_definite) {
    require(steps < kMaxSteps, "impose_scalar: inflation did not terminate");
    for (Eigen::Index t = 0; t < v.size(); ++t)
      if (v[t] < bound) v[t] *= 1.0 + eps_inflate;
    ++steps;
  }

  ScalarImposition out;
  out.steps = steps;
  out.bound = bound;
  out.fit = fit;
  if (steps > 0) {
    const Vector y_hat = fit.pseudo_observations();
    out.fit.c = SymBandMatrix::diagonal(v.array().inverse().matrix());
    out.fit.b = (y_hat.array() / v.array()).matrix();
    const GaussianPrior prior(mean, q);
    out.fit.mode = approximating_mean(out.fit, prior);
  }
  return out;
}

BlockImposition impose_block(const SymBandMatrix& c, const SymBandMatrix& q, double n, double eps_inflate) {
  require(c.dim() == q.dim(), "impose_block: dimension mismatch");
  require(eps_inflate > 0.0, "impose_block: eps must be positive");
  BlockImposition out{c, 0, 1.0};
  constexpr int kMaxSteps = 100'000;
  while (true) {
    const SymBandMatrix m = q - (n - 1.0) * out.c_star;
    if (smallest_eigenvalue(m) > 0.0) return out;
    require(out.steps < kMaxSteps, "impose_block: shrinking did not terminate");
    out.c_star *= 1.0 / (1.0 + eps_inflate);
    out.shrink /= 1.0 + eps_inflate;
    ++out.steps;
  }
}

SpdkFit apply_imposition(const SpdkFit& fit, const BlockImposition& imposition, const GaussianPrior& prior) {
  SpdkFit out = fit;
  if (imposition.steps == 0) return out;
  // C* = s C and y^ = C^{-1} B fixed, so B* = s B.
  out.c = imposition.c_star;
  out.b = imposition.shrink * fit.b;
  out.mode = approximating_mean(out, prior);
  return out;
}

MixtureProposal build_ssm_mixture(const SpdkFit& original, const SpdkFit& imposed, const GaussianPrior& prior,
                                  double pi) {
  GaussianProposal fitted = spdk_proposal(original, prior);
  GaussianProposal heavy = spdk_proposal(imposed, prior);
  return MixtureProposal(pi, std::move(heavy), std::move(fitted));
}

}  // namespace ris
