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

#include "ris/proposal.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "ris/error.hpp"

namespace ris {

double log_add_exp(double a, double b) noexcept {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

// ---------------------------------------------------------------------------

GaussianProposal::GaussianProposal(Vector mean, SymBandMatrix precision)
    : mean_(std::move(mean)), precision_(std::move(precision)) {
  require(static_cast<std::size_t>(mean_.size()) == precision_.dim(), "GaussianProposal: dimension mismatch");
  chol_ = factorize_or_throw(precision_, "GaussianProposal precision");
}

Vector GaussianProposal::sample(Rng& rng) const { return sample_gaussian(mean_, chol_, rng); }

double GaussianProposal::log_density(const Vector& x) const { return ris::log_density(x, mean_, chol_); }

// ---------------------------------------------------------------------------

StudentTProposal::StudentTProposal(Vector location, SymBandMatrix precision, double nu)
    : location_(std::move(location)), precision_(std::move(precision)), nu_(nu) {
  require(static_cast<std::size_t>(location_.size()) == precision_.dim(), "StudentTProposal: dimension mismatch");
  require(nu > 0.0, "StudentTProposal: nu must be positive");
  chol_ = factorize_or_throw(precision_, "StudentTProposal precision");
  const double d = static_cast<double>(location_.size());
  log_norm_ = std::lgamma(0.5 * (nu_ + d)) - std::lgamma(0.5 * nu_) - 0.5 * d * std::log(nu_ * std::numbers::pi) +
              0.5 * chol_.log_det();
}

Vector StudentTProposal::sample(Rng& rng) const {
  Vector z(location_.size());
  fill_standard_normal(rng, {z.data(), static_cast<std::size_t>(z.size())});
  double chi2 = 0.0;
  if (nu_ == std::floor(nu_) && nu_ <= 64.0) {
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int i = 0; i < static_cast<int>(nu_); ++i) {
      const double e = normal(rng);
      chi2 += e * e;
    }
  } else {
    chi2 = std::chi_squared_distribution<double>(nu_)(rng);
  }
  return location_ + chol_.solve_upper(z) * std::sqrt(nu_ / chi2);
}

double StudentTProposal::log_density(const Vector& x) const {
  const Vector u = chol_.multiply_upper(x - location_);
  const double d = static_cast<double>(location_.size());
  return log_norm_ - 0.5 * (nu_ + d) * std::log1p(u.squaredNorm() / nu_);
}

// ---------------------------------------------------------------------------

MomentOrder::MomentOrder(double n_, double eps_, double delta_) : n(n_), eps(eps_), delta(delta_) {
  require(n >= 1.0, "MomentOrder: n must be at least 1");
  require(eps > 0.0 && eps < 1.0, "MomentOrder: eps must lie in (0, 1)");
  require(delta > 0.0, "MomentOrder: delta must be positive");
}

MixtureProposal::MixtureProposal(double pi, GaussianProposal heavy, GaussianProposal fitted)
    : pi_(pi), heavy_(std::move(heavy)), fitted_(std::move(fitted)) {
  require(pi > 0.0 && pi < 1.0, "MixtureProposal: pi must lie in (0, 1)");
  require(heavy_.dim() == fitted_.dim(), "MixtureProposal: component dimensions differ");
}

std::pair<Vector, int> MixtureProposal::sample_with_component(Rng& rng) const {
  const double u = uniform01(rng);
  if (u < pi_) return {heavy_.sample(rng), 0};
  return {fitted_.sample(rng), 1};
}

Vector MixtureProposal::sample(Rng& rng) const { return sample_with_component(rng).first; }

double MixtureProposal::log_density(const Vector& x) const {
  return log_add_exp(std::log(pi_) + heavy_.log_density(x), std::log1p(-pi_) + fitted_.log_density(x));
}

std::vector<Vector> sample_mixture(const MixtureProposal& g, Rng& rng, std::size_t count) {
  std::vector<Vector> out;
  out.reserve(count);
  for (std::size_t s = 0; s < count; ++s) out.push_back(g.sample(rng));
  return out;
}

// ---------------------------------------------------------------------------

bool check_moment_condition(const SymBandMatrix& q_star, const SymBandMatrix& q, const MomentOrder& order) {
  require(q_star.dim() == q.dim(), "check_moment_condition: dimension mismatch");
  // Q* - n (Q* - Q) = (1 - n) Q* + n Q
  const SymBandMatrix m = (1.0 - order.n) * q_star + order.n * q;
  return factorize(m).success;
}

double clamp_eigenvalue(double lambda, const MomentOrder& order, Clamp clamp) {
  if (order.n <= 1.0) return lambda;
  if (clamp == Clamp::kHard) {
    return lambda < 1.0 / (order.n - 1.0) ? lambda : order.tau();
  }
  const double tau = order.tau();
  const double delta = order.delta;
  if (lambda < tau - delta) return lambda;
  if (lambda >= tau) return tau;
  // Cubic through (tau-delta, tau-delta) with unit slope, flat at tau. Written
  // around tau: the monomial coefficients are O(1/delta^2) and cancel badly.
  const double u = lambda - tau;
  return tau - 2.0 * u * u / delta - u * u * u / (delta * delta);
}

SymBandMatrix modify_precision(const SymBandMatrix& q_star, const SymBandMatrix& q, const MomentOrder& order,
                               Clamp clamp) {
  require(q_star.dim() == q.dim(), "modify_precision: dimension mismatch");
  if (order.n <= 1.0) return q_star;
  if (clamp == Clamp::kHard && check_moment_condition(q_star, q, order)) return q_star;

  const BandCholesky chol = factorize_or_throw(order.n * q, "n Q");
  const Matrix a = chol.lower_dense();
  const Matrix qs = q_star.to_dense();
  // M = A^{-1} Q* A^{-T}
  const auto a_tri = a.triangularView<Eigen::Lower>();
  Matrix m = a_tri.solve(qs);
  m = a_tri.solve(m.transpose()).eval();
  m = 0.5 * (m + m.transpose()).eval();

  Eigen::SelfAdjointEigenSolver<Matrix> eig(m);
  if (eig.info() != Eigen::Success) {
    throw Error(ErrorCode::kInvalidInput, "modify_precision: eigendecomposition failed");
  }
  Vector lambda = eig.eigenvalues();
  bool changed = false;
  for (Eigen::Index j = 0; j < lambda.size(); ++j) {
    const double clamped = clamp_eigenvalue(lambda[j], order, clamp);
    if (clamped != lambda[j]) changed = true;
    lambda[j] = clamped;
  }
  if (!changed) return q_star;

  const Matrix av = a * eig.eigenvectors();
  Matrix q_tilde = av * lambda.asDiagonal() * av.transpose();
  q_tilde = 0.5 * (q_tilde + q_tilde.transpose()).eval();
  return SymBandMatrix::dense(q_tilde);
}

MixtureProposal build_mixture(const Vector& mean, const SymBandMatrix& q_star, const SymBandMatrix& q,
                              const MomentOrder& order, double pi, Clamp clamp) {
  SymBandMatrix q_tilde = modify_precision(q_star, q, order, clamp);
  return MixtureProposal(pi, GaussianProposal(mean, std::move(q_tilde)), GaussianProposal(mean, q_star));
}

}  // namespace ris
