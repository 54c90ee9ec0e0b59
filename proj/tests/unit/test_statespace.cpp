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

#include <cmath>
#include <vector>

#include <doctest.h>

#include "experiments.hpp"
#include "oracles.hpp"
#include "ris/error.hpp"
#include "ris/statespace.hpp"

using namespace ris;

namespace {

SpdkFit constant_variance_fit(std::size_t length, double v) {
  SpdkFit fit;
  fit.c = SymBandMatrix::diagonal(Vector::Constant(static_cast<Eigen::Index>(length), 1.0 / v));
  fit.b = Vector::Zero(static_cast<Eigen::Index>(length));
  fit.mode = fit.b;
  fit.converged = true;
  return fit;
}

Matrix dense_condition_matrix(const SymBandMatrix& q, const Vector& v, double n) {
  Matrix m = q.to_dense();
  for (Eigen::Index t = 0; t < v.size(); ++t) m(t, t) -= (n - 1.0) / v[t];
  return m;
}

// Dense covariance of a stationary vector AR(1): Cov(a_t, a_s) = Phi^{t-s} Sigma_alpha for t >= s.
Matrix block_ar1_covariance(const BlockAr1Spec& spec) {
  const auto m = static_cast<Eigen::Index>(spec.state_dim());
  const auto len = static_cast<Eigen::Index>(spec.length());
  Matrix cov(m * len, m * len);
  for (Eigen::Index t = 0; t < len; ++t) {
    Matrix power = Matrix::Identity(m, m);
    for (Eigen::Index s = t; s >= 0; --s) {
      const Matrix block = power * spec.stationary_cov();
      cov.block(t * m, s * m, m, m) = block;
      cov.block(s * m, t * m, m, m) = block.transpose();
      power = power * spec.transition();
    }
  }
  return cov;
}

}  // namespace

TEST_SUITE("statespace") {

TEST_CASE("scalar AR(1) precision for two periods") {
  const auto [mean, q] = ar1_precision(Ar1Spec(0.0, 0.5, 1.0, 2));
  Matrix expected(2, 2);
  expected << 1.0, -0.5, -0.5, 1.0;
  CHECK((q.to_dense() - expected).norm() <= 1e-15);
  // Inverse of the stationary covariance [[4/3, 2/3], [2/3, 4/3]].
  CHECK((q.to_dense() * oracle::ar1_covariance(0.5, 1.0, 2) - Matrix::Identity(2, 2)).norm() <= 1e-14);
  CHECK(mean.norm() == 0.0);
}

TEST_CASE("independent AR(1) precision is a scaled identity") {
  const auto [mean, q] = ar1_precision(Ar1Spec(1.5, 0.0, 0.25, 7));
  CHECK((q.to_dense() - 4.0 * Matrix::Identity(7, 7)).norm() <= 1e-15);
  CHECK((mean.array() == 1.5).all());
}

TEST_CASE("AR(1) precision inverts the stationary covariance") {
  for (double phi : {-0.9, -0.3, 0.2, 0.8, 0.975}) {
    for (std::size_t len : {1u, 5u, 30u}) {
      const double sigma2 = 0.7;
      const auto [mean, q] = ar1_precision(Ar1Spec(0.0, phi, sigma2, len));
      const Matrix prod = q.to_dense() * oracle::ar1_covariance(phi, sigma2, len);
      CHECK((prod - Matrix::Identity(prod.rows(), prod.cols())).cwiseAbs().maxCoeff() <= 1e-8);
    }
  }
}

TEST_CASE("AR(1) spec rejects non-stationary coefficients") {
  CHECK_THROWS_AS(Ar1Spec(0.0, 1.0, 1.0, 5), Error);
  CHECK_THROWS_AS(Ar1Spec(0.0, -1.2, 1.0, 5), Error);
  CHECK_THROWS_AS(Ar1Spec(0.0, 0.5, 0.0, 5), Error);
  const auto s = Ar1Spec::from_stationary_variance(0.0, 0.975, 0.5, 10);
  CHECK(s.stationary_variance() == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("block AR(1): Lyapunov solution and precision") {
  Matrix phi(2, 2), sigma(2, 2);
  phi << 0.6, 0.2, -0.1, 0.5;
  sigma << 1.0, 0.3, 0.3, 0.5;
  Vector d(2);
  d << 0.4, -0.2;
  const BlockAr1Spec spec(d, phi, sigma, 8);
  const Matrix& s_alpha = spec.stationary_cov();
  CHECK((s_alpha - (phi * s_alpha * phi.transpose() + sigma)).cwiseAbs().maxCoeff() <= 1e-10);
  CHECK((spec.stationary_mean() - (Matrix::Identity(2, 2) - phi).inverse() * d).norm() <= 1e-12);

  const auto [mean, q] = ar1_precision(spec);
  CHECK(q.block_size() == 2);
  CHECK(q.num_blocks() == 8);
  const Matrix prod = q.to_dense() * block_ar1_covariance(spec);
  CHECK((prod - Matrix::Identity(prod.rows(), prod.cols())).cwiseAbs().maxCoeff() <= 1e-8);
  CHECK((mean.segment(14, 2) - spec.stationary_mean()).norm() <= 1e-14);
}

TEST_CASE("block AR(1) rejects an explosive transition") {
  Matrix phi = 1.1 * Matrix::Identity(2, 2);
  CHECK_THROWS_AS(BlockAr1Spec(Vector::Zero(2), phi, Matrix::Identity(2, 2), 4), Error);
}

TEST_CASE("scalar block AR(1) reduces to the scalar precision") {
  const BlockAr1Spec spec(Vector::Zero(1), Matrix::Constant(1, 1, 0.7), Matrix::Constant(1, 1, 0.4), 12);
  const auto block = ar1_precision(spec).second.to_dense();
  const auto scalar = ar1_precision(Ar1Spec(0.0, 0.7, 0.4, 12)).second.to_dense();
  CHECK((block - scalar).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("approximating model at the fixed point of a constant-rate series") {
  const double beta = std::log(3.0);
  const PoissonSsmModel model(std::vector<int>(40, 3), beta);
  const auto [mean, q] = ar1_precision(Ar1Spec(0.0, 0.8, 0.36, 40));
  const GaussianPrior prior(mean, q);
  const auto fit = spdk_fit(model, prior);
  CHECK(fit.converged);
  CHECK(fit.mode.lpNorm<Eigen::Infinity>() <= 1e-12);
  CHECK((fit.c.diagonal_entries().array() - 3.0).abs().maxCoeff() <= 1e-12);
}

TEST_CASE("Gaussian measurement: one Newton step gives the exact conditional") {
  Rng rng(1);
  const std::size_t len = 25;
  Vector y(static_cast<Eigen::Index>(len)), r(static_cast<Eigen::Index>(len));
  for (Eigen::Index t = 0; t < y.size(); ++t) {
    y[t] = oracle::uniform(rng, -2.0, 2.0);
    r[t] = oracle::uniform(rng, 0.3, 2.0);
  }
  const GaussianMeasurementModel model(y, r);
  const auto [mean, q] = ar1_precision(Ar1Spec(0.5, 0.7, 0.5, len));
  const GaussianPrior prior(mean, q);
  const Matrix post_prec = q.to_dense() + Matrix(r.array().inverse().matrix().asDiagonal());
  const Vector post_mean = post_prec.ldlt().solve(Vector(y.array() / r.array()) + q.to_dense() * mean);

  try {
    (void)spdk_fit(model, prior, 1e-10, 1);
    FAIL("a single iteration cannot confirm convergence");
  } catch (const DivergedError<SpdkFit>& e) {
    CHECK((e.last().mode - post_mean).lpNorm<Eigen::Infinity>() <= 1e-10);
  }
  const auto fit = spdk_fit(model, prior, 1e-10);
  CHECK(fit.iterations == 2);
  const auto g = spdk_proposal(fit, prior);
  CHECK((g.mean() - post_mean).lpNorm<Eigen::Infinity>() <= 1e-10);
  CHECK((g.precision().to_dense() - post_prec).norm() <= 1e-10 * post_prec.norm());
}

TEST_CASE("approximating model on a simulated series converges") {
  const auto data = harness::simulate_poisson_ssm(-1.4, 0.8, 0.18, 500, 11);
  const PoissonSsmModel model(data.y[0], -1.4);
  const auto [mean, q] = ar1_precision(Ar1Spec(0.0, 0.8, 0.18, 500));
  const GaussianPrior prior(mean, q);
  const auto fit = spdk_fit(model, prior, 1e-8, 100);
  CHECK(fit.converged);
  CHECK(fit.iterations <= 100);
  // Fixed point: mode = (C + Q)^{-1} (B + Q mu).
  CHECK((approximating_mean(fit, prior) - fit.mode).lpNorm<Eigen::Infinity>() <= 1e-8);
  CHECK((fit.variances().array() * fit.c.diagonal_entries().array() - 1.0).abs().maxCoeff() <= 1e-14);
}

TEST_CASE("approximating model iteration limit is reported") {
  const auto data = harness::simulate_poisson_ssm(-1.4, 0.8, 0.18, 100, 12);
  const PoissonSsmModel model(data.y[0], -1.4);
  const auto [mean, q] = ar1_precision(Ar1Spec(0.0, 0.8, 0.18, 100));
  try {
    (void)spdk_fit(model, GaussianPrior(mean, q), 1e-12, 1);
    FAIL("expected Diverged");
  } catch (const DivergedError<SpdkFit>& e) {
    CHECK(e.code() == ErrorCode::kDiverged);
    CHECK_FALSE(e.last().converged);
  }
}

TEST_CASE("Sylvester check: two-period hand evaluation") {
  const Ar1Spec spec(0.0, 0.5, 1.0, 2);
  const auto pass = sylvester_check(spec, Vector::Constant(2, 4.0), 2.0);
  CHECK(pass.positive_definite);
  CHECK(std::exp(pass.log_abs_minor[0]) == doctest::Approx(0.75).epsilon(1e-14));
  CHECK(std::exp(pass.log_abs_minor[1]) == doctest::Approx(0.3125).epsilon(1e-14));
  CHECK_FALSE(pass.changes_sign());

  const auto fail = sylvester_check(spec, Vector::Constant(2, 1.5), 2.0);
  CHECK_FALSE(fail.positive_definite);
  CHECK(std::exp(fail.log_abs_minor[0]) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(fail.sign[1] == -1);
  CHECK(std::exp(fail.log_abs_minor[1]) == doctest::Approx(0.25 - 1.0 / 9.0).epsilon(1e-13));
}

TEST_CASE("Sylvester check with n = 1 always passes") {
  Rng rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t len = oracle::uniform_int(rng, 1, 40);
    const Ar1Spec spec(0.0, oracle::uniform(rng, -0.95, 0.95), oracle::uniform(rng, 0.1, 2.0), len);
    Vector v(static_cast<Eigen::Index>(len));
    for (Eigen::Index t = 0; t < v.size(); ++t) v[t] = oracle::uniform(rng, 0.01, 1.0);
    CHECK(sylvester_check(spec, v, 1.0).positive_definite);
  }
}

TEST_CASE("Sylvester check agrees with dense eigenvalue positivity") {
  Rng rng(3);
  int disagreements = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t len = oracle::uniform_int(rng, 1, 50);
    const Ar1Spec spec(0.0, oracle::uniform(rng, -0.98, 0.98), oracle::uniform(rng, 0.05, 2.0), len);
    const double n = trial % 2 == 0 ? 2.0 : 3.0;
    const auto q = ar1_precision(spec).second;
    const double scale = constant_variance_bound(spec, n);
    Vector v(static_cast<Eigen::Index>(len));
    for (Eigen::Index t = 0; t < v.size(); ++t) v[t] = scale * std::exp(oracle::uniform(rng, -1.0, 0.6));
    const bool dense = oracle::dense_positive_definite(dense_condition_matrix(q, v, n));
    if (sylvester_check(spec, v, n).positive_definite != dense) ++disagreements;
  }
  CHECK(disagreements == 0);
}

TEST_CASE("Sylvester trace matches dense leading minors") {
  Rng rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t len = oracle::uniform_int(rng, 2, 12);
    const Ar1Spec spec(0.0, oracle::uniform(rng, -0.95, 0.95), oracle::uniform(rng, 0.1, 1.5), len);
    const auto q = ar1_precision(spec).second;
    const double bound = constant_variance_bound(spec, 2.0);
    Vector v(static_cast<Eigen::Index>(len));
    for (Eigen::Index t = 0; t < v.size(); ++t) v[t] = bound * std::exp(oracle::uniform(rng, -1.5, 0.5));
    const auto trace = sylvester_check(spec, v, 2.0);
    const auto minors = oracle::leading_minors(spec.sigma2() * dense_condition_matrix(q, v, 2.0));
    for (std::size_t t = 0; t < len; ++t) {
      CHECK(trace.sign[t] == (minors[t] > 0.0 ? 1 : -1));
      CHECK(trace.log_abs_minor[t] == doctest::Approx(std::log(std::abs(minors[t]))).epsilon(1e-8));
    }
  }
}

TEST_CASE("constant-variance bound values") {
  const double near = constant_variance_bound(Ar1Spec::from_stationary_variance(0.0, 0.975, 0.5, 10), 2.0);
  // 0.5 * 1.975 / 0.025 is 39.5 in exact arithmetic; the double quotient lands one ulp-scale step below.
  CHECK(near == doctest::Approx(39.5).epsilon(1e-12));
  CHECK(constant_variance_bound(Ar1Spec::from_stationary_variance(0.0, 0.6, 0.5, 10), 2.0) == 2.0);
  CHECK(constant_variance_bound(Ar1Spec::from_stationary_variance(0.0, 0.0, 0.5, 10), 2.0) == 0.5 + 1e-5);
  CHECK(constant_variance_bound(Ar1Spec::from_stationary_variance(0.0, -0.6, 0.5, 10), 3.0) == 4.0);
  CHECK_THROWS_AS((void)constant_variance_bound(Ar1Spec(0.0, 0.5, 1.0, 3), 1.0), Error);
}

TEST_CASE("constant-variance bound is sharp for long series") {
  for (double phi : {0.3, 0.6, 0.9, 0.975}) {
    for (double s2a : {0.5, 1.0}) {
      const auto spec = Ar1Spec::from_stationary_variance(0.0, phi, s2a, 500);
      const double bound = constant_variance_bound(spec, 2.0);
      CHECK(sylvester_check(spec, Vector::Constant(500, bound), 2.0).positive_definite);
      CHECK_FALSE(sylvester_check(spec, Vector::Constant(500, 0.95 * bound), 2.0).positive_definite);
    }
  }
}

TEST_CASE("determinant paths: crossings below the bound, decay above it") {
  const auto spec = Ar1Spec::from_stationary_variance(0.0, 0.975, 0.5, 500);
  for (double v : {5.0, 10.0, 25.0}) CHECK(sylvester_check(spec, Vector::Constant(500, v), 2.0).changes_sign());
  const auto above = sylvester_check(spec, Vector::Constant(500, 40.0), 2.0);
  CHECK_FALSE(above.changes_sign());
  CHECK(above.positive_definite);
}

TEST_CASE("scalar imposition leaves a passing fit alone") {
  const auto spec = Ar1Spec::from_stationary_variance(0.0, 0.6, 0.5, 50);
  const auto fit = constant_variance_fit(50, 3.0);
  const auto out = impose_scalar(fit, spec, 2.0);
  CHECK(out.steps == 0);
  CHECK((out.fit.c.diagonal_entries() - fit.c.diagonal_entries()).norm() == 0.0);
}

TEST_CASE("scalar imposition from half the bound takes the closed-form step count") {
  const auto spec = Ar1Spec::from_stationary_variance(0.0, 0.6, 0.5, 500);
  const double eps = 0.05;
  const double bound = constant_variance_bound(spec, 2.0);
  const auto out = impose_scalar(constant_variance_fit(500, bound / 2.0), spec, 2.0, eps);
  CHECK(out.steps == static_cast<int>(std::ceil(std::log(2.0) / std::log(1.0 + eps))));
  const Vector v = out.fit.variances();
  CHECK(v.minCoeff() >= bound);
  CHECK(v.maxCoeff() < bound * (1.0 + eps));
  CHECK(sylvester_check(spec, v, 2.0).positive_definite);
}

TEST_CASE("scalar imposition repairs the crossing determinant path") {
  const auto spec = Ar1Spec::from_stationary_variance(0.0, 0.975, 0.5, 500);
  const auto fit = constant_variance_fit(500, 25.0);
  CHECK(sylvester_check(spec, fit.variances(), 2.0).changes_sign());
  const auto out = impose_scalar(fit, spec, 2.0);
  CHECK(out.steps > 0);
  CHECK(sylvester_check(spec, out.fit.variances(), 2.0).positive_definite);
  const auto q = ar1_precision(spec).second;
  CHECK(factorize(q - out.fit.c).success);
}

TEST_CASE("block imposition: zero C needs no shrinking") {
  const auto q = ar1_precision(Ar1Spec(0.0, 0.5, 1.0, 6)).second;
  const auto out = impose_block(SymBandMatrix::diagonal(Vector::Zero(6)), q, 2.0);
  CHECK(out.steps == 0);
  CHECK(out.shrink == 1.0);
}

TEST_CASE("block imposition: closed-form step count") {
  const double eps = 0.05;
  const auto out = impose_block(3.0 * SymBandMatrix::identity(4), 2.0 * SymBandMatrix::identity(4), 2.0, eps);
  CHECK(out.steps == static_cast<int>(std::ceil(std::log(1.5) / std::log(1.0 + eps))));
  CHECK(smallest_eigenvalue(2.0 * SymBandMatrix::identity(4) - out.c_star) > 0.0);
  CHECK(out.shrink == doctest::Approx(std::pow(1.0 + eps, -out.steps)).epsilon(1e-14));
}

TEST_CASE("block imposition agrees with the scalar verdict") {
  Rng rng(5);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t len = oracle::uniform_int(rng, 2, 40);
    const Ar1Spec spec(0.0, oracle::uniform(rng, -0.95, 0.95), oracle::uniform(rng, 0.1, 1.0), len);
    const double bound = constant_variance_bound(spec, 2.0);
    Vector v(static_cast<Eigen::Index>(len));
    for (Eigen::Index t = 0; t < v.size(); ++t) v[t] = bound * std::exp(oracle::uniform(rng, -1.0, 0.5));
    const auto fit = constant_variance_fit(len, 1.0);
    SpdkFit varied = fit;
    varied.c = SymBandMatrix::diagonal(v.array().inverse().matrix());
    const auto q = ar1_precision(spec).second;
    const bool scalar_ok = impose_scalar(varied, spec, 2.0).steps == 0;
    const auto block = impose_block(varied.c, q, 2.0);
    CHECK((block.steps == 0) == scalar_ok);
    CHECK(factorize(q - block.c_star).success);
  }
}

TEST_CASE("block imposition on a two-dimensional state") {
  Matrix phi(2, 2), sigma(2, 2);
  phi << 0.9, 0.05, 0.0, 0.8;
  sigma << 0.2, 0.05, 0.05, 0.1;
  const BlockAr1Spec spec(Vector::Zero(2), phi, sigma, 30);
  const auto q = ar1_precision(spec).second;
  SymBandMatrix c(30, 2);
  for (std::size_t t = 0; t < 30; ++t) {
    auto blk = c.diag_block(t);
    blk[0] = 4.0;
    blk[1] = blk[2] = 0.5;
    blk[3] = 3.0;
  }
  const auto out = impose_block(c, q, 2.0);
  CHECK(out.steps > 0);
  CHECK(oracle::dense_positive_definite((q - out.c_star).to_dense()));
  // One fewer step would still fail.
  const auto previous = (1.0 + kDefaultInflation) * out.c_star;
  CHECK_FALSE(oracle::dense_positive_definite((q - previous).to_dense()));
}

TEST_CASE("mixture from an unchanged fit is degenerate") {
  const auto data = harness::simulate_poisson_ssm(-1.4, 0.8, 0.18, 60, 3);
  const PoissonSsmModel model(data.y[0], -1.4);
  const auto [mean, q] = ar1_precision(Ar1Spec(0.0, 0.8, 0.18, 60));
  const GaussianPrior prior(mean, q);
  const auto fit = spdk_fit(model, prior);
  const auto g = build_ssm_mixture(fit, fit, prior);
  CHECK(g.pi() == 0.1);
  CHECK((g.heavy().mean() - g.fitted().mean()).norm() == 0.0);
  CHECK((g.heavy().precision().to_dense() - g.fitted().precision().to_dense()).norm() == 0.0);
}

TEST_CASE("mixture heavy component satisfies the second-moment condition at the extreme parameters") {
  const auto data = harness::simulate_poisson_ssm(-1.4, 0.8, 0.18, 500, 21);
  const PoissonSsmModel model(data.y[0], -1.4);
  const Ar1Spec spec(0.0, 0.99, 1.0, 500);
  const auto [mean, q] = ar1_precision(spec);
  const GaussianPrior prior(mean, q);
  const auto fit = spdk_fit(model, prior);
  CHECK_FALSE(sylvester_check(spec, fit.variances(), 2.0).positive_definite);
  const auto imposed = impose_scalar(fit, spec, 2.0);
  const auto g = build_ssm_mixture(fit, imposed.fit, prior);
  const SymBandMatrix q_tilde = g.heavy().precision();
  CHECK(factorize(2.0 * q - q_tilde).success);
  CHECK_FALSE(factorize(2.0 * q - g.fitted().precision()).success);
  // The heavy mean is the imposed model's own posterior mean.
  CHECK((g.heavy().mean() - approximating_mean(imposed.fit, prior)).norm() <= 1e-12);
  // Pseudo-observations survive the inflation.
  CHECK((imposed.fit.pseudo_observations() - fit.pseudo_observations()).cwiseAbs().maxCoeff() <= 1e-10);
}

}  // TEST_SUITE
