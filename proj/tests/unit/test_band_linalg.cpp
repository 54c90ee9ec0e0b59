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
#include <limits>

#include <doctest.h>

#include "oracles.hpp"
#include "ris/band_linalg.hpp"
#include "ris/error.hpp"
#include "ris/statespace.hpp"

using namespace ris;

TEST_SUITE("band_linalg") {

TEST_CASE("identity factorizes to the identity with zero log-determinant") {
  const auto chol = factorize(SymBandMatrix::identity(3));
  REQUIRE(chol.success);
  CHECK(chol.log_det() == 0.0);
  CHECK((chol.lower_dense() - Matrix::Identity(3, 3)).norm() == 0.0);
}

TEST_CASE("2x2 AR(1) precision has determinant 0.75") {
  Vector diag(2), sub(1);
  diag << 1.0, 1.0;
  sub << -0.5;
  const auto chol = factorize(SymBandMatrix::tridiagonal(diag, sub));
  REQUIRE(chol.success);
  CHECK(std::exp(chol.log_det()) == doctest::Approx(0.75).epsilon(1e-14));
}

TEST_CASE("indefinite 2x2 fails at the second block row") {
  Vector diag(2), sub(1);
  diag << 1.0, 1.0;
  sub << 2.0;
  const auto a = SymBandMatrix::tridiagonal(diag, sub);
  CHECK(oracle::eigenvalues(a.to_dense()).minCoeff() == doctest::Approx(-1.0));
  const auto chol = factorize(a);
  CHECK_FALSE(chol.success);
  CHECK(chol.failed_block == 2);
  CHECK(chol.failed_row == 2);
  CHECK_THROWS_AS((void)factorize_or_throw(a), Error);
}

TEST_CASE("non-finite entries are rejected") {
  auto a = SymBandMatrix::identity(3);
  a.set(1, 1, std::numeric_limits<double>::quiet_NaN());
  try {
    (void)factorize(a);
    FAIL("expected InvalidInput");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kInvalidInput);
  }
}

TEST_CASE("layout invariants and symmetry") {
  Rng rng(11);
  for (std::size_t m : {1u, 2u, 3u}) {
    const auto a = oracle::random_band(rng, 5, m, 0.0);
    CHECK(a.diag_storage().size() == 5 * m * m);
    CHECK(a.sub_storage().size() == 4 * m * m);
    const Matrix d = a.to_dense();
    CHECK((d - d.transpose()).norm() == 0.0);
    CHECK(d.rows() == static_cast<Eigen::Index>(5 * m));
  }
}

TEST_CASE("factorization success matches dense eigenvalue positivity") {
  Rng rng(2024);
  int disagreements = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t m = oracle::uniform_int(rng, 1, 3);
    const std::size_t blocks = oracle::uniform_int(rng, 1, 60 / m);
    // Shifts around the spectral edge give both verdicts.
    const double shift = oracle::uniform(rng, 0.0, 6.0);
    const auto a = oracle::random_band(rng, blocks, m, shift);
    if (factorize(a).success != oracle::dense_positive_definite(a.to_dense())) ++disagreements;
  }
  CHECK(disagreements == 0);
}

TEST_CASE("reconstruction and log-determinant agree with dense oracles") {
  Rng rng(7);
  int checked = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t m = oracle::uniform_int(rng, 1, 4);
    const std::size_t blocks = oracle::uniform_int(rng, 1, 15);
    const auto a = oracle::random_band(rng, blocks, m, 8.0);
    const auto chol = factorize(a);
    if (!chol.success) continue;
    ++checked;
    const Matrix dense = a.to_dense();
    const Matrix l = chol.lower_dense();
    CHECK((l * l.transpose() - dense).norm() <= 1e-10 * dense.norm());
    const double ref = oracle::dense_log_det(dense);
    CHECK(std::abs(chol.log_det() - ref) <= 1e-8 * std::max(1.0, std::abs(ref)));

    Vector b(static_cast<Eigen::Index>(a.dim()));
    for (Eigen::Index i = 0; i < b.size(); ++i) b[i] = oracle::uniform(rng, -1.0, 1.0);
    const Vector x = chol.solve(b);
    CHECK((dense * x - b).norm() <= 1e-9 * b.norm() * dense.norm());
    CHECK((a.multiply(x) - dense * x).norm() <= 1e-12 * (dense * x).norm() + 1e-14);
  }
  CHECK(checked > 50);
}

TEST_CASE("dense storage tag uses the same contract") {
  Rng rng(5);
  const Matrix s = oracle::random_spd(rng, 6);
  const auto a = SymBandMatrix::dense(s);
  CHECK(a.storage() == Storage::kDense);
  const auto chol = factorize(a);
  REQUIRE(chol.success);
  CHECK(chol.log_det() == doctest::Approx(oracle::dense_log_det(s)).epsilon(1e-10));
}

TEST_CASE("log-density closed forms") {
  Vector x = Vector::Zero(1);
  CHECK(log_density(x, x, SymBandMatrix::identity(1)) == doctest::Approx(-0.5 * std::log(2.0 * M_PI)));
  Vector ones = Vector::Ones(2);
  CHECK(log_density(ones, Vector::Zero(2), SymBandMatrix::identity(2)) ==
        doctest::Approx(-std::log(2.0 * M_PI) - 1.0));
}

TEST_CASE("log-density matches dense evaluation on random banded instances") {
  Rng rng(99);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t m = oracle::uniform_int(rng, 1, 3);
    const auto a = oracle::random_band(rng, oracle::uniform_int(rng, 1, 10), m, 10.0);
    if (!factorize(a).success) continue;
    const auto d = static_cast<Eigen::Index>(a.dim());
    Vector x(d), mu(d);
    for (Eigen::Index i = 0; i < d; ++i) {
      x[i] = oracle::uniform(rng, -2.0, 2.0);
      mu[i] = oracle::uniform(rng, -1.0, 1.0);
    }
    const double ref = oracle::dense_gaussian_log_density(x, mu, a.to_dense());
    CHECK(std::abs(log_density(x, mu, a) - ref) <= 1e-10 * std::max(1.0, std::abs(ref)));
  }
}

TEST_CASE("log-density dimension mismatch is InvalidInput") {
  CHECK_THROWS_AS((void)log_density(Vector::Zero(2), Vector::Zero(3), SymBandMatrix::identity(3)), Error);
}

TEST_CASE("smallest eigenvalue: closed forms") {
  CHECK(smallest_eigenvalue(SymBandMatrix::identity(4)) == doctest::Approx(1.0).epsilon(1e-10));
  Vector d(3);
  d << 3.0, -2.0, 5.0;
  CHECK(std::abs(smallest_eigenvalue(SymBandMatrix::diagonal(d)) + 2.0) <= 1e-10);
}

TEST_CASE("smallest eigenvalue matches a dense eigensolver") {
  Rng rng(3);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t m = oracle::uniform_int(rng, 1, 3);
    const auto a = oracle::random_band(rng, oracle::uniform_int(rng, 1, 60 / m), m, oracle::uniform(rng, -2.0, 2.0));
    const double ref = oracle::eigenvalues(a.to_dense()).minCoeff();
    CHECK(std::abs(smallest_eigenvalue(a, 1e-10) - ref) <= 1e-9);
  }
}

TEST_CASE("inertia count matches dense eigenvalues") {
  Rng rng(8);
  const auto a = oracle::random_band(rng, 10, 2, 0.0);
  const auto ev = oracle::eigenvalues(a.to_dense());
  for (double s : {-3.0, -1.0, 0.0, 0.5, 2.0}) {
    std::size_t below = 0;
    for (Eigen::Index i = 0; i < ev.size(); ++i) below += ev[i] < s ? 1 : 0;
    CHECK(count_eigenvalues_below(a, s) == below);
  }
}

TEST_CASE("standard normal draws have zero mean and identity covariance") {
  Rng rng(42);
  const std::size_t S = 100000;
  const auto draws = sample_gaussian(Vector::Zero(3), SymBandMatrix::identity(3), rng, S);
  Vector mean = Vector::Zero(3);
  for (const auto& x : draws) mean += x / static_cast<double>(S);
  Matrix cov = Matrix::Zero(3, 3);
  for (const auto& x : draws) cov += (x - mean) * (x - mean).transpose() / static_cast<double>(S - 1);
  const double se_mean = 1.0 / std::sqrt(static_cast<double>(S));
  // Var of a sample covariance entry for unit variances is about 1/S off-diagonal, 2/S diagonal.
  CHECK(mean.cwiseAbs().maxCoeff() <= 5.0 * se_mean);
  CHECK((cov - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff() <= 5.0 * std::sqrt(2.0 / static_cast<double>(S)));
}

TEST_CASE("AR(1) draws reproduce the lag-1 autocorrelation") {
  const auto [mean, q] = ar1_precision(Ar1Spec(0.0, 0.8, 0.36, 50));
  Rng rng(17);
  const auto draws = sample_gaussian(mean, q, rng, 20000);
  // Pool lag-1 products over all draws; the process is stationary with unit variance.
  double num = 0.0, den = 0.0;
  for (const auto& x : draws) {
    for (Eigen::Index t = 0; t + 1 < x.size(); ++t) num += x[t] * x[t + 1];
    for (Eigen::Index t = 0; t < x.size(); ++t) den += x[t] * x[t];
  }
  CHECK(num / den == doctest::Approx(0.8).epsilon(0.01));
}

TEST_CASE("covariance consistency within six Monte Carlo standard errors") {
  Rng gen(123);
  for (std::size_t d : {2u, 3u, 4u}) {
    const auto a = oracle::random_band(gen, d, 1, 4.0);
    REQUIRE(factorize(a).success);
    const Matrix sigma = a.to_dense().inverse();
    Rng rng(derive_seed(5, d));
    const std::size_t S = 100000;
    const auto draws = sample_gaussian(Vector::Zero(static_cast<Eigen::Index>(d)), a, rng, S);
    Matrix cov = Matrix::Zero(sigma.rows(), sigma.cols());
    for (const auto& x : draws) cov += x * x.transpose() / static_cast<double>(S);
    for (Eigen::Index i = 0; i < sigma.rows(); ++i)
      for (Eigen::Index j = 0; j < sigma.cols(); ++j) {
        // Var(x_i x_j) = s_ii s_jj + s_ij^2 for a zero-mean Gaussian.
        const double se = std::sqrt((sigma(i, i) * sigma(j, j) + sigma(i, j) * sigma(i, j)) / static_cast<double>(S));
        CHECK(std::abs(cov(i, j) - sigma(i, j)) <= 6.0 * se);
      }
  }
}

TEST_CASE("sampling is deterministic under a fixed seed") {
  const auto [mean, q] = ar1_precision(Ar1Spec(0.3, 0.5, 1.0, 20));
  Rng r1(9), r2(9);
  const auto a = sample_gaussian(mean, q, r1, 10);
  const auto b = sample_gaussian(mean, q, r2, 10);
  for (std::size_t s = 0; s < a.size(); ++s) CHECK((a[s].array() == b[s].array()).all());
}

TEST_CASE("sampling with a non-positive-definite precision throws") {
  Vector diag(2), sub(1);
  diag << 1.0, 1.0;
  sub << 2.0;
  Rng rng(1);
  try {
    (void)sample_gaussian(Vector::Zero(2), SymBandMatrix::tridiagonal(diag, sub), rng, 1);
    FAIL("expected NotPositiveDefinite");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kNotPositiveDefinite);
  }
}

TEST_CASE("arithmetic across layouts") {
  Rng rng(4);
  const auto a = oracle::random_band(rng, 4, 2, 1.0);
  const auto b = oracle::random_band(rng, 4, 2, 1.0);
  CHECK(((a + b).to_dense() - (a.to_dense() + b.to_dense())).norm() <= 1e-14);
  CHECK(((a - b).to_dense() - (a.to_dense() - b.to_dense())).norm() <= 1e-14);
  CHECK(((2.5 * a).to_dense() - 2.5 * a.to_dense()).norm() <= 1e-14);
  const auto mixed = a + SymBandMatrix::dense(b.to_dense());
  CHECK(mixed.storage() == Storage::kDense);
  CHECK((mixed.to_dense() - (a.to_dense() + b.to_dense())).norm() <= 1e-14);
  const auto [lo, hi] = a.gershgorin_bounds();
  const auto ev = oracle::eigenvalues(a.to_dense());
  CHECK(lo <= ev.minCoeff());
  CHECK(hi >= ev.maxCoeff());
}

}  // TEST_SUITE
