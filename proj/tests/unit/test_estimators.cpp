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

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include <doctest.h>

#include "experiments.hpp"
#include "oracles.hpp"
#include "ris/error.hpp"
#include "ris/estimators.hpp"
#include "ris/statespace.hpp"

using namespace ris;

namespace {

// Inverse-CDF draws from GPD(xi, beta).
std::vector<double> gpd_draws(double xi, double beta, std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> z(n);
  for (auto& v : z) {
    const double u = uniform01(rng);
    v = xi == 0.0 ? -beta * std::log1p(-u) : beta / xi * (std::pow(1.0 - u, -xi) - 1.0);
  }
  return z;
}

WeightSample from_linear(const std::vector<double>& w) {
  WeightSample ws;
  for (double v : w) ws.log_weights.push_back(std::log(v));
  return ws;
}

std::vector<double> ar1_chain(double rho, std::size_t k, std::uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<double> normal;
  std::vector<double> x(k);
  double prev = normal(rng) / std::sqrt(1.0 - rho * rho);
  for (auto& v : x) {
    prev = rho * prev + normal(rng);
    v = prev;
  }
  return x;
}

}  // namespace

TEST_SUITE("estimators") {

TEST_CASE("exact posterior proposal gives constant weights and the marginal likelihood") {
  Rng rng(1);
  const std::size_t len = 15;
  Vector y(static_cast<Eigen::Index>(len)), r(static_cast<Eigen::Index>(len));
  for (Eigen::Index t = 0; t < y.size(); ++t) {
    y[t] = oracle::uniform(rng, -2.0, 2.0);
    r[t] = oracle::uniform(rng, 0.3, 2.0);
  }
  const GaussianMeasurementModel model(y, r);
  const auto [mean, q] = ar1_precision(Ar1Spec(0.2, 0.6, 0.5, len));
  const GaussianPrior prior(mean, q);
  const auto proposal = spdk_proposal(spdk_fit(model, prior, 1e-12), prior);
  const GaussianLatentTarget target(model, prior);
  const auto est = estimate_likelihood(target, proposal, 200, 5);

  const Matrix marginal_cov = q.to_dense().inverse() + Matrix(r.asDiagonal());
  const double exact = oracle::dense_gaussian_log_density(y, mean, marginal_cov.inverse());
  CHECK(est.log_value == doctest::Approx(exact).epsilon(1e-10));
  const auto [lo, hi] = std::minmax_element(est.weights.log_weights.begin(), est.weights.log_weights.end());
  CHECK(*hi - *lo <= 1e-9);
  CHECK(normalized_weight_variance(est.weights.log_weights) <= 1e-16);
}

TEST_CASE("a single draw returns its own weight") {
  const BernoulliToyModel model(100, 50, 0.1);
  const BernoulliTarget target(model);
  const auto g = bernoulli_taylor_proposal(model);
  const auto est = estimate_likelihood(target, g, 1, 3);
  REQUIRE(est.weights.size() == 1);
  CHECK(est.log_value == est.weights.log_weights[0]);
  CHECK(est.value == doctest::Approx(std::exp(est.weights.log_weights[0])).epsilon(1e-15));
}

TEST_CASE("likelihood estimate on a simulated count series is finite and reproducible") {
  const auto data = harness::simulate_poisson_ssm(-1.4, 0.8, 0.18, 500, 2);
  const PoissonSsmModel model(data.y[0], -1.4);
  const auto [mean, q] = ar1_precision(Ar1Spec(0.0, 0.8, 0.18, 500));
  const GaussianPrior prior(mean, q);
  const auto g = spdk_proposal(spdk_fit(model, prior), prior);
  const GaussianLatentTarget target(model, prior);
  const auto a = estimate_likelihood(target, g, 10000, 77);
  const auto b = estimate_likelihood(target, g, 10000, 77);
  CHECK(std::isfinite(a.log_value));
  CHECK(a.log_value == b.log_value);
  CHECK(a.weights.log_weights == b.weights.log_weights);
}

TEST_CASE("all-zero weights raise DegenerateSample") {
  // Proposal far outside the Bernoulli support: every draw has weight zero.
  const BernoulliToyModel model(10, 5, 0.1);
  const BernoulliTarget target(model);
  Vector mu(1), p(1);
  mu << 50.0;
  p << 100.0;
  const GaussianProposal g(mu, SymBandMatrix::diagonal(p));
  try {
    (void)estimate_likelihood(target, g, 100, 1);
    FAIL("expected DegenerateSample");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kDegenerateSample);
  }
}

TEST_CASE("log-mean-exp is order-invariant and does not overflow") {
  Rng rng(4);
  std::vector<double> lw(1000);
  for (auto& v : lw) v = oracle::uniform(rng, -1e6, 1e6);
  const double a = log_mean_exp(lw);
  std::shuffle(lw.begin(), lw.end(), rng);
  CHECK(log_mean_exp(lw) == doctest::Approx(a).epsilon(1e-15));
  CHECK(std::isfinite(a));
  CHECK(a == doctest::Approx(*std::max_element(lw.begin(), lw.end()) - std::log(1000.0)).epsilon(1e-12));
  CHECK(log_mean_exp({-1e6, -1e6}) == doctest::Approx(-1e6));
}

TEST_CASE("ratio estimate at equal weights") {
  WeightSample ws;
  ws.log_weights = {0.3, 0.3, 0.3};
  ws.payload = std::vector<double>{1.0, 2.0, 3.0};
  const auto r = ratio_estimate(ws);
  CHECK(r.estimate == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(r.variance == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("ratio estimate is invariant to a common weight scale") {
  Rng rng(5);
  WeightSample ws;
  std::vector<double> h;
  for (int i = 0; i < 200; ++i) {
    ws.log_weights.push_back(oracle::uniform(rng, -3.0, 3.0));
    h.push_back(oracle::uniform(rng, 0.0, 1.0));
  }
  ws.payload = h;
  const auto a = ratio_estimate(ws);
  for (double shift : {-700.0, 5.0, 700.0}) {
    WeightSample shifted = ws;
    for (auto& v : shifted.log_weights) v += shift;
    const auto b = ratio_estimate(shifted);
    CHECK(b.estimate == doctest::Approx(a.estimate).epsilon(1e-13));
    CHECK(b.variance == doctest::Approx(a.variance).epsilon(1e-12));
  }
}

TEST_CASE("ratio estimate without payload is InvalidInput") {
  WeightSample ws;
  ws.log_weights = {0.0, 1.0};
  CHECK_THROWS_AS((void)ratio_estimate(ws), Error);
}

TEST_CASE("Bernoulli posterior means from the Taylor proposal") {
  auto posterior_mean = [](int k) {
    const BernoulliToyModel model(100, k, 0.1);
    const BernoulliTarget target(model);
    const auto g = bernoulli_taylor_proposal(model);
    const auto est = estimate_likelihood(target, g, 100000, 9, [](const Vector& a) { return a[0]; });
    return ratio_estimate(est.weights).estimate;
  };
  CHECK(std::abs(posterior_mean(7) - 0.078) <= 0.003);
  CHECK(std::abs(posterior_mean(50) - 0.5) <= 0.003);
}

TEST_CASE("GPD fit recovers a heavy shape and rejects the finite-variance null") {
  int rejections = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    // 10^5 weights so that the 90th-percentile tail holds 10^4 exceedances.
    const auto w = gpd_draws(0.7, 1.0, 100000, seed);
    const auto fit = ksc_test(from_linear(w));
    CHECK(std::abs(static_cast<double>(fit.exceedances) - 10000.0) <= 1.0);
    CHECK(std::abs(fit.shape - 0.7) <= 0.05);
    rejections += fit.reject ? 1 : 0;
  }
  CHECK(rejections >= 4);
}

TEST_CASE("exponential weights give a shape near zero and no rejection") {
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const auto fit = ksc_test(from_linear(gpd_draws(0.0, 1.0, 100000, seed)));
    CHECK(std::abs(fit.shape) <= 0.05);
    CHECK_FALSE(fit.reject);
    CHECK(fit.p_value > 0.5);
  }
}

TEST_CASE("GPD fit is unaffected by the weight scale") {
  const auto w = gpd_draws(0.4, 1.0, 5000, 8);
  std::vector<double> scaled(w.size());
  std::transform(w.begin(), w.end(), scaled.begin(), [](double v) { return 1e200 * v; });
  const auto a = ksc_test(from_linear(w));
  const auto b = ksc_test(from_linear(scaled));
  CHECK(b.shape == doctest::Approx(a.shape).epsilon(1e-6));
}

TEST_CASE("GPD maximum likelihood is consistent across a parameter grid") {
  for (double xi : {0.2, 0.5, 0.8}) {
    for (double beta : {0.5, 2.0}) {
      double mean_xi = 0.0;
      const int fits = 10;
      for (int i = 0; i < fits; ++i) mean_xi += fit_gpd(gpd_draws(xi, beta, 10000, derive_seed(3, i))).shape / fits;
      CHECK(std::abs(mean_xi - xi) <= 0.05);
    }
  }
}

TEST_CASE("GPD fit matches the exponential MLE at the boundary") {
  const auto z = gpd_draws(0.0, 2.0, 20000, 12);
  const auto fit = fit_gpd(z);
  double mean = 0.0;
  for (double v : z) mean += v / static_cast<double>(z.size());
  CHECK(std::abs(fit.shape) <= 0.03);
  CHECK(fit.gpd_scale == doctest::Approx(mean).epsilon(0.05));
  CHECK(fit.shape_se == doctest::Approx((1.0 + fit.shape) / std::sqrt(20000.0)).epsilon(0.1));
}

TEST_CASE("too few exceedances raise InsufficientTail") {
  // 100 weights at the 95th percentile leave five exceedances.
  try {
    (void)ksc_test(from_linear(gpd_draws(0.3, 1.0, 100, 2)), 95.0);
    FAIL("expected InsufficientTail");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kInsufficientTail);
  }
  CHECK_THROWS_AS((void)ksc_test(from_linear(gpd_draws(0.3, 1.0, 50, 2))), Error);
}

TEST_CASE("IACT of white noise is one") {
  Rng rng(6);
  std::normal_distribution<double> normal;
  std::vector<double> x(100000);
  for (auto& v : x) v = normal(rng);
  const auto r = iact(x);
  CHECK(std::abs(r.estimate - 1.0) <= 0.05);
}

TEST_CASE("IACT of an AR(1) chain matches the geometric series") {
  const auto r = iact(ar1_chain(0.5, 1000000, 7));
  CHECK(std::abs(r.estimate - 3.0) <= 0.15);
  CHECK(r.cutoff <= kIactMaxLag);
  CHECK(r.autocorrelations.size() == r.cutoff);
  CHECK(r.autocorrelations[0] == doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("IACT admits negative autocorrelation") {
  // Near-alternating chain; lag-1 autocorrelation about -0.9.
  const auto r = iact(ar1_chain(-0.9, 100000, 8));
  CHECK(r.autocorrelations[0] < -0.8);
  CHECK(r.estimate < 1.0);
  // Strictly alternating signs with small noise.
  Rng rng(9);
  std::normal_distribution<double> normal(0.0, 0.05);
  std::vector<double> x(1000);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = (i % 2 == 0 ? 1.0 : -1.0) + normal(rng);
  const auto alt = iact(x);
  CHECK(alt.autocorrelations[0] < -0.9);
  CHECK(alt.estimate < 1.0);
}

TEST_CASE("IACT cutoff uses the lag autocorrelation estimator") {
  const auto x = ar1_chain(0.9, 20000, 10);
  const auto r = iact(x);
  for (std::size_t j = 1; j <= 5; ++j) CHECK(r.autocorrelations[j - 1] == doctest::Approx(oracle::autocorrelation(x, j)).epsilon(1e-10));
  const double band = 2.0 / std::sqrt(static_cast<double>(x.size()));
  if (r.first_small > 0) {
    CHECK(std::abs(r.autocorrelations[r.first_small - 1]) <= band);
    for (std::size_t j = 1; j < r.first_small; ++j) CHECK(std::abs(r.autocorrelations[j - 1]) > band);
  }
  double sum = 1.0;
  for (double rho : r.autocorrelations) sum += 2.0 * rho;
  CHECK(r.estimate == doctest::Approx(sum).epsilon(1e-14));
}

TEST_CASE("IACT input validation") {
  try {
    (void)iact(std::vector<double>(100, 2.5));
    FAIL("expected ConstantChain");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kConstantChain);
  }
  try {
    (void)iact(std::vector<double>(49, 1.0));
    FAIL("expected InvalidInput");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kInvalidInput);
  }
}

TEST_CASE("weight variance ratio") {
  Rng rng(11);
  WeightSample a, flat;
  for (int i = 0; i < 500; ++i) {
    a.log_weights.push_back(oracle::uniform(rng, -2.0, 2.0));
    flat.log_weights.push_back(-3.0);
  }
  CHECK(weight_variance_ratio(a, a) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(weight_variance_ratio(flat, a) == 0.0);
  try {
    (void)weight_variance_ratio(a, flat);
    FAIL("expected DivisionByZero");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kDivisionByZero);
  }
  // Normalization by the mean removes a common scale.
  WeightSample shifted = a;
  for (auto& v : shifted.log_weights) v += 400.0;
  CHECK(weight_variance_ratio(shifted, a) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("normalized weight variance matches a direct computation") {
  const std::vector<double> w{0.5, 1.0, 2.5, 4.0};
  std::vector<double> lw;
  for (double v : w) lw.push_back(std::log(v));
  const double mean = 2.0;
  double var = 0.0;
  for (double v : w) var += (v / mean - 1.0) * (v / mean - 1.0) / 3.0;
  CHECK(normalized_weight_variance(lw) == doctest::Approx(var).epsilon(1e-14));
}

TEST_CASE("weight CSV round trip") {
  WeightSample ws;
  ws.log_weights = {-1.5, 0.25, -std::numeric_limits<double>::infinity(), 3.0};
  ws.payload = std::vector<double>{0.1, 0.2, 0.3, 0.4};
  std::stringstream s;
  write_weight_csv(s, ws);
  CHECK(s.str().rfind("log_weight,payload\n", 0) == 0);
  const auto back = read_weight_csv(s);
  CHECK(back.log_weights == ws.log_weights);
  CHECK(*back.payload == *ws.payload);

  WeightSample plain;
  plain.log_weights = {1.0 / 3.0, -2.0};
  std::stringstream p;
  write_weight_csv(p, plain);
  const auto plain_back = read_weight_csv(p);
  CHECK(plain_back.log_weights == plain.log_weights);
  CHECK_FALSE(plain_back.payload.has_value());
}

}  // TEST_SUITE
