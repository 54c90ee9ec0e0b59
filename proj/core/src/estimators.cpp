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

#include "ris/estimators.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

#include "ris/error.hpp"

namespace ris {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double max_finite(const std::vector<double>& v) {
  double m = kNegInf;
  for (double x : v)
    if (x > m) m = x;
  return m;
}

}  // namespace

double log_mean_exp(const std::vector<double>& log_weights) {
  require(!log_weights.empty(), "log_mean_exp: empty input");
  const double m = max_finite(log_weights);
  if (m == kNegInf) return kNegInf;
  require(std::isfinite(m), "log_mean_exp: non-finite log-weight");
  double s = 0.0;
  for (double x : log_weights) s += std::exp(x - m);
  return m + std::log(s) - std::log(static_cast<double>(log_weights.size()));
}

LikelihoodEstimate estimate_likelihood(const LatentTarget& target, const ImportanceDensity& proposal,
                                       std::size_t samples, std::uint64_t seed, const Payload& payload) {
  require(samples > 0, "estimate_likelihood: need at least one draw");
  require(target.dim() == proposal.dim(), "estimate_likelihood: proposal and target dimensions differ");
  Rng rng(seed);
  LikelihoodEstimate out;
  out.weights.seed = seed;
  out.weights.log_weights.reserve(samples);
  if (payload) out.weights.payload.emplace().reserve(samples);
  for (std::size_t s = 0; s < samples; ++s) {
    const Vector x = proposal.sample(rng);
    const double lt = target.log_joint(x);
    out.weights.log_weights.push_back(lt == kNegInf ? kNegInf : lt - proposal.log_density(x));
    if (payload) out.weights.payload->push_back(payload(x));
  }
  out.log_value = log_mean_exp(out.weights.log_weights);
  if (out.log_value == kNegInf) throw Error(ErrorCode::kDegenerateSample, "estimate_likelihood: all weights are zero");
  out.value = std::exp(out.log_value);
  return out;
}

RatioEstimate ratio_estimate(const WeightSample& ws) {
  require(ws.payload.has_value(), "ratio_estimate: weight sample carries no payload");
  const auto& h = *ws.payload;
  require(h.size() == ws.size() && !h.empty(), "ratio_estimate: payload length mismatch");
  const double m = max_finite(ws.log_weights);
  require(m > kNegInf, "ratio_estimate: no finite weight");
  double sw = 0.0;
  double shw = 0.0;
  for (std::size_t s = 0; s < ws.size(); ++s) {
    const double w = std::exp(ws.log_weights[s] - m);
    sw += w;
    shw += h[s] * w;
  }
  RatioEstimate out;
  out.estimate = shw / sw;
  double acc = 0.0;
  for (std::size_t s = 0; s < ws.size(); ++s) {
    const double w = std::exp(ws.log_weights[s] - m);
    const double e = h[s] - out.estimate;
    acc += e * e * w * w;
  }
  out.variance = static_cast<double>(ws.size()) * acc / (sw * sw);
  return out;
}

// ---------------------------------------------------------------------------
// Generalized Pareto fit

namespace {

// Negative log-likelihood of GPD(xi, exp(log_beta)) on excesses z.
double gpd_nll(double xi, double log_beta, const std::vector<double>& z) {
  const double beta = std::exp(log_beta);
  double s = static_cast<double>(z.size()) * log_beta;
  for (double v : z) {
    const double x = v / beta;
    const double arg = xi * x;
    if (arg <= -1.0) return std::numeric_limits<double>::infinity();
    const double lp = std::log1p(arg);
    s += lp + (std::abs(xi) < 1e-12 ? x : lp / xi);
  }
  return s;
}

struct GpdData {
  const std::vector<double>* z;
};

double gsl_gpd_objective(const gsl_vector* p, void* params) {
  const auto* data = static_cast<const GpdData*>(params);
  const double f = gpd_nll(gsl_vector_get(p, 0), gsl_vector_get(p, 1), *data->z);
  return std::isfinite(f) ? f : 1e300;
}

std::array<double, 2> minimize_gpd(const std::vector<double>& z, double xi0, double log_beta0) {
  gsl_set_error_handler_off();
  GpdData data{&z};
  gsl_multimin_function fn{&gsl_gpd_objective, 2, &data};
  gsl_vector* x = gsl_vector_alloc(2);
  gsl_vector* step = gsl_vector_alloc(2);
  gsl_vector_set(x, 0, xi0);
  gsl_vector_set(x, 1, log_beta0);
  gsl_vector_set_all(step, 0.1);
  gsl_multimin_fminimizer* solver = gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, 2);
  gsl_multimin_fminimizer_set(solver, &fn, x, step);
  for (int iter = 0; iter < 10000; ++iter) {
    if (gsl_multimin_fminimizer_iterate(solver) != GSL_SUCCESS) break;
    if (gsl_multimin_test_size(gsl_multimin_fminimizer_size(solver), 1e-10) == GSL_SUCCESS) break;
  }
  std::array<double, 2> out{gsl_vector_get(solver->x, 0), gsl_vector_get(solver->x, 1)};
  gsl_multimin_fminimizer_free(solver);
  gsl_vector_free(step);
  gsl_vector_free(x);
  return out;
}

}  // namespace

GpdFit fit_gpd(const std::vector<double>& excesses) {
  require(excesses.size() >= kKscMinExceedances, "fit_gpd: need at least 10 excesses");
  // Work on z / mean(z); the shape is scale-free and log-scale shifts back.
  const double mean = std::accumulate(excesses.begin(), excesses.end(), 0.0) / static_cast<double>(excesses.size());
  require(mean > 0.0 && std::isfinite(mean), "fit_gpd: excesses must be positive and finite");
  std::vector<double> z(excesses.size());
  double var = 0.0;
  double zmax = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    z[i] = excesses[i] / mean;
    var += (z[i] - 1.0) * (z[i] - 1.0);
    zmax = std::max(zmax, z[i]);
  }
  var /= static_cast<double>(z.size() - 1);

  // Method-of-moments start, kept inside the support.
  double xi0 = var > 0.0 ? std::clamp(0.5 * (1.0 - 1.0 / var), -0.4, 0.9) : 0.0;
  double beta0 = var > 0.0 ? 0.5 * (1.0 / var + 1.0) : 1.0;
  if (xi0 < 0.0) beta0 = std::max(beta0, -xi0 * zmax * 1.01);
  const auto best = minimize_gpd(z, xi0, std::log(beta0));
  const double xi = best[0];
  const double lb = best[1];

  // Observed information in (xi, log beta) by central differences.
  const double h = 1e-4;
  auto f = [&](double a, double b) { return gpd_nll(a, b, z); };
  const double f0 = f(xi, lb);
  const double h11 = (f(xi + h, lb) - 2.0 * f0 + f(xi - h, lb)) / (h * h);
  const double h22 = (f(xi, lb + h) - 2.0 * f0 + f(xi, lb - h)) / (h * h);
  const double h12 = (f(xi + h, lb + h) - f(xi + h, lb - h) - f(xi - h, lb + h) + f(xi - h, lb - h)) / (4.0 * h * h);
  const double det = h11 * h22 - h12 * h12;
  double var_xi = (det > 0.0 && h11 > 0.0) ? h22 / det : std::numeric_limits<double>::quiet_NaN();
  if (!(var_xi > 0.0) || !std::isfinite(var_xi)) {
    // Expected information, valid for xi > -1/2.
    var_xi = (1.0 + xi) * (1.0 + xi) / static_cast<double>(z.size());
  }

  GpdFit fit;
  fit.shape = xi;
  fit.gpd_scale = std::exp(lb) * mean;
  fit.exceedances = z.size();
  fit.shape_se = std::sqrt(var_xi);
  fit.wald_statistic = (xi - 0.5) / fit.shape_se;
  fit.p_value = 0.5 * std::erfc(fit.wald_statistic / std::sqrt(2.0));
  return fit;
}

GpdFit ksc_test(const WeightSample& ws, double percentile, double significance) {
  require(percentile > 0.0 && percentile < 100.0, "ksc_test: percentile must lie in (0, 100)");
  const std::size_t finite = static_cast<std::size_t>(
      std::count_if(ws.log_weights.begin(), ws.log_weights.end(), [](double x) { return std::isfinite(x); }));
  require(finite >= kKscMinWeights, "ksc_test: need at least 100 finite weights");
  const double m = max_finite(ws.log_weights);
  std::vector<double> w(ws.size());
  for (std::size_t s = 0; s < ws.size(); ++s) w[s] = std::exp(ws.log_weights[s] - m);

  std::vector<double> sorted = w;
  std::sort(sorted.begin(), sorted.end());
  const double pos = percentile / 100.0 * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double u = sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);

  std::vector<double> z;
  for (double v : w)
    if (v > u) z.push_back(v - u);
  if (z.size() < kKscMinExceedances) {
    throw Error(ErrorCode::kInsufficientTail,
                "ksc_test: only " + std::to_string(z.size()) + " exceedances above the threshold");
  }
  GpdFit fit = fit_gpd(z);
  fit.threshold = u;
  fit.reject = fit.p_value < significance;
  return fit;
}

// ---------------------------------------------------------------------------

IactResult iact(const std::vector<double>& chain) {
  const std::size_t k = chain.size();
  require(k >= kIactMinLength, "iact: chain must have at least 50 draws");
  const double mean = std::accumulate(chain.begin(), chain.end(), 0.0) / static_cast<double>(k);
  std::vector<double> c(k);
  double c0 = 0.0;
  for (std::size_t t = 0; t < k; ++t) {
    c[t] = chain[t] - mean;
    c0 += c[t] * c[t];
  }
  if (!(c0 > 0.0)) throw Error(ErrorCode::kConstantChain, "iact: chain is constant");

  const double small = 2.0 / std::sqrt(static_cast<double>(k));
  const std::size_t max_lag = std::min(kIactMaxLag, k - 1);
  IactResult out;
  double sum = 0.0;
  for (std::size_t j = 1; j <= max_lag; ++j) {
    double acc = 0.0;
    for (std::size_t t = 0; t + j < k; ++t) acc += c[t] * c[t + j];
    const double rho = acc / c0;
    out.autocorrelations.push_back(rho);
    sum += rho;
    if (std::abs(rho) <= small) {
      out.first_small = j;
      break;
    }
  }
  out.cutoff = out.autocorrelations.size();
  out.estimate = 1.0 + 2.0 * sum;
  return out;
}

double normalized_weight_variance(const std::vector<double>& log_weights) {
  require(log_weights.size() >= 2, "normalized_weight_variance: need at least two weights");
  const double m = max_finite(log_weights);
  require(m > kNegInf, "normalized_weight_variance: no finite weight");
  std::vector<double> w(log_weights.size());
  double mean = 0.0;
  for (std::size_t s = 0; s < w.size(); ++s) {
    w[s] = std::exp(log_weights[s] - m);
    mean += w[s];
  }
  mean /= static_cast<double>(w.size());
  double var = 0.0;
  for (double v : w) var += (v / mean - 1.0) * (v / mean - 1.0);
  return var / static_cast<double>(w.size() - 1);
}

double weight_variance_ratio(const WeightSample& a, const WeightSample& b) {
  const double vb = normalized_weight_variance(b.log_weights);
  if (vb == 0.0) throw Error(ErrorCode::kDivisionByZero, "weight_variance_ratio: reference weights are constant");
  return normalized_weight_variance(a.log_weights) / vb;
}

// ---------------------------------------------------------------------------

void write_weight_csv(std::ostream& out, const WeightSample& ws) {
  const bool with_payload = ws.payload.has_value();
  out << (with_payload ? "log_weight,payload\n" : "log_weight\n");
  std::ostringstream line;
  line.precision(17);
  for (std::size_t s = 0; s < ws.size(); ++s) {
    line.str("");
    line << ws.log_weights[s];
    if (with_payload) line << ',' << (*ws.payload)[s];
    out << line.str() << '\n';
  }
}

WeightSample read_weight_csv(std::istream& in) {
  std::string header;
  require(static_cast<bool>(std::getline(in, header)), "read_weight_csv: missing header");
  if (!header.empty() && header.back() == '\r') header.pop_back();
  const bool with_payload = header == "log_weight,payload";
  require(with_payload || header == "log_weight", "read_weight_csv: unexpected header '" + header + "'");
  WeightSample ws;
  if (with_payload) ws.payload.emplace();
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const auto comma = line.find(',');
    ws.log_weights.push_back(std::strtod(line.substr(0, comma).c_str(), nullptr));
    if (with_payload) {
      require(comma != std::string::npos, "read_weight_csv: missing payload column");
      ws.payload->push_back(std::strtod(line.substr(comma + 1).c_str(), nullptr));
    }
  }
  return ws;
}

}  // namespace ris
