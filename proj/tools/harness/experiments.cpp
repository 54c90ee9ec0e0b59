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

#include "experiments.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include "ris/error.hpp"
#include "ris/rng.hpp"

namespace ris::harness {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

double mean_of(const std::vector<double>& v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sd_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

std::vector<double> simulate_ar1_path(double phi, double sigma2, std::size_t length, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> alpha(length, 0.0);
  if (sigma2 == 0.0) return alpha;
  alpha[0] = std::sqrt(sigma2 / (1.0 - phi * phi)) * normal(rng);
  for (std::size_t t = 1; t < length; ++t) alpha[t] = phi * alpha[t - 1] + std::sqrt(sigma2) * normal(rng);
  return alpha;
}

int poisson_draw(double rate, Rng& rng) { return std::poisson_distribution<int>(rate)(rng); }

}  // namespace

Dataset simulate_poisson_ssm(double beta, double phi, double sigma2, std::size_t length, std::uint64_t seed) {
  require(length > 0, "simulate_poisson_ssm: length must be positive");
  require(std::abs(phi) < 1.0 && sigma2 >= 0.0, "simulate_poisson_ssm: need |phi| < 1 and sigma2 >= 0");
  Rng rng(seed);
  const auto alpha = simulate_ar1_path(phi, sigma2, length, rng);
  Dataset d;
  d.type = "poisson_ssm";
  d.seed = seed;
  d.params = {{"beta", {beta}}, {"phi", {phi}}, {"sigma2", {sigma2}}};
  d.y.emplace_back();
  for (double a : alpha) d.y[0].push_back(poisson_draw(std::exp(beta + a), rng));
  return d;
}

Dataset simulate_panel(std::size_t panels, std::size_t length, const Vector& beta, double phi, double sigma2,
                       std::uint64_t seed) {
  require(panels > 0 && length > 0, "simulate_panel: need at least one panel and one period");
  require(beta.size() == 2, "simulate_panel: beta must have an intercept and one slope");
  require(std::abs(phi) < 1.0 && sigma2 >= 0.0, "simulate_panel: need |phi| < 1 and sigma2 >= 0");
  Rng rng(seed);
  Dataset d;
  d.type = "panel_poisson";
  d.seed = seed;
  d.params = {{"beta", {beta[0], beta[1]}}, {"phi", {phi}}, {"sigma2", {sigma2}}};
  for (std::size_t i = 0; i < panels; ++i) {
    Matrix x(static_cast<Eigen::Index>(length), 2);
    for (std::size_t t = 0; t < length; ++t) {
      x(static_cast<Eigen::Index>(t), 0) = 1.0;
      x(static_cast<Eigen::Index>(t), 1) = uniform01(rng);
    }
    const auto alpha = simulate_ar1_path(phi, sigma2, length, rng);
    std::vector<int> y(length);
    for (std::size_t t = 0; t < length; ++t) {
      const double eta = x.row(static_cast<Eigen::Index>(t)).dot(beta) + alpha[t];
      y[t] = poisson_draw(std::exp(eta), rng);
    }
    d.x.push_back(std::move(x));
    d.y.push_back(std::move(y));
  }
  return d;
}

// ---------------------------------------------------------------------------

Table1Result run_table1(const Table1Config& config) {
  require(config.reps > 0 && config.samples > 0, "table1: reps and samples must be positive");
  const BernoulliToyModel model(config.trials, config.successes, config.prior_precision);
  const BernoulliTarget target(model);
  const GaussianProposal normal = bernoulli_taylor_proposal(model);
  const StudentTProposal student(normal.mean(), normal.precision(), config.nu);
  const MixtureProposal mixture =
      build_mixture(normal.mean(), normal.precision(), config.prior_precision * SymBandMatrix::identity(1),
                    MomentOrder(config.n_moment), config.pi);
  const std::vector<std::pair<std::string, const ImportanceDensity*>> samplers{
      {"normal", &normal}, {"t", &student}, {"2nd-IS", &mixture}};
  const Payload first = [](const Vector& a) { return a[0]; };

  Table1Result out;
  for (std::size_t rep = 0; rep < config.reps; ++rep) {
    for (std::size_t k = 0; k < samplers.size(); ++k) {
      Table1Row row;
      row.rep = rep;
      row.sampler = samplers[k].first;
      try {
        const auto start = Clock::now();
        const auto est = estimate_likelihood(target, *samplers[k].second, config.samples,
                                             derive_seed(config.seed, rep, k), first);
        const RatioEstimate ratio = ratio_estimate(est.weights);
        row.seconds = seconds_since(start);
        row.estimate = ratio.estimate;
        row.variance = ratio.variance;
        try {
          const GpdFit fit = ksc_test(est.weights, config.percentile);
          row.ksc_available = true;
          row.shape = fit.shape;
          row.p_value = fit.p_value;
          row.reject = fit.reject;
        } catch (const Error& e) {
          if (e.code() != ErrorCode::kInsufficientTail) throw;
        }
      } catch (const Error& e) {
        row.error = e.what();
        ++out.failures;
      }
      out.rows.push_back(std::move(row));
    }
  }

  std::vector<double> base_var(config.reps, std::numeric_limits<double>::quiet_NaN());
  for (const auto& r : out.rows)
    if (r.sampler == "normal" && r.error.empty()) base_var[r.rep] = r.variance;
  for (const auto& [name, density] : samplers) {
    SamplerSummary s;
    s.sampler = name;
    std::vector<double> est, var, base, ratios, secs;
    for (const auto& r : out.rows) {
      if (r.sampler != name) continue;
      if (!r.error.empty()) {
        ++s.failures;
        continue;
      }
      est.push_back(r.estimate);
      var.push_back(r.variance);
      secs.push_back(r.seconds);
      if (std::isfinite(base_var[r.rep])) {
        base.push_back(base_var[r.rep]);
        ratios.push_back(r.variance / base_var[r.rep]);
      }
      if (r.ksc_available) ++s.ksc_available;
      if (r.reject) ++s.rejections;
    }
    s.mean_estimate = mean_of(est);
    s.variance_ratio = mean_of(var) / mean_of(base);
    s.mean_variance_ratio = mean_of(ratios);
    s.mean_seconds = mean_of(secs);
    out.summary.push_back(s);
  }
  return out;
}

// ---------------------------------------------------------------------------

std::vector<ParameterVector> default_table2_psis() {
  return {ParameterVector{Vector::Constant(1, -1.4), 0.99, 1.0},
          ParameterVector{Vector::Constant(1, -1.4), 0.8, 0.5 * (1.0 - 0.8 * 0.8)}};
}

Table2Result run_table2(const Table2Config& config) {
  require(config.datasets > 0 && config.evaluations > 1 && config.samples > 1,
          "table2: need datasets, at least two evaluations and two samples");
  const auto psis = config.psis.empty() ? default_table2_psis() : config.psis;
  const double dgp_phi = 0.8;
  const double dgp_sigma2 = 0.5 * (1.0 - dgp_phi * dgp_phi);

  SamplerConfig spdk;
  spdk.kind = SamplerKind::kGaussian;
  spdk.order = MomentOrder(config.n_moment);
  spdk.samples = config.samples;
  SamplerConfig imposed = spdk;
  imposed.kind = SamplerKind::kImposedMixture;
  imposed.pi = config.pi;
  imposed.eps_inflate = config.eps_inflate;

  Table2Result out;
  for (std::size_t d = 0; d < config.datasets; ++d) {
    const Dataset data = simulate_poisson_ssm(-1.4, dgp_phi, dgp_sigma2, config.length, derive_seed(config.seed, d));
    const auto& y = data.y[0];
    for (std::size_t p = 0; p < psis.size(); ++p) {
      Table2Row row;
      row.dataset = d;
      row.psi_index = p;
      try {
        const ParameterVector& psi = psis[p];
        const PoissonSsmModel model(y, psi.beta[0]);
        const Ar1Spec spec(0.0, psi.phi, psi.sigma2, y.size());
        auto [mean, precision] = ar1_precision(spec);
        const GaussianPrior prior(std::move(mean), std::move(precision));
        const GaussianLatentTarget target(model, prior);

        auto start = Clock::now();
        const SsmDensity g_spdk = build_ssm_density(model, prior, spec, spdk);
        const double build_spdk = seconds_since(start);
        start = Clock::now();
        const SsmDensity g_imposed = build_ssm_density(model, prior, spec, imposed);
        const double build_imposed = seconds_since(start);
        row.condition_holds = g_spdk.condition_holds;
        row.imposition_steps = g_imposed.imposition_steps;

        std::vector<double> var_a, var_b, ll_a, ll_b;
        double t_a = 0.0, t_b = 0.0;
        for (std::size_t e = 0; e < config.evaluations; ++e) {
          const std::uint64_t s = derive_seed(config.seed, d, e);
          start = Clock::now();
          const auto a = estimate_likelihood(target, *g_spdk.density, config.samples, s);
          t_a += seconds_since(start);
          start = Clock::now();
          const auto b = estimate_likelihood(target, *g_imposed.density, config.samples, s);
          t_b += seconds_since(start);
          var_a.push_back(normalized_weight_variance(a.weights.log_weights));
          var_b.push_back(normalized_weight_variance(b.weights.log_weights));
          ll_a.push_back(a.log_value);
          ll_b.push_back(b.log_value);
        }
        const auto evals = static_cast<double>(config.evaluations);
        row.self_var_spdk = mean_of(var_a);
        row.self_var_imposed = mean_of(var_b);
        // Unnormalized weight variance in units of a likelihood reference shared by both samplers.
        std::vector<double> pooled = ll_a;
        pooled.insert(pooled.end(), ll_b.begin(), ll_b.end());
        const double ref = log_mean_exp(pooled);
        for (std::size_t e = 0; e < config.evaluations; ++e) {
          row.weight_var_spdk += var_a[e] * std::exp(2.0 * (ll_a[e] - ref)) / evals;
          row.weight_var_imposed += var_b[e] * std::exp(2.0 * (ll_b[e] - ref)) / evals;
        }
        row.mce_spdk = sd_of(ll_a);
        row.mce_imposed = sd_of(ll_b);
        row.mean_loglik_spdk = mean_of(ll_a);
        row.mean_loglik_imposed = mean_of(ll_b);
        row.seconds_spdk = (t_a + build_spdk * evals) / evals;
        row.seconds_imposed = (t_b + build_imposed * evals) / evals;
      } catch (const Error& e) {
        row.error = e.what();
        ++out.failures;
      }
      out.rows.push_back(std::move(row));
    }
  }

  for (std::size_t p = 0; p < psis.size(); ++p) {
    Table2Summary s;
    s.psi = psis[p];
    std::vector<double> va, vb, ma, mb, ta, tb, ra, rb;
    std::size_t holds = 0, total = 0;
    for (const auto& r : out.rows) {
      if (r.psi_index != p) continue;
      if (!r.error.empty()) {
        ++s.failures;
        continue;
      }
      ++total;
      if (r.condition_holds) ++holds;
      va.push_back(r.self_var_spdk);
      vb.push_back(r.self_var_imposed);
      ma.push_back(r.mce_spdk);
      mb.push_back(r.mce_imposed);
      ta.push_back(r.seconds_spdk);
      tb.push_back(r.seconds_imposed);
      ra.push_back(r.weight_var_spdk);
      rb.push_back(r.weight_var_imposed);
    }
    s.self_normalized_variance_ratio = mean_of(vb) / mean_of(va);
    s.variance_ratio = mean_of(rb) / mean_of(ra);
    s.mce_ratio = mean_of(mb) / mean_of(ma);
    s.finite_variance_fraction = total > 0 ? static_cast<double>(holds) / static_cast<double>(total) : 0.0;
    s.seconds_spdk = mean_of(ta);
    s.seconds_imposed = mean_of(tb);
    out.summary.push_back(s);
  }
  return out;
}

// ---------------------------------------------------------------------------

Table3Result run_table3(const Table3Config& config) {
  require(config.datasets > 0 && config.evaluations > 1, "table3: need datasets and at least two evaluations");
  require(config.beta.size() == 2, "table3: beta must have two entries");
  const Vector beta = Eigen::Map<const Vector>(config.beta.data(), 2);
  const double sigma2 = config.stationary_variance * (1.0 - config.phi * config.phi);
  const std::vector<ParameterVector> psis{ParameterVector{beta, config.phi, sigma2},
                                          ParameterVector{Vector::Zero(2), 0.0, 1.0}};

  SamplerConfig t_is;
  t_is.kind = SamplerKind::kStudentT;
  t_is.nu = config.nu;
  t_is.samples = config.samples;
  t_is.order = MomentOrder(config.n_moment);
  SamplerConfig mix = t_is;
  mix.kind = SamplerKind::kMixture;
  mix.pi = config.pi;

  Table3Result out;
  for (std::size_t d = 0; d < config.datasets; ++d) {
    const Dataset data = simulate_panel(config.panels, config.length, beta, config.phi, sigma2,
                                        derive_seed(config.seed, d));
    const PanelData panel = to_panel_data(data);
    for (std::size_t c = 0; c < psis.size(); ++c) {
      Table3Row row;
      row.dataset = d;
      row.case_index = c;
      try {
        std::vector<double> ll_t, ll_m;
        // [evaluation][panel] self-normalized variances and panel log-likelihood estimates.
        std::vector<std::vector<double>> var_t, var_m, pl_t, pl_m;
        double secs_t = 0.0, secs_m = 0.0;
        for (std::size_t e = 0; e < config.evaluations; ++e) {
          // Same seed for both cases: common random numbers across psi.
          const std::uint64_t s = derive_seed(config.seed, d, e);
          auto start = Clock::now();
          const auto a = estimate_panel_likelihood(panel, psis[c], t_is, s, true);
          secs_t += seconds_since(start);
          start = Clock::now();
          const auto b = estimate_panel_likelihood(panel, psis[c], mix, s, true);
          secs_m += seconds_since(start);
          auto& vt = var_t.emplace_back();
          auto& vm = var_m.emplace_back();
          for (const auto& w : a.weights) vt.push_back(normalized_weight_variance(w.log_weights));
          for (const auto& w : b.weights) vm.push_back(normalized_weight_variance(w.log_weights));
          pl_t.push_back(a.panel_log_values);
          pl_m.push_back(b.panel_log_values);
          ll_t.push_back(a.log_value);
          ll_m.push_back(b.log_value);
        }
        const auto evals = static_cast<double>(config.evaluations);
        const auto cells = evals * static_cast<double>(panel.num_panels());
        for (std::size_t i = 0; i < panel.num_panels(); ++i) {
          std::vector<double> pooled;
          for (std::size_t e = 0; e < config.evaluations; ++e) {
            pooled.push_back(pl_t[e][i]);
            pooled.push_back(pl_m[e][i]);
          }
          const double ref = log_mean_exp(pooled);
          for (std::size_t e = 0; e < config.evaluations; ++e) {
            row.weight_var_t += var_t[e][i] * std::exp(2.0 * (pl_t[e][i] - ref)) / cells;
            row.weight_var_mixture += var_m[e][i] * std::exp(2.0 * (pl_m[e][i] - ref)) / cells;
            row.self_var_t += var_t[e][i] / cells;
            row.self_var_mixture += var_m[e][i] / cells;
          }
        }
        row.mce_t = sd_of(ll_t);
        row.mce_mixture = sd_of(ll_m);
        row.seconds_t = secs_t / evals;
        row.seconds_mixture = secs_m / evals;
      } catch (const Error& e) {
        row.error = e.what();
        ++out.failures;
      }
      out.rows.push_back(std::move(row));
    }
  }

  for (std::size_t c = 0; c < psis.size(); ++c) {
    Table3Summary s;
    s.psi = psis[c];
    std::vector<double> vt, vm, st, sm, mt, mm, tt, tm;
    for (const auto& r : out.rows) {
      if (r.case_index != c) continue;
      if (!r.error.empty()) {
        ++s.failures;
        continue;
      }
      vt.push_back(r.weight_var_t);
      vm.push_back(r.weight_var_mixture);
      st.push_back(r.self_var_t);
      sm.push_back(r.self_var_mixture);
      mt.push_back(r.mce_t);
      mm.push_back(r.mce_mixture);
      tt.push_back(r.seconds_t);
      tm.push_back(r.seconds_mixture);
    }
    s.variance_ratio = mean_of(vm) / mean_of(vt);
    s.self_normalized_variance_ratio = mean_of(sm) / mean_of(st);
    s.mce_ratio = mean_of(mm) / mean_of(mt);
    s.seconds_t = mean_of(tt);
    s.seconds_mixture = mean_of(tm);
    out.summary.push_back(s);
  }
  return out;
}

// ---------------------------------------------------------------------------

Table5Result run_table5(const Table5Config& config) {
  require(config.reps > 0, "table5: need at least one replication");
  require(config.beta.size() == 2, "table5: beta must have two entries");
  const Vector beta = Eigen::Map<const Vector>(config.beta.data(), 2);
  const double sigma2 = config.stationary_variance * (1.0 - config.phi * config.phi);
  const ParameterVector truth{beta, config.phi, sigma2};

  SamplerConfig t_is;
  t_is.kind = SamplerKind::kStudentT;
  t_is.nu = config.nu;
  t_is.samples = config.samples;
  t_is.order = MomentOrder(config.n_moment);
  SamplerConfig mix = t_is;
  mix.kind = SamplerKind::kMixture;
  mix.pi = config.pi;
  const std::vector<std::pair<std::string, SamplerConfig>> samplers{{"t", t_is}, {"2nd-IS", mix}};

  Table5Result out;
  std::vector<double> ratios;
  for (std::size_t rep = 0; rep < config.reps; ++rep) {
    const Dataset data = simulate_panel(config.panels, config.length, beta, config.phi, sigma2,
                                        derive_seed(config.seed, rep));
    const PanelData panel = to_panel_data(data);
    double iact_t = std::numeric_limits<double>::quiet_NaN();
    double iact_m = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t k = 0; k < samplers.size(); ++k) {
      Table5Row row;
      row.rep = rep;
      row.sampler = samplers[k].first;
      try {
        PmmhConfig pm;
        pm.iterations = config.iterations;
        pm.burn_in = config.burn_in;
        pm.seed = derive_seed(config.seed, rep, 1000 + k);
        const PanelMcmcResult res = run_panel_pmmh(panel, truth, samplers[k].second, pm);
        row.acceptance_rate = res.run.acceptance_rate;
        row.mean_iact = res.diagnostics.mean_iact;
        for (const auto& r : res.diagnostics.iact) row.iact.push_back(r.estimate);
        row.seconds_per_iteration = res.run.seconds / static_cast<double>(pm.iterations + pm.burn_in);
        row.estimator_failures = res.run.estimator_failures;
        (k == 0 ? iact_t : iact_m) = row.mean_iact;
      } catch (const Error& e) {
        row.error = e.what();
        ++out.failures;
      }
      out.rows.push_back(std::move(row));
    }
    if (std::isfinite(iact_t) && std::isfinite(iact_m)) ratios.push_back(iact_m / iact_t);
  }

  std::vector<double> acc_t, acc_m, it_t, it_m, s_t, s_m;
  for (const auto& r : out.rows) {
    if (!r.error.empty()) continue;
    const bool is_t = r.sampler == "t";
    (is_t ? acc_t : acc_m).push_back(r.acceptance_rate);
    if (std::isfinite(r.mean_iact)) (is_t ? it_t : it_m).push_back(r.mean_iact);
    (is_t ? s_t : s_m).push_back(r.seconds_per_iteration);
  }
  out.acceptance_t = mean_of(acc_t);
  out.acceptance_mixture = mean_of(acc_m);
  out.iact_ratio = mean_of(ratios);
  out.pooled_iact_ratio = mean_of(it_m) / mean_of(it_t);
  out.seconds_t = mean_of(s_t);
  out.seconds_mixture = mean_of(s_m);
  return out;
}

// ---------------------------------------------------------------------------

std::vector<Fig2Path> run_fig2(const Fig2Config& config) {
  const Ar1Spec spec = Ar1Spec::from_stationary_variance(0.0, config.phi, config.stationary_variance, config.length);
  std::vector<Fig2Path> out;
  for (double v : config.variances) {
    require(v > 0.0, "fig2: variances must be positive");
    const Vector vs = Vector::Constant(static_cast<Eigen::Index>(config.length), v);
    out.push_back(Fig2Path{v, sylvester_check(spec, vs, config.n_moment)});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Reporting

Json to_json(const ParameterVector& psi) {
  return Json{{"beta", std::vector<double>(psi.beta.data(), psi.beta.data() + psi.beta.size())},
              {"phi", psi.phi},
              {"sigma2", psi.sigma2}};
}

Json to_json(const Table1Config& c) {
  return Json{{"trials", c.trials},   {"successes", c.successes}, {"prior_precision", c.prior_precision},
              {"reps", c.reps},       {"samples", c.samples},     {"pi", c.pi},
              {"nu", c.nu},           {"n_moment", c.n_moment},   {"percentile", c.percentile},
              {"seed", c.seed}};
}

Json to_json(const Table2Config& c) {
  Json psis = Json::array();
  for (const auto& p : c.psis.empty() ? default_table2_psis() : c.psis) psis.push_back(to_json(p));
  return Json{{"datasets", c.datasets}, {"evaluations", c.evaluations}, {"samples", c.samples},
              {"length", c.length},     {"n_moment", c.n_moment},       {"pi", c.pi},
              {"eps_inflate", c.eps_inflate}, {"psis", psis},           {"seed", c.seed}};
}

Json to_json(const Table3Config& c) {
  return Json{{"panels", c.panels},     {"length", c.length},           {"stationary_variance", c.stationary_variance},
              {"phi", c.phi},           {"beta", c.beta},               {"datasets", c.datasets},
              {"evaluations", c.evaluations}, {"samples", c.samples},   {"n_moment", c.n_moment},
              {"pi", c.pi},             {"nu", c.nu},                   {"seed", c.seed}};
}

Json to_json(const Table5Config& c) {
  return Json{{"panels", c.panels},   {"length", c.length},         {"stationary_variance", c.stationary_variance},
              {"phi", c.phi},         {"beta", c.beta},             {"reps", c.reps},
              {"iterations", c.iterations}, {"burn_in", c.burn_in}, {"samples", c.samples},
              {"n_moment", c.n_moment}, {"pi", c.pi},               {"nu", c.nu},
              {"seed", c.seed}};
}

Json to_json(const Fig2Config& c) {
  return Json{{"phi", c.phi},
              {"stationary_variance", c.stationary_variance},
              {"n_moment", c.n_moment},
              {"length", c.length},
              {"variances", c.variances}};
}

Json summary_json(const Table1Result& r) {
  Json samplers = Json::array();
  for (const auto& s : r.summary) {
    samplers.push_back(Json{{"sampler", s.sampler},
                            {"mean_estimate", s.mean_estimate},
                            {"variance_ratio", s.variance_ratio},
                            {"mean_variance_ratio", s.mean_variance_ratio},
                            {"ksc_rejections", s.rejections},
                            {"ksc_available", s.ksc_available},
                            {"mean_seconds", s.mean_seconds},
                            {"failures", s.failures}});
  }
  return Json{{"samplers", samplers}, {"failures", r.failures}};
}

Json summary_json(const Table2Result& r) {
  Json cases = Json::array();
  for (const auto& s : r.summary) {
    cases.push_back(Json{{"psi", to_json(s.psi)},
                         {"variance_ratio", s.variance_ratio},
                         {"self_normalized_variance_ratio", s.self_normalized_variance_ratio},
                         {"mce_ratio", s.mce_ratio},
                         {"finite_variance_fraction", s.finite_variance_fraction},
                         {"seconds_spdk", s.seconds_spdk},
                         {"seconds_imposed", s.seconds_imposed},
                         {"failures", s.failures}});
  }
  return Json{{"cases", cases}, {"failures", r.failures}};
}

Json summary_json(const Table3Result& r) {
  Json cases = Json::array();
  for (const auto& s : r.summary) {
    cases.push_back(Json{{"psi", to_json(s.psi)},
                         {"variance_ratio", s.variance_ratio},
                         {"self_normalized_variance_ratio", s.self_normalized_variance_ratio},
                         {"mce_ratio", s.mce_ratio},
                         {"seconds_t", s.seconds_t},
                         {"seconds_mixture", s.seconds_mixture},
                         {"failures", s.failures}});
  }
  return Json{{"cases", cases}, {"failures", r.failures}};
}

Json summary_json(const Table5Result& r) {
  return Json{{"acceptance_t", r.acceptance_t},
              {"acceptance_mixture", r.acceptance_mixture},
              {"iact_ratio", r.iact_ratio},
              {"pooled_iact_ratio", r.pooled_iact_ratio},
              {"seconds_per_iteration_t", r.seconds_t},
              {"seconds_per_iteration_mixture", r.seconds_mixture},
              {"failures", r.failures}};
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

std::string csv_number(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

std::string rows_csv(const Table1Result& r) {
  std::ostringstream os;
  os << "rep,sampler,estimate,variance,ksc_available,shape,p_value,reject,seconds,error\n";
  for (const auto& x : r.rows) {
    os << x.rep << ',' << csv_field(x.sampler) << ',' << csv_number(x.estimate) << ',' << csv_number(x.variance) << ','
       << x.ksc_available << ',' << csv_number(x.shape) << ',' << csv_number(x.p_value) << ',' << x.reject << ','
       << csv_number(x.seconds) << ',' << csv_field(x.error) << '\n';
  }
  return os.str();
}

std::string rows_csv(const Table2Result& r) {
  std::ostringstream os;
  os << "dataset,psi_index,condition_holds,imposition_steps,self_var_spdk,self_var_imposed,weight_var_spdk,"
        "weight_var_imposed,mce_spdk,mce_imposed,mean_loglik_spdk,mean_loglik_imposed,seconds_spdk,seconds_imposed,error\n";
  for (const auto& x : r.rows) {
    os << x.dataset << ',' << x.psi_index << ',' << x.condition_holds << ',' << x.imposition_steps << ','
       << csv_number(x.self_var_spdk) << ',' << csv_number(x.self_var_imposed) << ','
       << csv_number(x.weight_var_spdk) << ',' << csv_number(x.weight_var_imposed) << ',' << csv_number(x.mce_spdk)
       << ',' << csv_number(x.mce_imposed) << ',' << csv_number(x.mean_loglik_spdk) << ','
       << csv_number(x.mean_loglik_imposed) << ',' << csv_number(x.seconds_spdk) << ','
       << csv_number(x.seconds_imposed) << ',' << csv_field(x.error) << '\n';
  }
  return os.str();
}

std::string rows_csv(const Table3Result& r) {
  std::ostringstream os;
  os << "dataset,case,weight_var_t,weight_var_mixture,self_var_t,self_var_mixture,mce_t,mce_mixture,seconds_t,seconds_mixture,error\n";
  for (const auto& x : r.rows) {
    os << x.dataset << ',' << x.case_index << ',' << csv_number(x.weight_var_t) << ','
       << csv_number(x.weight_var_mixture) << ',' << csv_number(x.self_var_t) << ','
       << csv_number(x.self_var_mixture) << ',' << csv_number(x.mce_t) << ',' << csv_number(x.mce_mixture) << ','
       << csv_number(x.seconds_t) << ',' << csv_number(x.seconds_mixture) << ',' << csv_field(x.error) << '\n';
  }
  return os.str();
}

std::string rows_csv(const Table5Result& r) {
  std::ostringstream os;
  os << "rep,sampler,acceptance_rate,mean_iact,iact,seconds_per_iteration,estimator_failures,error\n";
  for (const auto& x : r.rows) {
    std::string iacts;
    for (std::size_t j = 0; j < x.iact.size(); ++j) iacts += (j ? ";" : "") + csv_number(x.iact[j]);
    os << x.rep << ',' << csv_field(x.sampler) << ',' << csv_number(x.acceptance_rate) << ','
       << csv_number(x.mean_iact) << ',' << csv_field(iacts) << ',' << csv_number(x.seconds_per_iteration) << ','
       << x.estimator_failures << ',' << csv_field(x.error) << '\n';
  }
  return os.str();
}

std::string path_csv(const Fig2Path& p) {
  std::ostringstream os;
  os << "t,log_abs_minor,sign,v\n";
  for (std::size_t t = 0; t < p.trace.sign.size(); ++t) {
    os << t + 1 << ',' << csv_number(p.trace.log_abs_minor[t]) << ',' << p.trace.sign[t] << ',' << csv_number(p.v)
       << '\n';
  }
  return os.str();
}

}  // namespace ris::harness
