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

// ris: command-line driver for simulation, condition checks and the
// likelihood / MCMC studies.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "harness/experiments.hpp"
#include "ris/error.hpp"
#include "ris/inference.hpp"
#include "ris/serialization.hpp"
#include "ris/statespace.hpp"

namespace fs = std::filesystem;
using ris::harness::Json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailures = 1;
constexpr int kExitUsage = 2;

struct Common {
  std::uint64_t seed = ris::harness::kDefaultSeed;
  std::string out = ".";
  bool full_scale = false;
  std::string preset;
};

struct PsiArgs {
  std::vector<double> beta;
  double phi = 0.8;
  double sigma2 = 0.18;
  bool phi_set = false;
  bool sigma2_set = false;

  // Falls back to the generating values recorded in the data set.
  [[nodiscard]] ris::ParameterVector resolve(const ris::Dataset& d) const {
    ris::ParameterVector psi;
    std::vector<double> b = beta;
    if (b.empty() && d.params.count("beta")) b = d.params.at("beta");
    ris::require(!b.empty(), "no --beta given and none recorded in the data set");
    psi.beta = Eigen::Map<const ris::Vector>(b.data(), static_cast<Eigen::Index>(b.size()));
    psi.phi = (!phi_set && d.params.count("phi")) ? d.params.at("phi")[0] : phi;
    psi.sigma2 = (!sigma2_set && d.params.count("sigma2")) ? d.params.at("sigma2")[0] : sigma2;
    return psi;
  }
};

void add_psi(CLI::App* cmd, PsiArgs& psi) {
  cmd->add_option("--beta", psi.beta, "Regression coefficients (default: values stored in the data set)")
      ->delimiter(',');
  cmd->add_option_function<double>(
      "--phi", [&psi](double v) { psi.phi = v, psi.phi_set = true; }, "Autoregressive coefficient");
  cmd->add_option_function<double>(
      "--sigma2", [&psi](double v) { psi.sigma2 = v, psi.sigma2_set = true; }, "Innovation variance");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ris::Error(ris::ErrorCode::kInvalidInput, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw ris::Error(ris::ErrorCode::kInvalidInput, "cannot write '" + path.string() + "'");
  out << text;
}

Json report(const std::string& name, const Common& common, Json config, Json summary) {
  return Json{{"experiment", name},
              {"seed", common.seed},
              {"full_scale", common.full_scale},
              {"preset", common.preset},
              {"config", std::move(config)},
              {"summary", std::move(summary)}};
}

int emit(const std::string& name, const Common& common, Json config, Json summary, const std::string& rows,
         std::size_t failures, std::size_t total) {
  const fs::path dir(common.out);
  write_file(dir / (name + "_replications.csv"), rows);
  const Json doc = report(name, common, std::move(config), std::move(summary));
  write_file(dir / (name + ".json"), doc.dump(2) + "\n");
  std::cout << doc["summary"].dump(2) << "\n";
  return (total > 0 && static_cast<double>(failures) > 0.1 * static_cast<double>(total)) ? kExitFailures : kExitOk;
}

ris::SamplerConfig sampler_config(const std::string& name, std::size_t samples, double n, double pi, double eps) {
  ris::SamplerConfig c;
  c.kind = ris::sampler_from_string(name);
  c.samples = samples;
  c.order = ris::MomentOrder(n);
  c.pi = pi;
  c.eps_inflate = eps;
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robust importance sampling for latent Gaussian models"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "Read options from a TOML/INI file");
  Common common;
  app.add_option("--seed", common.seed, "Master seed")->capture_default_str();
  app.add_option("--out", common.out, "Output directory or file")->capture_default_str();
  app.add_flag("--full-scale", common.full_scale, "Use the full replication counts instead of desk-scale defaults");

  double n_moment = 2.0;
  double pi = ris::kDefaultMixtureWeight;
  double eps_inflate = ris::kDefaultInflation;
  std::size_t samples = 0;
  std::size_t reps = 0;
  std::string sampler = "imposed";

  // simulate
  auto* sim = app.add_subcommand("simulate", "Simulate a Poisson state-space or panel data set (JSON)");
  std::string kind = "ssm";
  std::size_t length = 0, panels = 20;
  PsiArgs sim_psi;
  sim->add_option("--kind", kind, "ssm or panel")->check(CLI::IsMember({"ssm", "panel"}))->capture_default_str();
  sim->add_option("--length", length, "Series length (default 500 for ssm, 20 for panel)");
  sim->add_option("--panels", panels, "Number of panels")->capture_default_str();
  add_psi(sim, sim_psi);

  // check / impose / loglik / mcmc share a data file and psi
  std::string data_path;
  PsiArgs psi_args;
  auto* check = app.add_subcommand("check", "Check the n-th moment condition of the fitted Gaussian proposal");
  auto* impose = app.add_subcommand("impose", "Inflate the approximating model until the moment condition holds");
  auto* loglik = app.add_subcommand("loglik", "Repeated likelihood estimates at one parameter value");
  auto* mcmc = app.add_subcommand("mcmc", "Pseudo-marginal adaptive random-walk Metropolis");
  std::size_t iterations = 5000, burn_in = 5000;
  for (auto* cmd : {check, impose, loglik, mcmc}) {
    cmd->add_option("--data", data_path, "Data set JSON from `simulate`")->required()->check(CLI::ExistingFile);
    add_psi(cmd, psi_args);
    cmd->add_option("--n-moment", n_moment, "Moment order n (default 2)");
  }
  impose->add_option("--eps-inflate", eps_inflate, "Inflation step (default 0.05)");
  impose->add_option("--pi", pi, "Weight on the heavy component (default 0.1)");
  for (auto* cmd : {loglik, mcmc}) {
    cmd->add_option("--sampler", sampler, "normal | t | mixture | imposed")
        ->check(CLI::IsMember({"normal", "gaussian", "t", "mixture", "imposed"}))
        ->capture_default_str();
    cmd->add_option("--samples", samples, "Importance samples per estimate");
    cmd->add_option("--pi", pi, "Weight on the heavy component (default 0.1)");
    cmd->add_option("--eps-inflate", eps_inflate, "Inflation step (default 0.05)");
  }
  loglik->add_option("--reps", reps, "Number of estimates (default 20)");
  mcmc->add_option("--iterations", iterations, "Kept iterations")->capture_default_str();
  mcmc->add_option("--burn-in", burn_in, "Burn-in iterations")->capture_default_str();

  // tables
  auto* t1 = app.add_subcommand("table1", "Bernoulli posterior mean: normal, t and 2nd-moment mixture proposals");
  t1->add_option("--preset", common.preset, "hard (N=100, k=7) or easy (N=100, k=50)")
      ->check(CLI::IsMember({"hard", "easy"}));
  auto* t2 = app.add_subcommand("table2", "Poisson state-space likelihood: fitted vs imposed proposals");
  std::size_t evals = 0;
  t2->add_option("--evals", evals, "Evaluations per data set (default 20, full 100)");
  auto* t3 = app.add_subcommand("table3", "Panel likelihood: t vs 2nd-moment mixture proposals");
  t3->add_option("--evals", evals, "Evaluations per data set (default 20, full 100)");
  auto* t5 = app.add_subcommand("table5", "Panel MCMC: t vs 2nd-moment mixture proposals");
  t5->add_option("--iterations", iterations, "Kept iterations (default 5000, full 50000)");
  t5->add_option("--burn-in", burn_in, "Burn-in iterations (default 5000, full 50000)");
  for (auto* cmd : {t3, t5}) {
    cmd->add_option("--preset", common.preset, "T<length>-<stationary variance>, e.g. T20-1")
        ->check(CLI::IsMember({"T20-0.5", "T20-1", "T50-0.5", "T50-1", "T80-0.5", "T80-1"}));
  }
  for (auto* cmd : {t1, t2, t3, t5}) {
    cmd->add_option("--reps", reps, "Replications / data sets");
    cmd->add_option("--samples", samples, "Importance samples per estimate");
    cmd->add_option("--n-moment", n_moment, "Moment order n (default 2)");
    cmd->add_option("--pi", pi, "Weight on the heavy component (default 0.1)");
  }
  t2->add_option("--eps-inflate", eps_inflate, "Inflation step (default 0.05)");

  auto* f2 = app.add_subcommand("fig2", "Leading-minor paths for constant measurement variances");
  std::vector<double> fig_v{5.0, 10.0, 25.0, 40.0};
  f2->add_option("--v", fig_v, "Constant variances")->delimiter(',')->capture_default_str();
  f2->add_option("--n-moment", n_moment, "Moment order n (default 2)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*sim) {
      ris::Dataset d;
      if (kind == "ssm") {
        const double beta = sim_psi.beta.empty() ? -1.4 : sim_psi.beta[0];
        d = ris::harness::simulate_poisson_ssm(beta, sim_psi.phi, sim_psi.sigma2, length ? length : 500, common.seed);
      } else {
        std::vector<double> b = sim_psi.beta.empty() ? std::vector<double>{1.4, -1.0} : sim_psi.beta;
        ris::require(b.size() == 2, "panel simulation needs two coefficients");
        const double s2 = sim_psi.sigma2_set ? sim_psi.sigma2 : 1.0 - sim_psi.phi * sim_psi.phi;
        d = ris::harness::simulate_panel(panels, length ? length : 20, Eigen::Map<const ris::Vector>(b.data(), 2),
                                         sim_psi.phi, s2, common.seed);
      }
      const std::string text = ris::to_json(d) + "\n";
      if (common.out == "." || common.out == "-") {
        std::cout << text;
      } else {
        write_file(common.out, text);
      }
      return kExitOk;
    }

    if (*check || *impose || *loglik || *mcmc) {
      const ris::Dataset data = ris::dataset_from_json(read_file(data_path));
      const ris::ParameterVector psi = psi_args.resolve(data);
      ris::require(data.type != "glmm_poisson", "this subcommand needs a state-space or panel data set");
      const bool panel = data.type == "panel_poisson";
      const ris::PanelData pd =
          panel ? ris::to_panel_data(data) : ris::PanelData{data.y, {}, {ris::Matrix::Ones(
                                                                             static_cast<Eigen::Index>(data.y[0].size()), 1)}};

      if (*check || *impose) {
        ris::SamplerConfig cfg = sampler_config("imposed", 1, n_moment, pi, eps_inflate);
        Json verdicts = Json::array();
        bool all_hold = true;
        for (std::size_t i = 0; i < pd.num_panels(); ++i) {
          const ris::PoissonSsmModel model(pd.counts[i], (pd.covariates[i] * psi.beta).eval());
          const ris::Ar1Spec spec(0.0, psi.phi, psi.sigma2, pd.length(i));
          auto [mean, prec] = ris::ar1_precision(spec);
          const ris::GaussianPrior prior(std::move(mean), std::move(prec));
          const ris::SpdkFit fit = ris::spdk_fit(model, prior);
          const auto trace = ris::sylvester_check(spec, fit.variances(), n_moment);
          Json entry{{"series", i}, {"condition_holds", trace.positive_definite}, {"spdk_iterations", fit.iterations}};
          if (*impose && n_moment > 1.0) {
            const auto imposed = ris::impose_scalar(fit, spec, n_moment, eps_inflate);
            const auto after = ris::sylvester_check(spec, imposed.fit.variances(), n_moment);
            entry["imposition_steps"] = imposed.steps;
            entry["bound"] = imposed.bound;
            entry["condition_holds_after"] = after.positive_definite;
            entry["proposal"] = Json::parse(ris::to_json(ris::build_ssm_mixture(fit, imposed.fit, prior, cfg.pi)));
          }
          all_hold = all_hold && trace.positive_definite;
          verdicts.push_back(std::move(entry));
        }
        const Json doc{{"experiment", *check ? "check" : "impose"},
                       {"seed", common.seed},
                       {"data", data_path},
                       {"psi", ris::harness::to_json(psi)},
                       {"n_moment", n_moment},
                       {"condition_holds", all_hold},
                       {"series", verdicts}};
        if (common.out != ".") write_file(common.out, doc.dump(2) + "\n");
        Json brief = doc;
        if (*impose)
          for (auto& e : brief["series"]) e.erase("proposal");
        std::cout << brief.dump(2) << "\n";
        return *check && !all_hold ? kExitFailures : kExitOk;
      }

      const ris::SamplerConfig cfg = sampler_config(sampler, samples ? samples : (panel ? 200 : 10000), n_moment, pi,
                                                    eps_inflate);
      if (*loglik) {
        const std::size_t n_reps = reps ? reps : 20;
        std::ostringstream rows;
        rows << "rep,log_likelihood,error\n";
        std::vector<double> values;
        std::size_t failures = 0;
        for (std::size_t r = 0; r < n_reps; ++r) {
          try {
            const double v = ris::estimate_panel_likelihood(pd, psi, cfg, ris::derive_seed(common.seed, r)).log_value;
            values.push_back(v);
            rows << r << ',' << ris::harness::csv_number(v) << ",\n";
          } catch (const ris::Error& e) {
            ++failures;
            rows << r << ",," << ris::harness::csv_field(e.what()) << '\n';
          }
        }
        double mean = 0.0, sd = 0.0;
        for (double v : values) mean += v / static_cast<double>(values.size());
        for (double v : values) sd += (v - mean) * (v - mean);
        sd = values.size() > 1 ? std::sqrt(sd / static_cast<double>(values.size() - 1)) : 0.0;
        const Json config{{"data", data_path}, {"psi", ris::harness::to_json(psi)}, {"sampler", sampler},
                          {"samples", cfg.samples}, {"reps", n_reps}, {"n_moment", n_moment}, {"pi", pi}};
        return emit("loglik", common, config, Json{{"mean", mean}, {"sd", sd}, {"failures", failures}}, rows.str(),
                    failures, n_reps);
      }

      // mcmc
      ris::PmmhConfig pm;
      pm.iterations = iterations;
      pm.burn_in = burn_in;
      pm.seed = common.seed;
      const ris::PanelMcmcResult res = ris::run_panel_pmmh(pd, psi, cfg, pm);
      std::ostringstream chain;
      ris::write_chain_csv(chain, res.natural, psi.names(), res.run);
      write_file(fs::path(common.out) / "chain.csv", chain.str());
      Json iacts = Json::object();
      const auto names = psi.names();
      for (std::size_t j = 0; j < names.size(); ++j) iacts[names[j]] = res.diagnostics.iact[j].estimate;
      const Json doc{{"experiment", "mcmc"},
                     {"seed", common.seed},
                     {"config", {{"data", data_path}, {"start", ris::harness::to_json(psi)}, {"sampler", sampler},
                                 {"samples", cfg.samples}, {"iterations", iterations}, {"burn_in", burn_in},
                                 {"n_moment", n_moment}, {"pi", pi}}},
                     {"acceptance_rate", res.run.acceptance_rate},
                     {"iact", iacts},
                     {"mean_iact", res.diagnostics.mean_iact},
                     {"estimator_failures", res.run.estimator_failures},
                     {"runtime_seconds", res.run.seconds}};
      write_file(fs::path(common.out) / "diagnostics.json", doc.dump(2) + "\n");
      std::cout << doc.dump(2) << "\n";
      return kExitOk;
    }

    if (*t1) {
      ris::harness::Table1Config c;
      if (common.preset == "easy") c.successes = 50;
      if (common.full_scale) c.reps = 100, c.samples = 1000000;
      if (reps) c.reps = reps;
      if (samples) c.samples = samples;
      c.n_moment = n_moment;
      c.pi = pi;
      c.seed = common.seed;
      const auto r = ris::harness::run_table1(c);
      return emit("table1", common, ris::harness::to_json(c), ris::harness::summary_json(r), ris::harness::rows_csv(r),
                  r.failures, r.rows.size());
    }
    if (*t2) {
      ris::harness::Table2Config c;
      if (common.full_scale) c.datasets = 100, c.evaluations = 100;
      if (reps) c.datasets = reps;
      if (evals) c.evaluations = evals;
      if (samples) c.samples = samples;
      c.n_moment = n_moment;
      c.pi = pi;
      c.eps_inflate = eps_inflate;
      c.seed = common.seed;
      const auto r = ris::harness::run_table2(c);
      return emit("table2", common, ris::harness::to_json(c), ris::harness::summary_json(r), ris::harness::rows_csv(r),
                  r.failures, r.rows.size());
    }
    auto apply_preset = [&](std::size_t& len, double& s2a) {
      if (common.preset.empty()) return;
      const auto dash = common.preset.find('-');
      len = std::stoul(common.preset.substr(1, dash - 1));
      s2a = std::stod(common.preset.substr(dash + 1));
    };
    if (*t3) {
      ris::harness::Table3Config c;
      apply_preset(c.length, c.stationary_variance);
      if (common.full_scale) c.datasets = 100, c.evaluations = 100;
      if (reps) c.datasets = reps;
      if (evals) c.evaluations = evals;
      if (samples) c.samples = samples;
      c.n_moment = n_moment;
      c.pi = pi;
      c.seed = common.seed;
      const auto r = ris::harness::run_table3(c);
      return emit("table3", common, ris::harness::to_json(c), ris::harness::summary_json(r), ris::harness::rows_csv(r),
                  r.failures, r.rows.size());
    }
    if (*t5) {
      ris::harness::Table5Config c;
      apply_preset(c.length, c.stationary_variance);
      if (common.full_scale) c.reps = 5, c.iterations = 50000, c.burn_in = 50000;
      if (reps) c.reps = reps;
      if (t5->count("--iterations")) c.iterations = iterations;
      if (t5->count("--burn-in")) c.burn_in = burn_in;
      if (samples) c.samples = samples;
      c.n_moment = n_moment;
      c.pi = pi;
      c.seed = common.seed;
      const auto r = ris::harness::run_table5(c);
      return emit("table5", common, ris::harness::to_json(c), ris::harness::summary_json(r), ris::harness::rows_csv(r),
                  r.failures, r.rows.size());
    }
    if (*f2) {
      ris::harness::Fig2Config c;
      c.variances = fig_v;
      c.n_moment = n_moment;
      const auto paths = ris::harness::run_fig2(c);
      Json summary = Json::array();
      for (const auto& p : paths) {
        std::ostringstream name;
        name << "fig2_v" << p.v << ".csv";
        write_file(fs::path(common.out) / name.str(), ris::harness::path_csv(p));
        summary.push_back(Json{{"v", p.v}, {"sign_change", p.trace.changes_sign()}, {"file", name.str()}});
      }
      const Json doc = report("fig2", common, ris::harness::to_json(c), summary);
      write_file(fs::path(common.out) / "fig2.json", doc.dump(2) + "\n");
      std::cout << summary.dump(2) << "\n";
      return kExitOk;
    }
  } catch (const ris::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == ris::ErrorCode::kInvalidInput ? kExitUsage : kExitFailures;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailures;
  }
  return kExitUsage;
}
