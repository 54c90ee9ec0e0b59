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

#include "ris/inference.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

#include "ris/error.hpp"
#include "ris/rng.hpp"

namespace ris {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

}  // namespace

Vector ParameterVector::to_natural() const {
  Vector psi(static_cast<Eigen::Index>(size()));
  psi.head(beta.size()) = beta;
  psi[beta.size()] = phi;
  psi[beta.size() + 1] = sigma2;
  return psi;
}

Vector ParameterVector::to_unconstrained() const {
  require(std::abs(phi) < 1.0 && sigma2 > 0.0, "ParameterVector: need |phi| < 1 and sigma2 > 0");
  Vector theta = to_natural();
  theta[beta.size()] = std::atanh(phi);
  theta[beta.size() + 1] = std::log(sigma2);
  return theta;
}

ParameterVector ParameterVector::from_unconstrained(const Vector& theta) {
  require(theta.size() >= 3, "ParameterVector: need at least one coefficient plus phi and sigma2");
  const Eigen::Index p = theta.size() - 2;
  return ParameterVector{theta.head(p), std::tanh(theta[p]), std::exp(theta[p + 1])};
}

ParameterVector ParameterVector::from_natural(const Vector& psi) {
  require(psi.size() >= 3, "ParameterVector: need at least one coefficient plus phi and sigma2");
  const Eigen::Index p = psi.size() - 2;
  return ParameterVector{psi.head(p), psi[p], psi[p + 1]};
}

std::vector<std::string> ParameterVector::names() const {
  std::vector<std::string> out;
  for (Eigen::Index j = 0; j < beta.size(); ++j) out.push_back("beta" + std::to_string(j + 1));
  out.emplace_back("phi");
  out.emplace_back("sigma2");
  return out;
}

double log_prior_natural(const ParameterVector& psi, double beta_variance) {
  require(beta_variance > 0.0, "log_prior_natural: beta variance must be positive");
  if (!(std::abs(psi.phi) < 1.0) || !(psi.sigma2 > 0.0)) return kNegInf;
  const auto p = static_cast<double>(psi.beta.size());
  return -0.5 * p * std::log(2.0 * std::numbers::pi * beta_variance) -
         0.5 * psi.beta.squaredNorm() / beta_variance - 0.5 * std::log1p(-psi.phi * psi.phi) - std::log(psi.sigma2);
}

double log_prior(const Vector& theta, double beta_variance) {
  const ParameterVector psi = ParameterVector::from_unconstrained(theta);
  if (!(std::abs(psi.phi) < 1.0) || !(psi.sigma2 > 0.0) || !std::isfinite(psi.sigma2)) return kNegInf;
  const double z = std::abs(theta[theta.size() - 2]);
  // log(1 - tanh^2 z) without cancellation.
  const double log_jac_phi = std::log(4.0) - 2.0 * z - 2.0 * std::log1p(std::exp(-2.0 * z));
  const double log_jac_sigma2 = theta[theta.size() - 1];
  const auto p = static_cast<double>(psi.beta.size());
  return -0.5 * p * std::log(2.0 * std::numbers::pi * beta_variance) - 0.5 * psi.beta.squaredNorm() / beta_variance -
         0.5 * log_jac_phi - std::log(psi.sigma2) + log_jac_phi + log_jac_sigma2;
}

// ---------------------------------------------------------------------------

std::string to_string(SamplerKind kind) {
  switch (kind) {
    case SamplerKind::kGaussian: return "gaussian";
    case SamplerKind::kStudentT: return "t";
    case SamplerKind::kMixture: return "mixture";
    case SamplerKind::kImposedMixture: return "imposed";
  }
  return "unknown";
}

SamplerKind sampler_from_string(const std::string& name) {
  if (name == "gaussian" || name == "normal" || name == "spdk") return SamplerKind::kGaussian;
  if (name == "t" || name == "student") return SamplerKind::kStudentT;
  if (name == "mixture" || name == "nth-is") return SamplerKind::kMixture;
  if (name == "imposed") return SamplerKind::kImposedMixture;
  throw Error(ErrorCode::kInvalidInput, "unknown sampler '" + name + "'");
}

SsmDensity build_ssm_density(const MeasurementModel& model, const GaussianPrior& prior, const Ar1Spec& spec,
                             const SamplerConfig& config) {
  require(model.dim() == spec.length() && prior.dim() == spec.length(), "build_ssm_density: length mismatch");
  SsmDensity out;
  out.fit = spdk_fit(model, prior);
  const SymBandMatrix& q = prior.precision();
  const double n = config.order.n;
  out.condition_holds = n <= 1.0 || factorize(q - (n - 1.0) * out.fit.c).success;

  const Vector mean = approximating_mean(out.fit, prior);
  SymBandMatrix q_star = out.fit.c + q;
  switch (config.kind) {
    case SamplerKind::kGaussian:
      out.density = std::make_unique<GaussianProposal>(mean, std::move(q_star));
      break;
    case SamplerKind::kStudentT:
      out.density = std::make_unique<StudentTProposal>(mean, std::move(q_star), config.nu);
      break;
    case SamplerKind::kMixture:
      out.density = std::make_unique<MixtureProposal>(
          build_mixture(mean, q_star, q, config.order, config.pi, config.clamp));
      break;
    case SamplerKind::kImposedMixture: {
      if (n <= 1.0) {
        out.density = std::make_unique<MixtureProposal>(build_ssm_mixture(out.fit, out.fit, prior, config.pi));
        break;
      }
      const ScalarImposition imposed = impose_scalar(out.fit, spec, n, config.eps_inflate);
      out.imposition_steps = imposed.steps;
      out.density = std::make_unique<MixtureProposal>(build_ssm_mixture(out.fit, imposed.fit, prior, config.pi));
      break;
    }
  }
  return out;
}

PanelLikelihood estimate_panel_likelihood(const PanelData& data, const ParameterVector& psi,
                                          const SamplerConfig& config, std::uint64_t seed, bool keep_weights) {
  require(data.num_panels() > 0, "estimate_panel_likelihood: no panels");
  require(static_cast<std::size_t>(psi.beta.size()) == data.num_covariates(),
          "estimate_panel_likelihood: beta length must match covariates");
  PanelLikelihood out;
  out.panel_log_values.reserve(data.num_panels());
  for (std::size_t i = 0; i < data.num_panels(); ++i) {
    try {
      const Vector offsets = data.covariates[i] * psi.beta;
      std::unique_ptr<MeasurementModel> model;
      if (data.family == PanelFamily::kPoisson) {
        model = std::make_unique<PoissonSsmModel>(data.counts[i], offsets);
      } else {
        model = std::make_unique<GaussianMeasurementModel>((data.responses[i] - offsets).eval(),
                                                           Vector::Constant(offsets.size(), data.gaussian_variance));
      }
      const Ar1Spec spec(0.0, psi.phi, psi.sigma2, data.length(i));
      auto [mean, precision] = ar1_precision(spec);
      const GaussianPrior prior(std::move(mean), std::move(precision));
      const SsmDensity density = build_ssm_density(*model, prior, spec, config);
      const GaussianLatentTarget target(*model, prior);
      LikelihoodEstimate est = estimate_likelihood(target, *density.density, config.samples, derive_seed(seed, i));
      out.log_value += est.log_value;
      out.panel_log_values.push_back(est.log_value);
      if (keep_weights) {
        est.weights.tag = to_string(config.kind);
        out.weights.push_back(std::move(est.weights));
      }
    } catch (const Error& e) {
      throw Error(e.code(), "panel " + std::to_string(i) + ": " + e.what());
    }
  }
  return out;
}

LikelihoodEstimate estimate_ssm_likelihood(const std::vector<int>& y, const ParameterVector& psi,
                                           const SamplerConfig& config, std::uint64_t seed) {
  require(psi.beta.size() == 1, "estimate_ssm_likelihood: expects a single intercept");
  const PoissonSsmModel model(y, psi.beta[0]);
  const Ar1Spec spec(0.0, psi.phi, psi.sigma2, y.size());
  auto [mean, precision] = ar1_precision(spec);
  const GaussianPrior prior(std::move(mean), std::move(precision));
  const SsmDensity density = build_ssm_density(model, prior, spec, config);
  const GaussianLatentTarget target(model, prior);
  LikelihoodEstimate est = estimate_likelihood(target, *density.density, config.samples, seed);
  est.weights.tag = to_string(config.kind);
  return est;
}

// ---------------------------------------------------------------------------

PmmhResult run_pmmh(const LogLikelihoodEstimator& log_lik, const LogDensityFn& log_prior_fn, const Vector& theta0,
                    const PmmhConfig& config) {
  require(theta0.size() > 0, "run_pmmh: empty starting point");
  require(config.iterations > 0, "run_pmmh: need at least one kept iteration");
  const auto start_time = std::chrono::steady_clock::now();
  const Eigen::Index d = theta0.size();
  const double dim = static_cast<double>(d);

  Rng rng(derive_seed(config.seed, 0));
  std::normal_distribution<double> normal(0.0, 1.0);

  Vector theta = theta0;
  double lp = log_prior_fn(theta);
  require(lp > kNegInf, "run_pmmh: starting point has zero prior density");
  double ll = log_lik(theta, derive_seed(config.seed, 2, 0));
  require(std::isfinite(ll), "run_pmmh: non-finite likelihood estimate at the starting point");

  PmmhResult out;
  out.chain.resize(static_cast<Eigen::Index>(config.iterations), d);
  out.log_post.reserve(config.iterations);
  out.accepted.reserve(config.iterations);

  // Running mean and scatter of visited states for the adaptive proposal.
  Vector run_mean = Vector::Zero(d);
  Matrix scatter = Matrix::Zero(d, d);
  std::size_t visited = 0;
  const Matrix fixed_factor = Matrix::Identity(d, d) * (config.initial_scale / std::sqrt(dim));
  const double adapt_scale = 2.38 * 2.38 / dim;

  std::size_t kept_accepts = 0;
  const std::size_t total = config.burn_in + config.iterations;
  Vector z(d);
  for (std::size_t it = 0; it < total; ++it) {
    Matrix factor = fixed_factor;
    if (it >= config.adapt_start && visited > 1) {
      const Matrix cov = adapt_scale * (scatter / static_cast<double>(visited - 1) +
                                        config.jitter * Matrix::Identity(d, d));
      Eigen::LLT<Matrix> llt(cov);
      if (llt.info() == Eigen::Success) factor = llt.matrixL();
    }
    for (Eigen::Index j = 0; j < d; ++j) z[j] = normal(rng);
    const Vector proposal = theta + factor * z;
    const double log_u = std::log(uniform01(rng));

    bool accept = false;
    const double lp_new = log_prior_fn(proposal);
    if (lp_new > kNegInf) {
      try {
        const double ll_new = log_lik(proposal, derive_seed(config.seed, 1, it));
        if (std::isfinite(ll_new) && log_u < (ll_new + lp_new) - (ll + lp)) {
          theta = proposal;
          ll = ll_new;
          lp = lp_new;
          accept = true;
        }
      } catch (const Error&) {
        ++out.estimator_failures;
      }
    }

    ++visited;
    const Vector delta = theta - run_mean;
    run_mean += delta / static_cast<double>(visited);
    scatter += delta * (theta - run_mean).transpose();

    if (it >= config.burn_in) {
      const auto row = static_cast<Eigen::Index>(it - config.burn_in);
      out.chain.row(row) = theta.transpose();
      out.log_post.push_back(ll + lp);
      out.accepted.push_back(accept ? 1 : 0);
      if (accept) ++kept_accepts;
    }
  }
  out.acceptance_rate = static_cast<double>(kept_accepts) / static_cast<double>(config.iterations);
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_time).count();
  return out;
}

ChainDiagnostics chain_diagnostics(const Matrix& chain) {
  ChainDiagnostics out;
  double sum = 0.0;
  for (Eigen::Index j = 0; j < chain.cols(); ++j) {
    std::vector<double> col(chain.col(j).data(), chain.col(j).data() + chain.rows());
    IactResult r;
    try {
      r = iact(col);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kConstantChain) throw;
      r.estimate = std::numeric_limits<double>::infinity();
    }
    sum += r.estimate;
    out.iact.push_back(std::move(r));
  }
  out.mean_iact = chain.cols() > 0 ? sum / static_cast<double>(chain.cols()) : 0.0;
  return out;
}

Matrix natural_chain(const Matrix& unconstrained) {
  Matrix out(unconstrained.rows(), unconstrained.cols());
  for (Eigen::Index r = 0; r < unconstrained.rows(); ++r) {
    out.row(r) = ParameterVector::from_unconstrained(unconstrained.row(r).transpose()).to_natural().transpose();
  }
  return out;
}

PanelMcmcResult run_panel_pmmh(const PanelData& data, const ParameterVector& start, const SamplerConfig& sampler,
                               const PmmhConfig& config) {
  const LogLikelihoodEstimator log_lik = [&](const Vector& theta, std::uint64_t seed) {
    return estimate_panel_likelihood(data, ParameterVector::from_unconstrained(theta), sampler, seed).log_value;
  };
  const LogDensityFn prior = [](const Vector& theta) { return log_prior(theta); };
  PanelMcmcResult out;
  out.run = run_pmmh(log_lik, prior, start.to_unconstrained(), config);
  out.natural = natural_chain(out.run.chain);
  out.diagnostics = chain_diagnostics(out.natural);
  return out;
}

void write_chain_csv(std::ostream& out, const Matrix& natural, const std::vector<std::string>& names,
                     const PmmhResult& run) {
  require(static_cast<Eigen::Index>(names.size()) == natural.cols(), "write_chain_csv: name count mismatch");
  out << "iter";
  for (const auto& n : names) out << ',' << n;
  out << ",log_post_est,accepted\n";
  std::ostringstream line;
  line.precision(17);
  for (Eigen::Index r = 0; r < natural.rows(); ++r) {
    line.str("");
    line << r + 1;
    for (Eigen::Index c = 0; c < natural.cols(); ++c) line << ',' << natural(r, c);
    line << ',' << run.log_post[static_cast<std::size_t>(r)] << ',' << static_cast<int>(run.accepted[static_cast<std::size_t>(r)]);
    out << line.str() << '\n';
  }
}

}  // namespace ris
