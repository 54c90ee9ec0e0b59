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

#ifndef RIS_PROPOSAL_HPP
#define RIS_PROPOSAL_HPP

#include <cstddef>
#include <memory>
#include <utility>
#include <vector>

#include "ris/band_linalg.hpp"
#include "ris/rng.hpp"

namespace ris {

/// A density we can draw from and evaluate; the "g" in an importance weight.
class ImportanceDensity {
 public:
  virtual ~ImportanceDensity() = default;
  [[nodiscard]] virtual std::size_t dim() const = 0;
  [[nodiscard]] virtual Vector sample(Rng& rng) const = 0;
  [[nodiscard]] virtual double log_density(const Vector& x) const = 0;
};

/// N(mean, precision^{-1}). Construction factorizes the precision and throws
/// NotPositiveDefinite when that fails.
class GaussianProposal final : public ImportanceDensity {
 public:
  GaussianProposal(Vector mean, SymBandMatrix precision);

  [[nodiscard]] std::size_t dim() const override { return static_cast<std::size_t>(mean_.size()); }
  [[nodiscard]] Vector sample(Rng& rng) const override;
  [[nodiscard]] double log_density(const Vector& x) const override;

  [[nodiscard]] const Vector& mean() const noexcept { return mean_; }
  [[nodiscard]] const SymBandMatrix& precision() const noexcept { return precision_; }
  [[nodiscard]] const BandCholesky& cholesky() const noexcept { return chol_; }

 private:
  Vector mean_;
  SymBandMatrix precision_;
  BandCholesky chol_;
};

/// Multivariate Student t with location, scale matrix precision^{-1} and nu
/// degrees of freedom. Integer nu draws the chi-square variate from exactly nu
/// normals so the stream consumption does not depend on parameters.
class StudentTProposal final : public ImportanceDensity {
 public:
  StudentTProposal(Vector location, SymBandMatrix precision, double nu);

  [[nodiscard]] std::size_t dim() const override { return static_cast<std::size_t>(location_.size()); }
  [[nodiscard]] Vector sample(Rng& rng) const override;
  [[nodiscard]] double log_density(const Vector& x) const override;

  [[nodiscard]] double nu() const noexcept { return nu_; }
  [[nodiscard]] const Vector& location() const noexcept { return location_; }

 private:
  Vector location_;
  SymBandMatrix precision_;
  BandCholesky chol_;
  double nu_;
  double log_norm_;
};

/// Order of the weight moments to guarantee, plus the clamp margins.
struct MomentOrder {
  double n = 2.0;
  double eps = 1e-5;    // hard-clamp margin
  double delta = 1e-5;  // smoothing width of the C1 clamp

  MomentOrder() = default;
  explicit MomentOrder(double n_, double eps_ = 1e-5, double delta_ = 1e-5);

  /// Largest admissible eigenvalue after clamping, (1 - eps) / (n - 1).
  [[nodiscard]] double tau() const noexcept { return (1.0 - eps) / (n - 1.0); }
};

enum class Clamp { kHard, kSmooth };

inline constexpr double kDefaultMixtureWeight = 0.1;

/// pi * heavy + (1 - pi) * fitted. The heavy component carries the moment
/// guarantee; it is always listed first.
class MixtureProposal final : public ImportanceDensity {
 public:
  MixtureProposal(double pi, GaussianProposal heavy, GaussianProposal fitted);

  [[nodiscard]] std::size_t dim() const override { return heavy_.dim(); }
  [[nodiscard]] Vector sample(Rng& rng) const override;
  [[nodiscard]] double log_density(const Vector& x) const override;

  /// Draw plus the 0-based index of the component it came from.
  [[nodiscard]] std::pair<Vector, int> sample_with_component(Rng& rng) const;

  [[nodiscard]] double pi() const noexcept { return pi_; }
  [[nodiscard]] const GaussianProposal& heavy() const noexcept { return heavy_; }
  [[nodiscard]] const GaussianProposal& fitted() const noexcept { return fitted_; }

 private:
  double pi_;
  GaussianProposal heavy_;
  GaussianProposal fitted_;
};

/// True iff Q* - n (Q* - Q) is positive definite.
[[nodiscard]] bool check_moment_condition(const SymBandMatrix& q_star, const SymBandMatrix& q,
                                          const MomentOrder& order);

/// Clamped eigenvalue of A^{-1} Q* A^{-T} (nQ = AA').
[[nodiscard]] double clamp_eigenvalue(double lambda, const MomentOrder& order, Clamp clamp);

/**
 * Heavier-tailed replacement for Q* satisfying nQ - (n-1) Q~ > 0.
 *
 * Factor nQ = AA', diagonalize A^{-1} Q* A^{-T} = V diag(lambda) V', clamp the
 * eigenvalues and rebuild Q~ = A V diag(lambda~) V' A'. Directions that
 * already satisfy the bound are left alone. Returns Q* itself (same storage)
 * when no eigenvalue needs clamping; otherwise a dense-tagged matrix.
 */
[[nodiscard]] SymBandMatrix modify_precision(const SymBandMatrix& q_star, const SymBandMatrix& q,
                                             const MomentOrder& order, Clamp clamp = Clamp::kHard);

/// Heavy component N(mean, Q~^{-1}) with weight pi, fitted component N(mean, Q*^{-1}).
[[nodiscard]] MixtureProposal build_mixture(const Vector& mean, const SymBandMatrix& q_star, const SymBandMatrix& q,
                                            const MomentOrder& order, double pi = kDefaultMixtureWeight,
                                            Clamp clamp = Clamp::kHard);

[[nodiscard]] inline double mixture_log_density(const MixtureProposal& g, const Vector& x) {
  return g.log_density(x);
}

[[nodiscard]] std::vector<Vector> sample_mixture(const MixtureProposal& g, Rng& rng, std::size_t count);

/// log(exp(a) + exp(b)) without overflow.
[[nodiscard]] double log_add_exp(double a, double b) noexcept;

}  // namespace ris

#endif  // RIS_PROPOSAL_HPP
