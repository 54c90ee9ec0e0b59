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

#ifndef RIS_BAND_LINALG_HPP
#define RIS_BAND_LINALG_HPP

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "ris/rng.hpp"

namespace ris {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Storage tag. A dense matrix is held as a single d x d block.
enum class Storage { kBanded, kDense };

/**
 * Symmetric block-tridiagonal matrix.
 *
 * Holds T diagonal blocks A_tt and T-1 sub-diagonal blocks A_{t+1,t}, each
 * m x m and stored row-major. The super-diagonal is implied by symmetry.
 * Block-diagonal matrices are the special case with zero sub-diagonal
 * blocks; dense matrices use T = 1 with the kDense tag.
 */
class SymBandMatrix {
 public:
  SymBandMatrix() = default;
  SymBandMatrix(std::size_t num_blocks, std::size_t block_size, Storage storage = Storage::kBanded);

  static SymBandMatrix identity(std::size_t dim);
  static SymBandMatrix diagonal(const Vector& diag);
  static SymBandMatrix tridiagonal(const Vector& diag, const Vector& sub);
  /// Dense-tagged copy of a symmetric matrix (upper triangle mirrored from lower).
  static SymBandMatrix dense(const Matrix& a);
  /// Banded copy of `a`; entries outside the block band are dropped.
  static SymBandMatrix banded_from_dense(const Matrix& a, std::size_t block_size);

  [[nodiscard]] std::size_t dim() const noexcept { return num_blocks_ * block_size_; }
  [[nodiscard]] std::size_t block_size() const noexcept { return block_size_; }
  [[nodiscard]] std::size_t num_blocks() const noexcept { return num_blocks_; }
  [[nodiscard]] Storage storage() const noexcept { return storage_; }

  /// Row-major m x m diagonal block t (0-based).
  [[nodiscard]] std::span<double> diag_block(std::size_t t);
  [[nodiscard]] std::span<const double> diag_block(std::size_t t) const;
  /// Row-major m x m block A_{t+1,t} (0-based, t < T-1).
  [[nodiscard]] std::span<double> sub_block(std::size_t t);
  [[nodiscard]] std::span<const double> sub_block(std::size_t t) const;

  /// Element access in global coordinates; zero outside the band.
  [[nodiscard]] double operator()(std::size_t row, std::size_t col) const;
  void set(std::size_t row, std::size_t col, double value);

  [[nodiscard]] Matrix to_dense() const;
  [[nodiscard]] Vector diagonal_entries() const;
  [[nodiscard]] bool all_finite() const;
  [[nodiscard]] double max_abs_diagonal() const;
  [[nodiscard]] bool same_layout(const SymBandMatrix& other) const noexcept;

  [[nodiscard]] Vector multiply(const Vector& x) const;
  /// (min, max) Gershgorin bounds on the spectrum.
  [[nodiscard]] std::pair<double, double> gershgorin_bounds() const;

  SymBandMatrix& operator+=(const SymBandMatrix& other);
  SymBandMatrix& operator-=(const SymBandMatrix& other);
  SymBandMatrix& operator*=(double s);
  SymBandMatrix& add_identity(double s);

  [[nodiscard]] const std::vector<double>& diag_storage() const noexcept { return diag_; }
  [[nodiscard]] const std::vector<double>& sub_storage() const noexcept { return sub_; }

 private:
  std::size_t num_blocks_ = 0;
  std::size_t block_size_ = 0;
  Storage storage_ = Storage::kBanded;
  std::vector<double> diag_;
  std::vector<double> sub_;
};

// Mixed-layout arithmetic falls back to dense storage.
[[nodiscard]] SymBandMatrix operator+(const SymBandMatrix& a, const SymBandMatrix& b);
[[nodiscard]] SymBandMatrix operator-(const SymBandMatrix& a, const SymBandMatrix& b);
[[nodiscard]] SymBandMatrix operator*(double s, const SymBandMatrix& a);

/**
 * Block Cholesky factor A = L L' of a SymBandMatrix.
 *
 * L is block lower-bidiagonal: lower-triangular pivot blocks L_tt and fill
 * blocks L_{t+1,t}. When the factorization breaks down, `success` is false
 * and `failed_block` / `failed_row` give the 1-based block row and scalar
 * row of the first non-positive pivot.
 */
struct BandCholesky {
  std::size_t num_blocks = 0;
  std::size_t block_size = 0;
  std::vector<double> pivots;
  std::vector<double> fill;
  bool success = false;
  std::size_t failed_block = 0;
  std::size_t failed_row = 0;
  double log_determinant = 0.0;  // set on success

  [[nodiscard]] std::size_t dim() const noexcept { return num_blocks * block_size; }
  [[nodiscard]] double log_det() const noexcept { return log_determinant; }
  /// Solves L y = b.
  [[nodiscard]] Vector solve_lower(const Vector& b) const;
  /// Solves L' x = y.
  [[nodiscard]] Vector solve_upper(const Vector& y) const;
  /// Solves A x = b.
  [[nodiscard]] Vector solve(const Vector& b) const;
  /// Computes L' v.
  [[nodiscard]] Vector multiply_upper(const Vector& v) const;
  [[nodiscard]] Matrix lower_dense() const;
};

/// Relative pivot floor: a pivot <= kPivotFloor * max|diag(A)| counts as breakdown.
inline constexpr double kPivotFloor = 1e-12;

[[nodiscard]] BandCholesky factorize(const SymBandMatrix& a);

/// Throws NotPositiveDefinite when `a` is not positive definite.
[[nodiscard]] BandCholesky factorize_or_throw(const SymBandMatrix& a, const char* what = "matrix");

/// Number of eigenvalues of `a` strictly below `shift` (block LDL' inertia count).
[[nodiscard]] std::size_t count_eigenvalues_below(const SymBandMatrix& a, double shift);

/// Smallest eigenvalue by bisection on the inertia count, bracketed by Gershgorin bounds.
[[nodiscard]] double smallest_eigenvalue(const SymBandMatrix& a, double tol = 1e-10);

/// x = mean + L'^{-1} z with z standard normal; one draw per call.
[[nodiscard]] Vector sample_gaussian(const Vector& mean, const BandCholesky& chol, Rng& rng);

/// `count` draws from N(mean, precision^{-1}).
[[nodiscard]] std::vector<Vector> sample_gaussian(const Vector& mean, const SymBandMatrix& precision,
                                                  Rng& rng, std::size_t count);

/// Exact multivariate normal log-density with precision parameterization.
[[nodiscard]] double log_density(const Vector& x, const Vector& mean, const SymBandMatrix& precision);
[[nodiscard]] double log_density(const Vector& x, const Vector& mean, const BandCholesky& chol);

}  // namespace ris

#endif  // RIS_BAND_LINALG_HPP
