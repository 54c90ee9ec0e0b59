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

#include "ris/band_linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "ris/error.hpp"

namespace ris {
namespace {

// In-place lower Cholesky of a row-major m x m block. Returns the index of the
// failing pivot, or m on success. The strict upper triangle is zeroed.
std::size_t chol_block(double* a, std::size_t m, double floor) {
  for (std::size_t j = 0; j < m; ++j) {
    double pivot = a[j * m + j];
    for (std::size_t k = 0; k < j; ++k) pivot -= a[j * m + k] * a[j * m + k];
    if (!(pivot > floor)) return j;
    const double ljj = std::sqrt(pivot);
    a[j * m + j] = ljj;
    for (std::size_t i = j + 1; i < m; ++i) {
      double s = a[i * m + j];
      for (std::size_t k = 0; k < j; ++k) s -= a[i * m + k] * a[j * m + k];
      a[i * m + j] = s / ljj;
    }
    for (std::size_t i = 0; i < j; ++i) a[i * m + j] = 0.0;
  }
  return m;
}

// Solves L y = b in place (L lower, row-major).
void lower_solve(const double* l, std::size_t m, double* b) {
  for (std::size_t i = 0; i < m; ++i) {
    double s = b[i];
    for (std::size_t k = 0; k < i; ++k) s -= l[i * m + k] * b[k];
    b[i] = s / l[i * m + i];
  }
}

// Solves L' x = b in place.
void upper_solve(const double* l, std::size_t m, double* b) {
  for (std::size_t ii = m; ii-- > 0;) {
    double s = b[ii];
    for (std::size_t k = ii + 1; k < m; ++k) s -= l[k * m + ii] * b[k];
    b[ii] = s / l[ii * m + ii];
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// SymBandMatrix

SymBandMatrix::SymBandMatrix(std::size_t num_blocks, std::size_t block_size, Storage storage)
    : num_blocks_(num_blocks),
      block_size_(block_size),
      storage_(storage),
      diag_(num_blocks * block_size * block_size, 0.0),
      sub_(num_blocks > 0 ? (num_blocks - 1) * block_size * block_size : 0, 0.0) {
  require(num_blocks > 0 && block_size > 0, "SymBandMatrix needs positive dimensions");
  require(storage == Storage::kBanded || num_blocks == 1, "dense storage uses a single block");
}

SymBandMatrix SymBandMatrix::identity(std::size_t dim) {
  SymBandMatrix a(dim, 1);
  std::fill(a.diag_.begin(), a.diag_.end(), 1.0);
  return a;
}

SymBandMatrix SymBandMatrix::diagonal(const Vector& diag) {
  SymBandMatrix a(static_cast<std::size_t>(diag.size()), 1);
  for (Eigen::Index i = 0; i < diag.size(); ++i) a.diag_[i] = diag[i];
  return a;
}

SymBandMatrix SymBandMatrix::tridiagonal(const Vector& diag, const Vector& sub) {
  require(sub.size() + 1 == diag.size(), "tridiagonal: sub-diagonal length must be d-1");
  SymBandMatrix a = diagonal(diag);
  for (Eigen::Index i = 0; i < sub.size(); ++i) a.sub_[i] = sub[i];
  return a;
}

SymBandMatrix SymBandMatrix::dense(const Matrix& a) {
  require(a.rows() == a.cols() && a.rows() > 0, "dense: matrix must be square and non-empty");
  const auto d = static_cast<std::size_t>(a.rows());
  SymBandMatrix out(1, d, Storage::kDense);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      out.diag_[i * d + j] = a(i, j);
      out.diag_[j * d + i] = a(i, j);
    }
  }
  return out;
}

SymBandMatrix SymBandMatrix::banded_from_dense(const Matrix& a, std::size_t block_size) {
  require(a.rows() == a.cols(), "banded_from_dense: matrix must be square");
  require(block_size > 0 && a.rows() % static_cast<Eigen::Index>(block_size) == 0,
          "banded_from_dense: dimension must be a multiple of the block size");
  const std::size_t m = block_size;
  SymBandMatrix out(static_cast<std::size_t>(a.rows()) / m, m);
  for (std::size_t t = 0; t < out.num_blocks_; ++t) {
    auto db = out.diag_block(t);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j) {
        // Symmetrize from the lower triangle.
        const auto r = static_cast<Eigen::Index>(t * m + std::max(i, j));
        const auto c = static_cast<Eigen::Index>(t * m + std::min(i, j));
        db[i * m + j] = a(r, c);
      }
    if (t + 1 < out.num_blocks_) {
      auto sb = out.sub_block(t);
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j)
          sb[i * m + j] = a(static_cast<Eigen::Index>((t + 1) * m + i), static_cast<Eigen::Index>(t * m + j));
    }
  }
  return out;
}

std::span<double> SymBandMatrix::diag_block(std::size_t t) {
  const std::size_t mm = block_size_ * block_size_;
  return {diag_.data() + t * mm, mm};
}

std::span<const double> SymBandMatrix::diag_block(std::size_t t) const {
  const std::size_t mm = block_size_ * block_size_;
  return {diag_.data() + t * mm, mm};
}

std::span<double> SymBandMatrix::sub_block(std::size_t t) {
  const std::size_t mm = block_size_ * block_size_;
  return {sub_.data() + t * mm, mm};
}

std::span<const double> SymBandMatrix::sub_block(std::size_t t) const {
  const std::size_t mm = block_size_ * block_size_;
  return {sub_.data() + t * mm, mm};
}

double SymBandMatrix::operator()(std::size_t row, std::size_t col) const {
  const std::size_t m = block_size_;
  std::size_t br = row / m;
  std::size_t bc = col / m;
  std::size_t i = row % m;
  std::size_t j = col % m;
  if (br == bc) return diag_[(br * m + i) * m + j];
  if (br < bc) {
    std::swap(br, bc);
    std::swap(i, j);
  }
  if (br != bc + 1) return 0.0;
  return sub_[(bc * m + i) * m + j];
}

void SymBandMatrix::set(std::size_t row, std::size_t col, double value) {
  const std::size_t m = block_size_;
  std::size_t br = row / m;
  std::size_t bc = col / m;
  std::size_t i = row % m;
  std::size_t j = col % m;
  if (br == bc) {
    diag_[(br * m + i) * m + j] = value;
    diag_[(br * m + j) * m + i] = value;
    return;
  }
  if (br < bc) {
    std::swap(br, bc);
    std::swap(i, j);
  }
  require(br == bc + 1, "set: entry outside the block band");
  sub_[(bc * m + i) * m + j] = value;
}

Matrix SymBandMatrix::to_dense() const {
  const auto d = static_cast<Eigen::Index>(dim());
  const std::size_t m = block_size_;
  Matrix out = Matrix::Zero(d, d);
  for (std::size_t t = 0; t < num_blocks_; ++t) {
    const auto db = diag_block(t);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j)
        out(static_cast<Eigen::Index>(t * m + i), static_cast<Eigen::Index>(t * m + j)) = db[i * m + j];
    if (t + 1 < num_blocks_) {
      const auto sb = sub_block(t);
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) {
          const auto r = static_cast<Eigen::Index>((t + 1) * m + i);
          const auto c = static_cast<Eigen::Index>(t * m + j);
          out(r, c) = sb[i * m + j];
          out(c, r) = sb[i * m + j];
        }
    }
  }
  return out;
}

Vector SymBandMatrix::diagonal_entries() const {
  const std::size_t m = block_size_;
  Vector out(static_cast<Eigen::Index>(dim()));
  for (std::size_t t = 0; t < num_blocks_; ++t)
    for (std::size_t i = 0; i < m; ++i) out[static_cast<Eigen::Index>(t * m + i)] = diag_[(t * m + i) * m + i];
  return out;
}

bool SymBandMatrix::all_finite() const {
  auto finite = [](double v) { return std::isfinite(v); };
  return std::all_of(diag_.begin(), diag_.end(), finite) && std::all_of(sub_.begin(), sub_.end(), finite);
}

double SymBandMatrix::max_abs_diagonal() const {
  double out = 0.0;
  const std::size_t m = block_size_;
  for (std::size_t t = 0; t < num_blocks_; ++t)
    for (std::size_t i = 0; i < m; ++i) out = std::max(out, std::abs(diag_[(t * m + i) * m + i]));
  return out;
}

bool SymBandMatrix::same_layout(const SymBandMatrix& other) const noexcept {
  return num_blocks_ == other.num_blocks_ && block_size_ == other.block_size_ && storage_ == other.storage_;
}

Vector SymBandMatrix::multiply(const Vector& x) const {
  require(static_cast<std::size_t>(x.size()) == dim(), "multiply: dimension mismatch");
  const std::size_t m = block_size_;
  Vector y = Vector::Zero(x.size());
  const double* xp = x.data();
  double* yp = y.data();
  for (std::size_t t = 0; t < num_blocks_; ++t) {
    const double* db = diag_.data() + t * m * m;
    for (std::size_t i = 0; i < m; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < m; ++j) s += db[i * m + j] * xp[t * m + j];
      yp[t * m + i] += s;
    }
    if (t + 1 < num_blocks_) {
      const double* sb = sub_.data() + t * m * m;
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) {
          yp[(t + 1) * m + i] += sb[i * m + j] * xp[t * m + j];
          yp[t * m + j] += sb[i * m + j] * xp[(t + 1) * m + i];
        }
    }
  }
  return y;
}

std::pair<double, double> SymBandMatrix::gershgorin_bounds() const {
  const std::size_t m = block_size_;
  std::vector<double> radius(dim(), 0.0);
  for (std::size_t t = 0; t < num_blocks_; ++t) {
    const double* db = diag_.data() + t * m * m;
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j)
        if (i != j) radius[t * m + i] += std::abs(db[i * m + j]);
    if (t + 1 < num_blocks_) {
      const double* sb = sub_.data() + t * m * m;
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) {
          radius[(t + 1) * m + i] += std::abs(sb[i * m + j]);
          radius[t * m + j] += std::abs(sb[i * m + j]);
        }
    }
  }
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t r = 0; r < dim(); ++r) {
    const double c = diag_[(r / m * m + r % m) * m + r % m];
    lo = std::min(lo, c - radius[r]);
    hi = std::max(hi, c + radius[r]);
  }
  return {lo, hi};
}

SymBandMatrix& SymBandMatrix::operator+=(const SymBandMatrix& other) {
  require(same_layout(other), "operator+=: layout mismatch");
  for (std::size_t i = 0; i < diag_.size(); ++i) diag_[i] += other.diag_[i];
  for (std::size_t i = 0; i < sub_.size(); ++i) sub_[i] += other.sub_[i];
  return *this;
}

SymBandMatrix& SymBandMatrix::operator-=(const SymBandMatrix& other) {
  require(same_layout(other), "operator-=: layout mismatch");
  for (std::size_t i = 0; i < diag_.size(); ++i) diag_[i] -= other.diag_[i];
  for (std::size_t i = 0; i < sub_.size(); ++i) sub_[i] -= other.sub_[i];
  return *this;
}

SymBandMatrix& SymBandMatrix::operator*=(double s) {
  for (double& v : diag_) v *= s;
  for (double& v : sub_) v *= s;
  return *this;
}

SymBandMatrix& SymBandMatrix::add_identity(double s) {
  const std::size_t m = block_size_;
  for (std::size_t t = 0; t < num_blocks_; ++t)
    for (std::size_t i = 0; i < m; ++i) diag_[(t * m + i) * m + i] += s;
  return *this;
}

SymBandMatrix operator+(const SymBandMatrix& a, const SymBandMatrix& b) {
  require(a.dim() == b.dim(), "operator+: dimension mismatch");
  if (a.same_layout(b)) {
    SymBandMatrix out = a;
    out += b;
    return out;
  }
  return SymBandMatrix::dense(a.to_dense() + b.to_dense());
}

SymBandMatrix operator-(const SymBandMatrix& a, const SymBandMatrix& b) {
  require(a.dim() == b.dim(), "operator-: dimension mismatch");
  if (a.same_layout(b)) {
    SymBandMatrix out = a;
    out -= b;
    return out;
  }
  return SymBandMatrix::dense(a.to_dense() - b.to_dense());
}

SymBandMatrix operator*(double s, const SymBandMatrix& a) {
  SymBandMatrix out = a;
  out *= s;
  return out;
}

// ---------------------------------------------------------------------------
// BandCholesky

BandCholesky factorize(const SymBandMatrix& a) {
  if (!a.all_finite()) throw Error(ErrorCode::kInvalidInput, "factorize: non-finite entries");
  const std::size_t m = a.block_size();
  const std::size_t nb = a.num_blocks();
  const double floor = kPivotFloor * a.max_abs_diagonal();

  BandCholesky out;
  out.num_blocks = nb;
  out.block_size = m;
  out.pivots = a.diag_storage();
  out.fill = a.sub_storage();

  for (std::size_t t = 0; t < nb; ++t) {
    double* piv = out.pivots.data() + t * m * m;
    if (t > 0) {
      // Schur complement: A_tt - W W' with W = L_{t,t-1}.
      const double* w = out.fill.data() + (t - 1) * m * m;
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j <= i; ++j) {
          double s = 0.0;
          for (std::size_t k = 0; k < m; ++k) s += w[i * m + k] * w[j * m + k];
          piv[i * m + j] -= s;
          piv[j * m + i] = piv[i * m + j];
        }
    }
    const std::size_t bad = chol_block(piv, m, floor);
    if (bad < m) {
      out.success = false;
      out.failed_block = t + 1;
      out.failed_row = t * m + bad + 1;
      return out;
    }
    if (t + 1 < nb) {
      // W = A_{t+1,t} L_tt^{-T}: solve L_tt w_i' = a_i' per row.
      double* w = out.fill.data() + t * m * m;
      for (std::size_t i = 0; i < m; ++i) lower_solve(piv, m, w + i * m);
    }
  }
  double log_det = 0.0;
  for (std::size_t t = 0; t < nb; ++t)
    for (std::size_t i = 0; i < m; ++i) log_det += std::log(out.pivots[(t * m + i) * m + i]);
  out.log_determinant = 2.0 * log_det;
  out.success = true;
  return out;
}

BandCholesky factorize_or_throw(const SymBandMatrix& a, const char* what) {
  BandCholesky chol = factorize(a);
  if (!chol.success) {
    throw Error(ErrorCode::kNotPositiveDefinite,
                std::string(what) + " is not positive definite (pivot failure at row " +
                    std::to_string(chol.failed_row) + ")");
  }
  return chol;
}

Vector BandCholesky::solve_lower(const Vector& b) const {
  require(static_cast<std::size_t>(b.size()) == dim(), "solve_lower: dimension mismatch");
  const std::size_t m = block_size;
  Vector y = b;
  double* yp = y.data();
  if (m == 1) {
    for (std::size_t t = 0; t < num_blocks; ++t) {
      if (t > 0) yp[t] -= fill[t - 1] * yp[t - 1];
      yp[t] /= pivots[t];
    }
    return y;
  }
  for (std::size_t t = 0; t < num_blocks; ++t) {
    if (t > 0) {
      const double* w = fill.data() + (t - 1) * m * m;
      for (std::size_t i = 0; i < m; ++i) {
        double s = 0.0;
        for (std::size_t k = 0; k < m; ++k) s += w[i * m + k] * yp[(t - 1) * m + k];
        yp[t * m + i] -= s;
      }
    }
    lower_solve(pivots.data() + t * m * m, m, yp + t * m);
  }
  return y;
}

Vector BandCholesky::solve_upper(const Vector& y) const {
  require(static_cast<std::size_t>(y.size()) == dim(), "solve_upper: dimension mismatch");
  const std::size_t m = block_size;
  Vector x = y;
  double* xp = x.data();
  if (m == 1) {
    for (std::size_t t = num_blocks; t-- > 0;) {
      if (t + 1 < num_blocks) xp[t] -= fill[t] * xp[t + 1];
      xp[t] /= pivots[t];
    }
    return x;
  }
  for (std::size_t t = num_blocks; t-- > 0;) {
    if (t + 1 < num_blocks) {
      const double* w = fill.data() + t * m * m;
      for (std::size_t j = 0; j < m; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < m; ++i) s += w[i * m + j] * xp[(t + 1) * m + i];
        xp[t * m + j] -= s;
      }
    }
    upper_solve(pivots.data() + t * m * m, m, xp + t * m);
  }
  return x;
}

Vector BandCholesky::solve(const Vector& b) const { return solve_upper(solve_lower(b)); }

Vector BandCholesky::multiply_upper(const Vector& v) const {
  require(static_cast<std::size_t>(v.size()) == dim(), "multiply_upper: dimension mismatch");
  const std::size_t m = block_size;
  Vector out(v.size());
  const double* vp = v.data();
  double* op = out.data();
  if (m == 1) {
    for (std::size_t t = 0; t + 1 < num_blocks; ++t) op[t] = pivots[t] * vp[t] + fill[t] * vp[t + 1];
    if (num_blocks > 0) op[num_blocks - 1] = pivots[num_blocks - 1] * vp[num_blocks - 1];
    return out;
  }
  for (std::size_t t = 0; t < num_blocks; ++t) {
    const double* l = pivots.data() + t * m * m;
    for (std::size_t j = 0; j < m; ++j) {
      double s = 0.0;
      for (std::size_t i = j; i < m; ++i) s += l[i * m + j] * vp[t * m + i];
      op[t * m + j] = s;
    }
    if (t + 1 < num_blocks) {
      const double* w = fill.data() + t * m * m;
      for (std::size_t j = 0; j < m; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < m; ++i) s += w[i * m + j] * vp[(t + 1) * m + i];
        op[t * m + j] += s;
      }
    }
  }
  return out;
}

Matrix BandCholesky::lower_dense() const {
  const std::size_t m = block_size;
  const auto d = static_cast<Eigen::Index>(dim());
  Matrix l = Matrix::Zero(d, d);
  for (std::size_t t = 0; t < num_blocks; ++t) {
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j <= i; ++j)
        l(static_cast<Eigen::Index>(t * m + i), static_cast<Eigen::Index>(t * m + j)) = pivots[(t * m + i) * m + j];
    if (t + 1 < num_blocks)
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j)
          l(static_cast<Eigen::Index>((t + 1) * m + i), static_cast<Eigen::Index>(t * m + j)) =
              fill[(t * m + i) * m + j];
  }
  return l;
}

// ---------------------------------------------------------------------------
// Spectrum

std::size_t count_eigenvalues_below(const SymBandMatrix& a, double shift) {
  // Sylvester's law of inertia applied to a block LDL' of (A - shift I); each
  // Schur complement block is itself reduced by a scalar LDL' without pivoting.
  const std::size_t m = a.block_size();
  const std::size_t nb = a.num_blocks();
  const double tiny = std::numeric_limits<double>::epsilon() * std::max(1.0, a.max_abs_diagonal() + std::abs(shift));
  std::size_t negatives = 0;

  if (m == 1) {
    double prev = 0.0;
    const auto& diag = a.diag_storage();
    const auto& sub = a.sub_storage();
    for (std::size_t t = 0; t < nb; ++t) {
      double d = diag[t] - shift;
      if (t > 0) d -= sub[t - 1] * sub[t - 1] / prev;
      if (d == 0.0) d = tiny;
      if (d < 0.0) ++negatives;
      prev = d;
    }
    return negatives;
  }

  // s holds the LDL' factors of the current Schur block: unit lower L below the
  // diagonal, D on the diagonal.
  std::vector<double> s(m * m);
  std::vector<double> prev(m * m);
  std::vector<double> x(m);
  for (std::size_t t = 0; t < nb; ++t) {
    const auto db = a.diag_block(t);
    std::copy(db.begin(), db.end(), s.begin());
    for (std::size_t i = 0; i < m; ++i) s[i * m + i] -= shift;
    if (t > 0) {
      // s -= B S_prev^{-1} B' with B = A_{t,t-1}.
      const auto b = a.sub_block(t - 1);
      for (std::size_t j = 0; j < m; ++j) {
        // x = S_prev^{-1} b_j' (b_j = row j of B).
        for (std::size_t k = 0; k < m; ++k) x[k] = b[j * m + k];
        for (std::size_t i = 0; i < m; ++i)
          for (std::size_t k = 0; k < i; ++k) x[i] -= prev[i * m + k] * x[k];
        for (std::size_t i = 0; i < m; ++i) x[i] /= prev[i * m + i];
        for (std::size_t i = m; i-- > 0;)
          for (std::size_t k = i + 1; k < m; ++k) x[i] -= prev[k * m + i] * x[k];
        for (std::size_t i = 0; i < m; ++i) {
          double acc = 0.0;
          for (std::size_t k = 0; k < m; ++k) acc += b[i * m + k] * x[k];
          s[i * m + j] -= acc;
        }
      }
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < i; ++j) s[j * m + i] = s[i * m + j] = 0.5 * (s[i * m + j] + s[j * m + i]);
    }
    // Scalar LDL' of s in place.
    for (std::size_t j = 0; j < m; ++j) {
      double d = s[j * m + j];
      for (std::size_t k = 0; k < j; ++k) d -= s[j * m + k] * s[j * m + k] * s[k * m + k];
      if (d == 0.0) d = tiny;
      if (d < 0.0) ++negatives;
      s[j * m + j] = d;
      for (std::size_t i = j + 1; i < m; ++i) {
        double v = s[i * m + j];
        for (std::size_t k = 0; k < j; ++k) v -= s[i * m + k] * s[j * m + k] * s[k * m + k];
        s[i * m + j] = v / d;
      }
    }
    prev = s;
  }
  return negatives;
}

double smallest_eigenvalue(const SymBandMatrix& a, double tol) {
  require(tol > 0.0, "smallest_eigenvalue: tol must be positive");
  if (!a.all_finite()) throw Error(ErrorCode::kInvalidInput, "smallest_eigenvalue: non-finite entries");
  auto [lo, hi] = a.gershgorin_bounds();
  const Vector diag = a.diagonal_entries();
  hi = std::min(hi, diag.minCoeff()) + tol;
  lo -= tol;
  // Invariant: no eigenvalue below lo, at least one below hi.
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (count_eigenvalues_below(a, mid) > 0) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// ---------------------------------------------------------------------------
// Gaussian sampling and density

Vector sample_gaussian(const Vector& mean, const BandCholesky& chol, Rng& rng) {
  Vector z(mean.size());
  fill_standard_normal(rng, {z.data(), static_cast<std::size_t>(z.size())});
  return mean + chol.solve_upper(z);
}

std::vector<Vector> sample_gaussian(const Vector& mean, const SymBandMatrix& precision, Rng& rng,
                                    std::size_t count) {
  require(static_cast<std::size_t>(mean.size()) == precision.dim(), "sample_gaussian: dimension mismatch");
  const BandCholesky chol = factorize_or_throw(precision, "sample_gaussian: precision");
  std::vector<Vector> out;
  out.reserve(count);
  for (std::size_t s = 0; s < count; ++s) out.push_back(sample_gaussian(mean, chol, rng));
  return out;
}

double log_density(const Vector& x, const Vector& mean, const BandCholesky& chol) {
  require(x.size() == mean.size() && static_cast<std::size_t>(x.size()) == chol.dim(),
          "log_density: dimension mismatch");
  const Vector u = chol.multiply_upper(x - mean);
  const double d = static_cast<double>(x.size());
  return -0.5 * d * std::log(2.0 * std::numbers::pi) + 0.5 * chol.log_det() - 0.5 * u.squaredNorm();
}

double log_density(const Vector& x, const Vector& mean, const SymBandMatrix& precision) {
  require(x.size() == mean.size() && static_cast<std::size_t>(x.size()) == precision.dim(),
          "log_density: dimension mismatch");
  return log_density(x, mean, factorize_or_throw(precision, "log_density: precision"));
}

}  // namespace ris
