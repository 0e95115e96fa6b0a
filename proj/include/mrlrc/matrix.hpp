// SPDX-License-Identifier: Apache-2.0
//
// Dense matrices over a finite field and exact Gaussian elimination.
// Pivoting always takes the first nonzero row, so intermediate matrices are
// reproducible.

#pragma once

#include <concepts>
#include <cstddef>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <vector>

#include "mrlrc/galois.hpp"

namespace mrlrc {

template <class F>
concept FiniteField = requires(const F& f, Gf a, Gf b) {
  { f.zero() } -> std::same_as<Gf>;
  { f.one() } -> std::same_as<Gf>;
  { f.add(a, b) } -> std::same_as<Gf>;
  { f.sub(a, b) } -> std::same_as<Gf>;
  { f.mul(a, b) } -> std::same_as<Gf>;
  { f.inv(a) } -> std::same_as<Gf>;
};

class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = Gf{1};
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return rows_ == 0 || cols_ == 0; }

  Gf& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  Gf operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<Gf> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const Gf> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  void append_row(std::span<const Gf> r) {
    if (rows_ == 0 && cols_ == 0) cols_ = r.size();
    if (r.size() != cols_) throw std::invalid_argument("row length mismatch");
    data_.insert(data_.end(), r.begin(), r.end());
    ++rows_;
  }

  /// Rows of `this` followed by rows of `below`.
  Matrix stacked(const Matrix& below) const {
    if (rows_ == 0) return below;
    if (below.rows_ == 0) return *this;
    if (below.cols_ != cols_) throw std::invalid_argument("stack: column count mismatch");
    Matrix out = *this;
    out.data_.insert(out.data_.end(), below.data_.begin(), below.data_.end());
    out.rows_ += below.rows_;
    return out;
  }

  Matrix transposed() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  Matrix select_columns(std::span<const std::size_t> cols) const {
    Matrix out(rows_, cols.size());
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols.size(); ++j) out(i, j) = (*this)(i, cols[j]);
    return out;
  }

  Matrix select_rows(std::span<const std::size_t> rs) const {
    Matrix out(rs.size(), cols_);
    for (std::size_t i = 0; i < rs.size(); ++i)
      for (std::size_t j = 0; j < cols_; ++j) out(i, j) = (*this)(rs[i], j);
    return out;
  }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Gf> data_;
};

template <FiniteField F>
Matrix multiply(const F& f, const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("multiply: inner dimension mismatch");
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t l = 0; l < a.cols(); ++l) {
      const Gf x = a(i, l);
      if (x.is_zero()) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) = f.add(c(i, j), f.mul(x, b(l, j)));
    }
  return c;
}

/// Row vector times matrix.
template <FiniteField F>
std::vector<Gf> multiply(const F& f, std::span<const Gf> v, const Matrix& a) {
  if (v.size() != a.rows()) throw std::invalid_argument("vector-matrix: dimension mismatch");
  std::vector<Gf> out(a.cols(), f.zero());
  for (std::size_t l = 0; l < v.size(); ++l) {
    if (v[l].is_zero()) continue;
    for (std::size_t j = 0; j < a.cols(); ++j) out[j] = f.add(out[j], f.mul(v[l], a(l, j)));
  }
  return out;
}

/// In-place reduction to reduced row echelon form. Returns the pivot columns.
template <FiniteField F>
std::vector<std::size_t> rref(const F& f, Matrix& a) {
  std::vector<std::size_t> pivots;
  std::size_t r = 0;
  for (std::size_t c = 0; c < a.cols() && r < a.rows(); ++c) {
    std::size_t p = r;
    while (p < a.rows() && a(p, c).is_zero()) ++p;
    if (p == a.rows()) continue;
    if (p != r)
      for (std::size_t j = 0; j < a.cols(); ++j) std::swap(a(p, j), a(r, j));
    const Gf s = f.inv(a(r, c));
    for (std::size_t j = c; j < a.cols(); ++j) a(r, j) = f.mul(a(r, j), s);
    for (std::size_t i = 0; i < a.rows(); ++i) {
      if (i == r || a(i, c).is_zero()) continue;
      const Gf t = a(i, c);
      for (std::size_t j = c; j < a.cols(); ++j) a(i, j) = f.sub(a(i, j), f.mul(t, a(r, j)));
    }
    pivots.push_back(c);
    ++r;
  }
  return pivots;
}

template <FiniteField F>
std::size_t rank(const F& f, Matrix a) {
  return rref(f, a).size();
}

/// Inverse of a square matrix, or nullopt when singular.
template <FiniteField F>
std::optional<Matrix> inverse(const F& f, const Matrix& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("inverse: matrix not square");
  const std::size_t n = a.rows();
  Matrix aug(n, 2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) aug(i, j) = a(i, j);
    aug(i, n + i) = f.one();
  }
  const auto piv = rref(f, aug);
  if (piv.size() < n || piv[n - 1] != n - 1) return std::nullopt;
  Matrix inv(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) inv(i, j) = aug(i, n + j);
  return inv;
}

/// Plain-text grid of base-field coordinate tuples, one matrix row per line.
inline void dump(std::ostream& os, const ExtField& field, const Matrix& a) {
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) os << (j ? " " : "") << to_string(field, a(i, j));
    os << '\n';
  }
}

}  // namespace mrlrc
