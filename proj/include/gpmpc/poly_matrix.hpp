// Copyright 2026 The gpmpc Authors
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

#ifndef GPMPC_POLY_MATRIX_HPP_
#define GPMPC_POLY_MATRIX_HPP_

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "gpmpc/polynomial.hpp"

namespace gpmpc {

/// Dense matrix of polynomials, row-major storage.
template <typename T>
class PolyMatrix {
 public:
  using Poly = Polynomial<T>;

  PolyMatrix() : rows_(0), cols_(0) {}
  PolyMatrix(int rows, int cols)
      : rows_(rows), cols_(cols), entries_(static_cast<std::size_t>(rows) * cols) {
    if (rows < 0 || cols < 0) throw std::invalid_argument("PolyMatrix: negative shape");
  }

  static PolyMatrix identity(int n) {
    PolyMatrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = Poly(T(1));
    return m;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  Poly& operator()(int i, int j) { return entries_[index(i, j)]; }
  const Poly& operator()(int i, int j) const { return entries_[index(i, j)]; }

  bool is_zero() const {
    for (const auto& e : entries_)
      if (!e.is_zero()) return false;
    return true;
  }

  bool is_diagonal() const {
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j)
        if (i != j && !(*this)(i, j).is_zero()) return false;
    return true;
  }

  friend PolyMatrix operator*(const PolyMatrix& a, const PolyMatrix& b) {
    if (a.cols_ != b.rows_) throw std::invalid_argument("PolyMatrix: shape mismatch in product");
    PolyMatrix m(a.rows_, b.cols_);
    for (int i = 0; i < a.rows_; ++i)
      for (int k = 0; k < a.cols_; ++k) {
        if (a(i, k).is_zero()) continue;
        for (int j = 0; j < b.cols_; ++j) m(i, j) += a(i, k) * b(k, j);
      }
    return m;
  }

  friend bool operator==(const PolyMatrix& a, const PolyMatrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.entries_ == b.entries_;
  }
  friend bool operator!=(const PolyMatrix& a, const PolyMatrix& b) { return !(a == b); }

  // Elementary operations; used by the Smith reduction, exposed for tests.
  void swap_rows(int i, int j) {
    for (int c = 0; c < cols_; ++c) std::swap((*this)(i, c), (*this)(j, c));
  }
  void swap_cols(int i, int j) {
    for (int r = 0; r < rows_; ++r) std::swap((*this)(r, i), (*this)(r, j));
  }
  /// row_i += f * row_j
  void add_row_multiple(int i, int j, const Poly& f) {
    for (int c = 0; c < cols_; ++c) (*this)(i, c) += f * (*this)(j, c);
  }
  /// col_i += f * col_j
  void add_col_multiple(int i, int j, const Poly& f) {
    for (int r = 0; r < rows_; ++r) (*this)(r, i) += f * (*this)(r, j);
  }
  void scale_row(int i, const T& c) {
    for (int k = 0; k < cols_; ++k) (*this)(i, k) = Poly(c) * (*this)(i, k);
  }

 private:
  std::size_t index(int i, int j) const {
    if (i < 0 || i >= rows_ || j < 0 || j >= cols_) throw std::out_of_range("PolyMatrix: index");
    return static_cast<std::size_t>(i) * cols_ + j;
  }
  int rows_, cols_;
  std::vector<Poly> entries_;
};

/// Determinant by cofactor expansion along the first row. Matrices in this
/// codebase stay small (at most d_x + d_u square), where this is simpler and
/// fast enough.
template <typename T>
Polynomial<T> det(const PolyMatrix<T>& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("det: matrix not square");
  const int n = m.rows();
  if (n == 0) return Polynomial<T>(T(1));
  if (n == 1) return m(0, 0);
  Polynomial<T> acc;
  for (int j = 0; j < n; ++j) {
    if (m(0, j).is_zero()) continue;
    PolyMatrix<T> minor(n - 1, n - 1);
    for (int r = 1; r < n; ++r) {
      int cc = 0;
      for (int c = 0; c < n; ++c) {
        if (c == j) continue;
        minor(r - 1, cc++) = m(r, c);
      }
    }
    const Polynomial<T> term = m(0, j) * det(minor);
    acc += (j % 2 == 0) ? term : -term;
  }
  return acc;
}

using OperatorMatrix = PolyMatrix<Rational>;

}  // namespace gpmpc

#endif  // GPMPC_POLY_MATRIX_HPP_
