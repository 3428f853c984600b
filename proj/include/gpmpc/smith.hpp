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

#ifndef GPMPC_SMITH_HPP_
#define GPMPC_SMITH_HPP_

#include <algorithm>
#include <stdexcept>

#include "gpmpc/poly_matrix.hpp"

namespace gpmpc {

/// D = W * H * V with D diagonal and W, V unimodular (constant nonzero
/// determinant). Nonzero diagonal entries of D are monic and each divides
/// the next.
template <typename T>
struct SmithDecomposition {
  PolyMatrix<T> D;
  PolyMatrix<T> W;
  PolyMatrix<T> V;
};

namespace detail {

/// Locate the nonzero entry of lowest degree in the trailing submatrix
/// starting at (s, s); ties broken by row-major position. Returns false if
/// the submatrix is zero.
template <typename T>
bool find_pivot(const PolyMatrix<T>& m, int s, int& pr, int& pc) {
  int best_deg = -1;
  for (int i = s; i < m.rows(); ++i)
    for (int j = s; j < m.cols(); ++j) {
      const auto& e = m(i, j);
      if (e.is_zero()) continue;
      if (best_deg < 0 || e.degree() < best_deg) {
        best_deg = e.degree();
        pr = i;
        pc = j;
      }
    }
  return best_deg >= 0;
}

}  // namespace detail

/// Smith Normal Form of a polynomial matrix over a coefficient field.
///
/// Pivoting is deterministic (lowest degree, then row-major), so the
/// decomposition is reproducible bit for bit. Throws std::invalid_argument
/// for the zero matrix.
template <typename T>
SmithDecomposition<T> smith_normal_form(const PolyMatrix<T>& h) {
  if (h.is_zero()) throw std::invalid_argument("smith_normal_form: zero matrix");
  using Poly = Polynomial<T>;

  SmithDecomposition<T> out;
  out.D = h;
  out.W = PolyMatrix<T>::identity(h.rows());
  out.V = PolyMatrix<T>::identity(h.cols());
  PolyMatrix<T>& d = out.D;

  const int steps = std::min(h.rows(), h.cols());
  for (int s = 0; s < steps; ++s) {
    int pr = 0, pc = 0;
    if (!detail::find_pivot(d, s, pr, pc)) break;

    for (int guard = 0;; ++guard) {
      if (guard > 10000) throw std::logic_error("smith_normal_form: reduction did not terminate");
      detail::find_pivot(d, s, pr, pc);
      if (pr != s) { d.swap_rows(s, pr); out.W.swap_rows(s, pr); }
      if (pc != s) { d.swap_cols(s, pc); out.V.swap_cols(s, pc); }

      // Euclidean reduction of the pivot column and row.
      for (int r = s + 1; r < d.rows(); ++r) {
        if (d(r, s).is_zero()) continue;
        const Poly q = divmod(d(r, s), d(s, s)).first;
        d.add_row_multiple(r, s, -q);
        out.W.add_row_multiple(r, s, -q);
      }
      for (int c = s + 1; c < d.cols(); ++c) {
        if (d(s, c).is_zero()) continue;
        const Poly q = divmod(d(s, c), d(s, s)).first;
        d.add_col_multiple(c, s, -q);
        out.V.add_col_multiple(c, s, -q);
      }

      bool lone = true;
      for (int r = s + 1; r < d.rows() && lone; ++r) lone = d(r, s).is_zero();
      for (int c = s + 1; c < d.cols() && lone; ++c) lone = d(s, c).is_zero();
      if (!lone) continue;  // remainders became the new lowest-degree entries

      // Divisibility repair: the pivot must divide every entry of the
      // trailing submatrix before it can be fixed as a diagonal entry.
      int br = -1;
      for (int r = s + 1; r < d.rows() && br < 0; ++r)
        for (int c = s + 1; c < d.cols(); ++c)
          if (!d(s, s).divides(d(r, c))) { br = r; break; }
      if (br < 0) break;
      d.add_row_multiple(s, br, Poly(T(1)));
      out.W.add_row_multiple(s, br, Poly(T(1)));
    }
  }

  // Normalize: monic diagonal (constant entries become exactly 1).
  for (int s = 0; s < steps; ++s) {
    if (d(s, s).is_zero()) continue;
    const T lead = d(s, s).leading_coefficient();
    if (lead == T(1)) continue;
    const T inv = T(1) / lead;
    d.scale_row(s, inv);
    out.W.scale_row(s, inv);
  }
  return out;
}

}  // namespace gpmpc

#endif  // GPMPC_SMITH_HPP_
