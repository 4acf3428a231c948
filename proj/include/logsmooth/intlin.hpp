#pragma once

// Exact integer linear algebra: Smith and Hermite normal forms, integer
// kernels, cokernels and solving A x = b over Z.

#include "logsmooth/matrix.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace logsmooth {

/// Smith decomposition U * A * V = S with U, V unimodular and S diagonal.
struct SmithForm {
  IntMatrix U;
  IntMatrix S;
  IntMatrix V;
  /// Nonzero diagonal entries of S: positive, each dividing the next.
  std::vector<Integer> invariant_factors;

  std::size_t rank() const { return invariant_factors.size(); }
};

namespace detail {

// Position of the nonzero entry of least absolute value in the block
// [from, rows) x [from, cols); nullopt when the block is zero.
inline std::optional<std::pair<std::size_t, std::size_t>> min_abs_entry(const IntMatrix& s, std::size_t from) {
  std::optional<std::pair<std::size_t, std::size_t>> best;
  Integer best_abs;
  for (std::size_t i = from; i < s.rows(); ++i)
    for (std::size_t j = from; j < s.cols(); ++j) {
      if (s(i, j) == 0) continue;
      Integer a = abs(s(i, j));
      if (!best || a < best_abs) {
        best = {i, j};
        best_abs = std::move(a);
        if (best_abs == 1) return best;
      }
    }
  return best;
}

}  // namespace detail

/// Smith normal form with transforms. Pivots on the entry of least absolute
/// value to limit coefficient growth.
inline SmithForm smith(const IntMatrix& a) {
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  IntMatrix s = a;
  IntMatrix u = IntMatrix::identity(m);
  IntMatrix v = IntMatrix::identity(n);

  std::size_t t = 0;
  for (; t < std::min(m, n); ++t) {
    auto pivot = detail::min_abs_entry(s, t);
    if (!pivot) break;
    s.swap_rows(t, pivot->first);
    u.swap_rows(t, pivot->first);
    s.swap_cols(t, pivot->second);
    v.swap_cols(t, pivot->second);

    for (;;) {
      bool dirty = false;
      for (std::size_t i = t + 1; i < m; ++i) {
        if (s(i, t) == 0) continue;
        Integer q = s(i, t) / s(t, t);
        s.add_row(i, t, -q);
        u.add_row(i, t, -q);
        if (s(i, t) != 0) dirty = true;
      }
      for (std::size_t j = t + 1; j < n; ++j) {
        if (s(t, j) == 0) continue;
        Integer q = s(t, j) / s(t, t);
        s.add_col(j, t, -q);
        v.add_col(j, t, -q);
        if (s(t, j) != 0) dirty = true;
      }
      if (dirty) {
        // A remainder smaller than the pivot survived; move it into place.
        std::size_t bi = t, bj = t;
        Integer best = abs(s(t, t));
        for (std::size_t i = t + 1; i < m; ++i)
          if (s(i, t) != 0 && abs(s(i, t)) < best) best = abs(s(i, t)), bi = i, bj = t;
        for (std::size_t j = t + 1; j < n; ++j)
          if (s(t, j) != 0 && abs(s(t, j)) < best) best = abs(s(t, j)), bi = t, bj = j;
        s.swap_rows(t, bi);
        u.swap_rows(t, bi);
        s.swap_cols(t, bj);
        v.swap_cols(t, bj);
        continue;
      }
      // Row and column are clear; enforce divisibility of the remaining block.
      std::optional<std::size_t> offender;
      for (std::size_t i = t + 1; i < m && !offender; ++i)
        for (std::size_t j = t + 1; j < n; ++j)
          if (s(i, j) % s(t, t) != 0) {
            offender = i;
            break;
          }
      if (!offender) break;
      s.add_row(t, *offender, 1);
      u.add_row(t, *offender, 1);
    }
    if (s(t, t) < 0) {
      s.negate_row(t);
      u.negate_row(t);
    }
  }

  SmithForm out{std::move(u), std::move(s), std::move(v), {}};
  for (std::size_t i = 0; i < t; ++i) out.invariant_factors.push_back(out.S(i, i));
  return out;
}

/// Canonical Hermite basis of the lattice spanned by the columns of `gens`.
/// Returns a rows x rank matrix in column echelon form: pivots positive and
/// entries in a pivot row to the left of the pivot reduced into [0, pivot).
/// Two generator sets span the same lattice iff their Hermite bases agree.
inline IntMatrix hermite_basis(const IntMatrix& gens) {
  IntMatrix h = gens.transposed();  // work on rows
  const std::size_t k = h.rows();
  const std::size_t n = h.cols();
  std::size_t r = 0;
  for (std::size_t c = 0; c < n && r < k; ++c) {
    for (;;) {
      std::optional<std::size_t> best;
      for (std::size_t i = r; i < k; ++i)
        if (h(i, c) != 0 && (!best || abs(h(i, c)) < abs(h(*best, c)))) best = i;
      if (!best) break;
      h.swap_rows(r, *best);
      bool clear = true;
      for (std::size_t i = r + 1; i < k; ++i) {
        if (h(i, c) == 0) continue;
        h.add_row(i, r, -(h(i, c) / h(r, c)));
        if (h(i, c) != 0) clear = false;
      }
      if (clear) break;
    }
    if (h(r, c) == 0) continue;
    if (h(r, c) < 0) h.negate_row(r);
    for (std::size_t i = 0; i < r; ++i) h.add_row(i, r, -floor_div(h(i, c), h(r, c)));
    ++r;
  }
  return h.row_range(0, r).transposed();
}

/// Row-style Hermite form of the row lattice of `a` (rows x cols, nonzero rows only).
inline IntMatrix hermite_rows(const IntMatrix& a) { return hermite_basis(a.transposed()).transposed(); }

/// Basis (as columns) of the integer kernel {x : A x = 0}, in Hermite form.
/// Returns a cols x 0 matrix when A is injective.
inline IntMatrix kernel_basis(const IntMatrix& a) {
  SmithForm snf = smith(a);
  IntMatrix raw = snf.V.column_range(snf.rank(), a.cols());
  return hermite_basis(raw);
}

/// Z^rows / image(A) as free rank plus nontrivial torsion invariants.
struct CokernelInfo {
  std::size_t free_rank = 0;
  /// Invariant factors > 1, divisibility chain.
  std::vector<Integer> torsion;

  Integer torsion_order() const {
    Integer p = 1;
    for (const auto& t : torsion) p *= t;
    return p;
  }
  bool operator==(const CokernelInfo&) const = default;
};

inline CokernelInfo cokernel_from_smith(const SmithForm& snf, std::size_t rows) {
  CokernelInfo out;
  out.free_rank = rows - snf.rank();
  for (const auto& d : snf.invariant_factors)
    if (d > 1) out.torsion.push_back(d);
  return out;
}

inline CokernelInfo cokernel(const IntMatrix& a) { return cokernel_from_smith(smith(a), a.rows()); }

inline std::size_t rank(const IntMatrix& a) { return smith(a).rank(); }

/// Solves A x = b over the integers for many right-hand sides against one
/// Smith decomposition.
class IntegerSolver {
 public:
  explicit IntegerSolver(IntMatrix a) : a_(std::move(a)), snf_(smith(a_)) {}

  const IntMatrix& matrix() const { return a_; }
  const SmithForm& smith_form() const { return snf_; }

  /// Some integer solution, or nullopt if none exists.
  std::optional<IntVector> solve(const IntVector& b) const {
    if (b.size() != a_.rows()) throw InputError("solve: right-hand side has wrong length");
    IntVector c = snf_.U * b;
    const std::size_t r = snf_.rank();
    IntVector y(a_.cols());
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (i < r) {
        const Integer& d = snf_.invariant_factors[i];
        if (c[i] % d != 0) return std::nullopt;
        y[i] = c[i] / d;
      } else if (c[i] != 0) {
        return std::nullopt;
      }
    }
    return snf_.V * y;
  }

  bool solvable(const IntVector& b) const { return solve(b).has_value(); }

 private:
  IntMatrix a_;
  SmithForm snf_;
};

/// Z^n / image(relations) rewritten as Z^f + sum Z/t_i.
/// `projection` (f + #t rows, n cols) maps a coordinate vector to its class;
/// the first f rows give free coordinates, the rest torsion coordinates
/// (to be reduced mod t_i).
struct QuotientPresentation {
  std::size_t free_rank = 0;
  std::vector<Integer> torsion;
  IntMatrix projection;
};

inline QuotientPresentation quotient_presentation(const IntMatrix& relations) {
  const std::size_t n = relations.rows();
  SmithForm snf = smith(relations);
  const std::size_t r = snf.rank();
  QuotientPresentation q;
  q.free_rank = n - r;

  IntMatrix free_rows = snf.U.row_range(r, n);
  if (free_rows.rows() > 0) free_rows = hermite_rows(free_rows);

  std::vector<std::size_t> torsion_idx;
  for (std::size_t i = 0; i < r; ++i)
    if (snf.invariant_factors[i] > 1) torsion_idx.push_back(i);

  q.projection = IntMatrix(q.free_rank + torsion_idx.size(), n);
  for (std::size_t i = 0; i < q.free_rank; ++i)
    for (std::size_t j = 0; j < n; ++j) q.projection(i, j) = free_rows(i, j);
  for (std::size_t k = 0; k < torsion_idx.size(); ++k) {
    const Integer& t = snf.invariant_factors[torsion_idx[k]];
    q.torsion.push_back(t);
    for (std::size_t j = 0; j < n; ++j)
      q.projection(q.free_rank + k, j) = mod_floor(snf.U(torsion_idx[k], j), t);
  }
  return q;
}

/// Determinant of a square matrix by fraction-free (Bareiss) elimination.
inline Integer determinant(IntMatrix a) {
  const std::size_t n = a.rows();
  if (n != a.cols()) throw InputError("determinant of non-square matrix");
  if (n == 0) return 1;
  Integer sign = 1;
  Integer prev = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (a(k, k) == 0) {
      std::size_t p = k + 1;
      while (p < n && a(p, k) == 0) ++p;
      if (p == n) return 0;
      a.swap_rows(k, p);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i)
      for (std::size_t j = k + 1; j < n; ++j) a(i, j) = (a(i, j) * a(k, k) - a(i, k) * a(k, j)) / prev;
    prev = a(k, k);
  }
  return sign * a(n - 1, n - 1);
}

}  // namespace logsmooth
