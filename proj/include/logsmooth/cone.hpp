#pragma once

// Full-dimensional rational polyhedral cones in Z^d, described by generators.
// Facets are found by testing hyperplanes through d-1 independent
// generators; Hilbert bases come from enumerating lattice points in the
// half-open fundamental parallelepipeds of simplicial subcones.

#include "logsmooth/intlin.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <vector>

namespace logsmooth {

/// Raised when an operation needs a pointed cone; carries a basis of the
/// lineality space that was found.
class NotPointedError : public InputError {
 public:
  NotPointedError(std::string what, std::vector<IntVector> lineality)
      : InputError(std::move(what)), lineality_(std::move(lineality)) {}
  const std::vector<IntVector>& lineality() const { return lineality_; }

 private:
  std::vector<IntVector> lineality_;
};

/// Upper limit on parallelepiped sizes enumerated during Hilbert basis computation.
inline constexpr long long kMaxParallelepipedPoints = 2'000'000;

namespace detail {

inline void for_each_subset(std::size_t n, std::size_t k, const std::function<void(const std::vector<std::size_t>&)>& fn) {
  if (k > n) return;
  std::vector<std::size_t> idx(k);
  for (std::size_t i = 0; i < k; ++i) idx[i] = i;
  for (;;) {
    fn(idx);
    std::size_t i = k;
    while (i > 0 && idx[i - 1] == n - k + i - 1) --i;
    if (i == 0) return;
    ++idx[i - 1];
    for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

inline IntVector primitive(IntVector v) {
  Integer g = 0;
  for (const auto& x : v) g = gcd(g, x);
  if (g > 1)
    for (auto& x : v) x /= g;
  return v;
}

}  // namespace detail

/// Cone in Q^d generated by integer vectors that span Q^d.
class PolyhedralCone {
 public:
  PolyhedralCone(std::vector<IntVector> generators, std::size_t dim) : dim_(dim), generators_(std::move(generators)) {
    for (const auto& g : generators_)
      if (g.size() != dim_) throw InputError("cone generator has wrong dimension");
    std::set<IntVector> seen;
    for (const auto& g : generators_)
      if (!is_zero(g)) {
        auto p = detail::primitive(g);
        if (seen.insert(p).second) directions_.push_back(std::move(p));
      }
    if (rank(IntMatrix::from_columns(directions_, dim_)) != dim_) throw InputError("cone generators do not span");
    compute_facets();
  }

  std::size_t dim() const { return dim_; }
  const std::vector<IntVector>& generators() const { return generators_; }
  /// Primitive inward normals a with a.x >= 0 on the cone, one per facet.
  const std::vector<IntVector>& facets() const { return facets_; }

  bool contains(const IntVector& x) const {
    for (const auto& a : facets_)
      if (dot(a, x) < 0) return false;
    return true;
  }

  /// True when x lies on the lineality space (every facet is tight).
  bool in_lineality(const IntVector& x) const {
    for (const auto& a : facets_)
      if (dot(a, x) != 0) return false;
    return true;
  }

  bool is_pointed() const {
    for (const auto& g : directions_)
      if (in_lineality(g)) return false;
    return true;
  }

  /// Generators lying in the lineality space.
  std::vector<IntVector> lineality_generators() const {
    std::vector<IntVector> out;
    for (const auto& g : directions_)
      if (in_lineality(g)) out.push_back(g);
    return out;
  }

  /// Sum of facet normals: strictly positive on nonzero elements of a pointed cone.
  IntVector grading() const {
    IntVector l(dim_);
    for (const auto& a : facets_) l = l + a;
    return l;
  }

  /// Primitive generators of the extreme rays (pointed cones only).
  std::vector<IntVector> extreme_rays() const {
    require_pointed("extreme_rays");
    std::vector<IntVector> rays;
    for (const auto& g : directions_) {
      std::vector<IntVector> tight;
      for (const auto& a : facets_)
        if (dot(a, g) == 0) tight.push_back(a);
      std::size_t r = tight.empty() ? 0 : rank(IntMatrix::from_rows(tight, dim_));
      if (r + 1 == dim_) rays.push_back(g);
    }
    std::sort(rays.begin(), rays.end());
    return rays;
  }

  /// Unique minimal generating set of cone ∩ Z^d (pointed cones only).
  std::vector<IntVector> hilbert_basis() const {
    require_pointed("hilbert_basis");
    if (dim_ == 0) return {};
    const std::vector<IntVector> rays = extreme_rays();
    std::set<IntVector> candidates(rays.begin(), rays.end());
    detail::for_each_subset(rays.size(), dim_, [&](const std::vector<std::size_t>& idx) {
      std::vector<IntVector> cols;
      for (auto i : idx) cols.push_back(rays[i]);
      IntMatrix b = IntMatrix::from_columns(cols, dim_);
      for (auto& p : parallelepiped_points(b)) candidates.insert(std::move(p));
    });
    candidates.erase(IntVector(dim_));

    std::vector<IntVector> cand(candidates.begin(), candidates.end());
    const IntVector l = grading();
    std::sort(cand.begin(), cand.end(), [&](const IntVector& a, const IntVector& b) {
      Integer da = dot(l, a), db = dot(l, b);
      return da != db ? da < db : a < b;
    });
    std::vector<IntVector> basis;
    for (const auto& x : cand) {
      bool reducible = false;
      for (const auto& y : basis)
        if (contains(x - y)) {
          reducible = true;
          break;
        }
      if (!reducible) basis.push_back(x);
    }
    return basis;
  }

  /// Lattice points B*lambda with lambda in [0,1)^d for a nonsingular square B.
  static std::vector<IntVector> parallelepiped_points(const IntMatrix& b) {
    const std::size_t d = b.rows();
    SmithForm snf = smith(b);
    if (snf.rank() != d) return {};
    Integer volume = 1;
    for (const auto& s : snf.invariant_factors) volume *= s;
    if (volume > kMaxParallelepipedPoints)
      throw Error("simplicial cone of volume " + volume.str() + " exceeds the enumeration limit");
    const Integer big = snf.invariant_factors.back();
    // Coset representatives z = U^{-1} y, 0 <= y_i < s_i; lambda = V S^{-1} y.
    std::vector<IntVector> out;
    IntVector y(d);
    std::function<void(std::size_t)> rec = [&](std::size_t i) {
      if (i == d) {
        IntVector scaled_lambda(d);  // lambda * big
        for (std::size_t j = 0; j < d; ++j) {
          Integer acc = 0;
          for (std::size_t k = 0; k < d; ++k) acc += snf.V(j, k) * y[k] * (big / snf.invariant_factors[k]);
          scaled_lambda[j] = mod_floor(acc, big);
        }
        IntVector p = b * scaled_lambda;
        for (auto& x : p) x /= big;
        out.push_back(std::move(p));
        return;
      }
      for (Integer v = 0; v < snf.invariant_factors[i]; ++v) {
        y[i] = v;
        rec(i + 1);
      }
      y[i] = 0;
    };
    rec(0);
    return out;
  }

 private:
  void require_pointed(const char* op) const {
    if (!is_pointed())
      throw NotPointedError(std::string(op) + ": cone is not pointed", lineality_basis(lineality_generators(), dim_));
  }

  static std::vector<IntVector> lineality_basis(const std::vector<IntVector>& gens, std::size_t dim) {
    if (gens.empty()) return {};
    return hermite_basis(IntMatrix::from_columns(gens, dim)).columns();
  }

  void compute_facets() {
    if (dim_ == 0) return;
    std::set<IntVector> found;
    detail::for_each_subset(directions_.size(), dim_ - 1, [&](const std::vector<std::size_t>& idx) {
      std::vector<IntVector> rows;
      for (auto i : idx) rows.push_back(directions_[i]);
      IntMatrix m = rows.empty() ? IntMatrix(0, dim_) : IntMatrix::from_rows(rows, dim_);
      IntMatrix ker = kernel_basis(m);
      if (ker.cols() != 1) return;
      IntVector a = ker.column(0);
      bool nonneg = true, nonpos = true;
      for (const auto& g : directions_) {
        Integer s = dot(a, g);
        if (s < 0) nonneg = false;
        if (s > 0) nonpos = false;
      }
      if (nonneg) found.insert(a);
      if (nonpos) found.insert(scaled(a, -1));
    });
    facets_.assign(found.begin(), found.end());
  }

  std::size_t dim_;
  std::vector<IntVector> generators_;
  std::vector<IntVector> directions_;
  std::vector<IntVector> facets_;
};

}  // namespace logsmooth
