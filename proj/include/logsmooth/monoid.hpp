#pragma once

// Fine monoids embedded in finitely generated abelian groups.
//
// A monoid is a finite generator list inside an ambient group, so it is
// integral by construction. Cone computations act on the free part; the
// torsion of the ambient group is handled through subgroup arithmetic.

#include "logsmooth/abelian_group.hpp"
#include "logsmooth/cone.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace logsmooth {

inline constexpr long long kDefaultSearchBound = 32;
inline constexpr long long kDefaultMultiplierBound = 12;

class AffineMonoid {
 public:
  AffineMonoid() = default;
  AffineMonoid(FgAbelianGroup ambient, std::vector<GroupElement> generators) : ambient_(std::move(ambient)) {
    generators_.reserve(generators.size());
    for (auto& g : generators) generators_.push_back(ambient_.reduce(std::move(g.coords)));
  }

  const FgAbelianGroup& ambient() const { return ambient_; }
  const std::vector<GroupElement>& generators() const { return generators_; }

  /// Same monoid with generators deduplicated, zero removed, canonically sorted.
  AffineMonoid normalized() const { return AffineMonoid(ambient_, canonicalize(ambient_, generators_)); }

  bool operator==(const AffineMonoid&) const = default;

  std::string str() const {
    std::string out = "<";
    for (std::size_t i = 0; i < generators_.size(); ++i) {
      if (i) out += ", ";
      out += generators_[i].str();
    }
    return out + "> in " + ambient_.str();
  }

 private:
  FgAbelianGroup ambient_;
  std::vector<GroupElement> generators_;
};

namespace detail {

/// Basis of span_Q(columns) ∩ Z^n together with coordinates in it.
struct SpanLattice {
  IntMatrix basis;      // n x d
  IntMatrix to_coords;  // d x n, valid on the span
  IntMatrix coords;     // d x k, coordinates of the input columns
};

inline IntMatrix unimodular_inverse(const IntMatrix& u) {
  IntegerSolver solver(u);
  IntMatrix inv(u.rows(), u.cols());
  for (std::size_t j = 0; j < u.cols(); ++j) {
    IntVector e(u.rows());
    e[j] = 1;
    auto x = solver.solve(e);
    if (!x) throw Error("internal: matrix is not unimodular");
    for (std::size_t i = 0; i < u.rows(); ++i) inv(i, j) = (*x)[i];
  }
  return inv;
}

inline SpanLattice span_lattice(const IntMatrix& cols) {
  SmithForm snf = smith(cols);
  const std::size_t d = snf.rank();
  SpanLattice out;
  out.basis = unimodular_inverse(snf.U).column_range(0, d);
  out.to_coords = snf.U.row_range(0, d);
  out.coords = out.to_coords * cols;
  return out;
}

/// Splits Z^d along the lattice points of a cone's lineality space.
struct LinealitySplit {
  std::size_t rank = 0;
  IntMatrix lineality_basis;  // d x w
  IntMatrix quotient_map;     // (d-w) x d, kernel = lineality lattice
  IntMatrix section;          // d x (d-w), quotient_map * section = I
};

inline LinealitySplit split_lineality(const PolyhedralCone& cone) {
  const std::size_t d = cone.dim();
  LinealitySplit out;
  auto lin = cone.lineality_generators();
  if (lin.empty()) {
    out.lineality_basis = IntMatrix(d, 0);
    out.quotient_map = IntMatrix::identity(d);
    out.section = IntMatrix::identity(d);
    return out;
  }
  SmithForm snf = smith(IntMatrix::from_columns(lin, d));
  out.rank = snf.rank();
  IntMatrix uinv = unimodular_inverse(snf.U);
  out.lineality_basis = hermite_basis(uinv.column_range(0, out.rank));
  out.quotient_map = snf.U.row_range(out.rank, d);
  out.section = uinv.column_range(out.rank, d);
  return out;
}

/// Monoid generators of cone ∩ Z^d; handles a nontrivial lineality space by
/// adding ± a basis of its lattice points.
inline std::vector<IntVector> cone_lattice_generators(const PolyhedralCone& cone) {
  if (cone.is_pointed()) return cone.hilbert_basis();
  LinealitySplit split = split_lineality(cone);
  std::vector<IntVector> quotient_gens;
  for (const auto& g : cone.generators()) quotient_gens.push_back(split.quotient_map * g);
  PolyhedralCone quotient(quotient_gens, cone.dim() - split.rank);
  std::vector<IntVector> out;
  for (const auto& h : quotient.hilbert_basis()) out.push_back(split.section * h);
  for (std::size_t j = 0; j < split.rank; ++j) {
    IntVector b = split.lineality_basis.column(j);
    out.push_back(b);
    out.push_back(scaled(b, -1));
  }
  return out;
}

/// Canonical generators of the finite subgroup H ∩ (ambient torsion) for a
/// subgroup H with generator matrix `gens`.
inline std::vector<GroupElement> torsion_subgroup_generators(const FgAbelianGroup& ambient, const IntMatrix& gens) {
  if (ambient.torsion().empty() || gens.cols() == 0) return {};
  const std::size_t r = ambient.free_rank();
  const std::size_t t = ambient.torsion().size();
  IntMatrix free_rows = gens.row_range(0, r);
  IntMatrix ker = kernel_basis(free_rows);
  IntMatrix tors = (gens * ker).row_range(r, r + t);
  IntMatrix lattice = hermite_basis(hconcat(tors, ambient.relations().row_range(r, r + t)));
  std::vector<GroupElement> out;
  for (std::size_t j = 0; j < lattice.cols(); ++j) {
    IntVector v(ambient.dim());
    for (std::size_t i = 0; i < t; ++i) v[r + i] = lattice(i, j);
    GroupElement e = ambient.reduce(std::move(v));
    if (!is_zero(e.coords)) out.push_back(std::move(e));
  }
  return canonicalize(ambient, std::move(out));
}

/// All elements of the finite group generated by `gens` (pure torsion elements).
inline std::vector<GroupElement> enumerate_finite_subgroup(const FgAbelianGroup& ambient,
                                                           const std::vector<GroupElement>& gens) {
  std::set<IntVector> seen{ambient.zero().coords};
  std::vector<GroupElement> frontier{ambient.zero()};
  while (!frontier.empty()) {
    std::vector<GroupElement> next;
    for (const auto& x : frontier)
      for (const auto& g : gens) {
        GroupElement y = ambient.add(x, g);
        if (seen.insert(y.coords).second) next.push_back(std::move(y));
      }
    frontier = std::move(next);
  }
  std::vector<GroupElement> out;
  for (const auto& v : seen) out.emplace_back(v);
  return canonicalize(ambient, std::move(out), false);
}

inline IntMatrix free_rows_of(const FgAbelianGroup& ambient, const IntMatrix& m) {
  return m.row_range(0, ambient.free_rank());
}

}  // namespace detail

/// gp(M): the subgroup of the ambient group generated by M.
inline Subgroup gp(const AffineMonoid& m) { return Subgroup(m.ambient(), m.generators()); }

/// Precomputed data for repeated membership queries in one monoid.
///
/// Generators in the lineality space of the cone (and pure torsion
/// generators) generate the unit group; membership quotients by it and runs
/// a depth-first search over the remaining generators, bounded by a grading
/// that is strictly positive on them.
class MembershipOracle {
 public:
  explicit MembershipOracle(const AffineMonoid& m) : monoid_(m), group_(gp(m)), units_(m.ambient(), {}) {
    const auto& amb = m.ambient();
    const std::size_t r = amb.free_rank();
    IntMatrix gen_free = detail::free_rows_of(amb, group_.generator_matrix());
    lattice_ = hermite_basis(gen_free);
    if (lattice_.rows() != r) lattice_ = IntMatrix(r, 0);
    coords_solver_ = IntegerSolver(lattice_);
    const std::size_t d = lattice_.cols();

    std::vector<IntVector> gen_coords;
    for (const auto& g : m.generators()) gen_coords.push_back(*coords_solver_.solve(amb.free_part(g)));
    cone_.emplace(gen_coords, d);
    split_ = detail::split_lineality(*cone_);

    std::vector<IntVector> quotient_gens;
    for (const auto& c : gen_coords) quotient_gens.push_back(split_.quotient_map * c);
    PolyhedralCone quotient(quotient_gens, d - split_.rank);
    grading_ = IntMatrix::from_rows({quotient.grading()}, d - split_.rank) * split_.quotient_map;
    if (grading_.rows() == 0) grading_ = IntMatrix(1, d);

    std::vector<GroupElement> unit_gens;
    for (std::size_t j = 0; j < m.generators().size(); ++j) {
      Integer deg = (grading_ * gen_coords[j])[0];
      if (deg == 0)
        unit_gens.push_back(m.generators()[j]);
      else
        nonunits_.push_back({m.generators()[j], gen_coords[j], deg});
    }
    units_ = Subgroup(amb, unit_gens);
    std::sort(nonunits_.begin(), nonunits_.end(), [](const auto& a, const auto& b) { return a.degree > b.degree; });
  }

  const AffineMonoid& monoid() const { return monoid_; }
  const Subgroup& group() const { return group_; }
  const Subgroup& unit_group() const { return units_; }
  bool is_pointed() const { return units_.generators().empty(); }

  /// Coordinates of the free part of x in the lattice pi(gp M), if it lies there.
  std::optional<IntVector> lattice_coords(const GroupElement& x) const {
    return coords_solver_.solve(monoid_.ambient().free_part(x));
  }

  bool contains(const GroupElement& raw) const {
    GroupElement v = monoid_.ambient().reduce(raw.coords);
    if (!group_.contains(v)) return false;
    auto x = lattice_coords(v);
    if (!x || !cone_->contains(*x)) return false;
    Integer budget = (grading_ * *x)[0];
    std::set<std::pair<IntVector, std::size_t>> failed;
    return search(v, *x, budget, 0, failed);
  }

 private:
  struct Generator {
    GroupElement element;
    IntVector coords;
    Integer degree;
  };

  bool search(const GroupElement& rem, const IntVector& coords, const Integer& budget, std::size_t start,
              std::set<std::pair<IntVector, std::size_t>>& failed) const {
    if (budget == 0) return units_.contains(rem);
    auto key = std::make_pair(rem.coords, start);
    if (failed.count(key)) return false;
    for (std::size_t j = start; j < nonunits_.size(); ++j) {
      const auto& g = nonunits_[j];
      if (g.degree > budget) continue;
      IntVector next_coords = coords - g.coords;
      if (!cone_->contains(next_coords)) continue;
      if (search(monoid_.ambient().sub(rem, g.element), next_coords, budget - g.degree, j, failed)) return true;
    }
    failed.insert(std::move(key));
    return false;
  }

  AffineMonoid monoid_;
  Subgroup group_;
  IntMatrix lattice_;
  IntegerSolver coords_solver_{IntMatrix()};
  std::optional<PolyhedralCone> cone_;
  detail::LinealitySplit split_;
  IntMatrix grading_;
  std::vector<Generator> nonunits_;
  Subgroup units_;
};

/// True iff v is a nonnegative integer combination of M's generators.
inline bool membership(const AffineMonoid& m, const GroupElement& v) { return MembershipOracle(m).contains(v); }

/// Generators of {x in H : n x in P for some n >= 1}, where H is a subgroup
/// of P's ambient group containing gp(P). With H = gp(P) this is P^sat.
inline std::vector<GroupElement> relative_saturation_generators(const AffineMonoid& p, const Subgroup& h) {
  const auto& amb = p.ambient();
  const std::size_t r = amb.free_rank();
  IntMatrix h_free = detail::free_rows_of(amb, h.generator_matrix());
  IntMatrix lattice = hermite_basis(h_free);  // basis of pi(H)
  if (lattice.rows() != r) lattice = IntMatrix(r, 0);
  IntegerSolver lattice_coords(lattice);
  IntegerSolver lift_solver(h_free);

  const std::size_t dh = lattice.cols();
  IntMatrix p_coords(dh, p.generators().size());
  for (std::size_t j = 0; j < p.generators().size(); ++j) {
    auto c = lattice_coords.solve(amb.free_part(p.generators()[j]));
    if (!c) throw InputError("generator " + p.generators()[j].str() + " does not lie in the given subgroup");
    for (std::size_t i = 0; i < dh; ++i) p_coords(i, j) = (*c)[i];
  }
  detail::SpanLattice span = detail::span_lattice(p_coords);
  const std::size_t dp = span.basis.cols();
  PolyhedralCone cone(span.coords.columns(), dp);

  std::vector<GroupElement> torsion = detail::torsion_subgroup_generators(amb, h.generator_matrix());
  std::vector<GroupElement> coset = detail::enumerate_finite_subgroup(amb, torsion);

  std::vector<GroupElement> out = torsion;
  for (const auto& v : detail::cone_lattice_generators(cone)) {
    IntVector free_vec = lattice * (span.basis * v);
    auto c = lift_solver.solve(free_vec);
    if (!c) throw Error("internal: lattice point does not lift");
    GroupElement lift = h.combine(*c);
    GroupElement best = lift;
    for (const auto& t : coset) {
      GroupElement cand = amb.add(lift, t);
      if (canonical_less(amb, cand, best)) best = std::move(cand);
    }
    out.push_back(std::move(best));
  }
  return canonicalize(amb, std::move(out));
}

/// M^sat = {x in gp M : n x in M for some n >= 1}, canonically generated.
inline AffineMonoid saturate(const AffineMonoid& m) {
  return AffineMonoid(m.ambient(), relative_saturation_generators(m, gp(m)));
}

/// True iff M equals its saturation.
inline bool is_saturated(const AffineMonoid& m) {
  MembershipOracle oracle(m);
  const AffineMonoid sat = saturate(m);
  for (const auto& g : sat.generators())
    if (!oracle.contains(g)) return false;
  return true;
}

/// Outcome of a relative saturation test.
struct SaturatedInResult {
  enum class Verdict { ProvedTrue, TrueWithinBound, False };
  Verdict verdict = Verdict::ProvedTrue;
  /// x in M with n x in P but x not in P (when verdict is False).
  std::optional<GroupElement> witness;
  Integer multiplier = 0;
  Integer bound = 0;
  Integer multiplier_bound = 0;

  bool holds() const { return verdict != Verdict::False; }
};

inline const char* to_string(SaturatedInResult::Verdict v) {
  switch (v) {
    case SaturatedInResult::Verdict::ProvedTrue: return "proved-true";
    case SaturatedInResult::Verdict::TrueWithinBound: return "true-within-bound";
    case SaturatedInResult::Verdict::False: return "false";
  }
  return "?";
}

struct SearchBounds {
  long long coordinate_bound = kDefaultSearchBound;
  long long multiplier_bound = kDefaultMultiplierBound;
};

/// Decides whether P is saturated in M: x in M and n x in P imply x in P.
///
/// P is compared against its saturation relative to gp(M). When every
/// generator of that relative saturation lies in P the answer is proved;
/// a generator lying in M but not in P is a witness. Otherwise elements of
/// M up to the coordinate bound are searched with multipliers up to the
/// multiplier bound.
inline SaturatedInResult is_saturated_in(const AffineMonoid& p, const AffineMonoid& m, SearchBounds bounds = {}) {
  if (!(p.ambient() == m.ambient())) throw InputError("is_saturated_in: monoids live in different ambient groups");
  MembershipOracle in_m(m);
  for (std::size_t j = 0; j < p.generators().size(); ++j)
    if (!in_m.contains(p.generators()[j]))
      throw InputError("is_saturated_in: generator " + std::to_string(j) + " " + p.generators()[j].str() +
                       " of P is not in M");
  MembershipOracle in_p(p);
  const auto& amb = p.ambient();

  SaturatedInResult res;
  res.bound = bounds.coordinate_bound;
  res.multiplier_bound = bounds.multiplier_bound;

  auto smallest_multiplier = [&](const GroupElement& x, long long cap) -> std::optional<Integer> {
    for (long long n = 2; n <= cap; ++n)
      if (in_p.contains(amb.mul(n, x))) return Integer(n);
    return std::nullopt;
  };

  auto relative = relative_saturation_generators(p, in_m.group());
  std::vector<GroupElement> outside;
  for (const auto& y : relative)
    if (!in_p.contains(y)) outside.push_back(y);
  if (outside.empty()) return res;

  for (const auto& y : outside)
    if (in_m.contains(y)) {
      // Some multiple lies in P by construction; find the least one.
      auto n = smallest_multiplier(y, 1'000'000);
      if (!n) throw Error("internal: no multiple of " + y.str() + " found in P");
      res.verdict = SaturatedInResult::Verdict::False;
      res.witness = y;
      res.multiplier = *n;
      return res;
    }

  // Bounded search over elements of M.
  AffineMonoid relative_monoid(amb, relative);
  MembershipOracle in_relative(relative_monoid);
  const Integer bound = bounds.coordinate_bound;
  auto within = [&](const GroupElement& x) {
    for (std::size_t i = 0; i < amb.free_rank(); ++i)
      if (abs(x[i]) > bound) return false;
    return true;
  };
  std::set<IntVector> seen{amb.zero().coords};
  std::vector<GroupElement> frontier{amb.zero()};
  std::vector<GroupElement> found;
  while (!frontier.empty()) {
    std::vector<GroupElement> next;
    for (const auto& x : frontier)
      for (const auto& g : m.generators()) {
        GroupElement y = amb.add(x, g);
        if (!within(y) || !seen.insert(y.coords).second) continue;
        next.push_back(y);
      }
    frontier = std::move(next);
  }
  std::vector<GroupElement> elements;
  for (const auto& v : seen) elements.emplace_back(v);
  elements = canonicalize(amb, std::move(elements));
  for (const auto& x : elements) {
    if (!in_relative.contains(x) || in_p.contains(x)) continue;
    if (auto n = smallest_multiplier(x, bounds.multiplier_bound)) {
      res.verdict = SaturatedInResult::Verdict::False;
      res.witness = x;
      res.multiplier = *n;
      return res;
    }
  }
  res.verdict = SaturatedInResult::Verdict::TrueWithinBound;
  return res;
}

/// Hilbert basis of the cone spanned by the free parts of `generators`,
/// intersected with the ambient free lattice. Throws NotPointedError.
inline std::vector<GroupElement> hilbert_basis(const FgAbelianGroup& ambient, const std::vector<GroupElement>& generators) {
  const std::size_t r = ambient.free_rank();
  std::vector<IntVector> free_parts;
  for (const auto& g : generators) free_parts.push_back(ambient.free_part(ambient.reduce(g.coords)));
  IntMatrix cols = IntMatrix::from_columns(free_parts, r);
  detail::SpanLattice span = detail::span_lattice(cols);
  PolyhedralCone cone(span.coords.columns(), span.basis.cols());
  std::vector<IntVector> basis;
  try {
    basis = cone.hilbert_basis();
  } catch (const NotPointedError& e) {
    std::vector<IntVector> lin;
    for (const auto& v : e.lineality()) lin.push_back(span.basis * v);
    std::string msg = "cone is not pointed; lineality space spanned by";
    for (const auto& v : lin) msg += " " + to_string(v);
    throw NotPointedError(msg, lin);
  }
  std::vector<GroupElement> out;
  for (const auto& h : basis) {
    IntVector v = span.basis * h;
    v.resize(ambient.dim());
    out.emplace_back(std::move(v));
  }
  return canonicalize(ambient, std::move(out));
}

inline std::vector<GroupElement> hilbert_basis(const AffineMonoid& m) { return hilbert_basis(m.ambient(), m.generators()); }

/// P = P_fr + P_tor for saturated P.
struct MonoidDecomposition {
  AffineMonoid free_part;
  /// Every element of the finite group P_tor, canonically ordered (zero first).
  std::vector<GroupElement> torsion_part;
  /// For each source generator g: (y, z) with g = y + z, y in free_part, z in torsion_part.
  std::vector<std::pair<GroupElement, GroupElement>> generator_splits;
};

/// Splits a saturated monoid into a free part and its torsion subgroup.
inline MonoidDecomposition split_torsion(const AffineMonoid& p) {
  if (!is_saturated(p)) throw InputError("split_torsion: monoid is not saturated");
  const auto& amb = p.ambient();
  const std::size_t r = amb.free_rank();
  Subgroup group = gp(p);
  IntMatrix gen_free = detail::free_rows_of(amb, group.generator_matrix());
  IntMatrix lattice = hermite_basis(gen_free);
  if (lattice.rows() != r) lattice = IntMatrix(r, 0);
  IntegerSolver coords(lattice);
  IntegerSolver lift_solver(gen_free);

  auto torsion_gens = detail::torsion_subgroup_generators(amb, group.generator_matrix());
  auto torsion = detail::enumerate_finite_subgroup(amb, torsion_gens);

  // Section of pi over pi(gp P): canonical lifts of the lattice basis.
  std::vector<GroupElement> section;
  for (std::size_t j = 0; j < lattice.cols(); ++j) {
    GroupElement lift = group.combine(*lift_solver.solve(lattice.column(j)));
    GroupElement best = lift;
    for (const auto& t : torsion) {
      GroupElement cand = amb.add(lift, t);
      if (canonical_less(amb, cand, best)) best = std::move(cand);
    }
    section.push_back(std::move(best));
  }

  MonoidDecomposition out;
  std::vector<GroupElement> free_gens;
  for (const auto& g : p.generators()) {
    IntVector c = *coords.solve(amb.free_part(g));
    GroupElement y = amb.zero();
    for (std::size_t j = 0; j < c.size(); ++j) y = amb.add(y, amb.mul(c[j], section[j]));
    GroupElement z = amb.sub(g, y);
    free_gens.push_back(y);
    out.generator_splits.emplace_back(y, z);
  }
  out.free_part = AffineMonoid(amb, canonicalize(amb, std::move(free_gens)));
  out.torsion_part = std::move(torsion);
  return out;
}

}  // namespace logsmooth
