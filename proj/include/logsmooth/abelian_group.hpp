#pragma once

#include "logsmooth/intlin.hpp"

#include <algorithm>
#include <compare>
#include <string>
#include <utility>
#include <vector>

namespace logsmooth {

/// Element of an ambient group Z^r + sum Z/m_i, stored as a coordinate vector
/// whose torsion part is reduced into [0, m_i).
struct GroupElement {
  IntVector coords;

  GroupElement() = default;
  explicit GroupElement(IntVector c) : coords(std::move(c)) {}
  GroupElement(std::initializer_list<long long> c) {
    for (long long x : c) coords.emplace_back(x);
  }

  std::size_t size() const { return coords.size(); }
  const Integer& operator[](std::size_t i) const { return coords[i]; }
  bool operator==(const GroupElement&) const = default;
  std::string str() const { return to_string(coords); }
};

/// Ambient group Z^free_rank + Z/m_1 + ... + Z/m_t with all m_i >= 2.
class FgAbelianGroup {
 public:
  FgAbelianGroup() = default;
  explicit FgAbelianGroup(std::size_t free_rank, std::vector<Integer> torsion = {})
      : free_rank_(free_rank), torsion_(std::move(torsion)) {
    for (const auto& m : torsion_)
      if (m < 2) throw InputError("torsion orders must be >= 2, got " + m.str());
  }

  std::size_t free_rank() const { return free_rank_; }
  const std::vector<Integer>& torsion() const { return torsion_; }
  std::size_t dim() const { return free_rank_ + torsion_.size(); }
  bool is_free() const { return torsion_.empty(); }

  /// Order of the torsion subgroup.
  Integer torsion_order() const {
    Integer p = 1;
    for (const auto& m : torsion_) p *= m;
    return p;
  }

  /// dim x #torsion matrix whose columns generate the relations m_i e_{r+i}.
  IntMatrix relations() const {
    IntMatrix rel(dim(), torsion_.size());
    for (std::size_t i = 0; i < torsion_.size(); ++i) rel(free_rank_ + i, i) = torsion_[i];
    return rel;
  }

  GroupElement zero() const { return GroupElement(IntVector(dim())); }

  GroupElement reduce(IntVector v) const {
    if (v.size() != dim())
      throw InputError("element " + to_string(v) + " has " + std::to_string(v.size()) + " coordinates, group needs " +
                       std::to_string(dim()));
    for (std::size_t i = 0; i < torsion_.size(); ++i) v[free_rank_ + i] = mod_floor(v[free_rank_ + i], torsion_[i]);
    return GroupElement(std::move(v));
  }

  GroupElement add(const GroupElement& a, const GroupElement& b) const { return reduce(a.coords + b.coords); }
  GroupElement sub(const GroupElement& a, const GroupElement& b) const { return reduce(a.coords - b.coords); }
  GroupElement neg(const GroupElement& a) const { return reduce(scaled(a.coords, -1)); }
  GroupElement mul(const Integer& k, const GroupElement& a) const { return reduce(scaled(a.coords, k)); }

  bool is_reduced(const GroupElement& a) const {
    if (a.size() != dim()) return false;
    for (std::size_t i = 0; i < torsion_.size(); ++i) {
      const Integer& x = a[free_rank_ + i];
      if (x < 0 || x >= torsion_[i]) return false;
    }
    return true;
  }

  IntVector free_part(const GroupElement& a) const {
    return IntVector(a.coords.begin(), a.coords.begin() + static_cast<std::ptrdiff_t>(free_rank_));
  }
  IntVector torsion_part(const GroupElement& a) const {
    return IntVector(a.coords.begin() + static_cast<std::ptrdiff_t>(free_rank_), a.coords.end());
  }

  /// All elements of the torsion subgroup, in lexicographic order.
  std::vector<GroupElement> torsion_elements() const {
    std::vector<GroupElement> out;
    IntVector cur(dim());
    enumerate_torsion(0, cur, out);
    return out;
  }

  std::string str() const {
    std::string out = "Z^" + std::to_string(free_rank_);
    for (const auto& m : torsion_) out += " + Z/" + m.str();
    return out;
  }

  bool operator==(const FgAbelianGroup&) const = default;

 private:
  void enumerate_torsion(std::size_t i, IntVector& cur, std::vector<GroupElement>& out) const {
    if (i == torsion_.size()) {
      out.emplace_back(cur);
      return;
    }
    for (Integer x = 0; x < torsion_[i]; ++x) {
      cur[free_rank_ + i] = x;
      enumerate_torsion(i + 1, cur, out);
    }
    cur[free_rank_ + i] = 0;
  }

  std::size_t free_rank_ = 0;
  std::vector<Integer> torsion_;
};

/// Canonical order on generator lists: total free degree, then free
/// coordinates lexicographically, then torsion coordinates.
inline bool canonical_less(const FgAbelianGroup& g, const GroupElement& a, const GroupElement& b) {
  Integer da = 0, db = 0;
  for (std::size_t i = 0; i < g.free_rank(); ++i) {
    da += a[i];
    db += b[i];
  }
  if (da != db) return da < db;
  return a.coords < b.coords;
}

/// Sorts canonically, removes duplicates and (optionally) the zero element.
inline std::vector<GroupElement> canonicalize(const FgAbelianGroup& g, std::vector<GroupElement> elems,
                                              bool drop_zero = true) {
  for (auto& e : elems) e = g.reduce(std::move(e.coords));
  std::sort(elems.begin(), elems.end(),
            [&](const GroupElement& a, const GroupElement& b) { return canonical_less(g, a, b); });
  elems.erase(std::unique(elems.begin(), elems.end()), elems.end());
  if (drop_zero) std::erase_if(elems, [](const GroupElement& e) { return is_zero(e.coords); });
  return elems;
}

inline IntMatrix columns_of(const std::vector<GroupElement>& elems, std::size_t dim) {
  IntMatrix m(dim, elems.size());
  for (std::size_t j = 0; j < elems.size(); ++j) {
    if (elems[j].size() != dim) throw InputError("element " + elems[j].str() + " has wrong dimension");
    for (std::size_t i = 0; i < dim; ++i) m(i, j) = elems[j][i];
  }
  return m;
}

/// Homomorphism between ambient groups given by an integer matrix acting on
/// coordinate vectors (target.dim() rows, source.dim() columns).
class GroupHom {
 public:
  GroupHom(FgAbelianGroup source, FgAbelianGroup target, IntMatrix matrix)
      : source_(std::move(source)), target_(std::move(target)), matrix_(std::move(matrix)) {
    if (matrix_.rows() != target_.dim() || matrix_.cols() != source_.dim())
      throw InputError("map matrix is " + std::to_string(matrix_.rows()) + "x" + std::to_string(matrix_.cols()) +
                       ", expected " + std::to_string(target_.dim()) + "x" + std::to_string(source_.dim()));
    // Each torsion generator of order m must go to an element killed by m.
    for (std::size_t i = 0; i < source_.torsion().size(); ++i) {
      const std::size_t col = source_.free_rank() + i;
      const Integer& m = source_.torsion()[i];
      GroupElement image = target_.reduce(scaled(matrix_.column(col), m));
      if (!is_zero(image.coords))
        throw InputError("map is not well defined on torsion: generator " + std::to_string(col) + " of order " +
                         m.str() + " maps to an element whose " + m.str() + "-fold multiple is nonzero");
    }
  }

  static GroupHom identity(const FgAbelianGroup& g) { return GroupHom(g, g, IntMatrix::identity(g.dim())); }

  const FgAbelianGroup& source() const { return source_; }
  const FgAbelianGroup& target() const { return target_; }
  const IntMatrix& matrix() const { return matrix_; }

  GroupElement operator()(const GroupElement& x) const { return target_.reduce(matrix_ * x.coords); }

  /// this after `first`.
  GroupHom after(const GroupHom& first) const {
    if (!(first.target() == source_)) throw InputError("maps are not composable");
    return GroupHom(first.source(), target_, matrix_ * first.matrix());
  }

 private:
  FgAbelianGroup source_;
  FgAbelianGroup target_;
  IntMatrix matrix_;
};

/// Subgroup of an ambient group generated by finitely many elements, with
/// the data needed to compute in it: the lattice of relations among the
/// generators and an abstract Smith-canonical description.
class Subgroup {
 public:
  Subgroup(FgAbelianGroup ambient, std::vector<GroupElement> generators)
      : ambient_(std::move(ambient)), generators_(std::move(generators)) {
    const std::size_t k = generators_.size();
    gen_matrix_ = columns_of(generators_, ambient_.dim());
    // Relations: c in Z^k with sum c_j g_j = 0 in the ambient group.
    IntMatrix with_rel = hconcat(gen_matrix_, ambient_.relations());
    IntMatrix ker = kernel_basis(with_rel);
    relations_ = hermite_basis(ker.row_range(0, k));
    if (relations_.rows() != k) relations_ = IntMatrix(k, 0);
    lattice_basis_ = hermite_basis(with_rel);
    membership_ = IntegerSolver(with_rel);
    structure_ = quotient_presentation(relations_);
  }

  const FgAbelianGroup& ambient() const { return ambient_; }
  const std::vector<GroupElement>& generators() const { return generators_; }
  const IntMatrix& generator_matrix() const { return gen_matrix_; }
  /// Columns span {c : sum c_j g_j = 0}; the subgroup is Z^k / that lattice.
  const IntMatrix& relations() const { return relations_; }
  /// Hermite basis of the preimage of the subgroup in Z^dim (contains the
  /// ambient torsion relations); equal for equal subgroups.
  const IntMatrix& lattice_basis() const { return lattice_basis_; }

  std::size_t free_rank() const { return structure_.free_rank; }
  const std::vector<Integer>& torsion() const { return structure_.torsion; }
  /// The subgroup as an abstract group in Smith-canonical form.
  FgAbelianGroup as_group() const { return FgAbelianGroup(structure_.free_rank, structure_.torsion); }
  /// Maps coefficient vectors over the generators to coordinates of as_group().
  const IntMatrix& canonical_projection() const { return structure_.projection; }

  bool contains(const GroupElement& x) const { return membership_.solvable(x.coords); }

  /// Integer coefficients c with sum c_j g_j = x, if x lies in the subgroup.
  std::optional<IntVector> coefficients(const GroupElement& x) const {
    auto sol = membership_.solve(x.coords);
    if (!sol) return std::nullopt;
    sol->resize(generators_.size());
    return sol;
  }

  GroupElement combine(const IntVector& coeffs) const { return ambient_.reduce(gen_matrix_ * coeffs); }

  /// Index in the ambient group; nullopt when infinite.
  std::optional<Integer> index() const {
    CokernelInfo c = cokernel_from_smith(membership_.smith_form(), ambient_.dim());
    if (c.free_rank > 0) return std::nullopt;
    return c.torsion_order();
  }

  bool is_whole_ambient() const {
    auto i = index();
    return i && *i == 1;
  }

 private:
  FgAbelianGroup ambient_;
  std::vector<GroupElement> generators_;
  IntMatrix gen_matrix_;
  IntMatrix relations_;
  IntMatrix lattice_basis_;
  IntegerSolver membership_{IntMatrix()};
  QuotientPresentation structure_;
};

/// Kernel of a map Z^n / im(src_rel) -> Z^m / im(tgt_rel) induced by `map`
/// (m x n), as an abstract group. The map must be well defined.
inline CokernelInfo kernel_of_presented_map(const IntMatrix& map, const IntMatrix& src_rel, const IntMatrix& tgt_rel) {
  const std::size_t n = map.cols();
  IntMatrix ker = kernel_basis(hconcat(map, tgt_rel));
  IntMatrix lattice = hermite_basis(ker.row_range(0, n));  // L = preimage of zero
  if (lattice.rows() != n) lattice = IntMatrix(n, 0);
  // Ker = L / im(src_rel); rewrite src_rel in the basis of L.
  IntegerSolver in_lattice(lattice);
  IntMatrix coeffs(lattice.cols(), src_rel.cols());
  for (std::size_t j = 0; j < src_rel.cols(); ++j) {
    auto c = in_lattice.solve(src_rel.column(j));
    if (!c) throw Error("internal: source relations do not map to zero");
    for (std::size_t i = 0; i < lattice.cols(); ++i) coeffs(i, j) = (*c)[i];
  }
  return cokernel(coeffs);
}

}  // namespace logsmooth
