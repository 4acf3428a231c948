#pragma once

// Monoid homomorphisms Q -> P and the group-level data that decides
// the chart condition for log smoothness: kernel and cokernel of
// gp(Q) -> gp(P), together with the pushout constructions built on them.

#include "logsmooth/monoid.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace logsmooth {

/// Raised when a map does not define a monoid homomorphism.
class HomError : public InputError {
 public:
  using InputError::InputError;
};

/// Q -> P realized by a homomorphism of the ambient groups.
class MonoidHom {
 public:
  MonoidHom(AffineMonoid source, AffineMonoid target, GroupHom ambient_map)
      : source_(std::move(source)), target_(std::move(target)), map_(std::move(ambient_map)) {}

  const AffineMonoid& source() const { return source_; }
  const AffineMonoid& target() const { return target_; }
  const GroupHom& ambient_map() const { return map_; }
  const IntMatrix& matrix() const { return map_.matrix(); }

  GroupElement operator()(const GroupElement& x) const { return map_(x); }

 private:
  AffineMonoid source_;
  AffineMonoid target_;
  GroupHom map_;
};

/// Validates that `matrix` defines a homomorphism of ambient groups sending
/// every generator of Q into P.
inline MonoidHom check_hom(const AffineMonoid& q, const AffineMonoid& p, const IntMatrix& matrix) {
  GroupHom map = [&] {
    try {
      return GroupHom(q.ambient(), p.ambient(), matrix);
    } catch (const InputError& e) {
      throw HomError(e.what());
    }
  }();
  MembershipOracle in_p(p);
  for (std::size_t j = 0; j < q.generators().size(); ++j) {
    GroupElement image = map(q.generators()[j]);
    if (!in_p.contains(image))
      throw HomError("generator " + std::to_string(j) + " " + q.generators()[j].str() + " maps to " + image.str() +
                     ", which is not in the target monoid");
  }
  return MonoidHom(q, p, std::move(map));
}

/// Residue characteristic: 0 or a prime.
struct Characteristic {
  unsigned long long value = 0;

  static Characteristic of(long long p) {
    if (p < 0 || p == 1) throw InputError("characteristic must be 0 or a prime, got " + std::to_string(p));
    for (long long d = 2; d * d <= p; ++d)
      if (p % d == 0) throw InputError("characteristic must be 0 or a prime, got " + std::to_string(p));
    return Characteristic{static_cast<unsigned long long>(p)};
  }

  /// True iff n is invertible in a field of this characteristic.
  bool inverts(const Integer& n) const { return value == 0 || n % value != 0; }
};

/// Kernel and cokernel data of gp(Q) -> gp(P).
struct SmoothnessReport {
  std::size_t ker_free_rank = 0;
  std::vector<Integer> ker_torsion;
  std::size_t coker_free_rank = 0;
  std::vector<Integer> coker_torsion;

  /// Order of the kernel; nullopt when it is infinite.
  std::optional<Integer> ker_order() const {
    if (ker_free_rank > 0) return std::nullopt;
    Integer o = 1;
    for (const auto& t : ker_torsion) o *= t;
    return o;
  }
  Integer coker_torsion_order() const {
    Integer o = 1;
    for (const auto& t : coker_torsion) o *= t;
    return o;
  }
  bool injective_gp() const { return ker_free_rank == 0 && ker_torsion.empty(); }

  /// Chart condition on kernel and torsion cokernel over characteristic p.
  /// Covers the group condition only, not smoothness of the strict part.
  bool verdict(Characteristic p) const {
    auto k = ker_order();
    if (!k) return false;
    return p.inverts(*k) && p.inverts(coker_torsion_order());
  }

  /// Human-readable reason for a negative verdict; empty when verdict holds.
  std::string failure_reason(Characteristic p) const {
    auto k = ker_order();
    if (!k) return "kernel has rank " + std::to_string(ker_free_rank) + " (infinite)";
    if (!p.inverts(*k)) return "kernel order " + k->str() + " not invertible";
    if (!p.inverts(coker_torsion_order())) return "torsion order " + coker_torsion_order().str() + " not invertible";
    return {};
  }
};

namespace detail {

// Coefficients over gp(P)'s generators of the images of Q's generators.
inline IntMatrix image_coefficients(const MonoidHom& h, const Subgroup& target_group) {
  const auto& qgens = h.source().generators();
  IntMatrix c(target_group.generators().size(), qgens.size());
  for (std::size_t j = 0; j < qgens.size(); ++j) {
    auto coeff = target_group.coefficients(h(qgens[j]));
    if (!coeff) throw HomError("image of generator " + std::to_string(j) + " is outside gp of the target");
    for (std::size_t i = 0; i < c.rows(); ++i) c(i, j) = (*coeff)[i];
  }
  return c;
}

}  // namespace detail

inline SmoothnessReport smoothness_report(const MonoidHom& h) {
  Subgroup gq = gp(h.source());
  Subgroup gpp = gp(h.target());
  SmoothnessReport rep;

  IntMatrix images = h.matrix() * gq.generator_matrix();
  CokernelInfo ker = kernel_of_presented_map(images, gq.relations(), h.target().ambient().relations());
  rep.ker_free_rank = ker.free_rank;
  rep.ker_torsion = ker.torsion;

  IntMatrix coeffs = detail::image_coefficients(h, gpp);
  CokernelInfo coker = cokernel(hconcat(gpp.relations(), coeffs));
  rep.coker_free_rank = coker.free_rank;
  rep.coker_torsion = coker.torsion;
  return rep;
}

/// Log étale: finite kernel, finite cokernel, orders invertible in characteristic p.
inline bool is_log_etale(const MonoidHom& h, Characteristic p) {
  SmoothnessReport rep = smoothness_report(h);
  return rep.coker_free_rank == 0 && rep.verdict(p);
}

/// Invariants of gp(P)/gp(Q): rank and torsion of the relative log differentials.
struct DifferentialInvariants {
  std::size_t rank = 0;
  std::vector<Integer> torsion;
  bool operator==(const DifferentialInvariants&) const = default;
};

inline DifferentialInvariants differential_invariants(const MonoidHom& h) {
  SmoothnessReport rep = smoothness_report(h);
  return {rep.coker_free_rank, rep.coker_torsion};
}

/// G = (gp H + Z^d) / <(b_i, -N e_i)>, with the images of H's generators and
/// of the adjoined roots e_i.
struct RootAdjunction {
  FgAbelianGroup group;
  std::vector<GroupElement> generator_images;
  std::vector<GroupElement> root_images;
  Subgroup source_group;
  IntMatrix projection;  // group.dim() x (k + d)

  /// Image of x in gp H under the canonical map gp H -> G.
  GroupElement image_of(const GroupElement& x) const {
    auto c = source_group.coefficients(x);
    if (!c) throw InputError("element " + x.str() + " is not in gp H");
    c->resize(projection.cols());
    return group.reduce(projection * *c);
  }
};

inline RootAdjunction adjoin_roots(const AffineMonoid& h, const std::vector<GroupElement>& b, const Integer& n) {
  if (n < 1) throw InputError("adjoin_roots: N must be at least 1, got " + n.str());
  Subgroup group = gp(h);
  const std::size_t k = group.generators().size();
  const std::size_t d = b.size();
  IntMatrix rel = block_diagonal(group.relations(), IntMatrix(d, 0));
  IntMatrix roots(k + d, d);
  for (std::size_t i = 0; i < d; ++i) {
    auto c = group.coefficients(h.ambient().reduce(b[i].coords));
    if (!c) throw InputError("adjoin_roots: b_" + std::to_string(i) + " = " + b[i].str() + " is not in gp H");
    for (std::size_t j = 0; j < k; ++j) roots(j, i) = (*c)[j];
    roots(k + i, i) = -n;
  }
  QuotientPresentation q = quotient_presentation(hconcat(rel, roots));
  FgAbelianGroup g(q.free_rank, q.torsion);
  RootAdjunction out{g, {}, {}, group, q.projection};
  for (std::size_t j = 0; j < k + d; ++j) {
    GroupElement e = g.reduce(q.projection.column(j));
    (j < k ? out.generator_images : out.root_images).push_back(std::move(e));
  }
  return out;
}

/// Integral pushout P1 +_Q P2: image of P1 and P2 in (gp P1 + gp P2)/<(h1 q, -h2 q)>.
struct Amalgamation {
  AffineMonoid monoid;
  std::vector<GroupElement> first_images;
  std::vector<GroupElement> second_images;
};

inline Amalgamation amalgamated_sum(const MonoidHom& h1, const MonoidHom& h2) {
  if (!(h1.source() == h2.source())) throw InputError("amalgamated_sum: maps have different sources");
  Subgroup g1 = gp(h1.target());
  Subgroup g2 = gp(h2.target());
  const std::size_t k1 = g1.generators().size();
  const std::size_t k2 = g2.generators().size();
  IntMatrix c1 = detail::image_coefficients(h1, g1);
  IntMatrix c2 = detail::image_coefficients(h2, g2);
  IntMatrix glue(k1 + k2, c1.cols());
  for (std::size_t j = 0; j < c1.cols(); ++j) {
    for (std::size_t i = 0; i < k1; ++i) glue(i, j) = c1(i, j);
    for (std::size_t i = 0; i < k2; ++i) glue(k1 + i, j) = -c2(i, j);
  }
  QuotientPresentation q = quotient_presentation(hconcat(block_diagonal(g1.relations(), g2.relations()), glue));
  FgAbelianGroup g(q.free_rank, q.torsion);
  Amalgamation out;
  std::vector<GroupElement> all;
  for (std::size_t j = 0; j < k1 + k2; ++j) {
    GroupElement e = g.reduce(q.projection.column(j));
    all.push_back(e);
    (j < k1 ? out.first_images : out.second_images).push_back(std::move(e));
  }
  out.monoid = AffineMonoid(g, canonicalize(g, std::move(all)));
  return out;
}

/// Chart of the fine saturated fiber product: saturation of the integral pushout.
inline AffineMonoid fs_fiber_chart(const MonoidHom& h1, const MonoidHom& h2) {
  return saturate(amalgamated_sum(h1, h2).monoid);
}

/// For Q -f-> P -g-> R with injective gp maps, checks
/// rank(gpR/gpQ) = rank(gpR/gpP) + rank(gpP/gpQ).
inline bool rank_additivity_check(const MonoidHom& f, const MonoidHom& g) {
  if (!(f.target() == g.source())) throw InputError("rank_additivity_check: maps are not composable");
  SmoothnessReport rf = smoothness_report(f);
  SmoothnessReport rg = smoothness_report(g);
  if (!rf.injective_gp()) throw InputError("rank_additivity_check: gp of the first map is not injective");
  if (!rg.injective_gp()) throw InputError("rank_additivity_check: gp of the second map is not injective");
  MonoidHom gf = check_hom(f.source(), g.target(), g.matrix() * f.matrix());
  SmoothnessReport rgf = smoothness_report(gf);
  return rgf.coker_free_rank == rg.coker_free_rank + rf.coker_free_rank;
}

}  // namespace logsmooth
