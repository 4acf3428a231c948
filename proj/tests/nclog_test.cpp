#include "generators.hpp"
#include "oracles.hpp"

#include "logsmooth/nclog.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>

using namespace logsmooth;

namespace {

const NCRing kDouble(2, 1);  // z0 z1 = 0, spare variable z2

NCPoly z(const NCRing& r, std::size_t i, long long power = 1) { return NCPoly::variable(r, i, power); }
NCPoly c(const NCRing& r, const Rational& q) { return NCPoly::constant(r, q); }

LogSystem sys(const NCRing& r, std::vector<NCPoly> zeta) { return LogSystem(r, std::move(zeta)); }

NCCover swap_cover(const Rational& scale0) {
  NCCover cover;
  cover.charts.push_back(sys(kDouble, {c(kDouble, scale0 * 2) * z(kDouble, 0), c(kDouble, Rational(1, 2)) * z(kDouble, 1),
                                       c(kDouble, 1)}));
  cover.charts.push_back(sys(kDouble, {z(kDouble, 1), z(kDouble, 0), c(kDouble, 1)}));
  cover.overlaps.push_back(Overlap{0, 1, std::nullopt, std::nullopt});
  return cover;
}

// Three charts whose entries differ by constant factors with product 1 per
// chart; every transition is found automatically and is therefore consistent.
NCCover three_chart_cover() {
  NCCover cover;
  cover.charts.push_back(sys(kDouble, {z(kDouble, 0), z(kDouble, 1), c(kDouble, 1)}));
  cover.charts.push_back(sys(kDouble, {c(kDouble, 3) * z(kDouble, 1), c(kDouble, 5) * z(kDouble, 0), c(kDouble, Rational(1, 15))}));
  cover.charts.push_back(sys(kDouble, {c(kDouble, 2) * z(kDouble, 0), z(kDouble, 1), c(kDouble, Rational(1, 2))}));
  for (std::size_t a = 0; a < 3; ++a)
    for (std::size_t b = a + 1; b < 3; ++b) cover.overlaps.push_back(Overlap{a, b, std::nullopt, std::nullopt});
  return cover;
}

NCPoly random_poly(std::mt19937& rng, const NCRing& r) {
  NCPoly f(r);
  if (gen::uniform(rng, 0, 2) == 0) {
    // Bias towards single terms so units actually occur.
    Exponents e(r.variables());
    for (std::size_t j = 0; j < e.size(); ++j)
      e[j] = r.is_inverted(j) ? gen::uniform(rng, -2, 2) : (gen::uniform(rng, 0, 3) == 0 ? 1 : 0);
    f.add_term(e, gen::uniform(rng, 1, 5));
  } else {
    const long count = gen::uniform(rng, 1, 3);
    for (long k = 0; k < count; ++k) {
      Exponents e(r.variables());
      for (std::size_t j = 0; j < e.size(); ++j) e[j] = r.is_inverted(j) ? gen::uniform(rng, -2, 2) : gen::uniform(rng, 0, 2);
      f.add_term(e, gen::uniform(rng, -3, 3));
    }
  }
  f.reduce();
  return f;
}

NCCover relabel(const NCCover& cover, const std::vector<std::size_t>& perm) {
  NCCover out;
  out.charts.resize(cover.charts.size(), cover.charts.front());
  for (std::size_t i = 0; i < perm.size(); ++i) out.charts[perm[i]] = cover.charts[i];
  for (auto o : cover.overlaps) {
    o.first = perm[o.first];
    o.second = perm[o.second];
    out.overlaps.push_back(o);
  }
  return out;
}

}  // namespace

TEST(NcArithmetic, Examples) {
  NCPoly one = c(kDouble, 1);
  NCPoly f = (one + z(kDouble, 0)) * (one + z(kDouble, 1));
  EXPECT_EQ(f, one + z(kDouble, 0) + z(kDouble, 1));
  EXPECT_EQ(f * one, f);
  EXPECT_TRUE((z(kDouble, 0) * z(kDouble, 1)).is_zero());
  NCRing deep(3, 2);
  EXPECT_TRUE((z(deep, 0) * z(deep, 1) * z(deep, 2)).is_zero());
  EXPECT_FALSE((z(deep, 0) * z(deep, 1)).is_zero());
}

TEST(NcArithmetic, FiniteField) {
  NCRing f3(1, 0, {1}, CoefficientField(3));
  NCPoly two = c(f3, 2);
  EXPECT_EQ(two * two, c(f3, 1));
  EXPECT_EQ(*two.inverse(), two);
  EXPECT_TRUE((c(f3, 3)).is_zero());
  EXPECT_EQ(c(f3, Rational(1, 2)), two);
  EXPECT_THROW(CoefficientField(4), InputError);
}

TEST(NcArithmetic, NegativeExponentNeedsInversion) {
  EXPECT_THROW(z(kDouble, 2, -1), InputError);
  NCRing inv(2, 1, {2});
  EXPECT_TRUE((z(inv, 2, -1) * z(inv, 2)).is_one());
}

TEST(NcArithmetic, ReductionIdempotent) {
  std::mt19937 rng(3);
  NCRing r(3, 1, {2});
  for (int t = 0; t < 200; ++t) {
    NCPoly f = random_poly(rng, r) * random_poly(rng, r) + random_poly(rng, r);
    NCPoly g = f;
    g.reduce();
    EXPECT_EQ(f, g) << f.str();
  }
}

TEST(NcArithmetic, RingAxiomsOnSamples) {
  std::mt19937 rng(17);
  NCRing r(2, 1, {2});
  for (int t = 0; t < 100; ++t) {
    NCPoly a = random_poly(rng, r), b = random_poly(rng, r), d = random_poly(rng, r);
    EXPECT_EQ(a * (b + d), a * b + a * d);
    EXPECT_EQ((a * b) * d, a * (b * d));
    EXPECT_EQ(a * b, b * a);
    EXPECT_TRUE((a - a).is_zero());
  }
}

TEST(Units, Examples) {
  auto three = c(kDouble, 3).inverse();
  ASSERT_TRUE(three);
  EXPECT_EQ(*three, c(kDouble, Rational(1, 3)));
  EXPECT_FALSE((c(kDouble, 1) + z(kDouble, 0)).is_unit());
  NCRing inv(2, 1, {2});
  auto z2 = z(inv, 2).inverse();
  ASSERT_TRUE(z2);
  EXPECT_EQ(*z2, z(inv, 2, -1));
  EXPECT_FALSE(z(kDouble, 2).is_unit());
  EXPECT_FALSE(NCPoly(kDouble).is_unit());
}

TEST(Units, AgreeWithComponentOracle) {
  std::mt19937 rng(2718);
  NCRing r(3, 1, {2});
  int units = 0;
  for (int t = 0; t < 200; ++t) {
    NCPoly f = random_poly(rng, r);
    const bool u = f.is_unit();
    units += u;
    EXPECT_EQ(u, oracle::unit_by_components(f)) << f.str();
    if (u) { EXPECT_TRUE((f * *f.inverse()).is_one()); }
  }
  EXPECT_GT(units, 10);
}

TEST(BoundaryIdeal, Membership) {
  NCRing r(3, 2);
  EXPECT_TRUE((z(r, 0) * z(r, 1) + z(r, 1) * z(r, 2)).in_boundary_ideal());
  EXPECT_FALSE(z(r, 0).in_boundary_ideal());
  EXPECT_FALSE(c(r, 1).in_boundary_ideal());
  EXPECT_TRUE(NCPoly(r).in_boundary_ideal());
}

TEST(LogSystems, Examples) {
  LogSystemCheck plain = validate_log_system(sys(kDouble, {z(kDouble, 0), z(kDouble, 1), c(kDouble, 1)}));
  EXPECT_TRUE(plain.valid);
  LogSystemCheck scaled = validate_log_system(sys(kDouble, {c(kDouble, 2) * z(kDouble, 0), z(kDouble, 1), c(kDouble, 5)}));
  EXPECT_TRUE(scaled.valid);
  EXPECT_EQ(scaled.units[0], c(kDouble, 2));
  LogSystemCheck bad =
      validate_log_system(sys(kDouble, {z(kDouble, 1), z(kDouble, 0) + c(kDouble, 1), c(kDouble, 1)}));
  EXPECT_FALSE(bad.valid);
  EXPECT_EQ(bad.failing_index, 1u);
}

TEST(LogSystems, RejectsRepeatedCrossingVariable) {
  LogSystemCheck chk = validate_log_system(sys(kDouble, {z(kDouble, 0), z(kDouble, 0), c(kDouble, 1)}));
  EXPECT_FALSE(chk.valid);
  EXPECT_EQ(chk.failing_index, 1u);
}

TEST(LogSystems, RejectsNonUnitTail) {
  LogSystemCheck chk = validate_log_system(sys(kDouble, {z(kDouble, 0), z(kDouble, 1), z(kDouble, 2)}));
  EXPECT_FALSE(chk.valid);
  EXPECT_EQ(chk.failing_index, 2u);
}

TEST(Transitions, Examples) {
  LogSystem id = sys(kDouble, {z(kDouble, 0), z(kDouble, 1), c(kDouble, 1)});
  LogSystem swapped = sys(kDouble, {z(kDouble, 1), z(kDouble, 0), c(kDouble, 1)});
  Transition s = find_transition(id, swapped);
  EXPECT_EQ(s.sigma, (std::vector<std::size_t>{1, 0, 2}));
  for (const auto& u : s.units) EXPECT_TRUE(u.is_one());

  Transition same = find_transition(id, id);
  EXPECT_EQ(same.sigma, (std::vector<std::size_t>{0, 1, 2}));

  LogSystem doubled = sys(kDouble, {c(kDouble, 2) * z(kDouble, 0), z(kDouble, 1), c(kDouble, 1)});
  Transition t = find_transition(doubled, id);
  EXPECT_EQ(t.sigma, (std::vector<std::size_t>{0, 1, 2}));
  EXPECT_EQ(t.units[0], c(kDouble, 2));
  EXPECT_TRUE(t.units[1].is_one());
}

TEST(Transitions, MismatchRejected) {
  LogSystem a = sys(kDouble, {z(kDouble, 0), z(kDouble, 1), c(kDouble, 1)});
  LogSystem b(NCRing(2, 1, {2}), {z(NCRing(2, 1, {2}), 0), z(NCRing(2, 1, {2}), 1), c(NCRing(2, 1, {2}), 1)});
  EXPECT_THROW(find_transition(a, b), InputError);
}

TEST(Transitions, SoundAndAdmissible) {
  std::mt19937 rng(55);
  NCRing r(3, 1, {2, 3});
  for (int t = 0; t < 100; ++t) {
    auto make = [&] {
      std::vector<std::size_t> vars{0, 1};
      std::shuffle(vars.begin(), vars.end(), rng);
      std::vector<NCPoly> zeta;
      auto unit = [&] {
        Exponents e(r.variables());
        e[2] = gen::uniform(rng, -1, 1);
        e[3] = gen::uniform(rng, -1, 1);
        return NCPoly::term(r, gen::uniform(rng, 1, 4), e);
      };
      for (auto v : vars) zeta.push_back(unit() * z(r, v));
      zeta.push_back(unit());
      zeta.push_back(unit());
      return sys(r, zeta);
    };
    LogSystem a = make(), b = make();
    Transition tr = find_transition(a, b);
    EXPECT_FALSE(transition_failure(a, b, tr).has_value());
    for (std::size_t i = 0; i < a.zeta.size(); ++i) EXPECT_EQ(a.zeta[i], tr.units[i] * b.zeta[tr.sigma[i]]);
    auto perms = oracle::admissible_permutations(a, b);
    EXPECT_NE(std::find(perms.begin(), perms.end(), tr.sigma), perms.end());
  }
}

TEST(Transitions, InverseComposesToIdentity) {
  LogSystem a = sys(kDouble, {c(kDouble, 3) * z(kDouble, 0), z(kDouble, 1), c(kDouble, 2)});
  LogSystem b = sys(kDouble, {z(kDouble, 1), c(kDouble, 5) * z(kDouble, 0), c(kDouble, 1)});
  Transition ab = find_transition(a, b), ba = find_transition(b, a);
  EXPECT_EQ(ab.inverse(), ba);
}

TEST(Cocycle, Examples) {
  NCCover ok = swap_cover(1);
  auto v = cocycle_check(ok);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_TRUE(v[0].strict);
  EXPECT_TRUE(v[0].mod_boundary);

  NCCover twice;
  twice.charts.push_back(sys(kDouble, {c(kDouble, 2) * z(kDouble, 0), z(kDouble, 1), c(kDouble, 1)}));
  twice.charts.push_back(sys(kDouble, {z(kDouble, 0), z(kDouble, 1), c(kDouble, 1)}));
  twice.overlaps.push_back(Overlap{0, 1, std::nullopt, std::nullopt});
  auto w = cocycle_check(twice);
  EXPECT_FALSE(w[0].strict);
  EXPECT_EQ(w[0].product, c(kDouble, 2));
  EXPECT_EQ(w[0].deviation, c(kDouble, 1));
}

TEST(Cocycle, StrictFailModBoundaryPass) {
  NCRing r(2, 1);
  Transition t{{0, 1, 2}, {c(r, 1) + z(r, 1), c(r, 1), c(r, 1)}};
  NCCover cover;
  cover.charts.push_back(sys(r, {z(r, 0), z(r, 1), c(r, 1)}));
  cover.charts.push_back(sys(r, {z(r, 0), z(r, 1), c(r, 1)}));
  cover.overlaps.push_back(Overlap{0, 1, std::nullopt, t});
  auto v = cocycle_check(cover);
  EXPECT_FALSE(v[0].strict);
  EXPECT_TRUE(v[0].mod_boundary);
  EXPECT_FALSE(v[0].passed(CocycleMode::Strict));
  EXPECT_TRUE(v[0].passed(CocycleMode::ModBoundary));
}

TEST(Cocycle, StrictImpliesModBoundary) {
  std::mt19937 rng(8);
  NCRing r(3, 1, {2});
  for (int t = 0; t < 200; ++t) {
    std::vector<NCPoly> units;
    for (int k = 0; k < 4; ++k) units.push_back(random_poly(rng, r));
    // Make half of the instances telescope to exactly 1.
    if (t % 2 == 0 && units[0].is_unit()) {
      NCPoly rest = units[1] * units[2];
      if (auto inv = rest.inverse()) units[3] = *inv * *units[0].inverse();
    }
    NCCover cover;
    cover.charts.push_back(sys(r, {z(r, 0), z(r, 1), c(r, 1), c(r, 1)}));
    cover.charts.push_back(sys(r, {z(r, 0), z(r, 1), c(r, 1), c(r, 1)}));
    cover.overlaps.push_back(Overlap{0, 1, std::nullopt, Transition{{0, 1, 2, 3}, units}});
    auto v = cocycle_check(cover);
    if (v[0].strict) { EXPECT_TRUE(v[0].mod_boundary); }
  }
}

TEST(Triple, IdentityPasses) {
  NCCover cover;
  for (int k = 0; k < 3; ++k) cover.charts.push_back(sys(kDouble, {z(kDouble, 0), z(kDouble, 1), c(kDouble, 1)}));
  cover.overlaps = {{0, 1, {}, {}}, {1, 2, {}, {}}, {0, 2, {}, {}}};
  EXPECT_TRUE(triple_cocycle_check(cover, 0, 1, 2).passed);
}

TEST(Triple, ConsistentConstantsPass) {
  NCCover cover = three_chart_cover();
  TripleVerdict v = triple_cocycle_check(cover, 0, 1, 2);
  EXPECT_TRUE(v.passed) << v.reason;
}

TEST(Triple, PerturbedUnitFailsAtIndex) {
  NCCover cover = complete_transitions(three_chart_cover());
  for (auto& o : cover.overlaps)
    if (o.first == 0 && o.second == 2) o.transition->units[0] = o.transition->units[0] * c(kDouble, 2);
  TripleVerdict v = triple_cocycle_check(cover, 0, 1, 2);
  EXPECT_FALSE(v.passed);
  EXPECT_EQ(v.failing_index, 0u);
}

TEST(Triple, UnitEntriesCompareByClass) {
  // zeta_2 of the last chart is a unit, so a different unit factor on index 2
  // may be absorbed when the permutations differ.
  NCRing r(3, 1);
  NCCover cover;
  cover.charts.push_back(sys(r, {z(r, 0), z(r, 1), c(r, 1), c(r, 1)}));
  cover.charts.push_back(sys(r, {z(r, 0), z(r, 1), c(r, 1), c(r, 1)}));
  cover.charts.push_back(sys(r, {z(r, 0), z(r, 1), c(r, 2), c(r, 1)}));
  Transition ones{{0, 1, 2, 3}, {c(r, 1), c(r, 1), c(r, 1), c(r, 1)}};
  Transition to_last{{0, 1, 3, 2}, {c(r, 1), c(r, 1), c(r, 1), c(r, Rational(1, 2))}};
  Transition direct{{0, 1, 2, 3}, {c(r, 1), c(r, 1), c(r, Rational(1, 2)), c(r, 1)}};
  cover.overlaps = {{0, 1, {}, ones}, {1, 2, {}, to_last}, {0, 2, {}, direct}};
  TripleVerdict v = triple_cocycle_check(cover, 0, 1, 2);
  EXPECT_TRUE(v.passed) << v.reason;
}

TEST(Dss, Examples) {
  NCCover single;
  single.charts.push_back(sys(kDouble, {z(kDouble, 0), z(kDouble, 1), c(kDouble, 1)}));
  EXPECT_TRUE(dss_verdict(single));
  EXPECT_TRUE(dss_verdict(swap_cover(1)));
  DssReport scaled = dss_report(swap_cover(2));
  EXPECT_FALSE(scaled.holds);
  EXPECT_EQ(scaled.overlaps[0].product, c(kDouble, 2));
}

TEST(Dss, ThreeChartsAutoTriple) {
  DssReport rep = dss_report(three_chart_cover());
  EXPECT_TRUE(rep.holds);
  EXPECT_EQ(rep.triples.size(), 1u);
}

TEST(Dss, InvalidCoverThrows) {
  NCCover cover = swap_cover(1);
  cover.overlaps[0].transition = Transition{{0, 1, 2}, {c(kDouble, 1), c(kDouble, 1), c(kDouble, 1)}};
  EXPECT_THROW(dss_report(cover), InputError);
}

TEST(Dss, InvariantUnderRelabeling) {
  for (const NCCover& cover : {three_chart_cover(), swap_cover(1), swap_cover(3)}) {
    const bool base = dss_verdict(cover);
    std::vector<std::size_t> perm(cover.charts.size());
    std::iota(perm.begin(), perm.end(), 0);
    while (std::next_permutation(perm.begin(), perm.end())) EXPECT_EQ(dss_verdict(relabel(cover, perm)), base);
  }
}

TEST(Dss, InvariantUnderTelescopingRescale) {
  std::mt19937 rng(13);
  for (int t = 0; t < 30; ++t) {
    for (const NCCover& cover : {three_chart_cover(), swap_cover(1), swap_cover(2)}) {
      const bool base = dss_verdict(cover);
      NCCover scaled = cover;
      for (auto& chart : scaled.charts) {
        // Factors whose product is 1 on each chart.
        Rational acc = 1;
        for (std::size_t i = 0; i + 1 < chart.zeta.size(); ++i) {
          Rational f(gen::uniform(rng, 1, 5), gen::uniform(rng, 1, 5));
          acc *= f;
          chart.zeta[i] = c(chart.ring, f) * chart.zeta[i];
        }
        chart.zeta.back() = c(chart.ring, 1 / acc) * chart.zeta.back();
      }
      EXPECT_EQ(dss_verdict(scaled), base);
    }
  }
}

TEST(Dss, DepthZeroRingCannotHostLogSystem) {
  NCRing r(1, 0, {1});
  LogSystemCheck chk = validate_log_system(sys(r, {z(r, 0), c(r, 1)}));
  EXPECT_FALSE(chk.valid);
}
