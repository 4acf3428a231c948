#include "generators.hpp"
#include "oracles.hpp"

#include "logsmooth/monoid.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace logsmooth;

namespace {

const FgAbelianGroup kZ(1);
const FgAbelianGroup kZ2(2);
const FgAbelianGroup kZZ2(1, {Integer(2)});

AffineMonoid monoid(const FgAbelianGroup& amb, std::vector<GroupElement> gens) { return AffineMonoid(amb, std::move(gens)); }

std::vector<GroupElement> elems(std::initializer_list<std::initializer_list<long long>> xs) {
  std::vector<GroupElement> out;
  for (auto x : xs) out.emplace_back(x);
  return out;
}

// Saturation of a pointed monoid in Z^2 with nonnegative generators, by brute force.
bool in_saturation_by_box(const AffineMonoid& m, const oracle::Reach2& reach, long a, long b, int max_n) {
  if (!oracle::in_subgroup(m.ambient(), m.generators(), IntVector{a, b})) return false;
  for (int n = 1; n <= max_n; ++n)
    if (reach.contains(n * a, n * b)) return true;
  return false;
}

std::vector<std::pair<int, int>> pairs(const AffineMonoid& m) {
  std::vector<std::pair<int, int>> out;
  for (const auto& g : m.generators()) out.emplace_back(static_cast<int>(g[0]), static_cast<int>(g[1]));
  return out;
}

}  // namespace

TEST(Membership, SpecExamples) {
  AffineMonoid m23 = monoid(kZ, elems({{2}, {3}}));
  EXPECT_FALSE(membership(m23, GroupElement{1}));
  EXPECT_TRUE(membership(m23, GroupElement{5}));
  EXPECT_TRUE(membership(m23, GroupElement{0}));
  AffineMonoid m = monoid(kZ2, elems({{1, 0}, {1, 2}}));
  EXPECT_FALSE(membership(m, GroupElement{1, 1}));
  EXPECT_TRUE(membership(m, GroupElement{0, 0}));
  EXPECT_TRUE(membership(m, GroupElement{3, 4}));
}

TEST(Membership, AgreesWithReachability) {
  std::mt19937 rng(11);
  for (int t = 0; t < 40; ++t) {
    AffineMonoid m = gen::pointed_monoid_z2(rng);
    oracle::Reach2 reach(pairs(m), 30);
    MembershipOracle in(m);
    for (long a = 0; a <= 15; ++a)
      for (long b = 0; b <= 15; ++b) EXPECT_EQ(in.contains(GroupElement{a, b}), reach.contains(a, b)) << m.str();
  }
}

TEST(Membership, MonoidWithUnits) {
  AffineMonoid m = monoid(kZ2, elems({{1, 0}, {-1, 0}, {0, 1}}));
  MembershipOracle in(m);
  EXPECT_FALSE(in.is_pointed());
  EXPECT_TRUE(in.contains(GroupElement{-5, 3}));
  EXPECT_TRUE(in.contains(GroupElement{7, 0}));
  EXPECT_FALSE(in.contains(GroupElement{0, -1}));
  AffineMonoid whole = monoid(kZ, elems({{2}, {-3}}));
  EXPECT_TRUE(membership(whole, GroupElement{-1}));
}

TEST(Membership, TorsionCoordinates) {
  AffineMonoid m = monoid(kZZ2, elems({{1, 1}}));
  EXPECT_TRUE(membership(m, GroupElement{2, 0}));
  EXPECT_FALSE(membership(m, GroupElement{2, 1}));
  EXPECT_TRUE(membership(m, GroupElement{3, 1}));
  EXPECT_FALSE(membership(m, GroupElement{0, 1}));
}

TEST(Gp, SpecExamples) {
  EXPECT_TRUE(gp(monoid(kZ, elems({{2}, {3}}))).is_whole_ambient());
  Subgroup even = gp(monoid(kZ, elems({{2}})));
  EXPECT_EQ(even.index(), std::optional<Integer>(2));
  EXPECT_TRUE(even.contains(GroupElement{-4}));
  EXPECT_FALSE(even.contains(GroupElement{1}));
  EXPECT_TRUE(gp(monoid(kZZ2, elems({{1, 0}, {0, 1}}))).is_whole_ambient());
}

TEST(Saturate, SpecExamples) {
  EXPECT_EQ(saturate(monoid(kZ, elems({{2}, {3}}))).generators(), elems({{1}}));
  EXPECT_EQ(saturate(monoid(kZ, elems({{1}}))).generators(), elems({{1}}));
}

TEST(Saturate, StaysInsideGroupOfFractions) {
  // gp of <(1,0),(1,2)> is {(a,b) : b even}, so (1,1) is not adjoined; the
  // normalization in Z^2 is the Hilbert basis of the cone.
  AffineMonoid m = monoid(kZ2, elems({{1, 0}, {1, 2}}));
  EXPECT_EQ(saturate(m).generators(), m.normalized().generators());
  EXPECT_TRUE(is_saturated(m));
  EXPECT_EQ(hilbert_basis(m), elems({{1, 0}, {1, 1}, {1, 2}}));
  SaturatedInResult r = is_saturated_in(m, monoid(kZ2, elems({{1, 0}, {0, 1}})));
  EXPECT_EQ(r.verdict, SaturatedInResult::Verdict::False);
  EXPECT_EQ(r.witness, (GroupElement{1, 1}));
  EXPECT_EQ(r.multiplier, 2);
}

TEST(Saturate, TorsionAmbient) {
  AffineMonoid m = monoid(kZZ2, elems({{1, 1}, {1, 0}}));
  EXPECT_EQ(saturate(m).generators(), elems({{0, 1}, {1, 0}}));
  EXPECT_FALSE(is_saturated(m));
  AffineMonoid twice = monoid(kZZ2, elems({{2, 1}}));
  EXPECT_EQ(saturate(twice).generators(), elems({{2, 1}}));
}

TEST(Saturate, NonPointed) {
  AffineMonoid m = monoid(kZ2, elems({{2, 0}, {-2, 0}, {1, 1}}));
  AffineMonoid s = saturate(m);
  EXPECT_TRUE(is_saturated(s));
  MembershipOracle in(s);
  EXPECT_TRUE(in.contains(GroupElement{-4, 0}));
  EXPECT_TRUE(in.contains(GroupElement{-1, 1}));
  EXPECT_FALSE(in.contains(GroupElement{1, -1}));
}

TEST(IsSaturated, SpecExamples) {
  EXPECT_TRUE(is_saturated(monoid(kZ, elems({{2}}))));
  EXPECT_FALSE(is_saturated(monoid(kZ, elems({{2}, {3}}))));
  EXPECT_TRUE(is_saturated(monoid(kZ, elems({{1}}))));
}

TEST(IsSaturatedIn, SpecExamples) {
  SaturatedInResult r = is_saturated_in(monoid(kZ, elems({{2}})), monoid(kZ, elems({{1}})));
  EXPECT_FALSE(r.holds());
  EXPECT_EQ(r.witness, (GroupElement{1}));
  EXPECT_EQ(r.multiplier, 2);

  AffineMonoid m = monoid(kZ2, elems({{1, 0}, {1, 2}}));
  EXPECT_EQ(is_saturated_in(m, m).verdict, SaturatedInResult::Verdict::ProvedTrue);
  EXPECT_TRUE(is_saturated_in(monoid(kZ, elems({{1}})), monoid(kZ, elems({{1}, {2}}))).holds());
}

TEST(IsSaturatedIn, RejectsForeignGenerators) {
  EXPECT_THROW(is_saturated_in(monoid(kZ, elems({{-1}})), monoid(kZ, elems({{1}}))), InputError);
}

TEST(IsSaturatedIn, WitnessIsGenuine) {
  std::mt19937 rng(77);
  for (int t = 0; t < 30; ++t) {
    AffineMonoid m = gen::pointed_monoid_z2(rng);
    std::vector<GroupElement> sub;
    for (const auto& g : m.generators()) sub.push_back(GroupElement(scaled(g.coords, gen::uniform(rng, 1, 3))));
    AffineMonoid p(kZ2, sub);
    SaturatedInResult r = is_saturated_in(p, m);
    if (r.holds()) continue;
    ASSERT_TRUE(r.witness);
    EXPECT_TRUE(membership(m, *r.witness));
    EXPECT_FALSE(membership(p, *r.witness));
    EXPECT_TRUE(membership(p, GroupElement(scaled(r.witness->coords, r.multiplier))));
  }
}

TEST(Hilbert, SpecExamples) {
  EXPECT_EQ(hilbert_basis(kZ2, elems({{1, 0}, {0, 1}})), elems({{0, 1}, {1, 0}}));
  auto basis = hilbert_basis(kZ2, elems({{2, 1}, {1, 2}}));
  std::set<IntVector> got, want{{2, 1}, {1, 1}, {1, 2}};
  for (const auto& b : basis) got.insert(b.coords);
  EXPECT_EQ(got, want);
}

TEST(Hilbert, NonPointedRejectedWithLineality) {
  try {
    hilbert_basis(kZ2, elems({{1, 0}, {-1, 0}, {0, 1}}));
    FAIL() << "expected NotPointedError";
  } catch (const NotPointedError& e) {
    ASSERT_EQ(e.lineality().size(), 1u);
    EXPECT_EQ(abs(e.lineality()[0][0]), 1);
    EXPECT_EQ(e.lineality()[0][1], 0);
  }
}

TEST(Hilbert, MinimalAndGenerating) {
  std::mt19937 rng(202);
  for (int t = 0; t < 40; ++t) {
    AffineMonoid m = gen::pointed_monoid_z2(rng);
    auto basis = hilbert_basis(m);
    for (std::size_t i = 0; i < basis.size(); ++i) {
      std::vector<GroupElement> rest;
      for (std::size_t j = 0; j < basis.size(); ++j)
        if (j != i) rest.push_back(basis[j]);
      EXPECT_FALSE(membership(AffineMonoid(kZ2, rest), basis[i])) << m.str();
    }
    for (const auto& g : m.generators()) EXPECT_TRUE(membership(AffineMonoid(kZ2, basis), g));
  }
}

TEST(SaturateProperties, RandomPointedMonoids) {
  std::mt19937 rng(4242);
  for (int t = 0; t < 100; ++t) {
    AffineMonoid m = gen::pointed_monoid_z2(rng);
    AffineMonoid s = saturate(m);
    EXPECT_EQ(saturate(s).generators(), s.generators()) << m.str();
    MembershipOracle in_s(s), in_m(m);
    for (const auto& g : m.generators()) EXPECT_TRUE(in_s.contains(g));
    for (const auto& g : s.generators()) {
      bool some_multiple = false;
      for (int n = 1; n <= 64 && !some_multiple; ++n) some_multiple = in_m.contains(GroupElement(scaled(g.coords, n)));
      EXPECT_TRUE(some_multiple) << g.str() << " in " << s.str();
    }
    oracle::Reach2 reach(pairs(m), 12 * 12);
    for (long a = 0; a <= 12; ++a)
      for (long b = 0; b <= 12; ++b)
        if (in_saturation_by_box(m, reach, a, b, 12)) { EXPECT_TRUE(in_s.contains(GroupElement{a, b})) << m.str(); }
  }
}

TEST(SplitTorsion, SpecExamples) {
  MonoidDecomposition d = split_torsion(monoid(kZZ2, elems({{1, 0}, {0, 1}})));
  EXPECT_EQ(d.free_part.generators(), elems({{1, 0}}));
  EXPECT_EQ(d.torsion_part, elems({{0, 0}, {0, 1}}));

  AffineMonoid free = monoid(kZ2, elems({{1, 0}, {1, 1}}));
  MonoidDecomposition e = split_torsion(free);
  EXPECT_EQ(e.torsion_part, elems({{0, 0}}));
  EXPECT_EQ(e.free_part.generators(), free.normalized().generators());

  MonoidDecomposition f = split_torsion(saturate(monoid(kZZ2, elems({{1, 1}, {1, 0}}))));
  EXPECT_EQ(f.torsion_part.size(), 2u);
  EXPECT_EQ(f.free_part.generators().size(), 1u);
  EXPECT_EQ(f.free_part.generators()[0][0], 1);
}

TEST(SplitTorsion, RejectsUnsaturated) {
  EXPECT_THROW(split_torsion(monoid(kZ, elems({{2}, {3}}))), InputError);
}

TEST(SplitTorsion, Reassembles) {
  const FgAbelianGroup amb(2, {Integer(2), Integer(3)});
  std::mt19937 rng(55);
  for (int t = 0; t < 20; ++t) {
    std::vector<GroupElement> gens;
    for (int k = 0; k < 3; ++k)
      gens.push_back(amb.reduce(IntVector{gen::uniform(rng, 0, 3), gen::uniform(rng, 0, 3), gen::uniform(rng, 0, 1),
                                          gen::uniform(rng, 0, 2)}));
    AffineMonoid p = saturate(AffineMonoid(amb, gens));
    MonoidDecomposition d = split_torsion(p);
    std::vector<GroupElement> all = d.free_part.generators();
    all.insert(all.end(), d.torsion_part.begin(), d.torsion_part.end());
    AffineMonoid back(amb, all);
    MembershipOracle in_back(back), in_p(p);
    for (const auto& g : p.generators()) EXPECT_TRUE(in_back.contains(g));
    for (const auto& g : all) EXPECT_TRUE(in_p.contains(g));
    for (std::size_t j = 0; j < p.generators().size(); ++j) {
      const auto& [y, z] = d.generator_splits[j];
      EXPECT_EQ(amb.add(y, z), p.generators()[j]);
    }
  }
}
