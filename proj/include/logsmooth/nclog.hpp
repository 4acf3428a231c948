#pragma once

// Log systems on normal crossing charts, transition data between charts and
// the cocycle conditions that decide whether a cover glues to a log
// structure of semistable type.

#include "logsmooth/nc_ring.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace logsmooth {

/// Tuple (zeta_0, ..., zeta_n) of ring elements on one chart.
struct LogSystem {
  NCRing ring;
  std::vector<NCPoly> zeta;

  LogSystem() = default;
  LogSystem(NCRing r, std::vector<NCPoly> z) : ring(std::move(r)), zeta(std::move(z)) {
    if (zeta.size() != ring.variables())
      throw InputError("log system has " + std::to_string(zeta.size()) + " entries, expected " +
                       std::to_string(ring.variables()));
    for (auto& f : zeta) f = f.in_ring(ring);
  }

  /// Same tuple read in another ring on the same variables.
  LogSystem in_ring(const NCRing& target) const {
    std::vector<NCPoly> z;
    for (const auto& f : zeta) z.push_back(f.in_ring(target));
    return LogSystem(target, std::move(z));
  }
};

inline constexpr std::size_t kNoVariable = static_cast<std::size_t>(-1);

namespace detail {

// Either a unit, or unit * z_k for a crossing variable k, or neither.
struct EntryShape {
  enum class Kind { Unit, Crossing, Other } kind = Kind::Other;
  std::size_t variable = kNoVariable;
  std::optional<NCPoly> unit;
};

inline EntryShape classify(const NCPoly& f) {
  const NCRing& ring = f.ring();
  if (auto inv = f.inverse(); inv) return {EntryShape::Kind::Unit, kNoVariable, f};
  if (f.terms().size() != 1) return {};
  const auto& [e, c] = *f.terms().begin();
  std::size_t carried = kNoVariable;
  for (std::size_t k = 0; k <= ring.d(); ++k) {
    if (e[k] == 0) continue;
    if (e[k] != 1 || carried != kNoVariable) return {};
    carried = k;
  }
  for (std::size_t j = ring.d() + 1; j < e.size(); ++j)
    if (e[j] != 0 && !ring.is_inverted(j)) return {};
  if (carried == kNoVariable) return {};
  Exponents rest = e;
  rest[carried] = 0;
  return {EntryShape::Kind::Crossing, carried, NCPoly::term(ring, c, rest)};
}

}  // namespace detail

/// Outcome of validate_log_system. `carried[i]` is the crossing variable
/// carried by zeta_i, or kNoVariable when zeta_i is a unit.
struct LogSystemCheck {
  bool valid = false;
  std::optional<std::size_t> failing_index;
  std::string reason;
  std::vector<NCPoly> units;
  std::vector<std::size_t> carried;
};

/// zeta_i (i <= d) must be a unit times a crossing variable, each crossing
/// variable used once; zeta_j (j > d) must be a unit.
inline LogSystemCheck validate_log_system(const LogSystem& sys) {
  LogSystemCheck out;
  const NCRing& ring = sys.ring;
  std::vector<bool> used(ring.d() + 1, false);
  for (std::size_t i = 0; i < sys.zeta.size(); ++i) {
    auto fail = [&](std::string why) {
      out.valid = false;
      out.failing_index = i;
      out.reason = "zeta_" + std::to_string(i) + " = " + sys.zeta[i].str() + ": " + std::move(why);
      return out;
    };
    detail::EntryShape shape = detail::classify(sys.zeta[i]);
    if (i <= ring.d()) {
      if (shape.kind != detail::EntryShape::Kind::Crossing)
        return fail("not a unit times a crossing variable");
      if (used[shape.variable]) return fail("crossing variable z" + std::to_string(shape.variable) + " used twice");
      used[shape.variable] = true;
    } else if (shape.kind != detail::EntryShape::Kind::Unit) {
      return fail("not a unit");
    }
    out.units.push_back(*shape.unit);
    out.carried.push_back(shape.variable);
  }
  out.valid = true;
  return out;
}

/// sigma and units u with zeta^first_i = u_i * zeta^second_{sigma(i)}.
struct Transition {
  std::vector<std::size_t> sigma;
  std::vector<NCPoly> units;

  bool operator==(const Transition&) const = default;

  Transition in_ring(const NCRing& target) const {
    Transition t{sigma, {}};
    for (const auto& u : units) t.units.push_back(u.in_ring(target));
    return t;
  }

  /// Transition in the opposite direction; needs every u_i to be a unit.
  Transition inverse() const {
    Transition t{std::vector<std::size_t>(sigma.size()), std::vector<NCPoly>(units.size())};
    for (std::size_t i = 0; i < sigma.size(); ++i) {
      auto inv = units[i].inverse();
      if (!inv) throw InputError("cannot invert transition: u_" + std::to_string(i) + " = " + units[i].str() + " is not a unit");
      t.sigma[sigma[i]] = i;
      t.units[sigma[i]] = std::move(*inv);
    }
    return t;
  }

  /// Product u_0 ... u_n.
  NCPoly product() const {
    if (units.empty()) throw InputError("transition has no units");
    NCPoly p = NCPoly::constant(units.front().ring(), 1);
    for (const auto& u : units) p = p * u;
    return p;
  }
};

inline bool is_permutation_of_range(const std::vector<std::size_t>& sigma) {
  std::vector<bool> hit(sigma.size(), false);
  for (auto s : sigma) {
    if (s >= sigma.size() || hit[s]) return false;
    hit[s] = true;
  }
  return true;
}

/// First index where zeta^a_i = u_i zeta^b_{sigma(i)} fails, if any.
inline std::optional<std::size_t> transition_failure(const LogSystem& a, const LogSystem& b, const Transition& t) {
  for (std::size_t i = 0; i < a.zeta.size(); ++i)
    if (!(a.zeta[i] == t.units[i] * b.zeta[t.sigma[i]])) return i;
  return std::nullopt;
}

/// Transition between two log systems over the same ring. Entries carrying a
/// crossing variable are matched by that variable, units in increasing order.
inline Transition find_transition(const LogSystem& from, const LogSystem& to) {
  if (!(from.ring == to.ring)) throw InputError("find_transition: log systems live in different rings");
  LogSystemCheck cf = validate_log_system(from);
  if (!cf.valid) throw InputError("find_transition: first system invalid: " + cf.reason);
  LogSystemCheck ct = validate_log_system(to);
  if (!ct.valid) throw InputError("find_transition: second system invalid: " + ct.reason);

  const std::size_t n = from.zeta.size();
  Transition t{std::vector<std::size_t>(n), std::vector<NCPoly>(n)};
  std::map<std::size_t, std::size_t> by_variable;
  std::vector<std::size_t> to_units;
  for (std::size_t j = 0; j < n; ++j) {
    if (ct.carried[j] == kNoVariable)
      to_units.push_back(j);
    else
      by_variable[ct.carried[j]] = j;
  }
  std::size_t next_unit = 0;
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t j;
    if (cf.carried[i] != kNoVariable) {
      auto it = by_variable.find(cf.carried[i]);
      if (it == by_variable.end())
        throw InputError("find_transition: structural mismatch, no entry of the second system carries z" +
                         std::to_string(cf.carried[i]));
      j = it->second;
    } else {
      if (next_unit >= to_units.size()) throw InputError("find_transition: structural mismatch in unit entries");
      j = to_units[next_unit++];
    }
    t.sigma[i] = j;
    t.units[i] = cf.units[i] * *ct.units[j].inverse();
  }
  if (auto bad = transition_failure(from, to, t))
    throw Error("find_transition: relation fails at index " + std::to_string(*bad));
  return t;
}

/// Declared intersection of two charts.
struct Overlap {
  std::size_t first = 0;
  std::size_t second = 0;
  std::optional<NCRing> ring;
  std::optional<Transition> transition;
};

/// Declared triple intersection.
struct TripleOverlap {
  std::array<std::size_t, 3> charts{};
  std::optional<NCRing> ring;
};

struct NCCover {
  std::vector<LogSystem> charts;
  std::vector<Overlap> overlaps;
  std::vector<TripleOverlap> triples;
};

namespace detail {

inline NCRing default_ring(const NCCover& cover, const std::vector<std::size_t>& idx) {
  const NCRing& base = cover.charts.at(idx.front()).ring;
  std::set<std::size_t> inverted;
  for (auto i : idx) {
    const NCRing& r = cover.charts.at(i).ring;
    if (r.n() != base.n() || r.d() != base.d() || !(r.field() == base.field()))
      throw InputError("charts " + std::to_string(idx.front()) + " and " + std::to_string(i) +
                       " have different shapes; the intersection needs an explicit ring");
    inverted.insert(r.inverted().begin(), r.inverted().end());
  }
  return NCRing(base.n(), base.d(), std::move(inverted), base.field());
}

inline void require_chart(const NCCover& cover, std::size_t i) {
  if (i >= cover.charts.size())
    throw InputError("chart index " + std::to_string(i) + " out of range (" + std::to_string(cover.charts.size()) +
                     " charts)");
}

inline const Overlap* find_overlap(const NCCover& cover, std::size_t a, std::size_t b) {
  for (const auto& o : cover.overlaps)
    if (o.first == a && o.second == b) return &o;
  return nullptr;
}

}  // namespace detail

/// Ring of an overlap: explicit, or the common chart ring with the union of inverted sets.
inline NCRing overlap_ring(const NCCover& cover, const Overlap& o) {
  if (o.ring) return *o.ring;
  return detail::default_ring(cover, {o.first, o.second});
}

inline NCRing triple_ring(const NCCover& cover, const TripleOverlap& t) {
  if (t.ring) return *t.ring;
  return detail::default_ring(cover, {t.charts[0], t.charts[1], t.charts[2]});
}

inline bool has_overlap(const NCCover& cover, std::size_t a, std::size_t b) {
  return detail::find_overlap(cover, a, b) || detail::find_overlap(cover, b, a);
}

/// Fills in every missing transition with find_transition over the overlap ring.
inline NCCover complete_transitions(NCCover cover) {
  for (auto& o : cover.overlaps) {
    if (o.transition) continue;
    detail::require_chart(cover, o.first);
    detail::require_chart(cover, o.second);
    NCRing ring = overlap_ring(cover, o);
    o.transition = find_transition(cover.charts[o.first].in_ring(ring), cover.charts[o.second].in_ring(ring));
  }
  return cover;
}

/// Transition from chart a to chart b, read in `ring`. Uses the declared
/// overlap (a,b), or inverts the declared (b,a).
inline Transition transition_between(const NCCover& cover, std::size_t a, std::size_t b, const NCRing& ring) {
  if (const Overlap* o = detail::find_overlap(cover, a, b)) {
    if (!o->transition) throw InputError("overlap (" + std::to_string(a) + "," + std::to_string(b) + ") has no transition");
    return o->transition->in_ring(ring);
  }
  if (const Overlap* o = detail::find_overlap(cover, b, a)) {
    if (!o->transition) throw InputError("overlap (" + std::to_string(b) + "," + std::to_string(a) + ") has no transition");
    return o->transition->in_ring(ring).inverse();
  }
  throw InputError("charts " + std::to_string(a) + " and " + std::to_string(b) + " have no declared overlap");
}

/// Triples checked by dss_verdict: the declared ones plus every triple of
/// pairwise overlapping charts whose default ring exists.
inline std::vector<TripleOverlap> triples_to_check(const NCCover& cover) {
  std::vector<TripleOverlap> out = cover.triples;
  auto declared = [&](std::array<std::size_t, 3> t) {
    std::sort(t.begin(), t.end());
    for (const auto& d : cover.triples) {
      auto s = d.charts;
      std::sort(s.begin(), s.end());
      if (s == t) return true;
    }
    return false;
  };
  const std::size_t m = cover.charts.size();
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = a + 1; b < m; ++b)
      for (std::size_t c = b + 1; c < m; ++c) {
        if (!has_overlap(cover, a, b) || !has_overlap(cover, b, c) || !has_overlap(cover, a, c)) continue;
        if (declared({a, b, c})) continue;
        TripleOverlap t{{a, b, c}, std::nullopt};
        try {
          (void)triple_ring(cover, t);
        } catch (const InputError&) {
          continue;
        }
        out.push_back(t);
      }
  return out;
}

/// Structural problems of a cover; empty when it is valid.
inline std::vector<std::string> validate_cover(const NCCover& cover) {
  std::vector<std::string> problems;
  for (std::size_t c = 0; c < cover.charts.size(); ++c) {
    LogSystemCheck chk = validate_log_system(cover.charts[c]);
    if (!chk.valid) problems.push_back("chart " + std::to_string(c) + ": " + chk.reason);
  }
  std::set<std::pair<std::size_t, std::size_t>> seen;
  for (const auto& o : cover.overlaps) {
    const std::string tag = "overlap (" + std::to_string(o.first) + "," + std::to_string(o.second) + ")";
    if (o.first >= cover.charts.size() || o.second >= cover.charts.size()) {
      problems.push_back(tag + ": chart index out of range");
      continue;
    }
    if (o.first == o.second) {
      problems.push_back(tag + ": chart overlaps itself");
      continue;
    }
    if (!seen.insert({o.first, o.second}).second) {
      problems.push_back(tag + ": declared twice");
      continue;
    }
    try {
      NCRing ring = overlap_ring(cover, o);
      LogSystem a = cover.charts[o.first].in_ring(ring);
      LogSystem b = cover.charts[o.second].in_ring(ring);
      if (!o.transition) {
        problems.push_back(tag + ": missing transition");
        continue;
      }
      Transition t = o.transition->in_ring(ring);
      if (t.sigma.size() != ring.variables() || !is_permutation_of_range(t.sigma)) {
        problems.push_back(tag + ": sigma is not a permutation of 0.." + std::to_string(ring.n()));
        continue;
      }
      if (t.units.size() != ring.variables()) {
        problems.push_back(tag + ": expected " + std::to_string(ring.variables()) + " units");
        continue;
      }
      for (std::size_t i = 0; i < t.units.size(); ++i)
        if (!t.units[i].is_unit()) problems.push_back(tag + ": u_" + std::to_string(i) + " = " + t.units[i].str() + " is not a unit");
      if (auto bad = transition_failure(a, b, t))
        problems.push_back(tag + ": transition relation fails at index " + std::to_string(*bad));
    } catch (const InputError& e) {
      problems.push_back(tag + ": " + e.what());
    }
  }
  if (!problems.empty()) return problems;

  for (const auto& o : cover.overlaps) {
    if (o.first > o.second) continue;
    const Overlap* back = detail::find_overlap(cover, o.second, o.first);
    if (!back) continue;
    NCRing ring = overlap_ring(cover, o);
    if (!(back->transition->in_ring(ring) == o.transition->in_ring(ring).inverse()))
      problems.push_back("overlaps (" + std::to_string(o.first) + "," + std::to_string(o.second) + ") and (" +
                         std::to_string(o.second) + "," + std::to_string(o.first) + ") are not mutually inverse");
  }
  for (const auto& t : cover.triples) {
    const auto& c = t.charts;
    const std::string tag = "triple (" + std::to_string(c[0]) + "," + std::to_string(c[1]) + "," + std::to_string(c[2]) + ")";
    if (std::any_of(c.begin(), c.end(), [&](std::size_t x) { return x >= cover.charts.size(); })) {
      problems.push_back(tag + ": chart index out of range");
      continue;
    }
    if (c[0] == c[1] || c[1] == c[2] || c[0] == c[2]) {
      problems.push_back(tag + ": charts must be distinct");
      continue;
    }
    if (!has_overlap(cover, c[0], c[1]) || !has_overlap(cover, c[1], c[2]) || !has_overlap(cover, c[0], c[2]))
      problems.push_back(tag + ": a pairwise overlap is missing");
    try {
      (void)triple_ring(cover, t);
    } catch (const InputError& e) {
      problems.push_back(tag + ": " + e.what());
    }
  }
  return problems;
}

enum class CocycleMode { Strict, ModBoundary };

inline std::string to_string(CocycleMode m) { return m == CocycleMode::Strict ? "strict" : "mod-d"; }

/// Product of the transition units on one overlap. A failing product is the
/// residual that should have been 1; `deviation` is product - 1.
struct OverlapVerdict {
  std::size_t first = 0;
  std::size_t second = 0;
  NCPoly product;
  NCPoly deviation;
  bool strict = false;
  bool mod_boundary = false;

  bool passed(CocycleMode mode) const { return mode == CocycleMode::Strict ? strict : mod_boundary; }
};

/// u_0 ... u_n on every declared overlap, in declaration order. Missing
/// transitions are derived; the supplied units are used as given.
inline std::vector<OverlapVerdict> cocycle_check(const NCCover& cover) {
  NCCover full = complete_transitions(cover);
  std::vector<OverlapVerdict> out;
  for (const auto& o : full.overlaps) {
    NCRing ring = overlap_ring(full, o);
    OverlapVerdict v;
    v.first = o.first;
    v.second = o.second;
    v.product = o.transition->in_ring(ring).product();
    v.deviation = v.product - NCPoly::constant(ring, 1);
    v.strict = v.deviation.is_zero();
    v.mod_boundary = v.deviation.in_boundary_ideal();
    out.push_back(std::move(v));
  }
  return out;
}

struct TripleVerdict {
  std::array<std::size_t, 3> charts{};
  bool passed = true;
  std::optional<std::size_t> failing_index;
  std::string reason;
};

/// Compatibility of the transitions a->b, b->c and a->c on the triple overlap.
inline TripleVerdict triple_cocycle_check(const NCCover& cover, std::size_t a, std::size_t b, std::size_t c,
                                          const std::optional<NCRing>& explicit_ring = std::nullopt) {
  for (auto x : {a, b, c}) detail::require_chart(cover, x);
  NCCover full = complete_transitions(cover);
  TripleOverlap wanted{{a, b, c}, explicit_ring};
  if (!wanted.ring)
    for (const auto& t : full.triples)
      if (t.charts == wanted.charts) wanted.ring = t.ring;
  NCRing ring = triple_ring(full, wanted);
  Transition s = transition_between(full, a, b, ring);  // sigma, u
  Transition t = transition_between(full, b, c, ring);  // tau, v
  Transition r = transition_between(full, a, c, ring);  // rho, w
  LogSystem first = full.charts[a].in_ring(ring);
  LogSystem last = full.charts[c].in_ring(ring);

  TripleVerdict out;
  out.charts = {a, b, c};
  for (std::size_t i = 0; i < ring.variables(); ++i) {
    const std::size_t via = t.sigma[s.sigma[i]];
    const std::size_t direct = r.sigma[i];
    const NCPoly composed = t.units[s.sigma[i]] * s.units[i];
    const NCPoly& w = r.units[i];
    bool ok;
    std::string why;
    if (detail::classify(first.zeta[i]).kind != detail::EntryShape::Kind::Unit) {
      ok = via == direct && composed == w;
      if (via != direct)
        why = "composed permutation sends " + std::to_string(i) + " to " + std::to_string(via) + ", direct to " +
              std::to_string(direct);
      else if (!ok)
        why = "composed unit " + composed.str() + " differs from " + w.str();
    } else {
      ok = (via == direct && composed == w) ||
           (last.zeta[via].is_unit() && last.zeta[direct].is_unit() &&
            composed * last.zeta[via] == w * last.zeta[direct]);
      if (!ok) why = "classes of " + composed.str() + "*zeta_" + std::to_string(via) + " and " + w.str() + "*zeta_" +
                     std::to_string(direct) + " differ";
    }
    if (!ok) {
      out.passed = false;
      out.failing_index = i;
      out.reason = "index " + std::to_string(i) + ": " + why;
      return out;
    }
  }
  return out;
}

struct DssReport {
  bool holds = true;
  std::vector<OverlapVerdict> overlaps;
  std::vector<TripleVerdict> triples;
};

/// Full d-semistability verdict: strict cocycle on every overlap and
/// compatibility on every triple. Throws InputError on an invalid cover.
inline DssReport dss_report(const NCCover& cover) {
  NCCover full = complete_transitions(cover);
  auto problems = validate_cover(full);
  if (!problems.empty()) {
    std::string msg = "invalid cover:";
    for (const auto& p : problems) msg += "\n  " + p;
    throw InputError(msg);
  }
  DssReport rep;
  rep.overlaps = cocycle_check(full);
  for (const auto& v : rep.overlaps) rep.holds = rep.holds && v.strict;
  for (const auto& t : triples_to_check(full)) {
    rep.triples.push_back(triple_cocycle_check(full, t.charts[0], t.charts[1], t.charts[2], t.ring));
    rep.holds = rep.holds && rep.triples.back().passed;
  }
  return rep;
}

inline bool dss_verdict(const NCCover& cover) { return dss_report(cover).holds; }

}  // namespace logsmooth
