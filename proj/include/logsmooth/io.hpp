#pragma once

// JSON documents for monoids, homomorphisms, matrices and normal crossing
// covers. Integers are written as JSON numbers when they fit in 64 bits and
// as decimal strings otherwise; both forms are accepted on input.

#include "logsmooth/loghom.hpp"
#include "logsmooth/nclog.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <sstream>
#include <string>

namespace logsmooth::io {

using Json = nlohmann::json;

/// Position inside a document, used in error messages ("/charts/0/zeta/1").
class Field {
 public:
  Field(const Json& value, std::string path) : value_(&value), path_(std::move(path)) {}

  const Json& value() const { return *value_; }
  const std::string& path() const { return path_; }
  std::string where() const { return path_.empty() ? "/" : path_; }

  [[noreturn]] void fail(const std::string& what) const { throw InputError("field " + where() + ": " + what); }

  bool has(const std::string& key) const { return value_->is_object() && value_->contains(key); }

  Field operator[](const std::string& key) const {
    if (!value_->is_object()) fail("expected an object");
    auto it = value_->find(key);
    if (it == value_->end()) fail("missing field '" + key + "'");
    return Field(*it, path_ + "/" + key);
  }

  Field operator[](std::size_t i) const { return Field(value_->at(i), path_ + "/" + std::to_string(i)); }

  std::size_t size() const {
    if (!value_->is_array()) fail("expected an array");
    return value_->size();
  }

  Integer integer() const {
    if (value_->is_number_integer()) {
      if (value_->is_number_unsigned()) return Integer(value_->get<std::uint64_t>());
      return Integer(value_->get<std::int64_t>());
    }
    if (value_->is_string()) {
      try {
        return parse_integer(value_->get<std::string>());
      } catch (const InputError& e) {
        fail(e.what());
      }
    }
    fail("expected an integer");
  }

  Rational rational() const {
    if (value_->is_string()) {
      try {
        return parse_rational(value_->get<std::string>());
      } catch (const InputError& e) {
        fail(e.what());
      }
    }
    return Rational(integer());
  }

  std::size_t index() const {
    Integer v = integer();
    if (v < 0 || v > Integer(1'000'000)) fail("expected a small nonnegative integer");
    return static_cast<std::size_t>(v);
  }

  IntVector vector() const {
    IntVector v;
    for (std::size_t i = 0; i < size(); ++i) v.push_back((*this)[i].integer());
    return v;
  }

 private:
  const Json* value_;
  std::string path_;
};

/// Parses text, reporting syntax errors with their line number.
inline Json parse_document(const std::string& text, const std::string& source = "input") {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    std::size_t line = 1 + static_cast<std::size_t>(std::count(text.begin(),
                                                                text.begin() + static_cast<std::ptrdiff_t>(std::min(e.byte, text.size())), '\n'));
    std::string msg = e.what();
    if (auto p = msg.find("syntax error"); p != std::string::npos) msg = msg.substr(p);
    throw InputError(source + ":" + std::to_string(line) + ": " + msg);
  }
}

inline Json read_document(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_document(buf.str(), path);
}

// ---- writing ----

inline Json to_json(const Integer& a) {
  if (fits_int64(a)) return Json(static_cast<std::int64_t>(a));
  return Json(a.str());
}

inline Json to_json(const Rational& q) {
  using boost::multiprecision::denominator;
  using boost::multiprecision::numerator;
  if (denominator(q) == 1) return to_json(Integer(numerator(q)));
  return Json(to_string(q));
}

inline Json to_json(const IntVector& v) {
  Json out = Json::array();
  for (const auto& x : v) out.push_back(to_json(x));
  return out;
}

inline Json to_json(const IntMatrix& m) {
  Json out = Json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) out.push_back(to_json(m.row(i)));
  return out;
}

inline Json to_json(const GroupElement& g) { return to_json(g.coords); }

inline Json to_json(const std::vector<GroupElement>& gens) {
  Json out = Json::array();
  for (const auto& g : gens) out.push_back(to_json(g));
  return out;
}

inline Json to_json(const FgAbelianGroup& g) {
  return Json{{"free_rank", g.free_rank()}, {"torsion", to_json(IntVector(g.torsion()))}};
}

inline Json to_json(const AffineMonoid& m) {
  return Json{{"ambient", to_json(m.ambient())}, {"generators", to_json(m.generators())}};
}

inline Json to_json(const NCRing& r) {
  Json inv = Json::array();
  for (auto j : r.inverted()) inv.push_back(j);
  return Json{{"n", r.n()}, {"d", r.d()}, {"inverted", inv}};
}

inline Json to_json(const NCPoly& f) {
  Json out = Json::array();
  for (const auto& [e, c] : f.terms()) {
    Json ex = Json::array();
    for (auto x : e) ex.push_back(x);
    out.push_back(Json{{"coeffs", to_json(c)}, {"exponents", ex}});
  }
  return out;
}

inline Json to_json(const std::vector<NCPoly>& fs) {
  Json out = Json::array();
  for (const auto& f : fs) out.push_back(to_json(f));
  return out;
}

inline Json to_json(const Transition& t) {
  Json sigma = Json::array();
  for (auto s : t.sigma) sigma.push_back(s);
  return Json{{"sigma", sigma}, {"units", to_json(t.units)}};
}

// ---- reading ----

inline FgAbelianGroup read_group(const Field& f) {
  Integer rank = f["free_rank"].integer();
  if (rank < 0 || rank > 64) f["free_rank"].fail("free rank must lie in [0, 64]");
  std::vector<Integer> torsion;
  if (f.has("torsion")) {
    Field t = f["torsion"];
    for (std::size_t i = 0; i < t.size(); ++i) {
      Integer m = t[i].integer();
      if (m < 2) t[i].fail("torsion orders must be at least 2");
      torsion.push_back(m);
    }
  }
  return FgAbelianGroup(static_cast<std::size_t>(rank), std::move(torsion));
}

inline AffineMonoid read_monoid(const Field& f) {
  FgAbelianGroup amb = read_group(f["ambient"]);
  Field gens = f["generators"];
  std::vector<GroupElement> out;
  for (std::size_t i = 0; i < gens.size(); ++i) {
    IntVector v = gens[i].vector();
    if (v.size() != amb.dim())
      gens[i].fail("expected " + std::to_string(amb.dim()) + " coordinates, got " + std::to_string(v.size()));
    out.push_back(amb.reduce(std::move(v)));
  }
  return AffineMonoid(amb, std::move(out));
}

/// Matrix given as a list of rows. `cols` fixes the width when there are no rows.
inline IntMatrix read_matrix(const Field& f, std::optional<std::size_t> rows = {}, std::optional<std::size_t> cols = {}) {
  std::vector<IntVector> r;
  for (std::size_t i = 0; i < f.size(); ++i) r.push_back(f[i].vector());
  std::size_t width = r.empty() ? cols.value_or(0) : r.front().size();
  for (std::size_t i = 0; i < r.size(); ++i)
    if (r[i].size() != width) f[i].fail("ragged matrix: expected " + std::to_string(width) + " entries");
  if (rows && r.size() != *rows) f.fail("expected " + std::to_string(*rows) + " rows, got " + std::to_string(r.size()));
  if (cols && width != *cols) f.fail("expected " + std::to_string(*cols) + " columns, got " + std::to_string(width));
  return IntMatrix::from_rows(r, width);
}

inline MonoidHom read_hom(const Field& f) {
  AffineMonoid q = read_monoid(f["source"]);
  AffineMonoid p = read_monoid(f["target"]);
  IntMatrix m = read_matrix(f["matrix"], p.ambient().dim(), q.ambient().dim());
  try {
    return check_hom(q, p, m);
  } catch (const HomError& e) {
    throw HomError("field " + f["matrix"].where() + ": " + e.what());
  }
}

inline NCRing read_ring(const Field& f, const CoefficientField& field) {
  std::size_t n = f["n"].index();
  std::size_t d = f["d"].index();
  std::set<std::size_t> inverted;
  if (f.has("inverted")) {
    Field inv = f["inverted"];
    for (std::size_t i = 0; i < inv.size(); ++i) inverted.insert(inv[i].index());
  }
  try {
    return NCRing(n, d, std::move(inverted), field);
  } catch (const InputError& e) {
    f.fail(e.what());
  }
}

inline NCPoly read_poly(const Field& f, const NCRing& ring) {
  NCPoly p(ring);
  for (std::size_t i = 0; i < f.size(); ++i) {
    Field term = f[i];
    Field coeff = term.has("coeffs") ? term["coeffs"] : term["coeff"];
    Field ex = term["exponents"];
    Exponents e;
    for (std::size_t j = 0; j < ex.size(); ++j) {
      Integer x = ex[j].integer();
      if (!fits_int64(x)) ex[j].fail("exponent out of range");
      e.push_back(static_cast<long long>(x));
    }
    try {
      p.add_term(e, coeff.rational());
    } catch (const InputError& err) {
      term.fail(err.what());
    }
  }
  p.reduce();
  return p;
}

inline std::vector<NCPoly> read_polys(const Field& f, const NCRing& ring) {
  std::vector<NCPoly> out;
  for (std::size_t i = 0; i < f.size(); ++i) out.push_back(read_poly(f[i], ring));
  return out;
}

inline NCCover read_cover(const Field& f) {
  CoefficientField field;
  if (f.has("characteristic")) {
    try {
      field = CoefficientField(static_cast<unsigned long long>(f["characteristic"].index()));
    } catch (const InputError& e) {
      f["characteristic"].fail(e.what());
    }
  }
  NCCover cover;
  Field charts = f["charts"];
  for (std::size_t c = 0; c < charts.size(); ++c) {
    NCRing ring = read_ring(charts[c], field);
    std::vector<NCPoly> zeta = read_polys(charts[c]["zeta"], ring);
    if (zeta.size() != ring.variables())
      charts[c]["zeta"].fail("expected " + std::to_string(ring.variables()) + " entries");
    cover.charts.emplace_back(ring, std::move(zeta));
  }
  if (f.has("overlaps")) {
    Field overlaps = f["overlaps"];
    for (std::size_t k = 0; k < overlaps.size(); ++k) {
      Field o = overlaps[k];
      Field pair = o["pair"];
      if (pair.size() != 2) pair.fail("expected two chart indices");
      Overlap ov{pair[0].index(), pair[1].index(), std::nullopt, std::nullopt};
      for (auto idx : {ov.first, ov.second})
        if (idx >= cover.charts.size()) pair.fail("chart index " + std::to_string(idx) + " out of range");
      if (o.has("ring")) ov.ring = read_ring(o["ring"], field);
      if (o.has("sigma") != o.has("units")) o.fail("'sigma' and 'units' must be given together");
      if (o.has("sigma")) {
        NCRing ring = ov.ring ? *ov.ring : [&] {
          try {
            return overlap_ring(cover, ov);
          } catch (const InputError& e) {
            o.fail(e.what());
          }
        }();
        Transition t;
        Field sigma = o["sigma"];
        for (std::size_t i = 0; i < sigma.size(); ++i) t.sigma.push_back(sigma[i].index());
        t.units = read_polys(o["units"], ring);
        ov.transition = std::move(t);
      }
      cover.overlaps.push_back(std::move(ov));
    }
  }
  if (f.has("triples")) {
    Field triples = f["triples"];
    for (std::size_t k = 0; k < triples.size(); ++k) {
      Field t = triples[k];
      Field idx = t["charts"];
      if (idx.size() != 3) idx.fail("expected three chart indices");
      TripleOverlap tr{{idx[0].index(), idx[1].index(), idx[2].index()}, std::nullopt};
      if (t.has("ring")) tr.ring = read_ring(t["ring"], field);
      cover.triples.push_back(tr);
    }
  }
  return cover;
}

inline Json to_json(const NCCover& cover) {
  Json charts = Json::array();
  for (const auto& c : cover.charts) {
    Json j = to_json(c.ring);
    j["zeta"] = to_json(c.zeta);
    charts.push_back(j);
  }
  Json overlaps = Json::array();
  for (const auto& o : cover.overlaps) {
    Json j{{"pair", {o.first, o.second}}};
    if (o.ring) j["ring"] = to_json(*o.ring);
    if (o.transition) {
      Json t = to_json(*o.transition);
      j["sigma"] = t["sigma"];
      j["units"] = t["units"];
    }
    overlaps.push_back(j);
  }
  Json out{{"characteristic", cover.charts.empty() ? 0ULL : cover.charts.front().ring.field().characteristic()},
           {"charts", charts},
           {"overlaps", overlaps}};
  if (!cover.triples.empty()) {
    Json triples = Json::array();
    for (const auto& t : cover.triples) {
      Json j{{"charts", {t.charts[0], t.charts[1], t.charts[2]}}};
      if (t.ring) j["ring"] = to_json(*t.ring);
      triples.push_back(j);
    }
    out["triples"] = triples;
  }
  return out;
}

}  // namespace logsmooth::io
