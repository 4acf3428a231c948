#pragma once

// Arithmetic in k[z_0, ..., z_n] / (z_0 ... z_d) with some free variables
// z_j (j > d) inverted. Coefficients are exact rationals or residues mod p.

#include "logsmooth/integer.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace logsmooth {

/// Q (characteristic 0) or F_p.
class CoefficientField {
 public:
  CoefficientField() = default;
  explicit CoefficientField(unsigned long long characteristic) : p_(characteristic) {
    if (p_ == 1) throw InputError("coefficient field characteristic must be 0 or a prime");
    for (unsigned long long d = 2; d * d <= p_; ++d)
      if (p_ % d == 0) throw InputError("coefficient field characteristic must be 0 or a prime");
  }

  unsigned long long characteristic() const { return p_; }

  /// Canonical representative: the rational itself, or an integer in [0, p).
  Rational normalize(const Rational& q) const {
    if (p_ == 0) return q;
    using boost::multiprecision::denominator;
    using boost::multiprecision::numerator;
    Integer den = mod_floor(denominator(q), Integer(p_));
    if (den == 0) throw InputError("coefficient " + to_string(q) + " is undefined mod " + std::to_string(p_));
    return Rational(mod_floor(numerator(q) * inverse_mod(den), Integer(p_)));
  }

  Rational inverse(const Rational& q) const {
    if (q == 0) throw Error("division by zero coefficient");
    return normalize(Rational(1) / q);
  }

  bool operator==(const CoefficientField&) const = default;

  std::string str() const { return p_ == 0 ? "Q" : "F_" + std::to_string(p_); }

 private:
  Integer inverse_mod(const Integer& a) const {
    // Extended Euclid on (a, p).
    Integer old_r = a, r = p_, old_s = 1, s = 0;
    while (r != 0) {
      Integer q = old_r / r;
      Integer tmp = old_r - q * r;
      old_r = r;
      r = tmp;
      tmp = old_s - q * s;
      old_s = s;
      s = tmp;
    }
    return mod_floor(old_s, Integer(p_));
  }

  unsigned long long p_ = 0;
};

/// k[z_0..z_n]/(z_0 ... z_d) with the variables in `inverted` made invertible.
/// Crossing variables z_0..z_d are never inverted.
class NCRing {
 public:
  NCRing() = default;
  NCRing(std::size_t n, std::size_t d, std::set<std::size_t> inverted = {}, CoefficientField field = {})
      : n_(n), d_(d), inverted_(std::move(inverted)), field_(field) {
    if (d_ > n_) throw InputError("crossing depth d=" + std::to_string(d_) + " exceeds n=" + std::to_string(n_));
    for (auto j : inverted_)
      if (j <= d_ || j > n_)
        throw InputError("variable z" + std::to_string(j) + " cannot be inverted (allowed: " + std::to_string(d_ + 1) +
                         ".." + std::to_string(n_) + ")");
  }

  std::size_t n() const { return n_; }
  std::size_t d() const { return d_; }
  std::size_t variables() const { return n_ + 1; }
  const std::set<std::size_t>& inverted() const { return inverted_; }
  const CoefficientField& field() const { return field_; }
  bool is_inverted(std::size_t j) const { return inverted_.count(j) > 0; }

  bool operator==(const NCRing&) const = default;

  std::string str() const {
    std::string out = field_.str() + "[z0..z" + std::to_string(n_) + "]/(z0";
    for (std::size_t i = 1; i <= d_; ++i) out += "*z" + std::to_string(i);
    out += ")";
    if (!inverted_.empty()) {
      out += " inverting";
      for (auto j : inverted_) out += " z" + std::to_string(j);
    }
    return out;
  }

 private:
  std::size_t n_ = 0;
  std::size_t d_ = 0;
  std::set<std::size_t> inverted_;
  CoefficientField field_;
};

using Exponents = std::vector<long long>;

/// Reduced element of an NCRing: no stored monomial is divisible by
/// z_0 ... z_d and no stored coefficient is zero.
class NCPoly {
 public:
  NCPoly() = default;
  explicit NCPoly(NCRing ring) : ring_(std::move(ring)) {}

  static NCPoly constant(const NCRing& ring, const Rational& c) { return term(ring, c, Exponents(ring.variables())); }

  static NCPoly variable(const NCRing& ring, std::size_t i, long long power = 1) {
    Exponents e(ring.variables());
    e.at(i) = power;
    return term(ring, 1, e);
  }

  static NCPoly term(const NCRing& ring, const Rational& c, const Exponents& e) {
    NCPoly f(ring);
    f.add_term(e, c);
    f.reduce();
    return f;
  }

  const NCRing& ring() const { return ring_; }
  const std::map<Exponents, Rational>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_one() const { return *this == constant(ring_, 1); }

  /// Accumulates c * z^e without reducing.
  void add_term(const Exponents& e, const Rational& c) {
    if (e.size() != ring_.variables())
      throw InputError("monomial has " + std::to_string(e.size()) + " exponents, ring has " +
                       std::to_string(ring_.variables()) + " variables");
    for (std::size_t j = 0; j < e.size(); ++j)
      if (e[j] < 0 && !ring_.is_inverted(j))
        throw InputError("negative exponent on z" + std::to_string(j) + ", which is not inverted");
    Rational& slot = terms_[e];
    slot = ring_.field().normalize(slot + c);
  }

  /// Deletes monomials divisible by z_0 ... z_d and zero coefficients.
  void reduce() {
    for (auto it = terms_.begin(); it != terms_.end();) {
      if (it->second == 0 || in_relation(it->first))
        it = terms_.erase(it);
      else
        ++it;
    }
  }

  bool operator==(const NCPoly& other) const { return ring_ == other.ring_ && terms_ == other.terms_; }

  friend NCPoly operator+(const NCPoly& a, const NCPoly& b) {
    a.require_same_ring(b);
    NCPoly r = a;
    for (const auto& [e, c] : b.terms_) r.add_term(e, c);
    r.reduce();
    return r;
  }

  friend NCPoly operator-(const NCPoly& a) {
    NCPoly r(a.ring_);
    for (const auto& [e, c] : a.terms_) r.add_term(e, -c);
    r.reduce();
    return r;
  }

  friend NCPoly operator-(const NCPoly& a, const NCPoly& b) { return a + (-b); }

  friend NCPoly operator*(const NCPoly& a, const NCPoly& b) {
    a.require_same_ring(b);
    NCPoly r(a.ring_);
    for (const auto& [ea, ca] : a.terms_)
      for (const auto& [eb, cb] : b.terms_) {
        Exponents e(ea.size());
        for (std::size_t j = 0; j < e.size(); ++j) e[j] = ea[j] + eb[j];
        r.add_term(e, ca * cb);
      }
    r.reduce();
    return r;
  }

  /// Inverse when this is a unit c * prod_{j inverted} z_j^{e_j}; nullopt otherwise.
  std::optional<NCPoly> inverse() const {
    if (terms_.size() != 1) return std::nullopt;
    const auto& [e, c] = *terms_.begin();
    for (std::size_t j = 0; j < e.size(); ++j)
      if (e[j] != 0 && !ring_.is_inverted(j)) return std::nullopt;
    Exponents neg(e.size());
    for (std::size_t j = 0; j < e.size(); ++j) neg[j] = -e[j];
    return term(ring_, ring_.field().inverse(c), neg);
  }

  bool is_unit() const { return inverse().has_value(); }

  /// Whether every monomial lies in the ideal of the double locus,
  /// (prod_{k <= d, k != i} z_k : 0 <= i <= d).
  bool in_boundary_ideal() const {
    for (const auto& [e, c] : terms_) {
      std::size_t missing = 0;
      for (std::size_t k = 0; k <= ring_.d(); ++k)
        if (e[k] <= 0) ++missing;
      if (missing > 1) return false;
    }
    return true;
  }

  /// Same polynomial read in another ring on the same variables.
  NCPoly in_ring(const NCRing& target) const {
    if (target.variables() != ring_.variables())
      throw InputError("cannot move polynomial between rings with different variable counts");
    NCPoly r(target);
    for (const auto& [e, c] : terms_) r.add_term(e, c);
    r.reduce();
    return r;
  }

  std::string str() const {
    if (terms_.empty()) return "0";
    std::string out;
    bool first = true;
    for (const auto& [e, c] : terms_) {
      std::string mono;
      for (std::size_t j = 0; j < e.size(); ++j) {
        if (e[j] == 0) continue;
        if (!mono.empty()) mono += "*";
        mono += "z" + std::to_string(j);
        if (e[j] != 1) mono += "^" + std::to_string(e[j]);
      }
      std::string coeff = to_string(c);
      bool negative = !coeff.empty() && coeff[0] == '-';
      if (negative) coeff = coeff.substr(1);
      if (!first) out += negative ? " - " : " + ";
      else if (negative) out += "-";
      if (mono.empty())
        out += coeff;
      else if (coeff == "1")
        out += mono;
      else
        out += coeff + "*" + mono;
      first = false;
    }
    return out;
  }

 private:
  bool in_relation(const Exponents& e) const {
    for (std::size_t k = 0; k <= ring_.d(); ++k)
      if (e[k] <= 0) return false;
    return true;
  }

  void require_same_ring(const NCPoly& other) const {
    if (!(ring_ == other.ring_)) throw InputError("polynomials live in different rings");
  }

  NCRing ring_;
  std::map<Exponents, Rational> terms_;
};

}  // namespace logsmooth
