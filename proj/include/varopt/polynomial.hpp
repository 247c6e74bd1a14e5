#pragma once

// Exact multilinear polynomials: every parameter has degree at most one in
// every monomial. Terms are kept in canonical order, by degree and then
// lexicographically by parameter ids, with no zero coefficients stored.

#include <algorithm>
#include <cstddef>
#include <map>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "varopt/error.hpp"
#include "varopt/measure_space.hpp"
#include "varopt/rational.hpp"

namespace varopt {

// Sorted set of distinct parameter ids; empty is the constant monomial.
using Monomial = std::vector<ParamId>;

struct MonomialOrder {
  bool operator()(const Monomial& a, const Monomial& b) const {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
  }
};

class MultilinearPoly {
 public:
  using term_map = std::map<Monomial, Rational, MonomialOrder>;

  MultilinearPoly() = default;
  MultilinearPoly(const Rational& constant) { add_term({}, constant); }  // NOLINT: implicit constant
  MultilinearPoly(Rational::int_type constant) : MultilinearPoly(Rational(constant)) {}  // NOLINT

  static MultilinearPoly variable(const ParamId& id) {
    MultilinearPoly p;
    p.add_term({id}, Rational(1));
    return p;
  }
  static MultilinearPoly term(const Rational& coefficient, Monomial monomial) {
    std::sort(monomial.begin(), monomial.end());
    if (std::adjacent_find(monomial.begin(), monomial.end()) != monomial.end())
      throw InvalidModel("monomial repeats a parameter");
    MultilinearPoly p;
    p.add_term(monomial, coefficient);
    return p;
  }

  [[nodiscard]] const term_map& terms() const { return terms_; }
  [[nodiscard]] bool is_zero() const { return terms_.empty(); }
  [[nodiscard]] bool is_constant() const { return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.empty()); }
  [[nodiscard]] Rational coefficient(const Monomial& m) const {
    Monomial key = m;
    std::sort(key.begin(), key.end());
    auto it = terms_.find(key);
    return it == terms_.end() ? Rational(0) : it->second;
  }
  [[nodiscard]] Rational constant_term() const { return coefficient({}); }

  // Parameters that occur in some monomial, sorted.
  [[nodiscard]] std::vector<ParamId> parameters() const {
    std::set<ParamId> ids;
    for (const auto& [m, c] : terms_) ids.insert(m.begin(), m.end());
    return {ids.begin(), ids.end()};
  }
  [[nodiscard]] std::size_t degree() const { return terms_.empty() ? 0 : terms_.rbegin()->first.size(); }

  MultilinearPoly& operator+=(const MultilinearPoly& o) {
    for (const auto& [m, c] : o.terms_) add_term(m, c);
    return *this;
  }
  MultilinearPoly& operator-=(const MultilinearPoly& o) {
    for (const auto& [m, c] : o.terms_) add_term(m, -c);
    return *this;
  }
  MultilinearPoly& operator*=(const Rational& s) {
    if (s.is_zero()) {
      terms_.clear();
      return *this;
    }
    for (auto& [m, c] : terms_) c *= s;
    return *this;
  }

  friend MultilinearPoly operator+(MultilinearPoly a, const MultilinearPoly& b) { return a += b; }
  friend MultilinearPoly operator-(MultilinearPoly a, const MultilinearPoly& b) { return a -= b; }
  friend MultilinearPoly operator-(MultilinearPoly a) { return a *= Rational(-1); }
  friend MultilinearPoly operator*(MultilinearPoly a, const Rational& s) { return a *= s; }
  friend MultilinearPoly operator*(const Rational& s, MultilinearPoly a) { return a *= s; }

  // Product; throws if any parameter would reach degree two.
  friend MultilinearPoly operator*(const MultilinearPoly& a, const MultilinearPoly& b) {
    MultilinearPoly out;
    for (const auto& [ma, ca] : a.terms_) {
      for (const auto& [mb, cb] : b.terms_) {
        Monomial m;
        m.reserve(ma.size() + mb.size());
        std::set_union(ma.begin(), ma.end(), mb.begin(), mb.end(), std::back_inserter(m));
        if (m.size() != ma.size() + mb.size()) throw InvalidModel("product is not multilinear");
        out.add_term(m, ca * cb);
      }
    }
    return out;
  }

  friend bool operator==(const MultilinearPoly&, const MultilinearPoly&) = default;

 private:
  void add_term(const Monomial& m, const Rational& c) {
    if (c.is_zero()) return;
    auto [it, inserted] = terms_.emplace(m, c);
    if (inserted) return;
    it->second += c;
    if (it->second.is_zero()) terms_.erase(it);
  }

  term_map terms_;
};

template <class T>
T eval(const MultilinearPoly& poly, const BasicParamPoint<T>& point) {
  T total(0);
  for (const auto& [m, c] : poly.terms()) {
    T term;
    if constexpr (std::is_floating_point_v<T>) {
      term = c.to_double();
    } else {
      term = c;
    }
    for (const auto& id : m) term *= point.at(id);
    total += term;
  }
  return total;
}

// Exact partial derivative; zero when `id` does not occur.
inline MultilinearPoly partial(const MultilinearPoly& poly, const ParamId& id) {
  MultilinearPoly out;
  for (const auto& [m, c] : poly.terms()) {
    if (!std::binary_search(m.begin(), m.end(), id)) continue;
    Monomial rest;
    std::copy_if(m.begin(), m.end(), std::back_inserter(rest), [&](const ParamId& x) { return x != id; });
    out += MultilinearPoly::term(c, rest);
  }
  return out;
}

// Replaces every parameter that has a value in `point`; the rest stay symbolic.
inline MultilinearPoly substitute(const MultilinearPoly& poly, const ParamPoint& point) {
  MultilinearPoly out;
  for (const auto& [m, c] : poly.terms()) {
    Rational coeff = c;
    Monomial rest;
    for (const auto& id : m) {
      if (point.contains(id)) coeff *= point.at(id);
      else rest.push_back(id);
    }
    out += MultilinearPoly::term(coeff, rest);
  }
  return out;
}

// Partial derivatives at `point`, one per entry of `params`, in that order.
inline std::vector<Rational> gradient(const MultilinearPoly& poly, const ParamPoint& point,
                                      std::span<const ParamId> params) {
  std::vector<Rational> out;
  out.reserve(params.size());
  for (const auto& id : params) out.push_back(eval(partial(poly, id), point));
  return out;
}

// Gradient over the polynomial's own parameters (sorted order).
inline std::vector<Rational> gradient(const MultilinearPoly& poly, const ParamPoint& point) {
  const auto params = poly.parameters();
  return gradient(poly, point, params);
}

// Canonical text form, e.g. "3 - 2*p - q + p*q + 3*p*r".
inline std::string to_string(const MultilinearPoly& poly, NumberStyle style = NumberStyle::exact) {
  if (poly.is_zero()) return "0";
  std::string out;
  bool first = true;
  for (const auto& [m, c] : poly.terms()) {
    const bool negative = c.sign() < 0;
    const Rational magnitude = negative ? -c : c;
    if (first) out += negative ? "-" : "";
    else out += negative ? " - " : " + ";
    first = false;

    std::string vars;
    for (const auto& id : m) vars += (vars.empty() ? "" : "*") + id;
    if (m.empty()) out += format_number(magnitude, style);
    else if (magnitude == Rational(1)) out += vars;
    else out += format_number(magnitude, style) + "*" + vars;
  }
  return out;
}

}  // namespace varopt
