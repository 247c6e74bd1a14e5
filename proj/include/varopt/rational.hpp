#pragma once

// Exact rational numbers over 64-bit integers.
//
// Values are always kept in lowest terms with a positive denominator, so
// equality is structural. Every intermediate product is checked; overflow
// raises std::overflow_error instead of wrapping silently.

#include <charconv>
#include <compare>
#include <cstdint>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>

namespace varopt {

class Rational {
 public:
  using int_type = std::int64_t;

  constexpr Rational() = default;
  constexpr Rational(int_type n) : num_(n) {}  // NOLINT: implicit from integers
  Rational(int_type n, int_type d) : num_(n), den_(d) { normalize(); }

  [[nodiscard]] constexpr int_type numerator() const { return num_; }
  [[nodiscard]] constexpr int_type denominator() const { return den_; }

  [[nodiscard]] constexpr bool is_zero() const { return num_ == 0; }
  [[nodiscard]] constexpr bool is_integer() const { return den_ == 1; }
  [[nodiscard]] constexpr int sign() const { return (num_ > 0) - (num_ < 0); }

  [[nodiscard]] double to_double() const {
    return static_cast<double>(num_) / static_cast<double>(den_);
  }
  explicit operator double() const { return to_double(); }

  Rational operator-() const {
    if (num_ == INT64_MIN) throw std::overflow_error("rational negation overflow");
    Rational r;
    r.num_ = -num_;
    r.den_ = den_;
    return r;
  }

  friend Rational operator+(const Rational& a, const Rational& b) {
    const int_type g = std::gcd(a.den_, b.den_);
    const int_type ad = b.den_ / g;
    const int_type bd = a.den_ / g;
    return {add(mul(a.num_, ad), mul(b.num_, bd)), mul(a.den_, ad)};
  }
  friend Rational operator-(const Rational& a, const Rational& b) { return a + (-b); }
  friend Rational operator*(const Rational& a, const Rational& b) {
    // Cross-reduce first to keep intermediates small.
    const int_type g1 = std::gcd(a.num_, b.den_);
    const int_type g2 = std::gcd(b.num_, a.den_);
    const int_type n1 = g1 == 0 ? a.num_ : a.num_ / g1;
    const int_type d2 = g1 == 0 ? b.den_ : b.den_ / g1;
    const int_type n2 = g2 == 0 ? b.num_ : b.num_ / g2;
    const int_type d1 = g2 == 0 ? a.den_ : a.den_ / g2;
    return {mul(n1, n2), mul(d1, d2)};
  }
  friend Rational operator/(const Rational& a, const Rational& b) {
    if (b.num_ == 0) throw std::domain_error("rational division by zero");
    return a * Rational(b.den_, b.num_);
  }

  Rational& operator+=(const Rational& o) { return *this = *this + o; }
  Rational& operator-=(const Rational& o) { return *this = *this - o; }
  Rational& operator*=(const Rational& o) { return *this = *this * o; }
  Rational& operator/=(const Rational& o) { return *this = *this / o; }

  friend bool operator==(const Rational&, const Rational&) = default;
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    const __int128 lhs = static_cast<__int128>(a.num_) * b.den_;
    const __int128 rhs = static_cast<__int128>(b.num_) * a.den_;
    return lhs <=> rhs;
  }

  // "a/b" or "a"; integers print without a denominator.
  [[nodiscard]] std::string str() const {
    if (den_ == 1) return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(den_);
  }

  // Accepts "a", "a/b" and finite decimals such as "-0.25".
  static Rational parse(std::string_view text) {
    auto fail = [&]() -> Rational {
      throw std::invalid_argument("not a rational number: '" + std::string(text) + "'");
    };
    if (text.empty()) return fail();
    if (auto slash = text.find('/'); slash != std::string_view::npos) {
      const int_type n = parse_int(text.substr(0, slash), fail);
      const int_type d = parse_int(text.substr(slash + 1), fail);
      if (d == 0) throw std::domain_error("zero denominator in '" + std::string(text) + "'");
      return {n, d};
    }
    if (auto dot = text.find('.'); dot != std::string_view::npos) {
      std::string_view whole = text.substr(0, dot);
      std::string_view frac = text.substr(dot + 1);
      const bool negative = !whole.empty() && whole.front() == '-';
      if (negative) whole.remove_prefix(1);
      if ((whole.empty() && frac.empty()) || frac.size() > 17) return fail();
      int_type scale = 1;
      for (std::size_t i = 0; i < frac.size(); ++i) scale = mul(scale, 10);
      const int_type w = whole.empty() ? 0 : parse_int(whole, fail);
      const int_type f = frac.empty() ? 0 : parse_int(frac, fail);
      if ((!whole.empty() && whole.front() == '-') || (!frac.empty() && frac.front() == '-')) return fail();
      const Rational r(add(mul(w, scale), f), scale);
      return negative ? -r : r;
    }
    return {parse_int(text, fail)};
  }

  friend std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

 private:
  void normalize() {
    if (den_ == 0) throw std::domain_error("rational with zero denominator");
    if (den_ < 0) {
      if (num_ == INT64_MIN || den_ == INT64_MIN) throw std::overflow_error("rational overflow");
      num_ = -num_;
      den_ = -den_;
    }
    const int_type g = std::gcd(num_, den_);
    if (g > 1) {
      num_ /= g;
      den_ /= g;
    }
    if (num_ == 0) den_ = 1;
  }

  static int_type mul(int_type a, int_type b) {
    int_type out = 0;
    if (__builtin_mul_overflow(a, b, &out)) throw std::overflow_error("rational overflow");
    return out;
  }
  static int_type add(int_type a, int_type b) {
    int_type out = 0;
    if (__builtin_add_overflow(a, b, &out)) throw std::overflow_error("rational overflow");
    return out;
  }
  template <class Fail>
  static int_type parse_int(std::string_view s, Fail&& fail) {
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    int_type v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) fail();
    return v;
  }

  int_type num_ = 0;
  int_type den_ = 1;
};

// Numeric output policy shared by reports: exact "a/b" or 12 significant digits.
enum class NumberStyle { exact, decimal };

inline std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v == 0.0 ? 0.0 : v);
  return buf;
}

inline std::string format_number(const Rational& r, NumberStyle style = NumberStyle::exact) {
  return style == NumberStyle::exact ? r.str() : format_number(r.to_double());
}

}  // namespace varopt
