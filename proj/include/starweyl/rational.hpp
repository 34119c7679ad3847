#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace starweyl {

/// Exact rational scalar backed by GMP. Always canonical: denominator > 0,
/// gcd(numerator, denominator) = 1, zero is 0/1.
class Rational {
public:
  Rational() : v_(0) {}
  Rational(long n) : v_(n) {}
  Rational(long num, long den) {
    if (den == 0) throw std::invalid_argument("Rational: zero denominator");
    v_ = mpq_class(num, den);
    v_.canonicalize();
  }

  /// Parses "a", "-a" or "a/b" with decimal digits only. Strict: anything
  /// else (whitespace, hex, empty string, b == 0) is rejected.
  static Rational from_string(const std::string& s) {
    if (!looks_like_rational(s))
      throw std::invalid_argument("Rational: cannot parse '" + s + "'");
    Rational r;
    r.v_ = mpq_class(s, 10);
    if (r.v_.get_den() == 0)
      throw std::invalid_argument("Rational: zero denominator in '" + s + "'");
    r.v_.canonicalize();
    return r;
  }

  static Rational factorial(int n) {
    Rational r(1);
    for (int k = 2; k <= n; ++k) r.v_ *= k;
    return r;
  }

  /// n (n-1) ... (n-k+1)
  static Rational falling(int n, int k) {
    Rational r(1);
    for (int j = 0; j < k; ++j) r.v_ *= (n - j);
    return r;
  }

  mpz_class numerator() const { return v_.get_num(); }
  mpz_class denominator() const { return v_.get_den(); }

  bool is_zero() const { return v_ == 0; }
  int sign() const { return sgn(v_); }

  Rational operator-() const { return Rational(-v_); }
  Rational operator+(const Rational& o) const { return Rational(v_ + o.v_); }
  Rational operator-(const Rational& o) const { return Rational(v_ - o.v_); }
  Rational operator*(const Rational& o) const { return Rational(v_ * o.v_); }
  Rational operator/(const Rational& o) const {
    if (o.is_zero()) throw std::invalid_argument("Rational: division by zero");
    return Rational(v_ / o.v_);
  }
  Rational& operator+=(const Rational& o) { v_ += o.v_; return *this; }
  Rational& operator-=(const Rational& o) { v_ -= o.v_; return *this; }
  Rational& operator*=(const Rational& o) { v_ *= o.v_; return *this; }

  Rational pow_int(int e) const {
    if (e < 0) throw std::invalid_argument("Rational::pow_int: negative exponent");
    Rational r(1);
    for (int i = 0; i < e; ++i) r.v_ *= v_;
    return r;
  }

  bool operator==(const Rational& o) const { return v_ == o.v_; }
  bool operator!=(const Rational& o) const { return v_ != o.v_; }
  bool operator<(const Rational& o) const { return v_ < o.v_; }

  /// Canonical text: "3", "-3", "1/2", "-5/3".
  std::string str() const { return v_.get_str(); }

private:
  explicit Rational(mpq_class v) : v_(std::move(v)) {}

  static bool looks_like_rational(const std::string& s) {
    std::size_t i = 0;
    if (i < s.size() && s[i] == '-') ++i;
    std::size_t digits = 0;
    while (i < s.size() && s[i] >= '0' && s[i] <= '9') { ++i; ++digits; }
    if (digits == 0) return false;
    if (i == s.size()) return true;
    if (s[i] != '/') return false;
    ++i;
    digits = 0;
    while (i < s.size() && s[i] >= '0' && s[i] <= '9') { ++i; ++digits; }
    return digits > 0 && i == s.size();
  }

  mpq_class v_;
};

}  // namespace starweyl
