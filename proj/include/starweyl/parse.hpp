#pragma once

#include <cctype>
#include <stdexcept>
#include <string>

#include "starweyl/base_poly.hpp"
#include "starweyl/chart.hpp"

namespace starweyl {

/// Expression error with the byte position where parsing stopped.
class ParseError : public std::runtime_error {
public:
  ParseError(std::size_t pos, const std::string& msg)
      : std::runtime_error(msg + " at position " + std::to_string(pos)),
        pos_(pos) {}
  std::size_t position() const { return pos_; }

private:
  std::size_t pos_;
};

namespace detail {

/// Recursive-descent parser for the chart expression language:
///   expr   := term (('+' | '-') term)*
///   term   := factor (('*' | '/') factor)*      -- '/' needs a constant rhs
///   factor := atom ['^' nat]
///   atom   := nat | var | '(' expr ')' | '-' factor
/// Variables are x1..xN and p1..pN; standard precedence, left associative.
class ExpressionParser {
public:
  ExpressionParser(const std::string& src, const ChartContext& ctx)
      : src_(src), ctx_(ctx) {}

  BasePoly parse() {
    BasePoly p = expr();
    skip_ws();
    if (pos_ != src_.size())
      throw ParseError(pos_, "unexpected character '" +
                                 std::string(1, src_[pos_]) + "'");
    return p;
  }

private:
  BasePoly expr() {
    BasePoly acc = term();
    while (true) {
      skip_ws();
      if (peek() == '+') { ++pos_; acc = acc + term(); }
      else if (peek() == '-') { ++pos_; acc = acc - term(); }
      else return acc;
    }
  }

  BasePoly term() {
    BasePoly acc = factor();
    while (true) {
      skip_ws();
      if (peek() == '*') {
        ++pos_;
        acc = acc * factor();
      } else if (peek() == '/') {
        const std::size_t at = pos_;
        ++pos_;
        BasePoly d = factor();
        if (!d.is_constant())
          throw ParseError(at, "division by a non-constant");
        Rational c = d.constant_value();
        if (c.is_zero()) throw ParseError(at, "division by zero");
        acc = acc.scaled(Rational(1) / c);
      } else {
        return acc;
      }
    }
  }

  BasePoly factor() {
    BasePoly base = atom();
    skip_ws();
    if (peek() == '^') {
      const std::size_t at = pos_;
      ++pos_;
      skip_ws();
      if (!std::isdigit(static_cast<unsigned char>(peek())))
        throw ParseError(pos_, "expected exponent");
      long e = read_nat();
      if (e > 64) throw ParseError(at, "exponent too large");
      BasePoly acc = BasePoly::constant(ctx_.dim(), Rational(1));
      for (long i = 0; i < e; ++i) acc = acc * base;
      return acc;
    }
    return base;
  }

  BasePoly atom() {
    skip_ws();
    const char c = peek();
    if (c == '(') {
      ++pos_;
      BasePoly p = expr();
      skip_ws();
      if (peek() != ')') throw ParseError(pos_, "expected ')'");
      ++pos_;
      return p;
    }
    if (c == '-') {
      ++pos_;
      return -factor();
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      long v = read_nat();
      return BasePoly::constant(ctx_.dim(), Rational(v));
    }
    if (std::isalpha(static_cast<unsigned char>(c))) return variable();
    throw ParseError(pos_, "expected expression");
  }

  BasePoly variable() {
    const std::size_t at = pos_;
    std::string name;
    while (pos_ < src_.size() && std::isalpha(static_cast<unsigned char>(peek_raw()))) name += src_[pos_++];
    std::string digits;
    while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(peek_raw()))) digits += src_[pos_++];
    if ((name != "x" && name != "p") || digits.empty())
      throw ParseError(at, "unknown variable '" + name + digits + "'");
    long idx = std::stol(digits);
    if (idx < 1 || idx > ctx_.N)
      throw ParseError(at, "unknown variable '" + name + digits + "'");
    int coord = static_cast<int>(idx) - 1 + (name == "p" ? ctx_.N : 0);
    return BasePoly::variable(ctx_.dim(), coord);
  }

  long read_nat() {
    long v = 0;
    const std::size_t at = pos_;
    while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(peek_raw()))) {
      v = v * 10 + (src_[pos_] - '0');
      if (v > 1000000000L) throw ParseError(at, "integer literal too large");
      ++pos_;
    }
    return v;
  }

  void skip_ws() {
    while (pos_ < src_.size() && (src_[pos_] == ' ' || src_[pos_] == '\t'))
      ++pos_;
  }

  char peek() {
    skip_ws();
    return pos_ < src_.size() ? src_[pos_] : '\0';
  }
  char peek_raw() const { return pos_ < src_.size() ? src_[pos_] : '\0'; }

  const std::string& src_;
  const ChartContext& ctx_;
  std::size_t pos_ = 0;
};

}  // namespace detail

/// Parses an expression to an exact polynomial; round-trips with
/// BasePoly::str().
inline BasePoly parse_expression(const std::string& src,
                                 const ChartContext& ctx) {
  return detail::ExpressionParser(src, ctx).parse();
}

}  // namespace starweyl
