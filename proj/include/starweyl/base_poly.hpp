#pragma once

#include <algorithm>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "starweyl/rational.hpp"

namespace starweyl {

/// Commutative polynomial over the chart coordinates with exact rational
/// coefficients. Variables are indexed 0..2N-1: index i < N is x^{i+1},
/// index N+i is p_{i+1}. Keys are dense exponent vectors of length 2N;
/// zero coefficients are never stored.
class BasePoly {
public:
  using Key = std::vector<int>;

  explicit BasePoly(int nvars) : nvars_(nvars) {
    if (nvars <= 0 || nvars % 2 != 0)
      throw std::invalid_argument("BasePoly: nvars must be positive and even");
  }

  static BasePoly constant(int nvars, const Rational& c) {
    BasePoly p(nvars);
    if (!c.is_zero()) p.terms_.emplace(Key(nvars, 0), c);
    return p;
  }

  static BasePoly variable(int nvars, int index) {
    BasePoly p(nvars);
    if (index < 0 || index >= nvars)
      throw std::out_of_range("BasePoly: variable index out of range");
    Key k(nvars, 0);
    k[index] = 1;
    p.terms_.emplace(std::move(k), Rational(1));
    return p;
  }

  static BasePoly monomial(int nvars, Key key, const Rational& c) {
    BasePoly p(nvars);
    if (static_cast<int>(key.size()) != nvars)
      throw std::invalid_argument("BasePoly: bad exponent vector length");
    if (!c.is_zero()) p.terms_.emplace(std::move(key), c);
    return p;
  }

  int nvars() const { return nvars_; }
  int half_dim() const { return nvars_ / 2; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t term_count() const { return terms_.size(); }
  const std::map<Key, Rational>& terms() const { return terms_; }

  bool is_constant() const {
    return terms_.empty() ||
           (terms_.size() == 1 &&
            std::all_of(terms_.begin()->first.begin(),
                        terms_.begin()->first.end(),
                        [](int e) { return e == 0; }));
  }

  Rational constant_value() const {
    if (terms_.empty()) return Rational(0);
    if (!is_constant())
      throw std::logic_error("BasePoly: not a constant");
    return terms_.begin()->second;
  }

  int total_degree() const {
    int d = 0;
    for (const auto& [k, c] : terms_)
      d = std::max(d, std::accumulate(k.begin(), k.end(), 0));
    return d;
  }

  bool depends_on(int index) const {
    for (const auto& [k, c] : terms_)
      if (k[index] > 0) return true;
    return false;
  }

  bool depends_on_x() const {
    for (int i = 0; i < half_dim(); ++i)
      if (depends_on(i)) return true;
    return false;
  }

  BasePoly operator+(const BasePoly& o) const {
    check_same(o);
    BasePoly r(*this);
    for (const auto& [k, c] : o.terms_) r.add_term(k, c);
    return r;
  }

  BasePoly operator-(const BasePoly& o) const {
    check_same(o);
    BasePoly r(*this);
    for (const auto& [k, c] : o.terms_) r.add_term(k, -c);
    return r;
  }

  BasePoly operator-() const {
    BasePoly r(nvars_);
    for (const auto& [k, c] : terms_) r.terms_.emplace(k, -c);
    return r;
  }

  BasePoly operator*(const BasePoly& o) const {
    check_same(o);
    BasePoly r(nvars_);
    for (const auto& [ka, ca] : terms_) {
      for (const auto& [kb, cb] : o.terms_) {
        Key k(nvars_);
        for (int i = 0; i < nvars_; ++i) k[i] = ka[i] + kb[i];
        r.add_term(std::move(k), ca * cb);
      }
    }
    return r;
  }

  BasePoly scaled(const Rational& c) const {
    BasePoly r(nvars_);
    if (c.is_zero()) return r;
    for (const auto& [k, v] : terms_) r.terms_.emplace(k, v * c);
    return r;
  }

  /// Formal partial derivative with respect to coordinate `index` (0-based).
  BasePoly partial(int index) const {
    if (index < 0 || index >= nvars_)
      throw std::out_of_range("BasePoly::partial: index out of range");
    BasePoly r(nvars_);
    for (const auto& [k, c] : terms_) {
      if (k[index] == 0) continue;
      Key nk = k;
      nk[index] -= 1;
      r.add_term(std::move(nk), c * Rational(k[index]));
    }
    return r;
  }

  /// Evaluates the x-block at the constants c (length N); the result depends
  /// only on the p variables.
  BasePoly substitute_x(const std::vector<Rational>& c) const {
    const int n = half_dim();
    if (static_cast<int>(c.size()) != n)
      throw std::invalid_argument("BasePoly::substitute_x: wrong length");
    BasePoly r(nvars_);
    for (const auto& [k, coeff] : terms_) {
      Rational v = coeff;
      Key nk = k;
      for (int i = 0; i < n; ++i) {
        if (k[i] > 0) v *= c[i].pow_int(k[i]);
        nk[i] = 0;
      }
      r.add_term(std::move(nk), v);
    }
    return r;
  }

  bool operator==(const BasePoly& o) const {
    return nvars_ == o.nvars_ && terms_ == o.terms_;
  }
  bool operator!=(const BasePoly& o) const { return !(*this == o); }

  /// Canonical text; terms ordered by total degree descending, then by
  /// exponent vector descending. Round-trips through the expression parser.
  std::string str() const {
    if (terms_.empty()) return "0";
    std::vector<std::pair<Key, Rational>> ts(terms_.begin(), terms_.end());
    std::sort(ts.begin(), ts.end(), [](const auto& a, const auto& b) {
      int da = std::accumulate(a.first.begin(), a.first.end(), 0);
      int db = std::accumulate(b.first.begin(), b.first.end(), 0);
      if (da != db) return da > db;
      return a.first > b.first;
    });
    std::string out;
    bool first = true;
    for (const auto& [k, c] : ts) {
      Rational a = c;
      if (first) {
        if (a.sign() < 0) { out += "-"; a = -a; }
      } else {
        out += a.sign() < 0 ? " - " : " + ";
        if (a.sign() < 0) a = -a;
      }
      first = false;
      std::string mono = monomial_str(k);
      if (mono.empty()) {
        out += a.str();
      } else if (a == Rational(1)) {
        out += mono;
      } else {
        out += a.str() + "*" + mono;
      }
    }
    return out;
  }

  std::string var_name(int index) const {
    const int n = half_dim();
    return index < n ? "x" + std::to_string(index + 1)
                     : "p" + std::to_string(index - n + 1);
  }

  void add_term(Key key, const Rational& c) {
    if (c.is_zero()) return;
    auto it = terms_.find(key);
    if (it == terms_.end()) {
      terms_.emplace(std::move(key), c);
    } else {
      it->second += c;
      if (it->second.is_zero()) terms_.erase(it);
    }
  }

private:
  void check_same(const BasePoly& o) const {
    if (nvars_ != o.nvars_)
      throw std::invalid_argument("BasePoly: chart dimension mismatch");
  }

  std::string monomial_str(const Key& k) const {
    std::string out;
    for (int i = 0; i < nvars_; ++i) {
      if (k[i] == 0) continue;
      if (!out.empty()) out += "*";
      out += var_name(i);
      if (k[i] > 1) out += "^" + std::to_string(k[i]);
    }
    return out;
  }

  int nvars_;
  std::map<Key, Rational> terms_;
};

}  // namespace starweyl
