#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "starweyl/base_poly.hpp"
#include "starweyl/chart.hpp"
#include "starweyl/rational.hpp"

namespace starweyl {

/// One monomial of the formal Weyl bundle tensor exterior algebra:
///   coeff * lambda^l * z^base * xi^a * eta^b * (wedge of coframe generators).
/// The form factor is a bitmask over the 2N coframe generators dz^mu
/// (mu < N: dx^{mu+1}, mu >= N: dp_{mu-N+1}); the mask is the canonical
/// ascending wedge word, any reordering sign is absorbed into coeff.
struct Term {
  int lambda_pow = 0;
  std::vector<int> base;  // 2N exponents
  std::vector<int> xi;    // N symmetric powers of xi^1..xi^N
  std::vector<int> eta;   // N symmetric powers of eta_1..eta_N
  std::uint32_t form = 0;
  Rational coeff;

  int fiber_degree() const {
    int d = 0;
    for (int e : xi) d += e;
    for (int e : eta) d += e;
    return d;
  }
  int form_degree() const { return std::popcount(form); }
  int filtration() const { return fiber_degree() + 2 * lambda_pow; }

  /// Truncation weight: fiber degree + form degree + 2 * lambda power.
  /// Counting the exterior degree makes every engine operator weight
  /// nondecreasing, so truncation commutes with all compositions and the
  /// contracting-homotopy identity holds exactly at any truncation order.
  int trunc_weight() const { return filtration() + form_degree(); }

  /// Total order on term keys; used for canonical storage and rendering.
  static bool key_less(const Term& a, const Term& b) {
    if (a.lambda_pow != b.lambda_pow) return a.lambda_pow < b.lambda_pow;
    if (a.form != b.form) return a.form < b.form;
    if (a.base != b.base) return a.base < b.base;
    if (a.xi != b.xi) return a.xi < b.xi;
    return a.eta < b.eta;
  }
  static bool key_equal(const Term& a, const Term& b) {
    return a.lambda_pow == b.lambda_pow && a.form == b.form &&
           a.base == b.base && a.xi == b.xi && a.eta == b.eta;
  }
};

namespace detail {

/// Sign of g wedged onto the left of the sorted word F, with g not in F:
/// (-1)^{number of generators of F below g}.
inline int left_wedge_sign(std::uint32_t mask, int g) {
  const std::uint32_t below = mask & ((std::uint32_t{1} << g) - 1);
  return (std::popcount(below) % 2 == 0) ? 1 : -1;
}

/// Wedge of two sorted words; returns false when they overlap.
inline bool wedge_masks(std::uint32_t a, std::uint32_t b, std::uint32_t& out,
                        int& sign) {
  if ((a & b) != 0) return false;
  int crossings = 0;
  std::uint32_t rest = b;
  while (rest != 0) {
    const int g = std::countr_zero(rest);
    rest &= rest - 1;
    crossings += std::popcount(a >> (g + 1));
  }
  out = a | b;
  sign = (crossings % 2 == 0) ? 1 : -1;
  return true;
}

}  // namespace detail

/// A truncated element of the Weyl bundle tensor exterior algebra over a
/// chart. Terms are kept in canonical sorted order with merged coefficients;
/// no stored term has truncation weight (fiber + form + 2 * lambda) above
/// trunc_K, so in particular no term has filtration degree above trunc_K.
class WeylForm {
public:
  WeylForm(ChartContext ctx, int trunc_K)
      : ctx_(ctx), trunc_K_(trunc_K) {
    if (trunc_K < 0) throw std::invalid_argument("WeylForm: negative trunc_K");
  }

  static WeylForm zero(ChartContext ctx, int K) { return WeylForm(ctx, K); }

  static WeylForm scalar(ChartContext ctx, int K, const Rational& c) {
    WeylForm w(ctx, K);
    Term t = w.blank_term();
    t.coeff = c;
    w.push(std::move(t));
    w.normalize();
    return w;
  }

  static WeylForm unit(ChartContext ctx, int K) {
    return scalar(ctx, K, Rational(1));
  }

  static WeylForm from_base(ChartContext ctx, int K, const BasePoly& p) {
    if (p.nvars() != ctx.dim())
      throw std::invalid_argument("WeylForm::from_base: dimension mismatch");
    WeylForm w(ctx, K);
    for (const auto& [key, c] : p.terms()) {
      Term t = w.blank_term();
      t.base = key;
      t.coeff = c;
      w.push(std::move(t));
    }
    w.normalize();
    return w;
  }

  /// The fiber symbol of d/dx^{i+1}.
  static WeylForm xi_gen(ChartContext ctx, int K, int i) {
    WeylForm w(ctx, K);
    Term t = w.blank_term();
    t.xi.at(i) = 1;
    t.coeff = Rational(1);
    w.push(std::move(t));
    w.normalize();
    return w;
  }

  /// The fiber symbol of d/dp_{i+1}.
  static WeylForm eta_gen(ChartContext ctx, int K, int i) {
    WeylForm w(ctx, K);
    Term t = w.blank_term();
    t.eta.at(i) = 1;
    t.coeff = Rational(1);
    w.push(std::move(t));
    w.normalize();
    return w;
  }

  /// The coframe generator dz^mu (coordinate index).
  static WeylForm form_gen(ChartContext ctx, int K, int mu) {
    if (mu < 0 || mu >= ctx.dim())
      throw std::out_of_range("WeylForm::form_gen: index out of range");
    WeylForm w(ctx, K);
    Term t = w.blank_term();
    t.form = std::uint32_t{1} << mu;
    t.coeff = Rational(1);
    w.push(std::move(t));
    w.normalize();
    return w;
  }

  static WeylForm dx_form(ChartContext ctx, int K, int i) {
    return form_gen(ctx, K, i);
  }
  static WeylForm dp_form(ChartContext ctx, int K, int i) {
    return form_gen(ctx, K, ctx.N + i);
  }

  const ChartContext& context() const { return ctx_; }
  int trunc_K() const { return trunc_K_; }
  const std::vector<Term>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  Term blank_term() const {
    Term t;
    t.base.assign(ctx_.dim(), 0);
    t.xi.assign(ctx_.N, 0);
    t.eta.assign(ctx_.N, 0);
    t.coeff = Rational(0);
    return t;
  }

  WeylForm operator+(const WeylForm& o) const {
    check_compatible(o);
    WeylForm r(ctx_, trunc_K_);
    r.terms_ = terms_;
    r.terms_.insert(r.terms_.end(), o.terms_.begin(), o.terms_.end());
    r.normalize();
    return r;
  }

  WeylForm operator-(const WeylForm& o) const { return *this + o.negated(); }

  WeylForm negated() const {
    WeylForm r(ctx_, trunc_K_);
    r.terms_ = terms_;
    for (Term& t : r.terms_) t.coeff = -t.coeff;
    return r;
  }

  WeylForm scaled(const Rational& c) const {
    WeylForm r(ctx_, trunc_K_);
    if (c.is_zero()) return r;
    r.terms_ = terms_;
    for (Term& t : r.terms_) t.coeff = t.coeff * c;
    return r;
  }

  /// Multiplies by lambda^k (k may be negative; then every term must carry
  /// enough powers, otherwise this throws).
  WeylForm lambda_shifted(int k) const {
    WeylForm r(ctx_, trunc_K_);
    r.terms_ = terms_;
    for (Term& t : r.terms_) {
      t.lambda_pow += k;
      if (t.lambda_pow < 0)
        throw std::logic_error("WeylForm: element not divisible by lambda");
    }
    r.normalize();
    return r;
  }

  bool operator==(const WeylForm& o) const {
    if (ctx_ != o.ctx_ || trunc_K_ != o.trunc_K_ ||
        terms_.size() != o.terms_.size())
      return false;
    for (std::size_t i = 0; i < terms_.size(); ++i) {
      if (!Term::key_equal(terms_[i], o.terms_[i]) ||
          terms_[i].coeff != o.terms_[i].coeff)
        return false;
    }
    return true;
  }
  bool operator!=(const WeylForm& o) const { return !(*this == o); }

  /// Minimum term filtration; empty for the zero element.
  std::optional<int> filtration_degree() const {
    std::optional<int> d;
    for (const Term& t : terms_) {
      int f = t.filtration();
      if (!d || f < *d) d = f;
    }
    return d;
  }

  /// The sub-sum of terms with the given exterior degree.
  WeylForm form_component(int degree) const {
    WeylForm r(ctx_, trunc_K_);
    for (const Term& t : terms_)
      if (t.form_degree() == degree) r.terms_.push_back(t);
    return r;
  }

  /// Canonical text rendering; deterministic term order.
  std::string str() const {
    if (terms_.empty()) return "0";
    std::string out;
    bool first = true;
    for (const Term& t : terms_) {
      Rational a = t.coeff;
      if (first) {
        if (a.sign() < 0) { out += "-"; a = -a; }
      } else {
        out += a.sign() < 0 ? " - " : " + ";
        if (a.sign() < 0) a = -a;
      }
      first = false;
      std::string factors = factor_str(t);
      if (factors.empty()) {
        out += a.str();
      } else if (a == Rational(1)) {
        out += factors;
      } else {
        out += a.str() + "*" + factors;
      }
    }
    return out;
  }

  void check_compatible(const WeylForm& o) const {
    if (ctx_ != o.ctx_)
      throw std::invalid_argument("WeylForm: context mismatch");
    if (trunc_K_ != o.trunc_K_)
      throw std::invalid_argument("WeylForm: truncation mismatch");
  }

  void push(Term t) { terms_.push_back(std::move(t)); }

  /// Restores the canonical representation: sorts, merges equal keys, drops
  /// zero coefficients and terms beyond the truncation order.
  void normalize() { normalize_at(trunc_K_); }

  void normalize_at(int cap) {
    std::erase_if(terms_, [cap](const Term& t) {
      return t.coeff.is_zero() || t.trunc_weight() > cap;
    });
    std::sort(terms_.begin(), terms_.end(), Term::key_less);
    std::vector<Term> merged;
    merged.reserve(terms_.size());
    for (Term& t : terms_) {
      if (!merged.empty() && Term::key_equal(merged.back(), t)) {
        merged.back().coeff += t.coeff;
        if (merged.back().coeff.is_zero()) merged.pop_back();
      } else {
        merged.push_back(std::move(t));
      }
    }
    terms_ = std::move(merged);
  }

private:
  std::string factor_str(const Term& t) const {
    std::string out;
    auto append = [&out](const std::string& s) {
      if (!out.empty()) out += "*";
      out += s;
    };
    if (t.lambda_pow == 1) append("lambda");
    else if (t.lambda_pow > 1)
      append("lambda^" + std::to_string(t.lambda_pow));
    for (int i = 0; i < ctx_.dim(); ++i) {
      if (t.base[i] == 0) continue;
      std::string v = i < ctx_.N ? "x" + std::to_string(i + 1)
                                 : "p" + std::to_string(i - ctx_.N + 1);
      if (t.base[i] > 1) v += "^" + std::to_string(t.base[i]);
      append(v);
    }
    for (int i = 0; i < ctx_.N; ++i) {
      if (t.xi[i] == 0) continue;
      std::string v = "xi" + std::to_string(i + 1);
      if (t.xi[i] > 1) v += "^" + std::to_string(t.xi[i]);
      append(v);
    }
    for (int i = 0; i < ctx_.N; ++i) {
      if (t.eta[i] == 0) continue;
      std::string v = "eta" + std::to_string(i + 1);
      if (t.eta[i] > 1) v += "^" + std::to_string(t.eta[i]);
      append(v);
    }
    for (int mu = 0; mu < ctx_.dim(); ++mu) {
      if ((t.form >> mu) & 1u) {
        append(mu < ctx_.N ? "dx" + std::to_string(mu + 1)
                           : "dp" + std::to_string(mu - ctx_.N + 1));
      }
    }
    return out;
  }

  ChartContext ctx_;
  int trunc_K_;
  std::vector<Term> terms_;
};

namespace detail {

/// Enumerates contraction multi-indices 0 <= m_i <= bound_i.
inline bool next_multi_index(std::vector<int>& m, const std::vector<int>& bound) {
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (m[i] < bound[i]) { ++m[i]; for (std::size_t j = 0; j < i; ++j) m[j] = 0; return true; }
  }
  return false;
}

inline void circ_into(const WeylForm& a, const WeylForm& b, int cap,
                      std::vector<Term>& out) {
  const ChartContext& ctx = a.context();
  const int n = ctx.N;
  std::vector<int> bound(n), m(n);
  for (const Term& ta : a.terms()) {
    for (const Term& tb : b.terms()) {
      std::uint32_t wedge;
      int wsign;
      if (!wedge_masks(ta.form, tb.form, wedge, wsign)) continue;
      for (int i = 0; i < n; ++i) bound[i] = std::min(ta.eta[i], tb.xi[i]);
      std::fill(m.begin(), m.end(), 0);
      // Contractions pair eta factors of the left operand with xi factors
      // of the right operand, one (-lambda) each:
      //   a o b = sum_m (-lambda)^|m| / m! (d/d eta)^m a (d/d xi)^m b.
      do {
        int mtot = 0;
        Rational c = ta.coeff * tb.coeff * Rational(wsign);
        for (int i = 0; i < n; ++i) {
          if (m[i] == 0) continue;
          mtot += m[i];
          c *= Rational::falling(ta.eta[i], m[i]) *
               Rational::falling(tb.xi[i], m[i]) / Rational::factorial(m[i]);
        }
        if (mtot % 2 == 1) c = -c;
        Term t;
        t.lambda_pow = ta.lambda_pow + tb.lambda_pow + mtot;
        t.form = wedge;
        t.coeff = std::move(c);
        t.base.resize(ctx.dim());
        for (int i = 0; i < ctx.dim(); ++i) t.base[i] = ta.base[i] + tb.base[i];
        t.xi.resize(n);
        t.eta.resize(n);
        for (int i = 0; i < n; ++i) {
          t.xi[i] = ta.xi[i] + tb.xi[i] - m[i];
          t.eta[i] = ta.eta[i] - m[i] + tb.eta[i];
        }
        if (t.trunc_weight() <= cap) out.push_back(std::move(t));
      } while (next_multi_index(m, bound));
    }
  }
}

}  // namespace detail

/// The fiberwise noncommutative product in PBW normal form. Base polynomials
/// multiply pointwise, form factors wedge, and fiber parts compose through
/// the closed contraction rule derived from the defining relation with eta
/// factors ordered rightmost. Bilinear, associative, truncated at trunc_K.
inline WeylForm circ(const WeylForm& a, const WeylForm& b) {
  a.check_compatible(b);
  WeylForm w(a.context(), a.trunc_K());
  std::vector<Term> out;
  detail::circ_into(a, b, a.trunc_K(), out);
  for (Term& t : out) w.push(std::move(t));
  w.normalize();
  return w;
}

/// a o b - (-1)^{deg(a) deg(b)} b o a, graded by exterior degree only,
/// extended bilinearly over form-degree components.
inline WeylForm graded_commutator(const WeylForm& a, const WeylForm& b) {
  a.check_compatible(b);
  WeylForm r(a.context(), a.trunc_K());
  const int top = a.context().dim();
  for (int p = 0; p <= top; ++p) {
    WeylForm ap = a.form_component(p);
    if (ap.is_zero()) continue;
    for (int q = 0; q <= top; ++q) {
      WeylForm bq = b.form_component(q);
      if (bq.is_zero()) continue;
      WeylForm ab = circ(ap, bq);
      WeylForm ba = circ(bq, ap);
      r = r + (((p * q) % 2 == 0) ? ab - ba : ab + ba);
    }
  }
  return r;
}

/// (1/lambda) [a, b], computed without losing boundary terms: the commutator
/// is accumulated with the filtration cap raised by 2 (one lambda), divided
/// by lambda, then truncated back. Throws if the commutator is not divisible
/// by lambda, which would signal a convention bug.
inline WeylForm commutator_div_lambda(const WeylForm& a, const WeylForm& b) {
  a.check_compatible(b);
  const int cap = a.trunc_K() + 2;
  WeylForm acc(a.context(), a.trunc_K());
  const int top = a.context().dim();
  for (int p = 0; p <= top; ++p) {
    WeylForm ap = a.form_component(p);
    if (ap.is_zero()) continue;
    for (int q = 0; q <= top; ++q) {
      WeylForm bq = b.form_component(q);
      if (bq.is_zero()) continue;
      const bool minus = (p * q) % 2 == 0;
      std::vector<Term> out;
      detail::circ_into(ap, bq, cap, out);
      for (Term& t : out) acc.push(std::move(t));
      out.clear();
      detail::circ_into(bq, ap, cap, out);
      for (Term& t : out) {
        if (minus) t.coeff = -t.coeff;
        acc.push(std::move(t));
      }
    }
  }
  acc.normalize_at(cap);
  WeylForm r(a.context(), a.trunc_K());
  for (Term t : acc.terms()) {
    t.lambda_pow -= 1;
    if (t.lambda_pow < 0)
      throw std::logic_error(
          "commutator_div_lambda: commutator not divisible by lambda");
    r.push(std::move(t));
  }
  r.normalize();
  return r;
}

/// Minimum filtration over terms, or nullopt (bottom) for the zero element.
inline std::optional<int> filtration_degree(const WeylForm& a) {
  return a.filtration_degree();
}

}  // namespace starweyl
