#pragma once

#include "starweyl/weyl.hpp"

namespace starweyl {

/// The Koszul differential, bidegree (-1, 1): on each term, every fiber
/// factor y is removed (with multiplicity) and u(y) is wedged on the left,
/// where u(xi^i) = dp_i and u(eta_i) = -dx^i. Linear; delta o delta = 0.
inline WeylForm delta(const WeylForm& a) {
  const ChartContext& ctx = a.context();
  WeylForm r(ctx, a.trunc_K());
  for (const Term& t : a.terms()) {
    for (int i = 0; i < ctx.N; ++i) {
      if (t.xi[i] > 0) {
        const int g = ctx.N + i;  // dp_{i+1}
        if (((t.form >> g) & 1u) == 0) {
          Term nt = t;
          nt.xi[i] -= 1;
          nt.form |= std::uint32_t{1} << g;
          nt.coeff = t.coeff * Rational(t.xi[i]) *
                     Rational(detail::left_wedge_sign(t.form, g));
          r.push(std::move(nt));
        }
      }
      if (t.eta[i] > 0) {
        const int g = i;  // dx^{i+1}
        if (((t.form >> g) & 1u) == 0) {
          Term nt = t;
          nt.eta[i] -= 1;
          nt.form |= std::uint32_t{1} << g;
          nt.coeff = t.coeff * Rational(-t.eta[i]) *
                     Rational(detail::left_wedge_sign(t.form, g));
          r.push(std::move(nt));
        }
      }
    }
  }
  r.normalize();
  return r;
}

/// The contracting homotopy, bidegree (1, -1). On a term of bidegree (m, n)
/// with m + n > 0 it sums over the form factors y_1 < ... < y_n of the
/// canonical wedge word: the i-th summand removes y_i with sign (-1)^{i-1}
/// and multiplies the fiber part by u^{-1}(y_i), scaled by 1/(m+n); zero on
/// bidegree (0, 0). u^{-1}(dp_i) = xi^i, u^{-1}(dx^i) = -eta_i.
inline WeylForm delta_inv(const WeylForm& a) {
  const ChartContext& ctx = a.context();
  WeylForm r(ctx, a.trunc_K());
  for (const Term& t : a.terms()) {
    const int m = t.fiber_degree();
    const int n = t.form_degree();
    if (m + n == 0) continue;
    const Rational scale = Rational(1) / Rational(m + n);
    int position = 0;  // 1-based position of the generator in the sorted word
    for (int g = 0; g < ctx.dim(); ++g) {
      if (((t.form >> g) & 1u) == 0) continue;
      ++position;
      Term nt = t;
      nt.form &= ~(std::uint32_t{1} << g);
      Rational c = t.coeff * scale;
      if (position % 2 == 0) c = -c;
      if (g < ctx.N) {
        nt.eta[g] += 1;  // u^{-1}(dx) = -eta
        c = -c;
      } else {
        nt.xi[g - ctx.N] += 1;  // u^{-1}(dp) = xi
      }
      nt.coeff = std::move(c);
      r.push(std::move(nt));
    }
  }
  r.normalize();
  return r;
}

/// Projection onto the bidegree (0, 0) component: terms with no fiber and
/// no form factors; lambda powers are retained.
inline WeylForm tau(const WeylForm& a) {
  WeylForm r(a.context(), a.trunc_K());
  for (const Term& t : a.terms())
    if (t.fiber_degree() == 0 && t.form == 0) r.push(t);
  r.normalize();
  return r;
}

}  // namespace starweyl
