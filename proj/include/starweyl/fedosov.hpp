#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "starweyl/base_poly.hpp"
#include "starweyl/chart.hpp"
#include "starweyl/connection.hpp"
#include "starweyl/ideals.hpp"
#include "starweyl/koszul.hpp"
#include "starweyl/weyl.hpp"

namespace starweyl {

/// A formal lambda-series of base polynomials, truncated at order_cap.
class LambdaSeries {
public:
  LambdaSeries(int nvars, int order_cap)
      : nvars_(nvars), coeffs_(order_cap + 1, BasePoly(nvars)) {
    if (order_cap < 0)
      throw std::invalid_argument("LambdaSeries: negative order cap");
  }

  static LambdaSeries from_poly(const BasePoly& p, int order_cap) {
    LambdaSeries s(p.nvars(), order_cap);
    s.coeffs_[0] = p;
    return s;
  }

  int nvars() const { return nvars_; }
  int order_cap() const { return static_cast<int>(coeffs_.size()) - 1; }
  const BasePoly& at(int order) const { return coeffs_.at(order); }
  BasePoly& at(int order) { return coeffs_.at(order); }

  bool is_zero() const {
    for (const BasePoly& p : coeffs_)
      if (!p.is_zero()) return false;
    return true;
  }

  LambdaSeries operator+(const LambdaSeries& o) const {
    check_same(o);
    LambdaSeries r(*this);
    for (int k = 0; k <= order_cap(); ++k) r.coeffs_[k] = r.coeffs_[k] + o.coeffs_[k];
    return r;
  }

  LambdaSeries operator-(const LambdaSeries& o) const {
    check_same(o);
    LambdaSeries r(*this);
    for (int k = 0; k <= order_cap(); ++k) r.coeffs_[k] = r.coeffs_[k] - o.coeffs_[k];
    return r;
  }

  LambdaSeries scaled(const Rational& c) const {
    LambdaSeries r(*this);
    for (BasePoly& p : r.coeffs_) p = p.scaled(c);
    return r;
  }

  bool operator==(const LambdaSeries& o) const {
    return nvars_ == o.nvars_ && coeffs_ == o.coeffs_;
  }
  bool operator!=(const LambdaSeries& o) const { return !(*this == o); }

  /// Canonical text: lambda-ordered, zero orders skipped.
  std::string str() const {
    std::string out;
    for (int k = 0; k <= order_cap(); ++k) {
      if (coeffs_[k].is_zero()) continue;
      if (!out.empty()) out += " + ";
      std::string body = coeffs_[k].str();
      if (k == 0) {
        out += body;
      } else {
        std::string l = k == 1 ? "lambda" : "lambda^" + std::to_string(k);
        out += l + "*(" + body + ")";
      }
    }
    return out.empty() ? "0" : out;
  }

private:
  void check_same(const LambdaSeries& o) const {
    if (nvars_ != o.nvars_ || coeffs_.size() != o.coeffs_.size())
      throw std::invalid_argument("LambdaSeries: shape mismatch");
  }

  int nvars_;
  std::vector<BasePoly> coeffs_;
};

/// Everything a run needs: the chart, the connection, the leaf, the
/// filtration truncation order and the iteration cap for the fixed points.
struct EngineConfig {
  ChartContext ctx;
  ConnectionSpec conn;
  LeafSpec leaf;
  int trunc_K = 4;
  int max_iter = 0;  // 0: derived from trunc_K

  EngineConfig(ChartContext c, ConnectionSpec s, LeafSpec l, int K,
               int iter_cap = 0)
      : ctx(c), conn(std::move(s)), leaf(std::move(l)), trunc_K(K),
        max_iter(iter_cap == 0 ? K + 4 : iter_cap) {
    if (trunc_K < 2)
      throw std::invalid_argument("EngineConfig: trunc_K must be >= 2");
    if (max_iter < trunc_K)
      throw std::invalid_argument("EngineConfig: max_iter must be >= trunc_K");
    if (conn.half_dim() != ctx.N)
      throw std::invalid_argument("EngineConfig: connection dimension mismatch");
    if (leaf.half_dim() != ctx.N)
      throw std::invalid_argument("EngineConfig: leaf dimension mismatch");
  }

  int star_order() const { return trunc_K / 2; }
};

namespace detail {

/// Re-truncates a form at a different order (the terms themselves are
/// unchanged; anything above the new order is dropped).
inline WeylForm retruncate(const WeylForm& a, int new_K) {
  WeylForm w(a.context(), new_K);
  for (const Term& t : a.terms()) w.push(t);
  w.normalize();
  return w;
}

}  // namespace detail

/// The solved state: the curvature element and the fixed point r defining
/// the flat differential D. Immutable once built; all queries are pure.
///
/// r is solved two filtration levels above the user truncation and kept in
/// r_padded: (1/lambda) ad(.) reaches two weight levels down, so the padded
/// solution is what makes D o D vanish identically at the user truncation.
struct FedosovState {
  EngineConfig config;
  CovariantDerivative nab;
  WeylForm gamma;
  WeylForm r;
  WeylForm r_padded;
  int iterations = 0;

  FedosovState(EngineConfig cfg, CovariantDerivative n, WeylForm g, WeylForm rr,
               WeylForm rp, int it)
      : config(std::move(cfg)), nab(std::move(n)), gamma(std::move(g)),
        r(std::move(rr)), r_padded(std::move(rp)), iterations(it) {}

  /// (1/lambda) [r, a] against the padded r, cut back to the user order.
  WeylForm ad_r_div_lambda(const WeylForm& a) const {
    if (r_padded.is_zero()) return WeylForm::zero(a.context(), a.trunc_K());
    WeylForm a_pad = detail::retruncate(a, r_padded.trunc_K());
    return detail::retruncate(commutator_div_lambda(r_padded, a_pad),
                              config.trunc_K);
  }
};

/// Iterates r_{n+1} = delta_inv(Gamma + nabla r_n + (1/lambda) r_n o r_n)
/// from r_0 = 0 until two successive iterates coincide at the truncation
/// order. Each step determines one more filtration level, so the fixed
/// point is reached within the truncation order plus the padding; exceeding
/// max_iter signals a convention bug and throws.
inline FedosovState solve_r(const EngineConfig& config) {
  const ChartContext& ctx = config.ctx;
  const int K = config.trunc_K;
  const int K_pad = K + 2;
  CovariantDerivative nab_pad(config.conn, ctx, K_pad);
  WeylForm gamma_pad = curvature_gamma(config.conn, ctx, K_pad);
  WeylForm r = WeylForm::zero(ctx, K_pad);
  const int iter_cap = config.max_iter + 2;
  for (int it = 0; it < iter_cap; ++it) {
    // (1/lambda) r o r = 1/2 (1/lambda) [r, r] for the form-degree-1 r.
    WeylForm rhs = gamma_pad + nab_pad(r) +
                   commutator_div_lambda(r, r).scaled(Rational(1, 2));
    WeylForm next = delta_inv(rhs);
    if (next == r) {
      CovariantDerivative nab(config.conn, ctx, K);
      WeylForm r_user = detail::retruncate(next, K);
      return FedosovState(config, std::move(nab),
                          detail::retruncate(gamma_pad, K),
                          std::move(r_user), std::move(next), it + 1);
    }
    r = std::move(next);
  }
  throw std::runtime_error("solve_r: no stabilization within max_iter");
}

/// The flat differential D = delta - nabla - (1/lambda) [r, .]. The Koszul
/// term carries the opposite sign from the connection and r terms: with the
/// recursion delta r = Gamma + nabla r + (1/lambda) r o r this is the unique
/// relative sign (up to a global one) for which D o D = 0; the flatness test
/// is the arbiter and the convention sheet records the choice.
inline WeylForm fedosov_D(const WeylForm& a, const FedosovState& state) {
  return delta(a) - state.nab(a) - state.ad_r_div_lambda(a);
}

/// Q = Id + delta_inv (D - delta); intertwines delta Q = Q D. The
/// perturbation D - delta = -(nabla + (1/lambda) ad r) raises filtration.
inline WeylForm q_map(const WeylForm& a, const FedosovState& state) {
  WeylForm rest = state.nab(a) + state.ad_r_div_lambda(a);
  return a - delta_inv(rest);
}

/// The inverse of Q by fixed-point iteration of b = a - delta_inv((D-delta) b);
/// the perturbation raises filtration, so the iteration stabilizes within
/// trunc_K steps.
inline WeylForm q_inverse(const WeylForm& a, const FedosovState& state) {
  WeylForm b = a;
  for (int it = 0; it < state.config.max_iter; ++it) {
    WeylForm rest = state.nab(b) + state.ad_r_div_lambda(b);
    WeylForm next = a + delta_inv(rest);
    if (next == b) return next;
    b = std::move(next);
  }
  throw std::runtime_error("q_inverse: no stabilization within max_iter");
}

namespace detail {

/// Collects the bidegree (0,0) part of w into a lambda-series.
inline LambdaSeries series_of_tau(const WeylForm& w, int order_cap) {
  LambdaSeries s(w.context().dim(), order_cap);
  for (const Term& t : w.terms()) {
    if (t.fiber_degree() != 0 || t.form != 0) continue;
    if (t.lambda_pow > order_cap) continue;
    s.at(t.lambda_pow).add_term(t.base, t.coeff);
  }
  return s;
}

}  // namespace detail

/// The adapted star product on chart polynomials: tau of the product of the
/// two flat lifts, reported through lambda order trunc_K / 2. Agrees with
/// pointwise multiplication at lambda^0 and is associative at truncation.
inline LambdaSeries star(const BasePoly& f, const BasePoly& g,
                         const FedosovState& state) {
  const ChartContext& ctx = state.config.ctx;
  const int K = state.config.trunc_K;
  WeylForm lf = q_inverse(WeylForm::from_base(ctx, K, f), state);
  WeylForm lg = q_inverse(WeylForm::from_base(ctx, K, g), state);
  return detail::series_of_tau(tau(circ(lf, lg)), state.config.star_order());
}

/// Bilinear extension of the star product to lambda-series arguments.
inline LambdaSeries star(const LambdaSeries& f, const LambdaSeries& g,
                         const FedosovState& state) {
  const int cap = state.config.star_order();
  LambdaSeries out(state.config.ctx.dim(), cap);
  for (int i = 0; i <= cap; ++i) {
    if (f.at(i).is_zero()) continue;
    for (int j = 0; i + j <= cap; ++j) {
      if (g.at(j).is_zero()) continue;
      LambdaSeries part = star(f.at(i), g.at(j), state);
      for (int k = 0; i + j + k <= cap; ++k)
        out.at(i + j + k) = out.at(i + j + k) + part.at(k);
    }
  }
  return out;
}

/// Closed-form oracle for the flat regime: the one-sided contraction
/// (standard-ordered) composition
///   f * g = sum_m lambda^{|m|} / m! (d^m f / dx^m)(d^m g / dp^m)
/// over multi-indices m of length N. Independent of the Fedosov pipeline.
inline LambdaSeries flat_star_oracle(const BasePoly& f, const BasePoly& g,
                                     int order, int trunc_K) {
  if (f.nvars() != g.nvars())
    throw std::invalid_argument("flat_star_oracle: dimension mismatch");
  if (2 * order > trunc_K)
    throw std::invalid_argument("flat_star_oracle: order exceeds trunc_K/2");
  const int n = f.half_dim();
  LambdaSeries out(f.nvars(), order);
  std::vector<int> m(n, 0);
  auto emit = [&]() {
    int total = 0;
    for (int e : m) total += e;
    if (total > order) return;
    BasePoly df = f;
    BasePoly dg = g;
    Rational w(1);
    for (int i = 0; i < n; ++i) {
      for (int k = 0; k < m[i]; ++k) {
        df = df.partial(i);        // d/dx^i
        dg = dg.partial(n + i);    // d/dp_i
      }
      w = w / Rational::factorial(m[i]);
    }
    if (df.is_zero() || dg.is_zero()) return;
    out.at(total) = out.at(total) + (df * dg).scaled(w);
  };
  // Enumerate multi-indices with entries bounded by the requested order.
  while (true) {
    emit();
    int i = 0;
    for (; i < n; ++i) {
      if (m[i] < order) { ++m[i]; break; }
      m[i] = 0;
    }
    if (i == n) break;
  }
  return out;
}

namespace detail {

/// The transfer pipeline without the leaf-extension precondition; used both
/// by the public module action and by the extension-independence tests.
inline LambdaSeries module_action_any(const BasePoly& f, const BasePoly& psi,
                                      const FedosovState& state) {
  const ChartContext& ctx = state.config.ctx;
  const int K = state.config.trunc_K;
  WeylForm lf = q_inverse(WeylForm::from_base(ctx, K, f), state);
  WeylForm lpsi = q_inverse(WeylForm::from_base(ctx, K, psi), state);
  WeylForm reduced = reduce_mod_Ifin(circ(lf, lpsi), state.config.leaf);
  LambdaSeries s =
      series_of_tau(tau(q_map(reduced, state)), state.config.star_order());
  // The representative is already leaf-evaluated; repeat the substitution to
  // keep the quotient map explicit.
  LambdaSeries out(ctx.dim(), s.order_cap());
  for (int k = 0; k <= s.order_cap(); ++k)
    out.at(k) = s.at(k).substitute_x(state.config.leaf.c);
  return out;
}

}  // namespace detail

/// Left action of a chart polynomial on a leaf function psi = psi(p), the
/// canonical x-constant extension. The result is again a lambda-series of
/// p-only polynomials.
inline LambdaSeries module_action(const BasePoly& f, const BasePoly& psi,
                                  const FedosovState& state) {
  if (psi.depends_on_x())
    throw std::invalid_argument("module_action: psi depends on x");
  return detail::module_action_any(f, psi, state);
}

/// Bilinear extension to lambda-series arguments.
inline LambdaSeries module_action(const LambdaSeries& f,
                                  const LambdaSeries& psi,
                                  const FedosovState& state) {
  const int cap = state.config.star_order();
  LambdaSeries out(state.config.ctx.dim(), cap);
  for (int i = 0; i <= cap; ++i) {
    if (f.at(i).is_zero()) continue;
    for (int j = 0; i + j <= cap; ++j) {
      if (psi.at(j).is_zero()) continue;
      LambdaSeries part = module_action(f.at(i), psi.at(j), state);
      for (int k = 0; i + j + k <= cap; ++k)
        out.at(i + j + k) = out.at(i + j + k) + part.at(k);
    }
  }
  return out;
}

}  // namespace starweyl
