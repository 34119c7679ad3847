#pragma once

#include <algorithm>
#include <array>
#include <map>
#include <string>
#include <vector>

#include "starweyl/base_poly.hpp"
#include "starweyl/chart.hpp"
#include "starweyl/weyl.hpp"

namespace starweyl {

/// Lowered Christoffel coefficients of a chart connection,
/// Gamma_{ijk} = omega_{il} Gamma^l_{jk}, with 0-based coordinate indices
/// and polynomial entries. Total symmetry of the table is equivalent to
/// torsion-freeness plus compatibility with the constant Darboux form; the
/// adapted (self-parallel) condition additionally kills every component
/// whose three indices all lie in the p-block.
class ConnectionSpec {
public:
  explicit ConnectionSpec(int n) : N_(n), zero_(2 * n) {
    if (n < 1 || n > 8)
      throw std::invalid_argument("ConnectionSpec: N must be in 1..8");
  }

  static ConnectionSpec flat(int n) { return ConnectionSpec(n); }

  int half_dim() const { return N_; }
  int dim() const { return 2 * N_; }
  bool is_flat() const {
    for (const auto& [k, p] : comp_)
      if (!p.is_zero()) return false;
    return true;
  }

  /// Sets one component exactly as given; no symmetrization.
  void set_component(int i, int j, int k, const BasePoly& p) {
    check_index(i); check_index(j); check_index(k);
    if (p.nvars() != dim())
      throw std::invalid_argument("ConnectionSpec: polynomial dimension mismatch");
    if (p.is_zero()) comp_.erase({i, j, k});
    else comp_.insert_or_assign({i, j, k}, p);
  }

  /// Sets the component and all its index permutations.
  void set_symmetric(int i, int j, int k, const BasePoly& p) {
    std::array<int, 3> idx{i, j, k};
    std::sort(idx.begin(), idx.end());
    do {
      set_component(idx[0], idx[1], idx[2], p);
    } while (std::next_permutation(idx.begin(), idx.end()));
  }

  const BasePoly& gamma(int i, int j, int k) const {
    check_index(i); check_index(j); check_index(k);
    auto it = comp_.find({i, j, k});
    return it != comp_.end() ? it->second : zero_;
  }

private:
  void check_index(int i) const {
    if (i < 0 || i >= dim())
      throw std::out_of_range("ConnectionSpec: index out of range");
  }

  int N_;
  BasePoly zero_;
  std::map<std::array<int, 3>, BasePoly> comp_;
};

struct ValidationReport {
  enum class Kind { ok, symmetry, self_parallel };
  Kind kind = Kind::ok;
  std::array<int, 3> triple{0, 0, 0};  // 1-based, for reporting

  bool ok() const { return kind == Kind::ok; }

  std::string str() const {
    switch (kind) {
      case Kind::ok:
        return "ok";
      case Kind::symmetry:
        return "violation symmetry at (" + std::to_string(triple[0]) + "," +
               std::to_string(triple[1]) + "," + std::to_string(triple[2]) + ")";
      case Kind::self_parallel:
        return "violation self-parallel at (" + std::to_string(triple[0]) +
               "," + std::to_string(triple[1]) + "," +
               std::to_string(triple[2]) + ")";
    }
    return "";
  }
};

/// Checks total symmetry and the self-parallel condition as exact polynomial
/// identities. Returns the first violated index triple otherwise.
inline ValidationReport validate_connection(const ConnectionSpec& spec,
                                            const ChartContext& ctx) {
  if (spec.half_dim() != ctx.N)
    throw std::invalid_argument("validate_connection: dimension mismatch");
  const int d = ctx.dim();
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k) {
        const BasePoly& g = spec.gamma(i, j, k);
        if (spec.gamma(j, i, k) != g || spec.gamma(i, k, j) != g)
          return {ValidationReport::Kind::symmetry, {i + 1, j + 1, k + 1}};
      }
  // Self-parallel: the L' component of nabla_L L vanishes, i.e. the lowered
  // table is zero whenever all three indices sit in the p-block.
  for (int i = ctx.N; i < d; ++i)
    for (int j = ctx.N; j < d; ++j)
      for (int k = ctx.N; k < d; ++k)
        if (!spec.gamma(i, j, k).is_zero())
          return {ValidationReport::Kind::self_parallel, {i + 1, j + 1, k + 1}};
  return {};
}

/// The coordinate exterior derivative on base coefficients: each term gains
/// dz^mu wedged on the left, weighted by the partial derivative.
inline WeylForm exterior_derivative(const WeylForm& a) {
  const ChartContext& ctx = a.context();
  WeylForm r(ctx, a.trunc_K());
  for (const Term& t : a.terms()) {
    for (int mu = 0; mu < ctx.dim(); ++mu) {
      if (t.base[mu] == 0) continue;
      if (((t.form >> mu) & 1u) != 0) continue;
      Term nt = t;
      nt.base[mu] -= 1;
      nt.form |= std::uint32_t{1} << mu;
      nt.coeff = t.coeff * Rational(t.base[mu]) *
                 Rational(detail::left_wedge_sign(t.form, mu));
      r.push(std::move(nt));
    }
  }
  r.normalize();
  return r;
}

/// The fiber-quadratic connection element: with both non-form indices of the
/// lowered table raised by the inverse Darboux matrix,
///   gamma_hat = 1/2 sum_{a,b,k} B^{ab}_k y_a y_b dz^k,
///   B^{ab}_k  = -s(a) s(b) Gamma_{conj(a), k, conj(b)},
/// where s(mu) = -1 on the x-block and +1 on the p-block. The covariant
/// derivative is then d + (1/lambda) ad(gamma_hat), which reproduces the
/// frame formula Gamma^m_{k r} y_m dz^k on the fiber generators.
inline WeylForm connection_element(const ConnectionSpec& spec,
                                   const ChartContext& ctx, int trunc_K) {
  WeylForm w(ctx, trunc_K);
  const int d = ctx.dim();
  const Rational half(1, 2);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      for (int k = 0; k < d; ++k) {
        const BasePoly& g = spec.gamma(ctx.conj(a), k, ctx.conj(b));
        if (g.is_zero()) continue;
        const int sa = a < ctx.N ? -1 : 1;
        const int sb = b < ctx.N ? -1 : 1;
        const Rational c = half * Rational(-sa * sb);
        for (const auto& [key, v] : g.terms()) {
          Term t = w.blank_term();
          t.base = key;
          t.coeff = v * c;
          if (a < ctx.N) t.xi[a] += 1; else t.eta[a - ctx.N] += 1;
          if (b < ctx.N) t.xi[b] += 1; else t.eta[b - ctx.N] += 1;
          t.form = std::uint32_t{1} << k;
          w.push(std::move(t));
        }
      }
  w.normalize();
  return w;
}

/// The covariant derivative on Weyl forms, built once per connection.
/// Requires a valid spec; throws with the violation report otherwise.
class CovariantDerivative {
public:
  CovariantDerivative(const ConnectionSpec& spec, const ChartContext& ctx,
                      int trunc_K)
      : gamma_hat_(connection_element(spec, ctx, trunc_K)) {
    ValidationReport rep = validate_connection(spec, ctx);
    if (!rep.ok())
      throw std::invalid_argument("CovariantDerivative: invalid connection: " +
                                  rep.str());
  }

  const WeylForm& connection_form() const { return gamma_hat_; }

  WeylForm operator()(const WeylForm& a) const {
    if (gamma_hat_.is_zero()) return exterior_derivative(a);
    return exterior_derivative(a) + commutator_div_lambda(gamma_hat_, a);
  }

private:
  WeylForm gamma_hat_;
};

/// One-shot covariant derivative.
inline WeylForm nabla(const WeylForm& a, const ConnectionSpec& spec) {
  return CovariantDerivative(spec, a.context(), a.trunc_K())(a);
}

/// The curvature element: the ordered frame sum
///   1/2 [ sum_L u^{-1}(dp_a) o nabla^2 eta_a
///         + sum_{L'} nabla^2 xi^a o u^{-1}(dx^a) ],
/// with u^{-1}(dp_a) = xi^a and u^{-1}(dx^a) = -eta_a. It generates the
/// square of the covariant derivative, nabla^2 = (1/lambda) ad(Gamma), and
/// the ordering keeps every summand inside the polarization ideal.
inline WeylForm curvature_gamma(const ConnectionSpec& spec,
                                const ChartContext& ctx, int trunc_K) {
  CovariantDerivative nab(spec, ctx, trunc_K);
  WeylForm total(ctx, trunc_K);
  for (int a = 0; a < ctx.N; ++a) {
    WeylForm dd_eta = nab(nab(WeylForm::eta_gen(ctx, trunc_K, a)));
    total = total + circ(WeylForm::xi_gen(ctx, trunc_K, a), dd_eta);
    WeylForm dd_xi = nab(nab(WeylForm::xi_gen(ctx, trunc_K, a)));
    total = total - circ(dd_xi, WeylForm::eta_gen(ctx, trunc_K, a));
  }
  return total.scaled(Rational(1, 2));
}

}  // namespace starweyl
