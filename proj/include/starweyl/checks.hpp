#pragma once

#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "starweyl/config.hpp"
#include "starweyl/fedosov.hpp"
#include "starweyl/pbw.hpp"

namespace starweyl {

/// Deterministic sampler for random polynomials and Weyl forms at desk
/// scale. Everything is driven by one seeded engine so reports are
/// reproducible byte for byte.
class FormSampler {
public:
  FormSampler(ChartContext ctx, int trunc_K, unsigned seed,
              int max_base_degree = 3)
      : ctx_(ctx), K_(trunc_K), rng_(seed), max_base_degree_(max_base_degree) {}

  std::mt19937& rng() { return rng_; }

  Rational rational() {
    std::uniform_int_distribution<int> num(-9, 9);
    std::uniform_int_distribution<int> den(1, 3);
    int n = num(rng_);
    if (n == 0) n = 1;
    return Rational(n, den(rng_));
  }

  BasePoly poly(int max_terms = 3) {
    BasePoly p(ctx_.dim());
    std::uniform_int_distribution<int> nterms(1, max_terms);
    const int t = nterms(rng_);
    for (int i = 0; i < t; ++i) {
      std::vector<int> key(ctx_.dim(), 0);
      int budget = max_base_degree_;
      std::uniform_int_distribution<int> pick(0, ctx_.dim() - 1);
      std::uniform_int_distribution<int> deg(0, max_base_degree_);
      int total = deg(rng_);
      for (int d = 0; d < total && budget > 0; ++d, --budget)
        key[pick(rng_)] += 1;
      p.add_term(std::move(key), rational());
    }
    return p;
  }

  /// A polynomial in the p variables only.
  BasePoly leaf_poly(int max_terms = 3) {
    BasePoly p(ctx_.dim());
    std::uniform_int_distribution<int> nterms(1, max_terms);
    const int t = nterms(rng_);
    for (int i = 0; i < t; ++i) {
      std::vector<int> key(ctx_.dim(), 0);
      std::uniform_int_distribution<int> pick(ctx_.N, ctx_.dim() - 1);
      std::uniform_int_distribution<int> deg(0, max_base_degree_);
      int total = deg(rng_);
      for (int d = 0; d < total; ++d) key[pick(rng_)] += 1;
      p.add_term(std::move(key), rational());
    }
    return p;
  }

  Term term(bool force_ideal = false) {
    Term t;
    t.base.assign(ctx_.dim(), 0);
    t.xi.assign(ctx_.N, 0);
    t.eta.assign(ctx_.N, 0);
    std::uniform_int_distribution<int> lam(0, K_ / 2);
    t.lambda_pow = lam(rng_);
    std::uniform_int_distribution<int> side(0, 1);
    std::uniform_int_distribution<int> which(0, ctx_.N - 1);
    std::uniform_int_distribution<int> nform(0, 2);
    std::uniform_int_distribution<int> gen(0, ctx_.dim() - 1);
    const int nf = nform(rng_);
    for (int i = 0; i < nf; ++i) t.form |= std::uint32_t{1} << gen(rng_);
    int budget = K_ - 2 * t.lambda_pow - t.form_degree();
    if (budget < 0) { t.form = 0; budget = K_ - 2 * t.lambda_pow; }
    std::uniform_int_distribution<int> fib(0, budget);
    const int fiber = fib(rng_);
    for (int i = 0; i < fiber; ++i) {
      if (side(rng_)) t.xi[which(rng_)] += 1;
      else t.eta[which(rng_)] += 1;
    }
    std::uniform_int_distribution<int> bdeg(0, max_base_degree_);
    std::uniform_int_distribution<int> bvar(0, ctx_.dim() - 1);
    const int bd = bdeg(rng_);
    for (int i = 0; i < bd; ++i) t.base[bvar(rng_)] += 1;
    t.coeff = rational();
    if (force_ideal) {
      bool has_eta = false;
      for (int e : t.eta) has_eta |= e > 0;
      const std::uint32_t x_block = (std::uint32_t{1} << ctx_.N) - 1;
      if (!has_eta && (t.form & x_block) == 0) {
        if (side(rng_) && t.trunc_weight() < K_) t.eta[which(rng_)] += 1;
        else t.form |= std::uint32_t{1} << which(rng_);
      }
    }
    return t;
  }

  WeylForm form(int max_terms = 4, bool force_ideal = false) {
    WeylForm w(ctx_, K_);
    std::uniform_int_distribution<int> nterms(1, max_terms);
    const int t = nterms(rng_);
    for (int i = 0; i < t; ++i) w.push(term(force_ideal));
    w.normalize();
    return w;
  }

  WeylForm form_in_I(int max_terms = 4) { return form(max_terms, true); }

  int index() {
    std::uniform_int_distribution<int> pick(0, ctx_.N - 1);
    return pick(rng_);
  }

private:
  ChartContext ctx_;
  int K_;
  std::mt19937 rng_;
  int max_base_degree_;
};

struct CheckResult {
  std::string name;
  enum class Status { pass, fail, skip } status = Status::pass;
  std::string detail;

  static CheckResult passed(std::string n) { return {std::move(n), Status::pass, ""}; }
  static CheckResult failed(std::string n, std::string d) {
    return {std::move(n), Status::fail, std::move(d)};
  }
  static CheckResult skipped(std::string n, std::string d) {
    return {std::move(n), Status::skip, std::move(d)};
  }
};

namespace detail {

/// Frame-formula covariant derivative of a single fiber generator, computed
/// independently of the quadratic connection element: the generator with
/// coordinate index rho maps to sum_{mu,k} Gamma^mu_{k rho} y_mu dz^k with
/// the first index raised by the inverse Darboux matrix.
inline WeylForm frame_nabla_generator(const ConnectionSpec& spec,
                                      const ChartContext& ctx, int K,
                                      int rho) {
  WeylForm out(ctx, K);
  for (int mu = 0; mu < ctx.dim(); ++mu) {
    const int sgn = mu < ctx.N ? -1 : 1;
    for (int k = 0; k < ctx.dim(); ++k) {
      const BasePoly& g = spec.gamma(ctx.conj(mu), k, rho);
      if (g.is_zero()) continue;
      for (const auto& [key, v] : g.terms()) {
        Term t = out.blank_term();
        t.base = key;
        t.coeff = v * Rational(sgn);
        if (mu < ctx.N) t.xi[mu] += 1; else t.eta[mu - ctx.N] += 1;
        t.form = std::uint32_t{1} << k;
        out.push(std::move(t));
      }
    }
  }
  out.normalize();
  return out;
}

inline WeylForm leaf_generator(const ChartContext& ctx, int K,
                               const LeafSpec& leaf, int j) {
  BasePoly p = BasePoly::variable(ctx.dim(), j) -
               BasePoly::constant(ctx.dim(), leaf.c[j]);
  return WeylForm::from_base(ctx, K, p);
}

/// Poisson bracket sum_i (df/dx^i dg/dp_i - df/dp_i dg/dx^i).
inline BasePoly poisson_bracket(const BasePoly& f, const BasePoly& g) {
  const int n = f.half_dim();
  BasePoly out(f.nvars());
  for (int i = 0; i < n; ++i) {
    out = out + f.partial(i) * g.partial(n + i) -
          f.partial(n + i) * g.partial(i);
  }
  return out;
}

}  // namespace detail

/// Runs the full invariant suite for one configuration. Deterministic for a
/// fixed (config, cases, seed); each result carries a counterexample
/// rendering when it fails.
inline std::vector<CheckResult> run_invariant_checks(const ConfigDocument& cfg,
                                                     int cases = 25,
                                                     unsigned seed = 12345) {
  std::vector<CheckResult> out;
  const ChartContext ctx = cfg.ctx;
  const int K = cfg.trunc_K;

  auto run = [&out](const std::string& name, auto&& body) {
    try {
      std::string counterexample;
      if (body(counterexample)) {
        out.push_back(CheckResult::passed(name));
      } else {
        out.push_back(CheckResult::failed(name, counterexample));
      }
    } catch (const std::exception& e) {
      out.push_back(CheckResult::failed(name, std::string("exception: ") + e.what()));
    }
  };

  // --- connection admissibility gates everything downstream.
  ValidationReport vr = validate_connection(cfg.conn, ctx);
  if (!vr.ok()) {
    out.push_back(CheckResult::failed("connection/validate", vr.str()));
    return out;
  }
  out.push_back(CheckResult::passed("connection/validate"));

  run("koszul/homotopy-identity", [&](std::string& ce) {
    FormSampler s(ctx, K, seed + 1);
    for (int i = 0; i < cases; ++i) {
      WeylForm a = s.form();
      WeylForm lhs = delta(delta_inv(a)) + delta_inv(delta(a)) + tau(a);
      if (lhs != a) { ce = "a = " + a.str(); return false; }
    }
    return true;
  });

  run("koszul/differential-squares-vanish", [&](std::string& ce) {
    FormSampler s(ctx, K, seed + 2);
    for (int i = 0; i < cases; ++i) {
      WeylForm a = s.form();
      if (!delta(delta(a)).is_zero()) { ce = "delta^2 != 0 on " + a.str(); return false; }
      if (!delta_inv(delta_inv(a)).is_zero()) {
        ce = "delta_inv^2 != 0 on " + a.str();
        return false;
      }
    }
    return true;
  });

  run("koszul/bidegree-shifts", [&](std::string& ce) {
    FormSampler s(ctx, K, seed + 3);
    for (int i = 0; i < cases; ++i) {
      WeylForm w(ctx, K);
      w.push(s.term());
      w.normalize();
      if (w.is_zero()) continue;
      const Term& t = w.terms().front();
      const int m = t.fiber_degree();
      const int n = t.form_degree();
      const WeylForm dw = delta(w);
      for (const Term& dt : dw.terms())
        if (dt.fiber_degree() != m - 1 || dt.form_degree() != n + 1) {
          ce = "delta bidegree on " + w.str();
          return false;
        }
      const WeylForm iw = delta_inv(w);
      for (const Term& dt : iw.terms())
        if (dt.fiber_degree() != m + 1 || dt.form_degree() != n - 1) {
          ce = "delta_inv bidegree on " + w.str();
          return false;
        }
    }
    return true;
  });

  run("koszul/h0-is-base", [&](std::string& ce) {
    // Spanning set: every form-degree-0 fiber monomial with fiber degree
    // in 0..K. The homotopy identity collapses to w = tau(w) +
    // delta_inv(delta(w)), and delta is injective off the base.
    std::vector<std::vector<int>> monos;
    std::vector<int> cur(2 * ctx.N, 0);
    std::function<void(int, int)> rec = [&](int pos, int left) {
      if (pos == 2 * ctx.N) { monos.push_back(cur); return; }
      for (int e = 0; e <= left; ++e) {
        cur[pos] = e;
        rec(pos + 1, left - e);
      }
      cur[pos] = 0;
    };
    rec(0, K);
    for (const auto& mono : monos) {
      WeylForm w(ctx, K);
      Term t = w.blank_term();
      for (int i = 0; i < ctx.N; ++i) t.xi[i] = mono[i];
      for (int i = 0; i < ctx.N; ++i) t.eta[i] = mono[ctx.N + i];
      t.coeff = Rational(1);
      w.push(std::move(t));
      w.normalize();
      if (w != tau(w) + delta_inv(delta(w))) {
        ce = "homotopy on monomial " + w.str();
        return false;
      }
      if (w.terms().front().fiber_degree() > 0 && delta(w).is_zero()) {
        ce = "delta vanishes on fiber monomial " + w.str();
        return false;
      }
    }
    return true;
  });

  CovariantDerivative nab(cfg.conn, ctx, K);
  WeylForm gamma = curvature_gamma(cfg.conn, ctx, K);

  run("connection/restricts-to-exterior-derivative", [&](std::string& ce) {
    FormSampler s(ctx, K, seed + 4);
    for (int i = 0; i < cases; ++i) {
      WeylForm a = s.form();
      // Strip fiber factors to land in the form algebra.
      WeylForm b(ctx, K);
      for (Term t : a.terms()) {
        std::fill(t.xi.begin(), t.xi.end(), 0);
        std::fill(t.eta.begin(), t.eta.end(), 0);
        b.push(std::move(t));
      }
      b.normalize();
      if (nab(b) != exterior_derivative(b)) { ce = "a = " + b.str(); return false; }
    }
    return true;
  });

  run("connection/frame-formula-on-generators", [&](std::string& ce) {
    for (int rho = 0; rho < ctx.dim(); ++rho) {
      WeylForm gen = rho < ctx.N ? WeylForm::xi_gen(ctx, K, rho)
                                 : WeylForm::eta_gen(ctx, K, rho - ctx.N);
      WeylForm expect = detail::frame_nabla_generator(cfg.conn, ctx, K, rho);
      if (nab(gen) != expect) {
        ce = "generator " + gen.str() + ": " + nab(gen).str() +
             " != " + expect.str();
        return false;
      }
    }
    return true;
  });

  run("connection/leibniz", [&](std::string& ce) {
    FormSampler s(ctx, K, seed + 5);
    for (int i = 0; i < cases; ++i) {
      WeylForm a = s.form(3);
      WeylForm b = s.form(3);
      WeylForm lhs = nab(circ(a, b));
      WeylForm rhs(ctx, K);
      for (int p = 0; p <= ctx.dim(); ++p) {
        WeylForm ap = a.form_component(p);
        if (ap.is_zero()) continue;
        WeylForm second = circ(ap, nab(b));
        rhs = rhs + circ(nab(ap), b) + (p % 2 == 0 ? second : second.negated());
      }
      if (lhs != rhs) { ce = "a = " + a.str() + "; b = " + b.str(); return false; }
    }
    return true;
  });

  run("connection/curvature-identity", [&](std::string& ce) {
    FormSampler s(ctx, K, seed + 6);
    for (int i = 0; i < cases; ++i) {
      WeylForm a = s.form();
      WeylForm lhs = nab(nab(a));
      WeylForm rhs = commutator_div_lambda(gamma, a);
      if (lhs != rhs) { ce = "a = " + a.str(); return false; }
    }
    return true;
  });

  run("connection/curvature-in-ideal", [&](std::string& ce) {
    if (!in_ideal_I(gamma)) { ce = "Gamma = " + gamma.str(); return false; }
    return true;
  });

  run("connection/curvature-bidegree", [&](std::string& ce) {
    for (const Term& t : gamma.terms())
      if (t.fiber_degree() != 2 || t.form_degree() != 2) {
        ce = "Gamma = " + gamma.str();
        return false;
      }
    return true;
  });

  run("connection/preserves-ideal", [&](std::string& ce) {
    FormSampler s(ctx, K, seed + 7);
    for (int j = 0; j < ctx.N; ++j) {
      if (!in_ideal_I(nab(WeylForm::eta_gen(ctx, K, j)))) { ce = "eta gen"; return false; }
      if (!in_ideal_I(nab(WeylForm::dx_form(ctx, K, j)))) { ce = "dx gen"; return false; }
    }
    for (int i = 0; i < cases; ++i) {
      WeylForm a = s.form_in_I();
      if (!in_ideal_I(nab(a))) { ce = "a = " + a.str(); return false; }
    }
    return true;
  });

  run("connection/vanishing-ideal-to-Ifin", [&](std::string& ce) {
    for (int j = 0; j < ctx.N; ++j) {
      WeylForm g = detail::leaf_generator(ctx, K, cfg.leaf, j);
      if (!is_in_Ifin(nab(g), cfg.leaf)) { ce = "generator " + g.str(); return false; }
    }
    return true;
  });

  run("ideals/left-ideal", [&](std::string& ce) {
    FormSampler s(ctx, K, seed + 8);
    for (int i = 0; i < cases; ++i) {
      WeylForm b = s.form(3);
      const int j = s.index();
      WeylForm gens[] = {WeylForm::eta_gen(ctx, K, j),
                         WeylForm::dx_form(ctx, K, j),
                         detail::leaf_generator(ctx, K, cfg.leaf, j)};
      for (const WeylForm& g : gens) {
        if (!is_in_Ifin(circ(b, g), cfg.leaf)) {
          ce = "b = " + b.str() + "; g = " + g.str();
          return false;
        }
      }
      // The vanishing-ideal part is two-sided.
      if (!is_in_Ifin(circ(gens[2], b), cfg.leaf)) {
        ce = "b = " + b.str() + " (right multiple)";
        return false;
      }
    }
    return true;
  });

  run("ideals/koszul-preserves-I", [&](std::string& ce) {
    FormSampler s(ctx, K, seed + 9);
    for (int i = 0; i < cases; ++i) {
      WeylForm a = s.form_in_I();
      if (!in_ideal_I(delta(a))) { ce = "delta on " + a.str(); return false; }
      if (!in_ideal_I(delta_inv(a))) { ce = "delta_inv on " + a.str(); return false; }
    }
    return true;
  });

  run("ideals/tau-lands-in-vanishing-ideal", [&](std::string& ce) {
    FormSampler s(ctx, K, seed + 10);
    for (int i = 0; i < cases; ++i) {
      WeylForm a = s.form_in_I() +
                   circ(detail::leaf_generator(ctx, K, cfg.leaf, s.index()),
                        s.form(2));
      if (!is_in_Ifin(tau(a), cfg.leaf)) { ce = "a = " + a.str(); return false; }
    }
    return true;
  });

  run("ideals/form-splitting", [&](std::string& ce) {
    const std::uint32_t x_block = (std::uint32_t{1} << ctx.N) - 1;
    for (std::uint32_t mask = 0; mask < (std::uint32_t{1} << ctx.dim()); ++mask) {
      WeylForm w(ctx, K);
      Term t = w.blank_term();
      t.form = mask;
      t.coeff = Rational(1);
      w.push(std::move(t));
      w.normalize();
      const bool in_lambda_ideal = (mask & x_block) != 0;
      if (in_ideal_I(w) != in_lambda_ideal) {
        ce = "mask " + std::to_string(mask);
        return false;
      }
    }
    return true;
  });

  std::optional<FedosovState> solved;
  try {
    solved.emplace(solve_r(cfg.engine_config()));
  } catch (const std::exception& e) {
    out.push_back(CheckResult::failed("fedosov/solve-r",
                                      std::string("exception: ") + e.what()));
    return out;
  }
  FedosovState& state = *solved;

  run("fedosov/r-shape", [&](std::string& ce) {
    if (!in_ideal_I(state.r)) { ce = "r = " + state.r.str(); return false; }
    for (const Term& t : state.r.terms())
      if (t.form_degree() != 1) { ce = "form degree: " + state.r.str(); return false; }
    auto fd = state.r.filtration_degree();
    if (fd && *fd < 2) { ce = "filtration " + std::to_string(*fd); return false; }
    return true;
  });

  run("fedosov/r-fixed-point", [&](std::string& ce) {
    WeylForm residual =
        delta(state.r) - state.gamma - state.nab(state.r) -
        commutator_div_lambda(state.r, state.r).scaled(Rational(1, 2));
    if (!residual.is_zero()) { ce = "residual = " + residual.str(); return false; }
    return true;
  });

  run("fedosov/d-squared-zero", [&](std::string& ce) {
    FormSampler s(ctx, K, seed + 11);
    for (int i = 0; i < cases; ++i) {
      WeylForm a = s.form();
      WeylForm dd = fedosov_D(fedosov_D(a, state), state);
      if (!dd.is_zero()) { ce = "a = " + a.str(); return false; }
    }
    return true;
  });

  run("fedosov/d-preserves-Ifin", [&](std::string& ce) {
    FormSampler s(ctx, K, seed + 12);
    for (int j = 0; j < ctx.N; ++j) {
      WeylForm gens[] = {WeylForm::eta_gen(ctx, K, j),
                         WeylForm::dx_form(ctx, K, j),
                         detail::leaf_generator(ctx, K, cfg.leaf, j)};
      for (const WeylForm& g : gens)
        if (!is_in_Ifin(fedosov_D(g, state), cfg.leaf)) {
          ce = "generator " + g.str();
          return false;
        }
    }
    for (int i = 0; i < cases; ++i) {
      WeylForm b = s.form(2);
      WeylForm g = circ(b, WeylForm::eta_gen(ctx, K, s.index()));
      if (!is_in_Ifin(fedosov_D(g, state), cfg.leaf)) {
        ce = "left multiple " + g.str();
        return false;
      }
    }
    return true;
  });

  run("fedosov/q-preserves-Ifin", [&](std::string& ce) {
    FormSampler s(ctx, K, seed + 13);
    for (int j = 0; j < ctx.N; ++j) {
      WeylForm gens[] = {WeylForm::eta_gen(ctx, K, j),
                         WeylForm::dx_form(ctx, K, j),
                         detail::leaf_generator(ctx, K, cfg.leaf, j)};
      for (const WeylForm& g : gens)
        if (!is_in_Ifin(q_map(g, state), cfg.leaf)) {
          ce = "generator " + g.str();
          return false;
        }
    }
    for (int i = 0; i < cases; ++i) {
      WeylForm b = s.form(2);
      WeylForm g = circ(b, WeylForm::dx_form(ctx, K, s.index()));
      if (!is_in_Ifin(q_map(g, state), cfg.leaf)) {
        ce = "left multiple " + g.str();
        return false;
      }
    }
    return true;
  });

  run("fedosov/q-intertwines", [&](std::string& ce) {
    FormSampler s(ctx, K, seed + 14);
    for (int i = 0; i < cases; ++i) {
      WeylForm a = s.form();
      if (delta(q_map(a, state)) != q_map(fedosov_D(a, state), state)) {
        ce = "a = " + a.str();
        return false;
      }
    }
    return true;
  });

  run("fedosov/q-inverse", [&](std::string& ce) {
    FormSampler s(ctx, K, seed + 15);
    for (int i = 0; i < cases; ++i) {
      WeylForm a = s.form();
      if (q_map(q_inverse(a, state), state) != a) { ce = "a = " + a.str(); return false; }
    }
    return true;
  });

  run("fedosov/lifts-are-flat", [&](std::string& ce) {
    FormSampler s(ctx, K, seed + 16);
    for (int i = 0; i < cases; ++i) {
      BasePoly f = s.poly();
      WeylForm lift = q_inverse(WeylForm::from_base(ctx, K, f), state);
      if (!fedosov_D(lift, state).is_zero()) { ce = "f = " + f.str(); return false; }
    }
    return true;
  });

  const int cap = state.config.star_order();

  run("fedosov/star-unit", [&](std::string& ce) {
    FormSampler s(ctx, K, seed + 17);
    BasePoly one = BasePoly::constant(ctx.dim(), Rational(1));
    for (int i = 0; i < cases; ++i) {
      BasePoly f = s.poly();
      LambdaSeries expect = LambdaSeries::from_poly(f, cap);
      if (star(f, one, state) != expect || star(one, f, state) != expect) {
        ce = "f = " + f.str();
        return false;
      }
    }
    return true;
  });

  run("fedosov/star-classical-limit", [&](std::string& ce) {
    FormSampler s(ctx, K, seed + 18);
    for (int i = 0; i < cases; ++i) {
      BasePoly f = s.poly();
      BasePoly g = s.poly();
      if (star(f, g, state).at(0) != f * g) {
        ce = "f = " + f.str() + "; g = " + g.str();
        return false;
      }
    }
    return true;
  });

  run("fedosov/star-poisson-bracket", [&](std::string& ce) {
    FormSampler s(ctx, K, seed + 19);
    for (int i = 0; i < cases; ++i) {
      BasePoly f = s.poly();
      BasePoly g = s.poly();
      LambdaSeries comm = star(f, g, state) - star(g, f, state);
      if (!comm.at(0).is_zero() ||
          comm.at(1) != detail::poisson_bracket(f, g)) {
        ce = "f = " + f.str() + "; g = " + g.str();
        return false;
      }
    }
    return true;
  });

  run("fedosov/star-associativity", [&](std::string& ce) {
    FormSampler s(ctx, K, seed + 20);
    for (int i = 0; i < cases; ++i) {
      BasePoly f = s.poly(2);
      BasePoly g = s.poly(2);
      BasePoly h = s.poly(2);
      LambdaSeries fs = LambdaSeries::from_poly(f, cap);
      LambdaSeries gs = LambdaSeries::from_poly(g, cap);
      LambdaSeries hs = LambdaSeries::from_poly(h, cap);
      LambdaSeries lhs = star(star(f, g, state), hs, state);
      LambdaSeries rhs = star(fs, star(g, h, state), state);
      if (lhs != rhs) {
        ce = "f = " + f.str() + "; g = " + g.str() + "; h = " + h.str();
        return false;
      }
    }
    return true;
  });

  if (cfg.conn.is_flat()) {
    run("fedosov/star-matches-flat-oracle", [&](std::string& ce) {
      FormSampler s(ctx, K, seed + 21);
      for (int i = 0; i < cases; ++i) {
        BasePoly f = s.poly();
        BasePoly g = s.poly();
        if (star(f, g, state) != flat_star_oracle(f, g, cap, K)) {
          ce = "f = " + f.str() + "; g = " + g.str();
          return false;
        }
      }
      return true;
    });
  } else {
    out.push_back(CheckResult::skipped("fedosov/star-matches-flat-oracle",
                                       "nonflat connection"));
  }

  run("fedosov/module-unit", [&](std::string& ce) {
    FormSampler s(ctx, K, seed + 22);
    BasePoly one = BasePoly::constant(ctx.dim(), Rational(1));
    for (int i = 0; i < cases; ++i) {
      BasePoly psi = s.leaf_poly();
      if (module_action(one, psi, state) != LambdaSeries::from_poly(psi, cap)) {
        ce = "psi = " + psi.str();
        return false;
      }
    }
    return true;
  });

  run("fedosov/module-law", [&](std::string& ce) {
    FormSampler s(ctx, K, seed + 23);
    for (int i = 0; i < cases; ++i) {
      BasePoly f = s.poly(2);
      BasePoly g = s.poly(2);
      BasePoly psi = s.leaf_poly(2);
      LambdaSeries psis = LambdaSeries::from_poly(psi, cap);
      LambdaSeries lhs = module_action(star(f, g, state), psis, state);
      LambdaSeries rhs = module_action(
          LambdaSeries::from_poly(f, cap), module_action(g, psi, state), state);
      if (lhs != rhs) {
        ce = "f = " + f.str() + "; g = " + g.str() + "; psi = " + psi.str();
        return false;
      }
    }
    return true;
  });

  run("fedosov/module-extension-independence", [&](std::string& ce) {
    FormSampler s(ctx, K, seed + 24);
    for (int i = 0; i < cases; ++i) {
      BasePoly f = s.poly(2);
      BasePoly psi = s.leaf_poly(2);
      BasePoly q = s.poly(2);
      const int j = s.index();
      BasePoly shifted =
          psi + (BasePoly::variable(ctx.dim(), j) -
                 BasePoly::constant(ctx.dim(), cfg.leaf.c[j])) * q;
      if (detail::module_action_any(f, psi, state) !=
          detail::module_action_any(f, shifted, state)) {
        ce = "f = " + f.str() + "; psi = " + psi.str() + "; q = " + q.str();
        return false;
      }
    }
    return true;
  });

  if (cfg.conn.is_flat()) {
    run("fedosov/module-canonical-commutation", [&](std::string& ce) {
      FormSampler s(ctx, K, seed + 25);
      for (int i = 0; i < ctx.N; ++i)
        for (int j = 0; j < ctx.N; ++j) {
          BasePoly xi_poly = BasePoly::variable(ctx.dim(), i);
          BasePoly pj_poly = BasePoly::variable(ctx.dim(), ctx.N + j);
          BasePoly psi = s.leaf_poly();
          LambdaSeries psis = LambdaSeries::from_poly(psi, cap);
          LambdaSeries xp = module_action(LambdaSeries::from_poly(xi_poly, cap),
                                          module_action(pj_poly, psi, state),
                                          state);
          LambdaSeries px = module_action(LambdaSeries::from_poly(pj_poly, cap),
                                          module_action(xi_poly, psi, state),
                                          state);
          LambdaSeries comm = xp - px;
          LambdaSeries expect(ctx.dim(), cap);
          if (i == j)
            for (int k = 1; k <= cap; ++k) expect.at(k) = psis.at(k - 1);
          if (comm != expect) {
            ce = "i = " + std::to_string(i + 1) + "; j = " +
                 std::to_string(j + 1) + "; psi = " + psi.str();
            return false;
          }
        }
      return true;
    });
  } else {
    out.push_back(CheckResult::skipped("fedosov/module-canonical-commutation",
                                       "nonflat connection"));
  }

  return out;
}

}  // namespace starweyl
