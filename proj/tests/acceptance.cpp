// Acceptance suite: one line per criterion, exact rational equality
// throughout (zero tolerance). Exits with the number of failed criteria.

#include <array>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "starweyl/checks.hpp"
#include "starweyl/config.hpp"
#include "starweyl/fedosov.hpp"
#include "starweyl/pbw.hpp"

#include "oracle_support.hpp"

using namespace starweyl;

namespace {

struct Criterion {
  int number;
  std::string name;
  bool pass = true;
  std::string detail;
  double seconds = 0.0;
};

std::vector<Criterion> g_results;

void run_criterion(int number, const std::string& name,
                   const std::function<void(Criterion&)>& body) {
  Criterion c{number, name};
  auto start = std::chrono::steady_clock::now();
  try {
    body(c);
  } catch (const std::exception& e) {
    c.pass = false;
    c.detail = std::string("exception: ") + e.what();
  }
  c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                            start)
                  .count();
  char line[256];
  std::snprintf(line, sizeof(line), "%s criterion %d: %s (%.2f s)%s%s",
                c.pass ? "PASS" : "FAIL", c.number, c.name.c_str(), c.seconds,
                c.detail.empty() ? "" : " -- ", c.detail.c_str());
  std::cout << line << std::endl;
  g_results.push_back(c);
}

void expect(Criterion& c, bool ok, const std::string& what) {
  if (!ok && c.pass) {
    c.pass = false;
    c.detail = what;
  }
}

ConnectionSpec curved_spec_n1() {
  ConnectionSpec spec(1);
  spec.set_symmetric(0, 0, 0, parse_expression("x1*p1", ChartContext(1)));
  return spec;
}

ConnectionSpec curved_spec_n2() {
  ChartContext ctx(2);
  ConnectionSpec spec(2);
  spec.set_symmetric(0, 0, 1, parse_expression("x2", ctx));
  spec.set_symmetric(1, 1, 1, parse_expression("x1*p1", ctx));
  return spec;
}

EngineConfig config_for(const ChartContext& ctx, const ConnectionSpec& spec,
                        int K) {
  std::vector<Rational> c(ctx.N, Rational(2));
  if (ctx.N > 1) c[1] = Rational(-1, 2);
  return EngineConfig(ctx, spec, LeafSpec(c), K);
}

void star_law_suite(Criterion& c, const EngineConfig& cfg, int triples,
                    bool flat, unsigned seed) {
  FedosovState st = solve_r(cfg);
  const int cap = cfg.star_order();
  FormSampler s(cfg.ctx, cfg.trunc_K, seed);
  BasePoly one = BasePoly::constant(cfg.ctx.dim(), Rational(1));
  for (int i = 0; i < triples && c.pass; ++i) {
    BasePoly f = s.poly(2), g = s.poly(2), h = s.poly(2);
    expect(c, star(f, one, st) == LambdaSeries::from_poly(f, cap),
           "unit law (right)");
    expect(c, star(one, f, st) == LambdaSeries::from_poly(f, cap),
           "unit law (left)");
    LambdaSeries fg = star(f, g, st);
    expect(c, fg.at(0) == f * g, "classical limit");
    LambdaSeries comm = fg - star(g, f, st);
    expect(c, comm.at(0).is_zero(), "commutator at order 0");
    expect(c, comm.at(1) == starweyl::detail::poisson_bracket(f, g),
           "Poisson bracket at order 1");
    LambdaSeries lhs = star(fg, LambdaSeries::from_poly(h, cap), st);
    LambdaSeries rhs = star(LambdaSeries::from_poly(f, cap), star(g, h, st), st);
    expect(c, lhs == rhs, "associativity");
    if (flat)
      expect(c, fg == flat_star_oracle(f, g, cap, cfg.trunc_K),
             "flat oracle match");
  }
}

std::string src_path(const std::string& rel) {
  return std::string(STARWEYL_SOURCE_DIR) + "/" + rel;
}

struct CliResult {
  std::string out;
  int exit_code = -1;
};

CliResult run_cli(const std::string& args) {
  CliResult r;
  const std::string cmd =
      std::string(STARWEYL_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0)
    r.out.append(buf.data(), n);
  int status = pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

int main() {
  run_criterion(1, "homotopy identity, N=2, K=6, 200 cases", [](Criterion& c) {
    ChartContext ctx(2);
    FormSampler s(ctx, 6, 1001);
    for (int i = 0; i < 200 && c.pass; ++i) {
      WeylForm a = s.form();
      expect(c, delta(delta_inv(a)) + delta_inv(delta(a)) + tau(a) == a,
             "identity failed on " + a.str());
    }
  });
  if (g_results.back().pass && g_results.back().seconds > 5.0) {
    g_results.back().pass = false;
    std::cout << "FAIL criterion 1: exceeded the 5 s budget" << std::endl;
  }

  run_criterion(2, "PBW oracle equivalence and confluence", [](Criterion& c) {
    for (int n = 1; n <= 2 && c.pass; ++n) {
      ChartContext ctx(n);
      std::vector<std::vector<int>> words;
      std::vector<int> cur;
      std::function<void(int, int)> rec = [&](int maxgen, int left) {
        words.push_back(cur);
        if (left == 0) return;
        for (int g = maxgen; g >= 0; --g) {
          cur.push_back(g);
          rec(g, left - 1);
          cur.pop_back();
        }
      };
      rec(2 * n - 1, 4);
      for (const auto& wa : words) {
        for (const auto& wb : words) {
          if (wa.size() + wb.size() > 4) continue;
          WeylForm a = pbw_oracle(ctx, 6, {{Rational(1), 0, wa}});
          WeylForm b = pbw_oracle(ctx, 6, {{Rational(1), 0, wb}});
          std::vector<int> joined = wa;
          joined.insert(joined.end(), wb.begin(), wb.end());
          expect(c, circ(a, b) == pbw_oracle(ctx, 6, {{Rational(1), 0, joined}}),
                 "product disagrees with the oracle");
          if (!c.pass) return;
        }
      }
    }
    ChartContext ctx(2);
    std::mt19937 seeder(1002);
    std::uniform_int_distribution<int> gen(0, 3), len(0, 7);
    for (int trial = 0; trial < 200 && c.pass; ++trial) {
      std::vector<int> word(len(seeder));
      for (int& g : word) g = gen(seeder);
      std::vector<TensorWord> input{{Rational(1), 0, word}};
      WeylForm leftmost = pbw_oracle(ctx, 6, input);
      std::mt19937 r1(trial), r2(trial + 55555);
      expect(c, pbw_oracle(ctx, 6, input, &r1) == leftmost, "confluence");
      expect(c, pbw_oracle(ctx, 6, input, &r2) == leftmost, "confluence");
    }
  });

  run_criterion(3, "product associativity, N=2, K=6, 200 triples",
                [](Criterion& c) {
    ChartContext ctx(2);
    FormSampler s(ctx, 6, 1003);
    for (int i = 0; i < 200 && c.pass; ++i) {
      WeylForm a = s.form(3), b = s.form(3), d = s.form(3);
      expect(c, circ(circ(a, b), d) == circ(a, circ(b, d)), "associativity");
    }
  });

  run_criterion(4, "curvature identity and ideal membership", [](Criterion& c) {
    for (int which = 0; which < 2 && c.pass; ++which) {
      ChartContext ctx(1);
      ConnectionSpec spec =
          which == 0 ? ConnectionSpec::flat(1) : curved_spec_n1();
      CovariantDerivative nab(spec, ctx, 5);
      WeylForm gamma = curvature_gamma(spec, ctx, 5);
      if (which == 0) expect(c, gamma.is_zero(), "flat curvature nonzero");
      else expect(c, !gamma.is_zero() && in_ideal_I(gamma),
                  "curvature not in the ideal");
      FormSampler s(ctx, 5, 1004 + which);
      for (int i = 0; i < 200 && c.pass; ++i) {
        WeylForm a = s.form();
        expect(c, nab(nab(a)) == commutator_div_lambda(gamma, a),
               "quasi-inner identity");
      }
    }
  });

  run_criterion(5, "flatness of D and the fixed-point residual",
                [](Criterion& c) {
    for (int which = 0; which < 2 && c.pass; ++which) {
      ChartContext ctx(1);
      ConnectionSpec spec =
          which == 0 ? ConnectionSpec::flat(1) : curved_spec_n1();
      FedosovState st = solve_r(config_for(ctx, spec, 5));
      WeylForm residual =
          delta(st.r) - st.gamma - st.nab(st.r) -
          commutator_div_lambda(st.r, st.r).scaled(Rational(1, 2));
      expect(c, residual.is_zero(), "fixed-point residual");
      FormSampler s(ctx, 5, 1005 + which);
      for (int i = 0; i < 200 && c.pass; ++i) {
        WeylForm a = s.form();
        expect(c, fedosov_D(fedosov_D(a, st), st).is_zero(), "D squared");
      }
    }
  });

  run_criterion(6, "ideal coherence of r, delta, nabla, D, Q",
                [](Criterion& c) {
    ChartContext ctx(1);
    EngineConfig cfg = config_for(ctx, curved_spec_n1(), 5);
    FedosovState st = solve_r(cfg);
    expect(c, in_ideal_I(st.r), "r in the ideal");
    const LeafSpec& leaf = cfg.leaf;
    WeylForm eta = WeylForm::eta_gen(ctx, 5, 0);
    WeylForm dx = WeylForm::dx_form(ctx, 5, 0);
    WeylForm phi = WeylForm::from_base(
        ctx, 5,
        BasePoly::variable(2, 0) - BasePoly::constant(2, leaf.c[0]));
    FormSampler s(ctx, 5, 1006);
    for (int i = 0; i < 200 && c.pass; ++i) {
      WeylForm b = s.form(2);
      for (const WeylForm* g : {&eta, &dx}) {
        WeylForm elt = i == 0 ? *g : circ(b, *g);
        expect(c, in_ideal_I(delta(elt)), "delta preserves I");
        expect(c, in_ideal_I(delta_inv(elt)), "delta_inv preserves I");
        expect(c, in_ideal_I(st.nab(elt)), "nabla preserves I");
      }
      for (const WeylForm* g : {&eta, &dx, &phi}) {
        WeylForm elt = i == 0 ? *g : circ(b, *g);
        expect(c, is_in_Ifin(fedosov_D(elt, st), leaf), "D preserves I_fin");
        expect(c, is_in_Ifin(q_map(elt, st), leaf), "Q preserves I_fin");
      }
    }
  });

  run_criterion(7, "star laws, N=1, K=6, 100 triples (flat + curved)",
                [](Criterion& c) {
    ChartContext ctx(1);
    star_law_suite(c, config_for(ctx, ConnectionSpec::flat(1), 6), 100, true,
                   1007);
    if (c.pass)
      star_law_suite(c, config_for(ctx, curved_spec_n1(), 5), 100, false,
                     1017);
  });
  if (g_results.back().pass && g_results.back().seconds > 30.0) {
    g_results.back().pass = false;
    std::cout << "FAIL criterion 7: exceeded the 30 s budget" << std::endl;
  }

  run_criterion(7, "star laws, N=2, K=6, 100 triples (flat + curved)",
                [](Criterion& c) {
    ChartContext ctx(2);
    star_law_suite(c, config_for(ctx, ConnectionSpec::flat(2), 6), 100, true,
                   1027);
    if (c.pass)
      star_law_suite(c, config_for(ctx, curved_spec_n2(), 5), 50, false, 1037);
  });
  if (g_results.back().pass && g_results.back().seconds > 300.0) {
    g_results.back().pass = false;
    std::cout << "FAIL criterion 7 (N=2): exceeded the 5 min budget"
              << std::endl;
  }

  run_criterion(8, "module structure and canonical commutation",
                [](Criterion& c) {
    ChartContext ctx(1);
    for (int which = 0; which < 2 && c.pass; ++which) {
      EngineConfig cfg = which == 0
                             ? config_for(ctx, ConnectionSpec::flat(1), 6)
                             : config_for(ctx, curved_spec_n1(), 5);
      FedosovState st = solve_r(cfg);
      const int cap = cfg.star_order();
      FormSampler s(ctx, cfg.trunc_K, 1008 + which);
      BasePoly one = BasePoly::constant(2, Rational(1));
      BasePoly x = BasePoly::variable(2, 0), p = BasePoly::variable(2, 1);
      for (int i = 0; i < 200 && c.pass; ++i) {
        BasePoly f = s.poly(2), g = s.poly(2), psi = s.leaf_poly(2);
        LambdaSeries psis = LambdaSeries::from_poly(psi, cap);
        expect(c, module_action(one, psi, st) == psis, "unit action");
        expect(c,
               module_action(star(f, g, st), psis, st) ==
                   module_action(LambdaSeries::from_poly(f, cap),
                                 module_action(g, psi, st), st),
               "module law");
        BasePoly q = s.poly(2);
        BasePoly shifted = psi + (x - BasePoly::constant(2, cfg.leaf.c[0])) * q;
        expect(c,
               starweyl::detail::module_action_any(f, psi, st) ==
                   starweyl::detail::module_action_any(f, shifted, st),
               "extension independence");
        if (which == 0) {
          LambdaSeries oracle = flat_star_oracle(f, psi, cap, cfg.trunc_K);
          LambdaSeries fromOracle(2, cap);
          for (int k = 0; k <= cap; ++k)
            fromOracle.at(k) = oracle.at(k).substitute_x(cfg.leaf.c);
          expect(c, module_action(f, psi, st) == fromOracle,
                 "flat action matches the contracted oracle");
          expect(c, module_action(p, psi, st) ==
                        LambdaSeries::from_poly(p * psi, cap),
                 "P is multiplication");
          LambdaSeries ax = module_action(x, psi, st);
          expect(c,
                 ax.at(0) == psi.scaled(cfg.leaf.c[0]) &&
                     ax.at(1) == psi.partial(1),
                 "X is c + lambda d/dp");
          LambdaSeries xp = module_action(LambdaSeries::from_poly(x, cap),
                                          module_action(p, psi, st), st);
          LambdaSeries px = module_action(LambdaSeries::from_poly(p, cap),
                                          module_action(x, psi, st), st);
          LambdaSeries comm = xp - px;
          bool ccr = comm.at(0).is_zero();
          for (int k = 1; k <= cap; ++k) ccr = ccr && comm.at(k) == psis.at(k - 1);
          expect(c, ccr, "canonical commutation relation");
        }
      }
    }
    // N=2: the delta^i_j structure of the commutation relations, including
    // the vanishing cross commutators.
    ChartContext ctx2(2);
    EngineConfig cfg2 = config_for(ctx2, ConnectionSpec::flat(2), 5);
    FedosovState st2 = solve_r(cfg2);
    const int cap2 = cfg2.star_order();
    FormSampler s2(ctx2, 5, 1018);
    for (int rep = 0; rep < 50 && c.pass; ++rep) {
      BasePoly psi = s2.leaf_poly(2);
      LambdaSeries psis = LambdaSeries::from_poly(psi, cap2);
      for (int i = 0; i < 2 && c.pass; ++i)
        for (int j = 0; j < 2 && c.pass; ++j) {
          BasePoly xi_poly = BasePoly::variable(4, i);
          BasePoly pj_poly = BasePoly::variable(4, 2 + j);
          LambdaSeries xp =
              module_action(LambdaSeries::from_poly(xi_poly, cap2),
                            module_action(pj_poly, psi, st2), st2);
          LambdaSeries px =
              module_action(LambdaSeries::from_poly(pj_poly, cap2),
                            module_action(xi_poly, psi, st2), st2);
          LambdaSeries comm = xp - px;
          LambdaSeries want(4, cap2);
          if (i == j)
            for (int k = 1; k <= cap2; ++k) want.at(k) = psis.at(k - 1);
          expect(c, comm == want, "commutation relations at N=2");
        }
    }
  });

  run_criterion(9, "CLI golden reports and exit codes", [](Criterion& c) {
    struct Golden {
      std::string args;
      std::string file;
    };
    const Golden goldens[] = {
        {"star x1 p1 --config " + src_path("configs/flat_n1.json"),
         "tests/golden/star_x1_p1.txt"},
        {"validate --config " + src_path("configs/flat_n1.json"),
         "tests/golden/validate_flat.txt"},
        {"module-action x1 p1 --config " + src_path("configs/flat_n1.json"),
         "tests/golden/module_action_x1_p1.txt"},
    };
    for (const Golden& g : goldens) {
      CliResult r = run_cli(g.args);
      expect(c, r.exit_code == 0, "golden run exited nonzero: " + g.args);
      expect(c, r.out == read_file(src_path(g.file)),
             "report differs from " + g.file);
    }
    for (const std::string cfg :
         {"configs/flat_n1.json", "configs/curved_n1.json",
          "configs/flat_n2.json", "configs/curved_n2.json"}) {
      CliResult r = run_cli("check --config " + src_path(cfg));
      expect(c, r.exit_code == 0, "check failed on " + cfg);
    }
    CliResult bad = run_cli("check --config " +
                            src_path("tests/data/corrupt_connection.json"));
    expect(c, bad.exit_code == 2, "corrupted spec did not exit 2");
  });

  int failed = 0;
  for (const Criterion& c : g_results) failed += c.pass ? 0 : 1;
  std::cout << "acceptance: " << (g_results.size() - failed) << "/"
            << g_results.size() << " criteria passed" << std::endl;
  return failed;
}
