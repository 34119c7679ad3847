#pragma once

#include <stdexcept>
#include <vector>

#include "starweyl/rational.hpp"
#include "starweyl/weyl.hpp"

namespace starweyl {

/// The leaf {x^1 = c^1, ..., x^N = c^N} of the vertical polarization; its
/// vanishing ideal is generated by the differences x^i - c^i.
struct LeafSpec {
  std::vector<Rational> c;

  explicit LeafSpec(std::vector<Rational> values) : c(std::move(values)) {}

  int half_dim() const { return static_cast<int>(c.size()); }
};

/// Membership in the polarization ideal I. On PBW normal forms the ideal is
/// monomial: a term belongs to it exactly when it carries an eta factor
/// (which in normal form sits rightmost, so the term is a left multiple of
/// an L generator) or a dx form factor. An element is in I iff every term is.
inline bool in_ideal_I(const WeylForm& a) {
  const int n = a.context().N;
  const std::uint32_t x_block = (std::uint32_t{1} << n) - 1;
  for (const Term& t : a.terms()) {
    bool has_eta = false;
    for (int e : t.eta)
      if (e > 0) { has_eta = true; break; }
    if (!has_eta && (t.form & x_block) == 0) return false;
  }
  return true;
}

/// Canonical representative of a + I_fin: drops every term carrying an eta
/// or dx factor and evaluates the x-block of the base at the leaf constants.
/// Linear and idempotent; a - reduce(a) always lies in I_fin.
inline WeylForm reduce_mod_Ifin(const WeylForm& a, const LeafSpec& leaf) {
  const ChartContext& ctx = a.context();
  if (leaf.half_dim() != ctx.N)
    throw std::invalid_argument("reduce_mod_Ifin: leaf dimension mismatch");
  const std::uint32_t x_block = (std::uint32_t{1} << ctx.N) - 1;
  WeylForm r(ctx, a.trunc_K());
  for (const Term& t : a.terms()) {
    bool drop = (t.form & x_block) != 0;
    for (int e : t.eta)
      if (e > 0) { drop = true; break; }
    if (drop) continue;
    Term nt = t;
    for (int i = 0; i < ctx.N; ++i) {
      if (nt.base[i] > 0) nt.coeff *= leaf.c[i].pow_int(nt.base[i]);
      nt.base[i] = 0;
    }
    r.push(std::move(nt));
  }
  r.normalize();
  return r;
}

/// Reduce-to-zero membership test for I_fin.
inline bool is_in_Ifin(const WeylForm& a, const LeafSpec& leaf) {
  return reduce_mod_Ifin(a, leaf).is_zero();
}

}  // namespace starweyl
