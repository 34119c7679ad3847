#pragma once

#include <random>
#include <stdexcept>
#include <vector>

#include "starweyl/weyl.hpp"

namespace starweyl {

/// A weighted tensor word in the 2N fiber frame generators. Frame indices:
/// f < N is eta_{f+1}, f >= N is xi^{f-N+1}.
struct TensorWord {
  Rational coeff;
  int lambda_pow = 0;
  std::vector<int> gens;
};

namespace detail {

inline bool word_is_normal(const std::vector<int>& w) {
  for (std::size_t i = 0; i + 1 < w.size(); ++i)
    if (w[i] < w[i + 1]) return false;
  return true;
}

}  // namespace detail

/// Brute-force normal-form oracle. Repeatedly replaces an adjacent
/// out-of-order pair y (x) z (frame index of y below that of z) by
/// z (x) y + lambda omega(y, z) until every word is nonincreasing. The
/// rewrite position is the leftmost reducible pair by default, or chosen
/// uniformly at random when an RNG is supplied; the normal form is the same
/// either way (confluence), which the tests exercise.
inline WeylForm pbw_oracle(ChartContext ctx, int trunc_K,
                           std::vector<TensorWord> words,
                           std::mt19937* rng = nullptr) {
  std::vector<TensorWord> done;
  while (!words.empty()) {
    TensorWord w = std::move(words.back());
    words.pop_back();
    if (w.coeff.is_zero()) continue;
    for (int g : w.gens)
      if (g < 0 || g >= ctx.dim())
        throw std::out_of_range("pbw_oracle: generator index out of range");
    std::vector<std::size_t> reducible;
    for (std::size_t i = 0; i + 1 < w.gens.size(); ++i)
      if (w.gens[i] < w.gens[i + 1]) reducible.push_back(i);
    if (reducible.empty()) {
      done.push_back(std::move(w));
      continue;
    }
    std::size_t pos = reducible.front();
    if (rng != nullptr) {
      std::uniform_int_distribution<std::size_t> pick(0, reducible.size() - 1);
      pos = reducible[pick(*rng)];
    }
    const int y = w.gens[pos];
    const int z = w.gens[pos + 1];
    TensorWord swapped = w;
    swapped.gens[pos] = z;
    swapped.gens[pos + 1] = y;
    words.push_back(std::move(swapped));
    const int om = ctx.frame_omega(y, z);
    if (om != 0) {
      TensorWord contracted;
      contracted.coeff = w.coeff * Rational(om);
      contracted.lambda_pow = w.lambda_pow + 1;
      contracted.gens = w.gens;
      contracted.gens.erase(contracted.gens.begin() + pos,
                            contracted.gens.begin() + pos + 2);
      words.push_back(std::move(contracted));
    }
  }

  WeylForm out(ctx, trunc_K);
  for (const TensorWord& w : done) {
    Term t = out.blank_term();
    t.coeff = w.coeff;
    t.lambda_pow = w.lambda_pow;
    for (int g : w.gens) {
      if (g < ctx.N) t.eta[g] += 1;
      else t.xi[g - ctx.N] += 1;
    }
    out.push(std::move(t));
  }
  out.normalize();
  return out;
}

/// The normal tensor word of a fiber monomial: xi factors first (descending
/// frame index), then eta factors; nonincreasing throughout.
inline std::vector<int> normal_word_of(const ChartContext& ctx,
                                       const std::vector<int>& xi,
                                       const std::vector<int>& eta) {
  std::vector<int> w;
  for (int i = ctx.N - 1; i >= 0; --i)
    for (int k = 0; k < xi[i]; ++k) w.push_back(ctx.N + i);
  for (int i = ctx.N - 1; i >= 0; --i)
    for (int k = 0; k < eta[i]; ++k) w.push_back(i);
  return w;
}

}  // namespace starweyl
