#pragma once

#include <stdexcept>

namespace starweyl {

/// A Darboux chart on R^{2N}. Coordinates carry a single 0-based index
/// mu in [0, 2N): mu < N is x^{mu+1}, mu >= N is p_{mu-N+1}. The symplectic
/// form is the constant block matrix [[0, I], [-I, 0]], i.e.
/// omega(d/dx^i, d/dp_i) = +1.
///
/// Fiber generators of the Weyl algebra follow the same coordinate index:
/// the symbol of d/dx^i is written xi^i, the symbol of d/dp_i is eta_i.
/// For normal ordering the generators carry a separate *frame* index
/// f in [0, 2N): f < N is eta_{f+1} (the polarization block L), f >= N is
/// xi^{f-N+1} (the transversal block L'). Normal form means nonincreasing
/// frame indices, so xi factors stand left of eta factors.
struct ChartContext {
  int N = 1;

  ChartContext() = default;
  explicit ChartContext(int n) : N(n) {
    if (n < 1 || n > 8)
      throw std::invalid_argument("ChartContext: N must be in 1..8");
  }

  int dim() const { return 2 * N; }

  /// The paired coordinate: x^i <-> p_i.
  int conj(int mu) const { return mu < N ? mu + N : mu - N; }

  /// omega(d/dz^mu, d/dz^nu) with coordinate indices.
  int omega(int mu, int nu) const {
    if (mu < N && nu == mu + N) return 1;
    if (mu >= N && nu == mu - N) return -1;
    return 0;
  }

  /// The inverse matrix: omega_inv(mu, sigma) * omega(sigma, nu) = delta.
  int omega_inv(int mu, int nu) const {
    if (mu < N && nu == mu + N) return -1;
    if (mu >= N && nu == mu - N) return 1;
    return 0;
  }

  /// Coordinate index of the frame vector with frame index f.
  int frame_to_coord(int f) const { return conj(f); }

  /// Frame index of the fiber symbol of d/dz^mu.
  int coord_to_frame(int mu) const { return conj(mu); }

  /// omega evaluated on two frame vectors.
  int frame_omega(int f, int g) const {
    return omega(frame_to_coord(f), frame_to_coord(g));
  }

  bool operator==(const ChartContext& o) const { return N == o.N; }
  bool operator!=(const ChartContext& o) const { return N != o.N; }
};

}  // namespace starweyl
