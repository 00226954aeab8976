// Symplectic tomogram of the oscillator ground state: closed form, spectral
// reconstruction and the w0 * w0 = w0 check.

#include <cstdio>

#include "tomo/symplectic.hpp"

int main() {
  using namespace tomo;
  for (double x : {0.0, 0.5, 1.0, 2.0}) std::printf("w0(%.1f, 1, 0) = %.10f\n", x, ground_state_tomogram({x, 1.0, 0.0}));

  const FockSpace fock(SymplecticDefaults::n_trunc);
  const auto tomo = symplectic_tomogram_spectral(fock.fock_projector(0), fock, uniform_thetas(SymplecticDefaults::n_theta));
  std::printf("\nreconstruction of |0><0| (leading 8x8 block):\n");
  for (const auto& rgrid : reconstruction_ladder()) {
    const auto rec = symplectic_reconstruct(tomo, fock, rgrid);
    std::printf("  r_max %4.1f  eps %.0e  error %.3e\n", rgrid.r_max, rgrid.epsilon,
                (rec - fock.fock_projector(0)).topLeftCorner(8, 8).cwiseAbs().maxCoeff());
  }

  std::printf("\nw0 * w0 against w0:\n");
  for (const auto& r : star_w0_idempotency({{0.0, 0.0, 1.0}, {1.0, 0.5, 1.0}}))
    std::printf("  (%.1f, %.1f, %.1f)  %.10f vs %.10f\n", r.point.X, r.point.mu, r.point.nu, r.star_value, r.target);
}
