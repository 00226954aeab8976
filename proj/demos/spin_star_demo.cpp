// Star product of spin-1 tomographic symbols, compared with the symbol of
// the operator product.

#include <cstdio>

#include "tomo/spin.hpp"

int main() {
  using namespace tomo;
  const auto j = HalfInteger::from_int(1);
  const auto grid = AngularGrid::with_defaults(j);
  const auto build = build_spin_scheme(grid);
  const Scheme& s = build.scheme;
  std::printf("spin %s: %zu points, quantizer calibration %+.1f\n", j.str().c_str(), s.size(), build.calibration.real());

  const auto kernel = spin_star_kernel(s).to_sparse();
  std::printf("kernel: %zu of %zu entries above 1e-14\n", kernel.stored(), s.size() * s.size() * s.size());

  const auto a = random_hermitian(3, 1);
  const auto b = random_hermitian(3, 2);
  const auto fa = symbol_of(a, s);
  const auto fb = symbol_of(b, s);
  const auto product = star(fa, fb, kernel, s);
  std::printf("|fa * fb - symbol(AB)|    = %.3e\n", product.distance(symbol_of(a * b, s)));
  std::printf("|{fa, fb} - symbol([A,B])| = %.3e\n",
              star_bracket(fa, fb, kernel, s).distance(symbol_of(commutator(a, b), s)));
  std::printf("|operator_of(fa) - A|     = %.3e\n", max_abs_diff(operator_of(fa, s), a));
}
