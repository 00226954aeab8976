#pragma once

// Invariant suite behind `tomo verify`. Each property reports its measured
// residual next to the tolerance it is held to.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "tomo/operator.hpp"
#include "tomo/scheme.hpp"
#include "tomo/specfun.hpp"
#include "tomo/spin.hpp"
#include "tomo/symplectic.hpp"

namespace tomo::verify {

struct PropertyResult {
  std::string name;
  double residual = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

struct Options {
  std::uint64_t seed = 20240601;
  KernelOrder order = kDefaultKernelOrder;
  int threads = 1;
  bool include_symplectic = true;
};

/// Pauli matrices in the order of the underlying basis vectors.
inline OperatorMatrix pauli_x() {
  OperatorMatrix m = OperatorMatrix::Zero(2, 2);
  m(0, 1) = m(1, 0) = 1.0;
  return m;
}
inline OperatorMatrix pauli_y() {
  OperatorMatrix m = OperatorMatrix::Zero(2, 2);
  m(0, 1) = complex(0.0, -1.0);
  m(1, 0) = complex(0.0, 1.0);
  return m;
}
inline OperatorMatrix pauli_z() {
  OperatorMatrix m = OperatorMatrix::Zero(2, 2);
  m(0, 0) = 1.0;
  m(1, 1) = -1.0;
  return m;
}

/// A spin scheme with its kernel, built once per j.
struct SpinFixture {
  AngularGrid grid;
  Scheme scheme;
  KernelTensor kernel;

  SpinFixture(HalfInteger j, KernelOrder order, int threads)
      : grid(AngularGrid::with_defaults(j)),
        scheme(spin_scheme(grid, threads)),
        kernel(spin_star_kernel(scheme, threads, order)) {}

  Symbol sym(const OperatorMatrix& a) const { return symbol_of(a, scheme); }
  Symbol star(const Symbol& f, const Symbol& g) const { return tomo::star(f, g, kernel, scheme); }
  Symbol bracket(const Symbol& f, const Symbol& g) const { return star_bracket(f, g, kernel, scheme); }
};

inline std::vector<PropertyResult> run_property_suite(const Options& opt = {}) {
  std::vector<PropertyResult> out;
  auto record = [&](std::string name, double residual, double tol) {
    out.push_back({std::move(name), residual, tol, std::isfinite(residual) && residual <= tol});
  };
  std::uint64_t seed = opt.seed;
  auto next_seed = [&] { return seed++; };

  // operator-core
  {
    double worst = 0.0;
    for (int dim = 1; dim <= 6; ++dim) {
      const auto a = random_hermitian(dim, next_seed());
      const auto b = random_hermitian(dim, next_seed());
      worst = std::max(worst, std::abs(trace(commutator(a, b))));
    }
    record("operator.trace_of_commutator", worst, 1e-10);
  }
  {
    double worst = 0.0;
    for (int dim : {2, 5, 16}) {
      OperatorMatrix a = random_hermitian(dim, next_seed()) + complex(0.0, 1.0) * random_hermitian(dim, next_seed());
      a *= 10.0 / a.norm();
      const OperatorMatrix e = matrix_exponential(a) * matrix_exponential(-a);
      worst = std::max(worst, max_abs_diff(e, OperatorMatrix::Identity(dim, dim)));
    }
    record("operator.exp_inverse", worst, 1e-10);
  }

  // specfun
  {
    double unitarity = 0.0;
    double composition = 0.0;
    for (int tj = 0; tj <= 20; ++tj) {
      const auto j = HalfInteger::from_twice(tj);
      for (double beta : {0.3, 1.1, 2.7}) {
        const auto d = wigner_small_d_matrix(j, beta);
        unitarity = std::max(unitarity, (d * d.transpose() - Eigen::MatrixXd::Identity(tj + 1, tj + 1)).cwiseAbs().maxCoeff());
      }
      const Eigen::MatrixXd lhs = wigner_small_d_matrix(j, 0.4) * wigner_small_d_matrix(j, 1.3);
      composition = std::max(composition, (lhs - wigner_small_d_matrix(j, 1.7)).cwiseAbs().maxCoeff());
    }
    record("specfun.d_matrix_orthogonality", unitarity, 1e-12);
    record("specfun.d_matrix_composition", composition, 1e-11);
  }
  {
    const auto one = HalfInteger::from_int(1);
    double worst = 0.0;
    for (int j3 = 0; j3 <= 2; ++j3) {
      const auto j3h = HalfInteger::from_int(j3);
      for (const auto m3 : projections(j3h)) {
        double sum = 0.0;
        for (const auto m1 : projections(one))
          for (const auto m2 : projections(one)) sum += (2 * j3 + 1) * std::pow(wigner_3j(one, one, j3h, m1, m2, m3), 2);
        worst = std::max(worst, std::abs(sum - 1.0));
      }
    }
    record("specfun.3j_orthogonality", worst, 1e-12);
  }

  // spin scheme
  {
    double worst = 0.0;
    for (int tj : {1, 2, 3, 4, 5}) {
      const auto j = HalfInteger::from_twice(tj);
      worst = std::max(worst, round_trip_error(spin_scheme(AngularGrid::with_defaults(j), opt.threads), test_operator_family(tj + 1)));
    }
    record("spin.round_trip", worst, 1e-10);
  }
  {
    const auto j = HalfInteger::from_twice(3);
    const auto grid = AngularGrid::with_defaults(j);
    double negativity = 0.0;
    double normalization = 0.0;
    double gamma_shift = 0.0;
    for (int k = 0; k < 5; ++k) {
      const auto rho = random_density_matrix(4, next_seed());
      const auto w = spin_tomogram(rho, grid);
      const auto w_gamma = spin_tomogram(rho, grid, 1.234);
      for (int ia = 0; ia < grid.n_alpha(); ++ia)
        for (int ib = 0; ib < grid.n_beta(); ++ib) {
          complex sum{};
          for (int m = 0; m < 4; ++m) {
            negativity = std::max(negativity, -w.value(m, ia, ib).real());
            sum += w.value(m, ia, ib);
            gamma_shift = std::max(gamma_shift, std::abs(w.value(m, ia, ib) - w_gamma.value(m, ia, ib)));
          }
          normalization = std::max(normalization, std::abs(sum - 1.0));
        }
    }
    record("spin.tomogram_nonnegative", negativity, 1e-10);
    record("spin.tomogram_normalized", normalization, 1e-10);
    record("spin.tomogram_gamma_independent", gamma_shift, 1e-12);
  }

  // star product, bracket, evolution
  const SpinFixture half(HalfInteger::from_twice(1), opt.order, opt.threads);
  {
    double worst = 0.0;
    for (int tj : {1, 2}) {
      const SpinFixture fx(HalfInteger::from_twice(tj), opt.order, opt.threads);
      for (int k = 0; k < 5; ++k) {
        const auto a = random_hermitian(tj + 1, next_seed());
        const auto b = random_hermitian(tj + 1, next_seed());
        worst = std::max(worst, fx.star(fx.sym(a), fx.sym(b)).distance(fx.sym(a * b)));
      }
    }
    record("star.matches_operator_product", worst, 1e-10);
  }
  {
    double assoc = 0.0;
    double oracle = 0.0;
    double antisym = 0.0;
    double jacobi = 0.0;
    double leibniz = 0.0;
    for (int k = 0; k < 5; ++k) {
      const auto a = random_hermitian(2, next_seed());
      const auto b = random_hermitian(2, next_seed());
      const auto c = random_hermitian(2, next_seed());
      const auto f = half.sym(a);
      const auto g = half.sym(b);
      const auto h = half.sym(c);
      assoc = std::max(assoc, half.star(half.star(f, g), h).distance(half.star(f, half.star(g, h))));
      oracle = std::max(oracle, half.bracket(f, g).distance(half.sym(commutator(a, b))));
      antisym = std::max(antisym, (half.bracket(f, g) + half.bracket(g, f)).sup_norm());
      jacobi = std::max(jacobi, (half.bracket(f, half.bracket(g, h)) + half.bracket(g, half.bracket(h, f)) +
                                 half.bracket(h, half.bracket(f, g)))
                                    .sup_norm());
      leibniz = std::max(leibniz, half.bracket(f, half.star(g, h))
                                      .distance(half.star(half.bracket(f, g), h) + half.star(g, half.bracket(f, h))));
    }
    record("star.associativity", assoc, 1e-9);
    record("bracket.matches_commutator", oracle, 1e-10);
    record("bracket.antisymmetry", antisym, 0.0);
    record("bracket.jacobi_identity", jacobi, 1e-9);
    record("bracket.leibniz_rule", leibniz, 1e-9);
  }
  {
    const double t = std::numbers::pi / 4.0;
    const OperatorMatrix h = pauli_z();
    const OperatorMatrix a = pauli_x();
    const OperatorMatrix u = matrix_exponential(complex(0.0, t) * h);
    const auto exact = half.sym(u * a * u.adjoint());
    const auto evolved = heisenberg_evolve(half.sym(a), half.sym(h), t, 200, half.kernel, half.scheme);
    record("evolution.heisenberg", evolved.distance(exact), 1e-6);
  }
  {
    double worst = 0.0;
    for (int tj : {1, 2}) {
      const auto spin = spin_scheme(AngularGrid::with_defaults(HalfInteger::from_twice(tj)), opt.threads);
      const auto elems = matrix_element_scheme(tj + 1);
      const auto forward = intertwine_kernel(spin, elems);
      const auto back = intertwine_kernel(elems, spin);
      for (const auto& a : test_operator_family(tj + 1)) {
        const auto f = symbol_of(a, spin);
        worst = std::max(worst, convert_symbol(convert_symbol(f, forward), back).distance(f));
        worst = std::max(worst, convert_symbol(f, forward).distance(symbol_of(a, elems)));
      }
    }
    record("intertwine.round_trip", worst, 1e-10);
  }

  if (opt.include_symplectic) {
    record("symplectic.ground_state_value",
           std::abs(ground_state_tomogram({0.0, 1.0, 0.0}) - 1.0 / std::sqrt(std::numbers::pi)), 1e-12);
    const FockSpace fock(SymplecticDefaults::n_trunc);
    {
      double worst = 0.0;
      for (auto [mu, nu] : {std::pair{1.0, 1.0}, std::pair{-1.5, 2.0}, std::pair{0.3, -0.2}}) {
        const OperatorMatrix lhs = weyl_operator(fock, mu, nu);
        const OperatorMatrix rhs = weyl_operator_laguerre(fock.n_trunc(), mu, nu);
        const int half_block = fock.n_trunc() / 2;
        worst = std::max(worst, (lhs - rhs).topLeftCorner(half_block, half_block).cwiseAbs().maxCoeff());
      }
      record("symplectic.displacement_two_paths", worst, 1e-8);
    }
    {
      const RGrid rgrid{SymplecticDefaults::r_max, SymplecticDefaults::n_r, SymplecticDefaults::epsilon};
      const auto thetas = uniform_thetas(SymplecticDefaults::n_theta);
      double worst = 0.0;
      for (int n : {0, 1}) {
        const auto a = fock.fock_projector(n);
        const auto rec = symplectic_reconstruct(symplectic_tomogram_spectral(a, fock, thetas), fock, rgrid);
        worst = std::max(worst, (rec - a).topLeftCorner(8, 8).cwiseAbs().maxCoeff());
      }
      record("symplectic.fock_round_trip", worst, 1e-3);
    }
    {
      double worst = 0.0;
      for (const auto& r : star_w0_idempotency({{0.0, 0.0, 1.0}, {1.0, 0.0, 1.0}})) worst = std::max(worst, r.residual);
      record("symplectic.w0_idempotency", worst, 1e-3);
    }
  }
  return out;
}

inline bool all_passed(const std::vector<PropertyResult>& results) {
  return std::all_of(results.begin(), results.end(), [](const PropertyResult& r) { return r.passed; });
}

}  // namespace tomo::verify
