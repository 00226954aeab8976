#pragma once

// Spin-j tomography: tomograms as diagonal elements of U A U^dagger for the
// rotation U(alpha, beta), exact reconstruction through 3j symbols, and the
// spin scheme / star-product kernel built from them.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <vector>

#include "tomo/error.hpp"
#include "tomo/operator.hpp"
#include "tomo/scheme.hpp"
#include "tomo/specfun.hpp"

namespace tomo {

/// Thrown when an angular grid cannot integrate the reconstruction exactly.
class GridTooCoarse : public DomainError {
 public:
  GridTooCoarse(HalfInteger j, int required_n_alpha, int required_n_beta)
      : DomainError("angular grid too coarse for j=" + j.str() + ": need n_alpha >= " +
                    std::to_string(required_n_alpha) + " and n_beta >= " + std::to_string(required_n_beta)),
        required_n_alpha_(required_n_alpha),
        required_n_beta_(required_n_beta) {}

  int required_n_alpha() const { return required_n_alpha_; }
  int required_n_beta() const { return required_n_beta_; }

 private:
  int required_n_alpha_;
  int required_n_beta_;
};

/// Uniform alpha nodes on [0, 2pi) times Gauss-Legendre nodes in cos(beta).
/// The gamma integral is done analytically. Measure weights sum to 1.
class AngularGrid {
 public:
  AngularGrid(HalfInteger j, int n_alpha, int n_beta) : j_(j), n_alpha_(n_alpha), n_beta_(n_beta) {
    if (j.twice() < 0) throw DomainError("AngularGrid: negative spin");
    if (n_alpha < min_n_alpha(j) || n_beta < min_n_beta(j)) throw GridTooCoarse(j, min_n_alpha(j), min_n_beta(j));
    const QuadratureRule gl = gauss_legendre(n_beta);
    // Descending cos(beta) gives ascending beta.
    for (int k = n_beta - 1; k >= 0; --k) {
      beta_.push_back(std::acos(gl.nodes[static_cast<std::size_t>(k)]));
      beta_weight_.push_back(gl.weights[static_cast<std::size_t>(k)]);
    }
  }

  static int min_n_alpha(HalfInteger j) { return 2 * j.twice() + 1; }
  static int min_n_beta(HalfInteger j) { return j.twice() + 1; }
  static AngularGrid with_defaults(HalfInteger j) { return {j, 2 * j.twice() + 2, j.twice() + 2}; }

  HalfInteger j() const { return j_; }
  int n_alpha() const { return n_alpha_; }
  int n_beta() const { return n_beta_; }
  std::size_t angle_count() const { return static_cast<std::size_t>(n_alpha_ * n_beta_); }

  double alpha(int ia) const { return 2.0 * std::numbers::pi * ia / n_alpha_; }
  double beta(int ib) const { return beta_[static_cast<std::size_t>(ib)]; }
  /// (2pi / n_alpha) * w_GL * 2pi / (8 pi^2).
  double measure(int ib) const { return beta_weight_[static_cast<std::size_t>(ib)] / (2.0 * n_alpha_); }

 private:
  HalfInteger j_;
  int n_alpha_;
  int n_beta_;
  std::vector<double> beta_;
  std::vector<double> beta_weight_;
};

/// Values w(m1, alpha, beta), index ((k * n_alpha) + ia) * n_beta + ib with
/// k the ascending index of m1.
class SpinTomogram {
 public:
  SpinTomogram(AngularGrid grid, std::vector<complex> values) : grid_(std::move(grid)), values_(std::move(values)) {
    if (values_.size() != point_count()) throw DimensionError("SpinTomogram: wrong number of values");
  }

  const AngularGrid& grid() const { return grid_; }
  HalfInteger j() const { return grid_.j(); }
  int dim() const { return grid_.j().twice() + 1; }
  std::size_t point_count() const { return static_cast<std::size_t>(dim()) * grid_.angle_count(); }

  std::size_t index(int k, int ia, int ib) const {
    return (static_cast<std::size_t>(k) * static_cast<std::size_t>(grid_.n_alpha()) + static_cast<std::size_t>(ia)) *
               static_cast<std::size_t>(grid_.n_beta()) +
           static_cast<std::size_t>(ib);
  }
  complex value(int k, int ia, int ib) const { return values_[index(k, ia, ib)]; }
  const std::vector<complex>& values() const { return values_; }

  /// Largest imaginary part; tomograms of Hermitian operators are real.
  double max_imag() const {
    double worst = 0.0;
    for (const auto& v : values_) worst = std::max(worst, std::abs(v.imag()));
    return worst;
  }

 private:
  AngularGrid grid_;
  std::vector<complex> values_;
};

inline void require_spin_dim(const OperatorMatrix& a, HalfInteger j, const char* what) {
  require_square(a, what);
  if (a.rows() != j.twice() + 1) {
    throw DimensionError(std::string(what) + ": operator of dimension " + std::to_string(a.rows()) +
                         " does not act on spin " + j.str());
  }
}

/// Diagonal of U A U^dagger for U = D^j(alpha, beta, gamma), ascending in m1.
inline Eigen::VectorXcd rotated_diagonal(const OperatorMatrix& a, HalfInteger j, double alpha, double beta,
                                         double gamma = 0.0) {
  require_spin_dim(a, j, "rotated_diagonal");
  const Eigen::MatrixXcd u = wigner_D_matrix(j, alpha, beta, gamma);
  return (u * a * u.adjoint()).diagonal();
}

inline SpinTomogram spin_tomogram(const OperatorMatrix& a, const AngularGrid& grid, double gamma = 0.0) {
  const HalfInteger j = grid.j();
  require_spin_dim(a, j, "spin_tomogram");
  const int dim = j.twice() + 1;
  std::vector<complex> values(static_cast<std::size_t>(dim) * grid.angle_count());
  SpinTomogram layout(grid, values);
  for (int ia = 0; ia < grid.n_alpha(); ++ia) {
    for (int ib = 0; ib < grid.n_beta(); ++ib) {
      const Eigen::VectorXcd diag = rotated_diagonal(a, j, grid.alpha(ia), grid.beta(ib), gamma);
      for (int k = 0; k < dim; ++k) values[layout.index(k, ia, ib)] = diag(k);
    }
  }
  return {grid, std::move(values)};
}

inline void require_coupled_spin(HalfInteger j, HalfInteger j3, const char* what) {
  if (j.twice() < 0) throw DomainError(std::string(what) + ": negative spin");
  if (!j3.is_integer() || j3.twice() < 0 || j3.as_int() > j.twice()) {
    throw DomainError(std::string(what) + ": j3 must be an integer in [0, 2j], got " + j3.str());
  }
}

/// Phi^{(j3)}_{j m1' m2'}(alpha, beta) = (-1)^{m2'} D^{j3}_{0 m3} (j j j3; m1' -m2' m3),
/// where only m3 = m2' - m1' survives the 3j selection rule.
inline complex phi_on_sphere(HalfInteger j, HalfInteger j3, HalfInteger m1p, HalfInteger m2p, double alpha,
                             double beta) {
  require_coupled_spin(j, j3, "phi_on_sphere");
  check_projection(j, m1p, "phi_on_sphere");
  check_projection(j, m2p, "phi_on_sphere");
  const HalfInteger m3 = m2p - m1p;
  if (abs(m3) > j3) return {0.0, 0.0};
  const HalfInteger zero{};
  return parity_phase(m2p) * wigner_D(j3, zero, m3, alpha, beta, 0.0) * wigner_3j(j, j, j3, m1p, -m2p, m3);
}

/// A_j^{(j3)}(alpha, beta) = (2 j3 + 1)^2 sum |j m1'> Phi <j m2'|.
inline OperatorMatrix sphere_operator(HalfInteger j, HalfInteger j3, double alpha, double beta) {
  require_coupled_spin(j, j3, "sphere_operator");
  const auto ms = projections(j);
  const auto n = static_cast<Eigen::Index>(ms.size());
  const double scale = std::pow(2.0 * j3.as_int() + 1.0, 2);
  OperatorMatrix out(n, n);
  for (Eigen::Index r = 0; r < n; ++r)
    for (Eigen::Index c = 0; c < n; ++c)
      out(r, c) = scale * phi_on_sphere(j, j3, ms[static_cast<std::size_t>(r)], ms[static_cast<std::size_t>(c)], alpha, beta);
  return out;
}

/// B_{m1}(alpha, beta) = (-1)^{m1} sum_{j3=0}^{2j} (j j j3; m1 -m1 0) A_j^{(j3)}(alpha, beta).
inline OperatorMatrix b_operator(HalfInteger j, HalfInteger m1, double alpha, double beta) {
  check_projection(j, m1, "b_operator");
  const int dim = j.twice() + 1;
  OperatorMatrix out = OperatorMatrix::Zero(dim, dim);
  for (int j3 = 0; j3 <= j.twice(); ++j3) {
    const HalfInteger j3h = HalfInteger::from_int(j3);
    const double coupling = wigner_3j(j, j, j3h, m1, -m1, HalfInteger{});
    if (coupling == 0.0) continue;
    out += coupling * sphere_operator(j, j3h, alpha, beta);
  }
  return parity_phase(m1) * out;
}

namespace detail {

// Angle-independent 3j tables behind b_operator, so that building a scheme
// costs one small-d row per (beta, j3) instead of fresh 3j sums per point.
class SphereOperatorTables {
 public:
  explicit SphereOperatorTables(HalfInteger j) : j_(j), ms_(projections(j)) {
    const int dim = static_cast<int>(ms_.size());
    const int n_j3 = j.twice() + 1;
    phi_coupling_.assign(static_cast<std::size_t>(n_j3 * dim * dim), 0.0);
    b_coupling_.assign(static_cast<std::size_t>(n_j3 * dim), 0.0);
    for (int j3 = 0; j3 < n_j3; ++j3) {
      const HalfInteger j3h = HalfInteger::from_int(j3);
      for (int r = 0; r < dim; ++r) {
        b_coupling_[static_cast<std::size_t>(j3 * dim + r)] = wigner_3j(j, j, j3h, ms_[r], -ms_[r], HalfInteger{});
        for (int c = 0; c < dim; ++c) {
          const HalfInteger m3 = ms_[c] - ms_[r];
          if (abs(m3) > j3h) continue;
          phi_coupling_[static_cast<std::size_t>((j3 * dim + r) * dim + c)] = wigner_3j(j, j, j3h, ms_[r], -ms_[c], m3);
        }
      }
    }
  }

  /// All B_{m1}(alpha, beta), ascending in m1.
  std::vector<OperatorMatrix> b_operators(double alpha, double beta) const {
    const int dim = static_cast<int>(ms_.size());
    const int n_j3 = j_.twice() + 1;
    std::vector<OperatorMatrix> sphere(static_cast<std::size_t>(n_j3), OperatorMatrix::Zero(dim, dim));
    for (int j3 = 0; j3 < n_j3; ++j3) {
      const HalfInteger j3h = HalfInteger::from_int(j3);
      const double scale = (2.0 * j3 + 1.0) * (2.0 * j3 + 1.0);
      for (int r = 0; r < dim; ++r) {
        for (int c = 0; c < dim; ++c) {
          const double coupling = phi_coupling_[static_cast<std::size_t>((j3 * dim + r) * dim + c)];
          if (coupling == 0.0) continue;
          const HalfInteger m3 = ms_[c] - ms_[r];
          const complex d_elem = wigner_D(j3h, HalfInteger{}, m3, alpha, beta, 0.0);
          sphere[static_cast<std::size_t>(j3)](r, c) = scale * parity_phase(ms_[c]) * d_elem * coupling;
        }
      }
    }
    std::vector<OperatorMatrix> out;
    out.reserve(ms_.size());
    for (int k = 0; k < dim; ++k) {
      OperatorMatrix b = OperatorMatrix::Zero(dim, dim);
      for (int j3 = 0; j3 < n_j3; ++j3) {
        const double coupling = b_coupling_[static_cast<std::size_t>(j3 * dim + k)];
        if (coupling != 0.0) b += coupling * sphere[static_cast<std::size_t>(j3)];
      }
      out.push_back(parity_phase(ms_[k]) * b);
    }
    return out;
  }

 private:
  HalfInteger j_;
  std::vector<HalfInteger> ms_;
  std::vector<double> phi_coupling_;
  std::vector<double> b_coupling_;
};

}  // namespace detail

/// The spin scheme together with the constant applied to the quantizers.
struct SpinSchemeBuild {
  Scheme scheme;
  /// Quantizers are calibration * B_{m1}; it comes out as (-1)^{2j}.
  complex calibration;
};

/// Points (m1, alpha_i, beta_k) in SpinTomogram order, dequantizers
/// U^dagger |j m1><j m1| U, quantizers proportional to B_{m1}(alpha, beta),
/// weights equal to the normalized grid measure. The overall constant of the
/// quantizers is fixed so that the identity operator is reproduced.
inline SpinSchemeBuild build_spin_scheme(const AngularGrid& grid, int threads = 1) {
  const HalfInteger j = grid.j();
  const int dim = j.twice() + 1;
  const auto ms = projections(j);
  const std::size_t total = static_cast<std::size_t>(dim) * grid.angle_count();

  std::vector<SchemePoint> points(total);
  std::vector<OperatorMatrix> deq(total);
  std::vector<OperatorMatrix> quant(total);
  std::vector<double> weights(total);
  const detail::SphereOperatorTables tables(j);
  const SpinTomogram layout(grid, std::vector<complex>(total));

  detail::parallel_for(grid.angle_count(), threads, [&](std::size_t angle) {
    const int ia = static_cast<int>(angle) / grid.n_beta();
    const int ib = static_cast<int>(angle) % grid.n_beta();
    const double alpha = grid.alpha(ia);
    const double beta = grid.beta(ib);
    const Eigen::MatrixXcd u = wigner_D_matrix(j, alpha, beta, 0.0);
    const auto bs = tables.b_operators(alpha, beta);
    for (int k = 0; k < dim; ++k) {
      const std::size_t idx = layout.index(k, ia, ib);
      points[idx] = {static_cast<int>(idx), {static_cast<double>(ms[static_cast<std::size_t>(k)].twice()), alpha, beta}};
      deq[idx] = u.adjoint() * basis_operator(dim, k, k) * u;
      quant[idx] = bs[static_cast<std::size_t>(k)];
      weights[idx] = grid.measure(ib);
    }
  });

  OperatorMatrix identity_image = OperatorMatrix::Zero(dim, dim);
  for (std::size_t i = 0; i < total; ++i) identity_image += (weights[i] * trace(deq[i])) * quant[i];
  const complex c = trace(identity_image) / static_cast<double>(dim);
  const double off = (identity_image - c * OperatorMatrix::Identity(dim, dim)).cwiseAbs().maxCoeff();
  if (std::abs(c) < 1e-12 || off > 1e-8 * std::abs(c)) {
    throw Error("spin scheme: reconstruction of the identity is not proportional to the identity (residual " +
                std::to_string(off) + ")");
  }
  const complex calibration = 1.0 / c;
  for (auto& q : quant) q *= calibration;

  return {Scheme("spin", dim, {"m1_twice", "alpha", "beta"}, std::move(points), std::move(deq), std::move(quant),
                 std::move(weights), 1e-10),
          calibration};
}

inline Scheme spin_scheme(const AngularGrid& grid, int threads = 1) { return build_spin_scheme(grid, threads).scheme; }

/// Star-product kernel of a spin scheme produced by spin_scheme().
inline KernelTensor spin_star_kernel(const Scheme& spin, int threads = 1, KernelOrder order = kDefaultKernelOrder) {
  if (spin.name() != "spin") throw SchemeMismatch("spin_star_kernel: scheme '" + spin.name() + "' is not a spin scheme");
  return star_kernel(spin, threads, order);
}

/// Spin symbol stored with a scheme, re-laid out as a tomogram.
inline SpinTomogram as_tomogram(const Symbol& f, const Scheme& spin, const AngularGrid& grid) {
  require_symbol_of(f, spin, "as_tomogram");
  std::vector<complex> values(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) values[i] = f[i];
  return {grid, std::move(values)};
}

inline Symbol as_symbol(const SpinTomogram& w, const Scheme& spin) {
  if (w.point_count() != spin.size() || w.dim() != spin.hilbert_dim()) {
    throw SchemeMismatch("as_symbol: tomogram grid does not match the spin scheme");
  }
  Eigen::VectorXcd values(static_cast<Eigen::Index>(w.point_count()));
  for (std::size_t i = 0; i < w.point_count(); ++i) values(static_cast<Eigen::Index>(i)) = w.values()[i];
  return {spin.id(), std::move(values)};
}

}  // namespace tomo
