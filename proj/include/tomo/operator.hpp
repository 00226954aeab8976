#pragma once

// Dense complex operator algebra on finite-dimensional Hilbert spaces.
// Every scheme in the library acts on OperatorMatrix values; hbar = 1.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <string>

#include "tomo/error.hpp"

namespace tomo {

using complex = std::complex<double>;
using OperatorMatrix = Eigen::MatrixXcd;

inline void require_square(const OperatorMatrix& a, const char* what) {
  if (a.rows() != a.cols() || a.rows() == 0) {
    throw DimensionError(std::string(what) + ": operator must be a non-empty square matrix, got " +
                         std::to_string(a.rows()) + "x" + std::to_string(a.cols()));
  }
}

inline void require_same_dim(const OperatorMatrix& a, const OperatorMatrix& b, const char* what) {
  require_square(a, what);
  require_square(b, what);
  if (a.rows() != b.rows()) {
    throw DimensionError(std::string(what) + ": incompatible operators of dimension " +
                         std::to_string(a.rows()) + " and " + std::to_string(b.rows()));
  }
}

inline complex trace(const OperatorMatrix& a) {
  require_square(a, "trace");
  complex sum{0.0, 0.0};
  for (Eigen::Index i = 0; i < a.rows(); ++i) sum += a(i, i);
  return sum;
}

/// Tr[A B] without forming the product.
inline complex trace_of_product(const OperatorMatrix& a, const OperatorMatrix& b) {
  require_same_dim(a, b, "trace_of_product");
  complex sum{0.0, 0.0};
  const Eigen::Index n = a.rows();
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i) sum += a(i, j) * b(j, i);
  return sum;
}

inline OperatorMatrix commutator(const OperatorMatrix& a, const OperatorMatrix& b) {
  require_same_dim(a, b, "commutator");
  return a * b - b * a;
}

inline bool is_hermitian(const OperatorMatrix& a, double tol = 1e-12) {
  if (a.rows() != a.cols()) return false;
  return (a - a.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

/// Largest entry magnitude of a - b.
inline double max_abs_diff(const OperatorMatrix& a, const OperatorMatrix& b) {
  require_same_dim(a, b, "max_abs_diff");
  return (a - b).cwiseAbs().maxCoeff();
}

namespace detail {

// Degree-13 Pade coefficients for exp (Higham 2005).
inline constexpr double kPade13[] = {64764752532480000.0,
                                     32382376266240000.0,
                                     7771770303897600.0,
                                     1187353796428800.0,
                                     129060195264000.0,
                                     10559470521600.0,
                                     670442572800.0,
                                     33522128640.0,
                                     1323241920.0,
                                     40840800.0,
                                     960960.0,
                                     16380.0,
                                     182.0,
                                     1.0};

inline OperatorMatrix pade13(const OperatorMatrix& a) {
  const auto& b = kPade13;
  const Eigen::Index n = a.rows();
  const OperatorMatrix id = OperatorMatrix::Identity(n, n);
  const OperatorMatrix a2 = a * a;
  const OperatorMatrix a4 = a2 * a2;
  const OperatorMatrix a6 = a4 * a2;
  const OperatorMatrix u_inner = b[13] * a6 + b[11] * a4 + b[9] * a2;
  const OperatorMatrix u = a * (a6 * u_inner + b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * id);
  const OperatorMatrix v_inner = b[12] * a6 + b[10] * a4 + b[8] * a2;
  const OperatorMatrix v = a6 * v_inner + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * id;
  return (v - u).partialPivLu().solve(v + u);
}

}  // namespace detail

/// exp(A) by scaling and squaring around a [13/13] Pade approximant.
inline OperatorMatrix matrix_exponential(const OperatorMatrix& a) {
  require_square(a, "matrix_exponential");
  if (!a.allFinite()) throw DomainError("matrix_exponential: non-finite entries");
  // theta_13 from Higham's backward error analysis.
  constexpr double kTheta13 = 5.371920351148152;
  const double norm1 = a.cwiseAbs().colwise().sum().maxCoeff();
  int squarings = 0;
  if (norm1 > kTheta13) squarings = static_cast<int>(std::ceil(std::log2(norm1 / kTheta13)));
  OperatorMatrix e = detail::pade13(a / std::ldexp(1.0, squarings));
  for (int k = 0; k < squarings; ++k) e = e * e;
  return e;
}

/// Seed-reproducible random Hermitian matrix H = (G + G^dagger)/2 where the
/// real and imaginary parts of G are independent standard normal draws from a
/// mt19937_64 seeded with `seed`, filled row-major (real part first).
inline OperatorMatrix random_hermitian(int dim, std::uint64_t seed) {
  if (dim < 1) throw DomainError("random_hermitian: dim must be >= 1");
  std::mt19937_64 engine(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  OperatorMatrix g(dim, dim);
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) {
      const double re = normal(engine);
      const double im = normal(engine);
      g(i, j) = complex(re, im);
    }
  }
  OperatorMatrix h = 0.5 * (g + g.adjoint());
  for (int i = 0; i < dim; ++i) h(i, i) = complex(h(i, i).real(), 0.0);
  return h;
}

/// Random density matrix rho = G G^dagger / Tr[G G^dagger] with G drawn like
/// random_hermitian's G; full rank almost surely.
inline OperatorMatrix random_density_matrix(int dim, std::uint64_t seed) {
  if (dim < 1) throw DomainError("random_density_matrix: dim must be >= 1");
  std::mt19937_64 engine(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  OperatorMatrix g(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) {
      const double re = normal(engine);
      const double im = normal(engine);
      g(i, j) = complex(re, im);
    }
  OperatorMatrix rho = g * g.adjoint();
  rho /= trace(rho).real();
  return 0.5 * (rho + rho.adjoint());
}

/// The basis operator |row><col| of dimension dim.
inline OperatorMatrix basis_operator(int dim, int row, int col) {
  OperatorMatrix e = OperatorMatrix::Zero(dim, dim);
  e(row, col) = 1.0;
  return e;
}

}  // namespace tomo
