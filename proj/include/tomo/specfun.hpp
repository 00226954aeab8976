#pragma once

// Angular-momentum special functions: Jacobi polynomials, Wigner d/D matrix
// elements, Wigner 3j symbols, plus Gauss-Legendre nodes and associated
// Laguerre polynomials.
//
// Rotation matrices follow the convention
//   D^j_{m'm}(alpha, beta, gamma) = e^{i m' gamma} d^j_{m'm}(beta) e^{i m alpha},
// with d^j(beta) = exp(+i beta J_y) in the ascending |j, m> basis.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <compare>
#include <cstdlib>
#include <numbers>
#include <string>
#include <vector>

#include "tomo/error.hpp"

namespace tomo {

/// Exact half-integer stored as twice its value.
class HalfInteger {
 public:
  constexpr HalfInteger() = default;

  static constexpr HalfInteger from_twice(int twice) { return HalfInteger(twice); }
  static constexpr HalfInteger from_int(int value) { return HalfInteger(2 * value); }
  /// Throws DomainError unless 2*value is an integer.
  static HalfInteger from_double(double value) {
    const double twice = 2.0 * value;
    const double rounded = std::round(twice);
    if (!std::isfinite(value) || std::abs(twice - rounded) > 1e-9) {
      throw DomainError("not a half-integer: " + std::to_string(value));
    }
    return HalfInteger(static_cast<int>(rounded));
  }

  constexpr int twice() const { return twice_; }
  constexpr double value() const { return 0.5 * twice_; }
  constexpr bool is_integer() const { return twice_ % 2 == 0; }
  /// Value as an int; only meaningful when is_integer().
  constexpr int as_int() const { return twice_ / 2; }

  constexpr HalfInteger operator-() const { return HalfInteger(-twice_); }
  constexpr HalfInteger operator+(HalfInteger o) const { return HalfInteger(twice_ + o.twice_); }
  constexpr HalfInteger operator-(HalfInteger o) const { return HalfInteger(twice_ - o.twice_); }
  constexpr auto operator<=>(const HalfInteger&) const = default;

  std::string str() const {
    return is_integer() ? std::to_string(as_int()) : std::to_string(twice_) + "/2";
  }

 private:
  constexpr explicit HalfInteger(int twice) : twice_(twice) {}
  int twice_ = 0;
};

constexpr HalfInteger abs(HalfInteger h) { return h.twice() < 0 ? -h : h; }

/// Projections m = -j, -j+1, ..., j in ascending order; index k <-> m = -j + k.
inline std::vector<HalfInteger> projections(HalfInteger j) {
  std::vector<HalfInteger> ms;
  ms.reserve(static_cast<std::size_t>(j.twice() + 1));
  for (int t = -j.twice(); t <= j.twice(); t += 2) ms.push_back(HalfInteger::from_twice(t));
  return ms;
}

/// Index of projection m in the ascending basis of spin j.
constexpr int projection_index(HalfInteger j, HalfInteger m) { return (m.twice() + j.twice()) / 2; }

/// (-1)^m read as e^{i pi m}; real for integer m, +-i for half-integer m.
inline std::complex<double> parity_phase(HalfInteger m) {
  const int t = ((m.twice() % 4) + 4) % 4;
  static constexpr std::array<std::complex<double>, 4> kPhases = {
      std::complex<double>{1.0, 0.0}, std::complex<double>{0.0, 1.0},
      std::complex<double>{-1.0, 0.0}, std::complex<double>{0.0, -1.0}};
  return kPhases[static_cast<std::size_t>(t)];
}

/// (-1)^n for integer n.
constexpr double sign_of_power(int n) { return (n % 2 == 0) ? 1.0 : -1.0; }

namespace detail {

inline constexpr int kLogFactorialTableSize = 4 * 64 + 2;

inline const std::vector<double>& log_factorial_table() {
  static const std::vector<double> table = [] {
    std::vector<double> t(kLogFactorialTableSize);
    for (int n = 0; n < kLogFactorialTableSize; ++n) t[n] = std::lgamma(n + 1.0);
    return t;
  }();
  return table;
}

inline double ipow(double base, int exponent) {
  double result = 1.0;
  for (int k = 0; k < exponent; ++k) result *= base;
  return result;
}

}  // namespace detail

/// log(n!) for n >= 0.
inline double log_factorial(int n) {
  if (n < 0) throw DomainError("log_factorial: negative argument " + std::to_string(n));
  const auto& table = detail::log_factorial_table();
  if (n < static_cast<int>(table.size())) return table[static_cast<std::size_t>(n)];
  return std::lgamma(n + 1.0);
}

/// P_n^{(a,b)}(x) by the standard three-term recurrence in n.
inline double jacobi_polynomial(int n, double a, double b, double x) {
  if (n < 0) throw DomainError("jacobi_polynomial: negative degree");
  if (n == 0) return 1.0;
  double prev = 1.0;
  double curr = 0.5 * (a - b) + 0.5 * (a + b + 2.0) * x;
  for (int k = 2; k <= n; ++k) {
    const double s = 2.0 * k + a + b;
    const double c1 = 2.0 * k * (k + a + b) * (s - 2.0);
    const double c2 = (s - 1.0) * (s * (s - 2.0) * x + a * a - b * b);
    const double c3 = 2.0 * (k + a - 1.0) * (k + b - 1.0) * s;
    const double next = (c2 * curr - c3 * prev) / c1;
    prev = curr;
    curr = next;
  }
  return curr;
}

inline void check_projection(HalfInteger j, HalfInteger m, const char* what) {
  if (j.twice() < 0) throw DomainError(std::string(what) + ": negative j " + j.str());
  if (abs(m) > j || (j.twice() - m.twice()) % 2 != 0) {
    throw DomainError(std::string(what) + ": invalid projection m=" + m.str() + " for j=" + j.str());
  }
}

namespace detail {

// The closed form, valid for mp >= |m|.
inline double small_d_direct(HalfInteger j, HalfInteger mp, HalfInteger m, double beta) {
  const int jpmp = (j + mp).as_int();
  const int jmmp = (j - mp).as_int();
  const int jpm = (j + m).as_int();
  const int jmm = (j - m).as_int();
  const int sum = (mp + m).as_int();
  const int diff = (mp - m).as_int();
  const double prefactor =
      std::exp(0.5 * (log_factorial(jpmp) + log_factorial(jmmp) - log_factorial(jpm) - log_factorial(jmm)));
  const double c = std::cos(0.5 * beta);
  const double s = std::sin(0.5 * beta);
  return prefactor * ipow(c, sum) * ipow(s, diff) * jacobi_polynomial(jmmp, diff, sum, std::cos(beta));
}

}  // namespace detail

/// Wigner small-d element d^j_{mp,m}(beta). The closed form covers mp >= |m|;
/// the remaining index pairs follow from d_{mp,m} = (-1)^{mp-m} d_{m,mp} = d_{-m,-mp}.
inline double wigner_small_d(HalfInteger j, HalfInteger mp, HalfInteger m, double beta) {
  check_projection(j, mp, "wigner_small_d");
  check_projection(j, m, "wigner_small_d");
  const double sign = sign_of_power((mp - m).as_int());
  if (mp >= abs(m)) return detail::small_d_direct(j, mp, m, beta);
  if (m >= abs(mp)) return sign * detail::small_d_direct(j, m, mp, beta);
  if (-m >= abs(mp)) return detail::small_d_direct(j, -m, -mp, beta);
  return sign * detail::small_d_direct(j, -mp, -m, beta);
}

/// The full (2j+1)x(2j+1) small-d matrix in the ascending basis.
inline Eigen::MatrixXd wigner_small_d_matrix(HalfInteger j, double beta) {
  const auto ms = projections(j);
  const auto n = static_cast<Eigen::Index>(ms.size());
  Eigen::MatrixXd d(n, n);
  for (Eigen::Index r = 0; r < n; ++r)
    for (Eigen::Index c = 0; c < n; ++c)
      d(r, c) = wigner_small_d(j, ms[static_cast<std::size_t>(r)], ms[static_cast<std::size_t>(c)], beta);
  return d;
}

inline std::complex<double> wigner_D(HalfInteger j, HalfInteger mp, HalfInteger m, double alpha,
                                     double beta, double gamma) {
  const double d = wigner_small_d(j, mp, m, beta);
  return std::polar(1.0, mp.value() * gamma) * d * std::polar(1.0, m.value() * alpha);
}

/// Rotation matrix U with U_{mp,m} = D^j_{mp,m}(alpha, beta, gamma).
inline Eigen::MatrixXcd wigner_D_matrix(HalfInteger j, double alpha, double beta, double gamma) {
  const auto ms = projections(j);
  const Eigen::MatrixXd d = wigner_small_d_matrix(j, beta);
  const auto n = static_cast<Eigen::Index>(ms.size());
  Eigen::MatrixXcd u(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const auto left = std::polar(1.0, ms[static_cast<std::size_t>(r)].value() * gamma);
    for (Eigen::Index c = 0; c < n; ++c) {
      u(r, c) = left * d(r, c) * std::polar(1.0, ms[static_cast<std::size_t>(c)].value() * alpha);
    }
  }
  return u;
}

/// Wigner 3j symbol via the Racah single sum, accumulated in log-factorials.
/// Returns exactly 0 when the m-sum is nonzero or the triangle rule fails.
inline double wigner_3j(HalfInteger j1, HalfInteger j2, HalfInteger j3, HalfInteger m1, HalfInteger m2,
                        HalfInteger m3) {
  check_projection(j1, m1, "wigner_3j");
  check_projection(j2, m2, "wigner_3j");
  check_projection(j3, m3, "wigner_3j");
  if ((m1 + m2 + m3).twice() != 0) return 0.0;
  if (!(j1 + j2 + j3).is_integer()) return 0.0;
  if (j3 > j1 + j2 || j3 < abs(j1 - j2)) return 0.0;

  const int a = (j1 + j2 - j3).as_int();
  const int b = (j1 - j2 + j3).as_int();
  const int c = (-j1 + j2 + j3).as_int();
  const int total = (j1 + j2 + j3).as_int();
  const double log_delta =
      log_factorial(a) + log_factorial(b) + log_factorial(c) - log_factorial(total + 1);
  const double log_norm = log_factorial((j1 + m1).as_int()) + log_factorial((j1 - m1).as_int()) +
                          log_factorial((j2 + m2).as_int()) + log_factorial((j2 - m2).as_int()) +
                          log_factorial((j3 + m3).as_int()) + log_factorial((j3 - m3).as_int());

  const int t1 = (j3 - j2 + m1).as_int();
  const int t2 = (j3 - j1 - m2).as_int();
  const int t3 = a;
  const int t4 = (j1 - m1).as_int();
  const int t5 = (j2 + m2).as_int();
  const int k_min = std::max({0, -t1, -t2});
  const int k_max = std::min({t3, t4, t5});
  if (k_min > k_max) return 0.0;

  double sum = 0.0;
  for (int k = k_min; k <= k_max; ++k) {
    const double log_den = log_factorial(k) + log_factorial(t1 + k) + log_factorial(t2 + k) +
                           log_factorial(t3 - k) + log_factorial(t4 - k) + log_factorial(t5 - k);
    sum += sign_of_power(k) * std::exp(0.5 * (log_delta + log_norm) - log_den);
  }
  return sign_of_power((j1 - j2 - m3).as_int()) * sum;
}

/// Gauss-Legendre nodes (strictly increasing, in (-1,1)) and positive weights.
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t size() const { return nodes.size(); }
};

inline QuadratureRule gauss_legendre(int n) {
  if (n < 1) throw DomainError("gauss_legendre: need at least one node");
  QuadratureRule rule;
  rule.nodes.resize(static_cast<std::size_t>(n));
  rule.weights.resize(static_cast<std::size_t>(n));
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double derivative = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      derivative = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / derivative;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Recompute the derivative at the converged node.
    {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      derivative = n * (x * p1 - p0) / (x * x - 1.0);
    }
    const double w = 2.0 / ((1.0 - x * x) * derivative * derivative);
    const auto lo = static_cast<std::size_t>(i);
    const auto hi = static_cast<std::size_t>(n - 1 - i);
    rule.nodes[lo] = -x;
    rule.nodes[hi] = x;
    rule.weights[lo] = w;
    rule.weights[hi] = w;
  }
  if (n % 2 == 1) rule.nodes[static_cast<std::size_t>(n / 2)] = 0.0;
  return rule;
}

/// Gauss-Hermite rule for weight e^{-x^2} on the real line (Golub-Welsch).
inline QuadratureRule gauss_hermite(int n) {
  if (n < 1) throw DomainError("gauss_hermite: need at least one node");
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) jacobi(k, k - 1) = jacobi(k - 1, k) = std::sqrt(0.5 * k);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi);
  QuadratureRule rule;
  for (int k = 0; k < n; ++k) {
    rule.nodes.push_back(solver.eigenvalues()(k));
    const double v0 = solver.eigenvectors()(0, k);
    rule.weights.push_back(std::sqrt(std::numbers::pi) * v0 * v0);
  }
  return rule;
}

/// Associated Laguerre polynomial L_n^{(k)}(x) by upward recurrence.
inline double laguerre_assoc(int n, int k, double x) {
  if (n < 0 || k < 0) throw DomainError("laguerre_assoc: n and k must be nonnegative");
  if (n == 0) return 1.0;
  double prev = 1.0;
  double curr = 1.0 + k - x;
  for (int i = 1; i < n; ++i) {
    const double next = ((2.0 * i + 1.0 + k - x) * curr - (i + k) * prev) / (i + 1.0);
    prev = curr;
    curr = next;
  }
  return curr;
}

}  // namespace tomo
