#pragma once

// Symplectic tomography on a truncated oscillator basis.
//
// The dequantizer U(X, mu, nu) = delta(X - mu q - nu p) becomes, on a truncated
// Fock space, a sum of point masses at the eigenvalues of mu q + nu p. Tomograms
// are kept either exactly (SPECTRAL: eigenvalues and masses per direction) or
// as Gaussian-smoothed samples on an X grid (SAMPLED). Reconstruction uses the
// quantizer D(X, mu, nu) = e^{iX} exp(-i(nu p + mu q)) / 2pi in polar
// coordinates (mu, nu) = r (cos theta, sin theta), with a Gaussian damping
// e^{-eps r^2} on the divergent |r| Jacobian.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <vector>

#include "tomo/error.hpp"
#include "tomo/operator.hpp"
#include "tomo/specfun.hpp"

namespace tomo {

/// Truncated Fock space with q = (a + a^dagger)/sqrt2 and p = (a - a^dagger)/(i sqrt2).
class FockSpace {
 public:
  explicit FockSpace(int n_trunc) : n_(n_trunc) {
    if (n_trunc < 2) throw DomainError("FockSpace: truncation must be at least 2");
    OperatorMatrix a = OperatorMatrix::Zero(n_, n_);
    for (int k = 1; k < n_; ++k) a(k - 1, k) = std::sqrt(static_cast<double>(k));
    q_ = (a + a.adjoint()) / std::sqrt(2.0);
    p_ = (a - a.adjoint()) / complex(0.0, std::sqrt(2.0));
  }

  int n_trunc() const { return n_; }
  const OperatorMatrix& q() const { return q_; }
  const OperatorMatrix& p() const { return p_; }

  /// mu q + nu p.
  OperatorMatrix quadrature(double mu, double nu) const { return mu * q_ + nu * p_; }

  OperatorMatrix fock_projector(int n) const {
    if (n < 0 || n >= n_) throw DomainError("FockSpace: level " + std::to_string(n) + " outside the truncation");
    return basis_operator(n_, n, n);
  }

 private:
  int n_;
  OperatorMatrix q_;
  OperatorMatrix p_;
};

/// Point (X, mu, nu) of the symplectic tomogram.
struct SymplecticPoint {
  double X = 0.0;
  double mu = 1.0;
  double nu = 0.0;
};

inline void require_direction(const SymplecticPoint& pt, const char* what) {
  if (!std::isfinite(pt.X) || !std::isfinite(pt.mu) || !std::isfinite(pt.nu)) {
    throw DomainError(std::string(what) + ": non-finite coordinates");
  }
  if (pt.mu == 0.0 && pt.nu == 0.0) throw DomainError(std::string(what) + ": direction (mu, nu) = (0, 0)");
}

/// Closed-form tomogram of the oscillator ground state,
/// [pi (mu^2 + nu^2)]^{-1/2} exp(-X^2 / (mu^2 + nu^2)).
inline double ground_state_tomogram(const SymplecticPoint& pt) {
  require_direction(pt, "ground_state_tomogram");
  const double s2 = pt.mu * pt.mu + pt.nu * pt.nu;
  return std::exp(-pt.X * pt.X / s2) / std::sqrt(std::numbers::pi * s2);
}

/// Point masses of delta(X - mu q - nu p) against A: eigenvalues of the
/// quadrature (ascending) and the diagonal elements of A in its eigenbasis.
struct SpectralSlice {
  Eigen::VectorXd eigenvalues;
  Eigen::VectorXcd masses;
  Eigen::MatrixXcd eigenvectors;
};

inline SpectralSlice spectral_slice(const OperatorMatrix& a, const FockSpace& fock, double mu, double nu) {
  require_direction({0.0, mu, nu}, "spectral_slice");
  require_square(a, "spectral_slice");
  if (a.rows() != fock.n_trunc()) {
    throw DimensionError("spectral_slice: operator dimension " + std::to_string(a.rows()) +
                         " does not match truncation " + std::to_string(fock.n_trunc()));
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(fock.quadrature(mu, nu));
  SpectralSlice s;
  s.eigenvalues = solver.eigenvalues();
  s.eigenvectors = solver.eigenvectors();
  s.masses = (s.eigenvectors.adjoint() * a * s.eigenvectors).diagonal();
  return s;
}

/// Uniform X grid from -x_max to x_max with spacing dx.
struct XGrid {
  double x_max = 6.0;
  double dx = 0.01;

  std::vector<double> nodes() const {
    if (!(x_max > 0.0) || !(dx > 0.0)) throw DomainError("XGrid: x_max and dx must be positive");
    const int steps = static_cast<int>(std::lround(2.0 * x_max / dx));
    std::vector<double> xs(static_cast<std::size_t>(steps + 1));
    for (int k = 0; k <= steps; ++k) xs[static_cast<std::size_t>(k)] = -x_max + k * (2.0 * x_max / steps);
    return xs;
  }
};

/// Directions theta_k = pi k / n on [0, pi).
inline std::vector<double> uniform_thetas(int n_theta) {
  if (n_theta < 1) throw DomainError("uniform_thetas: need at least one direction");
  std::vector<double> thetas(static_cast<std::size_t>(n_theta));
  for (int k = 0; k < n_theta; ++k) thetas[static_cast<std::size_t>(k)] = std::numbers::pi * k / n_theta;
  return thetas;
}

enum class TomogramRepresentation { spectral, sampled };

/// Tomogram on the unit-circle directions (mu, nu) = (cos theta, sin theta).
/// Other directions follow from w(lX, l mu, l nu) = w(X, mu, nu) / |l|.
struct SymplecticTomogram {
  TomogramRepresentation representation = TomogramRepresentation::spectral;
  std::vector<double> thetas;
  // SPECTRAL: one entry per theta.
  std::vector<Eigen::VectorXd> eigenvalues;
  std::vector<Eigen::VectorXcd> masses;
  // SAMPLED: values[t](k) at xs[k]; Gaussian smoothing standard deviation.
  std::vector<double> xs;
  std::vector<Eigen::VectorXd> values;
  double smoothing = 0.0;

  double theta_step() const { return std::numbers::pi / static_cast<double>(thetas.size()); }
};

/// Spectral tomogram of A at uniform directions.
inline SymplecticTomogram symplectic_tomogram_spectral(const OperatorMatrix& a, const FockSpace& fock,
                                                       const std::vector<double>& thetas) {
  SymplecticTomogram tomo;
  tomo.representation = TomogramRepresentation::spectral;
  tomo.thetas = thetas;
  for (double theta : thetas) {
    SpectralSlice s = spectral_slice(a, fock, std::cos(theta), std::sin(theta));
    tomo.eigenvalues.push_back(std::move(s.eigenvalues));
    tomo.masses.push_back(std::move(s.masses));
  }
  return tomo;
}

/// Point masses convolved with a normalized Gaussian of standard deviation
/// `smoothing`, sampled on the X grid. Keeps the real part of the masses.
inline SymplecticTomogram symplectic_tomogram_sampled(const OperatorMatrix& a, const FockSpace& fock,
                                                      const std::vector<double>& thetas, const XGrid& grid,
                                                      double smoothing) {
  if (!(smoothing > 0.0) || !std::isfinite(smoothing)) {
    throw DomainError("symplectic_tomogram: a SAMPLED tomogram needs a positive smoothing width");
  }
  const SymplecticTomogram spectral = symplectic_tomogram_spectral(a, fock, thetas);
  SymplecticTomogram tomo;
  tomo.representation = TomogramRepresentation::sampled;
  tomo.thetas = thetas;
  tomo.xs = grid.nodes();
  tomo.smoothing = smoothing;
  const double norm = 1.0 / (smoothing * std::sqrt(2.0 * std::numbers::pi));
  for (std::size_t t = 0; t < thetas.size(); ++t) {
    Eigen::VectorXd row = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(tomo.xs.size()));
    const auto& lam = spectral.eigenvalues[t];
    const auto& mass = spectral.masses[t];
    for (std::size_t k = 0; k < tomo.xs.size(); ++k) {
      double sum = 0.0;
      for (Eigen::Index e = 0; e < lam.size(); ++e) {
        const double z = (tomo.xs[k] - lam(e)) / smoothing;
        sum += mass(e).real() * std::exp(-0.5 * z * z);
      }
      row(static_cast<Eigen::Index>(k)) = norm * sum;
    }
    tomo.values.push_back(std::move(row));
  }
  return tomo;
}

inline SymplecticTomogram symplectic_tomogram(const OperatorMatrix& a, const FockSpace& fock,
                                              const std::vector<double>& thetas, const XGrid& grid, double smoothing,
                                              TomogramRepresentation representation) {
  if (representation == TomogramRepresentation::spectral) return symplectic_tomogram_spectral(a, fock, thetas);
  return symplectic_tomogram_sampled(a, fock, thetas, grid, smoothing);
}

/// exp(-i (nu p + mu q)) via scaling-and-squaring.
inline OperatorMatrix weyl_operator(const FockSpace& fock, double mu, double nu) {
  return matrix_exponential(complex(0.0, -1.0) * fock.quadrature(mu, nu));
}

/// Displacement-operator matrix elements of exp(-i(nu p + mu q)) = D(alpha)
/// with alpha = (nu - i mu)/sqrt2, through associated Laguerre polynomials.
/// Exact in the untruncated space.
inline OperatorMatrix weyl_operator_laguerre(int n_trunc, double mu, double nu) {
  const complex alpha = complex(nu, -mu) / std::sqrt(2.0);
  const double a2 = std::norm(alpha);
  const double envelope = std::exp(-0.5 * a2);
  OperatorMatrix out(n_trunc, n_trunc);
  for (int m = 0; m < n_trunc; ++m) {
    for (int n = 0; n < n_trunc; ++n) {
      if (m >= n) {
        const double ratio = std::exp(0.5 * (log_factorial(n) - log_factorial(m)));
        out(m, n) = ratio * std::pow(alpha, m - n) * envelope * laguerre_assoc(n, m - n, a2);
      } else {
        const double ratio = std::exp(0.5 * (log_factorial(m) - log_factorial(n)));
        out(m, n) = ratio * std::pow(-std::conj(alpha), n - m) * envelope * laguerre_assoc(m, n - m, a2);
      }
    }
  }
  return out;
}

/// D(X, mu, nu) = e^{iX} exp(-i(nu p + mu q)) / 2pi.
inline OperatorMatrix displacement_quantizer(const SymplecticPoint& pt, const FockSpace& fock) {
  require_direction(pt, "displacement_quantizer");
  return (std::polar(1.0, pt.X) / (2.0 * std::numbers::pi)) * weyl_operator(fock, pt.mu, pt.nu);
}

/// The same quantizer through weyl_operator_laguerre.
inline OperatorMatrix displacement_quantizer_laguerre(const SymplecticPoint& pt, int n_trunc) {
  require_direction(pt, "displacement_quantizer_laguerre");
  return (std::polar(1.0, pt.X) / (2.0 * std::numbers::pi)) * weyl_operator_laguerre(n_trunc, pt.mu, pt.nu);
}

/// Radial grid of the polar reconstruction: midpoints on [-r_max, r_max] and
/// Gaussian damping e^{-epsilon r^2}.
struct RGrid {
  double r_max = 8.0;
  int n_r = 256;
  double epsilon = 1e-5;

  void validate() const {
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
      throw DomainError("RGrid: damping epsilon must be positive, got " + std::to_string(epsilon));
    }
    if (!(r_max > 0.0) || !std::isfinite(r_max)) throw DomainError("RGrid: r_max must be positive");
    if (n_r < 2) throw DomainError("RGrid: need at least two radial nodes");
  }
  double step() const { return 2.0 * r_max / n_r; }
  double node(int i) const { return -r_max + step() * (i + 0.5); }
};

/// Default desk-scale reconstruction parameters.
struct SymplecticDefaults {
  static constexpr int n_trunc = 64;
  static constexpr int n_theta = 64;
  static constexpr double r_max = 8.0;
  static constexpr int n_r = 256;
  static constexpr double epsilon = 1e-5;
};

/// Regularization ladder for convergence checks: the radial extent grows
/// and the damping shrinks from rung to rung; the last rung is the default.
/// Below ~2e-4 the error is set by the 64 directions rather than by (r, eps).
inline std::vector<RGrid> reconstruction_ladder() {
  return {{3.0, 256, 1e-1}, {4.0, 256, 1e-2}, {5.0, 256, 1e-3}, {6.0, 256, 1e-4},
          {SymplecticDefaults::r_max, SymplecticDefaults::n_r, SymplecticDefaults::epsilon}};
}

/// A ~= sum_theta dtheta sum_r |r| e^{-eps r^2} dr / 2pi * chi(r, theta) exp(-i r O(theta)),
/// with chi(r, theta) = Tr[A e^{i r O(theta)}] read off the tomogram and
/// O(theta) = cos(theta) q + sin(theta) p. The exponential is applied in the
/// eigenbasis of O(theta). SAMPLED tomograms are integrated over X and the
/// Gaussian smoothing is divided out of chi.
inline OperatorMatrix symplectic_reconstruct(const SymplecticTomogram& tomo, const FockSpace& fock,
                                             const RGrid& rgrid) {
  rgrid.validate();
  if (tomo.thetas.empty()) throw DomainError("symplectic_reconstruct: tomogram has no directions");
  const int n = fock.n_trunc();
  const double dtheta = tomo.theta_step();
  const double dr = rgrid.step();
  std::vector<double> rs(static_cast<std::size_t>(rgrid.n_r));
  std::vector<double> radial(static_cast<std::size_t>(rgrid.n_r));
  for (int i = 0; i < rgrid.n_r; ++i) {
    const double r = rgrid.node(i);
    rs[static_cast<std::size_t>(i)] = r;
    radial[static_cast<std::size_t>(i)] = std::abs(r) * std::exp(-rgrid.epsilon * r * r) * dr / (2.0 * std::numbers::pi);
  }

  OperatorMatrix out = OperatorMatrix::Zero(n, n);
  for (std::size_t t = 0; t < tomo.thetas.size(); ++t) {
    const double theta = tomo.thetas[t];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(fock.quadrature(std::cos(theta), std::sin(theta)));
    const Eigen::VectorXd& lam = solver.eigenvalues();

    std::vector<complex> chi(rs.size());
    if (tomo.representation == TomogramRepresentation::spectral) {
      const auto& pts = tomo.eigenvalues[t];
      const auto& mass = tomo.masses[t];
      if (pts.size() != n) throw DimensionError("symplectic_reconstruct: tomogram truncation does not match");
      for (std::size_t i = 0; i < rs.size(); ++i) {
        complex sum{};
        for (Eigen::Index e = 0; e < pts.size(); ++e) sum += mass(e) * std::polar(1.0, rs[i] * pts(e));
        chi[i] = sum;
      }
    } else {
      if (!(tomo.smoothing > 0.0)) throw DomainError("symplectic_reconstruct: SAMPLED tomogram without smoothing");
      const auto& row = tomo.values[t];
      const double dx = tomo.xs.size() > 1 ? tomo.xs[1] - tomo.xs[0] : 1.0;
      for (std::size_t i = 0; i < rs.size(); ++i) {
        complex sum{};
        for (std::size_t k = 0; k < tomo.xs.size(); ++k) {
          const double trap = (k == 0 || k + 1 == tomo.xs.size()) ? 0.5 : 1.0;
          sum += trap * row(static_cast<Eigen::Index>(k)) * std::polar(1.0, rs[i] * tomo.xs[k]);
        }
        const double s = tomo.smoothing * rs[i];
        chi[i] = sum * dx * std::exp(0.5 * s * s);
      }
    }

    Eigen::VectorXcd coef = Eigen::VectorXcd::Zero(n);
    for (Eigen::Index e = 0; e < n; ++e) {
      complex sum{};
      for (std::size_t i = 0; i < rs.size(); ++i) sum += radial[i] * chi[i] * std::polar(1.0, -rs[i] * lam(e));
      coef(e) = sum;
    }
    out += dtheta * (solver.eigenvectors() * coef.asDiagonal() * solver.eigenvectors().adjoint());
  }
  return out;
}

/// The three-point kernel
///   K = delta(mu (nu1 + nu2) - nu (mu1 + mu2)) / 4pi^2
///       * exp[(i/2)((nu1 mu2 - nu2 mu1) + 2 X1 + 2 X2 - 2 (nu1 + nu2) X / nu)],
/// split into the argument of the delta function and the smooth density.
struct ClosedFormKernel {
  double constraint = 0.0;
  complex phase_density;
};

inline ClosedFormKernel symplectic_kernel_closed_form(const SymplecticPoint& p1, const SymplecticPoint& p2,
                                                      const SymplecticPoint& p) {
  if (p.nu == 0.0) {
    throw DomainError("symplectic_kernel_closed_form: nu = 0 makes the closed form singular; "
                      "evaluate Tr[D(x1) D(x2) U(x)] instead");
  }
  const double nsum = p1.nu + p2.nu;
  const double msum = p1.mu + p2.mu;
  const double phase = 0.5 * ((p1.nu * p2.mu - p2.nu * p1.mu) + 2.0 * p1.X + 2.0 * p2.X - 2.0 * nsum * p.X / p.nu);
  return {p.mu * nsum - p.nu * msum, std::polar(1.0 / (4.0 * std::numbers::pi * std::numbers::pi), phase)};
}

/// Gaussian test function centered on a point, with separate widths in X and
/// in the direction components.
struct GaussianProbe {
  SymplecticPoint center;
  double width_x = 0.5;
  double width_dir = 0.3;
};

struct SmearedKernelComparison {
  complex closed_form;
  complex trace_definition;
  double relative_difference = 0.0;
};

namespace detail {
inline double gaussian_density(double x, double sigma) {
  return std::exp(-0.5 * x * x / (sigma * sigma)) / (sigma * std::sqrt(2.0 * std::numbers::pi));
}
}  // namespace detail

/// Compares integral h(X) g1(x1) g2(x2) K(x1, x2, (X, mu, nu)) dx1 dx2 dX for the
/// closed-form kernel against the trace definition Tr[A1 A2 h(mu q + nu p)],
/// A_i = integral g_i(x) D(x) dx, on a truncated Fock space. h is a Gaussian in X of
/// width `output_width` around `output.X` at the fixed direction of `output`.
inline SmearedKernelComparison smeared_kernel_comparison(const GaussianProbe& g1, const GaussianProbe& g2,
                                                         const SymplecticPoint& output, double output_width,
                                                         const FockSpace& fock, int nodes = 24) {
  require_direction(output, "smeared_kernel_comparison");
  if (output.nu == 0.0) throw DomainError("smeared_kernel_comparison: output direction needs nu != 0");
  const QuadratureRule gh = gauss_hermite(nodes);
  const double inv_sqrt_pi = 1.0 / std::sqrt(std::numbers::pi);
  const double pi2 = std::numbers::pi * std::numbers::pi;

  // X integrals of the probes against e^{iX}: e^{i Xc} e^{-s^2/2}.
  auto x_factor = [](const GaussianProbe& g) {
    return std::polar(std::exp(-0.5 * g.width_x * g.width_x), g.center.X);
  };
  const complex fx1 = x_factor(g1);
  const complex fx2 = x_factor(g2);

  // Closed form: eliminate mu2 through the delta constraint (Jacobian 1/|nu|)
  // and integrate mu1, nu1, nu2 with Gauss-Hermite against the probe Gaussians.
  complex closed{};
  const double s2 = std::sqrt(2.0);
  for (std::size_t a = 0; a < gh.size(); ++a) {
    const double mu1 = g1.center.mu + s2 * g1.width_dir * gh.nodes[a];
    for (std::size_t b = 0; b < gh.size(); ++b) {
      const double nu1 = g1.center.nu + s2 * g1.width_dir * gh.nodes[b];
      for (std::size_t c = 0; c < gh.size(); ++c) {
        const double nu2 = g2.center.nu + s2 * g2.width_dir * gh.nodes[c];
        const double weight = gh.weights[a] * gh.weights[b] * gh.weights[c] * inv_sqrt_pi * inv_sqrt_pi * inv_sqrt_pi;
        const double nsum = nu1 + nu2;
        const double mu2 = output.mu * nsum / output.nu - mu1;
        const double g_mu2 = detail::gaussian_density(mu2 - g2.center.mu, g2.width_dir);
        const double k = nsum / output.nu;
        const double h_hat = std::exp(-0.5 * output_width * output_width * k * k);
        const double phase = 0.5 * (nu1 * mu2 - nu2 * mu1) - k * output.X;
        closed += weight * g_mu2 / std::abs(output.nu) * h_hat * std::polar(1.0, phase);
      }
    }
  }
  closed *= fx1 * fx2 / (4.0 * pi2);

  // Trace definition.
  auto probe_operator = [&](const GaussianProbe& g, complex fx) {
    OperatorMatrix acc = OperatorMatrix::Zero(fock.n_trunc(), fock.n_trunc());
    for (std::size_t a = 0; a < gh.size(); ++a) {
      const double mu = g.center.mu + s2 * g.width_dir * gh.nodes[a];
      for (std::size_t b = 0; b < gh.size(); ++b) {
        const double nu = g.center.nu + s2 * g.width_dir * gh.nodes[b];
        acc += (gh.weights[a] * gh.weights[b] / std::numbers::pi) * weyl_operator(fock, mu, nu);
      }
    }
    return OperatorMatrix(acc * (fx / (2.0 * std::numbers::pi)));
  };
  const OperatorMatrix a1 = probe_operator(g1, fx1);
  const OperatorMatrix a2 = probe_operator(g2, fx2);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(fock.quadrature(output.mu, output.nu));
  Eigen::VectorXcd h(fock.n_trunc());
  for (int e = 0; e < fock.n_trunc(); ++e)
    h(e) = detail::gaussian_density(solver.eigenvalues()(e) - output.X, output_width);
  const OperatorMatrix h_op = solver.eigenvectors() * h.asDiagonal() * solver.eigenvectors().adjoint();
  const complex traced = trace(a1 * a2 * h_op);

  return {closed, traced, std::abs(closed - traced) / std::max(std::abs(traced), 1e-300)};
}

/// Controls for the w0 * w0 integral: Gauss-Hermite nodes for each X
/// integral, Gauss-Legendre nodes per direction component on [-box, box],
/// and the tolerance on the difference between two quadrature orders.
struct IdempotencyIntegration {
  int x_nodes = 96;
  int direction_nodes = 40;
  int refined_direction_nodes = 56;
  double box = 10.0;
  double tolerance = 1e-6;
};

struct IdempotencyResult {
  SymplecticPoint point;
  double star_value = 0.0;     // (w0 * w0)(point)
  double target = 0.0;         // w0(point)
  double residual = 0.0;       // |star_value - target|
  double quadrature_error = 0.0;
};

namespace detail {

// (w0 * w0)(pt) with the closed-form kernel: X1, X2 by Gauss-Hermite after
// X_i = |(mu_i, nu_i)| t, mu2 eliminated through the delta constraint, and
// (mu1, nu1, nu2) by tensor Gauss-Legendre on [-box, box]^3.
inline complex w0_star_w0(const SymplecticPoint& pt, const QuadratureRule& gh, int direction_nodes, double box) {
  const QuadratureRule gl = gauss_legendre(direction_nodes);
  const double inv_sqrt_pi = 1.0 / std::sqrt(std::numbers::pi);
  // integral w0(X1, mu1, nu1) e^{iX1} dX1 as a function of r1 = |(mu1, nu1)|.
  auto x_integral = [&](double r) {
    complex sum{};
    for (std::size_t k = 0; k < gh.size(); ++k) sum += gh.weights[k] * inv_sqrt_pi * std::polar(1.0, r * gh.nodes[k]);
    return sum;
  };
  std::vector<double> nodes(gl.size());
  std::vector<double> weights(gl.size());
  for (std::size_t k = 0; k < gl.size(); ++k) {
    nodes[k] = box * gl.nodes[k];
    weights[k] = box * gl.weights[k];
  }
  complex total{};
  for (std::size_t a = 0; a < nodes.size(); ++a) {
    const double mu1 = nodes[a];
    for (std::size_t b = 0; b < nodes.size(); ++b) {
      const double nu1 = nodes[b];
      const complex f1 = x_integral(std::hypot(mu1, nu1));
      for (std::size_t c = 0; c < nodes.size(); ++c) {
        const double nu2 = nodes[c];
        const double mu2 = pt.mu * (nu1 + nu2) / pt.nu - mu1;
        const double r2sq = mu2 * mu2 + nu2 * nu2;
        // e^{-r^2/4} < 1e-27 beyond r = 16.
        if (r2sq > 256.0) continue;
        const complex f2 = x_integral(std::sqrt(r2sq));
        const double phase = 0.5 * (nu1 * mu2 - nu2 * mu1) - (nu1 + nu2) * pt.X / pt.nu;
        total += weights[a] * weights[b] * weights[c] * f1 * f2 * std::polar(1.0, phase);
      }
    }
  }
  return total / (std::abs(pt.nu) * 4.0 * std::numbers::pi * std::numbers::pi);
}

}  // namespace detail

/// Evaluates (w0 * w0)(X, mu, nu) with the closed-form kernel and reports the
/// residual against w0 at each sample point.
inline std::vector<IdempotencyResult> star_w0_idempotency(const std::vector<SymplecticPoint>& samples,
                                                          const IdempotencyIntegration& spec = {}) {
  const QuadratureRule gh = gauss_hermite(spec.x_nodes);
  std::vector<IdempotencyResult> out;
  for (const auto& pt : samples) {
    require_direction(pt, "star_w0_idempotency");
    if (pt.nu == 0.0) throw DomainError("star_w0_idempotency: sample points need nu != 0");
    const complex coarse = detail::w0_star_w0(pt, gh, spec.direction_nodes, spec.box);
    const complex fine = detail::w0_star_w0(pt, gh, spec.refined_direction_nodes, spec.box);
    const double qerr = std::abs(fine - coarse);
    if (!(qerr <= spec.tolerance)) {
      throw ConvergenceError("star_w0_idempotency: quadrature estimates differ by " + std::to_string(qerr) +
                             " at (X=" + std::to_string(pt.X) + ", mu=" + std::to_string(pt.mu) +
                             ", nu=" + std::to_string(pt.nu) + "); raise the node counts");
    }
    IdempotencyResult r;
    r.point = pt;
    r.star_value = fine.real();
    r.target = ground_state_tomogram(pt);
    r.residual = std::abs(fine - complex(r.target, 0.0));
    r.quadrature_error = qerr;
    out.push_back(r);
  }
  return out;
}

}  // namespace tomo
