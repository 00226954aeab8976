#pragma once

// Discretized quantization schemes: a finite set of points x, each carrying a
// dequantizer U(x), a quantizer D(x) and a measure weight. On top of that:
// symbols f_A(x) = Tr[A U(x)], reconstruction A = sum_x w(x) f_A(x) D(x), the
// star-product kernel K(x_A, x_B, x) = Tr[D(x_A) D(x_B) U(x)], the quantum
// Poisson bracket, Heisenberg evolution of symbols and intertwining kernels.

#include <Eigen/Dense>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <cstdint>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "tomo/error.hpp"
#include "tomo/operator.hpp"

namespace tomo {

struct SchemePoint {
  int index = 0;
  /// Scheme-specific coordinates, e.g. (2*m1, alpha, beta) or (row, col).
  std::vector<double> label;
};

namespace detail {
inline std::uint64_t next_scheme_id() {
  static std::atomic<std::uint64_t> counter{1};
  return counter.fetch_add(1, std::memory_order_relaxed);
}
}  // namespace detail

/// Immutable discretized scheme. Copies share the id of the original.
class Scheme {
 public:
  Scheme(std::string name, int hilbert_dim, std::vector<std::string> label_names,
         std::vector<SchemePoint> points, std::vector<OperatorMatrix> dequantizers,
         std::vector<OperatorMatrix> quantizers, std::vector<double> weights,
         double round_trip_tolerance)
      : id_(detail::next_scheme_id()),
        name_(std::move(name)),
        hilbert_dim_(hilbert_dim),
        label_names_(std::move(label_names)),
        points_(std::move(points)),
        dequantizers_(std::move(dequantizers)),
        quantizers_(std::move(quantizers)),
        weights_(std::move(weights)),
        round_trip_tolerance_(round_trip_tolerance) {
    const std::size_t n = points_.size();
    if (hilbert_dim_ < 1) throw DomainError("Scheme: hilbert_dim must be positive");
    if (dequantizers_.size() != n || quantizers_.size() != n || weights_.size() != n) {
      throw DimensionError("Scheme: one dequantizer, quantizer and weight required per point");
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (points_[i].index != static_cast<int>(i)) {
        throw DomainError("Scheme: point indices must be 0..n-1 in order");
      }
      for (const auto* m : {&dequantizers_[i], &quantizers_[i]}) {
        if (m->rows() != hilbert_dim_ || m->cols() != hilbert_dim_) {
          throw DimensionError("Scheme: operator at point " + std::to_string(i) +
                               " does not match hilbert_dim " + std::to_string(hilbert_dim_));
        }
      }
      if (!(weights_[i] > 0.0) || !std::isfinite(weights_[i])) {
        throw DomainError("Scheme: weights must be positive and finite");
      }
    }
  }

  std::uint64_t id() const { return id_; }
  const std::string& name() const { return name_; }
  int hilbert_dim() const { return hilbert_dim_; }
  std::size_t size() const { return points_.size(); }
  const std::vector<std::string>& label_names() const { return label_names_; }
  const SchemePoint& point(std::size_t i) const { return points_[i]; }
  const std::vector<SchemePoint>& points() const { return points_; }
  const OperatorMatrix& dequantizer(std::size_t i) const { return dequantizers_[i]; }
  const OperatorMatrix& quantizer(std::size_t i) const { return quantizers_[i]; }
  double weight(std::size_t i) const { return weights_[i]; }
  const std::vector<double>& weights() const { return weights_; }
  double round_trip_tolerance() const { return round_trip_tolerance_; }

 private:
  std::uint64_t id_;
  std::string name_;
  int hilbert_dim_;
  std::vector<std::string> label_names_;
  std::vector<SchemePoint> points_;
  std::vector<OperatorMatrix> dequantizers_;
  std::vector<OperatorMatrix> quantizers_;
  std::vector<double> weights_;
  double round_trip_tolerance_;
};

/// Complex values aligned with the points of one scheme.
class Symbol {
 public:
  Symbol(std::uint64_t scheme_id, Eigen::VectorXcd values) : scheme_id_(scheme_id), values_(std::move(values)) {}

  static Symbol zero(const Scheme& s) { return {s.id(), Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(s.size()))}; }
  static Symbol constant(const Scheme& s, complex c) {
    return {s.id(), Eigen::VectorXcd::Constant(static_cast<Eigen::Index>(s.size()), c)};
  }

  std::uint64_t scheme_id() const { return scheme_id_; }
  const Eigen::VectorXcd& values() const { return values_; }
  std::size_t size() const { return static_cast<std::size_t>(values_.size()); }
  complex operator[](std::size_t i) const { return values_(static_cast<Eigen::Index>(i)); }

  Symbol& operator+=(const Symbol& o) {
    require_same(o);
    values_ += o.values_;
    return *this;
  }
  Symbol& operator-=(const Symbol& o) {
    require_same(o);
    values_ -= o.values_;
    return *this;
  }
  Symbol& operator*=(complex c) {
    values_ *= c;
    return *this;
  }
  friend Symbol operator+(Symbol a, const Symbol& b) { return a += b; }
  friend Symbol operator-(Symbol a, const Symbol& b) { return a -= b; }
  friend Symbol operator*(complex c, Symbol a) { return a *= c; }

  /// Largest |difference| between two symbols of the same scheme.
  double distance(const Symbol& o) const {
    require_same(o);
    return values_.size() == 0 ? 0.0 : (values_ - o.values_).cwiseAbs().maxCoeff();
  }
  double sup_norm() const { return values_.size() == 0 ? 0.0 : values_.cwiseAbs().maxCoeff(); }

 private:
  void require_same(const Symbol& o) const {
    if (o.scheme_id_ != scheme_id_ || o.values_.size() != values_.size()) {
      throw SchemeMismatch("Symbol: operands belong to different schemes");
    }
  }

  std::uint64_t scheme_id_;
  Eigen::VectorXcd values_;
};

inline void require_symbol_of(const Symbol& f, const Scheme& s, const char* what) {
  if (f.scheme_id() != s.id() || f.size() != s.size()) {
    throw SchemeMismatch(std::string(what) + ": symbol does not belong to scheme '" + s.name() + "'");
  }
}

inline Symbol symbol_of(const OperatorMatrix& a, const Scheme& s) {
  require_square(a, "symbol_of");
  if (a.rows() != s.hilbert_dim()) {
    throw DimensionError("symbol_of: operator dimension " + std::to_string(a.rows()) +
                         " does not match scheme dimension " + std::to_string(s.hilbert_dim()));
  }
  Eigen::VectorXcd values(static_cast<Eigen::Index>(s.size()));
  for (std::size_t i = 0; i < s.size(); ++i) values(static_cast<Eigen::Index>(i)) = trace_of_product(a, s.dequantizer(i));
  return {s.id(), std::move(values)};
}

inline OperatorMatrix operator_of(const Symbol& f, const Scheme& s) {
  require_symbol_of(f, s, "operator_of");
  OperatorMatrix a = OperatorMatrix::Zero(s.hilbert_dim(), s.hilbert_dim());
  for (std::size_t i = 0; i < s.size(); ++i) a += (s.weight(i) * f[i]) * s.quantizer(i);
  return a;
}

/// Order in which the two quantizers enter the kernel trace. The left factor
/// of an operator product must come first; the swapped order exists only as a
/// negative control for the verification suites.
enum class KernelOrder { left_first, swapped };

#ifdef TOMO_SWAP_KERNEL_ORDER
inline constexpr KernelOrder kDefaultKernelOrder = KernelOrder::swapped;
#else
inline constexpr KernelOrder kDefaultKernelOrder = KernelOrder::left_first;
#endif

/// K(a, b, c) over triples of point indices. Dense storage keeps every entry
/// at offset (a*n + b)*n + c; sparse storage lists exactly the entries whose
/// magnitude exceeds the threshold.
class KernelTensor {
 public:
  struct Entry {
    std::int32_t a;
    std::int32_t b;
    std::int32_t c;
    complex value;
  };

  static constexpr double kDefaultSparseThreshold = 1e-14;

  KernelTensor(std::uint64_t scheme_id, std::size_t points, std::vector<complex> dense)
      : scheme_id_(scheme_id), points_(points), dense_(std::move(dense)) {
    if (dense_.size() != points_ * points_ * points_) throw DimensionError("KernelTensor: dense storage size");
    for (const auto& v : dense_)
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) throw DomainError("KernelTensor: non-finite entry");
  }

  std::uint64_t scheme_id() const { return scheme_id_; }
  std::size_t points() const { return points_; }
  bool is_sparse() const { return sparse_; }
  double threshold() const { return threshold_; }
  const std::vector<complex>& dense() const { return dense_; }
  const std::vector<Entry>& entries() const { return entries_; }

  complex at(std::size_t a, std::size_t b, std::size_t c) const {
    if (!sparse_) return dense_[(a * points_ + b) * points_ + c];
    for (const auto& e : entries_)
      if (e.a == static_cast<std::int32_t>(a) && e.b == static_cast<std::int32_t>(b) &&
          e.c == static_cast<std::int32_t>(c))
        return e.value;
    return {0.0, 0.0};
  }

  /// Number of stored (dense) or listed (sparse) entries.
  std::size_t stored() const { return sparse_ ? entries_.size() : dense_.size(); }

  /// Entries with |K| <= threshold across the whole tensor.
  std::size_t count_below(double threshold) const {
    if (sparse_) {
      const std::size_t listed =
          std::count_if(entries_.begin(), entries_.end(), [&](const Entry& e) { return std::abs(e.value) > threshold; });
      return points_ * points_ * points_ - listed;
    }
    return static_cast<std::size_t>(
        std::count_if(dense_.begin(), dense_.end(), [&](const complex& v) { return std::abs(v) <= threshold; }));
  }

  /// Sparse copy holding only the entries with |K| > threshold.
  KernelTensor to_sparse(double threshold = kDefaultSparseThreshold) const {
    KernelTensor out = *this;
    if (sparse_) return out;
    out.sparse_ = true;
    out.threshold_ = threshold;
    const auto n = static_cast<std::int32_t>(points_);
    for (std::int32_t a = 0; a < n; ++a)
      for (std::int32_t b = 0; b < n; ++b)
        for (std::int32_t c = 0; c < n; ++c) {
          const complex v = dense_[(static_cast<std::size_t>(a) * points_ + b) * points_ + c];
          if (std::abs(v) > threshold) out.entries_.push_back({a, b, c, v});
        }
    out.dense_.clear();
    out.dense_.shrink_to_fit();
    return out;
  }

  static KernelTensor from_entries(std::uint64_t scheme_id, std::size_t points, double threshold,
                                   std::vector<Entry> entries) {
    KernelTensor out(scheme_id, 0, {});
    out.points_ = points;
    out.sparse_ = true;
    out.threshold_ = threshold;
    for (const auto& e : entries) {
      if (e.a < 0 || e.b < 0 || e.c < 0 || static_cast<std::size_t>(std::max({e.a, e.b, e.c})) >= points) {
        throw DimensionError("KernelTensor: entry index out of range");
      }
      if (!std::isfinite(e.value.real()) || !std::isfinite(e.value.imag())) {
        throw DomainError("KernelTensor: non-finite entry");
      }
    }
    out.entries_ = std::move(entries);
    return out;
  }

 private:
  std::uint64_t scheme_id_;
  std::size_t points_;
  bool sparse_ = false;
  double threshold_ = 0.0;
  std::vector<complex> dense_;
  std::vector<Entry> entries_;
};

namespace detail {

template <typename Fn>
void parallel_for(std::size_t count, int threads, Fn&& body) {
  const auto workers = static_cast<std::size_t>(std::max(1, threads));
  if (workers == 1 || count < 2) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < count; i += workers) body(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace detail

/// Dense kernel K(a, b, c) = Tr[D(x_a) D(x_b) U(x_c)]. Each entry is summed in
/// a fixed order, so the result does not depend on `threads`.
inline KernelTensor star_kernel(const Scheme& s, int threads = 1, KernelOrder order = kDefaultKernelOrder) {
  const std::size_t n = s.size();
  std::vector<complex> dense(n * n * n);
  detail::parallel_for(n, threads, [&](std::size_t a) {
    for (std::size_t b = 0; b < n; ++b) {
      const OperatorMatrix product = order == KernelOrder::left_first ? OperatorMatrix(s.quantizer(a) * s.quantizer(b))
                                                                      : OperatorMatrix(s.quantizer(b) * s.quantizer(a));
      complex* row = dense.data() + (a * n + b) * n;
      for (std::size_t c = 0; c < n; ++c) row[c] = trace_of_product(product, s.dequantizer(c));
    }
  });
  return {s.id(), n, std::move(dense)};
}

inline void require_kernel_of(const KernelTensor& k, const Scheme& s, const char* what) {
  if (k.scheme_id() != s.id() || k.points() != s.size()) {
    throw SchemeMismatch(std::string(what) + ": kernel does not belong to scheme '" + s.name() + "'");
  }
}

/// (fA * fB)(x) = sum_{a,b} w_a w_b fA(x_a) fB(x_b) K(a, b, x).
inline Symbol star(const Symbol& fa, const Symbol& fb, const KernelTensor& k, const Scheme& s) {
  require_symbol_of(fa, s, "star");
  require_symbol_of(fb, s, "star");
  require_kernel_of(k, s, "star");
  const std::size_t n = s.size();
  std::vector<complex> ga(n);
  std::vector<complex> gb(n);
  for (std::size_t i = 0; i < n; ++i) {
    ga[i] = s.weight(i) * fa[i];
    gb[i] = s.weight(i) * fb[i];
  }
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(n));
  if (k.is_sparse()) {
    for (const auto& e : k.entries()) {
      out(e.c) += ga[static_cast<std::size_t>(e.a)] * gb[static_cast<std::size_t>(e.b)] * e.value;
    }
  } else {
    const complex* data = k.dense().data();
    for (std::size_t a = 0; a < n; ++a) {
      if (ga[a] == complex{}) continue;
      for (std::size_t b = 0; b < n; ++b) {
        const complex coef = ga[a] * gb[b];
        if (coef == complex{}) continue;
        const complex* row = data + (a * n + b) * n;
        for (std::size_t c = 0; c < n; ++c) out(static_cast<Eigen::Index>(c)) += coef * row[c];
      }
    }
  }
  return {s.id(), std::move(out)};
}

/// Quantum Poisson bracket {fA, fB}_* = fA * fB - fB * fA.
inline Symbol star_bracket(const Symbol& fa, const Symbol& fb, const KernelTensor& k, const Scheme& s) {
  return star(fa, fb, k, s) - star(fb, fa, k, s);
}

/// Integrates d f_A / dt = i {f_H, f_A}_* over [0, t] with `steps` classical
/// Runge-Kutta steps.
inline Symbol heisenberg_evolve(const Symbol& fa0, const Symbol& fh, double t, int steps, const KernelTensor& k,
                                const Scheme& s) {
  require_symbol_of(fa0, s, "heisenberg_evolve");
  require_symbol_of(fh, s, "heisenberg_evolve");
  require_kernel_of(k, s, "heisenberg_evolve");
  if (steps < 1) throw DomainError("heisenberg_evolve: steps must be positive");
  if (!std::isfinite(t)) throw DomainError("heisenberg_evolve: non-finite time");
  const complex i_unit{0.0, 1.0};
  const double h = t / steps;
  auto rhs = [&](const Symbol& f) { return i_unit * star_bracket(fh, f, k, s); };
  Symbol f = fa0;
  for (int step = 0; step < steps; ++step) {
    const Symbol k1 = rhs(f);
    const Symbol k2 = rhs(f + complex(0.5 * h) * k1);
    const Symbol k3 = rhs(f + complex(0.5 * h) * k2);
    const Symbol k4 = rhs(f + complex(h) * k3);
    f += complex(h / 6.0) * (k1 + complex(2.0) * k2 + complex(2.0) * k3 + k4);
    if (!f.values().allFinite()) {
      throw ConvergenceError("heisenberg_evolve: non-finite symbol at step " + std::to_string(step + 1) +
                             "; the step size " + std::to_string(h) + " is too large");
    }
  }
  return f;
}

/// Kernel converting symbols of `source` into symbols of `target`:
/// entries(y, x) = Tr[D_source(x) U_target(y)].
struct IntertwinerMatrix {
  std::uint64_t source_id = 0;
  std::uint64_t target_id = 0;
  Eigen::MatrixXcd entries;        // rows: target points, cols: source points
  Eigen::VectorXd source_weights;  // measure of the source scheme
};

inline IntertwinerMatrix intertwine_kernel(const Scheme& source, const Scheme& target) {
  if (source.hilbert_dim() != target.hilbert_dim()) {
    throw DimensionError("intertwine_kernel: schemes act on spaces of dimension " +
                         std::to_string(source.hilbert_dim()) + " and " + std::to_string(target.hilbert_dim()));
  }
  IntertwinerMatrix w;
  w.source_id = source.id();
  w.target_id = target.id();
  w.entries.resize(static_cast<Eigen::Index>(target.size()), static_cast<Eigen::Index>(source.size()));
  w.source_weights.resize(static_cast<Eigen::Index>(source.size()));
  for (std::size_t x = 0; x < source.size(); ++x) {
    w.source_weights(static_cast<Eigen::Index>(x)) = source.weight(x);
    for (std::size_t y = 0; y < target.size(); ++y) {
      w.entries(static_cast<Eigen::Index>(y), static_cast<Eigen::Index>(x)) =
          trace_of_product(source.quantizer(x), target.dequantizer(y));
    }
  }
  return w;
}

inline Symbol convert_symbol(const Symbol& f, const IntertwinerMatrix& w) {
  if (f.scheme_id() != w.source_id || static_cast<Eigen::Index>(f.size()) != w.entries.cols()) {
    throw SchemeMismatch("convert_symbol: symbol does not belong to the intertwiner's source scheme");
  }
  Eigen::VectorXcd weighted = f.values().cwiseProduct(w.source_weights.cast<complex>());
  return {w.target_id, w.entries * weighted};
}

/// The scheme of plain matrix elements: the symbol at point (r, c) is A_{rc},
/// with U = |c><r|, D = |r><c| and unit weights.
inline Scheme matrix_element_scheme(int dim) {
  if (dim < 1) throw DomainError("matrix_element_scheme: dim must be >= 1");
  std::vector<SchemePoint> points;
  std::vector<OperatorMatrix> deq;
  std::vector<OperatorMatrix> quant;
  std::vector<double> weights;
  for (int r = 0; r < dim; ++r) {
    for (int c = 0; c < dim; ++c) {
      points.push_back({static_cast<int>(points.size()), {static_cast<double>(r), static_cast<double>(c)}});
      deq.push_back(basis_operator(dim, c, r));
      quant.push_back(basis_operator(dim, r, c));
      weights.push_back(1.0);
    }
  }
  return {"matrix-element", dim, {"row", "col"}, std::move(points), std::move(deq), std::move(quant),
          std::move(weights), 1e-14};
}

/// Operators used for reproducibility checks: every |i><j| for dim <= 16,
/// otherwise `random_count` seeded random Hermitian matrices.
inline std::vector<OperatorMatrix> test_operator_family(int dim, std::uint64_t seed = 7, int random_count = 20) {
  std::vector<OperatorMatrix> family;
  if (dim <= 16) {
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) family.push_back(basis_operator(dim, i, j));
  } else {
    for (int k = 0; k < random_count; ++k) family.push_back(random_hermitian(dim, seed + static_cast<std::uint64_t>(k)));
  }
  return family;
}

/// Worst max-entry error of operator_of(symbol_of(A)) - A over a family.
inline double round_trip_error(const Scheme& s, const std::vector<OperatorMatrix>& family) {
  double worst = 0.0;
  for (const auto& a : family) worst = std::max(worst, max_abs_diff(operator_of(symbol_of(a, s), s), a));
  return worst;
}

}  // namespace tomo
