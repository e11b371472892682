#pragma once

// Markov operators on L2(pi) stored as dense row-stochastic tables.
//
// Orientation: a kernel K acts on functions by (K f)(x) = sum_y K(x,y) f(y)
// and on distributions by mu -> mu^T K. A chain that first applies kernel A
// and then kernel B has kernel A*B; on functions that is f -> A(B f).
// `dsg(order, pi)` is the chain that updates coordinate order[0] first, so
// its kernel is K_{order[0]} K_{order[1]} ... K_{order[d-1]} and as a
// function-space operator it is the product P_{order[0]} ... P_{order[d-1]}.
// Reversing the order yields the L2(pi) adjoint.

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <numeric>
#include <string>
#include <variant>
#include <vector>

#include "gibbs/errors.hpp"
#include "gibbs/measure.hpp"

namespace gibbs {

inline constexpr Index kDefaultStateCap = 20000;

inline void check_state_cap(Index states, Index cap = kDefaultStateCap) {
  if (states > cap) {
    throw CapExceeded(std::to_string(states) + " states exceed the dense cap of " +
                      std::to_string(cap));
  }
}

template <typename Scalar>
class MarkovOperator {
 public:
  static constexpr double kRowTolerance = 1e-10;
  static constexpr double kStationarityTolerance = 1e-10;
  static constexpr double kClampTolerance = 1e-14;

  MarkovOperator(Matrix<Scalar> kernel, Vector<Scalar> stationary, std::string label,
                 std::vector<int> dims = {})
      : kernel_(std::move(kernel)),
        stationary_(std::move(stationary)),
        label_(std::move(label)),
        dims_(std::move(dims)) {
    const Index n = kernel_.rows();
    if (kernel_.cols() != n || stationary_.size() != n) {
      throw DimensionError("kernel is " + std::to_string(kernel_.rows()) + "x" +
                           std::to_string(kernel_.cols()) + ", stationary law has " +
                           std::to_string(stationary_.size()) + " entries");
    }
    for (Index x = 0; x < n; ++x) {
      for (Index y = 0; y < n; ++y) {
        Scalar& v = kernel_(x, y);
        if (v < Scalar(0)) {
          if (v < Scalar(-kClampTolerance)) {
            throw ValidationError("kernel entry (" + std::to_string(x) + "," + std::to_string(y) +
                                  ") is negative: " + std::to_string(static_cast<double>(v)));
          }
          v = Scalar(0);
        }
      }
      const double row = static_cast<double>(kernel_.row(x).sum());
      if (std::abs(row - 1.0) > kRowTolerance) {
        throw ValidationError("kernel row " + std::to_string(x) + " sums to " + std::to_string(row));
      }
    }
    const Vector<Scalar> moved = kernel_.transpose() * stationary_;
    const double drift = static_cast<double>((moved - stationary_).cwiseAbs().maxCoeff());
    if (drift > kStationarityTolerance) {
      throw ValidationError("stationarity violated for '" + label_ +
                            "': max |pi^T P - pi^T| = " + std::to_string(drift));
    }
  }

  const Matrix<Scalar>& kernel() const { return kernel_; }
  const Vector<Scalar>& stationary() const { return stationary_; }
  const std::string& label() const { return label_; }
  const std::vector<int>& dims() const { return dims_; }
  Index states() const { return kernel_.rows(); }

  std::vector<Index> support() const {
    std::vector<Index> out;
    for (Index x = 0; x < stationary_.size(); ++x) {
      if (stationary_[x] > Scalar(0)) out.push_back(x);
    }
    return out;
  }

 private:
  Matrix<Scalar> kernel_;
  Vector<Scalar> stationary_;
  std::string label_;
  std::vector<int> dims_;
};

// ---------------------------------------------------------------------------
// Scan specifications

struct DeterministicScan {
  std::vector<int> order;  ///< 0-based coordinates, updated front to back
};

struct RandomScan {
  std::vector<double> weights;
};

using ScanSpec = std::variant<DeterministicScan, RandomScan>;

inline void validate_order(const std::vector<int>& order, int d) {
  if (d < 2) throw ValidationError("Gibbs samplers need d >= 2");
  if (static_cast<int>(order.size()) != d) {
    throw ValidationError("scan order has " + std::to_string(order.size()) +
                          " entries, expected " + std::to_string(d));
  }
  std::vector<int> sorted = order;
  std::sort(sorted.begin(), sorted.end());
  for (int k = 0; k < d; ++k) {
    if (sorted[static_cast<std::size_t>(k)] != k) {
      throw ValidationError("scan order is not a permutation of the coordinates");
    }
  }
}

inline void validate_weights(const std::vector<double>& w, int d) {
  if (static_cast<int>(w.size()) != d) {
    throw ValidationError("got " + std::to_string(w.size()) + " weights, expected " +
                          std::to_string(d));
  }
  double total = 0;
  for (double v : w) {
    if (!(v > 0)) throw ValidationError("random-scan weights must be strictly positive");
    total += v;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw ValidationError("random-scan weights sum to " + std::to_string(total));
  }
}

inline std::vector<double> uniform_weights(int d) {
  return std::vector<double>(static_cast<std::size_t>(d), 1.0 / d);
}

inline std::vector<int> identity_order(int d) {
  std::vector<int> order(static_cast<std::size_t>(d));
  std::iota(order.begin(), order.end(), 0);
  return order;
}

/// "dsg:1,2,3" / "rsg:0.5,0.25,0.25" with 1-based coordinates.
inline std::string describe(const ScanSpec& scan) {
  std::string out;
  if (const auto* ds = std::get_if<DeterministicScan>(&scan)) {
    out = "dsg:";
    for (std::size_t k = 0; k < ds->order.size(); ++k) {
      out += (k ? "," : "") + std::to_string(ds->order[k] + 1);
    }
  } else {
    const auto& w = std::get<RandomScan>(scan).weights;
    out = "rsg:";
    char buf[32];
    for (std::size_t k = 0; k < w.size(); ++k) {
      std::snprintf(buf, sizeof buf, "%.17g", w[k]);
      out += (k ? "," : "") + std::string(buf);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Construction

/// Kernel whose every row is pi (the operator Pi).
template <typename Scalar>
MarkovOperator<Scalar> stationary_kernel(const TargetDistribution<Scalar>& pi) {
  const Index n = pi.total_states();
  Matrix<Scalar> k = Vector<Scalar>::Ones(n) * pi.pmf().transpose();
  return MarkovOperator<Scalar>(std::move(k), pi.pmf(), "Pi", pi.space().dims());
}

/// Resample coordinate i from pi(. | x_{-i}). A zero-mass fiber (partial
/// targets only) is left in place.
template <typename Scalar>
MarkovOperator<Scalar> small_step(int i, const TargetDistribution<Scalar>& pi,
                                  Index cap = kDefaultStateCap) {
  const ProductSpace& space = pi.space();
  space.check_coordinate(i);
  check_state_cap(space.total_states(), cap);
  const Index n_states = space.total_states();
  const Index stride = space.stride(i);
  const int n = space.cardinality(i);
  Matrix<Scalar> k = Matrix<Scalar>::Zero(n_states, n_states);
  for (Index base = 0; base < n_states; ++base) {
    if (space.coordinate(base, i) != 0) continue;
    Scalar mass(0);
    for (int v = 0; v < n; ++v) mass += pi(base + v * stride);
    for (int from = 0; from < n; ++from) {
      const Index x = base + from * stride;
      if (mass <= Scalar(0)) {
        k(x, x) = Scalar(1);
        continue;
      }
      for (int to = 0; to < n; ++to) k(x, base + to * stride) = pi(base + to * stride) / mass;
    }
  }
  return MarkovOperator<Scalar>(std::move(k), pi.pmf(), "P_" + std::to_string(i + 1),
                                space.dims());
}

/// Kernel product: the chain that moves by `first`, then by `second`.
template <typename Scalar>
MarkovOperator<Scalar> compose(const MarkovOperator<Scalar>& first,
                               const MarkovOperator<Scalar>& second, std::string label = {}) {
  if (first.states() != second.states()) throw DimensionError("compose: state counts differ");
  if (label.empty()) label = first.label() + "*" + second.label();
  return MarkovOperator<Scalar>(first.kernel() * second.kernel(), first.stationary(),
                                std::move(label), first.dims());
}

namespace detail {

template <typename Scalar>
Matrix<Scalar> sweep_kernel(const std::vector<int>& order, const TargetDistribution<Scalar>& pi,
                            Index cap) {
  Matrix<Scalar> k = small_step(order.front(), pi, cap).kernel();
  for (std::size_t s = 1; s < order.size(); ++s) k = k * small_step(order[s], pi, cap).kernel();
  return k;
}

inline std::string order_label(const std::vector<int>& order) {
  std::string out = "(";
  for (std::size_t k = 0; k < order.size(); ++k) {
    out += (k ? "," : "") + std::to_string(order[k] + 1);
  }
  return out + ")";
}

}  // namespace detail

/// Deterministic-scan Gibbs sampler updating order[0] first (see file header).
template <typename Scalar>
MarkovOperator<Scalar> dsg(const std::vector<int>& order, const TargetDistribution<Scalar>& pi,
                           Index cap = kDefaultStateCap) {
  validate_order(order, pi.dimension());
  return MarkovOperator<Scalar>(detail::sweep_kernel(order, pi, cap), pi.pmf(),
                                "DSG order=" + detail::order_label(order), pi.space().dims());
}

/// Random-scan Gibbs sampler sum_i w_i P_i.
template <typename Scalar>
MarkovOperator<Scalar> rsg(const std::vector<double>& weights,
                           const TargetDistribution<Scalar>& pi, Index cap = kDefaultStateCap) {
  validate_weights(weights, pi.dimension());
  const Index n = pi.total_states();
  check_state_cap(n, cap);
  Matrix<Scalar> k = Matrix<Scalar>::Zero(n, n);
  for (int i = 0; i < pi.dimension(); ++i) {
    k += Scalar(weights[static_cast<std::size_t>(i)]) * small_step(i, pi, cap).kernel();
  }
  return MarkovOperator<Scalar>(std::move(k), pi.pmf(), "RSG " + describe(RandomScan{weights}),
                                pi.space().dims());
}

template <typename Scalar>
MarkovOperator<Scalar> build(const ScanSpec& scan, const TargetDistribution<Scalar>& pi,
                             Index cap = kDefaultStateCap) {
  if (const auto* ds = std::get_if<DeterministicScan>(&scan)) return dsg(ds->order, pi, cap);
  return rsg(std::get<RandomScan>(scan).weights, pi, cap);
}

/// Palindromic sweep P_{o1} ... P_{od} ... P_{o1}; self-adjoint in L2(pi).
template <typename Scalar>
MarkovOperator<Scalar> symmetrized_sweep(const std::vector<int>& order,
                                         const TargetDistribution<Scalar>& pi,
                                         Index cap = kDefaultStateCap) {
  validate_order(order, pi.dimension());
  std::vector<int> palindrome = order;
  palindrome.insert(palindrome.end(), order.rbegin() + 1, order.rend());
  return MarkovOperator<Scalar>(detail::sweep_kernel(palindrome, pi, cap), pi.pmf(),
                                "SYM order=" + detail::order_label(order), pi.space().dims());
}

/// Time reversal: pi(x) P*(x,y) = pi(y) P(y,x). Rows of zero-mass states
/// (which carry no L2(pi) information) are copied from P.
template <typename Scalar>
MarkovOperator<Scalar> adjoint(const MarkovOperator<Scalar>& p) {
  const Vector<Scalar>& pi = p.stationary();
  Matrix<Scalar> k = p.kernel();
  for (Index x = 0; x < p.states(); ++x) {
    if (pi[x] <= Scalar(0)) continue;
    for (Index y = 0; y < p.states(); ++y) k(x, y) = pi[y] * p.kernel()(y, x) / pi[x];
  }
  return MarkovOperator<Scalar>(std::move(k), pi, p.label() + "*", p.dims());
}

/// Detailed balance |pi(x)P(x,y) - pi(y)P(y,x)| <= tol for all x, y.
template <typename Scalar>
bool is_reversible(const MarkovOperator<Scalar>& p, double tol = 1e-10) {
  const Matrix<Scalar> flow = p.stationary().asDiagonal() * p.kernel();
  return static_cast<double>((flow - flow.transpose()).cwiseAbs().maxCoeff()) <= tol;
}

/// (P + P*) / 2.
template <typename Scalar>
MarkovOperator<Scalar> additive_reversibilization(const MarkovOperator<Scalar>& p) {
  const MarkovOperator<Scalar> star = adjoint(p);
  return MarkovOperator<Scalar>(Scalar(0.5) * (p.kernel() + star.kernel()), p.stationary(),
                                "(" + p.label() + "+" + star.label() + ")/2", p.dims());
}

// ---------------------------------------------------------------------------
// Spectral quantities

/// D^{1/2} (P - Pi) D^{-1/2} restricted to the support of pi. Its Euclidean
/// geometry is the L2(pi) geometry of P - Pi.
template <typename Scalar>
Matrix<Scalar> centered_conjugate(const MarkovOperator<Scalar>& p) {
  using std::sqrt;
  const std::vector<Index> sup = p.support();
  const Index m = static_cast<Index>(sup.size());
  const Vector<Scalar>& pi = p.stationary();
  Matrix<Scalar> a(m, m);
  for (Index r = 0; r < m; ++r) {
    for (Index c = 0; c < m; ++c) {
      const Index x = sup[static_cast<std::size_t>(r)];
      const Index y = sup[static_cast<std::size_t>(c)];
      a(r, c) = sqrt(pi[x]) * (p.kernel()(x, y) - pi[y]) / sqrt(pi[y]);
    }
  }
  return a;
}

template <typename Scalar>
Scalar largest_singular_value(const Matrix<Scalar>& a) {
  if (a.size() == 0) return Scalar(0);
  Eigen::BDCSVD<Matrix<Scalar>> svd(a);
  return svd.singularValues()(0);
}

/// ||P - Pi|| on L2(pi).
template <typename Scalar>
Scalar l2_norm_centered(const MarkovOperator<Scalar>& p) {
  return largest_singular_value(centered_conjugate(p));
}

/// Largest eigenvalue modulus of P - Pi. Reversible kernels use the symmetric
/// solver on the conjugated table; others a general real eigen-solver.
template <typename Scalar>
Scalar spectral_radius_centered(const MarkovOperator<Scalar>& p) {
  const Matrix<Scalar> a = centered_conjugate(p);
  if (a.size() == 0) return Scalar(0);
  if (is_reversible(p, 1e-12)) {
    const Matrix<Scalar> sym = Scalar(0.5) * (a + a.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> es(sym, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) {
      throw NumericError("symmetric eigen-solver failed for '" + p.label() + "' (" +
                         std::to_string(a.rows()) + " states)");
    }
    return es.eigenvalues().cwiseAbs().maxCoeff();
  }
  Eigen::EigenSolver<Matrix<Scalar>> es(a, false);
  if (es.info() != Eigen::Success) {
    throw NumericError("general eigen-solver did not converge for '" + p.label() + "' (" +
                       std::to_string(a.rows()) + " states)");
  }
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

/// [||P^n - Pi|| for n = 1..n_max].
template <typename Scalar>
std::vector<Scalar> power_norm_sequence(const MarkovOperator<Scalar>& p, int n_max) {
  if (n_max < 1) throw ValidationError("n_max must be at least 1");
  const Matrix<Scalar> a = centered_conjugate(p);
  std::vector<Scalar> out;
  out.reserve(static_cast<std::size_t>(n_max));
  Matrix<Scalar> power = a;
  for (int n = 1; n <= n_max; ++n) {
    if (n > 1) power = power * a;
    out.push_back(largest_singular_value(power));
  }
  return out;
}

/// Exact ||P^n(x0, .) - pi||_TV for n = 1..n_max.
template <typename Scalar>
std::vector<Scalar> tv_distance_decay(const MarkovOperator<Scalar>& p, Index x0, int n_max) {
  if (x0 < 0 || x0 >= p.states()) throw DimensionError("initial state out of range");
  std::vector<Scalar> out;
  if (n_max <= 0) return out;
  Eigen::Matrix<Scalar, 1, Eigen::Dynamic> row = p.kernel().row(x0);
  for (int n = 1; n <= n_max; ++n) {
    if (n > 1) row = row * p.kernel();
    out.push_back(Scalar(0.5) * (row.transpose() - p.stationary()).cwiseAbs().sum());
  }
  return out;
}

/// The numbers carried by a SpectralReport for one operator.
template <typename Scalar>
struct SpectralSummary {
  std::string label;
  Scalar l2_norm_centered;
  Scalar spectral_radius_centered;
  Scalar spectral_gap;
  bool reversible;
};

template <typename Scalar>
SpectralSummary<Scalar> summarize(const MarkovOperator<Scalar>& p) {
  const Scalar norm = l2_norm_centered(p);
  const Scalar rho = spectral_radius_centered(p);
  return {p.label(), norm, rho, Scalar(1) - rho, is_reversible(p)};
}

extern template double l2_norm_centered<double>(const MarkovOperator<double>&);
extern template double spectral_radius_centered<double>(const MarkovOperator<double>&);
extern template std::vector<double> power_norm_sequence<double>(const MarkovOperator<double>&,
                                                                int);

}  // namespace gibbs
