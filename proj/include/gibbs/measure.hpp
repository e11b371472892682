#pragma once

// Finite product state spaces, target distributions on them, and the
// pi-weighted function-space geometry (inner product, mean projection,
// coordinate-wise conditional expectations).
//
// Flat indexing is row-major: the last coordinate varies fastest, so the
// state (x_1, ..., x_d) sits at sum_i x_i * stride_i with
// stride_d = 1, stride_i = n_{i+1} * stride_{i+1}.

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "gibbs/errors.hpp"

namespace gibbs {

using Index = Eigen::Index;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// A function on the state space, stored by flat state.
template <typename Scalar>
using PiFunction = Vector<Scalar>;

class ProductSpace {
 public:
  explicit ProductSpace(std::vector<int> dims) : dims_(std::move(dims)) {
    if (dims_.size() < 2) {
      throw ValidationError("product space needs at least two coordinates, got " +
                            std::to_string(dims_.size()));
    }
    strides_.assign(dims_.size(), 1);
    total_ = 1;
    for (std::size_t k = dims_.size(); k-- > 0;) {
      if (dims_[k] < 1) {
        throw ValidationError("coordinate " + std::to_string(k) + " has cardinality " +
                              std::to_string(dims_[k]));
      }
      strides_[k] = total_;
      total_ *= dims_[k];
    }
  }

  int dimension() const { return static_cast<int>(dims_.size()); }
  int cardinality(int i) const { return dims_.at(static_cast<std::size_t>(i)); }
  const std::vector<int>& dims() const { return dims_; }
  Index total_states() const { return total_; }
  Index stride(int i) const { return strides_.at(static_cast<std::size_t>(i)); }

  int coordinate(Index flat, int i) const {
    return static_cast<int>((flat / strides_[static_cast<std::size_t>(i)]) %
                            dims_[static_cast<std::size_t>(i)]);
  }

  Index flat(std::span<const int> multi) const {
    if (multi.size() != dims_.size()) {
      throw DimensionError("multi-index has " + std::to_string(multi.size()) +
                           " entries, space has " + std::to_string(dims_.size()));
    }
    Index out = 0;
    for (std::size_t k = 0; k < dims_.size(); ++k) {
      if (multi[k] < 0 || multi[k] >= dims_[k]) {
        throw DimensionError("coordinate " + std::to_string(k) + " out of range");
      }
      out += multi[k] * strides_[k];
    }
    return out;
  }

  std::vector<int> multi(Index flat) const {
    check_state(flat);
    std::vector<int> out(dims_.size());
    for (std::size_t k = 0; k < dims_.size(); ++k) out[k] = coordinate(flat, static_cast<int>(k));
    return out;
  }

  void check_state(Index flat) const {
    if (flat < 0 || flat >= total_) {
      throw DimensionError("state " + std::to_string(flat) + " outside [0, " +
                           std::to_string(total_) + ")");
    }
  }

  void check_coordinate(int i) const {
    if (i < 0 || i >= dimension()) {
      throw DimensionError("coordinate index " + std::to_string(i) + " outside [0, " +
                           std::to_string(dimension()) + ")");
    }
  }

  friend bool operator==(const ProductSpace& a, const ProductSpace& b) { return a.dims_ == b.dims_; }

 private:
  std::vector<int> dims_;
  std::vector<Index> strides_;
  Index total_ = 0;
};

/// Whether zero-mass states are admissible. Only named model families at
/// their degenerate parameter values produce `partial` targets; every L2(pi)
/// computation then runs on the support.
enum class Support { full, partial };

template <typename Scalar>
class TargetDistribution {
 public:
  static constexpr double kSumTolerance = 1e-12;
  static constexpr double kRenormalizeWindow = 1e-6;

  TargetDistribution(ProductSpace space, Vector<Scalar> pmf, Support policy = Support::full)
      : space_(std::move(space)), pmf_(std::move(pmf)) {
    if (pmf_.size() != space_.total_states()) {
      throw DimensionError("pmf has " + std::to_string(pmf_.size()) + " entries, space has " +
                           std::to_string(space_.total_states()) + " states");
    }
    for (Index x = 0; x < pmf_.size(); ++x) {
      const Scalar v = pmf_[x];
      if (!std::isfinite(static_cast<double>(v)) || v < Scalar(0)) {
        throw ValidationError("pmf entry " + std::to_string(x) + " is negative or not finite");
      }
      if (v == Scalar(0) && policy == Support::full) {
        throw ValidationError("pmf entry " + std::to_string(x) +
                              " is zero; full support is required");
      }
    }
    const Scalar total = pmf_.sum();
    const double gap = std::abs(static_cast<double>(total) - 1.0);
    if (gap > kRenormalizeWindow) {
      throw ValidationError("pmf sums to " + std::to_string(static_cast<double>(total)) +
                            ", expected 1");
    }
    if (gap > 0) pmf_ /= total;
    for (Index x = 0; x < pmf_.size(); ++x) {
      if (pmf_[x] > Scalar(0)) support_.push_back(x);
    }
    if (support_.empty()) throw ValidationError("pmf has no positive mass");
  }

  const ProductSpace& space() const { return space_; }
  const Vector<Scalar>& pmf() const { return pmf_; }
  Scalar operator()(Index flat) const { return pmf_[flat]; }
  int dimension() const { return space_.dimension(); }
  Index total_states() const { return space_.total_states(); }

  bool full_support() const { return static_cast<Index>(support_.size()) == pmf_.size(); }
  /// Flat indices with positive mass, increasing.
  const std::vector<Index>& support() const { return support_; }

  template <typename Other>
  TargetDistribution<Other> cast() const {
    return TargetDistribution<Other>(space_, pmf_.template cast<Other>(),
                                     full_support() ? Support::full : Support::partial);
  }

 private:
  ProductSpace space_;
  Vector<Scalar> pmf_;
  std::vector<Index> support_;
};

namespace detail {

template <typename Derived, typename Scalar>
void check_function(const Eigen::MatrixBase<Derived>& f, const TargetDistribution<Scalar>& pi) {
  if (f.size() != pi.total_states()) {
    throw DimensionError("function has " + std::to_string(f.size()) +
                         " values, space has " + std::to_string(pi.total_states()) + " states");
  }
}

}  // namespace detail

/// <f, g>_pi = sum_x f(x) g(x) pi(x).
template <typename DerivedF, typename DerivedG, typename Scalar>
Scalar inner_product(const Eigen::MatrixBase<DerivedF>& f, const Eigen::MatrixBase<DerivedG>& g,
                     const TargetDistribution<Scalar>& pi) {
  detail::check_function(f, pi);
  detail::check_function(g, pi);
  return (f.array() * g.array() * pi.pmf().array()).sum();
}

template <typename Derived, typename Scalar>
Scalar pi_norm(const Eigen::MatrixBase<Derived>& f, const TargetDistribution<Scalar>& pi) {
  using std::sqrt;
  return sqrt(inner_product(f, f, pi));
}

/// Pi f: the constant function with value pi(f).
template <typename Derived, typename Scalar>
PiFunction<Scalar> mean_project(const Eigen::MatrixBase<Derived>& f,
                                const TargetDistribution<Scalar>& pi) {
  detail::check_function(f, pi);
  const Scalar mean = (f.array() * pi.pmf().array()).sum();
  return PiFunction<Scalar>::Constant(pi.total_states(), mean);
}

/// (P_i f)(x) = E_pi[f | x_{-i}], the conditional mean over coordinate i.
/// On a zero-mass fiber (partial targets only) f is returned unchanged.
template <typename Derived, typename Scalar>
PiFunction<Scalar> conditional_mean(const Eigen::MatrixBase<Derived>& f, int i,
                                    const TargetDistribution<Scalar>& pi) {
  detail::check_function(f, pi);
  const ProductSpace& space = pi.space();
  space.check_coordinate(i);
  const Index stride = space.stride(i);
  const int n = space.cardinality(i);
  PiFunction<Scalar> out = f;
  for (Index base = 0; base < space.total_states(); ++base) {
    if (space.coordinate(base, i) != 0) continue;
    Scalar mass(0), acc(0);
    for (int v = 0; v < n; ++v) {
      const Index x = base + v * stride;
      mass += pi(x);
      acc += pi(x) * f[x];
    }
    if (mass <= Scalar(0)) continue;
    const Scalar mean = acc / mass;
    for (int v = 0; v < n; ++v) out[base + v * stride] = mean;
  }
  return out;
}

/// Reproducible full-support pmf from a symmetric Dirichlet(concentration)
/// draw seeded by `seed` (mt19937_64 + gamma variates).
inline TargetDistribution<double> random_target(std::uint64_t seed, std::vector<int> dims,
                                                double concentration = 1.0) {
  if (!(concentration > 0)) throw ValidationError("concentration must be positive");
  for (int n : dims) {
    if (n < 1) throw ValidationError("zero-size coordinate in random_target");
  }
  ProductSpace space(std::move(dims));
  std::mt19937_64 rng(seed);
  std::gamma_distribution<double> gamma(concentration, 1.0);
  Vector<double> pmf(space.total_states());
  for (Index x = 0; x < pmf.size(); ++x) {
    pmf[x] = std::max(gamma(rng), std::numeric_limits<double>::min());
  }
  pmf /= pmf.sum();
  return TargetDistribution<double>(std::move(space), std::move(pmf));
}

/// Product of independent marginals; every coordinate is uniform when
/// `marginals` is empty.
inline TargetDistribution<double> independent_target(
    std::vector<int> dims, const std::vector<std::vector<double>>& marginals = {}) {
  ProductSpace space(std::move(dims));
  Vector<double> pmf = Vector<double>::Ones(space.total_states());
  for (Index x = 0; x < pmf.size(); ++x) {
    for (int i = 0; i < space.dimension(); ++i) {
      const int v = space.coordinate(x, i);
      pmf[x] *= marginals.empty() ? 1.0 / space.cardinality(i)
                                  : marginals.at(static_cast<std::size_t>(i)).at(
                                        static_cast<std::size_t>(v));
    }
  }
  return TargetDistribution<double>(std::move(space), std::move(pmf));
}

/// Binary model on {0,1}^d with weight (1-eps)^{#agreeing pairs} *
/// eps^{#disagreeing pairs}. For d = 2 this is pi(0,0) = pi(1,1) = (1-eps)/2
/// and pi(0,1) = pi(1,0) = eps/2. At eps = 0 only the two constant
/// configurations carry mass (partial support).
inline TargetDistribution<double> equicorrelated_binary(int d, double eps) {
  if (d < 2) throw ValidationError("equicorrelated_binary needs d >= 2");
  if (!(eps >= 0.0 && eps < 1.0)) throw ValidationError("epsilon must lie in [0, 1)");
  ProductSpace space(std::vector<int>(static_cast<std::size_t>(d), 2));
  Vector<double> pmf(space.total_states());
  for (Index x = 0; x < pmf.size(); ++x) {
    int ones = 0;
    for (int i = 0; i < d; ++i) ones += space.coordinate(x, i);
    const int disagree = ones * (d - ones);
    const int agree = d * (d - 1) / 2 - disagree;
    pmf[x] = std::pow(1.0 - eps, agree) * (disagree == 0 ? 1.0 : std::pow(eps, disagree));
  }
  pmf /= pmf.sum();
  return TargetDistribution<double>(std::move(space), std::move(pmf),
                                    eps > 0 ? Support::full : Support::partial);
}

}  // namespace gibbs
