#pragma once

// Closed-form spectral bounds for the Gibbs samplers and their comparison
// with exact dense values. Bound slack is `bound - exact` for upper bounds
// and `exact - bound` for lower bounds, so a negative slack is a violation
// either way.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "gibbs/errors.hpp"
#include "gibbs/geometry.hpp"
#include "gibbs/measure.hpp"
#include "gibbs/operators.hpp"
#include "gibbs/rng.hpp"

namespace gibbs {

inline constexpr double kBoundTolerance = 1e-9;

inline void check_angle(double c, int d) {
  if (d < 2) throw ValidationError("bounds need d >= 2");
  const double lo = -1.0 / (d - 1);
  if (!(c >= lo - kBoundTolerance && c <= 1.0 + kBoundTolerance)) {
    throw ValidationError("angle c = " + std::to_string(c) + " outside [-1/(d-1), 1]");
  }
}

/// ((d-1)/d) alpha (c + 1/(d-1)) + 1 - alpha with alpha = d min_i w_i.
inline double rsg_norm_bound(double c, int d, const std::vector<double>& weights) {
  check_angle(c, d);
  validate_weights(weights, d);
  const double alpha = d * *std::min_element(weights.begin(), weights.end());
  return (d - 1.0) / d * alpha * (c + 1.0 / (d - 1)) + 1.0 - alpha;
}

/// sqrt(1 - ((d-1)^2 / (4 d^4)) (1-c)^2).
inline double dsg_norm_bound_from_c(double c, int d) {
  check_angle(c, d);
  const double dd = static_cast<double>(d);
  const double k = (dd - 1) * (dd - 1) / (4 * dd * dd * dd * dd);
  return std::sqrt(std::max(0.0, 1.0 - k * (1 - c) * (1 - c)));
}

/// sqrt(1 - l^2/d^2). `ell` has to be a certified lower bound on the
/// inclination for the result to bound ||DSG - Pi||.
inline double dsg_norm_bound_from_l(double ell, int d) {
  if (d < 2) throw ValidationError("bounds need d >= 2");
  if (!(ell >= 0 && ell <= 1)) throw ValidationError("inclination must lie in [0, 1]");
  return std::sqrt(1.0 - ell * ell / (static_cast<double>(d) * d));
}

/// Guaranteed DSG gap (gamma^2/32) d^{-2 beta - 2} whenever the uniform RSG
/// gap is at least gamma d^{-beta}.
inline double rapid_mixing_transfer(double beta, double gamma, int d) {
  if (!(beta > 0) || !(gamma > 0)) throw ValidationError("beta and gamma must be positive");
  if (d < 2) throw ValidationError("rapid_mixing_transfer needs d >= 2");
  return gamma * gamma / 32.0 * std::pow(static_cast<double>(d), -2.0 * beta - 2.0);
}

enum class BoundKind { upper, lower };

struct BoundEntry {
  std::string name;
  std::string scan;
  BoundKind kind = BoundKind::upper;
  double bound = 0;
  double exact = 0;
  double slack = 0;
  bool asserted = true;
};

struct BoundReport {
  int d = 0;
  double c = 0;                 ///< exact, from the uniform RSG norm
  double ell_lower = 0;         ///< (d-1)(1-c)/(2d)
  double uniform_rsg_norm = 0;
  bool sharp = false;           ///< uniform-weight slack within tolerance
  std::vector<BoundEntry> entries;

  std::vector<BoundEntry> violations(double tol = kBoundTolerance) const {
    std::vector<BoundEntry> out;
    for (const auto& e : entries) {
      if (e.asserted && e.slack < -tol) out.push_back(e);
    }
    return out;
  }
  bool ok(double tol = kBoundTolerance) const { return sharp && violations(tol).empty(); }
};

/// Every permutation of {0..d-1} in lexicographic order when d <= 5,
/// otherwise `samples` seeded Fisher-Yates shuffles (identity first).
inline std::vector<std::vector<int>> scan_orders(int d, int samples = 120, std::uint64_t seed = 0,
                                                 int enumerate_up_to = 5) {
  std::vector<std::vector<int>> out;
  std::vector<int> order = identity_order(d);
  if (d <= enumerate_up_to) {
    do {
      out.push_back(order);
    } while (std::next_permutation(order.begin(), order.end()));
    return out;
  }
  out.push_back(order);
  std::mt19937_64 rng(derive_seed(seed, 0x5eed));
  while (static_cast<int>(out.size()) < samples) {
    for (int k = d - 1; k > 0; --k) {
      const int j = static_cast<int>(rng() % static_cast<std::uint64_t>(k + 1));
      std::swap(order[static_cast<std::size_t>(k)], order[static_cast<std::size_t>(j)]);
    }
    out.push_back(order);
  }
  return out;
}

/// Flat-Dirichlet weight vector; reproducible from (seed, stream).
inline std::vector<double> random_weights(int d, std::uint64_t seed, std::uint64_t stream = 0) {
  std::mt19937_64 rng(derive_seed(seed, stream));
  std::vector<double> w(static_cast<std::size_t>(d));
  double total = 0;
  for (auto& v : w) {
    v = -std::log(1.0 - uniform01(rng)) + 1e-12;
    total += v;
  }
  for (auto& v : w) v /= total;
  // absorb rounding so the weights pass the 1e-12 sum check
  double s = std::accumulate(w.begin(), w.end() - 1, 0.0);
  w.back() = 1.0 - s;
  return w;
}

/// Exact norms for every scan, c via the norm identity, and every bound with
/// its slack.
BoundReport verify_bounds(const TargetDistribution<double>& pi,
                          const std::vector<std::vector<int>>& orders,
                          const std::vector<std::vector<double>>& weight_list,
                          Index cap = kDefaultStateCap);

/// One numeric surrogate per condition of the spectral-gap equivalence
/// theorem: RSG norms per weight vector, DSG radii and norms per
/// permutation, palindromic sweep norms.
struct PanelEntry {
  std::string condition;  ///< "rsg_norm", "dsg_radius", "dsg_norm", "sym_norm"
  std::string scan;
  double value = 0;
  bool below_one = false;
};

struct EquivalencePanel {
  std::vector<PanelEntry> entries;
  bool all_hold = false;
  bool none_hold = false;
  bool dichotomy() const { return all_hold || none_hold; }
};

EquivalencePanel equivalence_panel(const TargetDistribution<double>& pi,
                                   const std::vector<std::vector<int>>& orders,
                                   const std::vector<std::vector<double>>& weight_list,
                                   double threshold = 1e-9, Index cap = kDefaultStateCap);

struct PowerLawFit {
  double beta = 0;      ///< least-squares decay exponent of gap ~ d^{-beta}
  double gamma_ls = 0;  ///< least-squares prefactor
  double gamma = 0;     ///< min_d gap(d) d^beta, so gap(d) >= gamma d^{-beta} at every point
};

PowerLawFit fit_power_law(const std::vector<int>& ds, const std::vector<double>& gaps);

struct SweepPoint {
  int d = 0;
  double gap_rsg = 0;
  double gap_dsg_worst = 0;
  double gap_dsg_best = 0;
  int orders = 0;
  double floor = 0;
  bool floor_ok = false;
};

struct DimensionSweep {
  std::vector<SweepPoint> points;
  PowerLawFit rsg_fit;
  PowerLawFit dsg_fit;  ///< fitted to the worst DSG gap, reported only
  bool floor_ok = false;
};

/// Uniform RSG gap and worst/best DSG gap per dimension, with the
/// rapid-mixing floor derived from the RSG column.
DimensionSweep dimension_sweep(const std::function<TargetDistribution<double>(int)>& family,
                               const std::vector<int>& ds, int perm_samples = 120,
                               std::uint64_t seed = 0, Index cap = kDefaultStateCap);

}  // namespace gibbs
