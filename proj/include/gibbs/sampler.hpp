#pragma once

// Seeded simulation of both Gibbs samplers and the CLT / Hoeffding
// diagnostics built on it.
//
// A deterministic-scan trace records one state per full sweep, a random-scan
// trace one state per single-coordinate update, so trace autocorrelations
// match powers of the corresponding kernel. Replica r of an experiment with
// root seed s draws from mt19937_64(derive_seed(s, r)).

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "gibbs/measure.hpp"
#include "gibbs/operators.hpp"

namespace gibbs {

struct FixedState {
  Index state = 0;
};
struct StationaryStart {};
using InitialLaw = std::variant<FixedState, StationaryStart>;

struct ChainTrace {
  std::vector<Index> states;       ///< X_1 .. X_n
  Index initial_state = 0;         ///< realized X_0
  ScanSpec scan;
  std::uint64_t seed = 0;
  InitialLaw init;
  std::vector<Index> intra_sweep;  ///< every single-site state, when requested
};

/// Draws single-site updates from the full conditionals of a target.
class GibbsUpdater {
 public:
  explicit GibbsUpdater(const TargetDistribution<double>& pi);

  Index update(Index state, int coordinate, std::mt19937_64& rng) const;
  Index draw_stationary(std::mt19937_64& rng) const;
  const TargetDistribution<double>& target() const { return *pi_; }

 private:
  const TargetDistribution<double>* pi_;
  std::vector<double> cumulative_;
};

ChainTrace run_chain(const TargetDistribution<double>& pi, const ScanSpec& scan, Index n,
                     std::uint64_t seed, const InitialLaw& init = StationaryStart{},
                     bool record_intra_sweep = false);

/// f evaluated along the recorded states.
std::vector<double> evaluate_along(const ChainTrace& trace, const PiFunction<double>& f);

struct VarianceEstimate {
  double estimate = 0;
  double std_error = 0;
  int batches = 0;
  Index batch_size = 0;
};

/// Non-overlapping batch means of sigma^2(f) with a jackknife (leave one
/// batch out) standard error. Needs batch_count >= 10 and at least
/// 10 * batch_count observations; trailing observations that do not fill a
/// batch are dropped.
VarianceEstimate asymptotic_variance_estimate(std::span<const double> series, int batch_count);
VarianceEstimate asymptotic_variance_estimate(const ChainTrace& trace, const PiFunction<double>& f,
                                              int batch_count);

/// floor(sqrt(n)).
int default_batch_count(Index n);

/// pi((f - pi f)^2).
double pi_variance(const PiFunction<double>& f, const TargetDistribution<double>& pi);

/// ((1 + rho)/(1 - rho)) pi((f - pi f)^2); rho in [0, 1).
double clt_variance_bound(double rho, const PiFunction<double>& f,
                          const TargetDistribution<double>& pi);

/// nu_density_norm * exp(-((1 - rho)/(1 + rho)) n eps^2).
double hoeffding_bound(double rho, Index n, double eps, double nu_density_norm = 1.0);

/// ||d delta_x / d pi||_{L2(pi)} = 1/sqrt(pi(x)).
double point_mass_density_norm(const TargetDistribution<double>& pi, Index x);

/// The certified rho used in both diagnostics: ||P - Pi||. For a random scan
/// this equals the spectral radius; for a deterministic scan it dominates it.
double certified_rho(const TargetDistribution<double>& pi, const ScanSpec& scan);

struct TailResult {
  double frequency = 0;
  double std_error = 0;  ///< sqrt(phat (1 - phat) / replicas)
  double bound = 0;
  double mu = 0;
  double rho = 0;
  bool pass = false;     ///< frequency <= bound + 3 std_error
};

/// Fraction of `replicas` stationary-start chains with sum_{i=1..n} f(X_i)
/// >= n (mu + eps). f must take values in [0, 1] and mu + eps <= 1.
TailResult empirical_tail(const TargetDistribution<double>& pi, const ScanSpec& scan,
                          const PiFunction<double>& f, Index n, double eps, int replicas,
                          std::uint64_t seed);

struct CltPanel {
  std::string scan;
  double rho = 0;
  double variance = 0;
  double bound = 0;
  VarianceEstimate estimate;
  Index steps = 0;
  bool pass = false;  ///< estimate <= bound + 3 SE
};

struct TailPanel {
  std::string scan;
  Index n = 0;
  double eps = 0;
  int replicas = 0;
  TailResult result;
};

struct DiagnosticsConfig {
  Index clt_steps = 100000;
  int batches = 0;  ///< 0 selects floor(sqrt(clt_steps))
  std::vector<Index> tail_n{100, 1000};
  std::vector<double> tail_eps{0.1, 0.2, 0.3};
  int replicas = 10000;
  std::uint64_t seed = 0;
};

struct DiagnosticsReport {
  std::vector<CltPanel> clt;
  std::vector<TailPanel> tails;
  bool all_pass = false;
};

DiagnosticsReport run_diagnostics(const TargetDistribution<double>& pi,
                                  const std::vector<ScanSpec>& scans, const PiFunction<double>& f,
                                  const DiagnosticsConfig& config);

/// 1 where coordinate i equals `value`, 0 elsewhere.
PiFunction<double> coordinate_indicator(const ProductSpace& space, int i, int value);

}  // namespace gibbs
