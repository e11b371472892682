#include "gibbs/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gibbs/rng.hpp"

namespace gibbs {

GibbsUpdater::GibbsUpdater(const TargetDistribution<double>& pi) : pi_(&pi) {
  cumulative_.resize(static_cast<std::size_t>(pi.total_states()));
  double acc = 0;
  for (Index x = 0; x < pi.total_states(); ++x) {
    acc += pi(x);
    cumulative_[static_cast<std::size_t>(x)] = acc;
  }
}

Index GibbsUpdater::update(Index state, int coordinate, std::mt19937_64& rng) const {
  const ProductSpace& space = pi_->space();
  const Index stride = space.stride(coordinate);
  const int n = space.cardinality(coordinate);
  const Index base = state - space.coordinate(state, coordinate) * stride;
  double mass = 0;
  for (int v = 0; v < n; ++v) mass += (*pi_)(base + v * stride);
  if (mass <= 0) return state;
  const double u = uniform01(rng) * mass;
  double acc = 0;
  for (int v = 0; v < n; ++v) {
    const double p = (*pi_)(base + v * stride);
    acc += p;
    if (u < acc && p > 0) return base + v * stride;
  }
  // u landed in the rounding gap at the top: take the last positive entry
  for (int v = n - 1; v >= 0; --v) {
    if ((*pi_)(base + v * stride) > 0) return base + v * stride;
  }
  return state;
}

Index GibbsUpdater::draw_stationary(std::mt19937_64& rng) const {
  const double u = uniform01(rng) * cumulative_.back();
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  if (it == cumulative_.end()) --it;
  Index x = static_cast<Index>(it - cumulative_.begin());
  while ((*pi_)(x) <= 0 && x > 0) --x;
  return x;
}

namespace {

std::vector<double> cumulative_weights(const std::vector<double>& w) {
  std::vector<double> out(w.size());
  std::partial_sum(w.begin(), w.end(), out.begin());
  return out;
}

int pick_coordinate(const std::vector<double>& cumulative, std::mt19937_64& rng) {
  const double u = uniform01(rng) * cumulative.back();
  auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
  if (it == cumulative.end()) --it;
  return static_cast<int>(it - cumulative.begin());
}

void validate_scan(const ScanSpec& scan, int d) {
  if (const auto* ds = std::get_if<DeterministicScan>(&scan)) {
    validate_order(ds->order, d);
  } else {
    validate_weights(std::get<RandomScan>(scan).weights, d);
  }
}

Index initial_state(const GibbsUpdater& updater, const InitialLaw& init, std::mt19937_64& rng) {
  if (const auto* fixed = std::get_if<FixedState>(&init)) {
    updater.target().space().check_state(fixed->state);
    if (!(updater.target()(fixed->state) > 0)) {
      throw ValidationError("initial state has zero mass under the target");
    }
    return fixed->state;
  }
  return updater.draw_stationary(rng);
}

/// Advances one recorded step of the chain.
class Stepper {
 public:
  Stepper(const GibbsUpdater& updater, const ScanSpec& scan) : updater_(updater), scan_(scan) {
    if (const auto* rs = std::get_if<RandomScan>(&scan)) cumulative_ = cumulative_weights(rs->weights);
  }

  Index step(Index x, std::mt19937_64& rng, std::vector<Index>* intra = nullptr) const {
    if (const auto* ds = std::get_if<DeterministicScan>(&scan_)) {
      for (int i : ds->order) {
        x = updater_.update(x, i, rng);
        if (intra) intra->push_back(x);
      }
      return x;
    }
    x = updater_.update(x, pick_coordinate(cumulative_, rng), rng);
    if (intra) intra->push_back(x);
    return x;
  }

 private:
  const GibbsUpdater& updater_;
  const ScanSpec& scan_;
  std::vector<double> cumulative_;
};

}  // namespace

ChainTrace run_chain(const TargetDistribution<double>& pi, const ScanSpec& scan, Index n,
                     std::uint64_t seed, const InitialLaw& init, bool record_intra_sweep) {
  if (n < 1) throw ValidationError("chain length must be at least 1");
  validate_scan(scan, pi.dimension());
  GibbsUpdater updater(pi);
  Stepper stepper(updater, scan);
  std::mt19937_64 rng(derive_seed(seed, 0));
  ChainTrace trace;
  trace.scan = scan;
  trace.seed = seed;
  trace.init = init;
  trace.initial_state = initial_state(updater, init, rng);
  trace.states.reserve(static_cast<std::size_t>(n));
  Index x = trace.initial_state;
  for (Index t = 0; t < n; ++t) {
    x = stepper.step(x, rng, record_intra_sweep ? &trace.intra_sweep : nullptr);
    trace.states.push_back(x);
  }
  return trace;
}

std::vector<double> evaluate_along(const ChainTrace& trace, const PiFunction<double>& f) {
  std::vector<double> out;
  out.reserve(trace.states.size());
  for (Index x : trace.states) {
    if (x >= f.size()) throw DimensionError("function shorter than the state space");
    out.push_back(f[x]);
  }
  return out;
}

VarianceEstimate asymptotic_variance_estimate(std::span<const double> series, int batch_count) {
  if (batch_count < 10) throw ValidationError("batch-means needs at least 10 batches");
  const Index n = static_cast<Index>(series.size());
  if (n < 10 * static_cast<Index>(batch_count)) {
    throw ValidationError("trace of length " + std::to_string(n) + " is too short for " +
                          std::to_string(batch_count) + " batches");
  }
  const Index m = n / batch_count;
  const int b = batch_count;
  std::vector<double> means(static_cast<std::size_t>(b), 0.0);
  // shifted by the first observation so a constant series gives exact zeros
  const double shift = series.front();
  for (int k = 0; k < b; ++k) {
    double acc = 0;
    for (Index t = 0; t < m; ++t) acc += series[static_cast<std::size_t>(k * m + t)] - shift;
    means[static_cast<std::size_t>(k)] = acc / static_cast<double>(m);
  }
  // sigma^2 estimate from a set of batch means: m * sample variance.
  const auto estimate = [m](const std::vector<double>& v, std::size_t skip) {
    double sum = 0;
    std::size_t count = 0;
    for (std::size_t k = 0; k < v.size(); ++k) {
      if (k == skip) continue;
      sum += v[k];
      ++count;
    }
    const double mean = sum / static_cast<double>(count);
    double ss = 0;
    for (std::size_t k = 0; k < v.size(); ++k) {
      if (k == skip) continue;
      ss += (v[k] - mean) * (v[k] - mean);
    }
    return static_cast<double>(m) * ss / static_cast<double>(count - 1);
  };
  VarianceEstimate out;
  out.batches = b;
  out.batch_size = m;
  out.estimate = estimate(means, means.size());
  std::vector<double> loo(static_cast<std::size_t>(b));
  double loo_mean = 0;
  for (int k = 0; k < b; ++k) {
    loo[static_cast<std::size_t>(k)] = estimate(means, static_cast<std::size_t>(k));
    loo_mean += loo[static_cast<std::size_t>(k)];
  }
  loo_mean /= b;
  double ss = 0;
  for (double v : loo) ss += (v - loo_mean) * (v - loo_mean);
  out.std_error = std::sqrt((b - 1.0) / b * ss);
  return out;
}

VarianceEstimate asymptotic_variance_estimate(const ChainTrace& trace, const PiFunction<double>& f,
                                              int batch_count) {
  const std::vector<double> series = evaluate_along(trace, f);
  return asymptotic_variance_estimate(std::span<const double>(series), batch_count);
}

int default_batch_count(Index n) {
  return static_cast<int>(std::floor(std::sqrt(static_cast<double>(n))));
}

double pi_variance(const PiFunction<double>& f, const TargetDistribution<double>& pi) {
  const PiFunction<double> centred = f - mean_project(f, pi);
  return inner_product(centred, centred, pi);
}

double clt_variance_bound(double rho, const PiFunction<double>& f,
                          const TargetDistribution<double>& pi) {
  if (!(rho >= 0)) throw ValidationError("rho must be nonnegative");
  if (rho >= 1) throw ValidationError("rho >= 1: no spectral gap, no finite variance bound");
  return (1 + rho) / (1 - rho) * pi_variance(f, pi);
}

double hoeffding_bound(double rho, Index n, double eps, double nu_density_norm) {
  if (!(rho >= 0)) throw ValidationError("rho must be nonnegative");
  if (rho >= 1) throw ValidationError("rho >= 1: no spectral gap, no exponential bound");
  if (n < 0) throw ValidationError("n must be nonnegative");
  return nu_density_norm * std::exp(-(1 - rho) / (1 + rho) * static_cast<double>(n) * eps * eps);
}

double point_mass_density_norm(const TargetDistribution<double>& pi, Index x) {
  pi.space().check_state(x);
  if (!(pi(x) > 0)) throw ValidationError("point mass on a zero-mass state");
  return 1.0 / std::sqrt(pi(x));
}

double certified_rho(const TargetDistribution<double>& pi, const ScanSpec& scan) {
  return l2_norm_centered(build(scan, pi));
}

TailResult empirical_tail(const TargetDistribution<double>& pi, const ScanSpec& scan,
                          const PiFunction<double>& f, Index n, double eps, int replicas,
                          std::uint64_t seed) {
  detail::check_function(f, pi);
  if (replicas < 1) throw ValidationError("replicas must be at least 1");
  if (n < 1) throw ValidationError("n must be at least 1");
  if (!(eps > 0)) throw ValidationError("eps must be positive");
  if (f.minCoeff() < 0 || f.maxCoeff() > 1) throw ValidationError("f must take values in [0, 1]");
  validate_scan(scan, pi.dimension());
  TailResult out;
  out.mu = mean_project(f, pi)[0];
  if (out.mu + eps > 1 + 1e-12) {
    throw ValidationError("mu + eps = " + std::to_string(out.mu + eps) + " exceeds 1");
  }
  out.rho = certified_rho(pi, scan);
  out.bound = hoeffding_bound(out.rho, n, eps, 1.0);

  GibbsUpdater updater(pi);
  Stepper stepper(updater, scan);
  const double threshold = static_cast<double>(n) * (out.mu + eps) - 1e-9;
  Index hits = 0;
  for (int r = 0; r < replicas; ++r) {
    std::mt19937_64 rng(derive_seed(seed, static_cast<std::uint64_t>(r)));
    Index x = updater.draw_stationary(rng);
    double sum = 0;
    for (Index t = 0; t < n; ++t) {
      x = stepper.step(x, rng);
      sum += f[x];
    }
    if (sum >= threshold) ++hits;
  }
  out.frequency = static_cast<double>(hits) / replicas;
  out.std_error = std::sqrt(out.frequency * (1 - out.frequency) / replicas);
  out.pass = out.frequency <= out.bound + 3 * out.std_error;
  return out;
}

DiagnosticsReport run_diagnostics(const TargetDistribution<double>& pi,
                                  const std::vector<ScanSpec>& scans, const PiFunction<double>& f,
                                  const DiagnosticsConfig& config) {
  if (config.replicas < 1) throw ValidationError("replicas must be at least 1");
  if (scans.empty()) throw ValidationError("no scans to diagnose");
  DiagnosticsReport report;
  report.all_pass = true;
  for (std::size_t k = 0; k < scans.size(); ++k) {
    const ScanSpec& scan = scans[k];
    CltPanel clt;
    clt.scan = describe(scan);
    clt.rho = certified_rho(pi, scan);
    clt.variance = pi_variance(f, pi);
    clt.bound = clt_variance_bound(clt.rho, f, pi);
    clt.steps = config.clt_steps;
    const int batches = config.batches > 0 ? config.batches : default_batch_count(config.clt_steps);
    const ChainTrace trace =
        run_chain(pi, scan, config.clt_steps, derive_seed(config.seed, 1000 + k));
    clt.estimate = asymptotic_variance_estimate(trace, f, batches);
    clt.pass = clt.estimate.estimate <= clt.bound + 3 * clt.estimate.std_error;
    report.all_pass = report.all_pass && clt.pass;
    report.clt.push_back(clt);

    std::uint64_t stream = 2000 + 100 * k;
    for (Index n : config.tail_n) {
      for (double eps : config.tail_eps) {
        TailPanel tail;
        tail.scan = clt.scan;
        tail.n = n;
        tail.eps = eps;
        tail.replicas = config.replicas;
        tail.result = empirical_tail(pi, scan, f, n, eps, config.replicas,
                                     derive_seed(config.seed, stream++));
        report.all_pass = report.all_pass && tail.result.pass;
        report.tails.push_back(tail);
      }
    }
  }
  return report;
}

PiFunction<double> coordinate_indicator(const ProductSpace& space, int i, int value) {
  space.check_coordinate(i);
  if (value < 0 || value >= space.cardinality(i)) {
    throw ValidationError("indicator value outside the coordinate's range");
  }
  PiFunction<double> f(space.total_states());
  for (Index x = 0; x < f.size(); ++x) f[x] = space.coordinate(x, i) == value ? 1.0 : 0.0;
  return f;
}

}  // namespace gibbs
