#include "gibbs/counterexample.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdint>
#include <limits>
#include <string>

#include <Eigen/Eigenvalues>

#include "gibbs/errors.hpp"

namespace gibbs {

void validate(const LadderChainSpec& spec) {
  if (!(spec.q > 0 && spec.q < 1)) throw ValidationError("ladder q must lie in (0, 1)");
  if (spec.truncation < 1) throw ValidationError("ladder truncation must be at least 1");
  if (spec.truncation > 1000) throw CapExceeded("ladder truncation above 1000");
}

Index ladder_state_count(int truncation) {
  const Index n = truncation;
  return 1 + n * (n + 1) / 2;
}

Index ladder_index(int n, int k) {
  if (n == 0 && k == 0) return 0;
  if (n < 1 || k < 1 || k > n) {
    throw DimensionError("no ladder state (" + std::to_string(n) + "," + std::to_string(k) + ")");
  }
  const Index nn = n;
  return 1 + nn * (nn - 1) / 2 + (k - 1);
}

std::pair<int, int> ladder_state(Index flat) {
  if (flat < 0) throw DimensionError("negative ladder index");
  if (flat == 0) return {0, 0};
  const Index r = flat - 1;
  int n = static_cast<int>((std::sqrt(8.0 * static_cast<double>(r) + 1.0) + 1.0) / 2.0);
  while (static_cast<Index>(n) * (n - 1) / 2 > r) --n;
  while (static_cast<Index>(n + 1) * n / 2 <= r) ++n;
  const int k = static_cast<int>(r - static_cast<Index>(n) * (n - 1) / 2) + 1;
  return {n, k};
}

std::vector<double> ladder_jump_law(const LadderChainSpec& spec) {
  validate(spec);
  std::vector<double> p(static_cast<std::size_t>(spec.truncation) + 1);
  double total = 0;
  for (int n = 0; n <= spec.truncation; ++n) {
    p[static_cast<std::size_t>(n)] = (1 - spec.q) * std::pow(spec.q, n);
    total += p[static_cast<std::size_t>(n)];
  }
  for (auto& v : p) v /= total;
  return p;
}

double expected_return_time(const LadderChainSpec& spec) {
  const std::vector<double> p = ladder_jump_law(spec);
  double e = 0;
  for (std::size_t n = 0; n < p.size(); ++n) e += static_cast<double>(n + 1) * p[n];
  return e;
}

Vector<double> ladder_stationary(const LadderChainSpec& spec) {
  const std::vector<double> p = ladder_jump_law(spec);
  const double e = expected_return_time(spec);
  Vector<double> pi(ladder_state_count(spec.truncation));
  pi[0] = 1.0 / e;
  for (int n = 1; n <= spec.truncation; ++n) {
    for (int k = 1; k <= n; ++k) pi[ladder_index(n, k)] = p[static_cast<std::size_t>(n)] / e;
  }
  return pi;
}

MarkovOperator<double> build_ladder(const LadderChainSpec& spec) {
  const std::vector<double> p = ladder_jump_law(spec);
  const Index s = ladder_state_count(spec.truncation);
  check_state_cap(s);
  Matrix<double> k = Matrix<double>::Zero(s, s);
  k(0, 0) = p[0];
  for (int n = 1; n <= spec.truncation; ++n) {
    k(0, ladder_index(n, n)) = p[static_cast<std::size_t>(n)];
    for (int j = 2; j <= n; ++j) k(ladder_index(n, j), ladder_index(n, j - 1)) = 1.0;
    k(ladder_index(n, 1), 0) = 1.0;
  }
  char label[96];
  std::snprintf(label, sizeof label, "ladder(q=%g,N=%d)", spec.q, spec.truncation);
  return MarkovOperator<double>(std::move(k), ladder_stationary(spec), label);
}

MomentResult return_time_moment(const LadderChainSpec& spec, double b, bool analytic) {
  if (!(b > 1) || !std::isfinite(b)) throw ValidationError("moment base b must exceed 1");
  if (analytic) {
    validate(spec);
    if (b * spec.q >= 1) return {std::numeric_limits<double>::infinity(), true};
    return {b * (1 - spec.q) / (1 - b * spec.q), false};
  }
  const std::vector<double> p = ladder_jump_law(spec);
  double m = 0;
  for (std::size_t n = 0; n < p.size(); ++n) m += std::pow(b, static_cast<double>(n + 1)) * p[n];
  return {m, !std::isfinite(m)};
}

std::vector<std::vector<Index>> ladder_cuts(const LadderChainSpec& spec) {
  validate(spec);
  std::vector<std::vector<Index>> cuts;
  for (int n = 1; n <= spec.truncation; ++n) {
    std::vector<Index> a;
    for (int k = 1; k <= n; ++k) a.push_back(ladder_index(n, k));
    cuts.push_back(std::move(a));
  }
  return cuts;
}

std::vector<std::vector<Index>> default_cut_family(const LadderChainSpec& spec) {
  std::vector<std::vector<Index>> cuts = ladder_cuts(spec);
  const Index s = ladder_state_count(spec.truncation);
  for (Index x = 0; x < s; ++x) cuts.push_back({x});
  return cuts;
}

namespace {

double cut_value(const Matrix<double>& flow, const Vector<double>& pi,
                 const std::vector<char>& in) {
  const Index s = pi.size();
  double mass = 0;
  double out = 0;
  for (Index x = 0; x < s; ++x) {
    if (!in[static_cast<std::size_t>(x)]) continue;
    mass += pi[x];
    for (Index y = 0; y < s; ++y) {
      if (!in[static_cast<std::size_t>(y)]) out += flow(x, y);
    }
  }
  const double rest = 1.0 - mass;
  if (!(mass > 0) || !(rest > 0)) return std::numeric_limits<double>::infinity();
  return out / (mass * rest);
}

}  // namespace

ConductanceResult conductance(const MarkovOperator<double>& k,
                              const std::vector<std::vector<Index>>& cuts, int exhaustive_limit) {
  if (!is_reversible(k, 1e-12)) throw ValidationError("conductance needs a reversible kernel");
  if (cuts.empty()) throw ValidationError("empty cut family");
  const Index s = k.states();
  const Vector<double>& pi = k.stationary();
  const Matrix<double> flow = pi.asDiagonal() * k.kernel();

  ConductanceResult result;
  result.kappa_upper = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < cuts.size(); ++c) {
    std::vector<char> in(static_cast<std::size_t>(s), 0);
    for (Index x : cuts[c]) {
      if (x < 0 || x >= s) throw DimensionError("cut " + std::to_string(c) + " leaves the state space");
      in[static_cast<std::size_t>(x)] = 1;
    }
    const double v = cut_value(flow, pi, in);
    if (!std::isfinite(v)) {
      throw ValidationError("cut " + std::to_string(c) + " has zero mass on one side");
    }
    result.per_cut.push_back(v);
    result.kappa_upper = std::min(result.kappa_upper, v);
  }

  if (s <= exhaustive_limit && s <= 30) {
    double best = std::numeric_limits<double>::infinity();
    const std::uint64_t full = (std::uint64_t{1} << s) - 1;
    std::vector<char> in(static_cast<std::size_t>(s));
    for (std::uint64_t mask = 1; mask < full; ++mask) {
      for (Index x = 0; x < s; ++x) in[static_cast<std::size_t>(x)] = (mask >> x) & 1u;
      best = std::min(best, cut_value(flow, pi, in));
    }
    result.exhaustive = best;
  }
  return result;
}

double renewal_spectral_radius(const MarkovOperator<double>& p, Index origin) {
  const Index s = p.states();
  if (origin < 0 || origin >= s) throw DimensionError("origin out of range");
  const Matrix<double>& k = p.kernel();

  std::vector<Index> succ(static_cast<std::size_t>(s), -1);
  for (Index x = 0; x < s; ++x) {
    if (x == origin) continue;
    for (Index y = 0; y < s; ++y) {
      const double v = k(x, y);
      if (v == 0) continue;
      if (std::abs(v - 1.0) > 1e-12 || succ[static_cast<std::size_t>(x)] != -1) {
        throw ValidationError("state " + std::to_string(x) +
                              " branches; renewal spectrum needs a single branching state");
      }
      succ[static_cast<std::size_t>(x)] = y;
    }
  }

  // first-return law f_t, pushing mass along the deterministic successors
  std::vector<double> f;
  Vector<double> mass = k.row(origin).transpose();
  f.push_back(mass[origin]);
  mass[origin] = 0;
  for (Index t = 2; mass.sum() > 0; ++t) {
    if (t > s + 1) throw ValidationError("mass never returns to the origin");
    Vector<double> next = Vector<double>::Zero(s);
    for (Index x = 0; x < s; ++x) {
      if (mass[x] != 0) next[succ[static_cast<std::size_t>(x)]] += mass[x];
    }
    f.push_back(next[origin]);
    next[origin] = 0;
    mass = std::move(next);
  }
  while (!f.empty() && f.back() == 0) f.pop_back();
  const int t_max = static_cast<int>(f.size());
  if (t_max <= 1) return 0.0;

  // z = s y with s = (f_T / f_1)^{1/(T-1)} balances the companion entries
  double scale = 1.0;
  if (f.front() > 0) scale = std::pow(f.back() / f.front(), 1.0 / (t_max - 1));
  Matrix<double> companion = Matrix<double>::Zero(t_max, t_max);
  for (int t = 1; t <= t_max; ++t) {
    companion(0, t - 1) = f[static_cast<std::size_t>(t - 1)] / std::pow(scale, t);
  }
  for (int r = 1; r < t_max; ++r) companion(r, r - 1) = 1.0;
  Eigen::EigenSolver<Matrix<double>> es(companion, false);
  if (es.info() != Eigen::Success) throw NumericError("companion eigen-solver did not converge");

  std::vector<std::complex<double>> roots;
  for (Index r = 0; r < es.eigenvalues().size(); ++r) roots.push_back(scale * es.eigenvalues()[r]);
  auto unit = std::min_element(roots.begin(), roots.end(), [](const auto& a, const auto& b) {
    return std::abs(a - 1.0) < std::abs(b - 1.0);
  });
  roots.erase(unit);
  double rho = 0;
  for (const auto& z : roots) rho = std::max(rho, std::abs(z));
  return rho;
}

std::vector<GapSweepRow> reversibilization_gap_sweep(double q, const std::vector<int>& truncations,
                                                     double b) {
  for (std::size_t k = 1; k < truncations.size(); ++k) {
    if (truncations[k] <= truncations[k - 1]) throw ValidationError("truncations must increase");
  }
  std::vector<GapSweepRow> rows;
  for (int n : truncations) {
    const LadderChainSpec spec{q, n};
    const MarkovOperator<double> p = build_ladder(spec);
    const MarkovOperator<double> star = adjoint(p);
    const MarkovOperator<double> k = additive_reversibilization(p);

    GapSweepRow row;
    row.truncation = n;
    row.states = p.states();
    row.pi_origin = p.stationary()[0];
    row.gap_p = 1.0 - renewal_spectral_radius(p, 0);
    row.gap_pstar = 1.0 - renewal_spectral_radius(star, 0);
    row.gap_k = 1.0 - spectral_radius_centered(k);
    row.kappa_upper = conductance(k, default_cut_family(spec)).kappa_upper;
    row.cheeger_ok = row.gap_k <= 2 * row.kappa_upper + 1e-9;
    row.moment = return_time_moment(spec, b);
    row.analytic = return_time_moment(spec, b, true);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace gibbs
