#pragma once

// The ladder chain: a renewal chain on {(0,0)} u {(n,k): 1 <= k <= n} that
// is geometrically ergodic together with its time reversal, while its
// additive reversibilization has vanishing conductance as the ladder grows.
//
//   P((0,0),(n,n)) = p(n)        (n = 0 means staying at the origin)
//   P((n,k),(n,k-1)) = 1         2 <= k <= n
//   P((n,1),(0,0)) = 1
//
// The jump law is geometric, p(n) = (1-q) q^n, renormalized to {0..N} for a
// truncation N. States are enumerated as origin = 0 and
// (n,k) -> 1 + n(n-1)/2 + (k-1), giving 1 + N(N+1)/2 states.

#include <optional>
#include <utility>
#include <vector>

#include "gibbs/measure.hpp"
#include "gibbs/operators.hpp"

namespace gibbs {

struct LadderChainSpec {
  double q = 0.5;
  int truncation = 10;
};

void validate(const LadderChainSpec& spec);

Index ladder_state_count(int truncation);
Index ladder_index(int n, int k);
/// (n, k) of a flat ladder state; the origin is (0, 0).
std::pair<int, int> ladder_state(Index flat);

/// p(0..N), renormalized.
std::vector<double> ladder_jump_law(const LadderChainSpec& spec);

/// E[tau] = sum_n (n+1) p(n) over the truncated support.
double expected_return_time(const LadderChainSpec& spec);

/// pi(0,0) = 1/E[tau], pi(n,k) = p(n)/E[tau].
Vector<double> ladder_stationary(const LadderChainSpec& spec);

MarkovOperator<double> build_ladder(const LadderChainSpec& spec);

struct MomentResult {
  double value = 0;
  bool divergent = false;
};

/// E[b^tau | X_0 = (0,0)] = sum_n b^{n+1} p(n). `analytic` evaluates the
/// untruncated geometric series and flags divergence when b q >= 1.
MomentResult return_time_moment(const LadderChainSpec& spec, double b, bool analytic = false);

/// A_n = {(n,k): k = 1..n} for n = 1..N.
std::vector<std::vector<Index>> ladder_cuts(const LadderChainSpec& spec);

/// A_n for every n plus every singleton.
std::vector<std::vector<Index>> default_cut_family(const LadderChainSpec& spec);

struct ConductanceResult {
  double kappa_upper = 0;              ///< min over the supplied family
  std::vector<double> per_cut;
  std::optional<double> exhaustive;    ///< min over all proper subsets (small chains)
};

/// Per cut: sum_{x in A} pi(x) K(x, A^c) / (pi(A) pi(A^c)). K must be
/// reversible. The exhaustive minimum is added when K has at most
/// `exhaustive_limit` states.
ConductanceResult conductance(const MarkovOperator<double>& k,
                              const std::vector<std::vector<Index>>& cuts,
                              int exhaustive_limit = 20);

/// Spectral radius of P - Pi for a chain that only branches at `origin`
/// (every other state has a single successor). The nonzero spectrum of P is
/// the root set of z^T = sum_t f_t z^{T-t}, f the first-return law of
/// `origin`; the root at 1 is removed. Roots come from a rescaled companion
/// matrix. Throws ValidationError if P does not have that structure.
double renewal_spectral_radius(const MarkovOperator<double>& p, Index origin = 0);

struct GapSweepRow {
  int truncation = 0;
  Index states = 0;
  double pi_origin = 0;
  double gap_k = 0;
  double gap_p = 0;
  double gap_pstar = 0;
  double kappa_upper = 0;
  bool cheeger_ok = false;  ///< gap_k <= 2 kappa_upper + 1e-9
  MomentResult moment;      ///< E[b^tau] on the truncated chain
  MomentResult analytic;    ///< untruncated series; divergent when b q >= 1
};

std::vector<GapSweepRow> reversibilization_gap_sweep(double q, const std::vector<int>& truncations,
                                                     double b);

}  // namespace gibbs
