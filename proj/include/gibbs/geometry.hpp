#pragma once

// Geometry of the subspaces M_i = {f constant in coordinate i} of L2(pi):
// the generalized Friedrichs angle c(M_1..M_d) and the inclination
// l(M_1..M_d).
//
//   c = sup  sum_{i != j} <f_i, f_j> / ((d-1) sum_i <f_i, f_i>),
//       over f_i in M_i, pi(f_i) = 0, not all zero;
//   l = inf over dist(f, M) = 1 of max_i dist(f, M_i).
//
// c is computed two independent ways: inverting the uniform random-scan
// norm identity ||(1/d) sum P_i - Pi|| = ((d-1)/d) (c + 1/(d-1)), and as the
// top eigenvalue of the block Gram form over orthonormal bases of
// M_i cap M-perp. l has no closed form; `inclination` returns the best value
// found by multi-start descent, i.e. an upper bound on l.

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "gibbs/measure.hpp"
#include "gibbs/operators.hpp"
#include "gibbs/rng.hpp"

namespace gibbs {

template <typename Scalar>
struct SubspaceBasis {
  int coordinate = 0;
  Matrix<Scalar> vectors;  ///< columns orthonormal in <.,.>_pi, values by flat state
};

enum class AngleMethod { closed_form, brute_force };

inline const char* to_string(AngleMethod m) {
  return m == AngleMethod::closed_form ? "closed_form" : "brute_force";
}

template <typename Scalar>
struct AngleResult {
  Scalar value{};
  AngleMethod method = AngleMethod::closed_form;
  bool degenerate = false;    ///< every M_i cap M-perp is trivial; value set to 0
  Vector<Scalar> witness;     ///< block coefficients (brute force only)
};

template <typename Scalar>
struct InclinationResult {
  Scalar value{};
  PiFunction<Scalar> witness;
  int restarts = 0;
  double tolerance = 0;
  bool converged = false;
  int best_restart = -1;
  bool degenerate = false;    ///< M-perp is trivial
};

struct SandwichCheck {
  double left_lhs;      ///< 1 - (2d/(d-1)) l_hat
  double left_slack;    ///< c - left_lhs; must be >= -1e-9
  bool left_ok;
  double right_rhs;     ///< 1 - l_hat^2/(d-1)
  double right_slack;   ///< right_rhs - c; advisory only
  bool right_ok;
};

/// Orthonormal basis of M_i cap M-perp: Gram-Schmidt (two passes) in the pi
/// inner product over the mean-centred indicators of the x_{-i} cells.
template <typename Scalar>
SubspaceBasis<Scalar> subspace_basis(int i, const TargetDistribution<Scalar>& pi,
                                     double rank_tol = 1e-10) {
  using std::sqrt;
  const ProductSpace& space = pi.space();
  space.check_coordinate(i);
  const Index n_states = space.total_states();
  const Index stride = space.stride(i);
  std::vector<Vector<Scalar>> accepted;
  for (Index base = 0; base < n_states; ++base) {
    if (space.coordinate(base, i) != 0) continue;
    Vector<Scalar> e = Vector<Scalar>::Zero(n_states);
    Scalar cell(0);
    for (int v = 0; v < space.cardinality(i); ++v) {
      e[base + v * stride] = Scalar(1);
      cell += pi(base + v * stride);
    }
    e.array() -= cell;
    const Scalar original = pi_norm(e, pi);
    if (!(original > Scalar(0))) continue;
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& b : accepted) e -= inner_product(b, e, pi) * b;
    }
    const Scalar residual = pi_norm(e, pi);
    if (residual <= Scalar(rank_tol) * original) continue;
    accepted.push_back(e / residual);
  }
  SubspaceBasis<Scalar> out;
  out.coordinate = i;
  out.vectors.resize(n_states, static_cast<Index>(accepted.size()));
  for (std::size_t k = 0; k < accepted.size(); ++k) {
    out.vectors.col(static_cast<Index>(k)) = accepted[k];
  }
  return out;
}

/// c from the exact uniform-weight random-scan norm.
template <typename Scalar>
AngleResult<Scalar> friedrichs_angle_from_norm(const TargetDistribution<Scalar>& pi,
                                               Index cap = kDefaultStateCap) {
  const int d = pi.dimension();
  const Scalar norm = l2_norm_centered(rsg(uniform_weights(d), pi, cap));
  AngleResult<Scalar> out;
  out.value = (Scalar(d) * norm - Scalar(1)) / Scalar(d - 1);
  out.method = AngleMethod::closed_form;
  return out;
}

/// c as the top eigenvalue of (G - I)/(d-1), G the Gram matrix of all the
/// block bases stacked side by side.
template <typename Scalar>
AngleResult<Scalar> friedrichs_angle_bruteforce(const TargetDistribution<Scalar>& pi,
                                                Index cap = kDefaultStateCap) {
  check_state_cap(pi.total_states(), cap);
  const int d = pi.dimension();
  std::vector<SubspaceBasis<Scalar>> blocks;
  Index cols = 0;
  for (int i = 0; i < d; ++i) {
    blocks.push_back(subspace_basis(i, pi));
    cols += blocks.back().vectors.cols();
  }
  AngleResult<Scalar> out;
  out.method = AngleMethod::brute_force;
  if (cols == 0) {
    out.value = Scalar(0);
    out.degenerate = true;
    return out;
  }
  Matrix<Scalar> stacked(pi.total_states(), cols);
  Index at = 0;
  for (const auto& b : blocks) {
    stacked.middleCols(at, b.vectors.cols()) = b.vectors;
    at += b.vectors.cols();
  }
  const Matrix<Scalar> gram = stacked.transpose() * pi.pmf().asDiagonal() * stacked;
  Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> es(gram);
  if (es.info() != Eigen::Success) throw NumericError("Gram eigen-solver failed");
  const Index top = cols - 1;
  out.value = (es.eigenvalues()(top) - Scalar(1)) / Scalar(d - 1);
  out.witness = es.eigenvectors().col(top);
  return out;
}

namespace detail {

/// Minimum-norm point of the convex hull of `points` (exact, by enumerating
/// supports; intended for a handful of points).
template <typename Scalar>
Vector<Scalar> min_norm_hull(const std::vector<Vector<Scalar>>& points) {
  const std::size_t k = points.size();
  Vector<Scalar> best = points.front();
  Scalar best_norm = best.squaredNorm();
  for (std::uint32_t mask = 1; mask < (1u << k); ++mask) {
    std::vector<std::size_t> idx;
    for (std::size_t j = 0; j < k; ++j) {
      if (mask & (1u << j)) idx.push_back(j);
    }
    if (idx.size() < 2) continue;
    const Index s = static_cast<Index>(idx.size());
    Matrix<Scalar> kkt = Matrix<Scalar>::Zero(s + 1, s + 1);
    Vector<Scalar> rhs = Vector<Scalar>::Zero(s + 1);
    for (Index a = 0; a < s; ++a) {
      for (Index b = 0; b < s; ++b) {
        kkt(a, b) = points[idx[static_cast<std::size_t>(a)]].dot(points[idx[static_cast<std::size_t>(b)]]);
      }
      kkt(a, s) = kkt(s, a) = Scalar(1);
    }
    rhs(s) = Scalar(1);
    Eigen::FullPivLU<Matrix<Scalar>> lu(kkt);
    if (!lu.isInvertible()) continue;
    const Vector<Scalar> mu = lu.solve(rhs);
    if ((mu.head(s).array() < Scalar(-1e-14)).any()) continue;
    Vector<Scalar> p = Vector<Scalar>::Zero(points.front().size());
    for (Index a = 0; a < s; ++a) p += mu(a) * points[idx[static_cast<std::size_t>(a)]];
    if (p.squaredNorm() < best_norm) {
      best_norm = p.squaredNorm();
      best = p;
    }
  }
  for (std::size_t j = 1; j < k; ++j) {
    if (points[j].squaredNorm() < best_norm) {
      best_norm = points[j].squaredNorm();
      best = points[j];
    }
  }
  return best;
}

template <typename Scalar>
struct DescentOutcome {
  Scalar objective;  ///< max_i a^T B_i a
  Vector<Scalar> point;
  bool converged;
};

/// Minimise max_i a^T B_i a over the unit sphere: steepest descent along the
/// min-norm element of the hull of the delta-active Riemannian gradients,
/// Armijo backtracking on the true max, delta shrunk on stalls.
template <typename Scalar>
DescentOutcome<Scalar> minimax_on_sphere(const std::vector<Matrix<Scalar>>& forms,
                                         Vector<Scalar> a, double tol, int max_iter = 4000) {
  a.normalize();
  const auto evaluate = [&](const Vector<Scalar>& v, std::vector<Scalar>& q) {
    q.resize(forms.size());
    Scalar top(-1);
    for (std::size_t i = 0; i < forms.size(); ++i) {
      q[i] = v.dot(forms[i] * v);
      top = std::max(top, q[i]);
    }
    return top;
  };
  std::vector<Scalar> q, q_trial;
  Scalar value = evaluate(a, q);
  double delta = 1e-2;
  Scalar step(1);
  bool converged = false;
  for (int it = 0; it < max_iter; ++it) {
    std::vector<Vector<Scalar>> grads;
    for (std::size_t i = 0; i < forms.size(); ++i) {
      if (q[i] >= value - Scalar(delta)) grads.push_back(Scalar(2) * (forms[i] * a - q[i] * a));
    }
    const Vector<Scalar> h = min_norm_hull(grads);
    const Scalar hn2 = h.squaredNorm();
    if (hn2 <= Scalar(1e-24)) {
      if (delta <= tol) {
        converged = true;
        break;
      }
      delta *= 0.1;
      continue;
    }
    bool accepted = false;
    for (Scalar s = std::min<Scalar>(step * Scalar(2), Scalar(10)); s > Scalar(1e-16); s /= Scalar(2)) {
      Vector<Scalar> trial = a - s * h;
      trial.normalize();
      const Scalar tv = evaluate(trial, q_trial);
      if (tv <= value - Scalar(1e-4) * s * hn2) {
        a = std::move(trial);
        q.swap(q_trial);
        value = tv;
        step = s;
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      if (delta <= tol) {
        converged = true;
        break;
      }
      delta *= 0.1;
      step = Scalar(1);
    }
  }
  return {value, a, converged};
}

}  // namespace detail

/// Best-found value of the inclination (an upper bound on l) over `restarts`
/// seeded starts. Restart r starts from a Gaussian draw seeded by
/// derive_seed(seed, r); the minimum wins, ties to the lowest restart index.
template <typename Scalar>
InclinationResult<Scalar> inclination(const TargetDistribution<Scalar>& pi, int restarts = 32,
                                      double tol = 1e-12, std::uint64_t seed = 0,
                                      Index cap = kDefaultStateCap) {
  using std::sqrt;
  if (restarts < 1) throw ValidationError("inclination needs at least one restart");
  if (!(tol > 0)) throw ValidationError("inclination tolerance must be positive");
  check_state_cap(pi.total_states(), cap);
  const int d = pi.dimension();
  const std::vector<Index>& sup = pi.support();
  const Index m = static_cast<Index>(sup.size());

  InclinationResult<Scalar> out;
  out.restarts = restarts;
  out.tolerance = tol;
  out.witness = PiFunction<Scalar>::Zero(pi.total_states());
  if (m < 2) {
    out.degenerate = true;
    out.converged = true;
    return out;
  }

  Vector<Scalar> root(m);
  for (Index r = 0; r < m; ++r) root[r] = sqrt(pi(sup[static_cast<std::size_t>(r)]));
  Eigen::HouseholderQR<Matrix<Scalar>> qr(root);
  const Matrix<Scalar> q_full = qr.householderQ();
  const Matrix<Scalar> perp = q_full.rightCols(m - 1);

  std::vector<Matrix<Scalar>> forms;
  for (int i = 0; i < d; ++i) {
    const MarkovOperator<Scalar> step = small_step(i, pi, cap);
    Matrix<Scalar> proj(m, m);
    for (Index r = 0; r < m; ++r) {
      for (Index c = 0; c < m; ++c) {
        proj(r, c) = root[r] * step.kernel()(sup[static_cast<std::size_t>(r)],
                                             sup[static_cast<std::size_t>(c)]) / root[c];
      }
    }
    const Matrix<Scalar> sym = Scalar(0.5) * (proj + proj.transpose());
    const Matrix<Scalar> resid = Matrix<Scalar>::Identity(m, m) - sym;
    forms.push_back(perp.transpose() * resid * perp);
  }

  Scalar best = std::numeric_limits<Scalar>::infinity();
  Vector<Scalar> best_point;
  for (int r = 0; r < restarts; ++r) {
    std::mt19937_64 rng(derive_seed(seed, static_cast<std::uint64_t>(r)));
    std::normal_distribution<double> normal;
    Vector<Scalar> start(m - 1);
    for (Index k = 0; k < start.size(); ++k) start[k] = Scalar(normal(rng));
    const auto res = detail::minimax_on_sphere(forms, start, tol);
    if (res.objective < best) {
      best = res.objective;
      best_point = res.point;
      out.best_restart = r;
      out.converged = res.converged;
    }
  }
  out.value = sqrt(std::max(best, Scalar(0)));
  const Vector<Scalar> u = perp * best_point;
  for (Index r = 0; r < m; ++r) out.witness[sup[static_cast<std::size_t>(r)]] = u[r] / root[r];
  return out;
}

/// max_i ||f - P_i f||_pi, recomputed through conditional means.
template <typename Scalar>
Scalar inclination_objective(const PiFunction<Scalar>& f, const TargetDistribution<Scalar>& pi) {
  Scalar top(0);
  for (int i = 0; i < pi.dimension(); ++i) {
    const PiFunction<Scalar> r = f - conditional_mean(f, i, pi);
    top = std::max(top, pi_norm(r, pi));
  }
  return top;
}

/// Certified lower bound on l from the exact c: l >= (d-1)(1-c)/(2d).
inline double inclination_lower_bound(double c, int d) {
  return std::max(0.0, (d - 1) * (1.0 - c) / (2.0 * d));
}

/// Both sides of 1 - (2d/(d-1)) l <= c <= 1 - l^2/(d-1) evaluated at l_hat.
/// The left side stays valid for any upper bound l_hat >= l; the right side
/// is advisory because an overestimated l_hat can break it spuriously.
inline SandwichCheck check_sandwich(double c, double ell_hat, int d, double tol = 1e-9) {
  SandwichCheck s{};
  s.left_lhs = 1.0 - (2.0 * d / (d - 1)) * ell_hat;
  s.left_slack = c - s.left_lhs;
  s.left_ok = s.left_slack >= -tol;
  s.right_rhs = 1.0 - ell_hat * ell_hat / (d - 1);
  s.right_slack = s.right_rhs - c;
  s.right_ok = s.right_slack >= -tol;
  return s;
}

extern template AngleResult<double> friedrichs_angle_bruteforce<double>(
    const TargetDistribution<double>&, Index);
extern template InclinationResult<double> inclination<double>(const TargetDistribution<double>&,
                                                              int, double, std::uint64_t, Index);

}  // namespace gibbs
