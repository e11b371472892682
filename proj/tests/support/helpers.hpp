#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "gibbs/measure.hpp"
#include "gibbs/operators.hpp"
#include "gibbs/rng.hpp"
#include "oracles.hpp"

namespace testing_support {

inline oracle::Vec to_vec(const gibbs::Vector<double>& v) {
  return oracle::Vec(v.data(), v.data() + v.size());
}

inline oracle::Mat to_mat(const gibbs::Matrix<double>& a) {
  oracle::Mat m = oracle::zeros(static_cast<std::size_t>(a.rows()), static_cast<std::size_t>(a.cols()));
  for (gibbs::Index r = 0; r < a.rows(); ++r)
    for (gibbs::Index c = 0; c < a.cols(); ++c) m[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] = a(r, c);
  return m;
}

inline double max_abs_diff(const gibbs::Matrix<double>& a, const oracle::Mat& b) {
  double m = 0;
  for (gibbs::Index r = 0; r < a.rows(); ++r)
    for (gibbs::Index c = 0; c < a.cols(); ++c)
      m = std::max(m, std::abs(a(r, c) - b[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)]));
  return m;
}

/// The seeded suite shared by the property tests: d in {2,3,4}, |X_i| in {2,3}.
inline gibbs::TargetDistribution<double> suite_target(std::uint64_t k) {
  std::mt19937_64 rng(gibbs::derive_seed(20240601, k));
  const int d = 2 + static_cast<int>(rng() % 3);
  std::vector<int> dims(static_cast<std::size_t>(d));
  for (int& n : dims) n = 2 + static_cast<int>(rng() % 2);
  return gibbs::random_target(gibbs::derive_seed(77, k), dims, 1.0);
}

inline gibbs::Vector<double> random_function(gibbs::Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  gibbs::Vector<double> f(n);
  for (gibbs::Index x = 0; x < n; ++x) f[x] = g(rng);
  return f;
}

}  // namespace testing_support
