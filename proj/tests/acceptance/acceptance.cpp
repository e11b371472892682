// One PASS/FAIL line per acceptance criterion. `--criterion k` runs one.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "gibbs/bounds.hpp"
#include "gibbs/counterexample.hpp"
#include "gibbs/geometry.hpp"
#include "gibbs/operators.hpp"
#include "gibbs/sampler.hpp"
#include "helpers.hpp"

using namespace gibbs;
using testing_support::suite_target;

namespace {

constexpr int kSuite = 100;
// seconds; 0 means unlimited
constexpr double kTimeLimits[12] = {60, 0, 0, 0, 0, 0, 0, 300, 300, 300, 120, 0};

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
};

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

Outcome norm_identity() {
  Outcome o;
  double worst = 0;
  for (int k = 0; k < kSuite; ++k) {
    const auto pi = suite_target(static_cast<std::uint64_t>(k));
    const int d = pi.dimension();
    const double norm = l2_norm_centered(rsg(uniform_weights(d), pi));
    const double c = friedrichs_angle_bruteforce(pi).value;
    worst = std::max(worst, std::abs(norm - (d - 1.0) / d * (c + 1.0 / (d - 1))));
  }
  o.require(worst <= 1e-8, "max deviation " + fmt(worst));
  if (o.pass) o.detail = "max deviation " + fmt(worst);
  return o;
}

Outcome worked_values() {
  Outcome o;
  const std::vector<int> order{0, 1};
  const auto u = independent_target({2, 2});
  const double u_dsg = l2_norm_centered(dsg(order, u));
  const double u_rsg = l2_norm_centered(rsg(uniform_weights(2), u));
  const double u_c = friedrichs_angle_bruteforce(u).value;
  const double u_l = inclination(u, 32).value;
  o.require(u_dsg <= 1e-12, "uniform DSG norm " + fmt(u_dsg));
  o.require(std::abs(u_rsg - 0.5) <= 1e-10, "uniform RSG norm " + fmt(u_rsg));
  o.require(std::abs(u_c) <= 1e-9, "uniform c " + fmt(u_c));
  o.require(std::abs(u_l - 0.70711) <= 1e-4, "uniform inclination " + fmt(u_l));

  const auto e = equicorrelated_binary(2, 0.25);
  const double e_dsg = l2_norm_centered(dsg(order, e));
  const double e_rsg = l2_norm_centered(rsg(uniform_weights(2), e));
  const double e_c = friedrichs_angle_bruteforce(e).value;
  o.require(std::abs(e_dsg - 0.25) <= 1e-10,
            "eps=0.25 DSG norm " + fmt(e_dsg) + " (expected 0.25; spectral radius is " +
                fmt(spectral_radius_centered(dsg(order, e))) + ")");
  o.require(std::abs(e_rsg - 0.75) <= 1e-10, "eps=0.25 RSG norm " + fmt(e_rsg));
  o.require(std::abs(e_c - 0.5) <= 1e-9, "eps=0.25 c " + fmt(e_c));
  return o;
}

Outcome bound_dominance() {
  Outcome o;
  int violations = 0;
  double worst_sharp = 0;
  for (int k = 0; k < kSuite; ++k) {
    const auto pi = suite_target(static_cast<std::uint64_t>(k));
    std::vector<std::vector<double>> ws;
    for (int w = 0; w < 50; ++w) {
      ws.push_back(random_weights(pi.dimension(), static_cast<std::uint64_t>(k), static_cast<std::uint64_t>(w)));
    }
    const auto rep = verify_bounds(pi, scan_orders(pi.dimension()), ws);
    violations += static_cast<int>(rep.violations(1e-9).size());
    worst_sharp = std::max(worst_sharp, std::abs(rep.entries.front().slack));
  }
  o.require(violations == 0, std::to_string(violations) + " violations");
  o.require(worst_sharp <= 1e-9, "sharpness slack " + fmt(worst_sharp));
  if (o.pass) o.detail = "0 violations, sharpness slack " + fmt(worst_sharp);
  return o;
}

Outcome telescoping_and_powers() {
  Outcome o;
  double worst_tele = 0;
  double worst_pow = 0;
  double worst_eq = 0;
  for (int k = 0; k < kSuite; ++k) {
    const auto pi = suite_target(static_cast<std::uint64_t>(k));
    const int d = pi.dimension();
    std::mt19937_64 rng(derive_seed(31, static_cast<std::uint64_t>(k)));
    const Matrix<double> sweep_kernel = dsg(identity_order(d), pi).kernel();
    for (int rep = 0; rep < 1000; ++rep) {
      const Vector<double> f = testing_support::random_function(pi.total_states(), rng);
      const Vector<double> mf = mean_project(f, pi);
      const Vector<double> full = sweep_kernel * f;
      const double budget = std::pow(pi_norm(Vector<double>(f - mf), pi), 2) -
                            std::pow(pi_norm(Vector<double>(full - mf), pi), 2);
      Vector<double> prev = f;
      for (int j = d - 1; j >= 0; --j) {
        const Vector<double> next = conditional_mean(prev, j, pi);
        worst_tele = std::min(worst_tele, budget - std::pow(pi_norm(Vector<double>(prev - next), pi), 2));
        prev = next;
      }
    }
    std::vector<MarkovOperator<double>> ops;
    for (const auto& order : scan_orders(d)) ops.push_back(dsg(order, pi));
    ops.push_back(rsg(uniform_weights(d), pi));
    ops.push_back(symmetrized_sweep(identity_order(d), pi));
    for (const auto& p : ops) {
      const auto seq = power_norm_sequence(p, 10);
      const bool rev = is_reversible(p);
      for (int n = 1; n <= 10; ++n) {
        const double lhs = seq[static_cast<std::size_t>(n - 1)];
        const double rhs = std::pow(seq[0], n);
        worst_pow = std::max(worst_pow, lhs - rhs);
        if (rev) worst_eq = std::max(worst_eq, std::abs(lhs - rhs));
      }
    }
  }
  o.require(worst_tele >= -1e-10, "telescoping slack " + fmt(worst_tele));
  o.require(worst_pow <= 1e-10, "power excess " + fmt(worst_pow));
  o.require(worst_eq <= 1e-9, "reversible equality gap " + fmt(worst_eq));
  if (o.pass) {
    o.detail = "telescoping min slack " + fmt(worst_tele) + ", power excess " + fmt(worst_pow) +
               ", reversible gap " + fmt(worst_eq);
  }
  return o;
}

Outcome symmetrized_identity() {
  Outcome o;
  double worst = 0;
  for (int k = 0; k < kSuite; ++k) {
    const auto pi = suite_target(static_cast<std::uint64_t>(k));
    for (const auto& order : scan_orders(pi.dimension())) {
      const double a = l2_norm_centered(symmetrized_sweep(order, pi));
      const double b = l2_norm_centered(dsg(order, pi));
      worst = std::max(worst, std::abs(a - b * b));
    }
  }
  o.require(worst <= 1e-9, "max deviation " + fmt(worst));
  if (o.pass) o.detail = "max deviation " + fmt(worst);
  return o;
}

Outcome sandwich() {
  Outcome o;
  int left_bad = 0;
  int right_ok = 0;
  for (int k = 0; k < kSuite; ++k) {
    const auto pi = suite_target(static_cast<std::uint64_t>(k));
    const double c = friedrichs_angle_bruteforce(pi).value;
    const double ell = inclination(pi, 32, 1e-12, static_cast<std::uint64_t>(k)).value;
    const auto s = check_sandwich(c, ell, pi.dimension());
    left_bad += !s.left_ok;
    right_ok += s.right_ok;
  }
  o.require(left_bad == 0, std::to_string(left_bad) + " left-side violations");
  o.require(right_ok >= 95, "right side holds on " + std::to_string(right_ok) + "/100");
  if (o.pass) o.detail = "left side on 100/100, right side on " + std::to_string(right_ok) + "/100";
  return o;
}

Outcome solidarity() {
  Outcome o;
  std::string row;
  for (double eps : {0.5, 0.1, 0.01, 0.001, 0.0}) {
    const auto pi = equicorrelated_binary(2, eps);
    const double g_rsg = 1 - spectral_radius_centered(rsg(uniform_weights(2), pi));
    const double g_dsg = 1 - spectral_radius_centered(dsg({0, 1}, pi));
    o.require((g_rsg > 1e-9) == (g_dsg > 1e-9), "eps=" + fmt(eps) + " gaps disagree");
    if (eps == 0.0) {
      o.require(g_rsg <= 1e-9 && g_dsg <= 1e-9, "eps=0 gaps " + fmt(g_rsg) + ", " + fmt(g_dsg));
    }
    row += " eps=" + fmt(eps) + ":(" + fmt(g_rsg) + "," + fmt(g_dsg) + ")";
  }
  if (o.pass) o.detail = "gaps (rsg,dsg)" + row;
  return o;
}

Outcome transfer() {
  Outcome o;
  const auto sweep = dimension_sweep([](int d) { return equicorrelated_binary(d, 0.25); }, {2, 3, 4, 5, 6});
  const auto& fit = sweep.rsg_fit;
  for (const auto& p : sweep.points) {
    const double floor = fit.gamma * fit.gamma / 32 * std::pow(p.d, -2 * fit.beta - 2);
    o.require(p.gap_dsg_worst >= floor - 1e-12,
              "d=" + std::to_string(p.d) + " gap " + fmt(p.gap_dsg_worst) + " < floor " + fmt(floor));
  }
  if (o.pass) o.detail = "beta " + fmt(fit.beta) + ", gamma " + fmt(fit.gamma);
  return o;
}

Outcome clt() {
  Outcome o;
  double worst = 1e300;
  for (int k = 0; k < 10; ++k) {
    const auto pi = suite_target(static_cast<std::uint64_t>(k));
    const auto f = coordinate_indicator(pi.space(), 0, 0);
    for (const ScanSpec& scan : {ScanSpec{DeterministicScan{identity_order(pi.dimension())}},
                                 ScanSpec{RandomScan{uniform_weights(pi.dimension())}}}) {
      const Index n = 100000;
      const auto trace = run_chain(pi, scan, n, derive_seed(900, static_cast<std::uint64_t>(k)));
      const auto est = asymptotic_variance_estimate(trace, f, default_batch_count(n));
      const double bound = clt_variance_bound(certified_rho(pi, scan), f, pi);
      const double slack = bound + 3 * est.std_error - est.estimate;
      worst = std::min(worst, slack);
      o.require(slack >= 0, "target " + std::to_string(k) + " " + describe(scan) + " estimate " +
                                fmt(est.estimate) + " > bound " + fmt(bound));
    }
  }
  if (o.pass) o.detail = "min slack " + fmt(worst);
  return o;
}

Outcome hoeffding() {
  Outcome o;
  const auto pi = equicorrelated_binary(2, 0.25);
  const auto f = coordinate_indicator(pi.space(), 0, 0);
  int cells = 0;
  for (const ScanSpec& scan : {ScanSpec{DeterministicScan{{0, 1}}}, ScanSpec{RandomScan{uniform_weights(2)}}}) {
    for (Index n : {Index(100), Index(1000)}) {
      for (double eps : {0.1, 0.2, 0.3}) {
        const auto t = empirical_tail(pi, scan, f, n, eps, 10000, derive_seed(77, static_cast<std::uint64_t>(cells)));
        ++cells;
        o.require(t.pass, describe(scan) + " n=" + std::to_string(n) + " eps=" + fmt(eps) + " frequency " +
                              fmt(t.frequency) + " > bound " + fmt(t.bound));
      }
    }
  }
  if (o.pass) o.detail = std::to_string(cells) + " cells within bound + 3 SE";
  return o;
}

Outcome counterexample() {
  Outcome o;
  const auto rows = reversibilization_gap_sweep(0.5, {10, 20, 40, 80}, 1.5);
  for (std::size_t r = 1; r < rows.size(); ++r) {
    o.require(rows[r].gap_k < rows[r - 1].gap_k, "gap(K) not decreasing at N=" + std::to_string(rows[r].truncation));
  }
  o.require(rows.back().gap_k <= 0.5 * rows.front().gap_k, "gap(K_80) " + fmt(rows.back().gap_k));
  for (const auto& row : rows) {
    const LadderChainSpec spec{0.5, row.truncation};
    const auto k = additive_reversibilization(build_ladder(spec));
    const auto c = conductance(k, ladder_cuts(spec), 0);
    for (std::size_t n = 1; n <= c.per_cut.size(); ++n) {
      const double bound = 1.05 / (static_cast<double>(n) * row.pi_origin);
      o.require(c.per_cut[n - 1] <= bound, "N=" + std::to_string(row.truncation) + " cut " + std::to_string(n));
    }
    o.require(row.gap_k <= 2 * row.kappa_upper + 1e-9, "Cheeger check at N=" + std::to_string(row.truncation));
  }
  const double m = rows.back().moment.value;
  o.require(std::abs(m - 3) <= 0.01, "E[1.5^tau] at N=80 is " + fmt(m));
  o.require(return_time_moment({0.5, 80}, 2.0, true).divergent, "E[2^tau] not flagged divergent");
  if (o.pass) {
    o.detail = "gap(K) " + fmt(rows.front().gap_k) + " -> " + fmt(rows.back().gap_k) + ", E[1.5^tau] " + fmt(m);
  }
  return o;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome determinism() {
  namespace fs = std::filesystem;
  Outcome o;
  const std::vector<std::string> commands{
      "analyze --model random_dirichlet --d 3 --model-seed 4 --kernels",
      "analyze --model equicorrelated_binary --d 2 --epsilon 0.25 --scan dsg:1,2 --scan rsg:uniform",
      "sweep",
      "sample --model equicorrelated_binary --d 2 --replicas 2000 --seed 3 --trace",
      "counterexample --q 0.5 --N 10,20,40 --b 1.5 --kernels",
  };
  const fs::path root = fs::temp_directory_path() / "gibbsgap_acceptance";
  int compared = 0;
  for (std::size_t k = 0; k < commands.size(); ++k) {
    std::vector<fs::path> dirs;
    for (const char* tag : {"a", "b"}) {
      const fs::path dir = root / (std::to_string(k) + tag);
      fs::remove_all(dir);
      fs::create_directories(dir);
      const std::string cmd = std::string(GIBBSGAP_EXE) + " --out " + dir.string() + " " + commands[k] +
                              " >/dev/null 2>&1";
      const int status = std::system(cmd.c_str());
      const int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
      o.require(code == 0, "'" + commands[k] + "' exited with " + std::to_string(code));
      dirs.push_back(dir);
    }
    int files = 0;
    for (const auto& e : fs::directory_iterator(dirs[0])) {
      ++files;
      const auto other = dirs[1] / e.path().filename();
      o.require(fs::exists(other) && slurp(e.path()) == slurp(other),
                "'" + commands[k] + "' differs in " + e.path().filename().string());
    }
    o.require(files > 0, "'" + commands[k] + "' wrote nothing");
    compared += files;
  }
  fs::remove_all(root);
  if (o.pass) o.detail = std::to_string(compared) + " files byte-identical across reruns";
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"norm identity for the uniform random scan", norm_identity},
      {"worked 2x2 values", worked_values},
      {"bound dominance and sharpness", bound_dominance},
      {"telescoping projections and power norms", telescoping_and_powers},
      {"symmetrized sweep norm equals squared sweep norm", symmetrized_identity},
      {"angle/inclination sandwich", sandwich},
      {"solidarity on the correlated pair", solidarity},
      {"rapid-mixing transfer floor", transfer},
      {"CLT variance bound", clt},
      {"Hoeffding tail bound", hoeffding},
      {"ladder counterexample", counterexample},
      {"CLI determinism", determinism},
  };
  int only = 0;
  for (int a = 1; a < argc; ++a) {
    const std::string arg = argv[a];
    if (arg == "--criterion" && a + 1 < argc) {
      only = std::atoi(argv[++a]);
    } else {
      std::cerr << "usage: acceptance [--criterion k]\n";
      return 2;
    }
  }
  if (only < 0 || only > static_cast<int>(criteria.size())) {
    std::cerr << "criterion must lie in 1.." << criteria.size() << "\n";
    return 2;
  }
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    if (only != 0 && static_cast<int>(k + 1) != only) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (const double limit = kTimeLimits[k]; limit > 0 && secs > limit) {
      o.require(false, "runtime over " + fmt(limit) + " s");
    }
    std::printf("criterion %2zu %s  %s (%.1f s): %s\n", k + 1, o.pass ? "PASS" : "FAIL", criteria[k].first.c_str(),
                secs, o.detail.c_str());
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed == 0 ? 0 : 1;
}
