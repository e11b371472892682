#include "gibbs/bounds.hpp"

#include <limits>

namespace gibbs {

BoundReport verify_bounds(const TargetDistribution<double>& pi,
                          const std::vector<std::vector<int>>& orders,
                          const std::vector<std::vector<double>>& weight_list, Index cap) {
  const int d = pi.dimension();
  BoundReport report;
  report.d = d;
  report.uniform_rsg_norm = l2_norm_centered(rsg(uniform_weights(d), pi, cap));
  report.c = (d * report.uniform_rsg_norm - 1.0) / (d - 1);
  const double c = std::min(report.c, 1.0);
  report.ell_lower = inclination_lower_bound(c, d);

  const std::vector<double> uniform = uniform_weights(d);
  const double sharp_bound = rsg_norm_bound(c, d, uniform);
  report.entries.push_back({"cor1_uniform_sharp", describe(RandomScan{uniform}), BoundKind::upper,
                            sharp_bound, report.uniform_rsg_norm,
                            sharp_bound - report.uniform_rsg_norm, true});
  report.sharp = std::abs(sharp_bound - report.uniform_rsg_norm) <= kBoundTolerance;
  report.entries.push_back({"cor1a_lower", describe(RandomScan{uniform}), BoundKind::lower,
                            1.0 / d, report.uniform_rsg_norm, report.uniform_rsg_norm - 1.0 / d,
                            true});

  for (const auto& w : weight_list) {
    const double exact = l2_norm_centered(rsg(w, pi, cap));
    const double bound = rsg_norm_bound(c, d, w);
    const std::string scan = describe(RandomScan{w});
    report.entries.push_back({"cor1", scan, BoundKind::upper, bound, exact, bound - exact, true});
    report.entries.push_back(
        {"cor1a_lower", scan, BoundKind::lower, 1.0 / d, exact, exact - 1.0 / d, true});
  }

  const double from_c = dsg_norm_bound_from_c(c, d);
  const double from_l = dsg_norm_bound_from_l(report.ell_lower, d);
  for (const auto& order : orders) {
    const double exact = l2_norm_centered(dsg(order, pi, cap));
    const std::string scan = describe(DeterministicScan{order});
    report.entries.push_back({"cor2", scan, BoundKind::upper, from_c, exact, from_c - exact, true});
    report.entries.push_back(
        {"lemma_dsg_certified_l", scan, BoundKind::upper, from_l, exact, from_l - exact, true});
  }
  return report;
}

EquivalencePanel equivalence_panel(const TargetDistribution<double>& pi,
                                   const std::vector<std::vector<int>>& orders,
                                   const std::vector<std::vector<double>>& weight_list,
                                   double threshold, Index cap) {
  EquivalencePanel panel;
  const double limit = 1.0 - threshold;
  for (const auto& w : weight_list) {
    const double v = l2_norm_centered(rsg(w, pi, cap));
    panel.entries.push_back({"rsg_norm", describe(RandomScan{w}), v, v < limit});
  }
  for (const auto& order : orders) {
    const MarkovOperator<double> p = dsg(order, pi, cap);
    const std::string scan = describe(DeterministicScan{order});
    const double radius = spectral_radius_centered(p);
    const double norm = l2_norm_centered(p);
    const double sym = l2_norm_centered(symmetrized_sweep(order, pi, cap));
    panel.entries.push_back({"dsg_radius", scan, radius, radius < limit});
    panel.entries.push_back({"dsg_norm", scan, norm, norm < limit});
    panel.entries.push_back({"sym_norm", scan, sym, sym < limit});
  }
  panel.all_hold = std::all_of(panel.entries.begin(), panel.entries.end(),
                               [](const PanelEntry& e) { return e.below_one; });
  panel.none_hold = std::none_of(panel.entries.begin(), panel.entries.end(),
                                 [](const PanelEntry& e) { return e.below_one; });
  return panel;
}

PowerLawFit fit_power_law(const std::vector<int>& ds, const std::vector<double>& gaps) {
  if (ds.size() != gaps.size()) throw DimensionError("fit_power_law: size mismatch");
  if (ds.size() < 3) throw ValidationError("power-law fit needs at least 3 dimension points");
  const std::size_t n = ds.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < n; ++k) {
    if (!(gaps[k] > 0)) throw ValidationError("power-law fit needs positive gaps");
    const double x = std::log(static_cast<double>(ds[k]));
    const double y = std::log(gaps[k]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  PowerLawFit fit;
  fit.beta = -slope;
  fit.gamma_ls = std::exp((sy - slope * sx) / n);
  fit.gamma = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < n; ++k) {
    fit.gamma = std::min(fit.gamma, gaps[k] * std::pow(static_cast<double>(ds[k]), fit.beta));
  }
  return fit;
}

DimensionSweep dimension_sweep(const std::function<TargetDistribution<double>(int)>& family,
                               const std::vector<int>& ds, int perm_samples, std::uint64_t seed,
                               Index cap) {
  if (ds.size() < 3) throw ValidationError("dimension sweep needs at least 3 dimension points");
  DimensionSweep sweep;
  std::vector<double> rsg_gaps, dsg_gaps;
  for (int d : ds) {
    const TargetDistribution<double> pi = family(d);
    check_state_cap(pi.total_states(), cap);
    SweepPoint pt;
    pt.d = d;
    pt.gap_rsg = 1.0 - l2_norm_centered(rsg(uniform_weights(d), pi, cap));
    pt.gap_dsg_worst = std::numeric_limits<double>::infinity();
    pt.gap_dsg_best = -std::numeric_limits<double>::infinity();
    for (const auto& order : scan_orders(d, perm_samples, seed)) {
      const double gap = 1.0 - spectral_radius_centered(dsg(order, pi, cap));
      pt.gap_dsg_worst = std::min(pt.gap_dsg_worst, gap);
      pt.gap_dsg_best = std::max(pt.gap_dsg_best, gap);
      ++pt.orders;
    }
    rsg_gaps.push_back(pt.gap_rsg);
    dsg_gaps.push_back(pt.gap_dsg_worst);
    sweep.points.push_back(pt);
  }
  sweep.rsg_fit = fit_power_law(ds, rsg_gaps);
  if (std::all_of(dsg_gaps.begin(), dsg_gaps.end(), [](double g) { return g > 0; })) {
    sweep.dsg_fit = fit_power_law(ds, dsg_gaps);
  }
  if (!(sweep.rsg_fit.beta > 0)) {
    throw ValidationError("random-scan gap does not decay with d (beta = " +
                          std::to_string(sweep.rsg_fit.beta) + "); no transfer to apply");
  }
  sweep.floor_ok = true;
  for (auto& pt : sweep.points) {
    pt.floor = rapid_mixing_transfer(sweep.rsg_fit.beta, sweep.rsg_fit.gamma, pt.d);
    pt.floor_ok = pt.gap_dsg_worst >= pt.floor - 1e-12;
    sweep.floor_ok = sweep.floor_ok && pt.floor_ok;
  }
  return sweep;
}

}  // namespace gibbs
