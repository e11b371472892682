// gibbsgap: spectral analysis of Gibbs samplers on finite product spaces.
//
// Exit status: 0 success, 1 an asserted inequality failed, 2 usage or input
// error, 3 state-count cap exceeded, 4 numerical failure.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gibbs/bounds.hpp"
#include "gibbs/counterexample.hpp"
#include "gibbs/errors.hpp"
#include "gibbs/geometry.hpp"
#include "gibbs/io.hpp"
#include "gibbs/measure.hpp"
#include "gibbs/operators.hpp"
#include "gibbs/sampler.hpp"

namespace fs = std::filesystem;
using gibbs::Index;
using gibbs::io::Json;

namespace {

enum Exit { kOk = 0, kAssertion = 1, kUsage = 2, kCap = 3, kNumeric = 4 };

struct Common {
  std::string out_dir = ".";
  Index cap = gibbs::kDefaultStateCap;
  std::string format = "both";

  bool json() const { return format != "csv"; }
  bool csv() const { return format != "json"; }
};

struct TargetOptions {
  std::string file;
  std::string model;
  std::vector<int> dims;
  int d = 0;
  int card = 2;
  double epsilon = 0.25;
  std::uint64_t model_seed = 0;
  double concentration = 1.0;
};

void add_target_options(CLI::App* cmd, TargetOptions& t) {
  auto* file = cmd->add_option("--target", t.file, "Target spec file (JSON)");
  auto* model = cmd->add_option("--model", t.model, "Named model")
                    ->check(CLI::IsMember({"equicorrelated_binary", "random_dirichlet",
                                           "independent_uniform"}));
  file->excludes(model);
  cmd->add_option("--dims", t.dims, "Coordinate cardinalities")->delimiter(',');
  cmd->add_option("--d", t.d, "Number of coordinates");
  cmd->add_option("--card", t.card, "Cardinality of every coordinate with --d")->capture_default_str();
  cmd->add_option("--epsilon", t.epsilon, "equicorrelated_binary parameter")->capture_default_str();
  cmd->add_option("--model-seed", t.model_seed, "random_dirichlet seed")->capture_default_str();
  cmd->add_option("--concentration", t.concentration, "random_dirichlet concentration")
      ->capture_default_str();
}

Json model_spec(const TargetOptions& t, const std::vector<int>& dims) {
  Json model;
  model["name"] = t.model;
  if (t.model == "equicorrelated_binary") model["epsilon"] = t.epsilon;
  if (t.model == "random_dirichlet") {
    model["seed"] = t.model_seed;
    model["concentration"] = t.concentration;
  }
  Json spec;
  spec["dims"] = dims;
  spec["model"] = std::move(model);
  return spec;
}

std::vector<int> dims_for(const TargetOptions& t, int d) {
  const int card = t.model == "equicorrelated_binary" ? 2 : t.card;
  return std::vector<int>(static_cast<std::size_t>(d), card);
}

/// The JSON target spec selected by the flags.
Json target_spec(const TargetOptions& t) {
  if (!t.file.empty()) {
    std::ifstream in(t.file, std::ios::binary);
    if (!in) throw gibbs::ValidationError("cannot read target spec " + t.file);
    std::stringstream buffer;
    buffer << in.rdbuf();
    try {
      return Json::parse(buffer.str());
    } catch (const nlohmann::json::parse_error& e) {
      throw gibbs::ValidationError(t.file + " is not valid JSON: " + e.what());
    }
  }
  if (t.model.empty()) throw gibbs::ValidationError("one of --target and --model is required");
  if (!t.dims.empty() && t.d != 0) throw gibbs::ValidationError("--dims and --d are exclusive");
  if (!t.dims.empty()) return model_spec(t, t.dims);
  if (t.d == 0) throw gibbs::ValidationError("--model needs --d or --dims");
  return model_spec(t, dims_for(t, t.d));
}

std::vector<gibbs::ScanSpec> parse_scans(const std::vector<std::string>& texts, int d,
                                         std::vector<std::string>& resolved) {
  std::vector<gibbs::ScanSpec> scans;
  if (texts.empty()) {
    scans.push_back(gibbs::DeterministicScan{gibbs::identity_order(d)});
    scans.push_back(gibbs::RandomScan{gibbs::uniform_weights(d)});
  } else {
    for (const auto& s : texts) scans.push_back(gibbs::io::parse_scan(s, d));
  }
  for (const auto& s : scans) resolved.push_back(gibbs::describe(s));
  return scans;
}

Json common_config(const Common& c) {
  Json j;
  j["cap"] = c.cap;
  j["format"] = c.format;
  return j;
}

void emit(const Common& c, const std::string& name, const std::string& contents) {
  const fs::path path = fs::path(c.out_dir) / name;
  gibbs::io::write_file(path, contents);
  std::cout << "wrote " << path.string() << "\n";
}

// ---------------------------------------------------------------------------

struct AnalyzeOptions {
  TargetOptions target;
  std::vector<std::string> scans;
  std::uint64_t seed = 0;
  int restarts = 32;
  double inclination_tol = 1e-12;
  double bound_tol = gibbs::kBoundTolerance;
  double panel_threshold = 1e-9;
  int random_weights = 50;
  int perm_samples = 120;
  int power_n = 10;
  bool kernels = false;
};

int cmd_analyze(const Common& common, const AnalyzeOptions& o) {
  const Json spec = target_spec(o.target);
  const gibbs::TargetDistribution<double> pi = gibbs::io::parse_target(spec, common.cap);
  const int d = pi.dimension();
  std::vector<std::string> scan_names;
  const auto scans = parse_scans(o.scans, d, scan_names);
  if (o.restarts < 1) throw gibbs::ValidationError("--restarts must be at least 1");
  if (o.random_weights < 0) throw gibbs::ValidationError("--random-weights must be non-negative");
  if (o.power_n < 1) throw gibbs::ValidationError("--power-n must be at least 1");

  Json config = common_config(common);
  config["target"] = spec;
  config["scans"] = scan_names;
  config["seed"] = o.seed;
  config["restarts"] = o.restarts;
  config["inclination_tol"] = o.inclination_tol;
  config["bound_tol"] = o.bound_tol;
  config["panel_threshold"] = o.panel_threshold;
  config["random_weights"] = o.random_weights;
  config["perm_samples"] = o.perm_samples;
  config["power_n"] = o.power_n;
  Json report = gibbs::io::report_header("analyze", config);
  report["target"] = gibbs::io::to_json(pi);

  bool norms_ok = true;
  Json scan_reports = Json::array();
  std::vector<std::vector<double>> weight_list;
  for (std::size_t k = 0; k < scans.size(); ++k) {
    const gibbs::MarkovOperator<double> p = gibbs::build(scans[k], pi, common.cap);
    const auto summary = gibbs::summarize(p);
    Json entry = gibbs::io::to_json(summary);
    entry["scan"] = scan_names[k];
    entry["power_norms"] = gibbs::power_norm_sequence(p, o.power_n);
    norms_ok = norms_ok && summary.l2_norm_centered <= 1 + 1e-10 &&
               summary.spectral_radius_centered <= summary.l2_norm_centered + 1e-9;
    if (const auto* rs = std::get_if<gibbs::RandomScan>(&scans[k])) weight_list.push_back(rs->weights);
    scan_reports.push_back(std::move(entry));
    if (o.kernels && common.csv()) {
      Json meta = gibbs::io::report_header("analyze", config);
      meta["kernel"] = scan_names[k];
      emit(common, "kernel_" + std::to_string(k + 1) + ".csv", gibbs::io::kernel_csv(p, meta));
    }
  }
  report["scans"] = std::move(scan_reports);

  const auto closed = gibbs::friedrichs_angle_from_norm(pi, common.cap);
  const auto brute = gibbs::friedrichs_angle_bruteforce(pi, common.cap);
  const bool angles_agree = std::abs(closed.value - brute.value) <= 1e-8;
  report["angle"] = {{"closed_form", gibbs::io::to_json(closed)},
                     {"brute_force", gibbs::io::to_json(brute)},
                     {"agree", angles_agree}};

  const auto incl = gibbs::inclination(pi, o.restarts, o.inclination_tol, o.seed, common.cap);
  const double c = std::min(closed.value, 1.0);
  const auto sandwich = gibbs::check_sandwich(c, incl.value, d, o.bound_tol);
  report["inclination"] = gibbs::io::to_json(incl);
  report["inclination"]["certified_lower"] = gibbs::inclination_lower_bound(c, d);
  report["sandwich"] = gibbs::io::to_json(sandwich);

  for (int k = 0; k < o.random_weights; ++k) {
    weight_list.push_back(gibbs::random_weights(d, o.seed, static_cast<std::uint64_t>(k)));
  }
  const auto orders = gibbs::scan_orders(d, o.perm_samples, o.seed);
  const gibbs::BoundReport bounds = gibbs::verify_bounds(pi, orders, weight_list, common.cap);
  report["bounds"] = gibbs::io::to_json(bounds);
  std::vector<std::vector<double>> panel_weights{gibbs::uniform_weights(d)};
  panel_weights.insert(panel_weights.end(), weight_list.begin(), weight_list.end());
  const auto panel =
      gibbs::equivalence_panel(pi, orders, panel_weights, o.panel_threshold, common.cap);
  report["equivalence_panel"] = gibbs::io::to_json(panel);

  const bool bounds_ok = bounds.ok(o.bound_tol);
  report["assertions"] = {{"norms_within_one", norms_ok},
                          {"angles_agree", angles_agree},
                          {"bounds_ok", bounds_ok},
                          {"sandwich_left_ok", sandwich.left_ok},
                          {"dichotomy", panel.dichotomy()}};

  if (common.json()) emit(common, "analyze.json", gibbs::io::dump(report));
  if (common.csv()) {
    emit(common, "analyze_bounds.csv",
         gibbs::io::bounds_csv(bounds, gibbs::io::report_header("analyze", config)));
  }
  for (const auto& s : report["scans"]) {
    std::printf("%-24s norm %.10g  radius %.10g  gap %.10g\n", s["scan"].get<std::string>().c_str(),
                s["l2_norm_centered"].get<double>(), s["spectral_radius_centered"].get<double>(),
                s["spectral_gap"].get<double>());
  }
  std::printf("c %.10g (brute force %.10g)  inclination %.10g\n", closed.value, brute.value,
              incl.value);
  const bool ok = norms_ok && angles_agree && bounds_ok && sandwich.left_ok && panel.dichotomy();
  if (!ok) std::cerr << "assertion failed; see the assertions block of the report\n";
  return ok ? kOk : kAssertion;
}

// ---------------------------------------------------------------------------

struct SweepOptions {
  TargetOptions target;
  std::vector<int> ds{2, 3, 4, 5, 6};
  int perm_samples = 120;
  std::uint64_t seed = 0;
};

int cmd_sweep(const Common& common, SweepOptions o) {
  if (!o.target.file.empty()) throw gibbs::ValidationError("sweep needs a model family, not --target");
  if (o.target.model.empty()) o.target.model = "equicorrelated_binary";
  Json family = model_spec(o.target, dims_for(o.target, 2))["model"];
  if (o.target.model != "equicorrelated_binary") family["card"] = o.target.card;

  Json config = common_config(common);
  config["family"] = family;
  config["d"] = o.ds;
  config["perm_samples"] = o.perm_samples;
  config["seed"] = o.seed;
  config["floor_tol"] = 1e-12;

  const auto make = [&](int d) {
    return gibbs::io::parse_target(model_spec(o.target, dims_for(o.target, d)), common.cap);
  };
  const gibbs::DimensionSweep sweep =
      gibbs::dimension_sweep(make, o.ds, o.perm_samples, o.seed, common.cap);

  Json report = gibbs::io::report_header("sweep", config);
  report["sweep"] = gibbs::io::to_json(sweep);
  if (common.json()) emit(common, "sweep.json", gibbs::io::dump(report));
  if (common.csv()) {
    emit(common, "sweep.csv", gibbs::io::sweep_csv(sweep, gibbs::io::report_header("sweep", config)));
  }
  for (const auto& p : sweep.points) {
    std::printf("d=%d gap_rsg %.10g  gap_dsg [%.10g, %.10g]  floor %.4g %s\n", p.d, p.gap_rsg,
                p.gap_dsg_worst, p.gap_dsg_best, p.floor, p.floor_ok ? "ok" : "VIOLATED");
  }
  return sweep.floor_ok ? kOk : kAssertion;
}

// ---------------------------------------------------------------------------

struct SampleOptions {
  TargetOptions target;
  std::vector<std::string> scans;
  std::string f = "indicator:1=0";
  Index steps = 100000;
  int batches = 0;
  std::vector<Index> tail_n{100, 1000};
  std::vector<double> tail_eps{0.1, 0.2, 0.3};
  int replicas = 10000;
  std::uint64_t seed = 0;
  bool trace = false;
};

/// `indicator:i=v` (1-based coordinate, 0-based value) or `values:f0,f1,...`.
gibbs::PiFunction<double> parse_function(const std::string& text, const gibbs::ProductSpace& space) {
  const auto colon = text.find(':');
  const std::string kind = text.substr(0, colon);
  const std::string body = colon == std::string::npos ? "" : text.substr(colon + 1);
  try {
    if (kind == "indicator") {
      const auto eq = body.find('=');
      if (eq == std::string::npos) throw gibbs::ValidationError("expected indicator:i=v");
      std::size_t used = 0;
      const int i = std::stoi(body.substr(0, eq), &used);
      if (used != eq) throw gibbs::ValidationError("bad coordinate");
      const std::string v_text = body.substr(eq + 1);
      const int v = std::stoi(v_text, &used);
      if (used != v_text.size()) throw gibbs::ValidationError("bad value");
      if (i < 1 || i > space.dimension()) throw gibbs::ValidationError("coordinate out of range");
      return gibbs::coordinate_indicator(space, i - 1, v);
    }
    if (kind == "values") {
      std::vector<double> vals;
      std::stringstream ss(body);
      std::string tok;
      while (std::getline(ss, tok, ',')) {
        std::size_t used = 0;
        vals.push_back(std::stod(tok, &used));
        if (used != tok.size()) throw gibbs::ValidationError("bad number '" + tok + "'");
      }
      if (static_cast<Index>(vals.size()) != space.total_states()) {
        throw gibbs::ValidationError("expected " + std::to_string(space.total_states()) + " values");
      }
      return Eigen::Map<const gibbs::Vector<double>>(vals.data(), space.total_states());
    }
  } catch (const std::logic_error&) {
    throw gibbs::ValidationError("function '" + text + "': cannot parse");
  } catch (const gibbs::Error& e) {
    throw gibbs::ValidationError("function '" + text + "': " + e.what());
  }
  throw gibbs::ValidationError("function '" + text + "': expected indicator:i=v or values:...");
}

int cmd_sample(const Common& common, const SampleOptions& o) {
  const Json spec = target_spec(o.target);
  const gibbs::TargetDistribution<double> pi = gibbs::io::parse_target(spec, common.cap);
  std::vector<std::string> scan_names;
  const auto scans = parse_scans(o.scans, pi.dimension(), scan_names);
  const gibbs::PiFunction<double> f = parse_function(o.f, pi.space());
  if (f.minCoeff() < 0 || f.maxCoeff() > 1) {
    throw gibbs::ValidationError("function '" + o.f + "' takes values outside [0, 1]");
  }
  if (o.replicas < 1) throw gibbs::ValidationError("--replicas must be at least 1");
  if (o.steps < 1) throw gibbs::ValidationError("--steps must be at least 1");

  gibbs::DiagnosticsConfig dc;
  dc.clt_steps = o.steps;
  dc.batches = o.batches;
  dc.tail_n = o.tail_n;
  dc.tail_eps = o.tail_eps;
  dc.replicas = o.replicas;
  dc.seed = o.seed;

  Json config = common_config(common);
  config["target"] = spec;
  config["scans"] = scan_names;
  config["f"] = o.f;
  config["steps"] = o.steps;
  config["batches"] = o.batches > 0 ? o.batches : gibbs::default_batch_count(o.steps);
  config["tail_n"] = o.tail_n;
  config["tail_eps"] = o.tail_eps;
  config["replicas"] = o.replicas;
  config["seed"] = o.seed;
  config["initial_law"] = "stationary";
  config["pass_rule"] = "estimate <= bound + 3 SE";

  const gibbs::DiagnosticsReport diag = gibbs::run_diagnostics(pi, scans, f, dc);
  Json report = gibbs::io::report_header("sample", config);
  report["target"] = gibbs::io::to_json(pi);
  report["mu"] = gibbs::inner_product(f, gibbs::PiFunction<double>::Ones(f.size()), pi);
  report["diagnostics"] = gibbs::io::to_json(diag);
  if (common.json()) emit(common, "sample.json", gibbs::io::dump(report));
  if (o.trace && common.csv()) {
    for (std::size_t k = 0; k < scans.size(); ++k) {
      // same stream as the CLT chain of this scan
      const auto trace =
          gibbs::run_chain(pi, scans[k], o.steps, gibbs::derive_seed(o.seed, 1000 + k));
      Json meta = gibbs::io::report_header("sample", config);
      meta["trace"] = scan_names[k];
      emit(common, "trace_" + std::to_string(k + 1) + ".csv",
           gibbs::io::trace_csv(trace, pi.space(), meta));
    }
  }
  for (const auto& p : diag.clt) {
    std::printf("%-24s CLT sigma2 %.6g +- %.2g  bound %.6g  %s\n", p.scan.c_str(),
                p.estimate.estimate, p.estimate.std_error, p.bound, p.pass ? "pass" : "FAIL");
  }
  for (const auto& t : diag.tails) {
    std::printf("%-24s n=%-5lld eps=%.2f  tail %.5f  bound %.5g  %s\n", t.scan.c_str(),
                static_cast<long long>(t.n), t.eps, t.result.frequency, t.result.bound,
                t.result.pass ? "pass" : "FAIL");
  }
  return diag.all_pass ? kOk : kAssertion;
}

// ---------------------------------------------------------------------------

struct CounterexampleOptions {
  double q = 0.5;
  std::vector<int> ns{10, 20, 40};
  double b = 1.5;
  bool kernels = false;
};

int cmd_counterexample(const Common& common, const CounterexampleOptions& o) {
  for (int n : o.ns) {
    gibbs::validate(gibbs::LadderChainSpec{o.q, n});
    gibbs::check_state_cap(gibbs::ladder_state_count(n), common.cap);
  }
  if (!(o.b > 1)) throw gibbs::ValidationError("--b must exceed 1");

  Json config = common_config(common);
  config["q"] = o.q;
  config["N"] = o.ns;
  config["b"] = o.b;
  config["cheeger_tol"] = 1e-9;

  const auto rows = gibbs::reversibilization_gap_sweep(o.q, o.ns, o.b);
  Json report = gibbs::io::report_header("counterexample", config);
  Json jrows = Json::array();
  bool cheeger_ok = true;
  bool decreasing = true;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const auto& r = rows[k];
    const gibbs::LadderChainSpec spec{o.q, r.truncation};
    Json row = gibbs::io::to_json(r);
    const auto cuts = gibbs::ladder_cuts(spec);
    const auto k_op = gibbs::additive_reversibilization(gibbs::build_ladder(spec));
    const auto cond = gibbs::conductance(k_op, cuts);
    Json cut_rows = Json::array();
    for (std::size_t n = 0; n < cuts.size(); ++n) {
      cut_rows.push_back({{"n", n + 1},
                          {"value", cond.per_cut[n]},
                          {"bound", 1.0 / (static_cast<double>(n + 1) * r.pi_origin)}});
    }
    row["ladder_cuts"] = std::move(cut_rows);
    jrows.push_back(std::move(row));
    cheeger_ok = cheeger_ok && r.cheeger_ok;
    if (k > 0) decreasing = decreasing && r.gap_k < rows[k - 1].gap_k;
    if (o.kernels && common.csv()) {
      Json meta = gibbs::io::report_header("counterexample", config);
      meta["kernel"] = "ladder N=" + std::to_string(r.truncation);
      emit(common, "ladder_" + std::to_string(r.truncation) + ".csv",
           gibbs::io::kernel_csv(gibbs::build_ladder(spec), meta));
    }
  }
  report["rows"] = std::move(jrows);
  report["gap_K_decreasing"] = decreasing;
  report["cheeger_ok"] = cheeger_ok;
  if (common.json()) emit(common, "counterexample.json", gibbs::io::dump(report));
  if (common.csv()) {
    emit(common, "counterexample.csv",
         gibbs::io::counterexample_csv(rows, o.b,
                                       gibbs::io::report_header("counterexample", config)));
  }
  for (const auto& r : rows) {
    std::printf("N=%-4d gap_K %.6g  gap_P %.6g  gap_P* %.6g  kappa %.6g  E[b^tau] %.6g%s\n",
                r.truncation, r.gap_k, r.gap_p, r.gap_pstar, r.kappa_upper, r.moment.value,
                r.analytic.divergent ? " (series diverges)" : "");
  }
  return cheeger_ok ? kOk : kAssertion;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral analysis of Gibbs samplers on finite product spaces", "gibbsgap"};
  app.set_version_flag("--version", std::string(gibbs::io::kToolVersion));
  app.require_subcommand(1);

  Common common;
  if (const char* env = std::getenv("GIBBSGAP_OUT_DIR"); env != nullptr && *env != '\0') {
    common.out_dir = env;
  }
  app.add_option("--out", common.out_dir, "Output directory (default $GIBBSGAP_OUT_DIR or .)");
  app.add_option("--cap", common.cap, "State-count cap")->capture_default_str();
  app.add_option("--format", common.format, "Output formats")
      ->check(CLI::IsMember({"json", "csv", "both"}))
      ->capture_default_str();

  AnalyzeOptions analyze;
  auto* a = app.add_subcommand("analyze", "Exact norms, angles, inclination and bounds");
  add_target_options(a, analyze.target);
  a->add_option("--scan", analyze.scans, "dsg:i1,..,id | rsg:uniform | rsg:w1,..,wd");
  a->add_option("--seed", analyze.seed)->capture_default_str();
  a->add_option("--restarts", analyze.restarts)->capture_default_str();
  a->add_option("--inclination-tol", analyze.inclination_tol)->capture_default_str();
  a->add_option("--bound-tol", analyze.bound_tol)->capture_default_str();
  a->add_option("--panel-threshold", analyze.panel_threshold)->capture_default_str();
  a->add_option("--random-weights", analyze.random_weights)->capture_default_str();
  a->add_option("--perm-samples", analyze.perm_samples)->capture_default_str();
  a->add_option("--power-n", analyze.power_n)->capture_default_str();
  a->add_flag("--kernels", analyze.kernels, "Also write each scan kernel as CSV");

  SweepOptions sweep;
  auto* s = app.add_subcommand("sweep", "Gap scaling with the dimension");
  add_target_options(s, sweep.target);
  s->remove_option(s->get_option("--d"));
  s->remove_option(s->get_option("--dims"));
  s->add_option("--d", sweep.ds, "Dimensions")->delimiter(',');
  s->add_option("--perm-samples", sweep.perm_samples)->capture_default_str();
  s->add_option("--seed", sweep.seed)->capture_default_str();

  SampleOptions sample;
  auto* m = app.add_subcommand("sample", "Simulated CLT and tail diagnostics");
  add_target_options(m, sample.target);
  m->add_option("--scan", sample.scans);
  m->add_option("--f", sample.f, "indicator:i=v | values:f0,f1,..")->capture_default_str();
  m->add_option("--steps", sample.steps)->capture_default_str();
  m->add_option("--batches", sample.batches, "0 selects floor(sqrt(steps))")->capture_default_str();
  m->add_option("--tail-n", sample.tail_n)->delimiter(',');
  m->add_option("--tail-eps", sample.tail_eps)->delimiter(',');
  m->add_option("--replicas", sample.replicas)->capture_default_str();
  m->add_option("--seed", sample.seed)->capture_default_str();
  m->add_flag("--trace", sample.trace, "Write the CLT chains as CSV");

  CounterexampleOptions counter;
  auto* c = app.add_subcommand("counterexample", "Ladder chain reversibilization sweep");
  c->add_option("--q", counter.q)->capture_default_str();
  c->add_option("--N", counter.ns, "Truncations")->delimiter(',');
  c->add_option("--b", counter.b)->capture_default_str();
  c->add_flag("--kernels", counter.kernels, "Also write each ladder kernel as CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (a->parsed()) return cmd_analyze(common, analyze);
    if (s->parsed()) return cmd_sweep(common, sweep);
    if (m->parsed()) return cmd_sample(common, sample);
    return cmd_counterexample(common, counter);
  } catch (const gibbs::CapExceeded& e) {
    std::cerr << "refused: " << e.what() << "\n";
    return kCap;
  } catch (const gibbs::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const gibbs::DimensionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const gibbs::NumericError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumeric;
  }
}
