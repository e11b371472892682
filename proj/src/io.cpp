#include "gibbs/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "gibbs/errors.hpp"

namespace gibbs::io {

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ValidationError("target spec " + where + ": " + what);
}

void allow_only(const Json& obj, const std::string& where, const std::set<std::string>& keys) {
  for (const auto& [k, v] : obj.items()) {
    if (!keys.count(k)) fail(where + "/" + k, "unknown field");
  }
}

double number_at(const Json& obj, const std::string& key, const std::string& where, double fallback,
                 bool required) {
  if (!obj.contains(key)) {
    if (required) fail(where + "/" + key, "missing");
    return fallback;
  }
  const Json& v = obj.at(key);
  if (!v.is_number()) fail(where + "/" + key, "expected a number");
  return v.get<double>();
}

TargetDistribution<double> build_model(const Json& model, const std::vector<int>& dims) {
  if (!model.is_object()) fail("/model", "expected an object");
  if (!model.contains("name") || !model.at("name").is_string()) fail("/model/name", "expected a string");
  const std::string name = model.at("name").get<std::string>();
  if (name == "equicorrelated_binary") {
    allow_only(model, "/model", {"name", "epsilon"});
    for (std::size_t k = 0; k < dims.size(); ++k) {
      if (dims[k] != 2) fail("/dims/" + std::to_string(k), "equicorrelated_binary needs binary coordinates");
    }
    const double eps = number_at(model, "epsilon", "/model", 0, true);
    if (!(eps >= 0 && eps < 1)) fail("/model/epsilon", "must lie in [0, 1)");
    return equicorrelated_binary(static_cast<int>(dims.size()), eps);
  }
  if (name == "random_dirichlet") {
    allow_only(model, "/model", {"name", "seed", "concentration"});
    std::uint64_t seed = 0;
    if (model.contains("seed")) {
      const Json& s = model.at("seed");
      if (!s.is_number_unsigned()) fail("/model/seed", "expected a non-negative integer");
      seed = s.get<std::uint64_t>();
    }
    const double conc = number_at(model, "concentration", "/model", 1.0, false);
    if (!(conc > 0)) fail("/model/concentration", "must be positive");
    return random_target(seed, dims, conc);
  }
  if (name == "independent_uniform") {
    allow_only(model, "/model", {"name"});
    return independent_target(dims);
  }
  fail("/model/name", "unknown model '" + name + "'");
}

}  // namespace

TargetDistribution<double> parse_target(const Json& spec, Index cap) {
  if (!spec.is_object()) fail("/", "expected an object");
  allow_only(spec, "", {"dims", "pmf", "model"});
  if (!spec.contains("dims") || !spec.at("dims").is_array()) fail("/dims", "expected an integer list");
  const Json& jd = spec.at("dims");
  if (jd.size() < 2) fail("/dims", "need at least two coordinates");
  std::vector<int> dims;
  double states = 1;
  for (std::size_t k = 0; k < jd.size(); ++k) {
    const Json& v = jd[k];
    if (!v.is_number_integer() || v.get<long long>() < 1 || v.get<long long>() > 1'000'000) {
      fail("/dims/" + std::to_string(k), "expected a positive integer");
    }
    dims.push_back(v.get<int>());
    states *= dims.back();
  }
  if (states > static_cast<double>(cap)) {
    throw CapExceeded("target has " + format_real(states) + " states, cap is " + std::to_string(cap));
  }
  const bool has_pmf = spec.contains("pmf");
  const bool has_model = spec.contains("model");
  if (has_pmf == has_model) fail("/", "exactly one of 'pmf' and 'model' is required");
  if (has_model) return build_model(spec.at("model"), dims);

  const Json& jp = spec.at("pmf");
  if (!jp.is_array()) fail("/pmf", "expected a list of reals");
  const ProductSpace space(dims);
  if (static_cast<Index>(jp.size()) != space.total_states()) {
    fail("/pmf", "has " + std::to_string(jp.size()) + " entries, dims give " +
                     std::to_string(space.total_states()));
  }
  Vector<double> pmf(space.total_states());
  for (std::size_t k = 0; k < jp.size(); ++k) {
    const std::string where = "/pmf/" + std::to_string(k);
    if (!jp[k].is_number()) fail(where, "expected a number");
    const double v = jp[k].get<double>();
    if (!std::isfinite(v) || v < 0) fail(where, "negative or not finite");
    if (v == 0) fail(where, "zero mass; full support is required");
    pmf[static_cast<Index>(k)] = v;
  }
  try {
    return TargetDistribution<double>(space, std::move(pmf));
  } catch (const ValidationError& e) {
    fail("/pmf", e.what());
  }
}

TargetDistribution<double> parse_target(std::string_view text, Index cap) {
  Json spec;
  try {
    spec = Json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(std::string("target spec is not valid JSON: ") + e.what());
  }
  return parse_target(spec, cap);
}

TargetDistribution<double> load_target(const std::filesystem::path& path, Index cap) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot read target spec " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_target(std::string_view(buffer.str()), cap);
}

namespace {

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

template <typename T>
T parse_number(std::string_view token, std::string_view scan) {
  T value{};
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size() || token.empty()) {
    throw ValidationError("scan '" + std::string(scan) + "': cannot parse '" + std::string(token) + "'");
  }
  return value;
}

}  // namespace

ScanSpec parse_scan(std::string_view text, int d) {
  const std::size_t colon = text.find(':');
  if (colon == std::string_view::npos) {
    throw ValidationError("scan '" + std::string(text) + "': expected dsg:... or rsg:...");
  }
  const std::string_view kind = text.substr(0, colon);
  const std::string_view body = text.substr(colon + 1);
  if (kind == "dsg") {
    std::vector<int> order;
    for (std::string_view tok : split(body, ',')) {
      const int i = parse_number<int>(tok, text);
      if (i < 1 || i > d) {
        throw ValidationError("scan '" + std::string(text) + "': coordinate " + std::to_string(i) +
                              " outside 1.." + std::to_string(d));
      }
      order.push_back(i - 1);
    }
    try {
      validate_order(order, d);
    } catch (const ValidationError& e) {
      throw ValidationError("scan '" + std::string(text) + "': " + e.what());
    }
    return DeterministicScan{order};
  }
  if (kind == "rsg") {
    if (body == "uniform") return RandomScan{uniform_weights(d)};
    std::vector<double> w;
    for (std::string_view tok : split(body, ',')) w.push_back(parse_number<double>(tok, text));
    try {
      validate_weights(w, d);
    } catch (const ValidationError& e) {
      throw ValidationError("scan '" + std::string(text) + "': " + e.what());
    }
    return RandomScan{w};
  }
  throw ValidationError("scan '" + std::string(text) + "': unknown kind '" + std::string(kind) + "'");
}

std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Json report_header(const std::string& command, const Json& config) {
  Json j;
  j["tool"] = kToolName;
  j["version"] = kToolVersion;
  j["command"] = command;
  j["config"] = config;
  return j;
}

namespace {

std::string comment_line(const Json& meta) { return "# " + meta.dump() + "\n"; }

const char* flag(bool b) { return b ? "true" : "false"; }

}  // namespace

std::string kernel_csv(const MarkovOperator<double>& p, const Json& meta) {
  std::string out = comment_line(meta);
  out += "state";
  for (Index y = 0; y < p.states(); ++y) out += "," + std::to_string(y);
  out += "\n";
  for (Index x = 0; x < p.states(); ++x) {
    out += std::to_string(x);
    for (Index y = 0; y < p.states(); ++y) out += "," + format_real(p.kernel()(x, y));
    out += "\n";
  }
  return out;
}

std::string trace_csv(const ChainTrace& trace, const ProductSpace& space, const Json& meta) {
  std::string out = comment_line(meta);
  out += "step,state";
  for (int i = 0; i < space.dimension(); ++i) out += ",x" + std::to_string(i + 1);
  out += "\n";
  auto row = [&](std::size_t step, Index s) {
    out += std::to_string(step) + "," + std::to_string(s);
    for (int i = 0; i < space.dimension(); ++i) out += "," + std::to_string(space.coordinate(s, i));
    out += "\n";
  };
  row(0, trace.initial_state);
  for (std::size_t t = 0; t < trace.states.size(); ++t) row(t + 1, trace.states[t]);
  return out;
}

std::string bounds_csv(const BoundReport& report, const Json& meta) {
  std::string out = comment_line(meta);
  out += "name,scan,kind,bound,exact,slack,asserted\n";
  for (const auto& e : report.entries) {
    out += e.name + ",\"" + e.scan + "\"," + (e.kind == BoundKind::upper ? "upper" : "lower") + "," +
           format_real(e.bound) + "," + format_real(e.exact) + "," + format_real(e.slack) + "," +
           flag(e.asserted) + "\n";
  }
  return out;
}

std::string sweep_csv(const DimensionSweep& sweep, const Json& meta) {
  std::string out = comment_line(meta);
  out +=
      "d,orders,gap_rsg,gap_dsg_worst,gap_dsg_best,floor,floor_ok,beta_rsg,gamma_rsg,beta_dsg,"
      "gamma_dsg\n";
  for (const auto& p : sweep.points) {
    out += std::to_string(p.d) + "," + std::to_string(p.orders) + "," + format_real(p.gap_rsg) +
           "," + format_real(p.gap_dsg_worst) + "," + format_real(p.gap_dsg_best) + "," +
           format_real(p.floor) + "," + flag(p.floor_ok) + "," + format_real(sweep.rsg_fit.beta) +
           "," + format_real(sweep.rsg_fit.gamma) + "," + format_real(sweep.dsg_fit.beta) + "," +
           format_real(sweep.dsg_fit.gamma) + "\n";
  }
  return out;
}

std::string counterexample_csv(const std::vector<GapSweepRow>& rows, double b, const Json& meta) {
  std::string out = comment_line(meta);
  out +=
      "N,states,pi00,gap_K,gap_P,gap_Pstar,kappa_upper,cheeger_ok,b,E_b_tau,E_b_tau_analytic,"
      "divergent\n";
  for (const auto& r : rows) {
    out += std::to_string(r.truncation) + "," + std::to_string(r.states) + "," +
           format_real(r.pi_origin) + "," + format_real(r.gap_k) + "," + format_real(r.gap_p) + "," +
           format_real(r.gap_pstar) + "," + format_real(r.kappa_upper) + "," + flag(r.cheeger_ok) +
           "," + format_real(b) + "," + format_real(r.moment.value) + "," +
           format_real(r.analytic.value) + "," + flag(r.analytic.divergent) + "\n";
  }
  return out;
}

namespace {

Json reals(const Vector<double>& v) {
  Json a = Json::array();
  for (Index k = 0; k < v.size(); ++k) a.push_back(v[k]);
  return a;
}

Json finite_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

}  // namespace

Json to_json(const TargetDistribution<double>& pi) {
  Json j;
  j["dims"] = pi.space().dims();
  j["full_support"] = pi.full_support();
  j["pmf"] = reals(pi.pmf());
  return j;
}

Json to_json(const SpectralSummary<double>& s) {
  Json j;
  j["label"] = s.label;
  j["l2_norm_centered"] = s.l2_norm_centered;
  j["spectral_radius_centered"] = s.spectral_radius_centered;
  j["spectral_gap"] = s.spectral_gap;
  j["reversible"] = s.reversible;
  return j;
}

Json to_json(const AngleResult<double>& a) {
  Json j;
  j["value"] = a.value;
  j["method"] = to_string(a.method);
  j["degenerate"] = a.degenerate;
  if (a.witness.size() > 0) j["witness"] = reals(a.witness);
  return j;
}

Json to_json(const InclinationResult<double>& r) {
  Json j;
  j["value"] = r.value;
  j["restarts"] = r.restarts;
  j["tolerance"] = r.tolerance;
  j["converged"] = r.converged;
  j["best_restart"] = r.best_restart;
  j["degenerate"] = r.degenerate;
  j["witness"] = reals(r.witness);
  return j;
}

Json to_json(const SandwichCheck& s) {
  Json j;
  j["left_lhs"] = s.left_lhs;
  j["left_slack"] = s.left_slack;
  j["left_ok"] = s.left_ok;
  j["right_rhs"] = s.right_rhs;
  j["right_slack"] = s.right_slack;
  j["right_ok"] = s.right_ok;
  j["right_asserted"] = false;
  return j;
}

Json to_json(const BoundReport& r) {
  Json j;
  j["d"] = r.d;
  j["c"] = r.c;
  j["ell_lower"] = r.ell_lower;
  j["uniform_rsg_norm"] = r.uniform_rsg_norm;
  j["sharp"] = r.sharp;
  j["tolerance"] = kBoundTolerance;
  j["violations"] = r.violations().size();
  Json entries = Json::array();
  for (const auto& e : r.entries) {
    Json x;
    x["name"] = e.name;
    x["scan"] = e.scan;
    x["kind"] = e.kind == BoundKind::upper ? "upper" : "lower";
    x["bound"] = e.bound;
    x["exact"] = e.exact;
    x["slack"] = e.slack;
    x["asserted"] = e.asserted;
    entries.push_back(std::move(x));
  }
  j["entries"] = std::move(entries);
  return j;
}

Json to_json(const EquivalencePanel& p) {
  Json j;
  j["all_hold"] = p.all_hold;
  j["none_hold"] = p.none_hold;
  j["dichotomy"] = p.dichotomy();
  Json entries = Json::array();
  for (const auto& e : p.entries) {
    Json x;
    x["condition"] = e.condition;
    x["scan"] = e.scan;
    x["value"] = e.value;
    x["below_one"] = e.below_one;
    entries.push_back(std::move(x));
  }
  j["entries"] = std::move(entries);
  return j;
}

Json to_json(const DimensionSweep& s) {
  auto fit = [](const PowerLawFit& f) {
    Json x;
    x["beta"] = f.beta;
    x["gamma_ls"] = f.gamma_ls;
    x["gamma"] = f.gamma;
    return x;
  };
  Json j;
  j["rsg_fit"] = fit(s.rsg_fit);
  j["dsg_fit"] = fit(s.dsg_fit);
  j["floor_ok"] = s.floor_ok;
  Json pts = Json::array();
  for (const auto& p : s.points) {
    Json x;
    x["d"] = p.d;
    x["orders"] = p.orders;
    x["gap_rsg"] = p.gap_rsg;
    x["gap_dsg_worst"] = p.gap_dsg_worst;
    x["gap_dsg_best"] = p.gap_dsg_best;
    x["floor"] = p.floor;
    x["floor_ok"] = p.floor_ok;
    pts.push_back(std::move(x));
  }
  j["points"] = std::move(pts);
  return j;
}

Json to_json(const DiagnosticsReport& r) {
  auto var = [](const VarianceEstimate& v) {
    Json x;
    x["estimate"] = v.estimate;
    x["std_error"] = v.std_error;
    x["batches"] = v.batches;
    x["batch_size"] = v.batch_size;
    return x;
  };
  Json j;
  j["all_pass"] = r.all_pass;
  Json clt = Json::array();
  for (const auto& p : r.clt) {
    Json x;
    x["scan"] = p.scan;
    x["rho"] = p.rho;
    x["variance"] = p.variance;
    x["bound"] = p.bound;
    x["steps"] = p.steps;
    x["estimate"] = var(p.estimate);
    x["pass"] = p.pass;
    clt.push_back(std::move(x));
  }
  j["clt"] = std::move(clt);
  Json tails = Json::array();
  for (const auto& t : r.tails) {
    Json x;
    x["scan"] = t.scan;
    x["n"] = t.n;
    x["eps"] = t.eps;
    x["replicas"] = t.replicas;
    x["mu"] = t.result.mu;
    x["rho"] = t.result.rho;
    x["frequency"] = t.result.frequency;
    x["std_error"] = t.result.std_error;
    x["bound"] = t.result.bound;
    x["pass"] = t.result.pass;
    tails.push_back(std::move(x));
  }
  j["hoeffding"] = std::move(tails);
  return j;
}

Json to_json(const GapSweepRow& row) {
  Json j;
  j["N"] = row.truncation;
  j["states"] = row.states;
  j["pi00"] = row.pi_origin;
  j["gap_K"] = row.gap_k;
  j["gap_P"] = row.gap_p;
  j["gap_Pstar"] = row.gap_pstar;
  j["kappa_upper"] = row.kappa_upper;
  j["cheeger_ok"] = row.cheeger_ok;
  j["E_b_tau"] = finite_or_null(row.moment.value);
  j["E_b_tau_analytic"] = finite_or_null(row.analytic.value);
  j["divergent"] = row.analytic.divergent;
  return j;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

void write_file(const std::filesystem::path& path, const std::string& contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw Error("write failed for " + path.string());
}

}  // namespace gibbs::io
