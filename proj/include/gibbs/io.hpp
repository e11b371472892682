#pragma once

// Target and scan parsing, CSV tables and JSON reports.
//
// Target spec (JSON): {"dims": [..], "pmf": [..]} or
// {"dims": [..], "model": {"name": .., params}}. Models:
//   equicorrelated_binary  {"epsilon": e}             dims all 2, e in [0, 1)
//   random_dirichlet       {"seed": s, "concentration": a}
//   independent_uniform    {}
// Explicit pmf entries must be positive. Errors name the offending location
// as a JSON pointer ("/pmf/3").
//
// CSV files start with one "# {...}" comment line carrying the report
// metadata (tool version, resolved config, seeds, tolerances), then a header
// row. Reals are written with 17 significant digits.

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "gibbs/bounds.hpp"
#include "gibbs/counterexample.hpp"
#include "gibbs/geometry.hpp"
#include "gibbs/measure.hpp"
#include "gibbs/operators.hpp"
#include "gibbs/sampler.hpp"

namespace gibbs::io {

using Json = nlohmann::ordered_json;

inline constexpr const char* kToolName = "gibbsgap";
inline constexpr const char* kToolVersion = "1.0.0";

TargetDistribution<double> parse_target(const Json& spec, Index cap = kDefaultStateCap);
TargetDistribution<double> parse_target(std::string_view text, Index cap = kDefaultStateCap);
TargetDistribution<double> load_target(const std::filesystem::path& path,
                                       Index cap = kDefaultStateCap);

/// `dsg:i1,..,id` with 1-based coordinates, `rsg:uniform` or `rsg:w1,..,wd`.
ScanSpec parse_scan(std::string_view text, int d);

/// %.17g; "inf", "-inf" and "nan" for non-finite values.
std::string format_real(double v);

/// {"tool", "version", "command", "config"}; `config` is echoed verbatim.
Json report_header(const std::string& command, const Json& config);

std::string kernel_csv(const MarkovOperator<double>& p, const Json& meta);
std::string trace_csv(const ChainTrace& trace, const ProductSpace& space, const Json& meta);
std::string bounds_csv(const BoundReport& report, const Json& meta);
std::string sweep_csv(const DimensionSweep& sweep, const Json& meta);
std::string counterexample_csv(const std::vector<GapSweepRow>& rows, double b, const Json& meta);

Json to_json(const TargetDistribution<double>& pi);
Json to_json(const SpectralSummary<double>& s);
Json to_json(const AngleResult<double>& a);
Json to_json(const InclinationResult<double>& r);
Json to_json(const SandwichCheck& s);
Json to_json(const BoundReport& r);
Json to_json(const EquivalencePanel& p);
Json to_json(const DimensionSweep& s);
Json to_json(const DiagnosticsReport& r);
Json to_json(const GapSweepRow& row);

/// Two-space indented dump with a trailing newline.
std::string dump(const Json& j);

/// Writes `contents` byte for byte, creating parent directories.
void write_file(const std::filesystem::path& path, const std::string& contents);

}  // namespace gibbs::io
