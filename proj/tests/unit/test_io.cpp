#include <doctest.h>

#include <cmath>
#include <string>

#include "gibbs/errors.hpp"
#include "gibbs/io.hpp"

using namespace gibbs;
using namespace gibbs::io;

namespace {

std::string error_of(std::string_view spec) {
  try {
    parse_target(spec);
  } catch (const ValidationError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("target specs") {
  const auto a = parse_target(std::string_view(R"({"dims": [2, 2], "pmf": [0.375, 0.125, 0.125, 0.375]})"));
  CHECK(a.total_states() == 4);
  CHECK(a.pmf()[1] == doctest::Approx(0.125));

  const auto e = parse_target(std::string_view(R"({"dims": [2, 2, 2], "model": {"name": "equicorrelated_binary", "epsilon": 0.25}})"));
  CHECK((e.pmf() - equicorrelated_binary(3, 0.25).pmf()).cwiseAbs().maxCoeff() == 0.0);

  const auto r = parse_target(std::string_view(R"({"dims": [3, 2], "model": {"name": "random_dirichlet", "seed": 5, "concentration": 0.5}})"));
  CHECK((r.pmf() - random_target(5, {3, 2}, 0.5).pmf()).cwiseAbs().maxCoeff() == 0.0);

  const auto u = parse_target(std::string_view(R"({"dims": [2, 3], "model": {"name": "independent_uniform"}})"));
  CHECK(u.pmf()[4] == doctest::Approx(1.0 / 6));
}

TEST_CASE("target spec errors name their location") {
  CHECK(error_of(R"({"dims": [2, 2], "pmf": [0.5, 0.5, 0, 0]})").find("/pmf/2") != std::string::npos);
  CHECK(error_of(R"({"dims": [2, 2], "pmf": [0.5, -0.5, 0.5, 0.5]})").find("/pmf/1") != std::string::npos);
  CHECK(error_of(R"({"dims": [2, 2], "pmf": [0.5, 0.5]})").find("/pmf") != std::string::npos);
  CHECK(error_of(R"({"dims": [2, 0]})").find("/dims/1") != std::string::npos);
  CHECK(error_of(R"({"dims": [2]})").find("/dims") != std::string::npos);
  CHECK(error_of(R"({"dims": [2, 2], "extra": 1, "pmf": [1, 1, 1, 1]})").find("/extra") != std::string::npos);
  CHECK(error_of(R"({"dims": [2, 3], "model": {"name": "equicorrelated_binary", "epsilon": 0.2}})").find("/dims/1") !=
        std::string::npos);
  CHECK(error_of(R"({"dims": [2, 2], "model": {"name": "equicorrelated_binary", "epsilon": 1.0}})").find("/model/epsilon") !=
        std::string::npos);
  CHECK(error_of(R"({"dims": [2, 2], "model": {"name": "mystery"}})").find("/model/name") != std::string::npos);
  CHECK(error_of(R"({"dims": [2, 2]})").find("exactly one") != std::string::npos);
  CHECK(error_of("{not json").find("not valid JSON") != std::string::npos);
  CHECK_THROWS_AS(parse_target(std::string_view(R"({"dims": [100, 100, 100], "model": {"name": "independent_uniform"}})")),
                  CapExceeded);
  CHECK_THROWS_AS(load_target("/nonexistent/target.json"), ValidationError);
}

TEST_CASE("scan grammar") {
  const auto d = parse_scan("dsg:3,1,2", 3);
  CHECK(std::get<DeterministicScan>(d).order == std::vector<int>{2, 0, 1});
  CHECK(std::get<RandomScan>(parse_scan("rsg:uniform", 4)).weights == uniform_weights(4));
  CHECK(std::get<RandomScan>(parse_scan("rsg:0.5,0.25,0.25", 3)).weights == std::vector<double>{0.5, 0.25, 0.25});
  CHECK(describe(parse_scan("dsg:2,1", 2)) == "dsg:2,1");
  for (const char* bad : {"dsg:1,1", "dsg:0,1", "dsg:1,2,3", "dsg:1", "rsg:1,0", "rsg:0.5", "rsg:x,y", "gibbs:1,2", "dsg"}) {
    CHECK_THROWS_AS(parse_scan(bad, 2), ValidationError);
  }
}

TEST_CASE("real formatting") {
  CHECK(format_real(0.1) == "0.10000000000000001");
  CHECK(format_real(2.0) == "2");
  CHECK(format_real(INFINITY) == "inf");
  CHECK(format_real(-INFINITY) == "-inf");
  CHECK(format_real(NAN) == "nan");
}

TEST_CASE("csv tables carry the metadata line and are deterministic") {
  const auto pi = equicorrelated_binary(2, 0.25);
  const Json meta = report_header("analyze", Json{{"seed", 3}});
  const std::string k = kernel_csv(dsg({0, 1}, pi), meta);
  CHECK(k.rfind("# {\"tool\":\"gibbsgap\"", 0) == 0);
  CHECK(k.find("\nstate,0,1,2,3\n") != std::string::npos);
  CHECK(k == kernel_csv(dsg({0, 1}, pi), meta));

  const auto rep = verify_bounds(pi, scan_orders(2), {});
  const std::string b = bounds_csv(rep, meta);
  CHECK(b.find("\nname,scan,kind,bound,exact,slack,asserted\n") != std::string::npos);
  CHECK(b.find(",\"dsg:1,2\",upper,") != std::string::npos);
  CHECK(b == bounds_csv(verify_bounds(pi, scan_orders(2), {}), meta));

  const auto t = run_chain(pi, parse_scan("dsg:1,2", 2), 5, 1, FixedState{3});
  const std::string tc = trace_csv(t, pi.space(), meta);
  CHECK(tc.find("\nstep,state,x1,x2\n0,3,1,1\n") != std::string::npos);

  const auto rows = reversibilization_gap_sweep(0.5, {3, 4}, 2.5);
  const std::string cx = counterexample_csv(rows, 2.5, meta);
  CHECK(cx.find(",inf,true\n") != std::string::npos);
  const Json row = to_json(rows[0]);
  CHECK(row["N"] == 3);
  CHECK(row["divergent"] == true);
}

TEST_CASE("json reports") {
  const auto pi = equicorrelated_binary(2, 0.25);
  const Json j = to_json(pi);
  CHECK(j["dims"] == Json::array({2, 2}));
  const Json s = to_json(summarize(dsg({0, 1}, pi)));
  CHECK(std::abs(s["spectral_radius_centered"].get<double>() - 0.25) <= 1e-10);
  CHECK(dump(j).back() == '\n');
  CHECK(dump(j) == dump(to_json(equicorrelated_binary(2, 0.25))));
}
