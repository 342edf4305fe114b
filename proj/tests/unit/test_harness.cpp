#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "ppsel/harness.hpp"

using namespace ppsel;

TEST_CASE("rate slope of an exact power law") {
    const std::vector<int> n = {50, 200, 800};
    std::vector<double> r;
    for (int k : n) r.push_back(3.7 / k);
    CHECK(std::abs(rate_slope(n, r) + 1.0) <= 1e-12);
    CHECK(rate_slope(n, r) == doctest::Approx(oracle::loglog_slope({50, 200, 800}, r)).epsilon(1e-12));
}

TEST_CASE("scenario parsing rejects bad input") {
    CHECK_THROWS(parse_scenario(nlohmann::json::parse(R"({"truth": {"kind": "nope"}})")));
    const auto sc = load_scenario(std::string(PPSEL_SCENARIO_DIR) + "/two_constants.json");
    CHECK(sc.name == "two_constants");
    CHECK(sc.n_grid.size() == 2);
}

TEST_CASE("a single replicate is reproducible and finds the truth") {
    auto sc = load_scenario(std::string(PPSEL_SCENARIO_DIR) + "/two_constants.json");
    sc.replicates = 3;
    sc.n_grid = {200};
    const auto a = run_benchmark(sc, 1), b = run_benchmark(sc, 2);
    // everything except wall-clock timings
    REQUIRE(a.records.size() == b.records.size());
    for (std::size_t k = 0; k < a.records.size(); ++k) {
        CHECK(a.records[k].seed == b.records[k].seed);
        CHECK(a.records[k].risk == b.records[k].risk);
        CHECK(a.records[k].chosen == b.records[k].chosen);
    }
    CHECK(a.mean_risk == b.mean_risk);
    // truth is a candidate and every other candidate is far away
    CHECK(a.mean_risk[0] == 0.0);
}

TEST_CASE("estimate_once returns a candidate and its risk") {
    const auto sc = load_scenario(std::string(PPSEL_SCENARIO_DIR) + "/parametric_power.json");
    const Instance inst = make_instance(sc, 60);
    const auto smp = simulate(inst.truth, inst.X, inst.T, 4);
    const auto out = estimate_once(sc, inst, smp);
    CHECK(out.risk >= 0.0);
    CHECK(out.risk < 0.1);
    CHECK(out.to_json().contains("risk"));
}
