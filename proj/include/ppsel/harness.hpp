#pragma once

#include <cstdint>
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "ppsel/domain.hpp"
#include "ppsel/functions.hpp"
#include "ppsel/model_zoo.hpp"
#include "ppsel/point_process.hpp"
#include "ppsel/selector.hpp"

namespace ppsel {

// A parsed scenario file; see README.md for the schema.
struct Scenario {
    std::string name = "scenario";
    nlohmann::json truth;
    nlohmann::json covariates = {{"kind", "none"}};
    nlohmann::json domain = {{"t_min", 0.0}, {"t_max", 1.0}};
    nlohmann::json collection;
    SelectionConfig selection;
    RadiusRule radius;
    int replicates = 1;
    std::vector<int> n_grid{100};
    int risk_nodes = kDefaultNodesPerUnit;
    nlohmann::json checks = nlohmann::json::object();
    std::uint64_t seed = 1;
};

Scenario parse_scenario(const nlohmann::json& j);
Scenario load_scenario(const std::string& path);

// Truth, covariates and window for one sample size.
struct Instance {
    int n = 0;
    IntensitySurface truth = IntensitySurface::constant(1.0);
    CovariateSet X;
    TimeDomain T;
};
Instance make_instance(const Scenario& sc, int n);

// A surface from its JSON description (the truth schema).
IntensitySurface surface_from_json(const nlohmann::json& j, int n, const CovariateSet& X);

Collection build_collection(const Scenario& sc, const Instance& inst, const ProcessSample& sample);

struct EstimateOutcome {
    SelectionResult selection;
    double risk = 0.0;  // H^2(s, s_hat)
    nlohmann::json to_json() const;
};
EstimateOutcome estimate_once(const Scenario& sc, const Instance& inst, const ProcessSample& sample);

// Seed of replicate r at sample size n.
std::uint64_t replicate_seed(std::uint64_t seed, int n, int r);

struct ReplicateRecord {
    int n = 0;
    int replicate = 0;
    std::uint64_t seed = 0;
    double risk = 0.0;
    std::string chosen;
    std::string chosen_net;
    std::size_t candidates = 0;
    double seconds = 0.0;
    std::vector<int> starts;  // chosen partition for piecewise candidates
    double best_risk = 0.0;   // min over candidates of H^2(s, f)
};

struct RiskReport {
    std::string scenario;
    std::vector<int> n_grid;
    std::vector<double> mean_risk, std_error, mean_seconds;
    std::vector<ReplicateRecord> records;

    std::string to_csv() const;
    nlohmann::json to_json() const;
};

RiskReport run_benchmark(const Scenario& sc, int workers);

// Least-squares slope of log(mean risk) on log n.
double rate_slope(const std::vector<int>& n, const std::vector<double>& risk);
double rate_slope(const RiskReport& r);

struct ChangepointSummary {
    std::vector<int> n_grid;
    std::vector<double> ratio;               // mean risk * n / (|P0| log n)
    std::vector<double> breakpoint_hit_rate; // share within tolerance of the true breakpoints
    std::vector<double> single_segment_rate;
    int true_segments = 1;
    int tolerance = 5;
    nlohmann::json to_json() const;
};
ChangepointSummary changepoint_report(const Scenario& sc, const RiskReport& report, int tolerance = 5);

// ------------------------------------------------------------ verification

struct CheckRow {
    std::string suite;
    std::string name;
    double measured = 0.0;
    double limit = 0.0;
    bool pass = false;
};

struct VerifyOptions {
    // overrides every tolerance of quadrature-based checks when set
    std::optional<double> tolerance;
    // multiplies the declared radius of every certified net
    double eta_scale = 1.0;
    int concentration_replicates = 10000;
    std::uint64_t seed = 7;
    int workers = 1;
};

// The checks declared under "checks" in the scenario, against a report.
std::vector<CheckRow> evaluate_checks(const Scenario& sc, const RiskReport& report);

std::vector<CheckRow> verify(const std::string& suite, const VerifyOptions& opt);
std::string format_checks(const std::vector<CheckRow>& rows);

}  // namespace ppsel
