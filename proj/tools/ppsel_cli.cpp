#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "ppsel/format.hpp"
#include "ppsel/harness.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Common {
    std::string scenario;
    std::optional<std::uint64_t> seed;
    std::string out = "out";
    int workers = 1;
    std::optional<std::string> constants;
    std::optional<double> epsilon;
    std::optional<int> n;
};

void add_common(CLI::App* sub, Common& c, bool needs_scenario = true) {
    auto* opt = sub->add_option("--scenario", c.scenario, "scenario JSON file");
    if (needs_scenario) opt->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", c.seed, "base seed (overrides the scenario)");
    sub->add_option("--out", c.out, "output directory");
    sub->add_option("--workers", c.workers, "worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--constants", c.constants, "test constants")->check(CLI::IsMember({"paper", "calibrated"}));
    sub->add_option("--epsilon", c.epsilon, "epsilon in (0, 4]");
}

ppsel::Scenario load(const Common& c) {
    ppsel::Scenario sc = ppsel::load_scenario(c.scenario);
    if (c.seed) sc.seed = *c.seed;
    if (c.constants) sc.selection.constants = ppsel::TestConstants::from_name(*c.constants);
    if (c.epsilon) sc.selection.epsilon = *c.epsilon;
    sc.selection.workers = c.workers;
    sc.selection.validate();
    return sc;
}

void write_file(const fs::path& p, const std::string& text) {
    fs::create_directories(p.parent_path());
    std::ofstream out(p);
    if (!out) throw std::runtime_error("cannot write " + p.string());
    out << text;
}

int report_checks(const std::vector<ppsel::CheckRow>& rows) {
    std::cout << ppsel::format_checks(rows);
    for (const auto& r : rows)
        if (!r.pass) return 1;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Robust-test intensity estimation for Poisson processes with covariates"};
    app.require_subcommand(1);

    Common sim, est, bench, cp, ver;
    auto* s_sim = app.add_subcommand("simulate", "simulate one sample from the scenario truth");
    add_common(s_sim, sim);
    s_sim->add_option("--n", sim.n, "number of processes (default: first of n_grid)");

    auto* s_est = app.add_subcommand("estimate", "select an estimate for one simulated or stored sample");
    add_common(s_est, est);
    est.n.reset();
    s_est->add_option("--n", est.n, "number of processes (default: first of n_grid)");
    std::string sample_file;
    s_est->add_option("--sample", sample_file, "sample JSON written by simulate")->check(CLI::ExistingFile);

    auto* s_bench = app.add_subcommand("benchmark", "Monte Carlo risk over n_grid with the scenario checks");
    add_common(s_bench, bench);

    auto* s_cp = app.add_subcommand("changepoint", "change-point recovery report with the scenario checks");
    add_common(s_cp, cp);
    int tolerance = 5;
    s_cp->add_option("--tolerance", tolerance, "breakpoint tolerance in process indices");

    auto* s_ver = app.add_subcommand("verify", "closed-form, concentration and covering checks");
    add_common(s_ver, ver, false);
    std::string suite = "all";
    s_ver->add_option("--suite", suite, "suite to run")
        ->check(CLI::IsMember({"identities", "concentration", "covering", "all"}));
    std::optional<double> tol;
    s_ver->add_option("--tolerance", tol, "override quadrature tolerances");
    double eta_scale = 1.0;
    s_ver->add_option("--eta-scale", eta_scale, "multiply declared net radii before certification");
    int conc_reps = 10000;
    s_ver->add_option("--replicates", conc_reps, "Monte Carlo replicates for the concentration suite");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*s_sim) {
            const ppsel::Scenario sc = load(sim);
            const int n = sim.n.value_or(sc.n_grid.front());
            const ppsel::Instance inst = ppsel::make_instance(sc, n);
            const auto sample = ppsel::simulate(inst.truth, inst.X, inst.T, ppsel::replicate_seed(sc.seed, n, 0));
            json j = ppsel::sample_to_json(sample);
            write_file(fs::path(sim.out) / "sample.json", j.dump(1) + "\n");
            std::cout << "simulated n=" << n << " events=" << sample.total() << " -> " << sim.out << "/sample.json\n";
            return 0;
        }
        if (*s_est) {
            const ppsel::Scenario sc = load(est);
            const int n = est.n.value_or(sc.n_grid.front());
            ppsel::ProcessSample sample;
            ppsel::Instance inst;
            if (!sample_file.empty()) {
                std::ifstream in(sample_file);
                sample = ppsel::sample_from_json(json::parse(in));
                inst = ppsel::make_instance(sc, sample.n());
            } else {
                inst = ppsel::make_instance(sc, n);
                sample = ppsel::simulate(inst.truth, inst.X, inst.T, ppsel::replicate_seed(sc.seed, n, 0));
            }
            const auto outcome = ppsel::estimate_once(sc, inst, sample);
            write_file(fs::path(est.out) / "estimate.json", outcome.to_json().dump(1) + "\n");
            std::cout << "chosen " << outcome.selection.chosen_id << " from " << outcome.selection.chosen_net_label
                      << " among " << outcome.selection.ids.size() << " candidates; H2(s, s_hat) = "
                      << ppsel::fmt17(outcome.risk) << "\n";
            return 0;
        }
        if (*s_bench || *s_cp) {
            const Common& c = *s_bench ? bench : cp;
            const ppsel::Scenario sc = load(c);
            const ppsel::RiskReport rep = ppsel::run_benchmark(sc, c.workers);
            json summary = rep.to_json();
            std::vector<ppsel::CheckRow> rows = ppsel::evaluate_checks(sc, rep);
            if (*s_cp) summary["changepoint"] = ppsel::changepoint_report(sc, rep, tolerance).to_json();
            json checks = json::array();
            for (const auto& r : rows)
                checks.push_back({{"name", r.name}, {"measured", ppsel::fmt17(r.measured)},
                                  {"limit", ppsel::fmt17(r.limit)}, {"pass", r.pass}});
            summary["checks"] = checks;
            write_file(fs::path(c.out) / (sc.name + ".csv"), rep.to_csv());
            write_file(fs::path(c.out) / (sc.name + ".json"), summary.dump(1) + "\n");
            for (std::size_t k = 0; k < rep.n_grid.size(); ++k)
                std::cout << "n=" << rep.n_grid[k] << " mean_risk=" << ppsel::fmt17(rep.mean_risk[k])
                          << " se=" << ppsel::fmt17(rep.std_error[k]) << "\n";
            return report_checks(rows);
        }
        if (*s_ver) {
            ppsel::VerifyOptions opt;
            opt.tolerance = tol;
            opt.eta_scale = eta_scale;
            opt.concentration_replicates = conc_reps;
            opt.workers = ver.workers;
            if (ver.seed) opt.seed = *ver.seed;
            return report_checks(ppsel::verify(suite, opt));
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
