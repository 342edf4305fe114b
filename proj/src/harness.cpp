#include "ppsel/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <mutex>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "ppsel/format.hpp"
#include "ppsel/geometry.hpp"
#include "ppsel/rng.hpp"

namespace ppsel {

using nlohmann::json;

namespace {

template <class T>
T get_or(const json& j, const char* key, T fallback) {
    return j.contains(key) ? j.at(key).get<T>() : fallback;
}

std::pair<double, double> pair_of(const json& j, const char* key, std::pair<double, double> fallback) {
    if (!j.contains(key)) return fallback;
    const auto& v = j.at(key);
    if (!v.is_array() || v.size() != 2) throw std::invalid_argument(std::string(key) + " must be a pair");
    return {v[0].get<double>(), v[1].get<double>()};
}

// Root factors used by product truths.
double factor_value(const json& f, double u) {
    const std::string kind = f.at("kind").get<std::string>();
    if (kind == "const") return f.at("value").get<double>();
    if (kind == "vee")
        return get_or(f, "base", 1.0) + get_or(f, "slope", 1.0) * std::abs(u - get_or(f, "center", 0.5));
    if (kind == "sine")
        return get_or(f, "base", 1.0) +
               get_or(f, "amp", 0.5) * std::sin(2.0 * 3.14159265358979323846 * get_or(f, "freq", 1.0) * u);
    if (kind == "poly") {
        double acc = 0.0;
        const auto coef = f.at("coef").get<std::vector<double>>();
        for (auto it = coef.rbegin(); it != coef.rend(); ++it) acc = acc * u + *it;
        return acc;
    }
    throw std::invalid_argument("unknown factor kind: " + kind);
}

ParamFamily family_from_name(const std::string& s) {
    if (s == "duane") return {ParamFamily::Kind::duane, 0};
    if (s == "expdecay0") return {ParamFamily::Kind::expdecay, 0};
    if (s == "expdecay1") return {ParamFamily::Kind::expdecay, 1};
    throw std::invalid_argument("unknown parametric family: " + s);
}

LipschitzProfile profile_from_name(const std::string& s) {
    if (s == "power") return powerlaw_profile();
    if (s == "exp0") return expfamily_profile(0);
    if (s == "exp1") return expfamily_profile(1);
    throw std::invalid_argument("unknown profile: " + s);
}

std::vector<int> starts_from_json(const json& j, int n) {
    std::vector<int> starts{0};
    if (j.contains("starts")) {
        starts = j.at("starts").get<std::vector<int>>();
    } else if (j.contains("breaks_frac")) {
        for (double f : j.at("breaks_frac").get<std::vector<double>>())
            starts.push_back(static_cast<int>(std::lround(f * n)));
    }
    return starts;
}

TimeDomain domain_from_json(const json& j, const IntensitySurface& truth, const CovariateSet& X) {
    if (j.contains("point_mass")) return TimeDomain::atom(j.at("point_mass").get<double>());
    const double lo = get_or(j, "t_min", 0.0);
    if (j.contains("truncate")) return truncate_domain(truth, X, lo, j.at("truncate").get<double>());
    return TimeDomain::interval(lo, get_or(j, "t_max", 1.0));
}

CovariateSet covariates_from_json(const json& j, int n) {
    const std::string kind = get_or<std::string>(j, "kind", "none");
    if (kind == "none") return CovariateSet::none(n);
    if (kind == "grid_1d") return CovariateSet::grid_1d(n);
    if (kind == "uniform_ball") {
        const int d = get_or(j, "dim", 1);
        SplitMix64 rng = SplitMix64::stream(get_or<std::uint64_t>(j, "seed", 11), static_cast<std::uint64_t>(n));
        Eigen::MatrixXd x(n, d);
        for (int i = 0; i < n; ++i) {
            Eigen::VectorXd v(d);
            do {
                for (int k = 0; k < d; ++k) v[k] = 2.0 * rng.uniform() - 1.0;
            } while (v.norm() > 1.0);
            x.row(i) = v.transpose();
        }
        return CovariateSet(x);
    }
    if (kind == "explicit") {
        const auto rows = j.at("rows").get<std::vector<std::vector<double>>>();
        if (static_cast<int>(rows.size()) != n) throw std::invalid_argument("explicit covariates need n rows");
        const auto d = static_cast<Eigen::Index>(rows.empty() ? 0 : rows.front().size());
        Eigen::MatrixXd x(n, d);
        for (int i = 0; i < n; ++i)
            for (Eigen::Index k = 0; k < d; ++k) x(i, k) = rows[static_cast<std::size_t>(i)].at(static_cast<std::size_t>(k));
        return CovariateSet(x);
    }
    throw std::invalid_argument("unknown covariate generator: " + kind);
}

}  // namespace

IntensitySurface surface_from_json(const json& j, int n, const CovariateSet& X) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "constant") return IntensitySurface::constant(j.at("lambda").get<double>());
    if (kind == "power_law") return IntensitySurface::power_law(j.at("a").get<double>(), j.at("b").get<double>());
    if (kind == "exp_decay")
        return IntensitySurface::exp_decay(j.at("a").get<double>(), j.at("b").get<double>(), get_or(j, "k", 0));
    if (kind == "root") {
        return IntensitySurface::square_of(
            ParametricRoot{j.at("amplitude").get<double>(), get_or(j, "power", 0.0), get_or(j, "rate", 0.0)});
    }
    if (kind == "family") {
        const ParamFamily fam = family_from_name(j.at("family").get<std::string>());
        return IntensitySurface::square_of(fam.root(j.at("theta1").get<double>(), j.at("theta2").get<double>()));
    }
    if (kind == "cox") {
        const auto th = get_or(j, "theta", std::vector<double>{});
        return IntensitySurface::product_exp(j.at("amplitude").get<double>(), get_or(j, "power", 0.0),
                                             get_or(j, "rate", 0.0),
                                             Eigen::Map<const Eigen::VectorXd>(th.data(), static_cast<Eigen::Index>(th.size())));
    }
    if (kind == "piecewise") {
        const ParamFamily fam = family_from_name(j.at("family").get<std::string>());
        std::vector<ParametricRoot> pieces;
        for (const auto& p : j.at("pieces")) pieces.push_back(fam.root(p.at(0).get<double>(), p.at(1).get<double>()));
        return IntensitySurface::piecewise(starts_from_json(j, n), std::move(pieces));
    }
    if (kind == "product") {
        const double lo = get_or(j, "t_min", 0.0), hi = get_or(j, "t_max", 1.0);
        const int grid = get_or(j, "grid", 4097);
        Eigen::VectorXd tv(grid);
        for (int k = 0; k < grid; ++k) tv[k] = factor_value(j.at("time_factor"), lo + (hi - lo) * k / (grid - 1.0));
        Eigen::VectorXd cv(n);
        for (int i = 0; i < n; ++i)
            cv[i] = j.contains("cov_factor") && X.dim() > 0 ? factor_value(j.at("cov_factor"), X.x(i, 0)) : 1.0;
        return IntensitySurface::product(get_or(j, "kappa", 1.0), make_grid_atom(lo, hi, tv), cv);
    }
    throw std::invalid_argument("unknown surface kind: " + kind);
}

Scenario parse_scenario(const json& j) {
    Scenario sc;
    sc.name = get_or<std::string>(j, "name", "scenario");
    sc.truth = j.at("truth");
    if (j.contains("covariates")) sc.covariates = j.at("covariates");
    if (j.contains("domain")) sc.domain = j.at("domain");
    sc.collection = j.at("collection");
    if (j.contains("selection")) {
        const auto& s = j.at("selection");
        sc.selection.epsilon = get_or(s, "epsilon", 1.0);
        sc.selection.constants = TestConstants::from_name(get_or<std::string>(s, "constants", "calibrated"));
        sc.selection.tie_seed = get_or<std::uint64_t>(s, "tie_seed", 0);
        sc.selection.penalty = penalty_from_name(get_or<std::string>(s, "penalty", "squared"));
        sc.selection.quadrature_nodes = get_or(s, "quadrature_nodes", kDefaultNodesPerUnit);
        sc.selection.keep_matrix = get_or(s, "keep_matrix", false);
    } else {
        sc.selection.keep_matrix = false;
    }
    if (j.contains("radius")) {
        const auto& r = j.at("radius");
        sc.radius = RadiusRule::from_name(get_or<std::string>(r, "rule", "paper"), get_or(r, "scale", 1.0));
        sc.radius.resolution = get_or(r, "resolution", 1.0);
    }
    sc.replicates = get_or(j, "replicates", 1);
    sc.n_grid = get_or(j, "n_grid", std::vector<int>{100});
    sc.risk_nodes = get_or(j, "risk_nodes", kDefaultNodesPerUnit);
    if (j.contains("checks")) sc.checks = j.at("checks");
    sc.seed = get_or<std::uint64_t>(j, "seed", 1);
    if (sc.replicates < 1) throw std::invalid_argument("replicates must be >= 1");
    if (sc.n_grid.empty()) throw std::invalid_argument("n_grid must not be empty");
    sc.selection.validate();
    return sc;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open scenario " + path);
    return parse_scenario(json::parse(in));
}

Instance make_instance(const Scenario& sc, int n) {
    if (n < 1) throw std::invalid_argument("n must be >= 1");
    Instance inst;
    inst.n = n;
    inst.X = covariates_from_json(sc.covariates, n);
    inst.truth = surface_from_json(sc.truth, n, inst.X);
    inst.T = domain_from_json(sc.domain, inst.truth, inst.X);
    return inst;
}

// ------------------------------------------------------------ collections

namespace {

LinearSpace space_from_json(const json& j, LinearSpace::Axis axis, const TimeDomain& T) {
    LinearSpace V;
    V.axis = axis;
    V.depth = get_or(j, "depth", 0);
    V.degree = get_or(j, "degree", 0);
    if (axis == LinearSpace::Axis::time) {
        V.lo = T.t_min;
        V.hi = T.t_max;
    }
    return V;
}

void subsets_up_to(int k, int s, std::vector<std::vector<int>>& out) {
    std::vector<int> cur;
    std::function<void(int)> rec = [&](int next) {
        out.push_back(cur);
        if (static_cast<int>(cur.size()) == s) return;
        for (int j = next; j < k; ++j) {
            cur.push_back(j);
            rec(j + 1);
            cur.pop_back();
        }
    };
    rec(0);
}

Collection nets_from_specs(const json& specs, const Scenario& sc, const Instance& inst, const ProcessSample& sample) {
    const TestConstants& c = sc.selection.constants;
    const TimeDomain T = inst.T;
    const CovariateSet X = inst.X;
    std::vector<NetRecipe> recipes;
    Collection direct;
    for (const auto& s : specs) {
        const std::string b = s.at("builder").get<std::string>();
        if (b == "explicit") {
            NetRecipe r;
            r.label = get_or<std::string>(s, "label", "explicit");
            r.weight = get_or(s, "weight", 0.0);
            r.dim = DimensionBound::constant(get_or(s, "dim", 1.0));
            r.fixed_eta_bar = get_or(s, "eta_bar", 0.0);
            std::vector<SqrtFunction> cands;
            for (const auto& cj : s.at("candidates"))
                cands.push_back(surface_from_json(cj, inst.n, X).root_function());
            r.build = [cands, label = r.label](double eta) {
                CandidateNet net;
                net.label = label;
                net.kind = NetKind::explicit_set;
                net.candidates = cands;
                net.eta = eta;
                return net;
            };
            recipes.push_back(std::move(r));
        } else if (b == "linear") {
            const auto axis = get_or<std::string>(s, "axis", "time") == "time" ? LinearSpace::Axis::time
                                                                              : LinearSpace::Axis::covariate;
            const LinearSpace V = space_from_json(s, axis, T);
            LinearNetOptions opt;
            opt.box = pair_of(s, "box", {0.0, 1.0});
            NetRecipe r;
            r.label = get_or<std::string>(s, "label", "linear:" + V.describe());
            r.weight = get_or(s, "weight", 0.0);
            r.dim = DimensionBound::constant(V.dim());
            r.build = [V, T, X, opt](double eta) { return build_linear_net(V, eta, T, X, opt); };
            recipes.push_back(std::move(r));
        } else if (b == "product") {
            const LinearSpace V1 = space_from_json(s.at("time"), LinearSpace::Axis::time, T);
            const LinearSpace V2 = space_from_json(s.at("cov"), LinearSpace::Axis::covariate, T);
            ProductNetOptions opt;
            opt.kappa_max = s.at("kappa_max").get<double>();
            opt.kappa_min = get_or(s, "kappa_min", 0.0);
            NetRecipe r;
            r.label = get_or<std::string>(s, "label", "product:" + V1.describe() + "x" + V2.describe());
            r.weight = get_or(s, "weight", 0.0);
            r.dim = DimensionBound::constant(1.4 * (V1.dim() + V2.dim() + 1));
            r.build = [V1, V2, T, X, opt](double eta) { return build_product_net(V1, V2, eta, T, X, opt); };
            recipes.push_back(std::move(r));
        } else if (b == "cox") {
            const LipschitzProfile prof = profile_from_name(get_or<std::string>(s, "profile", "power"));
            std::vector<std::vector<int>> supports;
            if (s.contains("support_up_to")) subsets_up_to(X.dim(), s.at("support_up_to").get<int>(), supports);
            else supports.push_back(get_or(s, "support", std::vector<int>{}));
            double extra = get_or(s, "extra_weight", 0.0);
            if (s.contains("truncation")) {
                const auto& t = s.at("truncation");
                extra += truncation_weight(0.0, t.at("R").get<double>(), t.at("r").get<double>(),
                                           t.at("rho").get<double>());
            }
            for (const auto& sup : supports) {
                CoxNetOptions opt;
                opt.b_range = pair_of(s, "b_range", {0.0, 1.0});
                opt.support = sup;
                opt.rho_theta = get_or(s, "rho_theta", 1.0);
                opt.kappa_min = get_or(s, "kappa_min", 0.0);
                opt.kappa_max = s.at("kappa_max").get<double>();
                opt.extra_weight = extra;
                NetRecipe r;
                r.weight = sparse_cox_weight(std::max(X.dim(), static_cast<int>(sup.size())), static_cast<int>(sup.size())) + extra;
                r.dim = DimensionBound::constant(1.4 * (static_cast<double>(sup.size()) + 2.0));
                r.build = [prof, T, X, opt](double eta) { return build_cox_net(prof, eta, T, X, opt); };
                recipes.push_back(std::move(r));
            }
        } else if (b == "changepoint") {
            ChangepointOptions opt;
            opt.amplitudes = s.at("amplitudes").get<std::vector<double>>();
            opt.shapes = s.at("shapes").get<std::vector<double>>();
            opt.max_segments = get_or(s, "max_segments", 2);
            auto nets = build_changepoint_collection(family_from_name(s.at("family").get<std::string>()), inst.n, opt);
            // A finite parameter grid is its own model: the radius comes from the rule alone.
            const bool finite = get_or(s, "finite_model", false);
            for (auto& net : nets) {
                if (finite) net.eta = 0.0;
                NetRecipe r;
                r.label = net.label;
                r.weight = net.weight;
                r.dim = net.dim_bound;
                auto shared = std::make_shared<CandidateNet>(std::move(net));
                r.build = [shared](double) { return *shared; };
                recipes.push_back(std::move(r));
            }
        } else if (b == "local_product") {
            LocalProductOptions opt;
            opt.time_depths = get_or(s, "time_depths", opt.time_depths);
            opt.cov_depths = get_or(s, "cov_depths", opt.cov_depths);
            opt.kappa_steps = get_or(s, "kappa_steps", opt.kappa_steps);
            opt.step_scale = get_or(s, "step_scale", opt.step_scale);
            opt.perturb_factors = get_or(s, "perturb_factors", opt.perturb_factors);
            const RadiusRule rule = sc.radius;
            const int n = inst.n;
            auto nets = build_local_product_nets(sample, T, X, opt, [&](const CandidateNet& net) {
                return rule.kind == RadiusRule::Kind::fixed ? get_or(s, "eta_bar", 0.1)
                                                           : rule(net.dim_bound, net.weight, n, c);
            });
            for (auto& net : nets) direct.push_back(std::move(net));
        } else {
            throw std::invalid_argument("unknown builder: " + b);
        }
    }
    Collection out = assemble(recipes, inst.n, sc.radius, c);
    for (auto& net : direct) out.push_back(std::move(net));
    return out;
}

}  // namespace

Collection build_collection(const Scenario& sc, const Instance& inst, const ProcessSample& sample) {
    const json& col = sc.collection;
    if (col.contains("mixture")) {
        std::vector<std::pair<Collection, double>> parts;
        for (const auto& part : col.at("mixture"))
            parts.emplace_back(nets_from_specs(part.at("nets"), sc, inst, sample), part.at("prior").get<double>());
        return mix_collections(parts, inst.n, sc.radius, sc.selection.constants);
    }
    return nets_from_specs(col.at("nets"), sc, inst, sample);
}

// ------------------------------------------------------------ estimation

namespace {

QuadratureRule risk_rule(const IntensitySurface& truth, const SqrtFunction& est, const Instance& inst, int nodes) {
    if (inst.T.point_mass) return simpson_rule(inst.T);
    AtomTable atoms;
    (void)layout(truth.root_function(), inst.X, atoms);
    (void)layout(est, inst.X, atoms);
    return rule_for_atoms(atoms, inst.T, nodes);
}

double risk_of(const Instance& inst, const SqrtFunction& est, int nodes) {
    const QuadratureRule Q = risk_rule(inst.truth, est, inst, nodes);
    return hellinger_sq(inst.truth, IntensitySurface::square_of(est), inst.X, inst.T, Q);
}

std::vector<int> starts_of(const SqrtFunction& f) {
    if (const auto* p = std::get_if<PiecewiseRoot>(&f)) return p->starts;
    return {0};
}

}  // namespace

EstimateOutcome estimate_once(const Scenario& sc, const Instance& inst, const ProcessSample& sample) {
    EstimateOutcome out;
    const Collection nets = build_collection(sc, inst, sample);
    out.selection = run_selection(nets, sample, inst.X, inst.T, sc.selection);
    out.risk = risk_of(inst, out.selection.chosen_function, sc.risk_nodes);
    return out;
}

json EstimateOutcome::to_json() const {
    json j = selection.to_json(true);
    j["risk"] = fmt17(risk);
    return j;
}

std::uint64_t replicate_seed(std::uint64_t seed, int n, int r) {
    return hash_combine(hash_combine(mix64(seed), static_cast<std::uint64_t>(n)), static_cast<std::uint64_t>(r));
}

RiskReport run_benchmark(const Scenario& sc, int workers) {
    RiskReport rep;
    rep.scenario = sc.name;
    rep.n_grid = sc.n_grid;
    for (int n : sc.n_grid) {
        const Instance inst = make_instance(sc, n);
        std::vector<ReplicateRecord> recs(static_cast<std::size_t>(sc.replicates));
        std::atomic<int> next{0};
        std::exception_ptr failure;
        std::mutex fail_mu;
        auto job = [&]() {
            for (;;) {
                const int r = next.fetch_add(1);
                if (r >= sc.replicates) return;
                try {
                    const auto t0 = std::chrono::steady_clock::now();
                    ReplicateRecord& rec = recs[static_cast<std::size_t>(r)];
                    rec.n = n;
                    rec.replicate = r;
                    rec.seed = replicate_seed(sc.seed, n, r);
                    const ProcessSample sample = simulate(inst.truth, inst.X, inst.T, rec.seed);
                    Scenario local = sc;
                    local.selection.workers = 1;
                    local.selection.keep_matrix = false;
                    const EstimateOutcome est = estimate_once(local, inst, sample);
                    rec.risk = est.risk;
                    rec.chosen = est.selection.chosen_id;
                    rec.chosen_net = est.selection.chosen_net_label;
                    rec.candidates = est.selection.ids.size();
                    rec.starts = starts_of(est.selection.chosen_function);
                    rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
                } catch (...) {
                    std::lock_guard<std::mutex> lock(fail_mu);
                    if (!failure) failure = std::current_exception();
                    return;
                }
            }
        };
        const int W = std::max(1, std::min(workers, sc.replicates));
        if (W == 1) {
            job();
        } else {
            std::vector<std::thread> pool;
            for (int w = 0; w < W; ++w) pool.emplace_back(job);
            for (auto& t : pool) t.join();
        }
        if (failure) std::rethrow_exception(failure);
        double mean = 0.0, secs = 0.0;
        for (const auto& r : recs) {
            mean += r.risk;
            secs += r.seconds;
        }
        mean /= sc.replicates;
        double var = 0.0;
        for (const auto& r : recs) var += (r.risk - mean) * (r.risk - mean);
        const double sd = sc.replicates > 1 ? std::sqrt(var / (sc.replicates - 1)) : 0.0;
        rep.mean_risk.push_back(mean);
        rep.std_error.push_back(sd / std::sqrt(static_cast<double>(sc.replicates)));
        rep.mean_seconds.push_back(secs / sc.replicates);
        for (auto& r : recs) rep.records.push_back(std::move(r));
    }
    return rep;
}

std::string RiskReport::to_csv() const {
    std::ostringstream os;
    os << "n,replicate,seed,risk,candidates,seconds,chosen_net,chosen\n";
    for (const auto& r : records) {
        os << r.n << ',' << r.replicate << ',' << r.seed << ',' << fmt17(r.risk) << ',' << r.candidates << ','
           << fmt17(r.seconds) << ",\"" << r.chosen_net << "\",\"" << r.chosen << "\"\n";
    }
    return os.str();
}

json RiskReport::to_json() const {
    json j;
    j["scenario"] = scenario;
    j["n_grid"] = n_grid;
    json rows = json::array();
    for (std::size_t k = 0; k < n_grid.size(); ++k) {
        rows.push_back({{"n", n_grid[k]},
                        {"mean_risk", fmt17(mean_risk[k])},
                        {"std_error", fmt17(std_error[k])},
                        {"mean_seconds", fmt17(mean_seconds[k])}});
    }
    j["summary"] = rows;
    if (n_grid.size() >= 2) {
        bool positive = std::all_of(mean_risk.begin(), mean_risk.end(), [](double v) { return v > 0.0; });
        if (positive) j["rate_slope"] = fmt17(rate_slope(*this));
    }
    return j;
}

double rate_slope(const std::vector<int>& n, const std::vector<double>& risk) {
    if (n.size() != risk.size() || n.size() < 2) throw std::domain_error("rate slope needs matching inputs");
    std::vector<double> x, y;
    for (std::size_t k = 0; k < n.size(); ++k) {
        if (n[k] < 1 || !(risk[k] > 0.0)) throw std::domain_error("rate slope needs positive n and risks");
        x.push_back(std::log(static_cast<double>(n[k])));
        y.push_back(std::log(risk[k]));
    }
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(y.size());
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        sxy += (x[k] - mx) * (y[k] - my);
        sxx += (x[k] - mx) * (x[k] - mx);
    }
    if (sxx <= 0.0) throw std::domain_error("rate slope needs distinct n");
    return sxy / sxx;
}

double rate_slope(const RiskReport& r) { return rate_slope(r.n_grid, r.mean_risk); }

ChangepointSummary changepoint_report(const Scenario& sc, const RiskReport& report, int tolerance) {
    ChangepointSummary s;
    s.n_grid = report.n_grid;
    s.tolerance = tolerance;
    for (std::size_t k = 0; k < report.n_grid.size(); ++k) {
        const int n = report.n_grid[k];
        const Instance inst = make_instance(sc, n);
        const std::vector<int> truth = starts_of(inst.truth.root_function());
        s.true_segments = static_cast<int>(truth.size());
        int hits = 0, singles = 0, count = 0;
        for (const auto& r : report.records) {
            if (r.n != n) continue;
            ++count;
            if (r.starts.size() == 1) ++singles;
            if (r.starts.size() == truth.size()) {
                bool ok = true;
                for (std::size_t b = 0; b < truth.size(); ++b) ok = ok && std::abs(r.starts[b] - truth[b]) <= tolerance;
                if (ok) ++hits;
            }
        }
        s.breakpoint_hit_rate.push_back(count ? static_cast<double>(hits) / count : 0.0);
        s.single_segment_rate.push_back(count ? static_cast<double>(singles) / count : 0.0);
        s.ratio.push_back(report.mean_risk[k] * n / (s.true_segments * std::log(static_cast<double>(n))));
    }
    return s;
}

json ChangepointSummary::to_json() const {
    json j;
    j["true_segments"] = true_segments;
    j["tolerance"] = tolerance;
    json rows = json::array();
    for (std::size_t k = 0; k < n_grid.size(); ++k) {
        rows.push_back({{"n", n_grid[k]},
                        {"risk_ratio", fmt17(ratio[k])},
                        {"breakpoint_hit_rate", fmt17(breakpoint_hit_rate[k])},
                        {"single_segment_rate", fmt17(single_segment_rate[k])}});
    }
    j["summary"] = rows;
    return j;
}


std::vector<CheckRow> evaluate_checks(const Scenario& sc, const RiskReport& report) {
    std::vector<CheckRow> rows;
    const json& c = sc.checks;
    auto index_of = [&](int n) {
        const auto it = std::find(report.n_grid.begin(), report.n_grid.end(), n);
        if (it == report.n_grid.end()) throw std::invalid_argument("check refers to n outside n_grid");
        return static_cast<std::size_t>(it - report.n_grid.begin());
    };
    if (c.contains("max_slope")) {
        const double s = rate_slope(report);
        rows.push_back({"benchmark", "rate_slope<=", s, c.at("max_slope").get<double>(), s <= c.at("max_slope").get<double>()});
    }
    if (c.contains("slope_range")) {
        const double s = rate_slope(report);
        const auto [lo, hi] = pair_of(c, "slope_range", {0.0, 0.0});
        rows.push_back({"benchmark", "rate_slope>=", s, lo, s >= lo});
        rows.push_back({"benchmark", "rate_slope<=", s, hi, s <= hi});
    }
    if (c.contains("monotone_se")) {
        const double k = c.at("monotone_se").get<double>();
        for (std::size_t i = 1; i < report.n_grid.size(); ++i) {
            const double slack = k * std::hypot(report.std_error[i], report.std_error[i - 1]);
            const double excess = report.mean_risk[i] - report.mean_risk[i - 1];
            rows.push_back({"benchmark", "risk_nonincreasing_n=" + std::to_string(report.n_grid[i]), excess, slack,
                            excess <= slack});
        }
    }
    if (c.contains("changepoint")) {
        const json& cp = c.at("changepoint");
        const ChangepointSummary s = changepoint_report(sc, report, get_or(cp, "tolerance", 5));
        if (cp.contains("breakpoint")) {
            const auto& b = cp.at("breakpoint");
            const std::size_t k = index_of(b.at("n").get<int>());
            const double need = b.at("min_rate").get<double>();
            rows.push_back({"changepoint", "breakpoint_rate_n=" + std::to_string(report.n_grid[k]),
                            s.breakpoint_hit_rate[k], need, s.breakpoint_hit_rate[k] >= need});
        }
        if (cp.contains("single_segment")) {
            const auto& b = cp.at("single_segment");
            const std::size_t k = index_of(b.at("n").get<int>());
            const double need = b.at("min_rate").get<double>();
            rows.push_back({"changepoint", "single_segment_rate_n=" + std::to_string(report.n_grid[k]),
                            s.single_segment_rate[k], need, s.single_segment_rate[k] >= need});
        }
        if (cp.contains("ratio")) {
            const auto& r = cp.at("ratio");
            const auto ns = r.at("ns").get<std::vector<int>>();
            double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
            for (int n : ns) {
                const double v = s.ratio[index_of(n)];
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
            const double factor = r.at("factor").get<double>();
            const double spread = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
            rows.push_back({"changepoint", "risk_ratio_spread", spread, factor, spread <= factor});
        }
    }
    if (c.contains("max_mean_risk")) {
        const auto& m = c.at("max_mean_risk");
        const std::size_t k = index_of(m.at("n").get<int>());
        const double lim = m.at("value").get<double>();
        rows.push_back({"benchmark", "mean_risk_n=" + std::to_string(report.n_grid[k]), report.mean_risk[k], lim,
                        report.mean_risk[k] <= lim});
    }
    return rows;
}

}  // namespace ppsel
