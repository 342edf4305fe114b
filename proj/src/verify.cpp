#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "ppsel/format.hpp"
#include "ppsel/geometry.hpp"
#include "ppsel/harness.hpp"
#include "ppsel/rng.hpp"

namespace ppsel {

namespace {

constexpr double kHalfPi = 1.5707963267948966;

// Double-exponential rule on [a, b]; tolerates integrable endpoint singularities.
template <class F>
double tanh_sinh(F&& f, double a, double b, double h = 1.0 / 64.0) {
    const double d = 0.5 * (b - a);
    double acc = 0.0;
    const int N = static_cast<int>(4.0 / h);
    for (int k = -N; k <= N; ++k) {
        const double t = k * h;
        const double u = kHalfPi * std::sinh(t);
        const double ch = std::cosh(u);
        const double w = kHalfPi * std::cosh(t) / (ch * ch);
        const double e = 2.0 / (std::exp(2.0 * std::abs(u)) + 1.0);  // 1 - tanh|u|
        const double x = t < 0 ? a + d * e : b - d * e;
        if (d * e <= 0.0 || x <= a || x >= b) continue;
        acc += w * f(x);
    }
    return acc * d * h;
}

// exp-sinh rule on [0, inf).
template <class F>
double exp_sinh(F&& f, double h = 1.0 / 64.0) {
    double acc = 0.0;
    const int N = static_cast<int>(4.5 / h);
    for (int k = -N; k <= N; ++k) {
        const double t = k * h;
        const double x = std::exp(kHalfPi * std::sinh(t));
        if (!(x > 0.0) || !std::isfinite(x)) continue;
        const double v = f(x);
        if (std::isfinite(v)) acc += kHalfPi * std::cosh(t) * x * v;
    }
    return acc * h;
}

struct Suite {
    std::vector<CheckRow> rows;
    std::string name;
    void add(const std::string& check, double measured, double limit) {
        rows.push_back({name, check, measured, limit, measured <= limit});
    }
    void add_ge(const std::string& check, double measured, double limit) {
        rows.push_back({name, check, measured, limit, measured >= limit});
    }
};

double powerlaw_quad(double b, double b2) {
    const double n1 = std::sqrt(1.0 / (2 * b + 1)), n2 = std::sqrt(1.0 / (2 * b2 + 1));
    return tanh_sinh([&](double t) {
        const double d = std::pow(t, b) / n1 - std::pow(t, b2) / n2;
        return d * d;
    }, 0.0, 1.0);
}

double expfamily_quad(double b, double b2, int k) {
    const double m1 = std::tgamma(k + 1.0) / std::pow(2 * b, k + 1.0);
    const double m2 = std::tgamma(k + 1.0) / std::pow(2 * b2, k + 1.0);
    return exp_sinh([&](double t) {
        const double d = std::pow(t, 0.5 * k) * (std::exp(-b * t) / std::sqrt(m1) - std::exp(-b2 * t) / std::sqrt(m2));
        return d * d;
    });
}

void identities(Suite& s, const VerifyOptions& opt) {
    const double tq = opt.tolerance.value_or(1e-6);
    const double tp = opt.tolerance.value_or(1e-9);
    SplitMix64 rng(opt.seed);

    // product-distance identity against direct evaluation on T x X
    {
        const TimeDomain T = TimeDomain::interval(0.0, 1.0);
        const QuadratureRule Q = gauss_rule(T, 4, 3);
        const int n = 17;
        double worst = 0.0;
        for (int r = 0; r < 100; ++r) {
            auto unit_time = [&]() {
                Eigen::VectorXd c(8);
                for (int j = 0; j < 8; ++j) c[j] = rng.normal();
                c.normalize();
                return DyadicPolyAtom{0.0, 1.0, 2, 1, c};
            };
            auto unit_cov = [&]() {
                Eigen::VectorXd g(n);
                for (int i = 0; i < n; ++i) g[i] = rng.normal();
                return Eigen::VectorXd(g / std::sqrt(g.squaredNorm() / n));
            };
            const auto f = unit_time(), f2 = unit_time();
            const auto g = unit_cov(), g2 = unit_cov();
            const double k = 0.2 + 1.8 * rng.uniform(), k2 = 0.2 + 1.8 * rng.uniform();
            const double id = product_distance(k, k2, (f.coef - f2.coef).norm(), l2_cov(g, g2));
            const double direct = product_l2_distance(k, f, g, k2, f2, g2, Q);
            worst = std::max(worst, std::abs(id * id - direct * direct));
        }
        s.add("product_identity_max_err", worst, tp);
    }

    // normalized power-law and exponential-family distances
    {
        s.add("powerlaw_example_0_1.5", std::abs(powerlaw_normalized_sqdist(0.0, 1.5) - 0.4), 1e-15);
        s.add("expfamily_example_1_4_k0", std::abs(expfamily_normalized_sqdist(1.0, 4.0, 0) - 0.4), 1e-15);
        double wp = 0.0, we = 0.0;
        const double bs[] = {-0.3, 0.0, 0.25, 1.5, 3.0};
        for (double b : bs)
            for (double b2 : bs) wp = std::max(wp, std::abs(powerlaw_normalized_sqdist(b, b2) - powerlaw_quad(b, b2)));
        const double es[] = {0.3, 1.0, 2.5, 4.0};
        for (int k : {0, 1})
            for (double b : es)
                for (double b2 : es)
                    we = std::max(we, std::abs(expfamily_normalized_sqdist(b, b2, k) - expfamily_quad(b, b2, k)));
        s.add("powerlaw_formula_vs_quadrature", wp, tq);
        s.add("expfamily_formula_vs_quadrature", we, tq);
    }

    // Duane and exponential-decay closed forms
    {
        double wd = 0.0, wpn = 0.0, we = 0.0, wr = 0.0;
        for (int r = 0; r < 20; ++r) {
            const double a = 3 * rng.uniform() - 1.5, a2 = 3 * rng.uniform() - 1.5;
            const double b = -0.4 + 2.4 * rng.uniform(), b2 = -0.4 + 2.4 * rng.uniform();
            const double q = tanh_sinh([&](double t) {
                const double d = a * std::pow(t, b) - a2 * std::pow(t, b2);
                return d * d;
            }, 0.0, 1.0);
            wd = std::max(wd, std::abs(duane_sqdist(a, b, a2, b2) - q));
            const double qp = tanh_sinh([&](double t) {
                const double d = std::pow(t, b) - std::pow(t, b2);
                return d * d;
            }, 0.0, 1.0);
            wpn = std::max(wpn, std::abs(power_diff_sqnorm(b, b2) - qp));
            const double c = 0.2 + 3 * rng.uniform(), c2 = 0.2 + 3 * rng.uniform();
            for (int k : {0, 1, 2}) {
                const double qe = exp_sinh([&](double t) {
                    const double d = std::pow(t, 0.5 * k) * (a * std::exp(-c * t) - a2 * std::exp(-c2 * t));
                    return d * d;
                });
                we = std::max(we, std::abs(expdecay_sqdist(a, c, a2, c2, k) - qe));
                if (k < 2) {
                    const double qr = exp_sinh([&](double t) {
                        const double d = std::exp(-c * t) - std::exp(-c2 * t);
                        return std::pow(t, k) * d * d;
                    });
                    wr = std::max(wr, std::abs(expdecay_rate_sqdist(c, c2, k) - qr));
                }
            }
        }
        s.add("duane_closed_form_vs_quadrature", wd, tq);
        s.add("power_diff_vs_quadrature", wpn, tq);
        s.add("expdecay_gram_vs_quadrature", we, tq);
        s.add("expdecay_factored_vs_quadrature", wr, tq);
    }

    // Hellinger between parametric surfaces: moments vs pointwise quadrature
    {
        const CovariateSet X = CovariateSet::none(3);
        const TimeDomain T = TimeDomain::interval(0.0, 1.0);
        const auto u = IntensitySurface::power_law(1.0, 0.0), v = IntensitySurface::power_law(1.0, 1.0);
        const double h = hellinger_sq(u, v, X, T, simpson_rule(T));
        s.add("hellinger_powerlaw_1/12", std::abs(h - 1.0 / 12.0), 1e-14);
        const double hq = hellinger_sq_quadrature(u, v, X, simpson_rule(T, 4097));
        s.add("hellinger_closed_vs_quadrature", std::abs(h - hq), tq);
    }

    // Bennett form never above the Bernstein form
    {
        double worst = -1.0;
        for (double rho : {0.5, 1.0, 3.0})
            for (double ups : {0.1, 1.0, 5.0})
                for (double r : {0.01, 0.3, 1.0, 4.0})
                    worst = std::max(worst, bennett_bound(rho, ups, r, 10) - bernstein_bound(rho, ups, r, 10));
        s.add("bennett_below_bernstein", worst, 0.0);
    }

    // Bracket of the normalized distances and the parametric Lipschitz bounds
    {
        double worst = -1.0;
        for (const LipschitzProfile& p : {powerlaw_profile(), expfamily_profile(0), expfamily_profile(1)}) {
            const double lo = p.family == ProfileFamily::power ? -0.45 : 0.1;
            for (int r = 0; r < 50; ++r) {
                const double b = lo + 3.0 * rng.uniform(), b2 = lo + 3.0 * rng.uniform();
                const double d = std::sqrt(p.family == ProfileFamily::power ? powerlaw_quad(b, b2)
                                                                            : expfamily_quad(b, b2, p.k));
                const double gap = std::abs(b - b2);
                worst = std::max(worst, p.rho_lower(std::max(b, b2)) * gap - d - 1e-9);
                worst = std::max(worst, d - p.rho_upper(std::min(b, b2)) * gap - 1e-9);
            }
        }
        s.add("profile_brackets_violation", worst, 0.0);
        double wl = -1.0;
        const double r1 = 2.0, r2 = 2.0;
        for (int r = 0; r < 50; ++r) {
            const double a = r1 * (2 * rng.uniform() - 1), a2 = r1 * (2 * rng.uniform() - 1);
            const double b = -0.5 + 1 / r2 + 3 * rng.uniform(), b2 = -0.5 + 1 / r2 + 3 * rng.uniform();
            const double d = std::sqrt(tanh_sinh([&](double t) {
                const double x = a * std::pow(t, b) - a2 * std::pow(t, b2);
                return x * x;
            }, 0.0, 1.0));
            wl = std::max(wl, d - duane_lipschitz_bound(a - a2, b - b2, r1, r2));
            for (int k : {0, 1}) {
                const double c = 1 / r2 + 3 * rng.uniform(), c2 = 1 / r2 + 3 * rng.uniform();
                const double de = std::sqrt(exp_sinh([&](double t) {
                    const double x = std::pow(t, 0.5 * k) * (a * std::exp(-c * t) - a2 * std::exp(-c2 * t));
                    return x * x;
                }));
                wl = std::max(wl, de - expdecay_lipschitz_bound(a - a2, c - c2, k, r1, r2));
            }
        }
        s.add("parametric_lipschitz_violation", wl, 0.0);
    }
}

void concentration(Suite& s, const VerifyOptions& opt) {
    const int R = opt.concentration_replicates;
    const int n = 10;
    const TimeDomain T = TimeDomain::interval(0.0, 1.0);
    const CovariateSet X = CovariateSet::none(n);
    const QuadratureRule Q = simpson_rule(T);
    struct Config {
        IntensitySurface s;
        std::function<double(double)> f;
        std::string name;
    };
    const std::vector<Config> configs = {
        {IntensitySurface::constant(3.0), [](double t) { return t < 0.5 ? 1.0 : -0.5; }, "const_step"},
        {IntensitySurface::power_law(4.0, 1.0), [](double t) { return std::sin(6.0 * t); }, "power_sine"},
        {IntensitySurface::exp_decay(6.0, 2.0, 0), [](double t) { return 1.0 - 2.0 * t; }, "decay_linear"},
    };
    for (std::size_t ci = 0; ci < configs.size(); ++ci) {
        const auto& c = configs[ci];
        double rho = 0.0;
        for (Eigen::Index k = 0; k < Q.size(); ++k) rho = std::max(rho, std::abs(c.f(Q.nodes[k])));
        const double mean = Q.integrate([&](double t) { return c.f(t) * c.s.value(t, 0, X); });
        const double ups = Q.integrate([&](double t) { return c.f(t) * c.f(t) * c.s.value(t, 0, X); });
        std::vector<double> dev(static_cast<std::size_t>(R));
        for (int r = 0; r < R; ++r) {
            const auto smp = simulate(c.s, X, T, hash_combine(opt.seed, 1000 * ci + static_cast<std::uint64_t>(r)));
            double acc = 0.0;
            for (const auto& ev : smp.events) acc += counting_integral(c.f, ev) - mean;
            dev[static_cast<std::size_t>(r)] = acc / n;
        }
        for (double mult : {0.5, 1.0, 2.0}) {
            const double r = mult * ups / rho;
            const double emp = static_cast<double>(std::count_if(dev.begin(), dev.end(), [&](double v) { return v >= r; })) / R;
            const double bound = bennett_bound(rho, ups, r, n);
            const double se = std::sqrt(bound * (1 - bound) / R);
            s.add("bennett_" + c.name + "_r=" + fmt17(mult) + "u/rho", emp, bound + 3 * se);
        }
    }
    // Claim 1: mean of T under s against the mean bound
    {
        const auto truth = IntensitySurface::power_law(3.0, 0.5);
        const auto f = IntensitySurface::power_law(2.0, 0.0);
        const auto f2 = IntensitySurface::power_law(5.0, 1.0);
        const QuadratureRule G = graded_rule(T);
        const Claim1Bounds b = claim1_bounds(truth, f, f2, X, T, G);
        const int reps = std::max(200, R / 10);
        double m = 0.0, m2 = 0.0;
        for (int r = 0; r < reps; ++r) {
            const auto smp = simulate(truth, X, T, hash_combine(opt.seed ^ 0xc1a1ULL, static_cast<std::uint64_t>(r)));
            const double t = test_statistic(f, f2, smp, X, T, G);
            m += t;
            m2 += t * t;
        }
        m /= reps;
        const double se = std::sqrt(std::max(0.0, m2 / reps - m * m) / reps);
        s.add("claim1_mean_bound", m, b.mean_bound + 3 * se);
    }
}

void covering(Suite& s, const VerifyOptions& opt) {
    const int n = 24;
    const CovariateSet X = CovariateSet::grid_1d(n);
    const TimeDomain T = TimeDomain::interval(0.0, 1.0);
    auto certify = [&](CandidateNet net, const std::string& label) {
        net.eta_bar *= opt.eta_scale;
        const CoveringReport r = certify_net(net, 200, 20, hash_string(label, opt.seed));
        s.add("covering_" + label, r.max_distance, net.eta_bar);
        s.add("cardinality_" + label, r.max_ball_count, r.ball_bound);
    };
    for (double eta : {0.3, 0.2}) {
        const std::string e = "eta=" + fmt17(eta);
        certify(build_linear_net({LinearSpace::Axis::time, 1, 0, 0.0, 1.0}, eta, T, X), "linear_time_" + e);
        certify(build_linear_net({LinearSpace::Axis::covariate, 1, 0, 0.0, 1.0}, eta, T, X), "linear_cov_" + e);
        ProductNetOptions po;
        po.kappa_max = 1.0;
        po.kappa_min = 0.5;
        certify(build_product_net({LinearSpace::Axis::time, 1, 0, 0.0, 1.0}, {LinearSpace::Axis::covariate, 0, 1, 0.0, 1.0},
                                  eta, T, X, po),
                "product_" + e);
        CoxNetOptions co;
        co.b_range = {0.2, 0.8};
        co.support = {0};
        co.rho_theta = 0.3;
        co.kappa_min = 0.5;
        co.kappa_max = 1.0;
        certify(build_cox_net(powerlaw_profile(), eta, T, X, co), "cox_power_" + e);
    }
    for (double gap : {0.5, 0.25}) {
        ChangepointOptions cp;
        for (double v = 0.5; v <= 1.5 + 1e-9; v += gap) cp.amplitudes.push_back(v);
        for (double v = 0.0; v <= 1.0 + 1e-9; v += gap) cp.shapes.push_back(v);
        cp.max_segments = 2;
        const auto nets = build_changepoint_collection({ParamFamily::Kind::duane, 0}, 6, cp);
        double worst_cover = 0.0, worst_card = 0.0;
        bool ok = true;
        for (std::size_t k = 0; k < nets.size(); ++k) {
            CandidateNet net = nets[k];
            net.eta_bar *= opt.eta_scale;
            const CoveringReport r = certify_net(net, 200, 20, hash_combine(opt.seed, k));
            worst_cover = std::max(worst_cover, r.max_distance / net.eta_bar);
            worst_card = std::max(worst_card, r.max_ball_count / r.ball_bound);
            ok = ok && r.ok();
        }
        s.add("covering_changepoint_gap=" + fmt17(gap) + "_ratio", worst_cover, 1.0);
        s.add("cardinality_changepoint_gap=" + fmt17(gap) + "_ratio", worst_card, 1.0);
    }
}

}  // namespace

std::vector<CheckRow> verify(const std::string& suite, const VerifyOptions& opt) {
    const bool all = suite == "all";
    if (!all && suite != "identities" && suite != "concentration" && suite != "covering")
        throw std::invalid_argument("unknown suite: " + suite);
    std::vector<CheckRow> rows;
    auto run = [&](const std::string& name, void (*fn)(Suite&, const VerifyOptions&)) {
        if (!all && suite != name) return;
        Suite s;
        s.name = name;
        fn(s, opt);
        rows.insert(rows.end(), s.rows.begin(), s.rows.end());
    };
    run("identities", identities);
    run("concentration", concentration);
    run("covering", covering);
    return rows;
}

std::string format_checks(const std::vector<CheckRow>& rows) {
    std::ostringstream os;
    for (const auto& r : rows) {
        char buf[512];
        std::snprintf(buf, sizeof buf, "%-4s %-14s %-48s measured=%-24s limit=%s\n", r.pass ? "PASS" : "FAIL",
                      r.suite.c_str(), r.name.c_str(), fmt17(r.measured).c_str(), fmt17(r.limit).c_str());
        os << buf;
    }
    return os.str();
}

}  // namespace ppsel
