// Acceptance checks 1-9. Every reference value is computed here, from GSL
// quadrature, closed forms derived for the test, or brute force over raw
// test outcomes. One PASS/FAIL line per criterion; exit status 0 iff all pass.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "ppsel/geometry.hpp"
#include "ppsel/harness.hpp"
#include "ppsel/model_zoo.hpp"
#include "ppsel/selector.hpp"
#include "ppsel/tests_engine.hpp"

using namespace ppsel;

namespace {

const TimeDomain T01 = TimeDomain::interval(0.0, 1.0);
const double kS2 = std::sqrt(2.0);

struct Outcome {
    bool pass = true;
    std::ostringstream detail;
    void require(bool ok, const std::string& what) {
        if (!ok) {
            if (pass) detail << "first failure: ";
            else detail << "; ";
            detail << what;
            pass = false;
        }
    }
};

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ------------------------------------------------------------ helpers

// Composite 3-point Gauss-Legendre with `cells` equal cells on [a, b]; exact
// for piecewise quintics on aligned dyadic cells.
double gauss3(const std::function<double(double)>& f, double a, double b, int cells) {
    const double x[3] = {-std::sqrt(0.6), 0.0, std::sqrt(0.6)};
    const double w[3] = {5.0 / 9, 8.0 / 9, 5.0 / 9};
    const double h = (b - a) / cells;
    double acc = 0;
    for (int c = 0; c < cells; ++c) {
        const double mid = a + (c + 0.5) * h;
        for (int k = 0; k < 3; ++k) acc += w[k] * f(mid + 0.5 * h * x[k]);
    }
    return 0.5 * h * acc;
}

// int_0^1 (a t^b - a2 t^b2)^2 dt for b, b2 > -1/2
double power_pair_sq(double a, double b, double a2, double b2) {
    return a * a / (2 * b + 1) - 2 * a * a2 / (b + b2 + 1) + a2 * a2 / (2 * b2 + 1);
}

// ------------------------------------------------------------ criterion 1

Outcome criterion1() {
    Outcome o;
    SplitMix64 rng(101);
    const int n = 17;
    const QuadratureRule G = gauss_rule(T01, 4, 3);
    double worst = 0, worst_lib = 0;
    for (int q = 0; q < 100; ++q) {
        const double k1 = 0.2 + 1.8 * rng.uniform(), k2 = 0.2 + 1.8 * rng.uniform();
        DyadicPolyAtom f{0, 1, 2, 1, Eigen::VectorXd(8)}, f2 = f;
        for (int j = 0; j < 8; ++j) f.coef[j] = rng.normal(), f2.coef[j] = rng.normal();
        f.coef.normalize();
        f2.coef.normalize();
        Eigen::VectorXd g(n), g2(n);
        for (int i = 0; i < n; ++i) g[i] = rng.normal(), g2[i] = rng.normal();
        g *= std::sqrt(n) / g.norm();
        g2 *= std::sqrt(n) / g2.norm();
        const std::vector<double> brk = {0, 0.25, 0.5, 0.75, 1};
        auto fa = [&](double t) { return atom_value(TimeAtom(f), t); };
        auto fb = [&](double t) { return atom_value(TimeAtom(f2), t); };
        const double unit = oracle::integrate_pts([&](double t) { return fa(t) * fa(t); }, brk);
        o.require(std::abs(unit - 1) < 1e-12, "time factor not unit");
        const double dt2 = oracle::integrate_pts([&](double t) { return std::pow(fa(t) - fb(t), 2); }, brk);
        const double dx2 = (g - g2).squaredNorm() / n;
        double direct = 0;
        for (int i = 0; i < n; ++i)
            direct += oracle::integrate_pts([&](double t) { return std::pow(k1 * fa(t) * g[i] - k2 * fb(t) * g2[i], 2); }, brk);
        direct /= n;
        const double identity = std::pow(product_distance(k1, k2, std::sqrt(dt2), std::sqrt(dx2)), 2);
        worst = std::max(worst, std::abs(identity - direct));
        const double lib = std::pow(product_l2_distance(k1, f, g, k2, f2, g2, G), 2);
        worst_lib = std::max(worst_lib, std::abs(lib - direct));
    }
    o.require(worst <= 1e-9, "product identity error " + num(worst));
    o.require(worst_lib <= 1e-9, "product_l2_distance error " + num(worst_lib));

    // normalized power and exponential profiles
    auto pow_norm_sq = [](double b, double b2) {
        const double n1 = std::sqrt(oracle::integrate([&](double t) { return std::pow(t, 2 * b); }, 0, 1));
        const double n2 = std::sqrt(oracle::integrate([&](double t) { return std::pow(t, 2 * b2); }, 0, 1));
        return oracle::integrate([&](double t) { return std::pow(std::pow(t, b) / n1 - std::pow(t, b2) / n2, 2); }, 0, 1);
    };
    auto exp_norm_sq = [](double b, double b2, int k) {
        auto u = [&](double bb, double t) { return std::pow(t, 0.5 * k) * std::exp(-bb * t); };
        const double n1 = std::sqrt(oracle::integrate_inf([&](double t) { return u(b, t) * u(b, t); }, 0));
        const double n2 = std::sqrt(oracle::integrate_inf([&](double t) { return u(b2, t) * u(b2, t); }, 0));
        return oracle::integrate_inf([&](double t) { return std::pow(u(b, t) / n1 - u(b2, t) / n2, 2); }, 0);
    };
    double worst_q = 0;
    const double p0 = powerlaw_normalized_sqdist(0.0, 1.5);
    o.require(std::abs(p0 - 0.4) < 1e-14, "power example " + num(p0));
    worst_q = std::max(worst_q, std::abs(p0 - pow_norm_sq(0.0, 1.5)));
    const double e0 = expfamily_normalized_sqdist(1.0, 4.0, 0);
    o.require(std::abs(e0 - 0.4) < 1e-14, "exp example " + num(e0));
    worst_q = std::max(worst_q, std::abs(e0 - exp_norm_sq(1.0, 4.0, 0)));
    for (int q = 0; q < 10; ++q) {
        const double b = -0.3 + 2 * rng.uniform(), b2 = -0.3 + 2 * rng.uniform();
        worst_q = std::max(worst_q, std::abs(powerlaw_normalized_sqdist(b, b2) - pow_norm_sq(b, b2)));
        const double c = 0.2 + 3 * rng.uniform(), c2 = 0.2 + 3 * rng.uniform();
        for (int k : {0, 1, 2}) worst_q = std::max(worst_q, std::abs(expfamily_normalized_sqdist(c, c2, k) - exp_norm_sq(c, c2, k)));
    }
    // Duane and exponential decay closed forms
    for (int q = 0; q < 10; ++q) {
        const double a = -2 + 4 * rng.uniform(), a2 = -2 + 4 * rng.uniform();
        const double b = -0.4 + 2 * rng.uniform(), b2 = -0.4 + 2 * rng.uniform();
        const double duane = oracle::integrate(
            [&](double t) { return std::pow(a * std::pow(t, b) - a2 * std::pow(t, b2), 2); }, 0, 1);
        worst_q = std::max(worst_q, std::abs(duane_sqdist(a, b, a2, b2) - duane));
        const double pd = oracle::integrate([&](double t) { return std::pow(std::pow(t, b) - std::pow(t, b2), 2); }, 0, 1);
        worst_q = std::max(worst_q, std::abs(power_diff_sqnorm(b, b2) - pd));
        const double r = 0.2 + 3 * rng.uniform(), r2 = 0.2 + 3 * rng.uniform();
        for (int k : {0, 1, 2}) {
            const double ed = oracle::integrate_inf(
                [&](double t) {
                    const double p = std::pow(t, 0.5 * k);
                    return std::pow(a * p * std::exp(-r * t) - a2 * p * std::exp(-r2 * t), 2);
                },
                0);
            worst_q = std::max(worst_q, std::abs(expdecay_sqdist(a, r, a2, r2, k) - ed));
        }
        for (int k : {0, 1}) {
            const double rr = oracle::integrate_inf(
                [&](double t) { return std::pow(t, k) * std::pow(std::exp(-r * t) - std::exp(-r2 * t), 2); }, 0);
            worst_q = std::max(worst_q, std::abs(expdecay_rate_sqdist(r, r2, k) - rr));
        }
    }
    o.require(worst_q <= 1e-6, "closed form vs quadrature error " + num(worst_q));
    o.detail << (o.pass ? "" : "; ") << "product identity max err " << num(worst) << ", closed forms max err "
             << num(worst_q);
    return o;
}

// ------------------------------------------------------------ criterion 2

Outcome criterion2() {
    Outcome o;
    int pairs = 0;
    auto profile_dist = [](const LipschitzProfile& p, double b, double b2) {
        if (p.family == ProfileFamily::power) {
            const double n1 = 1 / std::sqrt(2 * b + 1), n2 = 1 / std::sqrt(2 * b2 + 1);
            return std::sqrt(std::max(0.0, power_pair_sq(1 / n1, b, 1 / n2, b2)));
        }
        const int k = p.k;
        auto u = [&](double bb, double t) { return std::pow(t, 0.5 * k) * std::exp(-bb * t); };
        const double n1 = std::sqrt(oracle::integrate_inf([&](double t) { return u(b, t) * u(b, t); }, 0));
        const double n2 = std::sqrt(oracle::integrate_inf([&](double t) { return u(b2, t) * u(b2, t); }, 0));
        return std::sqrt(oracle::integrate_inf([&](double t) { return std::pow(u(b, t) / n1 - u(b2, t) / n2, 2); }, 0));
    };
    for (const LipschitzProfile& p : {powerlaw_profile(), expfamily_profile(0), expfamily_profile(1)}) {
        std::vector<double> grid;
        for (int k = 0; k < 11; ++k) grid.push_back(p.family == ProfileFamily::power ? -0.45 + 0.35 * k : 0.15 + 0.4 * k);
        int used = 0;
        for (std::size_t i = 0; i < grid.size() && used < 50; ++i)
            for (std::size_t j = i + 1; j < grid.size() && used < 50; ++j, ++used) {
                const double b = grid[i], b2 = grid[j], gap = b2 - b;
                const double d = profile_dist(p, b, b2);
                const double lo = p.rho_lower(b2) * gap, hi = p.rho_upper(b) * gap;
                o.require(lo <= d * (1 + 1e-9) && d <= hi * (1 + 1e-9),
                          p.name() + " bracket fails at (" + num(b) + "," + num(b2) + ")");
                ++pairs;
            }
    }
    // Lipschitz bounds on the parameter boxes
    SplitMix64 rng(202);
    for (auto [r1, r2] : {std::pair{2.0, 2.0}, std::pair{1.0, 4.0}}) {
        for (int q = 0; q < 50; ++q) {
            const double a = -r1 + 2 * r1 * rng.uniform(), a2 = -r1 + 2 * r1 * rng.uniform();
            const double lo = -0.5 + 1 / r2;
            const double b = lo + 3 * rng.uniform(), b2 = lo + 3 * rng.uniform();
            const double d = std::sqrt(std::max(0.0, power_pair_sq(a, b, a2, b2)));
            o.require(d <= duane_lipschitz_bound(a - a2, b - b2, r1, r2) * (1 + 1e-12), "duane bound");
            const double c = 1 / r2 + 4 * rng.uniform(), c2 = 1 / r2 + 4 * rng.uniform();
            for (int k : {0, 1}) {
                const double de = std::sqrt(oracle::integrate_inf(
                    [&](double t) {
                        const double p = std::pow(t, 0.5 * k);
                        return std::pow(a * p * std::exp(-c * t) - a2 * p * std::exp(-c2 * t), 2);
                    },
                    0));
                o.require(de <= expdecay_lipschitz_bound(a - a2, c - c2, k, r1, r2) * (1 + 1e-12),
                          "expdecay bound k=" + std::to_string(k));
            }
            pairs += 3;
        }
    }
    o.detail << (o.pass ? "" : "; ") << pairs << " pairs checked";
    return o;
}

// ------------------------------------------------------------ criterion 3

Outcome criterion3() {
    Outcome o;
    const int R = 10000, n = 10;
    const CovariateSet X = CovariateSet::none(n);
    struct Config {
        IntensitySurface s;
        std::function<double(double)> sv, f;
        double rho;
        std::string name;
    };
    const std::vector<Config> configs = {
        {IntensitySurface::constant(3.0), [](double) { return 3.0; }, [](double t) { return t < 0.5 ? 1.0 : -0.5; }, 1.0,
         "const/step"},
        {IntensitySurface::power_law(4.0, 1.0), [](double t) { return 4 * t; }, [](double t) { return std::sin(6 * t); },
         1.0, "power/sine"},
        {IntensitySurface::exp_decay(6.0, 2.0, 0), [](double t) { return 6 * std::exp(-2 * t); },
         [](double t) { return 1 - 2 * t; }, 1.0, "decay/linear"},
    };
    double worst_ratio = 0;
    for (std::size_t ci = 0; ci < configs.size(); ++ci) {
        const auto& c = configs[ci];
        const std::vector<double> brk = {0.0, 0.5, 1.0};
        const double mean = oracle::integrate_pts([&](double t) { return c.f(t) * c.sv(t); }, brk);
        const double ups = oracle::integrate_pts([&](double t) { return c.f(t) * c.f(t) * c.sv(t); }, brk);
        std::vector<double> dev(R);
        for (int r = 0; r < R; ++r) {
            const auto smp = simulate(c.s, X, T01, 900000 + 10000 * ci + r);
            double acc = 0;
            for (const auto& ev : smp.events) {
                for (double t : ev) acc += c.f(t);
                acc -= mean;
            }
            dev[static_cast<std::size_t>(r)] = acc / n;
        }
        for (double mult : {0.5, 1.0, 2.0}) {
            const double r = mult * ups / c.rho;
            const double bound = std::exp(-n * (ups / (c.rho * c.rho)) * oracle::bennett_h(c.rho * r / ups));
            o.require(std::abs(bennett_bound(c.rho, ups, r, n) - bound) <= 1e-12 * bound, "library Bennett value");
            const double emp = static_cast<double>(std::count_if(dev.begin(), dev.end(), [&](double v) { return v >= r; })) / R;
            const double se = std::sqrt(bound * (1 - bound) / R);
            o.require(emp <= bound + 3 * se, "Bennett " + c.name + " r=" + num(mult) + "u/rho: " + num(emp) + " > " + num(bound));
            worst_ratio = std::max(worst_ratio, emp / bound);
        }
    }
    // Claim 1 on three triples
    struct Triple {
        IntensitySurface s, f, f2;
    };
    const std::vector<Triple> triples = {
        {IntensitySurface::power_law(3.0, 0.5), IntensitySurface::power_law(2.0, 0.0), IntensitySurface::power_law(5.0, 1.0)},
        {IntensitySurface::constant(2.0), IntensitySurface::constant(1.0), IntensitySurface::constant(4.0)},
        {IntensitySurface::exp_decay(4.0, 1.0, 0), IntensitySurface::constant(3.0), IntensitySurface::exp_decay(5.0, 2.0, 1)},
    };
    const QuadratureRule G = graded_rule(T01);
    for (std::size_t k = 0; k < triples.size(); ++k) {
        const auto& tr = triples[k];
        auto h2 = [&](const IntensitySurface& u, const IntensitySurface& v) {
            return 0.5 * oracle::integrate([&](double t) { return std::pow(u.root(t, 0, X) - v.root(t, 0, X), 2); }, 0, 1);
        };
        const double mean_bound = (1 + 1 / kS2) * h2(tr.s, tr.f) - (1 - 1 / kS2) * h2(tr.s, tr.f2);
        o.require(std::abs(claim1_bounds(tr.s, tr.f, tr.f2, X, T01, G).mean_bound - mean_bound) <= 1e-6,
                  "library Claim 1 bound");
        std::vector<double> ts(R);
        for (int r = 0; r < R; ++r) ts[static_cast<std::size_t>(r)] = test_statistic(tr.f, tr.f2, simulate(tr.s, X, T01, 500000 + 20000 * k + r), X, T01, G);
        const auto ms = oracle::mean_se(ts);
        o.require(ms.mean <= mean_bound + 3 * ms.se,
                  "Claim 1 triple " + std::to_string(k) + ": mean " + num(ms.mean) + " > " + num(mean_bound));
    }
    o.detail << (o.pass ? "" : "; ") << "max empirical/Bennett ratio " << num(worst_ratio);
    return o;
}

// ------------------------------------------------------------ criterion 4

Outcome criterion4() {
    Outcome o;
    const int R = 1000;
    const QuadratureRule Q = simpson_rule(T01);
    struct Pair {
        IntensitySurface f, f2;
    };
    const std::vector<Pair> pairs = {{IntensitySurface::constant(1.0), IntensitySurface::constant(4.0)},
                                     {IntensitySurface::power_law(2.0, 0.0), IntensitySurface::power_law(6.0, 2.0)}};
    const auto paper = TestConstants::paper_faithful();
    double worst_gap = -1;
    for (std::size_t p = 0; p < pairs.size(); ++p) {
        const auto& pr = pairs[p];
        const int n = 20;
        const CovariateSet X = CovariateSet::none(n);
        // s = f, so 4H(s,f) = 0 <= H(f,f')
        const double H2 = 0.5 * oracle::integrate([&](double t) { return std::pow(pr.f.root(t, 0, X) - pr.f2.root(t, 0, X), 2); }, 0, 1);
        for (double z : {0.0, 0.5 * H2, -0.5 * H2}) {
            int acc = 0;
            for (int r = 0; r < R; ++r) {
                const auto smp = simulate(pr.f, X, T01, 700000 + 5000 * p + r);
                acc += run_test(pr.f, pr.f2, z, smp, X, T01, Q, paper, 3).accepts_second ? 1 : 0;
            }
            const double emp = static_cast<double>(acc) / R;
            const double bound = std::exp(-n * paper.a * (H2 + z));
            const double se = std::sqrt(std::max(bound * (1 - bound), 0.0) / R);
            o.require(emp <= bound + 3 * se, "paper constants pair " + std::to_string(p) + " z=" + num(z));
            worst_gap = std::max(worst_gap, emp - bound);
        }
    }
    // calibrated constants, n H^2 >= 25
    const auto cal = TestConstants::calibrated();
    double worst_err = 0;
    for (std::size_t p = 0; p < pairs.size(); ++p) {
        const auto& pr = pairs[p];
        const double H2 = 0.5 * oracle::integrate([&](double t) { return std::pow(pr.f.root(t, 0, CovariateSet::none(1)) - pr.f2.root(t, 0, CovariateSet::none(1)), 2); }, 0, 1);
        const int n = static_cast<int>(std::ceil(25.0 / H2));
        const CovariateSet X = CovariateSet::none(n);
        for (int dir = 0; dir < 2; ++dir) {
            const auto& truth = dir == 0 ? pr.f : pr.f2;
            const auto& other = dir == 0 ? pr.f2 : pr.f;
            int wrong = 0;
            for (int r = 0; r < R; ++r) {
                const auto smp = simulate(truth, X, T01, 800000 + 7000 * p + 3000 * dir + r);
                wrong += run_test(truth, other, 0.0, smp, X, T01, Q, cal, 3).accepts_second ? 1 : 0;
            }
            const double err = static_cast<double>(wrong) / R;
            worst_err = std::max(worst_err, err);
            o.require(err <= 0.05, "calibrated error " + num(err));
        }
    }
    o.detail << (o.pass ? "" : "; ") << "max (empirical - bound) " << num(worst_gap) << ", calibrated max error "
             << num(worst_err);
    return o;
}

// ------------------------------------------------------------ criterion 5

// Distance from a member root to the nearest candidate, by a caller-supplied
// squared distance.
double nearest(const CandidateNet& net, const std::function<double(const SqrtFunction&)>& sqdist) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& c : net.candidates) best = std::min(best, sqdist(c));
    return std::sqrt(std::max(0.0, best));
}

// |root| sampled on composite 3-point Gauss nodes for every process, with
// weights including 1/n: squared distances between square roots of
// intensities (2 H^2) become weighted sums. Comparing absolute values lets a
// net cover up to sign.
struct Sampler {
    std::vector<double> nodes, weights;
    int n = 0;
    Sampler(int n_, int cells) : n(n_) {
        const double x[3] = {-std::sqrt(0.6), 0.0, std::sqrt(0.6)};
        const double w[3] = {5.0 / 9, 8.0 / 9, 5.0 / 9};
        const double h = 1.0 / cells;
        for (int c = 0; c < cells; ++c)
            for (int k = 0; k < 3; ++k) {
                nodes.push_back((c + 0.5 + 0.5 * x[k]) * h);
                weights.push_back(0.5 * h * w[k] / n_);
            }
    }
    Eigen::VectorXd sample(const SqrtFunction& f, const CovariateSet& X) const {
        Eigen::VectorXd v(static_cast<Eigen::Index>(n * nodes.size()));
        Eigen::Index k = 0;
        for (int i = 0; i < n; ++i)
            for (double t : nodes) v[k++] = std::abs(root_value(f, t, i, X));
        return v;
    }
    Eigen::MatrixXd sample_all(const std::vector<SqrtFunction>& fs, const CovariateSet& X) const {
        Eigen::MatrixXd m(static_cast<Eigen::Index>(fs.size()), static_cast<Eigen::Index>(n * nodes.size()));
        for (std::size_t r = 0; r < fs.size(); ++r) m.row(static_cast<Eigen::Index>(r)) = sample(fs[r], X).transpose();
        return m;
    }
    // distance from member samples to the nearest row
    double nearest(const Eigen::MatrixXd& cands, const Eigen::VectorXd& member) const {
        Eigen::VectorXd w(member.size());
        for (Eigen::Index k = 0; k < member.size(); ++k) w[k] = weights[static_cast<std::size_t>(k) % weights.size()];
        const Eigen::VectorXd d = (cands.rowwise() - member.transpose()).array().square().matrix() * w;
        return std::sqrt(std::max(0.0, d.minCoeff()));
    }
};

Outcome criterion5() {
    Outcome o;
    const int n = 12;
    const CovariateSet X = CovariateSet::grid_1d(n);
    SplitMix64 rng(505);
    int members = 0;
    double worst = 0;
    auto library_check = [&](const CandidateNet& net, const std::string& what) {
        const CoveringReport r = certify_net(net, 200, 20, hash_string(what));
        o.require(r.covering_ok, what + " covering (library) " + num(r.max_distance));
        o.require(r.cardinality_ok, what + " cardinality " + num(r.max_ball_count) + " > " + num(r.ball_bound));
    };
    auto unit = [&](int D) {
        Eigen::VectorXd v(D);
        for (int j = 0; j < D; ++j) v[j] = rng.normal();
        return Eigen::VectorXd(v / v.norm());
    };
    for (double eta : {0.3, 0.2}) {
        const std::string e = " eta=" + num(eta);
        // linear, along time: coefficients in [0,1]^D in an orthonormal basis
        {
            const LinearSpace V{LinearSpace::Axis::time, 1, 1, 0.0, 1.0};
            const auto net = build_linear_net(V, eta, T01, X);
            library_check(net, "linear-time" + e);
            const Sampler S(n, 64);
            const Eigen::MatrixXd C = S.sample_all(net.candidates, X);
            for (int t = 0; t < 40; ++t, ++members) {
                Eigen::VectorXd coef(V.dim());
                for (int j = 0; j < V.dim(); ++j) coef[j] = rng.uniform();
                const SqrtFunction m = make_product_root(1.0, time_function(V, coef), Eigen::VectorXd::Ones(n));
                const double d = S.nearest(C, S.sample(m, X));
                worst = std::max(worst, d / eta);
                o.require(d <= eta, "linear-time member at " + num(d) + e);
            }
        }
        // linear, along the covariate
        {
            const LinearSpace V{LinearSpace::Axis::covariate, 1, 0, 0.0, 1.0};
            const auto net = build_linear_net(V, eta, T01, X);
            library_check(net, "linear-cov" + e);
            const Eigen::MatrixXd B = covariate_basis(V, X);
            for (int t = 0; t < 40; ++t, ++members) {
                Eigen::VectorXd coef(B.cols());
                for (Eigen::Index j = 0; j < B.cols(); ++j) coef[j] = rng.uniform();
                const Eigen::VectorXd g = B * coef;
                const double d = nearest(net, [&](const SqrtFunction& c) {
                    double acc = 0;
                    for (int i = 0; i < n; ++i) acc += std::pow(std::abs(g[i]) - std::abs(root_value(c, 0.5, i, X)), 2);
                    return acc / n;
                });
                worst = std::max(worst, d / eta);
                o.require(d <= eta, "linear-cov member at " + num(d) + e);
            }
        }
        // product kappa f g with unit factors
        {
            const LinearSpace V1{LinearSpace::Axis::time, 0, 1, 0.0, 1.0};
            const LinearSpace V2{LinearSpace::Axis::covariate, 0, 1, 0.0, 1.0};
            ProductNetOptions po;
            po.kappa_max = 1.0;
            const auto net = build_product_net(V1, V2, eta, T01, X, po);
            library_check(net, "product" + e);
            const Eigen::MatrixXd B = covariate_basis(V2, X);
            const Sampler S(n, 64);
            const Eigen::MatrixXd C = S.sample_all(net.candidates, X);
            for (int t = 0; t < 40; ++t, ++members) {
                const double kappa = rng.uniform();
                const SqrtFunction m = make_product_root(kappa, time_function(V1, unit(V1.dim())), B * unit(static_cast<int>(B.cols())));
                const double d = S.nearest(C, S.sample(m, X));
                worst = std::max(worst, d / eta);
                o.require(d <= eta, "product member at " + num(d) + e);
            }
        }
        // Cox power profile, with and without an active covariate
        for (int with_cov = 0; with_cov < 2; ++with_cov) {
            CoxNetOptions co;
            co.b_range = {0.0, 1.0};
            co.kappa_min = 0.5;
            co.kappa_max = 1.5;
            co.rho_theta = 1.0;
            if (with_cov) co.support = {0};
            const auto net = build_cox_net(powerlaw_profile(), eta, T01, X, co);
            const std::string what = std::string(with_cov ? "cox m={0}" : "cox m={}") + e;
            library_check(net, what);
            auto cov_sq_norm = [&](double th) {
                double acc = 0;
                for (int i = 0; i < n; ++i) acc += std::exp(2 * th * X.x(i, 0));
                return acc / n;
            };
            for (int t = 0; t < 60; ++t, ++members) {
                const double kappa = 0.5 + rng.uniform(), b = rng.uniform();
                const double th = with_cov ? -1 + 2 * rng.uniform() : 0.0;
                const double A = kappa * std::sqrt(2 * b + 1) / std::sqrt(cov_sq_norm(th));
                const double d = nearest(net, [&](const SqrtFunction& c) {
                    const auto& cr = std::get<CoxRoot>(c);
                    const double th2 = cr.theta.size() ? cr.theta[0] : 0.0;
                    double acc = 0;
                    for (int i = 0; i < n; ++i)
                        acc += power_pair_sq(A * std::exp(th * X.x(i, 0)), b, cr.amplitude * std::exp(th2 * X.x(i, 0)), cr.power);
                    return acc / n;
                });
                worst = std::max(worst, d / eta);
                o.require(d <= eta, what + " member at " + num(d));
            }
        }
        // change-point nets: grid gap chosen so the Lipschitz radius is eta
        {
            const int np = 6;
            const double r2 = 2.0, r1 = 2.0;
            const double R1 = std::sqrt(r2), R2 = kS2 * r1 * std::pow(r2, 1.5);
            const double gap = 2 * eta / (R1 + R2);
            ChangepointOptions cp;
            for (double a = 1.0; a <= 2.0 + 1e-12; a += gap) cp.amplitudes.push_back(a);
            const double blo = -0.5 + 1 / r2;
            for (double b = blo; b <= blo + 0.2 + 1e-12; b += gap) cp.shapes.push_back(b);
            cp.max_segments = 2;
            const auto nets = build_changepoint_collection(ParamFamily{ParamFamily::Kind::duane, 0}, np, cp);
            const double amax = cp.amplitudes.back(), bmax = cp.shapes.back();
            for (const auto& net : nets) {
                o.require(net.eta <= eta * (1 + 1e-12), "change-point radius " + num(net.eta));
                library_check(net, net.label + e);
                std::vector<int> starts = {0};
                if (const auto* pw = std::get_if<PiecewiseRoot>(&net.candidates.front())) starts = pw->starts;
                for (int t = 0; t < 10; ++t, ++members) {
                    std::vector<std::pair<double, double>> pieces;
                    for (std::size_t s = 0; s < starts.size(); ++s)
                        pieces.push_back({1.0 + (amax - 1.0) * rng.uniform(), blo + (bmax - blo) * rng.uniform()});
                    auto seg = [&](int i) {
                        std::size_t s = 0;
                        while (s + 1 < starts.size() && i >= starts[s + 1]) ++s;
                        return s;
                    };
                    const double d = nearest(net, [&](const SqrtFunction& c) {
                        double acc = 0;
                        for (int i = 0; i < np; ++i) {
                            ParametricRoot cr;
                            if (const auto* pw = std::get_if<PiecewiseRoot>(&c)) cr = pw->pieces[seg(i)];
                            else cr = std::get<ParametricRoot>(c);
                            const auto [a, b] = pieces[seg(i)];
                            acc += power_pair_sq(a, b, cr.amplitude, cr.power);
                        }
                        return acc / np;
                    });
                    worst = std::max(worst, d / eta);
                o.require(d <= eta, net.label + " member at " + num(d) + e);
                }
            }
        }
    }
    o.detail << (o.pass ? "" : "; ") << members << " random members, max distance/eta " << num(worst)
             << ", library certificates for all nets";
    return o;
}

// ------------------------------------------------------------ criterion 6

Outcome criterion6() {
    Outcome o;
    const double e = eta_solver(DimensionBound::constant(2.0), 100);
    o.require(std::abs(e * e - 0.02) <= 1e-16, "constant D example " + num(e * e));
    SplitMix64 rng(606);
    double worst = 0;
    for (int q = 0; q < 20; ++q) {
        const double alpha = 0.05 + 5 * rng.uniform(), beta = 0.05 + 5 * rng.uniform();
        const int n = static_cast<int>(std::exp(std::log(5.0) + rng.uniform() * std::log(2e5)));
        const auto D = DimensionBound::log_form(alpha, beta);
        auto Df = [&](double eta) { return eta < 1 ? 2 * alpha + 2 * beta * std::log(1 / eta) : 2 * alpha; };
        // bisection on the monotone map eta -> D(eta)/eta^2 - n
        double lo = 1e-15, hi = 1.0;
        while (Df(hi) / (hi * hi) > n) hi *= 2;
        for (int it = 0; it < 400 && hi - lo > 1e-17; ++it) {
            const double mid = 0.5 * (lo + hi);
            (Df(mid) / (mid * mid) <= n ? hi : lo) = mid;
        }
        const double closed = eta_solver(D, n);
        worst = std::max({worst, std::abs(closed - hi), std::abs(closed - eta_solver_bisect(Df, n))});
    }
    o.require(worst <= 1e-9, "closed form vs bisection " + num(worst));
    o.detail << (o.pass ? "" : "; ") << "max |closed - bisection| " << num(worst);
    return o;
}

// ------------------------------------------------------------ criterion 7

CandidateNet explicit_net(std::string label, std::vector<SqrtFunction> c, double eta_bar, double weight) {
    CandidateNet net;
    net.label = std::move(label);
    net.candidates = std::move(c);
    net.eta_bar = eta_bar;
    net.weight = weight;
    net.dim_bound = DimensionBound::constant(1.0);
    return net;
}

Outcome criterion7() {
    Outcome o;
    // two candidates, n H^2 = 25
    {
        const int n = 50;
        const CovariateSet X = CovariateSet::none(n);
        const SqrtFunction g1 = ParametricRoot{1.0, 0, 0}, g2 = ParametricRoot{2.0, 0, 0};
        const double H2 = 0.5 * (2 - 1) * (2 - 1);
        o.require(n * H2 >= 25, "separation");
        const Collection nets = {explicit_net("pair", {g1, g2}, 0.1, 1.0)};
        for (int dir = 0; dir < 2; ++dir) {
            const auto truth = IntensitySurface::square_of(dir == 0 ? g1 : g2);
            int hits = 0;
            for (int r = 0; r < 200; ++r) {
                SelectionConfig cfg;
                cfg.tie_seed = r;
                const auto res = run_selection(nets, simulate(truth, X, T01, 100000 + 1000 * dir + r), X, T01, cfg);
                hits += res.chosen_id == descriptor(dir == 0 ? g1 : g2) ? 1 : 0;
            }
            o.require(hits >= 190, "two-candidate hit rate " + num(hits / 200.0));
            o.detail << (dir ? ", " : "") << "hit rate " << num(hits / 200.0);
        }
    }
    // m = 5 brute force over the definition
    {
        const int n = 30;
        const CovariateSet X = CovariateSet::none(n);
        const std::vector<SqrtFunction> A = {ParametricRoot{1.0, 0, 0}, ParametricRoot{1.3, 0, 0}, ParametricRoot{0.9, 0.2, 0}};
        const std::vector<SqrtFunction> B = {ParametricRoot{1.3, 0, 0}, ParametricRoot{1.6, 0, 0}, ParametricRoot{1.1, 0, 0.6}};
        const Collection nets = {explicit_net("A", A, 0.15, 2.0), explicit_net("B", B, 0.25, 2.0)};
        // the union, each function once, with the smallest radius of its nets
        std::vector<SqrtFunction> F;
        std::vector<double> radius;
        for (const auto& net : nets)
            for (const auto& f : net.candidates) {
                auto it = std::find_if(F.begin(), F.end(), [&](const SqrtFunction& g) { return descriptor(g) == descriptor(f); });
                if (it == F.end()) {
                    F.push_back(f);
                    radius.push_back(net.eta_bar);
                } else {
                    auto& r = radius[static_cast<std::size_t>(it - F.begin())];
                    r = std::min(r, net.eta_bar);
                }
            }
        o.require(F.size() == 5, "union size");
        const auto m = static_cast<int>(F.size());
        int matched = 0, total = 0, nontrivial = 0;
        for (PenaltyForm pen : {PenaltyForm::squared, PenaltyForm::literal}) {
            for (int r = 0; r < 100; ++r, ++total) {
                SelectionConfig cfg;
                cfg.tie_seed = 17 + r;
                cfg.penalty = pen;
                cfg.epsilon = pen == PenaltyForm::squared ? 1.0 : 0.5;
                const auto smp = simulate(IntensitySurface::constant(1.4), X, T01, 300000 + r);
                const auto res = run_selection(nets, smp, X, T01, cfg);
                const QuadratureRule Q = selection_rule(unify(nets), X, T01, cfg.quadrature_nodes);
                std::vector<double> gamma(static_cast<std::size_t>(m), 0.0), obj(static_cast<std::size_t>(m));
                for (int i = 0; i < m; ++i)
                    for (int j = 0; j < m; ++j) {
                        if (i == j) continue;
                        const auto fi = IntensitySurface::square_of(F[i]), fj = IntensitySurface::square_of(F[j]);
                        const double z = radius[j] * radius[j] - radius[i] * radius[i];
                        if (run_test(fi, fj, z, smp, X, T01, Q, cfg.constants, cfg.tie_seed).accepts_second)
                            gamma[i] = std::max(gamma[i], hellinger_sq(fi, fj, X, T01, Q));
                    }
                for (int i = 0; i < m; ++i) {
                    const double pen_i = pen == PenaltyForm::squared ? radius[i] * radius[i] : radius[i];
                    obj[i] = std::max(gamma[i], cfg.epsilon * pen_i);
                    if (gamma[i] > cfg.epsilon * pen_i) ++nontrivial;
                }
                // argmin; near-equal objectives fall back to gamma, then radius, then id
                auto close = [](double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(a)); };
                int best = 0;
                for (int i = 1; i < m; ++i) {
                    const auto bi = static_cast<std::size_t>(best), ii = static_cast<std::size_t>(i);
                    bool better;
                    if (!close(obj[ii], obj[bi])) better = obj[ii] < obj[bi];
                    else if (!close(gamma[ii], gamma[bi])) better = gamma[ii] < gamma[bi];
                    else if (radius[ii] != radius[bi]) better = radius[ii] < radius[bi];
                    else better = descriptor(F[ii]) < descriptor(F[bi]);
                    if (better) best = i;
                }
                bool same = res.chosen_id == descriptor(F[static_cast<std::size_t>(best)]);
                for (int i = 0; i < m && same; ++i) {
                    const auto k = std::find(res.ids.begin(), res.ids.end(), descriptor(F[static_cast<std::size_t>(i)])) - res.ids.begin();
                    same = std::abs(res.gamma[k] - gamma[static_cast<std::size_t>(i)]) <= 1e-12;
                }
                matched += same ? 1 : 0;
            }
        }
        o.require(matched == total, "brute force matched " + std::to_string(matched) + "/" + std::to_string(total));
        o.require(nontrivial > 0, "brute force never exercised gamma above the penalty");
        o.detail << ", brute force " << matched << "/" << total << " exact";
    }
    return o;
}

// ------------------------------------------------------------ criterion 8

Outcome criterion8() {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    const std::string dir = PPSEL_SCENARIO_DIR;
    auto means = [](const RiskReport& rep) {
        std::vector<double> ns, risk;
        for (int n : rep.n_grid) {
            std::vector<double> v;
            for (const auto& r : rep.records)
                if (r.n == n) v.push_back(r.risk);
            ns.push_back(n);
            risk.push_back(oracle::mean_se(v).mean);
        }
        return std::pair{ns, risk};
    };
    {
        const auto sc = load_scenario(dir + "/parametric_power.json");
        o.require(sc.n_grid == std::vector<int>{50, 200, 800}, "parametric n grid");
        const auto [ns, risk] = means(run_benchmark(sc, 1));
        const double s = oracle::loglog_slope(ns, risk);
        o.require(s <= -0.7, "parametric slope " + num(s));
        o.detail << "parametric slope " << num(s);
    }
    {
        const auto sc = load_scenario(dir + "/holder_product.json");
        const auto [ns, risk] = means(run_benchmark(sc, 1));
        const double s = oracle::loglog_slope(ns, risk);
        o.require(std::abs(s + 2.0 / 3.0) <= 0.25, "Hoelder slope " + num(s));
        o.detail << ", Hoelder slope " << num(s);
    }
    {
        const auto sc = load_scenario(dir + "/changepoint_duane.json");
        const auto rep = run_benchmark(sc, 1);
        const auto [ns, risk] = means(rep);
        auto ratio_at = [&](int n) {
            const auto k = static_cast<std::size_t>(std::find(rep.n_grid.begin(), rep.n_grid.end(), n) - rep.n_grid.begin());
            o.require(k < rep.n_grid.size(), "n=" + std::to_string(n) + " missing");
            const auto truth = std::get<PiecewiseRoot>(make_instance(sc, n).truth.root_function());
            return risk[std::min(k, risk.size() - 1)] * n / (truth.starts.size() * std::log(static_cast<double>(n)));
        };
        const double r100 = ratio_at(100), r400 = ratio_at(400);
        const double spread = std::max(r100, r400) / std::min(r100, r400);
        o.require(r100 > 0 && r400 > 0 && spread <= 3.0, "risk ratio spread " + num(spread));
        const auto truth = std::get<PiecewiseRoot>(make_instance(sc, 200).truth.root_function()).starts;
        int hits = 0, count = 0;
        for (const auto& r : rep.records) {
            if (r.n != 200) continue;
            ++count;
            bool ok = r.starts.size() == truth.size();
            for (std::size_t b = 0; ok && b < truth.size(); ++b) ok = std::abs(r.starts[b] - truth[b]) <= 5;
            hits += ok ? 1 : 0;
        }
        const double rate = count ? static_cast<double>(hits) / count : 0.0;
        o.require(rate >= 0.8, "breakpoint rate " + num(rate));
        o.detail << ", change-point ratio spread " << num(spread) << ", breakpoint rate " << num(rate);
    }
    const double secs = seconds_since(t0);
    o.require(secs < 900, "runtime " + num(secs) + " s");
    return o;
}

// ------------------------------------------------------------ criterion 9

Outcome criterion9() {
    Outcome o;
    SplitMix64 rng(909);
    const auto c = TestConstants::calibrated();
    int identical = 0;
    for (int draw = 0; draw < 10; ++draw) {
        const int n = 20 + static_cast<int>(rng.uniform() * 40);
        const CovariateSet X = CovariateSet::none(n);
        const RadiusRule rule{RadiusRule::Kind::scaled, 0.3 + rng.uniform()};
        const int parts_count = 2 + static_cast<int>(rng.uniform() * 2);
        // priors with sum exp(-prior) <= 1
        std::vector<double> u(static_cast<std::size_t>(parts_count));
        double su = 0;
        for (auto& v : u) su += (v = 0.1 + rng.uniform());
        std::vector<std::pair<Collection, double>> parts;
        for (int p = 0; p < parts_count; ++p) {
            std::vector<NetRecipe> recipes;
            const int nets = 1 + static_cast<int>(rng.uniform() * 2);
            for (int k = 0; k < nets; ++k) {
                NetRecipe r;
                r.label = "d" + std::to_string(draw) + "p" + std::to_string(p) + "n" + std::to_string(k);
                r.weight = 1.0 + 2 * rng.uniform();
                r.dim = DimensionBound::constant(0.5 + 2 * rng.uniform());
                std::vector<SqrtFunction> cands;
                const int m = 1 + static_cast<int>(rng.uniform() * 4);
                for (int j = 0; j < m; ++j)
                    cands.push_back(ParametricRoot{0.5 + 1.5 * rng.uniform(), 0.8 * rng.uniform(), 0.0});
                r.build = [cands, label = r.label](double eta) {
                    CandidateNet net;
                    net.label = label;
                    net.candidates = cands;
                    net.eta = eta;
                    return net;
                };
                recipes.push_back(std::move(r));
            }
            parts.emplace_back(assemble(recipes, n, rule, c), -std::log(u[static_cast<std::size_t>(p)] / su) + 0.05 * rng.uniform());
        }
        const Collection mixed = mix_collections(parts, n, rule, c);
        // the same union assembled by hand
        Collection manual;
        for (const auto& [col, prior] : parts)
            for (CandidateNet net : col) {
                net.weight += prior;
                const double D = net.dim_bound(1.0);
                net.eta_bar = std::max(net.eta_bar, rule.scale * std::max(std::sqrt(D / n), std::sqrt(net.weight / n)));
                manual.push_back(std::move(net));
            }
        const auto truth = IntensitySurface::power_law(1.0 + rng.uniform(), 0.5 * rng.uniform());
        const auto smp = simulate(truth, X, T01, 400000 + draw);
        SelectionConfig cfg;
        cfg.tie_seed = draw;
        cfg.penalty = draw % 2 ? PenaltyForm::literal : PenaltyForm::squared;
        const std::string a = run_selection(mixed, smp, X, T01, cfg).to_json(true).dump();
        const std::string b = run_selection(manual, smp, X, T01, cfg).to_json(true).dump();
        identical += a == b ? 1 : 0;
    }
    o.require(identical == 10, "identical results " + std::to_string(identical) + "/10");
    o.detail << (o.pass ? "" : "; ") << identical << "/10 draws bit-identical";
    return o;
}

struct Criterion {
    int id;
    const char* name;
    double limit_seconds;
    Outcome (*run)();
};

}  // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> all = {
        {1, "closed-form identities", 10, criterion1},
        {2, "assumption brackets", 10, criterion2},
        {3, "concentration", 120, criterion3},
        {4, "test error", 120, criterion4},
        {5, "net certification", 60, criterion5},
        {6, "eta solver", 1e9, criterion6},
        {7, "selection consistency", 1e9, criterion7},
        {8, "rate trends", 900, criterion8},
        {9, "mixing coherence", 1e9, criterion9},
    };
    std::set<int> only;
    for (int k = 1; k < argc; ++k) only.insert(std::atoi(argv[k]));
    bool ok = true;
    for (const auto& c : all) {
        if (!only.empty() && !only.count(c.id)) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = c.run();
        } catch (const std::exception& e) {
            out.require(false, std::string("exception: ") + e.what());
        }
        const double secs = seconds_since(t0);
        out.require(secs < c.limit_seconds, "runtime " + num(secs) + " s over " + num(c.limit_seconds));
        ok = ok && out.pass;
        std::cout << (out.pass ? "PASS" : "FAIL") << " criterion " << c.id << " (" << c.name << ", " << num(secs)
                  << " s): " << out.detail.str() << std::endl;
    }
    return ok ? 0 : 1;
}
