#include "ppsel/tests_engine.hpp"

#include <cmath>
#include <stdexcept>

#include "ppsel/geometry.hpp"
#include "ppsel/rng.hpp"

namespace ppsel {

namespace {

void fill_shared(TestConstants& c) {
    const double s2 = std::sqrt(2.0);
    c.C = (8.0 - 5.0 * s2) / 16.0;
    c.C_prime = 9.0 * s2 * (17.0 / 16.0) + c.C;
    c.kappa = 4.0;
}

// (sqrt f' - sqrt f)/sqrt(f + f') from roots, 0/0 = 0
double event_ratio(double r, double r2) {
    const double den = std::sqrt(r * r + r2 * r2);
    return den > 0.0 ? (r2 - r) / den : 0.0;
}

}  // namespace

TestConstants TestConstants::paper_faithful() {
    TestConstants c;
    fill_shared(c);
    c.mode = ConstantsMode::paper_faithful;
    c.a = 3.0 * c.C * c.C / (std::sqrt(2.0) * c.C_prime);
    c.b = c.C * c.C_prime / (2.0 * c.C_prime - c.C);
    return c;
}

TestConstants TestConstants::calibrated() {
    TestConstants c;
    fill_shared(c);
    c.mode = ConstantsMode::calibrated;
    c.a = 0.5;
    c.b = 0.5;
    return c;
}

TestConstants TestConstants::from_name(const std::string& name) {
    if (name == "paper" || name == "paper_faithful") return paper_faithful();
    if (name == "calibrated") return calibrated();
    throw std::invalid_argument("unknown constants mode: " + name);
}

std::string TestConstants::name() const {
    return mode == ConstantsMode::paper_faithful ? "paper_faithful" : "calibrated";
}

double zeta(double x, double y) {
    const double s = x + y;
    if (s <= 0.0) return 0.0;
    return (std::sqrt(y / s) - std::sqrt(x / s)) / std::sqrt(2.0);
}

double test_statistic(const IntensitySurface& f, const IntensitySurface& f2, const ProcessSample& sample,
                      const CovariateSet& X, const TimeDomain& T, const QuadratureRule& Q) {
    (void)T;
    const int n = X.n();
    if (sample.n() != n) throw std::invalid_argument("sample and covariates disagree on n");
    double mu_part = 0.0, dn_part = 0.0;
    for (int i = 0; i < n; ++i) {
        mu_part += Q.integrate([&](double t) {
            const double r = f.root(t, i, X), r2 = f2.root(t, i, X);
            const double u = r * r, v = r2 * r2;
            return 0.5 * std::sqrt(0.5 * (u + v)) * (r2 - r) - 0.5 * (v - u);
        });
        for (double t : sample.events[static_cast<std::size_t>(i)])
            dn_part += event_ratio(f.root(t, i, X), f2.root(t, i, X));
    }
    return (mu_part + dn_part / std::sqrt(2.0)) / n;
}

Claim1Bounds claim1_bounds(const IntensitySurface& s, const IntensitySurface& f, const IntensitySurface& f2,
                           const CovariateSet& X, const TimeDomain& T, const QuadratureRule& Q) {
    const double hsf = hellinger_sq(s, f, X, T, Q);
    const double hsf2 = hellinger_sq(s, f2, X, T, Q);
    const double hff = hellinger_sq(f, f2, X, T, Q);
    const double r = 1.0 / std::sqrt(2.0);
    return {(1.0 + r) * hsf - (1.0 - r) * hsf2, hsf + hsf2 + hff};
}

double bennett_h(double u) { return u == 0.0 ? 0.0 : (1.0 + u) * std::log1p(u) - u; }

namespace {
void check_tail_args(double rho, double upsilon, double r, int n) {
    if (!(rho > 0.0) || !(upsilon > 0.0) || !(r >= 0.0) || n < 1)
        throw std::domain_error("tail bound needs rho > 0, upsilon > 0, r >= 0, n >= 1");
}
}  // namespace

double bennett_bound(double rho, double upsilon, double r, int n) {
    check_tail_args(rho, upsilon, r, n);
    return std::exp(-n * (upsilon / (rho * rho)) * bennett_h(rho * r / upsilon));
}

double bernstein_bound(double rho, double upsilon, double r, int n) {
    check_tail_args(rho, upsilon, r, n);
    return std::exp(-n * r * r / (2.0 * (upsilon + rho * r / 3.0)));
}

double bennett_tail_bound(double rho, double upsilon, double r, int n) {
    return std::min(bennett_bound(rho, upsilon, r, n), bernstein_bound(rho, upsilon, r, n));
}

bool tie_prefers_second(std::uint64_t tie_seed, const std::string& id_first, const std::string& id_second) {
    const bool ordered = id_first <= id_second;
    const std::string& lo = ordered ? id_first : id_second;
    const std::string& hi = ordered ? id_second : id_first;
    const std::uint64_t h = hash_combine(hash_string(lo, tie_seed), hash_string(hi, ~tie_seed));
    const bool prefers_hi = (h >> 63) != 0;
    return ordered ? prefers_hi : !prefers_hi;
}

TestOutcome decide(double statistic, double z, const TestConstants& c, std::uint64_t tie_seed,
                   const std::string& id_first, const std::string& id_second) {
    TestOutcome o;
    o.statistic = statistic;
    o.threshold = c.b * z;
    if (statistic > o.threshold) {
        o.accepts_second = true;
    } else if (statistic == o.threshold) {
        o.tie = true;
        o.accepts_second = tie_prefers_second(tie_seed, id_first, id_second);
    }
    return o;
}

TestOutcome run_test(const IntensitySurface& f, const IntensitySurface& f2, double z, const ProcessSample& sample,
                     const CovariateSet& X, const TimeDomain& T, const QuadratureRule& Q, const TestConstants& c,
                     std::uint64_t tie_seed) {
    const double stat = test_statistic(f, f2, sample, X, T, Q);
    return decide(stat, z, c, tie_seed, descriptor(f.root_function()), descriptor(f2.root_function()));
}

}  // namespace ppsel
