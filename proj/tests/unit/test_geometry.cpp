#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "ppsel/geometry.hpp"
#include "ppsel/rng.hpp"

using namespace ppsel;

namespace {
const TimeDomain T01 = TimeDomain::interval(0.0, 1.0);
}

TEST_CASE("hellinger distance examples") {
    const CovariateSet X = CovariateSet::none(4);
    const QuadratureRule Q = simpson_rule(T01);
    const auto one = IntensitySurface::constant(1.0), four = IntensitySurface::constant(4.0);
    CHECK(hellinger_sq(one, one, X, T01, Q) == 0.0);
    CHECK(hellinger_sq(one, four, X, T01, Q) == doctest::Approx(0.5).epsilon(1e-14));

    const double oracle = 0.5 * oracle::integrate([](double t) { return std::pow(1 - std::sqrt(t), 2); }, 0, 1);
    CHECK(oracle == doctest::Approx(1.0 / 12.0).epsilon(1e-12));
    const auto u = IntensitySurface::power_law(1, 0), v = IntensitySurface::power_law(1, 1);
    CHECK(hellinger_sq(u, v, X, T01, Q) == doctest::Approx(oracle).epsilon(1e-6));
    CHECK(hellinger_sq(u, v, X, T01, Q) == hellinger_sq(v, u, X, T01, Q));
}

TEST_CASE("joint L2 distance is twice the squared Hellinger distance") {
    const CovariateSet X = CovariateSet::grid_1d(7);
    const QuadratureRule Q = graded_rule(T01, 2049);
    const auto u = IntensitySurface::product_exp(1.5, 0.5, 0.3, Eigen::VectorXd::Constant(1, 0.7));
    const auto v = IntensitySurface::product_exp(0.9, 1.0, 0.0, Eigen::VectorXd::Constant(1, -0.4));
    const double d = l2_dist_joint(u.root_function(), v.root_function(), X, Q);
    CHECK(d * d == doctest::Approx(2 * hellinger_sq(u, v, X, T01, Q)).epsilon(1e-10));
}

TEST_CASE("factor distances") {
    const QuadratureRule Q = gauss_rule(T01, 8, 4);
    // two orthonormal Legendre factors on [0,1]
    auto f = [](double) { return 1.0; };
    auto g = [](double t) { return std::sqrt(3.0) * (2 * t - 1); };
    CHECK(l2_time(f, g, Q) * l2_time(f, g, Q) == doctest::Approx(2.0).epsilon(1e-13));
    SplitMix64 rng(3);
    Eigen::VectorXd a(9), b(9);
    for (int i = 0; i < 9; ++i) a[i] = rng.normal(), b[i] = rng.normal();
    double acc = 0;
    for (int i = 0; i < 9; ++i) acc += (a[i] - b[i]) * (a[i] - b[i]);
    CHECK(l2_cov(a, b) == doctest::Approx(std::sqrt(acc / 9)).epsilon(1e-12));
}

TEST_CASE("product distance identity special cases") {
    CHECK(product_distance(1.3, 1.3, 0.0, 0.0) == 0.0);
    const double k = 1.3, k2 = 0.4;
    CHECK(product_distance(k, k2, std::sqrt(2.0), 0.0) == doctest::Approx(std::sqrt(k * k + k2 * k2)));
}

TEST_CASE("normalization of factors") {
    const QuadratureRule Q = gauss_rule(T01, 4, 4);
    DyadicPolyAtom two{0, 1, 0, 0, Eigen::VectorXd::Constant(1, 2.0)};
    const TimeAtom n2 = normalize_time(two, Q);
    CHECK(atom_value(n2, 0.3) == doctest::Approx(1.0));

    Eigen::VectorXd vals(101);
    for (int k = 0; k <= 100; ++k) vals[k] = k / 100.0;
    const TimeAtom lin = normalize_time(make_grid_atom(0, 1, vals), gauss_rule(T01, 100, 2));
    CHECK(atom_value(lin, 0.5) == doctest::Approx(std::sqrt(3.0) * 0.5).epsilon(1e-12));

    DyadicPolyAtom zero{0, 1, 0, 0, Eigen::VectorXd::Zero(1)};
    CHECK_THROWS_AS(normalize_time(zero, Q), std::domain_error);
    CHECK_THROWS_AS(normalize_cov(Eigen::VectorXd::Zero(4)), std::domain_error);
    const Eigen::VectorXd g = normalize_cov(Eigen::VectorXd::Constant(4, 3.0));
    CHECK(g[2] == doctest::Approx(1.0));
}

TEST_CASE("normalized profile distances") {
    CHECK(powerlaw_normalized_sqdist(0.0, 1.5) == doctest::Approx(0.4).epsilon(1e-14));
    CHECK(expfamily_normalized_sqdist(1.0, 4.0, 0) == doctest::Approx(0.4).epsilon(1e-14));
    CHECK(powerlaw_normalized_sqdist(0.7, 0.7) == 0.0);
}

TEST_CASE("parametric squared distances against quadrature") {
    const double a = 1.4, b = -0.2, a2 = 0.8, b2 = 0.9;
    const double duane = oracle::integrate(
        [&](double t) { return std::pow(a * std::pow(t, b) - a2 * std::pow(t, b2), 2); }, 0, 1);
    CHECK(duane_sqdist(a, b, a2, b2) == doctest::Approx(duane).epsilon(1e-9));
    for (int k : {0, 1, 2}) {
        const double ed = oracle::integrate_inf(
            [&](double t) {
                const double p = std::pow(t, 0.5 * k);
                return std::pow(a * p * std::exp(-1.3 * t) - a2 * p * std::exp(-0.6 * t), 2);
            },
            0);
        CHECK(expdecay_sqdist(a, 1.3, a2, 0.6, k) == doctest::Approx(ed).epsilon(1e-9));
    }
}
