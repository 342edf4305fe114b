#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "oracles.hpp"
#include "ppsel/geometry.hpp"
#include "ppsel/selector.hpp"

using namespace ppsel;

namespace {
const TimeDomain T01 = TimeDomain::interval(0.0, 1.0);

CandidateNet explicit_net(std::string label, std::vector<SqrtFunction> c, double eta_bar, double weight = 1.0) {
    CandidateNet net;
    net.label = std::move(label);
    net.candidates = std::move(c);
    net.eta_bar = eta_bar;
    net.weight = weight;
    return net;
}

ParametricRoot par(double a, double b = 0.0, double r = 0.0) { return {a, b, r}; }
}  // namespace

TEST_CASE("eta_bar takes the smallest containing radius") {
    const Collection nets = {explicit_net("A", {par(1), par(2)}, 0.3), explicit_net("B", {par(2), par(3)}, 0.2)};
    CHECK(eta_bar_of(par(1), nets) == 0.3);
    CHECK(eta_bar_of(par(2), nets) == 0.2);
    CHECK_THROWS(eta_bar_of(par(7), nets));
    const CandidateTable t = unify(nets);
    CHECK(t.functions.size() == 3);
}

TEST_CASE("single candidate needs no tests") {
    const CovariateSet X = CovariateSet::none(5);
    const auto smp = simulate(IntensitySurface::constant(1.0), X, T01, 1);
    const auto res = run_selection({explicit_net("A", {par(1.3)}, 0.1)}, smp, X, T01, {});
    CHECK(res.chosen == 0);
    CHECK(res.tests_run == 0);
    CHECK(res.gamma[0] == 0.0);
}

TEST_CASE("configuration checks") {
    SelectionConfig c;
    c.epsilon = 0.0;
    CHECK_THROWS(c.validate());
    c.epsilon = 4.0;
    CHECK_NOTHROW(c.validate());
    c.epsilon = 4.5;
    CHECK_THROWS(c.validate());
    const CovariateSet X = CovariateSet::none(2);
    const auto smp = simulate(IntensitySurface::constant(1.0), X, T01, 1);
    CHECK_THROWS(run_selection({}, smp, X, T01, {}));
    // weights with sum exp(-w) > 1
    const Collection heavy = {explicit_net("A", {par(1)}, 0.1, 0.0), explicit_net("B", {par(2)}, 0.1, 0.0)};
    CHECK_THROWS(run_selection(heavy, smp, X, T01, {}));
}

TEST_CASE("pair engine agrees with the reference statistic") {
    const CovariateSet X = CovariateSet::none(8);
    const auto smp = simulate(IntensitySurface::power_law(3.0, 0.5), X, T01, 12);
    const std::vector<SqrtFunction> c = {par(1.2, 0.1), par(2.0, 0.5, 0.3), par(0.7, 0.0, 1.0), par(1.7, 0.25)};
    const QuadratureRule Q = simpson_rule(T01, 2049);
    const PairTables pt = pair_tables(c, smp, X, T01, Q);
    for (std::size_t i = 0; i < c.size(); ++i)
        for (std::size_t j = 0; j < c.size(); ++j) {
            const auto fi = IntensitySurface::square_of(c[i]), fj = IntensitySurface::square_of(c[j]);
            const double ref = test_statistic(fi, fj, smp, X, T01, Q);
            CHECK(pt.statistics(i, j) == doctest::Approx(ref).epsilon(1e-10));
            CHECK(pt.hellinger(i, j) == doctest::Approx(hellinger_sq(fi, fj, X, T01, Q)).epsilon(1e-10));
        }
}

TEST_CASE("candidate order does not change the chosen function") {
    const CovariateSet X = CovariateSet::none(40);
    const auto smp = simulate(IntensitySurface::constant(2.0), X, T01, 8);
    std::vector<SqrtFunction> c = {par(1.0), par(std::sqrt(2.0)), par(2.0), par(1.2, 0.3), par(1.5, 0.0, 0.4)};
    const auto a = run_selection({explicit_net("A", c, 0.2)}, smp, X, T01, {});
    std::reverse(c.begin(), c.end());
    const auto b = run_selection({explicit_net("A", c, 0.2)}, smp, X, T01, {});
    CHECK(a.chosen_id == b.chosen_id);
}

TEST_CASE("gamma is the worst distance over the rejecting set") {
    const CovariateSet X = CovariateSet::none(20);
    const auto smp = simulate(IntensitySurface::constant(1.0), X, T01, 31);
    const Collection nets = {explicit_net("A", {par(1.0), par(1.4), par(0.8, 0.2)}, 0.15, 2.0),
                             explicit_net("B", {par(2.0), par(1.1, 0.0, 0.5)}, 0.25, 2.0)};
    const auto res = run_selection(nets, smp, X, T01, {});
    for (Eigen::Index i = 0; i < res.gamma.size(); ++i) {
        double g = 0.0;
        for (int j : res.rejection_sets[static_cast<std::size_t>(i)]) g = std::max(g, res.hellinger(i, j));
        CHECK(res.gamma[i] == g);
        CHECK(res.objective[i] == std::max(res.gamma[i], res.eta_bar[i] * res.eta_bar[i]));
    }
    CHECK(res.objective[res.chosen] == res.objective.minCoeff());
}

TEST_CASE("mixing") {
    const CovariateSet X = CovariateSet::none(15);
    const auto smp = simulate(IntensitySurface::constant(1.5), X, T01, 2);
    const Collection A = {explicit_net("A", {par(1.0), par(1.3)}, 0.2, 1.0)};
    const Collection B = {explicit_net("B", {par(2.0)}, 0.3, 1.0)};
    CHECK_NOTHROW(mix_collections({{A, std::log(2.0)}, {B, std::log(2.0)}}));
    CHECK_THROWS_AS(mix_collections({{A, 0.5}, {B, 0.5}}), std::domain_error);
    const auto same = mix_collections({{A, 0.0}});
    CHECK(run_selection(same, smp, X, T01, {}).to_json().dump() == run_selection(A, smp, X, T01, {}).to_json().dump());
    const auto mixed = mix_collections({{A, std::log(2.0)}, {B, std::log(2.0)}});
    CHECK(mixed[0].weight == doctest::Approx(1.0 + std::log(2.0)));
    CHECK(collection_weight_sum(mixed) <= 1.0);
}

TEST_CASE("radius rules") {
    const auto c = TestConstants::calibrated();
    const auto D = DimensionBound::constant(2.0);
    CHECK(RadiusRule{RadiusRule::Kind::paper}(D, 1.0, 100, c) ==
          doctest::Approx(radius_from_weight(std::sqrt(0.02), 1.0, 100, c)));
    CHECK(RadiusRule{RadiusRule::Kind::scaled, 0.5}(D, 8.0, 100, c) == doctest::Approx(0.5 * std::sqrt(0.08)));
    CHECK(RadiusRule::from_name("scaled", 2.0).name() == "scaled");
}
