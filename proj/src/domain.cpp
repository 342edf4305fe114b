#include "ppsel/domain.hpp"
#include "ppsel/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace ppsel {

TimeDomain TimeDomain::interval(double lo, double hi, bool truncated) {
    if (!(hi > lo)) throw std::invalid_argument("time domain needs t_min < t_max");
    TimeDomain T;
    T.t_min = lo;
    T.t_max = hi;
    T.truncated = truncated;
    return T;
}

TimeDomain TimeDomain::atom(double t0) {
    TimeDomain T;
    T.t_min = t0;
    T.t_max = t0;
    T.point_mass = true;
    return T;
}

CovariateSet::CovariateSet(Eigen::MatrixXd rows) : x(std::move(rows)) {
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        if (x.row(i).norm() > 1.0 + 1e-12) throw std::invalid_argument("covariate outside the unit ball");
    }
}

CovariateSet CovariateSet::grid_1d(int n) {
    Eigen::MatrixXd m(n, 1);
    for (int i = 0; i < n; ++i) m(i, 0) = (i + 0.5) / n;
    return CovariateSet(std::move(m));
}

CovariateSet CovariateSet::none(int n) { return CovariateSet(Eigen::MatrixXd(n, 0)); }

namespace {

Eigen::Index simpson_intervals(double length, int nodes_per_unit) {
    if (nodes_per_unit < 3) throw std::invalid_argument("need at least 3 nodes per unit");
    auto m = static_cast<Eigen::Index>(std::ceil((nodes_per_unit - 1) * length - 1e-9));
    if (m < 2) m = 2;
    if (m % 2) ++m;
    return m;
}

Eigen::VectorXd simpson_weights(Eigen::Index m, double h) {
    Eigen::VectorXd w(m + 1);
    for (Eigen::Index k = 0; k <= m; ++k) w[k] = (k == 0 || k == m) ? 1.0 : (k % 2 ? 4.0 : 2.0);
    return w * (h / 3.0);
}

}  // namespace

QuadratureRule simpson_rule(const TimeDomain& T, int nodes_per_unit) {
    QuadratureRule Q;
    if (T.point_mass) {
        Q.nodes = Eigen::VectorXd::Constant(1, T.t_min);
        Q.weights = Eigen::VectorXd::Ones(1);
        return Q;
    }
    const double L = T.t_max - T.t_min;
    const Eigen::Index m = simpson_intervals(L, nodes_per_unit);
    Q.nodes = Eigen::VectorXd::LinSpaced(m + 1, T.t_min, T.t_max);
    Q.weights = simpson_weights(m, L / static_cast<double>(m));
    return Q;
}

QuadratureRule graded_rule(const TimeDomain& T, int nodes_per_unit) {
    if (T.point_mass) return simpson_rule(T, nodes_per_unit);
    const double L = T.t_max - T.t_min;
    const Eigen::Index m = simpson_intervals(L, nodes_per_unit);
    const Eigen::VectorXd wu = simpson_weights(m, 1.0 / static_cast<double>(m));
    QuadratureRule Q;
    Q.nodes.resize(m);
    Q.weights.resize(m);
    for (Eigen::Index k = 1; k <= m; ++k) {
        const double u = static_cast<double>(k) / static_cast<double>(m);
        const double u3 = u * u * u;
        Q.nodes[k - 1] = T.t_min + L * u3 * u;
        Q.weights[k - 1] = wu[k] * 4.0 * u3 * L;
    }
    return Q;
}

QuadratureRule gauss_rule(const TimeDomain& T, int cells, int points) {
    if (T.point_mass) return simpson_rule(T);
    if (cells < 1 || points < 1 || points > 5) throw std::domain_error("gauss rule needs cells >= 1, points in 1..5");
    static const double x[5][5] = {{0.0},
                                   {-0.57735026918962576, 0.57735026918962576},
                                   {-0.77459666924148338, 0.0, 0.77459666924148338},
                                   {-0.86113631159405258, -0.33998104358485626, 0.33998104358485626,
                                    0.86113631159405258},
                                   {-0.90617984593866399, -0.53846931010568309, 0.0, 0.53846931010568309,
                                    0.90617984593866399}};
    static const double w[5][5] = {{2.0},
                                   {1.0, 1.0},
                                   {0.55555555555555556, 0.88888888888888889, 0.55555555555555556},
                                   {0.34785484513745386, 0.65214515486254614, 0.65214515486254614,
                                    0.34785484513745386},
                                   {0.23692688505618909, 0.47862867049936647, 0.56888888888888889,
                                    0.47862867049936647, 0.23692688505618909}};
    const double h = (T.t_max - T.t_min) / cells;
    QuadratureRule Q;
    Q.nodes.resize(static_cast<Eigen::Index>(cells) * points);
    Q.weights.resize(Q.nodes.size());
    for (int c = 0; c < cells; ++c) {
        const double mid = T.t_min + (c + 0.5) * h;
        for (int k = 0; k < points; ++k) {
            const Eigen::Index idx = static_cast<Eigen::Index>(c) * points + k;
            Q.nodes[idx] = mid + 0.5 * h * x[points - 1][k];
            Q.weights[idx] = 0.5 * h * w[points - 1][k];
        }
    }
    return Q;
}

}  // namespace ppsel
