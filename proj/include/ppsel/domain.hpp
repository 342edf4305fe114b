#pragma once

#include <Eigen/Dense>

namespace ppsel {

// Observation window T with its reference measure. Either an interval with
// Lebesgue measure or a single atom of mass one (count regression).
struct TimeDomain {
    double t_min = 0.0;
    double t_max = 1.0;
    bool truncated = false;
    bool point_mass = false;

    static TimeDomain interval(double lo, double hi, bool truncated = false);
    static TimeDomain atom(double t0);

    double measure() const { return point_mass ? 1.0 : t_max - t_min; }
};

// Covariates x_1..x_n, one row per process, all inside the closed unit ball.
struct CovariateSet {
    Eigen::MatrixXd x;

    CovariateSet() = default;
    explicit CovariateSet(Eigen::MatrixXd rows);

    int n() const { return static_cast<int>(x.rows()); }
    int dim() const { return static_cast<int>(x.cols()); }

    // n points (i + 1/2)/n on the segment [0, 1].
    static CovariateSet grid_1d(int n);
    // n processes without covariates.
    static CovariateSet none(int n);
};

}  // namespace ppsel
