#pragma once

#include <Eigen/Dense>
#include <functional>

#include "ppsel/atoms.hpp"
#include "ppsel/domain.hpp"
#include "ppsel/functions.hpp"
#include "ppsel/quadrature.hpp"

namespace ppsel {

// H^2(u, v) = (1/2n) sum_i int (sqrt u - sqrt v)^2 dmu. Uses elementary
// moments when both surfaces are parametric, the quadrature rule otherwise.
double hellinger_sq(const IntensitySurface& u, const IntensitySurface& v, const CovariateSet& X, const TimeDomain& T,
                    const QuadratureRule& Q);
// Same quantity evaluated pointwise on the quadrature nodes for every process.
double hellinger_sq_quadrature(const IntensitySurface& u, const IntensitySurface& v, const CovariateSet& X,
                               const QuadratureRule& Q);

// || f - g ||_{L2(mu)}
double l2_time(const std::function<double(double)>& f, const std::function<double(double)>& g,
               const QuadratureRule& Q);
// || a - b ||_{L2(nu_n)} for factors given by their values at x_1..x_n.
double l2_cov(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

// sqrt((1/n) sum_i int (f(t, x_i) - g(t, x_i))^2 dmu) for roots f, g.
double l2_dist_joint(const SqrtFunction& f, const SqrtFunction& g, const CovariateSet& X, const QuadratureRule& Q);

// Unit-norm versions of a factor with the same direction. Power atoms carry
// no amplitude and are rejected; std::domain_error on a zero factor.
TimeAtom normalize_time(const TimeAtom& f, const QuadratureRule& Q);
Eigen::VectorXd normalize_cov(const Eigen::VectorXd& g);

// d2(k f g, k' f' g') from kappas and factor distances, unit-norm factors.
double product_distance(double kappa, double kappa2, double d_time, double d_cov);
// Direct evaluation of the same distance on T x X.
double product_l2_distance(double kappa, const TimeAtom& f, const Eigen::VectorXd& g, double kappa2,
                           const TimeAtom& f2, const Eigen::VectorXd& g2, const QuadratureRule& Q);

// Squared L2 distance between t^b/||t^b|| and t^b'/||t^b'|| on (0, 1].
double powerlaw_normalized_sqdist(double b, double b2);
// Same for t^{k/2} e^{-b t} on [0, inf).
double expfamily_normalized_sqdist(double b, double b2, int k);

// int_0^1 (a t^b - a' t^b')^2 dt
double duane_sqdist(double a, double b, double a2, double b2);
// int_0^1 (t^b - t^b')^2 dt = 2 (b-b')^2 / ((1+2b)(1+b+b')(1+2b'))
double power_diff_sqnorm(double b, double b2);
// int_0^inf (a t^{k/2} e^{-b t} - a' t^{k/2} e^{-b' t})^2 dt for any k >= 0
double expdecay_sqdist(double a, double b, double a2, double b2, int k);
// int_0^inf t^k (e^{-b t} - e^{-b' t})^2 dt in its factored form, k in {0, 1}
double expdecay_rate_sqdist(double b, double b2, int k);

// Lipschitz bounds on parameter boxes.
// theta in [-r1, r1] x [-1/2 + 1/r2, inf)
double duane_lipschitz_bound(double d_theta1, double d_theta2, double r1, double r2);
// theta in [-r1, r1] x [1/r2, inf), k in {0, 1}
double expdecay_lipschitz_bound(double d_theta1, double d_theta2, int k, double r1, double r2);
double expdecay_c1(int k, double r2);
double expdecay_c2(int k, double r1, double r2);

}  // namespace ppsel
