#include "ppsel/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

namespace ppsel {

namespace {

struct MergedPiece {
    int begin, end;
    int a;
    double s;
    int b;
    double s2;
};

std::vector<MergedPiece> merge(const std::vector<Segment>& u, const std::vector<Segment>& v) {
    std::vector<MergedPiece> out;
    std::size_t i = 0, j = 0;
    int pos = 0;
    while (i < u.size() && j < v.size()) {
        const int end = std::min(u[i].end, v[j].end);
        out.push_back({pos, end, u[i].atom, u[i].scale, v[j].atom, v[j].scale});
        pos = end;
        if (u[i].end == end) ++i;
        if (v[j].end == end) ++j;
    }
    return out;
}

std::optional<double> closed_sqdist(const TimeAtom& a, double s, const TimeAtom& b, double s2, const TimeDomain& T) {
    const auto* pa = std::get_if<PowerExpAtom>(&a);
    const auto* pb = std::get_if<PowerExpAtom>(&b);
    if (!pa || !pb || T.point_mass) return std::nullopt;
    auto m1 = power_exp_moment(2.0 * pa->p, 2.0 * pa->q, T.t_min, T.t_max);
    auto m2 = power_exp_moment(2.0 * pb->p, 2.0 * pb->q, T.t_min, T.t_max);
    auto m12 = power_exp_moment(pa->p + pb->p, pa->q + pb->q, T.t_min, T.t_max);
    if (!m1 || !m2 || !m12) return std::nullopt;
    return std::max(0.0, s * s * *m1 + s2 * s2 * *m2 - 2.0 * s * s2 * *m12);
}

double quad_sqdist(const TimeAtom& a, double s, const TimeAtom& b, double s2, const QuadratureRule& Q) {
    return Q.integrate([&](double t) {
        const double d = s * std::abs(atom_value(a, t)) - s2 * std::abs(atom_value(b, t));
        return d * d;
    });
}

}  // namespace

double hellinger_sq(const IntensitySurface& u, const IntensitySurface& v, const CovariateSet& X, const TimeDomain& T,
                    const QuadratureRule& Q) {
    AtomTable atoms;
    const auto lu = layout(u.root_function(), X, atoms);
    const auto lv = layout(v.root_function(), X, atoms);
    double acc = 0.0;
    for (const auto& p : merge(lu, lv)) {
        const TimeAtom& a = atoms[p.a];
        const TimeAtom& b = atoms[p.b];
        double d;
        if (p.a == p.b) {
            const double base = closed_sqdist(a, 1.0, a, 0.0, T).value_or(quad_sqdist(a, 1.0, a, 0.0, Q));
            d = (p.s - p.s2) * (p.s - p.s2) * base;
        } else {
            d = closed_sqdist(a, p.s, b, p.s2, T).value_or(quad_sqdist(a, p.s, b, p.s2, Q));
        }
        acc += (p.end - p.begin) * d;
    }
    return 0.5 * acc / X.n();
}

double hellinger_sq_quadrature(const IntensitySurface& u, const IntensitySurface& v, const CovariateSet& X,
                               const QuadratureRule& Q) {
    double acc = 0.0;
    for (int i = 0; i < X.n(); ++i) {
        acc += Q.integrate([&](double t) {
            const double d = u.root(t, i, X) - v.root(t, i, X);
            return d * d;
        });
    }
    return 0.5 * acc / X.n();
}

double l2_time(const std::function<double(double)>& f, const std::function<double(double)>& g,
               const QuadratureRule& Q) {
    return std::sqrt(Q.integrate([&](double t) {
        const double d = f(t) - g(t);
        return d * d;
    }));
}

double l2_cov(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    if (a.size() != b.size() || a.size() == 0) throw std::invalid_argument("covariate factors differ in length");
    return std::sqrt((a - b).squaredNorm() / static_cast<double>(a.size()));
}

double l2_dist_joint(const SqrtFunction& f, const SqrtFunction& g, const CovariateSet& X, const QuadratureRule& Q) {
    const int n = X.n();
    if (n == 0) throw std::invalid_argument("no processes");
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
        acc += Q.integrate([&](double t) {
            const double d = root_value(f, t, i, X) - root_value(g, t, i, X);
            return d * d;
        });
    }
    return std::sqrt(acc / n);
}

TimeAtom normalize_time(const TimeAtom& f, const QuadratureRule& Q) {
    if (const auto* d = std::get_if<DyadicPolyAtom>(&f)) {
        // orthonormal basis: the norm is the coefficient norm
        const double nrm = d->coef.norm();
        if (!(nrm > 0.0)) throw std::domain_error("cannot normalize a zero factor");
        DyadicPolyAtom out = *d;
        out.coef /= nrm;
        return out;
    }
    if (const auto* g = std::get_if<GridAtom>(&f)) {
        const double nrm = std::sqrt(Q.integrate([&](double t) {
            const double v = atom_value(f, t);
            return v * v;
        }));
        if (!(nrm > 0.0)) throw std::domain_error("cannot normalize a zero factor");
        return make_grid_atom(g->lo, g->hi, *g->values / nrm);
    }
    throw std::invalid_argument("power atoms carry no amplitude");
}

Eigen::VectorXd normalize_cov(const Eigen::VectorXd& g) {
    if (g.size() == 0) throw std::invalid_argument("empty covariate factor");
    const double nrm = std::sqrt(g.squaredNorm() / static_cast<double>(g.size()));
    if (!(nrm > 0.0)) throw std::domain_error("cannot normalize a zero factor");
    return g / nrm;
}

double product_distance(double kappa, double kappa2, double d_time, double d_cov) {
    const double t2 = d_time * d_time, x2 = d_cov * d_cov;
    const double d2 = (kappa - kappa2) * (kappa - kappa2) + kappa * kappa2 * (t2 + x2 - 0.5 * t2 * x2);
    return std::sqrt(std::max(0.0, d2));
}

double product_l2_distance(double kappa, const TimeAtom& f, const Eigen::VectorXd& g, double kappa2,
                           const TimeAtom& f2, const Eigen::VectorXd& g2, const QuadratureRule& Q) {
    if (g.size() != g2.size()) throw std::invalid_argument("covariate factors differ in length");
    Eigen::VectorXd fv(Q.size()), fv2(Q.size());
    for (Eigen::Index k = 0; k < Q.size(); ++k) {
        fv[k] = kappa * atom_value(f, Q.nodes[k]);
        fv2[k] = kappa2 * atom_value(f2, Q.nodes[k]);
    }
    double acc = 0.0;
    for (Eigen::Index i = 0; i < g.size(); ++i) {
        acc += Q.weights.dot((fv * g[i] - fv2 * g2[i]).cwiseAbs2());
    }
    return std::sqrt(acc / static_cast<double>(g.size()));
}

double powerlaw_normalized_sqdist(double b, double b2) {
    if (b <= -0.5 || b2 <= -0.5) throw std::domain_error("power exponent must exceed -1/2");
    const double s = std::sqrt(2.0 * b + 1.0) + std::sqrt(2.0 * b2 + 1.0);
    return 4.0 * (b - b2) * (b - b2) / ((1.0 + b + b2) * s * s);
}

double expfamily_normalized_sqdist(double b, double b2, int k) {
    if (b <= 0.0 || b2 <= 0.0 || k < 0) throw std::domain_error("exponential rates must be positive");
    const double ratio = 2.0 * std::sqrt(b * b2) / (b + b2);
    return 2.0 * (1.0 - std::pow(ratio, k + 1));
}

double duane_sqdist(double a, double b, double a2, double b2) {
    if (b <= -0.5 || b2 <= -0.5) throw std::domain_error("power exponent must exceed -1/2");
    return a * a / (2.0 * b + 1.0) + a2 * a2 / (2.0 * b2 + 1.0) - 2.0 * a * a2 / (b + b2 + 1.0);
}

double power_diff_sqnorm(double b, double b2) {
    return 2.0 * (b - b2) * (b - b2) / ((1.0 + 2.0 * b) * (1.0 + b + b2) * (1.0 + 2.0 * b2));
}

double expdecay_sqdist(double a, double b, double a2, double b2, int k) {
    if (b <= 0.0 || b2 <= 0.0 || k < 0) throw std::domain_error("exponential rates must be positive");
    const double kf = std::tgamma(k + 1.0);
    return kf * (a * a / std::pow(2.0 * b, k + 1) + a2 * a2 / std::pow(2.0 * b2, k + 1) -
                 2.0 * a * a2 / std::pow(b + b2, k + 1));
}

double expdecay_rate_sqdist(double b, double b2, int k) {
    const double d = b - b2;
    if (k == 0) return d * d / (2.0 * b * b2 * (b + b2));
    if (k == 1) return (b2 * b2 + 4.0 * b * b2 + b * b) * d * d / (4.0 * b * b * b2 * b2 * (b + b2) * (b + b2));
    throw std::domain_error("factored form only for k in {0, 1}");
}

double duane_lipschitz_bound(double d1, double d2, double r1, double r2) {
    return std::sqrt(r2) * std::abs(d1) + std::sqrt(2.0) * r1 * std::pow(r2, 1.5) * std::abs(d2);
}

double expdecay_c1(int k, double r2) {
    if (k == 0) return std::sqrt(r2 / 2.0);
    if (k == 1) return r2 / 2.0;
    throw std::domain_error("Lipschitz constants only for k in {0, 1}");
}

double expdecay_c2(int k, double r1, double r2) {
    if (k == 0) return r1 * std::pow(r2, 1.5) / 2.0;
    if (k == 1) return std::sqrt(3.0 / 8.0) * r1 * r2 * r2;
    throw std::domain_error("Lipschitz constants only for k in {0, 1}");
}

double expdecay_lipschitz_bound(double d1, double d2, int k, double r1, double r2) {
    return expdecay_c1(k, r2) * std::abs(d1) + expdecay_c2(k, r1, r2) * std::abs(d2);
}

}  // namespace ppsel
