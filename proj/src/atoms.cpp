#include "ppsel/atoms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "ppsel/format.hpp"
#include "ppsel/rng.hpp"

namespace ppsel {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

int dyadic_cell(const DyadicPolyAtom& a, double t) {
    const int cells = 1 << a.depth;
    const double h = (a.hi - a.lo) / cells;
    int c = static_cast<int>(std::floor((t - a.lo) / h));
    return std::clamp(c, 0, cells - 1);
}

double power_exp_value(const PowerExpAtom& a, double t) {
    if (a.p == 0.0) return std::exp(-a.q * t);
    if (t == 0.0) return a.p > 0.0 ? 0.0 : kInf;
    return std::exp(a.p * std::log(t) - a.q * t);
}

bool is_integer(double m) { return m >= 0.0 && m == std::floor(m) && m < 64.0; }
bool is_half_integer(double m) {
    const double twice = 2.0 * m;
    return m >= -0.5 && twice == std::floor(twice) && std::fmod(twice, 2.0) != 0.0 && m < 64.0;
}

// t^m e^{-r t}, with the limit 0 at t = +inf for r > 0.
double term(double m, double r, double t) {
    if (std::isinf(t)) return 0.0;
    if (t == 0.0) return m == 0.0 ? 1.0 : 0.0;
    return std::exp(m * std::log(t) - r * t);
}

}  // namespace

GridAtom make_grid_atom(double lo, double hi, Eigen::VectorXd values) {
    if (values.size() < 2) throw std::invalid_argument("grid atom needs at least two values");
    GridAtom g;
    g.lo = lo;
    g.hi = hi;
    g.tag = hash_bytes(values.data(), sizeof(double) * static_cast<std::size_t>(values.size()),
                       hash_combine(std::hash<double>{}(lo), std::hash<double>{}(hi)));
    g.values = std::make_shared<const Eigen::VectorXd>(std::move(values));
    return g;
}

double legendre_orthonormal(int j, double s) {
    double p0 = 1.0, p1 = s;
    double pj = (j == 0) ? p0 : p1;
    for (int k = 2; k <= j; ++k) {
        pj = ((2.0 * k - 1.0) * s * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pj;
    }
    return std::sqrt((2.0 * j + 1.0) / 2.0) * pj;
}

double dyadic_basis(const DyadicPolyAtom& a, int cell, int j, double t) {
    const double h = (a.hi - a.lo) / (1 << a.depth);
    const double left = a.lo + cell * h;
    const double s = 2.0 * (t - left) / h - 1.0;
    return std::sqrt(2.0 / h) * legendre_orthonormal(j, s);
}

double atom_value(const TimeAtom& atom, double t) {
    return std::visit(
        [t](const auto& a) -> double {
            using A = std::decay_t<decltype(a)>;
            if constexpr (std::is_same_v<A, PowerExpAtom>) {
                return power_exp_value(a, t);
            } else if constexpr (std::is_same_v<A, DyadicPolyAtom>) {
                if (t < a.lo || t > a.hi) return 0.0;
                const int c = dyadic_cell(a, t);
                double v = 0.0;
                for (int j = 0; j <= a.degree; ++j) v += a.coef[c * (a.degree + 1) + j] * dyadic_basis(a, c, j, t);
                return v;
            } else {
                const Eigen::VectorXd& y = *a.values;
                if (t < a.lo || t > a.hi) return 0.0;
                const auto m = static_cast<double>(y.size() - 1);
                const double pos = (t - a.lo) / (a.hi - a.lo) * m;
                const auto k = std::min<Eigen::Index>(static_cast<Eigen::Index>(pos), y.size() - 2);
                const double w = pos - static_cast<double>(k);
                return (1.0 - w) * y[k] + w * y[k + 1];
            }
        },
        atom);
}

double atom_sup_abs(const TimeAtom& atom, double t0, double t1) {
    return std::visit(
        [t0, t1](const auto& a) -> double {
            using A = std::decay_t<decltype(a)>;
            if constexpr (std::is_same_v<A, PowerExpAtom>) {
                if (a.p < 0.0 && t0 <= 0.0) return kInf;
                double best = std::max(power_exp_value(a, t0), std::isinf(t1) ? 0.0 : power_exp_value(a, t1));
                if (a.q != 0.0) {
                    const double ts = a.p / a.q;
                    if (ts > t0 && ts < t1) best = std::max(best, power_exp_value(a, ts));
                }
                if (std::isinf(t1) && a.q <= 0.0 && (a.p > 0.0 || a.q < 0.0)) return kInf;
                return best;
            } else if constexpr (std::is_same_v<A, DyadicPolyAtom>) {
                const double h = (a.hi - a.lo) / (1 << a.depth);
                double best = 0.0;
                for (int c = 0; c < (1 << a.depth); ++c) {
                    double s = 0.0;
                    for (int j = 0; j <= a.degree; ++j)
                        s += std::abs(a.coef[c * (a.degree + 1) + j]) * std::sqrt((2.0 * j + 1.0) / h);
                    best = std::max(best, s);
                }
                return best;
            } else {
                return a.values->cwiseAbs().maxCoeff();
            }
        },
        atom);
}

bool atom_singular_at(const TimeAtom& atom, double t0) {
    const auto* pe = std::get_if<PowerExpAtom>(&atom);
    return pe && pe->p < 0.0 && t0 <= 0.0;
}

std::string atom_key(const TimeAtom& atom) {
    return std::visit(
        [](const auto& a) -> std::string {
            using A = std::decay_t<decltype(a)>;
            if constexpr (std::is_same_v<A, PowerExpAtom>) {
                return "pe(" + fmt17(a.p) + "," + fmt17(a.q) + ")";
            } else if constexpr (std::is_same_v<A, DyadicPolyAtom>) {
                std::string s = "dp(" + fmt17(a.lo) + "," + fmt17(a.hi) + "," + std::to_string(a.depth) + "," +
                                std::to_string(a.degree);
                for (Eigen::Index k = 0; k < a.coef.size(); ++k) s += "," + fmt17(a.coef[k]);
                return s + ")";
            } else {
                return "grid(" + fmt17(a.lo) + "," + fmt17(a.hi) + "," + std::to_string(a.values->size()) + "," +
                       std::to_string(a.tag) + ")";
            }
        },
        atom);
}

std::optional<double> power_exp_moment(double m, double r, double t0, double t1) {
    if (t1 < t0) throw std::invalid_argument("moment bounds reversed");
    if (t1 == t0) return 0.0;
    if (r == 0.0) {
        if (std::isinf(t1)) return kInf;
        if (m == -1.0) return t0 > 0.0 ? std::log(t1 / t0) : kInf;
        if (t0 <= 0.0 && m < -1.0) return kInf;
        const double a = (t0 <= 0.0) ? 0.0 : std::pow(t0, m + 1.0);
        return (std::pow(t1, m + 1.0) - a) / (m + 1.0);
    }
    if (r < 0.0 && std::isinf(t1)) return kInf;
    if (is_integer(m)) {
        if (!std::isinf(t1) && std::abs(r) * t1 < 1e-2) return std::nullopt;
        // Antiderivative -e^{-rt} sum_j m!/j! t^j / r^{m-j+1}.
        auto F = [m, r](double t) {
            if (std::isinf(t)) return 0.0;
            const int mi = static_cast<int>(m);
            double sum = 0.0, coeff = 1.0;  // m!/j! built from j = m downward
            for (int j = mi; j >= 0; --j) {
                sum += coeff * std::pow(t, j) / std::pow(r, mi - j + 1);
                coeff *= j;
            }
            return -std::exp(-r * t) * sum;
        };
        return F(t1) - F(t0);
    }
    if (is_half_integer(m) && r > 0.0) {
        const double sr = std::sqrt(r);
        const double e1 = std::isinf(t1) ? 1.0 : std::erf(sr * std::sqrt(t1));
        double I = std::sqrt(M_PI / r) * (e1 - std::erf(sr * std::sqrt(t0)));
        if (t0 <= 0.0 && m == -0.5) return I;
        for (double k = 0.5; k <= m + 1e-12; k += 1.0) {
            I = (term(k, r, t0) - term(k, r, t1)) / r + (k / r) * I;
        }
        return I;
    }
    return std::nullopt;
}

}  // namespace ppsel
