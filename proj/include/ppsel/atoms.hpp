#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>

namespace ppsel {

// Univariate root functions of time. A candidate restricted to one process is
// scale * atom(t).

// t^p e^{-q t}
struct PowerExpAtom {
    double p = 0.0;
    double q = 0.0;
};

// Piecewise polynomial on the 2^depth dyadic cells of [lo, hi] in a basis that
// is orthonormal in L2(dt); coefficients are stored cell by cell.
struct DyadicPolyAtom {
    double lo = 0.0;
    double hi = 1.0;
    int depth = 0;
    int degree = 0;
    Eigen::VectorXd coef;
};

// Linear interpolation of values on a uniform grid of [lo, hi].
struct GridAtom {
    double lo = 0.0;
    double hi = 1.0;
    std::shared_ptr<const Eigen::VectorXd> values;
    std::uint64_t tag = 0;
};

using TimeAtom = std::variant<PowerExpAtom, DyadicPolyAtom, GridAtom>;

GridAtom make_grid_atom(double lo, double hi, Eigen::VectorXd values);

double atom_value(const TimeAtom& a, double t);
// Upper bound on |atom| over [t0, t1]; +inf when unbounded.
double atom_sup_abs(const TimeAtom& a, double t0, double t1);
// True when |atom|^2 is not bounded near t0.
bool atom_singular_at(const TimeAtom& a, double t0);
std::string atom_key(const TimeAtom& a);

// sqrt((2j+1)/2) P_j(s), orthonormal on [-1, 1].
double legendre_orthonormal(int j, double s);
// Value of the j-th orthonormal basis function of cell c of a dyadic atom.
double dyadic_basis(const DyadicPolyAtom& a, int cell, int j, double t);

// Integral of t^m e^{-r t} over [t0, t1] (t1 may be +inf when r > 0).
// Available when r == 0, or when m is an integer >= 0, or a half integer
// >= -1/2 with r > 0. Returns +inf for divergent integrals and nullopt when
// no elementary form is implemented.
std::optional<double> power_exp_moment(double m, double r, double t0, double t1);

}  // namespace ppsel
