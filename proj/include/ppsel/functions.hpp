#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "ppsel/atoms.hpp"
#include "ppsel/domain.hpp"

namespace ppsel {

// Square roots of intensities. The intensity of g is g^2, so only |g| matters
// for Hellinger geometry and for the tests.

// amplitude * t^power * e^{-rate t}, identical for every process.
struct ParametricRoot {
    double amplitude = 1.0;
    double power = 0.0;
    double rate = 0.0;
};

// amplitude * t^power * e^{-rate t} * exp(<theta, x_i>).
struct CoxRoot {
    double amplitude = 1.0;
    double power = 0.0;
    double rate = 0.0;
    Eigen::VectorXd theta;
};

// Parametric root that changes at process indices starts[1] < starts[2] < ...
// (starts[0] == 0). Process i uses pieces[j] for starts[j] <= i < starts[j+1].
struct PiecewiseRoot {
    std::vector<int> starts;
    std::vector<ParametricRoot> pieces;
};

// kappa * f(t) * g(x_i), with g given by its values at the covariates.
struct ProductRoot {
    double kappa = 1.0;
    TimeAtom time;
    std::shared_ptr<const Eigen::VectorXd> cov;
    std::uint64_t cov_tag = 0;
};

// Per-process root values on a uniform grid of [lo, hi] (row i = process i).
struct GridRoot {
    double lo = 0.0;
    double hi = 1.0;
    std::shared_ptr<const Eigen::MatrixXd> values;
    std::uint64_t tag = 0;
};

using SqrtFunction = std::variant<ParametricRoot, CoxRoot, PiecewiseRoot, ProductRoot, GridRoot>;

ProductRoot make_product_root(double kappa, TimeAtom time, Eigen::VectorXd cov);
GridRoot make_grid_root(double lo, double hi, Eigen::MatrixXd values);

double root_value(const SqrtFunction& g, double t, int i, const CovariateSet& X);
// Canonical text identity; equal descriptors mean equal functions.
std::string descriptor(const SqrtFunction& g);

// Processes [begin, end) share the root scale * |atom(t)|.
struct Segment {
    int begin = 0;
    int end = 0;
    int atom = 0;
    double scale = 0.0;
};

class AtomTable {
public:
    int intern(const TimeAtom& a);
    const TimeAtom& operator[](int id) const { return atoms_[static_cast<std::size_t>(id)]; }
    int size() const { return static_cast<int>(atoms_.size()); }

private:
    std::vector<TimeAtom> atoms_;
    std::unordered_map<std::string, int> index_;
};

std::vector<Segment> layout(const SqrtFunction& g, const CovariateSet& X, AtomTable& atoms);

enum class SurfaceKind { constant, power_law, exp_decay, product_exp, piecewise, grid, product, root };

// An intensity s(t, x_i) >= 0, stored through its square root.
class IntensitySurface {
public:
    static IntensitySurface constant(double lambda);
    // a t^b
    static IntensitySurface power_law(double a, double b);
    // a t^{k/2} e^{-b t}
    static IntensitySurface exp_decay(double a, double b, int k);
    // (a t^power e^{-rate t} e^{<theta,x>})^2
    static IntensitySurface product_exp(double a, double power, double rate, Eigen::VectorXd theta);
    static IntensitySurface piecewise(std::vector<int> starts, std::vector<ParametricRoot> pieces);
    // Intensity values (not roots), one row per process, on a uniform grid.
    static IntensitySurface grid(double lo, double hi, const Eigen::MatrixXd& intensity);
    static IntensitySurface product(double kappa, TimeAtom time, Eigen::VectorXd cov);
    static IntensitySurface square_of(SqrtFunction root);

    double value(double t, int i, const CovariateSet& X) const;
    double root(double t, int i, const CovariateSet& X) const;
    const SqrtFunction& root_function() const { return root_; }
    SurfaceKind kind() const { return kind_; }

private:
    IntensitySurface(SurfaceKind k, SqrtFunction r) : kind_(k), root_(std::move(r)) {}
    SurfaceKind kind_;
    SqrtFunction root_;
};

}  // namespace ppsel
