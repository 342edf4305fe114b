#pragma once

#include <Eigen/Dense>

#include "ppsel/domain.hpp"

namespace ppsel {

inline constexpr int kDefaultNodesPerUnit = 1025;

struct QuadratureRule {
    Eigen::VectorXd nodes;
    Eigen::VectorXd weights;

    Eigen::Index size() const { return nodes.size(); }

    template <class F>
    double integrate(F&& f) const {
        double acc = 0.0;
        for (Eigen::Index k = 0; k < nodes.size(); ++k) acc += weights[k] * f(nodes[k]);
        return acc;
    }
};

// Composite Simpson on a uniform grid; about nodes_per_unit nodes per unit
// length. A point-mass domain gets the single node t_min with weight 1.
QuadratureRule simpson_rule(const TimeDomain& T, int nodes_per_unit = kDefaultNodesPerUnit);

// Simpson in u after t = t_min + L u^4. Used when integrands blow up like
// t^p with p > -1 at the left end; the node at t_min carries zero weight and
// is dropped.
QuadratureRule graded_rule(const TimeDomain& T, int nodes_per_unit = kDefaultNodesPerUnit);

// Composite Gauss-Legendre with `points` nodes (1..5) on each of `cells`
// equal cells. No node sits on a cell boundary, so piecewise polynomials on
// dyadic cells aligned with the rule integrate exactly up to degree
// 2 points - 1.
QuadratureRule gauss_rule(const TimeDomain& T, int cells, int points = 4);

}  // namespace ppsel
