#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <json.hpp>
#include <vector>

#include "ppsel/domain.hpp"
#include "ppsel/functions.hpp"
#include "ppsel/quadrature.hpp"

namespace ppsel {

// Event times of N_1..N_n, each sorted ascending and inside T.
struct ProcessSample {
    std::vector<std::vector<double>> events;

    int n() const { return static_cast<int>(events.size()); }
    std::size_t total() const;
};

// Independent inhomogeneous Poisson processes with intensities s(., x_i).
// Thinning from a homogeneous process at the per-process bound, inversion of
// the cumulative intensity for pure power roots with negative exponent, and
// Poisson counts on a point-mass domain.
ProcessSample simulate(const IntensitySurface& s, const CovariateSet& X, const TimeDomain& T, std::uint64_t seed);

// Int_T s(t, x_i) dmu(t) for every i. Closed forms where available, the
// quadrature rule otherwise. Throws std::domain_error on divergence.
Eigen::VectorXd integrate_intensity(const IntensitySurface& s, const TimeDomain& T, const CovariateSet& X,
                                    const QuadratureRule& Q);

double counting_integral(const std::function<double(double)>& g, const std::vector<double>& events);

// [t_min, T*] where the mass of s beyond T* is below tail for every process.
TimeDomain truncate_domain(const IntensitySurface& s, const CovariateSet& X, double t_min, double tail = 1e-10);

nlohmann::json sample_to_json(const ProcessSample& sample);
ProcessSample sample_from_json(const nlohmann::json& j);

}  // namespace ppsel
