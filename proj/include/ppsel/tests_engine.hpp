#pragma once

#include <cstdint>
#include <string>

#include "ppsel/domain.hpp"
#include "ppsel/functions.hpp"
#include "ppsel/point_process.hpp"
#include "ppsel/quadrature.hpp"

namespace ppsel {

enum class ConstantsMode { paper_faithful, calibrated };

struct TestConstants {
    ConstantsMode mode = ConstantsMode::calibrated;
    double C = 0.0;
    double C_prime = 0.0;
    double a = 0.5;
    double b = 0.5;
    double kappa = 4.0;

    // C = (8 - 5 sqrt2)/16, C' = 9 sqrt2 (17/16) + C, a = 3C^2/(sqrt2 C'), b = CC'/(2C' - C)
    static TestConstants paper_faithful();
    // a = b = 1/2 with the same C, C'
    static TestConstants calibrated();
    static TestConstants from_name(const std::string& name);
    std::string name() const;
};

// (1/sqrt2) (sqrt(y/(x+y)) - sqrt(x/(x+y))), with 0/0 = 0.
double zeta(double x, double y);

// T(X, f, f'), antisymmetric in (f, f'). mu-integrals use Q, the dN terms
// are exact sums over the events.
double test_statistic(const IntensitySurface& f, const IntensitySurface& f2, const ProcessSample& sample,
                      const CovariateSet& X, const TimeDomain& T, const QuadratureRule& Q);

struct Claim1Bounds {
    double mean_bound = 0.0;      // (1+1/sqrt2) H^2(s,f) - (1-1/sqrt2) H^2(s,f')
    double variance_bound = 0.0;  // H^2(s,f) + H^2(s,f') + H^2(f,f')
};
Claim1Bounds claim1_bounds(const IntensitySurface& s, const IntensitySurface& f, const IntensitySurface& f2,
                           const CovariateSet& X, const TimeDomain& T, const QuadratureRule& Q);

// h(u) = (1+u) log(1+u) - u
double bennett_h(double u);
// exp(-n (upsilon/rho^2) h(rho r/upsilon))
double bennett_bound(double rho, double upsilon, double r, int n);
// exp(-n r^2 / (2 (upsilon + rho r/3)))
double bernstein_bound(double rho, double upsilon, double r, int n);
// min of the two forms above
double bennett_tail_bound(double rho, double upsilon, double r, int n);

// Deterministic coin for exact ties; symmetric in the two ids.
bool tie_prefers_second(std::uint64_t tie_seed, const std::string& id_first, const std::string& id_second);

struct TestOutcome {
    double statistic = 0.0;
    double threshold = 0.0;
    bool accepts_second = false;
    bool tie = false;
};

// psi^{(z)}(f, f'): accept f' when T > b z, f when T < b z, coin on equality.
TestOutcome decide(double statistic, double z, const TestConstants& c, std::uint64_t tie_seed,
                   const std::string& id_first, const std::string& id_second);
TestOutcome run_test(const IntensitySurface& f, const IntensitySurface& f2, double z, const ProcessSample& sample,
                     const CovariateSet& X, const TimeDomain& T, const QuadratureRule& Q, const TestConstants& c,
                     std::uint64_t tie_seed);

}  // namespace ppsel
