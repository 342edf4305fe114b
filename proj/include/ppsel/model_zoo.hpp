#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "ppsel/domain.hpp"
#include "ppsel/functions.hpp"
#include "ppsel/point_process.hpp"
#include "ppsel/rng.hpp"
#include "ppsel/tests_engine.hpp"

namespace ppsel {

inline constexpr std::size_t kNetCap = 1000000;
inline constexpr std::size_t kCollectionCap = 100000;

// ---------------------------------------------------------------- profiles

enum class ProfileFamily { power, exponential };

// Parametric time factors u_b with the bracket
// rho_lower(b v b')|b - b'| <= ||u_b/|u_b| - u_b'/|u_b'||| <= rho_upper(b ^ b')|b - b'|.
struct LipschitzProfile {
    ProfileFamily family = ProfileFamily::power;
    int k = 0;                 // exponential family: u_b = t^{k/2} e^{-b t}
    double lower_end = -0.5;   // parameters live in (lower_end, inf)

    double rho_lower(double u) const;
    double rho_upper(double u) const;
    PowerExpAtom atom(double b) const;
    double normalized_sqdist(double b, double b2) const;
    std::string name() const;
};

LipschitzProfile powerlaw_profile();
LipschitzProfile expfamily_profile(int k);

// ------------------------------------------------------- dimension bounds

struct RobustDimension {
    int k = 1;
    std::vector<double> R, alpha, rho;
    std::vector<int> dims;
};

// 1/2 v 1/4 sum_j log(1 + 2 (k R_j/eta)^{1/alpha_j} rho_j) dim_j
double robust_dimension(double eta, int k, const std::vector<double>& R, const std::vector<double>& alpha,
                        const std::vector<double>& rho, const std::vector<int>& dims);

// eta -> D(eta): a constant, the log form 2 alpha + 2 beta log(1/eta) for
// eta < 1 (2 alpha otherwise), or the robust parametric form above.
struct DimensionBound {
    enum class Kind { constant, log_form, robust } kind = Kind::constant;
    double D = 0.5;
    double alpha = 0.0, beta = 0.0;
    RobustDimension robust;

    static DimensionBound constant(double D);
    static DimensionBound log_form(double alpha, double beta);
    static DimensionBound robust_form(RobustDimension r);
    double operator()(double eta) const;
    std::string describe() const;
};

// Principal branch of w e^w = x for x >= 0, by Newton iteration.
double lambert_w0(double x);
// Same, given log x (usable when x overflows).
double lambert_w0_from_log(double log_x);

// eta_V = inf{eta > 0 : D(eta)/eta^2 <= n}. Closed forms for the constant and
// log forms, bisection otherwise.
double eta_solver(const DimensionBound& D, int n);
double eta_solver_bisect(const std::function<double(double)>& D, int n);

// (21 sqrt(3/(5a)) eta_V) v sqrt(21 Delta/(n a))
double radius_from_weight(double eta_V, double weight, int n, const TestConstants& c);

// ---------------------------------------------------------------- weights

double log_binomial(int n, int k);
// 1 + |m| + log C(k2, |m|)
double sparse_cox_weight(int k2, int support_size);
// |P| + log C(n-1, |P|-1)
double changepoint_weight(int n, int segments);
// base + log(2R^2) + log(2r^2) + log(2 rho^2)
double truncation_weight(double base, double R, double r, double rho);
// sum_j (Delta_j + log(2 rho_j^2))
double per_dimension_weight(const std::vector<double>& deltas, const std::vector<double>& rhos);

// --------------------------------------------------------- linear spaces

// Piecewise polynomials of the given degree on 2^depth dyadic cells of
// [lo, hi]; along time, or along the first covariate coordinate.
struct LinearSpace {
    enum class Axis { time, covariate } axis = Axis::time;
    int depth = 0;
    int degree = 0;
    double lo = 0.0;
    double hi = 1.0;

    int dim() const { return (1 << depth) * (degree + 1); }
    std::string describe() const;
};

// Columns orthonormal in L2(nu_n): (1/n) B^T B = I. Rank-deficient directions
// (cells without covariates) are dropped.
Eigen::MatrixXd covariate_basis(const LinearSpace& V, const CovariateSet& X);
DyadicPolyAtom time_function(const LinearSpace& V, const Eigen::VectorXd& coef);

// Unit vectors covering the unit sphere of R^D modulo sign at resolution
// delta: projections of a grid on the surface of the cube [-1, 1]^D.
std::vector<Eigen::VectorXd> sphere_net(int D, double delta);

// ------------------------------------------------------------------ nets

enum class NetKind { linear, product, cox, changepoint, local_product, explicit_set };

// Member sampling and distances for covering certification.
class NetGeometry {
public:
    virtual ~NetGeometry() = default;
    virtual Eigen::VectorXd sample_member(SplitMix64& rng) const = 0;
    virtual double distance(const Eigen::VectorXd& member, Eigen::Index candidate) const = 0;
    virtual Eigen::Index size() const = 0;
};

struct CandidateNet {
    std::string label;
    NetKind kind = NetKind::explicit_set;
    std::vector<SqrtFunction> candidates;
    double eta = 0.0;      // construction covering radius
    double eta_bar = 0.0;  // radius used by the selector
    double weight = 0.0;   // Delta
    DimensionBound dim_bound;
    std::shared_ptr<const NetGeometry> geometry;
};

nlohmann::json net_to_json(const CandidateNet& net);

struct LinearNetOptions {
    std::pair<double, double> box{0.0, 1.0};
    std::size_t cap = kNetCap;
};
CandidateNet build_linear_net(const LinearSpace& V, double eta, const TimeDomain& T, const CovariateSet& X,
                              const LinearNetOptions& opt = {});

struct ProductNetOptions {
    double kappa_max = 0.0;
    double kappa_min = 0.0;
    std::size_t cap = kNetCap;
};
CandidateNet build_product_net(const LinearSpace& V1, const LinearSpace& V2, double eta, const TimeDomain& T,
                               const CovariateSet& X, const ProductNetOptions& opt);

struct CoxNetOptions {
    std::pair<double, double> b_range{0.0, 1.0};
    std::vector<int> support;       // index subset m of the covariate coordinates
    double rho_theta = 1.0;
    double kappa_min = 0.0;
    double kappa_max = 1.0;
    double extra_weight = 0.0;      // truncation-level term added to the weight
    std::size_t cap = kNetCap;
};
CandidateNet build_cox_net(const LipschitzProfile& profile, double eta, const TimeDomain& T, const CovariateSet& X,
                           const CoxNetOptions& opt);

// Parametric families for change-point models.
struct ParamFamily {
    enum class Kind { duane, expdecay } kind = Kind::duane;
    int k = 0;
    ParametricRoot root(double theta1, double theta2) const;
    // Per-process squared L2 distance in closed form.
    double sqdist(double a, double b, double a2, double b2) const;
    std::string name() const;
};

struct Partition {
    std::vector<int> starts;  // starts[0] == 0
    int n = 0;
    int segments() const { return static_cast<int>(starts.size()); }
};
std::vector<Partition> enumerate_partitions(int n, int max_segments);

struct ChangepointOptions {
    std::vector<double> amplitudes;
    std::vector<double> shapes;
    int max_segments = 2;
    std::size_t cap = kCollectionCap;
};
std::vector<CandidateNet> build_changepoint_collection(const ParamFamily& family, int n,
                                                       const ChangepointOptions& opt);

struct LocalProductOptions {
    std::vector<int> time_depths{0, 1, 2, 3};
    std::vector<int> cov_depths{0};
    int kappa_steps = 1;
    double step_scale = 1.0;
    bool perturb_factors = true;
};
// Sample-centred nets: for every pair of depths, the product histogram
// estimate and its neighbours at the model radius along each axis.
std::vector<CandidateNet> build_local_product_nets(const ProcessSample& sample, const TimeDomain& T,
                                                   const CovariateSet& X, const LocalProductOptions& opt,
                                                   const std::function<double(const CandidateNet&)>& radius);

// ------------------------------------------------------- certification

struct CoveringReport {
    int trials = 0;
    double max_distance = 0.0;
    bool covering_ok = false;
    int centers = 0;
    double max_ball_count = 0.0;
    double ball_bound = 0.0;
    bool cardinality_ok = false;
    bool ok() const { return covering_ok && cardinality_ok; }
};
CoveringReport certify_net(const CandidateNet& net, int trials, int centers, std::uint64_t seed);

// ------------------------------------------------------- approximation

// L2 distance on [0,1]^k (k in {1, 2}) from f to its projection on piecewise
// polynomials of total degree <= degree over 2^depth cells per axis. f is
// sampled at cell midpoints of an N (or N x N, row-major) grid.
double holder_approx_error(const Eigen::VectorXd& f, int k, int depth, int degree);

}  // namespace ppsel
