#include "ppsel/model_zoo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

#include "ppsel/format.hpp"
#include "ppsel/geometry.hpp"

namespace ppsel {

// ---------------------------------------------------------------- profiles

double LipschitzProfile::rho_lower(double u) const {
    return family == ProfileFamily::power ? 1.0 / (1.0 + 2.0 * u) : 1.0 / (2.0 * u);
}

double LipschitzProfile::rho_upper(double u) const {
    return family == ProfileFamily::power ? 1.0 / (1.0 + 2.0 * u) : std::sqrt(k + 1.0) / (2.0 * u);
}

PowerExpAtom LipschitzProfile::atom(double b) const {
    return family == ProfileFamily::power ? PowerExpAtom{b, 0.0} : PowerExpAtom{0.5 * k, b};
}

double LipschitzProfile::normalized_sqdist(double b, double b2) const {
    return family == ProfileFamily::power ? powerlaw_normalized_sqdist(b, b2) : expfamily_normalized_sqdist(b, b2, k);
}

std::string LipschitzProfile::name() const {
    return family == ProfileFamily::power ? "power" : "exp" + std::to_string(k);
}

LipschitzProfile powerlaw_profile() { return {ProfileFamily::power, 0, -0.5}; }

LipschitzProfile expfamily_profile(int k) {
    if (k < 0 || k > 1) throw std::domain_error("exponential profile implemented for k in {0, 1}");
    return {ProfileFamily::exponential, k, 0.0};
}

// ------------------------------------------------------- dimension bounds

double robust_dimension(double eta, int k, const std::vector<double>& R, const std::vector<double>& alpha,
                        const std::vector<double>& rho, const std::vector<int>& dims) {
    const auto m = static_cast<std::size_t>(k);
    if (!(eta > 0.0) || k < 1 || R.size() != m || alpha.size() != m || rho.size() != m || dims.size() != m)
        throw std::domain_error("robust dimension: inconsistent inputs");
    double acc = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
        if (!(R[j] > 0.0) || !(alpha[j] > 0.0 && alpha[j] <= 1.0) || !(rho[j] > 0.0) || dims[j] < 0)
            throw std::domain_error("robust dimension: entries out of range");
        acc += std::log1p(2.0 * std::pow(k * R[j] / eta, 1.0 / alpha[j]) * rho[j]) * dims[j];
    }
    return std::max(0.5, 0.25 * acc);
}

DimensionBound DimensionBound::constant(double D) {
    if (!(D > 0.0)) throw std::domain_error("dimension must be positive");
    DimensionBound d;
    d.kind = Kind::constant;
    d.D = D;
    return d;
}

DimensionBound DimensionBound::log_form(double alpha, double beta) {
    if (!(alpha > 0.0) || !(beta >= 0.0)) throw std::domain_error("log-form dimension needs alpha > 0, beta >= 0");
    DimensionBound d;
    d.kind = Kind::log_form;
    d.alpha = alpha;
    d.beta = beta;
    return d;
}

DimensionBound DimensionBound::robust_form(RobustDimension r) {
    DimensionBound d;
    d.kind = Kind::robust;
    d.robust = std::move(r);
    return d;
}

double DimensionBound::operator()(double eta) const {
    switch (kind) {
        case Kind::constant: return D;
        case Kind::log_form: return eta < 1.0 ? 2.0 * alpha + 2.0 * beta * std::log(1.0 / eta) : 2.0 * alpha;
        case Kind::robust: return robust_dimension(eta, robust.k, robust.R, robust.alpha, robust.rho, robust.dims);
    }
    return D;
}

std::string DimensionBound::describe() const {
    switch (kind) {
        case Kind::constant: return "constant(" + fmt17(D) + ")";
        case Kind::log_form: return "log(" + fmt17(alpha) + "," + fmt17(beta) + ")";
        case Kind::robust: return "robust(k=" + std::to_string(robust.k) + ")";
    }
    return "";
}

double lambert_w0(double x) {
    if (!(x >= 0.0)) throw std::domain_error("lambert_w0 implemented for x >= 0");
    if (x == 0.0) return 0.0;
    if (x > 2.718281828459045) return lambert_w0_from_log(std::log(x));
    double w = std::log1p(x);
    double last = std::numeric_limits<double>::infinity();
    for (int it = 0; it < 100; ++it) {
        const double ew = std::exp(w);
        const double f = w * ew - x;
        const double fp = ew * (w + 1.0);
        // Halley step
        const double step = f / (fp - (w + 2.0) * f / (2.0 * w + 2.0));
        w -= step;
        // stop at rounding level, or once steps stop shrinking there
        if (std::abs(step) <= 4e-16 * std::max(1.0, std::abs(w))) return w;
        if (std::abs(step) >= last && std::abs(step) <= 1e-12 * std::max(1.0, std::abs(w))) return w;
        last = std::abs(step);
    }
    throw std::runtime_error("lambert_w0 did not converge");
}

double lambert_w0_from_log(double log_x) {
    if (log_x < 1.0) return lambert_w0(std::exp(log_x));
    // w + log w = log x, increasing in w > 0
    double w = log_x - std::log(log_x) + 1e-3;
    double last = std::numeric_limits<double>::infinity();
    for (int it = 0; it < 100; ++it) {
        const double g = w + std::log(w) - log_x;
        const double step = g / (1.0 + 1.0 / w);
        w -= step;
        if (std::abs(step) <= 4e-16 * w) return w;
        if (std::abs(step) >= last && std::abs(step) <= 1e-12 * w) return w;
        last = std::abs(step);
    }
    throw std::runtime_error("lambert_w0 did not converge");
}

double eta_solver_bisect(const std::function<double(double)>& D, int n) {
    if (n < 1) throw std::domain_error("eta solver needs n >= 1");
    auto ok = [&](double eta) { return D(eta) <= n * eta * eta; };
    double hi = 1.0;
    int guard = 0;
    while (!ok(hi)) {
        hi *= 2.0;
        if (++guard > 2000) throw std::runtime_error("eta solver: no upper bracket");
    }
    double lo = hi;
    guard = 0;
    while (ok(lo)) {
        lo *= 0.5;
        if (++guard > 2000) return lo;
    }
    for (int it = 0; it < 400 && hi - lo > 1e-16 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (ok(mid) ? hi : lo) = mid;
    }
    return hi;
}

double eta_solver(const DimensionBound& D, int n) {
    if (n < 1) throw std::domain_error("eta solver needs n >= 1");
    switch (D.kind) {
        case DimensionBound::Kind::constant: return std::sqrt(D.D / n);
        case DimensionBound::Kind::log_form: {
            if (n <= 2.0 * D.alpha || D.beta == 0.0) return std::sqrt(2.0 * D.alpha / n);
            const double log_x = 2.0 * D.alpha / D.beta + std::log(n / D.beta);
            return std::sqrt(D.beta / n * lambert_w0_from_log(log_x));
        }
        case DimensionBound::Kind::robust: return eta_solver_bisect([&D](double e) { return D(e); }, n);
    }
    return 0.0;
}

double radius_from_weight(double eta_V, double weight, int n, const TestConstants& c) {
    if (!(eta_V > 0.0) || weight < 0.0 || n < 1) throw std::domain_error("radius_from_weight: bad inputs");
    return std::max(21.0 * std::sqrt(3.0 / (5.0 * c.a)) * eta_V, std::sqrt(21.0 * weight / (n * c.a)));
}

// ---------------------------------------------------------------- weights

double log_binomial(int n, int k) {
    if (k < 0 || k > n) throw std::domain_error("binomial out of range");
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

double sparse_cox_weight(int k2, int support_size) { return 1.0 + support_size + log_binomial(k2, support_size); }

double changepoint_weight(int n, int segments) {
    if (segments < 1 || segments > n) throw std::domain_error("segments out of range");
    return segments + log_binomial(n - 1, segments - 1);
}

double truncation_weight(double base, double R, double r, double rho) {
    return base + std::log(2.0 * R * R) + std::log(2.0 * r * r) + std::log(2.0 * rho * rho);
}

double per_dimension_weight(const std::vector<double>& deltas, const std::vector<double>& rhos) {
    if (deltas.size() != rhos.size()) throw std::domain_error("weights and radii differ in length");
    double acc = 0.0;
    for (std::size_t j = 0; j < deltas.size(); ++j) acc += deltas[j] + std::log(2.0 * rhos[j] * rhos[j]);
    return acc;
}

// --------------------------------------------------------- linear spaces

std::string LinearSpace::describe() const {
    return std::string(axis == Axis::time ? "time" : "cov") + "[d=" + std::to_string(depth) +
           ",r=" + std::to_string(degree) + "]";
}

Eigen::MatrixXd covariate_basis(const LinearSpace& V, const CovariateSet& X) {
    const int n = X.n();
    if (X.dim() == 0) {
        if (V.dim() != 1) throw std::invalid_argument("covariate space needs covariates");
        return Eigen::MatrixXd::Ones(n, 1);
    }
    DyadicPolyAtom proto{V.lo, V.hi, V.depth, V.degree, Eigen::VectorXd::Zero(V.dim())};
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(n, V.dim());
    const int cells = 1 << V.depth;
    const double h = (V.hi - V.lo) / cells;
    for (int i = 0; i < n; ++i) {
        const double x = X.x(i, 0);
        const int c = std::clamp(static_cast<int>(std::floor((x - V.lo) / h)), 0, cells - 1);
        for (int j = 0; j <= V.degree; ++j) B(i, c * (V.degree + 1) + j) = dyadic_basis(proto, c, j, x);
    }
    const Eigen::MatrixXd G = B.transpose() * B / n;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G);
    const double top = es.eigenvalues().maxCoeff();
    std::vector<Eigen::Index> keep;
    for (Eigen::Index k = es.eigenvalues().size() - 1; k >= 0; --k)
        if (es.eigenvalues()[k] > 1e-10 * top) keep.push_back(k);
    Eigen::MatrixXd Q(n, static_cast<Eigen::Index>(keep.size()));
    for (std::size_t c = 0; c < keep.size(); ++c) {
        const Eigen::Index k = keep[c];
        Eigen::VectorXd col = B * es.eigenvectors().col(k) / std::sqrt(es.eigenvalues()[k]);
        // Fix the sign so the first sizeable entry is positive.
        for (Eigen::Index i = 0; i < n; ++i) {
            if (std::abs(col[i]) > 1e-12) {
                if (col[i] < 0) col = -col;
                break;
            }
        }
        Q.col(static_cast<Eigen::Index>(c)) = col;
    }
    return Q;
}

DyadicPolyAtom time_function(const LinearSpace& V, const Eigen::VectorXd& coef) {
    if (coef.size() != V.dim()) throw std::invalid_argument("coefficient length differs from dim V");
    return DyadicPolyAtom{V.lo, V.hi, V.depth, V.degree, coef};
}

std::vector<Eigen::VectorXd> sphere_net(int D, double delta) {
    if (D < 1 || !(delta > 0.0)) throw std::domain_error("sphere net needs D >= 1 and delta > 0");
    if (D == 1) return {Eigen::VectorXd::Ones(1)};
    // Grid values -1 + 2k/m on each free coordinate; spacing keeps the cube
    // point within delta/2 and the projection within delta.
    const int m = std::max(1, static_cast<int>(std::ceil(2.0 * std::sqrt(D - 1.0) / delta)));
    std::set<std::vector<int>> pts;
    std::vector<int> v(static_cast<std::size_t>(D));
    for (int face = 0; face < D; ++face) {
        const long total = static_cast<long>(std::pow(m + 1.0, D - 1));
        if (total > static_cast<long>(kNetCap) * 4) throw std::length_error("sphere net too large");
        for (long code = 0; code < total; ++code) {
            long rest = code;
            for (int j = 0, free = 0; j < D; ++j) {
                if (j == face) {
                    v[static_cast<std::size_t>(j)] = m;
                } else {
                    v[static_cast<std::size_t>(j)] = 2 * static_cast<int>(rest % (m + 1)) - m;
                    rest /= (m + 1);
                    ++free;
                }
            }
            auto w = v;
            for (int x : w) {
                if (x != 0) {
                    if (x < 0)
                        for (auto& y : w) y = -y;
                    break;
                }
            }
            pts.insert(w);
        }
    }
    std::vector<Eigen::VectorXd> out;
    out.reserve(pts.size());
    for (const auto& p : pts) {
        Eigen::VectorXd e(D);
        for (int j = 0; j < D; ++j) e[j] = p[static_cast<std::size_t>(j)];
        out.push_back(e.normalized());
    }
    return out;
}

// ------------------------------------------------------------------ nets

namespace {

constexpr double kSqrt2 = 1.4142135623730951;

Eigen::VectorXd random_unit(int D, SplitMix64& rng) {
    Eigen::VectorXd v(D);
    do {
        for (int j = 0; j < D; ++j) v[j] = rng.normal();
    } while (v.norm() < 1e-12);
    return v.normalized();
}

std::vector<double> grid_points(double lo, double hi, double step) {
    if (hi < lo) throw std::domain_error("empty range");
    if (hi == lo) return {lo};
    const int count = static_cast<int>(std::ceil((hi - lo) / step - 1e-9)) + 1;
    std::vector<double> g(static_cast<std::size_t>(count));
    for (int k = 0; k < count; ++k) g[static_cast<std::size_t>(k)] = lo + (hi - lo) * k / (count - 1);
    return g;
}

class LinearGeometry final : public NetGeometry {
public:
    LinearGeometry(Eigen::MatrixXd coords, std::pair<double, double> box) : coords_(std::move(coords)), box_(box) {}
    Eigen::VectorXd sample_member(SplitMix64& rng) const override {
        Eigen::VectorXd v(coords_.cols());
        for (Eigen::Index j = 0; j < v.size(); ++j) v[j] = box_.first + (box_.second - box_.first) * rng.uniform();
        return v;
    }
    double distance(const Eigen::VectorXd& m, Eigen::Index c) const override {
        return (coords_.row(c).transpose() - m).norm();
    }
    Eigen::Index size() const override { return coords_.rows(); }

private:
    Eigen::MatrixXd coords_;
    std::pair<double, double> box_;
};

class ProductGeometry final : public NetGeometry {
public:
    ProductGeometry(Eigen::VectorXd kappa, Eigen::MatrixXd f, Eigen::MatrixXd g, double kmin, double kmax)
        : kappa_(std::move(kappa)), f_(std::move(f)), g_(std::move(g)), kmin_(kmin), kmax_(kmax) {}
    Eigen::VectorXd sample_member(SplitMix64& rng) const override {
        const auto D1 = f_.cols(), D2 = g_.cols();
        Eigen::VectorXd m(1 + D1 + D2);
        m[0] = kmin_ + (kmax_ - kmin_) * rng.uniform();
        m.segment(1, D1) = random_unit(static_cast<int>(D1), rng);
        m.segment(1 + D1, D2) = random_unit(static_cast<int>(D2), rng);
        return m;
    }
    double distance(const Eigen::VectorXd& m, Eigen::Index c) const override {
        const auto D1 = f_.cols(), D2 = g_.cols();
        const Eigen::VectorXd mf = m.segment(1, D1), mg = m.segment(1 + D1, D2);
        const Eigen::VectorXd cf = f_.row(c).transpose(), cg = g_.row(c).transpose();
        const double dt = std::min((mf - cf).norm(), (mf + cf).norm());
        const double dx = std::min((mg - cg).norm(), (mg + cg).norm());
        return product_distance(m[0], kappa_[c], dt, dx);
    }
    Eigen::Index size() const override { return kappa_.size(); }

private:
    Eigen::VectorXd kappa_;
    Eigen::MatrixXd f_, g_;
    double kmin_, kmax_;
};

class CoxGeometry final : public NetGeometry {
public:
    CoxGeometry(LipschitzProfile p, Eigen::VectorXd kappa, Eigen::VectorXd b, std::vector<int> theta_idx,
                Eigen::MatrixXd thetas, Eigen::MatrixXd Xm, std::pair<double, double> br, double rho, double kmin,
                double kmax)
        : p_(p), kappa_(std::move(kappa)), b_(std::move(b)), tidx_(std::move(theta_idx)), Xm_(std::move(Xm)),
          br_(br), rho_(rho), kmin_(kmin), kmax_(kmax) {
        W_.resize(Xm_.rows(), thetas.rows());
        for (Eigen::Index t = 0; t < thetas.rows(); ++t) W_.col(t) = cov_factor(thetas.row(t).transpose());
    }
    Eigen::VectorXd sample_member(SplitMix64& rng) const override {
        const auto m = Xm_.cols();
        Eigen::VectorXd v(2 + m);
        v[0] = kmin_ + (kmax_ - kmin_) * rng.uniform();
        v[1] = br_.first + (br_.second - br_.first) * rng.uniform();
        if (m > 0) {
            const Eigen::VectorXd dir = random_unit(static_cast<int>(m), rng);
            v.segment(2, m) = dir * rho_ * std::pow(rng.uniform(), 1.0 / static_cast<double>(m));
        }
        return v;
    }
    double distance(const Eigen::VectorXd& mem, Eigen::Index c) const override {
        const Eigen::VectorXd w = cov_factor(mem.segment(2, Xm_.cols()));
        return dist_with(mem, w, c);
    }
    Eigen::Index size() const override { return kappa_.size(); }

    double dist_with(const Eigen::VectorXd& mem, const Eigen::VectorXd& w, Eigen::Index c) const {
        const double dt = std::sqrt(std::max(0.0, p_.normalized_sqdist(mem[1], b_[c])));
        const double dx = l2_cov(w, W_.col(tidx_[static_cast<std::size_t>(c)]));
        return product_distance(mem[0], kappa_[c], dt, dx);
    }

private:
    Eigen::VectorXd cov_factor(const Eigen::VectorXd& theta) const {
        Eigen::VectorXd v = (Xm_ * theta).array().exp().matrix();
        return v / std::sqrt(v.squaredNorm() / static_cast<double>(v.size()));
    }
    LipschitzProfile p_;
    Eigen::VectorXd kappa_, b_;
    std::vector<int> tidx_;
    Eigen::MatrixXd Xm_, W_;
    std::pair<double, double> br_;
    double rho_, kmin_, kmax_;
};

class ChangepointGeometry final : public NetGeometry {
public:
    ChangepointGeometry(ParamFamily fam, Partition P, Eigen::MatrixXi choice, std::vector<double> a,
                        std::vector<double> b)
        : fam_(fam), P_(std::move(P)), choice_(std::move(choice)), a_(std::move(a)), b_(std::move(b)) {}
    Eigen::VectorXd sample_member(SplitMix64& rng) const override {
        const int S = P_.segments();
        Eigen::VectorXd v(2 * S);
        const auto [alo, ahi] = std::minmax_element(a_.begin(), a_.end());
        const auto [blo, bhi] = std::minmax_element(b_.begin(), b_.end());
        for (int s = 0; s < S; ++s) {
            v[2 * s] = *alo + (*ahi - *alo) * rng.uniform();
            v[2 * s + 1] = *blo + (*bhi - *blo) * rng.uniform();
        }
        return v;
    }
    double distance(const Eigen::VectorXd& m, Eigen::Index c) const override {
        double acc = 0.0;
        for (int s = 0; s < P_.segments(); ++s) {
            const int begin = P_.starts[static_cast<std::size_t>(s)];
            const int end = s + 1 < P_.segments() ? P_.starts[static_cast<std::size_t>(s + 1)] : P_.n;
            const int g = choice_(c, s);
            const auto G = static_cast<int>(b_.size());
            const double ca = a_[static_cast<std::size_t>(g / G)], cb = b_[static_cast<std::size_t>(g % G)];
            acc += (end - begin) * std::max(0.0, fam_.sqdist(m[2 * s], m[2 * s + 1], ca, cb));
        }
        return std::sqrt(acc / P_.n);
    }
    Eigen::Index size() const override { return choice_.rows(); }

private:
    ParamFamily fam_;
    Partition P_;
    Eigen::MatrixXi choice_;
    std::vector<double> a_, b_;
};

std::shared_ptr<const Eigen::VectorXd> ones_vector(int n) {
    return std::make_shared<const Eigen::VectorXd>(Eigen::VectorXd::Ones(n));
}

}  // namespace

nlohmann::json net_to_json(const CandidateNet& net) {
    nlohmann::json j;
    j["label"] = net.label;
    j["eta"] = net.eta;
    j["eta_bar"] = net.eta_bar;
    j["weight"] = net.weight;
    j["dim_bound"] = net.dim_bound.describe();
    std::vector<std::string> ds;
    ds.reserve(net.candidates.size());
    for (const auto& c : net.candidates) ds.push_back(descriptor(c));
    j["candidates"] = ds;
    return j;
}

CandidateNet build_linear_net(const LinearSpace& V, double eta, const TimeDomain& T, const CovariateSet& X,
                              const LinearNetOptions& opt) {
    if (!(eta > 0.0)) throw std::domain_error("eta must be positive");
    Eigen::MatrixXd Q;
    int D = V.dim();
    if (V.axis == LinearSpace::Axis::covariate) {
        Q = covariate_basis(V, X);
        D = static_cast<int>(Q.cols());
    }
    const double step = std::min(eta, 2.0 * eta / std::sqrt(static_cast<double>(D)));
    const auto axis = grid_points(opt.box.first, opt.box.second, step);
    const double count = std::pow(static_cast<double>(axis.size()), D);
    if (count > static_cast<double>(opt.cap)) throw std::length_error("linear net exceeds the cardinality cap");
    const auto N = static_cast<Eigen::Index>(count);
    Eigen::MatrixXd coords(N, D);
    CandidateNet net;
    net.kind = NetKind::linear;
    net.label = "linear:" + V.describe() + ":eta=" + fmt17(eta);
    net.eta = net.eta_bar = eta;
    net.dim_bound = DimensionBound::constant(D);
    const auto ones = ones_vector(X.n());
    for (Eigen::Index c = 0; c < N; ++c) {
        Eigen::Index rest = c;
        for (int j = 0; j < D; ++j) {
            coords(c, j) = axis[static_cast<std::size_t>(rest % static_cast<Eigen::Index>(axis.size()))];
            rest /= static_cast<Eigen::Index>(axis.size());
        }
        const Eigen::VectorXd coef = coords.row(c).transpose();
        if (V.axis == LinearSpace::Axis::time) {
            ProductRoot r;
            r.kappa = 1.0;
            r.time = time_function(V, coef);
            r.cov = ones;
            r.cov_tag = 1;
            net.candidates.emplace_back(std::move(r));
        } else {
            net.candidates.emplace_back(
                make_product_root(1.0 / std::sqrt(T.measure()), PowerExpAtom{0.0, 0.0}, Q * coef));
        }
    }
    net.geometry = std::make_shared<LinearGeometry>(std::move(coords), opt.box);
    return net;
}

CandidateNet build_product_net(const LinearSpace& V1, const LinearSpace& V2, double eta, const TimeDomain& T,
                               const CovariateSet& X, const ProductNetOptions& opt) {
    (void)T;
    if (!(eta > 0.0)) throw std::domain_error("eta must be positive");
    if (!(opt.kappa_max > 0.0)) throw std::domain_error("product net needs kappa_max");
    if (V1.axis != LinearSpace::Axis::time || V2.axis != LinearSpace::Axis::covariate)
        throw std::invalid_argument("product net pairs a time space with a covariate space");
    const Eigen::MatrixXd Q = covariate_basis(V2, X);
    const int D1 = V1.dim(), D2 = static_cast<int>(Q.cols());
    const int K = static_cast<int>(std::ceil(kSqrt2 * opt.kappa_max / eta - 1e-12));
    const int k0 = std::max(1, static_cast<int>(std::floor(kSqrt2 * opt.kappa_min / eta)));
    std::vector<std::pair<std::vector<Eigen::VectorXd>, std::vector<Eigen::VectorXd>>> levels;
    std::size_t total = 0;
    for (int k = k0; k <= K; ++k) {
        const double delta = 1.0 / (kSqrt2 * k);
        levels.emplace_back(sphere_net(D1, delta), sphere_net(D2, delta));
        total += levels.back().first.size() * levels.back().second.size();
        if (total > opt.cap) throw std::length_error("product net exceeds the cardinality cap");
    }
    CandidateNet net;
    net.kind = NetKind::product;
    net.label = "product:" + V1.describe() + "x" + V2.describe() + ":eta=" + fmt17(eta);
    net.eta = net.eta_bar = eta;
    net.dim_bound = DimensionBound::constant(1.4 * (V1.dim() + V2.dim() + 1));
    Eigen::VectorXd kap(static_cast<Eigen::Index>(total));
    Eigen::MatrixXd F(static_cast<Eigen::Index>(total), D1), G(static_cast<Eigen::Index>(total), D2);
    Eigen::Index row = 0;
    for (int k = k0; k <= K; ++k) {
        const double kappa = k * eta / kSqrt2;
        const auto& [S1, S2] = levels[static_cast<std::size_t>(k - k0)];
        std::vector<std::shared_ptr<const Eigen::VectorXd>> gvals;
        std::vector<std::uint64_t> gtags;
        for (const auto& g : S2) {
            const ProductRoot tmp = make_product_root(1.0, PowerExpAtom{}, Q * g);
            gvals.push_back(tmp.cov);
            gtags.push_back(tmp.cov_tag);
        }
        for (const auto& f : S1) {
            const DyadicPolyAtom fa = time_function(V1, f);
            for (std::size_t gi = 0; gi < S2.size(); ++gi) {
                ProductRoot r;
                r.kappa = kappa;
                r.time = fa;
                r.cov = gvals[gi];
                r.cov_tag = gtags[gi];
                net.candidates.emplace_back(std::move(r));
                kap[row] = kappa;
                F.row(row) = f.transpose();
                G.row(row) = S2[gi].transpose();
                ++row;
            }
        }
    }
    net.geometry = std::make_shared<ProductGeometry>(std::move(kap), std::move(F), std::move(G), opt.kappa_min,
                                                     opt.kappa_max);
    return net;
}

CandidateNet build_cox_net(const LipschitzProfile& profile, double eta, const TimeDomain& T, const CovariateSet& X,
                           const CoxNetOptions& opt) {
    if (!(eta > 0.0)) throw std::domain_error("eta must be positive");
    const auto [r, R] = opt.b_range;
    if (!(R >= r) || !(r > profile.lower_end)) throw std::domain_error("b range empty or outside the profile domain");
    if (!(opt.rho_theta > 0.0) || !(opt.kappa_max > 0.0)) throw std::domain_error("cox net needs rho and kappa_max");
    const int msize = static_cast<int>(opt.support.size());
    for (int j : opt.support)
        if (j < 0 || j >= X.dim()) throw std::domain_error("support index outside the covariate dimension");
    Eigen::MatrixXd Xm(X.n(), msize);
    for (int c = 0; c < msize; ++c) Xm.col(c) = X.x.col(opt.support[static_cast<std::size_t>(c)]);

    const int K = static_cast<int>(std::ceil(kSqrt2 * opt.kappa_max / eta - 1e-12));
    const int k0 = std::max(1, static_cast<int>(std::floor(kSqrt2 * opt.kappa_min / eta)));
    const double rho_eff = opt.rho_theta * std::sqrt(std::max(1, msize));

    // theta lattices per level, collected in one table
    std::vector<Eigen::VectorXd> thetas;
    std::vector<std::vector<int>> level_thetas;
    std::vector<std::vector<double>> level_b;
    std::size_t total = 0;
    for (int k = k0; k <= K; ++k) {
        const double delta = 1.0 / (kSqrt2 * k);
        level_b.push_back(grid_points(r, R, 2.0 * delta / profile.rho_upper(r)));
        std::vector<int> ids;
        if (msize == 0) {
            if (thetas.empty()) thetas.emplace_back(Eigen::VectorXd::Zero(0));
            ids.push_back(0);
        } else {
            const double h = 2.0 * delta * std::exp(-3.0 * rho_eff) / std::sqrt(static_cast<double>(msize));
            const auto axis = grid_points(-opt.rho_theta, opt.rho_theta, h);
            const double cnt = std::pow(static_cast<double>(axis.size()), msize);
            if (cnt > static_cast<double>(opt.cap)) throw std::length_error("cox theta lattice exceeds the cap");
            const double keep_radius = opt.rho_theta + 0.5 * h * std::sqrt(static_cast<double>(msize));
            for (long code = 0; code < static_cast<long>(cnt); ++code) {
                Eigen::VectorXd th(msize);
                long rest = code;
                for (int j = 0; j < msize; ++j) {
                    th[j] = axis[static_cast<std::size_t>(rest % static_cast<long>(axis.size()))];
                    rest /= static_cast<long>(axis.size());
                }
                if (th.norm() > keep_radius) continue;
                ids.push_back(static_cast<int>(thetas.size()));
                thetas.push_back(th);
            }
        }
        total += ids.size() * level_b.back().size();
        if (total > opt.cap) throw std::length_error("cox net exceeds the cardinality cap");
        level_thetas.push_back(std::move(ids));
    }

    CandidateNet net;
    net.kind = NetKind::cox;
    std::string sup;
    for (int j : opt.support) sup += (sup.empty() ? "" : ",") + std::to_string(j);
    net.label = "cox:" + profile.name() + ":b=[" + fmt17(r) + "," + fmt17(R) + "]:m={" + sup + "}:eta=" + fmt17(eta);
    net.eta = net.eta_bar = eta;
    net.weight = sparse_cox_weight(std::max(X.dim(), msize), msize) + opt.extra_weight;
    net.dim_bound = DimensionBound::constant(1.4 * (1 + msize + 1));

    std::vector<double> theta_norm(thetas.size());
    for (std::size_t t = 0; t < thetas.size(); ++t) {
        const Eigen::VectorXd v = (Xm * thetas[t]).array().exp().matrix();
        theta_norm[t] = std::sqrt(v.squaredNorm() / X.n());
    }
    Eigen::VectorXd kap(static_cast<Eigen::Index>(total)), bs(static_cast<Eigen::Index>(total));
    std::vector<int> tidx;
    Eigen::Index row = 0;
    for (int k = k0; k <= K; ++k) {
        const double kappa = k * eta / kSqrt2;
        const auto li = static_cast<std::size_t>(k - k0);
        for (double b : level_b[li]) {
            const PowerExpAtom u = profile.atom(b);
            const double unorm = std::sqrt(*power_exp_moment(2.0 * u.p, 2.0 * u.q, T.t_min, T.t_max));
            for (int t : level_thetas[li]) {
                Eigen::VectorXd full = Eigen::VectorXd::Zero(std::max(X.dim(), msize));
                for (int j = 0; j < msize; ++j) full[opt.support[static_cast<std::size_t>(j)]] = thetas[static_cast<std::size_t>(t)][j];
                const double amp = kappa / (unorm * theta_norm[static_cast<std::size_t>(t)]);
                net.candidates.emplace_back(CoxRoot{amp, u.p, u.q, msize == 0 ? Eigen::VectorXd() : full});
                kap[row] = kappa;
                bs[row] = b;
                tidx.push_back(t);
                ++row;
            }
        }
    }
    Eigen::MatrixXd thetamat(static_cast<Eigen::Index>(thetas.size()), msize);
    for (std::size_t t = 0; t < thetas.size(); ++t) thetamat.row(static_cast<Eigen::Index>(t)) = thetas[t].transpose();
    net.geometry = std::make_shared<CoxGeometry>(profile, std::move(kap), std::move(bs), std::move(tidx),
                                                 std::move(thetamat), std::move(Xm), opt.b_range, opt.rho_theta,
                                                 opt.kappa_min, opt.kappa_max);
    return net;
}

ParametricRoot ParamFamily::root(double theta1, double theta2) const {
    if (kind == Kind::duane) return ParametricRoot{theta1, theta2, 0.0};
    return ParametricRoot{theta1, 0.5 * k, theta2};
}

double ParamFamily::sqdist(double a, double b, double a2, double b2) const {
    return kind == Kind::duane ? duane_sqdist(a, b, a2, b2) : expdecay_sqdist(a, b, a2, b2, k);
}

std::string ParamFamily::name() const { return kind == Kind::duane ? "duane" : "expdecay" + std::to_string(k); }

std::vector<Partition> enumerate_partitions(int n, int max_segments) {
    if (n < 1 || max_segments < 1 || max_segments > n) throw std::domain_error("partition sizes out of range");
    std::vector<Partition> out;
    double count = 0.0;
    for (int s = 1; s <= max_segments; ++s) count += std::exp(log_binomial(n - 1, s - 1));
    if (count > static_cast<double>(kCollectionCap)) throw std::length_error("too many partitions");
    std::vector<int> starts{0};
    std::function<void(int, int)> rec = [&](int next, int left) {
        out.push_back(Partition{starts, n});
        if (left == 0) return;
        for (int b = next; b < n; ++b) {
            starts.push_back(b);
            rec(b + 1, left - 1);
            starts.pop_back();
        }
    };
    rec(1, max_segments - 1);
    return out;
}

std::vector<CandidateNet> build_changepoint_collection(const ParamFamily& family, int n,
                                                       const ChangepointOptions& opt) {
    if (opt.amplitudes.empty() || opt.shapes.empty()) throw std::domain_error("empty parameter grid");
    const auto parts = enumerate_partitions(n, opt.max_segments);
    const int G = static_cast<int>(opt.amplitudes.size() * opt.shapes.size());
    double total = 0.0;
    for (const auto& P : parts) total += std::pow(static_cast<double>(G), P.segments());
    if (total > static_cast<double>(opt.cap)) throw std::length_error("change-point collection exceeds the cap");

    auto sorted = [](std::vector<double> v) {
        std::sort(v.begin(), v.end());
        return v;
    };
    auto max_gap = [](const std::vector<double>& v) {
        double g = 0.0;
        for (std::size_t k = 1; k < v.size(); ++k) g = std::max(g, v[k] - v[k - 1]);
        return g;
    };
    const auto A = sorted(opt.amplitudes), B = sorted(opt.shapes);
    const double r1 = std::max(std::abs(A.front()), std::abs(A.back()));
    double eta = 0.0;
    double R1 = 0.0, R2 = 0.0;
    if (family.kind == ParamFamily::Kind::duane) {
        if (!(B.front() > -0.5)) throw std::domain_error("duane exponents must exceed -1/2");
        const double r2 = 1.0 / (B.front() + 0.5);
        R1 = std::sqrt(r2);
        R2 = std::sqrt(2.0) * r1 * std::pow(r2, 1.5);
    } else {
        if (!(B.front() > 0.0)) throw std::domain_error("decay rates must be positive");
        const double r2 = 1.0 / B.front();
        R1 = expdecay_c1(family.k, r2);
        R2 = expdecay_c2(family.k, r1, r2);
    }
    eta = R1 * 0.5 * max_gap(A) + R2 * 0.5 * max_gap(B);
    if (eta <= 0.0) eta = 1e-12;

    std::vector<CandidateNet> nets;
    for (const auto& P : parts) {
        const int S = P.segments();
        const auto count = static_cast<Eigen::Index>(std::llround(std::pow(static_cast<double>(G), S)));
        Eigen::MatrixXi choice(count, S);
        CandidateNet net;
        net.kind = NetKind::changepoint;
        std::string lab = "cp:" + family.name() + ":[";
        for (int s = 0; s < S; ++s) lab += (s ? "," : "") + std::to_string(P.starts[static_cast<std::size_t>(s)]);
        net.label = lab + "]";
        net.eta = net.eta_bar = eta;
        net.weight = changepoint_weight(n, S);
        RobustDimension rd;
        rd.k = 2;
        rd.R = {std::max(R1, 1e-12), std::max(R2, 1e-12)};
        rd.alpha = {1.0, 1.0};
        rd.rho = {std::max(r1, 1e-12), std::max(std::max(std::abs(B.front()), std::abs(B.back())), 1e-12)};
        rd.dims = {S, S};
        net.dim_bound = DimensionBound::robust_form(rd);
        for (Eigen::Index c = 0; c < count; ++c) {
            PiecewiseRoot root;
            root.starts = P.starts;
            Eigen::Index rest = c;
            for (int s = 0; s < S; ++s) {
                const int g = static_cast<int>(rest % G);
                rest /= G;
                choice(c, s) = g;
                const auto gb = static_cast<std::size_t>(static_cast<int>(opt.shapes.size()));
                root.pieces.push_back(family.root(opt.amplitudes[static_cast<std::size_t>(g) / gb],
                                                  opt.shapes[static_cast<std::size_t>(g) % gb]));
            }
            if (S == 1) {
                net.candidates.emplace_back(root.pieces.front());
            } else {
                net.candidates.emplace_back(std::move(root));
            }
        }
        net.geometry =
            std::make_shared<ChangepointGeometry>(family, P, std::move(choice), opt.amplitudes, opt.shapes);
        nets.push_back(std::move(net));
    }
    return nets;
}

std::vector<CandidateNet> build_local_product_nets(const ProcessSample& sample, const TimeDomain& T,
                                                   const CovariateSet& X, const LocalProductOptions& opt,
                                                   const std::function<double(const CandidateNet&)>& radius) {
    const int n = X.n();
    if (sample.n() != n) throw std::invalid_argument("sample and covariates disagree on n");
    double total = static_cast<double>(sample.total());
    std::vector<CandidateNet> nets;
    for (int d1 : opt.time_depths) {
        for (int d2 : opt.cov_depths) {
            if (X.dim() == 0 && d2 != 0) continue;
            const LinearSpace V1{LinearSpace::Axis::time, d1, 0, T.t_min, T.t_max};
            const LinearSpace V2{LinearSpace::Axis::covariate, d2, 0, 0.0, 1.0};
            const Eigen::MatrixXd Q = covariate_basis(V2, X);
            const int cells1 = 1 << d1, cells2 = 1 << d2;
            Eigen::VectorXd tc = Eigen::VectorXd::Zero(cells1);
            Eigen::VectorXd xc = Eigen::VectorXd::Zero(cells2), xn = Eigen::VectorXd::Zero(cells2);
            const double h1 = (T.t_max - T.t_min) / cells1;
            std::vector<int> cell_of(static_cast<std::size_t>(n), 0);
            for (int i = 0; i < n; ++i) {
                if (X.dim() > 0)
                    cell_of[static_cast<std::size_t>(i)] =
                        std::clamp(static_cast<int>(std::floor(X.x(i, 0) * cells2)), 0, cells2 - 1);
                const auto& ev = sample.events[static_cast<std::size_t>(i)];
                xc[cell_of[static_cast<std::size_t>(i)]] += static_cast<double>(ev.size());
                xn[cell_of[static_cast<std::size_t>(i)]] += 1.0;
                for (double t : ev)
                    tc[std::clamp(static_cast<int>(std::floor((t - T.t_min) / h1)), 0, cells1 - 1)] += 1.0;
            }
            Eigen::VectorXd f = tc.cwiseSqrt();
            Eigen::VectorXd g(n);
            for (int i = 0; i < n; ++i) {
                const int c = cell_of[static_cast<std::size_t>(i)];
                g[i] = xn[c] > 0 ? std::sqrt(xc[c] / xn[c]) : 0.0;
            }
            const double kappa = std::sqrt(total / n);
            if (f.norm() > 0) f.normalize();
            else f.setConstant(1.0 / std::sqrt(static_cast<double>(cells1)));
            const double gn = std::sqrt(g.squaredNorm() / n);
            if (gn > 0) g /= gn;
            else g.setOnes();
            Eigen::VectorXd gc = Q.transpose() * g / n;

            CandidateNet net;
            net.kind = NetKind::local_product;
            net.label = "local:" + V1.describe() + "x" + V2.describe();
            net.weight = 1.0 + d1 + d2;
            net.dim_bound = DimensionBound::constant(1.4 * (V1.dim() + Q.cols() + 1));
            const double rad = radius(net);
            net.eta = net.eta_bar = rad;
            auto add = [&](double k, const Eigen::VectorXd& fc, const Eigen::VectorXd& gcoef) {
                if (!(k >= 0.0)) return;
                Eigen::VectorXd fcn = fc, gcn = gcoef;
                if (fcn.norm() == 0.0 || gcn.norm() == 0.0) return;
                fcn.normalize();
                gcn.normalize();
                net.candidates.emplace_back(make_product_root(k, time_function(V1, fcn), Q * gcn));
            };
            add(kappa, f, gc);
            const double kstep = opt.step_scale * rad / kSqrt2;
            for (int j = 1; j <= opt.kappa_steps; ++j) {
                add(kappa + j * kstep, f, gc);
                add(kappa - j * kstep, f, gc);
            }
            const double delta = kappa > 0 ? std::min(0.5, opt.step_scale * rad / (kSqrt2 * kappa)) : 0.5;
            if (opt.perturb_factors && cells1 > 1) {
                for (int j = 0; j < cells1; ++j) {
                    for (double sgn : {1.0, -1.0}) {
                        Eigen::VectorXd fp = f;
                        fp[j] += sgn * delta;
                        add(kappa, fp, gc);
                    }
                }
            }
            if (opt.perturb_factors && gc.size() > 1) {
                for (Eigen::Index j = 0; j < gc.size(); ++j) {
                    for (double sgn : {1.0, -1.0}) {
                        Eigen::VectorXd gp = gc;
                        gp[j] += sgn * delta;
                        add(kappa, f, gp);
                    }
                }
            }
            nets.push_back(std::move(net));
        }
    }
    return nets;
}

// ------------------------------------------------------- certification

CoveringReport certify_net(const CandidateNet& net, int trials, int centers, std::uint64_t seed) {
    CoveringReport rep;
    if (!net.geometry || net.geometry->size() == 0) return rep;
    const NetGeometry& geo = *net.geometry;
    SplitMix64 rng(seed);
    rep.trials = trials;
    rep.centers = std::min(centers, trials);
    rep.ball_bound = std::exp(4.0 * net.dim_bound(net.eta_bar));
    const auto CoxP = dynamic_cast<const CoxGeometry*>(&geo);
    for (int t = 0; t < trials; ++t) {
        const Eigen::VectorXd m = geo.sample_member(rng);
        double best = std::numeric_limits<double>::infinity();
        double inside = 0.0;
        Eigen::VectorXd w;
        (void)CoxP;
        for (Eigen::Index c = 0; c < geo.size(); ++c) {
            const double d = geo.distance(m, c);
            best = std::min(best, d);
            if (t < rep.centers && d <= 2.0 * net.eta_bar) inside += 1.0;
        }
        rep.max_distance = std::max(rep.max_distance, best);
        if (t < rep.centers) rep.max_ball_count = std::max(rep.max_ball_count, inside);
    }
    rep.covering_ok = rep.max_distance <= net.eta_bar * (1.0 + 1e-12);
    rep.cardinality_ok = rep.max_ball_count <= rep.ball_bound;
    return rep;
}

// ------------------------------------------------------- approximation

double holder_approx_error(const Eigen::VectorXd& f, int k, int depth, int degree) {
    if (k != 1 && k != 2) throw std::domain_error("holder approximation for k in {1, 2}");
    if (degree < 0 || degree > 3 || depth < 0) throw std::domain_error("degree must be in [0, 3]");
    const auto N = static_cast<int>(k == 1 ? f.size() : std::llround(std::sqrt(static_cast<double>(f.size()))));
    if (k == 2 && static_cast<Eigen::Index>(N) * N != f.size()) throw std::invalid_argument("2-d grid must be square");
    const int cells = 1 << depth;
    if (N % cells != 0) throw std::invalid_argument("grid size must be a multiple of 2^depth");
    const int m = N / cells;
    std::vector<std::pair<int, int>> powers;
    for (int p = 0; p <= degree; ++p)
        for (int q = 0; q <= (k == 2 ? degree - p : 0); ++q) powers.emplace_back(p, q);
    double sse = 0.0;
    const int cells_y = (k == 2) ? cells : 1;
    const int my = (k == 2) ? m : 1;
    for (int cx = 0; cx < cells; ++cx) {
        for (int cy = 0; cy < cells_y; ++cy) {
            Eigen::MatrixXd A(m * my, static_cast<Eigen::Index>(powers.size()));
            Eigen::VectorXd y(m * my);
            for (int a = 0; a < m; ++a) {
                for (int b = 0; b < my; ++b) {
                    const Eigen::Index r = a * my + b;
                    const double s = 2.0 * (a + 0.5) / m - 1.0;
                    const double u = (k == 2) ? 2.0 * (b + 0.5) / my - 1.0 : 0.0;
                    for (std::size_t c = 0; c < powers.size(); ++c)
                        A(r, static_cast<Eigen::Index>(c)) =
                            legendre_orthonormal(powers[c].first, s) * legendre_orthonormal(powers[c].second, u);
                    const int gx = cx * m + a, gy = cy * my + b;
                    y[r] = (k == 2) ? f[static_cast<Eigen::Index>(gx) * N + gy] : f[gx];
                }
            }
            const Eigen::VectorXd coef = A.colPivHouseholderQr().solve(y);
            sse += (A * coef - y).squaredNorm();
        }
    }
    const double cellsz = (k == 2) ? static_cast<double>(N) * N : static_cast<double>(N);
    return std::sqrt(sse / cellsz);
}

}  // namespace ppsel
