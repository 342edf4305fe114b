#include "ppsel/functions.hpp"

#include <cmath>
#include <stdexcept>

#include "ppsel/format.hpp"
#include "ppsel/rng.hpp"

namespace ppsel {

namespace {

double parametric_value(double amp, double power, double rate, double t) {
    return amp * atom_value(PowerExpAtom{power, rate}, t);
}

int piece_of(const PiecewiseRoot& p, int i) {
    int j = 0;
    while (j + 1 < static_cast<int>(p.starts.size()) && p.starts[static_cast<std::size_t>(j + 1)] <= i) ++j;
    return j;
}

std::string vec_text(const Eigen::VectorXd& v) {
    std::string s;
    for (Eigen::Index k = 0; k < v.size(); ++k) s += (k ? "," : "") + fmt17(v[k]);
    return s;
}

void push_segment(std::vector<Segment>& out, int i, int atom, double scale) {
    if (!out.empty() && out.back().end == i && out.back().atom == atom && out.back().scale == scale) {
        out.back().end = i + 1;
    } else {
        out.push_back(Segment{i, i + 1, atom, scale});
    }
}

void validate_piecewise(const PiecewiseRoot& p) {
    if (p.starts.empty() || p.starts.size() != p.pieces.size() || p.starts.front() != 0)
        throw std::invalid_argument("piecewise root needs starts[0] == 0 and one piece per start");
    for (std::size_t j = 1; j < p.starts.size(); ++j)
        if (p.starts[j] <= p.starts[j - 1]) throw std::invalid_argument("piecewise starts must increase");
}

}  // namespace

ProductRoot make_product_root(double kappa, TimeAtom time, Eigen::VectorXd cov) {
    ProductRoot r;
    r.kappa = kappa;
    r.time = std::move(time);
    r.cov_tag = hash_bytes(cov.data(), sizeof(double) * static_cast<std::size_t>(cov.size()));
    r.cov = std::make_shared<const Eigen::VectorXd>(std::move(cov));
    return r;
}

GridRoot make_grid_root(double lo, double hi, Eigen::MatrixXd values) {
    GridRoot g;
    g.lo = lo;
    g.hi = hi;
    g.tag = hash_bytes(values.data(), sizeof(double) * static_cast<std::size_t>(values.size()),
                       static_cast<std::uint64_t>(values.rows()));
    g.values = std::make_shared<const Eigen::MatrixXd>(std::move(values));
    return g;
}

double root_value(const SqrtFunction& g, double t, int i, const CovariateSet& X) {
    return std::visit(
        [&](const auto& r) -> double {
            using R = std::decay_t<decltype(r)>;
            if constexpr (std::is_same_v<R, ParametricRoot>) {
                return parametric_value(r.amplitude, r.power, r.rate, t);
            } else if constexpr (std::is_same_v<R, CoxRoot>) {
                double lin = 0.0;
                for (Eigen::Index j = 0; j < r.theta.size(); ++j) lin += r.theta[j] * X.x(i, j);
                return parametric_value(r.amplitude, r.power, r.rate, t) * std::exp(lin);
            } else if constexpr (std::is_same_v<R, PiecewiseRoot>) {
                const auto& p = r.pieces[static_cast<std::size_t>(piece_of(r, i))];
                return parametric_value(p.amplitude, p.power, p.rate, t);
            } else if constexpr (std::is_same_v<R, ProductRoot>) {
                return r.kappa * atom_value(r.time, t) * (*r.cov)[i];
            } else {
                const Eigen::MatrixXd& v = *r.values;
                if (t < r.lo || t > r.hi) return 0.0;
                const auto m = static_cast<double>(v.cols() - 1);
                const double pos = (t - r.lo) / (r.hi - r.lo) * m;
                const auto k = std::min<Eigen::Index>(static_cast<Eigen::Index>(pos), v.cols() - 2);
                const double w = pos - static_cast<double>(k);
                return (1.0 - w) * v(i, k) + w * v(i, k + 1);
            }
        },
        g);
}

std::string descriptor(const SqrtFunction& g) {
    return std::visit(
        [](const auto& r) -> std::string {
            using R = std::decay_t<decltype(r)>;
            if constexpr (std::is_same_v<R, ParametricRoot>) {
                return "par(" + fmt17(r.amplitude) + "," + fmt17(r.power) + "," + fmt17(r.rate) + ")";
            } else if constexpr (std::is_same_v<R, CoxRoot>) {
                return "cox(" + fmt17(r.amplitude) + "," + fmt17(r.power) + "," + fmt17(r.rate) + ";" +
                       vec_text(r.theta) + ")";
            } else if constexpr (std::is_same_v<R, PiecewiseRoot>) {
                std::string s = "pw(";
                for (std::size_t j = 0; j < r.starts.size(); ++j) {
                    const auto& p = r.pieces[j];
                    s += (j ? ";" : "") + std::to_string(r.starts[j]) + ":" + fmt17(p.amplitude) + "," +
                         fmt17(p.power) + "," + fmt17(p.rate);
                }
                return s + ")";
            } else if constexpr (std::is_same_v<R, ProductRoot>) {
                return "prod(" + fmt17(r.kappa) + ";" + atom_key(r.time) + ";" + std::to_string(r.cov->size()) +
                       ":" + std::to_string(r.cov_tag) + ")";
            } else {
                return "gridroot(" + fmt17(r.lo) + "," + fmt17(r.hi) + "," + std::to_string(r.values->rows()) +
                       "x" + std::to_string(r.values->cols()) + ":" + std::to_string(r.tag) + ")";
            }
        },
        g);
}

int AtomTable::intern(const TimeAtom& a) {
    std::string key = atom_key(a);
    auto it = index_.find(key);
    if (it != index_.end()) return it->second;
    const int id = static_cast<int>(atoms_.size());
    atoms_.push_back(a);
    index_.emplace(std::move(key), id);
    return id;
}

std::vector<Segment> layout(const SqrtFunction& g, const CovariateSet& X, AtomTable& atoms) {
    const int n = X.n();
    std::vector<Segment> out;
    std::visit(
        [&](const auto& r) {
            using R = std::decay_t<decltype(r)>;
            if constexpr (std::is_same_v<R, ParametricRoot>) {
                out.push_back(Segment{0, n, atoms.intern(PowerExpAtom{r.power, r.rate}), std::abs(r.amplitude)});
            } else if constexpr (std::is_same_v<R, CoxRoot>) {
                if (r.theta.size() > X.dim()) throw std::invalid_argument("theta longer than covariate dimension");
                const int a = atoms.intern(PowerExpAtom{r.power, r.rate});
                for (int i = 0; i < n; ++i) {
                    double lin = 0.0;
                    for (Eigen::Index j = 0; j < r.theta.size(); ++j) lin += r.theta[j] * X.x(i, j);
                    push_segment(out, i, a, std::abs(r.amplitude) * std::exp(lin));
                }
            } else if constexpr (std::is_same_v<R, PiecewiseRoot>) {
                validate_piecewise(r);
                for (std::size_t j = 0; j < r.starts.size(); ++j) {
                    const int b = r.starts[j];
                    const int e = (j + 1 < r.starts.size()) ? r.starts[j + 1] : n;
                    if (b >= n) throw std::invalid_argument("piecewise start beyond process count");
                    const auto& p = r.pieces[j];
                    out.push_back(Segment{b, e, atoms.intern(PowerExpAtom{p.power, p.rate}), std::abs(p.amplitude)});
                }
            } else if constexpr (std::is_same_v<R, ProductRoot>) {
                if (r.cov->size() != n) throw std::invalid_argument("covariate factor length differs from n");
                const int a = atoms.intern(r.time);
                for (int i = 0; i < n; ++i) push_segment(out, i, a, std::abs(r.kappa * (*r.cov)[i]));
            } else {
                if (r.values->rows() != n) throw std::invalid_argument("grid root rows differ from n");
                for (int i = 0; i < n; ++i) {
                    const int a = atoms.intern(make_grid_atom(r.lo, r.hi, r.values->row(i).transpose()));
                    push_segment(out, i, a, 1.0);
                }
            }
        },
        g);
    return out;
}

IntensitySurface IntensitySurface::constant(double lambda) {
    if (!(lambda >= 0.0)) throw std::invalid_argument("constant intensity must be >= 0");
    return {SurfaceKind::constant, ParametricRoot{std::sqrt(lambda), 0.0, 0.0}};
}

IntensitySurface IntensitySurface::power_law(double a, double b) {
    if (!(a >= 0.0)) throw std::invalid_argument("power law amplitude must be >= 0");
    return {SurfaceKind::power_law, ParametricRoot{std::sqrt(a), 0.5 * b, 0.0}};
}

IntensitySurface IntensitySurface::exp_decay(double a, double b, int k) {
    if (!(a >= 0.0) || k < 0) throw std::invalid_argument("exp decay needs a >= 0 and k >= 0");
    return {SurfaceKind::exp_decay, ParametricRoot{std::sqrt(a), 0.25 * k, 0.5 * b}};
}

IntensitySurface IntensitySurface::product_exp(double a, double power, double rate, Eigen::VectorXd theta) {
    return {SurfaceKind::product_exp, CoxRoot{a, power, rate, std::move(theta)}};
}

IntensitySurface IntensitySurface::piecewise(std::vector<int> starts, std::vector<ParametricRoot> pieces) {
    PiecewiseRoot p{std::move(starts), std::move(pieces)};
    validate_piecewise(p);
    return {SurfaceKind::piecewise, std::move(p)};
}

IntensitySurface IntensitySurface::grid(double lo, double hi, const Eigen::MatrixXd& intensity) {
    if ((intensity.array() < 0.0).any()) throw std::invalid_argument("grid intensity must be >= 0");
    return {SurfaceKind::grid, make_grid_root(lo, hi, intensity.cwiseSqrt())};
}

IntensitySurface IntensitySurface::product(double kappa, TimeAtom time, Eigen::VectorXd cov) {
    return {SurfaceKind::product, make_product_root(kappa, std::move(time), std::move(cov))};
}

IntensitySurface IntensitySurface::square_of(SqrtFunction root) { return {SurfaceKind::root, std::move(root)}; }

double IntensitySurface::root(double t, int i, const CovariateSet& X) const {
    return std::abs(root_value(root_, t, i, X));
}

double IntensitySurface::value(double t, int i, const CovariateSet& X) const {
    const double r = root_value(root_, t, i, X);
    return r * r;
}

}  // namespace ppsel
