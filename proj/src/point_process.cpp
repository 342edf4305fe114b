#include "ppsel/point_process.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "ppsel/rng.hpp"

namespace ppsel {

std::size_t ProcessSample::total() const {
    std::size_t s = 0;
    for (const auto& e : events) s += e.size();
    return s;
}

namespace {

const Segment& segment_of(const std::vector<Segment>& segs, int i) {
    auto it = std::upper_bound(segs.begin(), segs.end(), i, [](int v, const Segment& s) { return v < s.end; });
    return *it;
}

std::vector<double> simulate_one(const TimeAtom& atom, double scale, const TimeDomain& T, SplitMix64& rng) {
    std::vector<double> out;
    if (scale == 0.0) return out;
    if (T.point_mass) {
        const double v = scale * atom_value(atom, T.t_min);
        const double mean = v * v;
        if (mean > 0.0) {
            std::poisson_distribution<long> pois(mean);
            out.assign(static_cast<std::size_t>(pois(rng)), T.t_min);
        }
        return out;
    }
    const auto* pe = std::get_if<PowerExpAtom>(&atom);
    if (pe && pe->q == 0.0 && pe->p < 0.0 && T.t_min <= 0.0) {
        // Lambda(t) = scale^2 t^{2p+1}/(2p+1); invert at unit-rate arrivals.
        const double e = 2.0 * pe->p + 1.0;
        if (e <= 0.0) throw std::domain_error("intensity not integrable at the origin");
        const double c = scale * scale / e;
        double acc = 0.0;
        for (;;) {
            acc += rng.exponential();
            const double t = std::pow(acc / c, 1.0 / e);
            if (t > T.t_max) break;
            out.push_back(t);
        }
        return out;
    }
    const double sup = scale * atom_sup_abs(atom, T.t_min, T.t_max);
    const double lmax = sup * sup;
    if (!std::isfinite(lmax)) throw std::domain_error("intensity unbounded on the time domain");
    if (lmax <= 0.0) return out;
    double t = T.t_min;
    for (;;) {
        t += rng.exponential() / lmax;
        if (t > T.t_max) break;
        const double v = scale * atom_value(atom, t);
        if (rng.uniform() * lmax < v * v) out.push_back(t);
    }
    return out;
}

}  // namespace

ProcessSample simulate(const IntensitySurface& s, const CovariateSet& X, const TimeDomain& T, std::uint64_t seed) {
    AtomTable atoms;
    const auto segs = layout(s.root_function(), X, atoms);
    ProcessSample sample;
    sample.events.resize(static_cast<std::size_t>(X.n()));
    for (int i = 0; i < X.n(); ++i) {
        const Segment& sg = segment_of(segs, i);
        SplitMix64 rng = SplitMix64::stream(seed, static_cast<std::uint64_t>(i));
        sample.events[static_cast<std::size_t>(i)] = simulate_one(atoms[sg.atom], sg.scale, T, rng);
    }
    return sample;
}

Eigen::VectorXd integrate_intensity(const IntensitySurface& s, const TimeDomain& T, const CovariateSet& X,
                                    const QuadratureRule& Q) {
    AtomTable atoms;
    const auto segs = layout(s.root_function(), X, atoms);
    Eigen::VectorXd out(X.n());
    std::vector<double> per_atom(static_cast<std::size_t>(atoms.size()), std::numeric_limits<double>::quiet_NaN());
    for (const auto& sg : segs) {
        double& base = per_atom[static_cast<std::size_t>(sg.atom)];
        if (std::isnan(base)) {
            const TimeAtom& a = atoms[sg.atom];
            std::optional<double> closed;
            if (const auto* pe = std::get_if<PowerExpAtom>(&a); pe && !T.point_mass)
                closed = power_exp_moment(2.0 * pe->p, 2.0 * pe->q, T.t_min, T.t_max);
            if (closed) {
                base = *closed;
            } else {
                base = Q.integrate([&a](double t) {
                    const double v = atom_value(a, t);
                    return v * v;
                });
            }
            if (!std::isfinite(base)) throw std::domain_error("intensity integral diverges");
        }
        for (int i = sg.begin; i < sg.end; ++i) out[i] = sg.scale * sg.scale * base;
    }
    return out;
}

double counting_integral(const std::function<double(double)>& g, const std::vector<double>& events) {
    double acc = 0.0;
    for (double t : events) acc += g(t);
    return acc;
}

TimeDomain truncate_domain(const IntensitySurface& s, const CovariateSet& X, double t_min, double tail) {
    AtomTable atoms;
    const auto segs = layout(s.root_function(), X, atoms);
    double t_end = t_min;
    for (const auto& sg : segs) {
        const TimeAtom& a = atoms[sg.atom];
        double hi = 0.0;
        if (const auto* pe = std::get_if<PowerExpAtom>(&a)) {
            if (pe->q <= 0.0) throw std::domain_error("cannot truncate an intensity without decay");
            auto mass_beyond = [&](double t) {
                auto m = power_exp_moment(2.0 * pe->p, 2.0 * pe->q, t, std::numeric_limits<double>::infinity());
                if (!m) throw std::domain_error("no closed-form tail for this intensity");
                return sg.scale * sg.scale * *m;
            };
            double lo = t_min;
            hi = std::max(t_min + 1.0, 2.0 * t_min);
            while (mass_beyond(hi) >= tail) {
                lo = hi;
                hi = t_min + 2.0 * (hi - t_min);
            }
            for (int it = 0; it < 80; ++it) {
                const double mid = 0.5 * (lo + hi);
                (mass_beyond(mid) >= tail ? lo : hi) = mid;
            }
        } else if (const auto* dp = std::get_if<DyadicPolyAtom>(&a)) {
            hi = dp->hi;
        } else {
            hi = std::get<GridAtom>(a).hi;
        }
        t_end = std::max(t_end, hi);
    }
    return TimeDomain::interval(t_min, t_end, true);
}

nlohmann::json sample_to_json(const ProcessSample& sample) {
    nlohmann::json j;
    j["n"] = sample.n();
    j["events"] = sample.events;
    return j;
}

ProcessSample sample_from_json(const nlohmann::json& j) {
    ProcessSample s;
    s.events = j.at("events").get<std::vector<std::vector<double>>>();
    if (j.contains("n") && j.at("n").get<int>() != s.n()) throw std::invalid_argument("sample length mismatch");
    return s;
}

}  // namespace ppsel
