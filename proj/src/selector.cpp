#include "ppsel/selector.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <thread>
#include <unordered_map>

#include "ppsel/format.hpp"

namespace ppsel {

double collection_weight_sum(const Collection& nets) {
    double s = 0.0;
    for (const auto& net : nets) s += std::exp(-net.weight);
    return s;
}

Collection mix_collections(const std::vector<std::pair<Collection, double>>& parts) {
    double prior = 0.0;
    for (const auto& [c, w] : parts) {
        if (!(w >= 0.0)) throw std::domain_error("prior weights must be non-negative");
        prior += std::exp(-w);
    }
    if (prior > 1.0 + 1e-12) throw std::domain_error("prior weights violate sum exp(-w) <= 1");
    Collection out;
    for (const auto& [c, w] : parts) {
        for (CandidateNet net : c) {
            net.weight += w;
            out.push_back(std::move(net));
        }
    }
    return out;
}

Collection mix_collections(const std::vector<std::pair<Collection, double>>& parts, int n, const RadiusRule& rule,
                           const TestConstants& c) {
    Collection out = mix_collections(parts);
    for (auto& net : out) net.eta_bar = std::max(net.eta_bar, rule(net.dim_bound, net.weight, n, c));
    return out;
}

// ------------------------------------------------------------ radii

double RadiusRule::operator()(const DimensionBound& D, double weight, int n, const TestConstants& c) const {
    const double eta_v = eta_solver(D, n);
    switch (kind) {
        case Kind::paper: return radius_from_weight(eta_v, weight, n, c);
        case Kind::scaled: return scale * std::max(eta_v, std::sqrt(weight / n));
        case Kind::fixed: return 0.0;
    }
    return 0.0;
}

RadiusRule RadiusRule::from_name(const std::string& name, double scale) {
    RadiusRule r;
    r.scale = scale;
    if (name == "paper") r.kind = Kind::paper;
    else if (name == "scaled") r.kind = Kind::scaled;
    else if (name == "fixed") r.kind = Kind::fixed;
    else throw std::invalid_argument("unknown radius rule: " + name);
    return r;
}

std::string RadiusRule::name() const {
    switch (kind) {
        case Kind::paper: return "paper";
        case Kind::scaled: return "scaled";
        case Kind::fixed: return "fixed";
    }
    return "";
}

Collection assemble(const std::vector<NetRecipe>& recipes, int n, const RadiusRule& rule, const TestConstants& c) {
    Collection out;
    std::size_t total = 0;
    for (const auto& r : recipes) {
        const double eta_bar = r.fixed_eta_bar > 0.0 ? r.fixed_eta_bar : rule(r.dim, r.weight, n, c);
        CandidateNet net = r.build(eta_bar > 0.0 ? rule.resolution * eta_bar : 0.0);
        net.weight = r.weight;
        net.dim_bound = r.dim;
        if (!r.label.empty()) net.label = r.label;
        net.eta_bar = std::max(eta_bar, net.eta);
        total += net.candidates.size();
        if (total > kCollectionCap) throw std::length_error("collection exceeds the candidate cap");
        out.push_back(std::move(net));
    }
    return out;
}

// ------------------------------------------------------------ selection

void SelectionConfig::validate() const {
    if (!(epsilon > 0.0 && epsilon <= 4.0)) throw std::domain_error("epsilon must lie in (0, 4]");
    if (workers < 1) throw std::domain_error("workers must be >= 1");
    if (quadrature_nodes < 3) throw std::domain_error("quadrature needs at least 3 nodes");
}

std::string penalty_name(PenaltyForm p) { return p == PenaltyForm::squared ? "squared" : "literal"; }

PenaltyForm penalty_from_name(const std::string& s) {
    if (s == "squared") return PenaltyForm::squared;
    if (s == "literal") return PenaltyForm::literal;
    throw std::invalid_argument("unknown penalty form: " + s);
}

CandidateTable unify(const Collection& nets) {
    CandidateTable t;
    std::unordered_map<std::string, std::size_t> index;
    std::size_t total = 0;
    for (std::size_t k = 0; k < nets.size(); ++k) {
        const auto& net = nets[k];
        if (net.candidates.empty()) throw std::invalid_argument("net '" + net.label + "' has no candidates");
        if (!(net.eta_bar > 0.0)) throw std::domain_error("net '" + net.label + "' has no positive radius");
        total += net.candidates.size();
        if (total > kCollectionCap) throw std::length_error("collection exceeds the candidate cap");
        for (const auto& f : net.candidates) {
            std::string id = descriptor(f);
            auto it = index.find(id);
            if (it == index.end()) {
                index.emplace(id, t.ids.size());
                t.functions.push_back(f);
                t.ids.push_back(std::move(id));
                t.eta_bar.push_back(net.eta_bar);
                t.net.push_back(static_cast<int>(k));
            } else if (net.eta_bar < t.eta_bar[it->second]) {
                t.eta_bar[it->second] = net.eta_bar;
                t.net[it->second] = static_cast<int>(k);
            }
        }
    }
    return t;
}

double eta_bar_of(const SqrtFunction& f, const Collection& nets) {
    const std::string id = descriptor(f);
    double best = std::numeric_limits<double>::infinity();
    for (const auto& net : nets)
        for (const auto& g : net.candidates)
            if (descriptor(g) == id) best = std::min(best, net.eta_bar);
    if (!std::isfinite(best)) throw std::invalid_argument("candidate belongs to no net");
    return best;
}

namespace {

}  // namespace

QuadratureRule rule_for_atoms(const AtomTable& atoms, const TimeDomain& T, int nodes) {
    if (T.point_mass) return simpson_rule(T);
    bool singular = false;
    int depth = -1;
    for (int a = 0; a < atoms.size(); ++a) {
        singular = singular || atom_singular_at(atoms[a], T.t_min);
        if (const auto* d = std::get_if<DyadicPolyAtom>(&atoms[a]); d && d->lo == T.t_min && d->hi == T.t_max)
            depth = std::max(depth, d->depth);
    }
    const int npu = std::max(3, static_cast<int>(std::ceil(nodes / T.measure())));
    if (singular) return graded_rule(T, npu);
    if (depth >= 0) {
        // Cells nested in the finest dyadic level keep every jump on a cell boundary.
        int cells = 1 << depth;
        while (4 * cells < nodes) cells *= 2;
        return gauss_rule(T, cells, 4);
    }
    return simpson_rule(T, npu);
}

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752;

// mu-integrand of the statistic and the counting-measure term, from roots.
inline double mu_term(double r, double r2) {
    return 0.5 * std::sqrt(0.5 * (r * r + r2 * r2)) * (r2 - r) - 0.5 * (r2 * r2 - r * r);
}
inline double event_term(double r, double r2) {
    const double den = std::sqrt(r * r + r2 * r2);
    return den > 0.0 ? (r2 - r) / den : 0.0;
}

struct AtomData {
    Eigen::VectorXd node;    // |atom| on the quadrature nodes
    Eigen::VectorXd event;   // |atom| at every event, flattened by process
    bool power_exp = false;
    double p = 0.0, q = 0.0;
    bool step = false;       // degree-0 dyadic atom
    double lo = 0.0, hi = 0.0;
    int depth = 0;
    Eigen::VectorXd cell;    // |value| on each cell when step
};

struct Context {
    const ProcessSample* sample = nullptr;
    const QuadratureRule* Q = nullptr;
    const TimeDomain* T = nullptr;
    int n = 0;
    std::vector<std::size_t> offset;  // events of process i: [offset[i], offset[i+1])
    std::vector<AtomData> atoms;
    std::vector<std::vector<Segment>> layouts;
    double t_min = 0.0, t_max = 1.0;
    bool point_mass = false;
};

Context make_context(const std::vector<SqrtFunction>& cands, const ProcessSample& sample, const CovariateSet& X,
                     const TimeDomain& T, const QuadratureRule& Q) {
    Context ctx;
    ctx.T = &T;
    ctx.sample = &sample;
    ctx.Q = &Q;
    ctx.n = X.n();
    if (sample.n() != ctx.n) throw std::invalid_argument("sample and covariates disagree on n");
    ctx.offset.assign(static_cast<std::size_t>(ctx.n) + 1, 0);
    for (int i = 0; i < ctx.n; ++i)
        ctx.offset[static_cast<std::size_t>(i) + 1] =
            ctx.offset[static_cast<std::size_t>(i)] + sample.events[static_cast<std::size_t>(i)].size();
    std::vector<double> times;
    times.reserve(ctx.offset.back());
    for (const auto& ev : sample.events) times.insert(times.end(), ev.begin(), ev.end());
    ctx.point_mass = T.point_mass;
    ctx.t_min = T.t_min;
    ctx.t_max = T.t_max;

    AtomTable table;
    ctx.layouts.reserve(cands.size());
    for (const auto& f : cands) ctx.layouts.push_back(layout(f, X, table));
    ctx.atoms.resize(static_cast<std::size_t>(table.size()));
    for (int a = 0; a < table.size(); ++a) {
        const TimeAtom& atom = table[a];
        AtomData& d = ctx.atoms[static_cast<std::size_t>(a)];
        d.node.resize(Q.size());
        for (Eigen::Index k = 0; k < Q.size(); ++k) d.node[k] = std::abs(atom_value(atom, Q.nodes[k]));
        d.event.resize(static_cast<Eigen::Index>(times.size()));
        for (std::size_t e = 0; e < times.size(); ++e)
            d.event[static_cast<Eigen::Index>(e)] = std::abs(atom_value(atom, times[e]));
        if (const auto* pe = std::get_if<PowerExpAtom>(&atom)) {
            d.power_exp = true;
            d.p = pe->p;
            d.q = pe->q;
        } else if (const auto* dy = std::get_if<DyadicPolyAtom>(&atom); dy && dy->degree == 0 && !ctx.point_mass) {
            d.step = true;
            d.lo = dy->lo;
            d.hi = dy->hi;
            d.depth = dy->depth;
            const int cells = 1 << dy->depth;
            d.cell.resize(cells);
            const double h = (dy->hi - dy->lo) / cells;
            for (int c = 0; c < cells; ++c) d.cell[c] = std::abs(atom_value(atom, dy->lo + (c + 0.5) * h));
        }
    }
    return ctx;
}

// Integrals over T for one process with roots sa|A| and sb|B|.
struct SegmentIntegrals {
    double mu = 0.0;  // int mu_term
    double sq = 0.0;  // int (sa|A| - sb|B|)^2
};

SegmentIntegrals segment_integrals(const Context& ctx, int a, double sa, int b, double sb) {
    const AtomData& A = ctx.atoms[static_cast<std::size_t>(a)];
    const AtomData& B = ctx.atoms[static_cast<std::size_t>(b)];
    SegmentIntegrals out;
    // Exact for step atoms spanning the window; the quadrature would blur their jumps.
    if (A.step && B.step && A.lo == B.lo && A.hi == B.hi && A.lo == ctx.t_min && A.hi == ctx.t_max) {
        const int depth = std::max(A.depth, B.depth);
        const int cells = 1 << depth;
        const double h = (A.hi - A.lo) / cells;
        for (int c = 0; c < cells; ++c) {
            const double r = sa * A.cell[c >> (depth - A.depth)];
            const double r2 = sb * B.cell[c >> (depth - B.depth)];
            out.mu += h * mu_term(r, r2);
            out.sq += h * (r - r2) * (r - r2);
        }
        return out;
    }
    const Eigen::VectorXd& w = ctx.Q->weights;
    for (Eigen::Index k = 0; k < w.size(); ++k) {
        const double r = sa * A.node[k], r2 = sb * B.node[k];
        out.mu += w[k] * mu_term(r, r2);
        out.sq += w[k] * (r - r2) * (r - r2);
    }
    if (A.power_exp && B.power_exp && !ctx.point_mass) {
        const auto maa = power_exp_moment(2 * A.p, 2 * A.q, ctx.t_min, ctx.t_max);
        const auto mbb = power_exp_moment(2 * B.p, 2 * B.q, ctx.t_min, ctx.t_max);
        const auto mab = power_exp_moment(A.p + B.p, A.q + B.q, ctx.t_min, ctx.t_max);
        if (maa && mbb && mab && std::isfinite(*maa) && std::isfinite(*mbb) && std::isfinite(*mab))
            out.sq = std::max(0.0, sa * sa * *maa + sb * sb * *mbb - 2.0 * sa * sb * *mab);
    }
    return out;
}

double event_sum(const Context& ctx, int a, double sa, int b, double sb, int begin, int end) {
    const Eigen::VectorXd& A = ctx.atoms[static_cast<std::size_t>(a)].event;
    const Eigen::VectorXd& B = ctx.atoms[static_cast<std::size_t>(b)].event;
    double acc = 0.0;
    const auto e0 = static_cast<Eigen::Index>(ctx.offset[static_cast<std::size_t>(begin)]);
    const auto e1 = static_cast<Eigen::Index>(ctx.offset[static_cast<std::size_t>(end)]);
    for (Eigen::Index e = e0; e < e1; ++e) acc += event_term(sa * A[e], sb * B[e]);
    return acc;
}

// Walks the common refinement of two layouts.
template <class F>
void for_joint_segments(const std::vector<Segment>& L1, const std::vector<Segment>& L2, F&& f) {
    std::size_t p = 0, q = 0;
    while (p < L1.size() && q < L2.size()) {
        const int begin = std::max(L1[p].begin, L2[q].begin);
        const int end = std::min(L1[p].end, L2[q].end);
        if (end > begin) f(begin, end, L1[p], L2[q]);
        if (L1[p].end <= L2[q].end) ++p;
        else ++q;
    }
}

// Cached sums for a pair of (atom, scale) components: per-process integrals
// and prefix sums of the event terms.
struct ComponentTable {
    std::vector<std::pair<int, double>> comps;
    std::vector<std::vector<std::pair<int, int>>> cand_layout;  // (end, component) per segment
    std::vector<std::vector<int>> cand_begin;
    std::vector<SegmentIntegrals> integ;                           // upper triangle
    std::vector<std::vector<double>> prefix;                       // upper triangle
    std::size_t C = 0;
    std::size_t index(std::size_t i, std::size_t j) const { return i * C - i * (i + 1) / 2 + (j - i - 1); }
};

bool build_component_table(const Context& ctx, ComponentTable& tab) {
    std::map<std::pair<int, double>, int> ids;
    for (const auto& L : ctx.layouts)
        for (const auto& s : L) ids.emplace(std::make_pair(s.atom, s.scale), 0);
    const std::size_t C = ids.size();
    const std::size_t m = ctx.layouts.size();
    const double pair_cost = static_cast<double>(C) * static_cast<double>(C) / 2.0;
    if (C < 2 || 4.0 * static_cast<double>(C * C) > static_cast<double>(m * m) ||
        pair_cost * (ctx.n + 1.0) > 6e7)
        return false;
    int k = 0;
    for (auto& [key, id] : ids) {
        id = k++;
        tab.comps.push_back(key);
    }
    tab.C = C;
    for (const auto& L : ctx.layouts) {
        std::vector<std::pair<int, int>> row;
        std::vector<int> begins;
        for (const auto& s : L) {
            row.emplace_back(s.end, ids.at({s.atom, s.scale}));
            begins.push_back(s.begin);
        }
        tab.cand_layout.push_back(std::move(row));
        tab.cand_begin.push_back(std::move(begins));
    }
    const std::size_t P = C * (C - 1) / 2;
    tab.integ.resize(P);
    tab.prefix.resize(P);
    for (std::size_t i = 0; i < C; ++i) {
        for (std::size_t j = i + 1; j < C; ++j) {
            const auto [a, sa] = tab.comps[i];
            const auto [b, sb] = tab.comps[j];
            const std::size_t e = tab.index(i, j);
            tab.integ[e] = segment_integrals(ctx, a, sa, b, sb);
            auto& pre = tab.prefix[e];
            pre.assign(static_cast<std::size_t>(ctx.n) + 1, 0.0);
            for (int p = 0; p < ctx.n; ++p)
                pre[static_cast<std::size_t>(p) + 1] = pre[static_cast<std::size_t>(p)] + event_sum(ctx, a, sa, b, sb, p, p + 1);
        }
    }
    return true;
}

struct PairValue {
    double stat = 0.0;
    double h2 = 0.0;
};

PairValue pair_direct(const Context& ctx, std::size_t i, std::size_t j) {
    double mu = 0.0, ev = 0.0, sq = 0.0;
    for_joint_segments(ctx.layouts[i], ctx.layouts[j], [&](int begin, int end, const Segment& s1, const Segment& s2) {
        if (s1.atom == s2.atom && s1.scale == s2.scale) return;
        const SegmentIntegrals I = segment_integrals(ctx, s1.atom, s1.scale, s2.atom, s2.scale);
        mu += (end - begin) * I.mu;
        sq += (end - begin) * I.sq;
        ev += event_sum(ctx, s1.atom, s1.scale, s2.atom, s2.scale, begin, end);
    });
    return {(mu + kInvSqrt2 * ev) / ctx.n, 0.5 * sq / ctx.n};
}

PairValue pair_tabled(const Context& ctx, const ComponentTable& tab, std::size_t i, std::size_t j) {
    const auto& L1 = tab.cand_layout[i];
    const auto& L2 = tab.cand_layout[j];
    const auto& B1 = tab.cand_begin[i];
    const auto& B2 = tab.cand_begin[j];
    double mu = 0.0, ev = 0.0, sq = 0.0;
    std::size_t p = 0, q = 0;
    while (p < L1.size() && q < L2.size()) {
        const int begin = std::max(B1[p], B2[q]);
        const int end = std::min(L1[p].first, L2[q].first);
        const auto c1 = static_cast<std::size_t>(L1[p].second), c2 = static_cast<std::size_t>(L2[q].second);
        if (end > begin && c1 != c2) {
            const double sign = c1 < c2 ? 1.0 : -1.0;
            const std::size_t e = c1 < c2 ? tab.index(c1, c2) : tab.index(c2, c1);
            const auto& I = tab.integ[e];
            const auto& pre = tab.prefix[e];
            mu += sign * (end - begin) * I.mu;
            sq += (end - begin) * I.sq;
            ev += sign * (pre[static_cast<std::size_t>(end)] - pre[static_cast<std::size_t>(begin)]);
        }
        if (L1[p].first <= L2[q].first) ++p;
        else ++q;
    }
    return {(mu + kInvSqrt2 * ev) / ctx.n, 0.5 * sq / ctx.n};
}

// Visits every unordered pair i < j once across the workers; visit(worker, i, j, value).
template <class V>
void for_all_pairs(const Context& ctx, int workers, V&& visit) {
    const std::size_t m = ctx.layouts.size();
    ComponentTable tab;
    const bool tabled = build_component_table(ctx, tab);
    auto job = [&](int w) {
        for (std::size_t i = static_cast<std::size_t>(w); i < m; i += static_cast<std::size_t>(workers))
            for (std::size_t j = i + 1; j < m; ++j)
                visit(w, i, j, tabled ? pair_tabled(ctx, tab, i, j) : pair_direct(ctx, i, j));
    };
    if (workers <= 1 || m < 3) {
        job(0);
        return;
    }
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(job, w);
    for (auto& t : pool) t.join();
}

}  // namespace

QuadratureRule selection_rule(const CandidateTable& cands, const CovariateSet& X, const TimeDomain& T,
                              int quadrature_nodes) {
    AtomTable atoms;
    for (const auto& f : cands.functions) (void)layout(f, X, atoms);
    return rule_for_atoms(atoms, T, quadrature_nodes);
}

PairTables pair_tables(const std::vector<SqrtFunction>& cands, const ProcessSample& sample, const CovariateSet& X,
                       const TimeDomain& T, const QuadratureRule& Q, int workers) {
    Context ctx = make_context(cands, sample, X, T, Q);
    const auto m = static_cast<Eigen::Index>(cands.size());
    PairTables out{Eigen::MatrixXd::Zero(m, m), Eigen::MatrixXd::Zero(m, m)};
    for_all_pairs(ctx, workers, [&](int, std::size_t i, std::size_t j, PairValue v) {
        const auto a = static_cast<Eigen::Index>(i), b = static_cast<Eigen::Index>(j);
        out.statistics(a, b) = v.stat;
        out.statistics(b, a) = -v.stat;
        out.hellinger(a, b) = out.hellinger(b, a) = v.h2;
    });
    return out;
}

SelectionResult run_selection(const Collection& nets, const ProcessSample& sample, const CovariateSet& X,
                              const TimeDomain& T, const SelectionConfig& config) {
    config.validate();
    if (nets.empty()) throw std::invalid_argument("empty collection");
    if (collection_weight_sum(nets) > 1.0 + 1e-12) throw std::domain_error("weights violate sum exp(-w) <= 1");
    const CandidateTable cands = unify(nets);
    const auto m = cands.ids.size();
    const QuadratureRule Q = selection_rule(cands, X, T, config.quadrature_nodes);
    Context ctx = make_context(cands.functions, sample, X, T, Q);

    const TestConstants& c = config.constants;
    const bool keep = config.keep_matrix && m <= kMatrixLimit;
    SelectionResult res;
    res.epsilon = config.epsilon;
    res.penalty = config.penalty;
    res.constants = c.name();
    res.ids = cands.ids;
    res.eta_bar = Eigen::Map<const Eigen::VectorXd>(cands.eta_bar.data(), static_cast<Eigen::Index>(m));
    for (int k : cands.net) res.net_labels.push_back(nets[static_cast<std::size_t>(k)].label);
    if (keep) {
        res.statistics = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
        res.hellinger = res.statistics;
    }

    const int W = std::max(1, std::min<int>(config.workers, static_cast<int>(m)));
    std::vector<Eigen::VectorXd> gam(static_cast<std::size_t>(W), Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m)));
    std::vector<long long> ties(static_cast<std::size_t>(W), 0);
    auto z_of = [&](std::size_t i, std::size_t j) {
        return cands.eta_bar[j] * cands.eta_bar[j] - cands.eta_bar[i] * cands.eta_bar[i];
    };
    for_all_pairs(ctx, W, [&](int w, std::size_t i, std::size_t j, PairValue v) {
        const TestOutcome o = decide(v.stat, z_of(i, j), c, config.tie_seed, cands.ids[i], cands.ids[j]);
        auto& g = gam[static_cast<std::size_t>(w)];
        // accepting f_j puts it in R(f_i), otherwise f_i in R(f_j)
        const std::size_t loser = o.accepts_second ? i : j;
        g[static_cast<Eigen::Index>(loser)] = std::max(g[static_cast<Eigen::Index>(loser)], v.h2);
        if (o.tie) ++ties[static_cast<std::size_t>(w)];
        if (keep) {
            const auto a = static_cast<Eigen::Index>(i), b = static_cast<Eigen::Index>(j);
            res.statistics(a, b) = v.stat;
            res.statistics(b, a) = -v.stat;
            res.hellinger(a, b) = res.hellinger(b, a) = v.h2;
        }
    });
    res.gamma = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m));
    for (const auto& g : gam) res.gamma = res.gamma.cwiseMax(g);
    for (auto t : ties) res.ties += t;
    res.tests_run = static_cast<long long>(m) * static_cast<long long>(m - 1) / 2;

    res.objective.resize(static_cast<Eigen::Index>(m));
    for (std::size_t k = 0; k < m; ++k) {
        const double e = cands.eta_bar[k];
        const double pen = config.epsilon * (config.penalty == PenaltyForm::squared ? e * e : e);
        res.objective[static_cast<Eigen::Index>(k)] = std::max(res.gamma[static_cast<Eigen::Index>(k)], pen);
    }
    std::size_t best = 0;
    for (std::size_t k = 1; k < m; ++k) {
        const auto K = static_cast<Eigen::Index>(k), B = static_cast<Eigen::Index>(best);
        const auto key_k = std::make_tuple(res.objective[K], res.gamma[K], cands.eta_bar[k]);
        const auto key_b = std::make_tuple(res.objective[B], res.gamma[B], cands.eta_bar[best]);
        if (key_k < key_b || (key_k == key_b && cands.ids[k] < cands.ids[best])) best = k;
    }
    res.chosen = static_cast<int>(best);
    res.chosen_function = cands.functions[best];
    res.chosen_id = cands.ids[best];
    res.chosen_net_label = res.net_labels[best];

    if (keep) {
        res.rejection_sets.assign(m, {});
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = 0; j < m; ++j) {
                if (i == j) continue;
                const TestOutcome o = decide(res.statistics(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)),
                                             z_of(i, j), c, config.tie_seed, cands.ids[i], cands.ids[j]);
                if (o.accepts_second) res.rejection_sets[i].push_back(static_cast<int>(j));
            }
        }
    }
    return res;
}

nlohmann::json SelectionResult::to_json(bool with_tables) const {
    nlohmann::json j;
    j["chosen"] = chosen;
    j["chosen_descriptor"] = chosen_id;
    j["chosen_net"] = chosen_net_label;
    j["epsilon"] = fmt17(epsilon);
    j["penalty"] = penalty_name(penalty);
    j["constants"] = constants;
    j["candidates"] = ids.size();
    j["tests_run"] = tests_run;
    j["ties"] = ties;
    if (with_tables) {
        nlohmann::json rows = nlohmann::json::array();
        for (std::size_t k = 0; k < ids.size(); ++k) {
            const auto K = static_cast<Eigen::Index>(k);
            nlohmann::json r;
            r["id"] = ids[k];
            r["net"] = net_labels[k];
            r["eta_bar"] = fmt17(eta_bar[K]);
            r["gamma"] = fmt17(gamma[K]);
            r["objective"] = fmt17(objective[K]);
            if (!rejection_sets.empty()) r["rejected_by"] = rejection_sets[k];
            rows.push_back(std::move(r));
        }
        j["table"] = std::move(rows);
    }
    return j;
}

}  // namespace ppsel
