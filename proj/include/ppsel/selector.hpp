#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <json.hpp>
#include <string>
#include <utility>
#include <vector>

#include "ppsel/domain.hpp"
#include "ppsel/functions.hpp"
#include "ppsel/model_zoo.hpp"
#include "ppsel/point_process.hpp"
#include "ppsel/quadrature.hpp"
#include "ppsel/tests_engine.hpp"

namespace ppsel {

inline constexpr std::size_t kMatrixLimit = 2000;

using Collection = std::vector<CandidateNet>;

// Sum of exp(-weight) over the nets.
double collection_weight_sum(const Collection& nets);

// Union of the collections; every net's weight is raised by the prior weight
// of its source. Throws std::domain_error when sum exp(-prior) > 1.
Collection mix_collections(const std::vector<std::pair<Collection, double>>& parts);

struct RadiusRule;
// Same union, with each radius raised to what the rule gives for the new
// weight. Radii never shrink, so the nets stay valid coverings.
Collection mix_collections(const std::vector<std::pair<Collection, double>>& parts, int n, const RadiusRule& rule,
                           const TestConstants& c);

// ------------------------------------------------------------ radii

// How a net's selection radius follows from its dimension bound and weight.
//   paper:  (21 sqrt(3/(5a)) eta_V) v sqrt(21 Delta/(n a))
//   scaled: scale * (eta_V v sqrt(Delta/n))
//   fixed:  the builder's own radius
struct RadiusRule {
    enum class Kind { paper, scaled, fixed } kind = Kind::paper;
    double scale = 1.0;
    // Nets are built at resolution * eta_bar (<= eta_bar keeps the covering).
    double resolution = 1.0;

    double operator()(const DimensionBound& D, double weight, int n, const TestConstants& c) const;
    static RadiusRule from_name(const std::string& name, double scale = 1.0);
    std::string name() const;
};

// A net whose weight and dimension are known before it is built.
struct NetRecipe {
    std::string label;
    double weight = 0.0;
    DimensionBound dim;
    // > 0 replaces the rule for this net
    double fixed_eta_bar = 0.0;
    std::function<CandidateNet(double eta)> build;
};

// Radius per recipe, then the net at that resolution. Recipes whose builder
// fixes its own radius keep the larger of the two.
Collection assemble(const std::vector<NetRecipe>& recipes, int n, const RadiusRule& rule, const TestConstants& c);

// ------------------------------------------------------------ selection

enum class PenaltyForm { squared, literal };

struct SelectionConfig {
    double epsilon = 1.0;
    TestConstants constants = TestConstants::calibrated();
    std::uint64_t tie_seed = 0;
    // squared: gamma v eps eta_bar^2 (default); literal: gamma v eps eta_bar
    PenaltyForm penalty = PenaltyForm::squared;
    int workers = 1;
    bool keep_matrix = true;
    int quadrature_nodes = kDefaultNodesPerUnit;

    void validate() const;
};

// Candidates unified by descriptor, with the smallest radius of the nets
// containing them. First appearance fixes the order.
struct CandidateTable {
    std::vector<SqrtFunction> functions;
    std::vector<std::string> ids;
    std::vector<double> eta_bar;
    std::vector<int> net;  // net attaining eta_bar
};
CandidateTable unify(const Collection& nets);

// inf of eta_bar over nets containing f; throws when no net contains f.
double eta_bar_of(const SqrtFunction& f, const Collection& nets);

// The rule used for mu-integrals in selection.
// Graded when an atom is singular at t_min, composite Gauss aligned with the
// finest dyadic level when step-like atoms are present, Simpson otherwise.
QuadratureRule rule_for_atoms(const AtomTable& atoms, const TimeDomain& T, int nodes);
QuadratureRule selection_rule(const CandidateTable& cands, const CovariateSet& X, const TimeDomain& T,
                              int quadrature_nodes);

struct SelectionResult {
    int chosen = -1;
    SqrtFunction chosen_function;
    std::string chosen_id;
    std::string chosen_net_label;
    std::vector<std::string> ids;
    std::vector<std::string> net_labels;
    Eigen::VectorXd gamma, eta_bar, objective;
    // R(f) as candidate indices; filled when the test matrix is kept.
    std::vector<std::vector<int>> rejection_sets;
    // T(f_i, f_j) and H^2(f_i, f_j); empty unless kept.
    Eigen::MatrixXd statistics, hellinger;
    long long tests_run = 0;
    long long ties = 0;
    double epsilon = 1.0;
    PenaltyForm penalty = PenaltyForm::squared;
    std::string constants;

    IntensitySurface estimate() const { return IntensitySurface::square_of(chosen_function); }
    nlohmann::json to_json(bool with_tables = true) const;
};

SelectionResult run_selection(const Collection& nets, const ProcessSample& sample, const CovariateSet& X,
                              const TimeDomain& T, const SelectionConfig& config);

// Pairwise statistics and Hellinger distances for explicit candidates, the
// same engine run_selection uses. Entry (i, j) holds T(f_i, f_j).
struct PairTables {
    Eigen::MatrixXd statistics, hellinger;
};
PairTables pair_tables(const std::vector<SqrtFunction>& cands, const ProcessSample& sample, const CovariateSet& X,
                       const TimeDomain& T, const QuadratureRule& Q, int workers = 1);

std::string penalty_name(PenaltyForm p);
PenaltyForm penalty_from_name(const std::string& s);

}  // namespace ppsel
