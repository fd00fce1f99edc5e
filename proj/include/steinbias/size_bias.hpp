#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "steinbias/independent_sum.hpp"
#include "steinbias/rng.hpp"

namespace steinbias {

/// Parameters of a sum Y = sum_alpha X_alpha of local statistics.
struct LocalModelSpec {
    enum class Kind { window, perm_pattern, torus_pattern, subgraph_count, hypercube_max };
    Kind kind = Kind::window;
    std::size_t n = 0;  // sites per axis (window, pattern, torus, subgraph)
    std::size_t m = 0;  // window length (window, pattern)
    std::size_t p = 0;  // dimension (torus, subgraph, hypercube)
    /// Window payoff: "rising" (indicator of an increasing window) or "mean"
    /// (window average, a general [0,1] payoff).
    std::string payoff = "rising";
    /// Pattern tau as 0-based ranks: tau[k] is the rank of window position k.
    std::vector<std::uint32_t> pattern;
    /// Torus: color distribution and the target color of each cube vertex,
    /// indexed by the offset bitmask in {0,1}^p.
    std::vector<double> color_probs;
    std::vector<std::uint32_t> target;
    /// Subgraph count: probability that an edge is present.
    double edge_probability = 0.5;
};

std::string to_string(LocalModelSpec::Kind kind);
LocalModelSpec::Kind parse_local_kind(const std::string& s);

/// A local statistic model: independent (or, for the permutation pattern,
/// uniformly permuted) underlying cells, index set A, and for each alpha the
/// cells G_alpha that X_alpha reads and the vertices V_alpha used for distances.
class LocalStatModel {
public:
    explicit LocalStatModel(LocalModelSpec spec);

    const LocalModelSpec& spec() const noexcept { return spec_; }
    LocalModelSpec::Kind kind() const noexcept { return spec_.kind; }
    std::size_t index_count() const noexcept { return cells_.size(); }
    std::size_t cell_count() const noexcept { return cell_count_; }
    /// Every X_alpha takes values in [0, M]; M = 1 for every shipped kind.
    double value_cap() const noexcept { return 1.0; }
    bool indicator() const noexcept { return !(spec_.kind == LocalModelSpec::Kind::window && spec_.payoff == "mean"); }
    /// E X_alpha, the same for every alpha.
    double mean_per_index() const noexcept { return mean_per_index_; }
    double mean() const noexcept { return mean_per_index_ * static_cast<double>(index_count()); }
    std::string describe() const;

    std::span<const std::uint32_t> cells(std::size_t alpha) const noexcept { return cells_[alpha]; }
    std::span<const std::uint32_t> vertices(std::size_t alpha) const noexcept { return vertices_[alpha]; }
    std::size_t distance(std::size_t alpha, std::size_t beta) const;

    void sample_state(Rng& rng, std::vector<double>& state) const;
    double evaluate(std::size_t alpha, std::span<const double> state) const;
    double total(std::span<const double> state) const;
    /// Replaces the cells of G_alpha by a draw from the X_alpha-weighted law.
    /// Throws DegenerateError if rejection sampling exceeds 10^6 proposals.
    void regenerate(std::size_t alpha, std::vector<double>& state, Rng& rng) const;

    /// Every state has equal probability and the state space is small.
    bool enumerable(double cap = 40320.0) const;
    /// Calls visit(state) for each of the equally likely states.
    void for_each_state(const std::function<void(std::span<const double>)>& visit) const;

private:
    double payoff(std::span<const double> window_values) const;

    LocalModelSpec spec_;
    std::size_t cell_count_ = 0;
    double mean_per_index_ = 0.0;
    std::vector<std::vector<std::uint32_t>> cells_;
    std::vector<std::vector<std::uint32_t>> vertices_;
    std::vector<double> cdf_colors_;
};

/// Dependency neighborhoods B_alpha (rho-balls), pair set D (d <= 3 rho),
/// rho, V(r) and the index weights p_alpha.
struct DependencyStructure {
    std::size_t index_count = 0;
    std::vector<std::vector<std::uint32_t>> neighborhoods;
    std::size_t b = 0;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
    std::size_t rho = 0;
    std::vector<std::size_t> V_table;  // V(r) for r = 0..3 rho
    /// V(r) is the same from every alpha for r <= 3 rho.
    bool distance_regular = false;
    std::vector<double> p;
    std::vector<double> p_cumulative;
    /// Sizes of the minimal sets from intersecting subgraphs, for comparison.
    std::size_t minimal_b = 0;
    std::size_t minimal_pair_count = 0;

    std::size_t V(std::size_t r) const { return V_table.at(r); }
};

/// Geometry by enumeration. p_alpha = 1/|A|, since E X_alpha does not depend
/// on alpha for any shipped model.
DependencyStructure build_dependency_structure(const LocalStatModel& model);

/// Monte Carlo estimate of p_alpha = E X_alpha / sum E X_beta with standard errors.
struct IndexWeightEstimate {
    std::vector<double> p;
    std::vector<double> stderr_p;
};
IndexWeightEstimate estimate_index_weights(const LocalStatModel& model, std::uint64_t reps, std::uint64_t seed);

/// State after the directional coupling in direction alpha.
std::vector<double> directional_draw(const LocalStatModel& model, std::size_t alpha, std::span<const double> state,
                                     Rng& rng);

struct SizeBiasDraw {
    double y = 0.0;
    double y_s = 0.0;
    std::uint32_t chosen = 0;
    std::vector<double> regenerated;  // new values on G_I, in cells(I) order
    double gap = 0.0;
    /// X_beta^I = X_beta for every beta outside B_I.
    bool independence_ok = true;
};

/// One (Y, Y^s) draw: state from the base law, I from p, G_I regenerated.
/// With `audit`, every X_beta outside B_I is re-evaluated and compared.
SizeBiasDraw size_bias_sum_draw(const LocalStatModel& model, const DependencyStructure& structure, Rng& rng,
                                bool audit = true);

/// Estimate of sqrt(Var(E(Y^s - Y | F))) with F the full underlying state.
struct DeltaEstimate {
    double value = 0.0;
    double stderr = 0.0;
    std::uint64_t outer = 0;
    std::uint64_t inner = 0;
};

/// Outer loop over states, inner loop over regenerations. The outer variance
/// of the inner means is corrected by the mean within-state variance / inner.
DeltaEstimate delta_proxy_estimate(const LocalStatModel& model, const DependencyStructure& structure,
                                   std::uint64_t outer, std::uint64_t inner, std::uint64_t seed);

/// Exact values on enumerable models with deterministic regeneration
/// (permutation patterns): the proxy over F and Delta = sqrt(Var(E(Y^s - Y | Y))).
struct ExactDelta {
    double proxy = 0.0;
    double delta = 0.0;
};
ExactDelta exact_delta(const LocalStatModel& model, const DependencyStructure& structure);

/// Exact law of Y over an enumerable model.
DiscreteLaw exact_sum_law(const LocalStatModel& model);

}  // namespace steinbias
