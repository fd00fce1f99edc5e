#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "steinbias/alias_table.hpp"
#include "steinbias/permutation.hpp"
#include "steinbias/rng.hpp"
#include "steinbias/score_array.hpp"
#include "steinbias/tuple_law.hpp"

namespace steinbias {

/// Model, score array and linearity constant of an exchangeable pair:
/// lambda = 2/(n-1) for the uniform law (pi'' = pi tau_IJ), 4/n for a
/// fixed cycle type (pi'' = tau_IJ pi tau_IJ).
struct ExchangeablePairSpec {
    PermutationModel model;
    ScoreArray score;
    double lambda = 0.0;

    /// Checks the array flags the model needs: row-centered for uniform;
    /// symmetric and zero-diagonal for a cycle type. Throws ValidationError.
    static ExchangeablePairSpec make(PermutationModel model, ScoreArray score);
    /// Same, without the flag checks; for demonstrating failures.
    static ExchangeablePairSpec unchecked(PermutationModel model, ScoreArray score);
};

struct ExchangeablePair {
    Permutation pi;
    Permutation pi2;
    std::uint32_t i = 0;
    std::uint32_t j = 0;
    double y1 = 0.0;
    double y2 = 0.0;
};

/// pi'' = pi o tau_IJ, (I,J) uniform over ordered distinct pairs.
ExchangeablePair exchangeable_pair_uniform(const ScoreArray& a, const Permutation& pi, Rng& rng);
/// pi'' = tau_IJ pi tau_IJ. Throws ValidationError unless a is symmetric with zero diagonal.
ExchangeablePair exchangeable_pair_cycle_type(const ScoreArray& a, const Permutation& pi, Rng& rng);

/// The partner permutation for the model kind.
Permutation pair_partner(PermutationModel::Kind kind, const Permutation& pi, std::uint32_t i, std::uint32_t j);

/// Exact average of Y'' over all n(n-1) ordered pairs (I,J) for fixed pi,
/// each Y'' recomputed from scratch.
double partner_average(PermutationModel::Kind kind, const ScoreArray& a, const Permutation& pi);

/// One atom of a joint law of (Y', Y'').
struct PairAtom {
    double y1 = 0.0;
    double y2 = 0.0;
    double prob = 0.0;
};

/// Exact joint law of (Y', Y'') over support x ordered pairs, atoms merged on
/// a 1e-9 relative grid. Throws SizeError above `state_cap` states.
std::vector<PairAtom> enumerate_pair_law(const ExchangeablePairSpec& spec, double state_cap = 1e6);

/// Reweights a pair law by (y'-y'')^2 / E(Y'-Y'')^2. Zero-weight atoms are
/// dropped. Throws DegenerateError if E(Y'-Y'')^2 = 0.
std::vector<PairAtom> square_bias_oracle(std::span<const PairAtom> pair_law);

/// sum p (y1 - y2)^2.
double pair_law_square_moment(std::span<const PairAtom> pair_law);

/// u y_dagger + (1-u) y_ddagger. Throws ValidationError if u is outside [0,1].
double assemble_y_star(double y_dagger, double y_ddagger, double u);

/// Index set I outside which pi, pi-dagger and pi-double-dagger agree.
struct TouchedSet {
    std::array<std::uint32_t, 24> idx{};
    std::uint8_t size = 0;

    void insert(std::uint32_t x);
    std::span<const std::uint32_t> view() const noexcept { return {idx.data(), size}; }
};

/// One realization of the coupled quadruple (Y, Y-dagger, Y-double-dagger, Y*).
struct ZeroBiasDraw {
    double y = 0.0;
    double y_dagger = 0.0;
    double y_ddagger = 0.0;
    double y_star = 0.0;
    double u = 0.0;
    double s = 0.0;
    double t_prime = 0.0;
    double t_dagger = 0.0;
    double t_ddagger = 0.0;
    TouchedSet touched;
    double gap = 0.0;
};

/// Permutations behind a draw, for audits.
struct DrawDetail {
    Permutation pi;
    Permutation pi_dagger;
    Permutation pi_ddagger;
    std::uint32_t i_dagger = 0;
    std::uint32_t j_dagger = 0;
    int pattern = -1;  // cycle-type sampler only
};

/// Surgical zero-bias coupling for Y = sum a_{i,pi(i)}, pi uniform on S_n.
///
/// (I,K,J,L) is drawn over {i != j, k != l} with mass proportional to
/// [(a_ik + a_jl) - (a_il + a_jk)]^2; pi-dagger is pi with images moved so
/// that pi-dagger(I) = K and pi-dagger(J) = L, by two successive image swaps;
/// pi-double-dagger = pi-dagger o tau_IJ. |Y* - Y| <= 8C.
class UniformZeroBiasSampler {
public:
    /// Requires a row-centered array, n >= 3. Throws DegenerateError when
    /// every tuple weight vanishes.
    explicit UniformZeroBiasSampler(const ScoreArray& a, SquareWeightedTuples::Options options = {});

    double lambda() const noexcept { return lambda_; }
    double gap_bound() const noexcept { return 8.0 * a_->c_sup(); }
    /// E(Y'-Y'')^2 = mean tuple weight; equals 2 lambda sigma^2.
    double square_moment() const noexcept { return tuples_.mean_square(); }
    const SquareWeightedTuples& tuples() const noexcept { return tuples_; }

    ZeroBiasDraw draw(Rng& rng, DrawDetail* detail = nullptr) const;

private:
    const ScoreArray* a_;
    PermutationModel model_;
    double lambda_;
    SquareWeightedTuples tuples_;
};

/// Mass of one coincidence pattern of (pi^-1 I, I, pi I, pi^-1 J, J, pi J)
/// under the square-biased law.
struct PatternMass {
    std::string pattern;         // restricted growth string, e.g. "012345"
    std::string case_name;       // event of the difference decomposition
    std::size_t distinct = 0;    // number of distinct labels
    double pair_fraction = 0.0;  // P(pattern) under the base law
    double mean_square = 0.0;    // E[(Y'-Y'')^2 | pattern]
    std::optional<double> mean_square_stderr;
    double mass = 0.0;           // pair_fraction * mean_square / E(Y'-Y'')^2
};

/// Surgical zero-bias coupling for Y = sum a_{i,pi(i)}, pi uniform on a
/// conjugacy class without fixed points.
///
/// The difference Y' - Y'' is a function of the labels at the positions
/// (pi^-1 I, I, pi I, pi^-1 J, J, pi J), and its form depends only on which
/// of those positions coincide. Each coincidence pattern is one square-
/// weighted tuple law. A draw picks a pattern by its square-biased mass,
/// a base triple (pi, I, J) with that pattern, fresh labels i-dagger from the
/// pattern's tuple law, and sets pi-dagger = sigma pi sigma^-1 with sigma
/// sending i to i-dagger; pi-double-dagger = tau pi-dagger tau with
/// tau = tau_{I-dagger, J-dagger}. |Y* - Y| <= 40C.
class CycleTypeZeroBiasSampler {
public:
    /// Requires a symmetric zero-diagonal array and a fixed-cycle-type model.
    CycleTypeZeroBiasSampler(const ScoreArray& a, const PermutationModel& model,
                             SquareWeightedTuples::Options options = {});

    double lambda() const noexcept { return lambda_; }
    double gap_bound() const noexcept { return 40.0 * a_->c_sup(); }
    /// E(Y'-Y'')^2 summed over patterns; equals 2 lambda sigma^2.
    double square_moment() const noexcept { return square_moment_; }
    const std::vector<PatternMass>& pattern_masses() const noexcept { return masses_; }
    /// Masses summed by case name.
    std::vector<std::pair<std::string, double>> case_masses() const;

    ZeroBiasDraw draw(Rng& rng, DrawDetail* detail = nullptr) const;

private:
    struct Pattern {
        std::array<std::uint8_t, 6> slot{};  // position -> label slot
        std::size_t distinct = 0;
        std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;  // (I, J) in the representative
        std::optional<SquareWeightedTuples> tuples;
    };

    const ScoreArray* a_;
    PermutationModel model_;
    double lambda_;
    double square_moment_ = 0.0;
    std::vector<std::uint32_t> representative_;
    std::vector<Pattern> patterns_;
    std::vector<PatternMass> masses_;
    AliasTable pick_pattern_;
};

/// Independent cross-check of the square-biased pair law: propose (pi, I, J)
/// from the base law and accept with probability (Y'-Y'')^2 / (gap bound)^2.
class RejectionPairSampler {
public:
    explicit RejectionPairSampler(const ExchangeablePairSpec& spec);
    /// (Y-dagger, Y-double-dagger).
    std::pair<double, double> draw(Rng& rng) const;

private:
    const ExchangeablePairSpec* spec_;
    double envelope_;
};

/// Coincidence pattern of the six positions as a restricted growth string.
std::string coincidence_pattern(const Permutation& pi, std::uint32_t i, std::uint32_t j);

/// Binary draw spool: each record is the 11 fields of ZeroBiasDraw as
/// little-endian f64 in declaration order, with `touched` written as its size.
class DrawSpool {
public:
    explicit DrawSpool(const std::filesystem::path& path);
    void write(const ZeroBiasDraw& d);
    static constexpr std::size_t kFields = 11;
    static std::vector<std::array<double, kFields>> read(const std::filesystem::path& path);

private:
    std::ofstream out_;
};

}  // namespace steinbias
