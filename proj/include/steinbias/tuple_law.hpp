#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "steinbias/alias_table.hpp"
#include "steinbias/rng.hpp"
#include "steinbias/score_array.hpp"

namespace steinbias {

inline constexpr std::size_t kMaxSlots = 6;
using LabelTuple = std::array<std::uint32_t, kMaxSlots>;

/// coef * a[label[row_slot]][label[col_slot]].
struct LinearTerm {
    std::uint8_t row_slot = 0;
    std::uint8_t col_slot = 0;
    double coef = 0.0;
};

/// A linear form in the entries of a score array, evaluated on a tuple of
/// labels, together with which slots must carry distinct labels.
struct TupleForm {
    std::size_t slots = 0;
    std::vector<LinearTerm> terms;
    std::vector<std::pair<std::uint8_t, std::uint8_t>> distinct;

    double evaluate(const ScoreArray& a, const LabelTuple& labels) const;
    bool admissible(const LabelTuple& labels) const;
    /// Merges duplicate (row, col) terms and drops zero coefficients. With
    /// `symmetric`, a[x][y] and a[y][x] are merged too.
    void simplify(bool symmetric);
    /// sum |coef|, so |form| <= coef_l1() * C.
    double coef_l1() const;
};

/// The law on admissible label tuples with mass proportional to form^2.
///
/// Exact alias table when n^slots <= alias_cap, otherwise rejection from the
/// uniform admissible proposal with envelope (coef_l1 * C)^2. The mean of
/// form^2 over admissible tuples is computed by exhaustive enumeration when
/// n^slots <= enumeration_cap, otherwise estimated by Monte Carlo.
class SquareWeightedTuples {
public:
    struct Options {
        double alias_cap = 1e7;
        double enumeration_cap = 2e8;
        std::uint64_t mc_samples = 1'000'000;
        std::uint64_t mc_seed = 0x5eed;
    };

    SquareWeightedTuples(const ScoreArray& a, TupleForm form, Options options);
    SquareWeightedTuples(const ScoreArray& a, TupleForm form) : SquareWeightedTuples(a, std::move(form), Options{}) {}

    /// Mean of form^2 over admissible tuples.
    double mean_square() const noexcept { return mean_square_; }
    /// Present when mean_square() is a Monte Carlo estimate.
    std::optional<double> mean_square_stderr() const noexcept { return mean_square_stderr_; }
    /// Number of admissible tuples.
    double admissible_count() const noexcept { return admissible_count_; }
    bool uses_alias() const noexcept { return !alias_.empty(); }
    const TupleForm& form() const noexcept { return form_; }

    /// Requires mean_square() > 0.
    LabelTuple sample(Rng& rng) const;

    /// Enumerates every tuple of [0,n)^slots with its weight form^2 (zero for
    /// inadmissible ones), in base-n order with slot 0 most significant.
    /// The innermost slot runs through the vector kernel.
    static void enumerate_weights(const ScoreArray& a, const TupleForm& form,
                                  const std::function<void(const LabelTuple& outer, std::span<const double> inner)>& visit);

private:
    LabelTuple sample_uniform_admissible(Rng& rng) const;

    const ScoreArray* a_;
    TupleForm form_;
    std::size_t n_;
    double mean_square_ = 0.0;
    std::optional<double> mean_square_stderr_;
    double admissible_count_ = 0.0;
    double envelope_ = 0.0;
    AliasTable alias_;
};

}  // namespace steinbias
