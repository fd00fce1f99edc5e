#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "steinbias/alias_table.hpp"
#include "steinbias/rng.hpp"

namespace steinbias {

/// A finite discrete law. Atoms are kept sorted and distinct.
class DiscreteLaw {
public:
    DiscreteLaw() = default;
    /// Throws ValidationError on mismatched sizes, negative or non-finite
    /// masses, or masses not summing to 1 within 1e-9. Masses are renormalized.
    DiscreteLaw(std::vector<double> values, std::vector<double> probs);
    /// Uniform on {-c, +c}.
    static DiscreteLaw two_point(double c);
    static DiscreteLaw bernoulli(double p);

    std::span<const double> values() const noexcept { return values_; }
    std::span<const double> probs() const noexcept { return probs_; }
    std::size_t size() const noexcept { return values_.size(); }
    double mean() const noexcept { return mean_; }
    double variance() const noexcept { return variance_; }
    double sample(Rng& rng) const { return values_[alias_.sample(rng)]; }

private:
    std::vector<double> values_;
    std::vector<double> probs_;
    AliasTable alias_;
    double mean_ = 0.0;
    double variance_ = 0.0;
};

/// P(Y^s = y) = y P(Y = y) / mu. Requires nonnegative atoms and mu > 0.
DiscreteLaw size_bias_discrete_oracle(const DiscreteLaw& law);

/// The zero-biased law of a mean-zero finite discrete law: density
/// E[X 1(X > t)] / sigma^2, constant between consecutive atoms.
class ZeroBiasedLaw {
public:
    /// Throws ValidationError if |mean| > 1e-12, DegenerateError if the variance is 0.
    explicit ZeroBiasedLaw(const DiscreteLaw& law);
    double sample(Rng& rng) const;
    double cdf(double t) const;

private:
    std::vector<double> knots_;    // sorted atoms
    std::vector<double> density_;  // on (knots_[k], knots_[k+1])
    std::vector<double> cumulative_;
    AliasTable pick_;
};

/// `count` independent copies of `law`.
struct SummandGroup {
    DiscreteLaw law;
    std::uint64_t count = 1;
};

/// One draw of a biased independent sum: Y, its biased version, and the
/// replaced summand.
struct IndependentDraw {
    double y = 0.0;
    double y_biased = 0.0;
    std::size_t group = 0;  // group of the chosen index I
    double x_chosen = 0.0;
    double x_biased = 0.0;
};

/// Sum of independent summands, grouped by law so that sums of millions of
/// identically distributed terms cost O(groups x atoms) per draw: the atom
/// counts of each group are drawn from a multinomial.
class IndependentSum {
public:
    explicit IndependentSum(std::vector<SummandGroup> groups);

    const std::vector<SummandGroup>& groups() const noexcept { return groups_; }
    std::uint64_t summand_count() const noexcept { return summands_; }
    double mean() const noexcept { return mean_; }
    double variance() const noexcept { return variance_; }

    /// Sum of every summand except one copy from `skip_group` (none if
    /// skip_group >= group count).
    double sample_sum_excluding(Rng& rng, std::size_t skip_group) const;
    double sample_sum(Rng& rng) const { return sample_sum_excluding(rng, groups_.size()); }

private:
    std::vector<SummandGroup> groups_;
    std::uint64_t summands_ = 0;
    double mean_ = 0.0;
    double variance_ = 0.0;
};

/// Zero-bias coupling Y* = Y - X_I + X_I^*, P(I = alpha) proportional to Var X_alpha.
class IndependentZeroBiasSampler {
public:
    /// Throws ValidationError for a summand with |mean| > 1e-12 and
    /// DegenerateError when every variance is zero.
    explicit IndependentZeroBiasSampler(IndependentSum sum);
    const IndependentSum& sum() const noexcept { return sum_; }
    /// Probability that I falls in group g.
    double group_probability(std::size_t g) const;
    IndependentDraw draw(Rng& rng) const;

private:
    IndependentSum sum_;
    std::vector<ZeroBiasedLaw> biased_;
    std::vector<double> group_weights_;
    AliasTable pick_group_;
};

/// Size-bias coupling Y^s = Y - X_I + X_I^s, P(I = alpha) proportional to E X_alpha.
class IndependentSizeBiasSampler {
public:
    /// Throws ValidationError for a negative atom, DegenerateError when every mean is zero.
    explicit IndependentSizeBiasSampler(IndependentSum sum);
    const IndependentSum& sum() const noexcept { return sum_; }
    double group_probability(std::size_t g) const;
    IndependentDraw draw(Rng& rng) const;

private:
    IndependentSum sum_;
    std::vector<DiscreteLaw> biased_;
    std::vector<double> group_weights_;
    AliasTable pick_group_;
};

}  // namespace steinbias
