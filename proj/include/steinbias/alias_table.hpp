#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "steinbias/rng.hpp"

namespace steinbias {

/// Walker/Vose alias table over nonnegative weights. O(1) sampling.
class AliasTable {
public:
    AliasTable() = default;
    /// Throws DegenerateError if every weight is zero, ValidationError on a
    /// negative or non-finite weight.
    explicit AliasTable(std::span<const double> weights);

    std::uint64_t sample(Rng& rng) const {
        const std::uint64_t slot = rng.below(prob_.size());
        return rng.uniform() < prob_[slot] ? slot : alias_[slot];
    }

    std::size_t size() const noexcept { return prob_.size(); }
    double total_weight() const noexcept { return total_; }
    bool empty() const noexcept { return prob_.empty(); }

private:
    std::vector<double> prob_;
    std::vector<std::uint32_t> alias_;
    double total_ = 0.0;
};

}  // namespace steinbias
