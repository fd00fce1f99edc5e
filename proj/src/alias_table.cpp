#include "steinbias/alias_table.hpp"

#include <cmath>
#include <limits>

#include "steinbias/errors.hpp"

namespace steinbias {

AliasTable::AliasTable(std::span<const double> weights) {
    const std::size_t n = weights.size();
    if (n == 0) throw DegenerateError("alias table: no atoms");
    if (n > std::numeric_limits<std::uint32_t>::max()) throw SizeError("alias table: too many atoms");

    total_ = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0) || !std::isfinite(w)) throw ValidationError("alias table: negative or non-finite weight");
        total_ += w;
    }
    if (total_ <= 0.0) throw DegenerateError("alias table: all weights are zero");

    prob_.resize(n);
    alias_.resize(n);
    std::vector<double> scaled(n);
    std::vector<std::uint32_t> small;
    std::vector<std::uint32_t> large;
    small.reserve(n);
    large.reserve(n);
    const double scale = static_cast<double>(n) / total_;
    for (std::size_t i = 0; i < n; ++i) {
        scaled[i] = weights[i] * scale;
        (scaled[i] < 1.0 ? small : large).push_back(static_cast<std::uint32_t>(i));
    }
    while (!small.empty() && !large.empty()) {
        const std::uint32_t s = small.back();
        small.pop_back();
        const std::uint32_t l = large.back();
        prob_[s] = scaled[s];
        alias_[s] = l;
        scaled[l] = (scaled[l] + scaled[s]) - 1.0;
        if (scaled[l] < 1.0) {
            large.pop_back();
            small.push_back(l);
        }
    }
    // Leftovers are 1 up to rounding.
    for (std::uint32_t l : large) {
        prob_[l] = 1.0;
        alias_[l] = l;
    }
    std::uint32_t fallback = 0;
    while (weights[fallback] <= 0.0) ++fallback;
    for (std::uint32_t s : small) {
        prob_[s] = weights[s] > 0.0 ? 1.0 : 0.0;
        alias_[s] = weights[s] > 0.0 ? s : fallback;
    }
}

}  // namespace steinbias
