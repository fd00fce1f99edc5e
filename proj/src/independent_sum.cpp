#include "steinbias/independent_sum.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>

#include "steinbias/errors.hpp"

namespace steinbias {

DiscreteLaw::DiscreteLaw(std::vector<double> values, std::vector<double> probs) {
    if (values.size() != probs.size() || values.empty()) throw ValidationError("discrete law: values and masses must be nonempty and of equal length");
    std::map<double, double> merged;
    double total = 0.0;
    for (std::size_t k = 0; k < values.size(); ++k) {
        if (!std::isfinite(values[k]) || !std::isfinite(probs[k]) || probs[k] < 0.0) throw ValidationError("discrete law: invalid atom or mass");
        merged[values[k]] += probs[k];
        total += probs[k];
    }
    if (std::abs(total - 1.0) > 1e-9) throw ValidationError("discrete law: masses must sum to 1");
    for (auto [v, p] : merged) {
        if (p == 0.0) continue;
        values_.push_back(v);
        probs_.push_back(p / total);
    }
    alias_ = AliasTable(probs_);
    for (std::size_t k = 0; k < values_.size(); ++k) mean_ += values_[k] * probs_[k];
    for (std::size_t k = 0; k < values_.size(); ++k) variance_ += (values_[k] - mean_) * (values_[k] - mean_) * probs_[k];
}

DiscreteLaw DiscreteLaw::two_point(double c) {
    if (!(c > 0.0)) throw ValidationError("two-point law: c must be positive");
    return DiscreteLaw({-c, c}, {0.5, 0.5});
}

DiscreteLaw DiscreteLaw::bernoulli(double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("bernoulli law: p must lie in [0,1]");
    return DiscreteLaw({0.0, 1.0}, {1.0 - p, p});
}

DiscreteLaw size_bias_discrete_oracle(const DiscreteLaw& law) {
    std::vector<double> values(law.values().begin(), law.values().end());
    std::vector<double> probs(law.size());
    double mu = 0.0;
    for (std::size_t k = 0; k < law.size(); ++k) {
        if (values[k] < 0.0) throw ValidationError("size bias: law has a negative atom");
        mu += values[k] * law.probs()[k];
    }
    if (!(mu > 0.0)) throw DegenerateError("size bias: mean is zero");
    for (std::size_t k = 0; k < law.size(); ++k) probs[k] = values[k] * law.probs()[k] / mu;
    return DiscreteLaw(std::move(values), std::move(probs));
}

ZeroBiasedLaw::ZeroBiasedLaw(const DiscreteLaw& law) {
    if (std::abs(law.mean()) > 1e-12) throw ValidationError("zero bias: summand law must have mean zero");
    const double var = law.variance();
    if (!(var > 0.0)) throw DegenerateError("zero bias: summand law has zero variance");
    knots_.assign(law.values().begin(), law.values().end());
    const std::size_t k = knots_.size();
    density_.resize(k - 1);
    std::vector<double> mass(k - 1);
    // Upper tail sums E[X 1(X > t)] for t between knots k and k+1.
    double tail = 0.0;
    for (std::size_t j = k; j-- > 1;) {
        tail += knots_[j] * law.probs()[j];
        density_[j - 1] = std::max(0.0, tail) / var;
        mass[j - 1] = density_[j - 1] * (knots_[j] - knots_[j - 1]);
    }
    cumulative_.resize(k);
    cumulative_[0] = 0.0;
    for (std::size_t j = 0; j + 1 < k; ++j) cumulative_[j + 1] = cumulative_[j] + mass[j];
    pick_ = AliasTable(mass);
}

double ZeroBiasedLaw::sample(Rng& rng) const {
    const auto j = pick_.sample(rng);
    return knots_[j] + rng.uniform() * (knots_[j + 1] - knots_[j]);
}

double ZeroBiasedLaw::cdf(double t) const {
    if (t <= knots_.front()) return 0.0;
    if (t >= knots_.back()) return 1.0;
    const auto it = std::upper_bound(knots_.begin(), knots_.end(), t);
    const std::size_t j = static_cast<std::size_t>(it - knots_.begin()) - 1;
    return (cumulative_[j] + density_[j] * (t - knots_[j])) / cumulative_.back();
}

IndependentSum::IndependentSum(std::vector<SummandGroup> groups) : groups_(std::move(groups)) {
    if (groups_.empty()) throw ValidationError("independent sum: no summands");
    for (const auto& g : groups_) {
        if (g.count == 0) throw ValidationError("independent sum: group with zero count");
        if (g.law.size() == 0) throw ValidationError("independent sum: empty summand law");
        summands_ += g.count;
        mean_ += static_cast<double>(g.count) * g.law.mean();
        variance_ += static_cast<double>(g.count) * g.law.variance();
    }
}

double IndependentSum::sample_sum_excluding(Rng& rng, std::size_t skip_group) const {
    double total = 0.0;
    for (std::size_t g = 0; g < groups_.size(); ++g) {
        const auto& law = groups_[g].law;
        std::uint64_t remaining = groups_[g].count - (g == skip_group ? 1 : 0);
        if (remaining == 0) continue;
        if (remaining == 1) {
            total += law.sample(rng);
            continue;
        }
        // Multinomial atom counts by sequential binomials.
        double mass_left = 1.0;
        const auto values = law.values();
        const auto probs = law.probs();
        for (std::size_t k = 0; k + 1 < values.size() && remaining > 0; ++k) {
            const double p = std::clamp(probs[k] / mass_left, 0.0, 1.0);
            std::binomial_distribution<std::uint64_t> bin(remaining, p);
            const std::uint64_t c = bin(rng);
            total += static_cast<double>(c) * values[k];
            remaining -= c;
            mass_left -= probs[k];
        }
        total += static_cast<double>(remaining) * values.back();
    }
    return total;
}

IndependentZeroBiasSampler::IndependentZeroBiasSampler(IndependentSum sum) : sum_(std::move(sum)) {
    for (const auto& g : sum_.groups()) {
        if (std::abs(g.law.mean()) > 1e-12) throw ValidationError("zero bias: summand law must have mean zero");
        group_weights_.push_back(static_cast<double>(g.count) * g.law.variance());
    }
    if (std::all_of(group_weights_.begin(), group_weights_.end(), [](double w) { return w == 0.0; }))
        throw DegenerateError("zero bias: every summand has zero variance");
    for (const auto& g : sum_.groups()) {
        if (g.law.variance() > 0.0) {
            biased_.emplace_back(g.law);
        } else {
            biased_.emplace_back(DiscreteLaw::two_point(1.0));  // never selected
        }
    }
    pick_group_ = AliasTable(group_weights_);
}

double IndependentZeroBiasSampler::group_probability(std::size_t g) const {
    return group_weights_.at(g) / pick_group_.total_weight();
}

IndependentDraw IndependentZeroBiasSampler::draw(Rng& rng) const {
    IndependentDraw d;
    d.group = pick_group_.sample(rng);
    d.x_chosen = sum_.groups()[d.group].law.sample(rng);
    const double rest = sum_.sample_sum_excluding(rng, d.group);
    d.x_biased = biased_[d.group].sample(rng);
    d.y = rest + d.x_chosen;
    d.y_biased = rest + d.x_biased;
    return d;
}

IndependentSizeBiasSampler::IndependentSizeBiasSampler(IndependentSum sum) : sum_(std::move(sum)) {
    for (const auto& g : sum_.groups()) {
        if (g.law.values().front() < 0.0) throw ValidationError("size bias: summand law has a negative atom");
        group_weights_.push_back(static_cast<double>(g.count) * g.law.mean());
    }
    if (std::all_of(group_weights_.begin(), group_weights_.end(), [](double w) { return w == 0.0; }))
        throw DegenerateError("size bias: every summand has mean zero");
    for (const auto& g : sum_.groups()) {
        biased_.push_back(g.law.mean() > 0.0 ? size_bias_discrete_oracle(g.law) : g.law);
    }
    pick_group_ = AliasTable(group_weights_);
}

double IndependentSizeBiasSampler::group_probability(std::size_t g) const {
    return group_weights_.at(g) / pick_group_.total_weight();
}

IndependentDraw IndependentSizeBiasSampler::draw(Rng& rng) const {
    IndependentDraw d;
    d.group = pick_group_.sample(rng);
    d.x_chosen = sum_.groups()[d.group].law.sample(rng);
    const double rest = sum_.sample_sum_excluding(rng, d.group);
    d.x_biased = biased_[d.group].sample(rng);
    d.y = rest + d.x_chosen;
    d.y_biased = rest + d.x_biased;
    return d;
}

}  // namespace steinbias
