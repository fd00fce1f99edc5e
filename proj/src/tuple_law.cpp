#include "steinbias/tuple_law.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "steinbias/errors.hpp"
#include "steinbias/kernels.hpp"

namespace steinbias {

double TupleForm::evaluate(const ScoreArray& a, const LabelTuple& labels) const {
    double v = 0.0;
    for (const auto& t : terms) v += t.coef * a(labels[t.row_slot], labels[t.col_slot]);
    return v;
}

bool TupleForm::admissible(const LabelTuple& labels) const {
    for (auto [s, t] : distinct) {
        if (labels[s] == labels[t]) return false;
    }
    return true;
}

void TupleForm::simplify(bool symmetric) {
    std::map<std::pair<std::uint8_t, std::uint8_t>, double> merged;
    for (const auto& t : terms) {
        auto key = std::make_pair(t.row_slot, t.col_slot);
        if (symmetric && key.first > key.second) std::swap(key.first, key.second);
        merged[key] += t.coef;
    }
    terms.clear();
    for (const auto& [key, coef] : merged) {
        if (coef != 0.0) terms.push_back({key.first, key.second, coef});
    }
}

double TupleForm::coef_l1() const {
    double s = 0.0;
    for (const auto& t : terms) s += std::abs(t.coef);
    return s;
}

namespace {

double power(double base, std::size_t exp) {
    double r = 1.0;
    for (std::size_t k = 0; k < exp; ++k) r *= base;
    return r;
}

}  // namespace

void SquareWeightedTuples::enumerate_weights(
    const ScoreArray& a, const TupleForm& form,
    const std::function<void(const LabelTuple& outer, std::span<const double> inner)>& visit) {
    const std::size_t n = a.n();
    const std::size_t slots = form.slots;
    if (slots == 0 || slots > kMaxSlots) throw ValidationError("tuple form: slot count out of range");
    const auto last = static_cast<std::uint8_t>(slots - 1);

    std::vector<double> diag(n);
    for (std::size_t i = 0; i < n; ++i) diag[i] = a(i, i);

    // Inner-slot exclusions: outer slots that must differ from the last one.
    std::vector<std::uint8_t> inner_distinct;
    std::vector<std::pair<std::uint8_t, std::uint8_t>> outer_distinct;
    for (auto [s, t] : form.distinct) {
        if (s == last && t != last) inner_distinct.push_back(t);
        else if (t == last && s != last) inner_distinct.push_back(s);
        else if (s != last && t != last) outer_distinct.emplace_back(s, t);
    }

    const auto& kern = kernels::active();
    std::vector<double> out(n);
    std::vector<const double*> rows;
    std::vector<double> coefs;
    LabelTuple labels{};
    const std::size_t outer_count = static_cast<std::size_t>(power(static_cast<double>(n), slots - 1));
    for (std::size_t outer = 0; outer < outer_count; ++outer) {
        std::size_t rest = outer;
        for (std::size_t s = slots - 1; s-- > 0;) {
            labels[s] = static_cast<std::uint32_t>(rest % n);
            rest /= n;
        }
        bool ok = true;
        for (auto [s, t] : outer_distinct) {
            if (labels[s] == labels[t]) {
                ok = false;
                break;
            }
        }
        if (!ok) {
            std::fill(out.begin(), out.end(), 0.0);
            visit(labels, out);
            continue;
        }
        double offset = 0.0;
        rows.clear();
        coefs.clear();
        for (const auto& t : form.terms) {
            const bool row_last = t.row_slot == last;
            const bool col_last = t.col_slot == last;
            if (!row_last && !col_last) {
                offset += t.coef * a(labels[t.row_slot], labels[t.col_slot]);
            } else if (row_last && col_last) {
                rows.push_back(diag.data());
                coefs.push_back(t.coef);
            } else if (col_last) {
                rows.push_back(a.row(labels[t.row_slot]).data());
                coefs.push_back(t.coef);
            } else {
                rows.push_back(a.transposed().data() + labels[t.col_slot] * n);
                coefs.push_back(t.coef);
            }
        }
        kern.squared_affine(offset, rows.data(), coefs.data(), rows.size(), out.data(), n);
        for (std::uint8_t s : inner_distinct) out[labels[s]] = 0.0;
        visit(labels, out);
    }
}

SquareWeightedTuples::SquareWeightedTuples(const ScoreArray& a, TupleForm form, Options options)
    : a_(&a), form_(std::move(form)), n_(a.n()) {
    const std::size_t slots = form_.slots;
    const double atoms = power(static_cast<double>(n_), slots);
    envelope_ = std::pow(form_.coef_l1() * a.c_sup(), 2);

    if (form_.terms.empty()) {
        mean_square_ = 0.0;
        admissible_count_ = 0.0;
        return;
    }

    if (atoms <= options.enumeration_cap) {
        const bool build_alias = atoms <= options.alias_cap;
        std::vector<double> weights;
        if (build_alias) weights.reserve(static_cast<std::size_t>(atoms));
        double total = 0.0;
        double admissible = 0.0;
        LabelTuple probe{};
        enumerate_weights(a, form_, [&](const LabelTuple& outer, std::span<const double> inner) {
            probe = outer;
            for (std::size_t l = 0; l < inner.size(); ++l) {
                probe[slots - 1] = static_cast<std::uint32_t>(l);
                if (form_.admissible(probe)) admissible += 1.0;
                total += inner[l];
            }
            if (build_alias) weights.insert(weights.end(), inner.begin(), inner.end());
        });
        admissible_count_ = admissible;
        mean_square_ = admissible > 0.0 ? total / admissible : 0.0;
        if (build_alias && total > 0.0) alias_ = AliasTable(weights);
        return;
    }

    // Too many atoms to enumerate: estimate the mean square.
    Rng rng(options.mc_seed);
    double sum = 0.0;
    double sum_sq = 0.0;
    for (std::uint64_t s = 0; s < options.mc_samples; ++s) {
        const LabelTuple t = sample_uniform_admissible(rng);
        const double v = form_.evaluate(a, t);
        const double w = v * v;
        sum += w;
        sum_sq += w * w;
    }
    const double m = static_cast<double>(options.mc_samples);
    mean_square_ = sum / m;
    mean_square_stderr_ = std::sqrt(std::max(0.0, (sum_sq / m - mean_square_ * mean_square_) / (m - 1.0)));
    // Admissible count is not needed on this path beyond reporting.
    admissible_count_ = atoms;
}

LabelTuple SquareWeightedTuples::sample_uniform_admissible(Rng& rng) const {
    LabelTuple t{};
    do {
        for (std::size_t s = 0; s < form_.slots; ++s) t[s] = static_cast<std::uint32_t>(rng.below(n_));
    } while (!form_.admissible(t));
    return t;
}

LabelTuple SquareWeightedTuples::sample(Rng& rng) const {
    if (!(mean_square_ > 0.0)) throw DegenerateError("square-weighted tuple law: all weights are zero");
    if (!alias_.empty()) {
        std::uint64_t idx = alias_.sample(rng);
        LabelTuple t{};
        for (std::size_t s = form_.slots; s-- > 0;) {
            t[s] = static_cast<std::uint32_t>(idx % n_);
            idx /= n_;
        }
        return t;
    }
    constexpr std::uint64_t kMaxTries = 100'000'000;
    for (std::uint64_t tries = 0; tries < kMaxTries; ++tries) {
        const LabelTuple t = sample_uniform_admissible(rng);
        const double v = form_.evaluate(*a_, t);
        if (rng.uniform() * envelope_ < v * v) return t;
    }
    throw DegenerateError("square-weighted tuple law: rejection sampler exhausted its iteration cap");
}

}  // namespace steinbias
