#include "steinbias/moments.hpp"

#include <cmath>
#include <vector>

#include "steinbias/errors.hpp"
#include "steinbias/kernels.hpp"
#include "steinbias/parallel.hpp"

namespace steinbias {

double combinatorial_sum(const ScoreArray& a, std::span<const std::uint32_t> pi) {
    return kernels::active().gather_sum(a.entries().data(), a.n(), pi.data());
}

MomentSummary exact_moments(const ScoreArray& a, const PermutationModel& model, double cap) {
    if (a.n() != model.n()) throw DimensionError("exact_moments: array and model sizes differ");
    const double size = model.support_size();
    if (size > cap) {
        throw SizeError("exact_moments: support of " + model.describe() + " exceeds the enumeration cap; use mc_moments");
    }
    // Two passes keep the variance free of cancellation.
    double sum = 0.0;
    std::vector<double> values;
    values.reserve(static_cast<std::size_t>(size));
    model.for_each_in_support([&](std::span<const std::uint32_t> pi) {
        const double y = combinatorial_sum(a, pi);
        values.push_back(y);
        sum += y;
    });
    const double count = static_cast<double>(values.size());
    MomentSummary out;
    out.mean = sum / count;
    double ss = 0.0;
    for (double y : values) ss += (y - out.mean) * (y - out.mean);
    out.variance = ss / count;
    out.method = MomentSummary::Method::exact_enumeration;
    return out;
}

MomentSummary summarize_sample(std::span<const double> values) {
    const std::size_t n = values.size();
    if (n < 2) throw ValidationError("sample summary needs at least 2 values");
    const auto sp = kernels::sum_and_squares(values);
    const double count = static_cast<double>(n);
    const double mean = sp.sum / count;
    double m2 = 0.0;
    double m4 = 0.0;
    for (double v : values) {
        const double d = v - mean;
        const double d2 = d * d;
        m2 += d2;
        m4 += d2 * d2;
    }
    const double variance = m2 / (count - 1.0);
    const double central4 = m4 / count;
    const double pop_var = m2 / count;
    MomentSummary out;
    out.mean = mean;
    out.variance = variance;
    out.method = MomentSummary::Method::monte_carlo;
    out.stderr_mean = std::sqrt(variance / count);
    // Var(s^2) ~ (mu_4 - sigma^4 (N-3)/(N-1)) / N.
    const double var_of_var = (central4 - pop_var * pop_var * (count - 3.0) / (count - 1.0)) / count;
    out.stderr_variance = std::sqrt(std::max(0.0, var_of_var));
    out.sample_count = n;
    return out;
}

MomentSummary mc_moments(const ScoreArray& a, const PermutationModel& model, std::uint64_t reps, std::uint64_t seed,
                         std::size_t threads) {
    if (reps < 2) throw ValidationError("mc_moments: reps must be at least 2");
    if (a.n() != model.n()) throw DimensionError("mc_moments: array and model sizes differ");
    std::vector<double> values(reps);
    for_each_chunk(reps, threads, [&](std::size_t chunk, std::size_t begin, std::size_t end) {
        Rng rng(derive_seed(seed, chunk));
        std::vector<std::uint32_t> pi;
        for (std::size_t r = begin; r < end; ++r) {
            model.sample_into(rng, pi);
            values[r] = combinatorial_sum(a, pi);
        }
    });
    return summarize_sample(values);
}

}  // namespace steinbias
