#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>

#include "steinbias/permutation.hpp"
#include "steinbias/score_array.hpp"

namespace steinbias {

struct MomentSummary {
    enum class Method { exact_enumeration, monte_carlo };

    double mean = 0.0;
    double variance = 0.0;
    Method method = Method::exact_enumeration;
    /// Standard error of `variance`; present iff monte-carlo.
    std::optional<double> stderr_variance;
    /// Standard error of `mean`; present iff monte-carlo.
    std::optional<double> stderr_mean;
    std::optional<std::uint64_t> sample_count;

    std::string method_name() const {
        return method == Method::exact_enumeration ? "exact-enumeration" : "monte-carlo";
    }
};

/// Y = sum_i a_{i, pi(i)}.
double combinatorial_sum(const ScoreArray& a, std::span<const std::uint32_t> pi);

/// Mean and variance of Y by full enumeration of the model's support.
/// Throws SizeError when the support exceeds `cap`.
MomentSummary exact_moments(const ScoreArray& a, const PermutationModel& model, double cap = 40320.0);

/// Unbiased sample mean and variance over `reps` draws. Deterministic in `seed`.
MomentSummary mc_moments(const ScoreArray& a, const PermutationModel& model, std::uint64_t reps,
                         std::uint64_t seed, std::size_t threads = 0);

/// Sample summary of an arbitrary stream (unbiased variance, standard errors).
MomentSummary summarize_sample(std::span<const double> values);

}  // namespace steinbias
