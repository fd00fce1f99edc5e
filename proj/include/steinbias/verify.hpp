#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "steinbias/bounds.hpp"
#include "steinbias/zero_bias.hpp"

namespace steinbias {

/// Standard normal CDF through erfc, accurate to about 1e-16 absolute.
double normal_cdf(double x);

/// 99% DKW half-width sqrt(ln(2/0.01) / (2N)).
double dkw_band(std::size_t n);

struct DistanceEstimate {
    enum class Metric { half_line, interval };
    Metric metric = Metric::half_line;
    double value = 0.0;
    std::uint64_t sample_count = 0;
    double dkw_band = 0.0;  // doubled for intervals

    std::string metric_name() const { return metric == Metric::half_line ? "half-line" : "interval"; }
    nlohmann::json to_json() const;
};

/// (y - mu) / sigma. Throws ValidationError for sigma <= 0.
std::vector<double> standardize(std::span<const double> y, double mu, double sigma);

/// sup_x |F_N(x) - Phi(x)| over a standardized sample, ties handled.
DistanceEstimate kolmogorov_distance(std::span<const double> w);

/// sup over intervals of |empirical mass - normal mass|: the range of the
/// one-sided deviations F_N - Phi, left limits included, together with 0.
DistanceEstimate interval_distance(std::span<const double> w);

/// sup_x |F_N(x) - F(x)| against an arbitrary continuous cdf.
double ks_statistic(std::span<const double> sample, const std::function<double(double)>& cdf);

struct CheckReport {
    std::string name;
    bool pass = false;
    double observed = 0.0;
    double threshold = 0.0;
    nlohmann::json details = nlohmann::json::object();

    nlohmann::json to_json() const;
};

/// Test function with closed-form derivative.
struct TestFunction {
    std::string name;
    double (*f)(double);
    double (*df)(double);
};

/// {x, x^2, x^3, cos}.
std::vector<TestFunction> zero_bias_family();
/// {x, x^2, cos}.
std::vector<TestFunction> size_bias_family();

/// Per f, z = mean(Y f(Y) - sigma2 f'(Y*)) / stderr over paired draws; the
/// stderr of sigma2, when given, is folded in. Pass iff |z| <= threshold for all f.
CheckReport characterizing_check_zero(std::span<const double> y, std::span<const double> y_star, double sigma2,
                                      std::optional<double> sigma2_stderr = std::nullopt, double threshold = 4.0);

/// Same for E Y f(Y) = mu E f(Y^s).
CheckReport characterizing_check_size(std::span<const double> y, std::span<const double> y_s, double mu,
                                      std::optional<double> mu_stderr = std::nullopt, double threshold = 4.0);

/// For `reps` sampled pi, the exact average of Y'' over all ordered pairs
/// against (1 - lambda) Y'; relative error on the scale max(|Y'|, C).
CheckReport linearity_check(const ExchangeablePairSpec& spec, std::uint64_t reps, std::uint64_t seed,
                            double tolerance = 1e-10);

/// Exact symmetry of the joint atom law of (Y', Y''), and that every partner
/// stays in the model's support. `partner` overrides the surgery used.
CheckReport exchangeability_check(const ExchangeablePairSpec& spec,
                                  std::optional<PermutationModel::Kind> partner = std::nullopt,
                                  double state_cap = 1e6);

/// Every gap <= bound (with 1e-12 relative slack for rounding).
CheckReport gap_audit(const std::string& name, std::span<const double> gaps, double bound);

/// Empirical distance minus its band <= min(delta_bound, 1).
CheckReport delta_vs_bound(const DistanceEstimate& d, const BoundReport& bound);

/// Pearson chi-square of observed counts against expected probabilities;
/// cells with expected count < 5 are pooled. Pass iff p-value >= alpha.
CheckReport chi_square_gof(const std::string& name, std::span<const double> observed,
                           std::span<const double> probs, double alpha = 0.001);

/// Bins a sample onto the nearest atoms (relative grid `tol`); samples off
/// the support are counted separately and fail the check.
CheckReport chi_square_atoms(const std::string& name, std::span<const double> sample,
                             std::span<const double> atoms, std::span<const double> probs,
                             double alpha = 0.001, double tol = 1e-7);

/// Same for pairs against a joint atom law.
CheckReport chi_square_pairs(const std::string& name, std::span<const std::pair<double, double>> sample,
                             std::span<const PairAtom> law, double alpha = 0.001, double tol = 1e-7);

}  // namespace steinbias
