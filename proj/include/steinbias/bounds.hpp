#pragma once

#include <optional>
#include <string>

#include "json.hpp"
#include "steinbias/permutation.hpp"
#include "steinbias/score_array.hpp"

namespace steinbias {

struct DependencyStructure;

/// Function class H with its smoothing constant a.
struct SmoothnessClass {
    enum class Kind { half_lines, intervals, custom };
    Kind kind = Kind::half_lines;
    double a = 0.0;

    static SmoothnessClass half_lines();  // a = sqrt(2/pi)
    static SmoothnessClass intervals();   // a = 2 sqrt(2/pi)
    /// User-supplied a > 0; accepted but not validated against any class.
    static SmoothnessClass custom(double a);
    std::string name() const;
};

enum class BoundVariant { main, half_line, interval, alt };
std::string to_string(BoundVariant v);
BoundVariant parse_bound_variant(const std::string& s);

struct BoundReport {
    std::string formula;
    double delta_bound = 0.0;
    double A = 0.0;
    double B = 0.0;
    double a = 0.0;
    std::optional<double> mu;
    double sigma = 0.0;
    std::optional<double> Delta;
    bool precondition_ok = false;
    std::string precondition_text;
    /// delta_bound > 1, so the bound says nothing about a distance in [0,1].
    bool vacuous() const noexcept { return delta_bound > 1.0; }

    nlohmann::json to_json() const;
    static std::string csv_header();
    std::string csv_row() const;
};

/// Zero-bias coupling bound, A = 2B/sigma.
/// main: A(37 + 12A + 112a); half_line: A(127 + 12A); interval: A(216 + 12A),
/// all for B <= sigma/24; alt: A(145a + 7.5A + 25) for B <= sigma/48.
BoundReport zero_bias_bound(double sigma, double B, const SmoothnessClass& cls, BoundVariant variant);

/// Size-bias coupling bound, A = B/sigma.
/// main: aA/2 + (mu/sigma)((19 + 56a)A^2 + 4A^3) + 23 mu Delta / sigma^2;
/// half_line: 0.4A + (mu/sigma)(64A^2 + 4A^3) + 23 mu Delta / sigma^2;
/// interval: 0.8A + (mu/sigma)(109A^2 + 4A^3) + 23 mu Delta / sigma^2;
/// all for B <= sigma^{3/2}/sqrt(6 mu); alt: aA/6 + (mu/sigma)((13 + 73a)A^2
/// + 2.5A^3) + 15 mu Delta / sigma^2 for B <= sigma^{3/2}/sqrt(12 mu).
BoundReport size_bias_bound(double mu, double sigma, double B, double Delta, const SmoothnessClass& cls,
                            BoundVariant variant);

/// Combinatorial sum bound: A = 8C/sigma (uniform) or 40C/sigma (fixed cycle
/// type), evaluated through zero_bias_bound with 2B = A sigma. Throws
/// ValidationError when the array lacks the flags the model needs.
BoundReport combinatorial_bound(const ScoreArray& a, const PermutationModel& model, double sigma,
                                const SmoothnessClass& cls, BoundVariant variant = BoundVariant::main);

/// Inputs to the size-bias bound from a dependency structure with values in [0, M].
struct LocalBoundInputs {
    double B = 0.0;                 // b M
    double delta_bound = 0.0;       // M sqrt(sum_D p p |B||B|)
    double delta_bound_coarse = 0.0;  // (max p) b M sqrt(|D|)
    std::optional<double> B_regular;            // V(rho) M
    std::optional<double> delta_bound_regular;  // M |A|^{-1/2} V(rho) sqrt(V(3 rho))

    nlohmann::json to_json() const;
};

LocalBoundInputs local_bound_inputs(const DependencyStructure& structure, double M);

}  // namespace steinbias
