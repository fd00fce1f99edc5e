#include "steinbias/bounds.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "steinbias/errors.hpp"
#include "steinbias/size_bias.hpp"

namespace steinbias {

SmoothnessClass SmoothnessClass::half_lines() {
    return {Kind::half_lines, std::sqrt(2.0 / std::numbers::pi)};
}

SmoothnessClass SmoothnessClass::intervals() {
    return {Kind::intervals, 2.0 * std::sqrt(2.0 / std::numbers::pi)};
}

SmoothnessClass SmoothnessClass::custom(double a) {
    if (!(a > 0.0)) throw ValidationError("smoothness class: a must be positive");
    return {Kind::custom, a};
}

std::string SmoothnessClass::name() const {
    switch (kind) {
        case Kind::half_lines: return "half-lines";
        case Kind::intervals: return "intervals";
        case Kind::custom: return "custom";
    }
    return "custom";
}

std::string to_string(BoundVariant v) {
    switch (v) {
        case BoundVariant::main: return "main";
        case BoundVariant::half_line: return "half-line";
        case BoundVariant::interval: return "interval";
        case BoundVariant::alt: return "alt";
    }
    return "main";
}

BoundVariant parse_bound_variant(const std::string& s) {
    if (s == "main") return BoundVariant::main;
    if (s == "half-line") return BoundVariant::half_line;
    if (s == "interval") return BoundVariant::interval;
    if (s == "alt") return BoundVariant::alt;
    throw ConfigError("unknown bound variant '" + s + "'");
}

namespace {

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

}  // namespace

nlohmann::json BoundReport::to_json() const {
    nlohmann::json j = {{"formula", formula},           {"delta_bound", delta_bound},
                        {"A", A},                       {"B", B},
                        {"a", a},                       {"sigma", sigma},
                        {"precondition_ok", precondition_ok}, {"precondition_text", precondition_text},
                        {"vacuous", vacuous()}};
    j["mu"] = mu ? nlohmann::json(*mu) : nlohmann::json(nullptr);
    j["Delta"] = Delta ? nlohmann::json(*Delta) : nlohmann::json(nullptr);
    return j;
}

std::string BoundReport::csv_header() {
    return "formula,delta_bound,A,B,a,mu,sigma,Delta,precondition_ok,vacuous";
}

std::string BoundReport::csv_row() const {
    std::ostringstream os;
    os << formula << ',' << fmt(delta_bound) << ',' << fmt(A) << ',' << fmt(B) << ',' << fmt(a) << ','
       << (mu ? fmt(*mu) : "") << ',' << fmt(sigma) << ',' << (Delta ? fmt(*Delta) : "") << ','
       << (precondition_ok ? "true" : "false") << ',' << (vacuous() ? "true" : "false");
    return os.str();
}

BoundReport zero_bias_bound(double sigma, double B, const SmoothnessClass& cls, BoundVariant variant) {
    if (!(sigma > 0.0) || !(B > 0.0)) throw ValidationError("zero-bias bound: sigma and B must be positive");
    BoundReport r;
    r.formula = "zero-bias/" + to_string(variant);
    r.sigma = sigma;
    r.B = B;
    r.a = cls.a;
    r.A = 2.0 * B / sigma;
    const double A = r.A;
    double limit = sigma / 24.0;
    switch (variant) {
        case BoundVariant::main: r.delta_bound = A * (37.0 + 12.0 * A + 112.0 * cls.a); break;
        case BoundVariant::half_line:
            r.a = SmoothnessClass::half_lines().a;
            r.delta_bound = A * (127.0 + 12.0 * A);
            break;
        case BoundVariant::interval:
            r.a = SmoothnessClass::intervals().a;
            r.delta_bound = A * (216.0 + 12.0 * A);
            break;
        case BoundVariant::alt:
            r.delta_bound = A * (145.0 * cls.a + 7.5 * A + 25.0);
            limit = sigma / 48.0;
            break;
    }
    r.precondition_ok = B <= limit;
    r.precondition_text = std::string("B <= sigma/") + (variant == BoundVariant::alt ? "48" : "24") + " (B = " +
                          fmt(B) + ", limit = " + fmt(limit) + ")";
    return r;
}

BoundReport size_bias_bound(double mu, double sigma, double B, double Delta, const SmoothnessClass& cls,
                            BoundVariant variant) {
    if (!(mu > 0.0) || !(sigma > 0.0) || !(B > 0.0)) throw ValidationError("size-bias bound: mu, sigma and B must be positive");
    if (!(Delta >= 0.0)) throw ValidationError("size-bias bound: Delta must be nonnegative");
    BoundReport r;
    r.formula = "size-bias/" + to_string(variant);
    r.mu = mu;
    r.sigma = sigma;
    r.B = B;
    r.Delta = Delta;
    r.a = cls.a;
    r.A = B / sigma;
    const double A = r.A;
    const double ratio = mu / sigma;
    const double delta_term = mu * Delta / (sigma * sigma);
    double limit = std::pow(sigma, 1.5) / std::sqrt(6.0 * mu);
    switch (variant) {
        case BoundVariant::main:
            r.delta_bound = cls.a * A / 2.0 + ratio * ((19.0 + 56.0 * cls.a) * A * A + 4.0 * A * A * A) + 23.0 * delta_term;
            break;
        case BoundVariant::half_line:
            r.a = SmoothnessClass::half_lines().a;
            r.delta_bound = 0.4 * A + ratio * (64.0 * A * A + 4.0 * A * A * A) + 23.0 * delta_term;
            break;
        case BoundVariant::interval:
            r.a = SmoothnessClass::intervals().a;
            r.delta_bound = 0.8 * A + ratio * (109.0 * A * A + 4.0 * A * A * A) + 23.0 * delta_term;
            break;
        case BoundVariant::alt:
            r.delta_bound = cls.a * A / 6.0 + ratio * ((13.0 + 73.0 * cls.a) * A * A + 2.5 * A * A * A) + 15.0 * delta_term;
            limit = std::pow(sigma, 1.5) / std::sqrt(12.0 * mu);
            break;
    }
    r.precondition_ok = B <= limit;
    r.precondition_text = std::string("B <= sigma^(3/2)/sqrt(") + (variant == BoundVariant::alt ? "12" : "6") +
                          " mu) (B = " + fmt(B) + ", limit = " + fmt(limit) + ")";
    return r;
}

BoundReport combinatorial_bound(const ScoreArray& a, const PermutationModel& model, double sigma,
                                const SmoothnessClass& cls, BoundVariant variant) {
    if (a.n() != model.n()) throw DimensionError("combinatorial bound: array and model sizes differ");
    double constant = 8.0;
    if (model.kind() == PermutationModel::Kind::uniform) {
        if (!a.row_centered()) throw ValidationError("combinatorial bound: uniform model needs a row-centered array");
    } else {
        if (!a.symmetric() || !a.zero_diagonal())
            throw ValidationError("combinatorial bound: cycle-type model needs a symmetric zero-diagonal array");
        constant = 40.0;
    }
    if (!(a.c_sup() > 0.0)) throw DegenerateError("combinatorial bound: zero array");
    // |Y* - Y| <= constant * C = 2B
    BoundReport r = zero_bias_bound(sigma, constant * a.c_sup() / 2.0, cls, variant);
    r.formula = std::string(model.kind() == PermutationModel::Kind::uniform ? "combinatorial-uniform/" : "combinatorial-cycle-type/") +
                to_string(variant);
    r.precondition_text = "A = " + fmt(constant) + "C/sigma <= 1/12; " + r.precondition_text;
    return r;
}

nlohmann::json LocalBoundInputs::to_json() const {
    nlohmann::json j = {{"B", B}, {"delta_bound", delta_bound}, {"delta_bound_coarse", delta_bound_coarse}};
    j["B_regular"] = B_regular ? nlohmann::json(*B_regular) : nlohmann::json(nullptr);
    j["delta_bound_regular"] = delta_bound_regular ? nlohmann::json(*delta_bound_regular) : nlohmann::json(nullptr);
    return j;
}

LocalBoundInputs local_bound_inputs(const DependencyStructure& s, double M) {
    if (!(M > 0.0)) throw ValidationError("local bound inputs: M must be positive");
    LocalBoundInputs r;
    r.B = static_cast<double>(s.b) * M;
    double acc = 0.0;
    double max_p = 0.0;
    for (double p : s.p) max_p = std::max(max_p, p);
    for (const auto& [a1, a2] : s.pairs) {
        acc += s.p[a1] * s.p[a2] * static_cast<double>(s.neighborhoods[a1].size()) *
               static_cast<double>(s.neighborhoods[a2].size());
    }
    r.delta_bound = M * std::sqrt(acc);
    r.delta_bound_coarse = max_p * r.B * std::sqrt(static_cast<double>(s.pairs.size()));
    if (s.distance_regular) {
        const double v_rho = static_cast<double>(s.V(s.rho));
        r.B_regular = v_rho * M;
        r.delta_bound_regular = M / std::sqrt(static_cast<double>(s.index_count)) * v_rho *
                                std::sqrt(static_cast<double>(s.V(3 * s.rho)));
    }
    return r;
}

}  // namespace steinbias
