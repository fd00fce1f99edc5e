#include "steinbias/verify.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <tuple>
#include <numeric>

#include <boost/math/special_functions/gamma.hpp>

#include "steinbias/errors.hpp"
#include "steinbias/kernels.hpp"
#include "steinbias/moments.hpp"

namespace steinbias {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double dkw_band(std::size_t n) {
    if (n == 0) throw ValidationError("dkw band: empty sample");
    return std::sqrt(std::log(2.0 / 0.01) / (2.0 * static_cast<double>(n)));
}

nlohmann::json DistanceEstimate::to_json() const {
    return {{"metric", metric_name()}, {"value", value}, {"sample_count", sample_count}, {"dkw_band", dkw_band}};
}

std::vector<double> standardize(std::span<const double> y, double mu, double sigma) {
    if (!(sigma > 0.0)) throw ValidationError("standardize: sigma must be positive");
    std::vector<double> w(y.size());
    for (std::size_t k = 0; k < y.size(); ++k) w[k] = (y[k] - mu) / sigma;
    return w;
}

namespace {

/// Calls visit(lower, upper, x) per distinct sorted value: F_N(x-) and F_N(x).
template <class Visit>
void empirical_steps(std::span<const double> sample, Visit&& visit) {
    if (sample.empty()) throw ValidationError("distance: empty sample");
    std::vector<double> s(sample.begin(), sample.end());
    std::sort(s.begin(), s.end());
    const double N = static_cast<double>(s.size());
    std::size_t k = 0;
    while (k < s.size()) {
        std::size_t e = k;
        while (e < s.size() && s[e] == s[k]) ++e;
        visit(static_cast<double>(k) / N, static_cast<double>(e) / N, s[k]);
        k = e;
    }
}

}  // namespace

DistanceEstimate kolmogorov_distance(std::span<const double> w) {
    DistanceEstimate d;
    d.metric = DistanceEstimate::Metric::half_line;
    empirical_steps(w, [&](double lo, double hi, double x) {
        const double phi = normal_cdf(x);
        d.value = std::max({d.value, std::abs(lo - phi), std::abs(hi - phi)});
    });
    d.sample_count = w.size();
    d.dkw_band = dkw_band(w.size());
    return d;
}

DistanceEstimate interval_distance(std::span<const double> w) {
    double top = 0.0, bottom = 0.0;
    empirical_steps(w, [&](double lo, double hi, double x) {
        const double phi = normal_cdf(x);
        top = std::max({top, lo - phi, hi - phi});
        bottom = std::min({bottom, lo - phi, hi - phi});
    });
    DistanceEstimate d;
    d.metric = DistanceEstimate::Metric::interval;
    d.value = std::min(1.0, top - bottom);
    d.sample_count = w.size();
    d.dkw_band = 2.0 * dkw_band(w.size());
    return d;
}

double ks_statistic(std::span<const double> sample, const std::function<double(double)>& cdf) {
    double v = 0.0;
    empirical_steps(sample, [&](double lo, double hi, double x) {
        const double f = cdf(x);
        v = std::max({v, std::abs(lo - f), std::abs(hi - f)});
    });
    return v;
}

nlohmann::json CheckReport::to_json() const {
    return {{"name", name}, {"pass", pass}, {"observed", observed}, {"threshold", threshold}, {"details", details}};
}

std::vector<TestFunction> zero_bias_family() {
    return {
        {"x", [](double x) { return x; }, [](double) { return 1.0; }},
        {"x^2", [](double x) { return x * x; }, [](double x) { return 2.0 * x; }},
        {"x^3", [](double x) { return x * x * x; }, [](double x) { return 3.0 * x * x; }},
        {"cos", [](double x) { return std::cos(x); }, [](double x) { return -std::sin(x); }},
    };
}

std::vector<TestFunction> size_bias_family() {
    return {
        {"x", [](double x) { return x; }, [](double) { return 1.0; }},
        {"x^2", [](double x) { return x * x; }, [](double x) { return 2.0 * x; }},
        {"cos", [](double x) { return std::cos(x); }, [](double x) { return -std::sin(x); }},
    };
}

namespace {

/// Shared body: lhs_k = Y f(Y), rhs_k = g(Z) with g = f' or f, target scale c.
CheckReport characterizing(const std::string& name, std::span<const double> y, std::span<const double> z, double c,
                           std::optional<double> c_stderr, double threshold, bool derivative) {
    if (y.size() != z.size()) throw DimensionError(name + ": stream lengths differ");
    if (y.size() < 2) throw DegenerateError(name + ": need at least two draws");
    const auto family = derivative ? zero_bias_family() : size_bias_family();
    const double N = static_cast<double>(y.size());
    std::vector<double> lhs(y.size()), rhs(y.size());
    CheckReport r;
    r.name = name;
    r.threshold = threshold;
    r.pass = true;
    r.details["draws"] = y.size();
    r.details["scale"] = c;
    for (const auto& tf : family) {
        for (std::size_t k = 0; k < y.size(); ++k) {
            lhs[k] = y[k] * tf.f(y[k]);
            rhs[k] = derivative ? tf.df(z[k]) : tf.f(z[k]);
        }
        const kernels::SumPair d = kernels::active().paired_difference(lhs.data(), rhs.data(), c, lhs.size());
        const double mean = d.sum / N;
        const double var = std::max(0.0, (d.sum_sq - d.sum * d.sum / N) / (N - 1.0));
        double se2 = var / N;
        if (c_stderr) {
            const double rhs_mean = std::accumulate(rhs.begin(), rhs.end(), 0.0) / N;
            se2 += rhs_mean * rhs_mean * (*c_stderr) * (*c_stderr);
        }
        const double se = std::sqrt(se2);
        double z_stat;
        if (se > 0.0) z_stat = mean / se;
        else z_stat = std::abs(mean) <= 1e-12 * std::max(1.0, std::abs(c)) ? 0.0 : INFINITY;
        r.details["functions"][tf.name] = {{"difference", mean}, {"stderr", se}, {"z", z_stat}};
        if (!(std::abs(z_stat) <= threshold)) r.pass = false;
        r.observed = std::max(r.observed, std::abs(z_stat));
    }
    return r;
}

}  // namespace

CheckReport characterizing_check_zero(std::span<const double> y, std::span<const double> y_star, double sigma2,
                                      std::optional<double> sigma2_stderr, double threshold) {
    return characterizing("characterizing-zero-bias", y, y_star, sigma2, sigma2_stderr, threshold, true);
}

CheckReport characterizing_check_size(std::span<const double> y, std::span<const double> y_s, double mu,
                                      std::optional<double> mu_stderr, double threshold) {
    return characterizing("characterizing-size-bias", y, y_s, mu, mu_stderr, threshold, false);
}

CheckReport linearity_check(const ExchangeablePairSpec& spec, std::uint64_t reps, std::uint64_t seed,
                            double tolerance) {
    CheckReport r;
    r.name = "linearity";
    r.threshold = tolerance;
    Rng rng(seed);
    std::vector<std::uint32_t> images;
    const double scale_floor = std::max(spec.score.c_sup(), 1e-300);
    for (std::uint64_t k = 0; k < reps; ++k) {
        spec.model.sample_into(rng, images);
        const Permutation pi(images);
        const double y1 = combinatorial_sum(spec.score, pi.images());
        const double avg = partner_average(spec.model.kind(), spec.score, pi);
        const double err = std::abs(avg - (1.0 - spec.lambda) * y1) / std::max(std::abs(y1), scale_floor);
        r.observed = std::max(r.observed, err);
    }
    r.pass = r.observed <= tolerance;
    r.details = {{"lambda", spec.lambda}, {"reps", reps}, {"model", spec.model.describe()}};
    return r;
}

CheckReport exchangeability_check(const ExchangeablePairSpec& spec, std::optional<PermutationModel::Kind> partner,
                                  double state_cap) {
    const auto kind = partner.value_or(spec.model.kind());
    const std::size_t n = spec.model.n();
    const double pairs = static_cast<double>(n * (n - 1));
    if (spec.model.support_size() * pairs > state_cap)
        throw SizeError("exchangeability: state count exceeds the cap");
    const double weight = 1.0 / (spec.model.support_size() * pairs);
    const double grid = 1e-9 * std::max(spec.score.c_sup() * static_cast<double>(n), 1e-300);
    std::map<std::pair<long long, long long>, double> law;
    std::uint64_t escaped = 0;
    spec.model.for_each_in_support([&](std::span<const std::uint32_t> images) {
        const Permutation pi(std::vector<std::uint32_t>(images.begin(), images.end()));
        const double y1 = combinatorial_sum(spec.score, pi.images());
        for (std::uint32_t i = 0; i < n; ++i) {
            for (std::uint32_t j = 0; j < n; ++j) {
                if (i == j) continue;
                const Permutation pi2 = pair_partner(kind, pi, i, j);
                if (spec.model.kind() == PermutationModel::Kind::fixed_cycle_type &&
                    !(cycle_type_of(pi2) == spec.model.cycle_type()))
                    ++escaped;
                const double y2 = combinatorial_sum(spec.score, pi2.images());
                law[{std::llround(y1 / grid), std::llround(y2 / grid)}] += weight;
            }
        }
    });
    CheckReport r;
    r.name = "exchangeability";
    r.threshold = 1e-12;
    for (const auto& [key, p] : law) {
        const auto it = law.find({key.second, key.first});
        const double q = it == law.end() ? 0.0 : it->second;
        r.observed = std::max(r.observed, std::abs(p - q));
    }
    r.pass = r.observed <= r.threshold && escaped == 0;
    r.details = {{"atoms", law.size()}, {"partners_outside_support", escaped}, {"model", spec.model.describe()}};
    return r;
}

CheckReport gap_audit(const std::string& name, std::span<const double> gaps, double bound) {
    if (gaps.empty()) throw ValidationError("gap audit: empty stream");
    CheckReport r;
    r.name = name;
    r.threshold = bound;
    std::uint64_t violations = 0;
    const double slack = 1e-12 * std::max(bound, 1e-300);
    for (double g : gaps) {
        r.observed = std::max(r.observed, g);
        if (!(g <= bound + slack)) ++violations;
    }
    r.pass = violations == 0;
    r.details = {{"draws", gaps.size()}, {"violations", violations}};
    return r;
}

CheckReport delta_vs_bound(const DistanceEstimate& d, const BoundReport& bound) {
    CheckReport r;
    r.name = "delta-vs-bound/" + d.metric_name() + "/" + bound.formula;
    r.observed = d.value - d.dkw_band;
    r.threshold = std::min(bound.delta_bound, 1.0);
    r.pass = r.observed <= r.threshold;
    r.details = {{"distance", d.to_json()},
                 {"delta_bound", bound.delta_bound},
                 {"vacuous", bound.vacuous()},
                 {"precondition_ok", bound.precondition_ok}};
    return r;
}

CheckReport chi_square_gof(const std::string& name, std::span<const double> observed, std::span<const double> probs,
                           double alpha) {
    if (observed.size() != probs.size()) throw DimensionError(name + ": counts and probabilities differ in length");
    const double N = std::accumulate(observed.begin(), observed.end(), 0.0);
    if (!(N > 0.0)) throw DegenerateError(name + ": no observations");
    std::vector<std::pair<double, double>> cells;  // (observed, expected)
    double po = 0.0, pe = 0.0;
    for (std::size_t k = 0; k < probs.size(); ++k) {
        po += observed[k];
        pe += probs[k] * N;
        if (pe >= 5.0) {
            cells.emplace_back(po, pe);
            po = pe = 0.0;
        }
    }
    if (pe > 0.0 || po > 0.0) {
        if (cells.empty()) cells.emplace_back(po, pe);
        else {
            cells.back().first += po;
            cells.back().second += pe;
        }
    }
    double stat = 0.0;
    for (auto [o, e] : cells) {
        if (e > 0.0) stat += (o - e) * (o - e) / e;
        else if (o > 0.0) stat = INFINITY;
    }
    const double df = static_cast<double>(cells.size()) - 1.0;
    double pvalue = 1.0;
    if (!std::isfinite(stat)) pvalue = 0.0;
    else if (df >= 1.0) pvalue = boost::math::gamma_q(df / 2.0, stat / 2.0);
    CheckReport r;
    r.name = name;
    r.observed = pvalue;
    r.threshold = alpha;
    r.pass = pvalue >= alpha;
    r.details = {{"statistic", stat}, {"df", df}, {"cells", cells.size()}, {"draws", N}};
    return r;
}

CheckReport chi_square_atoms(const std::string& name, std::span<const double> sample, std::span<const double> atoms,
                             std::span<const double> probs, double alpha, double tol) {
    std::vector<std::size_t> order(atoms.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto x, auto y) { return atoms[x] < atoms[y]; });
    std::vector<double> sorted(atoms.size()), counts(atoms.size(), 0.0), p(atoms.size());
    for (std::size_t k = 0; k < order.size(); ++k) {
        sorted[k] = atoms[order[k]];
        p[k] = probs[order[k]];
    }
    std::uint64_t outside = 0;
    for (double x : sample) {
        auto it = std::lower_bound(sorted.begin(), sorted.end(), x);
        std::size_t best = sorted.size();
        double dist = INFINITY;
        for (auto c : {it, it == sorted.begin() ? it : it - 1}) {
            if (c == sorted.end()) continue;
            if (std::abs(*c - x) < dist) {
                dist = std::abs(*c - x);
                best = static_cast<std::size_t>(c - sorted.begin());
            }
        }
        if (best < sorted.size() && dist <= tol * std::max(1.0, std::abs(sorted[best]))) counts[best] += 1.0;
        else ++outside;
    }
    auto r = chi_square_gof(name, counts, p, alpha);
    r.details["outside_support"] = outside;
    if (outside > 0) r.pass = false;
    return r;
}

CheckReport chi_square_pairs(const std::string& name, std::span<const std::pair<double, double>> sample,
                             std::span<const PairAtom> law, double alpha, double tol) {
    std::vector<PairAtom> atoms(law.begin(), law.end());
    std::sort(atoms.begin(), atoms.end(), [](const PairAtom& x, const PairAtom& y) {
        return std::tie(x.y1, x.y2) < std::tie(y.y1, y.y2);
    });
    double scale = 1.0;
    for (const auto& at : atoms) scale = std::max({scale, std::abs(at.y1), std::abs(at.y2)});
    const double eps = tol * scale;
    std::vector<double> counts(atoms.size(), 0.0), p(atoms.size());
    for (std::size_t k = 0; k < atoms.size(); ++k) p[k] = atoms[k].prob;
    std::uint64_t outside = 0;
    for (auto [a, b] : sample) {
        auto it = std::lower_bound(atoms.begin(), atoms.end(), a - eps,
                                   [](const PairAtom& at, double v) { return at.y1 < v; });
        bool found = false;
        for (; it != atoms.end() && it->y1 <= a + eps; ++it) {
            if (std::abs(it->y2 - b) <= eps) {
                counts[static_cast<std::size_t>(it - atoms.begin())] += 1.0;
                found = true;
                break;
            }
        }
        if (!found) ++outside;
    }
    auto r = chi_square_gof(name, counts, p, alpha);
    r.details["outside_support"] = outside;
    if (outside > 0) r.pass = false;
    return r;
}

}  // namespace steinbias
