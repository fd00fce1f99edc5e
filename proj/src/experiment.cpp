#include "steinbias/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <memory>
#include <sstream>

#include "config_detail.hpp"
#include "steinbias/bounds.hpp"
#include "steinbias/errors.hpp"
#include "steinbias/kernels.hpp"
#include "steinbias/moments.hpp"
#include "steinbias/parallel.hpp"
#include "steinbias/verify.hpp"
#include "steinbias/zero_bias.hpp"

namespace steinbias {

using json = nlohmann::json;

namespace {

constexpr double kEnumerationCap = 40320.0;
constexpr double kStateCap = 1e6;
constexpr std::uint64_t kOracleDraws = 1'000'000;

/// One replicate of any construction.
struct Sample {
    double y = 0.0;          // Y, centered for zero-bias constructions
    double y_biased = 0.0;   // Y* or Y^s, on the same scale
    double gap = 0.0;
    double aux1 = 0.0;       // Y-dagger, or the biased summand
    double aux2 = 0.0;       // Y-double-dagger
    std::uint32_t group = 0;
    bool ok = true;          // size-bias independence audit
};

class Pipeline {
public:
    virtual ~Pipeline() = default;
    virtual Sample draw(Rng& rng) const = 0;
};

std::vector<Sample> draw_all(const Pipeline& p, std::uint64_t reps, std::uint64_t seed, std::size_t threads) {
    std::vector<Sample> out(reps);
    const std::uint64_t base = derive_seed(seed, kStageDraws);
    for_each_chunk(reps, threads, [&](std::size_t chunk, std::size_t begin, std::size_t end) {
        Rng rng(derive_seed(base, chunk));
        for (std::size_t i = begin; i < end; ++i) out[i] = p.draw(rng);
    });
    return out;
}

json moments_json(const MomentSummary& m) {
    json j = {{"mean", m.mean}, {"variance", m.variance}, {"method", m.method_name()}};
    j["stderr_mean"] = m.stderr_mean ? json(*m.stderr_mean) : json(nullptr);
    j["stderr_variance"] = m.stderr_variance ? json(*m.stderr_variance) : json(nullptr);
    j["sample_count"] = m.sample_count ? json(*m.sample_count) : json(nullptr);
    return j;
}

SmoothnessClass class_for(BoundVariant v) {
    return v == BoundVariant::interval ? SmoothnessClass::intervals() : SmoothnessClass::half_lines();
}

/// Shared state of a run while checks are assembled.
struct Outcome {
    MomentSummary moments;
    std::vector<Sample> samples;
    std::vector<BoundReport> bounds;
    std::vector<CheckReport> checks;
    json coupling = json::object();
    const ExperimentConfig* config = nullptr;

    std::vector<double> column(double Sample::*field) const {
        std::vector<double> v(samples.size());
        for (std::size_t k = 0; k < samples.size(); ++k) v[k] = samples[k].*field;
        return v;
    }

    void add(const std::string& key, CheckReport r) {
        if (!config->wants(key)) return;
        r.details["test"] = r.name;
        r.name = key;
        checks.push_back(std::move(r));
    }

    /// Records a check that was explicitly requested but cannot run here.
    void skip(const std::string& key, const std::string& reason) {
        if (config->checks.empty() || !config->wants(key)) return;
        CheckReport r;
        r.name = key;
        r.pass = true;
        r.details = {{"skipped", reason}};
        checks.push_back(std::move(r));
    }
};

// ---- permutation constructions ----

ScoreArray build_score(const ExperimentConfig& c) {
    std::vector<double> raw;
    if (!c.score_rows.empty()) {
        for (const auto& row : c.score_rows) raw.insert(raw.end(), row.begin(), row.end());
    } else if (c.score_csv) {
        std::size_t n = 0;
        raw = read_score_csv(*c.score_csv, n);
        if (n != c.n) throw ConfigError("score.csv: array is " + std::to_string(n) + "x" + std::to_string(n) +
                                        ", permutation.n is " + std::to_string(c.n));
    } else {
        raw = generate_raw_scores(c.n, c.score_generator, c.score_seed);
    }
    return c.construction == Construction::zero_uniform ? center_for_uniform(c.n, raw)
                                                        : center_for_cycle_type(c.n, raw);
}

template <class Sampler>
class PermutationPipeline : public Pipeline {
public:
    explicit PermutationPipeline(const Sampler& s) : s_(s) {}
    Sample draw(Rng& rng) const override {
        const auto d = s_.draw(rng);
        return {d.y, d.y_star, d.gap, d.y_dagger, d.y_ddagger, 0, true};
    }

private:
    const Sampler& s_;
};

struct PermutationSetup {
    ScoreArray a;
    PermutationModel model;
    std::unique_ptr<UniformZeroBiasSampler> uniform;
    std::unique_ptr<CycleTypeZeroBiasSampler> cycle;
    std::unique_ptr<Pipeline> pipeline;

    explicit PermutationSetup(const ExperimentConfig& c)
        : a(build_score(c)),
          model(c.construction == Construction::zero_uniform
                    ? PermutationModel::uniform(c.n)
                    : PermutationModel::fixed_cycle_type(CycleType::from_pairs(c.n, c.cycle_type))) {
        if (c.construction == Construction::zero_uniform) {
            uniform = std::make_unique<UniformZeroBiasSampler>(a);
            pipeline = std::make_unique<PermutationPipeline<UniformZeroBiasSampler>>(*uniform);
        } else {
            cycle = std::make_unique<CycleTypeZeroBiasSampler>(a, model);
            pipeline = std::make_unique<PermutationPipeline<CycleTypeZeroBiasSampler>>(*cycle);
        }
    }
    double lambda() const { return uniform ? uniform->lambda() : cycle->lambda(); }
    double gap_bound() const { return uniform ? uniform->gap_bound() : cycle->gap_bound(); }
    double square_moment() const { return uniform ? uniform->square_moment() : cycle->square_moment(); }
    std::optional<double> square_moment_stderr() const {
        if (uniform) return uniform->tuples().mean_square_stderr();
        double v = 0.0;
        bool any = false;
        for (const auto& pm : cycle->pattern_masses()) {
            if (pm.mean_square_stderr) {
                any = true;
                v += std::pow(pm.pair_fraction * *pm.mean_square_stderr, 2);
            }
        }
        return any ? std::optional<double>(std::sqrt(v)) : std::nullopt;
    }
};

void run_permutation(const ExperimentConfig& c, std::size_t threads, Outcome& o) {
    PermutationSetup setup(c);
    const auto& a = setup.a;
    const auto& model = setup.model;
    const auto spec = ExchangeablePairSpec::make(model, a);
    o.moments = model.support_size() <= kEnumerationCap
                    ? exact_moments(a, model, kEnumerationCap)
                    : mc_moments(a, model, std::max<std::uint64_t>(c.reps, 200000), derive_seed(c.seed, kStageMoments),
                                 threads);
    // E Y = 0 exactly once the array is centered for its model
    o.moments.mean = 0.0;
    o.moments.stderr_mean.reset();
    if (!(o.moments.variance > 0.0)) throw DegenerateError(c.id + ": Var Y = 0");
    const double sigma = std::sqrt(o.moments.variance);

    o.samples = draw_all(*setup.pipeline, c.reps, c.seed, threads);
    for (auto& s : o.samples) {
        s.y -= o.moments.mean;
        s.y_biased -= o.moments.mean;
    }

    o.coupling = {{"lambda", setup.lambda()},        {"C", a.c_sup()},
                  {"gap_bound", setup.gap_bound()},  {"square_moment", setup.square_moment()},
                  {"model", model.describe()},       {"n", c.n}};
    if (setup.cycle) {
        json cases = json::object();
        for (const auto& [name, mass] : setup.cycle->case_masses()) cases[name] = mass;
        o.coupling["case_masses"] = cases;
    }

    for (const auto& v : c.bounds) {
        const auto variant = parse_bound_variant(v);
        o.bounds.push_back(combinatorial_bound(a, model, sigma, class_for(variant), variant));
    }

    const auto y = o.column(&Sample::y);
    const auto ys = o.column(&Sample::y_biased);
    o.add("characterizing", characterizing_check_zero(y, ys, o.moments.variance, o.moments.stderr_variance, c.z_threshold));
    o.add("gap", gap_audit("gap", o.column(&Sample::gap), setup.gap_bound()));
    if (c.wants("linearity")) o.add("linearity", linearity_check(spec, 10, derive_seed(c.seed, kStageLinearity)));

    const double states = model.support_size() * static_cast<double>(c.n * (c.n - 1));
    const bool within = states <= kStateCap;
    if (within) {
        if (c.wants("exchangeability")) o.add("exchangeability", exchangeability_check(spec));
        const bool need_law = c.wants("oracle") || c.wants("moment-identity");
        const auto law = need_law ? enumerate_pair_law(spec, kStateCap) : std::vector<PairAtom>{};
        if (c.wants("oracle")) {
            std::vector<std::pair<double, double>> pairs;
            const std::size_t k = std::min<std::size_t>(o.samples.size(), kOracleDraws);
            for (std::size_t i = 0; i < k; ++i)
                pairs.emplace_back(o.samples[i].aux1, o.samples[i].aux2);
            const auto oracle = square_bias_oracle(law);
            o.add("oracle", chi_square_pairs("square-bias-oracle", pairs, oracle));
        }
        if (c.wants("moment-identity")) {
            CheckReport r;
            r.name = "moment-identity";
            const double target = 2.0 * setup.lambda() * o.moments.variance;
            const double enumerated = pair_law_square_moment(law);
            const double scale = std::max(target, 1e-300);
            r.observed = std::abs(enumerated - target) / scale;
            r.threshold = 1e-10;
            double sampler_err = std::abs(setup.square_moment() - target) / scale;
            r.pass = r.observed <= r.threshold && (setup.square_moment_stderr() || sampler_err <= 1e-10);
            r.details = {{"enumerated", enumerated}, {"two_lambda_sigma2", target}, {"sampler", setup.square_moment()}};
            o.add("moment-identity", r);
        }
    } else {
        o.skip("exchangeability", "state space beyond the enumeration cap");
        o.skip("oracle", "state space beyond the enumeration cap");
        if (c.wants("moment-identity")) {
            // 2 lambda sigma^2 against the sampler's E(Y'-Y'')^2, both up to MC error
            CheckReport r;
            r.name = "moment-identity";
            const double target = 2.0 * setup.lambda() * o.moments.variance;
            const double se_t = 2.0 * setup.lambda() * o.moments.stderr_variance.value_or(0.0);
            const double se_s = setup.square_moment_stderr().value_or(0.0);
            const double se = std::hypot(se_t, se_s);
            const double diff = setup.square_moment() - target;
            r.observed = se > 0.0 ? std::abs(diff) / se : (std::abs(diff) <= 1e-10 * target ? 0.0 : INFINITY);
            r.threshold = c.z_threshold;
            r.pass = r.observed <= r.threshold;
            r.details = {{"sampler", setup.square_moment()}, {"two_lambda_sigma2", target}, {"stderr", se}};
            o.add("moment-identity", r);
        }
    }
    o.skip("independence", "not a local-dependence construction");
    o.skip("index-weights", "not a local-dependence construction");
    o.skip("delta-proxy", "not a size-bias construction");
}

// ---- independent sums ----

class IndependentZeroPipeline : public Pipeline {
public:
    explicit IndependentZeroPipeline(const IndependentZeroBiasSampler& s) : s_(s) {}
    Sample draw(Rng& rng) const override {
        const auto d = s_.draw(rng);
        return {d.y, d.y_biased, std::abs(d.y_biased - d.y), d.x_biased, d.x_chosen, static_cast<std::uint32_t>(d.group), true};
    }

private:
    const IndependentZeroBiasSampler& s_;
};

class IndependentSizePipeline : public Pipeline {
public:
    explicit IndependentSizePipeline(const IndependentSizeBiasSampler& s) : s_(s) {}
    Sample draw(Rng& rng) const override {
        const auto d = s_.draw(rng);
        return {d.y, d.y_biased, std::abs(d.y_biased - d.y), d.x_biased, d.x_chosen, static_cast<std::uint32_t>(d.group), true};
    }

private:
    const IndependentSizeBiasSampler& s_;
};

MomentSummary exact_summary(double mean, double variance) {
    MomentSummary m;
    m.mean = mean;
    m.variance = variance;
    m.method = MomentSummary::Method::exact_enumeration;
    return m;
}

/// Which index was chosen: counts per group against the declared probabilities.
CheckReport group_choice(const std::vector<Sample>& samples, const std::vector<double>& probs) {
    std::vector<double> counts(probs.size(), 0.0);
    for (const auto& s : samples) counts[s.group] += 1.0;
    return chi_square_gof("group-choice", counts, probs);
}

void run_independent(const ExperimentConfig& c, std::size_t threads, Outcome& o) {
    IndependentSum sum(c.summands);
    const bool zero = c.construction == Construction::zero_independent;
    o.moments = exact_summary(sum.mean(), sum.variance());
    if (!(sum.variance() > 0.0)) throw DegenerateError(c.id + ": Var Y = 0");
    const double sigma = std::sqrt(sum.variance());
    std::vector<double> group_probs;
    if (zero) {
        IndependentZeroBiasSampler sampler(sum);
        for (std::size_t g = 0; g < sum.groups().size(); ++g) group_probs.push_back(sampler.group_probability(g));
        o.samples = draw_all(IndependentZeroPipeline(sampler), c.reps, c.seed, threads);
        for (auto& s : o.samples) {
            s.y -= sum.mean();
            s.y_biased -= sum.mean();
        }
    } else {
        IndependentSizeBiasSampler sampler(sum);
        for (std::size_t g = 0; g < sum.groups().size(); ++g) group_probs.push_back(sampler.group_probability(g));
        o.samples = draw_all(IndependentSizePipeline(sampler), c.reps, c.seed, threads);
    }

    double gap_bound = 0.0;
    for (const auto& g : sum.groups()) {
        const auto v = g.law.values();
        // |X* - X| <= max - min; |X^s - X| <= max for nonnegative X
        gap_bound = std::max(gap_bound, zero ? v.back() - v.front() : v.back());
    }
    o.coupling = {{"summands", sum.summand_count()}, {"groups", sum.groups().size()}, {"gap_bound", gap_bound}};

    double Delta = 0.0;
    if (!zero) {
        // Var E(Y^s - Y | X) = sum_alpha p_alpha^2 Var X_alpha bounds Delta^2
        for (const auto& g : sum.groups()) {
            const double p = g.law.mean() / sum.mean();
            Delta += static_cast<double>(g.count) * p * p * g.law.variance();
        }
        Delta = std::sqrt(Delta);
        o.coupling["Delta_upper"] = Delta;
    }
    for (const auto& v : c.bounds) {
        const auto variant = parse_bound_variant(v);
        o.bounds.push_back(zero ? zero_bias_bound(sigma, gap_bound / 2.0, class_for(variant), variant)
                                : size_bias_bound(sum.mean(), sigma, gap_bound, Delta, class_for(variant), variant));
    }

    const auto y = o.column(&Sample::y);
    const auto ys = o.column(&Sample::y_biased);
    o.add("characterizing", zero ? characterizing_check_zero(y, ys, sum.variance(), std::nullopt, c.z_threshold)
                                 : characterizing_check_size(y, ys, sum.mean(), std::nullopt, c.z_threshold));
    o.add("gap", gap_audit("gap", o.column(&Sample::gap), gap_bound));

    if (c.wants("oracle")) {
        CheckReport r;
        r.name = zero ? "zero-biased-summand-law" : "size-biased-summand-law";
        r.pass = true;
        r.observed = 1.0;
        r.threshold = 0.001;
        const auto choice = group_choice(o.samples, group_probs);
        r.pass = choice.pass;
        r.details["group_choice"] = choice.to_json();
        for (std::size_t g = 0; g < sum.groups().size(); ++g) {
            std::vector<double> xs;
            for (const auto& s : o.samples) {
                if (s.group == g) xs.push_back(s.aux1);
            }
            if (xs.size() < 20) continue;
            json entry;
            if (zero) {
                // KS against the zero-biased summand law at the 0.001 level
                ZeroBiasedLaw law(sum.groups()[g].law);
                const double ks = ks_statistic(xs, [&](double t) { return law.cdf(t); });
                const double band = std::sqrt(std::log(2.0 / 0.001) / (2.0 * static_cast<double>(xs.size())));
                entry = {{"ks", ks}, {"band", band}, {"draws", xs.size()}};
                if (ks > band) r.pass = false;
            } else {
                const auto law = size_bias_discrete_oracle(sum.groups()[g].law);
                const auto chi = chi_square_atoms("summand", xs, law.values(), law.probs());
                entry = chi.to_json();
                r.observed = std::min(r.observed, chi.observed);
                if (!chi.pass) r.pass = false;
            }
            r.details["groups"].push_back(entry);
        }
        o.add("oracle", r);
    }
    for (const char* k : {"linearity", "exchangeability", "moment-identity"}) o.skip(k, "not an exchangeable-pair construction");
    o.skip("independence", "not a local-dependence construction");
    o.skip("index-weights", "not a local-dependence construction");
    o.skip("delta-proxy", "Delta is bounded in closed form for independent sums");
}

// ---- local dependence ----

class LocalPipeline : public Pipeline {
public:
    LocalPipeline(const LocalStatModel& m, const DependencyStructure& s) : m_(m), s_(s) {}
    Sample draw(Rng& rng) const override {
        const auto d = size_bias_sum_draw(m_, s_, rng, true);
        return {d.y, d.y_s, d.gap, 0.0, 0.0, d.chosen, d.independence_ok};
    }

private:
    const LocalStatModel& m_;
    const DependencyStructure& s_;
};

void run_local(const ExperimentConfig& c, std::size_t threads, Outcome& o) {
    LocalStatModel model(c.local);
    const auto structure = build_dependency_structure(model);
    const bool enumerable = model.enumerable(kEnumerationCap);
    std::optional<DiscreteLaw> law;
    if (enumerable) law = exact_sum_law(model);

    o.samples = draw_all(LocalPipeline(model, structure), c.reps, c.seed, threads);
    const auto y = o.column(&Sample::y);
    const auto ys = o.column(&Sample::y_biased);
    if (law) {
        o.moments = exact_summary(law->mean(), law->variance());
    } else {
        o.moments = summarize_sample(y);
        o.moments.mean = model.mean();  // exact: |A| E X_alpha
        o.moments.stderr_mean.reset();
    }
    if (!(o.moments.variance > 0.0)) throw DegenerateError(c.id + ": Var Y = 0");
    const double sigma = std::sqrt(o.moments.variance);

    const double M = model.value_cap();
    const auto inputs = local_bound_inputs(structure, M);
    const double B = inputs.B_regular.value_or(inputs.B);
    const double Delta_bound = inputs.delta_bound_regular.value_or(inputs.delta_bound);
    o.coupling = {{"model", model.describe()},
                  {"index_count", structure.index_count},
                  {"rho", structure.rho},
                  {"b", structure.b},
                  {"minimal_b", structure.minimal_b},
                  {"pair_count", structure.pairs.size()},
                  {"minimal_pair_count", structure.minimal_pair_count},
                  {"distance_regular", structure.distance_regular},
                  {"M", M},
                  {"gap_bound", static_cast<double>(structure.b) * M},
                  {"bound_inputs", inputs.to_json()}};

    for (const auto& v : c.bounds) {
        const auto variant = parse_bound_variant(v);
        o.bounds.push_back(size_bias_bound(model.mean(), sigma, B, Delta_bound, class_for(variant), variant));
    }

    o.add("characterizing", characterizing_check_size(y, ys, model.mean(), std::nullopt, c.z_threshold));
    o.add("gap", gap_audit("gap", o.column(&Sample::gap), static_cast<double>(structure.b) * M));
    if (c.wants("independence")) {
        CheckReport r;
        r.name = "independence-audit";
        for (const auto& s : o.samples) r.observed += s.ok ? 0.0 : 1.0;
        r.threshold = 0.0;
        r.pass = r.observed == 0.0;
        r.details = {{"draws", o.samples.size()}};
        o.add("independence", r);
    }
    if (c.wants("index-weights")) {
        const std::uint64_t reps = 4000;
        const auto w = estimate_index_weights(model, reps, derive_seed(c.seed, kStageWeights));
        CheckReport r;
        r.name = "index-weights";
        // Bonferroni over |A| indices at level 0.001
        const double A = static_cast<double>(structure.index_count);
        r.threshold = std::sqrt(2.0 * std::log(2.0 * A / 0.001));
        for (std::size_t k = 0; k < w.p.size(); ++k) {
            if (w.stderr_p[k] > 0.0) r.observed = std::max(r.observed, std::abs(w.p[k] - structure.p[k]) / w.stderr_p[k]);
        }
        r.pass = r.observed <= r.threshold;
        r.details = {{"reps", reps}, {"declared", "1/|A|"}};
        o.add("index-weights", r);
    }
    if (law) {
        if (c.wants("oracle")) {
            const auto biased = size_bias_discrete_oracle(*law);
            std::vector<double> head(ys.begin(), ys.begin() + static_cast<std::ptrdiff_t>(std::min<std::size_t>(ys.size(), kOracleDraws)));
            o.add("oracle", chi_square_atoms("size-bias-oracle", head, biased.values(), biased.probs()));
        }
    } else {
        o.skip("oracle", "state space beyond the enumeration cap");
    }
    if (c.wants("delta-proxy")) {
        CheckReport r;
        r.name = "delta-proxy";
        r.threshold = Delta_bound;
        if (enumerable) {
            const auto exact = exact_delta(model, structure);
            r.observed = exact.proxy;
            r.pass = exact.proxy <= Delta_bound * (1 + 1e-12) && exact.delta <= exact.proxy + 1e-12;
            r.details = {{"method", "exact-enumeration"}, {"proxy", exact.proxy}, {"Delta", exact.delta}};
            o.coupling["Delta"] = exact.delta;
        } else {
            const auto est = delta_proxy_estimate(model, structure, c.delta_outer, c.delta_inner, derive_seed(c.seed, kStageDelta));
            r.observed = est.value - c.z_threshold * est.stderr;
            r.pass = r.observed <= Delta_bound;
            r.details = {{"method", "nested-monte-carlo"}, {"proxy", est.value}, {"stderr", est.stderr},
                         {"outer", est.outer}, {"inner", est.inner}};
            o.coupling["Delta_proxy"] = est.value;
        }
        o.add("delta-proxy", r);
    }
    for (const char* k : {"linearity", "exchangeability", "moment-identity"}) o.skip(k, "not an exchangeable-pair construction");
}

std::unique_ptr<Pipeline> simulation_pipeline(const ExperimentConfig& c, std::vector<std::shared_ptr<void>>& keep);

}  // namespace

json run(const ExperimentConfig& c, std::size_t threads) {
    using Clock = std::chrono::steady_clock;
    const auto t0 = Clock::now();
    Outcome o;
    o.config = &c;
    try {
        switch (c.construction) {
            case Construction::zero_uniform:
            case Construction::zero_cycle_type: run_permutation(c, threads, o); break;
            case Construction::zero_independent:
            case Construction::size_independent: run_independent(c, threads, o); break;
            case Construction::size_local: run_local(c, threads, o); break;
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        throw Error(e.category(), c.id + ": " + e.what());
    }
    const auto t1 = Clock::now();

    const auto w = standardize(o.column(&Sample::y), o.moments.mean * (c.construction == Construction::size_local ||
                                                                        c.construction == Construction::size_independent),
                               std::sqrt(o.moments.variance));
    const auto half = kolmogorov_distance(w);
    const auto interval = interval_distance(w);

    if (c.wants("delta-vs-bound")) {
        CheckReport r;
        r.name = "delta-vs-bound";
        r.pass = true;
        r.observed = -INFINITY;
        r.threshold = 0.0;
        r.details["comparisons"] = json::array();
        for (const auto& b : o.bounds) {
            const auto& d = b.formula.find("/interval") != std::string::npos ? interval : half;
            const auto cmp = delta_vs_bound(d, b);
            r.pass = r.pass && cmp.pass;
            r.observed = std::max(r.observed, cmp.observed - cmp.threshold);
            r.details["comparisons"].push_back(cmp.to_json());
        }
        for (const auto& d : {half, interval}) r.pass = r.pass && d.value <= 1.0;
        if (o.bounds.empty()) r.observed = 0.0;
        o.add("delta-vs-bound", r);
    }

    json report;
    report["schema_version"] = 1;
    report["id"] = c.id;
    report["construction"] = to_string(c.construction);
    report["seed"] = c.seed;
    report["reps"] = c.reps;
    report["config"] = c.echo;
    report["moments"] = moments_json(o.moments);
    report["coupling"] = o.coupling;
    report["distances"] = json::array({half.to_json(), interval.to_json()});
    report["bounds"] = json::array();
    for (const auto& b : o.bounds) report["bounds"].push_back(b.to_json());
    report["checks"] = json::array();
    bool pass = true;
    for (const auto& ch : o.checks) {
        report["checks"].push_back(ch.to_json());
        pass = pass && ch.pass;
    }
    report["pass"] = pass;
    const auto t2 = Clock::now();
    report["runtime"] = {{"threads", threads == 0 ? default_threads() : threads},
                         {"isa", std::string(kernels::isa_name(kernels::active().isa))},
                         {"pipeline_seconds", std::chrono::duration<double>(t1 - t0).count()},
                         {"total_seconds", std::chrono::duration<double>(t2 - t0).count()}};
    return report;
}

namespace {

template <class T, class... Args>
T& hold(std::vector<std::shared_ptr<void>>& keep, Args&&... args) {
    auto p = std::make_shared<T>(std::forward<Args>(args)...);
    keep.push_back(p);
    return *p;
}

std::unique_ptr<Pipeline> simulation_pipeline(const ExperimentConfig& c, std::vector<std::shared_ptr<void>>& keep) {
    switch (c.construction) {
        case Construction::zero_uniform:
        case Construction::zero_cycle_type: {
            auto& setup = hold<PermutationSetup>(keep, c);
            return std::move(setup.pipeline);
        }
        case Construction::zero_independent:
            return std::make_unique<IndependentZeroPipeline>(
                hold<IndependentZeroBiasSampler>(keep, IndependentSum(c.summands)));
        case Construction::size_independent:
            return std::make_unique<IndependentSizePipeline>(
                hold<IndependentSizeBiasSampler>(keep, IndependentSum(c.summands)));
        case Construction::size_local: {
            auto& model = hold<LocalStatModel>(keep, c.local);
            auto& structure = hold<DependencyStructure>(keep, build_dependency_structure(model));
            return std::make_unique<LocalPipeline>(model, structure);
        }
    }
    return nullptr;
}

}  // namespace

std::vector<DrawRecord> simulate(const ExperimentConfig& c, std::size_t threads) {
    std::vector<std::shared_ptr<void>> keep;
    auto pipeline = simulation_pipeline(c, keep);
    const auto samples = draw_all(*pipeline, c.reps, c.seed, threads);
    std::vector<DrawRecord> out(samples.size());
    for (std::size_t k = 0; k < samples.size(); ++k) out[k] = {samples[k].y, samples[k].y_biased, samples[k].gap};
    return out;
}

json bounds_only(const ExperimentConfig& c, std::size_t threads) {
    json out;
    out["id"] = c.id;
    out["construction"] = to_string(c.construction);
    MomentSummary m;
    std::vector<BoundReport> bounds;
    switch (c.construction) {
        case Construction::zero_uniform:
        case Construction::zero_cycle_type: {
            const auto a = build_score(c);
            const auto model = c.construction == Construction::zero_uniform
                                   ? PermutationModel::uniform(c.n)
                                   : PermutationModel::fixed_cycle_type(CycleType::from_pairs(c.n, c.cycle_type));
            m = model.support_size() <= kEnumerationCap
                    ? exact_moments(a, model, kEnumerationCap)
                    : mc_moments(a, model, std::max<std::uint64_t>(c.reps, 200000), derive_seed(c.seed, kStageMoments),
                                 threads);
            for (const auto& v : c.bounds) {
                const auto variant = parse_bound_variant(v);
                bounds.push_back(combinatorial_bound(a, model, std::sqrt(m.variance), class_for(variant), variant));
            }
            break;
        }
        case Construction::zero_independent:
        case Construction::size_independent: {
            // the full pipeline is cheap to set up; reuse it with a single draw
            auto one = c;
            one.reps = 1;
            one.checks = {"gap"};
            const auto r = run(one, threads);
            out["moments"] = r["moments"];
            out["bounds"] = r["bounds"];
            return out;
        }
        case Construction::size_local: {
            LocalStatModel model(c.local);
            const auto s = build_dependency_structure(model);
            if (model.enumerable(kEnumerationCap)) {
                const auto law = exact_sum_law(model);
                m = exact_summary(law.mean(), law.variance());
            } else {
                std::vector<double> ys(c.reps);
                const auto base = derive_seed(c.seed, kStageMoments);
                for_each_chunk(c.reps, threads, [&](std::size_t chunk, std::size_t b, std::size_t e) {
                    Rng rng(derive_seed(base, chunk));
                    std::vector<double> state;
                    for (std::size_t i = b; i < e; ++i) {
                        model.sample_state(rng, state);
                        ys[i] = model.total(state);
                    }
                });
                m = summarize_sample(ys);
                m.mean = model.mean();
            }
            const auto inputs = local_bound_inputs(s, model.value_cap());
            out["bound_inputs"] = inputs.to_json();
            for (const auto& v : c.bounds) {
                const auto variant = parse_bound_variant(v);
                bounds.push_back(size_bias_bound(model.mean(), std::sqrt(m.variance), inputs.B_regular.value_or(inputs.B),
                                                 inputs.delta_bound_regular.value_or(inputs.delta_bound),
                                                 class_for(variant), variant));
            }
            break;
        }
    }
    out["moments"] = moments_json(m);
    out["bounds"] = json::array();
    for (const auto& b : bounds) out["bounds"].push_back(b.to_json());
    return out;
}

void write_spool(const ExperimentConfig& c, const std::filesystem::path& path) {
    if (c.construction != Construction::zero_uniform && c.construction != Construction::zero_cycle_type)
        throw ConfigError(c.id + ": the binary spool holds permutation zero-bias draws only");
    PermutationSetup setup(c);
    DrawSpool spool(path);
    const std::uint64_t base = derive_seed(c.seed, kStageDraws);
    for (std::uint64_t begin = 0, chunk = 0; begin < c.reps; begin += kChunkSize, ++chunk) {
        Rng rng(derive_seed(base, chunk));
        const auto end = std::min<std::uint64_t>(c.reps, begin + kChunkSize);
        for (auto i = begin; i < end; ++i) spool.write(setup.uniform ? setup.uniform->draw(rng) : setup.cycle->draw(rng));
    }
}

std::vector<SweepRow> sweep(const std::filesystem::path& path, const std::string& key, const std::vector<double>& values,
                            std::optional<std::uint64_t> seed, std::optional<std::uint64_t> reps, std::size_t threads) {
    if (values.empty()) throw ConfigError("sweep: grid is empty");
    auto tables = detail::experiment_tables(path);
    const auto& [base, where] = tables.front();
    std::vector<SweepRow> rows;
    for (double v : values) {
        SweepRow row{key, v, std::nullopt, ""};
        try {
            auto t = base;
            t.erase("sweep");
            detail::set_dotted(t, key, v);
            std::ostringstream name;
            name << where << "[" << key << "=" << v << "]";
            auto c = detail::parse_config_table(t, name.str());
            if (seed) c.seed = *seed;
            if (reps) c.reps = *reps;
            row.report = run(c, threads);
        } catch (const std::exception& e) {
            row.error = e.what();
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

namespace {

std::string num(double x) {
    std::ostringstream os;
    os << std::setprecision(10) << x;
    return os.str();
}

std::string csv_quote(const std::string& s) {
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + "\"";
}

const json* distance(const json& report, const std::string& metric) {
    for (const auto& d : report["distances"]) {
        if (d["metric"] == metric) return &d;
    }
    return nullptr;
}

}  // namespace

std::string sweep_csv_header() {
    return "key,value,sigma_hat,delta_half_line,delta_interval,bound,vacuous,pass,error";
}

std::string sweep_csv_row(const SweepRow& row) {
    std::ostringstream os;
    os << row.key << "," << num(row.value) << ",";
    if (!row.report) {
        os << ",,,,,false," << csv_quote(row.error);
        return os.str();
    }
    const auto& r = *row.report;
    os << num(std::sqrt(r["moments"]["variance"].get<double>())) << ",";
    os << num((*distance(r, "half-line"))["value"].get<double>()) << ",";
    os << num((*distance(r, "interval"))["value"].get<double>()) << ",";
    const json* bound = nullptr;
    for (const auto& b : r["bounds"]) {
        if (b["formula"].get<std::string>().ends_with("/half-line")) bound = &b;
    }
    if (!bound && !r["bounds"].empty()) bound = &r["bounds"][0];
    if (bound) os << num((*bound)["delta_bound"].get<double>()) << "," << ((*bound)["vacuous"].get<bool>() ? "true" : "false");
    else os << ",";
    os << "," << (r["pass"].get<bool>() ? "true" : "false") << ",";
    return os.str();
}

std::string format_report_table(const json& r) {
    std::ostringstream os;
    os << r["id"].get<std::string>() << " (" << r["construction"].get<std::string>() << ", reps=" << r["reps"]
       << ", seed=" << r["seed"] << ")\n";
    const auto& m = r["moments"];
    os << "  mean " << num(m["mean"].get<double>()) << ", variance " << num(m["variance"].get<double>()) << " ["
       << m["method"].get<std::string>() << "]\n";
    for (const auto& d : r["distances"]) {
        os << "  " << std::left << std::setw(10) << d["metric"].get<std::string>() << " distance "
           << num(d["value"].get<double>()) << " (band " << num(d["dkw_band"].get<double>()) << ")\n";
    }
    for (const auto& b : r["bounds"]) {
        os << "  bound " << std::left << std::setw(36) << b["formula"].get<std::string>() << " "
           << std::setw(14) << num(b["delta_bound"].get<double>())
           << (b["precondition_ok"].get<bool>() ? "" : " precondition-fails")
           << (b["vacuous"].get<bool>() ? " vacuous" : "") << "\n";
    }
    for (const auto& ch : r["checks"]) {
        os << "  " << (ch["pass"].get<bool>() ? "PASS " : "FAIL ") << std::left << std::setw(18)
           << ch["name"].get<std::string>() << " observed " << num(ch["observed"].get<double>()) << " threshold "
           << num(ch["threshold"].get<double>()) << (ch["details"].contains("skipped") ? " (skipped)" : "") << "\n";
    }
    os << "  " << (r["pass"].get<bool>() ? "all checks passed" : "CHECK FAILURE") << "\n";
    return os.str();
}

std::string format_report_csv(const json& r) {
    std::ostringstream os;
    os << "id,kind,name,value,threshold,pass\n";
    const std::string id = r["id"].get<std::string>();
    for (const auto& d : r["distances"]) {
        os << id << ",distance," << d["metric"].get<std::string>() << "," << num(d["value"].get<double>()) << ","
           << num(d["dkw_band"].get<double>()) << ",\n";
    }
    for (const auto& b : r["bounds"]) {
        os << id << ",bound," << b["formula"].get<std::string>() << "," << num(b["delta_bound"].get<double>()) << ",,"
           << (b["precondition_ok"].get<bool>() ? "true" : "false") << "\n";
    }
    for (const auto& ch : r["checks"]) {
        os << id << ",check," << ch["name"].get<std::string>() << "," << num(ch["observed"].get<double>()) << ","
           << num(ch["threshold"].get<double>()) << "," << (ch["pass"].get<bool>() ? "true" : "false") << "\n";
    }
    return os.str();
}

}  // namespace steinbias
