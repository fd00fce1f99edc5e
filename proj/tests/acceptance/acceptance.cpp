// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
// usage: acceptance [configs-dir]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "steinbias/bounds.hpp"
#include "steinbias/experiment.hpp"
#include "steinbias/independent_sum.hpp"
#include "steinbias/moments.hpp"
#include "steinbias/parallel.hpp"
#include "steinbias/size_bias.hpp"
#include "steinbias/verify.hpp"
#include "steinbias/zero_bias.hpp"

using namespace steinbias;
namespace fs = std::filesystem;

namespace {

fs::path g_configs = "configs";

struct Outcome {
    bool pass = true;
    std::string detail;
};

void note(Outcome& o, bool ok, const std::string& what) {
    if (!ok) {
        o.pass = false;
        if (!o.detail.empty()) o.detail += "; ";
        o.detail += "failed: " + what;
    }
}

std::string fmt(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

// Draws total values with fn(rng) in seeded chunks, thread-count independent.
template <class T, class Fn>
std::vector<T> draw_many(std::size_t total, std::uint64_t seed, Fn fn) {
    std::vector<T> out(total);
    for_each_chunk(total, 0, [&](std::size_t chunk, std::size_t begin, std::size_t end) {
        Rng rng(derive_seed(seed, chunk));
        for (std::size_t k = begin; k < end; ++k) out[k] = fn(rng);
    });
    return out;
}

ScoreArray uniform_array(std::size_t n, std::uint64_t seed) {
    return center_for_uniform(n, generate_raw_scores(n, "gaussian", seed));
}

ScoreArray cycle_array(std::size_t n, std::uint64_t seed) {
    return center_for_cycle_type(n, generate_raw_scores(n, "gaussian", seed));
}

// small integer entries so the pair law has few atoms
ScoreArray coarse_array(std::size_t n, std::uint64_t seed, bool cycle) {
    auto raw = generate_raw_scores(n, "uniform", seed);
    for (double& v : raw) v = std::floor(4.0 * v);
    return cycle ? center_for_cycle_type(n, raw) : center_for_uniform(n, raw);
}

// partitions of n with every part >= 2, as (q, c_q) pairs
void partitions(std::size_t rest, std::size_t max_part, std::vector<std::size_t>& cur,
                std::vector<std::vector<std::pair<std::size_t, std::size_t>>>& out) {
    if (rest == 0) {
        std::vector<std::pair<std::size_t, std::size_t>> pairs;
        for (auto q : cur) {
            if (!pairs.empty() && pairs.back().first == q) {
                ++pairs.back().second;
            } else {
                pairs.emplace_back(q, 1);
            }
        }
        out.push_back(pairs);
        return;
    }
    for (std::size_t q = std::min(rest, max_part); q >= 2; --q) {
        cur.push_back(q);
        partitions(rest - q, q, cur, out);
        cur.pop_back();
    }
}

std::vector<PermutationModel> fixed_point_free_types(std::size_t n) {
    std::vector<std::vector<std::pair<std::size_t, std::size_t>>> all;
    std::vector<std::size_t> cur;
    partitions(n, n, cur, all);
    std::vector<PermutationModel> models;
    for (const auto& pairs : all) models.push_back(PermutationModel::fixed_cycle_type(CycleType::from_pairs(n, pairs)));
    return models;
}

LocalModelSpec window(std::size_t n, std::size_t m) {
    LocalModelSpec s;
    s.kind = LocalModelSpec::Kind::window;
    s.n = n;
    s.m = m;
    return s;
}

LocalModelSpec pattern(std::size_t n, std::vector<std::uint32_t> tau) {
    LocalModelSpec s;
    s.kind = LocalModelSpec::Kind::perm_pattern;
    s.n = n;
    s.m = tau.size();
    s.pattern = std::move(tau);
    return s;
}

LocalModelSpec torus(std::size_t n, std::size_t p) {
    LocalModelSpec s;
    s.kind = LocalModelSpec::Kind::torus_pattern;
    s.n = n;
    s.p = p;
    s.color_probs = {0.5, 0.3, 0.2};
    s.target.assign(std::size_t{1} << p, 0);
    s.target[0] = 1;
    return s;
}

LocalModelSpec subgraph(std::size_t n, std::size_t p, double q) {
    LocalModelSpec s;
    s.kind = LocalModelSpec::Kind::subgraph_count;
    s.n = n;
    s.p = p;
    s.edge_probability = q;
    return s;
}

LocalModelSpec hypercube(std::size_t p) {
    LocalModelSpec s;
    s.kind = LocalModelSpec::Kind::hypercube_max;
    s.p = p;
    return s;
}

bool rel_close(double x, double y, double tol) { return std::abs(x - y) <= tol * std::max({1.0, std::abs(x), std::abs(y)}); }

// ---------------------------------------------------------------------------

Outcome c1_zero_bias_sanity() {
    IndependentZeroBiasSampler s(IndependentSum({{DiscreteLaw::two_point(1.0), 1}}));
    auto ys = draw_many<double>(100000, 101, [&](Rng& r) { return s.draw(r).y_biased; });
    const double ks = ks_statistic(ys, [](double t) { return std::clamp((t + 1.0) / 2.0, 0.0, 1.0); });
    Outcome o;
    o.detail = "KS = " + fmt(ks) + " <= 0.01";
    note(o, ks <= 0.01, "KS bound");
    return o;
}

Outcome c2_exact_moments() {
    auto a = ScoreArray::from_rows({{1, -1, 0}, {-1, 1, 0}, {0, 0, 0}});
    auto m = exact_moments(a, PermutationModel::uniform(3));
    // second route: all six permutations by hand
    double s1 = 0, s2 = 0;
    std::vector<std::uint32_t> p = {0, 1, 2};
    int count = 0;
    do {
        const double y = a(0, p[0]) + a(1, p[1]) + a(2, p[2]);
        s1 += y;
        s2 += y * y;
        ++count;
    } while (std::next_permutation(p.begin(), p.end()));
    Outcome o;
    o.detail = "mu = " + fmt(m.mean) + ", sigma^2 = " + fmt(m.variance);
    note(o, m.mean == 0.0 && m.variance == 2.0, "library moments");
    note(o, count == 6 && s1 == 0.0 && s2 / 6.0 == 2.0, "hand enumeration");
    return o;
}

Outcome c3_linearity_uniform() {
    Outcome o;
    double worst = 0.0;
    for (std::size_t k = 0; k < 100; ++k) {
        const std::size_t n = 4 + k % 5;
        auto spec = ExchangeablePairSpec::make(PermutationModel::uniform(n), uniform_array(n, 3000 + k));
        auto r = linearity_check(spec, 10, 7 + k, 1e-10);
        worst = std::max(worst, r.observed);
        note(o, r.pass, "array " + std::to_string(k));
        note(o, std::abs(spec.lambda - 2.0 / (n - 1.0)) < 1e-15, "lambda " + std::to_string(n));
    }
    o.detail = "max relative error " + fmt(worst) + " <= 1e-10" + (o.pass ? "" : " " + o.detail);
    return o;
}

Outcome c4_linearity_cycle() {
    Outcome o;
    double worst = 0.0;
    std::size_t types = 0, broken_failed = 0;
    for (std::size_t n = 4; n <= 8; ++n) {
        for (const auto& model : fixed_point_free_types(n)) {
            ++types;
            for (std::uint64_t k = 0; k < 4; ++k) {
                auto a = cycle_array(n, 500 * n + 10 * types + k);
                note(o, a.symmetric() && a.zero_diagonal() && a.globally_centered(), "array flags");
                auto spec = ExchangeablePairSpec::make(model, a);
                note(o, std::abs(spec.lambda - 4.0 / n) < 1e-15, "lambda");
                auto r = linearity_check(spec, 10, 11 + k, 1e-10);
                worst = std::max(worst, r.observed);
                note(o, r.pass, model.describe());
            }
            // a_22 = 0.7, global sum held at zero through the off-diagonal entries
            auto rows = cycle_array(n, 900 + types).to_rows();
            rows[2][2] = 0.7;
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = 0; j < n; ++j) {
                    if (i != j) rows[i][j] -= 0.7 / double(n * (n - 1));
                }
            }
            auto bad = ScoreArray::from_rows(rows);
            note(o, bad.globally_centered() && bad.symmetric(), "injected array flags");
            if (!linearity_check(ExchangeablePairSpec::unchecked(model, bad), 10, 3, 1e-10).pass) ++broken_failed;
        }
    }
    note(o, broken_failed == types, "a_ii injection detected on every type");
    o.detail = std::to_string(types) + " cycle types, max relative error " + fmt(worst) + ", injected a_ii failed " +
               std::to_string(broken_failed) + "/" + std::to_string(types) + (o.pass ? "" : "; " + o.detail);
    return o;
}

// E(Y'-Y'')^2 by brute force over support x ordered pairs
double brute_square_moment(const ExchangeablePairSpec& spec) {
    const std::size_t n = spec.model.n();
    double total = 0.0, weight = 0.0;
    spec.model.for_each_in_support([&](std::span<const std::uint32_t> img) {
        Permutation pi(std::vector<std::uint32_t>(img.begin(), img.end()));
        const double y = combinatorial_sum(spec.score, pi.images());
        for (std::uint32_t i = 0; i < n; ++i) {
            for (std::uint32_t j = 0; j < n; ++j) {
                if (i == j) continue;
                const double d = y - combinatorial_sum(spec.score, pair_partner(spec.model.kind(), pi, i, j).images());
                total += d * d;
                weight += 1.0;
            }
        }
    });
    return total / weight;
}

Outcome c5_moment_identity() {
    Outcome o;
    double worst = 0.0;
    std::size_t instances = 0;
    auto one = [&](const ExchangeablePairSpec& spec, double sampler_moment) {
        const auto m = exact_moments(spec.score, spec.model, 1e6);
        const double target = 2.0 * spec.lambda * m.variance;
        const double brute = brute_square_moment(spec);
        const double err = std::max(std::abs(brute - target), std::abs(sampler_moment - target)) / target;
        worst = std::max(worst, err);
        note(o, err <= 1e-10, spec.model.describe());
        ++instances;
    };
    for (std::size_t n = 3; n <= 7; ++n) {
        auto a = uniform_array(n, 40 + n);
        one(ExchangeablePairSpec::make(PermutationModel::uniform(n), a), UniformZeroBiasSampler(a).square_moment());
    }
    for (std::size_t n = 4; n <= 8; ++n) {
        for (const auto& model : fixed_point_free_types(n)) {
            if (model.support_size() * n * (n - 1) > 1e6) continue;
            auto a = cycle_array(n, 60 + instances);
            one(ExchangeablePairSpec::make(model, a), CycleTypeZeroBiasSampler(a, model).square_moment());
        }
    }
    o.detail = std::to_string(instances) + " instances, max relative error " + fmt(worst) + " <= 1e-10" +
               (o.pass ? "" : "; " + o.detail);
    return o;
}

Outcome c6_gap_certificates() {
    Outcome o;
    constexpr std::size_t N = 1000000;
    std::ostringstream msg;

    auto ua = uniform_array(10, 606);
    UniformZeroBiasSampler us(ua);
    auto ug = draw_many<double>(N, 61, [&](Rng& r) { return us.draw(r).gap; });
    auto ur = gap_audit("uniform", ug, 8.0 * ua.c_sup());
    note(o, ur.pass, "uniform 8C");
    msg << "uniform max/8C = " << fmt(ur.observed / ur.threshold);

    auto ca = cycle_array(10, 607);
    auto cm = PermutationModel::fixed_cycle_type(CycleType::from_pairs(10, {{2, 1}, {3, 1}, {5, 1}}));
    CycleTypeZeroBiasSampler cs(ca, cm);
    auto cg = draw_many<double>(N, 62, [&](Rng& r) { return cs.draw(r).gap; });
    auto cr = gap_audit("cycle-type", cg, 40.0 * ca.c_sup());
    note(o, cr.pass, "cycle type 40C");
    msg << ", cycle type max/40C = " << fmt(cr.observed / cr.threshold);

    for (auto spec : {window(100, 3), torus(9, 2)}) {
        LocalStatModel model(spec);
        auto st = build_dependency_structure(model);
        auto sg = draw_many<double>(N, 63, [&](Rng& r) {
            auto d = size_bias_sum_draw(model, st, r, false);
            return d.gap;
        });
        auto sr = gap_audit("size-bias", sg, double(st.b) * model.value_cap());
        note(o, sr.pass, model.describe() + " bM");
        msg << ", " << model.describe() << " max/bM = " << fmt(sr.observed / sr.threshold);
    }
    o.detail = msg.str() + (o.pass ? "" : "; " + o.detail);
    return o;
}

Outcome c7_characterizing() {
    Outcome o;
    std::ostringstream msg;
    constexpr std::size_t N = 1000000;
    auto add = [&](const std::string& name, const CheckReport& r) {
        note(o, r.pass, name);
        msg << name << " " << fmt(r.observed) << ", ";
    };
    using YY = std::pair<double, double>;
    auto split = [](const std::vector<YY>& v, std::vector<double>& a, std::vector<double>& b) {
        a.resize(v.size());
        b.resize(v.size());
        for (std::size_t k = 0; k < v.size(); ++k) std::tie(a[k], b[k]) = v[k];
    };
    std::vector<double> y, yb;

    {
        auto a = uniform_array(7, 71);
        UniformZeroBiasSampler s(a);
        const double var = exact_moments(a, PermutationModel::uniform(7)).variance;
        split(draw_many<YY>(N, 72, [&](Rng& r) { auto d = s.draw(r); return YY{d.y, d.y_star}; }), y, yb);
        add("uniform", characterizing_check_zero(y, yb, var));
    }
    {
        auto a = cycle_array(8, 73);
        auto model = PermutationModel::fixed_cycle_type(CycleType::from_pairs(8, {{3, 1}, {5, 1}}));
        CycleTypeZeroBiasSampler s(a, model);
        const double var = exact_moments(a, model).variance;
        split(draw_many<YY>(N, 74, [&](Rng& r) { auto d = s.draw(r); return YY{d.y, d.y_star}; }), y, yb);
        add("cycle-type", characterizing_check_zero(y, yb, var));
    }
    {
        IndependentZeroBiasSampler s(IndependentSum(
            {{DiscreteLaw::two_point(1.0), 50}, {DiscreteLaw({-0.6, 2.4}, {0.8, 0.2}), 20}}));
        split(draw_many<YY>(N, 75, [&](Rng& r) { auto d = s.draw(r); return YY{d.y, d.y_biased}; }), y, yb);
        add("independent-zero", characterizing_check_zero(y, yb, s.sum().variance()));
    }
    {
        IndependentSizeBiasSampler s(
            IndependentSum({{DiscreteLaw::bernoulli(0.3), 30}, {DiscreteLaw({0, 1, 3}, {0.5, 0.3, 0.2}), 10}}));
        split(draw_many<YY>(N, 76, [&](Rng& r) { auto d = s.draw(r); return YY{d.y, d.y_biased}; }), y, yb);
        add("independent-size", characterizing_check_size(y, yb, s.sum().mean()));
    }
    for (auto spec : {window(60, 3), pattern(20, {1, 0, 2}), torus(7, 2), subgraph(5, 2, 0.7), hypercube(5)}) {
        LocalStatModel model(spec);
        auto st = build_dependency_structure(model);
        split(draw_many<YY>(N, 77, [&](Rng& r) { auto d = size_bias_sum_draw(model, st, r, false); return YY{d.y, d.y_s}; }),
              y, yb);
        add(to_string(spec.kind), characterizing_check_size(y, yb, model.mean()));
    }
    auto text = msg.str();
    text.resize(text.size() - 2);
    o.detail = "max |z| per construction (<= 4): " + text + (o.pass ? "" : "; " + o.detail);
    return o;
}

Outcome c8_oracle_equivalence() {
    Outcome o;
    constexpr std::size_t N = 200000;
    std::size_t tests = 0;
    double min_p = 1.0;
    using YY = std::pair<double, double>;
    auto pairs_check = [&](const std::string& name, const ExchangeablePairSpec& spec, auto& sampler, std::uint64_t seed) {
        const auto oracle = square_bias_oracle(enumerate_pair_law(spec, 1e6));
        auto got = draw_many<YY>(N, seed, [&](Rng& r) { auto d = sampler.draw(r); return YY{d.y_dagger, d.y_ddagger}; });
        auto r = chi_square_pairs(name, got, oracle);
        note(o, r.pass, name);
        min_p = std::min(min_p, r.observed);
        ++tests;
    };
    for (std::size_t n = 3; n <= 7; ++n) {
        auto a = coarse_array(n, 800 + n, false);
        UniformZeroBiasSampler s(a);
        pairs_check("uniform n=" + std::to_string(n), ExchangeablePairSpec::make(PermutationModel::uniform(n), a), s, 81 + n);
    }
    for (std::size_t n = 4; n <= 8; ++n) {
        for (const auto& model : fixed_point_free_types(n)) {
            if (model.support_size() * n * (n - 1) > 1e6) continue;
            auto a = coarse_array(n, 820 + tests, true);
            CycleTypeZeroBiasSampler s(a, model);
            pairs_check(model.describe(), ExchangeablePairSpec::make(model, a), s, 90 + tests);
        }
    }
    for (auto spec : {pattern(3, {0, 1}), pattern(5, {1, 0}), pattern(6, {1, 0, 2}), pattern(7, {0, 2, 1})}) {
        LocalStatModel model(spec);
        auto st = build_dependency_structure(model);
        const auto oracle = size_bias_discrete_oracle(exact_sum_law(model));
        auto ys = draw_many<double>(N, 95 + tests, [&](Rng& r) { return size_bias_sum_draw(model, st, r, false).y_s; });
        auto r = chi_square_atoms(model.describe(), ys, oracle.values(), oracle.probs());
        note(o, r.pass, model.describe());
        min_p = std::min(min_p, r.observed);
        ++tests;
    }
    {
        // binomial(25, 0.3): pmf computed here, size-biased by hand
        const int k = 25;
        std::vector<double> vals, probs;
        double mean = 0.0;
        for (int j = 0; j <= k; ++j) {
            const double pj = std::exp(std::lgamma(k + 1.0) - std::lgamma(j + 1.0) - std::lgamma(k - j + 1.0) +
                                       j * std::log(0.3) + (k - j) * std::log(0.7));
            vals.push_back(j);
            probs.push_back(pj);
            mean += j * pj;
        }
        for (int j = 0; j <= k; ++j) probs[j] *= j / mean;
        IndependentSizeBiasSampler s(IndependentSum({{DiscreteLaw::bernoulli(0.3), 25}}));
        auto ys = draw_many<double>(N, 99, [&](Rng& r) { return s.draw(r).y_biased; });
        auto r = chi_square_atoms("binomial", ys, vals, probs);
        note(o, r.pass, "binomial size-bias");
        min_p = std::min(min_p, r.observed);
        ++tests;
    }
    o.detail = std::to_string(tests) + " chi-square tests, min p-value " + fmt(min_p) + " >= 0.001" +
               (o.pass ? "" : "; " + o.detail);
    return o;
}

Outcome c9_circular_ascents() {
    constexpr std::size_t N = 1000000;
    LocalStatModel model(pattern(3, {0, 1}));
    auto st = build_dependency_structure(model);
    auto ys = draw_many<double>(N, 909, [&](Rng& r) { return size_bias_sum_draw(model, st, r, false).y_s; });
    const double p1 = double(std::count(ys.begin(), ys.end(), 1.0)) / N;
    const double p2 = double(std::count(ys.begin(), ys.end(), 2.0)) / N;
    const double se1 = std::sqrt((1.0 / 3) * (2.0 / 3) / N);
    Outcome o;
    o.detail = "P(Ys=1) = " + fmt(p1) + ", P(Ys=2) = " + fmt(p2) + ", stderr " + fmt(se1);
    note(o, std::abs(p1 - 1.0 / 3) <= 4 * se1, "P(Ys=1)");
    note(o, std::abs(p2 - 2.0 / 3) <= 4 * se1, "P(Ys=2)");
    note(o, std::abs(p1 + p2 - 1.0) < 1e-12, "support {1,2}");
    return o;
}

Outcome c10_bound_regression() {
    Outcome o;
    const auto half = SmoothnessClass::half_lines();
    auto z = zero_bias_bound(1.0, 1.0 / 24, half, BoundVariant::half_line);
    note(o, std::abs(z.delta_bound - 128.0 / 12) <= 1e-12, "128/12");

    for (double sigma : {0.5, 2.0, 37.0}) {
        auto a = uniform_array(6, 1000);
        auto r = combinatorial_bound(a, PermutationModel::uniform(6), sigma, half);
        note(o, rel_close(r.A, 8.0 * a.c_sup() / sigma, 1e-14), "8C/sigma");
        auto c = cycle_array(6, 1001);
        auto m = PermutationModel::fixed_cycle_type(CycleType::from_pairs(6, {{3, 2}}));
        auto rc = combinatorial_bound(c, m, sigma, half);
        note(o, rel_close(rc.A, 40.0 * c.c_sup() / sigma, 1e-14), "40C/sigma");
    }
    for (auto [n, m] : {std::pair<std::size_t, std::size_t>{100, 2}, {50, 3}, {200, 4}}) {
        auto in = local_bound_inputs(build_dependency_structure(LocalStatModel(window(n, m))), 1.0);
        note(o, in.B == 2.0 * m - 1, "window B");
        const double d = (2.0 * m - 1) * std::sqrt(6.0 * m - 5) / std::sqrt(double(n));
        note(o, in.delta_bound_regular && rel_close(*in.delta_bound_regular, d, 1e-12), "window Delta");
    }
    for (auto [n, p] : {std::pair<std::size_t, std::size_t>{7, 1}, {9, 2}, {7, 3}}) {
        auto in = local_bound_inputs(build_dependency_structure(LocalStatModel(torus(n, p))), 1.0);
        note(o, in.B == std::pow(3.0, double(p)), "torus B");
        note(o, in.delta_bound_regular && rel_close(*in.delta_bound_regular, std::pow(63.0 / n, p / 2.0), 1e-12),
             "torus Delta");
    }
    for (std::size_t p : {3, 5, 7}) {
        auto in = local_bound_inputs(build_dependency_structure(LocalStatModel(hypercube(p))), 1.0);
        note(o, in.B == double(1 + p + p * (p - 1) / 2), "hypercube B");
    }
    o.detail = "128/12 = " + fmt(z.delta_bound) + "; 8C, 40C and local inputs at 3 points each" +
               (o.pass ? "" : "; " + o.detail);
    return o;
}

Outcome c11_bound_vs_empirical() {
    Outcome o;
    std::size_t runs = 0, comparisons = 0;
    bool large_ok = false;
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(g_configs)) {
        if (e.path().extension() == ".toml") files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    note(o, !files.empty(), "no configs found in " + g_configs.string());
    for (const auto& f : files) {
        for (const auto& cfg : load_experiments(f)) {
            const auto rep = run(cfg);
            ++runs;
            double half = 0, half_band = 0, iv = 0, iv_band = 0;
            for (const auto& d : rep["distances"]) {
                const double v = d["value"], b = d["dkw_band"];
                note(o, v >= 0.0 && v <= 1.0, cfg.id + " distance in [0,1]");
                if (d["metric"] == "interval") {
                    iv = v, iv_band = b;
                } else {
                    half = v, half_band = b;
                }
            }
            for (const auto& b : rep["bounds"]) {
                const double bound = b["delta_bound"];
                note(o, b["vacuous"].get<bool>() == (bound > 1.0), cfg.id + " vacuity flag");
                if (!b["precondition_ok"].get<bool>()) continue;
                const bool interval = b["formula"].get<std::string>().ends_with("/interval");
                const double lhs = interval ? iv - iv_band : half - half_band;
                note(o, lhs <= std::min(bound, 1.0), cfg.id + " " + b["formula"].get<std::string>());
                ++comparisons;
                if (cfg.construction == Construction::zero_independent && !b["vacuous"].get<bool>() &&
                    b["sigma"].get<double>() >= 999.0 && (interval ? iv : half) <= bound) {
                    large_ok = true;
                }
            }
        }
    }
    note(o, large_ok, "a non-vacuous zero-bias bound on the large +-1 sum");
    o.detail = std::to_string(runs) + " runs, " + std::to_string(comparisons) +
               " bound comparisons, non-vacuous large-sigma case " + (large_ok ? "present" : "missing") +
               (o.pass ? "" : "; " + o.detail);
    return o;
}

Outcome c12_delta_proxy() {
    Outcome o;
    LocalStatModel w(window(100, 2));
    auto ws = build_dependency_structure(w);
    auto est = delta_proxy_estimate(w, ws, 4000, 4, 1212);
    const double ref = 3.0 * std::sqrt(7.0) / 10.0;
    note(o, est.value <= ref + 4 * est.stderr, "window proxy");

    LocalStatModel c(pattern(3, {0, 1}));
    auto cs = build_dependency_structure(c);
    auto exact = exact_delta(c, cs);
    auto ce = delta_proxy_estimate(c, cs, 20000, 4, 1213);
    note(o, std::abs(ce.value - exact.proxy) <= 4 * ce.stderr, "ascent proxy");
    o.detail = "window " + fmt(est.value) + " (se " + fmt(est.stderr) + ") <= " + fmt(ref) + "; ascents " +
               fmt(ce.value) + " (se " + fmt(ce.stderr) + ") vs exact " + fmt(exact.proxy) +
               (o.pass ? "" : "; " + o.detail);
    return o;
}

struct Criterion {
    int id;
    const char* name;
    double limit_seconds;  // 0: none pinned
    std::function<Outcome()> body;
};

}  // namespace

int main(int argc, char** argv) {
    if (argc > 1) g_configs = argv[1];
    const std::vector<Criterion> criteria = {
        {1, "zero-bias sanity", 5, c1_zero_bias_sanity},
        {2, "exact moments oracle", 1, c2_exact_moments},
        {3, "linearity, uniform", 10, c3_linearity_uniform},
        {4, "linearity, cycle type", 10, c4_linearity_cycle},
        {5, "moment identity", 0, c5_moment_identity},
        {6, "gap certificates", 300, c6_gap_certificates},
        {7, "characterizing equations", 600, c7_characterizing},
        {8, "oracle equivalence", 600, c8_oracle_equivalence},
        {9, "size-bias exact values", 0, c9_circular_ascents},
        {10, "bound formula regression", 1, c10_bound_regression},
        {11, "bound vs empirical", 900, c11_bound_vs_empirical},
        {12, "delta proxy vs bound", 0, c12_delta_proxy},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.body();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (c.limit_seconds > 0 && secs >= c.limit_seconds) {
            o.pass = false;
            o.detail += "; runtime over " + fmt(c.limit_seconds) + " s";
        }
        if (!o.pass) ++failures;
        std::printf("%s  %2d  %-26s %s  [%.2f s]\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), secs);
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", int(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
