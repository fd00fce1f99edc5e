#include "steinbias/zero_bias.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <map>

#include "steinbias/errors.hpp"
#include "steinbias/kernels.hpp"
#include "steinbias/moments.hpp"

namespace steinbias {

namespace {

double lambda_for(PermutationModel::Kind kind, std::size_t n) {
    return kind == PermutationModel::Kind::uniform ? 2.0 / static_cast<double>(n - 1) : 4.0 / static_cast<double>(n);
}

std::pair<std::uint32_t, std::uint32_t> uniform_pair(Rng& rng, std::size_t n) {
    const auto i = static_cast<std::uint32_t>(rng.below(n));
    auto j = static_cast<std::uint32_t>(rng.below(n - 1));
    if (j >= i) ++j;
    return {i, j};
}

void require_cycle_flags(const ScoreArray& a) {
    if (!a.symmetric() || !a.zero_diagonal())
        throw ValidationError("cycle-type pair: score array must be symmetric with zero diagonal");
}

void fill_parts(const ScoreArray& a, std::span<const std::uint32_t> pi, std::span<const std::uint32_t> pi_dagger,
                std::span<const std::uint32_t> pi_ddagger, double u, ZeroBiasDraw& d) {
    d.y = kernels::gather_sum(a.entries(), a.n(), pi);
    d.t_prime = d.t_dagger = d.t_ddagger = 0.0;
    for (std::uint32_t x : d.touched.view()) {
        d.t_prime += a(x, pi[x]);
        d.t_dagger += a(x, pi_dagger[x]);
        d.t_ddagger += a(x, pi_ddagger[x]);
    }
    d.s = d.y - d.t_prime;
    d.y_dagger = d.s + d.t_dagger;
    d.y_ddagger = d.s + d.t_ddagger;
    d.u = u;
    d.y_star = assemble_y_star(d.y_dagger, d.y_ddagger, u);
    d.gap = std::abs(d.y_star - d.y);
}

}  // namespace

ExchangeablePairSpec ExchangeablePairSpec::unchecked(PermutationModel model, ScoreArray score) {
    if (score.n() != model.n()) throw DimensionError("exchangeable pair: array and model sizes differ");
    const double lambda = lambda_for(model.kind(), model.n());
    return ExchangeablePairSpec{std::move(model), std::move(score), lambda};
}

ExchangeablePairSpec ExchangeablePairSpec::make(PermutationModel model, ScoreArray score) {
    if (model.kind() == PermutationModel::Kind::uniform) {
        if (!score.row_centered()) throw ValidationError("uniform pair: score array must be row-centered");
    } else {
        require_cycle_flags(score);
    }
    return unchecked(std::move(model), std::move(score));
}

Permutation pair_partner(PermutationModel::Kind kind, const Permutation& pi, std::uint32_t i, std::uint32_t j) {
    return kind == PermutationModel::Kind::uniform ? apply_transposition(pi, i, j) : conjugate_by_transposition(pi, i, j);
}

ExchangeablePair exchangeable_pair_uniform(const ScoreArray& a, const Permutation& pi, Rng& rng) {
    if (pi.size() != a.n()) throw DimensionError("exchangeable pair: size mismatch");
    if (a.n() < 3) throw DimensionError("exchangeable pair: n must be at least 3");
    auto [i, j] = uniform_pair(rng, a.n());
    ExchangeablePair p{pi, apply_transposition(pi, i, j), i, j, 0.0, 0.0};
    p.y1 = combinatorial_sum(a, p.pi.images());
    p.y2 = combinatorial_sum(a, p.pi2.images());
    return p;
}

ExchangeablePair exchangeable_pair_cycle_type(const ScoreArray& a, const Permutation& pi, Rng& rng) {
    require_cycle_flags(a);
    if (pi.size() != a.n()) throw DimensionError("exchangeable pair: size mismatch");
    if (a.n() < 4) throw DimensionError("exchangeable pair: n must be at least 4");
    auto [i, j] = uniform_pair(rng, a.n());
    ExchangeablePair p{pi, conjugate_by_transposition(pi, i, j), i, j, 0.0, 0.0};
    p.y1 = combinatorial_sum(a, p.pi.images());
    p.y2 = combinatorial_sum(a, p.pi2.images());
    return p;
}

double partner_average(PermutationModel::Kind kind, const ScoreArray& a, const Permutation& pi) {
    const std::size_t n = a.n();
    double total = 0.0;
    for (std::uint32_t i = 0; i < n; ++i) {
        for (std::uint32_t j = 0; j < n; ++j) {
            if (i == j) continue;
            total += combinatorial_sum(a, pair_partner(kind, pi, i, j).images());
        }
    }
    return total / static_cast<double>(n * (n - 1));
}

std::vector<PairAtom> enumerate_pair_law(const ExchangeablePairSpec& spec, double state_cap) {
    const std::size_t n = spec.model.n();
    const double pairs = static_cast<double>(n * (n - 1));
    if (spec.model.support_size() * pairs > state_cap)
        throw SizeError("pair law: " + std::to_string(spec.model.support_size() * pairs) + " states exceed the cap");
    const double weight = 1.0 / (spec.model.support_size() * pairs);
    const double grid = 1e-9 * std::max(spec.score.c_sup() * static_cast<double>(n), 1e-300);
    std::map<std::pair<long long, long long>, PairAtom> merged;
    spec.model.for_each_in_support([&](std::span<const std::uint32_t> images) {
        const Permutation pi(std::vector<std::uint32_t>(images.begin(), images.end()));
        const double y1 = combinatorial_sum(spec.score, pi.images());
        for (std::uint32_t i = 0; i < n; ++i) {
            for (std::uint32_t j = 0; j < n; ++j) {
                if (i == j) continue;
                const double y2 = combinatorial_sum(spec.score, pair_partner(spec.model.kind(), pi, i, j).images());
                auto key = std::make_pair(std::llround(y1 / grid), std::llround(y2 / grid));
                auto [it, fresh] = merged.try_emplace(key, PairAtom{y1, y2, 0.0});
                it->second.prob += weight;
            }
        }
    });
    std::vector<PairAtom> atoms;
    atoms.reserve(merged.size());
    for (auto& [key, atom] : merged) atoms.push_back(atom);
    return atoms;
}

double pair_law_square_moment(std::span<const PairAtom> pair_law) {
    double m = 0.0;
    for (const auto& at : pair_law) m += at.prob * (at.y1 - at.y2) * (at.y1 - at.y2);
    return m;
}

std::vector<PairAtom> square_bias_oracle(std::span<const PairAtom> pair_law) {
    const double m = pair_law_square_moment(pair_law);
    if (!(m > 0.0)) throw DegenerateError("square bias: E(Y'-Y'')^2 = 0");
    std::vector<PairAtom> out;
    for (const auto& at : pair_law) {
        const double w = at.prob * (at.y1 - at.y2) * (at.y1 - at.y2) / m;
        if (w > 0.0) out.push_back({at.y1, at.y2, w});
    }
    return out;
}

double assemble_y_star(double y_dagger, double y_ddagger, double u) {
    if (!(u >= 0.0 && u <= 1.0)) throw ValidationError("assemble_y_star: u must lie in [0,1]");
    return u * y_dagger + (1.0 - u) * y_ddagger;
}

void TouchedSet::insert(std::uint32_t x) {
    for (std::uint8_t k = 0; k < size; ++k) {
        if (idx[k] == x) return;
    }
    if (size == idx.size()) throw SizeError("touched set overflow");
    idx[size++] = x;
}

// ---------------------------------------------------------------------------
// Uniform model

namespace {

TupleForm uniform_tuple_form() {
    // slots (i, k, j, l): (a_ik + a_jl) - (a_il + a_jk), i != j, k != l
    TupleForm f;
    f.slots = 4;
    f.terms = {{0, 1, 1.0}, {2, 3, 1.0}, {0, 3, -1.0}, {2, 1, -1.0}};
    f.distinct = {{0, 2}, {1, 3}};
    return f;
}

}  // namespace

UniformZeroBiasSampler::UniformZeroBiasSampler(const ScoreArray& a, SquareWeightedTuples::Options options)
    : a_(&a),
      model_(PermutationModel::uniform(a.n())),
      lambda_(lambda_for(PermutationModel::Kind::uniform, a.n())),
      tuples_(a, uniform_tuple_form(), options) {
    if (!a.row_centered()) throw ValidationError("uniform zero bias: score array must be row-centered");
    if (!(tuples_.mean_square() > 0.0)) throw DegenerateError("uniform zero bias: every tuple weight is zero");
}

ZeroBiasDraw UniformZeroBiasSampler::draw(Rng& rng, DrawDetail* detail) const {
    const std::size_t n = a_->n();
    std::vector<std::uint32_t> pi(n);
    model_.sample_into(rng, pi);
    const LabelTuple t = tuples_.sample(rng);
    const std::uint32_t i = t[0], k = t[1], j = t[2], l = t[3];

    std::uint32_t pos_k = 0, pos_l = 0;
    for (std::uint32_t x = 0; x < n; ++x) {
        if (pi[x] == k) pos_k = x;
        if (pi[x] == l) pos_l = x;
    }
    ZeroBiasDraw d;
    d.touched.insert(i);
    d.touched.insert(pos_k);
    d.touched.insert(j);
    d.touched.insert(pos_l);

    // pi1 = pi o tau(i, pi^-1 k), so pi1(i) = k
    std::vector<std::uint32_t> dagger = pi;
    std::swap(dagger[i], dagger[pos_k]);
    // pi1^-1(l): l != k, so only the swapped slot pos_k can have changed preimage
    const std::uint32_t pos_l1 = dagger[pos_k] == l ? pos_k : pos_l;
    // pi-dagger = pi1 o tau(j, pi1^-1 l), so pi-dagger(j) = l and pi-dagger(i) = k
    std::swap(dagger[j], dagger[pos_l1]);
    std::vector<std::uint32_t> ddagger = dagger;
    std::swap(ddagger[i], ddagger[j]);

    fill_parts(*a_, pi, dagger, ddagger, rng.uniform(), d);
    if (detail != nullptr) {
        detail->pi = Permutation(pi);
        detail->pi_dagger = Permutation(dagger);
        detail->pi_ddagger = Permutation(ddagger);
        detail->i_dagger = i;
        detail->j_dagger = j;
    }
    return d;
}

// ---------------------------------------------------------------------------
// Cross-check path

RejectionPairSampler::RejectionPairSampler(const ExchangeablePairSpec& spec) : spec_(&spec) {
    // |Y' - Y''| is a signed sum of 4 (uniform) or 8 (cycle type) entries.
    const double terms = spec.model.kind() == PermutationModel::Kind::uniform ? 4.0 : 8.0;
    envelope_ = std::pow(terms * spec.score.c_sup(), 2);
    if (!(envelope_ > 0.0)) throw DegenerateError("rejection pair sampler: zero score array");
}

std::pair<double, double> RejectionPairSampler::draw(Rng& rng) const {
    const std::size_t n = spec_->model.n();
    constexpr std::uint64_t kMaxTries = 100'000'000;
    std::vector<std::uint32_t> images(n);
    for (std::uint64_t tries = 0; tries < kMaxTries; ++tries) {
        spec_->model.sample_into(rng, images);
        const Permutation pi(images);
        auto [i, j] = uniform_pair(rng, n);
        const double y1 = combinatorial_sum(spec_->score, pi.images());
        const double y2 = combinatorial_sum(spec_->score, pair_partner(spec_->model.kind(), pi, i, j).images());
        if (rng.uniform() * envelope_ < (y1 - y2) * (y1 - y2)) return {y1, y2};
    }
    throw DegenerateError("rejection pair sampler: iteration cap reached");
}

// ---------------------------------------------------------------------------
// Binary spool

namespace {

void put_le(std::ofstream& out, double v) {
    auto bits = std::bit_cast<std::uint64_t>(v);
    unsigned char bytes[8];
    for (int b = 0; b < 8; ++b) bytes[b] = static_cast<unsigned char>(bits >> (8 * b));
    out.write(reinterpret_cast<const char*>(bytes), 8);
}

}  // namespace

DrawSpool::DrawSpool(const std::filesystem::path& path) : out_(path, std::ios::binary | std::ios::trunc) {
    if (!out_) throw ConfigError("cannot open draw spool " + path.string());
}

void DrawSpool::write(const ZeroBiasDraw& d) {
    for (double v : {d.y, d.y_dagger, d.y_ddagger, d.y_star, d.u, d.s, d.t_prime, d.t_dagger, d.t_ddagger,
                     static_cast<double>(d.touched.size), d.gap})
        put_le(out_, v);
}

std::vector<std::array<double, DrawSpool::kFields>> DrawSpool::read(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open draw spool " + path.string());
    std::vector<std::array<double, kFields>> records;
    unsigned char bytes[8 * kFields];
    while (in.read(reinterpret_cast<char*>(bytes), sizeof bytes)) {
        std::array<double, kFields> rec{};
        for (std::size_t f = 0; f < kFields; ++f) {
            std::uint64_t bits = 0;
            for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(bytes[8 * f + b]) << (8 * b);
            rec[f] = std::bit_cast<double>(bits);
        }
        records.push_back(rec);
    }
    return records;
}

}  // namespace steinbias
