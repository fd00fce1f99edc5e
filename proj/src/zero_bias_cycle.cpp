#include <algorithm>
#include <cmath>
#include <map>

#include "steinbias/errors.hpp"
#include "steinbias/zero_bias.hpp"

namespace steinbias {

namespace {

// Positions of the six tuple entries.
enum Pos : std::uint8_t { P = 0, I = 1, K = 2, Q = 3, J = 4, L = 5 };

using Slots = std::array<std::uint8_t, 6>;

/// Restricted growth string of six labels.
Slots growth_string(const std::array<std::uint32_t, 6>& labels, std::size_t& distinct) {
    Slots s{};
    std::array<std::uint32_t, 6> seen{};
    distinct = 0;
    for (std::size_t pos = 0; pos < 6; ++pos) {
        std::size_t k = 0;
        while (k < distinct && seen[k] != labels[pos]) ++k;
        if (k == distinct) seen[distinct++] = labels[pos];
        s[pos] = static_cast<std::uint8_t>(k);
    }
    return s;
}

std::array<std::uint32_t, 6> position_labels(std::span<const std::uint32_t> pi, std::span<const std::uint32_t> inv,
                                             std::uint32_t i, std::uint32_t j) {
    return {inv[i], i, pi[i], inv[j], j, pi[j]};
}

std::string slots_to_string(const Slots& s) {
    std::string out;
    for (auto v : s) out.push_back(static_cast<char>('0' + v));
    return out;
}

/// Y' - Y'' as a linear form in the label slots.
TupleForm difference_form(const Slots& s, std::size_t distinct) {
    std::array<int, 6> image;
    image.fill(-1);
    image[s[P]] = s[I];
    image[s[I]] = s[K];
    image[s[Q]] = s[J];
    image[s[J]] = s[L];
    auto tau = [&](int x) { return x == s[I] ? s[J] : x == s[J] ? s[I] : x; };

    TupleForm f;
    f.slots = distinct;
    std::array<bool, 6> done{};
    for (std::uint8_t x : {s[P], s[I], s[Q], s[J]}) {
        if (done[x]) continue;
        done[x] = true;
        const int partner = tau(image[tau(x)]);
        f.terms.push_back({x, static_cast<std::uint8_t>(image[x]), 1.0});
        f.terms.push_back({x, static_cast<std::uint8_t>(partner), -1.0});
    }
    for (std::uint8_t a = 0; a < distinct; ++a) {
        for (std::uint8_t b = a + 1; b < distinct; ++b) f.distinct.emplace_back(a, b);
    }
    f.simplify(true);
    return f;
}

std::string case_name(const Slots& s, std::size_t distinct) {
    if (s[P] == s[I] || s[Q] == s[J]) return "A";
    std::array<std::uint8_t, 4> core = {s[I], s[J], s[K], s[L]};
    std::sort(core.begin(), core.end());
    const auto size = static_cast<std::size_t>(std::unique(core.begin(), core.end()) - core.begin());
    if (size == 2) return "S2";
    if (s[K] == s[J]) return s[L] == s[P] ? "B_IJ(|I|=3)" : "B_IJ(|I|>=4)";
    if (s[L] == s[I]) return s[K] == s[Q] ? "B_JI(|J|=3)" : "B_JI(|J|>=4)";
    const bool i2 = s[P] == s[K];
    const bool j2 = s[Q] == s[L];
    std::string name = std::string("F(") + (i2 ? "2" : ">=3") + "," + (j2 ? "2" : ">=3") + ")";
    const std::size_t generic = 4 + (i2 ? 0 : 1) + (j2 ? 0 : 1);
    if (distinct < generic) name += " adjacent";
    return name;
}

}  // namespace

std::string coincidence_pattern(const Permutation& pi, std::uint32_t i, std::uint32_t j) {
    const auto inv = pi.inverse();
    std::size_t distinct = 0;
    return slots_to_string(growth_string(position_labels(pi.images(), inv.images(), i, j), distinct));
}

CycleTypeZeroBiasSampler::CycleTypeZeroBiasSampler(const ScoreArray& a, const PermutationModel& model,
                                                   SquareWeightedTuples::Options options)
    : a_(&a), model_(model), lambda_(4.0 / static_cast<double>(model.n())) {
    if (model.kind() != PermutationModel::Kind::fixed_cycle_type)
        throw ValidationError("cycle-type zero bias: model must be a fixed cycle type");
    if (a.n() != model.n()) throw DimensionError("cycle-type zero bias: array and model sizes differ");
    if (!a.symmetric() || !a.zero_diagonal())
        throw ValidationError("cycle-type zero bias: score array must be symmetric with zero diagonal");
    const std::size_t n = a.n();

    // Representative: cycles of consecutive labels.
    representative_.resize(n);
    std::uint32_t start = 0;
    for (std::size_t len : model.cycle_type().lengths()) {
        for (std::uint32_t k = 0; k < len; ++k) representative_[start + k] = start + (k + 1) % len;
        start += static_cast<std::uint32_t>(len);
    }
    std::vector<std::uint32_t> inv(n);
    for (std::uint32_t x = 0; x < n; ++x) inv[representative_[x]] = x;

    // Conjugation invariance: the pattern frequencies over (I, J) are the same
    // for every member of the class, so one representative gives them exactly.
    std::map<Slots, std::size_t> index;
    for (std::uint32_t i = 0; i < n; ++i) {
        for (std::uint32_t j = 0; j < n; ++j) {
            if (i == j) continue;
            std::size_t distinct = 0;
            const Slots s = growth_string(position_labels(representative_, inv, i, j), distinct);
            auto [it, fresh] = index.try_emplace(s, patterns_.size());
            if (fresh) {
                Pattern p;
                p.slot = s;
                p.distinct = distinct;
                patterns_.push_back(std::move(p));
            }
            patterns_[it->second].pairs.emplace_back(i, j);
        }
    }

    const double pair_count = static_cast<double>(n * (n - 1));
    std::vector<double> weights;
    for (auto& p : patterns_) {
        PatternMass m;
        m.pattern = slots_to_string(p.slot);
        m.case_name = case_name(p.slot, p.distinct);
        m.distinct = p.distinct;
        m.pair_fraction = static_cast<double>(p.pairs.size()) / pair_count;
        TupleForm form = difference_form(p.slot, p.distinct);
        if (!form.terms.empty()) {
            options.mc_seed = derive_seed(options.mc_seed, weights.size());
            p.tuples.emplace(a, std::move(form), options);
            m.mean_square = p.tuples->mean_square();
            m.mean_square_stderr = p.tuples->mean_square_stderr();
        }
        square_moment_ += m.pair_fraction * m.mean_square;
        weights.push_back(m.pair_fraction * m.mean_square);
        masses_.push_back(std::move(m));
    }
    if (!(square_moment_ > 0.0)) throw DegenerateError("cycle-type zero bias: E(Y'-Y'')^2 = 0");
    for (auto& m : masses_) m.mass = m.pair_fraction * m.mean_square / square_moment_;
    pick_pattern_ = AliasTable(weights);
}

std::vector<std::pair<std::string, double>> CycleTypeZeroBiasSampler::case_masses() const {
    std::map<std::string, double> sums;
    for (const auto& m : masses_) sums[m.case_name] += m.mass;
    return {sums.begin(), sums.end()};
}

ZeroBiasDraw CycleTypeZeroBiasSampler::draw(Rng& rng, DrawDetail* detail) const {
    const std::size_t n = a_->n();
    const std::size_t which = pick_pattern_.sample(rng);
    const Pattern& pat = patterns_[which];

    // (pi, I, J) uniform among triples with this pattern: relabel the
    // representative by a uniform sigma and pick one of its pattern pairs.
    std::vector<std::uint32_t> sigma(n);
    for (std::uint32_t x = 0; x < n; ++x) sigma[x] = x;
    std::shuffle(sigma.begin(), sigma.end(), rng);
    std::vector<std::uint32_t> pi(n), inv(n);
    for (std::uint32_t x = 0; x < n; ++x) pi[sigma[x]] = sigma[representative_[x]];
    for (std::uint32_t x = 0; x < n; ++x) inv[pi[x]] = x;
    const auto [i0, j0] = pat.pairs[rng.below(pat.pairs.size())];
    const std::uint32_t i = sigma[i0], j = sigma[j0];

    const auto labels = position_labels(pi, inv, i, j);
    const std::size_t kappa = pat.distinct;
    LabelTuple from{};
    for (std::size_t pos = 0; pos < 6; ++pos) from[pat.slot[pos]] = labels[pos];
    const LabelTuple to = pat.tuples->sample(rng);

    // sigma' sends from[s] to to[s]; elements of `to` outside `from` are sent
    // back along their chain to an element of `from` outside `to`. When the
    // two tuples are disjoint this is the product of transpositions
    // tau_{from[s], to[s]}.
    auto find = [kappa](const LabelTuple& t, std::uint32_t x) -> int {
        for (std::size_t s = 0; s < kappa; ++s) {
            if (t[s] == x) return static_cast<int>(s);
        }
        return -1;
    };
    std::array<std::uint32_t, 12> dom{}, img{};
    std::size_t dsize = 0;
    for (std::size_t s = 0; s < kappa; ++s) {
        dom[dsize] = from[s];
        img[dsize++] = to[s];
    }
    for (std::size_t s = 0; s < kappa; ++s) {
        if (find(from, to[s]) >= 0) continue;
        std::uint32_t z = from[s];
        for (int at = find(to, z); at >= 0; at = find(to, z)) z = from[static_cast<std::size_t>(at)];
        dom[dsize] = to[s];
        img[dsize++] = z;
    }
    auto relabel = [&](std::uint32_t x) {
        for (std::size_t k = 0; k < dsize; ++k) {
            if (dom[k] == x) return img[k];
        }
        return x;
    };

    ZeroBiasDraw d;
    for (std::size_t k = 0; k < dsize; ++k) d.touched.insert(dom[k]);
    for (std::size_t k = 0; k < dsize; ++k) d.touched.insert(inv[dom[k]]);

    // pi-dagger = sigma' pi sigma'^-1 differs from pi only on the touched set.
    std::vector<std::uint32_t> dagger = pi;
    for (std::uint32_t x : d.touched.view()) dagger[relabel(x)] = relabel(pi[x]);
    const std::uint32_t id = relabel(i), jd = relabel(j);
    std::vector<std::uint32_t> ddagger = dagger;
    auto swap_ij = [id, jd](std::uint32_t x) { return x == id ? jd : x == jd ? id : x; };
    for (std::uint32_t x : {id, jd, relabel(labels[P]), relabel(labels[Q])}) ddagger[swap_ij(x)] = swap_ij(dagger[x]);

    d.y = 0.0;
    const double u = rng.uniform();
    d.t_prime = d.t_dagger = d.t_ddagger = 0.0;
    for (std::uint32_t x : d.touched.view()) {
        d.t_prime += (*a_)(x, pi[x]);
        d.t_dagger += (*a_)(x, dagger[x]);
        d.t_ddagger += (*a_)(x, ddagger[x]);
    }
    for (std::uint32_t x = 0; x < n; ++x) d.y += (*a_)(x, pi[x]);
    d.s = d.y - d.t_prime;
    d.y_dagger = d.s + d.t_dagger;
    d.y_ddagger = d.s + d.t_ddagger;
    d.u = u;
    d.y_star = assemble_y_star(d.y_dagger, d.y_ddagger, u);
    d.gap = std::abs(d.y_star - d.y);

    if (detail != nullptr) {
        detail->pi = Permutation(pi);
        detail->pi_dagger = Permutation(dagger);
        detail->pi_ddagger = Permutation(ddagger);
        detail->i_dagger = id;
        detail->j_dagger = jd;
        detail->pattern = static_cast<int>(which);
    }
    return d;
}

}  // namespace steinbias
