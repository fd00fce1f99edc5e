#include "steinbias/size_bias.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

#include "steinbias/errors.hpp"
#include "steinbias/permutation.hpp"

namespace steinbias {

using Kind = LocalModelSpec::Kind;

std::string to_string(Kind kind) {
    switch (kind) {
        case Kind::window: return "window";
        case Kind::perm_pattern: return "perm-pattern";
        case Kind::torus_pattern: return "torus-pattern";
        case Kind::subgraph_count: return "subgraph-count";
        case Kind::hypercube_max: return "hypercube-max";
    }
    return "window";
}

Kind parse_local_kind(const std::string& s) {
    for (Kind k : {Kind::window, Kind::perm_pattern, Kind::torus_pattern, Kind::subgraph_count, Kind::hypercube_max}) {
        if (to_string(k) == s) return k;
    }
    throw ConfigError("unknown local model kind '" + s + "'");
}

namespace {

double factorial(std::size_t m) {
    double f = 1.0;
    for (std::size_t k = 2; k <= m; ++k) f *= static_cast<double>(k);
    return f;
}

std::size_t ipow(std::size_t base, std::size_t exp) {
    std::size_t r = 1;
    for (std::size_t k = 0; k < exp; ++k) r *= base;
    return r;
}

std::size_t circular(std::size_t a, std::size_t b, std::size_t n) {
    const std::size_t d = a > b ? a - b : b - a;
    return std::min(d, n - d);
}

/// Torus coordinates of a vertex id.
std::vector<std::size_t> coords(std::size_t v, std::size_t n, std::size_t p) {
    std::vector<std::size_t> c(p);
    for (std::size_t k = 0; k < p; ++k) {
        c[k] = v % n;
        v /= n;
    }
    return c;
}

std::size_t vertex_id(const std::vector<std::size_t>& c, std::size_t n) {
    std::size_t v = 0;
    for (std::size_t k = c.size(); k-- > 0;) v = v * n + c[k];
    return v;
}

/// Edges of the king's graph on the torus: {v, v+e} for canonical steps e in
/// {-1,0,1}^p whose first nonzero component is +1.
class KingEdges {
public:
    KingEdges(std::size_t n, std::size_t p) : n_(n), p_(p) {
        const std::size_t total = ipow(3, p);
        for (std::size_t code = 0; code < total; ++code) {
            std::vector<int> e(p);
            std::size_t c = code;
            for (std::size_t k = 0; k < p; ++k) {
                e[k] = static_cast<int>(c % 3) - 1;
                c /= 3;
            }
            auto first = std::find_if(e.begin(), e.end(), [](int x) { return x != 0; });
            if (first != e.end() && *first == 1) steps_.push_back(e);
        }
    }
    std::size_t count() const { return ipow(n_, p_) * steps_.size(); }
    std::uint32_t id(std::size_t u, std::size_t w) const {
        auto cu = coords(u, n_, p_), cw = coords(w, n_, p_);
        std::vector<int> e(p_);
        for (std::size_t k = 0; k < p_; ++k) {
            const std::size_t d = (cw[k] + n_ - cu[k]) % n_;
            e[k] = d == 0 ? 0 : d == 1 ? 1 : -1;
        }
        auto first = std::find_if(e.begin(), e.end(), [](int x) { return x != 0; });
        if (*first == -1) {
            for (auto& x : e) x = -x;
            std::swap(u, w);
        }
        const auto dir = static_cast<std::size_t>(std::find(steps_.begin(), steps_.end(), e) - steps_.begin());
        return static_cast<std::uint32_t>(u * steps_.size() + dir);
    }

private:
    std::size_t n_, p_;
    std::vector<std::vector<int>> steps_;
};

}  // namespace

LocalStatModel::LocalStatModel(LocalModelSpec spec) : spec_(std::move(spec)) {
    auto& s = spec_;
    switch (s.kind) {
        case Kind::window:
        case Kind::perm_pattern: {
            if (s.m < 1 || s.n < s.m) throw ValidationError(to_string(s.kind) + ": need n >= m >= 1");
            if (s.kind == Kind::window) {
                if (s.payoff != "rising" && s.payoff != "mean") throw ValidationError("window: payoff must be 'rising' or 'mean'");
                mean_per_index_ = s.payoff == "rising" ? 1.0 / factorial(s.m) : 0.5;
            } else {
                if (s.pattern.empty()) {
                    s.pattern.resize(s.m);
                    std::iota(s.pattern.begin(), s.pattern.end(), 0u);
                }
                std::vector<std::uint32_t> check = s.pattern;
                std::sort(check.begin(), check.end());
                for (std::size_t k = 0; k < check.size(); ++k) {
                    if (check.size() != s.m || check[k] != k) throw ValidationError("perm-pattern: pattern must be a permutation of 0..m-1");
                }
                if (s.n < 3 || s.m > 64) throw ValidationError("perm-pattern: need n >= 3 and m <= 64");
                mean_per_index_ = 1.0 / factorial(s.m);
            }
            cell_count_ = s.n;
            for (std::size_t a = 0; a < s.n; ++a) {
                std::vector<std::uint32_t> w(s.m);
                for (std::size_t k = 0; k < s.m; ++k) w[k] = static_cast<std::uint32_t>((a + k) % s.n);
                cells_.push_back(w);
                vertices_.push_back(w);
            }
            break;
        }
        case Kind::torus_pattern:
        case Kind::subgraph_count: {
            if (s.p < 1 || s.n < 3) throw ValidationError(to_string(s.kind) + ": need p >= 1 and n >= 3");
            const std::size_t sites = ipow(s.n, s.p);
            const std::size_t corners = std::size_t{1} << s.p;
            std::vector<std::vector<std::uint32_t>> cube(sites);
            for (std::size_t a = 0; a < sites; ++a) {
                const auto base = coords(a, s.n, s.p);
                for (std::size_t b = 0; b < corners; ++b) {
                    auto c = base;
                    for (std::size_t k = 0; k < s.p; ++k) c[k] = (c[k] + ((b >> k) & 1u)) % s.n;
                    cube[a].push_back(static_cast<std::uint32_t>(vertex_id(c, s.n)));
                }
            }
            vertices_ = cube;
            if (s.kind == Kind::torus_pattern) {
                if (s.color_probs.empty()) throw ValidationError("torus-pattern: color probabilities required");
                double total = 0.0;
                for (double q : s.color_probs) {
                    if (!(q >= 0.0)) throw ValidationError("torus-pattern: negative color probability");
                    total += q;
                    cdf_colors_.push_back(total);
                }
                if (std::abs(total - 1.0) > 1e-9) throw ValidationError("torus-pattern: color probabilities must sum to 1");
                if (s.target.size() != corners) throw ValidationError("torus-pattern: target needs 2^p colors");
                mean_per_index_ = 1.0;
                for (auto c : s.target) {
                    if (c >= s.color_probs.size()) throw ValidationError("torus-pattern: target color out of range");
                    mean_per_index_ *= s.color_probs[c];
                }
                cell_count_ = sites;
                cells_ = cube;
            } else {
                if (!(s.edge_probability >= 0.0 && s.edge_probability <= 1.0))
                    throw ValidationError("subgraph-count: edge probability must lie in [0,1]");
                KingEdges edges(s.n, s.p);
                cell_count_ = edges.count();
                for (std::size_t a = 0; a < sites; ++a) {
                    std::vector<std::uint32_t> e;
                    for (std::size_t b1 = 0; b1 < corners; ++b1) {
                        for (std::size_t b2 = b1 + 1; b2 < corners; ++b2) e.push_back(edges.id(cube[a][b1], cube[a][b2]));
                    }
                    cells_.push_back(std::move(e));
                }
                mean_per_index_ = std::pow(s.edge_probability, static_cast<double>(corners * (corners - 1) / 2));
            }
            break;
        }
        case Kind::hypercube_max: {
            if (s.p < 1 || s.p > 20) throw ValidationError("hypercube-max: need 1 <= p <= 20");
            const std::size_t sites = std::size_t{1} << s.p;
            for (std::size_t a = 0; a < sites; ++a) {
                std::vector<std::uint32_t> v{static_cast<std::uint32_t>(a)};
                for (std::size_t k = 0; k < s.p; ++k) v.push_back(static_cast<std::uint32_t>(a ^ (std::size_t{1} << k)));
                cells_.push_back(v);
                vertices_.push_back(v);
            }
            cell_count_ = sites;
            mean_per_index_ = 1.0 / static_cast<double>(s.p + 1);
            break;
        }
    }
    if (!(mean_per_index_ > 0.0)) throw DegenerateError(to_string(s.kind) + ": E X_alpha = 0");
}

std::string LocalStatModel::describe() const {
    std::ostringstream os;
    os << to_string(spec_.kind);
    switch (spec_.kind) {
        case Kind::window: os << "(n=" << spec_.n << ", m=" << spec_.m << ", payoff=" << spec_.payoff << ")"; break;
        case Kind::perm_pattern: os << "(n=" << spec_.n << ", m=" << spec_.m << ")"; break;
        case Kind::torus_pattern:
        case Kind::subgraph_count: os << "(n=" << spec_.n << ", p=" << spec_.p << ")"; break;
        case Kind::hypercube_max: os << "(p=" << spec_.p << ")"; break;
    }
    return os.str();
}

std::size_t LocalStatModel::distance(std::size_t a, std::size_t b) const {
    switch (spec_.kind) {
        case Kind::window:
        case Kind::perm_pattern: return circular(a, b, spec_.n);
        case Kind::torus_pattern:
        case Kind::subgraph_count: {
            std::size_t d = 0;
            for (std::size_t k = 0; k < spec_.p; ++k) {
                d = std::max(d, circular(a % spec_.n, b % spec_.n, spec_.n));
                a /= spec_.n;
                b /= spec_.n;
            }
            return d;
        }
        case Kind::hypercube_max: return static_cast<std::size_t>(std::popcount(a ^ b));
    }
    return 0;
}

void LocalStatModel::sample_state(Rng& rng, std::vector<double>& state) const {
    state.resize(cell_count_);
    switch (spec_.kind) {
        case Kind::window:
        case Kind::hypercube_max:
            for (auto& x : state) x = rng.uniform();
            break;
        case Kind::perm_pattern:
            for (std::size_t k = 0; k < state.size(); ++k) {
                const std::size_t j = rng.below(k + 1);
                state[k] = state[j];
                state[j] = static_cast<double>(k);
            }
            break;
        case Kind::torus_pattern:
            for (auto& x : state) {
                const double u = rng.uniform() * cdf_colors_.back();
                x = static_cast<double>(std::upper_bound(cdf_colors_.begin(), cdf_colors_.end(), u) - cdf_colors_.begin());
                x = std::min(x, static_cast<double>(cdf_colors_.size() - 1));
            }
            break;
        case Kind::subgraph_count:
            for (auto& x : state) x = rng.uniform() < spec_.edge_probability ? 1.0 : 0.0;
            break;
    }
}

double LocalStatModel::payoff(std::span<const double> v) const {
    switch (spec_.kind) {
        case Kind::window:
            if (spec_.payoff == "mean") return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
            for (std::size_t k = 1; k < v.size(); ++k) {
                if (!(v[k - 1] < v[k])) return 0.0;
            }
            return 1.0;
        case Kind::perm_pattern: {
            // positions visited in increasing pattern rank must carry increasing values
            std::array<std::size_t, 64> order{};
            for (std::size_t k = 0; k < v.size(); ++k) order[spec_.pattern[k]] = k;
            for (std::size_t r = 1; r < v.size(); ++r) {
                if (!(v[order[r - 1]] < v[order[r]])) return 0.0;
            }
            return 1.0;
        }
        case Kind::torus_pattern:
            for (std::size_t b = 0; b < v.size(); ++b) {
                if (v[b] != static_cast<double>(spec_.target[b])) return 0.0;
            }
            return 1.0;
        case Kind::subgraph_count:
            for (double x : v) {
                if (x != 1.0) return 0.0;
            }
            return 1.0;
        case Kind::hypercube_max:
            for (std::size_t k = 1; k < v.size(); ++k) {
                if (v[0] < v[k]) return 0.0;
            }
            return 1.0;
    }
    return 0.0;
}

double LocalStatModel::evaluate(std::size_t alpha, std::span<const double> state) const {
    const auto& c = cells_[alpha];
    std::array<double, 64> buf{};
    if (c.size() > buf.size()) {
        std::vector<double> v(c.size());
        for (std::size_t k = 0; k < c.size(); ++k) v[k] = state[c[k]];
        return payoff(v);
    }
    for (std::size_t k = 0; k < c.size(); ++k) buf[k] = state[c[k]];
    return payoff(std::span<const double>(buf.data(), c.size()));
}

double LocalStatModel::total(std::span<const double> state) const {
    double y = 0.0;
    for (std::size_t a = 0; a < cells_.size(); ++a) y += evaluate(a, state);
    return y;
}

void LocalStatModel::regenerate(std::size_t alpha, std::vector<double>& state, Rng& rng) const {
    const auto& c = cells_[alpha];
    const std::size_t m = c.size();
    std::vector<double> v(m);
    switch (spec_.kind) {
        case Kind::window:
            if (spec_.payoff == "rising") {
                for (auto& x : v) x = rng.uniform();
                std::sort(v.begin(), v.end());
            } else {
                constexpr int kCap = 1'000'000;
                int tries = 0;
                for (;; ++tries) {
                    if (tries == kCap) throw DegenerateError("window: rejection cap reached while size biasing");
                    for (auto& x : v) x = rng.uniform();
                    if (rng.uniform() * value_cap() < payoff(v)) break;
                }
            }
            break;
        case Kind::perm_pattern: {
            for (std::size_t k = 0; k < m; ++k) v[k] = state[c[k]];
            std::vector<double> sorted = v;
            std::sort(sorted.begin(), sorted.end());
            for (std::size_t k = 0; k < m; ++k) v[k] = sorted[spec_.pattern[k]];
            break;
        }
        case Kind::torus_pattern:
            for (std::size_t b = 0; b < m; ++b) v[b] = static_cast<double>(spec_.target[b]);
            break;
        case Kind::subgraph_count: std::fill(v.begin(), v.end(), 1.0); break;
        case Kind::hypercube_max: {
            for (auto& x : v) x = rng.uniform();
            std::swap(v[0], *std::max_element(v.begin(), v.end()));
            break;
        }
    }
    for (std::size_t k = 0; k < m; ++k) state[c[k]] = v[k];
}

bool LocalStatModel::enumerable(double cap) const {
    return spec_.kind == Kind::perm_pattern && factorial(spec_.n) <= cap;
}

void LocalStatModel::for_each_state(const std::function<void(std::span<const double>)>& visit) const {
    if (!enumerable(1e12)) throw SizeError(describe() + ": state space is not enumerable");
    std::vector<double> state(spec_.n);
    detail::enumerate_all(spec_.n, [&](std::span<const std::uint32_t> pi) {
        for (std::size_t k = 0; k < pi.size(); ++k) state[k] = static_cast<double>(pi[k]);
        visit(state);
    });
}

DependencyStructure build_dependency_structure(const LocalStatModel& model) {
    const std::size_t A = model.index_count();
    DependencyStructure s;
    s.index_count = A;

    // Minimal neighborhoods: shared underlying cells (independence) and
    // shared vertices (for rho).
    auto sharing = [&](auto member) {
        std::vector<std::vector<std::uint32_t>> holders;
        for (std::size_t a = 0; a < A; ++a) {
            for (auto c : member(a)) {
                if (c >= holders.size()) holders.resize(c + 1);
                holders[c].push_back(static_cast<std::uint32_t>(a));
            }
        }
        std::vector<std::vector<std::uint32_t>> out(A);
        for (std::size_t a = 0; a < A; ++a) {
            for (auto c : member(a)) out[a].insert(out[a].end(), holders[c].begin(), holders[c].end());
            std::sort(out[a].begin(), out[a].end());
            out[a].erase(std::unique(out[a].begin(), out[a].end()), out[a].end());
        }
        return out;
    };
    const auto by_vertex = sharing([&](std::size_t a) { return model.vertices(a); });
    const auto by_cell = sharing([&](std::size_t a) { return model.cells(a); });

    for (std::size_t a = 0; a < A; ++a) {
        for (auto b : by_vertex[a]) s.rho = std::max(s.rho, model.distance(a, b));
    }

    s.neighborhoods.resize(A);
    std::vector<std::vector<std::size_t>> counts(A, std::vector<std::size_t>(3 * s.rho + 1, 0));
    for (std::size_t a = 0; a < A; ++a) {
        for (std::size_t b = 0; b < A; ++b) {
            const std::size_t d = model.distance(a, b);
            if (d <= s.rho) s.neighborhoods[a].push_back(static_cast<std::uint32_t>(b));
            if (d <= 3 * s.rho) {
                s.pairs.emplace_back(static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b));
                ++counts[a][d];
            }
        }
        s.b = std::max(s.b, s.neighborhoods[a].size());
    }
    s.V_table.assign(3 * s.rho + 1, 0);
    s.distance_regular = true;
    for (std::size_t a = 0; a < A; ++a) {
        std::size_t cum = 0;
        for (std::size_t r = 0; r <= 3 * s.rho; ++r) {
            cum += counts[a][r];
            if (a == 0) s.V_table[r] = cum;
            else if (s.V_table[r] != cum) s.distance_regular = false;
        }
    }

    for (const auto& nb : by_cell) s.minimal_b = std::max(s.minimal_b, nb.size());
    std::vector<char> mark(A);
    for (std::size_t a = 0; a < A; ++a) {
        // alpha2 is a required pair iff it is within three cell-sharing hops
        std::vector<std::uint32_t> frontier = {static_cast<std::uint32_t>(a)};
        std::fill(mark.begin(), mark.end(), 0);
        mark[a] = 1;
        std::size_t reached = 1;
        for (int hop = 0; hop < 3; ++hop) {
            std::vector<std::uint32_t> next;
            for (auto x : frontier) {
                for (auto y : by_cell[x]) {
                    if (!mark[y]) {
                        mark[y] = 1;
                        ++reached;
                        next.push_back(y);
                    }
                }
            }
            frontier = std::move(next);
        }
        s.minimal_pair_count += reached;
    }

    s.p.assign(A, 1.0 / static_cast<double>(A));
    s.p_cumulative.resize(A);
    std::partial_sum(s.p.begin(), s.p.end(), s.p_cumulative.begin());
    return s;
}

IndexWeightEstimate estimate_index_weights(const LocalStatModel& model, std::uint64_t reps, std::uint64_t seed) {
    if (reps < 2) throw ValidationError("index weights: reps must be at least 2");
    const std::size_t A = model.index_count();
    std::vector<double> sum(A, 0.0), sum_sq(A, 0.0);
    Rng rng(seed);
    std::vector<double> state;
    for (std::uint64_t r = 0; r < reps; ++r) {
        model.sample_state(rng, state);
        for (std::size_t a = 0; a < A; ++a) {
            const double x = model.evaluate(a, state);
            sum[a] += x;
            sum_sq[a] += x * x;
        }
    }
    const double R = static_cast<double>(reps);
    const double total = std::accumulate(sum.begin(), sum.end(), 0.0) / R;
    if (!(total > 0.0)) throw DegenerateError("index weights: every X_alpha was zero");
    IndexWeightEstimate est;
    for (std::size_t a = 0; a < A; ++a) {
        const double mean = sum[a] / R;
        const double var = std::max(0.0, (sum_sq[a] / R - mean * mean) * R / (R - 1.0));
        est.p.push_back(mean / total);
        est.stderr_p.push_back(std::sqrt(var / R) / total);
    }
    return est;
}

std::vector<double> directional_draw(const LocalStatModel& model, std::size_t alpha, std::span<const double> state,
                                     Rng& rng) {
    std::vector<double> out(state.begin(), state.end());
    model.regenerate(alpha, out, rng);
    return out;
}

namespace {

std::size_t pick_index(const DependencyStructure& s, Rng& rng) {
    const double u = rng.uniform() * s.p_cumulative.back();
    const auto it = std::upper_bound(s.p_cumulative.begin(), s.p_cumulative.end(), u);
    return std::min<std::size_t>(static_cast<std::size_t>(it - s.p_cumulative.begin()), s.index_count - 1);
}

/// sum_{beta in B_alpha} (X_beta after regeneration - X_beta), state restored.
double local_change(const LocalStatModel& model, const DependencyStructure& s, std::size_t alpha,
                    std::vector<double>& state, Rng& rng) {
    const auto cells = model.cells(alpha);
    double saved[64];
    std::vector<double> big;
    double* keep = saved;
    if (cells.size() > 64) {
        big.resize(cells.size());
        keep = big.data();
    }
    double before = 0.0;
    for (auto b : s.neighborhoods[alpha]) before += model.evaluate(b, state);
    for (std::size_t k = 0; k < cells.size(); ++k) keep[k] = state[cells[k]];
    model.regenerate(alpha, state, rng);
    double after = 0.0;
    for (auto b : s.neighborhoods[alpha]) after += model.evaluate(b, state);
    for (std::size_t k = 0; k < cells.size(); ++k) state[cells[k]] = keep[k];
    return after - before;
}

}  // namespace

SizeBiasDraw size_bias_sum_draw(const LocalStatModel& model, const DependencyStructure& s, Rng& rng, bool audit) {
    if (s.index_count != model.index_count()) throw DimensionError("size-bias draw: structure does not match model");
    std::vector<double> state;
    model.sample_state(rng, state);
    const std::size_t A = model.index_count();
    std::vector<double> xs(A);
    SizeBiasDraw d;
    for (std::size_t a = 0; a < A; ++a) {
        xs[a] = model.evaluate(a, state);
        d.y += xs[a];
    }
    const std::size_t I = pick_index(s, rng);
    d.chosen = static_cast<std::uint32_t>(I);
    model.regenerate(I, state, rng);
    double change = 0.0;
    for (auto b : s.neighborhoods[I]) change += model.evaluate(b, state) - xs[b];
    d.y_s = d.y + change;
    d.gap = std::abs(change);
    for (auto c : model.cells(I)) d.regenerated.push_back(state[c]);
    if (audit) {
        for (std::size_t b = 0; b < A; ++b) {
            if (model.distance(I, b) <= s.rho) continue;
            if (model.evaluate(b, state) != xs[b]) {
                d.independence_ok = false;
                break;
            }
        }
    }
    return d;
}

DeltaEstimate delta_proxy_estimate(const LocalStatModel& model, const DependencyStructure& s, std::uint64_t outer,
                                   std::uint64_t inner, std::uint64_t seed) {
    if (outer < 4 || inner < 2) throw ValidationError("delta proxy: need outer >= 4 and inner >= 2");
    const std::size_t A = model.index_count();
    std::vector<double> means(outer), within(outer);
    std::vector<double> state;
    for (std::uint64_t o = 0; o < outer; ++o) {
        Rng rng(derive_seed(seed, o));
        model.sample_state(rng, state);
        double sum = 0.0, sum_sq = 0.0;
        for (std::uint64_t r = 0; r < inner; ++r) {
            double g = 0.0;
            for (std::size_t a = 0; a < A; ++a) g += s.p[a] * local_change(model, s, a, state, rng);
            sum += g;
            sum_sq += g * g;
        }
        const double R = static_cast<double>(inner);
        means[o] = sum / R;
        within[o] = std::max(0.0, (sum_sq - sum * sum / R) / (R - 1.0));
    }
    auto variance_component = [&](std::size_t lo, std::size_t hi) {
        const double k = static_cast<double>(hi - lo);
        double m = 0.0, w = 0.0;
        for (std::size_t o = lo; o < hi; ++o) {
            m += means[o];
            w += within[o];
        }
        m /= k;
        double v = 0.0;
        for (std::size_t o = lo; o < hi; ++o) v += (means[o] - m) * (means[o] - m);
        return v / (k - 1.0) - (w / k) / static_cast<double>(inner);
    };
    DeltaEstimate est;
    est.outer = outer;
    est.inner = inner;
    const double V = variance_component(0, outer);
    est.value = std::sqrt(std::max(0.0, V));
    const std::size_t batches = std::min<std::uint64_t>(20, outer / 2);
    const std::size_t per = outer / batches;
    std::vector<double> vb;
    for (std::size_t b = 0; b < batches; ++b) vb.push_back(variance_component(b * per, (b + 1) * per));
    const double mb = std::accumulate(vb.begin(), vb.end(), 0.0) / static_cast<double>(batches);
    double sv = 0.0;
    for (double v : vb) sv += (v - mb) * (v - mb);
    // batches of size per estimate V with variance ~ batches times that of
    // the full-sample estimate
    const double se_V = std::sqrt(sv / static_cast<double>(batches - 1)) / std::sqrt(static_cast<double>(batches));
    est.stderr = est.value > 0.0 ? se_V / (2.0 * est.value) : std::sqrt(se_V);
    return est;
}

ExactDelta exact_delta(const LocalStatModel& model, const DependencyStructure& s) {
    if (model.kind() != Kind::perm_pattern || !model.enumerable())
        throw SizeError("exact delta: needs an enumerable permutation-pattern model");
    Rng unused(0);  // regeneration is deterministic for patterns
    std::vector<double> gs, ys;
    model.for_each_state([&](std::span<const double> st) {
        std::vector<double> state(st.begin(), st.end());
        double g = 0.0;
        for (std::size_t a = 0; a < model.index_count(); ++a) g += s.p[a] * local_change(model, s, a, state, unused);
        gs.push_back(g);
        ys.push_back(model.total(state));
    });
    const double N = static_cast<double>(gs.size());
    const double mg = std::accumulate(gs.begin(), gs.end(), 0.0) / N;
    double vg = 0.0;
    for (double g : gs) vg += (g - mg) * (g - mg);
    std::map<double, std::pair<double, double>> by_y;  // y -> (count, sum g)
    for (std::size_t k = 0; k < gs.size(); ++k) {
        by_y[ys[k]].first += 1.0;
        by_y[ys[k]].second += gs[k];
    }
    double vc = 0.0;
    for (auto& [y, cs] : by_y) {
        const double cm = cs.second / cs.first;
        vc += cs.first * (cm - mg) * (cm - mg);
    }
    return {std::sqrt(vg / N), std::sqrt(vc / N)};
}

DiscreteLaw exact_sum_law(const LocalStatModel& model) {
    std::map<double, double> counts;
    double total = 0.0;
    model.for_each_state([&](std::span<const double> st) {
        counts[model.total(st)] += 1.0;
        total += 1.0;
    });
    std::vector<double> values, probs;
    for (auto [y, c] : counts) {
        values.push_back(y);
        probs.push_back(c / total);
    }
    return DiscreteLaw(std::move(values), std::move(probs));
}

}  // namespace steinbias
