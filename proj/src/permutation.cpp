#include "steinbias/permutation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "steinbias/errors.hpp"

namespace steinbias {

Permutation::Permutation(std::vector<std::uint32_t> images) : images_(std::move(images)) {
    std::vector<bool> seen(images_.size(), false);
    for (std::uint32_t v : images_) {
        if (v >= images_.size() || seen[v]) throw ValidationError("permutation: mapping is not a bijection");
        seen[v] = true;
    }
}

Permutation Permutation::identity(std::size_t n) {
    std::vector<std::uint32_t> id(n);
    std::iota(id.begin(), id.end(), 0u);
    return Permutation(std::move(id));
}

Permutation Permutation::from_cycles(std::size_t n, const std::vector<std::vector<std::uint32_t>>& cycles) {
    std::vector<std::uint32_t> images(n);
    std::iota(images.begin(), images.end(), 0u);
    std::vector<bool> used(n, false);
    for (const auto& cycle : cycles) {
        for (std::size_t k = 0; k < cycle.size(); ++k) {
            const std::uint32_t from = cycle[k];
            if (from >= n || used[from]) throw ValidationError("permutation: cycles must be disjoint and in range");
            used[from] = true;
            images[from] = cycle[(k + 1) % cycle.size()];
        }
    }
    return Permutation(std::move(images));
}

Permutation Permutation::inverse() const {
    std::vector<std::uint32_t> inv(images_.size());
    for (std::size_t i = 0; i < images_.size(); ++i) inv[images_[i]] = static_cast<std::uint32_t>(i);
    return Permutation(std::move(inv));
}

std::vector<std::vector<std::uint32_t>> Permutation::cycles() const {
    std::vector<std::vector<std::uint32_t>> out;
    std::vector<bool> seen(images_.size(), false);
    for (std::uint32_t start = 0; start < images_.size(); ++start) {
        if (seen[start]) continue;
        std::vector<std::uint32_t> cycle;
        for (std::uint32_t x = start; !seen[x]; x = images_[x]) {
            seen[x] = true;
            cycle.push_back(x);
        }
        out.push_back(std::move(cycle));
    }
    return out;
}

std::string Permutation::to_string() const {
    std::ostringstream os;
    os << '(';
    bool first_cycle = true;
    for (const auto& c : cycles()) {
        if (!first_cycle) os << ',';
        first_cycle = false;
        os << '(';
        for (std::size_t k = 0; k < c.size(); ++k) os << (k ? "," : "") << c[k] + 1;
        os << ')';
    }
    os << ')';
    return os.str();
}

Permutation compose(const Permutation& outer, const Permutation& inner) {
    if (outer.size() != inner.size()) throw DimensionError("compose: size mismatch");
    std::vector<std::uint32_t> images(inner.size());
    for (std::size_t x = 0; x < inner.size(); ++x) images[x] = outer[inner[x]];
    return Permutation(std::move(images));
}

Permutation apply_transposition(const Permutation& pi, std::size_t i, std::size_t j) {
    if (i == j) throw ValidationError("transposition requires i != j");
    if (i >= pi.size() || j >= pi.size()) throw DimensionError("transposition index out of range");
    Permutation out = pi;
    std::swap(out.mutable_images()[i], out.mutable_images()[j]);
    return out;
}

Permutation conjugate(const Permutation& pi, const Permutation& rho) {
    return compose(rho.inverse(), compose(pi, rho));
}

Permutation conjugate_by_transposition(const Permutation& pi, std::size_t i, std::size_t j) {
    if (i == j) throw ValidationError("transposition requires i != j");
    if (i >= pi.size() || j >= pi.size()) throw DimensionError("transposition index out of range");
    auto tau = [&](std::uint32_t x) -> std::uint32_t {
        if (x == i) return static_cast<std::uint32_t>(j);
        if (x == j) return static_cast<std::uint32_t>(i);
        return x;
    };
    std::vector<std::uint32_t> images(pi.size());
    for (std::uint32_t x = 0; x < pi.size(); ++x) images[x] = tau(pi[tau(x)]);
    return Permutation(std::move(images));
}

std::size_t cycle_length_at(const Permutation& pi, std::size_t i) {
    if (i >= pi.size()) throw DimensionError("cycle_length_at: index out of range");
    std::size_t len = 1;
    for (std::uint32_t x = pi[i]; x != i; x = pi[x]) ++len;
    return len;
}

CycleType::CycleType(std::size_t n, std::vector<std::size_t> counts) : n_(n), counts_(std::move(counts)) {
    counts_.resize(n_, 0);
    std::size_t total = 0;
    for (std::size_t q = 1; q <= n_; ++q) total += q * counts_[q - 1];
    if (total != n_) throw ValidationError("cycle type: sum of q * c_q must equal n");
}

CycleType CycleType::from_pairs(std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>>& pairs) {
    std::vector<std::size_t> counts(n, 0);
    for (auto [q, c] : pairs) {
        if (q < 1 || q > n) throw ValidationError("cycle type: cycle length out of range");
        counts[q - 1] += c;
    }
    return CycleType(n, std::move(counts));
}

std::vector<std::size_t> CycleType::lengths() const {
    std::vector<std::size_t> out;
    for (std::size_t q = n_; q >= 1; --q) {
        for (std::size_t k = 0; k < counts_[q - 1]; ++k) out.push_back(q);
    }
    return out;
}

double CycleType::class_size() const {
    double log_size = std::lgamma(static_cast<double>(n_) + 1.0);
    for (std::size_t q = 1; q <= n_; ++q) {
        const double c = static_cast<double>(counts_[q - 1]);
        log_size -= c * std::log(static_cast<double>(q)) + std::lgamma(c + 1.0);
    }
    return std::round(std::exp(log_size));
}

std::string CycleType::to_string() const {
    std::ostringstream os;
    os << '[';
    bool first = true;
    for (std::size_t q = 1; q <= n_; ++q) {
        if (counts_[q - 1] == 0) continue;
        os << (first ? "" : ",") << '[' << q << ',' << counts_[q - 1] << ']';
        first = false;
    }
    os << ']';
    return os.str();
}

CycleType cycle_type_of(const Permutation& pi) {
    std::vector<std::size_t> counts(pi.size(), 0);
    for (const auto& c : pi.cycles()) ++counts[c.size() - 1];
    return CycleType(pi.size(), std::move(counts));
}

PermutationModel PermutationModel::uniform(std::size_t n) {
    if (n < 3) throw ValidationError("uniform permutation model requires n >= 3");
    return PermutationModel(Kind::uniform, n, CycleType{});
}

PermutationModel PermutationModel::fixed_cycle_type(CycleType type) {
    if (type.n() < 4) throw ValidationError("fixed cycle type model requires n >= 4");
    if (type.count(1) != 0) throw ValidationError("fixed cycle type model requires no fixed points (c_1 = 0)");
    const std::size_t n = type.n();
    PermutationModel m(Kind::fixed_cycle_type, n, std::move(type));
    m.lengths_ = m.type_.lengths();
    return m;
}

double PermutationModel::support_size() const {
    if (kind_ == Kind::uniform) return std::round(std::exp(std::lgamma(static_cast<double>(n_) + 1.0)));
    return type_.class_size();
}

std::string PermutationModel::describe() const {
    if (kind_ == Kind::uniform) return "uniform(n=" + std::to_string(n_) + ")";
    return "cycle-type(n=" + std::to_string(n_) + ", cycles=" + type_.to_string() + ")";
}

void PermutationModel::sample_into(Rng& rng, std::vector<std::uint32_t>& out) const {
    out.resize(n_);
    if (kind_ == Kind::uniform) {
        std::iota(out.begin(), out.end(), 0u);
        for (std::size_t i = n_ - 1; i > 0; --i) std::swap(out[i], out[rng.below(i + 1)]);
        return;
    }
    // Uniform arrangement poured into the cycle-slot template: every class
    // member is hit by exactly |centralizer| arrangements.
    std::vector<std::uint32_t> arrangement(n_);
    std::iota(arrangement.begin(), arrangement.end(), 0u);
    for (std::size_t i = n_ - 1; i > 0; --i) std::swap(arrangement[i], arrangement[rng.below(i + 1)]);
    std::size_t pos = 0;
    for (std::size_t len : lengths_) {
        for (std::size_t k = 0; k < len; ++k) {
            out[arrangement[pos + k]] = arrangement[pos + (k + 1) % len];
        }
        pos += len;
    }
}

Permutation PermutationModel::sample(Rng& rng) const {
    std::vector<std::uint32_t> images;
    sample_into(rng, images);
    return Permutation(std::move(images));
}

std::vector<std::pair<Permutation, double>> PermutationModel::enumerate_support(double cap) const {
    const double size = support_size();
    if (size > cap) {
        throw SizeError("support of " + describe() + " has " + std::to_string(size) +
                        " members, above the enumeration cap " + std::to_string(cap));
    }
    std::vector<std::pair<Permutation, double>> out;
    out.reserve(static_cast<std::size_t>(size));
    const double p = 1.0 / size;
    for_each_in_support([&](std::span<const std::uint32_t> images) {
        out.emplace_back(Permutation(std::vector<std::uint32_t>(images.begin(), images.end())), p);
    });
    return out;
}

namespace detail {

void enumerate_all(std::size_t n, const std::function<void(std::span<const std::uint32_t>)>& visit) {
    std::vector<std::uint32_t> images(n);
    std::iota(images.begin(), images.end(), 0u);
    do {
        visit(images);
    } while (std::next_permutation(images.begin(), images.end()));
}

namespace {

// Each permutation of the class is produced once: the smallest unused element
// opens a cycle, whose length is chosen among the remaining lengths, and the
// rest of the cycle is any ordered choice of unused elements.
struct ClassEnumerator {
    std::size_t n;
    std::vector<std::size_t> remaining;  // remaining[q] = cycles of length q still to place
    std::vector<std::uint32_t> images;
    std::vector<bool> used;
    const std::function<void(std::span<const std::uint32_t>)>& visit;

    void open_cycle(std::size_t placed) {
        if (placed == n) {
            visit(images);
            return;
        }
        std::uint32_t first = 0;
        while (used[first]) ++first;
        for (std::size_t q = 1; q <= n; ++q) {
            if (remaining[q] == 0) continue;
            --remaining[q];
            used[first] = true;
            std::vector<std::uint32_t> cycle{first};
            extend(cycle, q, placed);
            used[first] = false;
            ++remaining[q];
        }
    }

    void extend(std::vector<std::uint32_t>& cycle, std::size_t q, std::size_t placed) {
        if (cycle.size() == q) {
            for (std::size_t k = 0; k < q; ++k) images[cycle[k]] = cycle[(k + 1) % q];
            open_cycle(placed + q);
            return;
        }
        for (std::uint32_t x = 0; x < n; ++x) {
            if (used[x]) continue;
            used[x] = true;
            cycle.push_back(x);
            extend(cycle, q, placed);
            cycle.pop_back();
            used[x] = false;
        }
    }
};

}  // namespace

void enumerate_class(const CycleType& type, const std::function<void(std::span<const std::uint32_t>)>& visit) {
    const std::size_t n = type.n();
    ClassEnumerator e{n, std::vector<std::size_t>(n + 1, 0), std::vector<std::uint32_t>(n, 0),
                      std::vector<bool>(n, false), visit};
    for (std::size_t q = 1; q <= n; ++q) e.remaining[q] = type.count(q);
    e.open_cycle(0);
}

}  // namespace detail
}  // namespace steinbias
