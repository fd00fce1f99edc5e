#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "steinbias/rng.hpp"

namespace steinbias {

/// A permutation of {0, ..., n-1}; images()[i] is the image of i.
/// External text formats are 1-based; this type is 0-based.
class Permutation {
public:
    Permutation() = default;
    /// Throws ValidationError unless `images` is a bijection of 0..n-1.
    explicit Permutation(std::vector<std::uint32_t> images);

    static Permutation identity(std::size_t n);
    /// Builds from disjoint cycles given 0-based; elements absent from every
    /// cycle are fixed points.
    static Permutation from_cycles(std::size_t n, const std::vector<std::vector<std::uint32_t>>& cycles);

    std::size_t size() const noexcept { return images_.size(); }
    std::uint32_t operator[](std::size_t i) const noexcept { return images_[i]; }
    std::span<const std::uint32_t> images() const noexcept { return images_; }
    Permutation inverse() const;

    /// Cycles, each rotated to start at its minimum, ordered by leading element.
    std::vector<std::vector<std::uint32_t>> cycles() const;
    std::string to_string() const;  // 1-based cycle notation

    friend bool operator==(const Permutation&, const Permutation&) = default;
    friend auto operator<=>(const Permutation&, const Permutation&) = default;

    // Unchecked in-place edits for the coupling code; callers keep bijectivity.
    std::vector<std::uint32_t>& mutable_images() noexcept { return images_; }

private:
    std::vector<std::uint32_t> images_;
};

/// (outer o inner)(x) = outer(inner(x)).
Permutation compose(const Permutation& outer, const Permutation& inner);
/// pi o tau_ij: swaps the images at positions i and j. Throws if i == j.
Permutation apply_transposition(const Permutation& pi, std::size_t i, std::size_t j);
/// rho^{-1} pi rho.
Permutation conjugate(const Permutation& pi, const Permutation& rho);
/// tau_ij pi tau_ij: interchanges i and j in the cycle representation.
Permutation conjugate_by_transposition(const Permutation& pi, std::size_t i, std::size_t j);
/// Length of the cycle of pi containing i.
std::size_t cycle_length_at(const Permutation& pi, std::size_t i);

/// Cycle counts c_q, q = 1..n.
class CycleType {
public:
    CycleType() = default;
    /// counts[q-1] = c_q. Throws unless sum_q q c_q = n.
    CycleType(std::size_t n, std::vector<std::size_t> counts);
    /// From (q, c_q) pairs, as written in experiment configs.
    static CycleType from_pairs(std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>>& pairs);

    std::size_t n() const noexcept { return n_; }
    /// c_q for q >= 1; 0 outside 1..n.
    std::size_t count(std::size_t q) const noexcept { return q >= 1 && q <= n_ ? counts_[q - 1] : 0; }
    /// Cycle lengths in non-increasing order.
    std::vector<std::size_t> lengths() const;
    /// Number of permutations with this cycle type, n! / prod_q (q^c_q c_q!).
    double class_size() const;
    std::string to_string() const;

    friend bool operator==(const CycleType&, const CycleType&) = default;

private:
    std::size_t n_ = 0;
    std::vector<std::size_t> counts_;
};

CycleType cycle_type_of(const Permutation& pi);

/// A sampleable law on S_n: uniform, or uniform over one conjugacy class
/// with no fixed points.
class PermutationModel {
public:
    enum class Kind { uniform, fixed_cycle_type };

    /// Requires n >= 3.
    static PermutationModel uniform(std::size_t n);
    /// Requires c_1 = 0 and n >= 4.
    static PermutationModel fixed_cycle_type(CycleType type);

    Kind kind() const noexcept { return kind_; }
    std::size_t n() const noexcept { return n_; }
    const CycleType& cycle_type() const noexcept { return type_; }
    /// n! or the class size, as a double (exact up to 2^53).
    double support_size() const;
    std::string describe() const;

    Permutation sample(Rng& rng) const;
    /// Fills `out` (size n) without allocating.
    void sample_into(Rng& rng, std::vector<std::uint32_t>& out) const;

    /// Exhaustive (permutation, probability) list. Throws SizeError when
    /// the support exceeds `cap`.
    std::vector<std::pair<Permutation, double>> enumerate_support(double cap = 40320.0) const;

    /// Calls visit(images) for every support member, without the cap check.
    template <class Visit>
    void for_each_in_support(Visit&& visit) const;

private:
    PermutationModel(Kind kind, std::size_t n, CycleType type) : kind_(kind), n_(n), type_(std::move(type)) {}

    Kind kind_ = Kind::uniform;
    std::size_t n_ = 0;
    CycleType type_;
    std::vector<std::size_t> lengths_;  // fixed cycle type: cycle lengths
};

namespace detail {
void enumerate_class(const CycleType& type, const std::function<void(std::span<const std::uint32_t>)>& visit);
void enumerate_all(std::size_t n, const std::function<void(std::span<const std::uint32_t>)>& visit);
}  // namespace detail

template <class Visit>
void PermutationModel::for_each_in_support(Visit&& visit) const {
    if (kind_ == Kind::uniform) {
        detail::enumerate_all(n_, visit);
    } else {
        detail::enumerate_class(type_, visit);
    }
}

}  // namespace steinbias
