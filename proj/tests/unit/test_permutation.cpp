#include "doctest.h"

#include <map>
#include <set>

#include "steinbias/errors.hpp"
#include "steinbias/permutation.hpp"

using namespace steinbias;

TEST_CASE("cycle_type_of") {
    // ((1,3,7,5),(2,6,4)) in 1-based notation
    auto pi = Permutation::from_cycles(7, {{0, 2, 6, 4}, {1, 5, 3}});
    auto ct = cycle_type_of(pi);
    CHECK(ct.count(4) == 1);
    CHECK(ct.count(3) == 1);
    CHECK(ct.count(1) == 0);
    CHECK(cycle_length_at(pi, 1) == 3);
    CHECK(cycle_type_of(Permutation::identity(5)).count(1) == 5);
    CHECK(cycle_type_of(Permutation::from_cycles(2, {{0, 1}})).count(2) == 1);
}

TEST_CASE("group operations") {
    Rng rng(5);
    auto model = PermutationModel::uniform(9);
    for (int rep = 0; rep < 50; ++rep) {
        auto pi = model.sample(rng);
        auto rho = model.sample(rng);
        CHECK(compose(pi, pi.inverse()) == Permutation::identity(9));
        CHECK(cycle_type_of(conjugate(pi, rho)) == cycle_type_of(pi));
        CHECK(cycle_type_of(conjugate_by_transposition(pi, 2, 7)) == cycle_type_of(pi));
        auto t = apply_transposition(pi, 1, 4);
        CHECK(apply_transposition(t, 1, 4) == pi);
    }
    CHECK_THROWS(apply_transposition(Permutation::identity(3), 1, 1));
}

TEST_CASE("support enumeration") {
    auto u3 = PermutationModel::uniform(3).enumerate_support();
    CHECK(u3.size() == 6);
    for (auto& [p, w] : u3) CHECK(w == doctest::Approx(1.0 / 6.0));
    auto inv = PermutationModel::fixed_cycle_type(CycleType::from_pairs(4, {{2, 2}})).enumerate_support();
    CHECK(inv.size() == 3);
    auto c4 = PermutationModel::fixed_cycle_type(CycleType::from_pairs(4, {{4, 1}})).enumerate_support();
    CHECK(c4.size() == 6);
    auto c5 = PermutationModel::fixed_cycle_type(CycleType::from_pairs(5, {{5, 1}})).enumerate_support();
    CHECK(c5.size() == 24);
    double total = 0;
    for (auto& [p, w] : c5) total += w;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_THROWS_AS(PermutationModel::uniform(9).enumerate_support(), SizeError);
    CHECK_THROWS(PermutationModel::fixed_cycle_type(CycleType::from_pairs(4, {{1, 1}, {3, 1}})));
    CHECK_THROWS(PermutationModel::uniform(2));
}

TEST_CASE("enumerated class matches a brute-force filter of S_n") {
    auto type = CycleType::from_pairs(6, {{2, 1}, {4, 1}});
    std::set<std::vector<std::uint32_t>> brute;
    detail::enumerate_all(6, [&](std::span<const std::uint32_t> p) {
        Permutation pi(std::vector<std::uint32_t>(p.begin(), p.end()));
        if (cycle_type_of(pi) == type) brute.insert(std::vector<std::uint32_t>(p.begin(), p.end()));
    });
    std::set<std::vector<std::uint32_t>> fast;
    detail::enumerate_class(type, [&](std::span<const std::uint32_t> p) { fast.insert(std::vector<std::uint32_t>(p.begin(), p.end())); });
    CHECK(brute == fast);
    CHECK(static_cast<double>(fast.size()) == type.class_size());
}

TEST_CASE("fixed cycle type samples stay in the class") {
    auto type = CycleType::from_pairs(7, {{3, 1}, {2, 2}});
    auto model = PermutationModel::fixed_cycle_type(type);
    Rng rng(1);
    for (int rep = 0; rep < 1000; ++rep) CHECK(cycle_type_of(model.sample(rng)) == type);
}
