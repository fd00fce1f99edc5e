#include "doctest.h"

#include <cmath>
#include <numbers>

#include "steinbias/bounds.hpp"
#include "steinbias/errors.hpp"

using namespace steinbias;

namespace {

const auto kHalf = SmoothnessClass::half_lines();

}  // namespace

TEST_CASE("named class constants") {
    CHECK(std::abs(SmoothnessClass::half_lines().a - 0.797884560802865) < 1e-14);
    CHECK(std::abs(SmoothnessClass::intervals().a - 1.59576912160573) < 1e-14);
    CHECK_THROWS(SmoothnessClass::custom(0.0));
    CHECK(parse_bound_variant("half-line") == BoundVariant::half_line);
    CHECK_THROWS_AS(parse_bound_variant("x"), ConfigError);
}

TEST_CASE("zero-bias bound regression values") {
    auto r = zero_bias_bound(1.0, 1.0 / 24, kHalf, BoundVariant::half_line);
    CHECK(r.A == doctest::Approx(1.0 / 12).epsilon(1e-15));
    CHECK(std::abs(r.delta_bound - 128.0 / 12) < 1e-12);
    CHECK(r.precondition_ok);
    CHECK(r.vacuous());

    // (1/12)(37 + 1 + 112 sqrt(2/pi)), evaluated independently
    const double main = (38.0 + 112.0 * std::sqrt(2.0 / std::numbers::pi)) / 12.0;
    auto m = zero_bias_bound(1.0, 1.0 / 24, kHalf, BoundVariant::main);
    CHECK(std::abs(m.delta_bound - main) < 1e-12);
    CHECK(std::abs(m.delta_bound - 10.61358) < 1e-5);

    auto i = zero_bias_bound(1.0, 1.0 / 24, SmoothnessClass::intervals(), BoundVariant::interval);
    CHECK(std::abs(i.delta_bound - 217.0 / 12) < 1e-12);

    auto alt = zero_bias_bound(1.0, 1.0 / 48, kHalf, BoundVariant::alt);
    const double A = 1.0 / 24;
    CHECK(std::abs(alt.delta_bound - A * (145 * kHalf.a + 7.5 * A + 25)) < 1e-13);
    CHECK(alt.precondition_ok);
    CHECK_FALSE(zero_bias_bound(1.0, 1.0 / 40, kHalf, BoundVariant::alt).precondition_ok);
    CHECK_FALSE(zero_bias_bound(1.0, 1.0 / 20, kHalf, BoundVariant::main).precondition_ok);
    CHECK_THROWS(zero_bias_bound(0.0, 1.0, kHalf, BoundVariant::main));
    CHECK_THROWS(zero_bias_bound(1.0, -1.0, kHalf, BoundVariant::main));
}

TEST_CASE("size-bias bound regression values") {
    auto r = size_bias_bound(1e6, 1000.0, 1.0, 0.01, kHalf, BoundVariant::main);
    const double A = 1e-3;
    const double expect = kHalf.a * A / 2 + 1000.0 * ((19 + 56 * kHalf.a) * A * A + 4 * A * A * A) + 0.23;
    CHECK(std::abs(r.delta_bound - expect) < 1e-14);
    CHECK(std::abs(r.delta_bound - 0.294085) < 1e-6);
    CHECK(r.precondition_ok);

    auto h = size_bias_bound(1e6, 1000.0, 1.0, 0.01, kHalf, BoundVariant::half_line);
    CHECK(std::abs(h.delta_bound - (0.4 * A + 1000.0 * (64 * A * A + 4 * A * A * A) + 0.23)) < 1e-14);
    CHECK(std::abs(h.delta_bound - r.delta_bound) < 1e-3);
    auto iv = size_bias_bound(1e6, 1000.0, 1.0, 0.01, kHalf, BoundVariant::interval);
    CHECK(std::abs(iv.delta_bound - (0.8 * A + 1000.0 * (109 * A * A + 4 * A * A * A) + 0.23)) < 1e-14);
    auto alt = size_bias_bound(1e6, 1000.0, 1.0, 0.01, kHalf, BoundVariant::alt);
    CHECK(std::abs(alt.delta_bound -
                   (kHalf.a * A / 6 + 1000.0 * ((13 + 73 * kHalf.a) * A * A + 2.5 * A * A * A) + 0.15)) < 1e-14);

    // B = sigma^{3/2} / sqrt(6 mu) is the boundary
    const double edge = std::pow(1000.0, 1.5) / std::sqrt(6e6);
    CHECK(size_bias_bound(1e6, 1000.0, edge * 0.999, 0.0, kHalf, BoundVariant::main).precondition_ok);
    CHECK_FALSE(size_bias_bound(1e6, 1000.0, edge * 1.001, 0.0, kHalf, BoundVariant::main).precondition_ok);
    CHECK_FALSE(size_bias_bound(1e6, 1000.0, edge * 0.9, 0.0, kHalf, BoundVariant::alt).precondition_ok);
    CHECK(size_bias_bound(1.0, 1.0, 1e-12, 0.0, kHalf, BoundVariant::main).delta_bound < 1e-11);
    CHECK_THROWS(size_bias_bound(1.0, 1.0, 1.0, -1.0, kHalf, BoundVariant::main));
}

TEST_CASE("monotone in A and Delta, scale free in sigma") {
    for (auto v : {BoundVariant::main, BoundVariant::half_line, BoundVariant::interval, BoundVariant::alt}) {
        double prev = 0.0, prev_s = 0.0;
        for (int k = 1; k <= 50; ++k) {
            const double B = 0.002 * k;
            const double z = zero_bias_bound(1.0, B, kHalf, v).delta_bound;
            const double s = size_bias_bound(4.0, 2.0, B, 0.1, kHalf, v).delta_bound;
            CHECK(z > prev);
            CHECK(s > prev_s);
            prev = z;
            prev_s = s;
        }
        double prev_d = -1.0;
        for (int k = 0; k <= 20; ++k) {
            const double s = size_bias_bound(4.0, 2.0, 0.1, 0.05 * k, kHalf, v).delta_bound;
            CHECK(s > prev_d);
            prev_d = s;
        }
        for (double c : {0.01, 3.0, 1e5}) {
            CHECK(zero_bias_bound(c * 2.0, c * 0.05, kHalf, v).delta_bound ==
                  doctest::Approx(zero_bias_bound(2.0, 0.05, kHalf, v).delta_bound).epsilon(1e-14));
        }
    }
}

TEST_CASE("combinatorial wrappers") {
    auto u = ScoreArray::from_rows({{1, -1, 0}, {-1, 1, 0}, {0, 0, 0}});
    auto r = combinatorial_bound(u, PermutationModel::uniform(3), 192.0, kHalf, BoundVariant::half_line);
    CHECK(r.A == doctest::Approx(1.0 / 24).epsilon(1e-15));
    CHECK(r.precondition_ok);
    CHECK(std::abs(r.delta_bound - 5.3125) < 1e-12);

    auto c = ScoreArray::from_rows({{0, 1, -1, 0}, {1, 0, 0, -1}, {-1, 0, 0, 1}, {0, -1, 1, 0}});
    auto model = PermutationModel::fixed_cycle_type(CycleType::from_pairs(4, {{2, 2}}));
    auto rc = combinatorial_bound(c, model, 192.0, kHalf);
    CHECK(rc.A == doctest::Approx(40.0 / 192).epsilon(1e-15));
    CHECK_FALSE(rc.precondition_ok);
    for (double sigma : {50.0, 500.0, 1234.5}) {
        CHECK(combinatorial_bound(u, PermutationModel::uniform(3), sigma, kHalf).A ==
              doctest::Approx(8.0 / sigma).epsilon(1e-15));
        CHECK(combinatorial_bound(c, model, sigma, kHalf).A == doctest::Approx(40.0 / sigma).epsilon(1e-15));
    }
    // at A = 1/12 the wrapper reproduces the generic formula exactly
    auto edge = combinatorial_bound(u, PermutationModel::uniform(3), 96.0, kHalf, BoundVariant::main);
    CHECK(edge.precondition_ok);
    CHECK(edge.delta_bound == zero_bias_bound(1.0, 1.0 / 24, kHalf, BoundVariant::main).delta_bound);
    auto skew = ScoreArray::from_rows({{1, -1, 0, 0}, {0, 1, -1, 0}, {0, 0, 1, -1}, {-1, 0, 0, 1}});
    CHECK_THROWS_AS(combinatorial_bound(skew, model, 10.0, kHalf), ValidationError);
    auto uncentered = ScoreArray::from_rows({{0, 1, 1, 0}, {1, 0, 0, 1}, {1, 0, 0, 1}, {0, 1, 1, 0}});
    CHECK_THROWS_AS(combinatorial_bound(uncentered, PermutationModel::uniform(4), 10.0, kHalf), ValidationError);
}

TEST_CASE("report serialization") {
    auto r = size_bias_bound(2.0, 1.0, 0.1, 0.0, kHalf, BoundVariant::main);
    auto j = r.to_json();
    CHECK(j["formula"].get<std::string>().find("size-bias") != std::string::npos);
    CHECK(j["mu"].get<double>() == 2.0);
    CHECK(j.contains("precondition_ok"));
    CHECK(BoundReport::csv_header().find("delta_bound") != std::string::npos);
}
