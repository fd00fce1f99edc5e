#include "doctest.h"

#include <cmath>
#include <filesystem>

#include "steinbias/errors.hpp"
#include "steinbias/moments.hpp"
#include "steinbias/verify.hpp"
#include "steinbias/zero_bias.hpp"

using namespace steinbias;

namespace {

ScoreArray uniform_array(std::size_t n, std::uint64_t seed) {
    return center_for_uniform(n, generate_raw_scores(n, "gaussian", seed));
}

ScoreArray cycle_array(std::size_t n, std::uint64_t seed) {
    return center_for_cycle_type(n, generate_raw_scores(n, "gaussian", seed));
}

PermutationModel cycle_model(std::size_t n, std::vector<std::pair<std::size_t, std::size_t>> pairs) {
    return PermutationModel::fixed_cycle_type(CycleType::from_pairs(n, pairs));
}

// pi, pi-dagger and pi-double-dagger agree off the touched set
bool agree_off_touched(const DrawDetail& d, const TouchedSet& t) {
    const auto n = d.pi.images().size();
    for (std::uint32_t x = 0; x < n; ++x) {
        bool in = false;
        for (auto y : t.view()) in = in || y == x;
        if (in) continue;
        if (d.pi.images()[x] != d.pi_dagger.images()[x] || d.pi.images()[x] != d.pi_ddagger.images()[x]) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("square moment equals 2 lambda sigma^2, uniform") {
    for (std::size_t n : {3, 4, 5, 6, 7}) {
        auto a = uniform_array(n, 100 + n);
        UniformZeroBiasSampler s(a);
        const auto m = exact_moments(a, PermutationModel::uniform(n));
        CHECK(s.lambda() == doctest::Approx(2.0 / (n - 1.0)));
        CHECK(s.square_moment() == doctest::Approx(2.0 * s.lambda() * m.variance).epsilon(1e-10));
        auto spec = ExchangeablePairSpec::make(PermutationModel::uniform(n), a);
        CHECK(pair_law_square_moment(enumerate_pair_law(spec)) == doctest::Approx(s.square_moment()).epsilon(1e-10));
    }
}

TEST_CASE("square moment equals 2 lambda sigma^2, cycle type") {
    const std::vector<std::pair<std::size_t, std::vector<std::pair<std::size_t, std::size_t>>>> cases = {
        {4, {{2, 2}}}, {4, {{4, 1}}}, {5, {{5, 1}}}, {5, {{2, 1}, {3, 1}}},
        {6, {{3, 2}}}, {6, {{2, 3}}}, {6, {{6, 1}}}, {6, {{2, 1}, {4, 1}}}, {7, {{3, 1}, {4, 1}}}};
    for (const auto& [n, pairs] : cases) {
        auto a = cycle_array(n, 7 * n);
        auto model = cycle_model(n, pairs);
        CycleTypeZeroBiasSampler s(a, model);
        const auto m = exact_moments(a, model);
        CAPTURE(model.describe());
        CHECK(s.lambda() == doctest::Approx(4.0 / n));
        CHECK(s.square_moment() == doctest::Approx(2.0 * s.lambda() * m.variance).epsilon(1e-10));
        double total = 0;
        for (const auto& pm : s.pattern_masses()) total += pm.mass;
        CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("uniform sampler matches the square-bias oracle") {
    for (std::size_t n : {3, 4, 5}) {
        auto a = uniform_array(n, 31 + n);
        UniformZeroBiasSampler s(a);
        auto spec = ExchangeablePairSpec::make(PermutationModel::uniform(n), a);
        const auto oracle = square_bias_oracle(enumerate_pair_law(spec));
        Rng rng(5 + n);
        std::vector<std::pair<double, double>> got, rejected;
        RejectionPairSampler rej(spec);
        for (int k = 0; k < 100000; ++k) {
            DrawDetail d;
            const auto z = s.draw(rng, &d);
            got.emplace_back(z.y_dagger, z.y_ddagger);
            CHECK_MESSAGE(z.gap <= s.gap_bound() * (1 + 1e-12), "gap");
            if (k < 2000) CHECK(agree_off_touched(d, z.touched));
            if (k < 20000) rejected.push_back(rej.draw(rng));
        }
        CHECK(chi_square_pairs("uniform", got, oracle).pass);
        CHECK(chi_square_pairs("rejection", rejected, oracle).pass);
    }
}

TEST_CASE("cycle-type sampler matches the square-bias oracle") {
    const std::vector<std::pair<std::size_t, std::vector<std::pair<std::size_t, std::size_t>>>> cases = {
        {4, {{2, 2}}}, {4, {{4, 1}}}, {5, {{5, 1}}}, {5, {{2, 1}, {3, 1}}}, {6, {{3, 2}}}, {6, {{2, 3}}}};
    for (const auto& [n, pairs] : cases) {
        auto a = cycle_array(n, 3 * n + 1);
        auto model = cycle_model(n, pairs);
        CAPTURE(model.describe());
        CycleTypeZeroBiasSampler s(a, model);
        auto spec = ExchangeablePairSpec::make(model, a);
        const auto oracle = square_bias_oracle(enumerate_pair_law(spec));
        Rng rng(11 * n);
        std::vector<std::pair<double, double>> got;
        for (int k = 0; k < 100000; ++k) {
            DrawDetail d;
            const auto z = s.draw(rng, &d);
            got.emplace_back(z.y_dagger, z.y_ddagger);
            CHECK_MESSAGE(z.gap <= s.gap_bound() * (1 + 1e-12), "gap");
            if (k < 2000) {
                CHECK(agree_off_touched(d, z.touched));
                CHECK(cycle_type_of(d.pi_dagger) == model.cycle_type());
                CHECK(cycle_type_of(d.pi_ddagger) == model.cycle_type());
            }
        }
        const auto r = chi_square_pairs("cycle", got, oracle);
        CAPTURE(r.to_json().dump());
        CHECK(r.pass);
    }
}

TEST_CASE("Y* = U Y-dagger + (1-U) Y-double-dagger and the characterizing equation") {
    auto a = uniform_array(5, 2024);
    UniformZeroBiasSampler s(a);
    const auto m = exact_moments(a, PermutationModel::uniform(5));
    Rng rng(1);
    std::vector<double> y, ys;
    for (int k = 0; k < 200000; ++k) {
        const auto z = s.draw(rng);
        CHECK(z.u >= 0.0);
        CHECK(z.u <= 1.0);
        CHECK(z.y_star == doctest::Approx(assemble_y_star(z.y_dagger, z.y_ddagger, z.u)));
        y.push_back(z.y);
        ys.push_back(z.y_star);
    }
    CHECK(characterizing_check_zero(y, ys, m.variance).pass);
    // Y* = Y is the coupling only a normal law admits
    CHECK_FALSE(characterizing_check_zero(y, y, m.variance).pass);
    CHECK_THROWS_AS(assemble_y_star(1, 2, 1.5), ValidationError);
}

TEST_CASE("linearity") {
    auto a = uniform_array(6, 9);
    CHECK(linearity_check(ExchangeablePairSpec::make(PermutationModel::uniform(6), a), 20, 1).pass);
    auto c = cycle_array(6, 9);
    auto model = cycle_model(6, {{3, 2}});
    CHECK(linearity_check(ExchangeablePairSpec::make(model, c), 20, 1).pass);
    // a diagonal entry injected with the global sum held at zero; the
    // diagonal never enters Y, so the off-diagonal shift is what breaks it
    auto rows = c.to_rows();
    rows[2][2] = 0.7;
    for (std::size_t i = 0; i < 6; ++i)
        for (std::size_t j = 0; j < 6; ++j)
            if (i != j) rows[i][j] -= 0.7 / 30.0;
    auto bad = ScoreArray::from_rows(rows);
    CHECK_THROWS_AS(ExchangeablePairSpec::make(model, bad), ValidationError);
    CHECK_FALSE(linearity_check(ExchangeablePairSpec::unchecked(model, bad), 20, 1).pass);
}

TEST_CASE("exchangeability") {
    auto a = uniform_array(4, 4);
    CHECK(exchangeability_check(ExchangeablePairSpec::make(PermutationModel::uniform(4), a)).pass);
    auto c = cycle_array(4, 4);
    auto model = cycle_model(4, {{2, 2}});
    auto spec = ExchangeablePairSpec::make(model, c);
    CHECK(exchangeability_check(spec).pass);
    const auto wrong = exchangeability_check(spec, PermutationModel::Kind::uniform);
    CHECK_FALSE(wrong.pass);
    CHECK(wrong.details["partners_outside_support"].get<int>() > 0);
}

TEST_CASE("sampler preconditions") {
    auto c = cycle_array(5, 1);
    CHECK_THROWS(UniformZeroBiasSampler(ScoreArray::from_rows({{1, 2}, {3, 4}})));
    CHECK_THROWS(CycleTypeZeroBiasSampler(uniform_array(5, 1), cycle_model(5, {{5, 1}})));
    CHECK_THROWS(CycleTypeZeroBiasSampler(c, PermutationModel::uniform(5)));
}

TEST_CASE("draw spool round trip") {
    auto a = uniform_array(4, 3);
    UniformZeroBiasSampler s(a);
    Rng rng(3);
    const auto path = std::filesystem::temp_directory_path() / "steinbias_spool_test.bin";
    std::vector<ZeroBiasDraw> draws;
    {
        DrawSpool spool(path);
        for (int k = 0; k < 10; ++k) {
            draws.push_back(s.draw(rng));
            spool.write(draws.back());
        }
    }
    const auto back = DrawSpool::read(path);
    REQUIRE(back.size() == 10);
    for (std::size_t k = 0; k < 10; ++k) {
        CHECK(back[k][0] == draws[k].y);
        CHECK(back[k][3] == draws[k].y_star);
        CHECK(back[k][9] == draws[k].touched.size);
        CHECK(back[k][10] == draws[k].gap);
    }
    std::filesystem::remove(path);
}
