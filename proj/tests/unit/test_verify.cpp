#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <random>

#include <boost/math/distributions/normal.hpp>

#include "steinbias/errors.hpp"
#include "steinbias/verify.hpp"

using namespace steinbias;

namespace {

// sup over every interval with endpoints among the sample points (each end
// open or closed) and the two infinities, by direct counting
double brute_interval(const std::vector<double>& w) {
    std::vector<double> ends(w);
    ends.push_back(-INFINITY);
    ends.push_back(INFINITY);
    const double N = static_cast<double>(w.size());
    double best = 0.0;
    for (double c : ends) {
        for (double d : ends) {
            if (c > d) continue;
            for (int lo_closed = 0; lo_closed < 2; ++lo_closed) {
                for (int hi_closed = 0; hi_closed < 2; ++hi_closed) {
                    double mass = 0.0;
                    for (double x : w) {
                        const bool above = lo_closed ? x >= c : x > c;
                        const bool below = hi_closed ? x <= d : x < d;
                        if (above && below) mass += 1.0;
                    }
                    best = std::max(best, std::abs(mass / N - (normal_cdf(d) - normal_cdf(c))));
                }
            }
        }
    }
    return best;
}

}  // namespace

TEST_CASE("normal cdf") {
    CHECK(normal_cdf(0.0) == 0.5);
    CHECK(std::abs(normal_cdf(1.0) - 0.841344746068542948585) < 1e-15);
    CHECK(std::abs(normal_cdf(-3.0) - 0.00134989803163009452665) < 1e-15);
    CHECK(std::abs(normal_cdf(-8.0) - 6.22096057427178e-16) < 1e-25);
}

TEST_CASE("kolmogorov distance edge cases") {
    std::vector<double> one{0.0};
    CHECK(kolmogorov_distance(one).value == 0.5);
    boost::math::normal_distribution<> nd;
    for (std::size_t N : {1, 7, 100}) {
        std::vector<double> q;
        for (std::size_t i = 1; i <= N; ++i) q.push_back(boost::math::quantile(nd, (i - 0.5) / N));
        CHECK(kolmogorov_distance(q).value == doctest::Approx(0.5 / N).epsilon(1e-12));
    }
    CHECK_THROWS(kolmogorov_distance(std::vector<double>{}));
    CHECK_THROWS(standardize(one, 0.0, 0.0));
    // ties: two copies of 0 give the same answer as one
    CHECK(kolmogorov_distance(std::vector<double>{0.0, 0.0}).value == 0.5);
}

TEST_CASE("interval distance against brute force") {
    std::vector<double> one{0.0};
    CHECK(interval_distance(one).value == doctest::Approx(brute_interval(one)).epsilon(1e-14));
    CHECK(interval_distance(one).value == 1.0);
    Rng rng(6);
    std::normal_distribution<double> g(0.3, 1.2);
    for (int rep = 0; rep < 40; ++rep) {
        std::vector<double> w;
        const int N = 1 + rep % 9;
        for (int k = 0; k < N; ++k) w.push_back(std::round(g(rng) * 4) / 4);  // with ties
        const double fast = interval_distance(w).value;
        CHECK(fast == doctest::Approx(brute_interval(w)).epsilon(1e-12));
        CHECK(fast >= kolmogorov_distance(w).value - 1e-12);
    }
}

TEST_CASE("DKW coverage on exact normal samples") {
    int covered = 0, covered_interval = 0;
    std::normal_distribution<double> g;
    for (int rep = 0; rep < 1000; ++rep) {
        Rng rng(derive_seed(99, rep));
        std::vector<double> w(1000);
        for (auto& x : w) x = g(rng);
        const auto k = kolmogorov_distance(w);
        const auto i = interval_distance(w);
        covered += k.value <= k.dkw_band;
        covered_interval += i.value <= i.dkw_band;
    }
    CHECK(covered >= 990);
    CHECK(covered_interval >= 990);
}

TEST_CASE("chi-square") {
    std::vector<double> probs{0.25, 0.25, 0.5};
    CHECK(chi_square_gof("exact", std::vector<double>{250, 250, 500}, probs).pass);
    CHECK_FALSE(chi_square_gof("skewed", std::vector<double>{400, 100, 500}, probs).pass);
    // small cells are pooled: 1e-4 * 1000 < 5
    auto r = chi_square_gof("pooled", std::vector<double>{0, 500, 500}, std::vector<double>{1e-4, 0.5, 0.4999});
    CHECK(r.pass);
    CHECK(r.details["cells"].get<int>() == 2);
    auto off = chi_square_atoms("off", std::vector<double>{1, 2, 2.5}, std::vector<double>{1, 2},
                                std::vector<double>{0.5, 0.5});
    CHECK_FALSE(off.pass);
    CHECK(off.details["outside_support"].get<int>() == 1);
}

TEST_CASE("gap audit and bound comparison") {
    std::vector<double> gaps{0.1, 0.5, 1.0};
    CHECK(gap_audit("ok", gaps, 1.0).pass);
    auto bad = gap_audit("bad", gaps, 0.9);
    CHECK_FALSE(bad.pass);
    CHECK(bad.details["violations"].get<int>() == 1);

    DistanceEstimate d{DistanceEstimate::Metric::half_line, 0.05, 10000, dkw_band(10000)};
    auto tight = zero_bias_bound(1.0, 1e-4, SmoothnessClass::half_lines(), BoundVariant::half_line);
    CHECK(tight.delta_bound < 0.05);
    CHECK_FALSE(delta_vs_bound(d, tight).pass);
    auto loose = zero_bias_bound(1.0, 1.0 / 24, SmoothnessClass::half_lines(), BoundVariant::half_line);
    CHECK(delta_vs_bound(d, loose).pass);
    CHECK(delta_vs_bound(d, loose).threshold == 1.0);
}

TEST_CASE("characterizing check on a zero-variance stream") {
    std::vector<double> y{1, -1, 1, -1};
    CHECK_THROWS(characterizing_check_zero(y, std::vector<double>{0.0}, 1.0));
    // Y = +-1 with Y* = 0: E Y f(Y) = 1 f(1)/2 - f(-1)/2; for f = x^3 that is 1, f'(0) = 0
    auto r = characterizing_check_zero(y, std::vector<double>(4, 0.0), 1.0);
    CHECK_FALSE(r.pass);
}
