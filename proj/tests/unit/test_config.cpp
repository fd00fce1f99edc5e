#include "doctest.h"

#include <string>

#include "steinbias/errors.hpp"
#include "steinbias/experiment.hpp"

using namespace steinbias;

namespace {

const char* kSmall = R"(
id = "t"
construction = "zero-uniform"
reps = 3000
seed = 9
checks = ["characterizing", "gap"]
bounds = ["main"]

[permutation]
n = 4

[score]
generator = "uniform"
seed = 2
)";

std::string error_of(const std::string& text) {
    try {
        parse_experiment(text, "x");
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST_CASE("config fields") {
    auto c = parse_experiment(kSmall, "x");
    CHECK(c.id == "t");
    CHECK(c.construction == Construction::zero_uniform);
    CHECK(c.reps == 3000);
    CHECK(c.n == 4);
    CHECK(c.score_generator == "uniform");
    CHECK(c.wants("gap"));
    CHECK_FALSE(c.wants("oracle"));
    CHECK(c.bounds.size() == 1);
}

TEST_CASE("config errors name the key") {
    CHECK(error_of("construction = \"zero-uniform\"\nreps = 0\n[permutation]\nn = 4\n").find("x.reps") !=
          std::string::npos);
    CHECK(error_of("reps = 5\n").find("construction") != std::string::npos);
    CHECK(error_of("construction = \"zero-uniform\"\nchecks = [\"nope\"]\n").find("checks") != std::string::npos);
    CHECK(error_of("construction = \"zero-cycle-type\"\n[permutation]\nn = 6\ncycle_type = [[4, 2]]\n")
              .find("cycle_type") != std::string::npos);
    CHECK(error_of("construction = \"size-local\"\n[local]\nkind = \"klein\"\n").find("kind") != std::string::npos);
    CHECK_FALSE(error_of("construction = \"zero-uniform\"\nreps = \n").empty());
}

TEST_CASE("reports do not depend on the thread count") {
    auto c = parse_experiment(kSmall, "x");
    auto a = run(c, 1);
    auto b = run(c, 3);
    a.erase("runtime");
    b.erase("runtime");
    CHECK(a == b);
    CHECK(a["pass"].get<bool>());
    c.seed = 10;
    auto d = run(c, 1);
    d.erase("runtime");
    CHECK(d != a);
}
