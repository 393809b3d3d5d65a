#include <random>
#include <set>

#include "doctest.h"

#include "apf/errors.hpp"
#include "apf/parser.hpp"
#include "apf/ranking.hpp"
#include "generators.hpp"
#include "oracles.hpp"

using namespace apf;

TEST_CASE("fractional ranks average tied positions") {
    const std::vector<double> keys{3.0, 1.0, 3.0, 2.0};
    const auto ranks = fractional_ranks(keys);
    // sorted: 1 (rank 1), 2 (rank 2), 3 and 3 (positions 3,4 -> 3.5 each)
    CHECK(ranks == std::vector<double>{3.5, 1.0, 3.5, 2.0});
}

TEST_CASE("all-equal keys all get the middle rank") {
    const std::vector<int> keys{7, 7, 7, 7, 7};
    const auto ranks = fractional_ranks(keys);
    for (double r : ranks) CHECK(r == 3.0);
}

TEST_CASE("rank sum is n(n+1)/2 for arbitrary keys") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = testgen::uniform_int(rng, 1, 30);
        std::vector<int> keys(n);
        for (auto& k : keys) k = testgen::uniform_int(rng, 0, 5);  // force ties
        const auto ranks = fractional_ranks(keys);
        double sum = 0.0;
        for (double r : ranks) sum += r;
        CHECK(sum == doctest::Approx(n * (n + 1) / 2.0).epsilon(1e-12));
    }
}

TEST_CASE("ranking_from_order assigns 1..n in the given order") {
    const Ranking r = ranking_from_order("r0", {"b", "a", "c"});
    CHECK(r.id == "r0");
    CHECK(r.instance_ids == std::vector<std::string>{"b", "a", "c"});
    CHECK(r.ranks == std::vector<double>{1.0, 2.0, 3.0});
    CHECK_NOTHROW(r.validate());
}

TEST_CASE("ranking validation rejects malformed rankings") {
    Ranking r;
    r.id = "bad";
    r.instance_ids = {"a", "b"};
    r.ranks = {1.0};
    CHECK_THROWS_AS(r.validate(), Error);  // length mismatch

    r.ranks = {1.0, 3.0};  // sum 4 != 3
    CHECK_THROWS_AS(r.validate(), Error);

    r.instance_ids = {"a", "a"};
    r.ranks = {1.0, 2.0};
    CHECK_THROWS_AS(r.validate(), Error);  // duplicate ids
}

TEST_CASE("non-dominated fronts on a known two-objective set") {
    // Points: A(1,4) B(2,2) C(4,1) form front 0; D(3,3) dominated by B only;
    // E(5,5) dominated by everything.
    const Matrix pts{{1, 4}, {2, 2}, {4, 1}, {3, 3}, {5, 5}};
    const FrontAssignment fa = non_dominated_fronts(pts);
    CHECK(fa.n_fronts == 3);
    CHECK(fa.front == std::vector<int>{0, 0, 0, 1, 2});
}

TEST_CASE("equal points share a front and dominance is strict") {
    const Matrix pts{{1, 1}, {1, 1}, {2, 1}};
    const FrontAssignment fa = non_dominated_fronts(pts);
    CHECK(fa.front[0] == 0);
    CHECK(fa.front[1] == 0);  // equal points do not dominate each other
    CHECK(fa.front[2] == 1);
}

TEST_CASE("single-objective fronts reduce to sorted groups") {
    const Matrix pts{{3}, {1}, {2}, {1}};
    const FrontAssignment fa = non_dominated_fronts(pts);
    CHECK(fa.front == std::vector<int>{2, 0, 1, 0});
    CHECK(fa.n_fronts == 3);
}

TEST_CASE("induced ranking orders feasible fronts before infeasible violations") {
    // Ramp instances: value everywhere equal to a constant per instance.
    auto flat = [](const std::string& id, double v) {
        TestInstance inst;
        inst.id = id;
        inst.samples = {{1.0, v}, {2.0, v}};
        inst.validate();
        return inst;
    };
    // Constraint: min >= -5 (feasible iff v > -5). Objective: maximize mean.
    const Formulation f = parse_formulation(
        "objective maximize mean(m in [1, 2])\n"
        "constraint min(m in [1, 2]) >= -5\n");
    const std::vector<TestInstance> insts{
        flat("deep", -20.0),   // infeasible, violation 15
        flat("best", -1.0),    // feasible, highest mean
        flat("edge", -6.0),    // infeasible, violation 1
        flat("ok", -3.0),      // feasible, lower mean
    };
    const Ranking r = induced_ranking(f, insts, {}, "ind");
    CHECK(r.id == "ind");
    REQUIRE(r.instance_ids == std::vector<std::string>{"deep", "best", "edge", "ok"});
    CHECK(r.ranks == std::vector<double>{4.0, 1.0, 3.0, 2.0});
}

TEST_CASE("induced ranking ties feasible instances inside one front") {
    auto flat = [](const std::string& id, double v) {
        TestInstance inst;
        inst.id = id;
        inst.samples = {{1.0, v}, {2.0, v}};
        inst.validate();
        return inst;
    };
    const Formulation f = parse_formulation("objective maximize mean(m in [1, 2])\n");
    const std::vector<TestInstance> insts{flat("a", -2.0), flat("b", -2.0), flat("c", -4.0)};
    const Ranking r = induced_ranking(f, insts);
    CHECK(r.ranks == std::vector<double>{1.5, 1.5, 3.0});
}

TEST_CASE("induced ranking matches the brute-force oracle on random fixtures") {
    std::mt19937_64 rng(4242);
    for (int trial = 0; trial < 150; ++trial) {
        const int n1 = testgen::uniform_int(rng, 1, 3);
        const int n2 = testgen::uniform_int(rng, 0, 4);
        const Formulation f = testgen::random_formulation(rng, n1, n2, "rnd");
        const auto insts =
            testgen::random_instances(rng, testgen::uniform_int(rng, 2, 8));
        const Ranking got = induced_ranking(f, insts, {}, "rnd");
        const Ranking want = oracle::reference_ranking(f, insts);
        CHECK(got.instance_ids == want.instance_ids);
        REQUIRE(got.ranks.size() == want.ranks.size());
        for (std::size_t i = 0; i < got.ranks.size(); ++i) {
            CHECK(got.ranks[i] == want.ranks[i]);
        }
    }
}

TEST_CASE("induced ranking rejects an empty instance list") {
    const Formulation f = parse_formulation("objective maximize mean(m in [1, 2])\n");
    CHECK_THROWS_AS(induced_ranking(f, {}), TooFewInstancesError);
    TestInstance one;
    one.id = "solo";
    one.samples = {{1.0, -3.0}, {2.0, -3.0}};
    const Ranking r = induced_ranking(f, {one});
    CHECK(r.ranks == std::vector<double>{1.0});
}
