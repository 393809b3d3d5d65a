#include <cmath>
#include <random>

#include "doctest.h"

#include "apf/errors.hpp"
#include "apf/eval.hpp"
#include "apf/formulation.hpp"
#include "apf/parser.hpp"
#include "generators.hpp"

using namespace apf;

namespace {

TestInstance ramp_instance() {
    // values: -10 at z=1.0 stepping up by 1 per 0.1 in z.
    TestInstance inst;
    inst.id = "ramp";
    for (int i = 0; i <= 10; ++i) {
        inst.samples.push_back({1.0 + 0.1 * i, -10.0 + i});
    }
    inst.validate();
    return inst;
}

}  // namespace

TEST_CASE("aggregation over a closed band includes both endpoints") {
    const TestInstance inst = ramp_instance();
    // Band [1.2, 1.5] covers samples at z = 1.2, 1.3, 1.4, 1.5 -> values -8..-5.
    const Band band{1.2, 1.5};
    CHECK(aggregate_samples(AggOp::MIN, band, inst) == -8.0);
    CHECK(aggregate_samples(AggOp::MAX, band, inst) == -5.0);
    CHECK(aggregate_samples(AggOp::MEAN, band, inst) == doctest::Approx(-6.5).epsilon(1e-12));
}

TEST_CASE("a band touching exactly one sample aggregates that sample") {
    const TestInstance inst = ramp_instance();
    const Band band{1.95, 2.0};  // only z = 2.0 inside
    CHECK(aggregate_samples(AggOp::MIN, band, inst) == 0.0);
    CHECK(aggregate_samples(AggOp::MEAN, band, inst) == 0.0);
}

TEST_CASE("empty bands raise EmptyBandError; Zero policy neutralizes items") {
    const TestInstance inst = ramp_instance();
    CHECK_THROWS_AS(aggregate_samples(AggOp::MIN, Band{3.0, 4.0}, inst), EmptyBandError);

    const Formulation f = parse_formulation(
        "objective maximize mean(m in [3, 4])\n"
        "constraint min(m in [3, 4]) >= -5\n");
    CHECK_THROWS_AS(objective_values(f, inst), EmptyBandError);

    EvalOptions zero;
    zero.empty_band = EmptyBandPolicy::Zero;
    const auto obj = objective_values(f, inst, zero);
    REQUIRE(obj.size() == 1);
    CHECK(obj[0] == 0.0);
    const auto res = constraint_residuals(f, inst, zero);
    REQUIRE(res.size() == 1);
    CHECK(res[0] == 0.0);
    // Residual 0 is not strictly negative, so the neutralized constraint
    // still counts as unsatisfied under the strict convention.
    CHECK_FALSE(feasibility(f, inst, zero).feasible);
}

TEST_CASE("maximize objectives evaluate to the negated aggregate") {
    const TestInstance inst = ramp_instance();
    const Formulation f = parse_formulation(
        "objective maximize mean(m in [1.2, 1.5])\n"
        "objective minimize mean(m in [1.2, 1.5])\n");
    const auto obj = objective_values(f, inst);
    REQUIRE(obj.size() == 2);
    CHECK(obj[0] == doctest::Approx(6.5).epsilon(1e-12));
    CHECK(obj[1] == doctest::Approx(-6.5).epsilon(1e-12));
}

TEST_CASE("constraint residual signs follow the comparator") {
    const TestInstance inst = ramp_instance();
    // min over [1.2, 1.5] is -8.
    SUBCASE(">= satisfied") {
        const Formulation f = parse_formulation("constraint min(m in [1.2, 1.5]) >= -9\n");
        const auto res = constraint_residuals(f, inst);
        CHECK(res[0] == doctest::Approx(-1.0).epsilon(1e-12));
        CHECK(feasibility(f, inst).feasible);
        CHECK(feasibility(f, inst).violation == 0.0);
    }
    SUBCASE(">= violated") {
        const Formulation f = parse_formulation("constraint min(m in [1.2, 1.5]) >= -7\n");
        const auto res = constraint_residuals(f, inst);
        CHECK(res[0] == doctest::Approx(1.0).epsilon(1e-12));
        const Feasibility fez = feasibility(f, inst);
        CHECK_FALSE(fez.feasible);
        CHECK(fez.violation == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("<= satisfied") {
        const Formulation f = parse_formulation("constraint max(m in [1.2, 1.5]) <= -4\n");
        CHECK(constraint_residuals(f, inst)[0] == doctest::Approx(-1.0).epsilon(1e-12));
        CHECK(feasibility(f, inst).feasible);
    }
    SUBCASE("<= violated") {
        const Formulation f = parse_formulation("constraint max(m in [1.2, 1.5]) <= -6\n");
        CHECK(constraint_residuals(f, inst)[0] == doctest::Approx(1.0).epsilon(1e-12));
        CHECK_FALSE(feasibility(f, inst).feasible);
    }
}

TEST_CASE("feasibility is strict at residual exactly zero") {
    const TestInstance inst = ramp_instance();
    // min over [1.2, 1.5] is exactly -8; threshold -8 gives residual 0.
    const Formulation f = parse_formulation("constraint min(m in [1.2, 1.5]) >= -8\n");
    const auto res = constraint_residuals(f, inst);
    CHECK(res[0] == 0.0);
    CHECK_FALSE(feasibility(f, inst).feasible);
    CHECK(feasibility(f, inst).violation == 0.0);  // positive part of 0 is 0

    EvalOptions loose;
    loose.feasibility_tol = 1e-9;
    CHECK(feasibility(f, inst, loose).feasible);
}

TEST_CASE("violation sums positive parts across constraints") {
    const TestInstance inst = ramp_instance();
    const Formulation f = parse_formulation(
        "constraint min(m in [1.2, 1.5]) >= -6\n"   // residual +2
        "constraint max(m in [1.2, 1.5]) <= -7\n"   // residual +2
        "constraint max(m in [1.2, 1.5]) <= -1\n"); // residual -4 (ignored)
    const Feasibility fez = feasibility(f, inst);
    CHECK_FALSE(fez.feasible);
    CHECK(fez.violation == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("expression trees evaluate compositionally") {
    const TestInstance inst = ramp_instance();
    const ExprPtr agg = Expr::agg(AggOp::MEAN, MetricId{"m", "dB"}, Band{1.2, 1.5});
    CHECK(evaluate_expr(*Expr::neg(agg), inst) == doctest::Approx(6.5).epsilon(1e-12));
    CHECK(evaluate_expr(*Expr::sub(Expr::constant(-5.0), agg), inst) ==
          doctest::Approx(1.5).epsilon(1e-12));
    CHECK(evaluate_expr(*Expr::sub(agg, Expr::constant(-5.0)), inst) ==
          doctest::Approx(-1.5).epsilon(1e-12));
    CHECK(evaluate_expr(*Expr::constant(2.5), inst) == 2.5);
}

TEST_CASE("item order is preserved in objective and residual vectors") {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 100; ++trial) {
        const Formulation f = testgen::random_formulation(
            rng, testgen::uniform_int(rng, 1, 3), testgen::uniform_int(rng, 1, 4), "ord");
        const TestInstance inst = testgen::random_instance(rng, "it");
        const auto obj = objective_values(f, inst);
        const auto res = constraint_residuals(f, inst);
        CHECK(obj.size() == f.n_objectives());
        CHECK(res.size() == f.n_constraints());
        std::size_t oi = 0, ci = 0;
        for (const auto& item : f.items) {
            if (item.kind == ItemKind::OBJECTIVE) {
                CHECK(obj[oi++] == evaluate_item(item, inst));
            } else {
                CHECK(res[ci++] == evaluate_item(item, inst));
            }
        }
    }
}
