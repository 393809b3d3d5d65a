#pragma once

#include <vector>

#include "apf/formulation.hpp"
#include "apf/types.hpp"

namespace apf {

// What to do when an aggregation band contains no sample points.
// Error is the default: silent zeros would make a mis-banded constraint look
// trivially satisfied. Zero exists for compatibility with consumers that
// prefer to score such items as inert.
enum class EmptyBandPolicy { Error, Zero };

struct EvalOptions {
    EmptyBandPolicy empty_band = EmptyBandPolicy::Error;
    // A constraint is satisfied iff its residual is strictly below this bound.
    // The default keeps the strict residual < 0 convention.
    double feasibility_tol = 0.0;
};

// Min/max/mean of the samples whose z lies inside the closed band. Throws
// EmptyBandError when no sample falls inside.
double aggregate_samples(AggOp op, const Band& band, const TestInstance& inst);

// Evaluates an expression tree against a sampled instance. Aggregates range
// over samples whose z lies inside the closed band. Throws EmptyBandError when
// a band is empty (regardless of policy; the policy is applied item-level).
double evaluate_expr(const Expr& e, const TestInstance& inst, const EvalOptions& opts = {});

// Item-level evaluation: under EmptyBandPolicy::Zero an item whose expression
// hits an empty band evaluates to 0.0 as a whole.
double evaluate_item(const FormulationItem& item, const TestInstance& inst,
                     const EvalOptions& opts = {});

// Objective values in item order (objectives are minimized).
std::vector<double> objective_values(const Formulation& f, const TestInstance& inst,
                                     const EvalOptions& opts = {});

// Constraint residuals in item order; residual < 0 means satisfied.
std::vector<double> constraint_residuals(const Formulation& f, const TestInstance& inst,
                                         const EvalOptions& opts = {});

struct Feasibility {
    bool feasible = true;
    double violation = 0.0;  // sum of positive parts of the residuals
};

Feasibility feasibility(const Formulation& f, const TestInstance& inst,
                        const EvalOptions& opts = {});

}  // namespace apf
