#include "apf/eval.hpp"

#include <algorithm>
#include <cmath>

#include "apf/errors.hpp"
#include "apf/util.hpp"

namespace apf {

double aggregate_samples(AggOp op, const Band& band, const TestInstance& inst) {
    double acc = 0.0;
    double best = 0.0;
    std::size_t count = 0;
    for (const Sample& s : inst.samples) {
        if (!band.contains(s.z)) continue;
        if (count == 0) {
            best = s.value;
            acc = s.value;
        } else {
            switch (op) {
                case AggOp::MIN: best = std::min(best, s.value); break;
                case AggOp::MAX: best = std::max(best, s.value); break;
                case AggOp::MEAN: acc += s.value; break;
            }
        }
        ++count;
    }
    if (count == 0) {
        throw EmptyBandError(band.lo, band.hi, "aggregating on instance '" + inst.id + "'");
    }
    if (op == AggOp::MEAN) return acc / static_cast<double>(count);
    return best;
}

namespace {

double aggregate(const AggNode& agg, const TestInstance& inst) {
    try {
        return aggregate_samples(agg.op, agg.band, inst);
    } catch (const EmptyBandError&) {
        throw EmptyBandError(agg.band.lo, agg.band.hi,
                             "aggregating '" + agg.metric.name + "' on instance '" +
                                 inst.id + "'");
    }
}

}  // namespace

double evaluate_expr(const Expr& e, const TestInstance& inst, const EvalOptions& opts) {
    return std::visit(
        [&](const auto& n) -> double {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, AggNode>) {
                return aggregate(n, inst);
            } else if constexpr (std::is_same_v<T, NegNode>) {
                return -evaluate_expr(*n.child, inst, opts);
            } else if constexpr (std::is_same_v<T, SubNode>) {
                return evaluate_expr(*n.left, inst, opts) -
                       evaluate_expr(*n.right, inst, opts);
            } else {
                return n.value;
            }
        },
        e.node);
}

double evaluate_item(const FormulationItem& item, const TestInstance& inst,
                     const EvalOptions& opts) {
    try {
        const double v = evaluate_expr(*item.expr, inst, opts);
        if (!std::isfinite(v)) {
            throw NonFiniteError("item '" + item.name + "' on instance '" + inst.id + "'");
        }
        return v;
    } catch (const EmptyBandError&) {
        if (opts.empty_band == EmptyBandPolicy::Zero) return 0.0;
        throw;
    }
}

std::vector<double> objective_values(const Formulation& f, const TestInstance& inst,
                                     const EvalOptions& opts) {
    std::vector<double> out;
    for (const auto& item : f.items) {
        if (item.kind == ItemKind::OBJECTIVE) out.push_back(evaluate_item(item, inst, opts));
    }
    return out;
}

std::vector<double> constraint_residuals(const Formulation& f, const TestInstance& inst,
                                         const EvalOptions& opts) {
    std::vector<double> out;
    for (const auto& item : f.items) {
        if (item.kind == ItemKind::CONSTRAINT) out.push_back(evaluate_item(item, inst, opts));
    }
    return out;
}

Feasibility feasibility(const Formulation& f, const TestInstance& inst,
                        const EvalOptions& opts) {
    Feasibility fz;
    for (const double g : constraint_residuals(f, inst, opts)) {
        if (!(g < opts.feasibility_tol)) fz.feasible = false;
        fz.violation += std::max(0.0, g);
    }
    return fz;
}

}  // namespace apf
