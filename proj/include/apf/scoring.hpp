#pragma once

#include <string>
#include <vector>

#include "apf/eval.hpp"
#include "apf/formulation.hpp"
#include "apf/ranking.hpp"

namespace apf {

// Tie-corrected Spearman correlation: Pearson correlation of the two
// fractional rank vectors, aligned by instance id. Reduces to the classic
// 1 - 6*sum(d^2)/(n(n^2-1)) form when both rankings are tie-free.
double spearman(const Ranking& a, const Ranking& b);

struct QualityScore {
    double value = 0.0;  // in [-1, 1]
    std::string formulation_id;
    std::string reference_ranking_id;
};

// Ranking consistency of a formulation: Spearman correlation between the
// ranking it induces on `insts` and the reference ranking.
QualityScore quality_score(const Formulation& f, const std::vector<TestInstance>& insts,
                           const Ranking& reference, const EvalOptions& opts = {});

// Mean per-objective rank correlation against the ground-truth ranking.
// Each objective ranks instances by its own values (ascending, minimization);
// constraints are ignored here.
double alignment_obj(const Formulation& f, const std::vector<TestInstance>& insts,
                     const Ranking& ground_truth, const EvalOptions& opts = {});

// Mean per-constraint feasibility accuracy against a ground-truth bit vector
// (1 = feasible). Each constraint classifies every instance on its own;
// accuracy is 1 - L1(predicted, truth)/m with m = |insts|.
double alignment_con(const Formulation& f, const std::vector<TestInstance>& insts,
                     const std::vector<bool>& ground_truth_feasible,
                     const EvalOptions& opts = {});

struct ItemAlignment {
    std::string name;
    ItemKind kind = ItemKind::OBJECTIVE;
    double value = 0.0;  // rank correlation for objectives, accuracy for constraints
};

struct AlignmentReport {
    double a_obj = 0.0;    // in [-1, 1]
    double a_con = 0.0;    // in [0, 1]
    double a_total = 0.0;  // alpha*a_obj + (1-alpha)*a_con
    double alpha = 0.5;
    std::vector<ItemAlignment> per_item;
};

// Combines the two component scores; alpha weights objectives.
AlignmentReport alignment_total(double a_obj, double a_con, double alpha);

// Full per-item report for a formulation with at least one objective and at
// least one constraint.
AlignmentReport evaluate_alignment(const Formulation& f,
                                   const std::vector<TestInstance>& insts,
                                   const Ranking& ground_truth,
                                   const std::vector<bool>& ground_truth_feasible,
                                   double alpha = 0.5, const EvalOptions& opts = {});

}  // namespace apf
