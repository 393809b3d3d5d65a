#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "apf/eval.hpp"
#include "apf/formulation.hpp"
#include "apf/types.hpp"

namespace apf {

// A ranking of test instances, best first in rank value: rank 1 is best.
// Ranks are fractional (ties share the average of the positions they occupy),
// so for n instances the rank sum is always n(n+1)/2.
struct Ranking {
    std::string id;
    std::vector<std::string> instance_ids;
    std::vector<double> ranks;  // aligned with instance_ids

    std::size_t size() const { return instance_ids.size(); }
    void validate() const;
};

// Ranks 1..n from an explicit best-first ordering of instance ids.
Ranking ranking_from_order(std::string id, std::vector<std::string> ordered_ids);

// Fractional ranks of arbitrary sortable keys (ascending; smallest key gets
// rank 1, exactly equal keys share their average position).
template <typename Key>
std::vector<double> fractional_ranks(const std::vector<Key>& keys);

using Matrix = std::vector<std::vector<double>>;

// Rows are instances (in the given order), columns are the formulation's
// objectives, all in minimization convention.
Matrix objective_matrix(const Formulation& f, const std::vector<TestInstance>& instances,
                        const EvalOptions& opts = {});

struct FrontAssignment {
    std::vector<int> front;  // 0-based front index per row
    int n_fronts = 0;
};

// Fast non-dominated sort over minimization rows: front 0 is the Pareto set,
// front k the Pareto set after removing fronts < k.
FrontAssignment non_dominated_fronts(const Matrix& points);

// Reference ranking induced by evaluating a formulation on instances:
// feasible instances come first, ordered by non-domination front (tied within
// a front); infeasible instances follow, ordered by ascending total violation.
Ranking induced_ranking(const Formulation& f, const std::vector<TestInstance>& instances,
                        const EvalOptions& opts = {}, std::string ranking_id = {});

// --- implementation ---

template <typename Key>
std::vector<double> fractional_ranks(const std::vector<Key>& keys) {
    const std::size_t n = keys.size();
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return keys[a] < keys[b]; });
    std::vector<double> ranks(n, 0.0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && !(keys[order[i]] < keys[order[j + 1]]) &&
               !(keys[order[j + 1]] < keys[order[i]])) {
            ++j;
        }
        // positions i..j (0-based) share the average of ranks i+1..j+1
        const double avg = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
        i = j + 1;
    }
    return ranks;
}

}  // namespace apf
