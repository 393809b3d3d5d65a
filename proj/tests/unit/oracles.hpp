#pragma once

// Independent reference implementations used to cross-check the production
// code. Deliberately naive: repeated-removal Pareto peeling instead of the
// fast non-dominated sort, and the closed-form Spearman formula instead of
// Pearson-on-ranks.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "apf/eval.hpp"
#include "apf/formulation.hpp"
#include "apf/ranking.hpp"
#include "apf/types.hpp"

namespace apf::oracle {

inline bool dominates(const std::vector<double>& a, const std::vector<double>& b) {
    bool strictly = false;
    for (std::size_t k = 0; k < a.size(); ++k) {
        if (a[k] > b[k]) return false;
        if (a[k] < b[k]) strictly = true;
    }
    return strictly;
}

// Feasibility-first / Pareto-front / violation ranking computed by brute
// force: O(n^2) pairwise dominance with repeated front removal.
inline Ranking reference_ranking(const Formulation& f,
                                 const std::vector<TestInstance>& insts,
                                 const EvalOptions& opts = {}) {
    const std::size_t n = insts.size();
    std::vector<bool> feasible(n);
    std::vector<double> violation(n);
    std::vector<std::vector<double>> objs(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Feasibility fs = feasibility(f, insts[i], opts);
        feasible[i] = fs.feasible;
        violation[i] = fs.violation;
        objs[i] = objective_values(f, insts[i], opts);
    }

    // Front index per feasible instance via repeated removal.
    std::vector<int> front(n, -1);
    std::vector<std::size_t> remaining;
    for (std::size_t i = 0; i < n; ++i) {
        if (feasible[i]) remaining.push_back(i);
    }
    int level = 0;
    while (!remaining.empty()) {
        std::vector<std::size_t> this_front;
        for (std::size_t i : remaining) {
            bool dominated = false;
            for (std::size_t j : remaining) {
                if (j != i && dominates(objs[j], objs[i])) {
                    dominated = true;
                    break;
                }
            }
            if (!dominated) this_front.push_back(i);
        }
        for (std::size_t i : this_front) front[i] = level;
        std::vector<std::size_t> next;
        for (std::size_t i : remaining) {
            if (front[i] == -1) next.push_back(i);
        }
        remaining = std::move(next);
        ++level;
    }

    // Sort keys: feasible (0) before infeasible (1); fronts ascending; then
    // violation ascending. Fractional ranks by averaging tied key positions.
    struct Key {
        int infeasible;
        int front;
        double violation;
        bool operator<(const Key& o) const {
            if (infeasible != o.infeasible) return infeasible < o.infeasible;
            if (front != o.front) return front < o.front;
            return violation < o.violation;
        }
        bool operator==(const Key& o) const {
            return infeasible == o.infeasible && front == o.front &&
                   violation == o.violation;
        }
    };
    std::vector<Key> keys(n);
    for (std::size_t i = 0; i < n; ++i) {
        keys[i] = feasible[i] ? Key{0, front[i], 0.0} : Key{1, 0, violation[i]};
    }
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return keys[a] < keys[b]; });

    Ranking r;
    r.id = "oracle";
    r.instance_ids.resize(n);
    r.ranks.resize(n);
    std::size_t pos = 0;
    while (pos < n) {
        std::size_t end = pos + 1;
        while (end < n && keys[order[end]] == keys[order[pos]]) ++end;
        const double avg = (static_cast<double>(pos + 1) + static_cast<double>(end)) / 2.0;
        for (std::size_t k = pos; k < end; ++k) {
            r.instance_ids[order[k]] = insts[order[k]].id;
            r.ranks[order[k]] = avg;
        }
        pos = end;
    }
    r.validate();
    return r;
}

// Tie-free closed form: 1 - 6*sum(d^2) / (n(n^2-1)). Ranks must be integral
// permutations of 1..n in matching id order.
inline double spearman_closed_form(const std::vector<double>& a,
                                   const std::vector<double>& b) {
    const std::size_t n = a.size();
    double sum_d2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = a[i] - b[i];
        sum_d2 += d * d;
    }
    const double nn = static_cast<double>(n);
    return 1.0 - 6.0 * sum_d2 / (nn * (nn * nn - 1.0));
}

}  // namespace apf::oracle
