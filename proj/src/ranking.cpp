#include "apf/ranking.hpp"

#include <cmath>
#include <tuple>
#include <unordered_set>

#include "apf/errors.hpp"

namespace apf {

void Ranking::validate() const {
    if (instance_ids.size() != ranks.size()) {
        throw LengthMismatchError(ranks.size(), instance_ids.size());
    }
    if (instance_ids.empty()) {
        throw InvariantViolation("ranking '" + id + "' is empty");
    }
    std::unordered_set<std::string> seen;
    for (const auto& iid : instance_ids) {
        if (iid.empty()) throw InvariantViolation("ranking '" + id + "' has an empty instance id");
        if (!seen.insert(iid).second) {
            throw InvariantViolation("ranking '" + id + "' repeats instance '" + iid + "'");
        }
    }
    const auto n = static_cast<double>(ranks.size());
    double sum = 0.0;
    for (const double r : ranks) {
        if (!std::isfinite(r) || r < 1.0 || r > n) {
            throw InvariantViolation("ranking '" + id + "' has a rank outside [1, n]");
        }
        sum += r;
    }
    const double expected = n * (n + 1.0) / 2.0;
    if (std::abs(sum - expected) > 1e-9) {
        throw InvariantViolation("ranking '" + id + "' rank sum is not n(n+1)/2");
    }
}

Ranking ranking_from_order(std::string id, std::vector<std::string> ordered_ids) {
    Ranking r;
    r.id = std::move(id);
    r.instance_ids = std::move(ordered_ids);
    r.ranks.reserve(r.instance_ids.size());
    for (std::size_t i = 0; i < r.instance_ids.size(); ++i) {
        r.ranks.push_back(static_cast<double>(i + 1));
    }
    r.validate();
    return r;
}

Matrix objective_matrix(const Formulation& f, const std::vector<TestInstance>& instances,
                        const EvalOptions& opts) {
    Matrix rows;
    rows.reserve(instances.size());
    for (const TestInstance& inst : instances) {
        rows.push_back(objective_values(f, inst, opts));
    }
    return rows;
}

FrontAssignment non_dominated_fronts(const Matrix& points) {
    const std::size_t n = points.size();
    FrontAssignment fa;
    fa.front.assign(n, 0);
    if (n == 0) return fa;
    const std::size_t m = points[0].size();
    for (const auto& row : points) {
        if (row.size() != m) throw LengthMismatchError(row.size(), m);
    }

    auto dominates = [m](const std::vector<double>& a, const std::vector<double>& b) {
        bool strictly = false;
        for (std::size_t k = 0; k < m; ++k) {
            if (a[k] > b[k]) return false;
            if (a[k] < b[k]) strictly = true;
        }
        return strictly;
    };

    std::vector<int> domination_count(n, 0);
    std::vector<std::vector<std::size_t>> dominated_by(n);
    std::vector<std::size_t> current;
    for (std::size_t p = 0; p < n; ++p) {
        for (std::size_t q = 0; q < n; ++q) {
            if (p == q) continue;
            if (dominates(points[p], points[q])) {
                dominated_by[p].push_back(q);
            } else if (dominates(points[q], points[p])) {
                ++domination_count[p];
            }
        }
        if (domination_count[p] == 0) {
            fa.front[p] = 0;
            current.push_back(p);
        }
    }
    int level = 0;
    while (!current.empty()) {
        std::vector<std::size_t> next;
        for (const std::size_t p : current) {
            for (const std::size_t q : dominated_by[p]) {
                if (--domination_count[q] == 0) {
                    fa.front[q] = level + 1;
                    next.push_back(q);
                }
            }
        }
        ++level;
        current = std::move(next);
    }
    fa.n_fronts = level;
    return fa;
}

Ranking induced_ranking(const Formulation& f, const std::vector<TestInstance>& instances,
                        const EvalOptions& opts, std::string ranking_id) {
    f.validate();
    if (instances.empty()) throw TooFewInstancesError("cannot rank zero instances");

    const std::size_t n = instances.size();
    std::vector<Feasibility> feas(n);
    std::vector<std::size_t> feasible_rows;
    for (std::size_t i = 0; i < n; ++i) {
        feas[i] = feasibility(f, instances[i], opts);
        if (feas[i].feasible) feasible_rows.push_back(i);
    }

    // Non-domination is assessed among feasible instances only; infeasible
    // instances are ordered purely by how badly they violate.
    Matrix feasible_points;
    feasible_points.reserve(feasible_rows.size());
    for (const std::size_t i : feasible_rows) {
        feasible_points.push_back(objective_values(f, instances[i], opts));
    }
    const FrontAssignment fa = non_dominated_fronts(feasible_points);

    using Key = std::tuple<int, int, double>;  // (infeasible flag, front, violation)
    std::vector<Key> keys(n);
    for (std::size_t i = 0; i < n; ++i) {
        keys[i] = Key{1, 0, feas[i].violation};
    }
    for (std::size_t j = 0; j < feasible_rows.size(); ++j) {
        keys[feasible_rows[j]] = Key{0, fa.front[j], 0.0};
    }

    Ranking r;
    r.id = std::move(ranking_id);
    r.instance_ids.reserve(n);
    for (const TestInstance& inst : instances) r.instance_ids.push_back(inst.id);
    r.ranks = fractional_ranks(keys);
    r.validate();
    return r;
}

}  // namespace apf
