#include "apf/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "apf/errors.hpp"

namespace apf {

namespace {

// Pairs up the two rank vectors by instance id; both rankings must cover the
// same id set.
void aligned_ranks(const Ranking& a, const Ranking& b, std::vector<double>& ra,
                   std::vector<double>& rb) {
    a.validate();
    b.validate();
    if (a.size() != b.size()) {
        throw IdMismatchError("rankings '" + a.id + "' and '" + b.id +
                              "' cover different numbers of instances");
    }
    std::unordered_map<std::string, double> rank_of;
    rank_of.reserve(b.size());
    for (std::size_t i = 0; i < b.size(); ++i) rank_of.emplace(b.instance_ids[i], b.ranks[i]);
    ra.clear();
    rb.clear();
    ra.reserve(a.size());
    rb.reserve(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        const auto it = rank_of.find(a.instance_ids[i]);
        if (it == rank_of.end()) {
            throw IdMismatchError("instance '" + a.instance_ids[i] + "' of ranking '" + a.id +
                                  "' is missing from ranking '" + b.id + "'");
        }
        ra.push_back(a.ranks[i]);
        rb.push_back(it->second);
    }
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    if (n < 2) throw DegenerateRankingError("need at least two instances to correlate");
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxy = 0.0;
    double sxx = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) {
        throw DegenerateRankingError("constant rank vector has no defined correlation");
    }
    const double rho = sxy / std::sqrt(sxx * syy);
    return std::clamp(rho, -1.0, 1.0);
}

}  // namespace

double spearman(const Ranking& a, const Ranking& b) {
    std::vector<double> ra;
    std::vector<double> rb;
    aligned_ranks(a, b, ra, rb);
    return pearson(ra, rb);
}

QualityScore quality_score(const Formulation& f, const std::vector<TestInstance>& insts,
                           const Ranking& reference, const EvalOptions& opts) {
    const Ranking induced = induced_ranking(f, insts, opts, f.id + ":induced");
    QualityScore qs;
    qs.value = spearman(induced, reference);
    qs.formulation_id = f.id;
    qs.reference_ranking_id = reference.id;
    return qs;
}

double alignment_obj(const Formulation& f, const std::vector<TestInstance>& insts,
                     const Ranking& ground_truth, const EvalOptions& opts) {
    f.validate();
    if (f.n_objectives() == 0) {
        throw NoObjectivesError("objective alignment of '" + f.id + "'");
    }
    std::vector<std::string> ids;
    ids.reserve(insts.size());
    for (const auto& inst : insts) ids.push_back(inst.id);

    double total = 0.0;
    int n1 = 0;
    for (const auto& item : f.items) {
        if (item.kind != ItemKind::OBJECTIVE) continue;
        std::vector<double> values;
        values.reserve(insts.size());
        for (const auto& inst : insts) values.push_back(evaluate_item(item, inst, opts));
        Ranking by_obj;
        by_obj.id = f.id + ":" + item.name;
        by_obj.instance_ids = ids;
        by_obj.ranks = fractional_ranks(values);
        total += spearman(by_obj, ground_truth);
        ++n1;
    }
    return total / static_cast<double>(n1);
}

double alignment_con(const Formulation& f, const std::vector<TestInstance>& insts,
                     const std::vector<bool>& ground_truth_feasible,
                     const EvalOptions& opts) {
    f.validate();
    if (f.n_constraints() == 0) {
        throw NoConstraintsError("constraint alignment of '" + f.id + "'");
    }
    if (ground_truth_feasible.size() != insts.size()) {
        throw LengthMismatchError(ground_truth_feasible.size(), insts.size());
    }
    if (insts.empty()) throw TooFewInstancesError("constraint alignment needs instances");

    const double m = static_cast<double>(insts.size());
    double total = 0.0;
    int n2 = 0;
    for (const auto& item : f.items) {
        if (item.kind != ItemKind::CONSTRAINT) continue;
        double l1 = 0.0;
        for (std::size_t i = 0; i < insts.size(); ++i) {
            const double g = evaluate_item(item, insts[i], opts);
            const bool predicted = g < opts.feasibility_tol;
            if (predicted != static_cast<bool>(ground_truth_feasible[i])) l1 += 1.0;
        }
        total += 1.0 - l1 / m;
        ++n2;
    }
    return total / static_cast<double>(n2);
}

AlignmentReport alignment_total(double a_obj, double a_con, double alpha) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw AlphaOutOfRangeError(alpha);
    AlignmentReport r;
    r.a_obj = a_obj;
    r.a_con = a_con;
    r.alpha = alpha;
    r.a_total = alpha * a_obj + (1.0 - alpha) * a_con;
    return r;
}

AlignmentReport evaluate_alignment(const Formulation& f,
                                   const std::vector<TestInstance>& insts,
                                   const Ranking& ground_truth,
                                   const std::vector<bool>& ground_truth_feasible,
                                   double alpha, const EvalOptions& opts) {
    AlignmentReport r = alignment_total(alignment_obj(f, insts, ground_truth, opts),
                                        alignment_con(f, insts, ground_truth_feasible, opts),
                                        alpha);

    std::vector<std::string> ids;
    ids.reserve(insts.size());
    for (const auto& inst : insts) ids.push_back(inst.id);
    for (const auto& item : f.items) {
        ItemAlignment ia;
        ia.name = item.name;
        ia.kind = item.kind;
        if (item.kind == ItemKind::OBJECTIVE) {
            std::vector<double> values;
            values.reserve(insts.size());
            for (const auto& inst : insts) values.push_back(evaluate_item(item, inst, opts));
            Ranking by_obj;
            by_obj.id = f.id + ":" + item.name;
            by_obj.instance_ids = ids;
            by_obj.ranks = fractional_ranks(values);
            ia.value = spearman(by_obj, ground_truth);
        } else {
            double l1 = 0.0;
            for (std::size_t i = 0; i < insts.size(); ++i) {
                const double g = evaluate_item(item, insts[i], opts);
                const bool predicted = g < opts.feasibility_tol;
                if (predicted != static_cast<bool>(ground_truth_feasible[i])) l1 += 1.0;
            }
            ia.value = 1.0 - l1 / static_cast<double>(insts.size());
        }
        r.per_item.push_back(std::move(ia));
    }
    return r;
}

}  // namespace apf
