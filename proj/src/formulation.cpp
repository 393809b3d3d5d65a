#include "apf/formulation.hpp"

#include <cmath>
#include <utility>

#include "apf/errors.hpp"
#include "apf/util.hpp"

namespace apf {

ExprPtr Expr::agg(AggOp op, MetricId metric, Band band) {
    metric.validate();
    band = Band{canon6(band.lo), canon6(band.hi)};
    band.validate();
    return std::make_shared<const Expr>(Expr{AggNode{op, std::move(metric), band}});
}

ExprPtr Expr::neg(ExprPtr child) {
    if (!child) throw InvariantViolation("negation requires a child expression");
    return std::make_shared<const Expr>(Expr{NegNode{std::move(child)}});
}

ExprPtr Expr::sub(ExprPtr left, ExprPtr right) {
    if (!left || !right) throw InvariantViolation("subtraction requires two child expressions");
    return std::make_shared<const Expr>(Expr{SubNode{std::move(left), std::move(right)}});
}

ExprPtr Expr::constant(double v) {
    if (!std::isfinite(v)) throw NonFiniteError("constant expression value");
    return std::make_shared<const Expr>(Expr{ConstNode{canon6(v)}});
}

int expr_depth(const Expr& e) {
    return std::visit(
        [](const auto& n) -> int {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, AggNode> || std::is_same_v<T, ConstNode>) {
                return 1;
            } else if constexpr (std::is_same_v<T, NegNode>) {
                return 1 + expr_depth(*n.child);
            } else {
                return 1 + std::max(expr_depth(*n.left), expr_depth(*n.right));
            }
        },
        e.node);
}

int count_agg_nodes(const Expr& e) {
    return std::visit(
        [](const auto& n) -> int {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, AggNode>) {
                return 1;
            } else if constexpr (std::is_same_v<T, ConstNode>) {
                return 0;
            } else if constexpr (std::is_same_v<T, NegNode>) {
                return count_agg_nodes(*n.child);
            } else {
                return count_agg_nodes(*n.left) + count_agg_nodes(*n.right);
            }
        },
        e.node);
}

bool expr_equal(const Expr& a, const Expr& b) {
    if (a.node.index() != b.node.index()) return false;
    if (const auto* an = std::get_if<AggNode>(&a.node)) {
        const auto& bn = std::get<AggNode>(b.node);
        return an->op == bn.op && an->metric == bn.metric && an->band == bn.band;
    }
    if (const auto* an = std::get_if<NegNode>(&a.node)) {
        return expr_equal(*an->child, *std::get<NegNode>(b.node).child);
    }
    if (const auto* an = std::get_if<SubNode>(&a.node)) {
        const auto& bn = std::get<SubNode>(b.node);
        return expr_equal(*an->left, *bn.left) && expr_equal(*an->right, *bn.right);
    }
    return std::get<ConstNode>(a.node).value == std::get<ConstNode>(b.node).value;
}

const char* to_string(ItemKind k) {
    return k == ItemKind::OBJECTIVE ? "objective" : "constraint";
}

namespace {

const AggNode* as_agg(const Expr& e) { return std::get_if<AggNode>(&e.node); }
const ConstNode* as_const(const Expr& e) { return std::get_if<ConstNode>(&e.node); }

}  // namespace

void FormulationItem::validate() const {
    if (name.empty()) throw InvariantViolation("formulation item has empty name");
    if (!expr) throw InvariantViolation("formulation item '" + name + "' has no expression");
    if (kind == ItemKind::OBJECTIVE) {
        if (as_agg(*expr)) return;
        if (const auto* neg = std::get_if<NegNode>(&expr->node); neg && as_agg(*neg->child)) return;
        throw InvariantViolation("objective '" + name +
                                 "' must be an aggregate or a negated aggregate");
    }
    const auto* sub = std::get_if<SubNode>(&expr->node);
    if (sub) {
        const bool ge_shape = as_const(*sub->left) && as_agg(*sub->right);
        const bool le_shape = as_agg(*sub->left) && as_const(*sub->right);
        if (ge_shape || le_shape) return;
    }
    throw InvariantViolation("constraint '" + name +
                             "' must be a threshold-vs-aggregate difference");
}

ItemView item_view(const FormulationItem& item) {
    item.validate();
    ItemView v{};
    v.kind = item.kind;
    if (item.kind == ItemKind::OBJECTIVE) {
        if (const auto* a = as_agg(*item.expr)) {
            v.dir = Direction::MINIMIZE;
            v.agg = a->op;
            v.metric = a->metric;
            v.band = a->band;
        } else {
            const auto& neg = std::get<NegNode>(item.expr->node);
            const auto* inner = as_agg(*neg.child);
            v.dir = Direction::MAXIMIZE;
            v.agg = inner->op;
            v.metric = inner->metric;
            v.band = inner->band;
        }
        v.cmp = Comparator::GE;
        v.threshold = 0.0;
        return v;
    }
    const auto& sub = std::get<SubNode>(item.expr->node);
    if (const auto* c = as_const(*sub.left)) {
        const auto* a = as_agg(*sub.right);
        v.cmp = Comparator::GE;
        v.threshold = c->value;
        v.agg = a->op;
        v.metric = a->metric;
        v.band = a->band;
    } else {
        const auto* a = as_agg(*sub.left);
        const auto* rhs = as_const(*sub.right);
        v.cmp = Comparator::LE;
        v.threshold = rhs->value;
        v.agg = a->op;
        v.metric = a->metric;
        v.band = a->band;
    }
    v.dir = Direction::MINIMIZE;
    return v;
}

FormulationItem make_objective(std::string name, Direction dir, AggOp agg,
                               MetricId metric, Band band) {
    ExprPtr body = Expr::agg(agg, std::move(metric), band);
    if (dir == Direction::MAXIMIZE) body = Expr::neg(std::move(body));
    return FormulationItem{ItemKind::OBJECTIVE, std::move(name), std::move(body)};
}

FormulationItem make_constraint(std::string name, AggOp agg, MetricId metric,
                                Band band, Comparator cmp, double threshold) {
    ExprPtr a = Expr::agg(agg, std::move(metric), band);
    ExprPtr t = Expr::constant(threshold);
    ExprPtr residual = cmp == Comparator::GE ? Expr::sub(std::move(t), std::move(a))
                                             : Expr::sub(std::move(a), std::move(t));
    return FormulationItem{ItemKind::CONSTRAINT, std::move(name), std::move(residual)};
}

int Formulation::n_objectives() const {
    int n = 0;
    for (const auto& it : items) n += it.kind == ItemKind::OBJECTIVE ? 1 : 0;
    return n;
}

int Formulation::n_constraints() const {
    return static_cast<int>(items.size()) - n_objectives();
}

void Formulation::validate() const {
    if (items.empty()) throw InvariantViolation("formulation '" + id + "' has no items");
    std::vector<ItemKind> kinds;
    kinds.reserve(items.size());
    for (const auto& it : items) {
        it.validate();
        if (expr_depth(*it.expr) > 8) {
            throw InvariantViolation("item '" + it.name + "' exceeds maximum expression depth");
        }
        if (count_agg_nodes(*it.expr) < 1) {
            throw InvariantViolation("item '" + it.name + "' contains no aggregate");
        }
        kinds.push_back(it.kind);
    }
    const auto expected = canonical_item_names(kinds);
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (items[i].name != expected[i]) {
            throw InvariantViolation("item " + std::to_string(i + 1) + " of '" + id +
                                     "' must be named '" + expected[i] + "', got '" +
                                     items[i].name + "'");
        }
    }
}

bool structurally_equal(const Formulation& a, const Formulation& b) {
    if (a.items.size() != b.items.size()) return false;
    for (std::size_t i = 0; i < a.items.size(); ++i) {
        if (!(a.items[i] == b.items[i])) return false;
    }
    return true;
}

namespace {

std::string print_agg(const AggNode& a) {
    std::string s = to_string(a.op);
    s += '(';
    s += a.metric.name;
    s += " in [";
    s += format_real(a.band.lo);
    s += ", ";
    s += format_real(a.band.hi);
    s += "])";
    return s;
}

}  // namespace

std::string print_item(const FormulationItem& item) {
    const ItemView v = item_view(item);
    std::string line = to_string(v.kind);
    line += ' ';
    if (v.kind == ItemKind::OBJECTIVE) {
        line += to_string(v.dir);
        line += ' ';
        line += print_agg(AggNode{v.agg, v.metric, v.band});
    } else {
        line += print_agg(AggNode{v.agg, v.metric, v.band});
        line += ' ';
        line += to_string(v.cmp);
        line += ' ';
        line += format_real(v.threshold);
    }
    return line;
}

std::string print_formulation(const Formulation& f) {
    std::string out;
    for (const auto& it : f.items) {
        out += print_item(it);
        out += '\n';
    }
    return out;
}

std::vector<std::string> canonical_item_names(const std::vector<ItemKind>& kinds) {
    std::vector<std::string> names;
    names.reserve(kinds.size());
    int obj = 0;
    int con = 0;
    for (ItemKind k : kinds) {
        if (k == ItemKind::OBJECTIVE) {
            names.push_back("obj" + std::to_string(++obj));
        } else {
            names.push_back("c" + std::to_string(++con));
        }
    }
    return names;
}

Formulation compile_requirements(const RequirementSet& reqs) {
    reqs.validate();
    Formulation f;
    f.id = reqs.id;
    std::vector<ItemKind> kinds;
    kinds.reserve(reqs.requirements.size());
    for (const auto& r : reqs.requirements) {
        kinds.push_back(r.intent.is_threshold() ? ItemKind::CONSTRAINT : ItemKind::OBJECTIVE);
    }
    const auto names = canonical_item_names(kinds);
    for (std::size_t i = 0; i < reqs.requirements.size(); ++i) {
        const Requirement& r = reqs.requirements[i];
        if (r.intent.is_threshold()) {
            const ThresholdIntent& t = r.intent.threshold();
            f.items.push_back(
                make_constraint(names[i], t.agg, r.metric, r.band, t.cmp, t.value));
        } else {
            const OptimizeIntent& o = r.intent.optimize();
            f.items.push_back(make_objective(names[i], o.dir, o.agg, r.metric, r.band));
        }
    }
    f.validate();
    return f;
}

}  // namespace apf
