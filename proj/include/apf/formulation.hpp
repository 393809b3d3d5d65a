#pragma once

#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "apf/types.hpp"

namespace apf {

// Declarative expression IR. Evaluation is defined over arbitrary trees, but
// formulation items are restricted to the shapes the surface grammar can
// express (see FormulationItem::validate).
struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct AggNode {
    AggOp op = AggOp::MEAN;
    MetricId metric;
    Band band;
};

struct NegNode {
    ExprPtr child;
};

struct SubNode {
    ExprPtr left;
    ExprPtr right;
};

struct ConstNode {
    double value = 0.0;
};

struct Expr {
    std::variant<AggNode, NegNode, SubNode, ConstNode> node;

    // Factories canonicalize reals to the 6-significant-digit grid so that
    // every constructed formulation round-trips through its printed form.
    static ExprPtr agg(AggOp op, MetricId metric, Band band);
    static ExprPtr neg(ExprPtr child);
    static ExprPtr sub(ExprPtr left, ExprPtr right);
    static ExprPtr constant(double v);
};

int expr_depth(const Expr& e);
int count_agg_nodes(const Expr& e);
bool expr_equal(const Expr& a, const Expr& b);

enum class ItemKind { OBJECTIVE, CONSTRAINT };

const char* to_string(ItemKind k);

// One objective or constraint. Objective values are minimized; a constraint
// residual is satisfied iff it evaluates < 0.
struct FormulationItem {
    ItemKind kind = ItemKind::OBJECTIVE;
    std::string name;
    ExprPtr expr;

    void validate() const;

    friend bool operator==(const FormulationItem& a, const FormulationItem& b) {
        return a.kind == b.kind && a.name == b.name && expr_equal(*a.expr, *b.expr);
    }
};

// Decomposed grammar-level view of a canonical item.
struct ItemView {
    ItemKind kind;
    Direction dir;       // objectives only
    AggOp agg;
    MetricId metric;
    Band band;
    Comparator cmp;      // constraints only
    double threshold;    // constraints only
};

ItemView item_view(const FormulationItem& item);

FormulationItem make_objective(std::string name, Direction dir, AggOp agg,
                               MetricId metric, Band band);
FormulationItem make_constraint(std::string name, AggOp agg, MetricId metric,
                                Band band, Comparator cmp, double threshold);

struct Formulation {
    std::string id;
    std::vector<FormulationItem> items;

    int n_objectives() const;
    int n_constraints() const;
    void validate() const;
};

// Item-wise structural equality; ids are bookkeeping and not compared.
bool structurally_equal(const Formulation& a, const Formulation& b);

// Canonical text: one grammar line per item, fixed spacing, 6-significant-digit
// reals, trailing newline. Stable under parse -> print.
std::string print_formulation(const Formulation& f);
std::string print_item(const FormulationItem& item);

// Item names are positional: objectives obj1, obj2, ...; constraints c1, c2, ...
std::vector<std::string> canonical_item_names(const std::vector<ItemKind>& kinds);

// Direct requirement -> formulation compilation (no language model involved):
// optimize intents become objectives (maximize compiles to the negated
// aggregate), threshold intents become residual constraints.
Formulation compile_requirements(const RequirementSet& reqs);

}  // namespace apf
