#include "apf/types.hpp"

#include <cmath>

namespace apf {

void Band::validate() const {
    if (!std::isfinite(lo) || !std::isfinite(hi))
        throw InvariantViolation("band bounds must be finite");
    if (!(lo < hi))
        throw InvariantViolation("band requires lo < hi, got [" +
                                 std::to_string(lo) + ", " + std::to_string(hi) + "]");
}

bool is_metric_identifier(const std::string& s) {
    if (s.empty()) return false;
    if (s[0] < 'a' || s[0] > 'z') return false;
    for (char c : s) {
        const bool ok = (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
        if (!ok) return false;
    }
    return true;
}

void MetricId::validate() const {
    if (!is_metric_identifier(name))
        throw InvariantViolation("metric name must match [a-z][a-z0-9_]*, got '" + name + "'");
}

const char* to_string(Comparator c) { return c == Comparator::GE ? ">=" : "<="; }

const char* to_string(AggOp op) {
    switch (op) {
        case AggOp::MIN: return "min";
        case AggOp::MAX: return "max";
        default: return "mean";
    }
}

const char* to_string(Direction d) {
    return d == Direction::MAXIMIZE ? "maximize" : "minimize";
}

Comparator comparator_from_string(const std::string& s) {
    if (s == ">=") return Comparator::GE;
    if (s == "<=") return Comparator::LE;
    throw InvariantViolation("unknown comparator '" + s + "'");
}

AggOp agg_from_string(const std::string& s) {
    if (s == "min") return AggOp::MIN;
    if (s == "max") return AggOp::MAX;
    if (s == "mean") return AggOp::MEAN;
    throw InvariantViolation("unknown aggregation '" + s + "'");
}

Direction direction_from_string(const std::string& s) {
    if (s == "maximize") return Direction::MAXIMIZE;
    if (s == "minimize") return Direction::MINIMIZE;
    throw InvariantViolation("unknown direction '" + s + "'");
}

void DesignIntent::validate() const {
    if (is_threshold() && !std::isfinite(threshold().value))
        throw InvariantViolation("threshold value must be finite");
}

DesignIntent DesignIntent::make_threshold(Comparator cmp, double v, AggOp agg) {
    DesignIntent d;
    d.value = ThresholdIntent{cmp, v, agg};
    d.validate();
    return d;
}

DesignIntent DesignIntent::make_optimize(Direction dir, AggOp agg) {
    DesignIntent d;
    d.value = OptimizeIntent{dir, agg};
    return d;
}

void Requirement::validate() const {
    band.validate();
    metric.validate();
    intent.validate();
    if (text.empty()) throw InvariantViolation("requirement text must be nonempty");
}

void RequirementSet::validate() const {
    if (requirements.empty())
        throw EmptyRequirementSetError("requirement set '" + id + "' must contain >= 1 requirement");
    for (const auto& r : requirements) r.validate();
}

std::string requirements_text(const RequirementSet& reqs) {
    std::string out;
    for (std::size_t i = 0; i < reqs.requirements.size(); ++i) {
        out += std::to_string(i + 1);
        out += ". ";
        out += reqs.requirements[i].text;
        out += '\n';
    }
    return out;
}

void TestInstance::validate() const {
    if (id.empty()) throw InvariantViolation("instance id must be nonempty");
    if (samples.size() < 2)
        throw InvariantViolation("instance '" + id + "' needs >= 2 samples");
    double prev_z = -std::numeric_limits<double>::infinity();
    for (const auto& s : samples) {
        if (!std::isfinite(s.z) || !std::isfinite(s.value))
            throw InvariantViolation("instance '" + id + "' has non-finite sample");
        if (!(s.z > prev_z))
            throw InvariantViolation("instance '" + id + "' samples must be strictly ascending in z");
        prev_z = s.z;
    }
    for (double p : design_params) {
        if (!std::isfinite(p))
            throw InvariantViolation("instance '" + id + "' has non-finite design param");
    }
}

}  // namespace apf
