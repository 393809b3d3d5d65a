#pragma once

#include <string>
#include <variant>
#include <vector>

#include "apf/errors.hpp"

namespace apf {

// Closed subregion [lo, hi] of the evaluation variable (e.g. a frequency band).
struct Band {
    double lo = 0.0;
    double hi = 0.0;

    void validate() const;
    double width() const { return hi - lo; }
    bool contains(double z) const { return z >= lo && z <= hi; }

    friend bool operator==(const Band&, const Band&) = default;
};

// Performance metric identifier, e.g. {"radiation_efficiency", "dB"}.
struct MetricId {
    std::string name;
    std::string units;

    void validate() const;  // name matches [a-z][a-z0-9_]*

    friend bool operator==(const MetricId&, const MetricId&) = default;
};

bool is_metric_identifier(const std::string& s);

enum class Comparator { GE, LE };
enum class AggOp { MIN, MAX, MEAN };
enum class Direction { MAXIMIZE, MINIMIZE };

const char* to_string(Comparator c);
const char* to_string(AggOp op);
const char* to_string(Direction d);

Comparator comparator_from_string(const std::string& s);
AggOp agg_from_string(const std::string& s);
Direction direction_from_string(const std::string& s);

// Threshold constraint on a band aggregate, e.g. min >= -4.49.
struct ThresholdIntent {
    Comparator cmp = Comparator::GE;
    double value = 0.0;
    AggOp agg = AggOp::MIN;

    friend bool operator==(const ThresholdIntent&, const ThresholdIntent&) = default;
};

// Optimization goal on a band aggregate, e.g. maximize the mean.
struct OptimizeIntent {
    Direction dir = Direction::MAXIMIZE;
    AggOp agg = AggOp::MEAN;

    friend bool operator==(const OptimizeIntent&, const OptimizeIntent&) = default;
};

struct DesignIntent {
    std::variant<ThresholdIntent, OptimizeIntent> value;

    bool is_threshold() const { return std::holds_alternative<ThresholdIntent>(value); }
    const ThresholdIntent& threshold() const { return std::get<ThresholdIntent>(value); }
    const OptimizeIntent& optimize() const { return std::get<OptimizeIntent>(value); }

    void validate() const;

    static DesignIntent make_threshold(Comparator cmp, double v, AggOp agg);
    static DesignIntent make_optimize(Direction dir, AggOp agg);

    friend bool operator==(const DesignIntent&, const DesignIntent&) = default;
};

// One design requirement: (band, metric, intent) plus its natural-language text.
struct Requirement {
    Band band;
    MetricId metric;
    DesignIntent intent;
    std::string text;

    void validate() const;

    friend bool operator==(const Requirement&, const Requirement&) = default;
};

struct RequirementSet {
    std::string id;
    std::vector<Requirement> requirements;

    std::size_t size() const { return requirements.size(); }
    void validate() const;  // n >= 1

    friend bool operator==(const RequirementSet&, const RequirementSet&) = default;
};

// Numbered one-per-line rendering used in prompts and SFT inputs.
std::string requirements_text(const RequirementSet& reqs);

struct Sample {
    double z = 0.0;
    double value = 0.0;

    friend bool operator==(const Sample&, const Sample&) = default;
};

// A sampled performance curve for one design solution.
struct TestInstance {
    std::string id;
    std::vector<double> design_params;  // may be empty when unknown
    std::vector<Sample> samples;        // strictly ascending in z, >= 2, finite

    void validate() const;

    friend bool operator==(const TestInstance&, const TestInstance&) = default;
};

}  // namespace apf
