#include "apf/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <random>

#include "apf/errors.hpp"
#include "apf/eval.hpp"
#include "apf/util.hpp"

namespace apf {

const char* to_string(BandRole role) {
    switch (role) {
        case BandRole::LOW_STOPBAND: return "low_stopband";
        case BandRole::LOW_NULL: return "low_null";
        case BandRole::PASSBAND: return "passband";
        case BandRole::HIGH_NULL: return "high_null";
        case BandRole::HIGH_STOPBAND: return "high_stopband";
    }
    return "?";
}

const char* display_name(BandRole role) {
    switch (role) {
        case BandRole::LOW_STOPBAND: return "low stopband";
        case BandRole::LOW_NULL: return "low null";
        case BandRole::PASSBAND: return "passband";
        case BandRole::HIGH_NULL: return "high null";
        case BandRole::HIGH_STOPBAND: return "high stopband";
    }
    return "?";
}

const Band& BandSpec::band(BandRole role) const {
    switch (role) {
        case BandRole::LOW_STOPBAND: return low_stopband;
        case BandRole::LOW_NULL: return low_null;
        case BandRole::PASSBAND: return passband;
        case BandRole::HIGH_NULL: return high_null;
        case BandRole::HIGH_STOPBAND: return high_stopband;
    }
    throw InvariantViolation("unknown band role");
}

void BandSpec::validate() const {
    const std::array<const Band*, 5> ordered = {&low_stopband, &low_null, &passband,
                                                &high_null, &high_stopband};
    for (const Band* b : ordered) b->validate();
    for (std::size_t i = 0; i + 1 < ordered.size(); ++i) {
        if (ordered[i]->hi > ordered[i + 1]->lo) {
            throw InvariantViolation("bands overlap beyond shared endpoints");
        }
    }
}

void DesignParams::validate() const {
    if (x.size() < 5) {
        throw InvariantViolation("design vector needs at least 5 components, got " +
                                 std::to_string(x.size()));
    }
    for (const double v : x) {
        if (!std::isfinite(v)) throw NonFiniteError("design vector component");
    }
}

void SamplingSpec::validate() const {
    if (n_samples < 50) {
        throw InvariantViolation("need at least 50 samples per curve, got " +
                                 std::to_string(n_samples));
    }
    if (!std::isfinite(z_lo) || !std::isfinite(z_hi) || !(z_lo < z_hi)) {
        throw InvariantViolation("sampling range must be a finite ordered interval");
    }
}

namespace {

constexpr double kPi = 3.14159265358979323846;

double logistic(double t) { return 1.0 / (1.0 + std::exp(-t)); }

// Seeded value uniform in [0, 1).
double unit_from_seed(std::uint64_t seed) {
    return static_cast<double>(mix64(seed) >> 11) * 0x1.0p-53;
}

// Physical curve parameters decoded from the design vector.
struct CurveShape {
    double pass_level;     // dB
    double stop_lo_level;  // dB
    double stop_hi_level;  // dB
    double null_lo_depth;  // dB
    double null_hi_depth;  // dB
    double ripple_amp;     // dB
    double ripple_cycles;
    double sharpness;      // logistic transition slope
};

CurveShape decode_shape(const DesignParams& params) {
    auto comp = [&](std::size_t i) {
        const double v = i < params.x.size() ? params.x[i] : 0.5;
        return std::clamp(v, 0.0, 1.0);
    };
    CurveShape s{};
    s.pass_level = -6.0 + 5.0 * comp(0);
    s.stop_lo_level = -35.0 + 30.0 * comp(1);
    s.stop_hi_level = -35.0 + 30.0 * comp(2);
    s.null_lo_depth = -45.0 + 37.0 * comp(3);
    s.null_hi_depth = -45.0 + 37.0 * comp(4);
    s.ripple_amp = 1.5 * comp(5);
    s.ripple_cycles = 2.0 + 8.0 * comp(6);
    s.sharpness = 200.0 + 400.0 * comp(7);
    return s;
}

}  // namespace

TestInstance render_curve(const DesignParams& x, const BandSpec& spec,
                          const SamplingSpec& sampling, std::uint64_t seed,
                          std::string id) {
    x.validate();
    spec.validate();
    sampling.validate();

    const CurveShape s = decode_shape(x);
    // Plateau transitions are centered on the nulls so leakage into the
    // adjacent bands stays small; the dips then carve the nulls out of
    // whatever the blend leaves at their centers.
    const double t1 = 0.5 * (spec.low_null.lo + spec.low_null.hi);
    const double t2 = 0.5 * (spec.high_null.lo + spec.high_null.hi);
    const double sig1 = spec.low_null.width() / 5.0;
    const double sig2 = spec.high_null.width() / 5.0;
    const double phase = 2.0 * kPi * unit_from_seed(seed);

    auto base = [&](double z) {
        const double a = logistic(s.sharpness * (z - t1));
        const double b = logistic(s.sharpness * (z - t2));
        return s.stop_lo_level * (1.0 - a) + s.pass_level * (a - b) + s.stop_hi_level * b;
    };
    const double dip1 = std::max(0.0, base(t1) - s.null_lo_depth);
    const double dip2 = std::max(0.0, base(t2) - s.null_hi_depth);

    TestInstance inst;
    inst.id = id.empty() ? "curve-" + std::to_string(seed) : std::move(id);
    inst.design_params.reserve(x.x.size());
    for (const double v : x.x) inst.design_params.push_back(canon6(std::clamp(v, 0.0, 1.0)));

    const double span = sampling.z_hi - sampling.z_lo;
    inst.samples.reserve(static_cast<std::size_t>(sampling.n_samples));
    for (int i = 0; i < sampling.n_samples; ++i) {
        const double z =
            sampling.z_lo + span * static_cast<double>(i) / static_cast<double>(sampling.n_samples - 1);
        const double pass_weight =
            logistic(s.sharpness * (z - t1)) - logistic(s.sharpness * (z - t2));
        double v = base(z);
        v -= dip1 * std::exp(-(z - t1) * (z - t1) / (2.0 * sig1 * sig1));
        v -= dip2 * std::exp(-(z - t2) * (z - t2) / (2.0 * sig2 * sig2));
        v += s.ripple_amp * std::sin(2.0 * kPi * s.ripple_cycles * (z - sampling.z_lo) / span + phase) *
             pass_weight;
        v = std::clamp(v, -59.9, -0.1);
        inst.samples.push_back(Sample{canon6(z), canon6(v)});
    }
    inst.validate();
    return inst;
}

std::vector<TestInstance> sample_instances(std::size_t count, const BandSpec& spec,
                                           const SamplingSpec& sampling, std::uint64_t seed,
                                           const std::string& id_prefix) {
    std::vector<TestInstance> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        char suffix[24];
        std::snprintf(suffix, sizeof suffix, "%06zu", i + 1);
        const std::string id = id_prefix + suffix;
        std::mt19937_64 gen(substream_seed(seed, id));
        std::uniform_real_distribution<double> uniform(0.0, 1.0);
        DesignParams params;
        params.x.reserve(8);
        for (int j = 0; j < 8; ++j) params.x.push_back(uniform(gen));
        out.push_back(render_curve(params, spec, sampling, substream_seed(seed, id + "#curve"), id));
    }
    return out;
}

void IntentTemplateSpec::validate() const {
    metric.validate();
    if (!(strictness_margin >= 0.0) || !std::isfinite(strictness_margin)) {
        throw InvariantViolation("strictness margin must be a finite non-negative real");
    }
    if (!(threshold_jitter >= 0.0) || !std::isfinite(threshold_jitter)) {
        throw InvariantViolation("threshold jitter must be a finite non-negative real");
    }
    if (templates.empty()) throw EmptyRequirementSetError("intent template list is empty");
    for (const auto& t : templates) {
        if (!std::isfinite(t.offset)) throw NonFiniteError("intent template offset");
    }
}

namespace {

const char* agg_word(AggOp op) {
    switch (op) {
        case AggOp::MIN: return "minimum";
        case AggOp::MAX: return "maximum";
        case AggOp::MEAN: return "mean";
    }
    return "?";
}

std::string band_phrase(BandRole role, const Band& band) {
    std::string s = "the ";
    s += display_name(role);
    s += " from ";
    s += format_real(band.lo);
    s += " to ";
    s += format_real(band.hi);
    return s;
}

Requirement make_objective_requirement(BandRole role, const Band& band, const MetricId& metric,
                                       Direction dir, AggOp agg) {
    Requirement r;
    r.band = band;
    r.metric = metric;
    r.intent = DesignIntent::make_optimize(dir, agg);
    std::string text = dir == Direction::MAXIMIZE ? "Maximize" : "Minimize";
    text += " the ";
    text += agg_word(agg);
    text += " ";
    text += metric.name;
    text += " across ";
    text += band_phrase(role, band);
    text += ".";
    r.text = std::move(text);
    return r;
}

Requirement make_threshold_requirement(BandRole role, const Band& band, const MetricId& metric,
                                       AggOp agg, Comparator cmp, double value) {
    Requirement r;
    r.band = band;
    r.metric = metric;
    r.intent = DesignIntent::make_threshold(cmp, value, agg);
    std::string text = "Keep the ";
    text += agg_word(agg);
    text += " ";
    text += metric.name;
    text += " across ";
    text += band_phrase(role, band);
    text += cmp == Comparator::GE ? " at or above " : " at or below ";
    text += format_real(value);
    if (!metric.units.empty()) {
        text += " ";
        text += metric.units;
    }
    text += ".";
    r.text = std::move(text);
    return r;
}

}  // namespace

IntentTemplateSpec IntentTemplateSpec::default_five_band() {
    IntentTemplateSpec spec;
    spec.templates = {
        IntentTemplate{BandRole::PASSBAND, true, AggOp::MEAN, Direction::MAXIMIZE,
                       Comparator::GE, 0.0},
        IntentTemplate{BandRole::PASSBAND, false, AggOp::MIN, Direction::MAXIMIZE,
                       Comparator::GE, 0.0},
        IntentTemplate{BandRole::LOW_STOPBAND, false, AggOp::MAX, Direction::MAXIMIZE,
                       Comparator::LE, 0.0},
        IntentTemplate{BandRole::HIGH_STOPBAND, false, AggOp::MAX, Direction::MAXIMIZE,
                       Comparator::LE, 0.0},
        IntentTemplate{BandRole::LOW_NULL, false, AggOp::MIN, Direction::MAXIMIZE,
                       Comparator::LE, 0.0},
        IntentTemplate{BandRole::HIGH_NULL, false, AggOp::MIN, Direction::MAXIMIZE,
                       Comparator::LE, 0.0},
    };
    return spec;
}

IntentTemplateSpec IntentTemplateSpec::passband_core() {
    IntentTemplateSpec spec;
    spec.templates = {
        IntentTemplate{BandRole::PASSBAND, true, AggOp::MEAN, Direction::MAXIMIZE,
                       Comparator::GE, 0.0},
        IntentTemplate{BandRole::PASSBAND, false, AggOp::MIN, Direction::MAXIMIZE,
                       Comparator::GE, 0.0},
        IntentTemplate{BandRole::LOW_STOPBAND, false, AggOp::MAX, Direction::MAXIMIZE,
                       Comparator::LE, 0.0},
        IntentTemplate{BandRole::HIGH_NULL, false, AggOp::MIN, Direction::MAXIMIZE,
                       Comparator::LE, 0.0},
    };
    return spec;
}

RequirementSet extract_requirements(const TestInstance& source, const BandSpec& spec,
                                    const IntentTemplateSpec& intent_spec,
                                    std::uint64_t seed) {
    source.validate();
    spec.validate();
    intent_spec.validate();

    std::mt19937_64 gen(mix64(seed));
    std::uniform_real_distribution<double> jitter(-intent_spec.threshold_jitter,
                                                  intent_spec.threshold_jitter);

    RequirementSet rs;
    rs.id = "req-" + source.id;
    for (const IntentTemplate& t : intent_spec.templates) {
        const Band& band = spec.band(t.role);
        const double realized = aggregate_samples(t.agg, band, source);
        if (t.is_objective) {
            rs.requirements.push_back(
                make_objective_requirement(t.role, band, intent_spec.metric, t.dir, t.agg));
            continue;
        }
        const double margin = t.cmp == Comparator::GE ? -intent_spec.strictness_margin
                                                      : intent_spec.strictness_margin;
        double value = realized + t.offset + margin;
        if (intent_spec.threshold_jitter > 0.0) value += jitter(gen);
        rs.requirements.push_back(make_threshold_requirement(t.role, band, intent_spec.metric,
                                                             t.agg, t.cmp, canon6(value)));
    }
    rs.validate();
    return rs;
}

RequirementSet benchmark_requirement_set(const BandSpec& spec) {
    spec.validate();
    const MetricId metric{"radiation_efficiency", "dB"};
    RequirementSet rs;
    rs.id = "benchmark";
    rs.requirements = {
        make_objective_requirement(BandRole::PASSBAND, spec.passband, metric,
                                   Direction::MAXIMIZE, AggOp::MEAN),
        make_threshold_requirement(BandRole::PASSBAND, spec.passband, metric, AggOp::MIN,
                                   Comparator::GE, -4.49),
        make_threshold_requirement(BandRole::LOW_STOPBAND, spec.low_stopband, metric,
                                   AggOp::MAX, Comparator::LE, -4.39),
        make_threshold_requirement(BandRole::HIGH_NULL, spec.high_null, metric, AggOp::MIN,
                                   Comparator::LE, -11.74),
    };
    rs.validate();
    return rs;
}

Ranking oracle_ranking(const RequirementSet& reqs, const std::vector<TestInstance>& insts) {
    if (insts.size() < 2) {
        throw TooFewInstancesError("reference ranking needs at least 2 instances, got " +
                                   std::to_string(insts.size()));
    }
    const Formulation truth = compile_requirements(reqs);
    return induced_ranking(truth, insts, {}, "oracle-" + reqs.id);
}

const char* to_string(CorruptionKind kind) {
    switch (kind) {
        case CorruptionKind::FLIP_COMPARATOR: return "flip_comparator";
        case CorruptionKind::SHIFT_BAND: return "shift_band";
        case CorruptionKind::PERTURB_THRESHOLD: return "perturb_threshold";
        case CorruptionKind::SWAP_AGG: return "swap_agg";
    }
    return "?";
}

CorruptionKind corruption_kind_from_string(const std::string& s) {
    if (s == "flip_comparator") return CorruptionKind::FLIP_COMPARATOR;
    if (s == "shift_band") return CorruptionKind::SHIFT_BAND;
    if (s == "perturb_threshold") return CorruptionKind::PERTURB_THRESHOLD;
    if (s == "swap_agg") return CorruptionKind::SWAP_AGG;
    throw InvariantViolation("unknown corruption kind '" + s + "'");
}

CorruptionSpec CorruptionSpec::flip_comparator() {
    return CorruptionSpec{CorruptionKind::FLIP_COMPARATOR, 0.0};
}
CorruptionSpec CorruptionSpec::shift_band(double delta) {
    return CorruptionSpec{CorruptionKind::SHIFT_BAND, delta};
}
CorruptionSpec CorruptionSpec::perturb_threshold(double factor) {
    return CorruptionSpec{CorruptionKind::PERTURB_THRESHOLD, factor};
}
CorruptionSpec CorruptionSpec::swap_agg() {
    return CorruptionSpec{CorruptionKind::SWAP_AGG, 0.0};
}

CorruptedFormulation corrupt_formulation(const Formulation& f, const CorruptionSpec& spec,
                                         std::uint64_t seed) {
    f.validate();
    if (!std::isfinite(spec.amount)) throw NonFiniteError("corruption amount");

    const bool constraints_only = spec.kind == CorruptionKind::FLIP_COMPARATOR ||
                                  spec.kind == CorruptionKind::PERTURB_THRESHOLD;
    std::vector<std::size_t> eligible;
    for (std::size_t i = 0; i < f.items.size(); ++i) {
        if (!constraints_only || f.items[i].kind == ItemKind::CONSTRAINT) eligible.push_back(i);
    }
    if (eligible.empty()) throw NoEligibleItemError(to_string(spec.kind));
    std::mt19937_64 gen(mix64(seed));
    std::uniform_int_distribution<std::size_t> pick(0, eligible.size() - 1);
    const std::size_t idx = eligible[pick(gen)];

    ItemView v = item_view(f.items[idx]);
    switch (spec.kind) {
        case CorruptionKind::FLIP_COMPARATOR:
            v.cmp = v.cmp == Comparator::GE ? Comparator::LE : Comparator::GE;
            break;
        case CorruptionKind::SHIFT_BAND:
            v.band = Band{v.band.lo + spec.amount, v.band.hi + spec.amount};
            break;
        case CorruptionKind::PERTURB_THRESHOLD:
            v.threshold = v.threshold * (1.0 + spec.amount);
            break;
        case CorruptionKind::SWAP_AGG:
            v.agg = v.agg == AggOp::MIN ? AggOp::MEAN
                                        : (v.agg == AggOp::MEAN ? AggOp::MAX : AggOp::MIN);
            break;
    }

    CorruptedFormulation out;
    out.formulation = f;
    FormulationItem& target = out.formulation.items[idx];
    const std::string before = print_item(target);
    if (target.kind == ItemKind::OBJECTIVE) {
        target = make_objective(target.name, v.dir, v.agg, v.metric, v.band);
    } else {
        target = make_constraint(target.name, v.agg, v.metric, v.band, v.cmp, v.threshold);
    }
    out.formulation.validate();
    out.applied = CorruptionRecord{spec.kind, spec.amount, target.name, before, print_item(target)};
    return out;
}

}  // namespace apf
