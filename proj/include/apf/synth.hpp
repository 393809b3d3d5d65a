#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "apf/formulation.hpp"
#include "apf/ranking.hpp"
#include "apf/types.hpp"

namespace apf {

// Desk-scale stand-in for an expensive field solver: parametric five-band
// efficiency curves in dB with a passband plateau, two spectral nulls and two
// stopbands, plus data-driven requirement extraction, an oracle reference
// ranking, and controlled formulation corruptions for selection tests.

enum class BandRole { LOW_STOPBAND, LOW_NULL, PASSBAND, HIGH_NULL, HIGH_STOPBAND };

const char* to_string(BandRole role);
// Human-readable name used in generated requirement text ("low stopband", ...).
const char* display_name(BandRole role);

struct BandSpec {
    Band low_stopband{0.80, 0.92};
    Band low_null{0.92, 0.95};
    Band passband{0.95, 1.08};
    Band high_null{1.08, 1.12};
    Band high_stopband{1.12, 1.25};

    const Band& band(BandRole role) const;
    void validate() const;  // each band valid; ordered; overlap only at endpoints
};

struct DesignParams {
    std::vector<double> x;  // in [0,1]^d, d >= 5 (components beyond 8 unused)

    void validate() const;
};

struct SamplingSpec {
    int n_samples = 201;
    double z_lo = 0.75;
    double z_hi = 1.25;

    void validate() const;
};

// Deterministic curve synthesis. The design vector controls, in order:
// passband level, low/high stopband levels, low/high null depths, ripple
// amplitude, ripple frequency, transition sharpness (missing components
// default to 0.5; values are clamped to [0,1]). All samples are finite and
// strictly inside (-60, 0) dB.
TestInstance render_curve(const DesignParams& x, const BandSpec& spec,
                          const SamplingSpec& sampling, std::uint64_t seed,
                          std::string id = {});

// `count` instances with independently drawn design vectors; ids are
// `prefix` + zero-padded 1-based index.
std::vector<TestInstance> sample_instances(std::size_t count, const BandSpec& spec,
                                           const SamplingSpec& sampling, std::uint64_t seed,
                                           const std::string& id_prefix = "inst-");

// One requirement extracted per template: either an optimize intent or a
// threshold whose value is the realized aggregate on the source curve plus
// `offset`, nudged by the strictness margin so the source itself satisfies it.
struct IntentTemplate {
    BandRole role = BandRole::PASSBAND;
    bool is_objective = false;
    AggOp agg = AggOp::MEAN;
    Direction dir = Direction::MAXIMIZE;  // objectives
    Comparator cmp = Comparator::GE;      // thresholds
    double offset = 0.0;                  // added to the realized aggregate
};

struct IntentTemplateSpec {
    MetricId metric{"radiation_efficiency", "dB"};
    double strictness_margin = 1e-3;  // keeps zero-offset thresholds strictly satisfied
    double threshold_jitter = 0.0;    // uniform +/- jitter drawn from the seed
    std::vector<IntentTemplate> templates;

    void validate() const;

    // Requirements over all five bands: maximize-mean objective plus min-GE
    // floor on the passband, max-LE caps on both stopbands, min-LE depth
    // requirements on both nulls.
    static IntentTemplateSpec default_five_band();
    // The leaner 1-objective / 3-constraint shape used by the bundled
    // benchmark scenario (passband floor, low stopband cap, high null depth).
    static IntentTemplateSpec passband_core();
};

RequirementSet extract_requirements(const TestInstance& source, const BandSpec& spec,
                                    const IntentTemplateSpec& intent_spec,
                                    std::uint64_t seed);

// The bundled benchmark scenario: maximize mean passband efficiency subject to
// min(passband) >= -4.49, max(low stopband) <= -4.39, min(high null) <= -11.74.
RequirementSet benchmark_requirement_set(const BandSpec& spec = {});

// Compiles the requirements directly to the ground-truth formulation and
// ranks the instances with it; used as the reference wherever a trusted
// annotator would otherwise supply rankings.
Ranking oracle_ranking(const RequirementSet& reqs, const std::vector<TestInstance>& insts);

enum class CorruptionKind { FLIP_COMPARATOR, SHIFT_BAND, PERTURB_THRESHOLD, SWAP_AGG };

const char* to_string(CorruptionKind kind);
CorruptionKind corruption_kind_from_string(const std::string& s);

struct CorruptionSpec {
    CorruptionKind kind = CorruptionKind::FLIP_COMPARATOR;
    // SHIFT_BAND: additive shift of both band edges, in z units.
    // PERTURB_THRESHOLD: relative factor, threshold' = threshold * (1 + amount).
    double amount = 0.0;

    static CorruptionSpec flip_comparator();
    static CorruptionSpec shift_band(double delta = 0.02);
    static CorruptionSpec perturb_threshold(double factor = 0.1);
    static CorruptionSpec swap_agg();
};

struct CorruptionRecord {
    CorruptionKind kind;
    double amount = 0.0;
    std::string item_name;
    std::string before;  // printed item before the mutation
    std::string after;
};

struct CorruptedFormulation {
    Formulation formulation;
    CorruptionRecord applied;
};

// Mutates exactly one uniformly chosen eligible item (constraints for
// comparator/threshold corruptions, any item otherwise).
CorruptedFormulation corrupt_formulation(const Formulation& f, const CorruptionSpec& spec,
                                         std::uint64_t seed);

}  // namespace apf
