#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "apf/provider.hpp"
#include "apf/ranking.hpp"
#include "apf/scoring.hpp"
#include "apf/synth.hpp"
#include "apf/types.hpp"

namespace apf {

// One (requirement set, formulation) pair flowing through the dataset stages.
// Base records come out of generation; augmented children reference their base
// via base_id and record the tandem permutation that reordered both the
// requirements and the formulation items.
struct DatasetRecord {
    std::string id;
    std::string base_id;  // empty for base records
    RequirementSet requirement_set;
    Formulation formulation;
    std::optional<double> score;
    bool augmented = false;
    std::optional<std::vector<int>> permutation;  // child position j holds base index perm[j]

    void validate() const;
};

// Exported fine-tuning row: instruction + rendered requirements in, canonical
// formulation text out.
struct SftSample {
    std::string instruction;
    std::string input;
    std::string output;
    std::optional<double> score;
    std::string base_id;
    bool augmented = false;
};

// Instruction text for exported rows; bump the version marker when changing it.
extern const char* const kSftInstruction;

struct StageFailure {
    std::string id;     // record/set id the failure belongs to
    std::string error;
};

// Fixed bins of width 0.1 over [-1, 1].
struct ScoreHistogram {
    static constexpr int kBins = 20;
    std::array<std::size_t, kBins> counts{};
    std::size_t total = 0;

    static int bin_of(double score);
    double proportion(int bin) const;
    std::string render_text() const;  // aligned text table
};

struct RunReport {
    std::map<std::string, std::size_t> counts;  // per-stage record counts
    std::vector<StageFailure> failures;
    double retention_rate = 0.0;
    ScoreHistogram histogram;
};

// ---- stages ----------------------------------------------------------------

// One requirement set per source instance, derived from that instance's
// realized band aggregates; deterministic in (insts, spec, seed).
std::vector<RequirementSet> derive_requirements(const std::vector<TestInstance>& insts,
                                                const BandSpec& bands,
                                                const IntentTemplateSpec& spec,
                                                std::uint64_t seed);

// Deterministic per-set choice of evaluation instances from the shared pool.
std::vector<TestInstance> select_instances_for_set(const std::string& set_id,
                                                   const std::vector<TestInstance>& pool,
                                                   std::size_t count, std::uint64_t seed);

struct GenerateResult {
    std::vector<DatasetRecord> records;
    std::vector<StageFailure> failures;
};

// One record per requirement set via generation prompt -> provider -> parse;
// failures are recorded and skipped, never aborting the batch.
GenerateResult generate_base(const std::vector<RequirementSet>& reqsets, Provider& gateway,
                             int max_concurrency = 1);

struct AnnotateResult {
    std::map<std::string, Ranking> rankings;  // keyed by requirement-set id
    std::vector<StageFailure> failures;
};

// Reference ranking per set via annotation prompt; an invalid response is
// retried once, then recorded as a failure.
AnnotateResult annotate_references(const std::vector<RequirementSet>& reqsets,
                                   const std::map<std::string, std::vector<TestInstance>>& insts_per_set,
                                   Provider& gateway, int max_concurrency = 1,
                                   const AnnotationStyle& style = {},
                                   const std::string& expert_example = {});

// Attaches a ranking-consistency score to every record whose set has a
// ranking and instances; unscorable records are reported and dropped.
std::vector<DatasetRecord> score_records(const std::vector<DatasetRecord>& records,
                                         const std::map<std::string, Ranking>& rankings,
                                         const std::map<std::string, std::vector<TestInstance>>& insts_per_set,
                                         std::vector<StageFailure>& failures,
                                         const EvalOptions& opts = {});

// Keeps records with score >= threshold and closes lineage: children of a
// dropped base are dropped too, regardless of their own score.
std::vector<DatasetRecord> select_records(const std::vector<DatasetRecord>& scored,
                                          double threshold);

// Paraphrase-and-permute augmentation: v text variants per requirement,
// l children per record, each child a distinct variant combination with the
// requirement order and formulation items permuted in tandem.
std::vector<DatasetRecord> augment_record(const DatasetRecord& base, int v, int l,
                                          Provider& gateway, std::uint64_t seed,
                                          std::vector<StageFailure>& flags);

std::vector<DatasetRecord> augment_all(const std::vector<DatasetRecord>& records, int v,
                                       int l, Provider& gateway, std::uint64_t seed,
                                       std::vector<StageFailure>& flags,
                                       int max_concurrency = 1);

// Undoes a child's tandem permutation, restoring base item order and names.
Formulation restore_base_order(const Formulation& f, const std::vector<int>& permutation);

// Export rows ordered by record id (duplicates rejected); every output is
// reparsed and compared against the record's formulation before anything is
// returned.
std::vector<SftSample> export_sft(const std::vector<DatasetRecord>& records);

ScoreHistogram report_scores(const std::vector<DatasetRecord>& records);

}  // namespace apf
