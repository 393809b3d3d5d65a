#pragma once

#include <optional>
#include <string>
#include <vector>

#include "apf/formulation.hpp"
#include "apf/ranking.hpp"
#include "apf/types.hpp"

namespace apf {

enum class SectionTag { TASK, EXPERT_EXAMPLE, INSTANCE_TABLE, REQUIREMENTS_QUERY, RULES };
enum class RequestKind { PARAPHRASE, GENERATION, ANNOTATION };

const char* to_string(SectionTag tag);
const char* to_string(RequestKind kind);

struct PromptSection {
    SectionTag tag;
    std::string text;
};

// Non-rendered context carried alongside the sections. Providers that fake a
// model (see MockProvider) use it to ground their answers; it never reaches
// the wire for real providers.
struct PromptMeta {
    RequestKind kind = RequestKind::GENERATION;
    RequirementSet requirement_set;
    std::vector<std::string> instance_ids;  // annotation prompts only
    int num_versions = 0;                   // paraphrase prompts only
};

struct Prompt {
    std::vector<PromptSection> sections;
    PromptMeta meta;

    // Byte concatenation of the section texts, in order.
    std::string render() const;
};

// Presentation knobs for the annotation prompt; the defaults describe the
// bundled efficiency-curve benchmark.
struct AnnotationStyle {
    std::string expert_role = "an expert antenna systems engineer";
    std::string axis_x = "z";
    std::string axis_y = "efficiency_db";
    std::string data_description =
        "Values are radiation efficiencies in dB over the normalized evaluation variable.";
    std::size_t char_budget = 60000;  // rendered-prompt size cap, in characters
};

Prompt build_paraphrase_prompt(const RequirementSet& reqs, int num_versions);

Prompt build_generation_prompt(const RequirementSet& reqs);

// Sections in order: task, optional one-shot expert example, instance table,
// requirement query (objectives and constraints listed separately), ranking
// rules. Instances are tabulated as JSON objects {"curve": id, "data":
// [[z, value], ...]}.
Prompt build_annotation_prompt(const RequirementSet& reqs,
                               const std::vector<TestInstance>& insts,
                               const std::string& expert_example = {},
                               const AnnotationStyle& style = {});

// The JSON curve table used inside the annotation prompt (exposed for tests
// and for the mock provider, which reads instances back out of it).
std::string render_instance_table(const std::vector<TestInstance>& insts);
std::vector<TestInstance> parse_instance_table(const std::string& json_text);

// Response parsing. All three tolerate leading/trailing prose and markdown
// code fences around the JSON payload, but reject responses containing more
// than one candidate payload as ambiguous.

// JSON array of {requirement_index, kind, name, item}; indices must cover
// 1..n exactly once. Items are re-validated through the grammar parser and
// renamed positionally; the result preserves requirement order and carries
// the requirement set's id.
Formulation parse_generation_response(const std::string& text, const RequirementSet& reqs);

struct AnnotationResult {
    Ranking ranking;
    std::string raw_response;
};

// JSON array of curve identifiers, best first; must be a permutation of ids.
AnnotationResult parse_annotation_response(const std::string& text,
                                           const std::vector<std::string>& ids);

// JSON object {"1": [v1...], "2": [...]}: per-requirement paraphrase lists,
// each with exactly num_versions entries.
std::vector<std::vector<std::string>> parse_paraphrase_response(const std::string& text,
                                                                std::size_t n_requirements,
                                                                int num_versions);

// Salvaging variant of the above: requirements whose entry is missing or
// malformed come back as nullopt instead of failing the whole response.
std::vector<std::optional<std::vector<std::string>>> parse_paraphrase_lenient(
    const std::string& text, std::size_t n_requirements, int num_versions);

}  // namespace apf
