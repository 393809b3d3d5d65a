#include "apf/prompt.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <utility>

#include "json.hpp"

#include "apf/errors.hpp"
#include "apf/parser.hpp"
#include "apf/prompt_assets.hpp"
#include "apf/util.hpp"

namespace apf {

using nlohmann::json;

const char* to_string(SectionTag tag) {
    switch (tag) {
        case SectionTag::TASK: return "task";
        case SectionTag::EXPERT_EXAMPLE: return "expert_example";
        case SectionTag::INSTANCE_TABLE: return "instance_table";
        case SectionTag::REQUIREMENTS_QUERY: return "requirements_query";
        case SectionTag::RULES: return "rules";
    }
    return "?";
}

const char* to_string(RequestKind kind) {
    switch (kind) {
        case RequestKind::PARAPHRASE: return "paraphrase";
        case RequestKind::GENERATION: return "generation";
        case RequestKind::ANNOTATION: return "annotation";
    }
    return "?";
}

std::string Prompt::render() const {
    std::string out;
    std::size_t total = 0;
    for (const auto& s : sections) total += s.text.size();
    out.reserve(total);
    for (const auto& s : sections) out += s.text;
    return out;
}

namespace {

// Replaces template tokens left to right; inserted values are emitted
// verbatim and never rescanned, so requirement text containing braces cannot
// corrupt the template.
std::string substitute(std::string_view tmpl,
                       const std::vector<std::pair<std::string_view, std::string>>& subs) {
    std::string out;
    out.reserve(tmpl.size());
    std::size_t i = 0;
    while (i < tmpl.size()) {
        bool matched = false;
        if (tmpl[i] == '{') {
            for (const auto& [token, value] : subs) {
                if (tmpl.substr(i, token.size()) == token) {
                    out += value;
                    i += token.size();
                    matched = true;
                    break;
                }
            }
        }
        if (!matched) {
            out += tmpl[i];
            ++i;
        }
    }
    return out;
}

}  // namespace

Prompt build_paraphrase_prompt(const RequirementSet& reqs, int num_versions) {
    reqs.validate();
    if (num_versions < 1) {
        throw InvariantViolation("paraphrasing needs num_versions >= 1, got " +
                                 std::to_string(num_versions));
    }
    Prompt p;
    p.sections.push_back(PromptSection{
        SectionTag::TASK,
        substitute(assets::k_paraphrase,
                   {{"{num_versions}", std::to_string(num_versions)},
                    {"{requirements_text}", requirements_text(reqs)}})});
    p.meta.kind = RequestKind::PARAPHRASE;
    p.meta.requirement_set = reqs;
    p.meta.num_versions = num_versions;
    return p;
}

Prompt build_generation_prompt(const RequirementSet& reqs) {
    reqs.validate();
    Prompt p;
    p.sections.push_back(PromptSection{
        SectionTag::TASK,
        substitute(assets::k_generation, {{"{requirements_text}", requirements_text(reqs)}})});
    p.meta.kind = RequestKind::GENERATION;
    p.meta.requirement_set = reqs;
    return p;
}

std::string render_instance_table(const std::vector<TestInstance>& insts) {
    json table = json::array();
    for (const TestInstance& inst : insts) {
        json data = json::array();
        for (const Sample& s : inst.samples) data.push_back(json::array({s.z, s.value}));
        table.push_back(json{{"curve", inst.id}, {"data", std::move(data)}});
    }
    return table.dump();
}

std::vector<TestInstance> parse_instance_table(const std::string& json_text) {
    json table = json::parse(json_text, nullptr, false);
    if (table.is_discarded() || !table.is_array()) {
        throw SchemaViolationError("instance table is not a JSON array");
    }
    std::vector<TestInstance> insts;
    insts.reserve(table.size());
    for (const auto& entry : table) {
        if (!entry.is_object() || !entry.contains("curve") || !entry.contains("data") ||
            !entry["curve"].is_string() || !entry["data"].is_array()) {
            throw SchemaViolationError("instance table entry must be {\"curve\", \"data\"}");
        }
        TestInstance inst;
        inst.id = entry["curve"].get<std::string>();
        for (const auto& pair : entry["data"]) {
            if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() ||
                !pair[1].is_number()) {
                throw SchemaViolationError("instance table sample must be a [z, value] pair");
            }
            inst.samples.push_back(Sample{pair[0].get<double>(), pair[1].get<double>()});
        }
        inst.validate();
        insts.push_back(std::move(inst));
    }
    return insts;
}

Prompt build_annotation_prompt(const RequirementSet& reqs,
                               const std::vector<TestInstance>& insts,
                               const std::string& expert_example,
                               const AnnotationStyle& style) {
    reqs.validate();
    if (insts.size() < 2) throw TooFewInstancesError(insts.size());
    for (const auto& inst : insts) inst.validate();

    std::string objectives;
    std::string constraints;
    int n_obj = 0;
    int n_con = 0;
    for (const Requirement& r : reqs.requirements) {
        if (r.intent.is_threshold()) {
            constraints += std::to_string(++n_con);
            constraints += ". ";
            constraints += r.text;
            constraints += '\n';
        } else {
            objectives += std::to_string(++n_obj);
            objectives += ". ";
            objectives += r.text;
            objectives += '\n';
        }
    }
    if (n_obj == 0) objectives = "(none)\n";
    if (n_con == 0) constraints = "(none)\n";

    Prompt p;
    p.sections.push_back(PromptSection{
        SectionTag::TASK,
        substitute(assets::k_annotation_task, {{"{{Expert_Role}}", style.expert_role}})});
    if (!expert_example.empty()) {
        p.sections.push_back(PromptSection{SectionTag::EXPERT_EXAMPLE,
                                           "Few-Shot Example:\n" + expert_example + "\n\n"});
    }
    p.sections.push_back(PromptSection{
        SectionTag::INSTANCE_TABLE,
        substitute(assets::k_annotation_table,
                   {{"{{Axis_X_Name}}", style.axis_x},
                    {"{{Axis_Y_Name}}", style.axis_y},
                    {"{{Data_Description}}", style.data_description},
                    {"{{JSON_Data_of_Curves}}", render_instance_table(insts)}})});
    p.sections.push_back(PromptSection{
        SectionTag::REQUIREMENTS_QUERY,
        substitute(assets::k_annotation_requirements,
                   {{"{{List_of_Objectives}}", objectives},
                    {"{{List_of_Constraints}}", constraints}})});
    p.sections.push_back(PromptSection{SectionTag::RULES, std::string(assets::k_annotation_rules)});

    p.meta.kind = RequestKind::ANNOTATION;
    p.meta.requirement_set = reqs;
    for (const auto& inst : insts) p.meta.instance_ids.push_back(inst.id);

    const std::size_t rendered_size = p.render().size();
    if (rendered_size > style.char_budget) {
        throw PromptBudgetExceededError(rendered_size, style.char_budget);
    }
    return p;
}

namespace {

// Finds every top-level balanced JSON payload delimited by open/close,
// string-aware so brackets inside string values do not count. Arbitrary
// prose and markdown fences around the payload are ignored.
std::vector<std::string> json_payload_candidates(const std::string& text, char open, char close) {
    std::vector<std::string> found;
    std::size_t i = 0;
    while (i < text.size()) {
        if (text[i] != open) {
            ++i;
            continue;
        }
        int depth = 0;
        bool in_string = false;
        bool escaped = false;
        std::size_t end = std::string::npos;
        for (std::size_t j = i; j < text.size(); ++j) {
            const char c = text[j];
            if (in_string) {
                if (escaped) {
                    escaped = false;
                } else if (c == '\\') {
                    escaped = true;
                } else if (c == '"') {
                    in_string = false;
                }
                continue;
            }
            if (c == '"') {
                in_string = true;
            } else if (c == open) {
                ++depth;
            } else if (c == close) {
                if (--depth == 0) {
                    end = j;
                    break;
                }
            }
        }
        if (end == std::string::npos) {
            ++i;
            continue;
        }
        const std::string candidate = text.substr(i, end - i + 1);
        if (json::accept(candidate)) {
            found.push_back(candidate);
            i = end + 1;
        } else {
            ++i;
        }
    }
    return found;
}

json single_payload(const std::string& text, char open, char close, const char* what) {
    const auto candidates = json_payload_candidates(text, open, close);
    if (candidates.empty()) throw NoJsonFoundError(what);
    if (candidates.size() > 1) {
        throw SchemaViolationError(std::string("ambiguous response: ") +
                                   std::to_string(candidates.size()) + " candidate " + what +
                                   "s found");
    }
    return json::parse(candidates.front());
}

}  // namespace

Formulation parse_generation_response(const std::string& text, const RequirementSet& reqs) {
    reqs.validate();
    const std::size_t n = reqs.size();
    const json arr = single_payload(text, '[', ']', "JSON array");

    std::map<int, const json*> by_index;
    for (const auto& el : arr) {
        if (!el.is_object()) throw SchemaViolationError("array element is not an object");
        for (const char* key : {"requirement_index", "kind", "name", "item"}) {
            if (!el.contains(key)) {
                throw SchemaViolationError(std::string("element missing key \"") + key + "\"");
            }
        }
        if (!el["requirement_index"].is_number_integer()) {
            throw SchemaViolationError("requirement_index must be an integer");
        }
        if (!el["kind"].is_string() || !el["name"].is_string() || !el["item"].is_string()) {
            throw SchemaViolationError("kind, name and item must be strings");
        }
        const std::string kind = el["kind"].get<std::string>();
        if (kind != "objective" && kind != "constraint") {
            throw SchemaViolationError("kind must be \"objective\" or \"constraint\", got \"" +
                                       kind + "\"");
        }
        if (el["name"].get<std::string>().empty()) {
            throw SchemaViolationError("name must be nonempty");
        }
        const int idx = el["requirement_index"].get<int>();
        if (idx < 1 || static_cast<std::size_t>(idx) > n) {
            throw IndexCoverageError("requirement_index " + std::to_string(idx) +
                                     " outside 1.." + std::to_string(n));
        }
        if (!by_index.emplace(idx, &el).second) {
            throw IndexCoverageError("duplicate requirement_index " + std::to_string(idx));
        }
    }
    if (by_index.size() != n) {
        std::string missing;
        for (std::size_t k = 1; k <= n; ++k) {
            if (!by_index.count(static_cast<int>(k))) {
                if (!missing.empty()) missing += ", ";
                missing += std::to_string(k);
            }
        }
        throw IndexCoverageError("missing requirement_index " + missing);
    }

    // First pass discovers each item's kind so positional names can be
    // assigned, second pass parses with the final names.
    std::vector<std::string> lines;
    std::vector<ItemKind> kinds;
    lines.reserve(n);
    kinds.reserve(n);
    for (const auto& [idx, el] : by_index) {
        const std::string line = (*el)["item"].get<std::string>();
        FormulationItem probe;
        try {
            probe = parse_item(line, "probe");
        } catch (const SyntaxError& e) {
            throw SchemaViolationError("item for requirement_index " + std::to_string(idx) +
                                       " is not grammatical: " + e.what());
        }
        const std::string declared = (*el)["kind"].get<std::string>();
        const bool is_obj = probe.kind == ItemKind::OBJECTIVE;
        if (is_obj != (declared == "objective")) {
            throw SchemaViolationError("requirement_index " + std::to_string(idx) +
                                       " declares kind \"" + declared +
                                       "\" but the item parses as its opposite");
        }
        lines.push_back(line);
        kinds.push_back(probe.kind);
    }
    const auto names = canonical_item_names(kinds);

    Formulation f;
    f.id = reqs.id;
    for (std::size_t k = 0; k < n; ++k) {
        f.items.push_back(parse_item(lines[k], names[k]));
    }
    f.validate();
    return f;
}

AnnotationResult parse_annotation_response(const std::string& text,
                                           const std::vector<std::string>& ids) {
    const json arr = single_payload(text, '[', ']', "JSON array");
    std::vector<std::string> ordered;
    ordered.reserve(arr.size());
    for (const auto& el : arr) {
        if (!el.is_string()) {
            throw SchemaViolationError("ranking array must contain only curve identifiers");
        }
        ordered.push_back(el.get<std::string>());
    }

    std::multiset<std::string> want(ids.begin(), ids.end());
    std::multiset<std::string> got(ordered.begin(), ordered.end());
    if (want != got) {
        std::vector<std::string> missing;
        std::vector<std::string> extra;
        for (const auto& id : want) {
            if (got.count(id) < want.count(id)) missing.push_back(id);
        }
        for (const auto& id : got) {
            if (want.count(id) < got.count(id)) extra.push_back(id);
        }
        // De-duplicate the report lists (multiset iteration repeats values).
        missing.erase(std::unique(missing.begin(), missing.end()), missing.end());
        extra.erase(std::unique(extra.begin(), extra.end()), extra.end());
        throw NotAPermutationError(std::move(missing), std::move(extra));
    }

    AnnotationResult result;
    result.ranking = ranking_from_order("annotation", std::move(ordered));
    result.raw_response = text;
    return result;
}

std::vector<std::vector<std::string>> parse_paraphrase_response(const std::string& text,
                                                                std::size_t n_requirements,
                                                                int num_versions) {
    const json obj = single_payload(text, '{', '}', "JSON object");
    if (!obj.is_object()) throw SchemaViolationError("paraphrase payload is not a JSON object");
    if (obj.size() != n_requirements) {
        throw SchemaViolationError("paraphrase object has " + std::to_string(obj.size()) +
                                   " keys, expected " + std::to_string(n_requirements));
    }
    std::vector<std::vector<std::string>> out;
    out.reserve(n_requirements);
    for (std::size_t k = 1; k <= n_requirements; ++k) {
        const std::string key = std::to_string(k);
        if (!obj.contains(key)) {
            throw SchemaViolationError("paraphrase object missing key \"" + key + "\"");
        }
        const json& versions = obj[key];
        if (!versions.is_array() || versions.size() != static_cast<std::size_t>(num_versions)) {
            throw SchemaViolationError("key \"" + key + "\" must hold exactly " +
                                       std::to_string(num_versions) + " strings");
        }
        std::vector<std::string> list;
        list.reserve(versions.size());
        for (const auto& v : versions) {
            if (!v.is_string() || v.get<std::string>().empty()) {
                throw SchemaViolationError("paraphrase for requirement " + key +
                                           " must be a nonempty string");
            }
            list.push_back(v.get<std::string>());
        }
        out.push_back(std::move(list));
    }
    return out;
}

std::vector<std::optional<std::vector<std::string>>> parse_paraphrase_lenient(
    const std::string& text, std::size_t n_requirements, int num_versions) {
    std::vector<std::optional<std::vector<std::string>>> out(n_requirements);
    json obj;
    try {
        obj = single_payload(text, '{', '}', "JSON object");
    } catch (const Error&) {
        return out;
    }
    if (!obj.is_object()) return out;
    for (std::size_t k = 1; k <= n_requirements; ++k) {
        const std::string key = std::to_string(k);
        if (!obj.contains(key)) continue;
        const json& versions = obj[key];
        if (!versions.is_array() || versions.size() != static_cast<std::size_t>(num_versions)) {
            continue;
        }
        std::vector<std::string> list;
        list.reserve(versions.size());
        bool ok = true;
        for (const auto& v : versions) {
            if (!v.is_string() || v.get<std::string>().empty()) {
                ok = false;
                break;
            }
            list.push_back(v.get<std::string>());
        }
        if (ok) out[k - 1] = std::move(list);
    }
    return out;
}

}  // namespace apf
