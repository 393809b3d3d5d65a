#include "apf/serialize.hpp"

#include <fstream>

#include "apf/errors.hpp"
#include "apf/parser.hpp"

namespace apf {

using nlohmann::json;

void to_json(json& j, const Band& v) { j = json{{"lo", v.lo}, {"hi", v.hi}}; }

void from_json(const json& j, Band& v) {
    j.at("lo").get_to(v.lo);
    j.at("hi").get_to(v.hi);
    v.validate();
}

void to_json(json& j, const MetricId& v) { j = json{{"name", v.name}, {"units", v.units}}; }

void from_json(const json& j, MetricId& v) {
    j.at("name").get_to(v.name);
    j.at("units").get_to(v.units);
    v.validate();
}

void to_json(json& j, const DesignIntent& v) {
    if (v.is_threshold()) {
        const ThresholdIntent& t = v.threshold();
        j = json{{"type", "threshold"},
                 {"cmp", to_string(t.cmp)},
                 {"value", t.value},
                 {"agg", to_string(t.agg)}};
    } else {
        const OptimizeIntent& o = v.optimize();
        j = json{{"type", "optimize"}, {"dir", to_string(o.dir)}, {"agg", to_string(o.agg)}};
    }
}

void from_json(const json& j, DesignIntent& v) {
    const std::string type = j.at("type").get<std::string>();
    if (type == "threshold") {
        v = DesignIntent::make_threshold(
            comparator_from_string(j.at("cmp").get<std::string>()),
            j.at("value").get<double>(), agg_from_string(j.at("agg").get<std::string>()));
    } else if (type == "optimize") {
        v = DesignIntent::make_optimize(
            direction_from_string(j.at("dir").get<std::string>()),
            agg_from_string(j.at("agg").get<std::string>()));
    } else {
        throw SchemaViolationError("unknown intent type '" + type + "'");
    }
}

void to_json(json& j, const Requirement& v) {
    j = json{{"band", v.band}, {"metric", v.metric}, {"intent", v.intent}, {"text", v.text}};
}

void from_json(const json& j, Requirement& v) {
    j.at("band").get_to(v.band);
    j.at("metric").get_to(v.metric);
    j.at("intent").get_to(v.intent);
    j.at("text").get_to(v.text);
    v.validate();
}

void to_json(json& j, const RequirementSet& v) {
    j = json{{"id", v.id}, {"requirements", v.requirements}};
}

void from_json(const json& j, RequirementSet& v) {
    j.at("id").get_to(v.id);
    j.at("requirements").get_to(v.requirements);
    v.validate();
}

void to_json(json& j, const TestInstance& v) {
    json samples = json::array();
    for (const Sample& s : v.samples) samples.push_back(json::array({s.z, s.value}));
    j = json{{"id", v.id}, {"design_params", v.design_params}, {"samples", std::move(samples)}};
}

void from_json(const json& j, TestInstance& v) {
    j.at("id").get_to(v.id);
    j.at("design_params").get_to(v.design_params);
    v.samples.clear();
    for (const auto& pair : j.at("samples")) {
        if (!pair.is_array() || pair.size() != 2) {
            throw SchemaViolationError("instance sample must be a [z, value] pair");
        }
        v.samples.push_back(Sample{pair[0].get<double>(), pair[1].get<double>()});
    }
    v.validate();
}

void to_json(json& j, const Formulation& v) {
    j = json{{"id", v.id}, {"text", print_formulation(v)}};
}

void from_json(const json& j, Formulation& v) {
    v = parse_formulation(j.at("text").get<std::string>(), j.at("id").get<std::string>());
}

void to_json(json& j, const Ranking& v) {
    j = json{{"id", v.id}, {"instance_ids", v.instance_ids}, {"ranks", v.ranks}};
}

void from_json(const json& j, Ranking& v) {
    j.at("id").get_to(v.id);
    j.at("instance_ids").get_to(v.instance_ids);
    j.at("ranks").get_to(v.ranks);
    v.validate();
}

void to_json(json& j, const QualityScore& v) {
    j = json{{"value", v.value},
             {"formulation_id", v.formulation_id},
             {"reference_ranking_id", v.reference_ranking_id}};
}

void to_json(json& j, const ItemAlignment& v) {
    j = json{{"name", v.name}, {"kind", to_string(v.kind)}, {"value", v.value}};
}

void to_json(json& j, const AlignmentReport& v) {
    j = json{{"a_obj", v.a_obj},
             {"a_con", v.a_con},
             {"a_total", v.a_total},
             {"alpha", v.alpha},
             {"per_item", v.per_item}};
}

void to_json(json& j, const DatasetRecord& v) {
    j = json{{"id", v.id},
             {"base_id", v.base_id},
             {"requirement_set", v.requirement_set},
             {"formulation", v.formulation},
             {"score", v.score ? json(*v.score) : json(nullptr)},
             {"augmented", v.augmented},
             {"permutation", v.permutation ? json(*v.permutation) : json(nullptr)}};
}

void from_json(const json& j, DatasetRecord& v) {
    j.at("id").get_to(v.id);
    j.at("base_id").get_to(v.base_id);
    j.at("requirement_set").get_to(v.requirement_set);
    j.at("formulation").get_to(v.formulation);
    if (j.at("score").is_null()) {
        v.score.reset();
    } else {
        v.score = j.at("score").get<double>();
    }
    j.at("augmented").get_to(v.augmented);
    if (j.at("permutation").is_null()) {
        v.permutation.reset();
    } else {
        v.permutation = j.at("permutation").get<std::vector<int>>();
    }
    v.validate();
}

void to_json(json& j, const SftSample& v) {
    j = json{{"instruction", v.instruction},
             {"input", v.input},
             {"output", v.output},
             {"meta",
              json{{"score", v.score ? json(*v.score) : json(nullptr)},
                   {"base_id", v.base_id},
                   {"augmented", v.augmented}}}};
}

void from_json(const json& j, SftSample& v) {
    j.at("instruction").get_to(v.instruction);
    j.at("input").get_to(v.input);
    j.at("output").get_to(v.output);
    const json& meta = j.at("meta");
    if (meta.at("score").is_null()) {
        v.score.reset();
    } else {
        v.score = meta.at("score").get<double>();
    }
    meta.at("base_id").get_to(v.base_id);
    meta.at("augmented").get_to(v.augmented);
}

void to_json(json& j, const StageFailure& v) {
    j = json{{"id", v.id}, {"error", v.error}};
}

void to_json(json& j, const ScoreHistogram& v) {
    json bins = json::array();
    for (int b = 0; b < ScoreHistogram::kBins; ++b) {
        bins.push_back(json{{"lo", (b - 10) / 10.0},
                            {"hi", (b - 9) / 10.0},
                            {"count", v.counts[static_cast<std::size_t>(b)]},
                            {"proportion", v.proportion(b)}});
    }
    j = json{{"total", v.total}, {"bins", std::move(bins)}};
}

void to_json(json& j, const RunReport& v) {
    j = json{{"counts", v.counts},
             {"failures", v.failures},
             {"retention_rate", v.retention_rate},
             {"histogram", v.histogram}};
}

std::vector<json> read_jsonl(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string() + " for reading");
    std::vector<json> rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json row = json::parse(line, nullptr, false);
        if (row.is_discarded()) {
            throw IoError(path.string() + ":" + std::to_string(line_no) + ": malformed JSON");
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

void write_jsonl(const std::filesystem::path& path, const std::vector<json>& rows) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
    }
    const std::filesystem::path partial = path.string() + ".partial";
    {
        std::ofstream out(partial, std::ios::trunc);
        if (!out) throw IoError("cannot open " + partial.string() + " for writing");
        for (const json& row : rows) out << row.dump() << '\n';
        out.flush();
        if (!out) throw IoError("failed writing " + partial.string());
    }
    std::error_code ec;
    std::filesystem::rename(partial, path, ec);
    if (ec) throw IoError("failed renaming " + partial.string() + ": " + ec.message());
}

}  // namespace apf
