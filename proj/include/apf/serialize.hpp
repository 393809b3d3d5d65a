#pragma once

#include <filesystem>
#include <vector>

#include "json.hpp"

#include "apf/pipeline.hpp"

namespace apf {

// nlohmann ADL hooks. Formulations serialize as their canonical text (the
// grammar is the storage format); everything else mirrors its struct.
void to_json(nlohmann::json& j, const Band& v);
void from_json(const nlohmann::json& j, Band& v);
void to_json(nlohmann::json& j, const MetricId& v);
void from_json(const nlohmann::json& j, MetricId& v);
void to_json(nlohmann::json& j, const DesignIntent& v);
void from_json(const nlohmann::json& j, DesignIntent& v);
void to_json(nlohmann::json& j, const Requirement& v);
void from_json(const nlohmann::json& j, Requirement& v);
void to_json(nlohmann::json& j, const RequirementSet& v);
void from_json(const nlohmann::json& j, RequirementSet& v);
void to_json(nlohmann::json& j, const TestInstance& v);
void from_json(const nlohmann::json& j, TestInstance& v);
void to_json(nlohmann::json& j, const Formulation& v);
void from_json(const nlohmann::json& j, Formulation& v);
void to_json(nlohmann::json& j, const Ranking& v);
void from_json(const nlohmann::json& j, Ranking& v);
void to_json(nlohmann::json& j, const QualityScore& v);
void to_json(nlohmann::json& j, const ItemAlignment& v);
void to_json(nlohmann::json& j, const AlignmentReport& v);
void to_json(nlohmann::json& j, const DatasetRecord& v);
void from_json(const nlohmann::json& j, DatasetRecord& v);
void to_json(nlohmann::json& j, const SftSample& v);
void from_json(const nlohmann::json& j, SftSample& v);
void to_json(nlohmann::json& j, const StageFailure& v);
void to_json(nlohmann::json& j, const ScoreHistogram& v);
void to_json(nlohmann::json& j, const RunReport& v);

// JSON-lines IO. Writes go to "<path>.partial" first and are renamed into
// place, so a crash never leaves a torn file under the final name.
std::vector<nlohmann::json> read_jsonl(const std::filesystem::path& path);
void write_jsonl(const std::filesystem::path& path, const std::vector<nlohmann::json>& rows);

template <typename T>
std::vector<T> read_jsonl_as(const std::filesystem::path& path) {
    std::vector<T> out;
    for (const auto& row : read_jsonl(path)) out.push_back(row.template get<T>());
    return out;
}

template <typename T>
void write_jsonl_as(const std::filesystem::path& path, const std::vector<T>& rows) {
    std::vector<nlohmann::json> raw;
    raw.reserve(rows.size());
    for (const T& r : rows) raw.push_back(nlohmann::json(r));
    write_jsonl(path, raw);
}

}  // namespace apf
