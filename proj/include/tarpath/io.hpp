#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "tarpath/attribution.hpp"
#include "tarpath/instance.hpp"
#include "tarpath/losses.hpp"
#include "tarpath/oracle.hpp"
#include "tarpath/planner.hpp"
#include "tarpath/reduction.hpp"
#include "tarpath/train.hpp"

namespace tarpath::io {

using json = nlohmann::json;

/// Serializes with every float printed to 17 significant digits. indent < 0
/// gives a single line (used for JSON Lines).
[[nodiscard]] std::string dump(const json& j, int indent = 2);

/// Writes to a sibling temp file and renames it over `path`.
void write_atomic(const std::filesystem::path& path, const std::string& content);
[[nodiscard]] std::string read_text(const std::filesystem::path& path);
[[nodiscard]] json read_json(const std::filesystem::path& path);

[[nodiscard]] json alphabet_to_json(const ActionAlphabet& alphabet);
[[nodiscard]] ActionAlphabet alphabet_from_json(const json& j);

[[nodiscard]] json path_to_json(const ActionAlphabet& alphabet, const PathSeq& path);
[[nodiscard]] PathSeq path_from_json(const ActionAlphabet& alphabet, const json& j);

[[nodiscard]] json instance_to_json(const PLInstance& instance);
[[nodiscard]] PLInstance instance_from_json(const json& j);

/// One {"path": [...], "y": ...} object per line.
[[nodiscard]] std::string dataset_to_jsonl(const ActionAlphabet& alphabet, const PathYieldDataset& data);
[[nodiscard]] PathYieldDataset dataset_from_jsonl(const ActionAlphabet& alphabet, const std::string& text,
                                                  std::uint64_t seed = 0);

/// One {"s": [...], "a": ..., "r": ..., "s_next": [...]} object per line.
[[nodiscard]] std::string rl_dataset_to_jsonl(const ActionAlphabet& alphabet, const RLDataset& data);
[[nodiscard]] RLDataset rl_dataset_from_jsonl(const ActionAlphabet& alphabet, const std::string& text,
                                              std::uint64_t seed = 0);

[[nodiscard]] json oracle_to_json(const OptimalValues& ov);

[[nodiscard]] json model_to_json(const AdvantageModel& model);
[[nodiscard]] AdvantageModel model_from_json(const json& j);

[[nodiscard]] json state_weighting_to_json(const ActionAlphabet& alphabet, const StateWeighting& p0);
[[nodiscard]] StateWeighting state_weighting_from_json(const ActionAlphabet& alphabet, const json& j);

[[nodiscard]] json plan_to_json(const ActionAlphabet& alphabet, const PlanResult& plan);
[[nodiscard]] PlanResult plan_from_json(const ActionAlphabet& alphabet, const json& j);

[[nodiscard]] json attribution_to_json(const ActionAlphabet& alphabet, const AttributionReport& report);
[[nodiscard]] AttributionReport attribution_from_json(const ActionAlphabet& alphabet, const json& j);

[[nodiscard]] json train_report_to_json(const TrainResult& result, const TrainConfig& config);

}  // namespace tarpath::io
