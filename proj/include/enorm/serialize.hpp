#pragma once

#include <string>

#include "json.hpp"

#include "enorm/archcost.hpp"
#include "enorm/dataset.hpp"
#include "enorm/evaluate.hpp"
#include "enorm/normalize.hpp"
#include "enorm/regress.hpp"
#include "enorm/synth.hpp"

// JSON (de)serialization for the domain types, plus the enum <-> string
// names shared by file formats and CLI flags. nlohmann::json keeps object
// keys sorted, so every dump is byte-deterministic for equal content.

namespace enorm {

std::string to_string(ArchKind v);
std::string to_string(RegKind v);
std::string to_string(Expansion v);
std::string to_string(StrategyKind v);
std::string to_string(RankBy v);
std::string to_string(MapKind v);
std::string to_string(FeatureSet v);
std::string to_string(FeatureTransform v);
std::string to_string(SweepAxis v);

ArchKind arch_kind_from_string(const std::string& s);
RegKind reg_kind_from_string(const std::string& s);
StrategyKind strategy_kind_from_string(const std::string& s);
RankBy rank_by_from_string(const std::string& s);
MapKind map_kind_from_string(const std::string& s);
FeatureSet feature_set_from_string(const std::string& s);
FeatureTransform feature_transform_from_string(const std::string& s);
SweepAxis sweep_axis_from_string(const std::string& s);

nlohmann::json to_json(const HardwareSpec& v);
nlohmann::json to_json(const EnergyRecord& v);
nlohmann::json to_json(const MeasurementTable& v);

nlohmann::json to_json(const ArchitectureConfig& v);
ArchitectureConfig config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const CostReport& v);

// Config list files: [{"model_id": ..., "kind": ..., ...}, ...]; model_id is
// optional and defaults to config_id(cfg).
std::vector<std::pair<std::string, ArchitectureConfig>> load_configs_json(
    const std::string& path);
void write_configs_json(
    const std::vector<std::pair<std::string, ArchitectureConfig>>& configs,
    const std::string& path);

nlohmann::json to_json(const RegressionSpec& v);
RegressionSpec regression_spec_from_json(const nlohmann::json& j);
nlohmann::json to_json(const FittedModel& v);
FittedModel fitted_model_from_json(const nlohmann::json& j);

nlohmann::json to_json(const ReferenceStrategy& v);
ReferenceStrategy reference_strategy_from_json(const nlohmann::json& j);
nlohmann::json to_json(const NormalizationMap& v);
NormalizationMap normalization_map_from_json(const nlohmann::json& j);
void write_map_json(const NormalizationMap& map, const std::string& path);
NormalizationMap load_map_json(const std::string& path);

nlohmann::json to_json(const ExperimentSpec& v);
nlohmann::json to_json(const FoldResult& v);
nlohmann::json to_json(const EvalReport& v);
nlohmann::json to_json(const SweepCell& v);

// Flat per-fold CSV emitted next to JSON reports.
std::string folds_csv(const std::vector<SweepCell>& cells);

nlohmann::json to_json(const SyntheticHardwareModel& v);
SyntheticHardwareModel synthetic_hardware_from_json(const nlohmann::json& j);

}  // namespace enorm
