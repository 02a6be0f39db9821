#pragma once

#include <string>

#include <json.hpp>

#include "hadr/dataset.hpp"
#include "hadr/dbc.hpp"
#include "hadr/ensemble.hpp"
#include "hadr/matrix.hpp"
#include "hadr/metrics.hpp"
#include "hadr/mlkr.hpp"
#include "hadr/mlp.hpp"

namespace hadr {

// All persistent formats in one place. Numbers round-trip exactly (doubles
// are emitted with enough digits); none of these payloads carry timestamps,
// so a fixed seed reproduces output files byte for byte.

nlohmann::json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const nlohmann::json& j);

nlohmann::json dataset_to_json(const Dataset& d);
Dataset dataset_from_json(const nlohmann::json& j);

nlohmann::json standardizer_to_json(const Standardizer& s);
Standardizer standardizer_from_json(const nlohmann::json& j);

nlohmann::json mlkr_to_json(const MlkrTransform& t);
MlkrTransform mlkr_from_json(const nlohmann::json& j);

nlohmann::json mlp_to_json(const MlpModel& m);
MlpModel mlp_from_json(const nlohmann::json& j);

nlohmann::json pipeline_config_to_json(const PipelineConfig& c);
PipelineConfig pipeline_config_from_json(const nlohmann::json& j);

nlohmann::json model_to_json(const HadrModel& m);
HadrModel model_from_json(const nlohmann::json& j);

nlohmann::json report_to_json(const EvalReport& r);
EvalReport report_from_json(const nlohmann::json& j);

nlohmann::json blocks_membership_json(const std::vector<DataBlock>& blocks);

void save_model(const HadrModel& m, const std::string& path);
HadrModel load_model(const std::string& path);

void write_json_file(const nlohmann::json& j, const std::string& path);
nlohmann::json read_json_file(const std::string& path);

} // namespace hadr
