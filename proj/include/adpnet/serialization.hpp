#pragma once

#include <string>

#include <Eigen/Core>
#include <json.hpp>

#include "adpnet/adp.hpp"
#include "adpnet/core_net.hpp"
#include "adpnet/error_dynamics.hpp"
#include "adpnet/tasks.hpp"

// JSON document family shared by weights, costs, learners and checkpoints.
// Matrices are {"rows", "cols", "data"} with data in row-major order.
namespace adpnet::io {

using nlohmann::json;

inline constexpr int kSchemaVersion = 1;

json matrix_to_json(const Eigen::MatrixXd& m);
Eigen::MatrixXd matrix_from_json(const json& j, const std::string& field);

json to_json(const WeightSet& w);
WeightSet weights_from_json(const json& j);

json to_json(const LeakSpec& leak);
LeakSpec leak_from_json(const json& j);

json to_json(const CostSpec& cost);
CostSpec cost_from_json(const json& j);

json to_json(const ReservoirApproximator& r);
ReservoirApproximator reservoir_from_json(const json& j, const std::string& field);

json to_json(const LearnerConfig& cfg);
LearnerConfig learner_config_from_json(const json& j);

json to_json(const ActorCritic& learner);
ActorCritic learner_from_json(const json& j);

/// Full run configuration; every field written, so parsing the result
/// reproduces the config exactly.
json to_json(const TrainConfig& config);

json to_json(const TrainSeeds& seeds);

/// Checkpoint document with schema_version, seeds, config, network and learner.
json to_json(const Checkpoint& checkpoint);
Checkpoint checkpoint_from_json(const json& j);

void write_json_file(const json& j, const std::string& path);
json read_json_file(const std::string& path);

}  // namespace adpnet::io
