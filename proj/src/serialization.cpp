#include "adpnet/serialization.hpp"

#include <fstream>
#include <sstream>

#include "adpnet/config.hpp"
#include "adpnet/errors.hpp"

namespace adpnet::io {
namespace {

const json& field_of(const json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) throw ConfigurationError(where + ": missing field '" + key + "'");
  return j.at(key);
}

template <class T>
T value_of(const json& j, const char* key, const std::string& where) {
  try {
    return field_of(j, key, where).get<T>();
  } catch (const json::exception&) {
    throw ConfigurationError(where + "." + key + ": wrong type");
  }
}

}  // namespace

json matrix_to_json(const Eigen::MatrixXd& m) {
  json data = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) data.push_back(m(i, j));
  }
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

Eigen::MatrixXd matrix_from_json(const json& j, const std::string& field) {
  const auto rows = value_of<Eigen::Index>(j, "rows", field);
  const auto cols = value_of<Eigen::Index>(j, "cols", field);
  const auto data = value_of<std::vector<double>>(j, "data", field);
  if (rows < 0 || cols < 0 || static_cast<Eigen::Index>(data.size()) != rows * cols) {
    throw ConfigurationError(field + ": data length does not match rows * cols");
  }
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index k = 0; k < cols; ++k) m(i, k) = data[static_cast<std::size_t>(i * cols + k)];
  }
  return m;
}

json to_json(const WeightSet& w) {
  return {{"encoder", matrix_to_json(w.encoder)},
          {"recurrent", matrix_to_json(w.recurrent)},
          {"decoder", matrix_to_json(w.decoder)},
          {"plastic_mask", w.plastic_mask},
          {"seed", w.seed}};
}

WeightSet weights_from_json(const json& j) {
  WeightSet w;
  w.encoder = matrix_from_json(field_of(j, "encoder", "weights"), "weights.encoder");
  w.recurrent = matrix_from_json(field_of(j, "recurrent", "weights"), "weights.recurrent");
  w.decoder = matrix_from_json(field_of(j, "decoder", "weights"), "weights.decoder");
  w.plastic_mask = value_of<std::vector<bool>>(j, "plastic_mask", "weights");
  w.seed = value_of<std::uint64_t>(j, "seed", "weights");
  w.validate();
  return w;
}

json to_json(const LeakSpec& leak) {
  return {{"alpha", std::vector<double>(leak.alpha.data(), leak.alpha.data() + leak.alpha.size())}};
}

LeakSpec leak_from_json(const json& j) {
  const auto alpha = value_of<std::vector<double>>(j, "alpha", "leak");
  LeakSpec leak{Eigen::Map<const Eigen::VectorXd>(alpha.data(), static_cast<Eigen::Index>(alpha.size()))};
  leak.validate();
  return leak;
}

json to_json(const CostSpec& cost) {
  return {{"Q", matrix_to_json(cost.Q())}, {"R", matrix_to_json(cost.R())}, {"horizon", cost.horizon()}};
}

CostSpec cost_from_json(const json& j) {
  return CostSpec(matrix_from_json(field_of(j, "Q", "cost"), "cost.Q"),
                  matrix_from_json(field_of(j, "R", "cost"), "cost.R"), value_of<double>(j, "horizon", "cost"));
}

json to_json(const ReservoirApproximator& r) {
  return {{"input_weights", matrix_to_json(r.input_weights())},
          {"recurrent_weights", matrix_to_json(r.recurrent_weights())},
          {"readout", matrix_to_json(r.readout())},
          {"leak", r.leak()}};
}

ReservoirApproximator reservoir_from_json(const json& j, const std::string& field) {
  return ReservoirApproximator(matrix_from_json(field_of(j, "input_weights", field), field + ".input_weights"),
                               matrix_from_json(field_of(j, "recurrent_weights", field), field + ".recurrent_weights"),
                               matrix_from_json(field_of(j, "readout", field), field + ".readout"),
                               value_of<double>(j, "leak", field));
}

json to_json(const LearnerConfig& cfg) {
  return {{"critic_rate", cfg.critic_rate},
          {"actor_rate", cfg.actor_rate},
          {"exploration_noise_std", cfg.exploration_noise_std},
          {"normalize", cfg.normalize}};
}

LearnerConfig learner_config_from_json(const json& j) {
  LearnerConfig cfg;
  cfg.critic_rate = value_of<double>(j, "critic_rate", "learner.config");
  cfg.actor_rate = value_of<double>(j, "actor_rate", "learner.config");
  cfg.exploration_noise_std = value_of<double>(j, "exploration_noise_std", "learner.config");
  cfg.normalize = value_of<bool>(j, "normalize", "learner.config");
  cfg.validate();
  return cfg;
}

json to_json(const ActorCritic& learner) {
  return {{"config", to_json(learner.config())}, {"critic", to_json(learner.critic())}, {"actor", to_json(learner.actor())}};
}

ActorCritic learner_from_json(const json& j) {
  return ActorCritic(reservoir_from_json(field_of(j, "critic", "learner"), "learner.critic"),
                     reservoir_from_json(field_of(j, "actor", "learner"), "learner.actor"),
                     learner_config_from_json(field_of(j, "config", "learner")));
}

json to_json(const TrainConfig& c) {
  json components = json::array();
  for (const auto& s : c.task.components) {
    components.push_back({{"channel", s.channel}, {"amplitude", s.amplitude}, {"frequency", s.frequency}, {"phase", s.phase}});
  }
  json setpoints = json::array();
  for (const auto& s : c.task.setpoints) setpoints.push_back({{"label", s.label}, {"value", s.value}});
  json cost = {{"q", c.cost.q}, {"r", c.cost.r}};
  if (!c.cost.Q.empty()) cost["Q"] = c.cost.Q;
  if (!c.cost.R.empty()) cost["R"] = c.cost.R;
  return {
      {"seed", c.seed},
      {"episodes", c.episodes},
      {"output_dir", c.output_dir},
      {"task",
       {{"kind", to_string(c.task.kind)},
        {"outputs", c.task.outputs},
        {"duration", c.task.duration},
        {"sample_dt", c.task.sample_dt},
        {"active_label", c.task.active_label},
        {"components", components},
        {"setpoints", setpoints}}},
      {"network",
       {{"neurons", c.network.neurons},
        {"fixed", c.network.fixed},
        {"dt", c.network.dt},
        {"leak", c.network.leak},
        {"activation", to_string(c.network.activation)},
        {"integrator", to_string(c.network.integrator)},
        {"input_scale", c.network.input_scale},
        {"density", c.network.density},
        {"spectral_radius", c.network.spectral_radius},
        {"activate_input", c.network.activate_input},
        {"input_mode", to_string(c.network.input_mode)},
        {"decoder_ridge", c.network.decoder_ridge}}},
      {"learner",
       {{"critic_rate", c.learner.critic_rate},
        {"actor_rate", c.learner.actor_rate},
        {"exploration_noise", c.learner.exploration_noise},
        {"normalize", c.learner.normalize},
        {"critic_features", c.learner.critic_features},
        {"actor_features", c.learner.actor_features},
        {"feature_leak", c.learner.feature_leak},
        {"feature_spectral_radius", c.learner.feature_spectral_radius},
        {"feature_input_scale", c.learner.feature_input_scale},
        {"plasticity", to_string(c.learner.plasticity)},
        {"plasticity_rate", c.learner.plasticity_rate},
        {"plasticity_bound", c.learner.plasticity_bound}}},
      {"cost", cost},
  };
}

json to_json(const TrainSeeds& seeds) {
  return {{"network", seeds.network}, {"critic", seeds.critic}, {"actor", seeds.actor}, {"exploration", seeds.exploration}};
}

json to_json(const Checkpoint& checkpoint) {
  return {{"schema_version", kSchemaVersion},
          {"kind", "adpnet.checkpoint"},
          {"seed", checkpoint.config.seed},
          {"seeds", to_json(derive_seeds(checkpoint.config.seed))},
          {"config", to_json(checkpoint.config)},
          {"weights", to_json(checkpoint.weights)},
          {"leak", to_json(checkpoint.leak)},
          {"learner", to_json(checkpoint.learner)}};
}

Checkpoint checkpoint_from_json(const json& j) {
  const int version = value_of<int>(j, "schema_version", "checkpoint");
  if (version != kSchemaVersion) {
    throw ConfigurationError("checkpoint.schema_version: unsupported version " + std::to_string(version));
  }
  Checkpoint c{config_from_json(field_of(j, "config", "checkpoint")), weights_from_json(field_of(j, "weights", "checkpoint")),
               leak_from_json(field_of(j, "leak", "checkpoint")), learner_from_json(field_of(j, "learner", "checkpoint"))};
  if (c.weights.neurons() != c.leak.alpha.size()) throw ConfigurationError("checkpoint.leak: length must equal neuron count");
  return c;
}

void write_json_file(const json& j, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << j.dump(2) << '\n';
}

json read_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigurationError("cannot read " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigurationError(path + ": " + e.what());
  }
}

}  // namespace adpnet::io
