#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "adpnet/adp.hpp"
#include "adpnet/core_net.hpp"
#include "adpnet/error_dynamics.hpp"

namespace adpnet {

enum class TaskKind { kSine, kSumOfSines, kSetpoint };

std::string to_string(TaskKind k);
TaskKind parse_task_kind(const std::string& name);

struct SineComponent {
  int channel = 0;
  double amplitude = 1.0;
  double frequency = 1.0;  // rad/s
  double phase = 0.0;

  bool operator==(const SineComponent&) const = default;
};

struct Setpoint {
  int label = 0;
  std::vector<double> value;

  bool operator==(const Setpoint&) const = default;
};

/// Reference trajectory y(t) on [0, duration].
struct ReferenceTask {
  TaskKind kind = TaskKind::kSine;
  int outputs = 1;
  std::vector<SineComponent> components;
  std::vector<Setpoint> setpoints;
  int active_label = 0;
  double duration = 1.0;
  /// Spacing of recorded trajectory samples; a multiple of the simulation step.
  double sample_dt = 0.01;

  void validate() const;
  const Setpoint& active_setpoint() const;
  bool operator==(const ReferenceTask&) const = default;
};

struct ReferenceSample {
  Eigen::VectorXd y;
  Eigen::VectorXd y_dot;
};

ReferenceSample generate_reference(const ReferenceTask& task, double t);

/// Ridge readout W = argmin sum |W v - y|^2 + ridge |W|^2. `states` holds one
/// sample per row (samples x n_r), `targets` likewise (samples x c).
Eigen::MatrixXd pretrain_decoder(const Eigen::MatrixXd& states, const Eigen::MatrixXd& targets, double ridge);

/// Minimum-norm v_d with decoder * v_d = y.
Eigen::VectorXd derive_teacher_state(const Eigen::VectorXd& y, const Eigen::MatrixXd& decoder);

enum class InputMode { kTeacher, kZero };

std::string to_string(InputMode m);
InputMode parse_input_mode(const std::string& name);

struct NetworkConfig {
  int neurons = 1;
  int fixed = 0;
  double dt = 0.001;
  std::vector<double> leak{1.0};  // one entry (uniform) or one per neuron
  Activation activation = Activation::kTanh;
  Integrator integrator = Integrator::kRk4;
  double input_scale = 1.0;
  double density = 0.1;
  double spectral_radius = 0.9;
  bool activate_input = true;
  InputMode input_mode = InputMode::kTeacher;
  double decoder_ridge = 1e-3;

  bool operator==(const NetworkConfig&) const = default;
};

struct LearnerSettings {
  double critic_rate = 0.01;
  double actor_rate = 0.01;
  double exploration_noise = 0.1;
  bool normalize = false;
  int critic_features = 100;
  int actor_features = 100;
  double feature_leak = 0.3;
  double feature_spectral_radius = 0.9;
  double feature_input_scale = 1.0;
  PlasticityKind plasticity = PlasticityKind::kNone;
  double plasticity_rate = 0.0;
  double plasticity_bound = 1.0;

  LearnerConfig learner_config() const;
  PlasticityRule plasticity_rule() const;
  bool operator==(const LearnerSettings&) const = default;
};

/// Scalar weights give q I and r I; explicit matrices (row lists) win when present.
struct CostSettings {
  double q = 1.0;
  double r = 1.0;
  std::vector<std::vector<double>> Q;
  std::vector<std::vector<double>> R;

  CostSpec build(Eigen::Index dim, double horizon) const;
  bool operator==(const CostSettings&) const = default;
};

struct TrainConfig {
  ReferenceTask task;
  NetworkConfig network;
  LearnerSettings learner;
  CostSettings cost;
  int episodes = 100;
  std::uint64_t seed = 0;
  std::string output_dir = "run";

  /// Checks every module invariant; throws ConfigurationError naming the field.
  void validate() const;
  bool operator==(const TrainConfig&) const = default;
};

struct EpisodeSummary {
  int episode = 0;
  int label = 0;
  double tracking_mse = 0.0;
  double mean_abs_hamiltonian = 0.0;
  double mean_abs_bellman_error = 0.0;
  double final_hjb_residual = 0.0;
  double mean_control_norm = 0.0;
  bool diverged = false;
  double divergence_time = 0.0;
};

struct TrajectoryRow {
  int episode = 0;
  long step = 0;
  double t = 0.0;
  Eigen::VectorXd y;
  Eigen::VectorXd y_hat;
  double error_norm = 0.0;
  double control_norm = 0.0;
  double hamiltonian = 0.0;
  double hjb_residual = 0.0;
  double bellman_error = 0.0;
};

struct TrainSeeds {
  std::uint64_t network = 0;
  std::uint64_t critic = 0;
  std::uint64_t actor = 0;
  std::uint64_t exploration = 0;
};

struct TrainReport {
  std::vector<EpisodeSummary> episodes;
  std::vector<TrajectoryRow> trajectory;
  HjbDiagnostics diagnostics;
  TrainSeeds seeds;
  double wall_clock_seconds = 0.0;
  bool diverged = false;
  std::string failure;
};

/// Trained (or freshly initialized) network plus learner.
struct Checkpoint {
  TrainConfig config;
  WeightSet weights;
  LeakSpec leak;
  ActorCritic learner;
};

struct TrainResult {
  TrainReport report;
  Checkpoint checkpoint;
};

TrainSeeds derive_seeds(std::uint64_t seed);

/// Builds the network, pre-trains the decoder on the uncontrolled plant and
/// creates zero-readout actor/critic reservoirs.
Checkpoint initialize(const TrainConfig& config);

/// Online actor-critic training, one learner step per plant step.
/// Deterministic for a given config (seed included).
TrainResult train(const TrainConfig& config);

struct FeedforwardEvaluation {
  double mse = 0.0;
  /// Setpoint tasks only: fraction of classes recovered by the nearest
  /// setpoint to the mean output over the last 20% of the trial.
  double accuracy = 0.0;
  std::vector<int> predicted_labels;
};

/// Runs the plant with the learned actor in the loop, no critic updates and
/// no exploration. Setpoint tasks average over every class.
FeedforwardEvaluation evaluate_feedforward_only(const Checkpoint& checkpoint, const ReferenceTask& task);

/// Nearest setpoint label to `mean_output`.
int classify(const ReferenceTask& task, const Eigen::VectorXd& mean_output);

void write_trajectory_csv(const TrainReport& report, int outputs, std::ostream& out);
void write_episodes_csv(const TrainReport& report, std::ostream& out);

/// Scalar or small linear regulation benchmark for the actor-critic: random
/// initial states, no network, same update rules.
struct RegulatorConfig {
  Eigen::MatrixXd A;
  Eigen::MatrixXd B;
  Eigen::MatrixXd Q;
  Eigen::MatrixXd R;
  /// Initial admissible policy u = -initial_gain x fitted into the actor.
  Eigen::MatrixXd initial_gain;
  double duration = 3.0;
  double dt = 0.01;
  int episodes = 500;
  double initial_min = 0.5;
  double initial_max = 1.0;
  LearnerSettings learner;
  std::uint64_t seed = 0;

  /// a = 0, b = 1, q = r = 1.
  static RegulatorConfig scalar_benchmark();
};

struct RegulatorResult {
  std::vector<double> mean_abs_hamiltonian;  // per episode
  ActorCritic learner;
};

RegulatorResult train_regulator(const RegulatorConfig& config);

}  // namespace adpnet
