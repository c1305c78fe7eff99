#include "adpnet/tasks.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <set>

#include <Eigen/Cholesky>
#include <Eigen/LU>
#include <Eigen/QR>

namespace adpnet {
namespace {

long integral_steps(double span, double dt, const char* field) {
  const double ratio = span / dt;
  const long steps = std::lround(ratio);
  if (steps < 1 || std::abs(ratio - static_cast<double>(steps)) > 1e-9 * std::max(1.0, ratio)) {
    throw ConfigurationError(std::string(field) + " must be a positive integer multiple of network.dt");
  }
  return steps;
}

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Linear anneal to zero over the final 20% of episodes.
double exploration_at(double base, int episode, int episodes) {
  const int start = static_cast<int>(std::floor(0.8 * episodes));
  if (episode < start) return base;
  const int span = episodes - 1 - start;
  if (span <= 0) return 0.0;
  return base * static_cast<double>(episodes - 1 - episode) / static_cast<double>(span);
}

std::vector<int> episode_labels(const ReferenceTask& task) {
  if (task.kind != TaskKind::kSetpoint) return {task.active_label};
  std::vector<int> labels;
  for (const auto& s : task.setpoints) labels.push_back(s.label);
  return labels;
}

// Leaky recurrent plant v' = -alpha v + W_E phi(x(t)) + W_r phi(v) + control_current.
class Plant {
 public:
  Plant(const WeightSet& w, const LeakSpec& leak, const NetworkConfig& cfg, const ReferenceTask& task)
      : w_(w), leak_(leak), cfg_(cfg), task_(task) {}

  Eigen::VectorXd input_at(double t) const {
    if (cfg_.input_mode == InputMode::kZero) return Eigen::VectorXd::Zero(w_.inputs());
    return generate_reference(task_, std::min(t, task_.duration)).y;
  }

  Eigen::VectorXd step(const Eigen::VectorXd& v, double t, const Eigen::VectorXd& control_current) const {
    const auto field = [&](double s, const Eigen::VectorXd& x) -> Eigen::VectorXd {
      const NetworkState state{x, s};
      return (-leak_.alpha.array() * x.array()).matrix() +
             neuron_input(state, input_at(s), w_, cfg_.activation, cfg_.activate_input) + control_current;
    };
    Eigen::VectorXd next = integrate_step(field, v, t, cfg_.dt, cfg_.integrator);
    if (!next.allFinite() || next.cwiseAbs().maxCoeff() > kOverflowGuard) {
      throw DivergenceError("network state left the overflow guard", t + cfg_.dt);
    }
    return next;
  }

 private:
  const WeightSet& w_;
  const LeakSpec& leak_;
  const NetworkConfig& cfg_;
  const ReferenceTask& task_;
};

// Scatters g u onto the plastic neurons.
Eigen::VectorXd control_current(const WeightSet& w, const std::vector<Eigen::Index>& plastic,
                                const Eigen::MatrixXd& input_map, const Eigen::VectorXd& u) {
  Eigen::VectorXd current = Eigen::VectorXd::Zero(w.neurons());
  const Eigen::VectorXd local = input_map * u;
  for (std::size_t k = 0; k < plastic.size(); ++k) current(plastic[k]) = local(static_cast<Eigen::Index>(k));
  return current;
}

LeakSpec make_leak(const NetworkConfig& cfg) {
  if (cfg.leak.size() == 1) return LeakSpec::uniform(cfg.neurons, cfg.leak.front());
  LeakSpec leak{Eigen::Map<const Eigen::VectorXd>(cfg.leak.data(), static_cast<Eigen::Index>(cfg.leak.size()))};
  leak.validate();
  return leak;
}

// Pseudoinverse rows of the decoder, so v_d = pinv * y.
Eigen::MatrixXd teacher_map(const Eigen::MatrixXd& decoder) {
  const Eigen::MatrixXd gram = decoder * decoder.transpose();
  Eigen::FullPivLU<Eigen::MatrixXd> lu(gram);
  if (lu.rank() < decoder.rows()) throw RankDeficiencyError("decoder is not full row rank");
  return decoder.transpose() * lu.inverse();
}

struct Trial {
  double mse = 0.0;
  Eigen::VectorXd tail_mean;
};

}  // namespace

std::string to_string(TaskKind k) {
  switch (k) {
    case TaskKind::kSine:
      return "sine";
    case TaskKind::kSumOfSines:
      return "sum-of-sines";
    case TaskKind::kSetpoint:
      return "setpoint";
  }
  return "sine";
}

TaskKind parse_task_kind(const std::string& name) {
  if (name == "sine") return TaskKind::kSine;
  if (name == "sum-of-sines") return TaskKind::kSumOfSines;
  if (name == "setpoint" || name == "setpoint-classification") return TaskKind::kSetpoint;
  throw ConfigurationError("task.kind: unknown task '" + name + "'");
}

std::string to_string(InputMode m) { return m == InputMode::kTeacher ? "teacher" : "zero"; }

InputMode parse_input_mode(const std::string& name) {
  if (name == "teacher") return InputMode::kTeacher;
  if (name == "zero") return InputMode::kZero;
  throw ConfigurationError("network.input_mode: expected teacher or zero, got '" + name + "'");
}

void ReferenceTask::validate() const {
  if (!(duration > 0.0) || !std::isfinite(duration)) throw ConfigurationError("task.duration must be positive");
  if (!(sample_dt > 0.0)) throw ConfigurationError("task.sample_dt must be positive");
  if (outputs <= 0) throw ConfigurationError("task.outputs must be positive");
  if (kind == TaskKind::kSetpoint) {
    if (setpoints.empty()) throw ConfigurationError("task.setpoints must not be empty");
    std::set<int> labels;
    std::set<std::vector<double>> values;
    for (const auto& s : setpoints) {
      if (static_cast<int>(s.value.size()) != outputs) throw ConfigurationError("task.setpoints: value length must equal task.outputs");
      if (!labels.insert(s.label).second) throw ConfigurationError("task.setpoints: duplicate label");
      if (!values.insert(s.value).second) throw ConfigurationError("task.setpoints: map must be injective");
    }
    active_setpoint();
    return;
  }
  if (components.empty()) throw ConfigurationError("task.components must not be empty");
  std::vector<int> per_channel(static_cast<std::size_t>(outputs), 0);
  for (const auto& c : components) {
    if (c.channel < 0 || c.channel >= outputs) throw ConfigurationError("task.components: channel out of range");
    if (!(c.frequency > 0.0)) throw ConfigurationError("task.components: frequency must be positive");
    ++per_channel[static_cast<std::size_t>(c.channel)];
  }
  if (kind == TaskKind::kSine) {
    for (const int count : per_channel) {
      if (count != 1) throw ConfigurationError("task.components: sine tasks need exactly one component per channel");
    }
  }
}

const Setpoint& ReferenceTask::active_setpoint() const {
  for (const auto& s : setpoints) {
    if (s.label == active_label) return s;
  }
  throw ConfigurationError("task.active_label does not name a setpoint");
}

ReferenceSample generate_reference(const ReferenceTask& task, double t) {
  if (!(t >= 0.0) || t > task.duration * (1.0 + 1e-12) + 1e-12) {
    throw ArgumentError("generate_reference: time outside [0, duration]");
  }
  ReferenceSample out{Eigen::VectorXd::Zero(task.outputs), Eigen::VectorXd::Zero(task.outputs)};
  if (task.kind == TaskKind::kSetpoint) {
    const auto& value = task.active_setpoint().value;
    out.y = Eigen::Map<const Eigen::VectorXd>(value.data(), static_cast<Eigen::Index>(value.size()));
    return out;
  }
  for (const auto& c : task.components) {
    const double angle = c.frequency * t + c.phase;
    out.y(c.channel) += c.amplitude * std::sin(angle);
    out.y_dot(c.channel) += c.amplitude * c.frequency * std::cos(angle);
  }
  return out;
}

Eigen::MatrixXd pretrain_decoder(const Eigen::MatrixXd& states, const Eigen::MatrixXd& targets, double ridge) {
  if (states.rows() != targets.rows()) throw ArgumentError("pretrain_decoder: sample counts differ");
  if (!(ridge >= 0.0)) throw ArgumentError("pretrain_decoder: ridge must be non-negative");
  if (states.rows() < states.cols()) throw ArgumentError("pretrain_decoder: need at least one sample per neuron");
  const Eigen::Index n = states.cols();
  const Eigen::MatrixXd gram = states.transpose() * states + ridge * Eigen::MatrixXd::Identity(n, n);
  if (ridge == 0.0) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(gram);
    if (qr.rank() < n) throw RankDeficiencyError("pretrain_decoder: singular normal matrix, use ridge > 0");
    return qr.solve(states.transpose() * targets).transpose();
  }
  return gram.ldlt().solve(states.transpose() * targets).transpose();
}

Eigen::VectorXd derive_teacher_state(const Eigen::VectorXd& y, const Eigen::MatrixXd& decoder) {
  if (y.size() != decoder.rows()) throw ArgumentError("derive_teacher_state: target length mismatch");
  return teacher_map(decoder) * y;
}

LearnerConfig LearnerSettings::learner_config() const {
  LearnerConfig cfg;
  cfg.critic_rate = critic_rate;
  cfg.actor_rate = actor_rate;
  cfg.exploration_noise_std = exploration_noise;
  cfg.normalize = normalize;
  return cfg;
}

PlasticityRule LearnerSettings::plasticity_rule() const { return {plasticity, plasticity_rate, plasticity_bound}; }

CostSpec CostSettings::build(Eigen::Index dim, double horizon) const {
  const auto to_matrix = [&](const std::vector<std::vector<double>>& rows, const char* field) {
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), dim);
    if (m.rows() != dim) throw ConfigurationError(std::string(field) + " must be " + std::to_string(dim) + " x " + std::to_string(dim));
    for (Eigen::Index i = 0; i < dim; ++i) {
      const auto& row = rows[static_cast<std::size_t>(i)];
      if (static_cast<Eigen::Index>(row.size()) != dim) throw ConfigurationError(std::string(field) + " rows must have " + std::to_string(dim) + " entries");
      for (Eigen::Index j = 0; j < dim; ++j) m(i, j) = row[static_cast<std::size_t>(j)];
    }
    return m;
  };
  const Eigen::MatrixXd Qm = Q.empty() ? Eigen::MatrixXd(q * Eigen::MatrixXd::Identity(dim, dim)) : to_matrix(Q, "cost.Q");
  const Eigen::MatrixXd Rm = R.empty() ? Eigen::MatrixXd(r * Eigen::MatrixXd::Identity(dim, dim)) : to_matrix(R, "cost.R");
  return CostSpec(Qm, Rm, horizon);
}

void TrainConfig::validate() const {
  task.validate();
  if (episodes < 0) throw ConfigurationError("episodes must be non-negative");
  if (network.neurons <= 0) throw ConfigurationError("network.neurons must be positive");
  if (network.fixed < 0 || network.fixed >= network.neurons) {
    throw ConfigurationError("network.fixed must leave at least one plastic neuron");
  }
  if (!(network.dt > 0.0)) throw ConfigurationError("network.dt must be positive");
  if (network.leak.size() != 1 && static_cast<int>(network.leak.size()) != network.neurons) {
    throw ConfigurationError("network.leak must have one entry or one per neuron");
  }
  for (const double a : network.leak) {
    if (!(a >= 0.0) || !std::isfinite(a)) throw ConfigurationError("network.leak must be finite and non-negative");
  }
  if (!(network.density > 0.0 && network.density <= 1.0)) throw ConfigurationError("network.density must lie in (0, 1]");
  if (!(network.spectral_radius > 0.0)) throw ConfigurationError("network.spectral_radius must be positive");
  if (!(network.decoder_ridge >= 0.0)) throw ConfigurationError("network.decoder_ridge must be non-negative");
  integral_steps(task.duration, network.dt, "task.duration");
  integral_steps(task.sample_dt, network.dt, "task.sample_dt");

  learner.learner_config().validate();
  if (learner.critic_features <= 0 || learner.actor_features <= 0) {
    throw ConfigurationError("learner feature counts must be positive");
  }
  if (!(learner.feature_leak > 0.0 && learner.feature_leak <= 1.0)) throw ConfigurationError("learner.feature_leak must lie in (0, 1]");
  if (!(learner.feature_spectral_radius > 0.0 && learner.feature_spectral_radius < 1.0)) {
    throw ConfigurationError("learner.feature_spectral_radius must lie in (0, 1)");
  }
  if (learner.plasticity == PlasticityKind::kBoundedHebbian && !(learner.plasticity_bound > 0.0)) {
    throw ConfigurationError("learner.plasticity_bound must be positive");
  }
  cost.build(network.neurons - network.fixed, task.duration);
}

TrainSeeds derive_seeds(std::uint64_t seed) {
  std::uint64_t state = seed;
  TrainSeeds s;
  s.network = splitmix64(state);
  s.critic = splitmix64(state);
  s.actor = splitmix64(state);
  s.exploration = splitmix64(state);
  return s;
}

Checkpoint initialize(const TrainConfig& config) {
  config.validate();
  const TrainSeeds seeds = derive_seeds(config.seed);

  WeightInit init;
  init.neurons = config.network.neurons;
  init.fixed = config.network.fixed;
  init.inputs = config.task.outputs;
  init.outputs = config.task.outputs;
  init.input_scale = config.network.input_scale;
  init.density = config.network.density;
  init.spectral_radius = config.network.spectral_radius;
  init.seed = seeds.network;
  WeightSet weights = make_weights(init);
  const LeakSpec leak = make_leak(config.network);

  // Decoder pre-training on the uncontrolled plant driven by every label.
  const long steps = integral_steps(config.task.duration, config.network.dt, "task.duration");
  const auto labels = episode_labels(config.task);
  const Eigen::VectorXd no_control = Eigen::VectorXd::Zero(weights.neurons());
  Eigen::MatrixXd states(static_cast<Eigen::Index>(labels.size()) * steps, weights.neurons());
  Eigen::MatrixXd targets(states.rows(), config.task.outputs);
  Eigen::Index row = 0;
  for (const int label : labels) {
    ReferenceTask task = config.task;
    task.active_label = label;
    const Plant plant(weights, leak, config.network, task);
    Eigen::VectorXd v = Eigen::VectorXd::Zero(weights.neurons());
    for (long k = 0; k < steps; ++k) {
      const double t = static_cast<double>(k) * config.network.dt;
      v = plant.step(v, t, no_control);
      states.row(row) = v.transpose();
      targets.row(row) = generate_reference(task, static_cast<double>(k + 1) * config.network.dt).y.transpose();
      ++row;
    }
  }
  weights.decoder = pretrain_decoder(states, targets, config.network.decoder_ridge);
  weights.validate();

  const Eigen::Index n = config.network.neurons - config.network.fixed;
  ReservoirSpec critic;
  critic.input_dim = n;
  critic.output_dim = n;
  critic.features = config.learner.critic_features;
  critic.leak = config.learner.feature_leak;
  critic.spectral_radius = config.learner.feature_spectral_radius;
  critic.input_scale = config.learner.feature_input_scale;
  critic.seed = seeds.critic;
  ReservoirSpec actor = critic;
  actor.features = config.learner.actor_features;
  actor.seed = seeds.actor;

  return Checkpoint{config, std::move(weights), leak,
                    ActorCritic(ReservoirApproximator(critic), ReservoirApproximator(actor),
                                config.learner.learner_config())};
}

TrainResult train(const TrainConfig& config) {
  const auto started = std::chrono::steady_clock::now();
  Checkpoint checkpoint = initialize(config);
  TrainReport report;
  report.seeds = derive_seeds(config.seed);

  WeightSet& w = checkpoint.weights;
  const auto plastic = w.plastic_indices();
  AffineSystem sys = error_system_from_network(w, checkpoint.leak, config.network.activation);
  const CostSpec cost = config.cost.build(sys.state_dim, config.task.duration);
  const PlasticityRule rule = config.learner.plasticity_rule();
  Eigen::MatrixXd pinv = teacher_map(w.decoder);

  const long steps = integral_steps(config.task.duration, config.network.dt, "task.duration");
  const long stride = integral_steps(config.task.sample_dt, config.network.dt, "task.sample_dt");
  const auto labels = episode_labels(config.task);
  const bool learning = config.learner.critic_rate > 0.0 || config.learner.actor_rate > 0.0;
  std::mt19937_64 rng(report.seeds.exploration);
  long global_step = 0;

  for (int episode = 0; episode < config.episodes && !report.diverged; ++episode) {
    ReferenceTask task = config.task;
    task.active_label = labels[static_cast<std::size_t>(episode) % labels.size()];
    const double noise = learning ? exploration_at(config.learner.exploration_noise, episode, config.episodes) : 0.0;

    EpisodeSummary summary;
    summary.episode = episode;
    summary.label = task.active_label;
    checkpoint.learner.reset_features();
    Eigen::VectorXd v = Eigen::VectorXd::Zero(w.neurons());
    double t = 0.0;
    long k = 0;
    try {
      for (; k < steps; ++k, ++global_step) {
        t = static_cast<double>(k) * config.network.dt;
        const ReferenceSample ref = generate_reference(task, t);
        const Eigen::VectorXd v_d = pinv * ref.y;
        const ErrorState err = ErrorState::from(v, v_d, ref.y, w);
        const LearnerStep ls = checkpoint.learner.step(err.v_e, sys, cost, noise, rng, learning);

        summary.tracking_mse += err.e.squaredNorm() / static_cast<double>(err.e.size());
        summary.mean_abs_hamiltonian += std::abs(ls.hamiltonian);
        summary.mean_abs_bellman_error += std::abs(ls.bellman_error);
        summary.mean_control_norm += ls.control.norm();
        summary.final_hjb_residual = std::abs(ls.hjb_residual);

        if (k % stride == 0) {
          report.trajectory.push_back({episode, k, t, ref.y, decode(v, w), err.e.norm(), ls.control.norm(),
                                       ls.hamiltonian, ls.hjb_residual, ls.bellman_error});
          report.diagnostics.append({global_step, ls.hamiltonian, ls.hjb_residual, ls.bellman_error});
        }

        const Plant plant(w, checkpoint.leak, config.network, task);
        const Eigen::VectorXd next = plant.step(v, t, control_current(w, plastic, sys.g(err.v_e), ls.control));
        if (rule.kind != PlasticityKind::kNone) {
          const Eigen::VectorXd activity = activate(config.network.activation, next);
          w = apply_plasticity(rule, w, activity, activity, config.network.dt);
          sys = error_system_from_network(w, checkpoint.leak, config.network.activation);
        }
        v = next;
      }
    } catch (const DivergenceError& e) {
      summary.diverged = true;
      summary.divergence_time = e.time();
      report.failure = e.what();
    } catch (const Error& e) {
      summary.diverged = true;
      summary.divergence_time = t;
      report.failure = e.what();
    }
    const double count = static_cast<double>(std::max<long>(k, 1));
    summary.tracking_mse /= count;
    summary.mean_abs_hamiltonian /= count;
    summary.mean_abs_bellman_error /= count;
    summary.mean_control_norm /= count;
    report.diverged = summary.diverged;
    report.episodes.push_back(summary);
  }

  report.wall_clock_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return TrainResult{std::move(report), std::move(checkpoint)};
}

int classify(const ReferenceTask& task, const Eigen::VectorXd& mean_output) {
  int best = 0;
  double best_distance = std::numeric_limits<double>::infinity();
  for (const auto& s : task.setpoints) {
    const Eigen::Map<const Eigen::VectorXd> value(s.value.data(), static_cast<Eigen::Index>(s.value.size()));
    const double d = (value - mean_output).squaredNorm();
    if (d < best_distance) {
      best_distance = d;
      best = s.label;
    }
  }
  return best;
}

FeedforwardEvaluation evaluate_feedforward_only(const Checkpoint& checkpoint, const ReferenceTask& task) {
  task.validate();
  const TrainConfig& config = checkpoint.config;
  const WeightSet& w = checkpoint.weights;
  const auto plastic = w.plastic_indices();
  const AffineSystem sys = error_system_from_network(w, checkpoint.leak, config.network.activation);
  const Eigen::MatrixXd pinv = teacher_map(w.decoder);
  const long steps = integral_steps(task.duration, config.network.dt, "task.duration");
  const long tail_start = steps - std::max<long>(1, steps / 5);

  FeedforwardEvaluation eval;
  const auto labels = episode_labels(task);
  int correct = 0;
  for (const int label : labels) {
    ReferenceTask trial = task;
    trial.active_label = label;
    ActorCritic learner = checkpoint.learner;
    learner.reset_features();
    const Plant plant(w, checkpoint.leak, config.network, trial);
    Eigen::VectorXd v = Eigen::VectorXd::Zero(w.neurons());
    Eigen::VectorXd tail = Eigen::VectorXd::Zero(task.outputs);
    double mse = 0.0;
    for (long k = 0; k < steps; ++k) {
      const double t = static_cast<double>(k) * config.network.dt;
      const Eigen::VectorXd y = generate_reference(trial, t).y;
      const ErrorState err = ErrorState::from(v, pinv * y, y, w);
      mse += err.e.squaredNorm() / static_cast<double>(err.e.size());
      if (k >= tail_start) tail += decode(v, w);
      const Eigen::VectorXd u = learner.act(err.v_e);
      v = plant.step(v, t, control_current(w, plastic, sys.g(err.v_e), u));
    }
    eval.mse += mse / static_cast<double>(steps);
    if (task.kind == TaskKind::kSetpoint) {
      const int predicted = classify(task, tail / static_cast<double>(steps - tail_start));
      eval.predicted_labels.push_back(predicted);
      if (predicted == label) ++correct;
    }
  }
  eval.mse /= static_cast<double>(labels.size());
  if (task.kind == TaskKind::kSetpoint) eval.accuracy = static_cast<double>(correct) / static_cast<double>(labels.size());
  return eval;
}

void write_trajectory_csv(const TrainReport& report, int outputs, std::ostream& out) {
  out << "episode,step,t";
  for (int i = 0; i < outputs; ++i) out << ",y_" << i;
  for (int i = 0; i < outputs; ++i) out << ",y_hat_" << i;
  out << ",error_norm,control_norm,hamiltonian,hjb_residual,bellman_error\n";
  out << std::setprecision(17);
  for (const auto& r : report.trajectory) {
    out << r.episode << ',' << r.step << ',' << r.t;
    for (Eigen::Index i = 0; i < r.y.size(); ++i) out << ',' << r.y(i);
    for (Eigen::Index i = 0; i < r.y_hat.size(); ++i) out << ',' << r.y_hat(i);
    out << ',' << r.error_norm << ',' << r.control_norm << ',' << r.hamiltonian << ',' << r.hjb_residual << ','
        << r.bellman_error << '\n';
  }
}

void write_episodes_csv(const TrainReport& report, std::ostream& out) {
  out << "episode,label,tracking_mse,mean_abs_hamiltonian,mean_abs_bellman_error,final_hjb_residual,"
         "mean_control_norm,diverged,divergence_time\n";
  out << std::setprecision(17);
  for (const auto& e : report.episodes) {
    out << e.episode << ',' << e.label << ',' << e.tracking_mse << ',' << e.mean_abs_hamiltonian << ','
        << e.mean_abs_bellman_error << ',' << e.final_hjb_residual << ',' << e.mean_control_norm << ','
        << (e.diverged ? 1 : 0) << ',' << e.divergence_time << '\n';
  }
}

RegulatorConfig RegulatorConfig::scalar_benchmark() {
  RegulatorConfig cfg;
  cfg.A = Eigen::MatrixXd::Zero(1, 1);
  cfg.B = Eigen::MatrixXd::Ones(1, 1);
  cfg.Q = Eigen::MatrixXd::Ones(1, 1);
  cfg.R = Eigen::MatrixXd::Ones(1, 1);
  cfg.initial_gain = Eigen::MatrixXd::Constant(1, 1, 0.5);
  cfg.seed = 1;
  return cfg;
}

RegulatorResult train_regulator(const RegulatorConfig& config) {
  const Eigen::Index n = config.A.rows();
  const AffineSystem sys = AffineSystem::linear(config.A, config.B);
  const CostSpec cost(config.Q, config.R, config.duration);
  const long steps = integral_steps(config.duration, config.dt, "regulator duration");
  if (config.initial_gain.rows() != config.B.cols() || config.initial_gain.cols() != n) {
    throw ConfigurationError("regulator initial gain must be m x n");
  }
  if (!(config.initial_max >= config.initial_min && config.initial_min >= 0.0)) {
    throw ConfigurationError("regulator initial-state range is invalid");
  }

  const TrainSeeds seeds = derive_seeds(config.seed);
  ReservoirSpec critic;
  critic.input_dim = n;
  critic.output_dim = n;
  critic.features = config.learner.critic_features;
  critic.leak = config.learner.feature_leak;
  critic.spectral_radius = config.learner.feature_spectral_radius;
  critic.input_scale = config.learner.feature_input_scale;
  critic.seed = seeds.critic;
  ReservoirSpec actor = critic;
  actor.output_dim = config.B.cols();
  actor.features = config.learner.actor_features;
  actor.seed = seeds.actor;
  ActorCritic learner(ReservoirApproximator(critic), ReservoirApproximator(actor), config.learner.learner_config());

  std::mt19937_64 rng(seeds.exploration);
  std::normal_distribution<double> gaussian(0.0, 1.0);
  std::uniform_real_distribution<double> magnitude(config.initial_min, config.initial_max);

  std::vector<Eigen::VectorXd> samples;
  if (n == 1) {
    for (int i = 0; i <= 40; ++i) samples.push_back(Eigen::VectorXd::Constant(1, config.initial_max * (-1.0 + 0.05 * i)));
  } else {
    for (int i = 0; i < 200; ++i) {
      Eigen::VectorXd d(n);
      for (Eigen::Index j = 0; j < n; ++j) d(j) = gaussian(rng);
      samples.push_back(config.initial_max * std::sqrt(magnitude(rng) / std::max(config.initial_max, 1e-12)) * d.normalized());
    }
  }
  const Eigen::MatrixXd gain = config.initial_gain;
  learner.fit_actor(samples, [&](const Eigen::VectorXd& x) -> Eigen::VectorXd { return -gain * x; });

  RegulatorResult result{{}, learner};
  for (int episode = 0; episode < config.episodes; ++episode) {
    const double noise = exploration_at(config.learner.exploration_noise, episode, config.episodes);
    Eigen::VectorXd direction(n);
    for (Eigen::Index j = 0; j < n; ++j) direction(j) = gaussian(rng);
    direction.normalize();
    if (direction(0) < 0.0) direction = -direction;
    const double sign = episode % 2 == 0 ? 1.0 : -1.0;
    Eigen::VectorXd x = sign * magnitude(rng) * direction;

    result.learner.reset_features();
    double hamiltonian_sum = 0.0;
    for (long k = 0; k < steps; ++k) {
      const LearnerStep ls = result.learner.step(x, sys, cost, noise, rng, true);
      hamiltonian_sum += std::abs(ls.hamiltonian);
      const auto field = [&](double, const Eigen::VectorXd& s) -> Eigen::VectorXd { return sys.flow(s, ls.control); };
      x = integrate_step(field, x, static_cast<double>(k) * config.dt, config.dt, Integrator::kRk4);
      if (!x.allFinite() || x.cwiseAbs().maxCoeff() > kOverflowGuard) {
        throw DivergenceError("regulator state diverged", static_cast<double>(k + 1) * config.dt);
      }
    }
    result.mean_abs_hamiltonian.push_back(hamiltonian_sum / static_cast<double>(steps));
  }
  return result;
}

}  // namespace adpnet
