#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "adpnet/core_net.hpp"
#include "adpnet/error_dynamics.hpp"

namespace adpnet {

struct ReservoirSpec {
  Eigen::Index input_dim = 1;
  Eigen::Index output_dim = 1;
  Eigen::Index features = 100;
  double leak = 0.3;
  double spectral_radius = 0.9;
  double input_scale = 1.0;
  std::uint64_t seed = 0;
};

/// Echo-state feature map with a trainable linear readout.
///
/// Feature update: z <- (1 - leak) z + leak * tanh(W_in x + W_res z).
/// The input and recurrent matrices are fixed at construction; only the
/// readout is exposed for mutation.
class ReservoirApproximator {
 public:
  explicit ReservoirApproximator(const ReservoirSpec& spec);

  /// Rebuilds an approximator from stored matrices. Throws
  /// ConfigurationError if shapes disagree or the echo-state condition
  /// (spectral radius of W_res below 1) fails.
  ReservoirApproximator(Eigen::MatrixXd input_weights, Eigen::MatrixXd recurrent_weights, Eigen::MatrixXd readout,
                        double leak);

  /// One leaky feature step driven by `input`; returns the new features.
  const Eigen::VectorXd& advance(const Eigen::VectorXd& input);

  /// Readout of the current features.
  Eigen::VectorXd output() const { return readout_ * features_; }

  /// Feature fixed point reached by holding `input` constant from zero
  /// features. Leaves the internal feature state untouched.
  Eigen::VectorXd settled_features(const Eigen::VectorXd& input, int iterations = 400) const;
  Eigen::VectorXd settled_output(const Eigen::VectorXd& input, int iterations = 400) const;

  const Eigen::VectorXd& features() const { return features_; }
  void set_features(const Eigen::VectorXd& z);
  void reset_features() { features_.setZero(); }

  const Eigen::MatrixXd& readout() const { return readout_; }
  Eigen::MatrixXd& readout() { return readout_; }

  const Eigen::MatrixXd& input_weights() const { return input_weights_; }
  const Eigen::MatrixXd& recurrent_weights() const { return recurrent_weights_; }
  double leak() const { return leak_; }
  Eigen::Index feature_count() const { return recurrent_weights_.rows(); }
  Eigen::Index input_dim() const { return input_weights_.cols(); }
  Eigen::Index output_dim() const { return readout_.rows(); }

 private:
  void check() const;

  Eigen::MatrixXd input_weights_;
  Eigen::MatrixXd recurrent_weights_;
  Eigen::MatrixXd readout_;
  Eigen::VectorXd features_;
  double leak_;
};

struct LearnerConfig {
  double critic_rate = 0.01;
  double actor_rate = 0.01;
  double exploration_noise_std = 0.1;
  /// Divide the critic step by (1 + |sigma|^2)^2.
  bool normalize = false;

  /// Rates must be finite; positive unless `allow_zero` (frozen learner).
  void validate(bool allow_zero = true) const;
  bool operator==(const LearnerConfig&) const = default;
};

/// Per-step learner diagnostics.
struct StepRecord {
  long step = 0;
  double hamiltonian = 0.0;
  double hjb_residual = 0.0;
  double bellman_error = 0.0;
};

struct HjbDiagnostics {
  std::vector<StepRecord> records;

  void append(const StepRecord& r);
  /// Header "step,hamiltonian,hjb_residual,bellman_error" then one row per record.
  void write_csv(std::ostream& out) const;
};

/// Steps the critic features with v_e and returns the value-gradient estimate.
Eigen::VectorXd critic_evaluate(ReservoirApproximator& critic, const Eigen::VectorXd& v_e);

/// Steps the actor features with v_e; adds N(0, noise_std^2) per component.
Eigen::VectorXd actor_evaluate(ReservoirApproximator& actor, const Eigen::VectorXd& v_e, double noise_std,
                               std::mt19937_64& rng);
Eigen::VectorXd actor_evaluate(ReservoirApproximator& actor, const Eigen::VectorXd& v_e);

/// l(v_e, u) + V_e' (f + g u).
double hamiltonian(const Eigen::VectorXd& v_e, const Eigen::VectorXd& u, const Eigen::VectorXd& value_gradient,
                   const AffineSystem& sys, const CostSpec& cost);

/// Stationary point u* = -1/2 R^{-1} g(v)' V_e.
Eigen::VectorXd optimal_control_from_value(const Eigen::VectorXd& v, const Eigen::VectorXd& value_gradient,
                                           const AffineSystem& sys, const CostSpec& cost);

/// v_e' Q v_e + V_e' f - 1/4 V_e' g R^{-1} g' V_e.
double hjb_residual(const Eigen::VectorXd& v_e, const Eigen::VectorXd& value_gradient, const AffineSystem& sys,
                    const CostSpec& cost);

/// Bellman residual delta = (W_c z_c)' v_e_dot + l(v_e, u) and one gradient
/// step on 1/2 delta^2 with the critic's current features. Returns delta.
double critic_update(ReservoirApproximator& critic, const Eigen::VectorXd& v_e, const Eigen::VectorXd& u,
                     const Eigen::VectorXd& v_e_dot, const CostSpec& cost, const LearnerConfig& cfg);

/// Pulls the actor readout toward -1/2 R^{-1} g' (W_c z_c). Returns the
/// pre-update mismatch norm.
double actor_update(ReservoirApproximator& actor, const ReservoirApproximator& critic, const Eigen::VectorXd& v_e,
                    const AffineSystem& sys, const CostSpec& cost, const LearnerConfig& cfg);

enum class PlasticityKind { kNone, kBoundedHebbian };

std::string to_string(PlasticityKind k);
PlasticityKind parse_plasticity(const std::string& name);

struct PlasticityRule {
  PlasticityKind kind = PlasticityKind::kNone;
  double rate = 0.0;   // eta, per second
  double bound = 1.0;  // w_max

  bool operator==(const PlasticityRule&) const = default;
};

/// Unsupervised update of the plastic recurrent block:
/// W_ij += eta * dt * post_i * pre_j, clamped to [-bound, bound], for i and j
/// both plastic. `pre` and `post` span all neurons.
WeightSet apply_plasticity(const PlasticityRule& rule, const WeightSet& w, const Eigen::VectorXd& pre,
                           const Eigen::VectorXd& post, double dt);

/// Everything produced by one online learning step.
struct LearnerStep {
  Eigen::VectorXd control;         // applied control, exploration included
  Eigen::VectorXd value_gradient;  // critic estimate before the update
  double hamiltonian = 0.0;
  double hjb_residual = 0.0;
  double bellman_error = 0.0;
  double actor_error = 0.0;
};

/// Critic/actor pair driven once per plant step (critic updated first).
class ActorCritic {
 public:
  ActorCritic(ReservoirApproximator critic, ReservoirApproximator actor, LearnerConfig config);

  /// Feature step, control with exploration `noise_std`, and (when `learn`)
  /// the critic then actor updates against the model derivative f + g u.
  LearnerStep step(const Eigen::VectorXd& v_e, const AffineSystem& sys, const CostSpec& cost, double noise_std,
                   std::mt19937_64& rng, bool learn = true);

  /// Control without exploration or learning; still advances features.
  Eigen::VectorXd act(const Eigen::VectorXd& v_e);

  void reset_features();

  /// Fits the actor readout by ridge regression so that the settled actor
  /// output matches `target(x)` at the given sample states.
  void fit_actor(const std::vector<Eigen::VectorXd>& samples,
                 const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& target, double ridge = 1e-6);

  const ReservoirApproximator& critic() const { return critic_; }
  const ReservoirApproximator& actor() const { return actor_; }
  ReservoirApproximator& critic() { return critic_; }
  ReservoirApproximator& actor() { return actor_; }
  const LearnerConfig& config() const { return config_; }

 private:
  ReservoirApproximator critic_;
  ReservoirApproximator actor_;
  LearnerConfig config_;
};

}  // namespace adpnet
