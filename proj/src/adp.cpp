#include "adpnet/adp.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <Eigen/Cholesky>

namespace adpnet {
namespace {

void require_finite(double value, const char* what) {
  if (!std::isfinite(value)) throw DiagnosticsError(std::string(what) + " is not finite (training diverged)");
}

}  // namespace

ReservoirApproximator::ReservoirApproximator(const ReservoirSpec& spec) : leak_(spec.leak) {
  if (spec.input_dim <= 0 || spec.output_dim <= 0 || spec.features <= 0) {
    throw ConfigurationError("reservoir dimensions must be positive");
  }
  if (!(spec.spectral_radius > 0.0 && spec.spectral_radius < 1.0)) {
    throw ConfigurationError("reservoir spectral radius must lie in (0, 1)");
  }
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> uniform(-1.0, 1.0);
  input_weights_.resize(spec.features, spec.input_dim);
  for (Eigen::Index i = 0; i < input_weights_.size(); ++i) input_weights_(i) = spec.input_scale * uniform(rng);
  recurrent_weights_.resize(spec.features, spec.features);
  for (Eigen::Index i = 0; i < recurrent_weights_.size(); ++i) recurrent_weights_(i) = uniform(rng);
  const double radius = spectral_radius(recurrent_weights_);
  if (radius > 1e-12) recurrent_weights_ *= spec.spectral_radius / radius;
  readout_ = Eigen::MatrixXd::Zero(spec.output_dim, spec.features);
  features_ = Eigen::VectorXd::Zero(spec.features);
  check();
}

ReservoirApproximator::ReservoirApproximator(Eigen::MatrixXd input_weights, Eigen::MatrixXd recurrent_weights,
                                             Eigen::MatrixXd readout, double leak)
    : input_weights_(std::move(input_weights)),
      recurrent_weights_(std::move(recurrent_weights)),
      readout_(std::move(readout)),
      features_(Eigen::VectorXd::Zero(recurrent_weights_.rows())),
      leak_(leak) {
  check();
}

void ReservoirApproximator::check() const {
  const Eigen::Index n = recurrent_weights_.rows();
  if (recurrent_weights_.cols() != n || input_weights_.rows() != n || readout_.cols() != n) {
    throw ConfigurationError("reservoir matrices have inconsistent shapes");
  }
  if (!(leak_ > 0.0 && leak_ <= 1.0)) throw ConfigurationError("reservoir leak must lie in (0, 1]");
  if (!input_weights_.allFinite() || !recurrent_weights_.allFinite() || !readout_.allFinite()) {
    throw ConfigurationError("reservoir matrices must be finite");
  }
  if (!(spectral_radius(recurrent_weights_) < 1.0)) {
    throw ConfigurationError("reservoir recurrence violates the echo-state condition (spectral radius >= 1)");
  }
}

const Eigen::VectorXd& ReservoirApproximator::advance(const Eigen::VectorXd& input) {
  if (input.size() != input_dim()) throw ArgumentError("reservoir input length mismatch");
  const Eigen::VectorXd pre = input_weights_ * input + recurrent_weights_ * features_;
  features_ = (1.0 - leak_) * features_ + leak_ * pre.array().tanh().matrix();
  if (!features_.allFinite()) throw NumericalOverflowError("reservoir features are not finite");
  return features_;
}

Eigen::VectorXd ReservoirApproximator::settled_features(const Eigen::VectorXd& input, int iterations) const {
  if (input.size() != input_dim()) throw ArgumentError("reservoir input length mismatch");
  const Eigen::VectorXd drive = input_weights_ * input;
  Eigen::VectorXd z = Eigen::VectorXd::Zero(feature_count());
  for (int k = 0; k < iterations; ++k) {
    z = (1.0 - leak_) * z + leak_ * (drive + recurrent_weights_ * z).array().tanh().matrix();
  }
  return z;
}

Eigen::VectorXd ReservoirApproximator::settled_output(const Eigen::VectorXd& input, int iterations) const {
  return readout_ * settled_features(input, iterations);
}

void ReservoirApproximator::set_features(const Eigen::VectorXd& z) {
  if (z.size() != feature_count()) throw ArgumentError("feature vector length mismatch");
  features_ = z;
}

void LearnerConfig::validate(bool allow_zero) const {
  const auto bad = [&](double rate) { return !std::isfinite(rate) || rate < 0.0 || (!allow_zero && rate == 0.0); };
  if (bad(critic_rate)) throw ConfigurationError("learner.critic_rate must be positive and finite");
  if (bad(actor_rate)) throw ConfigurationError("learner.actor_rate must be positive and finite");
  if (!std::isfinite(exploration_noise_std) || exploration_noise_std < 0.0) {
    throw ConfigurationError("learner.exploration_noise must be non-negative");
  }
}

void HjbDiagnostics::append(const StepRecord& r) {
  if (!std::isfinite(r.hamiltonian) || !std::isfinite(r.hjb_residual) || !std::isfinite(r.bellman_error)) {
    throw DiagnosticsError("non-finite diagnostics at step " + std::to_string(r.step));
  }
  records.push_back(r);
}

void HjbDiagnostics::write_csv(std::ostream& out) const {
  out << "step,hamiltonian,hjb_residual,bellman_error\n";
  for (const auto& r : records) {
    out << r.step << ',' << r.hamiltonian << ',' << r.hjb_residual << ',' << r.bellman_error << '\n';
  }
}

Eigen::VectorXd critic_evaluate(ReservoirApproximator& critic, const Eigen::VectorXd& v_e) {
  critic.advance(v_e);
  return critic.output();
}

Eigen::VectorXd actor_evaluate(ReservoirApproximator& actor, const Eigen::VectorXd& v_e, double noise_std,
                               std::mt19937_64& rng) {
  actor.advance(v_e);
  Eigen::VectorXd u = actor.output();
  if (noise_std > 0.0) {
    std::normal_distribution<double> noise(0.0, noise_std);
    for (Eigen::Index i = 0; i < u.size(); ++i) u(i) += noise(rng);
  }
  return u;
}

Eigen::VectorXd actor_evaluate(ReservoirApproximator& actor, const Eigen::VectorXd& v_e) {
  actor.advance(v_e);
  return actor.output();
}

double hamiltonian(const Eigen::VectorXd& v_e, const Eigen::VectorXd& u, const Eigen::VectorXd& value_gradient,
                   const AffineSystem& sys, const CostSpec& cost) {
  if (value_gradient.size() != v_e.size()) throw ArgumentError("hamiltonian: gradient length mismatch");
  return utility(v_e, u, cost) + value_gradient.dot(sys.flow(v_e, u));
}

Eigen::VectorXd optimal_control_from_value(const Eigen::VectorXd& v, const Eigen::VectorXd& value_gradient,
                                           const AffineSystem& sys, const CostSpec& cost) {
  if (value_gradient.size() != v.size()) throw ArgumentError("optimal control: gradient length mismatch");
  return -0.5 * cost.solve_R(Eigen::VectorXd(sys.g(v).transpose() * value_gradient));
}

double hjb_residual(const Eigen::VectorXd& v_e, const Eigen::VectorXd& value_gradient, const AffineSystem& sys,
                    const CostSpec& cost) {
  if (value_gradient.size() != v_e.size() || v_e.size() != cost.Q().rows()) {
    throw ArgumentError("hjb_residual: shape mismatch");
  }
  const Eigen::VectorXd gtv = sys.g(v_e).transpose() * value_gradient;
  return v_e.dot(cost.Q() * v_e) + value_gradient.dot(sys.f(v_e)) - 0.25 * gtv.dot(cost.solve_R(gtv));
}

double critic_update(ReservoirApproximator& critic, const Eigen::VectorXd& v_e, const Eigen::VectorXd& u,
                     const Eigen::VectorXd& v_e_dot, const CostSpec& cost, const LearnerConfig& cfg) {
  if (v_e_dot.size() != critic.output_dim()) throw ArgumentError("critic_update: derivative length mismatch");
  const Eigen::VectorXd& z = critic.features();
  const double delta = critic.output().dot(v_e_dot) + utility(v_e, u, cost);
  require_finite(delta, "Bellman residual");
  const double sigma_sq = v_e_dot.squaredNorm() * z.squaredNorm();
  const double normalizer = cfg.normalize ? (1.0 + sigma_sq) * (1.0 + sigma_sq) : 1.0;
  critic.readout() -= (cfg.critic_rate * delta / normalizer) * v_e_dot * z.transpose();
  if (!critic.readout().allFinite()) throw DiagnosticsError("critic readout is not finite (training diverged)");
  return delta;
}

double actor_update(ReservoirApproximator& actor, const ReservoirApproximator& critic, const Eigen::VectorXd& v_e,
                    const AffineSystem& sys, const CostSpec& cost, const LearnerConfig& cfg) {
  const Eigen::VectorXd target = optimal_control_from_value(v_e, critic.output(), sys, cost);
  const Eigen::VectorXd mismatch = actor.output() - target;
  require_finite(mismatch.norm(), "actor mismatch");
  actor.readout() -= cfg.actor_rate * mismatch * actor.features().transpose();
  if (!actor.readout().allFinite()) throw DiagnosticsError("actor readout is not finite (training diverged)");
  return mismatch.norm();
}

std::string to_string(PlasticityKind k) { return k == PlasticityKind::kNone ? "none" : "bounded-hebbian"; }

PlasticityKind parse_plasticity(const std::string& name) {
  if (name == "none") return PlasticityKind::kNone;
  if (name == "bounded-hebbian") return PlasticityKind::kBoundedHebbian;
  throw ConfigurationError("unknown plasticity rule '" + name + "' (expected none or bounded-hebbian)");
}

WeightSet apply_plasticity(const PlasticityRule& rule, const WeightSet& w, const Eigen::VectorXd& pre,
                           const Eigen::VectorXd& post, double dt) {
  if (rule.kind == PlasticityKind::kNone) return w;
  if (pre.size() != w.neurons() || post.size() != w.neurons()) throw ArgumentError("plasticity: activity length mismatch");
  if (!(rule.bound > 0.0)) throw ConfigurationError("plasticity bound must be positive");
  WeightSet next = w;
  const auto idx = w.plastic_indices();
  for (const auto i : idx) {
    for (const auto j : idx) {
      const double updated = next.recurrent(i, j) + rule.rate * dt * post(i) * pre(j);
      next.recurrent(i, j) = std::clamp(updated, -rule.bound, rule.bound);
    }
  }
  for (const auto i : w.fixed_indices()) {
    if (next.recurrent.row(i) != w.recurrent.row(i) || next.recurrent.col(i) != w.recurrent.col(i)) {
      throw InvariantViolation("plasticity rule mutated a fixed recurrent entry");
    }
  }
  return next;
}

ActorCritic::ActorCritic(ReservoirApproximator critic, ReservoirApproximator actor, LearnerConfig config)
    : critic_(std::move(critic)), actor_(std::move(actor)), config_(config) {
  config_.validate();
  if (critic_.input_dim() != critic_.output_dim()) {
    throw ConfigurationError("critic output must have the error-state dimension");
  }
  if (actor_.input_dim() != critic_.input_dim()) throw ConfigurationError("actor and critic input dimensions differ");
}

LearnerStep ActorCritic::step(const Eigen::VectorXd& v_e, const AffineSystem& sys, const CostSpec& cost,
                              double noise_std, std::mt19937_64& rng, bool learn) {
  LearnerStep out;
  out.value_gradient = critic_evaluate(critic_, v_e);
  out.control = actor_evaluate(actor_, v_e, noise_std, rng);
  const Eigen::VectorXd v_e_dot = sys.flow(v_e, out.control);
  out.hamiltonian = hamiltonian(v_e, out.control, out.value_gradient, sys, cost);
  out.hjb_residual = hjb_residual(v_e, out.value_gradient, sys, cost);
  if (learn) {
    out.bellman_error = critic_update(critic_, v_e, out.control, v_e_dot, cost, config_);
    out.actor_error = actor_update(actor_, critic_, v_e, sys, cost, config_);
  } else {
    out.bellman_error = out.hamiltonian;
    out.actor_error = (actor_.output() - optimal_control_from_value(v_e, critic_.output(), sys, cost)).norm();
  }
  return out;
}

Eigen::VectorXd ActorCritic::act(const Eigen::VectorXd& v_e) {
  critic_.advance(v_e);
  return actor_evaluate(actor_, v_e);
}

void ActorCritic::reset_features() {
  critic_.reset_features();
  actor_.reset_features();
}

void ActorCritic::fit_actor(const std::vector<Eigen::VectorXd>& samples,
                            const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& target, double ridge) {
  if (samples.empty()) throw ArgumentError("fit_actor: no samples");
  const Eigen::Index nf = actor_.feature_count();
  const auto count = static_cast<Eigen::Index>(samples.size());
  Eigen::MatrixXd Z(nf, count);
  Eigen::MatrixXd T(actor_.output_dim(), count);
  for (Eigen::Index s = 0; s < count; ++s) {
    const auto& x = samples[static_cast<std::size_t>(s)];
    Z.col(s) = actor_.settled_features(x);
    T.col(s) = target(x);
  }
  const Eigen::MatrixXd gram = Z * Z.transpose() + ridge * Eigen::MatrixXd::Identity(nf, nf);
  actor_.readout() = gram.ldlt().solve(Z * T.transpose()).transpose();
}

}  // namespace adpnet
