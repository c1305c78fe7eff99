#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "adpnet/errors.hpp"

namespace adpnet {

enum class Activation { kTanh, kIdentity };
enum class Integrator { kRk4, kEuler };

std::string to_string(Activation a);
std::string to_string(Integrator i);
Activation parse_activation(const std::string& name);
Integrator parse_integrator(const std::string& name);

double activate(Activation phi, double x);
Eigen::VectorXd activate(Activation phi, const Eigen::VectorXd& x);

/// Membrane potentials of the recurrent network at time `t`.
struct NetworkState {
  Eigen::VectorXd v;
  double t = 0.0;
};

/// Encoder, recurrent and decoder weights of the feedforward pathway.
///
/// Neurons are ordered fixed-first: indices where `plastic_mask` is false
/// belong to the fixed partition, the rest are driven by the learner.
struct WeightSet {
  Eigen::MatrixXd encoder;    // n_r x d_in
  Eigen::MatrixXd recurrent;  // n_r x n_r
  Eigen::MatrixXd decoder;    // c x n_r
  std::vector<bool> plastic_mask;
  std::uint64_t seed = 0;

  Eigen::Index neurons() const { return recurrent.rows(); }
  Eigen::Index inputs() const { return encoder.cols(); }
  Eigen::Index outputs() const { return decoder.rows(); }

  std::vector<Eigen::Index> plastic_indices() const;
  std::vector<Eigen::Index> fixed_indices() const;

  /// Recurrent entries whose row and column are both plastic.
  Eigen::MatrixXd plastic_block() const;

  /// Throws ConfigurationError on inconsistent shapes or non-finite entries.
  void validate() const;
};

/// Spike times of a single neuron and the exponential filter constant.
struct SpikeTrain {
  std::vector<double> spike_times;
  double tau = 1.0;

  void validate() const;
};

/// Per-neuron leak rates; the leak term is -alpha_i * v_i.
struct LeakSpec {
  Eigen::VectorXd alpha;

  static LeakSpec uniform(Eigen::Index neurons, double rate);
  void validate() const;
};

struct WeightInit {
  Eigen::Index neurons = 1;
  Eigen::Index fixed = 0;
  Eigen::Index inputs = 1;
  Eigen::Index outputs = 1;
  double input_scale = 1.0;
  double density = 0.1;
  double spectral_radius = 0.9;
  std::uint64_t seed = 0;
};

/// Random encoder (dense uniform(-1,1) * input_scale) and sparse recurrent
/// matrix rescaled to the requested spectral radius. Every row of the
/// recurrent matrix receives at least one nonzero entry. The decoder is zero
/// until pre-trained.
WeightSet make_weights(const WeightInit& init);

double spectral_radius(const Eigen::MatrixXd& m);

/// I = W_E phi(x) + W_r phi(v). With `activate_input` false the input is fed
/// to the encoder unchanged.
Eigen::VectorXd neuron_input(const NetworkState& state, const Eigen::VectorXd& x, const WeightSet& w,
                             Activation phi, bool activate_input = true);

/// One fixed step of a time-varying vector field `field(t, v)`.
template <class Field>
Eigen::VectorXd integrate_step(const Field& field, const Eigen::VectorXd& v, double t, double dt,
                               Integrator method) {
  if (method == Integrator::kEuler) {
    return v + dt * field(t, v);
  }
  const double half = 0.5 * dt;
  const Eigen::VectorXd k1 = field(t, v);
  const Eigen::VectorXd k2 = field(t + half, (v + half * k1).eval());
  const Eigen::VectorXd k3 = field(t + half, (v + half * k2).eval());
  const Eigen::VectorXd k4 = field(t + dt, (v + dt * k3).eval());
  return v + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

/// Advances v' = -alpha .* v + I with the input current held over the step.
NetworkState step_dynamics(const NetworkState& state, const Eigen::VectorXd& current, const LeakSpec& leak,
                           double dt, Integrator method = Integrator::kRk4);

/// Exponentially filtered spike activity sum_{s<=t} exp(-(t-s)/tau)/tau.
double filter_spikes(const SpikeTrain& train, double t);

Eigen::VectorXd decode(const Eigen::VectorXd& v, const WeightSet& w);

}  // namespace adpnet
