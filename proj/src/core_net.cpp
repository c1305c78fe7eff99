#include "adpnet/core_net.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

namespace adpnet {

std::string to_string(Activation a) { return a == Activation::kTanh ? "tanh" : "identity"; }

std::string to_string(Integrator i) { return i == Integrator::kRk4 ? "rk4" : "euler"; }

Activation parse_activation(const std::string& name) {
  if (name == "tanh") return Activation::kTanh;
  if (name == "identity") return Activation::kIdentity;
  throw ConfigurationError("unknown activation '" + name + "' (expected tanh or identity)");
}

Integrator parse_integrator(const std::string& name) {
  if (name == "rk4") return Integrator::kRk4;
  if (name == "euler") return Integrator::kEuler;
  throw ConfigurationError("unknown integrator '" + name + "' (expected rk4 or euler)");
}

double activate(Activation phi, double x) { return phi == Activation::kTanh ? std::tanh(x) : x; }

Eigen::VectorXd activate(Activation phi, const Eigen::VectorXd& x) {
  if (phi == Activation::kIdentity) return x;
  return x.array().tanh().matrix();
}

std::vector<Eigen::Index> WeightSet::plastic_indices() const {
  std::vector<Eigen::Index> out;
  for (std::size_t i = 0; i < plastic_mask.size(); ++i) {
    if (plastic_mask[i]) out.push_back(static_cast<Eigen::Index>(i));
  }
  return out;
}

std::vector<Eigen::Index> WeightSet::fixed_indices() const {
  std::vector<Eigen::Index> out;
  for (std::size_t i = 0; i < plastic_mask.size(); ++i) {
    if (!plastic_mask[i]) out.push_back(static_cast<Eigen::Index>(i));
  }
  return out;
}

Eigen::MatrixXd WeightSet::plastic_block() const {
  const auto idx = plastic_indices();
  const auto n = static_cast<Eigen::Index>(idx.size());
  Eigen::MatrixXd block(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) block(i, j) = recurrent(idx[i], idx[j]);
  }
  return block;
}

void WeightSet::validate() const {
  const Eigen::Index n = recurrent.rows();
  if (recurrent.cols() != n) throw ConfigurationError("recurrent matrix must be square");
  if (encoder.rows() != n) throw ConfigurationError("encoder rows must equal neuron count");
  if (decoder.cols() != n) throw ConfigurationError("decoder columns must equal neuron count");
  if (static_cast<Eigen::Index>(plastic_mask.size()) != n) {
    throw ConfigurationError("plastic mask length must equal neuron count");
  }
  if (!encoder.allFinite() || !recurrent.allFinite() || !decoder.allFinite()) {
    throw ConfigurationError("weight matrices must be finite");
  }
}

void SpikeTrain::validate() const {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw ConfigurationError("spike filter tau must be positive");
  for (std::size_t i = 1; i < spike_times.size(); ++i) {
    if (!(spike_times[i] > spike_times[i - 1])) {
      throw ConfigurationError("spike times must be strictly increasing");
    }
  }
}

LeakSpec LeakSpec::uniform(Eigen::Index neurons, double rate) {
  LeakSpec leak{Eigen::VectorXd::Constant(neurons, rate)};
  leak.validate();
  return leak;
}

void LeakSpec::validate() const {
  if (!alpha.allFinite() || (alpha.array() < 0.0).any()) {
    throw ConfigurationError("leak rates must be finite and non-negative");
  }
}

double spectral_radius(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 0.0;
  Eigen::EigenSolver<Eigen::MatrixXd> solver(m, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) throw SolverError("eigenvalue computation failed");
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

WeightSet make_weights(const WeightInit& init) {
  if (init.neurons <= 0 || init.inputs <= 0 || init.outputs <= 0) {
    throw ConfigurationError("neurons, inputs and outputs must be positive");
  }
  if (init.fixed < 0 || init.fixed >= init.neurons) {
    throw ConfigurationError("fixed neuron count must leave at least one plastic neuron");
  }
  if (!(init.density > 0.0 && init.density <= 1.0)) throw ConfigurationError("density must lie in (0, 1]");

  std::mt19937_64 rng(init.seed);
  std::uniform_real_distribution<double> uniform(-1.0, 1.0);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::uniform_int_distribution<Eigen::Index> column(0, init.neurons - 1);

  WeightSet w;
  w.seed = init.seed;
  w.encoder.resize(init.neurons, init.inputs);
  for (Eigen::Index i = 0; i < w.encoder.rows(); ++i) {
    for (Eigen::Index j = 0; j < w.encoder.cols(); ++j) w.encoder(i, j) = init.input_scale * uniform(rng);
  }

  w.recurrent = Eigen::MatrixXd::Zero(init.neurons, init.neurons);
  for (Eigen::Index i = 0; i < init.neurons; ++i) {
    bool any = false;
    for (Eigen::Index j = 0; j < init.neurons; ++j) {
      if (coin(rng) < init.density) {
        w.recurrent(i, j) = uniform(rng);
        any = true;
      }
    }
    if (!any) w.recurrent(i, column(rng)) = uniform(rng);
  }
  const double radius = spectral_radius(w.recurrent);
  if (radius > 1e-12) w.recurrent *= init.spectral_radius / radius;

  w.decoder = Eigen::MatrixXd::Zero(init.outputs, init.neurons);
  w.plastic_mask.assign(static_cast<std::size_t>(init.neurons), true);
  std::fill_n(w.plastic_mask.begin(), init.fixed, false);
  return w;
}

Eigen::VectorXd neuron_input(const NetworkState& state, const Eigen::VectorXd& x, const WeightSet& w,
                             Activation phi, bool activate_input) {
  if (x.size() != w.inputs()) throw ConfigurationError("input length does not match encoder columns");
  if (state.v.size() != w.neurons()) throw ConfigurationError("state length does not match neuron count");
  const Eigen::VectorXd drive = activate_input ? activate(phi, x) : x;
  Eigen::VectorXd current = w.encoder * drive + w.recurrent * activate(phi, state.v);
  if (!current.allFinite()) throw NumericalOverflowError("neuron input current is not finite");
  return current;
}

NetworkState step_dynamics(const NetworkState& state, const Eigen::VectorXd& current, const LeakSpec& leak,
                           double dt, Integrator method) {
  if (dt < 0.0) throw ArgumentError("step_dynamics: dt must be non-negative");
  if (current.size() != state.v.size() || leak.alpha.size() != state.v.size()) {
    throw ConfigurationError("step_dynamics: current and leak must match state length");
  }
  if (dt == 0.0) return state;
  const auto field = [&](double, const Eigen::VectorXd& v) -> Eigen::VectorXd {
    return (-leak.alpha.array() * v.array()).matrix() + current;
  };
  NetworkState next{integrate_step(field, state.v, state.t, dt, method), state.t + dt};
  if (!next.v.allFinite()) throw NumericalOverflowError("membrane potential is not finite");
  return next;
}

double filter_spikes(const SpikeTrain& train, double t) {
  train.validate();
  if (!std::isfinite(t)) throw ArgumentError("filter_spikes: time must be finite");
  double q = 0.0;
  for (const double s : train.spike_times) {
    if (s > t) break;
    q += std::exp(-(t - s) / train.tau) / train.tau;
  }
  return q;
}

Eigen::VectorXd decode(const Eigen::VectorXd& v, const WeightSet& w) {
  if (v.size() != w.decoder.cols()) throw ConfigurationError("decode: state length does not match decoder");
  return w.decoder * v;
}

}  // namespace adpnet
