#include <cmath>

#include <gtest/gtest.h>

#include "adpnet/core_net.hpp"
#include "adpnet/errors.hpp"
#include "test_util.hpp"

using namespace adpnet;
using namespace adpnet::testing;
using Eigen::MatrixXd;
using Eigen::VectorXd;

TEST(NeuronInput, ZeroStateAndInputGiveZero) {
  std::mt19937_64 rng(1);
  const auto w = weights(random_matrix(3, 2, rng), random_matrix(3, 3, rng), random_matrix(1, 3, rng));
  const VectorXd I = neuron_input({VectorXd::Zero(3), 0.0}, VectorXd::Zero(2), w, Activation::kTanh);
  EXPECT_EQ(I, VectorXd::Zero(3));
}

TEST(NeuronInput, IdentityEncoderPassesInput) {
  const auto w = weights(MatrixXd::Identity(2, 2), MatrixXd::Zero(2, 2), MatrixXd::Identity(2, 2));
  const VectorXd I = neuron_input({VectorXd::Zero(2), 0.0}, vec({1, 2}), w, Activation::kIdentity);
  EXPECT_EQ(I, vec({1, 2}));
}

TEST(NeuronInput, RecurrentSwapUnderTanh) {
  const auto w = weights(MatrixXd::Zero(2, 1), mat(2, 2, {0, 1, 1, 0}), MatrixXd::Identity(2, 2));
  const VectorXd I = neuron_input({vec({1, -1}), 0.0}, VectorXd::Zero(1), w, Activation::kTanh);
  EXPECT_NEAR(I(0), -0.76159, 1e-5);
  EXPECT_NEAR(I(1), 0.76159, 1e-5);
  EXPECT_DOUBLE_EQ(I(0), std::tanh(-1.0));
}

TEST(NeuronInput, InputActivationIsOptional) {
  const auto w = weights(MatrixXd::Identity(1, 1), MatrixXd::Zero(1, 1), MatrixXd::Identity(1, 1));
  EXPECT_DOUBLE_EQ(neuron_input({VectorXd::Zero(1), 0.0}, vec({2}), w, Activation::kTanh)(0), std::tanh(2.0));
  EXPECT_DOUBLE_EQ(neuron_input({VectorXd::Zero(1), 0.0}, vec({2}), w, Activation::kTanh, false)(0), 2.0);
}

TEST(NeuronInput, ShapeMismatchIsConfigurationError) {
  const auto w = weights(MatrixXd::Identity(2, 2), MatrixXd::Zero(2, 2), MatrixXd::Identity(2, 2));
  EXPECT_THROW(neuron_input({VectorXd::Zero(3), 0.0}, vec({1, 2}), w, Activation::kTanh), ConfigurationError);
  EXPECT_THROW(neuron_input({VectorXd::Zero(2), 0.0}, vec({1}), w, Activation::kTanh), ConfigurationError);
}

TEST(NeuronInput, NonFiniteResultIsOverflow) {
  const auto w = weights(MatrixXd::Identity(1, 1), MatrixXd::Zero(1, 1), MatrixXd::Identity(1, 1));
  EXPECT_THROW(neuron_input({VectorXd::Zero(1), 0.0}, vec({INFINITY}), w, Activation::kIdentity), NumericalOverflowError);
}

TEST(StepDynamics, ZeroStepIsIdentity) {
  std::mt19937_64 rng(2);
  const NetworkState s{random_vector(4, rng), 1.5};
  const auto next = step_dynamics(s, random_vector(4, rng), LeakSpec::uniform(4, 1.0), 0.0);
  EXPECT_EQ(next.v, s.v);
  EXPECT_EQ(next.t, s.t);
}

TEST(StepDynamics, EulerSingleStep) {
  const auto next = step_dynamics({vec({1}), 0.0}, vec({0}), LeakSpec::uniform(1, 1.0), 0.1, Integrator::kEuler);
  EXPECT_DOUBLE_EQ(next.v(0), 0.9);
  EXPECT_DOUBLE_EQ(next.t, 0.1);
}

TEST(StepDynamics, Rk4MatchesExponential) {
  NetworkState s{vec({1}), 0.0};
  for (int i = 0; i < 100; ++i) s = step_dynamics(s, vec({0}), LeakSpec::uniform(1, 1.0), 0.01);
  EXPECT_NEAR(s.v(0), 0.367879, 1e-6);
  EXPECT_NEAR(s.t, 1.0, 1e-12);
}

TEST(StepDynamics, NegativeStepRejected) {
  EXPECT_THROW(step_dynamics({vec({1}), 0.0}, vec({0}), LeakSpec::uniform(1, 1.0), -0.1), ArgumentError);
}

TEST(StepDynamics, OverflowDetected) {
  EXPECT_THROW(step_dynamics({vec({1e308}), 0.0}, vec({1e308}), LeakSpec::uniform(1, 0.0), 10.0), NumericalOverflowError);
}

TEST(StepDynamics, LeakOnlyDecayIsMonotoneAndAccurate) {
  const LeakSpec leak{vec({0.5, 1.0, 2.0})};
  const VectorXd v0 = vec({1.0, -2.0, 0.5});
  NetworkState s{v0, 0.0};
  const double dt = 0.01 / 2.0;
  double previous = v0.norm();
  for (int i = 1; i <= 2000; ++i) {
    s = step_dynamics(s, VectorXd::Zero(3), leak, dt);
    EXPECT_LE(s.v.norm(), previous);
    previous = s.v.norm();
    for (Eigen::Index k = 0; k < 3; ++k) {
      const double expected = v0(k) * std::exp(-leak.alpha(k) * i * dt);
      ASSERT_NEAR(s.v(k), expected, 1e-5 * std::abs(expected));
    }
  }
}

double decay_error(Integrator method, double dt) {
  NetworkState s{vec({1}), 0.0};
  const long steps = std::lround(1.0 / dt);
  for (long i = 0; i < steps; ++i) s = step_dynamics(s, vec({0}), LeakSpec::uniform(1, 1.0), dt, method);
  return std::abs(s.v(0) - std::exp(-1.0));
}

TEST(StepDynamics, IntegratorOrders) {
  for (const double dt : {0.1, 0.05, 0.02}) {
    const double euler = decay_error(Integrator::kEuler, dt) / decay_error(Integrator::kEuler, dt / 2);
    const double rk4 = decay_error(Integrator::kRk4, dt) / decay_error(Integrator::kRk4, dt / 2);
    EXPECT_GE(euler, 1.6);
    EXPECT_LE(euler, 2.4);
    EXPECT_GE(rk4, 10.0);
    EXPECT_LE(rk4, 22.0);
  }
}

TEST(FilterSpikes, Examples) {
  EXPECT_EQ(filter_spikes({{}, 1.0}, 3.0), 0.0);
  EXPECT_NEAR(filter_spikes({{0.0}, 1.0}, 1.0), 0.367879, 1e-6);
  EXPECT_NEAR(filter_spikes({{0.0, 1.0}, 1.0}, 1.0), 1.367879, 1e-6);
  EXPECT_EQ(filter_spikes({{2.0}, 1.0}, 1.0), 0.0);
}

TEST(FilterSpikes, SuperpositionNonNegativityAndDecay) {
  const SpikeTrain a{{0.1, 0.4, 0.9}, 0.3};
  const SpikeTrain b{{0.2, 0.5}, 0.3};
  const SpikeTrain both{{0.1, 0.2, 0.4, 0.5, 0.9}, 0.3};
  for (double t = 0.0; t <= 2.0; t += 0.05) {
    EXPECT_NEAR(filter_spikes(both, t), filter_spikes(a, t) + filter_spikes(b, t), 1e-12);
    EXPECT_GE(filter_spikes(both, t), 0.0);
  }
  const double q1 = filter_spikes(both, 1.0);
  const double q2 = filter_spikes(both, 1.7);
  EXPECT_NEAR(q2, q1 * std::exp(-0.7 / 0.3), 1e-12 * q1);
}

TEST(FilterSpikes, InvalidTrainsRejected) {
  EXPECT_THROW(filter_spikes({{0.0}, 0.0}, 1.0), ConfigurationError);
  EXPECT_THROW(filter_spikes({{1.0, 0.5}, 1.0}, 1.0), ConfigurationError);
  EXPECT_THROW(filter_spikes({{0.0}, 1.0}, NAN), ArgumentError);
}

TEST(Decode, Examples) {
  std::mt19937_64 rng(3);
  const VectorXd v = random_vector(3, rng);
  EXPECT_EQ(decode(v, weights(MatrixXd::Zero(3, 1), MatrixXd::Zero(3, 3), MatrixXd::Identity(3, 3))), v);
  EXPECT_EQ(decode(vec({2, 3}), weights(MatrixXd::Zero(2, 1), MatrixXd::Zero(2, 2), mat(1, 2, {1, 1})))(0), 5.0);
}

TEST(Decode, Linearity) {
  std::mt19937_64 rng(4);
  const auto w = weights(MatrixXd::Zero(4, 1), MatrixXd::Zero(4, 4), random_matrix(2, 4, rng));
  for (int i = 0; i < 20; ++i) {
    const VectorXd v1 = random_vector(4, rng);
    const VectorXd v2 = random_vector(4, rng);
    const double a = random_vector(1, rng, 3.0)(0);
    const double b = random_vector(1, rng, 3.0)(0);
    EXPECT_LE((decode(a * v1 + b * v2, w) - (a * decode(v1, w) + b * decode(v2, w))).norm(), 1e-13);
  }
  EXPECT_THROW(decode(VectorXd::Zero(3), w), ConfigurationError);
}

TEST(MakeWeights, SpectralRadiusPartitionAndSeed) {
  WeightInit init;
  init.neurons = 50;
  init.fixed = 10;
  init.inputs = 2;
  init.outputs = 2;
  init.seed = 9;
  const WeightSet w = make_weights(init);
  EXPECT_NEAR(spectral_radius(w.recurrent), 0.9, 1e-9);
  EXPECT_EQ(w.fixed_indices().size(), 10u);
  EXPECT_EQ(w.plastic_indices().size(), 40u);
  EXPECT_FALSE(w.plastic_mask.front());
  EXPECT_TRUE(w.plastic_mask.back());
  EXPECT_TRUE(w.encoder.cwiseAbs().maxCoeff() <= 1.0);
  EXPECT_EQ(w.decoder, MatrixXd::Zero(2, 50));
  for (Eigen::Index i = 0; i < 50; ++i) EXPECT_GT(w.recurrent.row(i).cwiseAbs().sum(), 0.0);
  EXPECT_EQ(make_weights(init).recurrent, w.recurrent);
  init.seed = 10;
  EXPECT_NE(make_weights(init).recurrent, w.recurrent);
}

TEST(WeightSet, ValidateRejectsBadShapes) {
  auto w = weights(MatrixXd::Zero(2, 1), MatrixXd::Zero(2, 2), MatrixXd::Zero(1, 2));
  EXPECT_NO_THROW(w.validate());
  w.decoder = MatrixXd::Zero(1, 3);
  EXPECT_THROW(w.validate(), ConfigurationError);
  w.decoder = MatrixXd::Zero(1, 2);
  w.recurrent(0, 0) = NAN;
  EXPECT_THROW(w.validate(), ConfigurationError);
}

TEST(LeakSpec, RejectsNegative) {
  EXPECT_THROW((LeakSpec{vec({1.0, -0.1})}.validate()), ConfigurationError);
  EXPECT_NO_THROW(LeakSpec::uniform(3, 0.0).validate());
}
