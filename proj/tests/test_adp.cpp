#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "adpnet/adp.hpp"
#include "adpnet/errors.hpp"
#include "test_util.hpp"

using namespace adpnet;
using namespace adpnet::testing;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

ReservoirApproximator unit_reservoir(double readout) {
  ReservoirApproximator r(MatrixXd::Ones(1, 1), MatrixXd::Zero(1, 1), MatrixXd::Constant(1, 1, readout), 1.0);
  r.set_features(vec({1}));
  return r;
}

ReservoirSpec spec(std::uint64_t seed, Eigen::Index in = 2, Eigen::Index out = 2) {
  ReservoirSpec s;
  s.input_dim = in;
  s.output_dim = out;
  s.features = 30;
  s.seed = seed;
  return s;
}

LearnerConfig raw_config(double critic, double actor) {
  LearnerConfig c;
  c.critic_rate = critic;
  c.actor_rate = actor;
  c.normalize = false;
  return c;
}

}  // namespace

TEST(Reservoir, ConstructionEnforcesEchoState) {
  EXPECT_THROW(ReservoirApproximator(MatrixXd::Ones(2, 1), MatrixXd::Identity(2, 2), MatrixXd::Zero(1, 2), 0.5),
               ConfigurationError);
  EXPECT_THROW(ReservoirApproximator(MatrixXd::Ones(2, 1), MatrixXd::Zero(2, 2), MatrixXd::Zero(1, 3), 0.5),
               ConfigurationError);
  const ReservoirApproximator r(spec(1));
  EXPECT_NEAR(spectral_radius(r.recurrent_weights()), 0.9, 1e-6);
  EXPECT_EQ(r.readout(), MatrixXd::Zero(2, 30));
}

TEST(CriticEvaluate, ZeroReadoutGivesZero) {
  ReservoirApproximator r(spec(2));
  std::mt19937_64 rng(1);
  for (int i = 0; i < 5; ++i) EXPECT_EQ(critic_evaluate(r, random_vector(2, rng)), VectorXd::Zero(2));
}

TEST(Approximators, ReadoutLinearity) {
  std::mt19937_64 rng(2);
  ReservoirApproximator r(spec(3));
  r.readout() = random_matrix(2, 30, rng);
  r.set_features(random_vector(30, rng));
  const VectorXd base = r.output();
  r.readout() *= 2.0;
  EXPECT_TRUE(r.output().isApprox(2.0 * base, 1e-15));
  r.readout() *= -1.5;
  EXPECT_TRUE(r.output().isApprox(-3.0 * base, 1e-15));
}

TEST(ActorEvaluate, ZeroReadoutNoNoiseGivesZero) {
  ReservoirApproximator r(spec(4));
  std::mt19937_64 rng(3);
  EXPECT_EQ(actor_evaluate(r, vec({0.3, -0.2}), 0.0, rng), VectorXd::Zero(2));
  EXPECT_EQ(actor_evaluate(r, vec({0.3, -0.2})), VectorXd::Zero(2));
}

TEST(ActorEvaluate, NoiseHasRequestedSpread) {
  ReservoirApproximator r(spec(5, 1, 1));
  std::mt19937_64 rng(4);
  double sum = 0.0;
  double sq = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const double u = actor_evaluate(r, vec({0.1}), 0.5, rng)(0);
    sum += u;
    sq += u * u;
  }
  EXPECT_NEAR(sum / n, 0.0, 0.02);
  EXPECT_NEAR(std::sqrt(sq / n), 0.5, 0.02);
}

TEST(Reservoir, EchoStateForgetsInitialFeatures) {
  std::mt19937_64 rng(5);
  ReservoirApproximator a(spec(6));
  ReservoirApproximator b = a;
  a.set_features(random_vector(30, rng));
  b.set_features(random_vector(30, rng));
  const double start = (a.features() - b.features()).norm();
  for (int i = 0; i < 500; ++i) {
    const VectorXd x = random_vector(2, rng);
    a.advance(x);
    b.advance(x);
  }
  EXPECT_LE((a.features() - b.features()).norm(), start / 10.0);
}

TEST(Hamiltonian, Examples) {
  const auto sys = AffineSystem::linear(-MatrixXd::Identity(1, 1), MatrixXd::Identity(1, 1));
  const auto cost = CostSpec::identity(1, 1, 1, 1, 1);
  EXPECT_EQ(hamiltonian(vec({0}), vec({0}), vec({0}), sys, cost), 0.0);
  EXPECT_DOUBLE_EQ(hamiltonian(vec({1}), vec({0}), vec({2}), sys, cost), -1.0);
  const auto lqr = AffineSystem::linear(MatrixXd::Zero(1, 1), MatrixXd::Identity(1, 1));
  for (const double x : {-1.0, -0.3, 0.7, 2.0}) {
    EXPECT_NEAR(hamiltonian(vec({x}), vec({-x}), vec({2 * x}), lqr, cost), 0.0, 1e-14);
  }
  EXPECT_THROW(hamiltonian(vec({1}), vec({0}), vec({1, 2}), sys, cost), ArgumentError);
}

TEST(OptimalControl, Examples) {
  const auto sys = AffineSystem::linear(MatrixXd::Zero(1, 1), MatrixXd::Identity(1, 1));
  const auto cost = CostSpec::identity(1, 1, 1, 1, 1);
  EXPECT_EQ(optimal_control_from_value(vec({3}), vec({0}), sys, cost), vec({0}));
  EXPECT_DOUBLE_EQ(optimal_control_from_value(vec({0.7}), vec({1.4}), sys, cost)(0), -0.7);
}

TEST(OptimalControl, MinimizesHamiltonian) {
  std::mt19937_64 rng(6);
  const auto sys = AffineSystem::linear(random_matrix(3, 3, rng), random_matrix(3, 2, rng));
  const CostSpec cost(random_spd(3, rng, 0.0), random_spd(2, rng), 1.0);
  for (int s = 0; s < 20; ++s) {
    const VectorXd v = random_vector(3, rng);
    const VectorXd grad = random_vector(3, rng, 3.0);
    const VectorXd u = optimal_control_from_value(v, grad, sys, cost);
    const double best = hamiltonian(v, u, grad, sys, cost);
    for (int k = 0; k < 50; ++k) {
      EXPECT_LE(best, hamiltonian(v, u + random_vector(2, rng), grad, sys, cost) + 1e-12);
    }
  }
}

TEST(HjbResidual, Examples) {
  const auto lqr = AffineSystem::linear(MatrixXd::Zero(1, 1), MatrixXd::Identity(1, 1));
  const auto cost = CostSpec::identity(1, 1, 1, 1, 1);
  EXPECT_EQ(hjb_residual(vec({0}), vec({0}), lqr, cost), 0.0);
  for (const double x : {-1.0, 0.4, 3.0}) EXPECT_NEAR(hjb_residual(vec({x}), vec({2 * x}), lqr, cost), 0.0, 1e-14);
  EXPECT_DOUBLE_EQ(hjb_residual(vec({1}), vec({1}), lqr, cost), 0.75);
}

TEST(HjbResidual, EqualsHamiltonianAtStationaryControl) {
  std::mt19937_64 rng(7);
  const auto sys = AffineSystem::linear(random_matrix(2, 2, rng), random_matrix(2, 2, rng));
  const CostSpec cost(random_spd(2, rng), random_spd(2, rng), 1.0);
  for (int i = 0; i < 100; ++i) {
    const VectorXd v = random_vector(2, rng);
    const VectorXd grad = random_vector(2, rng);
    EXPECT_NEAR(hjb_residual(v, grad, sys, cost),
                hamiltonian(v, optimal_control_from_value(v, grad, sys, cost), grad, sys, cost), 1e-10);
  }
}

TEST(CriticUpdate, HandCase) {
  auto critic = unit_reservoir(0.0);
  const double delta = critic_update(critic, vec({1}), vec({0}), vec({-1}), CostSpec::identity(1, 1, 1, 1, 1),
                                     raw_config(0.1, 0.1));
  EXPECT_DOUBLE_EQ(delta, 1.0);
  EXPECT_DOUBLE_EQ(critic.readout()(0, 0), 0.1);
}

TEST(CriticUpdate, ZeroResidualLeavesWeights) {
  // W z . v_dot + l = 0.5 * (-2) + 1 = 0
  auto critic = unit_reservoir(0.5);
  const double delta = critic_update(critic, vec({1}), vec({0}), vec({-2}), CostSpec::identity(1, 1, 1, 1, 1),
                                     raw_config(0.1, 0.1));
  EXPECT_EQ(delta, 0.0);
  EXPECT_EQ(critic.readout()(0, 0), 0.5);
}

TEST(CriticUpdate, NormalizationShrinksStep) {
  auto raw = unit_reservoir(0.0);
  auto normalized = unit_reservoir(0.0);
  LearnerConfig cfg = raw_config(0.1, 0.1);
  critic_update(raw, vec({1}), vec({0}), vec({-1}), CostSpec::identity(1, 1, 1, 1, 1), cfg);
  cfg.normalize = true;
  critic_update(normalized, vec({1}), vec({0}), vec({-1}), CostSpec::identity(1, 1, 1, 1, 1), cfg);
  EXPECT_DOUBLE_EQ(normalized.readout()(0, 0), raw.readout()(0, 0) / 4.0);
}

TEST(CriticUpdate, NonFiniteResidualIsDiagnosticsError) {
  auto critic = unit_reservoir(0.0);
  EXPECT_THROW(critic_update(critic, vec({NAN}), vec({0}), vec({-1}), CostSpec::identity(1, 1, 1, 1, 1),
                             raw_config(0.1, 0.1)),
               DiagnosticsError);
}

TEST(ActorUpdate, HandCase) {
  auto actor = unit_reservoir(0.0);
  const auto critic = unit_reservoir(2.0);
  const auto sys = AffineSystem::linear(MatrixXd::Zero(1, 1), MatrixXd::Identity(1, 1));
  const double mismatch = actor_update(actor, critic, vec({1}), sys, CostSpec::identity(1, 1, 1, 1, 1), raw_config(0.1, 0.1));
  EXPECT_DOUBLE_EQ(mismatch, 1.0);
  EXPECT_DOUBLE_EQ(actor.readout()(0, 0), -0.1);
}

TEST(ActorUpdate, ZeroReadoutsDoNothing) {
  auto actor = unit_reservoir(0.0);
  const auto critic = unit_reservoir(0.0);
  const auto sys = AffineSystem::linear(MatrixXd::Zero(1, 1), MatrixXd::Identity(1, 1));
  EXPECT_EQ(actor_update(actor, critic, vec({1}), sys, CostSpec::identity(1, 1, 1, 1, 1), raw_config(0.1, 0.1)), 0.0);
  EXPECT_EQ(actor.readout()(0, 0), 0.0);
}

TEST(ActorUpdate, ConvergesToCriticImpliedControlOnFrozenFeatures) {
  std::mt19937_64 rng(8);
  ReservoirApproximator critic(spec(9));
  ReservoirApproximator actor(spec(10));
  critic.readout() = random_matrix(2, 30, rng);
  const VectorXd v = vec({0.4, -0.3});
  for (int i = 0; i < 50; ++i) {
    critic.advance(v);
    actor.advance(v);
  }
  const auto sys = AffineSystem::linear(random_matrix(2, 2, rng), random_matrix(2, 2, rng));
  const CostSpec cost(MatrixXd::Identity(2, 2), random_spd(2, rng), 1.0);
  const double rate = 0.5 / actor.features().squaredNorm();
  double previous = INFINITY;
  double last = 0.0;
  for (int i = 0; i < 200; ++i) {
    last = actor_update(actor, critic, v, sys, cost, raw_config(0.1, rate));
    if (i > 5) EXPECT_LE(last, previous);
    previous = last;
  }
  EXPECT_LT(last, 1e-12);
  EXPECT_LE((actor.output() - optimal_control_from_value(v, critic.output(), sys, cost)).norm(), 1e-12);
}

TEST(ActorCritic, ZeroRatesChangeNoWeights) {
  std::mt19937_64 rng(11);
  ReservoirApproximator critic(spec(12));
  ReservoirApproximator actor(spec(13));
  critic.readout() = random_matrix(2, 30, rng);
  actor.readout() = random_matrix(2, 30, rng);
  ActorCritic learner(critic, actor, raw_config(0.0, 0.0));
  const auto sys = AffineSystem::linear(-MatrixXd::Identity(2, 2), MatrixXd::Identity(2, 2));
  const auto cost = CostSpec::identity(2, 2, 1, 1, 1);
  for (int i = 0; i < 100; ++i) learner.step(random_vector(2, rng), sys, cost, 0.1, rng);
  EXPECT_EQ(learner.critic().readout(), critic.readout());
  EXPECT_EQ(learner.actor().readout(), actor.readout());
  EXPECT_EQ(learner.critic().recurrent_weights(), critic.recurrent_weights());
  EXPECT_EQ(learner.actor().input_weights(), actor.input_weights());
}

TEST(ActorCritic, FitActorReproducesTargetPolicy) {
  ReservoirSpec s = spec(14, 1, 1);
  s.features = 60;
  ActorCritic learner{ReservoirApproximator(s), ReservoirApproximator(s), raw_config(0.01, 0.01)};
  std::vector<VectorXd> samples;
  for (int i = 0; i <= 40; ++i) samples.push_back(vec({-1.0 + 0.05 * i}));
  learner.fit_actor(samples, [](const VectorXd& x) -> VectorXd { return -0.5 * x; });
  for (const auto& x : samples) EXPECT_NEAR(learner.actor().settled_output(x)(0), -0.5 * x(0), 1e-3);
}

TEST(LearnerConfig, Validation) {
  EXPECT_NO_THROW(raw_config(0.0, 0.0).validate());
  EXPECT_THROW(raw_config(0.0, 0.1).validate(false), ConfigurationError);
  EXPECT_THROW(raw_config(-0.1, 0.1).validate(), ConfigurationError);
  EXPECT_THROW(raw_config(NAN, 0.1).validate(), ConfigurationError);
}

TEST(Diagnostics, NanTriggersErrorAndCsvHasHeader) {
  HjbDiagnostics d;
  d.append({0, 1.0, 2.0, 3.0});
  EXPECT_THROW(d.append({1, NAN, 0.0, 0.0}), DiagnosticsError);
  std::ostringstream out;
  d.write_csv(out);
  EXPECT_EQ(out.str(), "step,hamiltonian,hjb_residual,bellman_error\n0,1,2,3\n");
}

TEST(Plasticity, NoneIsIdentity) {
  std::mt19937_64 rng(15);
  const auto w = weights(random_matrix(2, 1, rng), random_matrix(2, 2, rng), random_matrix(1, 2, rng));
  const auto out = apply_plasticity({PlasticityKind::kNone, 1.0, 1.0}, w, vec({1, 1}), vec({1, 1}), 1.0);
  EXPECT_EQ(out.recurrent, w.recurrent);
}

TEST(Plasticity, SingleHebbianStep) {
  const auto w = weights(MatrixXd::Zero(1, 1), MatrixXd::Zero(1, 1), MatrixXd::Zero(1, 1));
  const auto out = apply_plasticity({PlasticityKind::kBoundedHebbian, 0.1, 1.0}, w, vec({1}), vec({1}), 1.0);
  EXPECT_DOUBLE_EQ(out.recurrent(0, 0), 0.1);
}

TEST(Plasticity, ClampAndFixedEntriesUnderRandomActivity) {
  std::mt19937_64 rng(16);
  auto w = weights(random_matrix(4, 1, rng), random_matrix(4, 4, rng, 0.5), random_matrix(1, 4, rng),
                   {false, true, true, true});
  const MatrixXd original = w.recurrent;
  const PlasticityRule rule{PlasticityKind::kBoundedHebbian, 2.0, 0.8};
  for (int i = 0; i < 10000; ++i) {
    w = apply_plasticity(rule, w, random_vector(4, rng, 2.0), random_vector(4, rng, 2.0), 0.1);
  }
  EXPECT_LE(w.recurrent.bottomRightCorner(3, 3).cwiseAbs().maxCoeff(), 0.8);
  EXPECT_EQ(w.recurrent.row(0), original.row(0));
  EXPECT_EQ(w.recurrent.col(0), original.col(0));
}
