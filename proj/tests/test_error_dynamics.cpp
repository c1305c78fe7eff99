#include <cmath>

#include <gtest/gtest.h>

#include "adpnet/error_dynamics.hpp"
#include "adpnet/errors.hpp"
#include "test_util.hpp"

using namespace adpnet;
using namespace adpnet::testing;
using Eigen::MatrixXd;
using Eigen::VectorXd;

TEST(OutputError, Examples) {
  EXPECT_EQ(output_error(vec({1, 2}), vec({1, 2})), VectorXd::Zero(2));
  EXPECT_EQ(output_error(vec({1, 2}), vec({0, 4})), vec({1, -2}));
  EXPECT_THROW(output_error(vec({1}), vec({1, 2})), ArgumentError);
}

TEST(OutputError, NormIsSymmetric) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 20; ++i) {
    const VectorXd a = random_vector(3, rng);
    const VectorXd b = random_vector(3, rng);
    EXPECT_DOUBLE_EQ(output_error(a, b).norm(), output_error(b, a).norm());
  }
}

TEST(ErrorState, BuildsOutputAndPlasticErrors) {
  auto w = weights(MatrixXd::Zero(3, 1), MatrixXd::Zero(3, 3), mat(1, 3, {1, 2, 3}), {false, true, true});
  const auto s = ErrorState::from(vec({1, 1, 1}), vec({0.5, 0.25, 2}), vec({4}), w);
  EXPECT_EQ(s.e, vec({2}));
  EXPECT_EQ(s.v_e, vec({0.75, -1}));
}

TEST(CostSpec, Validation) {
  EXPECT_NO_THROW(CostSpec(MatrixXd::Identity(2, 2), MatrixXd::Identity(2, 2), 1.0));
  EXPECT_NO_THROW(CostSpec(MatrixXd::Zero(2, 2), MatrixXd::Identity(1, 1), 1.0));
  try {
    CostSpec(MatrixXd::Identity(1, 1), -MatrixXd::Identity(1, 1), 1.0);
    FAIL();
  } catch (const ConfigurationError& e) {
    EXPECT_NE(std::string(e.what()).find("cost.R"), std::string::npos);
  }
  EXPECT_THROW(CostSpec(mat(2, 2, {1, 1e-6, 0, 1}), MatrixXd::Identity(1, 1), 1.0), ConfigurationError);
  EXPECT_THROW(CostSpec(-MatrixXd::Identity(1, 1), MatrixXd::Identity(1, 1), 1.0), ConfigurationError);
  EXPECT_THROW(CostSpec(MatrixXd::Identity(1, 1), MatrixXd::Identity(1, 1), 0.0), ConfigurationError);
}

TEST(ErrorSystem, NetworkRestriction) {
  const auto w = weights(MatrixXd::Zero(2, 1), mat(2, 2, {0.3, 0.7, 0.2, 0.5}), MatrixXd::Zero(1, 2), {false, true});
  const auto sys = error_system_from_network(w, LeakSpec::uniform(2, 1.0), Activation::kTanh);
  EXPECT_EQ(sys.kind, SystemKind::kNetworkDerived);
  for (const double x : {-2.0, 0.0, 1.5}) {
    EXPECT_DOUBLE_EQ(sys.f(vec({x}))(0), -x);
    EXPECT_DOUBLE_EQ(sys.g(vec({x}))(0, 0), 0.5);
  }
  EXPECT_EQ(sys.flow(vec({0}), vec({0})), vec({0}));
}

TEST(ErrorSystem, EmptyPlasticSetRejected) {
  const auto w = weights(MatrixXd::Zero(2, 1), MatrixXd::Zero(2, 2), MatrixXd::Zero(1, 2), {false, false});
  EXPECT_THROW(error_system_from_network(w, LeakSpec::uniform(2, 1.0), Activation::kTanh), ConfigurationError);
}

TEST(ErrorSystem, SyntheticLinearMatchesMatrices) {
  std::mt19937_64 rng(6);
  const MatrixXd A = random_matrix(3, 3, rng);
  const MatrixXd B = random_matrix(3, 2, rng);
  const auto sys = AffineSystem::linear(A, B);
  EXPECT_EQ(sys.kind, SystemKind::kSyntheticLinear);
  for (int i = 0; i < 100; ++i) {
    const VectorXd x = random_vector(3, rng, 5.0);
    const VectorXd u = random_vector(2, rng, 5.0);
    VectorXd hand = VectorXd::Zero(3);
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) hand(r) += A(r, c) * x(c);
      for (int c = 0; c < 2; ++c) hand(r) += B(r, c) * u(c);
    }
    EXPECT_LE((sys.flow(x, u) - hand).cwiseAbs().maxCoeff(), 1e-14);
    EXPECT_EQ(sys.g(x), B);
  }
}

TEST(Utility, Examples) {
  const auto cost = CostSpec::identity(1, 1, 1.0, 1.0, 1.0);
  EXPECT_EQ(utility(vec({0}), vec({0}), cost), 0.0);
  EXPECT_EQ(utility(vec({1}), vec({2}), cost), 5.0);
  EXPECT_THROW(utility(vec({1, 2}), vec({2}), cost), ArgumentError);
}

TEST(Utility, BruteForceQuadraticForm) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const MatrixXd L = random_matrix(3, 2, rng);
    const MatrixXd Q = L * L.transpose();
    const MatrixXd R = random_spd(2, rng);
    const CostSpec cost(Q, R, 1.0);
    const VectorXd v = random_vector(3, rng);
    const VectorXd u = random_vector(2, rng);
    double expected = 0.0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) expected += v(i) * Q(i, j) * v(j);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) expected += u(i) * R(i, j) * u(j);
    EXPECT_NEAR(utility(v, u, cost), expected, 1e-12 * (1 + expected));
    EXPECT_GE(utility(v, u, cost), 0.0);
  }
}

TEST(Utility, ZeroOnlyAtZeroForPositiveDefiniteR) {
  const CostSpec cost(mat(2, 2, {1, 0, 0, 0}), MatrixXd::Identity(1, 1), 1.0);
  EXPECT_EQ(utility(vec({0, 3}), vec({0}), cost), 0.0);
  EXPECT_GT(utility(vec({0, 3}), vec({1e-3}), cost), 0.0);
  EXPECT_GT(utility(vec({1e-3, 0}), vec({0}), cost), 0.0);
}

TEST(RolloutCost, EquilibriumStaysAtZero) {
  const auto sys = AffineSystem::linear(-MatrixXd::Identity(2, 2), MatrixXd::Identity(2, 2));
  const auto cost = CostSpec::identity(2, 2, 1.0, 1.0, 5.0);
  const Policy zero = [](const VectorXd&) -> VectorXd { return VectorXd::Zero(2); };
  EXPECT_EQ(rollout_cost(sys, zero, VectorXd::Zero(2), cost, 0.01), 0.0);
}

TEST(RolloutCost, ExponentialDecayIntegral) {
  const auto sys = AffineSystem::linear(-MatrixXd::Identity(1, 1), MatrixXd::Identity(1, 1));
  const Policy zero = [](const VectorXd&) -> VectorXd { return VectorXd::Zero(1); };
  EXPECT_NEAR(rollout_cost(sys, zero, vec({1}), CostSpec::identity(1, 1, 1, 1, 10.0), 0.01), 0.5, 1e-4);
}

TEST(RolloutCost, LqrValueAndMonotoneHorizon) {
  const double P = std::sqrt(2.0) - 1.0;
  const auto sys = AffineSystem::linear(-MatrixXd::Identity(1, 1), MatrixXd::Identity(1, 1));
  const Policy lqr = [P](const VectorXd& x) -> VectorXd { return -P * x; };
  EXPECT_NEAR(rollout_cost(sys, lqr, vec({1.5}), CostSpec::identity(1, 1, 1, 1, 20.0), 0.01), P * 2.25, 0.01 * P * 2.25);
  double previous = 0.0;
  for (const double tf : {0.5, 1.0, 2.0, 4.0, 8.0}) {
    const double c = rollout_cost(sys, lqr, vec({1.5}), CostSpec::identity(1, 1, 1, 1, tf), 0.01);
    EXPECT_GE(c, previous);
    previous = c;
  }
}

TEST(RolloutCost, DivergenceCarriesTime) {
  const auto sys = AffineSystem::linear(MatrixXd::Identity(1, 1) * 5.0, MatrixXd::Identity(1, 1));
  const Policy zero = [](const VectorXd&) -> VectorXd { return VectorXd::Zero(1); };
  try {
    rollout_cost(sys, zero, vec({1}), CostSpec::identity(1, 1, 1, 1, 10.0), 0.01);
    FAIL();
  } catch (const DivergenceError& e) {
    EXPECT_NEAR(e.time(), std::log(1e6) / 5.0, 0.02);
  }
}

TEST(RolloutCost, StepMustDivideHorizon) {
  const auto sys = AffineSystem::linear(-MatrixXd::Identity(1, 1), MatrixXd::Identity(1, 1));
  const Policy zero = [](const VectorXd&) -> VectorXd { return VectorXd::Zero(1); };
  EXPECT_THROW(rollout_cost(sys, zero, vec({1}), CostSpec::identity(1, 1, 1, 1, 1.0), 0.3), ArgumentError);
  EXPECT_THROW(rollout_cost(sys, zero, vec({1}), CostSpec::identity(1, 1, 1, 1, 1.0), 0.0), ArgumentError);
}
