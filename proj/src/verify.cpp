#include "adpnet/verify.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include <Eigen/Cholesky>

#include "adpnet/adp.hpp"
#include "adpnet/core_net.hpp"
#include "adpnet/error_dynamics.hpp"
#include "adpnet/errors.hpp"
#include "adpnet/kernels.hpp"
#include "adpnet/oracle.hpp"

namespace adpnet {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kCareTolerance = 1e-8;
constexpr double kPerturbation = 1e-3;

class Suite {
 public:
  void add(std::string name, double value, double tolerance, std::string detail = {}) {
    results_.push_back({std::move(name), value, tolerance, std::isfinite(value) && value <= tolerance, std::move(detail)});
  }
  void add_range(std::string name, double value, double lo, double hi) {
    std::ostringstream detail;
    detail << "expected in [" << lo << ", " << hi << "]";
    results_.push_back({std::move(name), value, hi, value >= lo && value <= hi, detail.str()});
  }
  void fail(std::string name, const std::string& why) { results_.push_back({std::move(name), NAN, 0.0, false, why}); }
  std::vector<CheckResult> take() { return std::move(results_); }

 private:
  std::vector<CheckResult> results_;
};

MatrixXd random_matrix(Eigen::Index r, Eigen::Index c, std::mt19937_64& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> d(-scale, scale);
  MatrixXd m(r, c);
  for (Eigen::Index i = 0; i < r; ++i) {
    for (Eigen::Index j = 0; j < c; ++j) m(i, j) = d(rng);
  }
  return m;
}

VectorXd random_vector(Eigen::Index n, std::mt19937_64& rng, double scale = 1.0) { return random_matrix(n, 1, rng, scale); }

oracle::LinearQuadraticProblem scalar_problem(double a) {
  return {MatrixXd::Constant(1, 1, a), MatrixXd::Ones(1, 1), MatrixXd::Ones(1, 1), MatrixXd::Ones(1, 1)};
}

oracle::LinearQuadraticProblem random_problem(std::mt19937_64& rng, Eigen::Index n, Eigen::Index m) {
  const MatrixXd L = random_matrix(n, n, rng);
  const MatrixXd N = random_matrix(m, m, rng);
  return {random_matrix(n, n, rng), random_matrix(n, m, rng), L.transpose() * L + MatrixXd::Identity(n, n),
          N.transpose() * N + MatrixXd::Identity(m, m)};
}

MatrixXd care(const oracle::LinearQuadraticProblem& p, bool perturb) {
  MatrixXd P = oracle::solve_care(p);
  if (perturb) P.array() += kPerturbation;
  return P;
}

CostSpec cost_of(const oracle::LinearQuadraticProblem& p) { return CostSpec(p.Q, p.R, 1.0); }

void care_checks(Suite& s, bool perturb, std::mt19937_64& rng) {
  const struct {
    const char* name;
    double a;
    double expected;
  } scalars[] = {{"care scalar a=0 (P=1)", 0.0, 1.0}, {"care scalar a=-1 (P=sqrt2-1)", -1.0, std::sqrt(2.0) - 1.0}};
  for (const auto& c : scalars) {
    const auto p = scalar_problem(c.a);
    const MatrixXd P = care(p, perturb);
    s.add(c.name, std::abs(P(0, 0) - c.expected), kCareTolerance);
    s.add(std::string("care residual ") + (c.a == 0.0 ? "a=0" : "a=-1"), oracle::care_residual(P, p), kCareTolerance);

    const AffineSystem sys = AffineSystem::linear(p.A, p.B);
    const CostSpec cost = cost_of(p);
    double hjb = 0.0;
    double ham = 0.0;
    double identity = 0.0;
    const MatrixXd K = p.R.llt().solve(p.B.transpose() * P);
    for (int i = 0; i < 50; ++i) {
      const VectorXd x = random_vector(1, rng, 2.0);
      const VectorXd grad = 2.0 * P * x;
      hjb = std::max(hjb, std::abs(hjb_residual(x, grad, sys, cost)));
      const VectorXd u = optimal_control_from_value(x, grad, sys, cost);
      ham = std::max(ham, std::abs(hamiltonian(x, u, grad, sys, cost)));
      identity = std::max(identity, (u + K * x).norm());
    }
    const std::string tag = c.a == 0.0 ? " a=0" : " a=-1";
    s.add("hjb residual at 2Px" + tag, hjb, kCareTolerance);
    s.add("hamiltonian zero at oracle" + tag, ham, 1e-10);
    s.add("lqr identity u*(2Px) = -Kx" + tag, identity, 1e-12);
  }

  double residual = 0.0;
  double hjb = 0.0;
  bool stable = true;
  for (int trial = 0; trial < 5; ++trial) {
    const auto p = random_problem(rng, 3, 2);
    const MatrixXd P = care(p, perturb);
    residual = std::max(residual, oracle::care_residual(P, p) / std::max(1.0, P.norm()));
    const MatrixXd K = p.R.llt().solve(p.B.transpose() * P);
    stable = stable && oracle::is_hurwitz(p.A - p.B * K);
    const AffineSystem sys = AffineSystem::linear(p.A, p.B);
    const CostSpec cost = cost_of(p);
    for (int i = 0; i < 50; ++i) {
      const VectorXd x = random_vector(3, rng);
      const double scale = 1.0 + x.dot(p.Q * x) + std::abs(x.dot(P * p.B * K * x));
      hjb = std::max(hjb, std::abs(hjb_residual(x, 2.0 * P * x, sys, cost)) / scale);
    }
  }
  s.add("care residual random 3x3 (relative)", residual, kCareTolerance);
  s.add("hjb residual at 2Px random 3x3 (relative)", hjb, kCareTolerance);
  s.add("closed loop A-BK Hurwitz", stable ? 0.0 : 1.0, 0.0);
}

void consistency_check(Suite& s, std::mt19937_64& rng) {
  const auto p = random_problem(rng, 3, 2);
  const AffineSystem sys = AffineSystem::linear(p.A, p.B);
  const CostSpec cost = cost_of(p);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const VectorXd v = random_vector(3, rng);
    const VectorXd grad = random_vector(3, rng);
    const double direct = hjb_residual(v, grad, sys, cost);
    const double composed = hamiltonian(v, optimal_control_from_value(v, grad, sys, cost), grad, sys, cost);
    worst = std::max(worst, std::abs(direct - composed));
  }
  s.add("hjb residual == hamiltonian(u*(V))", worst, 1e-10);
}

void gradient_checks(Suite& s, std::mt19937_64& rng) {
  double critic_worst = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::Index n = 1 + trial % 3;
    const Eigen::Index m = 1 + trial % 2;
    const Eigen::Index nf = 4 + trial;
    const auto p = random_problem(rng, n, m);
    const CostSpec cost = cost_of(p);
    ReservoirApproximator critic(random_matrix(nf, n, rng), MatrixXd::Zero(nf, nf), random_matrix(n, nf, rng), 0.5);
    critic.set_features(random_vector(nf, rng));
    const VectorXd v = random_vector(n, rng);
    const VectorXd u = random_vector(m, rng);
    const VectorXd v_dot = random_vector(n, rng);
    const VectorXd z = critic.features();

    for (const bool normalize : {false, true}) {
      LearnerConfig cfg;
      cfg.critic_rate = 0.1;
      cfg.normalize = normalize;
      ReservoirApproximator updated = critic;
      critic_update(updated, v, u, v_dot, cost, cfg);
      const double sigma = v_dot.squaredNorm() * z.squaredNorm();
      const double nu = normalize ? (1.0 + sigma) * (1.0 + sigma) : 1.0;
      const MatrixXd analytic = (critic.readout() - updated.readout()) * nu / cfg.critic_rate;

      const MatrixXd W0 = critic.readout();
      const auto loss = [&](const VectorXd& flat) {
        const MatrixXd W = Eigen::Map<const MatrixXd>(flat.data(), W0.rows(), W0.cols());
        const double delta = (W * z).dot(v_dot) + utility(v, u, cost);
        return 0.5 * delta * delta;
      };
      const VectorXd flat = Eigen::Map<const VectorXd>(W0.data(), W0.size());
      const VectorXd fd = oracle::finite_difference_gradient(loss, flat);
      const VectorXd a = Eigen::Map<const VectorXd>(analytic.data(), analytic.size());
      critic_worst = std::max(critic_worst, (a - fd).cwiseAbs().maxCoeff() / std::max(1e-12, fd.cwiseAbs().maxCoeff()));
    }
  }
  s.add("critic_update vs finite differences (relative)", critic_worst, 1e-6);

  double utility_worst = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::Index n = 1 + trial % 4;
    const Eigen::Index m = 1 + trial % 3;
    const auto p = random_problem(rng, n, m);
    const CostSpec cost = cost_of(p);
    const VectorXd v = random_vector(n, rng);
    const VectorXd u = random_vector(m, rng);
    const VectorXd gv = oracle::finite_difference_gradient([&](const VectorXd& x) { return utility(x, u, cost); }, v);
    const VectorXd gu = oracle::finite_difference_gradient([&](const VectorXd& x) { return utility(v, x, cost); }, u);
    const VectorXd av = 2.0 * p.Q * v;
    const VectorXd au = 2.0 * p.R * u;
    utility_worst = std::max(utility_worst, (av - gv).cwiseAbs().maxCoeff() / std::max(1e-12, av.cwiseAbs().maxCoeff()));
    utility_worst = std::max(utility_worst, (au - gu).cwiseAbs().maxCoeff() / std::max(1e-12, au.cwiseAbs().maxCoeff()));
  }
  s.add("utility gradient vs finite differences (relative)", utility_worst, 1e-6);
}

void rollout_check(Suite& s, bool perturb, std::mt19937_64& rng) {
  const auto p = scalar_problem(-1.0);
  const MatrixXd P = care(p, perturb);
  const double k = P(0, 0);
  const AffineSystem sys = AffineSystem::linear(p.A, p.B);
  const CostSpec cost(p.Q, p.R, 20.0);
  const Policy policy = [k](const VectorXd& x) -> VectorXd { return -k * x; };
  std::vector<VectorXd> starts;
  for (int i = 0; i < 16; ++i) starts.push_back(random_vector(1, rng, 2.0));
  const auto serial = rollout_costs(sys, policy, starts, cost, 5e-4, Execution::kSerial);
  const auto parallel = rollout_costs(sys, policy, starts, cost, 5e-4, Execution::kParallel);
  double worst = 0.0;
  for (std::size_t i = 0; i < starts.size(); ++i) {
    const double expected = P(0, 0) * starts[i].squaredNorm();
    worst = std::max(worst, std::abs(serial[i] - expected) / expected);
  }
  s.add("rollout cost under LQR equals x'Px (relative)", worst, 1e-6);
  s.add("rollout kernel serial == parallel", serial == parallel ? 0.0 : 1.0, 0.0);
}

double decay_error(Integrator method, double dt, double horizon) {
  const LeakSpec leak = LeakSpec::uniform(1, 1.0);
  NetworkState state{VectorXd::Ones(1), 0.0};
  const long steps = std::lround(horizon / dt);
  for (long i = 0; i < steps; ++i) state = step_dynamics(state, VectorXd::Zero(1), leak, dt, method);
  return std::abs(state.v(0) - std::exp(-horizon));
}

void dynamics_checks(Suite& s) {
  const LeakSpec leak = LeakSpec::uniform(1, 1.0);
  NetworkState state{VectorXd::Ones(1), 0.0};
  double worst = 0.0;
  for (int i = 1; i <= 500; ++i) {
    state = step_dynamics(state, VectorXd::Zero(1), leak, 0.01);
    const double expected = std::exp(-0.01 * i);
    worst = std::max(worst, std::abs(state.v(0) - expected) / expected);
  }
  s.add("leak-only decay vs exp(-t) (relative)", worst, 1e-5);

  SpikeTrain train{{0.0}, 0.05};
  double spike = 0.0;
  for (int i = 0; i <= 100; ++i) {
    const double t = 0.01 * i;
    spike = std::max(spike, std::abs(filter_spikes(train, t) - std::exp(-t / 0.05) / 0.05));
  }
  s.add("spike filter impulse response", spike, 1e-12);

  s.add_range("euler error ratio (dt halved)", decay_error(Integrator::kEuler, 0.1, 1.0) / decay_error(Integrator::kEuler, 0.05, 1.0),
              1.6, 2.4);
  s.add_range("rk4 error ratio (dt halved)", decay_error(Integrator::kRk4, 0.1, 1.0) / decay_error(Integrator::kRk4, 0.05, 1.0),
              10.0, 22.0);
}

}  // namespace

std::vector<CheckResult> run_oracle_suite(bool perturb_care) {
  Suite s;
  std::mt19937_64 rng(20240611);
  const auto guarded = [&](const char* name, auto&& fn) {
    try {
      fn();
    } catch (const std::exception& e) {
      s.fail(name, e.what());
    }
  };
  guarded("care checks", [&] { care_checks(s, perturb_care, rng); });
  guarded("consistency identity", [&] { consistency_check(s, rng); });
  guarded("gradient checks", [&] { gradient_checks(s, rng); });
  guarded("rollout cost", [&] { rollout_check(s, perturb_care, rng); });
  guarded("dynamics", [&] { dynamics_checks(s); });
  return s.take();
}

}  // namespace adpnet
