#include "adpnet/error_dynamics.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

namespace adpnet {
namespace {

bool symmetric(const Eigen::MatrixXd& m) {
  return m.rows() == m.cols() && (m - m.transpose()).cwiseAbs().maxCoeff() <= 1e-12;
}

}  // namespace

ErrorState ErrorState::from(const Eigen::VectorXd& v, const Eigen::VectorXd& v_d, const Eigen::VectorXd& y,
                            const WeightSet& w) {
  if (v.size() != v_d.size()) throw ArgumentError("state and teacher state lengths differ");
  ErrorState s;
  s.e = output_error(decode(v, w), y);
  const auto idx = w.plastic_indices();
  s.v_e.resize(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t k = 0; k < idx.size(); ++k) s.v_e(static_cast<Eigen::Index>(k)) = v(idx[k]) - v_d(idx[k]);
  if (!s.v_e.allFinite()) throw NumericalOverflowError("neuron-space error is not finite");
  return s;
}

CostSpec::CostSpec(Eigen::MatrixXd Q, Eigen::MatrixXd R, double horizon)
    : Q_(std::move(Q)), R_(std::move(R)), horizon_(horizon) {
  if (Q_.size() == 0 || !Q_.allFinite() || !symmetric(Q_)) throw ConfigurationError("cost.Q must be finite and symmetric");
  if (R_.size() == 0 || !R_.allFinite() || !symmetric(R_)) throw ConfigurationError("cost.R must be finite and symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> q_eig(Q_, Eigen::EigenvaluesOnly);
  if (q_eig.eigenvalues().minCoeff() < -1e-12) throw ConfigurationError("cost.Q must be positive semi-definite");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> r_eig(R_, Eigen::EigenvaluesOnly);
  if (!(r_eig.eigenvalues().minCoeff() > 0.0)) throw ConfigurationError("cost.R must be positive definite");
  if (!(horizon_ > 0.0) || !std::isfinite(horizon_)) throw ConfigurationError("cost.horizon must be positive");
  R_inverse_ = R_.llt().solve(Eigen::MatrixXd::Identity(R_.rows(), R_.cols()));
}

CostSpec CostSpec::identity(Eigen::Index state_dim, Eigen::Index control_dim, double q, double r, double horizon) {
  return CostSpec(q * Eigen::MatrixXd::Identity(state_dim, state_dim),
                  r * Eigen::MatrixXd::Identity(control_dim, control_dim), horizon);
}

Eigen::VectorXd CostSpec::solve_R(const Eigen::VectorXd& x) const { return R_inverse_ * x; }

Eigen::MatrixXd CostSpec::solve_R(const Eigen::MatrixXd& x) const { return R_inverse_ * x; }

Eigen::VectorXd AffineSystem::f(const Eigen::VectorXd& x) const {
  if (x.size() != state_dim) throw ArgumentError("affine system: state length mismatch");
  return drift(x);
}

Eigen::MatrixXd AffineSystem::g(const Eigen::VectorXd& x) const {
  if (x.size() != state_dim) throw ArgumentError("affine system: state length mismatch");
  return input_map(x);
}

Eigen::VectorXd AffineSystem::flow(const Eigen::VectorXd& x, const Eigen::VectorXd& u) const {
  if (u.size() != control_dim) throw ArgumentError("affine system: control length mismatch");
  return f(x) + g(x) * u;
}

AffineSystem AffineSystem::linear(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
  if (A.rows() != A.cols() || B.rows() != A.rows()) throw ConfigurationError("linear system: A square, B rows = A rows");
  AffineSystem sys;
  sys.drift = [A](const Eigen::VectorXd& x) -> Eigen::VectorXd { return A * x; };
  sys.input_map = [B](const Eigen::VectorXd&) -> Eigen::MatrixXd { return B; };
  sys.kind = SystemKind::kSyntheticLinear;
  sys.state_dim = A.rows();
  sys.control_dim = B.cols();
  return sys;
}

Eigen::VectorXd output_error(const Eigen::VectorXd& y_hat, const Eigen::VectorXd& y) {
  if (y_hat.size() != y.size()) throw ArgumentError("output_error: length mismatch");
  return y_hat - y;
}

AffineSystem error_system_from_network(const WeightSet& w, const LeakSpec& leak, Activation /*phi*/) {
  const auto idx = w.plastic_indices();
  if (idx.empty()) throw ConfigurationError("error system requires a nonempty plastic partition");
  if (leak.alpha.size() != w.neurons()) throw ConfigurationError("leak length does not match neuron count");
  const auto n = static_cast<Eigen::Index>(idx.size());
  Eigen::VectorXd alpha(n);
  for (Eigen::Index k = 0; k < n; ++k) alpha(k) = leak.alpha(idx[static_cast<std::size_t>(k)]);
  const Eigen::MatrixXd block = w.plastic_block();

  AffineSystem sys;
  sys.drift = [alpha](const Eigen::VectorXd& x) -> Eigen::VectorXd { return (-alpha.array() * x.array()).matrix(); };
  sys.input_map = [block](const Eigen::VectorXd&) -> Eigen::MatrixXd { return block; };
  sys.kind = SystemKind::kNetworkDerived;
  sys.state_dim = n;
  sys.control_dim = n;
  return sys;
}

double utility(const Eigen::VectorXd& v_e, const Eigen::VectorXd& u, const CostSpec& cost) {
  if (v_e.size() != cost.Q().rows() || u.size() != cost.R().rows()) throw ArgumentError("utility: shape mismatch");
  return v_e.dot(cost.Q() * v_e) + u.dot(cost.R() * u);
}

double rollout_cost(const AffineSystem& sys, const Policy& policy, const Eigen::VectorXd& x0, const CostSpec& cost,
                    double dt) {
  if (!(dt > 0.0)) throw ArgumentError("rollout_cost: dt must be positive");
  const double ratio = cost.horizon() / dt;
  const long steps = std::lround(ratio);
  if (steps < 1 || std::abs(ratio - static_cast<double>(steps)) > 1e-9 * std::max(1.0, ratio)) {
    throw ArgumentError("rollout_cost: horizon must be an integral number of steps");
  }
  const auto field = [&](double, const Eigen::VectorXd& x) -> Eigen::VectorXd { return sys.flow(x, policy(x)); };

  Eigen::VectorXd x = x0;
  double running = utility(x, policy(x), cost);
  double total = 0.0;
  for (long k = 0; k < steps; ++k) {
    x = integrate_step(field, x, static_cast<double>(k) * dt, dt, Integrator::kRk4);
    const double t = static_cast<double>(k + 1) * dt;
    if (!x.allFinite() || x.cwiseAbs().maxCoeff() > kOverflowGuard) {
      throw DivergenceError("rollout diverged", t);
    }
    const double next = utility(x, policy(x), cost);
    total += 0.5 * dt * (running + next);
    running = next;
  }
  return total;
}

}  // namespace adpnet
