#pragma once

#include <functional>

#include <Eigen/Core>

#include "adpnet/core_net.hpp"

namespace adpnet {

/// Output error e = y_hat - y and neuron-space error v_e = v - v_d on the
/// plastic coordinates.
struct ErrorState {
  Eigen::VectorXd e;
  Eigen::VectorXd v_e;

  static ErrorState from(const Eigen::VectorXd& v, const Eigen::VectorXd& v_d, const Eigen::VectorXd& y,
                         const WeightSet& w);
};

/// Quadratic running cost v_e' Q v_e + u' R u over the horizon [0, horizon].
class CostSpec {
 public:
  /// Validates symmetry (1e-12), Q positive semi-definite, R positive
  /// definite and horizon > 0. Throws ConfigurationError naming Q, R or
  /// horizon.
  CostSpec(Eigen::MatrixXd Q, Eigen::MatrixXd R, double horizon);

  static CostSpec identity(Eigen::Index state_dim, Eigen::Index control_dim, double q, double r, double horizon);

  const Eigen::MatrixXd& Q() const { return Q_; }
  const Eigen::MatrixXd& R() const { return R_; }
  double horizon() const { return horizon_; }

  /// R^{-1} x via the cached Cholesky factor.
  Eigen::VectorXd solve_R(const Eigen::VectorXd& x) const;
  Eigen::MatrixXd solve_R(const Eigen::MatrixXd& x) const;

 private:
  Eigen::MatrixXd Q_;
  Eigen::MatrixXd R_;
  Eigen::MatrixXd R_inverse_;
  double horizon_;
};

enum class SystemKind { kNetworkDerived, kSyntheticLinear };

/// Control-affine error system x' = f(x) + g(x) u.
struct AffineSystem {
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> drift;
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> input_map;
  SystemKind kind = SystemKind::kSyntheticLinear;
  Eigen::Index state_dim = 0;
  Eigen::Index control_dim = 0;

  Eigen::VectorXd f(const Eigen::VectorXd& x) const;
  Eigen::MatrixXd g(const Eigen::VectorXd& x) const;
  Eigen::VectorXd flow(const Eigen::VectorXd& x, const Eigen::VectorXd& u) const;

  static AffineSystem linear(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B);
};

Eigen::VectorXd output_error(const Eigen::VectorXd& y_hat, const Eigen::VectorXd& y);

/// Error system of the plastic partition: f(x) = -alpha_p .* x and
/// g = W_r restricted to plastic rows and columns. The activation is
/// accepted for interface symmetry with the plant; the leak drift does
/// not depend on it.
AffineSystem error_system_from_network(const WeightSet& w, const LeakSpec& leak, Activation phi);

double utility(const Eigen::VectorXd& v_e, const Eigen::VectorXd& u, const CostSpec& cost);

using Policy = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

/// Divergence guard on the infinity norm of the error state.
inline constexpr double kOverflowGuard = 1e6;

/// Trapezoidal integral of the running cost along the RK4 closed-loop
/// trajectory x' = f(x) + g(x) policy(x), from x0 over [0, cost.horizon()].
/// Throws DivergenceError when the guard trips.
double rollout_cost(const AffineSystem& sys, const Policy& policy, const Eigen::VectorXd& x0, const CostSpec& cost,
                    double dt);

}  // namespace adpnet
