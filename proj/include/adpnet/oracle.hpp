#pragma once

#include <functional>
#include <optional>

#include <Eigen/Core>

namespace adpnet::oracle {

/// x' = A x + B u with running cost x' Q x + u' R u.
struct LinearQuadraticProblem {
  Eigen::MatrixXd A;
  Eigen::MatrixXd B;
  Eigen::MatrixXd Q;
  Eigen::MatrixXd R;

  /// Shapes, symmetry of Q and R, Q PSD and R PD. Throws ConfigurationError.
  void validate() const;
};

/// Solves A' X + X A + C = 0 through the Kronecker (vectorized) linear
/// system. Throws SolverError when the operator is singular.
Eigen::MatrixXd solve_lyapunov(const Eigen::MatrixXd& A, const Eigen::MatrixXd& C);

/// True when A' S + S A = -I has a positive definite solution.
bool is_hurwitz(const Eigen::MatrixXd& A);

struct CareOptions {
  int max_iterations = 60;
  double step_tolerance = 1e-13;
  /// Relative to max(1, |Q| + |P B R^-1 B' P|).
  double residual_tolerance = 1e-8;
  /// Stabilizing initial gain; computed by Bass's shifted-Lyapunov method
  /// when absent.
  std::optional<Eigen::MatrixXd> initial_gain;
};

/// Frobenius norm of A'P + PA - P B R^{-1} B' P + Q.
double care_residual(const Eigen::MatrixXd& P, const LinearQuadraticProblem& p);

/// Newton-Kleinman iteration for the stabilizing CARE solution.
Eigen::MatrixXd solve_care(const LinearQuadraticProblem& p, const CareOptions& options = {});

/// K = R^{-1} B' P, verified to stabilize A - B K.
Eigen::MatrixXd lqr_policy(const Eigen::MatrixXd& P, const LinearQuadraticProblem& p);

inline constexpr double kDefaultFiniteDifferenceStep = 1e-5;

/// Central differences (fn(x + h e_i) - fn(x - h e_i)) / 2h.
Eigen::VectorXd finite_difference_gradient(const std::function<double(const Eigen::VectorXd&)>& fn,
                                           const Eigen::VectorXd& x, double h = kDefaultFiniteDifferenceStep);

}  // namespace adpnet::oracle
