#include "adpnet/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "adpnet/errors.hpp"

namespace adpnet::oracle {
namespace {

Eigen::MatrixXd symmetrize(const Eigen::MatrixXd& m) { return 0.5 * (m + m.transpose()); }

bool positive_definite(const Eigen::MatrixXd& m) {
  Eigen::LLT<Eigen::MatrixXd> llt(symmetrize(m));
  return llt.info() == Eigen::Success;
}

// Bass: with beta above every eigenvalue real part, (A + beta I) Z + Z (A + beta I)' = 2 B B'
// has Z > 0 for controllable (A, B), and A - B B' Z^{-1} satisfies A_c Z + Z A_c' = -2 beta Z.
Eigen::MatrixXd bass_gain(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
  const Eigen::Index n = A.rows();
  const double beta = A.norm() + 1.0;
  const Eigen::MatrixXd shifted = A + beta * Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd Z;
  try {
    Z = solve_lyapunov(shifted.transpose(), -2.0 * B * B.transpose());
  } catch (const SolverError&) {
    throw SolverError("solve_care: could not construct a stabilizing initial gain");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(symmetrize(Z));
  if (llt.info() != Eigen::Success || llt.rcond() < 1e-14) {
    throw SolverError("solve_care: (A, B) is not stabilizable by the initial-gain construction");
  }
  return B.transpose() * llt.solve(Eigen::MatrixXd::Identity(n, n));
}

}  // namespace

void LinearQuadraticProblem::validate() const {
  const Eigen::Index n = A.rows();
  if (A.cols() != n || B.rows() != n || Q.rows() != n || Q.cols() != n) {
    throw ConfigurationError("linear-quadratic problem: inconsistent A, B, Q shapes");
  }
  if (R.rows() != B.cols() || R.cols() != B.cols()) throw ConfigurationError("linear-quadratic problem: R must be m x m");
  if ((Q - Q.transpose()).cwiseAbs().maxCoeff() > 1e-12) throw ConfigurationError("linear-quadratic problem: Q not symmetric");
  if ((R - R.transpose()).cwiseAbs().maxCoeff() > 1e-12) throw ConfigurationError("linear-quadratic problem: R not symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> q_eig(Q, Eigen::EigenvaluesOnly);
  if (q_eig.eigenvalues().minCoeff() < -1e-12) throw ConfigurationError("linear-quadratic problem: Q not PSD");
  if (!positive_definite(R)) throw ConfigurationError("linear-quadratic problem: R not positive definite");
}

Eigen::MatrixXd solve_lyapunov(const Eigen::MatrixXd& A, const Eigen::MatrixXd& C) {
  const Eigen::Index n = A.rows();
  if (A.cols() != n || C.rows() != n || C.cols() != n) throw ArgumentError("solve_lyapunov: shape mismatch");
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd At = A.transpose();
  Eigen::MatrixXd op(n * n, n * n);
  // Column-major vec: vec(A' X) = (I kron A') vec X, vec(X A) = (A' kron I) vec X.
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      op.block(i * n, j * n, n, n) = I(i, j) * At + At(i, j) * I;
    }
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(op);
  if (!lu.isInvertible()) throw SolverError("solve_lyapunov: operator is singular");
  const Eigen::VectorXd rhs = -Eigen::Map<const Eigen::VectorXd>(C.eval().data(), n * n);
  const Eigen::VectorXd x = lu.solve(rhs);
  return Eigen::Map<const Eigen::MatrixXd>(x.data(), n, n);
}

bool is_hurwitz(const Eigen::MatrixXd& A) {
  const Eigen::Index n = A.rows();
  Eigen::MatrixXd S;
  try {
    S = solve_lyapunov(A, Eigen::MatrixXd::Identity(n, n));
  } catch (const SolverError&) {
    return false;
  }
  return positive_definite(S);
}

double care_residual(const Eigen::MatrixXd& P, const LinearQuadraticProblem& p) {
  const Eigen::MatrixXd RinvBt = p.R.llt().solve(p.B.transpose());
  return (p.A.transpose() * P + P * p.A - P * p.B * RinvBt * P + p.Q).norm();
}

Eigen::MatrixXd solve_care(const LinearQuadraticProblem& p, const CareOptions& options) {
  p.validate();
  const Eigen::Index n = p.A.rows();
  const Eigen::LLT<Eigen::MatrixXd> r_llt(p.R);

  Eigen::MatrixXd K;
  if (options.initial_gain) {
    K = *options.initial_gain;
    if (K.rows() != p.B.cols() || K.cols() != n) throw ArgumentError("solve_care: initial gain must be m x n");
  } else if (is_hurwitz(p.A)) {
    K = Eigen::MatrixXd::Zero(p.B.cols(), n);
  } else {
    K = bass_gain(p.A, p.B);
  }
  if (!is_hurwitz(p.A - p.B * K)) throw SolverError("solve_care: initial gain does not stabilize A - B K");

  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(n, n);
  for (int iter = 0; iter < options.max_iterations; ++iter) {
    const Eigen::MatrixXd closed = p.A - p.B * K;
    const Eigen::MatrixXd weight = p.Q + K.transpose() * p.R * K;
    Eigen::MatrixXd next;
    try {
      next = symmetrize(solve_lyapunov(closed, weight));
    } catch (const SolverError&) {
      throw SolverError("solve_care: Lyapunov step failed at iteration " + std::to_string(iter));
    }
    if (!next.allFinite()) throw SolverError("solve_care: iterate is not finite");
    const double step = (next - P).norm();
    P = next;
    K = r_llt.solve(p.B.transpose() * P);
    if (iter > 0 && step <= options.step_tolerance * std::max(1.0, P.norm())) break;
  }
  const double residual = care_residual(P, p);
  const Eigen::MatrixXd quadratic = P * p.B * r_llt.solve(p.B.transpose()) * P;
  const double scale = std::max(1.0, p.Q.norm() + quadratic.norm());
  if (!(residual <= options.residual_tolerance * scale)) {
    std::ostringstream message;
    message << "solve_care: did not converge (residual " << residual << ")";
    throw SolverError(message.str());
  }
  return P;
}

Eigen::MatrixXd lqr_policy(const Eigen::MatrixXd& P, const LinearQuadraticProblem& p) {
  p.validate();
  if (P.rows() != p.A.rows() || P.cols() != p.A.rows()) throw ArgumentError("lqr_policy: P must be n x n");
  Eigen::MatrixXd K = p.R.llt().solve(p.B.transpose() * P);
  if (!is_hurwitz(p.A - p.B * K)) throw SolverError("lqr_policy: closed loop A - B K is not stable");
  return K;
}

Eigen::VectorXd finite_difference_gradient(const std::function<double(const Eigen::VectorXd&)>& fn,
                                           const Eigen::VectorXd& x, double h) {
  if (!(h > 0.0)) throw ArgumentError("finite_difference_gradient: h must be positive");
  Eigen::VectorXd grad(x.size());
  Eigen::VectorXd probe = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    probe(i) = x(i) + h;
    const double up = fn(probe);
    probe(i) = x(i) - h;
    const double down = fn(probe);
    probe(i) = x(i);
    grad(i) = (up - down) / (2.0 * h);
  }
  return grad;
}

}  // namespace adpnet::oracle
