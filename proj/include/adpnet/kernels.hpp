#pragma once

#include <vector>

#include <Eigen/Core>

#include "adpnet/adp.hpp"
#include "adpnet/error_dynamics.hpp"

namespace adpnet {

/// kSerial is the reference path; kParallel splits independent items across
/// OpenMP threads and must produce identical results.
enum class Execution { kSerial, kParallel };

/// rollout_cost for each initial state. The policy must be safe to call
/// concurrently. The first failure (if any) is rethrown after the batch.
std::vector<double> rollout_costs(const AffineSystem& sys, const Policy& policy,
                                  const std::vector<Eigen::VectorXd>& initial_states, const CostSpec& cost, double dt,
                                  Execution mode = Execution::kParallel);

/// settled_output at every input; one column per input.
Eigen::MatrixXd settled_outputs(const ReservoirApproximator& approximator, const std::vector<Eigen::VectorXd>& inputs,
                                Execution mode = Execution::kParallel);

/// Evenly spaced scalar grid on [lo, hi] as one-element vectors.
std::vector<Eigen::VectorXd> scalar_grid(double lo, double hi, int points);

}  // namespace adpnet
