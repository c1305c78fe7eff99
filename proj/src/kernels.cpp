#include "adpnet/kernels.hpp"

#include <exception>

#include "adpnet/errors.hpp"

namespace adpnet {

std::vector<double> rollout_costs(const AffineSystem& sys, const Policy& policy,
                                  const std::vector<Eigen::VectorXd>& initial_states, const CostSpec& cost, double dt,
                                  Execution mode) {
  const long count = static_cast<long>(initial_states.size());
  std::vector<double> out(initial_states.size(), 0.0);
  std::vector<std::exception_ptr> errors(initial_states.size());
  const auto run = [&](long i) {
    try {
      out[static_cast<std::size_t>(i)] = rollout_cost(sys, policy, initial_states[static_cast<std::size_t>(i)], cost, dt);
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  };
  if (mode == Execution::kParallel) {
#pragma omp parallel for schedule(dynamic)
    for (long i = 0; i < count; ++i) run(i);
  } else {
    for (long i = 0; i < count; ++i) run(i);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

Eigen::MatrixXd settled_outputs(const ReservoirApproximator& approximator, const std::vector<Eigen::VectorXd>& inputs,
                                Execution mode) {
  const long count = static_cast<long>(inputs.size());
  Eigen::MatrixXd out(approximator.output_dim(), count);
  if (mode == Execution::kParallel) {
#pragma omp parallel for schedule(static)
    for (long i = 0; i < count; ++i) out.col(i) = approximator.settled_output(inputs[static_cast<std::size_t>(i)]);
  } else {
    for (long i = 0; i < count; ++i) out.col(i) = approximator.settled_output(inputs[static_cast<std::size_t>(i)]);
  }
  return out;
}

std::vector<Eigen::VectorXd> scalar_grid(double lo, double hi, int points) {
  if (points < 2 || !(hi > lo)) throw ArgumentError("scalar_grid: need at least two points and hi > lo");
  std::vector<Eigen::VectorXd> grid;
  for (int i = 0; i < points; ++i) {
    grid.push_back(Eigen::VectorXd::Constant(1, lo + (hi - lo) * static_cast<double>(i) / (points - 1)));
  }
  return grid;
}

}  // namespace adpnet
