#pragma once

#include <string>
#include <vector>

namespace adpnet {

struct CheckResult {
  std::string name;
  double value = 0.0;      // measured error (or ratio)
  double tolerance = 0.0;  // bound the value is compared against
  bool passed = false;
  std::string detail;
};

/// Oracle suite: CARE solutions, HJB annihilation, Hamiltonian zero, the
/// LQR identity, gradient checks, rollout cost and dynamics accuracy.
/// `perturb_care` offsets every CARE solution by 1e-3 (negative control).
std::vector<CheckResult> run_oracle_suite(bool perturb_care = false);

}  // namespace adpnet
