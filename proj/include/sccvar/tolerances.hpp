#pragma once

namespace sccvar {

/// Numerical knobs shared by every solver and algorithm in the toolkit.
struct Tolerances {
  double feas_tol = 1e-6;    // constraint satisfaction when counting violations
  double opt_tol = 1e-8;     // solver optimality / residual target
  double delta1 = 1e-4;      // objective-change stopping rule of the iterative schemes
  double delta2 = -0.005;    // strict-satisfaction threshold defining I_k
  double delta_bar = -1e-5;  // margin of the strict-feasibility certificate
  double alpha_max = 1e6;    // cap on every scaling factor
  int max_iter = 25;
  double delta_A = 0.05;     // bisection gap of ALSO-X#

  /// Throws ConfigError when a field is out of its admissible range.
  void validate() const;
};

}  // namespace sccvar
