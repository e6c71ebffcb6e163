#pragma once

#include <vector>

#include "sccvar/model.hpp"

namespace sccvar {

struct LowerLevelSolution {
  Vector x;
  double beta = 0.0;
  /// eps*beta + sum_i p_i [g_max(i,x) - beta]_+ at the optimum.
  double value = 0.0;
};

/// Hinge-loss LP under the budget row c'x <= t. Throws InfeasibleError when the budget cuts
/// off X.
LowerLevelSolution lower_level(const CcpInstance& instance, double t, const Tolerances& tol = {});

struct BisectionStep {
  double t = 0.0;
  double lower_value = 0.0;
  bool feasible = false;
  /// Feasibility came from the scaling pass rather than the lower-level point.
  bool rescued = false;
  double t_L = 0.0;
  double t_U = 0.0;
};

struct BisectionReport {
  std::vector<BisectionStep> steps;
  Vector x;
  double t_L = 0.0;
  double t_U = 0.0;
  double initial_t_L = 0.0;
  double initial_t_U = 0.0;

  /// ceil(log2((t_U - t_L) / delta_A)) for the initial bounds (0 when already closed).
  int step_bound(double delta_A) const;
};

/// min c'x over X alone. Throws ConfigError when unbounded.
double default_lower_bound(const CcpInstance& instance, const Tolerances& tol = {});

/// Bisection on the budget: t_U <- t when the lower-level point is chance-feasible,
/// else t_L <- t. Throws NoFeasibleIncumbent when no feasible point exists at t_U.
BisectionReport alsox_sharp(const CcpInstance& instance, double t_L, double t_U, double delta_A,
                            const Tolerances& tol = {});

/// As alsox_sharp, but a failed check triggers Algorithm 1 under the same budget, seeded with
/// the lower-level point.
BisectionReport scaled_alsox_sharp(const CcpInstance& instance, double t_L, double t_U,
                                   double delta_A, const Tolerances& tol = {});

}  // namespace sccvar
