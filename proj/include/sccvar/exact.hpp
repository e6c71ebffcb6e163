#pragma once

#include <vector>

#include "sccvar/model.hpp"

namespace sccvar {

struct ExactResult {
  double v_star = kInf;
  Vector x_star;
  /// Scenarios satisfied at x_star (0-based, ascending).
  std::vector<int> satisfied_set;
  /// The enumerated subset that produced x_star.
  std::vector<int> support;
  long long subproblems_solved = 0;
};

/// Minimum of c'x over X with every scenario of `subset` satisfied; +inf when infeasible.
double subset_lp_value(const CcpInstance& instance, const std::vector<int>& subset, Vector* x,
                       const Tolerances& tol = {});

/// Enumerates inclusion-minimal scenario sets of mass >= 1 - epsilon. Throws TooLarge above
/// max_scenarios and InfeasibleError when every subset LP is infeasible.
ExactResult brute_force_optimal(const CcpInstance& instance, int max_scenarios = 20,
                                const Tolerances& tol = {}, int jobs = 1);

/// Best chance-feasible candidate by cost. Throws InfeasibleError when none qualifies.
ExactResult grid_brute_force(const CcpInstance& instance, const std::vector<Vector>& candidates,
                             const Tolerances& tol = {});

}  // namespace sccvar
