#pragma once

#include <optional>
#include <vector>

#include "sccvar/model.hpp"
#include "sccvar/trace.hpp"

namespace sccvar {

struct ConstructionOutput {
  Vector alpha_hat;
  double beta_hat = 0.0;
  Vector s_hat;
  double tau = 0.0;
  double alpha_bar = 0.0;
  /// Scenarios with g_max below the threshold.
  std::vector<bool> strict_set;
  bool clipped = false;
  /// The triple satisfies every scaled-CVaR row at x* to 1e-9.
  bool verified = false;
};

/// Closed-form scaling that makes x* feasible to the scaled CVaR approximation.
/// Throws ConditionViolated when the strictly satisfied mass is at most 1 - epsilon.
ConstructionOutput theorem1_construct(const CcpInstance& instance, const Vector& x_star,
                                      double strict_threshold, const Tolerances& tol = {});

/// (1 - eps) x* + eps * mean(witnesses).
Vector theorem2_blend(const Vector& x_star, const std::vector<Vector>& witnesses,
                      double eps_blend);

struct Algorithm1Options {
  /// Starting scaling (all ones by default).
  std::optional<Vector> alpha0;
  /// Entries set to true keep alpha_i = 1.
  std::optional<std::vector<bool>> fixed_mask;
  /// Extra row c'x <= budget in every LP.
  std::optional<double> budget;
};

/// Alternates the closed-form alpha update with the fixed-alpha LP. Throws InfeasibleError
/// when the first LP is infeasible.
IterationTrace algorithm1(const CcpInstance& instance, const Vector& x0,
                          const Tolerances& tol = {}, const Algorithm1Options& options = {});

/// eta_i = min c'x over X with every row of scenario i satisfied (+inf if none).
Vector eta_bounds(const CcpInstance& instance, const Tolerances& tol = {}, int jobs = 1);

/// true where eta_i > v_upper + feas_tol.
std::vector<bool> prune_alpha_mask(const Vector& eta, double v_upper, double feas_tol = 1e-6);

}  // namespace sccvar
