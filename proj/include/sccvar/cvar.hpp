#pragma once

#include <optional>

#include "sccvar/conic.hpp"
#include "sccvar/model.hpp"

namespace sccvar {

/// Lower bound placed on beta in every LP so degenerate instances stay bounded.
inline constexpr double kBetaFloor = -1e9;

struct CvarSolution {
  conic::SolveStatus status = conic::SolveStatus::NumericalError;
  Vector x;
  double beta = 0.0;
  Vector s;
  Vector alpha;
  double objective = kInf;
  /// beta ended on kBetaFloor.
  bool beta_floor_active = false;

  bool optimal() const { return status == conic::SolveStatus::Optimal; }
};

/// Options shared by the fixed-alpha LP builders.
struct CvarLpOptions {
  /// Adds the row c'x <= budget when set.
  std::optional<double> budget;
};

/// Variables (x, beta, s) in that order.
conic::LinearProgramSpec build_scaled_cvar_lp(const CcpInstance& instance, const Vector& alpha,
                                              const CvarLpOptions& options = {});

CvarSolution solve_cvar(const CcpInstance& instance, const Tolerances& tol = {});

/// Infeasible instances come back with status Infeasible; other solver trouble throws
/// SolverFailure.
CvarSolution solve_scaled_cvar(const CcpInstance& instance, const ScalingVector& alpha,
                               const Tolerances& tol = {}, const CvarLpOptions& options = {});

struct ScaledTriple {
  Vector alpha;
  double beta = 0.0;
  Vector s;
};

/// Feasible (alpha, beta, s) for the scaled constraints at fixed x with 1 <= alpha <= alpha_max.
/// Among feasible triples the one with the smallest p'alpha is returned.
std::optional<ScaledTriple> scaled_feasibility_at_x(const CcpInstance& instance, const Vector& x,
                                                    const Tolerances& tol = {});

/// min_beta beta + (1/eps) * sum_i p_i [g_max(i,x) - beta]_+.
double evaluate_cvar_at_x(const CcpInstance& instance, const Vector& x);

/// min over beta <= 0 of eps*beta + sum_i p_i [alpha_i g_max(i,x) - beta]_+. Nonpositive iff
/// x is feasible to the alpha-scaled approximation (with x in X).
double scaled_risk_value(const CcpInstance& instance, const Vector& x, const Vector& alpha,
                         double* beta_out = nullptr);

/// Whether x (with c'x <= budget when given) satisfies the alpha-scaled constraints to `slack`.
bool scaled_feasible_point(const CcpInstance& instance, const Vector& x, const Vector& alpha,
                           double slack, const std::optional<double>& budget = std::nullopt);

/// Same quantity for raw values and weights.
double cvar_of(const Vector& values, const Vector& probs, double epsilon);

}  // namespace sccvar
