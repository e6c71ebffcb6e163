#pragma once

#include <string>
#include <vector>

#include "sccvar/tolerances.hpp"
#include "sccvar/types.hpp"

namespace sccvar::conic {

enum class SolveStatus { Optimal, Infeasible, Unbounded, IterationLimit, NumericalError };

std::string to_string(SolveStatus status);

/// min objective'z  s.t.  A z <= b,  lower <= z <= upper (entries may be +-inf).
struct LinearProgramSpec {
  Vector objective;
  Matrix A;
  Vector b;
  Vector lower;
  Vector upper;

  int num_variables() const { return static_cast<int>(objective.size()); }
  /// Throws DimensionMismatch on inconsistent shapes.
  void check() const;
};

/// One second-order-cone block  || F z + f ||_2 <= g'z + h.
struct ConeBlock {
  Matrix F;
  Vector f;
  Vector g;
  double h = 0.0;
};

/// min objective'z  s.t.  A z <= b  and every cone block.
struct SocpSpec {
  Vector objective;
  Matrix A;
  Vector b;
  std::vector<ConeBlock> cones;

  int num_variables() const { return static_cast<int>(objective.size()); }
  void check() const;
};

struct SolveResult {
  SolveStatus status = SolveStatus::NumericalError;
  Vector z;
  double objective = 0.0;
  /// Dual objective at termination; equals objective up to opt_tol when Optimal.
  double dual_objective = 0.0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  int iterations = 0;
  /// Multipliers of the A z <= b rows (nonnegative) when available.
  Vector row_duals;

  bool optimal() const { return status == SolveStatus::Optimal; }
};

/// Two-phase dense tableau simplex. Dantzig pricing, switching permanently to
/// Bland's rule after 10 * (rows + cols) consecutive degenerate pivots.
SolveResult solve_lp(const LinearProgramSpec& spec, const Tolerances& tol = {});

/// Homogeneous self-dual primal-dual interior point with Nesterov-Todd scaling and
/// Mehrotra correction; stops when the relative residuals and gap drop below opt_tol,
/// at most 200 iterations.
SolveResult solve_socp(const SocpSpec& spec, const Tolerances& tol = {});

/// Dispatches cone-free specs to solve_lp and the rest to solve_socp.
SolveResult solve_conic(const SocpSpec& spec, const Tolerances& tol = {});

/// Converts a cone-free SOCP spec into an LP with free variables.
LinearProgramSpec as_linear_program(const SocpSpec& spec);

/// Debug dump for cross-checking against external solvers. Not a stable format.
std::string dump_json(const LinearProgramSpec& spec);
std::string dump_json(const SocpSpec& spec);

}  // namespace sccvar::conic
