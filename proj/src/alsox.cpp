#include "sccvar/alsox.hpp"

#include <cmath>

#include "sccvar/conic.hpp"
#include "sccvar/cvar.hpp"
#include "sccvar/errors.hpp"
#include "sccvar/scaling.hpp"

namespace sccvar {

LowerLevelSolution lower_level(const CcpInstance& inst, double t, const Tolerances& tol) {
  const int n = inst.n();
  const int N = inst.num_scenarios();
  CvarLpOptions options;
  if (std::isfinite(t)) options.budget = t;
  // Same rows as the CVaR LP with the risk row moved into the objective.
  conic::LinearProgramSpec lp = build_scaled_cvar_lp(inst, Vector::Ones(N), options);
  lp.objective.setZero();
  lp.objective(n) = inst.epsilon;
  lp.objective.tail(N) = inst.probabilities();
  const int rows = static_cast<int>(lp.A.rows());
  lp.A = lp.A.bottomRows(rows - 1).eval();
  lp.b = lp.b.tail(rows - 1).eval();
  const conic::SolveResult r = conic::solve_lp(lp, tol);
  if (r.status == conic::SolveStatus::Infeasible)
    throw InfeasibleError("budget row c'x <= " + std::to_string(t) + " cuts off X");
  if (!r.optimal()) throw SolverFailure("lower-level LP: " + conic::to_string(r.status));
  LowerLevelSolution sol;
  sol.x = r.z.head(n);
  sol.beta = r.z(n);
  sol.value = r.objective;
  return sol;
}

int BisectionReport::step_bound(double delta_A) const {
  const double gap = initial_t_U - initial_t_L;
  if (gap <= delta_A) return 0;
  return static_cast<int>(std::ceil(std::log2(gap / delta_A) - 1e-12));
}

double default_lower_bound(const CcpInstance& inst, const Tolerances& tol) {
  conic::LinearProgramSpec lp;
  lp.objective = inst.cost;
  lp.A = inst.domain.P.rows() > 0 ? inst.domain.P : Matrix::Zero(0, inst.n());
  lp.b = inst.domain.q;
  lp.lower = inst.domain.lb;
  lp.upper = inst.domain.ub;
  const conic::SolveResult r = conic::solve_lp(lp, tol);
  if (r.status == conic::SolveStatus::Unbounded)
    throw ConfigError("c'x is unbounded below over X; supply t_L");
  if (!r.optimal()) throw SolverFailure("lower bound LP: " + conic::to_string(r.status));
  return r.objective;
}

namespace {

BisectionReport bisect(const CcpInstance& inst, double t_L, double t_U, double delta_A,
                       const Tolerances& tol, bool scaled) {
  if (!(t_L <= t_U)) throw ConfigError("t_L must not exceed t_U");
  if (!(delta_A > 0.0)) throw ConfigError("delta_A must be positive");
  BisectionReport report;
  report.initial_t_L = t_L;
  report.initial_t_U = t_U;

  try {
    const LowerLevelSolution top = lower_level(inst, t_U, tol);
    if (!chance_feasible(inst, top.x, tol.feas_tol))
      throw NoFeasibleIncumbent("lower-level point at t_U is not chance-feasible");
    report.x = top.x;
  } catch (const InfeasibleError&) {
    throw NoFeasibleIncumbent("budget t_U leaves no point of X");
  }

  while (t_U - t_L > delta_A) {
    BisectionStep step;
    step.t = 0.5 * (t_L + t_U);
    Vector candidate;
    bool have_point = false;
    LowerLevelSolution ll;
    try {
      ll = lower_level(inst, step.t, tol);
      have_point = true;
      step.lower_value = ll.value;
      step.feasible = chance_feasible(inst, ll.x, tol.feas_tol);
      candidate = ll.x;
    } catch (const InfeasibleError&) {
      step.lower_value = kInf;
    }
    if (scaled && have_point && !step.feasible) {
      Algorithm1Options options;
      options.budget = step.t;
      try {
        const IterationTrace trace = algorithm1(inst, ll.x, tol, options);
        if (trace.has_incumbent() && trace.records[trace.incumbent_index].feasible &&
            inst.cost.dot(trace.incumbent_x) <= step.t + tol.feas_tol * (1.0 + std::abs(step.t))) {
          step.feasible = true;
          step.rescued = true;
          candidate = trace.incumbent_x;
        }
      } catch (const Error&) {
        // No rescue: the step stays infeasible.
      }
    }
    if (step.feasible) {
      t_U = step.t;
      report.x = candidate;
    } else {
      t_L = step.t;
    }
    step.t_L = t_L;
    step.t_U = t_U;
    report.steps.push_back(step);
  }
  report.t_L = t_L;
  report.t_U = t_U;
  return report;
}

}  // namespace

BisectionReport alsox_sharp(const CcpInstance& inst, double t_L, double t_U, double delta_A,
                            const Tolerances& tol) {
  return bisect(inst, t_L, t_U, delta_A, tol, false);
}

BisectionReport scaled_alsox_sharp(const CcpInstance& inst, double t_L, double t_U,
                                   double delta_A, const Tolerances& tol) {
  return bisect(inst, t_L, t_U, delta_A, tol, true);
}

}  // namespace sccvar
