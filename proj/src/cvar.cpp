#include "sccvar/cvar.hpp"

#include <algorithm>

#include "sccvar/errors.hpp"

namespace sccvar {

conic::LinearProgramSpec build_scaled_cvar_lp(const CcpInstance& inst, const Vector& alpha,
                                              const CvarLpOptions& options) {
  const int n = inst.n();
  const int N = inst.num_scenarios();
  const int J = inst.rows_per_scenario();
  if (alpha.size() != N) throw DimensionMismatch("alpha length != N");
  const int extra = static_cast<int>(inst.domain.P.rows());
  const int budget_rows = options.budget ? 1 : 0;
  const int nv = n + 1 + N;
  const int rows = 1 + N * J + extra + budget_rows;

  conic::LinearProgramSpec lp;
  lp.objective = Vector::Zero(nv);
  lp.objective.head(n) = inst.cost;
  lp.A = Matrix::Zero(rows, nv);
  lp.b = Vector::Zero(rows);
  lp.A(0, n) = inst.epsilon;
  for (int i = 0; i < N; ++i) lp.A(0, n + 1 + i) = inst.scenarios[i].p;
  int r = 1;
  for (int i = 0; i < N; ++i) {
    const Scenario& sc = inst.scenarios[i];
    for (int j = 0; j < J; ++j, ++r) {
      lp.A.row(r).head(n) = alpha(i) * sc.W.row(j);
      lp.A(r, n) = -1.0;
      lp.A(r, n + 1 + i) = -1.0;
      lp.b(r) = -alpha(i) * sc.d(j);
    }
  }
  if (extra > 0) {
    lp.A.block(r, 0, extra, n) = inst.domain.P;
    lp.b.segment(r, extra) = inst.domain.q;
    r += extra;
  }
  if (options.budget) {
    lp.A.row(r).head(n) = inst.cost.transpose();
    lp.b(r) = *options.budget;
  }
  lp.lower = Vector::Zero(nv);
  lp.upper = Vector::Constant(nv, kInf);
  lp.lower.head(n) = inst.domain.lb;
  lp.upper.head(n) = inst.domain.ub;
  lp.lower(n) = kBetaFloor;
  lp.upper(n) = 0.0;
  return lp;
}

CvarSolution solve_scaled_cvar(const CcpInstance& inst, const ScalingVector& alpha,
                               const Tolerances& tol, const CvarLpOptions& options) {
  const conic::LinearProgramSpec lp = build_scaled_cvar_lp(inst, alpha.values(), options);
  const conic::SolveResult r = conic::solve_lp(lp, tol);
  CvarSolution sol;
  sol.status = r.status;
  sol.alpha = alpha.values();
  if (r.status == conic::SolveStatus::Infeasible || r.status == conic::SolveStatus::Unbounded)
    return sol;
  if (!r.optimal()) throw SolverFailure("scaled CVaR LP: " + conic::to_string(r.status));
  const int n = inst.n();
  sol.x = r.z.head(n);
  sol.beta = r.z(n);
  sol.s = r.z.tail(inst.num_scenarios());
  sol.objective = inst.cost.dot(sol.x);
  sol.beta_floor_active = sol.beta <= kBetaFloor + 1.0;
  return sol;
}

CvarSolution solve_cvar(const CcpInstance& inst, const Tolerances& tol) {
  return solve_scaled_cvar(inst, ScalingVector::ones(inst.num_scenarios()), tol);
}

std::optional<ScaledTriple> scaled_feasibility_at_x(const CcpInstance& inst, const Vector& x,
                                                    const Tolerances& tol) {
  const int N = inst.num_scenarios();
  const int J = inst.rows_per_scenario();
  // Columns: alpha (N), beta, s (N).
  const int nv = 2 * N + 1;
  const int beta = N;
  conic::LinearProgramSpec lp;
  lp.objective = Vector::Zero(nv);
  lp.A = Matrix::Zero(1 + N * J, nv);
  lp.b = Vector::Zero(1 + N * J);
  lp.A(0, beta) = inst.epsilon;
  for (int i = 0; i < N; ++i) {
    lp.objective(i) = inst.scenarios[i].p;
    lp.A(0, beta + 1 + i) = inst.scenarios[i].p;
  }
  int r = 1;
  for (int i = 0; i < N; ++i) {
    const Vector g = evaluate_g(inst, i, x);
    for (int j = 0; j < J; ++j, ++r) {
      lp.A(r, i) = g(j);
      lp.A(r, beta) = -1.0;
      lp.A(r, beta + 1 + i) = -1.0;
    }
  }
  lp.lower = Vector::Zero(nv);
  lp.upper = Vector::Constant(nv, kInf);
  lp.lower.head(N).setOnes();
  lp.upper.head(N).setConstant(tol.alpha_max);
  lp.lower(beta) = kBetaFloor;
  lp.upper(beta) = 0.0;
  const conic::SolveResult res = conic::solve_lp(lp, tol);
  if (res.status == conic::SolveStatus::Infeasible) return std::nullopt;
  if (!res.optimal()) throw SolverFailure("scaled feasibility LP: " + conic::to_string(res.status));
  ScaledTriple t;
  t.alpha = res.z.head(N);
  t.beta = res.z(beta);
  t.s = res.z.tail(N);
  return t;
}

double cvar_of(const Vector& values, const Vector& probs, double epsilon) {
  // Piecewise linear and convex in beta with breakpoints at the values.
  double best = kInf;
  for (int k = 0; k < values.size(); ++k) {
    const double beta = values(k);
    double tail = 0.0;
    for (int i = 0; i < values.size(); ++i) tail += probs(i) * std::max(values(i) - beta, 0.0);
    best = std::min(best, beta + tail / epsilon);
  }
  return best;
}

double scaled_risk_value(const CcpInstance& inst, const Vector& x, const Vector& alpha,
                         double* beta_out) {
  const Vector v = g_max_all(inst, x).cwiseProduct(alpha);
  const Vector p = inst.probabilities();
  auto risk = [&](double beta) {
    double total = inst.epsilon * beta;
    for (int i = 0; i < v.size(); ++i) total += p(i) * std::max(v(i) - beta, 0.0);
    return total;
  };
  double best_beta = 0.0;
  double best = risk(0.0);
  for (int k = 0; k < v.size(); ++k) {
    if (v(k) >= 0.0) continue;
    const double r = risk(v(k));
    if (r < best) {
      best = r;
      best_beta = v(k);
    }
  }
  if (beta_out) *beta_out = best_beta;
  return best;
}

bool scaled_feasible_point(const CcpInstance& inst, const Vector& x, const Vector& alpha,
                           double slack, const std::optional<double>& budget) {
  if (!in_domain(inst, x, slack)) return false;
  if (budget && inst.cost.dot(x) > *budget + slack * (1.0 + std::abs(*budget))) return false;
  return scaled_risk_value(inst, x, alpha) <= slack * (1.0 + alpha.maxCoeff());
}

double evaluate_cvar_at_x(const CcpInstance& inst, const Vector& x) {
  return cvar_of(g_max_all(inst, x), inst.probabilities(), inst.epsilon);
}

}  // namespace sccvar
