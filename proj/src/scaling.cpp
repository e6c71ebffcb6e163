#include "sccvar/scaling.hpp"

#include <algorithm>
#include <cmath>

#include "parallel.hpp"
#include "sccvar/conic.hpp"
#include "sccvar/cvar.hpp"
#include "sccvar/errors.hpp"

namespace sccvar {

ConstructionOutput theorem1_construct(const CcpInstance& inst, const Vector& x_star,
                                      double strict_threshold, const Tolerances& tol) {
  if (strict_threshold > 0.0) throw ConfigError("strict_threshold must be <= 0");
  const int N = inst.num_scenarios();
  const Vector g = g_max_all(inst, x_star);
  ConstructionOutput out;
  out.strict_set.assign(N, false);
  double tau = 0.0;
  double weighted = 0.0;
  for (int i = 0; i < N; ++i) {
    out.strict_set[i] = g(i) < strict_threshold;
    if (!out.strict_set[i]) {
      tau += inst.scenarios[i].p;
      weighted += inst.scenarios[i].p * g(i);
    }
  }
  out.tau = tau;
  if (inst.epsilon - tau <= 1e-12) throw ConditionViolated(tau, inst.epsilon);
  // Negative only when every violated row is already satisfied; zero keeps beta <= 0.
  out.alpha_bar = std::max(0.0, weighted / (inst.epsilon - tau));
  out.beta_hat = -out.alpha_bar;
  out.alpha_hat = Vector::Ones(N);
  out.s_hat = Vector::Zero(N);
  for (int i = 0; i < N; ++i) {
    if (out.strict_set[i]) {
      double a = std::max(-out.alpha_bar / g(i), 1.0);
      if (a > tol.alpha_max) {
        a = tol.alpha_max;
        out.clipped = true;
      }
      out.alpha_hat(i) = a;
    } else {
      out.s_hat(i) = std::max(0.0, g(i) + out.alpha_bar);
    }
  }
  double worst = inst.epsilon * out.beta_hat + inst.probabilities().dot(out.s_hat);
  for (int i = 0; i < N; ++i) {
    const Vector gi = evaluate_g(inst, i, x_star);
    worst = std::max(worst, (out.alpha_hat(i) * gi.array() - out.s_hat(i) - out.beta_hat).maxCoeff());
  }
  out.verified = worst <= 1e-9 * (1.0 + out.alpha_bar);
  return out;
}

Vector theorem2_blend(const Vector& x_star, const std::vector<Vector>& witnesses,
                      double eps_blend) {
  if (witnesses.empty()) throw ConfigError("theorem2_blend needs at least one witness");
  if (!(eps_blend > 0.0 && eps_blend < 1.0)) throw ConfigError("eps_blend must lie in (0,1)");
  Vector mean = Vector::Zero(x_star.size());
  for (const Vector& w : witnesses) {
    if (w.size() != x_star.size()) throw DimensionMismatch("witness length != length of x*");
    mean += w;
  }
  mean /= static_cast<double>(witnesses.size());
  return (1.0 - eps_blend) * x_star + eps_blend * mean;
}

IterationTrace algorithm1(const CcpInstance& inst, const Vector& x0, const Tolerances& tol,
                          const Algorithm1Options& options) {
  const int N = inst.num_scenarios();
  if (x0.size() != inst.n()) throw DimensionMismatch("x0 length != n");
  Vector alpha = options.alpha0 ? *options.alpha0 : Vector::Ones(N);
  if (alpha.size() != N) throw DimensionMismatch("alpha0 length != N");
  std::vector<bool> fixed = options.fixed_mask ? *options.fixed_mask : std::vector<bool>(N, false);
  if (static_cast<int>(fixed.size()) != N) throw DimensionMismatch("fixed_mask length != N");
  for (int i = 0; i < N; ++i) {
    alpha(i) = std::clamp(alpha(i), 1.0, tol.alpha_max);
    if (fixed[i]) alpha(i) = 1.0;
  }
  CvarLpOptions lp_options;
  lp_options.budget = options.budget;
  const Vector p = inst.probabilities();

  IterationTrace trace;
  IterationRecord first;
  first.k = 0;
  first.objective = inst.cost.dot(x0);
  first.x = x0;
  first.alpha = alpha;
  first.delta = kInf;
  first.feasible = chance_feasible(inst, x0, tol.feas_tol);
  first.stage = "alg1";
  trace.records.push_back(first);

  Vector x = x0;
  double prev = first.objective;
  trace.termination = Termination::MaxIter;
  for (int k = 0; k < tol.max_iter; ++k) {
    const Vector g = g_max_all(inst, x);
    double tau = 0.0;
    double weighted = 0.0;
    for (int i = 0; i < N; ++i) {
      if (!(g(i) < tol.delta2)) {
        tau += p(i);
        weighted += p(i) * g(i);
      }
    }
    Vector next = alpha;
    bool stalled = false;
    bool clipped = false;
    if (inst.epsilon - tau <= 1e-12) {
      stalled = true;
      if (k > 0) {
        trace.termination = Termination::Stalled;
        break;
      }
    } else {
      const double alpha_bar = weighted / (inst.epsilon - tau);
      for (int i = 0; i < N; ++i) {
        if (fixed[i] || !(g(i) < tol.delta2)) {
          next(i) = 1.0;
          continue;
        }
        double a = std::max({-alpha_bar / g(i), 1.0, alpha(i)});
        if (a > tol.alpha_max) {
          a = tol.alpha_max;
          clipped = true;
        }
        next(i) = a;
      }
    }

    CvarSolution sol;
    try {
      sol = solve_scaled_cvar(inst, ScalingVector(next, tol.alpha_max), tol, lp_options);
    } catch (const SolverFailure&) {
      if (k == 0) throw;
      trace.termination = Termination::NumericalError;
      break;
    }
    if (sol.status == conic::SolveStatus::Infeasible) {
      if (k == 0) throw InfeasibleError("first scaled CVaR LP is infeasible");
      trace.termination = Termination::Infeasible;
      break;
    }
    if (!sol.optimal()) {
      if (k == 0) throw SolverFailure("scaled CVaR LP: " + conic::to_string(sol.status));
      trace.termination = Termination::NumericalError;
      break;
    }

    IterationRecord rec;
    rec.k = k + 1;
    rec.objective = sol.objective;
    rec.x = sol.x;
    rec.alpha = next;
    rec.anchor_admissible = scaled_feasible_point(inst, x, next, kAnchorSlack, options.budget);
    if (rec.anchor_admissible && sol.objective > prev &&
        sol.objective - prev <= kRoundoffIncrease * (1.0 + std::abs(prev))) {
      rec.objective = prev;
      rec.x = x;
      rec.kept_previous = true;
    }
    rec.delta = std::abs(prev - rec.objective);
    rec.feasible = chance_feasible(inst, rec.x, tol.feas_tol);
    rec.stalled = stalled;
    rec.clipped = clipped;
    rec.stage = "alg1";
    trace.records.push_back(rec);

    alpha = next;
    x = rec.x;
    prev = rec.objective;
    if (rec.delta < tol.delta1) {
      trace.termination = stalled ? Termination::Stalled : Termination::Converged;
      break;
    }
  }
  trace.refresh_incumbent();
  return trace;
}

Vector eta_bounds(const CcpInstance& inst, const Tolerances& tol, int jobs) {
  const int N = inst.num_scenarios();
  const int n = inst.n();
  const int J = inst.rows_per_scenario();
  const int extra = static_cast<int>(inst.domain.P.rows());
  Vector eta(N);
  detail::parallel_for(N, jobs, [&](int i) {
    conic::LinearProgramSpec lp;
    lp.objective = inst.cost;
    lp.A.resize(J + extra, n);
    lp.b.resize(J + extra);
    lp.A.topRows(J) = inst.scenarios[i].W;
    lp.b.head(J) = -inst.scenarios[i].d;
    if (extra > 0) {
      lp.A.bottomRows(extra) = inst.domain.P;
      lp.b.tail(extra) = inst.domain.q;
    }
    lp.lower = inst.domain.lb;
    lp.upper = inst.domain.ub;
    const conic::SolveResult r = conic::solve_lp(lp, tol);
    if (r.status == conic::SolveStatus::Infeasible)
      eta(i) = kInf;
    else if (r.status == conic::SolveStatus::Unbounded)
      eta(i) = -kInf;
    else if (r.optimal())
      eta(i) = r.objective;
    else
      throw SolverFailure("eta LP for scenario " + std::to_string(i) + ": " +
                          conic::to_string(r.status));
  });
  return eta;
}

std::vector<bool> prune_alpha_mask(const Vector& eta, double v_upper, double feas_tol) {
  std::vector<bool> mask(eta.size(), false);
  for (int i = 0; i < eta.size(); ++i) mask[i] = eta(i) > v_upper + feas_tol;
  return mask;
}

}  // namespace sccvar
