#include "sccvar/sca.hpp"

#include <algorithm>
#include <cmath>

#include "sccvar/cvar.hpp"
#include "sccvar/errors.hpp"
#include "sccvar/scaling.hpp"

namespace sccvar {

double DcLinearization::evaluate(int i, int j, double alpha, const Vector& x,
                                 const Vector& w) const {
  return value(i, j) + slope_alpha(i, j) * (alpha - alpha_anchor(i)) +
         grad_x(i, j, w).dot(x - x_anchor);
}

DcLinearization linearize(const CcpInstance& inst, const Vector& x_k, const Vector& alpha_k) {
  const int N = inst.num_scenarios();
  if (alpha_k.size() != N) throw DimensionMismatch("alpha_k length != N");
  DcLinearization lin;
  lin.x_anchor = x_k;
  lin.alpha_anchor = alpha_k;
  lin.residual.resize(N, inst.rows_per_scenario());
  for (int i = 0; i < N; ++i)
    lin.residual.row(i) = (alpha_k(i) - evaluate_g(inst, i, x_k).array()).transpose();
  return lin;
}

int DcLayout::size() const {
  int count = 0;
  for (int c : alpha_column)
    if (c >= 0) ++count;
  return n + 1 + num_scenarios + count;
}

DcLayout dc_layout(const CcpInstance& inst, const std::vector<bool>& relax) {
  const int N = inst.num_scenarios();
  if (static_cast<int>(relax.size()) != N) throw DimensionMismatch("relax set length != N");
  DcLayout layout;
  layout.n = inst.n();
  layout.num_scenarios = N;
  layout.alpha_column.assign(N, -1);
  int next = layout.n + 1 + N;
  for (int i = 0; i < N; ++i)
    if (relax[i]) layout.alpha_column[i] = next++;
  return layout;
}

conic::SocpSpec dc_subproblem(const CcpInstance& inst, const Vector& x_k, const Vector& alpha_k,
                              const std::vector<bool>& relax, const Tolerances& tol) {
  const int n = inst.n();
  const int N = inst.num_scenarios();
  const int J = inst.rows_per_scenario();
  if (x_k.size() != n) throw DimensionMismatch("x_k length != n");
  if (alpha_k.size() != N) throw DimensionMismatch("alpha_k length != N");
  for (int i = 0; i < N; ++i)
    if (alpha_k(i) < 1.0) throw ScalingOutOfRange("alpha_k below 1");
  const DcLayout layout = dc_layout(inst, relax);
  const int nv = layout.size();
  const DcLinearization lin = linearize(inst, x_k, alpha_k);

  std::vector<Eigen::RowVectorXd> rows;
  std::vector<double> rhs;
  auto add_row = [&](Eigen::RowVectorXd row, double b) {
    rows.push_back(std::move(row));
    rhs.push_back(b);
  };
  auto unit = [&](int col, double v) {
    Eigen::RowVectorXd r = Eigen::RowVectorXd::Zero(nv);
    r(col) = v;
    return r;
  };

  {
    Eigen::RowVectorXd risk = Eigen::RowVectorXd::Zero(nv);
    risk(layout.beta()) = inst.epsilon;
    for (int i = 0; i < N; ++i) risk(layout.s(i)) = inst.scenarios[i].p;
    add_row(risk, 0.0);
  }
  for (int i = 0; i < N; ++i) {
    if (relax[i]) continue;
    const Scenario& sc = inst.scenarios[i];
    for (int j = 0; j < J; ++j) {
      Eigen::RowVectorXd r = Eigen::RowVectorXd::Zero(nv);
      r.head(n) = sc.W.row(j);
      r(layout.beta()) = -1.0;
      r(layout.s(i)) = -1.0;
      add_row(r, -sc.d(j));
    }
  }
  for (int j = 0; j < n; ++j) {
    if (std::isfinite(inst.domain.lb(j))) add_row(unit(j, -1.0), -inst.domain.lb(j));
    if (std::isfinite(inst.domain.ub(j))) add_row(unit(j, 1.0), inst.domain.ub(j));
  }
  for (int r = 0; r < inst.domain.P.rows(); ++r) {
    Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(nv);
    row.head(n) = inst.domain.P.row(r);
    add_row(row, inst.domain.q(r));
  }
  add_row(unit(layout.beta(), 1.0), 0.0);
  for (int i = 0; i < N; ++i) add_row(unit(layout.s(i), -1.0), 0.0);
  for (int i = 0; i < N; ++i) {
    const int a = layout.alpha_column[i];
    if (a < 0) continue;
    add_row(unit(a, -1.0), -1.0);
    add_row(unit(a, 1.0), tol.alpha_max);
  }

  conic::SocpSpec spec;
  spec.objective = Vector::Zero(nv);
  spec.objective.head(n) = inst.cost;
  spec.A.resize(static_cast<int>(rows.size()), nv);
  spec.b.resize(static_cast<int>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    spec.A.row(r) = rows[r];
    spec.b(r) = rhs[r];
  }

  // q = alpha_i + g_ij(x),  r = 4(s_i + beta) + Taylor term;  q^2 <= r as
  // ||(2q, mu - r/mu)|| <= mu + r/mu with mu ~ |q| at the anchor for conditioning.
  for (int i = 0; i < N; ++i) {
    const int a = layout.alpha_column[i];
    if (a < 0) continue;
    const Scenario& sc = inst.scenarios[i];
    for (int j = 0; j < J; ++j) {
      const double R = lin.residual(i, j);
      const double gk = alpha_k(i) - R;
      Vector dq = Vector::Zero(nv);
      dq.head(n) = sc.W.row(j).transpose();
      dq(a) = 1.0;
      const double q0 = sc.d(j);
      Vector dr = Vector::Zero(nv);
      dr(layout.s(i)) = 4.0;
      dr(layout.beta()) = 4.0;
      dr(a) = 2.0 * R;
      dr.head(n) = -2.0 * R * sc.W.row(j).transpose();
      const double r0 = R * R - 2.0 * R * alpha_k(i) + 2.0 * R * sc.W.row(j).dot(x_k);
      const double mu = std::max({1.0, std::abs(alpha_k(i) + gk), std::abs(R)});
      conic::ConeBlock cb;
      cb.F.resize(2, nv);
      cb.F.row(0) = 2.0 * dq.transpose();
      cb.F.row(1) = -dr.transpose() / mu;
      cb.f.resize(2);
      cb.f(0) = 2.0 * q0;
      cb.f(1) = mu - r0 / mu;
      cb.g = dr / mu;
      cb.h = mu + r0 / mu;
      spec.cones.push_back(std::move(cb));
    }
  }
  return spec;
}

namespace {

struct DcStep {
  bool ok = false;
  conic::SolveStatus status = conic::SolveStatus::NumericalError;
  Vector x;
  Vector alpha;
};

DcStep solve_dc(const CcpInstance& inst, const Vector& x_k, const Vector& alpha_k,
                const std::vector<bool>& relax, const Tolerances& tol) {
  const conic::SocpSpec spec = dc_subproblem(inst, x_k, alpha_k, relax, tol);
  const DcLayout layout = dc_layout(inst, relax);
  const conic::SolveResult r = conic::solve_conic(spec, tol);
  DcStep step;
  step.status = r.status;
  if (!r.optimal()) return step;
  step.ok = true;
  step.x = r.z.head(inst.n());
  step.alpha = Vector::Ones(inst.num_scenarios());
  for (int i = 0; i < inst.num_scenarios(); ++i) {
    const int a = layout.alpha_column[i];
    if (a >= 0) step.alpha(i) = std::clamp(r.z(a), 1.0, tol.alpha_max);
  }
  return step;
}

// Shared loop of Algorithms 2 and 3; `hybrid` selects the relax set I_k.
IterationTrace sca_loop(const CcpInstance& inst, const Vector& x0, const Tolerances& tol,
                        bool hybrid, const std::string& stage) {
  const int N = inst.num_scenarios();
  if (x0.size() != inst.n()) throw DimensionMismatch("x0 length != n");
  IterationTrace trace;
  IterationRecord first;
  first.k = 0;
  first.objective = inst.cost.dot(x0);
  first.x = x0;
  first.alpha = Vector::Ones(N);
  first.delta = kInf;
  first.feasible = chance_feasible(inst, x0, tol.feas_tol);
  first.anchor_admissible = scaled_feasible_point(inst, x0, first.alpha, kAnchorSlack);
  first.stage = stage;
  trace.records.push_back(first);

  Vector x = x0;
  Vector alpha = first.alpha;
  double prev = first.objective;
  trace.termination = Termination::MaxIter;
  for (int k = 0; k < tol.max_iter; ++k) {
    std::vector<bool> relax(N, true);
    if (hybrid) {
      const Vector g = g_max_all(inst, x);
      for (int i = 0; i < N; ++i) relax[i] = g(i) < tol.delta2;
    }
    // Pinned scenarios restart from alpha = 1.
    for (int i = 0; i < N; ++i)
      if (!relax[i]) alpha(i) = 1.0;
    const bool admissible = scaled_feasible_point(inst, x, alpha, kAnchorSlack);

    const DcStep step = solve_dc(inst, x, alpha, relax, tol);
    if (!step.ok) {
      if (step.status == conic::SolveStatus::Infeasible) {
        if (k == 0) throw InfeasibleError("first convex subproblem is infeasible");
        trace.termination = Termination::Infeasible;
      } else {
        trace.termination = Termination::NumericalError;
      }
      break;
    }
    IterationRecord rec;
    rec.k = k + 1;
    rec.x = step.x;
    rec.alpha = step.alpha;
    rec.objective = inst.cost.dot(step.x);
    rec.anchor_admissible = admissible;
    if (admissible && rec.objective > prev &&
        rec.objective - prev <= kRoundoffIncrease * (1.0 + std::abs(prev))) {
      rec.x = x;
      rec.alpha = alpha;
      rec.objective = prev;
      rec.kept_previous = true;
    }
    rec.delta = std::abs(prev - rec.objective);
    rec.feasible = chance_feasible(inst, rec.x, tol.feas_tol);
    rec.clipped = (rec.alpha.array() >= tol.alpha_max).any();
    rec.stage = stage;
    trace.records.push_back(rec);
    x = rec.x;
    alpha = rec.alpha;
    prev = rec.objective;
    if (rec.delta < tol.delta1) {
      trace.termination = Termination::Converged;
      break;
    }
  }
  trace.refresh_incumbent();
  return trace;
}

}  // namespace

IterationTrace algorithm2(const CcpInstance& inst, const Vector& x0, const Tolerances& tol) {
  return sca_loop(inst, x0, tol, false, "alg2");
}

IterationTrace algorithm3_hybrid(const CcpInstance& inst, const Vector& x0,
                                 const Tolerances& tol) {
  IterationTrace trace = sca_loop(inst, x0, tol, true, "alg3");
  const IterationRecord last = trace.records.back();

  // Fixed-alpha LP at the final alpha: the last iterate is feasible there.
  CvarSolution post;
  try {
    post = solve_scaled_cvar(inst, ScalingVector(last.alpha, tol.alpha_max), tol);
  } catch (const SolverFailure&) {
    trace.termination = Termination::NumericalError;
    trace.refresh_incumbent();
    return trace;
  }
  if (!post.optimal()) {
    trace.refresh_incumbent();
    return trace;
  }
  IterationRecord rec;
  rec.k = last.k + 1;
  rec.x = post.x;
  rec.alpha = last.alpha;
  rec.objective = post.objective;
  rec.anchor_admissible = scaled_feasible_point(inst, last.x, last.alpha, kAnchorSlack);
  if (rec.anchor_admissible && rec.objective > last.objective &&
      rec.objective - last.objective <= kRoundoffIncrease * (1.0 + std::abs(last.objective))) {
    rec.x = last.x;
    rec.objective = last.objective;
    rec.kept_previous = true;
  }
  rec.delta = std::abs(last.objective - rec.objective);
  rec.feasible = chance_feasible(inst, rec.x, tol.feas_tol);
  rec.clipped = last.clipped;
  rec.stage = "post";
  trace.records.push_back(rec);

  Algorithm1Options options;
  options.alpha0 = last.alpha;
  IterationTrace refine;
  try {
    refine = algorithm1(inst, rec.x, tol, options);
  } catch (const Error&) {
    trace.refresh_incumbent();
    return trace;
  }
  for (std::size_t r = 1; r < refine.records.size(); ++r) {
    IterationRecord next = refine.records[r];
    next.k = rec.k + static_cast<int>(r);
    trace.records.push_back(next);
  }
  trace.termination = refine.termination;
  trace.refresh_incumbent();
  return trace;
}

}  // namespace sccvar
