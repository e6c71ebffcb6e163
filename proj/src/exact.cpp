#include "sccvar/exact.hpp"

#include <algorithm>
#include <cmath>

#include "parallel.hpp"
#include "sccvar/conic.hpp"
#include "sccvar/errors.hpp"

namespace sccvar {

double subset_lp_value(const CcpInstance& inst, const std::vector<int>& subset, Vector* x,
                       const Tolerances& tol) {
  const int n = inst.n();
  const int J = inst.rows_per_scenario();
  const int extra = static_cast<int>(inst.domain.P.rows());
  const int k = static_cast<int>(subset.size());
  conic::LinearProgramSpec lp;
  lp.objective = inst.cost;
  lp.A.resize(k * J + extra, n);
  lp.b.resize(k * J + extra);
  for (int r = 0; r < k; ++r) {
    const Scenario& sc = inst.scenarios.at(subset[r]);
    lp.A.middleRows(r * J, J) = sc.W;
    lp.b.segment(r * J, J) = -sc.d;
  }
  if (extra > 0) {
    lp.A.bottomRows(extra) = inst.domain.P;
    lp.b.tail(extra) = inst.domain.q;
  }
  lp.lower = inst.domain.lb;
  lp.upper = inst.domain.ub;
  const conic::SolveResult r = conic::solve_lp(lp, tol);
  if (r.status == conic::SolveStatus::Infeasible) return kInf;
  if (r.status == conic::SolveStatus::Unbounded) return -kInf;
  if (!r.optimal()) throw SolverFailure("subset LP: " + conic::to_string(r.status));
  if (x) *x = r.z;
  return r.objective;
}

namespace {

std::vector<int> satisfied(const CcpInstance& inst, const Vector& x, double tol) {
  const Vector g = g_max_all(inst, x);
  std::vector<int> out;
  for (int i = 0; i < g.size(); ++i)
    if (g(i) <= tol) out.push_back(i);
  return out;
}

}  // namespace

ExactResult brute_force_optimal(const CcpInstance& inst, int max_scenarios,
                                const Tolerances& tol, int jobs) {
  const int N = inst.num_scenarios();
  if (N > max_scenarios || N > 30)
    throw TooLarge("exact oracle limited to " + std::to_string(max_scenarios) + " scenarios");
  const Vector p = inst.probabilities();
  const double need = 1.0 - inst.epsilon - 1e-9;

  std::vector<std::vector<int>> subsets;
  const unsigned long long total = 1ULL << N;
  for (unsigned long long mask = 0; mask < total; ++mask) {
    double mass = 0.0;
    double smallest = kInf;
    for (int i = 0; i < N; ++i) {
      if (mask & (1ULL << i)) {
        mass += p(i);
        smallest = std::min(smallest, p(i));
      }
    }
    if (mass < need) continue;
    // Inclusion-minimal: dropping the lightest member must break the mass condition.
    if (mask != 0 && mass - smallest >= need) continue;
    std::vector<int> s;
    for (int i = 0; i < N; ++i)
      if (mask & (1ULL << i)) s.push_back(i);
    subsets.push_back(std::move(s));
  }
  std::sort(subsets.begin(), subsets.end());

  const int count = static_cast<int>(subsets.size());
  std::vector<double> values(count, kInf);
  std::vector<Vector> points(count);
  detail::parallel_for(count, jobs, [&](int k) {
    values[k] = subset_lp_value(inst, subsets[k], &points[k], tol);
  });

  ExactResult res;
  res.subproblems_solved = count;
  int best = -1;
  for (int k = 0; k < count; ++k) {
    if (values[k] == -kInf) throw ConfigError("subset LP is unbounded; the oracle needs bounded X");
    if (!std::isfinite(values[k])) continue;
    if (best < 0 || values[k] < values[best] - 1e-9 * (1.0 + std::abs(values[best]))) best = k;
  }
  if (best < 0) throw InfeasibleError("every scenario subset LP is infeasible");
  res.v_star = values[best];
  res.x_star = points[best];
  res.support = subsets[best];
  res.satisfied_set = satisfied(inst, res.x_star, tol.feas_tol);
  return res;
}

ExactResult grid_brute_force(const CcpInstance& inst, const std::vector<Vector>& candidates,
                             const Tolerances& tol) {
  if (candidates.empty()) throw ConfigError("candidate list is empty");
  ExactResult res;
  int best = -1;
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    const Vector& x = candidates[k];
    ++res.subproblems_solved;
    if (!in_domain(inst, x, tol.feas_tol) || !chance_feasible(inst, x, tol.feas_tol)) continue;
    const double v = inst.cost.dot(x);
    if (best < 0 || v < res.v_star) {
      best = static_cast<int>(k);
      res.v_star = v;
    }
  }
  if (best < 0) throw InfeasibleError("no candidate is chance-feasible");
  res.x_star = candidates[best];
  res.satisfied_set = satisfied(inst, res.x_star, tol.feas_tol);
  return res;
}

}  // namespace sccvar
