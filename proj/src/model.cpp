#include "sccvar/model.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "sccvar/conic.hpp"
#include "sccvar/errors.hpp"

namespace sccvar {

void Tolerances::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v))
      throw ConfigError(std::string(name) + " must be positive and finite");
  };
  positive(feas_tol, "feas_tol");
  positive(opt_tol, "opt_tol");
  positive(delta1, "delta1");
  positive(delta_A, "delta_A");
  if (!(delta2 <= 0.0)) throw ConfigError("delta2 must be <= 0");
  if (!(delta_bar < 0.0)) throw ConfigError("delta_bar must be < 0");
  if (!(alpha_max >= 1.0) || !std::isfinite(alpha_max))
    throw ConfigError("alpha_max must be a finite value >= 1");
  if (max_iter < 1) throw ConfigError("max_iter must be >= 1");
}

Domain Domain::box(int n, double lb, double ub) {
  Domain d;
  d.lb = Vector::Constant(n, lb);
  d.ub = Vector::Constant(n, ub);
  d.P = Matrix::Zero(0, n);
  d.q = Vector::Zero(0);
  return d;
}

Vector CcpInstance::probabilities() const {
  Vector p(num_scenarios());
  for (int i = 0; i < num_scenarios(); ++i) p(i) = scenarios[i].p;
  return p;
}

ScalingVector::ScalingVector(Vector alpha, double alpha_max) : alpha_(std::move(alpha)) {
  for (int i = 0; i < alpha_.size(); ++i) {
    if (!(alpha_(i) >= 1.0)) throw ScalingOutOfRange("alpha below 1 at index " + std::to_string(i));
    if (alpha_(i) > alpha_max)
      throw ScalingOutOfRange("alpha above alpha_max at index " + std::to_string(i));
  }
}

ScalingVector ScalingVector::ones(int num_scenarios) {
  return ScalingVector(Vector::Ones(num_scenarios));
}

void validate(const CcpInstance& inst) {
  const int n = inst.n();
  if (n < 1) throw DimensionMismatch("decision dimension must be at least 1");
  if (inst.scenarios.empty()) throw DimensionMismatch("instance has no scenarios");
  const int J = inst.rows_per_scenario();
  if (J < 1) throw DimensionMismatch("scenarios need at least one row");
  if (!inst.cost.allFinite()) throw DimensionMismatch("cost has non-finite entries");
  double total = 0.0;
  for (int i = 0; i < inst.num_scenarios(); ++i) {
    const Scenario& s = inst.scenarios[i];
    if (s.W.rows() != J || s.d.size() != J || s.W.cols() != n)
      throw DimensionMismatch("scenario " + std::to_string(i) + " has inconsistent shape");
    if (!s.W.allFinite() || !s.d.allFinite())
      throw DimensionMismatch("scenario " + std::to_string(i) + " has non-finite data");
    if (!(s.p > 0.0) || s.p > 1.0)
      throw ProbabilityError("probability of scenario " + std::to_string(i) + " outside (0,1]");
    total += s.p;
  }
  if (std::abs(total - 1.0) > 1e-9) throw ProbabilityError("probabilities do not sum to 1");
  if (!(inst.epsilon > 0.0 && inst.epsilon < 1.0)) throw RiskLevelError("epsilon outside (0,1)");
  const Domain& d = inst.domain;
  if (d.lb.size() != n || d.ub.size() != n) throw DimensionMismatch("domain bounds length != n");
  for (int j = 0; j < n; ++j)
    if (std::isnan(d.lb(j)) || std::isnan(d.ub(j)) || d.lb(j) > d.ub(j))
      throw DimensionMismatch("domain bound lb > ub at index " + std::to_string(j));
  if (d.P.rows() != d.q.size()) throw DimensionMismatch("domain P rows != length of q");
  if (d.P.rows() > 0 && d.P.cols() != n) throw DimensionMismatch("domain P columns != n");
}

namespace {

void check_x(const CcpInstance& inst, const Vector& x) {
  if (x.size() != inst.n())
    throw DimensionMismatch("x has length " + std::to_string(x.size()) + ", expected " +
                            std::to_string(inst.n()));
}

void check_index(const CcpInstance& inst, int i) {
  if (i < 0 || i >= inst.num_scenarios())
    throw IndexOutOfRange("scenario index " + std::to_string(i) + " out of range");
}

}  // namespace

Vector evaluate_g(const CcpInstance& inst, int i, const Vector& x) {
  check_index(inst, i);
  check_x(inst, x);
  const Scenario& s = inst.scenarios[i];
  return s.W * x + s.d;
}

double g_max(const CcpInstance& inst, int i, const Vector& x) {
  return evaluate_g(inst, i, x).maxCoeff();
}

Vector g_max_all(const CcpInstance& inst, const Vector& x) {
  check_x(inst, x);
  Vector g(inst.num_scenarios());
  for (int i = 0; i < inst.num_scenarios(); ++i) {
    const Scenario& s = inst.scenarios[i];
    g(i) = (s.W * x + s.d).maxCoeff();
  }
  return g;
}

double violation_probability(const CcpInstance& inst, const Vector& x, double tol) {
  const Vector g = g_max_all(inst, x);
  double mass = 0.0;
  for (int i = 0; i < g.size(); ++i)
    if (g(i) > tol) mass += inst.scenarios[i].p;
  return mass;
}

bool chance_feasible(const CcpInstance& inst, const Vector& x, double tol) {
  return violation_probability(inst, x, tol) <= inst.epsilon + 1e-9;
}

CcpInstance scale_scenarios(const CcpInstance& inst, const ScalingVector& alpha) {
  if (alpha.size() != inst.num_scenarios())
    throw DimensionMismatch("scaling vector length != N");
  CcpInstance out = inst;
  for (int i = 0; i < inst.num_scenarios(); ++i) {
    if (!(alpha[i] >= 1.0)) throw ScalingOutOfRange("alpha below 1");
    out.scenarios[i].W *= alpha[i];
    out.scenarios[i].d *= alpha[i];
  }
  return out;
}

CcpInstance normalize_covering_rows(const CcpInstance& inst) {
  CcpInstance out = inst;
  for (int i = 0; i < inst.num_scenarios(); ++i) {
    Scenario& s = out.scenarios[i];
    for (int j = 0; j < s.d.size(); ++j) {
      if (!(s.d(j) > 0.0))
        throw NotCovering("row " + std::to_string(j) + " of scenario " + std::to_string(i) +
                          " has non-positive offset");
      s.W.row(j) /= s.d(j);
      s.d(j) = 1.0;
    }
  }
  return out;
}

std::optional<Vector> certificate_point(const CcpInstance& inst, double delta_bar,
                                        const Tolerances& tol) {
  if (!(delta_bar < 0.0)) throw ConfigError("delta_bar must be negative");
  const int n = inst.n();
  const int J = inst.rows_per_scenario();
  const int N = inst.num_scenarios();
  const int extra = static_cast<int>(inst.domain.P.rows());
  conic::LinearProgramSpec lp;
  lp.objective = Vector::Zero(n);
  lp.A.resize(N * J + extra, n);
  lp.b.resize(N * J + extra);
  for (int i = 0; i < N; ++i) {
    lp.A.middleRows(i * J, J) = inst.scenarios[i].W;
    lp.b.segment(i * J, J) = Vector::Constant(J, delta_bar) - inst.scenarios[i].d;
  }
  if (extra > 0) {
    lp.A.bottomRows(extra) = inst.domain.P;
    lp.b.tail(extra) = inst.domain.q;
  }
  lp.lower = inst.domain.lb;
  lp.upper = inst.domain.ub;
  const conic::SolveResult r = conic::solve_lp(lp, tol);
  if (r.status == conic::SolveStatus::Infeasible) return std::nullopt;
  if (!r.optimal()) throw SolverFailure("certificate LP: " + conic::to_string(r.status));
  return r.z;
}

RegularityVerdict epsilon_regularity_check(const CcpInstance& inst) {
  const int N = inst.num_scenarios();
  const Vector p = inst.probabilities();
  const double eps = inst.epsilon;
  const bool equiprobable = N > 0 && (p.array() - 1.0 / N).abs().maxCoeff() <= 1e-12;
  if (equiprobable) {
    const double k = N * eps;
    return std::abs(k - std::round(k)) <= 1e-9 ? RegularityVerdict::PerturbedNeededWarning
                                                : RegularityVerdict::Pass;
  }
  if (N > 20) return RegularityVerdict::Unknown;
  const unsigned long long total = 1ULL << N;
  for (unsigned long long mask = 0; mask < total; ++mask) {
    double mass = 0.0;
    for (int i = 0; i < N; ++i)
      if (mask & (1ULL << i)) mass += p(i);
    if (std::abs(mass - eps) <= 1e-9) return RegularityVerdict::PerturbedNeededWarning;
  }
  return RegularityVerdict::Pass;
}

bool in_domain(const CcpInstance& inst, const Vector& x, double tol) {
  check_x(inst, x);
  const Domain& d = inst.domain;
  for (int j = 0; j < x.size(); ++j)
    if (x(j) < d.lb(j) - tol || x(j) > d.ub(j) + tol) return false;
  if (d.P.rows() > 0 && (d.P * x - d.q).maxCoeff() > tol) return false;
  return true;
}

std::string to_string(RegularityVerdict verdict) {
  switch (verdict) {
    case RegularityVerdict::Pass:
      return "pass";
    case RegularityVerdict::PerturbedNeededWarning:
      return "perturbed-needed-warning";
    case RegularityVerdict::Unknown:
      return "unknown";
  }
  return "unknown";
}

}  // namespace sccvar
