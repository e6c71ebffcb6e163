#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sccvar/tolerances.hpp"
#include "sccvar/types.hpp"

namespace sccvar {

/// One realization of the uncertainty: J affine rows g_j(x) = W.row(j) * x + d(j).
struct Scenario {
  Matrix W;
  Vector d;
  double p = 0.0;
};

/// Deterministic feasible set: lb <= x <= ub and P x <= q.
struct Domain {
  Vector lb;
  Vector ub;
  Matrix P;
  Vector q;

  /// Box [lb, ub]^n with no extra rows.
  static Domain box(int n, double lb, double ub);
};

/// Finite-scenario chance-constrained program
///   min c'x  s.t.  x in X,  sum_i p_i 1[max_j g_ij(x) <= 0] >= 1 - epsilon.
struct CcpInstance {
  std::string name;
  Vector cost;
  std::vector<Scenario> scenarios;
  double epsilon = 0.0;
  Domain domain;

  int n() const { return static_cast<int>(cost.size()); }
  int num_scenarios() const { return static_cast<int>(scenarios.size()); }
  int rows_per_scenario() const {
    return scenarios.empty() ? 0 : static_cast<int>(scenarios.front().d.size());
  }
  Vector probabilities() const;
};

/// Per-scenario factors alpha_i in [1, alpha_max].
class ScalingVector {
 public:
  explicit ScalingVector(Vector alpha, double alpha_max = Tolerances{}.alpha_max);

  static ScalingVector ones(int num_scenarios);

  const Vector& values() const { return alpha_; }
  double operator[](int i) const { return alpha_(i); }
  int size() const { return static_cast<int>(alpha_.size()); }

 private:
  Vector alpha_;
};

enum class RegularityVerdict { Pass, PerturbedNeededWarning, Unknown };

/// Checks every type invariant; throws DimensionMismatch, ProbabilityError or RiskLevelError.
void validate(const CcpInstance& instance);

/// Row values (g_ij(x))_j of scenario i (0-based).
Vector evaluate_g(const CcpInstance& instance, int i, const Vector& x);
double g_max(const CcpInstance& instance, int i, const Vector& x);
/// All N worst-row values at x.
Vector g_max_all(const CcpInstance& instance, const Vector& x);

/// Probability mass of scenarios with g_max > tol.
double violation_probability(const CcpInstance& instance, const Vector& x, double tol);
bool chance_feasible(const CcpInstance& instance, const Vector& x, double tol);

/// Multiplies scenario i's rows by alpha_i; everything else is copied.
CcpInstance scale_scenarios(const CcpInstance& instance, const ScalingVector& alpha);

/// Divides every row by its (positive) offset so the constant term becomes 1.
CcpInstance normalize_covering_rows(const CcpInstance& instance);

/// Point of X with every scenario row <= delta_bar, or nullopt when none exists.
std::optional<Vector> certificate_point(const CcpInstance& instance, double delta_bar,
                                        const Tolerances& tol = {});

/// Whether sum_{i in I} p_i == epsilon can happen for some subset I.
RegularityVerdict epsilon_regularity_check(const CcpInstance& instance);

/// Whether x lies in X up to tol.
bool in_domain(const CcpInstance& instance, const Vector& x, double tol);

std::string to_string(RegularityVerdict verdict);

}  // namespace sccvar
