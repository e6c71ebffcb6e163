#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sccvar/model.hpp"

namespace sccvar {

enum class Family { Portfolio, Covering };

struct GeneratorConfig {
  Family family = Family::Portfolio;
  int n = 10;
  int N = 100;
  int J = 1;
  double epsilon = 0.100333;
  std::uint64_t seed = 1;
  /// Portfolio: sum x <= budget_fraction * n.
  double budget_fraction = 0.2;
  double xi_low = 0.8;
  double xi_high = 1.2;
  /// Covering: demand b = U[demand_low, demand_high] * row sum of A.
  double demand_low = 0.2;
  double demand_high = 0.8;
  /// Covering: probability that a cost entry is negated.
  double negative_cost_fraction = 0.0;

  void validate() const;
};

CcpInstance gen_portfolio(const GeneratorConfig& config);
CcpInstance gen_covering(const GeneratorConfig& config);
CcpInstance generate(const GeneratorConfig& config);

/// (v_cvar - v_method) / |v_cvar| * 100. Throws DegenerateBaseline for |v_cvar| <= 1e-12.
double improvement(double v_cvar, double v_method);

struct BenchRow {
  std::string instance;
  double epsilon = 0.0;
  std::string method;
  double value = kInf;
  double time_s = 0.0;
  double improvement_pct = 0.0;
  bool feasible = false;
  double violation_prob = 1.0;
  /// Empty on success, otherwise the error that ended the cell.
  std::string error;
};

/// Method names: cvar, alg1, alg2, alg3, alsox, alsox-scaled, exact.
const std::vector<std::string>& known_methods();

/// Result of one method on one instance (value +inf and an error message on failure).
struct MethodOutcome {
  double value = kInf;
  Vector x;
  std::string error;
};

/// Runs `method` starting from the given CVaR solution point.
MethodOutcome run_method(const CcpInstance& instance, const std::string& method,
                         const Vector& x_cvar, double v_cvar, const Tolerances& tol = {});

/// CVaR first as baseline, then every other method; per-cell errors are recorded, never
/// thrown. Rows are ordered by (instance, method) regardless of `jobs`.
std::vector<BenchRow> run_experiment(const std::vector<CcpInstance>& instances,
                                     const std::vector<std::string>& methods,
                                     const Tolerances& tol = {}, int jobs = 1);

std::string bench_csv_header();
std::string to_csv_line(const BenchRow& row);

}  // namespace sccvar
