#pragma once

#include <string>
#include <vector>

#include "sccvar/types.hpp"

namespace sccvar {

/// A subproblem whose previous iterate is still feasible cannot truly increase the objective;
/// increases up to this relative size are solver round-off and the previous iterate is kept.
inline constexpr double kRoundoffIncrease = 1e-6;
/// Constraint slack used when checking that the previous iterate stays feasible.
inline constexpr double kAnchorSlack = 1e-7;

enum class Termination { Converged, MaxIter, Stalled, Infeasible, NumericalError };

std::string to_string(Termination t);

struct IterationRecord {
  int k = 0;
  double objective = 0.0;
  Vector x;
  Vector alpha;
  /// |objective change| against the previous record (+inf on the first one).
  double delta = 0.0;
  /// chance_feasible at feas_tol.
  bool feasible = false;
  /// The alpha update was skipped because the violated mass reached epsilon.
  bool stalled = false;
  /// Some alpha hit alpha_max.
  bool clipped = false;
  /// Previous iterate satisfied the constraints of this iteration's subproblem.
  bool anchor_admissible = true;
  /// The solver's point was replaced by the previous iterate (round-off increase).
  bool kept_previous = false;
  /// Which algorithm produced the record ("alg1", "alg2", "alg3", "post").
  std::string stage;
};

struct IterationTrace {
  std::vector<IterationRecord> records;
  Termination termination = Termination::MaxIter;
  double incumbent_objective = kInf;
  Vector incumbent_x;
  Vector incumbent_alpha;
  int incumbent_index = -1;
  bool alpha_clipped = false;

  bool has_incumbent() const { return incumbent_index >= 0; }
  /// Recomputes the incumbent: the best chance-feasible record, or the best record overall
  /// when none is feasible.
  void refresh_incumbent();
  /// Largest increase between consecutive objectives (0 for a non-increasing trace).
  double max_increase() const;
};

}  // namespace sccvar
