#include "sccvar/trace.hpp"

#include <algorithm>

namespace sccvar {

std::string to_string(Termination t) {
  switch (t) {
    case Termination::Converged:
      return "converged";
    case Termination::MaxIter:
      return "max_iter";
    case Termination::Stalled:
      return "stalled";
    case Termination::Infeasible:
      return "infeasible";
    case Termination::NumericalError:
      return "numerical_error";
  }
  return "unknown";
}

void IterationTrace::refresh_incumbent() {
  incumbent_index = -1;
  incumbent_objective = kInf;
  bool any_feasible = false;
  for (const IterationRecord& r : records) any_feasible = any_feasible || r.feasible;
  for (std::size_t k = 0; k < records.size(); ++k) {
    const IterationRecord& r = records[k];
    if (any_feasible && !r.feasible) continue;
    // Ties go to the later record, whose alpha certifies the point.
    if (r.objective <= incumbent_objective) {
      incumbent_objective = r.objective;
      incumbent_index = static_cast<int>(k);
    }
  }
  if (incumbent_index >= 0) {
    incumbent_x = records[incumbent_index].x;
    incumbent_alpha = records[incumbent_index].alpha;
  }
  alpha_clipped = std::any_of(records.begin(), records.end(),
                              [](const IterationRecord& r) { return r.clipped; });
}

double IterationTrace::max_increase() const {
  double worst = 0.0;
  for (std::size_t k = 1; k < records.size(); ++k)
    worst = std::max(worst, records[k].objective - records[k - 1].objective);
  return worst;
}

}  // namespace sccvar
