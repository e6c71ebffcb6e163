#pragma once

#include <string>

#include "sccvar/cvar.hpp"
#include "sccvar/model.hpp"
#include "sccvar/trace.hpp"

namespace sccvar {

/// Instance document: n, N, J, epsilon, cost, probs, scenarios[{W, d}], domain{lb, ub, P, q},
/// name. Infinite bounds are the strings "inf" / "-inf". Throws ParseError.
CcpInstance instance_from_json(const std::string& text);
std::string instance_to_json(const CcpInstance& instance);
CcpInstance read_instance(const std::string& path);
void write_instance(const std::string& path, const CcpInstance& instance);

struct SolutionDocument {
  double objective = kInf;
  Vector x;
  double beta = 0.0;
  Vector s;
  Vector alpha;
  std::string status;
  double violation_prob = 0.0;
};

std::string solution_to_json(const SolutionDocument& doc);
SolutionDocument solution_from_json(const std::string& text);

std::string trace_to_json(const IterationTrace& trace);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace sccvar
