#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "sccvar/bench.hpp"
#include "sccvar/tolerances.hpp"

namespace sccvar::cli {

enum ExitCode { kOk = 0, kInfeasible = 1, kInputError = 2, kSolverFailure = 3 };

struct CliConfig {
  std::string subcommand;
  std::string instance_path;
  std::string method = "cvar";
  std::string output_path;  // empty: standard output
  std::string trace_path;
  Tolerances tol;

  // solve
  std::vector<double> alpha;
  std::string init_file;
  std::string init = "cvar";  // cvar | alsox
  bool prune_eta = false;
  std::optional<double> t_lower;
  std::optional<double> t_upper;

  // sweep (scenario is 1-based)
  int scenario = 1;
  std::vector<double> grid;

  // generate / bench
  GeneratorConfig gen;
  std::vector<std::uint64_t> seeds;
  std::vector<double> epsilons;
  std::vector<std::string> methods;
  std::vector<std::string> instance_paths;
  int jobs = 1;
};

const std::vector<std::string>& solve_methods();

int cmd_validate(const CliConfig& config, std::ostream& out, std::ostream& err);
int cmd_solve(const CliConfig& config, std::ostream& out, std::ostream& err);
int cmd_certify(const CliConfig& config, std::ostream& out, std::ostream& err);
int cmd_sweep_alpha(const CliConfig& config, std::ostream& out, std::ostream& err);
int cmd_generate(const CliConfig& config, std::ostream& out, std::ostream& err);
int cmd_bench(const CliConfig& config, std::ostream& out, std::ostream& err);

/// Parses argv and dispatches to the matching cmd_* function.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace sccvar::cli
