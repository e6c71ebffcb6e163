#include "cli.hpp"

#include <CLI11.hpp>
#include <cstdio>
#include <json.hpp>
#include <ostream>

#include "sccvar/alsox.hpp"
#include "sccvar/conic.hpp"
#include "sccvar/cvar.hpp"
#include "sccvar/errors.hpp"
#include "sccvar/exact.hpp"
#include "sccvar/io.hpp"
#include "sccvar/model.hpp"
#include "sccvar/sca.hpp"
#include "sccvar/scaling.hpp"

namespace sccvar::cli {

namespace {

std::string fmt(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

template <class Body>
int guarded(std::ostream& err, Body body) {
  try {
    return body();
  } catch (const ParseError& e) {
    err << "input error: " << e.what() << "\n";
  } catch (const DimensionMismatch& e) {
    err << "input error: " << e.what() << "\n";
  } catch (const ProbabilityError& e) {
    err << "input error: " << e.what() << "\n";
  } catch (const RiskLevelError& e) {
    err << "input error: " << e.what() << "\n";
  } catch (const ConfigError& e) {
    err << "input error: " << e.what() << "\n";
  } catch (const IndexOutOfRange& e) {
    err << "input error: " << e.what() << "\n";
  } catch (const ScalingOutOfRange& e) {
    err << "input error: " << e.what() << "\n";
  } catch (const TooLarge& e) {
    err << "input error: " << e.what() << "\n";
  } catch (const NotCovering& e) {
    err << "input error: " << e.what() << "\n";
  } catch (const InfeasibleError& e) {
    err << "infeasible: " << e.what() << "\n";
    return kInfeasible;
  } catch (const NoFeasibleIncumbent& e) {
    err << "infeasible: " << e.what() << "\n";
    return kInfeasible;
  } catch (const std::exception& e) {
    err << "solver failure: " << e.what() << "\n";
    return kSolverFailure;
  }
  return kInputError;
}

void emit(const CliConfig& config, const std::string& text, std::ostream& out) {
  if (config.output_path.empty())
    out << text << (text.empty() || text.back() != '\n' ? "\n" : "");
  else
    write_text_file(config.output_path, text);
}

SolutionDocument make_document(const CcpInstance& inst, const Vector& x, const Vector& alpha,
                               double objective, const std::string& status,
                               const Tolerances& tol) {
  SolutionDocument doc;
  doc.objective = objective;
  doc.x = x;
  doc.alpha = alpha;
  doc.beta = 0.0;
  scaled_risk_value(inst, x, alpha, &doc.beta);
  const Vector g = g_max_all(inst, x);
  doc.s = (alpha.cwiseProduct(g).array() - doc.beta).cwiseMax(0.0).matrix();
  doc.status = status;
  doc.violation_prob = violation_probability(inst, x, tol.feas_tol);
  return doc;
}

/// max c'x over X; +inf when unbounded.
double max_cost_over_domain(const CcpInstance& inst, const Tolerances& tol) {
  conic::LinearProgramSpec lp;
  lp.objective = -inst.cost;
  lp.A = inst.domain.P.rows() > 0 ? inst.domain.P : Matrix::Zero(0, inst.n());
  lp.b = inst.domain.q;
  lp.lower = inst.domain.lb;
  lp.upper = inst.domain.ub;
  const conic::SolveResult r = conic::solve_lp(lp, tol);
  if (r.status == conic::SolveStatus::Unbounded) return kInf;
  if (r.status == conic::SolveStatus::Infeasible) throw InfeasibleError("domain X is empty");
  if (!r.optimal()) throw SolverFailure("max-cost LP: " + conic::to_string(r.status));
  return -r.objective;
}

struct Bounds {
  double t_L;
  double t_U;
};

Bounds bisection_bounds(const CcpInstance& inst, const CliConfig& config, std::ostream& err) {
  double t_U;
  if (config.t_upper) {
    t_U = *config.t_upper;
  } else {
    const CvarSolution base = solve_cvar(inst, config.tol);
    if (base.optimal()) {
      t_U = base.objective;
    } else {
      t_U = max_cost_over_domain(inst, config.tol);
      if (!std::isfinite(t_U))
        throw ConfigError("CVaR approximation is infeasible and c'x is unbounded over X; pass --t-upper");
      err << "note: CVaR approximation infeasible, using max c'x over X = " << fmt(t_U) << " as t_U\n";
    }
  }
  double t_L;
  if (config.t_lower) {
    t_L = *config.t_lower;
  } else {
    t_L = std::min(default_lower_bound(inst, config.tol), t_U);
  }
  if (t_L > t_U) throw ConfigError("t_L exceeds t_U");
  return {t_L, t_U};
}

nlohmann::json bisection_json(const BisectionReport& rep) {
  nlohmann::json j;
  j["initial_t_L"] = rep.initial_t_L;
  j["initial_t_U"] = rep.initial_t_U;
  j["t_L"] = rep.t_L;
  j["t_U"] = rep.t_U;
  j["steps"] = nlohmann::json::array();
  for (const BisectionStep& s : rep.steps)
    j["steps"].push_back({{"t", s.t},
                          {"lower_value", s.lower_value},
                          {"feasible", s.feasible},
                          {"rescued", s.rescued},
                          {"t_L", s.t_L},
                          {"t_U", s.t_U}});
  return j;
}

Vector initial_point(const CcpInstance& inst, const CliConfig& config, std::optional<Vector>& alpha0,
                     std::ostream& err) {
  if (!config.init_file.empty()) {
    const SolutionDocument doc = solution_from_json(read_text_file(config.init_file));
    if (doc.x.size() != inst.n()) throw DimensionMismatch("--init-file x has the wrong length");
    if (doc.alpha.size() == inst.num_scenarios()) alpha0 = doc.alpha;
    return doc.x;
  }
  if (config.init == "alsox") {
    const Bounds b = bisection_bounds(inst, config, err);
    const BisectionReport rep = alsox_sharp(inst, b.t_L, b.t_U, config.tol.delta_A, config.tol);
    err << "initializer: ALSO-X# t_U = " << fmt(rep.t_U) << "\n";
    return rep.x;
  }
  if (config.init != "cvar") throw ConfigError("--init must be cvar or alsox");
  const CvarSolution base = solve_cvar(inst, config.tol);
  if (base.status == conic::SolveStatus::Infeasible)
    throw InfeasibleError("CVaR approximation is infeasible; try --init alsox or --init-file");
  if (!base.optimal()) throw SolverFailure("CVaR LP: " + conic::to_string(base.status));
  return base.x;
}

int finish_solution(const CliConfig& config, const CcpInstance& inst, const SolutionDocument& doc,
                    std::ostream& out, std::ostream& err) {
  emit(config, solution_to_json(doc), out);
  const bool feasible = chance_feasible(inst, doc.x, config.tol.feas_tol);
  err << "objective " << fmt(doc.objective) << "  violation " << fmt(doc.violation_prob)
      << "  status " << doc.status << "\n";
  if (!feasible) {
    err << "returned point violates the chance constraint\n";
    return kInfeasible;
  }
  return kOk;
}

int solve_iterative(const CliConfig& config, const CcpInstance& inst, std::ostream& out,
                    std::ostream& err) {
  std::optional<Vector> alpha0;
  const Vector x0 = initial_point(inst, config, alpha0, err);
  IterationTrace trace;
  if (config.method == "alg1") {
    Algorithm1Options opts;
    opts.alpha0 = alpha0;
    trace = algorithm1(inst, x0, config.tol, opts);
  } else if (config.method == "alg2") {
    trace = algorithm2(inst, x0, config.tol);
  } else {
    trace = algorithm3_hybrid(inst, x0, config.tol);
  }
  if (!trace.has_incumbent()) {
    err << "no iterate recorded (" << to_string(trace.termination) << ")\n";
    return kSolverFailure;
  }
  if (config.prune_eta) {
    const Vector eta = eta_bounds(inst, config.tol);
    const std::vector<bool> mask =
        prune_alpha_mask(eta, trace.incumbent_objective, config.tol.feas_tol);
    int pinned = 0;
    Vector start_alpha = trace.incumbent_alpha;
    for (int i = 0; i < inst.num_scenarios(); ++i)
      if (mask[i]) {
        start_alpha(i) = 1.0;
        ++pinned;
      }
    err << "eta pruning pins " << pinned << " of " << inst.num_scenarios() << " scenarios\n";
    Algorithm1Options opts;
    opts.alpha0 = start_alpha;
    opts.fixed_mask = mask;
    try {
      IterationTrace pruned = algorithm1(inst, trace.incumbent_x, config.tol, opts);
      if (pruned.has_incumbent() && pruned.incumbent_objective < trace.incumbent_objective &&
          chance_feasible(inst, pruned.incumbent_x, config.tol.feas_tol)) {
        for (IterationRecord r : pruned.records) {
          r.stage = "pruned";
          trace.records.push_back(std::move(r));
        }
        trace.refresh_incumbent();
      }
    } catch (const InfeasibleError& e) {
      err << "pruned re-solve infeasible: " << e.what() << "\n";
    }
  }
  if (!config.trace_path.empty()) write_text_file(config.trace_path, trace_to_json(trace));
  if (trace.alpha_clipped) err << "warning: some alpha reached alpha_max\n";
  const SolutionDocument doc =
      make_document(inst, trace.incumbent_x, trace.incumbent_alpha, trace.incumbent_objective,
                    to_string(trace.termination), config.tol);
  return finish_solution(config, inst, doc, out, err);
}

}  // namespace

const std::vector<std::string>& solve_methods() {
  static const std::vector<std::string> methods = {"cvar", "scaled", "alg1",         "alg2",
                                                   "alg3", "alsox",  "alsox-scaled", "exact"};
  return methods;
}

int cmd_validate(const CliConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const CcpInstance inst = read_instance(config.instance_path);
    out << "ok: " << inst.name << " n=" << inst.n() << " N=" << inst.num_scenarios()
        << " J=" << inst.rows_per_scenario() << " eps=" << fmt(inst.epsilon)
        << " regularity=" << to_string(epsilon_regularity_check(inst)) << "\n";
    return kOk;
  });
}

int cmd_solve(const CliConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&]() -> int {
    config.tol.validate();
    const auto& known = solve_methods();
    if (std::find(known.begin(), known.end(), config.method) == known.end())
      throw ConfigError("unknown method '" + config.method + "'");
    const CcpInstance inst = read_instance(config.instance_path);
    const int N = inst.num_scenarios();

    if (config.method == "cvar" || config.method == "scaled") {
      Vector alpha = Vector::Ones(N);
      if (config.method == "scaled" && !config.alpha.empty()) {
        if (static_cast<int>(config.alpha.size()) != N)
          throw DimensionMismatch("--alpha needs " + std::to_string(N) + " values");
        alpha = Eigen::Map<const Vector>(config.alpha.data(), N);
      }
      const CvarSolution sol =
          solve_scaled_cvar(inst, ScalingVector(alpha, config.tol.alpha_max), config.tol);
      if (sol.status == conic::SolveStatus::Infeasible) {
        err << "infeasible: the " << config.method << " approximation has no feasible point\n";
        return kInfeasible;
      }
      if (!sol.optimal()) {
        err << "solver failure: " << conic::to_string(sol.status) << "\n";
        return kSolverFailure;
      }
      if (sol.beta_floor_active) err << "warning: beta reached its floor\n";
      SolutionDocument doc;
      doc.objective = sol.objective;
      doc.x = sol.x;
      doc.beta = sol.beta;
      doc.s = sol.s;
      doc.alpha = alpha;
      doc.status = "optimal";
      doc.violation_prob = violation_probability(inst, sol.x, config.tol.feas_tol);
      return finish_solution(config, inst, doc, out, err);
    }

    if (config.method == "alg1" || config.method == "alg2" || config.method == "alg3")
      return solve_iterative(config, inst, out, err);

    if (config.method == "alsox" || config.method == "alsox-scaled") {
      const Bounds b = bisection_bounds(inst, config, err);
      const BisectionReport rep =
          config.method == "alsox"
              ? alsox_sharp(inst, b.t_L, b.t_U, config.tol.delta_A, config.tol)
              : scaled_alsox_sharp(inst, b.t_L, b.t_U, config.tol.delta_A, config.tol);
      for (const BisectionStep& s : rep.steps)
        err << "t=" << fmt(s.t) << " feasible=" << (s.feasible ? 1 : 0)
            << (s.rescued ? " (rescued)" : "") << "  [" << fmt(s.t_L) << ", " << fmt(s.t_U)
            << "]\n";
      if (!config.trace_path.empty())
        write_text_file(config.trace_path, bisection_json(rep).dump(1));
      const SolutionDocument doc = make_document(inst, rep.x, Vector::Ones(N),
                                                 inst.cost.dot(rep.x), "bisection", config.tol);
      return finish_solution(config, inst, doc, out, err);
    }

    // exact
    const ExactResult res = brute_force_optimal(inst, 20, config.tol);
    const SolutionDocument doc =
        make_document(inst, res.x_star, Vector::Ones(N), res.v_star, "exact", config.tol);
    return finish_solution(config, inst, doc, out, err);
  });
}

int cmd_certify(const CliConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    config.tol.validate();
    const CcpInstance inst = read_instance(config.instance_path);
    const std::optional<Vector> x = certificate_point(inst, config.tol.delta_bar, config.tol);
    if (!x) {
      err << "no point of X satisfies every scenario with margin " << fmt(-config.tol.delta_bar)
          << "\n";
      return kInfeasible;
    }
    nlohmann::json j;
    j["delta_bar"] = config.tol.delta_bar;
    j["x"] = std::vector<double>(x->data(), x->data() + x->size());
    j["max_g"] = g_max_all(inst, *x).maxCoeff();
    emit(config, j.dump(1), out);
    return kOk;
  });
}

int cmd_sweep_alpha(const CliConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    config.tol.validate();
    const CcpInstance inst = read_instance(config.instance_path);
    const int N = inst.num_scenarios();
    if (config.scenario < 1 || config.scenario > N)
      throw IndexOutOfRange("--scenario must be in 1.." + std::to_string(N));
    if (config.grid.empty()) throw ConfigError("--grid is empty");
    Vector alpha = Vector::Ones(N);
    if (!config.alpha.empty()) {
      if (static_cast<int>(config.alpha.size()) != N)
        throw DimensionMismatch("--alpha needs " + std::to_string(N) + " values");
      alpha = Eigen::Map<const Vector>(config.alpha.data(), N);
    }
    std::string csv = "alpha,objective\n";
    for (double a : config.grid) {
      alpha(config.scenario - 1) = a;
      const CvarSolution sol =
          solve_scaled_cvar(inst, ScalingVector(alpha, config.tol.alpha_max), config.tol);
      csv += fmt(a) + "," + (sol.optimal() ? fmt(sol.objective) : std::string("inf")) + "\n";
    }
    emit(config, csv, out);
    return kOk;
  });
}

int cmd_generate(const CliConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const CcpInstance inst = generate(config.gen);
    validate(inst);
    emit(config, instance_to_json(inst), out);
    return kOk;
  });
}

int cmd_bench(const CliConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    config.tol.validate();
    std::vector<std::string> methods = config.methods;
    if (methods.empty()) methods = {"cvar", "alg1", "alsox"};
    const auto& known = known_methods();
    for (const std::string& m : methods)
      if (std::find(known.begin(), known.end(), m) == known.end())
        throw ConfigError("unknown bench method '" + m + "'");
    if (config.jobs < 1) throw ConfigError("--jobs must be >= 1");

    std::vector<CcpInstance> instances;
    for (const std::string& path : config.instance_paths) instances.push_back(read_instance(path));
    if (config.instance_paths.empty()) {
      const std::vector<double> eps =
          config.epsilons.empty() ? std::vector<double>{config.gen.epsilon} : config.epsilons;
      const std::vector<std::uint64_t> seeds =
          config.seeds.empty() ? std::vector<std::uint64_t>{config.gen.seed} : config.seeds;
      for (double e : eps)
        for (std::uint64_t s : seeds) {
          GeneratorConfig g = config.gen;
          g.epsilon = e;
          g.seed = s;
          instances.push_back(generate(g));
        }
    }
    const std::vector<BenchRow> rows = run_experiment(instances, methods, config.tol, config.jobs);
    std::string csv = bench_csv_header() + "\n";
    int failed = 0;
    for (const BenchRow& r : rows) {
      csv += to_csv_line(r) + "\n";
      if (!r.error.empty()) {
        ++failed;
        err << r.instance << " " << r.method << ": " << r.error << "\n";
      }
    }
    emit(config, csv, out);
    if (failed > 0) err << failed << " of " << rows.size() << " cells failed\n";
    return kOk;
  });
}

namespace {

void add_tolerance_flags(CLI::App* app, Tolerances& tol) {
  app->add_option("--feas-tol", tol.feas_tol, "constraint satisfaction tolerance")->capture_default_str();
  app->add_option("--opt-tol", tol.opt_tol, "solver optimality tolerance")->capture_default_str();
  app->add_option("--delta1", tol.delta1, "objective-change stopping rule")->capture_default_str();
  app->add_option("--delta2", tol.delta2, "strict-satisfaction threshold (<= 0)")->capture_default_str();
  app->add_option("--delta-bar", tol.delta_bar, "certificate margin (< 0)")->capture_default_str();
  app->add_option("--alpha-max", tol.alpha_max, "cap on every scaling factor")->capture_default_str();
  app->add_option("--max-iter", tol.max_iter, "iteration budget")->capture_default_str();
  app->add_option("--delta-a", tol.delta_A, "ALSO-X# bisection gap")->capture_default_str();
}

void add_generator_flags(CLI::App* app, GeneratorConfig& gen) {
  app->add_option("--family", gen.family, "portfolio or covering")
      ->transform(CLI::CheckedTransformer(
          std::map<std::string, Family>{{"portfolio", Family::Portfolio}, {"covering", Family::Covering}}))
      ->capture_default_str();
  app->add_option("--n", gen.n, "decision dimension")->capture_default_str();
  app->add_option("--N", gen.N, "number of scenarios")->capture_default_str();
  app->add_option("--J", gen.J, "rows per scenario")->capture_default_str();
  app->add_option("--budget-fraction", gen.budget_fraction, "portfolio budget sum x <= f*n")
      ->capture_default_str();
  app->add_option("--negative-cost-fraction", gen.negative_cost_fraction,
                  "covering: share of negated cost entries")
      ->capture_default_str();
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Scenario-wise scaled CVaR toolkit for finite-scenario chance-constrained programs"};
  app.require_subcommand(1);
  CliConfig config;

  CLI::App* validate_cmd = app.add_subcommand("validate", "check an instance file");
  validate_cmd->add_option("instance", config.instance_path)->required();

  CLI::App* solve = app.add_subcommand("solve", "solve an instance");
  solve->add_option("instance", config.instance_path)->required();
  solve->add_option("--method", config.method, "cvar|scaled|alg1|alg2|alg3|alsox|alsox-scaled|exact")
      ->check(CLI::IsMember(solve_methods()))
      ->capture_default_str();
  solve->add_option("--alpha", config.alpha, "scaling vector for --method scaled")->delimiter(',');
  solve->add_option("--init-file", config.init_file, "solution document used as x0");
  solve->add_option("--init", config.init, "initializer for alg1/2/3: cvar or alsox")
      ->check(CLI::IsMember({"cvar", "alsox"}))
      ->capture_default_str();
  solve->add_flag("--prune-eta", config.prune_eta, "pin alpha_i = 1 where eta_i exceeds the incumbent");
  solve->add_option("--t-lower", config.t_lower, "ALSO-X# lower bound");
  solve->add_option("--t-upper", config.t_upper, "ALSO-X# upper bound");
  solve->add_option("-o,--out", config.output_path, "solution file (default stdout)");
  solve->add_option("--trace", config.trace_path, "write the iteration trace here");
  add_tolerance_flags(solve, config.tol);

  CLI::App* certify = app.add_subcommand("certify", "find a point strictly satisfying every scenario");
  certify->add_option("instance", config.instance_path)->required();
  certify->add_option("-o,--out", config.output_path);
  add_tolerance_flags(certify, config.tol);

  CLI::App* sweep = app.add_subcommand("sweep", "scaled CVaR objective as one scenario's alpha varies");
  sweep->add_option("instance", config.instance_path)->required();
  sweep->add_option("--scenario", config.scenario, "scenario index, 1-based")->capture_default_str();
  sweep->add_option("--grid", config.grid, "comma-separated alpha values")->delimiter(',')->required();
  sweep->add_option("--alpha", config.alpha, "base scaling vector (default all ones)")->delimiter(',');
  sweep->add_option("-o,--out", config.output_path);
  add_tolerance_flags(sweep, config.tol);

  CLI::App* gen = app.add_subcommand("generate", "write a random instance");
  add_generator_flags(gen, config.gen);
  gen->add_option("--epsilon", config.gen.epsilon)->capture_default_str();
  gen->add_option("--seed", config.gen.seed)->capture_default_str();
  gen->add_option("-o,--out", config.output_path);

  CLI::App* bench = app.add_subcommand("bench", "run methods against the CVaR baseline");
  add_generator_flags(bench, config.gen);
  bench->add_option("--eps", config.epsilons, "risk levels")->delimiter(',');
  bench->add_option("--seeds", config.seeds, "generator seeds")->delimiter(',');
  bench->add_option("--methods", config.methods, "methods (cvar always runs as the baseline)")
      ->delimiter(',');
  bench->add_option("--instances", config.instance_paths, "instance files instead of generated ones");
  bench->add_option("--jobs", config.jobs, "parallel instances")->capture_default_str();
  bench->add_option("-o,--out", config.output_path, "CSV report (default stdout)");
  add_tolerance_flags(bench, config.tol);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInputError;
  }

  if (*validate_cmd) return cmd_validate(config, out, err);
  if (*solve) return cmd_solve(config, out, err);
  if (*certify) return cmd_certify(config, out, err);
  if (*sweep) return cmd_sweep_alpha(config, out, err);
  if (*gen) return cmd_generate(config, out, err);
  return cmd_bench(config, out, err);
}

}  // namespace sccvar::cli
