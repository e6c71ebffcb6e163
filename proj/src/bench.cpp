#include "sccvar/bench.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <array>
#include <random>

#include "parallel.hpp"
#include "sccvar/alsox.hpp"
#include "sccvar/cvar.hpp"
#include "sccvar/errors.hpp"
#include "sccvar/exact.hpp"
#include "sccvar/sca.hpp"
#include "sccvar/scaling.hpp"

namespace sccvar {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// mt19937_64 seeded through splitmix64; uniform draws use the top 53 bits so streams do not
/// depend on the standard library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t state = seed;
    std::array<std::uint64_t, 4> words{};
    for (auto& w : words) w = splitmix64(state);
    std::seed_seq seq{static_cast<std::uint32_t>(words[0]), static_cast<std::uint32_t>(words[0] >> 32),
                      static_cast<std::uint32_t>(words[1]), static_cast<std::uint32_t>(words[1] >> 32),
                      static_cast<std::uint32_t>(words[2]), static_cast<std::uint32_t>(words[2] >> 32),
                      static_cast<std::uint32_t>(words[3]), static_cast<std::uint32_t>(words[3] >> 32)};
    engine_.seed(seq);
  }

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Integer in [lo, hi].
  int integer(int lo, int hi) {
    const double u = uniform();
    return lo + std::min(static_cast<int>(u * (hi - lo + 1)), hi - lo);
  }

 private:
  std::mt19937_64 engine_;
};

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

}  // namespace

void GeneratorConfig::validate() const {
  if (n < 1 || N < 1 || J < 1) throw ConfigError("n, N and J must be at least 1");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw ConfigError("epsilon must lie in (0,1)");
  if (family == Family::Portfolio) {
    if (J != 1) throw ConfigError("portfolio instances have J = 1");
    if (!(budget_fraction > 0.0)) throw ConfigError("budget_fraction must be positive");
    if (!(xi_low <= xi_high)) throw ConfigError("xi_low must not exceed xi_high");
  } else {
    if (!(demand_low > 0.0 && demand_low <= demand_high && demand_high < 1.0))
      throw ConfigError("covering demand range must satisfy 0 < low <= high < 1");
    if (!(negative_cost_fraction >= 0.0 && negative_cost_fraction <= 1.0))
      throw ConfigError("negative_cost_fraction must lie in [0,1]");
  }
}

CcpInstance gen_portfolio(const GeneratorConfig& config) {
  if (config.family != Family::Portfolio) throw ConfigError("config family is not portfolio");
  config.validate();
  Rng rng(config.seed);
  CcpInstance inst;
  inst.name = "portfolio-n" + std::to_string(config.n) + "-N" + std::to_string(config.N) + "-s" +
              std::to_string(config.seed);
  inst.epsilon = config.epsilon;
  inst.cost.resize(config.n);
  for (int k = 0; k < config.n; ++k) inst.cost(k) = rng.integer(1, 100);
  inst.scenarios.resize(config.N);
  for (int i = 0; i < config.N; ++i) {
    Scenario& s = inst.scenarios[i];
    s.W.resize(1, config.n);
    for (int k = 0; k < config.n; ++k) s.W(0, k) = -rng.uniform(config.xi_low, config.xi_high);
    s.d = Vector::Ones(1);
    s.p = 1.0 / config.N;
  }
  inst.domain = Domain::box(config.n, 0.0, 1.0);
  inst.domain.P = Matrix::Ones(1, config.n);
  inst.domain.q = Vector::Constant(1, config.budget_fraction * config.n);
  return inst;
}

CcpInstance gen_covering(const GeneratorConfig& config) {
  if (config.family != Family::Covering) throw ConfigError("config family is not covering");
  config.validate();
  Rng rng(config.seed);
  CcpInstance inst;
  inst.name = "covering-n" + std::to_string(config.n) + "-J" + std::to_string(config.J) + "-N" +
              std::to_string(config.N) + "-s" + std::to_string(config.seed);
  inst.epsilon = config.epsilon;
  inst.cost.resize(config.n);
  for (int k = 0; k < config.n; ++k) {
    inst.cost(k) = rng.integer(1, 100);
    if (rng.uniform() < config.negative_cost_fraction) inst.cost(k) = -inst.cost(k);
  }
  inst.scenarios.resize(config.N);
  for (int i = 0; i < config.N; ++i) {
    Scenario& s = inst.scenarios[i];
    s.W.resize(config.J, config.n);
    s.d.resize(config.J);
    for (int j = 0; j < config.J; ++j) {
      double row_sum = 0.0;
      for (int k = 0; k < config.n; ++k) {
        const double a = rng.uniform();
        s.W(j, k) = -a;
        row_sum += a;
      }
      // Positive demand below the row sum keeps x = e strictly feasible.
      s.d(j) = std::max(rng.uniform(config.demand_low, config.demand_high) * row_sum, 1e-3);
    }
    s.p = 1.0 / config.N;
  }
  inst.domain = Domain::box(config.n, 0.0, 1.0);
  return inst;
}

CcpInstance generate(const GeneratorConfig& config) {
  return config.family == Family::Portfolio ? gen_portfolio(config) : gen_covering(config);
}

double improvement(double v_cvar, double v_method) {
  if (!(std::abs(v_cvar) > 1e-12)) throw DegenerateBaseline("CVaR baseline is (near) zero");
  return (v_cvar - v_method) / std::abs(v_cvar) * 100.0;
}

const std::vector<std::string>& known_methods() {
  static const std::vector<std::string> methods = {"cvar", "alg1", "alg2", "alg3",
                                                   "alsox", "alsox-scaled", "exact"};
  return methods;
}

MethodOutcome run_method(const CcpInstance& inst, const std::string& method, const Vector& x_cvar,
                         double v_cvar, const Tolerances& tol) {
  MethodOutcome out;
  try {
    if (method == "cvar") {
      out.value = v_cvar;
      out.x = x_cvar;
    } else if (method == "alg1" || method == "alg2" || method == "alg3") {
      IterationTrace trace = method == "alg1"   ? algorithm1(inst, x_cvar, tol)
                             : method == "alg2" ? algorithm2(inst, x_cvar, tol)
                                                : algorithm3_hybrid(inst, x_cvar, tol);
      if (!trace.has_incumbent()) throw NoFeasibleIncumbent("no incumbent recorded");
      out.value = trace.incumbent_objective;
      out.x = trace.incumbent_x;
    } else if (method == "alsox" || method == "alsox-scaled") {
      const double t_L = std::min(default_lower_bound(inst, tol), v_cvar);
      const BisectionReport rep = method == "alsox"
                                      ? alsox_sharp(inst, t_L, v_cvar, tol.delta_A, tol)
                                      : scaled_alsox_sharp(inst, t_L, v_cvar, tol.delta_A, tol);
      out.x = rep.x;
      out.value = inst.cost.dot(rep.x);
    } else if (method == "exact") {
      const ExactResult res = brute_force_optimal(inst, 20, tol);
      out.x = res.x_star;
      out.value = res.v_star;
    } else {
      throw ConfigError("unknown method '" + method + "'");
    }
  } catch (const std::exception& e) {
    out.value = kInf;
    out.error = e.what();
  }
  return out;
}

std::vector<BenchRow> run_experiment(const std::vector<CcpInstance>& instances,
                                     const std::vector<std::string>& methods,
                                     const Tolerances& tol, int jobs) {
  using Clock = std::chrono::steady_clock;
  const int count = static_cast<int>(instances.size());
  std::vector<std::vector<BenchRow>> per_instance(count);
  detail::parallel_for(count, jobs, [&](int k) {
    const CcpInstance& inst = instances[k];
    std::vector<BenchRow>& rows = per_instance[k];
    const auto t0 = Clock::now();
    CvarSolution base;
    std::string base_error;
    try {
      base = solve_cvar(inst, tol);
      if (!base.optimal()) base_error = "cvar " + conic::to_string(base.status);
    } catch (const std::exception& e) {
      base_error = e.what();
    }
    const double cvar_time = std::chrono::duration<double>(Clock::now() - t0).count();
    for (const std::string& method : methods) {
      BenchRow row;
      row.instance = inst.name;
      row.epsilon = inst.epsilon;
      row.method = method;
      row.improvement_pct = std::nan("");
      if (!base_error.empty()) {
        row.error = base_error;
        rows.push_back(row);
        continue;
      }
      const auto t1 = Clock::now();
      const MethodOutcome out = run_method(inst, method, base.x, base.objective, tol);
      row.time_s = method == "cvar" ? cvar_time
                                    : std::chrono::duration<double>(Clock::now() - t1).count();
      row.value = out.value;
      row.error = out.error;
      if (out.error.empty()) {
        row.violation_prob = violation_probability(inst, out.x, tol.feas_tol);
        row.feasible = chance_feasible(inst, out.x, tol.feas_tol);
        try {
          row.improvement_pct = improvement(base.objective, out.value);
        } catch (const DegenerateBaseline&) {
        }
      }
      rows.push_back(row);
    }
  });
  std::vector<BenchRow> all;
  for (auto& rows : per_instance)
    for (auto& r : rows) all.push_back(std::move(r));
  return all;
}

std::string bench_csv_header() {
  return "instance,eps,method,value,time_s,improvement_pct,feasible,violation_prob";
}

std::string to_csv_line(const BenchRow& row) {
  return row.instance + "," + format_double(row.epsilon) + "," + row.method + "," +
         format_double(row.value) + "," + format_double(row.time_s) + "," +
         format_double(row.improvement_pct) + "," + (row.feasible ? "true" : "false") + "," +
         format_double(row.violation_prob);
}

}  // namespace sccvar
