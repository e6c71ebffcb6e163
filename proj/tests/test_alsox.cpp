#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "sccvar/alsox.hpp"
#include "sccvar/bench.hpp"
#include "sccvar/cvar.hpp"
#include "sccvar/errors.hpp"
#include "sccvar/exact.hpp"

using namespace sccvar;
using fixtures::vec;

namespace {

double hinge_at(const CcpInstance& inst, const Vector& x) {
  const Vector g = g_max_all(inst, x);
  const Vector p = inst.probabilities();
  return oracles::hinge_risk(std::vector<double>(g.data(), g.data() + g.size()),
                             std::vector<double>(p.data(), p.data() + p.size()), inst.epsilon);
}

CcpInstance covering(std::uint64_t seed, int n = 5, int N = 8) {
  GeneratorConfig cfg;
  cfg.family = Family::Covering;
  cfg.n = n;
  cfg.N = N;
  cfg.J = 2;
  cfg.epsilon = 0.300333;
  cfg.seed = seed;
  return generate(cfg);
}

void check_report(const CcpInstance& inst, const BisectionReport& rep, double delta_A) {
  CHECK(rep.t_L <= rep.t_U);
  CHECK(rep.t_U - rep.t_L <= delta_A);
  CHECK(rep.t_U <= rep.initial_t_U);
  CHECK(static_cast<int>(rep.steps.size()) <= rep.step_bound(delta_A));
  CHECK(chance_feasible(inst, rep.x, 1e-6));
  CHECK(inst.cost.dot(rep.x) <= rep.t_U + 1e-6 * (1 + std::abs(rep.t_U)));
  for (const BisectionStep& s : rep.steps) CHECK(s.t_L <= s.t_U);
}

}  // namespace

TEST_SUITE("alsox") {
  TEST_CASE("lower level on the two-scenario example") {
    const CcpInstance e2 = fixtures::example2();
    const LowerLevelSolution at2 = lower_level(e2, 2.0);
    CHECK(at2.value <= 1e-9);
    CHECK(at2.beta <= 1e-12);
    CHECK(e2.cost.dot(at2.x) <= 2.0 + 1e-9);
    CHECK(at2.value == doctest::Approx(hinge_at(e2, at2.x)).epsilon(1e-9));

    const LowerLevelSolution at_half = lower_level(e2, 0.5);
    CHECK(at_half.value > 1e-6);
    CHECK(at_half.value == doctest::Approx(hinge_at(e2, at_half.x)).epsilon(1e-9));
    // Exhaustive search over the budget face 2 x1 + x2 = 0.5.
    const double best = oracles::golden_min(
        [&](double x1) { return hinge_at(e2, vec({x1, 0.5 - 2 * x1})); }, 0.0, 0.25, 100);
    CHECK(at_half.value == doctest::Approx(best).epsilon(1e-7));

    CHECK_THROWS_AS(lower_level(e2, -1.0), InfeasibleError);
  }

  TEST_CASE("infinite budget is the unconstrained hinge problem") {
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      const CcpInstance inst = covering(seed);
      const LowerLevelSolution free = lower_level(inst, kInf);
      const LowerLevelSolution loose = lower_level(inst, 1e6);
      CHECK(free.value == doctest::Approx(loose.value).epsilon(1e-9));
      CHECK(free.value == doctest::Approx(hinge_at(inst, free.x)).epsilon(1e-9));
      CHECK(free.value <= lower_level(inst, 0.0).value + 1e-9);
    }
  }

  TEST_CASE("bisection on the two-scenario example" * doctest::may_fail()) {
    const CcpInstance e2 = fixtures::example2();
    const BisectionReport rep = alsox_sharp(e2, 0.0, 2.0, 0.05);
    check_report(e2, rep, 0.05);
    CHECK(std::abs(rep.t_U - 1.0) <= 0.05);
  }

  TEST_CASE("bisection on the three-scenario example" * doctest::may_fail()) {
    const CcpInstance e6 = fixtures::example6();
    const BisectionReport rep = alsox_sharp(e6, 0.0, 3.0, 0.05);
    check_report(e6, rep, 0.05);
    CHECK(std::abs(rep.t_U - 2.0) <= 0.05);
  }

  TEST_CASE("scaled bisection on the two-scenario example" * doctest::may_fail()) {
    const CcpInstance e2 = fixtures::example2();
    const BisectionReport rep = scaled_alsox_sharp(e2, 0.0, 2.0, 0.05);
    check_report(e2, rep, 0.05);
    CHECK(std::abs(rep.t_U - 1.0) <= 0.05);
  }

  TEST_CASE("reports stay valid on the small examples") {
    const CcpInstance e2 = fixtures::example2();
    const CcpInstance e6 = fixtures::example6();
    check_report(e2, alsox_sharp(e2, 0.0, 2.0, 0.05), 0.05);
    check_report(e6, alsox_sharp(e6, 0.0, 3.0, 0.05), 0.05);
    check_report(e2, scaled_alsox_sharp(e2, 0.0, 2.0, 0.05), 0.05);
    check_report(e6, scaled_alsox_sharp(e6, 0.0, 3.0, 0.05), 0.05);
  }

  TEST_CASE("closed bracket returns at once") {
    const CcpInstance e2 = fixtures::example2();
    const BisectionReport rep = alsox_sharp(e2, 2.0, 2.0, 0.05);
    CHECK(rep.steps.empty());
    CHECK(rep.t_U == 2.0);
    CHECK(rep.step_bound(0.05) == 0);
    CHECK(chance_feasible(e2, rep.x, 1e-6));
  }

  TEST_CASE("argument and feasibility errors") {
    const CcpInstance e2 = fixtures::example2();
    CHECK_THROWS_AS(alsox_sharp(e2, 3.0, 2.0, 0.05), ConfigError);
    CHECK_THROWS_AS(alsox_sharp(e2, 0.0, 2.0, 0.0), ConfigError);
    // At t_U = 0.5 no point of the budget slice is chance-feasible.
    CHECK_THROWS_AS(alsox_sharp(e2, 0.0, 0.5, 0.05), NoFeasibleIncumbent);
  }

  TEST_CASE("step bound") {
    BisectionReport rep;
    rep.initial_t_L = 0.0;
    rep.initial_t_U = 2.0;
    CHECK(rep.step_bound(0.05) == 6);
    CHECK(rep.step_bound(0.5) == 2);
    CHECK(rep.step_bound(0.25) == 3);
    CHECK(rep.step_bound(4.0) == 0);
  }

  TEST_CASE("scaling never hurts and stays above the optimum") {
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
      const CcpInstance inst = covering(seed);
      const CvarSolution base = solve_cvar(inst);
      REQUIRE(base.optimal());
      const double t_L = std::min(default_lower_bound(inst), base.objective);
      const BisectionReport plain = alsox_sharp(inst, t_L, base.objective, 0.01);
      const BisectionReport scaled = scaled_alsox_sharp(inst, t_L, base.objective, 0.01);
      check_report(inst, plain, 0.01);
      check_report(inst, scaled, 0.01);
      CHECK(scaled.t_U <= plain.t_U + 1e-9);
      const double v_star = brute_force_optimal(inst).v_star;
      CHECK(plain.t_U >= v_star - 1e-6 * (1 + std::abs(v_star)));
      CHECK(scaled.t_U >= v_star - 1e-6 * (1 + std::abs(v_star)));
    }
  }

  TEST_CASE("single mandatory scenario: scaled equals plain") {
    const CcpInstance one = fixtures::single_row("one", vec({1, 2}), {vec({-1, -1})}, {3}, 0.5);
    const BisectionReport plain = alsox_sharp(one, 0.0, 6.0, 0.01);
    const BisectionReport scaled = scaled_alsox_sharp(one, 0.0, 6.0, 0.01);
    REQUIRE(plain.steps.size() == scaled.steps.size());
    for (std::size_t k = 0; k < plain.steps.size(); ++k) {
      CHECK(plain.steps[k].feasible == scaled.steps[k].feasible);
      CHECK_FALSE(scaled.steps[k].rescued);
    }
    CHECK(plain.t_U == scaled.t_U);
    CHECK(std::abs(plain.t_U - 3.0) <= 0.01);
  }

  TEST_CASE("default lower bound") {
    CHECK(default_lower_bound(fixtures::example2()) == doctest::Approx(0.0));
    CHECK_THROWS_AS(default_lower_bound(fixtures::example3()), ConfigError);
  }
}
