#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "sccvar/bench.hpp"
#include "sccvar/errors.hpp"
#include "sccvar/exact.hpp"

using namespace sccvar;
using fixtures::vec;

TEST_SUITE("exact") {
  TEST_CASE("two-scenario example") {
    const ExactResult r = brute_force_optimal(fixtures::example2());
    CHECK(r.v_star == doctest::Approx(1.0));
    CHECK((r.x_star - vec({0, 1})).norm() <= 1e-9);
    CHECK(r.satisfied_set == std::vector<int>{1});
    CHECK(r.subproblems_solved == 2);
  }

  TEST_CASE("three-scenario examples") {
    const ExactResult r6 = brute_force_optimal(fixtures::example6());
    CHECK(r6.v_star == doctest::Approx(2.0));
    CHECK(r6.satisfied_set == std::vector<int>{1, 2});
    CHECK(r6.subproblems_solved == 3);
    // eps = 1/3 still needs two of three scenarios.
    CHECK(brute_force_optimal(fixtures::example7()).v_star == doctest::Approx(2.0));
  }

  TEST_CASE("integer grid on the one-dimensional examples") {
    const ExactResult r3 = grid_brute_force(fixtures::example3(), fixtures::integer_grid(5));
    CHECK(r3.v_star == 0.0);
    CHECK(r3.x_star(0) == 0.0);
    CHECK(r3.satisfied_set == std::vector<int>{1, 2, 3});
    const ExactResult r4 = grid_brute_force(fixtures::example4(), fixtures::integer_grid(5));
    CHECK(r4.v_star == 0.0);
    CHECK(r4.subproblems_solved == 6);
    CHECK_THROWS_AS(grid_brute_force(fixtures::example3(), {vec({1}), vec({2})}), InfeasibleError);
    CHECK_THROWS_AS(grid_brute_force(fixtures::example3(), {}), ConfigError);
  }

  TEST_CASE("size and feasibility limits") {
    GeneratorConfig cfg;
    cfg.n = 3;
    cfg.N = 21;
    const CcpInstance big = generate(cfg);
    CHECK_THROWS_AS(brute_force_optimal(big), TooLarge);
    CHECK_THROWS_AS(brute_force_optimal(big, 10), TooLarge);

    // Every scenario needs x <= -1 on x >= 0.
    const CcpInstance none =
        fixtures::single_row("none", vec({1}), {vec({1}), vec({1}), vec({1})}, {1, 1, 1}, 0.5);
    CHECK_THROWS_AS(brute_force_optimal(none), InfeasibleError);
  }

  TEST_CASE("subset count and agreement with all subsets") {
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
      GeneratorConfig cfg;
      cfg.family = Family::Covering;
      cfg.n = 4;
      cfg.N = 9;
      cfg.J = 2;
      cfg.epsilon = 0.300333;
      cfg.seed = seed;
      cfg.negative_cost_fraction = 0.3;
      const CcpInstance inst = generate(cfg);
      const ExactResult r = brute_force_optimal(inst);
      const int k = static_cast<int>(std::ceil(9 * (1 - cfg.epsilon) - 1e-9));
      CHECK(r.subproblems_solved == oracles::binomial(9, k));
      const double all = oracles::all_subsets_optimum(
          inst, [&](const std::vector<int>& s) { return subset_lp_value(inst, s, nullptr); });
      CHECK(r.v_star == doctest::Approx(all).epsilon(1e-9));
      CHECK(chance_feasible(inst, r.x_star, 1e-6));
      CHECK(inst.cost.dot(r.x_star) == doctest::Approx(r.v_star).epsilon(1e-9));
      CHECK(brute_force_optimal(inst, 20, {}, 4).v_star == r.v_star);
    }
  }

  TEST_CASE("subset LP") {
    Vector x;
    CHECK(subset_lp_value(fixtures::example2(), {0, 1}, &x) == doctest::Approx(2.0));
    CHECK(subset_lp_value(fixtures::example2(), {}, &x) == doctest::Approx(0.0));
    CHECK(std::isinf(subset_lp_value(fixtures::example3(), {0, 1}, nullptr)));
  }
}
