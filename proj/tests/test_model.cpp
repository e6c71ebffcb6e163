#include <doctest.h>

#include <random>

#include "fixtures.hpp"
#include "sccvar/errors.hpp"
#include "sccvar/model.hpp"

using namespace sccvar;
using fixtures::vec;

TEST_SUITE("model") {
  TEST_CASE("validate accepts the two-scenario instance and rejects bad data") {
    CHECK_NOTHROW(validate(fixtures::example2()));

    CcpInstance bad_p = fixtures::example2();
    bad_p.scenarios[1].p = 0.4;
    CHECK_THROWS_AS(validate(bad_p), ProbabilityError);

    CcpInstance zero_p = fixtures::example2();
    zero_p.scenarios[0].p = 0.0;
    zero_p.scenarios[1].p = 1.0;
    CHECK_THROWS_AS(validate(zero_p), ProbabilityError);

    CcpInstance bad_eps = fixtures::example2();
    bad_eps.epsilon = 1.2;
    CHECK_THROWS_AS(validate(bad_eps), RiskLevelError);

    CcpInstance bad_shape = fixtures::example2();
    bad_shape.scenarios[1].d = vec({1, 2});
    CHECK_THROWS_AS(validate(bad_shape), DimensionMismatch);

    CcpInstance crossed = fixtures::example2();
    crossed.domain.lb(0) = 2.0;
    crossed.domain.ub(0) = 1.0;
    CHECK_THROWS_AS(validate(crossed), DimensionMismatch);
  }

  TEST_CASE("evaluate_g and g_max") {
    const CcpInstance e2 = fixtures::example2();
    CHECK(evaluate_g(e2, 1, vec({0, 1}))(0) == doctest::Approx(0.0));
    CHECK(evaluate_g(fixtures::example3(), 0, vec({0}))(0) == doctest::Approx(10.0));
    CHECK(evaluate_g(e2, 0, vec({0, 0})) == e2.scenarios[0].d);
    CHECK(g_max(fixtures::example6(), 0, vec({0, 1})) == doctest::Approx(1.0));
    CHECK(g_max(fixtures::example3(), 1, vec({0})) == doctest::Approx(-2.0));
    CHECK_THROWS_AS(evaluate_g(e2, 2, vec({0, 0})), IndexOutOfRange);
    CHECK_THROWS_AS(evaluate_g(e2, -1, vec({0, 0})), IndexOutOfRange);
    CHECK_THROWS_AS(evaluate_g(e2, 0, vec({0})), DimensionMismatch);
  }

  TEST_CASE("g_max takes the worst row") {
    CcpInstance inst = fixtures::example2();
    for (auto& s : inst.scenarios) {
      Matrix W(2, 2);
      W << s.W.row(0), 0.0, 1.0;
      s.W = W;
      s.d = vec({s.d(0), -3.0});
    }
    CHECK(g_max(inst, 0, vec({0, 0})) == doctest::Approx(1.0));
    CHECK(g_max(inst, 0, vec({5, 10})) == doctest::Approx(7.0));
  }

  TEST_CASE("violation_probability and chance_feasible") {
    CHECK(violation_probability(fixtures::example3(), vec({0}), 1e-6) == doctest::Approx(0.25));
    CHECK(violation_probability(fixtures::example2(), vec({2, 2}), 1e-6) == doctest::Approx(0.0));
    CHECK(violation_probability(fixtures::example6(), vec({0, 1}), 1e-6) ==
          doctest::Approx(1.0 / 3.0));
    CHECK(chance_feasible(fixtures::example3(), vec({0}), 1e-6));
    CHECK(chance_feasible(fixtures::example6(), vec({0, 1}), 1e-6));
    const CcpInstance e7 = fixtures::example7();
    CHECK(chance_feasible(e7, vec({1, 0}), 1e-6));
    CHECK_FALSE(chance_feasible(e7, vec({0, 0.5}), 1e-6));
  }

  TEST_CASE("scaling leaves the chance constraint unchanged") {
    const CcpInstance e2 = fixtures::example2();
    const CcpInstance same = scale_scenarios(e2, ScalingVector::ones(2));
    for (int i = 0; i < 2; ++i) {
      CHECK(same.scenarios[i].W == e2.scenarios[i].W);
      CHECK(same.scenarios[i].d == e2.scenarios[i].d);
    }
    const CcpInstance scaled = scale_scenarios(e2, ScalingVector(vec({1, 4})));
    CHECK(scaled.scenarios[1].W == Matrix::Constant(1, 2, -4.0));
    CHECK(scaled.scenarios[1].d(0) == doctest::Approx(4.0));
    CHECK(scaled.scenarios[0].p == e2.scenarios[0].p);

    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-3.0, 3.0), a(1.0, 20.0);
    const CcpInstance e6 = fixtures::example6();
    for (int trial = 0; trial < 200; ++trial) {
      const Vector x = vec({u(rng), u(rng)});
      const CcpInstance s6 = scale_scenarios(e6, ScalingVector(vec({a(rng), a(rng), a(rng)})));
      CHECK(violation_probability(e6, x, 0.0) == violation_probability(s6, x, 0.0));
    }
    CHECK_THROWS_AS(ScalingVector(vec({1, 0.5})), ScalingOutOfRange);
    CHECK_THROWS_AS(ScalingVector(vec({1, 2e6})), ScalingOutOfRange);
  }

  TEST_CASE("normalize_covering_rows") {
    CcpInstance inst = fixtures::single_row("cov", vec({1, 1}), {vec({-2, -2})}, {4}, 0.5);
    const CcpInstance out = normalize_covering_rows(inst);
    CHECK(out.scenarios[0].W(0, 0) == doctest::Approx(-0.5));
    CHECK(out.scenarios[0].W(0, 1) == doctest::Approx(-0.5));
    CHECK(out.scenarios[0].d(0) == doctest::Approx(1.0));

    const CcpInstance e2 = fixtures::example2();
    const CcpInstance unit = normalize_covering_rows(e2);
    CHECK(unit.scenarios[1].W == e2.scenarios[1].W);

    CHECK_THROWS_AS(normalize_covering_rows(fixtures::example4()), NotCovering);

    // Feasibility is preserved on a grid of points.
    CcpInstance cov = fixtures::single_row("cov3", vec({1, 2}), {vec({-1, -3}), vec({-4, -1}), vec({-2, -2})},
                                           {2, 3, 5}, 0.4);
    const CcpInstance ncov = normalize_covering_rows(cov);
    for (double x1 = 0.0; x1 <= 3.0; x1 += 0.25)
      for (double x2 = 0.0; x2 <= 3.0; x2 += 0.25)
        CHECK(chance_feasible(cov, vec({x1, x2}), 0.0) == chance_feasible(ncov, vec({x1, x2}), 0.0));
  }

  TEST_CASE("evaluate_g is affine") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-5.0, 5.0), l(0.0, 1.0);
    const CcpInstance e6 = fixtures::example6();
    for (int trial = 0; trial < 100; ++trial) {
      const Vector x = vec({u(rng), u(rng)}), y = vec({u(rng), u(rng)});
      const double lam = l(rng);
      for (int i = 0; i < 3; ++i) {
        const Vector lhs = evaluate_g(e6, i, lam * x + (1 - lam) * y);
        const Vector rhs = lam * evaluate_g(e6, i, x) + (1 - lam) * evaluate_g(e6, i, y);
        CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-12);
      }
    }
  }

  TEST_CASE("certificate_point") {
    const CcpInstance e2 = fixtures::example2();
    const auto x = certificate_point(e2, -1e-5);
    REQUIRE(x.has_value());
    for (int i = 0; i < 2; ++i) CHECK(g_max(e2, i, *x) <= -1e-5 + 1e-6);
    CHECK(in_domain(e2, *x, 1e-9));

    // Scenario 4 of the Example-4 variant reads 4x <= 0, impossible strictly for x >= 0.
    CHECK_FALSE(certificate_point(fixtures::example4(), -1e-5).has_value());

    CcpInstance constant = fixtures::single_row("const", vec({1}), {vec({0})}, {1}, 0.5);
    CHECK_FALSE(certificate_point(constant, -1e-5).has_value());
    CHECK_THROWS_AS(certificate_point(e2, 0.0), ConfigError);
  }

  TEST_CASE("epsilon_regularity_check") {
    auto uniform = [](int N, double eps) {
      std::vector<Vector> w(N, vec({-1}));
      std::vector<double> d(N, 1.0);
      return fixtures::single_row("u", vec({1}), w, d, eps);
    };
    CHECK(epsilon_regularity_check(uniform(3000, 0.050333)) == RegularityVerdict::Pass);
    CHECK(epsilon_regularity_check(uniform(4, 0.5)) == RegularityVerdict::PerturbedNeededWarning);
    CHECK(epsilon_regularity_check(uniform(6, 1.0 / 3.0)) ==
          RegularityVerdict::PerturbedNeededWarning);

    CcpInstance skew = uniform(3, 0.3);
    skew.scenarios[0].p = 0.5;
    skew.scenarios[1].p = 0.3;
    skew.scenarios[2].p = 0.2;
    CHECK(epsilon_regularity_check(skew) == RegularityVerdict::PerturbedNeededWarning);
    skew.epsilon = 0.25;
    CHECK(epsilon_regularity_check(skew) == RegularityVerdict::Pass);

    CcpInstance big = uniform(25, 0.1);
    big.scenarios[0].p += 0.01;
    big.scenarios[1].p -= 0.01;
    CHECK(epsilon_regularity_check(big) == RegularityVerdict::Unknown);
  }
}
