#include <doctest.h>

#include <random>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "sccvar/bench.hpp"
#include "sccvar/cvar.hpp"
#include "sccvar/errors.hpp"
#include "sccvar/exact.hpp"
#include "sccvar/sca.hpp"
#include "sccvar/scaling.hpp"

using namespace sccvar;
using fixtures::vec;

namespace {

// Largest violation of z in spec (linear rows and cones).
double spec_violation(const conic::SocpSpec& spec, const Vector& z) {
  double worst = 0.0;
  if (spec.A.rows() > 0) worst = std::max(worst, (spec.A * z - spec.b).maxCoeff());
  for (const conic::ConeBlock& cb : spec.cones)
    worst = std::max(worst, (cb.F * z + cb.f).norm() - (cb.g.dot(z) + cb.h));
  return worst;
}

// (x, beta, s, alpha_relaxed) with the cheapest beta and slacks for the bilinear rows.
Vector anchor_point(const CcpInstance& inst, const Vector& x, const Vector& alpha,
                    const std::vector<bool>& relax) {
  const DcLayout layout = dc_layout(inst, relax);
  Vector z = Vector::Zero(layout.size());
  z.head(inst.n()) = x;
  double beta = 0.0;
  scaled_risk_value(inst, x, alpha, &beta);
  z(layout.beta()) = beta;
  const Vector g = g_max_all(inst, x);
  for (int i = 0; i < inst.num_scenarios(); ++i) {
    z(layout.s(i)) = std::max(0.0, alpha(i) * g(i) - beta);
    if (layout.alpha_column[i] >= 0) z(layout.alpha_column[i]) = alpha(i);
  }
  return z;
}

// Optimal value of the Example-2 subproblem anchored at (x_k, alpha_k = e), written out from
// the DC inequality (alpha + g)^2 - T(alpha, x) <= 4(s + beta) and searched by nested
// one-dimensional convex minimizations.
double example2_dc_oracle(const Vector& x_k, double alpha_hi) {
  const CcpInstance e2 = fixtures::example2();
  const double eps = e2.epsilon;
  const std::vector<double> p = {0.5, 0.5};
  auto g = [&](int i, double x1, double x2) { return i == 0 ? 1 - x1 : 1 - x1 - x2; };
  const double gk[2] = {g(0, x_k(0), x_k(1)), g(1, x_k(0), x_k(1))};
  auto phi = [&](double a1, double a2, double x1, double x2) {
    const double a[2] = {a1, a2};
    std::vector<double> q(2);
    for (int i = 0; i < 2; ++i) {
      const double R = 1.0 - gk[i];
      const double gi = g(i, x1, x2);
      const double taylor = R * R + 2 * R * (a[i] - 1.0) - 2 * R * (gi - gk[i]);
      q[i] = ((a[i] + gi) * (a[i] + gi) - taylor) / 4.0;
    }
    return oracles::hinge_risk(q, p, eps);
  };
  // For fixed alpha: bisection on t = 2 x1 + x2 over the segment x1 in [0, t/2].
  auto value_at = [&](double a1, double a2) {
    auto seg_min = [&](double t) {
      return oracles::golden_min([&](double x1) { return phi(a1, a2, x1, t - 2 * x1); }, 0.0,
                                 t / 2, 80);
    };
    double lo = 0.0, hi = 10.0;
    const double at_hi = seg_min(hi);
    if (at_hi > 0) return hi + at_hi;
    if (seg_min(lo) <= 0) return lo;
    for (int k = 0; k < 60; ++k) {
      const double mid = 0.5 * (lo + hi);
      (seg_min(mid) <= 0 ? hi : lo) = mid;
    }
    return hi;
  };
  return oracles::golden_min(
      [&](double a1) {
        return oracles::golden_min([&](double a2) { return value_at(a1, a2); }, 1.0, alpha_hi, 50);
      },
      1.0, alpha_hi, 50);
}

}  // namespace

TEST_SUITE("sca") {
  TEST_CASE("linearization is exact at the anchor") {
    const CcpInstance e6 = fixtures::example6();
    const Vector xk = vec({0.3, 0.9}), ak = vec({1, 4, 7});
    const DcLinearization lin = linearize(e6, xk, ak);
    for (int i = 0; i < 3; ++i) {
      const double g = g_max(e6, i, xk);
      const Vector w = e6.scenarios[i].W.row(0).transpose();
      CHECK(std::abs(lin.evaluate(i, 0, ak(i), xk, w) - (ak(i) - g) * (ak(i) - g)) <= 1e-10);
      // Under-estimation of the convex square away from the anchor.
      const Vector x = vec({1.7, -0.4});
      const double gx = g_max(e6, i, x);
      CHECK(lin.evaluate(i, 0, 3.0, x, w) <= (3.0 - gx) * (3.0 - gx) + 1e-12);
    }
  }

  TEST_CASE("empty relax set gives the CVaR LP") {
    const CcpInstance e2 = fixtures::example2();
    const conic::SocpSpec spec = dc_subproblem(e2, vec({1, 0}), Vector::Ones(2), {false, false});
    CHECK(spec.cones.empty());
    const conic::SolveResult r = conic::solve_conic(spec);
    REQUIRE(r.optimal());
    CHECK(r.objective == doctest::Approx(solve_cvar(e2).objective).epsilon(1e-9));
  }

  TEST_CASE("anchor is feasible in its own subproblem") {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> a(1.0, 20.0);
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      GeneratorConfig cfg;
      cfg.family = Family::Covering;
      cfg.n = 5;
      cfg.N = 8;
      cfg.J = 2;
      cfg.epsilon = 0.300333;
      cfg.seed = seed;
      const CcpInstance inst = generate(cfg);
      const CvarSolution base = solve_cvar(inst);
      REQUIRE(base.optimal());
      Vector alpha(8);
      for (int i = 0; i < 8; ++i) alpha(i) = a(rng);
      const CvarSolution s = solve_scaled_cvar(inst, ScalingVector(alpha));
      REQUIRE(s.optimal());
      const std::vector<bool> relax(8, true);
      const conic::SocpSpec spec = dc_subproblem(inst, s.x, alpha, relax);
      CHECK(spec_violation(spec, anchor_point(inst, s.x, alpha, relax)) <= 1e-7);
    }
  }

  TEST_CASE("subproblem points satisfy the bilinear rows") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      GeneratorConfig cfg;
      cfg.family = Family::Portfolio;
      cfg.n = 8;
      cfg.N = 10;
      cfg.epsilon = 0.200333;
      cfg.seed = seed;
      const CcpInstance inst = generate(cfg);
      const CvarSolution base = solve_cvar(inst);
      REQUIRE(base.optimal());
      const std::vector<bool> relax(10, true);
      const conic::SocpSpec spec = dc_subproblem(inst, base.x, Vector::Ones(10), relax);
      const conic::SolveResult r = conic::solve_socp(spec);
      REQUIRE(r.optimal());
      const Vector anchor = anchor_point(inst, base.x, Vector::Ones(10), relax);
      const DcLayout layout = dc_layout(inst, relax);
      for (double lam : {0.0, 0.25, 0.5, 0.75, 1.0}) {
        const Vector z = lam * r.z + (1 - lam) * anchor;
        const Vector x = z.head(inst.n());
        for (int i = 0; i < 10; ++i) {
          const double ai = z(layout.alpha_column[i]);
          for (int j = 0; j < inst.rows_per_scenario(); ++j)
            CHECK(ai * evaluate_g(inst, i, x)(j) <= z(layout.s(i)) + z(layout.beta()) + 1e-7);
        }
      }
    }
  }

  TEST_CASE("two-scenario subproblem against the nested-search oracle") {
    const CcpInstance e2 = fixtures::example2();
    const conic::SocpSpec spec = dc_subproblem(e2, vec({0, 4}), Vector::Ones(2), {true, true});
    const conic::SolveResult r = conic::solve_socp(spec);
    REQUIRE(r.optimal());
    CHECK(r.objective <= 2.0 + 1e-9);
    const DcLayout layout = dc_layout(e2, {true, true});
    const double a_hi = 4.0 * std::max(r.z(layout.alpha_column[0]), r.z(layout.alpha_column[1])) + 10.0;
    const double oracle = example2_dc_oracle(vec({0, 4}), a_hi);
    CHECK(std::abs(r.objective - oracle) <= 1e-5);
  }

  TEST_CASE("algorithm2 on the two-scenario example") {
    const CcpInstance e2 = fixtures::example2();
    const IterationTrace t = algorithm2(e2, solve_cvar(e2).x);
    REQUIRE(t.has_incumbent());
    CHECK(t.incumbent_objective <= 2.0 + 1e-9);
    CHECK(t.incumbent_objective >= 1.0 - 1e-9);
    CHECK(t.max_increase() <= 1e-9);
  }

  TEST_CASE("algorithm2 from a fixed point stops after one step") {
    // Nothing violated and nothing to gain: x = 0 is optimal for c >= 0.
    CcpInstance inst = fixtures::single_row("fixed", vec({1}), {vec({-1}), vec({-2})}, {-1, -1}, 0.3);
    const IterationTrace t = algorithm2(inst, vec({0}));
    CHECK(t.termination == Termination::Converged);
    CHECK(t.incumbent_objective == doctest::Approx(0.0));
    CHECK(t.records.back().delta <= 1e-9);
  }

  TEST_CASE("algorithm2 on random covering instances") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      GeneratorConfig cfg;
      cfg.family = Family::Covering;
      cfg.n = 5;
      cfg.N = 8;
      cfg.J = 2;
      cfg.epsilon = 0.300333;
      cfg.seed = seed;
      const CcpInstance inst = generate(cfg);
      const CvarSolution base = solve_cvar(inst);
      REQUIRE(base.optimal());
      const IterationTrace t = algorithm2(inst, base.x);
      REQUIRE(t.has_incumbent());
      CHECK(t.max_increase() <= 1e-9);
      CHECK(chance_feasible(inst, t.incumbent_x, 1e-6));
      const ExactResult ex = brute_force_optimal(inst);
      CHECK(ex.v_star <= t.incumbent_objective + 1e-6 * (1 + std::abs(ex.v_star)));
      for (const IterationRecord& r : t.records) CHECK(r.anchor_admissible);
    }
  }

  TEST_CASE("algorithm3 on the small examples") {
    const CcpInstance e6 = fixtures::example6();
    const IterationTrace t6 = algorithm3_hybrid(e6, vec({0, 1.1}));
    REQUIRE(t6.has_incumbent());
    CHECK(t6.incumbent_objective <= 2.2 + 1e-9);
    // The post step is the fixed-alpha LP at the last hybrid alpha.
    int post = -1;
    for (std::size_t k = 0; k < t6.records.size(); ++k)
      if (t6.records[k].stage == "post") post = static_cast<int>(k);
    REQUIRE(post > 0);
    const IterationRecord& before = t6.records[post - 1];
    CHECK(t6.records[post].objective <= before.objective + 1e-9);
    CHECK(solve_scaled_cvar(e6, ScalingVector(before.alpha)).objective ==
          doctest::Approx(t6.records[post].objective).epsilon(1e-9));

    // At the CVaR point both scenarios sit at g = 0, so I_k stays empty.
    const CcpInstance e2 = fixtures::example2();
    const IterationTrace t2 = algorithm3_hybrid(e2, solve_cvar(e2).x);
    CHECK(t2.incumbent_objective == doctest::Approx(2.0));
    for (const IterationRecord& r : t2.records) CHECK(r.alpha == Vector::Ones(2));
  }

  TEST_CASE("algorithm3 on a portfolio instance") {
    GeneratorConfig cfg;
    cfg.family = Family::Portfolio;
    cfg.n = 10;
    cfg.N = 100;
    cfg.epsilon = 0.2;
    cfg.seed = 7;
    const CcpInstance inst = generate(cfg);
    const CvarSolution base = solve_cvar(inst);
    REQUIRE(base.optimal());
    const IterationTrace t = algorithm3_hybrid(inst, base.x);
    REQUIRE(t.has_incumbent());
    CHECK(t.incumbent_objective <= base.objective + 1e-9);
    // The fixed-alpha post step never increases the objective.
    for (std::size_t k = 1; k < t.records.size(); ++k)
      if (t.records[k].stage == "post")
        CHECK(t.records[k].objective <= t.records[k - 1].objective + 1e-9);
  }

  TEST_CASE("algorithm2 rejects an infeasible start") {
    CHECK_THROWS_AS(algorithm2(fixtures::example3(), vec({0})), InfeasibleError);
    CHECK_THROWS_AS(dc_subproblem(fixtures::example2(), vec({0, 0}), vec({0.5, 1}), {true, true}),
                    ScalingOutOfRange);
  }
}
