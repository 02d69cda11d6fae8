#include <cmath>

#include <doctest.h>

#include "segsolve/multiphase.hpp"
#include "segsolve/oracle.hpp"
#include "segsolve/solver.hpp"

using namespace segsolve;

namespace {

ProblemSpec tiny(int n, int m, std::vector<double> left,
                 std::vector<double> right, std::vector<DynamicsSpec> dyn) {
  ProblemSpec p;
  p.name = "tiny";
  p.dim = 1;
  p.n = n;
  p.m = m;
  p.boundary.resize(static_cast<std::size_t>(m));
  for (int l = 0; l < m; ++l) {
    p.boundary[static_cast<std::size_t>(l)].values = {
        left[static_cast<std::size_t>(l)], right[static_cast<std::size_t>(l)]};
  }
  p.dynamics = std::move(dyn);
  return p;
}

}  // namespace

TEST_CASE("oracle solves the single-node harmonic problem by hand") {
  // N=2, f = 0, phi1(-1) = 1: the restriction to "phase 1 active" is a
  // one-variable quadratic with minimum at the neighbor average 0.5.
  const ProblemSpec p = tiny(2, 2, {1.0, 0.0}, {0.0, 0.0},
                             {builtin_zero(), builtin_zero()});
  const OracleResult r = oracle_minimize(p);
  CHECK(r.state.phase(1).at({1, 0}) == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(r.state.phase(2).at({1, 0}) == 0.0);
  CHECK(r.energy == doctest::Approx(energy(r.state, p.dynamics)).epsilon(1e-13));
  CHECK(audit(r.state).empty());
  CHECK(r.evaluations > 0);
}

TEST_CASE("oracle returns the zero state for zero boundary data") {
  const ProblemSpec p = tiny(4, 2, {0.0, 0.0}, {0.0, 0.0},
                             {builtin_constant(1.0), builtin_weighted_abs(3.0)});
  const OracleResult r = oracle_minimize(p);
  CHECK(r.energy == 0.0);
  for (int l = 1; l <= 2; ++l) {
    for (std::size_t f = 0; f < r.state.phase(l).size(); ++f) {
      CHECK(r.state.phase(l)[f] == 0.0);
    }
  }
}

TEST_CASE("oracle size and argument guards") {
  const std::vector<DynamicsSpec> two = {builtin_zero(), builtin_zero()};
  SUBCASE("2D is refused") {
    ProblemSpec p = tiny(4, 2, {1.0, 0.0}, {0.0, 0.0}, two);
    p.dim = 2;
    p.boundary[0].values.assign(16, 0.0);
    p.boundary[1].values.assign(16, 0.0);
    CHECK_THROWS_AS(oracle_minimize(p), SizeError);
  }
  SUBCASE("N above the cap is refused") {
    CHECK_THROWS_AS(
        oracle_minimize(tiny(10, 2, {1.0, 0.0}, {0.0, 0.0}, two)), SizeError);
  }
  SUBCASE("too many pattern variables are refused") {
    // N=8 with m=3 means 7*3 = 21 > 18 active variables.
    const ProblemSpec p =
        tiny(8, 3, {1.0, 0.0, 0.0}, {0.0, 0.0, 0.0},
             {builtin_zero(), builtin_zero(), builtin_zero()});
    CHECK_THROWS_AS(oracle_minimize(p), SizeError);
  }
  SUBCASE("nonpositive tolerance is refused") {
    CHECK_THROWS_AS(
        oracle_minimize(tiny(2, 2, {1.0, 0.0}, {0.0, 0.0}, two), 0.0),
        ContractError);
  }
}

TEST_CASE("oracle cross-validates the antisymmetric constant problem") {
  const ProblemSpec p = tiny(4, 2, {1.0, 0.0}, {0.0, 1.0},
                             {builtin_constant(1.0), builtin_constant(1.0)});
  const OracleResult oracle = oracle_minimize(p);
  SolveConfig cfg;
  cfg.max_iterations = 100000;
  cfg.residual_tol = 1e-13;
  auto [solved, report] = solve(p, cfg);
  REQUIRE(report.early_exit);
  double diff = 0.0;
  for (int l = 1; l <= 2; ++l) {
    for (std::size_t f = 0; f < solved.phase(l).size(); ++f) {
      diff = std::max(diff,
                      std::abs(solved.phase(l)[f] - oracle.state.phase(l)[f]));
    }
  }
  CHECK(diff <= 1e-8);
}

TEST_CASE("the certification sweep agrees instance by instance") {
  const std::vector<ProblemSpec> sweep = oracle_sweep_instances();
  REQUIRE(sweep.size() == 12);
  for (const ProblemSpec& p : sweep) {
    CAPTURE(p.name);
    const OracleComparison cmp = oracle_agrees(p, 1e-7);
    CHECK(cmp.status == "ok");
    CHECK(cmp.agrees);
    CHECK(cmp.energy_diff <= 1e-9);
    // The oracle is the certified lower bound over the constraint set.
    CHECK(cmp.oracle_energy <= cmp.solver_energy + 1e-9);
  }
}

TEST_CASE("oracle minimizers satisfy the first-order conditions") {
  for (const ProblemSpec& p : oracle_sweep_instances()) {
    const OracleResult r = oracle_minimize(p);
    const FirstOrderReport foc = first_order_check(r.state, p.dynamics);
    CHECK(foc.max_equation_violation <= 1e-6);
    CHECK(foc.max_inequality_violation <= 1e-6);
  }
}

TEST_CASE("sweep instances are deterministic and within the caps") {
  const std::vector<ProblemSpec> a = oracle_sweep_instances();
  const std::vector<ProblemSpec> b = oracle_sweep_instances();
  REQUIRE(a.size() == b.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    CHECK(a[k].name == b[k].name);
    CHECK(a[k].n == b[k].n);
    CHECK(a[k].m == b[k].m);
    CHECK(a[k].n <= 6);
    CHECK(a[k].m <= 3);
    for (std::size_t l = 0; l < a[k].boundary.size(); ++l) {
      CHECK(a[k].boundary[l].values == b[k].boundary[l].values);
    }
  }
}
