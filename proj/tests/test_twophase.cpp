#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <doctest.h>

#include "segsolve/benchmarks.hpp"
#include "segsolve/solver.hpp"
#include "segsolve/twophase.hpp"

using namespace segsolve;

namespace {

TwoPhaseProblem endpoints(int n, double left, double right, DynamicsSpec f1,
                          DynamicsSpec f2, std::string name = "toy") {
  const UniformGrid g(1, n);
  return make_twophase(
      g,
      [left, right](Point p) { return p.x < 0.0 ? left : right; },
      std::move(f1), std::move(f2), std::move(name));
}

SolveConfig stagnation_config(long iters = 200000, double tol = 1e-13) {
  SolveConfig cfg;
  cfg.max_iterations = iters;
  cfg.residual_tol = tol;
  return cfg;
}

}  // namespace

TEST_CASE("make_twophase requirements") {
  const UniformGrid g(1, 4);
  DynamicsSpec not_monotone = builtin_constant(1.0);
  not_monotone.declared_monotone = false;
  CHECK_THROWS_AS(make_twophase(
                      g, [](Point) { return 0.0; }, builtin_constant(1.0),
                      not_monotone),
                  ProblemError);
  const TwoPhaseProblem tp = endpoints(4, 2.0, -3.0, builtin_zero(),
                                       builtin_zero());
  CHECK(tp.g[0] == 2.0);
  CHECK(tp.g[4] == -3.0);
  CHECK(tp.g[2] == 0.0);  // zero-extended interior
}

TEST_CASE("minmax_G hand values") {
  const Point x{0.25, -0.5};
  const DynamicsSpec c2 = builtin_constant(2.0);

  SUBCASE("all-zero arguments") {
    CHECK(minmax_G(builtin_zero(), builtin_zero(), x, 0.0, 0.0) == 0.0);
  }
  SUBCASE("positive value, constant reactions") {
    // min(-0 + f1(x,1), max(-0 - f2(x,-1), 1)) = min(2, max(2, 1)) = 2.
    CHECK(minmax_G(c2, c2, x, 1.0, 0.0) == 2.0);
  }
  SUBCASE("negative value with negative laplacian") {
    // min(3 + f1(x,-1), max(3 - f2(x,1), -1)) = min(1, max(1, -1)) = 1.
    CHECK(minmax_G(c2, c2, x, -1.0, -3.0) == 1.0);
  }
}

TEST_CASE("discrete_residual") {
  SUBCASE("zero field, zero data") {
    const TwoPhaseProblem tp = endpoints(6, 0.0, 0.0, builtin_zero(),
                                         builtin_zero());
    CHECK(discrete_residual(tp, GridFunction(tp.grid)) == 0.0);
  }
  SUBCASE("converged constant-reaction solve satisfies the system") {
    const TwoPhaseProblem tp = endpoints(40, 0.75, -0.75,
                                         builtin_constant(1.0),
                                         builtin_constant(1.0));
    auto [w, report] = solve_twophase(tp, stagnation_config());
    REQUIRE(report.early_exit);
    CHECK(discrete_residual(tp, w) <= 1e-10);
  }
  SUBCASE("u = x against f = 2 misses by exactly the reaction") {
    const TwoPhaseProblem tp = endpoints(8, -1.0, 1.0, builtin_constant(2.0),
                                         builtin_constant(2.0));
    GridFunction u(tp.grid);
    for (std::size_t f = 0; f < u.size(); ++f) {
      u[f] = tp.grid.coords(tp.grid.unflat(f)).x;
    }
    // The linear profile kills the Laplacian, so G reduces to the reaction
    // value +-2 at every interior node.
    CHECK(discrete_residual(tp, u) == 2.0);
  }
  SUBCASE("boundary mismatch is rejected by name") {
    const TwoPhaseProblem tp = endpoints(4, 1.0, -1.0, builtin_zero(),
                                         builtin_zero());
    GridFunction u(tp.grid);
    CHECK_THROWS_AS(discrete_residual(tp, u), ProblemError);
  }
}

TEST_CASE("monotonicity probe") {
  SUBCASE("constant reactions pass") {
    const TwoPhaseProblem tp = endpoints(10, 1.0, -1.0, builtin_constant(2.0),
                                         builtin_constant(2.0));
    const ProbeReport r = monotonicity_probe(tp, 10000, 7);
    CHECK(r.ok());
    CHECK(r.trials == 10000);
  }
  SUBCASE("weighted_abs reactions pass") {
    const TwoPhaseProblem tp = endpoints(10, 1.0, -1.0,
                                         builtin_weighted_abs(10.0),
                                         builtin_weighted_abs(10.0));
    CHECK(monotonicity_probe(tp, 10000, 7).ok());
  }
  SUBCASE("a decreasing reaction is caught") {
    DynamicsSpec broken;
    broken.eval_f = [](Point, double s) { return -s; };
    broken.eval_F = [](Point, double s) { return -0.5 * s * s; };
    broken.declared_monotone = true;  // lie to get past construction
    broken.declared_nonneg = true;
    const TwoPhaseProblem tp = endpoints(10, 1.0, -1.0, broken, broken);
    const ProbeReport r = monotonicity_probe(tp, 200, 7);
    CHECK(!r.ok());
    CHECK(!r.violations.front().kind.empty());
    CHECK(r.to_json()["violations"].size() == r.violations.size());
  }
  SUBCASE("fixed seed reproduces the report") {
    const TwoPhaseProblem tp = endpoints(6, 1.0, -1.0, builtin_constant(2.0),
                                         builtin_constant(2.0));
    const ProbeReport a = monotonicity_probe(tp, 500, 99);
    const ProbeReport b = monotonicity_probe(tp, 500, 99);
    CHECK(a.to_json() == b.to_json());
  }
}

TEST_CASE("degenerate ellipticity of G on sampled arguments") {
  // For monotone reactions: r <= s and lap_r >= lap_s imply
  // G(x, r, lap_r) <= G(x, s, lap_s).
  const DynamicsSpec f1 = builtin_constant(2.0);
  const DynamicsSpec f2 = builtin_weighted_abs(10.0);
  std::uint64_t z = 0x2545F4914F6CDD1Dull;
  auto next = [&z]() {
    z ^= z << 13;
    z ^= z >> 7;
    z ^= z << 17;
    return static_cast<double>(z >> 11) * 0x1.0p-53;
  };
  for (int t = 0; t < 2000; ++t) {
    const Point x{2.0 * next() - 1.0, 2.0 * next() - 1.0};
    const double r = 6.0 * next() - 3.0;
    const double s = r + 3.0 * next();
    const double lap_s = 8.0 * next() - 4.0;
    const double lap_r = lap_s + 4.0 * next();
    CHECK(minmax_G(f1, f2, x, r, lap_r) <= minmax_G(f1, f2, x, s, lap_s));
  }
}

TEST_CASE("solve_twophase") {
  SUBCASE("zero data gives the zero field") {
    const TwoPhaseProblem tp = endpoints(6, 0.0, 0.0, builtin_constant(1.0),
                                         builtin_constant(1.0));
    auto [w, report] = solve_twophase(tp, stagnation_config(100));
    for (std::size_t f = 0; f < w.size(); ++f) CHECK(w[f] == 0.0);
  }
  SUBCASE("boundary values are carried bitwise") {
    const TwoPhaseProblem tp = endpoints(12, 0.8, -0.3, builtin_zero(),
                                         builtin_zero());
    auto [w, report] = solve_twophase(tp, stagnation_config(50000));
    CHECK(w[0] == 0.8);
    CHECK(w[12] == -0.3);
  }
  SUBCASE("odd symmetry of the antisymmetric constant problem") {
    const int n = 20;
    const TwoPhaseProblem tp = endpoints(n, 1.0, -1.0, builtin_constant(1.0),
                                         builtin_constant(1.0));
    auto [w, report] = solve_twophase(tp, stagnation_config());
    REQUIRE(report.early_exit);
    for (int i = 0; i <= n; ++i) {
      CHECK(std::abs(w[static_cast<std::size_t>(i)] +
                     w[static_cast<std::size_t>(n - i)]) <= 1e-12);
    }
    // A sign-change interface exists.
    CHECK(w[1] > 0.0);
    CHECK(w[static_cast<std::size_t>(n - 1)] < 0.0);
  }
}

TEST_CASE("two-phase benchmark run matches the stored field") {
  // Regression pin of this repository's own N=50 run (fixed budget 1500).
  const std::string path = std::string(SEGSOLVE_GOLDEN_DIR) + "/example1_n50_w.csv";
  std::ifstream golden(path);
  REQUIRE(golden.good());
  std::ostringstream want;
  want << golden.rdbuf();

  const ProblemSpec p = example1();
  const MultiPhaseState init = initialize(p);
  TwoPhaseProblem tp{init.grid(), GridFunction(init.grid()), p.dynamics[0],
                     p.dynamics[1], p.name};
  for (std::size_t f = 0; f < tp.g.size(); ++f) {
    tp.g[f] = init.boundary(1)[f] - init.boundary(2)[f];
  }
  SolveConfig cfg;
  cfg.max_iterations = 1500;
  auto [w, report] = solve_twophase(tp, cfg);
  std::ostringstream got;
  write_csv(w, got);
  CHECK(got.str() == want.str());
  // The field changes sign across the interior interface.
  double lo = 0.0, hi = 0.0;
  for (std::size_t f = 0; f < w.size(); ++f) {
    lo = std::min(lo, w[f]);
    hi = std::max(hi, w[f]);
  }
  CHECK(lo < -0.1);
  CHECK(hi > 0.1);
}

TEST_CASE("refinement_study") {
  SUBCASE("fewer than three grids is rejected") {
    CHECK_THROWS_AS(refinement_study(example2(), {10, 20},
                                     [](int) { return SolveConfig{100}; }),
                    ProblemError);
  }
  SUBCASE("non-nested grids are rejected") {
    CHECK_THROWS_AS(refinement_study(example2(), {10, 15, 20},
                                     [](int) { return SolveConfig{100}; }),
                    ProblemError);
  }
  SUBCASE("zero problem reports zero errors against the finest grid") {
    ProblemSpec p;
    p.name = "null";
    p.dim = 1;
    p.n = 8;
    p.m = 2;
    p.boundary.resize(2);
    p.boundary[0].values = {0.0, 0.0};
    p.boundary[1].values = {0.0, 0.0};
    p.dynamics = {builtin_constant(1.0), builtin_constant(1.0)};
    const ConvergenceTable t = refinement_study(
        p, {4, 8, 16}, [](int) { return stagnation_config(200); });
    REQUIRE(t.rows.size() == 2);  // finest row is the reference
    CHECK(t.rows[0].error == 0.0);
    CHECK(t.rows[1].error == 0.0);
    CHECK(t.reference.find("16") != std::string::npos);
  }
  SUBCASE("piecewise-linear 1D solution is resolved to round-off") {
    // f = 0 on both sides: the discrete solution interpolates the linear
    // exact solution at every resolution, so the self-comparison errors sit
    // at machine precision.
    ProblemSpec p;
    p.name = "linear";
    p.dim = 1;
    p.n = 8;
    p.m = 2;
    p.boundary.resize(2);
    p.boundary[0].values = {1.0, 0.0};
    p.boundary[1].values = {0.0, 0.0};
    p.dynamics = {builtin_zero(), builtin_zero()};
    const ConvergenceTable t = refinement_study(
        p, {4, 8, 16}, [](int) { return stagnation_config(100000, 1e-15); });
    for (const ConvergenceRow& row : t.rows) {
      CHECK(row.error <= 1e-12);
    }
  }
  SUBCASE("exact-solution reference reproduces the quadratic rate") {
    const ConvergenceTable t = refinement_study(
        example2(), {10, 20, 40}, [](int n) {
          SolveConfig cfg;
          cfg.max_iterations = 8L * n * n;
          cfg.residual_tol = 1e-12;
          return cfg;
        });
    REQUIRE(t.rows.size() == 3);
    CHECK(t.reference == "exact");
    CHECK(!t.rows[0].has_ratio);
    for (std::size_t k = 1; k < t.rows.size(); ++k) {
      REQUIRE(t.rows[k].has_ratio);
      CHECK(t.rows[k].ratio_log2 >= 1.6);
      CHECK(t.rows[k].ratio_log2 <= 2.4);
    }
    // Table plumbing: text mentions the reference, JSON mirrors the rows.
    CHECK(t.text().find("reference") != std::string::npos);
    CHECK(t.to_json()["rows"].size() == 3);
  }
}
