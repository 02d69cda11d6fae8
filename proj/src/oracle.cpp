#include "segsolve/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "segsolve/solver.hpp"

namespace segsolve {

namespace {

// Derivative of the restricted energy in the single active variable z at an
// interior node: (K z - s1)/h^2 + f_l(x, z), where s1 sums the hat values the
// phase sees at its two neighbors. Right-sided f at z = 0, matching the
// constrained optimality condition.
struct CoordinateObjective {
  double k_over_h2;
  double inv_h2;
  double s1;
  Point x;
  const DynamicsSpec* dyn;
  long* evaluations;

  double slope(double z) const {
    ++*evaluations;
    return (k_over_h2 * z - s1 * inv_h2) + dyn->f_scheme(x, z);
  }
};

}  // namespace

OracleResult oracle_minimize(const ProblemSpec& problem, double tol) {
  check_problem(problem);
  if (problem.dim != 1) {
    throw SizeError("the oracle only handles 1D problems");
  }
  if (problem.n > 8) {
    throw SizeError("oracle cap exceeded: N = " + std::to_string(problem.n) +
                    " > 8");
  }
  if (problem.m > 3) {
    throw SizeError("oracle cap exceeded: m = " + std::to_string(problem.m) +
                    " > 3");
  }
  const UniformGrid grid = problem.make_grid();
  const long ni = static_cast<long>(grid.interior_count());
  if (ni * problem.m > 18) {
    throw SizeError("oracle cap exceeded: interior nodes x phases = " +
                    std::to_string(ni * problem.m) + " > 18");
  }
  if (!(tol > 0.0)) throw ContractError("oracle tolerance must be positive");

  const MultiPhaseState base = initialize(problem);
  const int m = problem.m;
  const double h = grid.h();
  const double inv_h2 = 1.0 / (h * h);
  const double k_over_h2 = static_cast<double>(grid.neighbor_count()) * inv_h2;

  // Hat boundary data seen by each phase at the two endpoints.
  std::vector<double> hat_phi_left(static_cast<std::size_t>(m));
  std::vector<double> hat_phi_right(static_cast<std::size_t>(m));
  for (int l = 1; l <= m; ++l) {
    hat_phi_left[l - 1] = hat(base, l, NodeIndex{0, 0});
    hat_phi_right[l - 1] = hat(base, l, NodeIndex{grid.n_per_side(), 0});
  }

  OracleResult best{base, 0.0, "sign-pattern enumeration with coordinate descent", 0};
  long evaluations = 0;

  const int radix = m + 1;
  long total_patterns = 1;
  for (long k = 0; k < ni; ++k) total_patterns *= radix;

  std::vector<int> assign(static_cast<std::size_t>(ni));  // 0 = none, else phase
  std::vector<double> z(static_cast<std::size_t>(ni));
  MultiPhaseState candidate = base;
  bool have_best = false;

  for (long pattern = 0; pattern < total_patterns; ++pattern) {
    // Node 0 owns the most significant digit, so ascending pattern ids walk
    // assignments in lexicographic order; strict improvement keeps the first.
    long rest = pattern;
    for (long k = ni - 1; k >= 0; --k) {
      assign[static_cast<std::size_t>(k)] = static_cast<int>(rest % radix);
      rest /= radix;
    }
    std::fill(z.begin(), z.end(), 0.0);

    // The hat value phase l sees at interior slot k under this pattern.
    auto seen = [&](int l, long k) -> double {
      const int q = assign[static_cast<std::size_t>(k)];
      if (q == 0) return 0.0;
      return q == l ? z[static_cast<std::size_t>(k)]
                    : -z[static_cast<std::size_t>(k)];
    };

    double max_move = 1.0;
    for (long sweep = 0; sweep < 50000 && max_move > tol; ++sweep) {
      max_move = 0.0;
      for (long k = 0; k < ni; ++k) {
        const int l = assign[static_cast<std::size_t>(k)];
        if (l == 0) continue;
        const NodeIndex a{static_cast<int>(k) + 1, 0};
        double s1 = 0.0;
        s1 += k == 0 ? hat_phi_left[l - 1] : seen(l, k - 1);
        s1 += k == ni - 1 ? hat_phi_right[l - 1] : seen(l, k + 1);

        CoordinateObjective obj{k_over_h2, inv_h2, s1, grid.coords(a),
                                &problem.dynamics[l - 1], &evaluations};
        double z_new;
        const std::string& id = problem.dynamics[l - 1].id;
        if (id == "zero" || id == "constant") {
          // The reaction term does not depend on z; the slope is linear.
          const double c = id == "zero" ? 0.0 : problem.dynamics[l - 1].coef;
          ++evaluations;
          z_new = (s1 - c * (h * h)) /
                  static_cast<double>(grid.neighbor_count());
          if (z_new < 0.0) z_new = 0.0;
        } else if (obj.slope(0.0) >= 0.0) {
          z_new = 0.0;
        } else {
          double hi = 1.0;
          int doublings = 0;
          while (obj.slope(hi) <= 0.0) {
            hi *= 2.0;
            if (++doublings > 60) {
              throw NumericalError(
                  "oracle could not bracket a coordinate minimum");
            }
          }
          double lo = 0.0;
          for (int it = 0; it < 200 && hi - lo > 1e-17 * std::max(1.0, hi);
               ++it) {
            const double mid = 0.5 * (lo + hi);
            (obj.slope(mid) < 0.0 ? lo : hi) = mid;
          }
          z_new = 0.5 * (lo + hi);
        }
        const double move = std::abs(z_new - z[static_cast<std::size_t>(k)]);
        if (move > max_move) max_move = move;
        z[static_cast<std::size_t>(k)] = z_new;
      }
    }

    // Assemble the candidate and score it.
    for (long k = 0; k < ni; ++k) {
      const std::size_t f = static_cast<std::size_t>(k) + 1;
      for (int l = 1; l <= m; ++l) {
        candidate.phase(l)[f] =
            assign[static_cast<std::size_t>(k)] == l
                ? z[static_cast<std::size_t>(k)]
                : 0.0;
      }
    }
    const double e = energy(candidate, problem.dynamics);
    if (!have_best || e < best.energy) {
      have_best = true;
      best.energy = e;
      best.state = candidate;
    }
  }
  best.evaluations = evaluations;
  return best;
}

OracleComparison oracle_agrees(const ProblemSpec& problem, double tol) {
  if (!(tol > 0.0)) throw ContractError("comparison tolerance must be positive");
  const OracleResult oracle = oracle_minimize(problem);

  SolveConfig cfg;
  cfg.max_iterations = 200000;
  cfg.residual_tol = 1e-13;
  auto [solved, report] = solve(problem, cfg);

  OracleComparison cmp;
  cmp.solver_residual = report.final_residual;
  cmp.solver_iterations = report.iterations_run;
  cmp.oracle_energy = oracle.energy;
  cmp.solver_energy = energy(solved, problem.dynamics);
  cmp.energy_diff = std::abs(cmp.oracle_energy - cmp.solver_energy);
  for (int l = 1; l <= problem.m; ++l) {
    const auto& a = oracle.state.phase(l).values();
    const auto& b = solved.phase(l).values();
    for (std::size_t f = 0; f < a.size(); ++f) {
      cmp.state_diff = std::max(cmp.state_diff, std::abs(a[f] - b[f]));
    }
  }
  if (cmp.solver_residual > 1e-12) {
    cmp.status = "inconclusive";
    cmp.agrees = false;
    return cmp;
  }
  cmp.status = "ok";
  cmp.agrees = cmp.state_diff <= tol && cmp.energy_diff <= tol;
  return cmp;
}

namespace {

// Minimal splitmix64 stream so the sweep instances do not depend on any
// library's distribution internals.
struct SweepRng {
  std::uint64_t state;
  std::uint64_t next_u64() {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
  int below(int k) { return static_cast<int>(next_u64() % static_cast<std::uint64_t>(k)); }
};

}  // namespace

std::vector<ProblemSpec> oracle_sweep_instances() {
  SweepRng rng{0x5E65D1CEu};
  std::vector<ProblemSpec> out;
  int counter = 0;
  for (int rep = 0; rep < 2; ++rep) {
    for (int n : {2, 4, 6}) {
      for (int m : {2, 3}) {
        ProblemSpec p;
        p.name = "oracle-sweep-" + std::to_string(++counter);
        p.dim = 1;
        p.n = n;
        p.m = m;
        p.boundary.assign(static_cast<std::size_t>(m), BoundaryData{});
        for (BoundaryData& b : p.boundary) b.values.assign(2, 0.0);
        for (int endpoint = 0; endpoint < 2; ++endpoint) {
          const int owner = rng.below(m);
          const double value = rng.uniform01();
          p.boundary[static_cast<std::size_t>(owner)]
              .values[static_cast<std::size_t>(endpoint)] = value;
        }
        for (int l = 0; l < m; ++l) {
          p.dynamics.push_back(
              builtin_constant(static_cast<double>(rng.below(3))));
        }
        out.push_back(std::move(p));
      }
    }
  }
  return out;
}

FirstOrderReport first_order_check(const MultiPhaseState& state,
                                   const std::vector<DynamicsSpec>& dynamics) {
  const int m = state.num_phases();
  if (static_cast<int>(dynamics.size()) != m) {
    throw ProblemError("first_order_check: expected " + std::to_string(m) +
                       " dynamics, got " + std::to_string(dynamics.size()));
  }
  const UniformGrid& g = state.grid();
  FirstOrderReport rep;
  for (int l = 1; l <= m; ++l) {
    GridFunction hatw(g);
    for (std::size_t f = 0; f < hatw.size(); ++f) {
      double acc = state.phase(l)[f];
      for (int j = 1; j <= m; ++j) {
        if (j != l) acc -= state.phase(j)[f];
      }
      hatw[f] = acc;
    }
    for (std::size_t f = 0; f < hatw.size(); ++f) {
      const NodeIndex a = g.unflat(f);
      if (!g.is_interior(a)) continue;
      const double lap = laplacian(hatw, a);
      const double u = state.phase(l)[f];
      const Point x = g.coords(a);
      if (u > 0.0) {
        rep.max_equation_violation =
            std::max(rep.max_equation_violation,
                     std::abs(lap - dynamics[l - 1].f_scheme(x, u)));
      } else {
        rep.max_inequality_violation =
            std::max(rep.max_inequality_violation,
                     std::max(lap - dynamics[l - 1].f_scheme(x, 0.0), 0.0));
      }
    }
  }
  return rep;
}

}  // namespace segsolve
