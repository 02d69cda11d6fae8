#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "segsolve/dynamics.hpp"
#include "segsolve/grid.hpp"
#include "segsolve/solver.hpp"

namespace segsolve {

// Two competing phases folded into one signed unknown w = u^1 - u^2 with
// boundary data g = phi^1 - phi^2 (arbitrary sign on the boundary, zero
// inside). f1 acts on the positive part, f2 on the negative part.
struct TwoPhaseProblem {
  UniformGrid grid;
  GridFunction g;
  DynamicsSpec f1;
  DynamicsSpec f2;
  std::string name;
};

// Samples g on the boundary and checks the dynamics are declared monotone.
TwoPhaseProblem make_twophase(const UniformGrid& grid,
                              const std::function<double(Point)>& g,
                              DynamicsSpec f1, DynamicsSpec f2,
                              std::string name = "twophase");

// The scalar min-max operator
//   G(x, r, lap) = min(-lap + f1(x, r), max(-lap - f2(x, -r), r)).
// The gradient slot p is part of the general operator signature but the
// operator never reads it (it depends only on r and the Laplacian).
double minmax_G(const DynamicsSpec& f1, const DynamicsSpec& f2, Point x,
                double r, double lap, Point p = {});

// Max over interior nodes of |G(x_a, u_a, L_h u_a)|. u must equal g on the
// boundary exactly.
double discrete_residual(const TwoPhaseProblem& problem, const GridFunction& u);

struct ProbeViolation {
  std::string kind;  // "value" | "difference"
  int slot = 0;      // which difference, for kind "difference"
  double base_r = 0.0;
  double delta = 0.0;
  double before = 0.0;
  double after = 0.0;
  std::uint64_t trial = 0;
};

struct ProbeReport {
  long trials = 0;
  std::vector<ProbeViolation> violations;
  bool ok() const { return violations.empty(); }
  std::string text() const;
  nlohmann::json to_json() const;
};

// Writes the node equation in the form F[u_a, u_a - u_nbr] and checks, on
// seeded random samples, that it is nondecreasing in the node value (with
// the differences held fixed) and in every difference. Each trial draws from
// a counter-based generator, so the outcome is reproducible for a given seed
// under any parallel schedule.
ProbeReport monotonicity_probe(const TwoPhaseProblem& problem, long trials,
                               std::uint64_t seed);

// Splits g into phi^1 = max(g,0), phi^2 = max(-g,0), runs the two-phase
// sweep, and folds the result back into w = u^1 - u^2 + phi^1 - phi^2.
std::pair<GridFunction, SolveReport> solve_twophase(
    const TwoPhaseProblem& problem, const SolveConfig& config);

struct ConvergenceRow {
  int n = 0;
  double error = 0.0;
  double ratio_log2 = 0.0;  // log2(previous error / this error)
  bool has_ratio = false;
};

struct ConvergenceTable {
  std::string reference;  // "exact" or "finest grid N=..."
  std::vector<ConvergenceRow> rows;
  std::string text() const;
  nlohmann::json to_json() const;
};

// Solves the problem at each resolution (config_rule supplies the budget per
// N) and reports per-phase max errors against the exact solution when the
// problem has one, else against the finest grid restricted to coarse nodes.
// The N list must be ascending with at least three entries, and every coarse
// N must divide the finest so the grids nest.
ConvergenceTable refinement_study(
    const ProblemSpec& problem, const std::vector<int>& n_list,
    const std::function<SolveConfig(int)>& config_rule);

}  // namespace segsolve
