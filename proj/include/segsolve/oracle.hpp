#pragma once

#include <string>

#include "segsolve/multiphase.hpp"
#include "segsolve/problem.hpp"

namespace segsolve {

struct OracleResult {
  MultiPhaseState state;
  double energy = 0.0;
  std::string method;
  long evaluations = 0;  // inner objective-derivative evaluations
};

// Brute-force global minimizer of the discrete energy over the admissible
// set, for certification only. Enumerates every assignment of "active phase
// or none" per interior node and minimizes the smooth convex restriction by
// coordinate descent (safeguarded bisection per coordinate) to `tol`; ties
// between patterns break toward the lexicographically first. Only 1D
// problems with N <= 8, m <= 3 and interior_count*m <= 18 are accepted;
// larger instances raise SizeError rather than approximating.
OracleResult oracle_minimize(const ProblemSpec& problem, double tol = 1e-12);

struct OracleComparison {
  bool agrees = false;
  std::string status;  // "ok" or "inconclusive" (solver failed to stagnate)
  double state_diff = 0.0;   // max over phases and nodes
  double energy_diff = 0.0;  // |J(oracle) - J(solver)|
  double oracle_energy = 0.0;
  double solver_energy = 0.0;
  double solver_residual = 0.0;
  long solver_iterations = 0;
};

// Runs the sweep to stagnation and the oracle on the same problem; agrees
// when both the states and the energies match within tol. A solver residual
// above 1e-12 at the iteration cap yields status "inconclusive", not a
// failure.
OracleComparison oracle_agrees(const ProblemSpec& problem, double tol);

// The fixed certification sweep: twelve seeded 1D instances, N in {2,4,6},
// m in {2,3}, one random phase owning each endpoint with a value in [0,1],
// constant dynamics with coefficient in {0,1,2}. The draw is hand-rolled so
// the instance set is identical on every platform.
std::vector<ProblemSpec> oracle_sweep_instances();

struct FirstOrderReport {
  // Max over occupied interior nodes of |L_h(hat w^l) - f_l(x, u^l)|.
  double max_equation_violation = 0.0;
  // Max over empty interior nodes of the positive part of
  // L_h(hat w^l) - f_l(x, 0).
  double max_inequality_violation = 0.0;
};

// First-order conditions of the constrained minimum, evaluated with the
// scheme-side f (right-sided at zero, where the distinction matters).
FirstOrderReport first_order_check(const MultiPhaseState& state,
                                   const std::vector<DynamicsSpec>& dynamics);

}  // namespace segsolve
