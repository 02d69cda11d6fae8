#pragma once

#include <cstdint>
#include <vector>

#include <json.hpp>

#include "segsolve/multiphase.hpp"
#include "segsolve/problem.hpp"

namespace segsolve {

struct SolveConfig {
  long max_iterations = 1;
  double residual_tol = 0.0;  // 0 disables early exit (fixed-budget runs)
  long audit_every = 0;       // 0 disables periodic audits
  bool record_energy = false;
  // In-place sweeps instead of the synchronous two-buffer update. Off by
  // default and kept off the validated path; the admissibility guarantees
  // are stated for the synchronous form.
  bool gauss_seidel = false;
  int threads = 0;  // 0: take SEGSOLVE_THREADS, else hardware
};

struct SolveReport {
  long iterations_run = 0;
  double final_residual = 0.0;
  bool early_exit = false;
  // Successive-iterate max norm per recorded sweep. Because the sweep is the
  // fixed-point map itself, delta_trace[k] equals the scheme residual of the
  // iterate before that sweep.
  std::vector<double> delta_trace;
  std::vector<double> energy_trace;  // filled when record_energy
  long trace_stride = 1;             // sweeps between recorded entries
  long audits_run = 0;
  long audits_passed = 0;
  bool stability_ok = true;  // a violation aborts, so reports carry true
  double wall_seconds = 0.0;

  nlohmann::json to_json() const;  // deterministic; excludes wall_seconds
};

// Zero interior, boundary data sampled from the problem. Rejects boundary
// data that is negative or has two phases positive at one node, naming the
// offending node.
MultiPhaseState initialize(const ProblemSpec& problem);

// One synchronous sweep: every new interior value is computed from the old
// state only, boundary rows stay fixed. The returned state is admissible
// whenever the input is (exact zeros carry the segregation).
MultiPhaseState iterate_step(const MultiPhaseState& state,
                             const std::vector<DynamicsSpec>& dynamics);

// Max over phases and nodes of |next - prev|. Shapes must match.
double successive_delta(const MultiPhaseState& prev,
                        const MultiPhaseState& next);

// Sweeps until the budget is exhausted or the scheme residual falls to
// residual_tol. Every iterate is checked against the stability bound
// 0 <= u^l <= max_boundary(phi^l) exactly; periodic audits run when
// audit_every > 0. An invariant breach or non-finite value aborts with
// NumericalError naming the sweep.
std::pair<MultiPhaseState, SolveReport> solve(const ProblemSpec& problem,
                                              const SolveConfig& config);

// Same driver starting from a caller-supplied admissible state.
std::pair<MultiPhaseState, SolveReport> solve_state(
    const MultiPhaseState& start, const std::vector<DynamicsSpec>& dynamics,
    const SolveConfig& config);

}  // namespace segsolve
