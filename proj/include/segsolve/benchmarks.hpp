#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "segsolve/multiphase.hpp"
#include "segsolve/problem.hpp"

namespace segsolve {

// Shipped problems. example2 carries the exact solution; the other two are
// pinned by regression data generated by this repository itself.
ProblemSpec example1();  // m=2, weighted_abs dynamics, default N=50
ProblemSpec example2();  // m=3, constant dynamics, exact solution, N=40
ProblemSpec example3();  // m=3, weighted_sqrt dynamics, same boundary, N=80

// Registry lookup by name ("example1".."example3"); ProblemError otherwise.
ProblemSpec registry_problem(const std::string& name);
std::vector<std::string> registry_names();

struct ErrorRecord {
  int n = 0;
  long m_iters = 0;
  double r = 0.0;  // max over all nodes of |w_exact - w_computed|
};

// Runs the sweep with a fixed budget of m_iters and measures the max-norm
// error between the summed exact densities and the summed computed ones.
ErrorRecord error_R(const ProblemSpec& problem, int n, long m_iters);

struct BenchmarkTable {
  std::vector<int> n_list;
  std::vector<long> m_factors;  // budgets are factor * N
  std::vector<std::vector<double>> values;  // [factor][n]
  std::string text() const;  // fixed width, rows = budget rule, cols = N
  nlohmann::json to_json() const;
};

// Error table over a grid of resolutions and budget rules M = factor * N.
BenchmarkTable make_table(const ProblemSpec& problem,
                          const std::vector<int>& n_list,
                          const std::vector<long>& m_factors);

// Count of interior nodes where every phase is exactly zero.
long zero_set_count(const MultiPhaseState& state);

}  // namespace segsolve
