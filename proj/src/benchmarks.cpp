#include "segsolve/benchmarks.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "segsolve/solver.hpp"

namespace segsolve {

ProblemSpec example1() {
  ProblemSpec p;
  p.name = "example1";
  p.dim = 2;
  p.n = 50;
  p.m = 2;
  p.boundary = {{"ex1_phi1", {}}, {"ex1_phi2", {}}};
  p.dynamics = {builtin_weighted_abs(2.0), builtin_weighted_abs(10.0)};
  return p;
}

ProblemSpec example2() {
  ProblemSpec p;
  p.name = "example2";
  p.dim = 2;
  p.n = 40;
  p.m = 3;
  p.boundary = {{"ex2_phi1", {}}, {"ex2_phi2", {}}, {"ex2_phi3", {}}};
  p.dynamics = {builtin_constant(2.0), builtin_constant(2.0),
                builtin_constant(8.0)};
  p.exact_preset = "example2";
  return p;
}

ProblemSpec example3() {
  ProblemSpec p;
  p.name = "example3";
  p.dim = 2;
  p.n = 80;
  p.m = 3;
  p.boundary = {{"ex2_phi1", {}}, {"ex2_phi2", {}}, {"ex2_phi3", {}}};
  p.dynamics = {builtin_weighted_sqrt(10.0), builtin_weighted_sqrt(10.0),
                builtin_weighted_sqrt(40.0)};
  return p;
}

ProblemSpec registry_problem(const std::string& name) {
  if (name == "example1") return example1();
  if (name == "example2") return example2();
  if (name == "example3") return example3();
  std::ostringstream os;
  os << "unknown problem '" << name << "'; registry has";
  for (const std::string& n : registry_names()) os << " " << n;
  throw ProblemError(os.str());
}

std::vector<std::string> registry_names() {
  return {"example1", "example2", "example3"};
}

ErrorRecord error_R(const ProblemSpec& problem, int n, long m_iters) {
  const ProblemSpec p = problem.with_n(n);
  if (!p.has_exact()) {
    throw ProblemError("error_R needs a problem with an exact solution");
  }
  SolveConfig cfg;
  cfg.max_iterations = m_iters;
  auto [state, report] = solve(p, cfg);
  const UniformGrid g = state.grid();
  ErrorRecord rec;
  rec.n = n;
  rec.m_iters = m_iters;
  for (std::size_t f = 0; f < g.node_count(); ++f) {
    const Point x = g.coords(g.unflat(f));
    double w_exact = 0.0, w_computed = 0.0;
    for (int l = 1; l <= p.m; ++l) {
      w_exact += eval_exact(p, l, x);
      w_computed += state.phase(l)[f];
    }
    rec.r = std::max(rec.r, std::abs(w_exact - w_computed));
  }
  return rec;
}

BenchmarkTable make_table(const ProblemSpec& problem,
                          const std::vector<int>& n_list,
                          const std::vector<long>& m_factors) {
  if (n_list.empty() || m_factors.empty()) {
    throw ProblemError("error table needs at least one N and one budget rule");
  }
  BenchmarkTable table;
  table.n_list = n_list;
  table.m_factors = m_factors;
  table.values.assign(m_factors.size(), std::vector<double>(n_list.size(), 0.0));
  for (std::size_t row = 0; row < m_factors.size(); ++row) {
    for (std::size_t col = 0; col < n_list.size(); ++col) {
      table.values[row][col] =
          error_R(problem, n_list[col], m_factors[row] * n_list[col]).r;
    }
  }
  return table;
}

std::string BenchmarkTable::text() const {
  std::ostringstream os;
  char buf[64];
  os << "            ";
  for (int n : n_list) {
    std::snprintf(buf, sizeof(buf), "%12s", ("N=" + std::to_string(n)).c_str());
    os << buf;
  }
  os << "\n";
  for (std::size_t row = 0; row < m_factors.size(); ++row) {
    std::snprintf(buf, sizeof(buf), "R_{N,%ldN}", m_factors[row]);
    std::string label = buf;
    std::snprintf(buf, sizeof(buf), "%-12s", label.c_str());
    os << buf;
    for (std::size_t col = 0; col < n_list.size(); ++col) {
      std::snprintf(buf, sizeof(buf), "%12.2e", values[row][col]);
      os << buf;
    }
    os << "\n";
  }
  return os.str();
}

nlohmann::json BenchmarkTable::to_json() const {
  nlohmann::json j;
  j["n_list"] = n_list;
  j["m_factors"] = m_factors;
  j["values"] = values;
  return j;
}

long zero_set_count(const MultiPhaseState& state) {
  const UniformGrid& g = state.grid();
  long count = 0;
  for (std::size_t f = 0; f < g.node_count(); ++f) {
    if (!g.is_interior(g.unflat(f))) continue;
    bool all_zero = true;
    for (int l = 1; l <= state.num_phases(); ++l) {
      if (state.phase(l)[f] != 0.0) {
        all_zero = false;
        break;
      }
    }
    if (all_zero) ++count;
  }
  return count;
}

}  // namespace segsolve
