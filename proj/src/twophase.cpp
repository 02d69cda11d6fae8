#include "segsolve/twophase.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace segsolve {

namespace {

// Counter-based splitmix64: trial t gets its own stream, so the probe's
// verdict does not depend on how trials are ordered or batched.
struct TrialRng {
  std::uint64_t state;
  explicit TrialRng(std::uint64_t seed, std::uint64_t trial)
      : state(seed + (trial + 1) * 0x9E3779B97F4A7C15ull) {}
  std::uint64_t next_u64() {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
};

}  // namespace

TwoPhaseProblem make_twophase(const UniformGrid& grid,
                              const std::function<double(Point)>& g,
                              DynamicsSpec f1, DynamicsSpec f2,
                              std::string name) {
  if (!g) throw ContractError("make_twophase needs a boundary evaluator");
  if (!f1.declared_monotone || !f2.declared_monotone) {
    throw ProblemError(
        "two-phase dynamics must be monotone for the min-max form; run the "
        "monotonicity probe on anything undeclared");
  }
  TwoPhaseProblem p{grid, GridFunction(grid), std::move(f1), std::move(f2),
                    std::move(name)};
  for (std::size_t f = 0; f < p.g.size(); ++f) {
    const NodeIndex a = grid.unflat(f);
    if (!grid.is_interior(a)) p.g[f] = g(grid.coords(a));
  }
  return p;
}

double minmax_G(const DynamicsSpec& f1, const DynamicsSpec& f2, Point x,
                double r, double lap, Point) {
  const double upper = -lap + f1.f(x, r);
  const double lower = std::max(-lap - f2.f(x, -r), r);
  return std::min(upper, lower);
}

double discrete_residual(const TwoPhaseProblem& problem, const GridFunction& u) {
  const UniformGrid& g = problem.grid;
  if (!(u.grid() == g)) {
    throw ProblemError("discrete_residual: field lives on a different grid");
  }
  double worst = 0.0;
  for (std::size_t f = 0; f < u.size(); ++f) {
    const NodeIndex a = g.unflat(f);
    if (!g.is_interior(a)) {
      if (u[f] != problem.g[f]) {
        std::ostringstream os;
        os << "discrete_residual: field detaches from g at boundary node (i="
           << a.i;
        if (g.dim() == 2) os << ", j=" << a.j;
        os << "): " << format_double(u[f]) << " vs "
           << format_double(problem.g[f]);
        throw ProblemError(os.str());
      }
      continue;
    }
    const double lap = laplacian(u, a);
    const double G = minmax_G(problem.f1, problem.f2, g.coords(a), u[f], lap);
    worst = std::max(worst, std::abs(G));
  }
  return worst;
}

namespace {

// The node equation as a function of the node value r and the K outgoing
// differences d_j = u_a - u_nbr_j, so that -L_h u = (sum_j d_j)/h^2.
double node_form(const TwoPhaseProblem& p, Point x, double r,
                 const double* d, int k) {
  double sum = d[0];
  for (int j = 1; j < k; ++j) sum += d[j];
  const double neg_lap = sum / (p.grid.h() * p.grid.h());
  const double upper = neg_lap + p.f1.f(x, r);
  const double lower = std::max(neg_lap - p.f2.f(x, -r), r);
  return std::min(upper, lower);
}

}  // namespace

ProbeReport monotonicity_probe(const TwoPhaseProblem& problem, long trials,
                               std::uint64_t seed) {
  if (trials < 1) throw ContractError("monotonicity probe needs trials >= 1");
  const int k = problem.grid.neighbor_count();
  ProbeReport report;
  report.trials = trials;
  for (long t = 0; t < trials; ++t) {
    TrialRng rng(seed, static_cast<std::uint64_t>(t));
    Point x;
    x.x = rng.uniform(-1.0, 1.0);
    x.y = problem.grid.dim() == 2 ? rng.uniform(-1.0, 1.0) : 0.0;
    double d[4] = {0, 0, 0, 0};
    const double r = rng.uniform(-3.0, 3.0);
    for (int j = 0; j < k; ++j) d[j] = rng.uniform(-3.0, 3.0);
    const double step = rng.uniform(1e-6, 1.0);

    const double base = node_form(problem, x, r, d, k);
    const double bumped_r = node_form(problem, x, r + step, d, k);
    if (bumped_r < base) {
      report.violations.push_back(
          {"value", 0, r, step, base, bumped_r, static_cast<std::uint64_t>(t)});
    }
    for (int j = 0; j < k; ++j) {
      const double keep = d[j];
      d[j] = keep + step;
      const double bumped_d = node_form(problem, x, r, d, k);
      d[j] = keep;
      if (bumped_d < base) {
        report.violations.push_back({"difference", j + 1, r, step, base,
                                     bumped_d, static_cast<std::uint64_t>(t)});
      }
    }
  }
  return report;
}

std::string ProbeReport::text() const {
  std::ostringstream os;
  os << "monotonicity probe: " << trials << " trials, " << violations.size()
     << " violation" << (violations.size() == 1 ? "" : "s") << "\n";
  for (const ProbeViolation& v : violations) {
    os << "  trial " << v.trial << " " << v.kind;
    if (v.kind == "difference") os << " slot " << v.slot;
    os << ": F fell from " << format_double(v.before) << " to "
       << format_double(v.after) << " when increasing by "
       << format_double(v.delta) << " at r = " << format_double(v.base_r)
       << "\n";
  }
  return os.str();
}

nlohmann::json ProbeReport::to_json() const {
  nlohmann::json j;
  j["trials"] = trials;
  j["violations"] = nlohmann::json::array();
  for (const ProbeViolation& v : violations) {
    nlohmann::json e;
    e["kind"] = v.kind;
    e["slot"] = v.slot;
    e["base_r"] = v.base_r;
    e["delta"] = v.delta;
    e["before"] = v.before;
    e["after"] = v.after;
    e["trial"] = v.trial;
    j["violations"].push_back(e);
  }
  j["ok"] = ok();
  return j;
}

std::pair<GridFunction, SolveReport> solve_twophase(
    const TwoPhaseProblem& problem, const SolveConfig& config) {
  const UniformGrid& grid = problem.grid;
  MultiPhaseState state(grid, 2);
  for (std::size_t f = 0; f < problem.g.size(); ++f) {
    const NodeIndex a = grid.unflat(f);
    if (grid.is_interior(a)) continue;
    const double gv = problem.g[f];
    if (!std::isfinite(gv)) {
      throw ProblemError("two-phase boundary datum is not finite");
    }
    const double pos = gv > 0.0 ? gv : 0.0;
    const double neg = gv < 0.0 ? -gv : 0.0;
    state.phase(1)[f] = pos;
    state.boundary(1)[f] = pos;
    state.phase(2)[f] = neg;
    state.boundary(2)[f] = neg;
  }
  auto [solved, report] = solve_state(state, {problem.f1, problem.f2}, config);
  GridFunction w(grid);
  for (std::size_t f = 0; f < w.size(); ++f) {
    w[f] = solved.phase(1)[f] - solved.phase(2)[f];
  }
  return {std::move(w), std::move(report)};
}

ConvergenceTable refinement_study(
    const ProblemSpec& problem, const std::vector<int>& n_list,
    const std::function<SolveConfig(int)>& config_rule) {
  if (n_list.size() < 3) {
    throw ProblemError("refinement study needs at least three resolutions");
  }
  for (std::size_t k = 1; k < n_list.size(); ++k) {
    if (n_list[k] <= n_list[k - 1]) {
      throw ProblemError("refinement resolutions must be strictly ascending");
    }
  }
  const int finest = n_list.back();
  for (int n : n_list) {
    if (finest % n != 0) {
      throw ProblemError("grids do not nest: " + std::to_string(n) +
                         " does not divide " + std::to_string(finest));
    }
  }
  if (!config_rule) throw ContractError("refinement study needs a config rule");

  ConvergenceTable table;
  std::vector<MultiPhaseState> solutions;
  solutions.reserve(n_list.size());
  for (int n : n_list) {
    const ProblemSpec p = problem.with_n(n);
    solutions.push_back(solve(p, config_rule(n)).first);
  }

  auto push_row = [&table](int n, double err) {
    ConvergenceRow row;
    row.n = n;
    row.error = err;
    if (!table.rows.empty()) {
      const double prev = table.rows.back().error;
      if (prev > 0.0 && err > 0.0 && std::isfinite(prev) && std::isfinite(err)) {
        row.ratio_log2 = std::log2(prev / err);
        row.has_ratio = true;
      }
    }
    table.rows.push_back(row);
  };

  if (problem.has_exact()) {
    table.reference = "exact";
    for (std::size_t k = 0; k < n_list.size(); ++k) {
      const MultiPhaseState& s = solutions[k];
      const UniformGrid g = s.grid();
      const ProblemSpec p = problem.with_n(n_list[k]);
      double err = 0.0;
      for (int l = 1; l <= p.m; ++l) {
        for (std::size_t f = 0; f < g.node_count(); ++f) {
          const Point x = g.coords(g.unflat(f));
          err = std::max(err, std::abs(eval_exact(p, l, x) - s.phase(l)[f]));
        }
      }
      push_row(n_list[k], err);
    }
  } else {
    table.reference = "finest grid N=" + std::to_string(finest);
    const MultiPhaseState& fine = solutions.back();
    const UniformGrid fg = fine.grid();
    for (std::size_t k = 0; k + 1 < n_list.size(); ++k) {
      const MultiPhaseState& s = solutions[k];
      const UniformGrid g = s.grid();
      const int ratio = finest / n_list[k];
      double err = 0.0;
      for (std::size_t f = 0; f < g.node_count(); ++f) {
        const NodeIndex a = g.unflat(f);
        const NodeIndex fa{a.i * ratio, a.j * ratio};
        for (int l = 1; l <= problem.m; ++l) {
          err = std::max(err,
                         std::abs(s.phase(l)[f] - fine.phase(l)[fg.flat(fa)]));
        }
      }
      push_row(n_list[k], err);
    }
  }
  return table;
}

std::string ConvergenceTable::text() const {
  std::ostringstream os;
  os << "reference: " << reference << "\n";
  char buf[64];
  os << "     N        error  log2 ratio\n";
  for (const ConvergenceRow& row : rows) {
    std::snprintf(buf, sizeof(buf), "%6d %12.4e", row.n, row.error);
    os << buf;
    if (row.has_ratio) {
      std::snprintf(buf, sizeof(buf), "  %10.2f", row.ratio_log2);
      os << buf;
    } else {
      os << "          --";
    }
    os << "\n";
  }
  return os.str();
}

nlohmann::json ConvergenceTable::to_json() const {
  nlohmann::json j;
  j["reference"] = reference;
  j["rows"] = nlohmann::json::array();
  for (const ConvergenceRow& row : rows) {
    nlohmann::json e;
    e["n"] = row.n;
    e["error"] = row.error;
    if (row.has_ratio) {
      e["ratio_log2"] = row.ratio_log2;
    } else {
      e["ratio_log2"] = nullptr;
    }
    j["rows"].push_back(e);
  }
  return j;
}

}  // namespace segsolve
