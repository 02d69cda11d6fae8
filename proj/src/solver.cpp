#include "segsolve/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <limits>
#include <sstream>

#include "segsolve/parallel.hpp"

namespace segsolve {

namespace {

std::string node_str(const UniformGrid& g, NodeIndex a) {
  std::ostringstream os;
  if (g.dim() == 1) {
    os << "(i=" << a.i << ")";
  } else {
    os << "(i=" << a.i << ", j=" << a.j << ")";
  }
  return os.str();
}

// Per-phase reaction term specialized for the sweep. The catalog kinds get a
// branch-free nodal form with the x-dependent factor precomputed, anything
// custom falls back to the std::function. Both paths round identically to
// DynamicsSpec::f_scheme, which scheme_residual uses; keeping them bitwise
// equal is what makes "stagnated iterate has zero residual" literally true.
struct SchemeTerm {
  enum class Kind { zero, constant, weighted_abs, weighted_sqrt, custom };
  Kind kind = Kind::zero;
  double coef = 0.0;
  std::vector<double> node_coef;  // coef * (x^2+y^2) per node, weighted kinds
  const DynamicsSpec* spec = nullptr;

  static SchemeTerm build(const DynamicsSpec& d, const UniformGrid& g) {
    SchemeTerm t;
    t.spec = &d;
    t.coef = d.coef;
    // Of the catalog builders only `constant` installs a scheme_f override,
    // so a non-constant catalog id carrying one means someone patched the
    // DynamicsSpec by hand; take the generic path rather than trust the label.
    if (d.scheme_f && d.id != "constant" && d.id != "custom") {
      t.kind = Kind::custom;
    } else if (d.id == "zero") {
      t.kind = Kind::zero;
    } else if (d.id == "constant") {
      t.kind = Kind::constant;
    } else if (d.id == "weighted_abs" || d.id == "weighted_sqrt") {
      t.kind = d.id == "weighted_abs" ? Kind::weighted_abs : Kind::weighted_sqrt;
      t.node_coef.resize(g.node_count());
      for (std::size_t f = 0; f < t.node_coef.size(); ++f) {
        const Point p = g.coords(g.unflat(f));
        t.node_coef[f] = d.coef * (p.x * p.x + p.y * p.y);
      }
    } else {
      t.kind = Kind::custom;
    }
    return t;
  }

  // f_scheme at node f for the (nonnegative) previous value s.
  double operator()(const UniformGrid& g, std::size_t f, double s) const {
    switch (kind) {
      case Kind::zero:
        return 0.0;
      case Kind::constant:
        return coef;  // right-sided value, also at s = 0
      case Kind::weighted_abs:
        return node_coef[f] * s;
      case Kind::weighted_sqrt:
        return node_coef[f] * std::sqrt(s);
      case Kind::custom:
        return spec->f_scheme(g.coords(g.unflat(f)), s);
    }
    return 0.0;
  }
};

struct SweepBuffers {
  std::vector<std::vector<double>> cur, nxt;
};

// Shared sweep core. Reads src, writes dst (disjoint), both sized m x nodes.
// Returns nothing; per-row maxima and breach markers land in the scratch
// arrays so the caller can reduce them deterministically.
struct SweepScratch {
  std::vector<double> row_delta;
  std::vector<std::size_t> row_breach_flat;  // SIZE_MAX = clean
  std::vector<int> row_breach_phase;

  void reset(std::size_t rows) {
    row_delta.assign(rows, 0.0);
    row_breach_flat.assign(rows, SIZE_MAX);
    row_breach_phase.assign(rows, 0);
  }
};

void sweep_rows(const UniformGrid& g, int m, const std::vector<SchemeTerm>& terms,
                double hh_over_k, const std::vector<double>& bounds,
                const std::vector<const double*>& src,
                const std::vector<double*>& dst, std::size_t row_begin,
                std::size_t row_end, SweepScratch& scratch) {
  const int n = g.n_per_side();
  const bool two_d = g.dim() == 2;
  const std::size_t stride = static_cast<std::size_t>(n) + 1;
  double avg[8];

  auto update_node = [&](std::size_t f, std::size_t r, double& local_delta) {
    if (two_d) {
      for (int l = 0; l < m; ++l) {
        const double* v = src[l];
        avg[l] = 0.25 * ((v[f - stride] + v[f + stride]) + (v[f - 1] + v[f + 1]));
      }
    } else {
      for (int l = 0; l < m; ++l) {
        const double* v = src[l];
        avg[l] = 0.5 * (v[f - 1] + v[f + 1]);
      }
    }
    double sum = avg[0];
    for (int l = 1; l < m; ++l) sum += avg[l];
    for (int l = 0; l < m; ++l) {
      const double w_old = src[l][f];
      const double load = terms[l](g, f, w_old) * hh_over_k;
      const double d = 2.0 * avg[l] - sum;
      const double e = d - load;
      const double nv = e > 0.0 ? e : 0.0;
      // Check e, not the clamped nv: a NaN reaction load would otherwise be
      // flushed to zero here and never surface. The two-sided test rejects
      // NaN and either infinity along with genuine bound violations.
      if (!(e <= bounds[l] && e >= std::numeric_limits<double>::lowest())) {
        if (scratch.row_breach_flat[r] == SIZE_MAX) {
          scratch.row_breach_flat[r] = f;
          scratch.row_breach_phase[r] = l + 1;
        }
      }
      dst[l][f] = nv;
      const double diff = std::abs(nv - w_old);
      if (diff > local_delta) local_delta = diff;
    }
  };

  for (std::size_t r = row_begin; r < row_end; ++r) {
    const std::size_t i = r + 1;  // interior row index
    double local_delta = 0.0;
    if (two_d) {
      for (std::size_t jo = 1; jo < static_cast<std::size_t>(n); ++jo) {
        update_node(i * stride + jo, r, local_delta);
      }
    } else {
      update_node(i, r, local_delta);
    }
    scratch.row_delta[r] = local_delta;
  }
}

struct Driver {
  const UniformGrid grid;
  int m;
  std::vector<DynamicsSpec> dynamics;
  std::vector<SchemeTerm> terms;
  std::vector<double> bounds;
  double hh_over_k;
  int threads;

  Driver(const UniformGrid& g, const std::vector<DynamicsSpec>& dyn, int thr)
      : grid(g), m(static_cast<int>(dyn.size())), dynamics(dyn),
        hh_over_k(g.h() * g.h() / static_cast<double>(g.neighbor_count())),
        threads(thr) {
    if (m > 8) {
      throw ProblemError("the sweep supports at most 8 phases, got " +
                         std::to_string(m));
    }
    terms.reserve(dynamics.size());
    for (const DynamicsSpec& d : dynamics) {
      terms.push_back(SchemeTerm::build(d, grid));
    }
  }

  // Largest phase value anywhere in the start state; new interior values can
  // never exceed it (averages of nonnegative numbers clipped from below).
  void compute_bounds(const SweepBuffers& buf) {
    bounds.assign(static_cast<std::size_t>(m), 0.0);
    for (int l = 0; l < m; ++l) {
      for (double v : buf.cur[static_cast<std::size_t>(l)]) {
        if (v > bounds[static_cast<std::size_t>(l)]) {
          bounds[static_cast<std::size_t>(l)] = v;
        }
      }
    }
  }

  double synchronous_sweep(SweepBuffers& buf, SweepScratch& scratch, long sweep_no) {
    const std::size_t rows = static_cast<std::size_t>(grid.n_per_side()) - 1;
    scratch.reset(rows);
    std::vector<const double*> src(static_cast<std::size_t>(m));
    std::vector<double*> dst(static_cast<std::size_t>(m));
    for (int l = 0; l < m; ++l) {
      src[static_cast<std::size_t>(l)] = buf.cur[static_cast<std::size_t>(l)].data();
      dst[static_cast<std::size_t>(l)] = buf.nxt[static_cast<std::size_t>(l)].data();
    }
    parallel_for(rows, threads, [&](std::size_t b, std::size_t e) {
      sweep_rows(grid, m, terms, hh_over_k, bounds, src, dst, b, e, scratch);
    });
    finish_sweep(scratch, sweep_no);
    buf.cur.swap(buf.nxt);
    double delta = 0.0;
    for (double d : scratch.row_delta) delta = std::max(delta, d);
    return delta;
  }

  double gauss_seidel_sweep(SweepBuffers& buf, SweepScratch& scratch, long sweep_no) {
    const std::size_t rows = static_cast<std::size_t>(grid.n_per_side()) - 1;
    scratch.reset(rows);
    std::vector<const double*> src(static_cast<std::size_t>(m));
    std::vector<double*> dst(static_cast<std::size_t>(m));
    for (int l = 0; l < m; ++l) {
      src[static_cast<std::size_t>(l)] = buf.cur[static_cast<std::size_t>(l)].data();
      dst[static_cast<std::size_t>(l)] = buf.cur[static_cast<std::size_t>(l)].data();
    }
    sweep_rows(grid, m, terms, hh_over_k, bounds, src, dst, 0, rows, scratch);
    finish_sweep(scratch, sweep_no);
    double delta = 0.0;
    for (double d : scratch.row_delta) delta = std::max(delta, d);
    return delta;
  }

  void finish_sweep(const SweepScratch& scratch, long sweep_no) const {
    for (std::size_t r = 0; r < scratch.row_breach_flat.size(); ++r) {
      if (scratch.row_breach_flat[r] != SIZE_MAX) {
        const NodeIndex a = grid.unflat(scratch.row_breach_flat[r]);
        throw NumericalError(
            "stability bound violated at sweep " + std::to_string(sweep_no) +
            ", phase " + std::to_string(scratch.row_breach_phase[r]) +
            ", node " + node_str(grid, a) +
            " (non-finite value or iterate above its boundary maximum)");
      }
    }
  }
};

SweepBuffers buffers_from_state(const MultiPhaseState& s) {
  SweepBuffers buf;
  const int m = s.num_phases();
  buf.cur.reserve(static_cast<std::size_t>(m));
  buf.nxt.reserve(static_cast<std::size_t>(m));
  for (int l = 1; l <= m; ++l) {
    buf.cur.push_back(s.phase(l).values());
    buf.nxt.push_back(s.phase(l).values());
  }
  return buf;
}

void state_from_buffers(const SweepBuffers& buf, MultiPhaseState& s) {
  for (int l = 1; l <= s.num_phases(); ++l) {
    s.phase(l).values() = buf.cur[static_cast<std::size_t>(l - 1)];
  }
}

void check_config(const SolveConfig& c) {
  if (c.max_iterations < 1) {
    throw ProblemError("max_iterations must be >= 1, got " +
                       std::to_string(c.max_iterations));
  }
  if (!(c.residual_tol >= 0.0)) {
    throw ProblemError("residual_tol must be finite and >= 0");
  }
  if (c.audit_every < 0) {
    throw ProblemError("audit_every must be >= 0, got " +
                       std::to_string(c.audit_every));
  }
}

}  // namespace

MultiPhaseState initialize(const ProblemSpec& problem) {
  check_problem(problem);
  const UniformGrid grid = problem.make_grid();
  MultiPhaseState state(grid, problem.m);
  for (std::size_t f = 0; f < grid.node_count(); ++f) {
    const NodeIndex a = grid.unflat(f);
    if (grid.is_interior(a)) continue;
    int positive_phases = 0, first_positive = 0;
    for (int l = 1; l <= problem.m; ++l) {
      const double v = eval_boundary(problem, l, grid, a);
      if (!std::isfinite(v)) {
        throw ProblemError("boundary datum of phase " + std::to_string(l) +
                           " is not finite at node " + node_str(grid, a));
      }
      if (v < 0.0) {
        throw ProblemError("boundary datum of phase " + std::to_string(l) +
                           " is negative (" + format_double(v) + ") at node " +
                           node_str(grid, a));
      }
      if (v > 0.0) {
        ++positive_phases;
        if (first_positive == 0) first_positive = l;
      }
      state.phase(l)[f] = v;
      state.boundary(l)[f] = v;
    }
    if (positive_phases > 1) {
      throw ProblemError(
          "boundary data overlap at node " + node_str(grid, a) + ": phases " +
          std::to_string(first_positive) + " and another are both positive");
    }
  }
  return state;
}

MultiPhaseState iterate_step(const MultiPhaseState& state,
                             const std::vector<DynamicsSpec>& dynamics) {
  if (static_cast<int>(dynamics.size()) != state.num_phases()) {
    throw ProblemError("iterate_step: expected " +
                       std::to_string(state.num_phases()) + " dynamics, got " +
                       std::to_string(dynamics.size()));
  }
  Driver driver(state.grid(), dynamics, 1);
  SweepBuffers buf = buffers_from_state(state);
  driver.compute_bounds(buf);
  SweepScratch scratch;
  driver.synchronous_sweep(buf, scratch, 1);
  MultiPhaseState next = state;
  state_from_buffers(buf, next);
  return next;
}

double successive_delta(const MultiPhaseState& prev, const MultiPhaseState& next) {
  if (!(prev.grid() == next.grid()) || prev.num_phases() != next.num_phases()) {
    throw ContractError("successive_delta: states have different shapes");
  }
  double delta = 0.0;
  for (int l = 1; l <= prev.num_phases(); ++l) {
    const auto& a = prev.phase(l).values();
    const auto& b = next.phase(l).values();
    for (std::size_t f = 0; f < a.size(); ++f) {
      delta = std::max(delta, std::abs(a[f] - b[f]));
    }
  }
  return delta;
}

std::pair<MultiPhaseState, SolveReport> solve_state(
    const MultiPhaseState& start, const std::vector<DynamicsSpec>& dynamics,
    const SolveConfig& config) {
  check_config(config);
  if (static_cast<int>(dynamics.size()) != start.num_phases()) {
    throw ProblemError("solve_state: expected " +
                       std::to_string(start.num_phases()) + " dynamics, got " +
                       std::to_string(dynamics.size()));
  }
  {
    const auto bad = audit(start);
    if (!bad.empty()) {
      throw ProblemError("start state is not admissible: " + bad.front().kind +
                         " at node " + node_str(start.grid(), bad.front().node) +
                         " (" + bad.front().detail + ")");
    }
  }

  const auto t0 = std::chrono::steady_clock::now();
  Driver driver(start.grid(), dynamics, resolve_threads(config.threads));
  SweepBuffers buf = buffers_from_state(start);
  driver.compute_bounds(buf);
  SweepScratch scratch;

  SolveReport report;
  report.trace_stride = std::max<long>(1, config.max_iterations / 1024);

  MultiPhaseState work = start;
  long last_audit = -1;
  auto materialize = [&]() { state_from_buffers(buf, work); };
  auto run_audit = [&](long k) {
    materialize();
    const auto bad = audit(work);
    ++report.audits_run;
    if (!bad.empty()) {
      throw NumericalError("invariant audit failed at sweep " +
                           std::to_string(k) + ": " + bad.front().kind +
                           " at node " +
                           node_str(start.grid(), bad.front().node) + " (" +
                           bad.front().detail + ")");
    }
    ++report.audits_passed;
    last_audit = k;
  };

  double final_residual = -1.0;
  for (long k = 1; k <= config.max_iterations; ++k) {
    const double delta =
        config.gauss_seidel ? driver.gauss_seidel_sweep(buf, scratch, k)
                            : driver.synchronous_sweep(buf, scratch, k);
    report.iterations_run = k;
    if ((k - 1) % report.trace_stride == 0) {
      report.delta_trace.push_back(delta);
      if (config.record_energy) {
        materialize();
        report.energy_trace.push_back(energy(work, dynamics));
      }
    }
    if (config.audit_every > 0 && k % config.audit_every == 0) {
      run_audit(k);
    }
    if (config.residual_tol > 0.0 && delta <= config.residual_tol) {
      // The next sweep's delta is exactly the scheme residual of the current
      // iterate, so confirm stagnation directly before stopping.
      materialize();
      const SchemeResidual res = scheme_residual(work, dynamics);
      if (res.value <= config.residual_tol) {
        report.early_exit = true;
        final_residual = res.value;
        break;
      }
    }
  }

  if (config.audit_every > 0 && last_audit != report.iterations_run) {
    run_audit(report.iterations_run);
  }
  materialize();
  if (final_residual < 0.0) {
    final_residual = scheme_residual(work, dynamics).value;
  }
  report.final_residual = final_residual;
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return {work, report};
}

std::pair<MultiPhaseState, SolveReport> solve(const ProblemSpec& problem,
                                              const SolveConfig& config) {
  for (int l = 1; l <= static_cast<int>(problem.dynamics.size()); ++l) {
    if (!problem.dynamics[l - 1].declared_nonneg) {
      throw ProblemError("phase " + std::to_string(l) +
                         " dynamics is not declared nonnegative; the sweep "
                         "requires f >= 0 on s >= 0");
    }
  }
  return solve_state(initialize(problem), problem.dynamics, config);
}

nlohmann::json SolveReport::to_json() const {
  nlohmann::json j;
  j["iterations_run"] = iterations_run;
  j["final_residual"] = final_residual;
  j["early_exit"] = early_exit;
  j["trace_stride"] = trace_stride;
  j["delta_trace"] = delta_trace;
  j["energy_trace"] = energy_trace;
  j["audits_run"] = audits_run;
  j["audits_passed"] = audits_passed;
  j["stability_ok"] = stability_ok;
  return j;
}

}  // namespace segsolve
