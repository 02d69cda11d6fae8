#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "segsolve/benchmarks.hpp"
#include "segsolve/oracle.hpp"
#include "segsolve/solver.hpp"
#include "segsolve/twophase.hpp"

namespace {

using namespace segsolve;
namespace fs = std::filesystem;

struct CommonOpts {
  std::string problem;
  std::string config;
  std::string out = ".";
  int n = 0;  // 0 = problem default
  long iters = 0;  // 0 = 40*N
  double tol = 0.0;
  long audit_every = 0;
  bool record_energy = false;
  bool gauss_seidel = false;
  int threads = 0;
  bool full = false;
  long trials = 10000;
  std::uint64_t seed = 1;
  std::vector<int> n_list;
  bool inject_broken = false;
};

void add_problem_opts(CLI::App* cmd, CommonOpts& o) {
  auto* p = cmd->add_option("--problem", o.problem,
                            "registry problem name (example1..example3)");
  auto* c = cmd->add_option("--config", o.config, "problem config JSON file");
  p->excludes(c);
  c->excludes(p);
}

ProblemSpec resolve_problem(const CommonOpts& o) {
  if (o.problem.empty() == o.config.empty()) {
    throw ProblemError("choose exactly one of --problem or --config");
  }
  ProblemSpec p = o.problem.empty() ? load_problem(o.config)
                                    : registry_problem(o.problem);
  if (o.n > 0) p = p.with_n(o.n);
  check_problem(p);
  return p;
}

fs::path prepare_out(const CommonOpts& o) {
  fs::path dir(o.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec && !fs::is_directory(dir)) {
    throw IoError("cannot create output directory " + dir.string() + ": " +
                  ec.message());
  }
  return dir;
}

void write_text(const fs::path& path, const std::string& body) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << body;
  out.flush();
  if (!out) throw IoError("write failed for " + path.string());
}

void write_json(const fs::path& path, const nlohmann::json& j) {
  write_text(path, j.dump(2) + "\n");
}

// Wall time and timestamps live here so every other artifact is byte-stable
// across reruns.
void write_meta(const fs::path& dir, double wall_seconds) {
  nlohmann::json meta;
  meta["wall_seconds"] = wall_seconds;
  const std::time_t now = std::time(nullptr);
  char stamp[32];
  std::tm tm_utc{};
  gmtime_r(&now, &tm_utc);
  std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  meta["written_at"] = stamp;
  write_json(dir / "meta.json", meta);
}

SolveConfig make_config(const CommonOpts& o, int n) {
  SolveConfig cfg;
  cfg.max_iterations = o.iters > 0 ? o.iters : 40L * n;
  cfg.residual_tol = o.tol;
  cfg.audit_every = o.audit_every;
  cfg.record_energy = o.record_energy;
  cfg.gauss_seidel = o.gauss_seidel;
  cfg.threads = o.threads;
  return cfg;
}

int cmd_solve(const CommonOpts& o) {
  const ProblemSpec p = resolve_problem(o);
  const fs::path dir = prepare_out(o);
  const SolveConfig cfg = make_config(o, p.n);
  auto [state, report] = solve(p, cfg);

  const UniformGrid g = state.grid();
  GridFunction w(g);
  for (int l = 1; l <= p.m; ++l) {
    write_csv(state.phase(l), (dir / ("u_" + std::to_string(l) + ".csv")).string());
    for (std::size_t f = 0; f < w.size(); ++f) w[f] += state.phase(l)[f];
  }
  write_csv(w, (dir / "w.csv").string());

  nlohmann::json j;
  j["problem"] = p.name;
  j["n"] = p.n;
  j["m"] = p.m;
  j["max_iterations"] = cfg.max_iterations;
  j["residual_tol"] = cfg.residual_tol;
  j["report"] = report.to_json();
  write_json(dir / "report.json", j);
  write_meta(dir, report.wall_seconds);
  std::cout << "solved " << p.name << " at N=" << p.n << ": "
            << report.iterations_run << " sweeps, final residual "
            << format_double(report.final_residual) << "\n";
  return 0;
}

int cmd_table(const CommonOpts& o) {
  const auto t0 = std::chrono::steady_clock::now();
  const ProblemSpec p = resolve_problem(o);
  if (!p.has_exact()) {
    throw ProblemError("problem '" + p.name +
                       "' has no exact solution; the error table needs one");
  }
  const fs::path dir = prepare_out(o);
  std::vector<int> n_list = o.n_list;
  if (n_list.empty()) {
    n_list = o.full ? std::vector<int>{10, 20, 40, 80, 160, 320}
                    : std::vector<int>{10, 20, 40, 80};
  }
  const std::vector<long> m_factors = {5, 10, 20, 40, 80, 160};
  const BenchmarkTable table = make_table(p, n_list, m_factors);
  write_text(dir / "table.txt", table.text());
  write_json(dir / "table.json", table.to_json());
  write_meta(dir, std::chrono::duration<double>(
                      std::chrono::steady_clock::now() - t0)
                      .count());
  std::cout << table.text();
  return 0;
}

TwoPhaseProblem twophase_from(const ProblemSpec& p) {
  if (p.m != 2) {
    throw ProblemError("the probe needs a two-phase problem, got m = " +
                       std::to_string(p.m));
  }
  const MultiPhaseState init = initialize(p);
  const UniformGrid g = init.grid();
  TwoPhaseProblem tp{g, GridFunction(g), p.dynamics[0], p.dynamics[1], p.name};
  for (std::size_t f = 0; f < tp.g.size(); ++f) {
    if (!g.is_interior(g.unflat(f))) {
      tp.g[f] = init.boundary(1)[f] - init.boundary(2)[f];
    }
  }
  return tp;
}

int cmd_probe(const CommonOpts& o) {
  const auto t0 = std::chrono::steady_clock::now();
  const ProblemSpec p = resolve_problem(o);
  const fs::path dir = prepare_out(o);
  const TwoPhaseProblem tp = twophase_from(p);
  const ProbeReport report = monotonicity_probe(tp, o.trials, o.seed);
  write_text(dir / "probe.txt", report.text());
  write_json(dir / "probe.json", report.to_json());
  write_meta(dir, std::chrono::duration<double>(
                      std::chrono::steady_clock::now() - t0)
                      .count());
  std::cout << report.text();
  return report.ok() ? 0 : 4;
}

int cmd_refine(const CommonOpts& o) {
  const auto t0 = std::chrono::steady_clock::now();
  const ProblemSpec p = resolve_problem(o);
  const fs::path dir = prepare_out(o);
  std::vector<int> n_list = o.n_list;
  if (n_list.empty()) n_list = {10, 20, 40};
  const ConvergenceTable table =
      refinement_study(p, n_list, [&o](int n) {
        CommonOpts local = o;
        if (local.iters == 0) {
          // Default to a stagnation-scale budget with an early exit.
          local.iters = 8L * n * n;
          if (local.tol == 0.0) local.tol = 1e-12;
        }
        return make_config(local, n);
      });
  write_text(dir / "refine.txt", table.text());
  write_json(dir / "refine.json", table.to_json());
  write_meta(dir, std::chrono::duration<double>(
                      std::chrono::steady_clock::now() - t0)
                      .count());
  std::cout << table.text();
  return 0;
}

int cmd_validate(const CommonOpts& o) {
  const auto t0 = std::chrono::steady_clock::now();
  const fs::path dir = prepare_out(o);
  nlohmann::json j;
  bool passed = true;

  // Catalog dynamics against their declared laws.
  const UniformGrid lattice(2, 19);
  const std::vector<double> samples = {-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0};
  j["dynamics"] = nlohmann::json::array();
  for (const DynamicsSpec& d :
       {builtin_zero(), builtin_constant(1.0), builtin_weighted_abs(3.0),
        builtin_weighted_sqrt(5.0)}) {
    const DynamicsReport rep = validate(d, lattice, samples);
    nlohmann::json e;
    e["id"] = d.id;
    e["violations"] = rep.violations.size();
    j["dynamics"].push_back(e);
    passed = passed && rep.ok();
  }

  // The monotone two-phase operator must never be caught decreasing.
  {
    const TwoPhaseProblem tp = twophase_from(example1().with_n(20));
    const ProbeReport rep = monotonicity_probe(tp, o.trials, o.seed);
    j["probe"] = rep.to_json();
    passed = passed && rep.ok();
  }

  // Self-test: the probe must catch a deliberately non-monotone dynamic.
  // With --inject-broken the broken pair joins the real suite instead, so
  // the command demonstrably fails with a witness.
  {
    DynamicsSpec falling;
    falling.id = "custom";
    falling.eval_f = [](Point, double s) { return -s; };
    falling.eval_F = [](Point, double s) { return -0.5 * s * s; };
    const UniformGrid g(2, 8);
    TwoPhaseProblem broken{g, GridFunction(g), falling, falling, "broken"};
    const ProbeReport rep = monotonicity_probe(broken, 200, o.seed);
    if (o.inject_broken) {
      j["probe_injected"] = rep.to_json();
      passed = passed && rep.ok();
    } else {
      j["probe_selftest"] = {{"violations_found", !rep.ok()}};
      passed = passed && !rep.ok();
    }
  }

  // Certification sweep: brute-force oracle against the solver.
  j["oracle"] = nlohmann::json::array();
  for (const ProblemSpec& p : oracle_sweep_instances()) {
    const OracleComparison cmp = oracle_agrees(p, 1e-7);
    nlohmann::json e;
    e["name"] = p.name;
    e["status"] = cmp.status;
    e["agrees"] = cmp.agrees;
    e["state_diff"] = cmp.state_diff;
    e["energy_diff"] = cmp.energy_diff;
    j["oracle"].push_back(e);
    passed = passed && cmp.agrees && cmp.energy_diff <= 1e-9;
  }

  j["passed"] = passed;
  write_json(dir / "validate.json", j);
  write_meta(dir, std::chrono::duration<double>(
                      std::chrono::steady_clock::now() - t0)
                      .count());
  std::cout << "validation " << (passed ? "passed" : "FAILED")
            << "; details in " << (dir / "validate.json").string() << "\n";
  return passed ? 0 : 4;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite-difference solver for segregating reaction-diffusion systems"};
  app.require_subcommand(1);
  CommonOpts o;

  CLI::App* solve_cmd = app.add_subcommand("solve", "run the sweep and write fields");
  add_problem_opts(solve_cmd, o);
  solve_cmd->add_option("--n", o.n, "override grid resolution N");
  solve_cmd->add_option("--iters", o.iters, "sweep budget (default 40*N)");
  solve_cmd->add_option("--tol", o.tol, "residual tolerance for early exit");
  solve_cmd->add_option("--audit-every", o.audit_every, "audit cadence in sweeps");
  solve_cmd->add_flag("--record-energy", o.record_energy, "record the energy trace");
  solve_cmd->add_flag("--gauss-seidel", o.gauss_seidel,
                      "in-place sweeps (off the validated path)");
  solve_cmd->add_option("--threads", o.threads, "worker threads (0 = auto)");
  solve_cmd->add_option("--out", o.out, "output directory");

  CLI::App* table_cmd = app.add_subcommand("table", "reproduce the error table");
  add_problem_opts(table_cmd, o);
  table_cmd->add_option("--n-list", o.n_list, "resolutions, e.g. 10,20,40")
      ->delimiter(',');
  table_cmd->add_flag("--full", o.full, "include the N=160,320 columns");
  table_cmd->add_option("--threads", o.threads, "worker threads (0 = auto)");
  table_cmd->add_option("--out", o.out, "output directory");

  CLI::App* validate_cmd =
      app.add_subcommand("validate", "dynamics laws, probe, oracle sweep");
  validate_cmd->add_option("--trials", o.trials, "probe trials");
  validate_cmd->add_option("--seed", o.seed, "probe seed");
  validate_cmd->add_option("--out", o.out, "output directory");
  validate_cmd->add_flag("--inject-broken", o.inject_broken,
                         "run a non-monotone dynamic as a real subject");

  CLI::App* probe_cmd =
      app.add_subcommand("probe", "monotonicity probe for a two-phase problem");
  add_problem_opts(probe_cmd, o);
  probe_cmd->add_option("--n", o.n, "override grid resolution N");
  probe_cmd->add_option("--trials", o.trials, "probe trials");
  probe_cmd->add_option("--seed", o.seed, "probe seed");
  probe_cmd->add_option("--out", o.out, "output directory");

  CLI::App* refine_cmd =
      app.add_subcommand("refine", "nested-grid convergence study");
  add_problem_opts(refine_cmd, o);
  refine_cmd->add_option("--n-list", o.n_list, "resolutions, e.g. 10,20,40")
      ->delimiter(',');
  refine_cmd->add_option("--iters", o.iters, "budget per grid (default 8*N*N)");
  refine_cmd->add_option("--tol", o.tol, "residual tolerance (default 1e-12)");
  refine_cmd->add_option("--threads", o.threads, "worker threads (0 = auto)");
  refine_cmd->add_option("--out", o.out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_name() == "CallForHelp" || e.get_name() == "CallForAllHelp") {
      return app.exit(e);
    }
    app.exit(e);
    return 2;
  }

  try {
    if (solve_cmd->parsed()) return cmd_solve(o);
    if (table_cmd->parsed()) return cmd_table(o);
    if (validate_cmd->parsed()) return cmd_validate(o);
    if (probe_cmd->parsed()) return cmd_probe(o);
    if (refine_cmd->parsed()) return cmd_refine(o);
    std::cerr << "no command given\n";
    return 2;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 1;
  } catch (const ProblemError& e) {
    std::cerr << "problem definition error: " << e.what() << "\n";
    return 2;
  } catch (const ContractError& e) {
    std::cerr << "internal contract violation: " << e.what() << "\n";
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "unexpected error: " << e.what() << "\n";
    return 3;
  }
}
