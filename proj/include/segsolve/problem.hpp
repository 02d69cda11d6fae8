#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "segsolve/dynamics.hpp"
#include "segsolve/grid.hpp"

namespace segsolve {

// Boundary datum for one phase: either a named closed-form preset (the
// piecewise formulas of the shipped examples) or an explicit list of values,
// one per boundary node in flat storage order.
struct BoundaryData {
  std::string preset;          // nonempty selects a preset
  std::vector<double> values;  // used when preset is empty
};

// A fully serializable problem: grid parameters, per-phase boundary data and
// dynamics, and (optionally) a named exact solution for error tables.
struct ProblemSpec {
  std::string name;
  int dim = 2;
  int n = 0;  // default resolution; callers may override via with_n
  int m = 0;
  std::vector<BoundaryData> boundary;  // size m
  std::vector<DynamicsSpec> dynamics;  // size m
  std::string exact_preset;            // empty when no exact solution known

  bool has_exact() const { return !exact_preset.empty(); }
  ProblemSpec with_n(int n_override) const;
  UniformGrid make_grid() const { return UniformGrid(dim, n); }
};

// Structural checks shared by the solver and the CLI: m >= 2, matching
// boundary/dynamics counts, known presets, value lists of the right length.
// Throws ProblemError with a description on the first defect.
void check_problem(const ProblemSpec& p);

// Boundary value of phase l (1-based) at a boundary node.
double eval_boundary(const ProblemSpec& p, int l, const UniformGrid& grid,
                     NodeIndex a);

// Exact density of phase l at a point; ProblemError when no exact solution.
double eval_exact(const ProblemSpec& p, int l, Point x);

// Named boundary presets: "zero", "ex1_phi1", "ex1_phi2", "ex2_phi1",
// "ex2_phi2", "ex2_phi3".
bool boundary_preset_exists(const std::string& id);
double eval_boundary_preset(const std::string& id, Point x);

// Exact-solution presets: "example2" (three phases).
bool exact_preset_exists(const std::string& id);
double eval_exact_preset(const std::string& id, int l, Point x);

// Region label for the "example2" exact solution: 1..3 for the support of
// that phase, 0 on the free-boundary lines where every density vanishes.
int example2_region(Point x);

// JSON round-trip for problem configs. Dynamics appear as
// {"kind": "weighted_abs", "coef": 10.0}; boundary entries as
// {"preset": "ex2_phi1"} or {"values": [...]}.
nlohmann::json problem_to_json(const ProblemSpec& p);
ProblemSpec problem_from_json(const nlohmann::json& j);
ProblemSpec load_problem(const std::string& path);  // IoError / ProblemError

}  // namespace segsolve
