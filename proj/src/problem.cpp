#include "segsolve/problem.hpp"

#include <cmath>
#include <fstream>

namespace segsolve {

namespace {

std::size_t boundary_count(const UniformGrid& g) {
  return g.node_count() - g.interior_count();
}

// Position of a boundary node in flat storage order, counting boundary nodes
// only. This is the index into an explicit per-phase value list.
std::size_t boundary_ordinal(const UniformGrid& g, NodeIndex a) {
  const int n = g.n_per_side();
  if (g.dim() == 1) return a.i == 0 ? 0 : 1;
  if (a.i == 0) return static_cast<std::size_t>(a.j);
  if (a.i == n) {
    return static_cast<std::size_t>(n + 1) + 2 * static_cast<std::size_t>(n - 1) +
           static_cast<std::size_t>(a.j);
  }
  return static_cast<std::size_t>(n + 1) +
         2 * static_cast<std::size_t>(a.i - 1) + (a.j == n ? 1 : 0);
}

// Boundary nodes carry exact +-1 coordinates on their clamped axes. The
// literal -1 + i*h can land one ulp short of 1 for awkward N, which would
// derail the piecewise preset formulas below, so the edge test goes through
// the index, not the rounded coordinate.
Point snapped_boundary_point(const UniformGrid& g, NodeIndex a) {
  Point p = g.coords(a);
  const int n = g.n_per_side();
  if (a.i == 0) p.x = -1.0;
  if (a.i == n) p.x = 1.0;
  if (g.dim() == 2) {
    if (a.j == 0) p.y = -1.0;
    if (a.j == n) p.y = 1.0;
  }
  return p;
}

}  // namespace

ProblemSpec ProblemSpec::with_n(int n_override) const {
  ProblemSpec copy = *this;
  copy.n = n_override;
  return copy;
}

void check_problem(const ProblemSpec& p) {
  if (p.dim != 1 && p.dim != 2) {
    throw ProblemError("problem dimension must be 1 or 2, got " +
                       std::to_string(p.dim));
  }
  if (p.n < 2) {
    throw ProblemError("problem resolution must be N >= 2, got " +
                       std::to_string(p.n));
  }
  if (p.m < 2) {
    throw ProblemError("segregation needs m >= 2 phases, got " +
                       std::to_string(p.m));
  }
  if (static_cast<int>(p.boundary.size()) != p.m) {
    throw ProblemError("expected " + std::to_string(p.m) +
                       " boundary entries, got " +
                       std::to_string(p.boundary.size()));
  }
  if (static_cast<int>(p.dynamics.size()) != p.m) {
    throw ProblemError("expected " + std::to_string(p.m) + " dynamics, got " +
                       std::to_string(p.dynamics.size()));
  }
  const UniformGrid grid = p.make_grid();
  for (int l = 1; l <= p.m; ++l) {
    const BoundaryData& b = p.boundary[l - 1];
    if (!b.preset.empty()) {
      if (!boundary_preset_exists(b.preset)) {
        throw ProblemError("phase " + std::to_string(l) +
                           " names unknown boundary preset '" + b.preset + "'");
      }
    } else if (b.values.size() != boundary_count(grid)) {
      throw ProblemError("phase " + std::to_string(l) + " lists " +
                         std::to_string(b.values.size()) +
                         " boundary values, grid has " +
                         std::to_string(boundary_count(grid)) +
                         " boundary nodes");
    }
    const DynamicsSpec& d = p.dynamics[l - 1];
    if (!d.eval_f || !d.eval_F) {
      throw ProblemError("phase " + std::to_string(l) +
                         " has an incomplete dynamics spec");
    }
  }
  if (p.has_exact() && !exact_preset_exists(p.exact_preset)) {
    throw ProblemError("unknown exact-solution preset '" + p.exact_preset + "'");
  }
}

double eval_boundary(const ProblemSpec& p, int l, const UniformGrid& grid,
                     NodeIndex a) {
  if (l < 1 || l > p.m) {
    throw ContractError("boundary phase index " + std::to_string(l) +
                        " outside 1.." + std::to_string(p.m));
  }
  if (classify(grid, a) != NodeKind::boundary) {
    throw ContractError("eval_boundary called on an interior node");
  }
  const BoundaryData& b = p.boundary[l - 1];
  if (!b.preset.empty()) {
    return eval_boundary_preset(b.preset, snapped_boundary_point(grid, a));
  }
  const std::size_t ord = boundary_ordinal(grid, a);
  if (ord >= b.values.size()) {
    throw ProblemError("boundary value list for phase " + std::to_string(l) +
                       " is too short");
  }
  return b.values[ord];
}

bool boundary_preset_exists(const std::string& id) {
  return id == "zero" || id == "ex1_phi1" || id == "ex1_phi2" ||
         id == "ex2_phi1" || id == "ex2_phi2" || id == "ex2_phi3";
}

double eval_boundary_preset(const std::string& id, Point p) {
  const double x = p.x, y = p.y;
  if (id == "zero") return 0.0;
  if (id == "ex1_phi1") {
    // sqrt(x) on the top/bottom edges for x >= 0, one on the right edge.
    if (x == 1.0) return 1.0;
    if (x == -1.0) return 0.0;
    return x >= 0.0 ? std::sqrt(x) : 0.0;
  }
  if (id == "ex1_phi2") {
    // |x| on the top/bottom edges for x <= 0, one on the left edge.
    if (x == -1.0) return 1.0;
    if (x == 1.0) return 0.0;
    return x <= 0.0 ? -x : 0.0;
  }
  if (id == "ex2_phi1") {
    // Trace of the first exact density: support on the bottom edge and the
    // lower right edge.
    if (y == -1.0) return 3.0 * x + 1.0 >= 0.0 ? 3.0 * x + 1.0 : 0.0;
    if (x == 1.0) return y < 0.0 ? y * (y - 3.0) : 0.0;
    return 0.0;
  }
  if (id == "ex2_phi2") {
    if (y == 1.0) return 3.0 * x + 1.0 >= 0.0 ? 3.0 * x + 1.0 : 0.0;
    if (x == 1.0) return y > 0.0 ? y * (y + 3.0) : 0.0;
    return 0.0;
  }
  if (id == "ex2_phi3") {
    if (x == -1.0) return 0.5 * (9.0 - y * y);
    if (y == 1.0 || y == -1.0) {
      const double v = 0.5 * (9.0 * x * x - 1.0);
      return x <= -1.0 / 3.0 ? v : 0.0;
    }
    return 0.0;
  }
  throw ProblemError("unknown boundary preset '" + id + "'");
}

bool exact_preset_exists(const std::string& id) { return id == "example2"; }

double eval_exact_preset(const std::string& id, int l, Point p) {
  if (id != "example2") {
    throw ProblemError("unknown exact-solution preset '" + id + "'");
  }
  const double x = p.x, y = p.y;
  switch (l) {
    case 1:
      return (y <= 0.0 && y <= 3.0 * x) ? -(3.0 * x - y) * y : 0.0;
    case 2:
      return (y >= 0.0 && y >= -3.0 * x) ? y * (3.0 * x + y) : 0.0;
    case 3:
      return (y >= 3.0 * x && y <= -3.0 * x) ? 0.5 * (9.0 * x * x - y * y)
                                             : 0.0;
    default:
      throw ContractError("exact preset 'example2' has phases 1..3, asked for " +
                          std::to_string(l));
  }
}

double eval_exact(const ProblemSpec& p, int l, Point x) {
  if (!p.has_exact()) {
    throw ProblemError("problem '" + p.name + "' has no exact solution");
  }
  if (l < 1 || l > p.m) {
    throw ContractError("exact phase index " + std::to_string(l) +
                        " outside 1.." + std::to_string(p.m));
  }
  return eval_exact_preset(p.exact_preset, l, x);
}

int example2_region(Point p) {
  int label = 0, positives = 0;
  for (int l = 1; l <= 3; ++l) {
    if (eval_exact_preset("example2", l, p) > 0.0) {
      ++positives;
      label = l;
    }
  }
  return positives == 1 ? label : 0;
}

nlohmann::json problem_to_json(const ProblemSpec& p) {
  nlohmann::json j;
  j["name"] = p.name;
  j["dim"] = p.dim;
  j["n"] = p.n;
  j["m"] = p.m;
  j["boundary"] = nlohmann::json::array();
  for (const BoundaryData& b : p.boundary) {
    nlohmann::json e;
    if (!b.preset.empty()) {
      e["preset"] = b.preset;
    } else {
      e["values"] = b.values;
    }
    j["boundary"].push_back(e);
  }
  j["dynamics"] = nlohmann::json::array();
  for (const DynamicsSpec& d : p.dynamics) {
    if (d.id == "custom") {
      throw ProblemError(
          "custom dynamics cannot be serialized; use a catalog kind");
    }
    nlohmann::json e;
    e["kind"] = d.id;
    e["coef"] = d.coef;
    j["dynamics"].push_back(e);
  }
  if (p.has_exact()) j["exact"] = p.exact_preset;
  return j;
}

ProblemSpec problem_from_json(const nlohmann::json& j) {
  ProblemSpec p;
  try {
    p.name = j.value("name", std::string("unnamed"));
    p.dim = j.value("dim", 2);
    p.n = j.at("n").get<int>();
    p.m = j.at("m").get<int>();
    for (const auto& e : j.at("boundary")) {
      BoundaryData b;
      if (e.contains("preset")) {
        b.preset = e.at("preset").get<std::string>();
      } else {
        b.values = e.at("values").get<std::vector<double>>();
      }
      p.boundary.push_back(std::move(b));
    }
    for (const auto& e : j.at("dynamics")) {
      p.dynamics.push_back(
          builtin(e.at("kind").get<std::string>(), e.value("coef", 0.0)));
    }
    p.exact_preset = j.value("exact", std::string());
  } catch (const nlohmann::json::exception& ex) {
    throw ProblemError(std::string("malformed problem config: ") + ex.what());
  }
  check_problem(p);
  return p;
}

ProblemSpec load_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open problem config " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& ex) {
    throw IoError("cannot parse " + path + ": " + ex.what());
  }
  return problem_from_json(j);
}

}  // namespace segsolve
