#include "segsolve/grid.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>

namespace segsolve {

namespace {

std::string node_str(NodeIndex a, int dim) {
  std::ostringstream os;
  if (dim == 1) {
    os << "(i=" << a.i << ")";
  } else {
    os << "(i=" << a.i << ", j=" << a.j << ")";
  }
  return os.str();
}

}  // namespace

UniformGrid::UniformGrid(int dim, int n_per_side) : dim_(dim), n_(n_per_side) {
  if (dim != 1 && dim != 2) {
    throw ProblemError("grid dimension must be 1 or 2, got " +
                       std::to_string(dim));
  }
  if (n_per_side < 2) {
    throw ProblemError("grid needs N >= 2 intervals per side, got " +
                       std::to_string(n_per_side));
  }
  h_ = 2.0 / static_cast<double>(n_);
}

std::size_t UniformGrid::node_count() const {
  const std::size_t per = static_cast<std::size_t>(n_) + 1;
  return dim_ == 1 ? per : per * per;
}

std::size_t UniformGrid::interior_count() const {
  const std::size_t per = static_cast<std::size_t>(n_) - 1;
  return dim_ == 1 ? per : per * per;
}

bool UniformGrid::valid(NodeIndex a) const {
  if (a.i < 0 || a.i > n_) return false;
  if (dim_ == 1) return a.j == 0;
  return a.j >= 0 && a.j <= n_;
}

bool UniformGrid::is_interior(NodeIndex a) const {
  if (a.i <= 0 || a.i >= n_) return false;
  if (dim_ == 1) return true;
  return a.j > 0 && a.j < n_;
}

std::size_t UniformGrid::flat(NodeIndex a) const {
  if (dim_ == 1) return static_cast<std::size_t>(a.i);
  return static_cast<std::size_t>(a.i) * (n_ + 1) + static_cast<std::size_t>(a.j);
}

NodeIndex UniformGrid::unflat(std::size_t f) const {
  if (dim_ == 1) return {static_cast<int>(f), 0};
  const std::size_t per = static_cast<std::size_t>(n_) + 1;
  return {static_cast<int>(f / per), static_cast<int>(f % per)};
}

Point UniformGrid::coords(NodeIndex a) const {
  Point p;
  p.x = -1.0 + a.i * h_;
  p.y = dim_ == 2 ? -1.0 + a.j * h_ : 0.0;
  return p;
}

std::array<NodeIndex, 4> UniformGrid::neighbors(NodeIndex a) const {
  if (dim_ == 1) {
    return {NodeIndex{a.i - 1, 0}, NodeIndex{a.i + 1, 0}, NodeIndex{}, NodeIndex{}};
  }
  return {NodeIndex{a.i - 1, a.j}, NodeIndex{a.i + 1, a.j},
          NodeIndex{a.i, a.j - 1}, NodeIndex{a.i, a.j + 1}};
}

NodeKind classify(const UniformGrid& grid, NodeIndex a) {
  if (!grid.valid(a)) {
    throw ContractError("node index " + node_str(a, grid.dim()) +
                        " out of range for N=" + std::to_string(grid.n_per_side()));
  }
  return grid.is_interior(a) ? NodeKind::interior : NodeKind::boundary;
}

GridFunction::GridFunction(const UniformGrid& grid, double fill)
    : grid_(grid), values_(grid.node_count(), fill) {}

double GridFunction::at(NodeIndex a) const {
  if (!grid_.valid(a)) {
    throw ContractError("node index " + node_str(a, grid_.dim()) + " out of range");
  }
  return values_[grid_.flat(a)];
}

double& GridFunction::at(NodeIndex a) {
  if (!grid_.valid(a)) {
    throw ContractError("node index " + node_str(a, grid_.dim()) + " out of range");
  }
  return values_[grid_.flat(a)];
}

double laplacian(const GridFunction& v, NodeIndex a) {
  const UniformGrid& g = v.grid();
  if (classify(g, a) != NodeKind::interior) {
    throw ContractError("laplacian needs an interior node, got boundary " +
                        node_str(a, g.dim()));
  }
  const double inv_h2 = 1.0 / (g.h() * g.h());
  const std::size_t f = g.flat(a);
  if (g.dim() == 1) {
    return (v[f - 1] + v[f + 1] - 2.0 * v[f]) * inv_h2;
  }
  const std::size_t stride = static_cast<std::size_t>(g.n_per_side()) + 1;
  return ((v[f - stride] + v[f + stride]) + (v[f - 1] + v[f + 1]) -
          4.0 * v[f]) *
         inv_h2;
}

double neighbor_average(const GridFunction& v, NodeIndex a) {
  const UniformGrid& g = v.grid();
  if (classify(g, a) != NodeKind::interior) {
    throw ContractError("neighbor_average needs an interior node, got boundary " +
                        node_str(a, g.dim()));
  }
  const std::size_t f = g.flat(a);
  if (g.dim() == 1) {
    return 0.5 * (v[f - 1] + v[f + 1]);
  }
  const std::size_t stride = static_cast<std::size_t>(g.n_per_side()) + 1;
  // Paired additions; the sweep uses the identical expression so that the
  // stability bound argument goes through exactly in floating point.
  return 0.25 * ((v[f - stride] + v[f + stride]) + (v[f - 1] + v[f + 1]));
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_csv(const GridFunction& v, std::ostream& out) {
  const UniformGrid& g = v.grid();
  out << (g.dim() == 1 ? "x,value\n" : "x,y,value\n");
  for (std::size_t f = 0; f < v.size(); ++f) {
    const Point p = g.coords(g.unflat(f));
    if (g.dim() == 1) {
      out << format_double(p.x) << ',' << format_double(v[f]) << '\n';
    } else {
      out << format_double(p.x) << ',' << format_double(p.y) << ','
          << format_double(v[f]) << '\n';
    }
  }
}

void write_csv(const GridFunction& v, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  write_csv(v, out);
  out.flush();
  if (!out) throw IoError("write failed for " + path);
}

GridFunction read_csv(const UniformGrid& grid, std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty CSV stream");
  GridFunction v(grid);
  std::size_t f = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (f >= v.size()) throw IoError("CSV has more rows than grid nodes");
    const std::size_t pos = line.find_last_of(',');
    if (pos == std::string::npos) throw IoError("malformed CSV row: " + line);
    const char* start = line.c_str() + pos + 1;
    char* end = nullptr;
    const double val = std::strtod(start, &end);
    if (end == start) throw IoError("unparsable value in CSV row: " + line);
    v[f++] = val;
  }
  if (f != v.size()) {
    throw IoError("CSV row count " + std::to_string(f) + " does not match node count " +
                  std::to_string(v.size()));
  }
  return v;
}

GridFunction read_csv(const UniformGrid& grid, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  return read_csv(grid, in);
}

}  // namespace segsolve
