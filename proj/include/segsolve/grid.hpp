#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "segsolve/errors.hpp"

namespace segsolve {

struct Point {
  double x = 0.0;
  double y = 0.0;  // unused in 1D
};

// Multi-index of a node; j stays 0 in 1D.
struct NodeIndex {
  int i = 0;
  int j = 0;
};

enum class NodeKind { interior, boundary };

// Uniform mesh over [-1,1] (dim 1) or [-1,1]^2 (dim 2) with spacing h = 2/N.
// Nodes are x_i = -1 + i*h for i = 0..N, likewise y_j in 2D. Storage is a
// flat array in row-major (i,j) order, flat = i*(N+1) + j, so the y index
// varies fastest. Interior nodes are those with every index in 1..N-1; the
// rest form the boundary.
class UniformGrid {
 public:
  UniformGrid(int dim, int n_per_side);

  int dim() const { return dim_; }
  int n_per_side() const { return n_; }
  double h() const { return h_; }
  int neighbor_count() const { return 2 * dim_; }  // K in the update rule

  std::size_t node_count() const;
  std::size_t interior_count() const;

  bool valid(NodeIndex a) const;
  bool is_interior(NodeIndex a) const;
  std::size_t flat(NodeIndex a) const;  // no bounds check; hot path
  NodeIndex unflat(std::size_t f) const;
  Point coords(NodeIndex a) const;

  // Neighbors of an interior node, in the fixed order -i,+i[,-j,+j].
  std::array<NodeIndex, 4> neighbors(NodeIndex a) const;

  bool operator==(const UniformGrid& o) const = default;

 private:
  int dim_;
  int n_;
  double h_;
};

NodeKind classify(const UniformGrid& grid, NodeIndex a);

// One double per node, value semantics. The grid is tiny and copied along.
class GridFunction {
 public:
  explicit GridFunction(const UniformGrid& grid, double fill = 0.0);

  const UniformGrid& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }

  double operator[](std::size_t f) const { return values_[f]; }
  double& operator[](std::size_t f) { return values_[f]; }
  double at(NodeIndex a) const;
  double& at(NodeIndex a);

  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }

 private:
  UniformGrid grid_;
  std::vector<double> values_;
};

// Standard 3-point (1D) or 5-point (2D) Laplacian at an interior node.
double laplacian(const GridFunction& v, NodeIndex a);

// Mean of v over the neighbors of an interior node. Satisfies
// laplacian(v,a) = (K/h^2) * (neighbor_average(v,a) - v(a)) with K = 2*dim.
double neighbor_average(const GridFunction& v, NodeIndex a);

// CSV with header `x,value` (1D) or `x,y,value` (2D), one node per row in
// flat storage order, full double precision (17 significant digits).
void write_csv(const GridFunction& v, std::ostream& out);
void write_csv(const GridFunction& v, const std::string& path);
GridFunction read_csv(const UniformGrid& grid, std::istream& in);
GridFunction read_csv(const UniformGrid& grid, const std::string& path);

// Full-precision decimal form (%.17g), shared by the CSV and table writers
// so every writer round-trips doubles identically.
std::string format_double(double v);

}  // namespace segsolve
