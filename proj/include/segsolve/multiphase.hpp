#pragma once

#include <string>
#include <vector>

#include "segsolve/dynamics.hpp"
#include "segsolve/grid.hpp"

namespace segsolve {

// State of m competing densities on one grid. phase(l) holds the attached
// values w^l: the running density in the interior and the boundary datum
// phi^l on the boundary. boundary(l) holds phi^l alone, zero in the interior.
//
// Admissible states keep every phase nonnegative, at most one phase positive
// per interior node, and the boundary rows of phase(l) identical to
// boundary(l). audit() checks all of that exactly; the sweep is arranged so
// that exact zeros (not epsilon bands) carry the segregation.
class MultiPhaseState {
 public:
  MultiPhaseState(const UniformGrid& grid, int m);

  const UniformGrid& grid() const { return grid_; }
  int num_phases() const { return m_; }

  GridFunction& phase(int l) { return phases_[check(l)]; }
  const GridFunction& phase(int l) const { return phases_[check(l)]; }
  GridFunction& boundary(int l) { return boundary_[check(l)]; }
  const GridFunction& boundary(int l) const { return boundary_[check(l)]; }

 private:
  std::size_t check(int l) const;

  UniformGrid grid_;
  int m_;
  std::vector<GridFunction> phases_;
  std::vector<GridFunction> boundary_;
};

// hat value: this phase minus the sum of all others, at one node.
double hat(const MultiPhaseState& state, int l, NodeIndex a);

// The discrete energy
//   J_h = -1/2 sum_l (L_h u^l_hat, u^l) + sum_l sum_nodes F_l(x, u^l)
//         - sum_l (L_h phi^l_hat, u^l)
// where u^l is the interior part (zero on the boundary), phi^l the boundary
// part (zero inside), hats are taken within each family, and (.,.) sums over
// interior nodes only.
double energy(const MultiPhaseState& state,
              const std::vector<DynamicsSpec>& dynamics);

struct SchemeResidual {
  std::vector<double> per_phase;  // max-norm residual per phase
  double value = 0.0;             // overall max
  int worst_phase = 0;            // 1-based, 0 when the grid has no interior
  NodeIndex worst_node;
};

// Distance to the fixed-point system: max over phases and interior nodes of
//   | w^l_a - max(-f_l(x_a, w^l_a) h^2/K + avg^l_a - sum_{p != l} avg^p_a, 0) |
// with w^l = phase(l) (attached values) and K = 2*dim. Evaluated with the
// same arithmetic as the sweep, so a bitwise-stagnated iterate reports 0.
SchemeResidual scheme_residual(const MultiPhaseState& state,
                               const std::vector<DynamicsSpec>& dynamics);

struct InvariantViolation {
  std::string kind;  // "nonneg" | "segregation" | "attachment" | "compatibility"
  int phase = 0;     // 1-based; second phase for pairwise kinds
  int phase_other = 0;
  NodeIndex node;
  std::string detail;
};

// Exact admissibility check; empty result means the state is in the
// constraint set. Segregation is tested as min(u^p, u^q) = 0 exactly.
std::vector<InvariantViolation> audit(const MultiPhaseState& state);

}  // namespace segsolve
