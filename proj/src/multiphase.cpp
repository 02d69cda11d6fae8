#include "segsolve/multiphase.hpp"

#include <cmath>

namespace segsolve {

MultiPhaseState::MultiPhaseState(const UniformGrid& grid, int m)
    : grid_(grid), m_(m) {
  if (m < 1) {
    throw ContractError("a multi-phase state needs at least one phase, got " +
                        std::to_string(m));
  }
  phases_.assign(static_cast<std::size_t>(m), GridFunction(grid_));
  boundary_.assign(static_cast<std::size_t>(m), GridFunction(grid_));
}

std::size_t MultiPhaseState::check(int l) const {
  if (l < 1 || l > m_) {
    throw ContractError("phase index " + std::to_string(l) +
                        " outside 1.." + std::to_string(m_));
  }
  return static_cast<std::size_t>(l - 1);
}

double hat(const MultiPhaseState& state, int l, NodeIndex a) {
  if (!state.grid().valid(a)) {
    throw ContractError("hat: node index out of range");
  }
  const std::size_t f = state.grid().flat(a);
  double acc = state.phase(l)[f];
  for (int j = 1; j <= state.num_phases(); ++j) {
    if (j != l) acc -= state.phase(j)[f];
  }
  return acc;
}

namespace {

// phase l of `state` split into interior part (boundary zeroed) or boundary
// part, then hatted against the same split of the other phases.
GridFunction hat_field(const MultiPhaseState& state, int l, bool interior_part) {
  const UniformGrid& g = state.grid();
  GridFunction out(g);
  for (std::size_t f = 0; f < out.size(); ++f) {
    const bool inside = g.is_interior(g.unflat(f));
    if (inside != interior_part) continue;
    double acc = state.phase(l)[f];
    for (int j = 1; j <= state.num_phases(); ++j) {
      if (j != l) acc -= state.phase(j)[f];
    }
    out[f] = acc;
  }
  return out;
}

}  // namespace

double energy(const MultiPhaseState& state,
              const std::vector<DynamicsSpec>& dynamics) {
  const int m = state.num_phases();
  if (static_cast<int>(dynamics.size()) != m) {
    throw ProblemError("energy: expected " + std::to_string(m) +
                       " dynamics, got " + std::to_string(dynamics.size()));
  }
  const UniformGrid& g = state.grid();
  double total = 0.0;
  for (int l = 1; l <= m; ++l) {
    const GridFunction hat_u = hat_field(state, l, true);
    const GridFunction hat_phi = hat_field(state, l, false);
    const GridFunction& w = state.phase(l);
    double quad = 0.0, forcing = 0.0, coupling = 0.0;
    for (std::size_t f = 0; f < w.size(); ++f) {
      const NodeIndex a = g.unflat(f);
      const Point x = g.coords(a);
      if (!g.is_interior(a)) {
        // Interior part of the density vanishes here; F_l(x,0) is still part
        // of the nodal sum (zero for every well-formed dynamic).
        forcing += dynamics[l - 1].F(x, 0.0);
        continue;
      }
      quad += laplacian(hat_u, a) * w[f];
      forcing += dynamics[l - 1].F(x, w[f]);
      coupling += laplacian(hat_phi, a) * w[f];
    }
    total += -0.5 * quad + forcing - coupling;
  }
  return total;
}

SchemeResidual scheme_residual(const MultiPhaseState& state,
                               const std::vector<DynamicsSpec>& dynamics) {
  const int m = state.num_phases();
  if (static_cast<int>(dynamics.size()) != m) {
    throw ProblemError("scheme_residual: expected " + std::to_string(m) +
                       " dynamics, got " + std::to_string(dynamics.size()));
  }
  const UniformGrid& g = state.grid();
  SchemeResidual res;
  res.per_phase.assign(static_cast<std::size_t>(m), 0.0);

  const double hh_over_k =
      g.h() * g.h() / static_cast<double>(g.neighbor_count());
  std::vector<double> avg(static_cast<std::size_t>(m));

  for (std::size_t f = 0; f < g.node_count(); ++f) {
    const NodeIndex a = g.unflat(f);
    if (!g.is_interior(a)) continue;
    const Point x = g.coords(a);
    for (int l = 1; l <= m; ++l) {
      avg[l - 1] = neighbor_average(state.phase(l), a);
    }
    double sum = avg[0];
    for (int l = 2; l <= m; ++l) sum += avg[l - 1];
    for (int l = 1; l <= m; ++l) {
      const double w_old = state.phase(l)[f];
      // Mirrors the sweep bit for bit: hat-average minus the reaction load,
      // clipped at zero.
      const double load = dynamics[l - 1].f_scheme(x, w_old) * hh_over_k;
      const double d = 2.0 * avg[l - 1] - sum;
      const double e = d - load;
      const double next = e > 0.0 ? e : 0.0;
      const double r = std::abs(w_old - next);
      if (r > res.per_phase[l - 1]) res.per_phase[l - 1] = r;
      if (r > res.value) {
        res.value = r;
        res.worst_phase = l;
        res.worst_node = a;
      }
    }
  }
  if (res.worst_phase == 0 && g.interior_count() > 0) {
    // All residuals are exactly zero; point at the first interior node.
    res.worst_phase = 1;
    res.worst_node = g.dim() == 1 ? NodeIndex{1, 0} : NodeIndex{1, 1};
  }
  return res;
}

std::vector<InvariantViolation> audit(const MultiPhaseState& state) {
  const UniformGrid& g = state.grid();
  const int m = state.num_phases();
  std::vector<InvariantViolation> out;

  for (std::size_t f = 0; f < g.node_count(); ++f) {
    const NodeIndex a = g.unflat(f);
    const bool inside = g.is_interior(a);
    for (int l = 1; l <= m; ++l) {
      const double w = state.phase(l)[f];
      if (!(w >= 0.0)) {  // catches NaN too
        out.push_back({"nonneg", l, 0, a,
                       "phase value " + format_double(w) + " below zero"});
      }
      if (inside) {
        if (state.boundary(l)[f] != 0.0) {
          out.push_back({"compatibility", l, 0, a,
                         "boundary datum nonzero at an interior node"});
        }
      } else {
        if (w != state.boundary(l)[f]) {
          out.push_back({"attachment", l, 0, a,
                         "phase " + format_double(w) +
                             " detached from datum " +
                             format_double(state.boundary(l)[f])});
        }
        if (!(state.boundary(l)[f] >= 0.0)) {
          out.push_back({"nonneg", l, 0, a,
                         "boundary datum " +
                             format_double(state.boundary(l)[f]) +
                             " below zero"});
        }
      }
    }
    for (int p = 1; p <= m; ++p) {
      for (int q = p + 1; q <= m; ++q) {
        const double lo = std::min(state.phase(p)[f], state.phase(q)[f]);
        if (inside) {
          if (lo != 0.0) {
            out.push_back({"segregation", p, q, a,
                           "phases overlap with min " + format_double(lo)});
          }
        } else if (lo > 0.0) {
          out.push_back({"compatibility", p, q, a,
                         "boundary data overlap with min " + format_double(lo)});
        }
      }
    }
  }
  return out;
}

}  // namespace segsolve
