#pragma once

#include <functional>
#include <string>
#include <vector>

#include "segsolve/grid.hpp"

namespace segsolve {

// One internal dynamic f(x,s) together with its primitive F(x,s) = int_0^s f.
// The physical values live on s >= 0; both functions are extended to s < 0,
// f oddly and F evenly, so that F stays convex and even. Consequently
// f(x,0) = 0 for every catalog entry.
//
// scheme_f is the value the sweep and the fixed-point residual use in place
// of f. It differs from eval_f only for `constant`, whose odd extension jumps
// at s = 0: the update rule needs the right-sided value c there, otherwise
// nodes pinned at zero next to an occupied region oscillate forever instead
// of stagnating. Everything user-facing (validation, the min-max operator)
// sees the odd extension.
struct DynamicsSpec {
  // Dispatch key: the sweep precompiles nodal reaction terms for catalog ids,
  // trusting that only the builders below produce them. Hand-built specs must
  // keep (or reset to) "custom" so the generic function path is taken.
  std::string id = "custom";
  double coef = 0.0;  // catalog coefficient; meaningless for custom specs
  std::function<double(Point, double)> eval_f;
  std::function<double(Point, double)> eval_F;
  std::function<double(Point, double)> scheme_f;  // defaults to eval_f
  bool declared_nonneg = false;    // f >= 0 for s >= 0
  bool declared_monotone = false;  // f nondecreasing in s

  double f(Point x, double s) const { return eval_f(x, s); }
  double F(Point x, double s) const { return eval_F(x, s); }
  double f_scheme(Point x, double s) const {
    return scheme_f ? scheme_f(x, s) : eval_f(x, s);
  }
};

// Catalog: zero, constant(c), weighted_abs(c) with f = c*(x^2+y^2)*s, and
// weighted_sqrt(c) with f = c*(x^2+y^2)*sqrt(|s|)*sign(s). c must be >= 0.
DynamicsSpec builtin_zero();
DynamicsSpec builtin_constant(double c);
DynamicsSpec builtin_weighted_abs(double c);
DynamicsSpec builtin_weighted_sqrt(double c);

// Dispatch by catalog id ("zero", "constant", "weighted_abs", "weighted_sqrt").
DynamicsSpec builtin(const std::string& kind, double coef = 0.0);

struct DynamicsViolation {
  std::string kind;  // which invariant failed
  Point x;
  double s = 0.0;
  std::string detail;
};

struct DynamicsReport {
  std::vector<DynamicsViolation> violations;
  bool ok() const { return violations.empty(); }
};

// Checks f(x,0) = 0, the odd/even extension laws, monotonicity when declared,
// and F against adaptive-Simpson quadrature of f (abs tol 1e-8), over every
// grid node paired with every s sample. Findings are report entries, never
// exceptions. The sample set must be nonempty and contain s = 0 and at least
// one negative value.
DynamicsReport validate(const DynamicsSpec& spec, const UniformGrid& grid,
                        const std::vector<double>& s_samples);

}  // namespace segsolve
