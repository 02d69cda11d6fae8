#include "segsolve/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace segsolve {

namespace {

void require_coef(const std::string& kind, double c) {
  if (!(c >= 0.0)) {
    throw ProblemError("dynamics coefficient for " + kind +
                       " must be finite and >= 0, got " + format_double(c));
  }
}

double weight(Point p) { return p.x * p.x + p.y * p.y; }

// Adaptive Simpson on [0, s]; plenty for the smooth catalog integrands and
// still fine for |s|^(1/2) kinks because the recursion refines near them.
double simpson_panel(const std::function<double(double)>& f, double a, double b,
                     double fa, double fm, double fb) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_step(const std::function<double(double)>& f, double a, double b,
                     double fa, double fm, double fb, double whole, double tol,
                     int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = simpson_panel(f, a, m, fa, flm, fm);
  const double right = simpson_panel(f, m, b, fm, frm, fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  return adaptive_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double integrate(const std::function<double(double)>& f, double a, double b,
                 double tol) {
  if (a == b) return 0.0;
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = simpson_panel(f, a, b, fa, fm, fb);
  return adaptive_step(f, a, b, fa, fm, fb, whole, tol, 40);
}

}  // namespace

DynamicsSpec builtin_zero() {
  DynamicsSpec d;
  d.id = "zero";
  d.coef = 0.0;
  d.eval_f = [](Point, double) { return 0.0; };
  d.eval_F = [](Point, double) { return 0.0; };
  d.declared_nonneg = true;
  d.declared_monotone = true;
  return d;
}

DynamicsSpec builtin_constant(double c) {
  require_coef("constant", c);
  DynamicsSpec d;
  d.id = "constant";
  d.coef = c;
  d.eval_f = [c](Point, double s) {
    if (s > 0.0) return c;
    if (s < 0.0) return -c;
    return 0.0;
  };
  d.eval_F = [c](Point, double s) { return c * std::abs(s); };
  // Right-sided value at s = 0; see the header note on why the sweep needs it.
  d.scheme_f = [c](Point, double s) { return s < 0.0 ? -c : c; };
  d.declared_nonneg = true;
  d.declared_monotone = true;
  return d;
}

DynamicsSpec builtin_weighted_abs(double c) {
  require_coef("weighted_abs", c);
  DynamicsSpec d;
  d.id = "weighted_abs";
  d.coef = c;
  d.eval_f = [c](Point p, double s) { return (c * weight(p)) * s; };
  d.eval_F = [c](Point p, double s) { return 0.5 * ((c * weight(p)) * s) * s; };
  d.declared_nonneg = true;
  d.declared_monotone = true;
  return d;
}

DynamicsSpec builtin_weighted_sqrt(double c) {
  require_coef("weighted_sqrt", c);
  DynamicsSpec d;
  d.id = "weighted_sqrt";
  d.coef = c;
  d.eval_f = [c](Point p, double s) {
    const double r = (c * weight(p)) * std::sqrt(std::abs(s));
    return s < 0.0 ? -r : r;
  };
  d.eval_F = [c](Point p, double s) {
    const double a = std::abs(s);
    return ((2.0 / 3.0) * (c * weight(p))) * (a * std::sqrt(a));
  };
  d.declared_nonneg = true;
  d.declared_monotone = true;
  return d;
}

DynamicsSpec builtin(const std::string& kind, double coef) {
  if (kind == "zero") return builtin_zero();
  if (kind == "constant") return builtin_constant(coef);
  if (kind == "weighted_abs") return builtin_weighted_abs(coef);
  if (kind == "weighted_sqrt") return builtin_weighted_sqrt(coef);
  throw ProblemError(
      "unknown dynamics kind '" + kind +
      "' (expected zero, constant, weighted_abs or weighted_sqrt)");
}

DynamicsReport validate(const DynamicsSpec& spec, const UniformGrid& grid,
                        const std::vector<double>& s_samples) {
  if (s_samples.empty()) {
    throw ContractError("dynamics validation needs a nonempty sample set");
  }
  bool has_zero = false, has_negative = false;
  for (double s : s_samples) {
    has_zero = has_zero || s == 0.0;
    has_negative = has_negative || s < 0.0;
  }
  if (!has_zero || !has_negative) {
    throw ContractError(
        "dynamics validation samples must include s = 0 and a negative value");
  }
  if (!spec.eval_f || !spec.eval_F) {
    throw ContractError("dynamics spec is missing eval_f or eval_F");
  }

  DynamicsReport report;
  auto flag = [&](const std::string& kind, Point x, double s,
                  const std::string& detail) {
    report.violations.push_back({kind, x, s, detail});
  };

  std::vector<double> sorted = s_samples;
  std::sort(sorted.begin(), sorted.end());

  const double tol = 1e-12;
  for (std::size_t f = 0; f < grid.node_count(); ++f) {
    const Point x = grid.coords(grid.unflat(f));

    const double f0 = spec.f(x, 0.0);
    if (f0 != 0.0) {
      flag("f_zero", x, 0.0, "f(x,0) = " + format_double(f0) + ", expected 0");
    }

    double scale = 1.0;
    for (double s : sorted) scale = std::max(scale, std::abs(spec.f(x, s)));

    for (double s : sorted) {
      const double fp = spec.f(x, s);
      const double fn = spec.f(x, -s);
      if (std::abs(fp + fn) > tol * scale) {
        flag("odd_extension", x, s,
             "f(x,-s) = " + format_double(fn) + " vs -f(x,s) = " +
                 format_double(-fp));
      }
      const double Fp = spec.F(x, s);
      const double Fn = spec.F(x, -s);
      if (std::abs(Fp - Fn) > tol * std::max(1.0, std::abs(Fp))) {
        flag("even_primitive", x, s,
             "F(x,-s) = " + format_double(Fn) + " vs F(x,s) = " +
                 format_double(Fp));
      }
      const double quad =
          integrate([&](double t) { return spec.f(x, t); }, 0.0, s, 1e-10);
      if (std::abs(Fp - quad) > 1e-8) {
        flag("primitive_mismatch", x, s,
             "F(x,s) = " + format_double(Fp) + " but int_0^s f = " +
                 format_double(quad));
      }
    }

    if (spec.declared_monotone) {
      for (std::size_t k = 1; k < sorted.size(); ++k) {
        const double lo = spec.f(x, sorted[k - 1]);
        const double hi = spec.f(x, sorted[k]);
        if (lo > hi + tol * scale) {
          flag("monotonicity", x, sorted[k],
               "f decreases from " + format_double(lo) + " at s = " +
                   format_double(sorted[k - 1]) + " to " + format_double(hi));
        }
      }
    }
  }
  return report;
}

}  // namespace segsolve
