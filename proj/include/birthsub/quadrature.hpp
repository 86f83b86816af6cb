#pragma once

#include <functional>
#include <vector>

namespace birthsub {

struct SpecialValue {
  double value = 0.0;
  double abs_err = 0.0;
};

struct QuadratureSpec {
  double rel_tol = 1e-8;
  double abs_tol = 1e-12;
  int max_subdivisions = 2000;

  /// Throws Validation on non-positive tolerances or max_subdivisions < 1.
  void validate() const;
};

/// Tighter settings used internally when a special function is evaluated by
/// quadrature and then fed into cancelling spectral sums.
inline constexpr QuadratureSpec kInnerSpec{1e-12, 1e-15, 2000};

using Integrand = std::function<double(double)>;

/// Shape hints for integrals over (0, inf). The integrand is assumed to behave
/// like r^(power-1) near 0; its bulk is expected around r = scale.
struct HalfLineHints {
  double power = 1.0;
  double scale = 1.0;
};

struct QuadResult {
  double value = 0.0;
  double abs_err = 0.0;
  int subdivisions = 0;
  bool converged = false;
};

/// Globally adaptive Gauss-Kronrod (7/15) on [a, b]. Never throws on
/// non-convergence; inspect `converged`.
QuadResult integrate_finite(const Integrand& f, double a, double b, const QuadratureSpec& spec = {});

/// Same engine on (0, inf) after the substitution r = scale * exp(y / power)
/// and a compactifying map y = x / (1 - x^2), x in (-1, 1).
QuadResult integrate_half_line(const Integrand& f, const QuadratureSpec& spec = {}, HalfLineHints hints = {});

/// Throwing front ends: NonConvergence (carrying the best estimate) when the
/// subdivision budget is exhausted before abs_err <= max(abs_tol, rel_tol |value|).
/// Composite 15-point Kronrod rule on `panels` equal pieces of [a, b], with the
/// embedded Gauss weights (zero at Kronrod-only nodes). Lets one set of
/// expensive integrand factors be reused across many integrals;
/// |sum (w_kronrod - w_gauss) f| serves as the error estimate.
struct FixedRule {
  std::vector<double> x;
  std::vector<double> w_kronrod;
  std::vector<double> w_gauss;
};
FixedRule kronrod_panels(double a, double b, int panels);

SpecialValue quad_finite(const Integrand& f, double a, double b, const QuadratureSpec& spec = {});
SpecialValue quad_semi_infinite(const Integrand& f, const QuadratureSpec& spec = {}, HalfLineHints hints = {});

}  // namespace birthsub
