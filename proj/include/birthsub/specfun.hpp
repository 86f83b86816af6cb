#pragma once

#include <complex>

#include "birthsub/quadrature.hpp"

namespace birthsub {

struct ComplexValue {
  std::complex<double> value;
  double abs_err = 0.0;
};

/// A density evaluated at inner time s for outer time t. Laws without an outer
/// time (Lamperti, folded Cauchy, ...) report t = 1.
struct DensityPoint {
  double t = 1.0;
  double s = 0.0;
  double value = 0.0;
};

// ---------------------------------------------------------------------------
// Gamma function (Lanczos, g = 7, with reflection for x < 1/2).

double gamma_fn(double x);
/// log |Gamma(x)|; +inf at the poles.
double log_gamma(double x);
/// 1 / Gamma(x), exactly zero at the non-positive integers.
double rgamma(double x);
/// sin(pi x) with exact zeros at the integers.
double sin_pi(double x);

// ---------------------------------------------------------------------------
// Mittag-Leffler function E_{nu,gamma}.

/// Production evaluator. Uses the power series while |x|^(1/nu) is small, the
/// real integral representation for x < 0 (gamma = 1), and the collapsed
/// Hankel-contour integral (plus the pole residue for x > 0) otherwise.
/// Requires nu in (0, 1] and gamma > 0.
SpecialValue mittag_leffler(double nu, double gamma, double x);
ComplexValue mittag_leffler(double nu, double gamma, std::complex<double> z);

/// Extended-precision truncated power series with a rigorous tail bound.
SpecialValue mittag_leffler_series(double nu, double gamma, double x);
/// Optimally truncated asymptotic expansion of E_{nu,gamma}(-zeta), zeta > 0.
SpecialValue mittag_leffler_asymptotic(double nu, double gamma, double zeta);
/// Series when zeta^(1/nu) <= 18, asymptotic expansion beyond. Independent of
/// any quadrature; used to cross-check the integral representation.
SpecialValue mittag_leffler_reference(double nu, double zeta);
/// E_{nu,1}(-zeta) = (sin nu pi / pi) int_0^inf r^(nu-1) e^{-r zeta^(1/nu)} /
/// (r^(2nu) + 2 r^nu cos nu pi + 1) dr, for nu in (0, 1), zeta >= 0.
SpecialValue mittag_leffler_integral(double nu, double zeta, const QuadratureSpec& spec = kInnerSpec);

/// Kernel (sin nu pi / pi) r^(nu-1) / (r^(2nu) + 2 r^nu cos nu pi + 1): the
/// density of the ratio of two independent nu-stable variables.
double ml_kernel(double nu, double r);

// ---------------------------------------------------------------------------
// Other special functions.

/// W_{-nu,1-nu}(-xi) for 0 < nu < 1, xi >= 0 (the M-Wright function).
SpecialValue wright_neg(double nu, double xi);

/// Modified Bessel function I_0(z), z >= 0.
SpecialValue bessel_i0(double z);
/// e^{-z} I_0(z), z >= 0; finite for all z.
SpecialValue bessel_i0_scaled(double z);

/// Principal-branch exponential integral E_1(z); DomainError on the cut
/// (z real and <= 0).
ComplexValue exp_integral_e1(std::complex<double> z);

// ---------------------------------------------------------------------------
// Densities of the random times.

/// First-passage time of standard Brownian motion to level t.
DensityPoint levy_fp_density(double t, double s);
/// Positively skewed alpha-stable subordinator with E e^{-mu S(t)} = e^{-t mu^alpha}.
DensityPoint stable_density(double alpha, double t, double s);
/// Law of (S1/S2)^alpha for independent nu-stable S1, S2.
DensityPoint lamperti_density(double nu, double alpha, double w);
/// Hitting-time inverse of the nu-stable subordinator: t^-nu W_{-nu,1-nu}(-s t^-nu).
DensityPoint inverse_stable_density(double nu, double t, double s);
/// |C| for a Cauchy variable with the given scale.
DensityPoint folded_cauchy_density(double scale, double w);
/// Unimodal law of the iterated fractional first-passage remark, index n >= 1.
DensityPoint omega_density(int n, double r);
/// Inverse Gaussian random rate e^{-1/(2 theta)} / sqrt(2 pi theta^3).
DensityPoint inverse_gaussian_density(double theta);
/// Arcsine law of the Brownian sojourn time on [0, t].
DensityPoint arcsine_density(double t, double s);

/// Kanter's function a(u) = sin((1-a)u) sin(au)^(a/(1-a)) / sin(u)^(1/(1-a)),
/// u in (0, pi). Shared by the stable density, the Wright function and the
/// stable sampler.
double kanter_a(double alpha, double u);

}  // namespace birthsub
