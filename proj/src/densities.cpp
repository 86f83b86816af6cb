#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "birthsub/error.hpp"
#include "birthsub/specfun.hpp"

namespace birthsub {

namespace {

constexpr double kPi = std::numbers::pi;

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) domain_error(std::string(what) + " must be positive and finite");
}

// (1/pi) sum_k (-1)^{k+1} Gamma(alpha k + 1)/k! sin(pi alpha k) x^{-alpha k - 1};
// used where x^-alpha is small.
double stable_far_tail(double alpha, double x) {
  const double lx = std::log(x);
  double sum = 0.0;
  for (int k = 1; k < 200; ++k) {
    const double mag = std::exp(std::lgamma(alpha * k + 1.0) - std::lgamma(k + 1.0) - (alpha * k + 1.0) * lx);
    const double term = (k % 2 == 1 ? 1.0 : -1.0) * mag * sin_pi(alpha * k);
    sum += term;
    if (mag < 1e-18 * std::abs(sum)) break;
  }
  return sum / kPi;
}

// Standard alpha-stable density, E e^{-mu S} = e^{-mu^alpha}.
double stable_unit_density(double alpha, double x) {
  const double lx = std::log(x);
  if (alpha != 0.5 && std::exp(-alpha * lx) < 0.1) return stable_far_tail(alpha, x);
  if (alpha == 0.5) {
    const double e = 0.25 / x;
    return e > 745.0 ? 0.0 : std::exp(-e - 1.5 * lx) / (2.0 * std::sqrt(kPi));
  }
  const double c = std::exp(-alpha / (1.0 - alpha) * lx);
  if (c > 1e300) return 0.0;
  auto f = [=](double u) {
    const double a = kanter_a(alpha, u);
    const double e = a * c;
    return e > 745.0 ? 0.0 : a * std::exp(-e);
  };
  const auto q = integrate_finite(f, 0.0, kPi, {1e-12, 1e-300, 4000});
  if (!q.converged && q.abs_err > 1e-9 * std::abs(q.value)) {
    throw Error(ErrorKind::NonConvergence, "stable density quadrature did not converge");
  }
  if (!(q.value > 0.0)) return 0.0;
  return alpha / ((1.0 - alpha) * kPi) * std::exp(std::log(q.value) - lx / (1.0 - alpha));
}

}  // namespace

double kanter_a(double alpha, double u) {
  const double p = 1.0 / (1.0 - alpha);
  const double la = std::log(std::sin((1.0 - alpha) * u)) + alpha * p * std::log(std::sin(alpha * u)) -
                    p * std::log(std::sin(u));
  if (la > 709.0) return std::numeric_limits<double>::infinity();
  return std::exp(la);
}

DensityPoint levy_fp_density(double t, double s) {
  require_positive(t, "outer time t");
  if (!(s > 0.0)) return {t, s, 0.0};
  const double e = t * t / (2.0 * s);
  if (e > 745.0) return {t, s, 0.0};
  return {t, s, t * std::exp(-e - 1.5 * std::log(s)) / std::sqrt(2.0 * kPi)};
}

DensityPoint stable_density(double alpha, double t, double s) {
  if (!(alpha > 0.0) || !(alpha < 1.0)) domain_error("stable index must lie in (0, 1)");
  require_positive(t, "outer time t");
  if (!(s > 0.0)) return {t, s, 0.0};
  const double scale = std::pow(t, -1.0 / alpha);
  return {t, s, scale * stable_unit_density(alpha, s * scale)};
}

DensityPoint lamperti_density(double nu, double alpha, double w) {
  if (!(nu > 0.0) || !(nu < 1.0)) domain_error("Lamperti index nu must lie in (0, 1)");
  if (!(alpha > 0.0) || !(alpha <= 1.0)) domain_error("Lamperti exponent alpha must lie in (0, 1]");
  if (!(w > 0.0)) return {1.0, w, 0.0};
  const double e = nu / alpha;
  const double lw = std::log(w);
  const double u = std::exp(e * lw);
  const double c = std::cos(kPi * nu);
  const double s = std::sin(kPi * nu);
  const double den = (u + c) * (u + c) + s * s;
  return {1.0, w, s / (alpha * kPi) * std::exp((e - 1.0) * lw) / den};
}

DensityPoint inverse_stable_density(double nu, double t, double s) {
  require_positive(t, "outer time t");
  if (!(s >= 0.0)) return {t, s, 0.0};
  const double scale = std::pow(t, -nu);
  return {t, s, scale * wright_neg(nu, s * scale).value};
}

DensityPoint folded_cauchy_density(double scale, double w) {
  require_positive(scale, "Cauchy scale");
  if (!(w >= 0.0)) return {1.0, w, 0.0};
  return {1.0, w, 2.0 / kPi * scale / (w * w + scale * scale)};
}

DensityPoint omega_density(int n, double r) {
  if (n < 1) domain_error("omega_density needs n >= 1");
  if (!(r >= 0.0)) return {1.0, r, 0.0};
  const double theta = kPi / std::ldexp(1.0, n);
  return {1.0, r, std::sin(theta) / theta / (r * r + 2.0 * r * std::cos(theta) + 1.0)};
}

DensityPoint inverse_gaussian_density(double theta) {
  if (!(theta > 0.0)) return {1.0, theta, 0.0};
  return {1.0, theta, levy_fp_density(1.0, theta).value};
}

DensityPoint arcsine_density(double t, double s) {
  require_positive(t, "outer time t");
  if (!(s > 0.0) || !(s < t)) return {t, s, 0.0};
  return {t, s, 1.0 / (kPi * std::sqrt(s * (t - s)))};
}

}  // namespace birthsub
