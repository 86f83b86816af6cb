#include <cfloat>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

#include "birthsub/error.hpp"
#include "birthsub/specfun.hpp"

namespace birthsub {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kPi = std::numbers::pi;
constexpr double kEulerGamma = 0.57721566490153286060651209008240243;

// M-Wright series: sum (-xi)^r / (r! Gamma(1 - nu(r+1))), with the reflection
// 1/Gamma(1-y) = Gamma(y) sin(pi y) / pi.
SpecialValue wright_series(double nu, double xi) {
  const long double pi = std::numbers::pi_v<long double>;
  const long double lx = xi > 0.0 ? std::log(static_cast<long double>(xi)) : 0.0L;
  long double sum = 0.0L, abs_sum = 0.0L, tail = 0.0L;
  for (int r = 0; r < 5000; ++r) {
    const long double y = static_cast<long double>(nu) * (r + 1);
    const long double env = std::exp((xi > 0.0 ? r * lx : 0.0L) + std::lgamma(y) - std::lgamma(r + 1.0L)) / pi;
    const long double s = static_cast<long double>(sin_pi(static_cast<double>(y)));
    const long double term = (r % 2 == 0 ? 1.0L : -1.0L) * env * s;
    sum += term;
    abs_sum += env;
    if (xi == 0.0) break;
    // Ratio of successive envelopes; decreasing once past its peak.
    const long double y2 = y + nu;
    const long double ratio = std::exp(lx + std::lgamma(y2) - std::lgamma(y) - std::log(r + 1.0L));
    const long double ratio2 = std::exp(lx + std::lgamma(y2 + nu) - std::lgamma(y2) - std::log(r + 2.0L));
    if (ratio2 < ratio && ratio2 < 0.5L) {
      tail = env * ratio / (1.0L - ratio2);
      if (tail <= 1e-20L * std::max(std::abs(sum), 1e-280L)) break;
    }
  }
  const double value = static_cast<double>(sum);
  return {value, static_cast<double>(tail + 8.0L * LDBL_EPSILON * abs_sum) + kEps * std::abs(value)};
}

// Kanter form: M(y) = (1/(1-nu)) y^(nu/(1-nu)) (1/pi) int_0^pi a(u) e^{-a(u) y^(1/(1-nu))} du.
SpecialValue wright_kanter(double nu, double xi) {
  const double ly = std::log(xi);
  const double c = std::exp(ly / (1.0 - nu));
  if (c > 1e300) return {0.0, 0.0};
  auto f = [=](double u) {
    const double a = kanter_a(nu, u);
    const double e = a * c;
    return e > 745.0 ? 0.0 : a * std::exp(-e);
  };
  const auto q = integrate_finite(f, 0.0, kPi, {1e-12, 1e-300, 4000});
  const double pre = std::exp(nu / (1.0 - nu) * ly) / ((1.0 - nu) * kPi);
  if (!q.converged && q.abs_err > 1e-10 * std::abs(q.value)) {
    throw Error(ErrorKind::NonConvergence, "Wright function quadrature did not converge", pre * q.value);
  }
  return {pre * q.value, pre * q.abs_err + kEps * std::abs(pre * q.value)};
}

}  // namespace

SpecialValue wright_neg(double nu, double xi) {
  if (!(nu > 0.0) || !(nu < 1.0)) domain_error("Wright function order must lie in (0, 1)");
  if (!(xi >= 0.0)) domain_error("Wright function argument must be non-negative");
  if (nu == 0.5) {
    const double v = std::exp(-0.25 * xi * xi) / std::sqrt(kPi);
    return {v, 2.0 * kEps * v};
  }
  if (std::pow(xi, 1.0 / (1.0 - nu)) <= 4.0) return wright_series(nu, xi);
  return wright_kanter(nu, xi);
}

SpecialValue bessel_i0_scaled(double z) {
  if (!(z >= 0.0)) domain_error("bessel_i0 needs z >= 0");
  if (z <= 20.0) {
    const double q = 0.25 * z * z;
    double term = 1.0, sum = 1.0;
    for (int k = 1; k < 200 && term > kEps * sum * 1e-2; ++k) {
      term *= q / (static_cast<double>(k) * k);
      sum += term;
    }
    const double v = std::exp(-z) * sum;
    return {v, 4.0 * kEps * v};
  }
  // e^{-z} I0(z) ~ (2 pi z)^{-1/2} sum_k ((2k-1)!!)^2 / (k! (8z)^k)
  double term = 1.0, sum = 1.0;
  for (int k = 1; k < 60; ++k) {
    const double next = term * (2.0 * k - 1.0) * (2.0 * k - 1.0) / (8.0 * k * z);
    if (next >= term) break;
    term = next;
    sum += term;
    if (term < kEps * sum * 1e-2) break;
  }
  const double v = sum / std::sqrt(2.0 * kPi * z);
  return {v, 4.0 * kEps * v};
}

SpecialValue bessel_i0(double z) {
  const auto s = bessel_i0_scaled(z);
  const double e = std::exp(z);
  return {s.value * e, s.abs_err * e};
}

ComplexValue exp_integral_e1(std::complex<double> z) {
  if (z.imag() == 0.0 && !(z.real() > 0.0)) domain_error("exp_integral_e1: argument on the branch cut");
  const double az = std::abs(z);
  if (az <= 1.5 || (z.real() < 0.0 && az <= 10.0)) {
    // E1(z) = -gamma - log z - sum_{k>=1} (-z)^k / (k k!)
    std::complex<double> term = 1.0, sum = 0.0;
    double abs_sum = 0.0;
    for (int k = 1; k < 500; ++k) {
      term *= -z / static_cast<double>(k);
      const auto add = term / static_cast<double>(k);
      sum += add;
      abs_sum += std::abs(add);
      if (std::abs(add) < 1e-3 * kEps * std::abs(sum)) break;
    }
    const auto v = -kEulerGamma - std::log(z) - sum;
    return {v, 4.0 * kEps * (abs_sum + std::abs(v) + 1.0)};
  }
  // Modified Lentz on e^{-z} / (z+1 - 1/(z+3 - 4/(z+5 - ...))).
  constexpr double tiny = 1e-300;
  std::complex<double> b = z + 1.0;
  std::complex<double> c = 1.0 / tiny;
  std::complex<double> d = 1.0 / b;
  std::complex<double> h = d;
  bool converged = false;
  for (int i = 1; i < 100000; ++i) {
    const double a = -static_cast<double>(i) * i;
    b += 2.0;
    d = 1.0 / (a * d + b);
    c = b + a / c;
    const auto del = c * d;
    h *= del;
    if (std::abs(del - 1.0) < kEps) {
      converged = true;
      break;
    }
  }
  if (!converged) throw Error(ErrorKind::NonConvergence, "exp_integral_e1 continued fraction did not converge");
  const auto v = h * std::exp(-z);
  return {v, 16.0 * kEps * std::abs(v)};
}

}  // namespace birthsub
