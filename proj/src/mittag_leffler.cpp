#include <cfloat>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <string>

#include "birthsub/error.hpp"
#include "birthsub/specfun.hpp"

namespace birthsub {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kPi = std::numbers::pi;
// Production evaluator uses the series while |x|^(1/nu) stays below this.
constexpr double kSeriesReach = 6.0;
// Reference evaluator switches to the asymptotic expansion beyond this.
constexpr double kReferenceReach = 20.0;
// Production evaluator: far out on the negative axis the asymptotic expansion is
// exact to rounding and quadrature scales would underflow.
constexpr double kFarReach = 1e6;
constexpr int kMaxSeriesTerms = 20000;

void check_params(double nu, double gamma) {
  if (!(nu > 0.0) || !(nu <= 1.0)) domain_error("Mittag-Leffler order nu must lie in (0, 1]");
  if (!(gamma > 0.0) || !std::isfinite(gamma)) domain_error("Mittag-Leffler parameter gamma must be positive");
}

// |x| Gamma(nu h + gamma) / Gamma(nu h + nu + gamma): ratio of consecutive term
// magnitudes. Decreasing in h by log-convexity of Gamma.
long double term_ratio(long double log_abs_x, long double nu, long double gamma, int h) {
  return std::exp(log_abs_x + std::lgamma(nu * h + gamma) - std::lgamma(nu * h + nu + gamma));
}

struct SeriesSum {
  long double real = 0.0L, imag = 0.0L, abs_sum = 0.0L, tail = 0.0L;
};

// Sums |z|^h e^{i h theta} / Gamma(nu h + gamma) until a rigorous geometric
// tail bound is negligible.
SeriesSum power_series(long double nu, long double gamma, long double abs_z, long double theta) {
  SeriesSum s;
  const long double log_abs_z = std::log(abs_z);
  s.real = 1.0L / std::tgamma(gamma);
  s.abs_sum = std::abs(s.real);
  for (int h = 1; h <= kMaxSeriesTerms; ++h) {
    const long double mag = std::exp(h * log_abs_z - std::lgamma(nu * h + gamma));
    const long double phase = h * theta;
    s.real += mag * std::cos(phase);
    s.imag += theta == 0.0L ? 0.0L : mag * std::sin(phase);
    s.abs_sum += mag;
    const long double rho_next = term_ratio(log_abs_z, nu, gamma, h + 1);
    if (rho_next < 1.0L) {
      const long double next = mag * term_ratio(log_abs_z, nu, gamma, h);
      s.tail = next / (1.0L - rho_next);
      const long double scale = std::max(std::abs(s.real) + std::abs(s.imag), 1e-280L);
      if (s.tail <= 1e-20L * scale || s.tail <= 1e-300L) return s;
    }
  }
  throw Error(ErrorKind::NonConvergence, "Mittag-Leffler series did not converge", static_cast<double>(s.real));
}

SpecialValue from_series(const SeriesSum& s) {
  const double value = static_cast<double>(s.real);
  const double err = static_cast<double>(s.tail + 8.0L * LDBL_EPSILON * s.abs_sum) + kEps * std::abs(value);
  return {value, err};
}

// Collapsed Hankel-contour form, valid for 0 < nu < 1, 0 < gamma < 1 + nu and
// |arg z| != nu pi.
ComplexValue hankel(double nu, double gamma, std::complex<double> z) {
  const double s_gamma = sin_pi(gamma);
  const double s_diff = sin_pi(nu - gamma);
  const std::complex<double> rot = std::polar(1.0, kPi * nu);
  const std::complex<double> zr = z * rot;
  const std::complex<double> zc = z * std::conj(rot);
  auto kernel = [=](double r) {
    const double lr = std::log(r);
    const double rn = std::exp(nu * lr);
    const double w = std::exp((nu - gamma) * lr - r) / kPi;
    return w * (rn * s_gamma + z * s_diff) / ((rn - zr) * (rn - zc));
  };
  const HalfLineHints hints{1.0 + nu - gamma, 1.0};
  const auto re = quad_semi_infinite([&](double r) { return kernel(r).real(); }, kInnerSpec, hints);
  SpecialValue im{0.0, 0.0};
  if (z.imag() != 0.0) im = quad_semi_infinite([&](double r) { return kernel(r).imag(); }, kInnerSpec, hints);

  std::complex<double> value{re.value, im.value};
  double err = re.abs_err + im.abs_err;
  if (std::abs(std::arg(z)) < nu * kPi) {
    const std::complex<double> pole =
        std::pow(z, (1.0 - gamma) / nu) * std::exp(std::pow(z, 1.0 / nu)) / nu;
    value += pole;
    err += 4.0 * kEps * std::abs(pole);
  }
  return {value, err};
}

// E_{1,gamma}(x) = (1/Gamma(gamma)) int_0^1 exp(x (1 - u^(1/(gamma-1)))) du for gamma > 1.
SpecialValue unit_order(double gamma, double x) {
  if (gamma < 1.0) {
    const auto upper = unit_order(gamma + 1.0, x);
    return {rgamma(gamma) + x * upper.value, std::abs(x) * upper.abs_err + kEps * std::abs(rgamma(gamma))};
  }
  const double p = 1.0 / (gamma - 1.0);
  const auto q = quad_finite([=](double u) { return std::exp(x * (1.0 - std::pow(u, p))); }, 0.0, 1.0, kInnerSpec);
  const double rg = rgamma(gamma);
  return {rg * q.value, rg * q.abs_err};
}

}  // namespace

SpecialValue mittag_leffler_series(double nu, double gamma, double x) {
  check_params(nu, gamma);
  if (x == 0.0) return {rgamma(gamma), kEps * rgamma(gamma)};
  return from_series(power_series(nu, gamma, std::abs(x), x < 0.0 ? std::numbers::pi_v<long double> : 0.0L));
}

SpecialValue mittag_leffler_asymptotic(double nu, double gamma, double zeta) {
  check_params(nu, gamma);
  if (!(nu < 1.0)) domain_error("asymptotic expansion needs nu < 1");
  if (!(zeta > 0.0)) domain_error("asymptotic expansion needs zeta > 0");
  const double lz = std::log(zeta);
  // Envelope Gamma(1 - gamma + nu k) zeta^-k / pi bounds the k-th term.
  auto envelope = [&](int k) {
    const double a = 1.0 - gamma + nu * k;
    return a > 0.0 ? std::exp(log_gamma(a) - k * lz) / kPi : std::numeric_limits<double>::infinity();
  };
  double sum = 0.0, comp = 0.0;
  double err = std::numeric_limits<double>::infinity();
  for (int k = 1; k < 100000; ++k) {
    const double b = gamma - nu * k;
    double term;
    if (b > 0.0) {
      term = std::exp(-k * lz - log_gamma(b));
    } else {
      term = sin_pi(b) * std::exp(log_gamma(1.0 - b) - k * lz) / kPi;
    }
    if (k % 2 == 0) term = -term;
    const double t = sum + term;
    comp += std::abs(sum) >= std::abs(term) ? (sum - t) + term : (term - t) + sum;
    sum = t;
    const double e_now = envelope(k);
    const double e_next = envelope(k + 1);
    if (std::isfinite(e_now) && e_next >= e_now) {
      err = e_next;
      break;
    }
    if (e_next < 1e-300) {
      err = e_next;
      break;
    }
  }
  const double value = sum + comp;
  return {value, err + 4.0 * kEps * std::abs(value)};
}

SpecialValue mittag_leffler_reference(double nu, double zeta) {
  check_params(nu, 1.0);
  if (!(zeta >= 0.0)) domain_error("reference evaluator needs zeta >= 0");
  if (nu == 1.0) return {std::exp(-zeta), kEps * std::exp(-zeta)};
  if (zeta == 0.0 || std::pow(zeta, 1.0 / nu) <= kReferenceReach) return mittag_leffler_series(nu, 1.0, -zeta);
  return mittag_leffler_asymptotic(nu, 1.0, zeta);
}

double ml_kernel(double nu, double r) {
  if (!(r > 0.0)) return 0.0;
  const double lr = std::log(r);
  const double u = std::exp(nu * lr);
  const double c = std::cos(kPi * nu);
  const double s = std::sin(kPi * nu);
  const double den = (u + c) * (u + c) + s * s;
  return s / kPi * std::exp((nu - 1.0) * lr) / den;
}

SpecialValue mittag_leffler_integral(double nu, double zeta, const QuadratureSpec& spec) {
  if (!(nu > 0.0) || !(nu < 1.0)) domain_error("integral representation needs 0 < nu < 1");
  if (!(zeta >= 0.0)) domain_error("integral representation needs zeta >= 0");
  if (zeta == 0.0) return {1.0, 0.0};
  const double c = std::pow(zeta, 1.0 / nu);
  auto f = [=](double r) {
    const double e = r * c;
    return e > 745.0 ? 0.0 : ml_kernel(nu, r) * std::exp(-e);
  };
  return quad_semi_infinite(f, spec, {nu, std::min(1.0, 1.0 / c)});
}

SpecialValue mittag_leffler(double nu, double gamma, double x) {
  check_params(nu, gamma);
  if (std::isnan(x)) domain_error("Mittag-Leffler argument is NaN");
  if (nu == 1.0 && gamma == 1.0) {
    const double v = std::exp(x);
    return {v, kEps * v};
  }
  if (x == 0.0) return {rgamma(gamma), kEps * rgamma(gamma)};
  if (std::pow(std::abs(x), 1.0 / nu) <= kSeriesReach) return mittag_leffler_series(nu, gamma, x);
  if (nu == 1.0) return unit_order(gamma, x);
  if (x < 0.0 && std::pow(-x, 1.0 / nu) > kFarReach) return mittag_leffler_asymptotic(nu, gamma, -x);
  if (gamma >= 1.0 + nu) {
    const auto lower = mittag_leffler(nu, gamma - nu, x);
    return {(lower.value - rgamma(gamma - nu)) / x, (lower.abs_err + kEps) / std::abs(x)};
  }
  if (x < 0.0 && gamma == 1.0) return mittag_leffler_integral(nu, -x);
  const auto h = hankel(nu, gamma, {x, 0.0});
  return {h.value.real(), h.abs_err};
}

ComplexValue mittag_leffler(double nu, double gamma, std::complex<double> z) {
  check_params(nu, gamma);
  if (std::isnan(z.real()) || std::isnan(z.imag())) domain_error("Mittag-Leffler argument is NaN");
  if (z.imag() == 0.0) {
    const auto r = mittag_leffler(nu, gamma, z.real());
    return {{r.value, 0.0}, r.abs_err};
  }
  if (nu == 1.0 && gamma == 1.0) {
    const auto v = std::exp(z);
    return {v, kEps * std::abs(v)};
  }
  if (std::pow(std::abs(z), 1.0 / nu) <= kSeriesReach) {
    const auto s = power_series(nu, gamma, std::abs(z), std::arg(z));
    const std::complex<double> v{static_cast<double>(s.real), static_cast<double>(s.imag)};
    return {v, static_cast<double>(s.tail + 8.0L * LDBL_EPSILON * s.abs_sum) + kEps * std::abs(v)};
  }
  if (nu == 1.0) domain_error("complex E_{1,gamma} is only supported near the origin");
  if (gamma >= 1.0 + nu) {
    const auto lower = mittag_leffler(nu, gamma - nu, z);
    return {(lower.value - rgamma(gamma - nu)) / z, (lower.abs_err + kEps) / std::abs(z)};
  }
  return hankel(nu, gamma, z);
}

}  // namespace birthsub
