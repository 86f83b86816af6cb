#include <cmath>
#include <limits>
#include <numbers>

#include "birthsub/specfun.hpp"

namespace birthsub {

double sin_pi(double x) {
  double r = std::fmod(x, 2.0);
  if (r < 0.0) r += 2.0;
  if (r == 0.0 || r == 1.0) return 0.0;
  if (r == 0.5) return 1.0;
  if (r == 1.5) return -1.0;
  return std::sin(std::numbers::pi * r);
}

namespace {

constexpr double kLanczosG = 7.0;
constexpr double kLanczos[9] = {0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
                                771.32342877765313,   -176.61502916214059,   12.507343278686905,
                                -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};

bool is_nonpositive_integer(double x) { return x <= 0.0 && x == std::floor(x); }

// Lanczos series for x >= 1/2, returns (t, a) with Gamma(x) = sqrt(2pi) t^(x-1/2) e^-t a.
struct LanczosParts {
  double t, a;
};
LanczosParts lanczos(double x) {
  const double xm1 = x - 1.0;
  double a = kLanczos[0];
  for (int i = 1; i < 9; ++i) a += kLanczos[i] / (xm1 + i);
  return {xm1 + kLanczosG + 0.5, a};
}

}  // namespace

double gamma_fn(double x) {
  if (std::isnan(x)) return x;
  if (is_nonpositive_integer(x)) return std::numeric_limits<double>::quiet_NaN();
  if (x < 0.5) return std::numbers::pi / (sin_pi(x) * gamma_fn(1.0 - x));
  if (x <= 21.0 && x == std::floor(x)) {
    double f = 1.0;
    for (int i = 2; i < static_cast<int>(x); ++i) f *= i;
    return f;
  }
  if (x > 171.7) return std::numeric_limits<double>::infinity();
  const auto [t, a] = lanczos(x);
  // Split the power to delay overflow near the top of the range.
  const double half_pow = std::pow(t, 0.5 * (x - 0.5));
  return std::sqrt(2.0 * std::numbers::pi) * half_pow * (half_pow * std::exp(-t)) * a;
}

double log_gamma(double x) {
  if (std::isnan(x)) return x;
  if (is_nonpositive_integer(x)) return std::numeric_limits<double>::infinity();
  if (x < 0.5) return std::log(std::numbers::pi / std::abs(sin_pi(x))) - log_gamma(1.0 - x);
  const auto [t, a] = lanczos(x);
  return 0.5 * std::log(2.0 * std::numbers::pi) + (x - 0.5) * std::log(t) - t + std::log(a);
}

double rgamma(double x) {
  if (std::isnan(x)) return x;
  if (is_nonpositive_integer(x)) return 0.0;
  if (x < 0.5) {
    // 1/Gamma(x) = sin(pi x) Gamma(1 - x) / pi
    const double s = sin_pi(x);
    if (1.0 - x < 170.0) return s * gamma_fn(1.0 - x) / std::numbers::pi;
    const double mag = std::exp(log_gamma(1.0 - x)) / std::numbers::pi;
    return s * mag;
  }
  if (x < 170.0) return 1.0 / gamma_fn(x);
  return std::exp(-log_gamma(x));
}

}  // namespace birthsub
