#include "birthsub/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <string>
#include <tuple>
#include <vector>

#include "birthsub/error.hpp"

namespace birthsub {

void QuadratureSpec::validate() const {
  if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) {
    throw Error(ErrorKind::Validation, "quadrature tolerances must be positive");
  }
  if (max_subdivisions < 1) {
    throw Error(ErrorKind::Validation, "max_subdivisions must be at least 1");
  }
}

namespace {

// Kronrod 15-point abscissae; odd indices are the embedded 7-point Gauss nodes.
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                           0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double a, b, value, err;
  bool operator<(const Segment& o) const { return err < o.err; }
};

Segment gauss_kronrod(const Integrand& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double res_g = fc * kWg[3];
  double res_k = fc * kWgk[7];
  double res_abs = std::abs(res_k);
  double fv1[7], fv2[7];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    const double f1 = f(center - dx);
    const double f2 = f(center + dx);
    fv1[j] = f1;
    fv2[j] = f2;
    res_k += kWgk[j] * (f1 + f2);
    res_abs += kWgk[j] * (std::abs(f1) + std::abs(f2));
    if (j % 2 == 1) res_g += kWg[j / 2] * (f1 + f2);
  }
  const double mean = 0.5 * res_k;
  double res_asc = kWgk[7] * std::abs(fc - mean);
  for (int j = 0; j < 7; ++j) res_asc += kWgk[j] * (std::abs(fv1[j] - mean) + std::abs(fv2[j] - mean));

  const double value = res_k * half;
  res_abs *= std::abs(half);
  res_asc *= std::abs(half);
  double err = std::abs((res_k - res_g) * half);
  if (res_asc != 0.0 && err != 0.0) err = res_asc * std::min(1.0, std::pow(200.0 * err / res_asc, 1.5));
  constexpr double eps = std::numeric_limits<double>::epsilon();
  if (res_abs > std::numeric_limits<double>::min() / (50.0 * eps)) err = std::max(50.0 * eps * res_abs, err);
  if (!std::isfinite(value)) err = std::numeric_limits<double>::infinity();
  return {a, b, value, err};
}

QuadResult adaptive(const Integrand& f, const std::vector<double>& breaks, const QuadratureSpec& spec) {
  spec.validate();
  std::priority_queue<Segment> heap;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) heap.push(gauss_kronrod(f, breaks[i], breaks[i + 1]));

  auto totals = [&heap]() {
    // Copy of the heap contents is cheap at the subdivision limits used here.
    auto copy = heap;
    double sum = 0.0, comp = 0.0, err = 0.0;
    while (!copy.empty()) {
      const Segment& s = copy.top();
      const double t = sum + s.value;
      comp += std::abs(sum) >= std::abs(s.value) ? (sum - t) + s.value : (s.value - t) + sum;
      sum = t;
      err += s.err;
      copy.pop();
    }
    return std::pair{sum + comp, err};
  };

  int subdivisions = static_cast<int>(heap.size());
  double value = 0.0, err = 0.0;
  double running_value = 0.0, running_err = 0.0;
  {
    auto [v, e] = totals();
    running_value = v;
    running_err = e;
  }
  while (true) {
    const double target = std::max(spec.abs_tol, spec.rel_tol * std::abs(running_value));
    if (running_err <= target || !std::isfinite(running_value)) break;
    if (subdivisions >= spec.max_subdivisions) break;
    Segment worst = heap.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) break;  // interval exhausted at machine resolution
    heap.pop();
    const Segment left = gauss_kronrod(f, worst.a, mid);
    const Segment right = gauss_kronrod(f, mid, worst.b);
    heap.push(left);
    heap.push(right);
    ++subdivisions;
    running_value += left.value + right.value - worst.value;
    running_err += left.err + right.err - worst.err;
    if (subdivisions % 64 == 0) {
      auto [v, e] = totals();
      running_value = v;
      running_err = e;
    }
  }
  std::tie(value, err) = totals();
  QuadResult out;
  out.value = value;
  out.abs_err = err;
  out.subdivisions = subdivisions;
  out.converged = std::isfinite(value) && err <= std::max(spec.abs_tol, spec.rel_tol * std::abs(value));
  return out;
}

SpecialValue require(const QuadResult& r, const char* where) {
  if (!r.converged) {
    throw Error(ErrorKind::NonConvergence,
                std::string(where) + ": error estimate " + std::to_string(r.abs_err) + " after " +
                    std::to_string(r.subdivisions) + " subdivisions",
                r.value);
  }
  return {r.value, r.abs_err};
}

}  // namespace

QuadResult integrate_finite(const Integrand& f, double a, double b, const QuadratureSpec& spec) {
  if (a == b) return {0.0, 0.0, 0, true};
  return adaptive(f, {a, b}, spec);
}

QuadResult integrate_half_line(const Integrand& f, const QuadratureSpec& spec, HalfLineHints hints) {
  if (!(hints.power > 0.0) || !(hints.scale > 0.0) || !std::isfinite(hints.scale)) {
    throw Error(ErrorKind::Validation, "half-line hints need positive power and finite positive scale");
  }
  const double inv_power = 1.0 / hints.power;
  const double log_scale = std::log(hints.scale);
  auto mapped = [&](double x) -> double {
    const double one_minus = (1.0 - x) * (1.0 + x);
    if (one_minus <= 0.0) return 0.0;
    const double y = x / one_minus;
    const double log_r = log_scale + y * inv_power;
    if (log_r > 709.0 || log_r < -745.0) return 0.0;
    const double r = std::exp(log_r);
    if (r == 0.0 || !std::isfinite(r)) return 0.0;
    const double v = f(r);
    if (v == 0.0) return 0.0;
    return v * r * inv_power * (1.0 + x * x) / (one_minus * one_minus);
  };
  std::vector<double> breaks;
  constexpr int kPieces = 8;
  for (int i = 0; i <= kPieces; ++i) breaks.push_back(-1.0 + 2.0 * i / kPieces);
  return adaptive(mapped, breaks, spec);
}

FixedRule kronrod_panels(double a, double b, int panels) {
  if (panels < 1 || !(b > a)) throw Error(ErrorKind::Validation, "kronrod_panels needs b > a and panels >= 1");
  FixedRule rule;
  const double width = (b - a) / panels;
  const double half = 0.5 * width;
  auto push = [&rule](double x, double wk, double wg) {
    rule.x.push_back(x);
    rule.w_kronrod.push_back(wk);
    rule.w_gauss.push_back(wg);
  };
  for (int p = 0; p < panels; ++p) {
    const double center = a + (p + 0.5) * width;
    for (int j = 0; j < 7; ++j) {
      const double wg = j % 2 == 1 ? kWg[j / 2] * half : 0.0;
      push(center - half * kXgk[j], kWgk[j] * half, wg);
      push(center + half * kXgk[j], kWgk[j] * half, wg);
    }
    push(center, kWgk[7] * half, kWg[3] * half);
  }
  return rule;
}

SpecialValue quad_finite(const Integrand& f, double a, double b, const QuadratureSpec& spec) {
  return require(integrate_finite(f, a, b, spec), "quad_finite");
}

SpecialValue quad_semi_infinite(const Integrand& f, const QuadratureSpec& spec, HalfLineHints hints) {
  return require(integrate_half_line(f, spec, hints), "quad_semi_infinite");
}

}  // namespace birthsub
