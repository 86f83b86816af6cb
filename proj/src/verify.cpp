#include "birthsub/verify.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>

#include <boost/math/special_functions/gamma.hpp>
#include <json.hpp>

#include "birthsub/error.hpp"
#include "birthsub/specfun.hpp"

namespace birthsub {

namespace {

using json = nlohmann::json;
constexpr double kPi = std::numbers::pi;

// Quadrature settings for the checks: well inside every acceptance tolerance.
constexpr QuadratureSpec kCheckSpec{1e-10, 1e-14, 4000};
// Inner integrals of the nested index-product forms.
constexpr QuadratureSpec kNestedSpec{1e-9, 1e-13, 2000};

std::string fmt(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

double ml_neg(double nu, double x) {
  if (nu == 1.0) return std::exp(-x);
  return mittag_leffler(nu, 1.0, -x).value;
}

double ml_ref(double nu, double zeta) { return mittag_leffler_reference(nu, zeta).value; }

double half_line(const Integrand& f, HalfLineHints hints, const QuadratureSpec& spec = kCheckSpec) {
  return quad_semi_infinite(f, spec, hints).value;
}

void check_index(double v, const char* name) {
  if (!(v > 0.0) || !(v <= 1.0)) throw Error(ErrorKind::Validation, std::string(name) + " must lie in (0, 1]");
}

// Evaluates both sides; quadrature failure becomes a failed report carrying
// the best estimate instead of an exception.
IdentityReport guarded(std::string id, ParamList params, double tol, const std::function<double()>& lhs,
                       const std::function<double()>& rhs) {
  double l = std::numeric_limits<double>::quiet_NaN(), r = l;
  std::string note;
  try {
    l = lhs();
    r = rhs();
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::NonConvergence) throw;
    note = e.what();
    if (e.best_estimate()) (std::isnan(l) ? l : r) = *e.best_estimate();
  }
  auto rep = make_report(std::move(id), std::move(params), l, r, tol);
  if (!note.empty()) {
    rep.note = note;
    rep.pass = false;
  }
  return rep;
}

// sum_m c_m g(lambda_m) over the states n0..k.
double spectral_eval(const RateSchedule& s, int k, const std::function<double(double)>& g) {
  const auto c = spectral_coeffs(s, k);
  std::vector<double> phi(c.size());
  for (std::size_t i = 0; i < phi.size(); ++i) phi[i] = g(s.rate(s.n0() + static_cast<int>(i)));
  return spectral_sum(c, phi).value;
}

void check_k(const RateSchedule& s, int k) {
  if (k < s.n0() || k > s.kmax()) throw Error(ErrorKind::Validation, "state k outside the schedule");
}

struct Bin {
  double expected = 0.0;  // probability (one-sample) or pooled count
  double a = 0.0;
  double b = 0.0;
};

// Merges adjacent bins until each group clears `ok`; a short final group joins
// the one before it.
std::vector<Bin> merge_bins(const std::vector<Bin>& bins, const std::function<bool(const Bin&)>& ok) {
  std::vector<Bin> out;
  Bin cur;
  bool open = false;
  for (const auto& b : bins) {
    cur.expected += b.expected;
    cur.a += b.a;
    cur.b += b.b;
    open = true;
    if (ok(cur)) {
      out.push_back(cur);
      cur = {};
      open = false;
    }
  }
  if (open) {
    if (out.empty()) {
      out.push_back(cur);
    } else {
      out.back().expected += cur.expected;
      out.back().a += cur.a;
      out.back().b += cur.b;
    }
  }
  return out;
}

void finish_gof(GofReport& g) {
  g.p_value = std::clamp(boost::math::gamma_q(0.5 * g.dof, 0.5 * g.chi_square), 0.0, 1.0);
  g.tv = std::clamp(g.tv, 0.0, 1.0);
  g.pass = g.tv < g.tv_tolerance && g.p_value > kMinPValue && g.overflow_fraction <= kMaxOverflow;
}

}  // namespace

IdentityReport make_report(std::string id, ParamList params, double lhs, double rhs, double tolerance,
                           bool separation) {
  IdentityReport r;
  r.id = std::move(id);
  r.params = std::move(params);
  r.lhs = lhs;
  r.rhs = rhs;
  r.abs_diff = std::abs(lhs - rhs);
  r.tolerance = tolerance;
  r.separation = separation;
  const bool finite = std::isfinite(r.abs_diff);
  r.pass = finite && (separation ? r.abs_diff > tolerance : r.abs_diff <= tolerance);
  return r;
}

// ---------------------------------------------------------------------------
// Goodness of fit.

GofReport gof_compare(const EmpiricalPmf& empirical, const Pmf& analytic) {
  if (empirical.n_paths == 0) throw Error(ErrorKind::Validation, "empirical pmf has no paths");
  if (empirical.k_first != analytic.k_first || empirical.k_last() != analytic.k_last()) {
    throw Error(ErrorKind::Validation, "empirical and analytic supports differ");
  }
  const double n = static_cast<double>(empirical.n_paths);
  std::vector<Bin> bins;
  double mass = 0.0;
  for (int k = empirical.k_first; k <= empirical.k_last(); ++k) {
    const double p = std::max(0.0, analytic.at(k));
    mass += p;
    bins.push_back({p, double(empirical.counts[static_cast<std::size_t>(k - empirical.k_first)]), 0.0});
  }
  const double tail = std::isfinite(analytic.tail_mass) ? analytic.tail_mass : std::max(0.0, 1.0 - mass);
  bins.push_back({tail, double(empirical.overflow), 0.0});

  GofReport g;
  g.n_paths = empirical.n_paths;
  g.overflow_fraction = empirical.overflow_fraction();
  for (const auto& b : bins) g.tv += 0.5 * std::abs(b.a / n - b.expected);

  const auto groups = merge_bins(bins, [n](const Bin& b) { return n * b.expected >= 5.0; });
  if (groups.size() < 2) throw Error(ErrorKind::DegenerateSupport, "all expected mass falls in one merged bin");
  for (const auto& b : groups) {
    const double e = n * b.expected;
    // An observed count in a bin of zero expected mass is infinitely unlikely.
    g.chi_square += e > 0.0 ? (b.a - e) * (b.a - e) / e : (b.a > 0.0 ? HUGE_VAL : 0.0);
  }
  g.dof = static_cast<int>(groups.size()) - 1;
  finish_gof(g);
  return g;
}

GofReport gof_compare(const EmpiricalPmf& a, const EmpiricalPmf& b) {
  if (a.n_paths == 0 || b.n_paths == 0) throw Error(ErrorKind::Validation, "empirical pmf has no paths");
  if (a.k_first != b.k_first || a.k_last() != b.k_last()) {
    throw Error(ErrorKind::Validation, "empirical supports differ");
  }
  const double na = static_cast<double>(a.n_paths), nb = static_cast<double>(b.n_paths);
  std::vector<Bin> bins;
  for (std::size_t i = 0; i < a.counts.size(); ++i) {
    bins.push_back({double(a.counts[i] + b.counts[i]), double(a.counts[i]), double(b.counts[i])});
  }
  bins.push_back({double(a.overflow + b.overflow), double(a.overflow), double(b.overflow)});

  GofReport g;
  g.n_paths = std::min(a.n_paths, b.n_paths);
  g.overflow_fraction = std::max(a.overflow_fraction(), b.overflow_fraction());
  for (const auto& x : bins) g.tv += 0.5 * std::abs(x.a / na - x.b / nb);

  const double total = na + nb;
  const auto groups = merge_bins(bins, [&](const Bin& x) {
    const double p = x.expected / total;
    return std::min(na, nb) * p >= 5.0;
  });
  if (groups.size() < 2) throw Error(ErrorKind::DegenerateSupport, "all pooled mass falls in one merged bin");
  for (const auto& x : groups) {
    const double p = x.expected / total;
    const double ea = na * p, eb = nb * p;
    g.chi_square += (x.a - ea) * (x.a - ea) / ea + (x.b - eb) * (x.b - eb) / eb;
  }
  g.dof = static_cast<int>(groups.size()) - 1;
  finish_gof(g);
  return g;
}

// ---------------------------------------------------------------------------
// Special-function identities.

IdentityReport check_mitta_int(double nu, double x, double tol) {
  if (!(nu > 0.0) || !(nu < 1.0)) throw Error(ErrorKind::Validation, "nu must lie in (0, 1)");
  if (!(x < 0.0)) throw Error(ErrorKind::Validation, "mitta-int needs x < 0");
  return guarded(
      "mitta-int", {{"nu", nu}, {"x", x}}, tol, [&] { return ml_ref(nu, -x); },
      [&] { return mittag_leffler_integral(nu, -x).value; });
}

IdentityReport check_mitlap(double nu, double zeta, double z, double tol) {
  check_index(nu, "nu");
  if (!(zeta > 0.0) || !(z > 0.0)) throw Error(ErrorKind::Validation, "mitlap needs zeta > 0 and z > 0");
  return guarded(
      "mitlap", {{"nu", nu}, {"zeta", zeta}, {"z", z}}, tol,
      [&] {
        return half_line([&](double t) { return std::exp(-z * t) * ml_neg(nu, zeta * std::pow(t, nu)); },
                         {1.0, 1.0 / z});
      },
      [&] { return std::pow(z, nu - 1.0) / (std::pow(z, nu) + zeta); });
}

IdentityReport check_ackard(double nu, double lambda, double t, double tol) {
  if (!(nu > 0.0) || !(nu < 1.0)) throw Error(ErrorKind::Validation, "nu must lie in (0, 1)");
  if (!(lambda > 0.0) || !(t > 0.0)) throw Error(ErrorKind::Validation, "ackard needs lambda > 0 and t > 0");
  return guarded(
      "ackard", {{"nu", nu}, {"lambda", lambda}, {"t", t}}, tol,
      [&] {
        return half_line(
            [&](double s) { return std::exp(-lambda * s) * inverse_stable_density(nu, t, s).value; },
            {1.0, std::pow(t, nu)});
      },
      [&] { return ml_ref(nu, lambda * std::pow(t, nu)); });
}

std::pair<IdentityReport, IdentityReport> check_mmm(double nu, double z, double t, double tol) {
  if (!(nu > 0.0) || !(nu < 1.0)) throw Error(ErrorKind::Validation, "nu must lie in (0, 1)");
  if (!(z > 0.0) || !(t > 0.0)) throw Error(ErrorKind::Validation, "mmm needs z > 0 and t > 0");
  const ParamList params{{"nu", nu}, {"z", z}, {"t", t}};
  const double a = z * std::pow(t, nu);
  const double c = std::pow(z, 1.0 / nu) * t;
  auto lhs = [&] { return ml_ref(nu, a); };
  auto wright = guarded("mmm-wright", params, tol, lhs, [&] {
    return half_line([&](double r) { return std::exp(-r * a) * wright_neg(nu, r).value; }, {1.0, 1.0});
  });
  auto kernel = guarded("mmm-kernel", params, tol, lhs, [&] {
    return half_line([&](double r) { return ml_kernel(nu, r) * std::exp(-r * c); }, {nu, std::min(1.0, 1.0 / c)});
  });
  return {wright, kernel};
}

std::pair<IdentityReport, IdentityReport> check_gen_mitta(double nu, double alpha, double lambda, double t,
                                                          double tol) {
  check_index(nu, "nu");
  check_index(alpha, "alpha");
  if (!(lambda > 0.0) || !(t > 0.0)) throw Error(ErrorKind::Validation, "gen-mitta needs lambda > 0 and t > 0");
  const ParamList params{{"nu", nu}, {"alpha", alpha}, {"lambda", lambda}, {"t", t}};
  auto lhs = [&] { return ml_ref(nu * alpha, lambda * std::pow(t, nu * alpha)); };
  // int K_a(r) E_b(-r lambda^(1/a) t^b) dr, with K_1 a point mass at 1.
  auto form = [&](double a, double b) {
    const double c = std::pow(lambda, 1.0 / a) * std::pow(t, b);
    if (a == 1.0) return ml_neg(b, c);
    return half_line([&](double r) { return ml_kernel(a, r) * ml_neg(b, r * c); }, {a, 1.0});
  };
  return {guarded("gen-mitta", params, tol, lhs, [&] { return form(nu, alpha); }),
          guarded("gen-mitta2", params, tol, lhs, [&] { return form(alpha, nu); })};
}

IdentityReport check_triple_index(double nu, double alpha, double beta, double lambda, double t, double tol) {
  check_index(nu, "nu");
  check_index(alpha, "alpha");
  check_index(beta, "beta");
  if (!(lambda > 0.0) || !(t > 0.0)) throw Error(ErrorKind::Validation, "triple-index needs lambda > 0 and t > 0");
  const double c = std::pow(lambda, 1.0 / (nu * alpha)) * std::pow(t, beta);
  auto inner = [&](double r) {
    const double cr = std::pow(r, 1.0 / alpha) * c;
    if (alpha == 1.0) return ml_neg(beta, cr);
    return quad_semi_infinite([&](double w) { return ml_kernel(alpha, w) * ml_neg(beta, w * cr); }, kNestedSpec,
                              {alpha, 1.0})
        .value;
  };
  return guarded(
      "triple-index", {{"nu", nu}, {"alpha", alpha}, {"beta", beta}, {"lambda", lambda}, {"t", t}}, tol,
      [&] { return ml_ref(nu * alpha * beta, lambda * std::pow(t, nu * alpha * beta)); },
      [&] {
        if (nu == 1.0) return inner(1.0);
        return quad_semi_infinite([&](double r) { return ml_kernel(nu, r) * inner(r); }, {1e-8, 1e-12, 2000},
                                  {nu, 1.0})
            .value;
      });
}

// ---------------------------------------------------------------------------
// Renewal structure.

IdentityReport check_renewal_convolution(const RateSchedule& s, double nu, int k, double mu, double tol) {
  check_index(nu, "nu");
  if (k != 1 && k != 2) throw Error(ErrorKind::Validation, "renewal check covers k = 1 and k = 2");
  if (s.kmax() < 2) throw Error(ErrorKind::Validation, "renewal check needs at least two rates");
  if (!(mu > 0.0)) throw Error(ErrorKind::Validation, "renewal check needs mu > 0");
  auto density = [&](double x) {
    return k == 1 ? waiting_time_density(s, nu, 1, x) : two_step_density(s, nu, x);
  };
  return guarded(
      "renewal", {{"nu", nu}, {"k", k}, {"mu", mu}}, tol,
      [&] { return half_line([&](double x) { return std::exp(-mu * x) * density(x); }, {nu, 1.0 / mu}); },
      [&] {
        double prod = 1.0;
        for (int j = 1; j <= k; ++j) prod *= s.rate(j) / (std::pow(mu, nu) + s.rate(j));
        return prod;
      });
}

// ---------------------------------------------------------------------------
// Governing equations.

IdentityReport check_fra(const RateSchedule& s, int k, double t, double tol) {
  check_k(s, k);
  if (!(t > kFdStep)) throw Error(ErrorKind::Validation, "fra check needs t > finite-difference step");
  const double h = kFdStep;
  const double pk = classical_pmf(s, k, t);
  const double prev = k > s.n0() ? s.rate(k - 1) * classical_pmf(s, k - 1, t) : 0.0;
  const double scale = s.rate(k) * pk + prev;
  const double fd = (classical_pmf(s, k, t + h) - classical_pmf(s, k, t - h)) / (2.0 * h);
  const double rhs = -s.rate(k) * pk + prev;
  return make_report("fra", {{"k", k}, {"t", t}, {"scale", scale}}, fd / scale, rhs / scale, tol);
}

IdentityReport check_eq_sec(const RateSchedule& s, int k, double t, double tol) {
  check_k(s, k);
  if (s.n0() != 1) throw Error(ErrorKind::Validation, "first-passage compositions need n0 = 1");
  if (!(t >= 0.0)) throw Error(ErrorKind::Validation, "time t must be >= 0");
  auto phi = [t](double l) { return std::exp(-t * std::sqrt(2.0 * l)); };
  const double lhs = spectral_eval(s, k, [&](double l) { return 2.0 * l * phi(l); });
  double rhs = s.rate(k) * spectral_eval(s, k, phi);
  if (k > 1) rhs -= s.rate(k - 1) * spectral_eval(s, k - 1, phi);
  return make_report("eq-sec", {{"k", k}, {"t", t}}, lhs, 2.0 * rhs, tol);
}

IdentityReport check_olidata(const RateSchedule& s, int n, int k, double t, double tol) {
  check_k(s, k);
  if (s.n0() != 1) throw Error(ErrorKind::Validation, "first-passage compositions need n0 = 1");
  if (n < 1 || n > 4) throw Error(ErrorKind::Validation, "olidata check covers 1 <= n <= 4");
  if (!(t >= 0.0)) throw Error(ErrorKind::Validation, "time t must be >= 0");
  const double e = std::ldexp(1.0, -n);
  auto rate = [&](double l) { return std::pow(l, e) * std::pow(2.0, 1.0 - e); };
  auto phi = [&](double l) { return std::exp(-t * rate(l)); };
  // r^(2^n) by n squarings, scaled by 2^-(2^n - 1).
  auto deriv = [&](double l) {
    double d = rate(l);
    for (int i = 0; i < n; ++i) d *= d;
    return std::ldexp(d, -((1 << n) - 1)) * phi(l);
  };
  const double lhs = spectral_eval(s, k, deriv);
  double rhs = s.rate(k) * spectral_eval(s, k, phi);
  if (k > 1) rhs -= s.rate(k - 1) * spectral_eval(s, k - 1, phi);
  return make_report("olidata", {{"n", n}, {"k", k}, {"t", t}}, lhs, rhs, tol);
}

IdentityReport check_cauchy_ode(const RateSchedule& s, int k, double t, double tol) {
  check_k(s, k);
  if (s.n0() != 1) throw Error(ErrorKind::Validation, "cauchy-abs needs n0 = 1");
  if (!(t > kFdStep)) throw Error(ErrorKind::Validation, "cauchy ODE check needs t > finite-difference step");
  const double h = kFdStep;
  auto p = [&](int j, double x) { return j >= 1 ? cauchy_abs_pmf(s, j, x) : 0.0; };
  auto l = [&](int j) { return j >= 1 ? s.rate(j) : 0.0; };
  const double fd = (p(k, t + h) - 2.0 * p(k, t) + p(k, t - h)) / (h * h);
  double rhs = -l(k) * l(k) * p(k, t) + l(k - 1) * (l(k) + l(k - 1)) * p(k - 1, t) - l(k - 1) * l(k - 2) * p(k - 2, t);
  // sum_m c_m lambda_m is lambda_1 for k = 1, -lambda_1 for k = 2 and 0 beyond.
  if (k == 1) rhs += 2.0 * l(1) / (kPi * t);
  if (k == 2) rhs -= 2.0 * l(1) / (kPi * t);
  return make_report("cauchy-ode", {{"k", k}, {"t", t}}, fd, rhs, tol);
}

// ---------------------------------------------------------------------------
// Subordination and distributional identities.

IdentityReport check_subordination(const RateSchedule& s, Composition c, const CompositionParams& params, int k,
                                   double t, double tol) {
  ParamList pl{{"k", k}, {"t", t}};
  if (params.nu != 1.0) pl.emplace_back("nu", params.nu);
  if (params.alpha != 1.0) pl.emplace_back("alpha", params.alpha);
  if (params.n != 1) pl.emplace_back("n", params.n);
  return guarded(
      "subordination-" + std::string(composition_name(c)), std::move(pl), tol,
      [&] { return pmf_value(s, c, params, k, t).value; },
      [&] { return subordination_integral(s, c, params, k, t, kCheckSpec).value; });
}

IdentityReport check_unexpected_relation(const RateSchedule& s, int n, int k, double t, double tol) {
  const double alpha = std::ldexp(1.0, -n);
  return guarded(
      "unexpected-relation", {{"n", n}, {"k", k}, {"t", t}}, tol,
      [&] { return pmf_value(s, Composition::Stable, {.alpha = alpha}, k, t * std::pow(2.0, 1.0 - alpha)).value; },
      [&] { return pmf_value(s, Composition::FpIterated, {.n = n}, k, t).value; });
}

IdentityReport check_half_fp_cauchy(const RateSchedule& s, int k, double t, double tol) {
  return guarded(
      "half-fp-cauchy", {{"k", k}, {"t", t}}, tol,
      [&] { return pmf_value(s, Composition::FracFp, {.nu = 0.5}, k, t).value; },
      [&] {
        return subordination_integral(s, Composition::CauchyAbs, {.cauchy_scale = std::sqrt(2.0) * t}, k, t,
                                      kCheckSpec)
            .value;
      });
}

IdentityReport check_frco_complex(double nu, double lambda, double t, double tol) {
  if (!(nu > 0.0) || !(nu <= 0.5)) throw Error(ErrorKind::Validation, "complex form needs nu in (0, 1/2]");
  if (!(lambda > 0.0) || !(t > 0.0)) throw Error(ErrorKind::Validation, "frco needs lambda > 0 and t > 0");
  const double b = t * std::sqrt(2.0) * std::pow(lambda, 1.0 / (2.0 * nu));
  const std::complex<double> rot = std::polar(1.0, kPi * nu);
  return guarded(
      "frco", {{"nu", nu}, {"lambda", lambda}, {"t", t}}, tol,
      [&] { return clock_transform(Composition::FracFp, {.nu = nu}, lambda, t).value; },
      [&] {
        auto f = [&](double x) {
          const auto e = mittag_leffler(2.0 * nu, 1.0, -std::pow(x, 2.0 * nu) * rot).value;
          return e.imag() / (x + b);
        };
        return -2.0 / kPi * quad_semi_infinite(f, {1e-7, 1e-10, 4000}, {1.0, b}).value;
      });
}

IdentityReport check_noncommutativity(const RateSchedule& s, double nu, double t, double factor) {
  const CompositionParams p{.nu = nu, .alpha = nu};
  const auto a = compute_pmf(s, Composition::FracStable, p, t, s.n0(), s.kmax());
  const auto b = compute_pmf(s, Composition::StableOfT2Nu, p, t, s.n0(), s.kmax());
  double tv = std::abs(a.tail_mass - b.tail_mass), bound = 0.0;
  for (std::size_t i = 0; i < a.p.size(); ++i) {
    tv += std::abs(a.p[i] - b.p[i]);
    bound += a.err[i] + b.err[i];
  }
  return make_report("noncommutativity", {{"nu", nu}, {"t", t}, {"factor", factor}, {"error_bound", bound}}, 0.5 * tv, 0.0,
                     factor * bound, true);
}

// ---------------------------------------------------------------------------
// Spot values.

IdentityReport check_fp_spot(double lambda, double t, double tol) {
  const auto s = make_schedule({lambda});
  return make_report("spot-fp", {{"lambda", lambda}, {"t", t}}, fp_stopped_pmf(s, 1, t),
                     std::exp(-t * std::sqrt(2.0 * lambda)), tol);
}

IdentityReport check_iterated_limit(double lambda, double t, int n, double tol) {
  const auto s = make_schedule({lambda});
  return make_report("spot-iterated-limit", {{"lambda", lambda}, {"t", t}, {"n", n}}, fp_stopped_pmf(s, 1, t, n),
                     std::exp(-2.0 * t), tol);
}

IdentityReport check_linear_mean(double lambda, double t, int kmax, double tol) {
  const auto m = classical_mean(linear_schedule(lambda, kmax), t);
  return make_report("spot-linear-mean", {{"lambda", lambda}, {"t", t}, {"kmax", kmax}}, m.value,
                     std::exp(lambda * t), tol);
}

IdentityReport check_fractional_mean(double nu, double lambda, double t, int kmax, double tol) {
  return guarded(
      "spot-fractional-mean", {{"nu", nu}, {"lambda", lambda}, {"t", t}, {"kmax", kmax}}, tol,
      [&] { return fractional_mean(linear_schedule(lambda, kmax), nu, t).value; },
      [&] { return mittag_leffler(nu, 1.0, lambda * std::pow(t, nu)).value; });
}

std::pair<IdentityReport, IdentityReport> check_bridge_moments(double lambda, double t, double tol) {
  const auto m = bridge_moments(lambda, t);
  const auto s = linear_schedule(lambda, kLinearMaxK);
  double m1 = 0.0, m2 = 0.0;
  for (int k = kLinearMaxK; k >= 1; --k) {
    const double p = bridge_pmf(s, k, t);
    m1 += k * p;
    m2 += double(k) * k * p;
  }
  const ParamList params{{"lambda", lambda}, {"t", t}};
  return {make_report("bridge-mean", params, m.mean, m1, tol),
          make_report("bridge-variance", params, m.variance, m2 - m1 * m1, tol)};
}

// ---------------------------------------------------------------------------
// Suite.

bool SuiteResult::all_pass() const {
  return std::all_of(identities.begin(), identities.end(), [](const auto& r) { return r.pass; }) &&
         std::all_of(gof.begin(), gof.end(), [](const auto& r) { return r.pass; });
}

namespace {

std::string describe(const std::string& id, const ParamList& params) {
  std::string out = id;
  if (!params.empty()) {
    out += '(';
    for (std::size_t i = 0; i < params.size(); ++i) {
      if (i) out += ',';
      out += params[i].first + '=' + fmt(params[i].second);
    }
    out += ')';
  }
  return out;
}

json params_json(const ParamList& params) {
  json o = json::object();
  for (const auto& [k, v] : params) o[k] = v;
  return o;
}

}  // namespace

std::vector<std::string> SuiteResult::failing_ids() const {
  std::vector<std::string> out;
  for (const auto& r : identities)
    if (!r.pass) out.push_back(describe(r.id, r.params));
  for (const auto& r : gof)
    if (!r.pass) out.push_back(describe(r.id, r.params));
  return out;
}

std::string SuiteResult::to_json() const {
  json arr = json::array();
  for (const auto& r : identities) {
    json o{{"id", r.id},           {"params", params_json(r.params)}, {"lhs", r.lhs}, {"rhs", r.rhs},
           {"diff", r.abs_diff},   {"tol", r.tolerance},              {"pass", r.pass}};
    if (r.separation) o["separation"] = true;
    if (!r.note.empty()) o["note"] = r.note;
    arr.push_back(std::move(o));
  }
  for (const auto& g : gof) {
    arr.push_back({{"id", g.id},
                   {"params", params_json(g.params)},
                   {"lhs", g.tv},
                   {"rhs", 0.0},
                   {"diff", g.tv},
                   {"tol", g.tv_tolerance},
                   {"pass", g.pass},
                   {"chi_square", g.chi_square},
                   {"dof", g.dof},
                   {"p_value", g.p_value},
                   {"n_paths", g.n_paths},
                   {"overflow_fraction", g.overflow_fraction}});
  }
  return arr.dump(2) + "\n";
}

std::string SuiteResult::gof_csv() const {
  std::string out = "id,tv,chi_square,dof,p_value,n_paths,overflow_fraction,tv_tol,pass\n";
  for (const auto& g : gof) {
    out += g.id + ',' + fmt(g.tv) + ',' + fmt(g.chi_square) + ',' + std::to_string(g.dof) + ',' + fmt(g.p_value) +
           ',' + std::to_string(g.n_paths) + ',' + fmt(g.overflow_fraction) + ',' + fmt(g.tv_tolerance) + ',' +
           (g.pass ? "1" : "0") + '\n';
  }
  return out;
}

const std::vector<std::string>& suite_families() {
  static const std::vector<std::string> names{
      "mitta-int",     "mitlap", "ackard", "mmm",         "fra",
      "eq-sec",        "olidata", "cauchy-ode", "subordination", "gen-mitta",
      "triple-index",  "renewal", "frco",   "unexpected-relation", "half-fp-cauchy",
      "noncommutativity", "spot", "monte-carlo"};
  return names;
}

namespace {

json parse_json(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Validation, std::string("malformed suite fixture: ") + e.what());
  }
}

RateSchedule schedule_of(const json& j) { return parse_schedule(j.dump()); }

std::vector<RateSchedule> schedules_of(const json& block) {
  std::vector<RateSchedule> out;
  if (block.contains("schedule")) out.push_back(schedule_of(block.at("schedule")));
  if (block.contains("schedules"))
    for (const auto& s : block.at("schedules")) out.push_back(schedule_of(s));
  if (out.empty()) throw Error(ErrorKind::Validation, "suite family is missing its schedule");
  return out;
}

std::vector<double> nums(const json& block, const char* key) {
  if (!block.contains(key)) throw Error(ErrorKind::Validation, std::string("suite family is missing '") + key + "'");
  const auto& v = block.at(key);
  if (v.is_number()) return {v.get<double>()};
  return v.get<std::vector<double>>();
}

std::vector<int> ints(const json& block, const char* key) {
  std::vector<int> out;
  for (double v : nums(block, key)) out.push_back(static_cast<int>(v));
  return out;
}

double tol_of(const json& block, double fallback) { return block.value("tol", fallback); }

CompositionParams params_of(const json& j) {
  CompositionParams p;
  p.nu = j.value("nu", 1.0);
  p.alpha = j.value("alpha", 1.0);
  p.n = j.value("n", 1);
  p.cauchy_scale = j.value("cauchy_scale", 0.0);
  return p;
}

struct Context {
  const json& doc;
  const SuiteOptions& options;
  SuiteResult& out;

  void add(IdentityReport r) { out.identities.push_back(std::move(r)); }

  // Numerical failures of one item never abort the suite.
  template <class F>
  void item(const std::string& id, ParamList params, F&& f) {
    try {
      f();
    } catch (const Error& e) {
      IdentityReport r = make_report(id, std::move(params), std::nan(""), std::nan(""), 0.0);
      r.note = e.what();
      add(std::move(r));
    }
  }
};

ParamList with_schedule(ParamList p, std::size_t idx) {
  p.emplace_back("schedule", static_cast<double>(idx));
  return p;
}

void run_family(const std::string& name, const json& b, Context& cx) {
  if (name == "mitta-int") {
    for (double nu : nums(b, "nu"))
      for (double x : nums(b, "x"))
        cx.item(name, {{"nu", nu}, {"x", x}}, [&] { cx.add(check_mitta_int(nu, x, tol_of(b, 1e-6))); });
  } else if (name == "mitlap") {
    for (double nu : nums(b, "nu"))
      for (double zeta : nums(b, "zeta"))
        for (double z : nums(b, "z"))
          cx.item(name, {{"nu", nu}, {"zeta", zeta}, {"z", z}},
                  [&] { cx.add(check_mitlap(nu, zeta, z, tol_of(b, 1e-6))); });
  } else if (name == "ackard") {
    for (double nu : nums(b, "nu"))
      for (double l : nums(b, "lambda"))
        for (double t : nums(b, "t"))
          cx.item(name, {{"nu", nu}, {"lambda", l}, {"t", t}},
                  [&] { cx.add(check_ackard(nu, l, t, tol_of(b, 1e-6))); });
  } else if (name == "mmm") {
    for (double nu : nums(b, "nu"))
      for (double z : nums(b, "z"))
        for (double t : nums(b, "t"))
          cx.item(name, {{"nu", nu}, {"z", z}, {"t", t}}, [&] {
            auto [w, k] = check_mmm(nu, z, t, tol_of(b, 1e-6));
            cx.add(w);
            cx.add(k);
          });
  } else if (name == "fra" || name == "eq-sec" || name == "cauchy-ode" || name == "half-fp-cauchy") {
    const auto scheds = schedules_of(b);
    for (std::size_t i = 0; i < scheds.size(); ++i)
      for (int k : ints(b, "k"))
        for (double t : nums(b, "t"))
          cx.item(name, with_schedule({{"k", k}, {"t", t}}, i), [&] {
            IdentityReport r;
            if (name == "fra") r = check_fra(scheds[i], k, t, tol_of(b, 1e-5));
            else if (name == "eq-sec") r = check_eq_sec(scheds[i], k, t, tol_of(b, 1e-10));
            else if (name == "cauchy-ode") r = check_cauchy_ode(scheds[i], k, t, tol_of(b, 1e-4));
            else r = check_half_fp_cauchy(scheds[i], k, t, tol_of(b, 1e-6));
            r.params = with_schedule(std::move(r.params), i);
            cx.add(std::move(r));
          });
  } else if (name == "olidata" || name == "unexpected-relation") {
    const auto scheds = schedules_of(b);
    for (std::size_t i = 0; i < scheds.size(); ++i)
      for (int n : ints(b, "n"))
        for (int k : ints(b, "k"))
          for (double t : nums(b, "t"))
            cx.item(name, with_schedule({{"n", n}, {"k", k}, {"t", t}}, i), [&] {
              auto r = name == "olidata" ? check_olidata(scheds[i], n, k, t, tol_of(b, 1e-10))
                                         : check_unexpected_relation(scheds[i], n, k, t, tol_of(b, 1e-12));
              r.params = with_schedule(std::move(r.params), i);
              cx.add(std::move(r));
            });
  } else if (name == "subordination") {
    const auto scheds = schedules_of(b);
    for (std::size_t i = 0; i < scheds.size(); ++i)
      for (const auto& cj : b.at("compositions")) {
        const Composition c = parse_composition(cj.at("composition").get<std::string>());
        const auto p = params_of(cj);
        for (int k : ints(b, "k"))
          for (double t : nums(b, "t"))
            cx.item("subordination-" + std::string(composition_name(c)), with_schedule({{"k", k}, {"t", t}}, i), [&] {
              auto r = check_subordination(scheds[i], c, p, k, t, tol_of(b, 1e-6));
              r.params = with_schedule(std::move(r.params), i);
              cx.add(std::move(r));
            });
      }
  } else if (name == "gen-mitta") {
    for (double nu : nums(b, "nu"))
      for (double a : nums(b, "alpha"))
        for (double l : nums(b, "lambda"))
          for (double t : nums(b, "t"))
            cx.item(name, {{"nu", nu}, {"alpha", a}, {"lambda", l}, {"t", t}}, [&] {
              auto [f1, f2] = check_gen_mitta(nu, a, l, t, tol_of(b, 1e-5));
              cx.add(f1);
              cx.add(f2);
            });
  } else if (name == "triple-index") {
    for (const auto& pt : b.at("points")) {
      const auto v = pt.get<std::vector<double>>();
      if (v.size() != 3) throw Error(ErrorKind::Validation, "triple-index points are [nu, alpha, beta]");
      for (double l : nums(b, "lambda"))
        for (double t : nums(b, "t"))
          cx.item(name, {{"nu", v[0]}, {"alpha", v[1]}, {"beta", v[2]}, {"lambda", l}, {"t", t}},
                  [&] { cx.add(check_triple_index(v[0], v[1], v[2], l, t, tol_of(b, 1e-4))); });
    }
  } else if (name == "renewal") {
    const auto scheds = schedules_of(b);
    for (std::size_t i = 0; i < scheds.size(); ++i)
      for (double nu : nums(b, "nu"))
        for (int k : ints(b, "k"))
          for (double mu : nums(b, "mu"))
            cx.item(name, with_schedule({{"nu", nu}, {"k", k}, {"mu", mu}}, i), [&] {
              auto r = check_renewal_convolution(scheds[i], nu, k, mu, tol_of(b, 1e-6));
              r.params = with_schedule(std::move(r.params), i);
              cx.add(std::move(r));
            });
  } else if (name == "frco") {
    for (double nu : nums(b, "nu"))
      for (double l : nums(b, "lambda"))
        for (double t : nums(b, "t"))
          cx.item(name, {{"nu", nu}, {"lambda", l}, {"t", t}},
                  [&] { cx.add(check_frco_complex(nu, l, t, tol_of(b, 1e-3))); });
  } else if (name == "noncommutativity") {
    const auto scheds = schedules_of(b);
    for (std::size_t i = 0; i < scheds.size(); ++i)
      for (double nu : nums(b, "nu"))
        for (double t : nums(b, "t"))
          cx.item(name, with_schedule({{"nu", nu}, {"t", t}}, i), [&] {
            auto r = check_noncommutativity(scheds[i], nu, t, b.value("factor", 10.0));
            r.params = with_schedule(std::move(r.params), i);
            cx.add(std::move(r));
          });
  } else if (name == "spot") {
    if (b.contains("fp")) {
      const auto& j = b.at("fp");
      for (double l : nums(j, "lambda"))
        for (double t : nums(j, "t"))
          cx.item("spot-fp", {{"lambda", l}, {"t", t}}, [&] { cx.add(check_fp_spot(l, t, tol_of(j, 1e-12))); });
    }
    if (b.contains("iterated-limit")) {
      const auto& j = b.at("iterated-limit");
      for (double l : nums(j, "lambda"))
        for (double t : nums(j, "t"))
          cx.item("spot-iterated-limit", {{"lambda", l}, {"t", t}},
                  [&] { cx.add(check_iterated_limit(l, t, j.value("n", 40), tol_of(j, 1e-6))); });
    }
    if (b.contains("linear-mean")) {
      const auto& j = b.at("linear-mean");
      for (double l : nums(j, "lambda"))
        for (double t : nums(j, "t"))
          cx.item("spot-linear-mean", {{"lambda", l}, {"t", t}},
                  [&] { cx.add(check_linear_mean(l, t, j.value("kmax", kLinearMaxK), tol_of(j, 1e-9))); });
    }
    if (b.contains("fractional-mean")) {
      const auto& j = b.at("fractional-mean");
      for (const auto& pt : j.at("points")) {
        const auto v = pt.get<std::vector<double>>();
        if (v.size() != 3) throw Error(ErrorKind::Validation, "fractional-mean points are [nu, lambda, t]");
        cx.item("spot-fractional-mean", {{"nu", v[0]}, {"lambda", v[1]}, {"t", v[2]}}, [&] {
          cx.add(check_fractional_mean(v[0], v[1], v[2], j.value("kmax", kLinearMaxK), tol_of(j, 1e-8)));
        });
      }
    }
    if (b.contains("bridge-moments")) {
      const auto& j = b.at("bridge-moments");
      for (double l : nums(j, "lambda"))
        for (double t : nums(j, "t"))
          cx.item("bridge-moments", {{"lambda", l}, {"t", t}}, [&] {
            auto [m, v] = check_bridge_moments(l, t, tol_of(j, 1e-10));
            cx.add(m);
            cx.add(v);
          });
    }
  }
}

bool wanted(const SuiteOptions& o, const std::string& name) {
  return o.only.empty() || std::find(o.only.begin(), o.only.end(), name) != o.only.end();
}

void run_monte_carlo(const json& entries, Context& cx) {
  const std::uint64_t seed = cx.doc.value("seed", std::uint64_t{1});
  const std::uint64_t n_paths = cx.doc.value("n_paths", std::uint64_t{100000});
  unsigned threads = cx.options.threads ? cx.options.threads : cx.doc.value("threads", 0u);
  const bool all = wanted(cx.options, "monte-carlo");
  for (const auto& e : entries) {
    const std::string id = e.at("id").get<std::string>();
    if (!all && !wanted(cx.options, id)) continue;
    const auto s = schedule_of(e.at("schedule"));
    const double t = e.at("t").get<double>();
    const SimulationOptions opt{.n_paths = e.value("n_paths", n_paths), .seed = e.value("seed", seed),
                                .threads = threads};
    const auto& sim = e.at("simulate");
    const Composition c = parse_composition(sim.at("composition").get<std::string>());
    ParamList params{{"t", t}};
    try {
      const auto emp = simulate_composition(s, c, params_of(sim), t, opt);
      GofReport g;
      if (e.contains("analytic")) {
        const auto& an = e.at("analytic");
        const auto pmf = compute_pmf(s, parse_composition(an.at("composition").get<std::string>()), params_of(an), t,
                                     s.n0(), s.kmax());
        g = gof_compare(emp, pmf);
      } else {
        const auto& clk = e.at("clock");
        if (clk.at("law").get<std::string>() != "lamperti") {
          throw Error(ErrorKind::Validation, "Monte Carlo clocks support law 'lamperti'");
        }
        const double nu = clk.at("nu").get<double>(), alpha = clk.at("alpha").get<double>();
        SimulationOptions o2 = opt;
        o2.seed = opt.seed + 1;
        const auto other =
            simulate_clock(s, o2, [&](Rng& r) { return t * sample_lamperti(nu, alpha, r).value; });
        g = gof_compare(emp, other);
      }
      g.id = id;
      g.params = params;
      g.tv_tolerance = e.value("tv_tol", 0.01);
      finish_gof(g);
      cx.out.gof.push_back(std::move(g));
    } catch (const Error& err) {
      IdentityReport r = make_report(id, params, std::nan(""), std::nan(""), 0.0);
      r.note = err.what();
      cx.add(std::move(r));
    }
  }
}

}  // namespace

SuiteConfig SuiteConfig::parse(std::string_view json_text) {
  const json doc = parse_json(json_text);
  if (!doc.is_object() || !doc.contains("families") || !doc.at("families").is_object()) {
    throw Error(ErrorKind::Validation, "suite fixture needs a 'families' object");
  }
  const auto& names = suite_families();
  try {
    for (const auto& [name, block] : doc.at("families").items()) {
      if (std::find(names.begin(), names.end(), name) == names.end()) {
        throw Error(ErrorKind::Validation, "unknown suite family '" + name + "'");
      }
      // Build every schedule now so bad rates surface before any work starts.
      if (name == "monte-carlo") {
        for (const auto& e : block) {
          schedule_of(e.at("schedule"));
          (void)e.at("id").get<std::string>();
        }
      } else if (block.contains("schedule") || block.contains("schedules")) {
        schedules_of(block);
      }
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Validation, std::string("malformed suite fixture: ") + e.what());
  }
  return SuiteConfig{std::string(json_text)};
}

SuiteResult run_suite(const SuiteConfig& config, const SuiteOptions& options) {
  const json doc = parse_json(config.json_text);
  const auto& fam = doc.at("families");
  // Filters must name a family or a Monte Carlo entry.
  for (const auto& o : options.only) {
    bool known = fam.contains(o);
    if (!known && fam.contains("monte-carlo"))
      for (const auto& e : fam.at("monte-carlo")) known = known || e.value("id", "") == o;
    if (!known) throw Error(ErrorKind::Validation, "--only names no family or entry in the fixture: " + o);
  }
  SuiteResult out;
  Context cx{doc, options, out};
  try {
    for (const auto& name : suite_families()) {
      if (!fam.contains(name)) continue;
      if (name == "monte-carlo") {
        run_monte_carlo(fam.at(name), cx);
      } else if (wanted(options, name)) {
        run_family(name, fam.at(name), cx);
      }
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Validation, std::string("malformed suite fixture: ") + e.what());
  }
  return out;
}

}  // namespace birthsub
