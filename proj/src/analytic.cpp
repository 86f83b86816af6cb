#include "birthsub/analytic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>

#include "birthsub/error.hpp"
#include "birthsub/specfun.hpp"

namespace birthsub {

namespace {

std::string short_num(double v) {
  std::ostringstream os;
  os.precision(3);
  os << v;
  return os.str();
}

constexpr double kPi = std::numbers::pi;
constexpr double kEps = std::numeric_limits<double>::epsilon();

// Spectral sums whose error estimate exceeds this switch to the mixture
// integral when one is available (linear schedules only).
constexpr double kMixtureSwitch = 1e-10;
// Largest error estimate a returned probability may carry.
constexpr double kPmfBudget = 1e-6;
// Iterated first passage: the stable mixture density is used up to this depth.
constexpr int kMaxMixtureDepth = 5;

struct Named {
  Composition c;
  std::string_view name;
};
constexpr std::array<Named, 12> kNames{{{Composition::Classical, "classical"},
                                        {Composition::Fp, "fp"},
                                        {Composition::FpIterated, "fp-iterated"},
                                        {Composition::Sojourn, "sojourn"},
                                        {Composition::Bridge, "bridge"},
                                        {Composition::Stable, "stable"},
                                        {Composition::Frac, "frac"},
                                        {Composition::FracFp, "frac-fp"},
                                        {Composition::FracStable, "frac-stable"},
                                        {Composition::NuOfT2Alpha, "nu-of-t2alpha"},
                                        {Composition::StableOfT2Nu, "stable-of-t2nu"},
                                        {Composition::CauchyAbs, "cauchy-abs"}}};

double log_binomial(int n, int r) {
  return std::lgamma(n + 1.0) - std::lgamma(r + 1.0) - std::lgamma(n - r + 1.0);
}

// Exponent 2^(1 - 1/2^n) * lambda^(1/2^n) of the n-fold first-passage clock.
double fp_rate(int n, double lambda) {
  const double e = std::ldexp(1.0, -n);
  return std::exp((1.0 - e) * std::numbers::ln2 + e * std::log(lambda));
}

// Reduce parameter values at which a composition collapses to a simpler one,
// so that e.g. frac with nu = 1 is the classical pmf exactly.
struct Canonical {
  Composition c;
  CompositionParams p;
};

Canonical canonical(Composition c, CompositionParams p) {
  switch (c) {
    case Composition::Fp:
      p.n = 1;
      return {c, p};
    case Composition::FpIterated:
      return {p.n == 1 ? Composition::Fp : c, p};
    case Composition::Stable:
      return {p.alpha == 1.0 ? Composition::Classical : c, p};
    case Composition::Frac:
      return {p.nu == 1.0 ? Composition::Classical : c, p};
    case Composition::FracFp:
      if (p.nu == 1.0) return canonical(Composition::FpIterated, p);
      return {c, p};
    case Composition::FracStable:
      if (p.nu == 1.0) return canonical(Composition::Stable, p);
      if (p.alpha == 1.0) return {Composition::Frac, p};
      return {c, p};
    case Composition::NuOfT2Alpha:
      p.nu = p.nu * p.alpha;
      p.alpha = 1.0;
      return canonical(Composition::Frac, p);
    case Composition::StableOfT2Nu:
      if (p.nu == 1.0) return canonical(Composition::Stable, p);
      if (p.alpha == 1.0) return {Composition::Frac, p};
      return {c, p};
    default:
      return {c, p};
  }
}

// Centre for the half-line map. Far outside [e^{-40/nu}, e^{40/nu}] the
// kernel carries no mass, so a cut-off that lies beyond is not worth chasing.
double kernel_scale(double nu, double log_scale) {
  const double reach = std::min(600.0, 40.0 / nu);
  return std::exp(std::clamp(log_scale, -reach, reach));
}

// int K_nu(r) exp(-b r^beta) dr, the Lamperti-type averages behind frac-fp and
// frac-stable.
SpecialValue kernel_average(double nu, double b, double beta) {
  if (b == 0.0) return {1.0, 0.0};
  auto f = [=](double r) {
    const double e = b * std::pow(r, beta);
    return e > 745.0 ? 0.0 : ml_kernel(nu, r) * std::exp(-e);
  };
  // The exponential cuts in around r = b^(-1/beta).
  return quad_semi_infinite(f, kInnerSpec, {nu, kernel_scale(nu, -std::log(b) / beta)});
}

// E exp(-a W_nu) for the Lamperti law of index nu (alpha = nu): the
// exponential-integral closed form -Im[e^{ap} E1(ap)] / (nu pi), p = e^{i pi nu}.
SpecialValue lamperti_closed(double nu, double a) {
  if (a == 0.0) return {1.0, 0.0};
  const std::complex<double> z = a * std::polar(1.0, kPi * nu);
  if (z.real() > 600.0) return kernel_average(nu, a, nu);
  const auto e1 = exp_integral_e1(z);
  const auto ez = std::exp(z);
  const double v = -(ez * e1.value).imag() / (nu * kPi);
  return {v, std::abs(ez) * e1.abs_err / (nu * kPi) + 4.0 * kEps * std::abs(v)};
}

SpecialValue transform(const Canonical& cc, double lambda, double t) {
  const auto& p = cc.p;
  if (t == 0.0) return {1.0, 0.0};
  switch (cc.c) {
    case Composition::Classical: {
      const double v = std::exp(-lambda * t);
      return {v, kEps * v};
    }
    case Composition::Fp:
    case Composition::FpIterated: {
      const double v = std::exp(-t * fp_rate(p.n, lambda));
      return {v, 4.0 * kEps * v};
    }
    case Composition::Sojourn:
      return bessel_i0_scaled(0.5 * lambda * t);
    case Composition::Bridge: {
      const double x = lambda * t;
      const double v = x < 1e-8 ? 1.0 - 0.5 * x : -std::expm1(-x) / x;
      return {v, 2.0 * kEps * v};
    }
    case Composition::Stable: {
      const double v = std::exp(-t * std::pow(lambda, p.alpha));
      return {v, 4.0 * kEps * v};
    }
    case Composition::Frac:
      return mittag_leffler(p.nu, 1.0, -lambda * std::pow(t, p.nu));
    case Composition::FracFp: {
      const double beta = std::ldexp(1.0, -p.n);
      const double b = t * fp_rate(p.n, std::pow(lambda, 1.0 / p.nu));
      return kernel_average(p.nu, b, beta);
    }
    case Composition::FracStable: {
      const double a = t * std::pow(lambda, p.alpha / p.nu);
      if (p.alpha == p.nu) return lamperti_closed(p.nu, a);
      return kernel_average(p.nu, a, p.alpha);
    }
    case Composition::StableOfT2Nu:
      return mittag_leffler(p.nu, 1.0, -std::pow(lambda, p.alpha) * std::pow(t, p.nu));
    case Composition::CauchyAbs: {
      // (2/pi) Im[e^{-i y} E1(-i y)], y = lambda c: the transform of the folded Cauchy law.
      const double c = p.cauchy_scale > 0.0 ? p.cauchy_scale : t;
      const double y = lambda * c;
      const std::complex<double> z{0.0, -y};
      const auto e1 = exp_integral_e1(z);
      const double v = 2.0 / kPi * (std::exp(z) * e1.value).imag();
      return {v, 2.0 / kPi * e1.abs_err + 4.0 * kEps * std::abs(v)};
    }
    case Composition::NuOfT2Alpha:
      break;
  }
  throw Error(ErrorKind::Validation, "composition has no direct transform");
}

// Linear (Yule) schedule from one progenitor: e^{-x}(1 - e^{-x})^{k-1}, x = lambda s.
double yule_pmf(double lambda, int k, double s) {
  if (s <= 0.0) return k == 1 ? 1.0 : 0.0;
  const double x = lambda * s;
  return std::exp(-x + (k - 1) * std::log(-std::expm1(-x)));
}

double linear_classical(const RateSchedule& s, int k, double t) {
  const int n0 = s.n0();
  if (t == 0.0) return k == n0 ? 1.0 : 0.0;
  const double x = s.lambda() * t;
  const double tail = k == n0 ? 0.0 : (k - n0) * std::log(-std::expm1(-x));
  return std::exp(log_binomial(k - 1, n0 - 1) - n0 * x + tail);
}

// Density of the random clock for the mixture representation, with a typical scale.
struct ClockDensity {
  std::function<double(double)> f;
  double log_scale = 0.0;
};

std::optional<ClockDensity> half_line_density(const Canonical& cc, double t) {
  const auto& p = cc.p;
  switch (cc.c) {
    case Composition::Fp:
      return ClockDensity{[t](double s) { return levy_fp_density(t, s).value; }, 2.0 * std::log(t)};
    case Composition::FpIterated: {
      if (p.n > kMaxMixtureDepth) return std::nullopt;
      // Laplace transform exp(-t' lambda^a): a stable law at the rescaled time t'.
      const double a = std::ldexp(1.0, -p.n);
      const double tp = t * std::exp((1.0 - a) * std::numbers::ln2);
      return ClockDensity{[a, tp](double s) { return stable_density(a, tp, s).value; }, std::log(tp) / a};
    }
    case Composition::Stable: {
      const double a = p.alpha;
      return ClockDensity{[a, t](double s) { return stable_density(a, t, s).value; }, std::log(t) / a};
    }
    case Composition::Frac: {
      const double nu = p.nu;
      return ClockDensity{[nu, t](double s) { return inverse_stable_density(nu, t, s).value; }, nu * std::log(t)};
    }
    case Composition::CauchyAbs: {
      const double c = p.cauchy_scale > 0.0 ? p.cauchy_scale : t;
      return ClockDensity{[c](double s) { return folded_cauchy_density(c, s).value; }, std::log(c)};
    }
    default:
      return std::nullopt;
  }
}

// Quadrature nodes s_i and weights (density and Jacobian folded in) for
// E g(tau) = sum_i w_i g(s_i), built once and reused for every state k.
struct Mixture {
  std::vector<double> s, wk, wg;
};

std::optional<Mixture> build_mixture(const Canonical& cc, double lambda, double t, int kmax) {
  Mixture m;
  if (cc.c == Composition::Sojourn) {
    // s = t sin^2(theta/2), theta uniform on (0, pi).
    const int panels = static_cast<int>(std::clamp(40.0 * lambda * t, 200.0, 20000.0));
    const auto rule = kronrod_panels(0.0, kPi, panels);
    for (std::size_t i = 0; i < rule.x.size(); ++i) {
      const double h = std::sin(0.5 * rule.x[i]);
      m.s.push_back(t * h * h);
      m.wk.push_back(rule.w_kronrod[i] / kPi);
      m.wg.push_back(rule.w_gauss[i] / kPi);
    }
    return m;
  }
  const auto dens = half_line_density(cc, t);
  if (!dens) return std::nullopt;
  // Log-time grid: below e^-40 of the clock scale the density carries no mass;
  // beyond the upper end every Yule probability is below e^-50.
  const double u_hi = std::log((std::log(static_cast<double>(kmax)) + 50.0) / lambda);
  const double u_lo = std::min(dens->log_scale - 40.0, u_hi - 10.0);
  const int panels = static_cast<int>(std::ceil((u_hi - u_lo) / 0.05));
  const auto rule = kronrod_panels(u_lo, u_hi, panels);
  for (std::size_t i = 0; i < rule.x.size(); ++i) {
    const double s = std::exp(rule.x[i]);
    const double w = dens->f(s) * s;
    m.s.push_back(s);
    m.wk.push_back(rule.w_kronrod[i] * w);
    m.wg.push_back(rule.w_gauss[i] * w);
  }
  return m;
}

std::string describe(Composition c, const CompositionParams& p) {
  std::ostringstream os;
  os.precision(17);
  os << composition_name(c);
  switch (c) {
    case Composition::FpIterated: os << "(n=" << p.n << ")"; break;
    case Composition::Stable: os << "(alpha=" << p.alpha << ")"; break;
    case Composition::Frac: os << "(nu=" << p.nu << ")"; break;
    case Composition::FracFp: os << "(nu=" << p.nu << ",n=" << p.n << ")"; break;
    case Composition::FracStable:
    case Composition::NuOfT2Alpha:
    case Composition::StableOfT2Nu: os << "(nu=" << p.nu << ",alpha=" << p.alpha << ")"; break;
    case Composition::CauchyAbs:
      if (p.cauchy_scale > 0.0) os << "(c=" << p.cauchy_scale << ")";
      break;
    default: break;
  }
  return os.str();
}

void check_time(double t) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw Error(ErrorKind::Validation, "time t must be finite and >= 0");
}

void check_state(const RateSchedule& s, int k) {
  if (k < s.n0() || k > s.kmax()) {
    throw Error(ErrorKind::Validation, "state k = " + std::to_string(k) + " outside [" + std::to_string(s.n0()) +
                                           ", " + std::to_string(s.kmax()) + "]");
  }
}

// Evaluates p_k(t) for increasing k, caching the transforms phi(lambda_m) and
// the mixture grid.
class PmfEvaluator {
 public:
  PmfEvaluator(const RateSchedule& s, Composition c, const CompositionParams& p, double t)
      : s_(s), cc_(canonical(c, p)), t_(t) {
    validate(c, p, s);
    check_time(t);
  }

  PmfValue operator()(int k) {
    check_state(s_, k);
    if (t_ == 0.0) return {k == s_.n0() ? 1.0 : 0.0, 0.0, "initial"};
    const bool linear = s_.kind() == ScheduleKind::Linear;
    if (linear && cc_.c == Composition::Classical) return {linear_classical(s_, k, t_), 4.0 * kEps, "closed-form"};
    if (linear && cc_.c == Composition::Bridge) {
      const double x = s_.lambda() * t_;
      const double v = std::exp(k * std::log(-std::expm1(-x)) - std::log(k * x));
      return {v, 4.0 * kEps * v, "closed-form"};
    }

    PmfValue out;
    if (!spectral_hopeless_) {
      out = spectral(k);
      if (out.abs_err <= kMixtureSwitch || !linear) return checked(out, k);
      if (!mixture_ready_) {
        mixture_ = build_mixture(cc_, s_.lambda(), t_, s_.kmax());
        mixture_ready_ = true;
      }
      if (!mixture_) return checked(out, k);
      // Cancellation only grows with k on a linear schedule.
      spectral_hopeless_ = true;
    }
    return checked(mixture(k), k);
  }

 private:
  PmfValue checked(const PmfValue& v, int k) const {
    if (!(v.abs_err <= kPmfBudget)) {
      throw Error(ErrorKind::NonConvergence,
                  "p_" + std::to_string(k) + " carries error estimate " + std::to_string(v.abs_err) + " (" +
                      v.method + ")",
                  v.value);
    }
    return v;
  }

  PmfValue spectral(int k) {
    while (static_cast<int>(phi_.size()) < k - s_.n0() + 1) {
      phi_.push_back(transform(cc_, s_.rate(s_.n0() + static_cast<int>(phi_.size())), t_));
    }
    const auto c = spectral_coeffs(s_, k);
    std::vector<double> phi(c.size());
    double prop = 0.0, max_log = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) {
      phi[i] = phi_[i].value;
      prop += std::exp(c.log_mag[i]) * phi_[i].abs_err;
      max_log = std::max(max_log, std::abs(c.log_mag[i]));
    }
    const auto sum = spectral_sum(c, phi);
    return {sum.value, prop + sum.abs_sum * kEps * (8.0 + max_log), "spectral"};
  }

  PmfValue mixture(int k) const {
    const double lambda = s_.lambda();
    double v = 0.0, g = 0.0, mass = 0.0;
    for (std::size_t i = 0; i < mixture_->s.size(); ++i) {
      const double pk = yule_pmf(lambda, k, mixture_->s[i]);
      v += mixture_->wk[i] * pk;
      g += mixture_->wg[i] * pk;
      mass += std::abs(mixture_->wk[i] * pk);
    }
    return {v, std::abs(v - g) + 64.0 * kEps * mass, "mixture"};
  }

  const RateSchedule& s_;
  Canonical cc_;
  double t_;
  std::vector<SpecialValue> phi_;
  bool spectral_hopeless_ = false;
  bool mixture_ready_ = false;
  std::optional<Mixture> mixture_;
};

// P{N > k} = sum_m d_m (1 - phi_m) for an arbitrary clock transform.
double survival_from(const RateSchedule& s, int k, const std::function<double(double)>& one_minus_phi) {
  const auto d = survival_coeffs(s, k);
  std::vector<double> v(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) v[i] = one_minus_phi(s.rate(s.n0() + static_cast<int>(i)));
  return std::max(0.0, spectral_sum(d, v).value);
}

MeanValue summed_mean(const RateSchedule& s, double t, const MeanOptions& opt,
                      const std::function<double(int)>& survival) {
  MeanValue m;
  m.t = t;
  m.value = s.n0();
  const int kmax = opt.max_k > 0 ? std::min(opt.max_k, s.kmax()) : s.kmax();
  if (kmax < s.n0()) throw Error(ErrorKind::Validation, "mean truncation below n0");
  m.truncation_k = s.n0() - 1;
  for (int k = s.n0(); k <= kmax; ++k) {
    const double inc = survival(k);
    m.value += inc;
    m.truncation_k = k;
    m.last_increment = inc;
    if (inc < opt.tolerance) {
      m.converged = true;
      break;
    }
  }
  if (!m.converged && opt.strict) {
    throw Error(ErrorKind::TruncationNotConverged,
                "last increment " + short_num(m.last_increment) + " at K = " + std::to_string(m.truncation_k),
                m.value);
  }
  return m;
}

}  // namespace

std::string_view composition_name(Composition c) {
  for (const auto& n : kNames) {
    if (n.c == c) return n.name;
  }
  return "unknown";
}

Composition parse_composition(std::string_view name) {
  for (const auto& n : kNames) {
    if (n.name == name) return n.c;
  }
  throw Error(ErrorKind::Validation, "unknown composition '" + std::string(name) + "'");
}

const std::vector<Composition>& all_compositions() {
  static const std::vector<Composition> all = [] {
    std::vector<Composition> v;
    for (const auto& n : kNames) v.push_back(n.c);
    return v;
  }();
  return all;
}

void validate(Composition c, const CompositionParams& p, const RateSchedule& schedule) {
  auto unit = [](double x, const char* what, bool closed) {
    if (!(x > 0.0) || !(closed ? x <= 1.0 : x < 1.0)) {
      throw Error(ErrorKind::Validation, std::string(what) + (closed ? " must lie in (0, 1]" : " must lie in (0, 1)"));
    }
  };
  if (c != Composition::Classical && schedule.n0() != 1) {
    throw Error(ErrorKind::Validation, "n0 > 1 is supported for the classical composition only");
  }
  switch (c) {
    case Composition::FpIterated:
    case Composition::FracFp:
      if (p.n < 1 || p.n > 60) throw Error(ErrorKind::Validation, "iteration count n must lie in [1, 60]");
      break;
    default: break;
  }
  switch (c) {
    case Composition::Stable: unit(p.alpha, "alpha", true); break;
    case Composition::Frac:
    case Composition::FracFp: unit(p.nu, "nu", true); break;
    case Composition::FracStable:
    case Composition::NuOfT2Alpha:
    case Composition::StableOfT2Nu:
      unit(p.nu, "nu", true);
      unit(p.alpha, "alpha", true);
      break;
    case Composition::CauchyAbs:
      if (!std::isfinite(p.cauchy_scale)) throw Error(ErrorKind::Validation, "Cauchy scale must be finite");
      break;
    default: break;
  }
}

SpecialValue clock_transform(Composition c, const CompositionParams& params, double lambda, double t) {
  if (!(lambda > 0.0)) throw Error(ErrorKind::Validation, "clock_transform needs lambda > 0");
  check_time(t);
  return transform(canonical(c, params), lambda, t);
}

PmfValue pmf_value(const RateSchedule& schedule, Composition c, const CompositionParams& params, int k, double t) {
  PmfEvaluator eval(schedule, c, params, t);
  return eval(k);
}

Pmf compute_pmf(const RateSchedule& schedule, Composition c, const CompositionParams& params, double t, int k_first,
                int k_last) {
  if (k_last < k_first) throw Error(ErrorKind::Validation, "empty state range");
  check_state(schedule, k_first);
  check_state(schedule, k_last);
  PmfEvaluator eval(schedule, c, params, t);
  Pmf out;
  out.t = t;
  out.k_first = k_first;
  out.provenance = describe(c, params);
  double total = 0.0;
  for (int k = k_first; k <= k_last; ++k) {
    const auto v = eval(k);
    out.p.push_back(v.value);
    out.err.push_back(v.abs_err);
    out.method.push_back(v.method);
    total += v.value;
  }
  out.tail_mass = k_first == schedule.n0() ? std::max(0.0, 1.0 - total) : std::numeric_limits<double>::quiet_NaN();
  return out;
}

double classical_pmf(const RateSchedule& s, int k, double t) {
  return pmf_value(s, Composition::Classical, {}, k, t).value;
}

double fractional_pmf(const RateSchedule& s, double nu, int k, double t) {
  return pmf_value(s, Composition::Frac, {.nu = nu}, k, t).value;
}

double fp_stopped_pmf(const RateSchedule& s, int k, double t, int n) {
  return pmf_value(s, Composition::FpIterated, {.n = n}, k, t).value;
}

double sojourn_pmf(const RateSchedule& s, int k, double t) {
  return pmf_value(s, Composition::Sojourn, {}, k, t).value;
}

double bridge_pmf(const RateSchedule& s, int k, double t) {
  return pmf_value(s, Composition::Bridge, {}, k, t).value;
}

double stable_stopped_pmf(const RateSchedule& s, double alpha, int k, double t) {
  return pmf_value(s, Composition::Stable, {.alpha = alpha}, k, t).value;
}

double frac_fp_pmf(const RateSchedule& s, double nu, int k, double t, int n) {
  return pmf_value(s, Composition::FracFp, {.nu = nu, .n = n}, k, t).value;
}

double frac_stable_pmf(const RateSchedule& s, double nu, double alpha, int k, double t) {
  return pmf_value(s, Composition::FracStable, {.nu = nu, .alpha = alpha}, k, t).value;
}

double frac_t2alpha_pmf(const RateSchedule& s, double nu, double alpha, int k, double t) {
  return pmf_value(s, Composition::NuOfT2Alpha, {.nu = nu, .alpha = alpha}, k, t).value;
}

double stable_of_t2nu_pmf(const RateSchedule& s, double nu, double alpha, int k, double t) {
  return pmf_value(s, Composition::StableOfT2Nu, {.nu = nu, .alpha = alpha}, k, t).value;
}

double cauchy_abs_pmf(const RateSchedule& s, int k, double t, double scale) {
  return pmf_value(s, Composition::CauchyAbs, {.cauchy_scale = scale}, k, t).value;
}

double classical_survival(const RateSchedule& s, int k, double t) {
  check_time(t);
  check_state(s, k);
  if (s.kind() == ScheduleKind::Linear) {
    // Fewer than n0 of k Bernoulli(e^{-lambda t}) successes.
    const double x = s.lambda() * t;
    if (x == 0.0) return k >= s.n0() ? 0.0 : 1.0;
    const double lp = -x, lq = std::log(-std::expm1(-x));
    double sum = 0.0;
    for (int j = 0; j < s.n0(); ++j) sum += std::exp(log_binomial(k, j) + j * lp + (k - j) * lq);
    return sum;
  }
  return survival_from(s, k, [t](double l) { return -std::expm1(-l * t); });
}

MeanValue classical_mean(const RateSchedule& s, double t, const MeanOptions& opt) {
  check_time(t);
  return summed_mean(s, t, opt, [&](int k) { return classical_survival(s, k, t); });
}

MeanValue fractional_mean(const RateSchedule& s, double nu, double t, const MeanOptions& opt) {
  validate(Composition::Frac, {.nu = nu}, s);
  check_time(t);
  if (nu == 1.0 || t == 0.0) return classical_mean(s, t, opt);
  if (s.kind() == ScheduleKind::General) {
    const double tn = std::pow(t, nu);
    return summed_mean(s, t, opt, [&](int k) {
      return survival_from(s, k, [&](double l) { return 1.0 - mittag_leffler(nu, 1.0, -l * tn).value; });
    });
  }
  // Linear: E min(N(T), K+1) = 1 + E[(e^{lambda T} - 1)(1 - q^K)], q = 1 - e^{-lambda T},
  // averaged over the inverse-stable clock T; the increment at K is E q^K.
  const int kmax = opt.max_k > 0 ? std::min(opt.max_k, s.kmax()) : s.kmax();
  const double lambda = s.lambda();
  const QuadratureSpec spec{1e-10, 1e-15, 4000};
  const HalfLineHints hints{1.0, std::pow(t, nu)};
  auto density = [&](double x) { return inverse_stable_density(nu, t, x).value; };
  const auto body = integrate_half_line(
      [&](double x) {
        const double f = density(x);
        if (f == 0.0) return 0.0;
        const double lq = std::log(-std::expm1(-lambda * x));
        return f * std::expm1(lambda * x) * -std::expm1(kmax * lq);
      },
      spec, hints);
  const auto tail = integrate_half_line(
      [&](double x) { return density(x) * std::exp(kmax * std::log(-std::expm1(-lambda * x))); }, spec, hints);
  MeanValue m;
  m.t = t;
  m.value = 1.0 + body.value;
  m.truncation_k = kmax;
  m.last_increment = tail.value;
  m.converged = tail.value < opt.tolerance;
  if (!body.converged || !tail.converged) {
    throw Error(ErrorKind::NonConvergence, "fractional mean quadrature did not converge", m.value);
  }
  if (!m.converged && opt.strict) {
    throw Error(ErrorKind::TruncationNotConverged,
                "last increment " + short_num(m.last_increment) + " at K = " + std::to_string(kmax), m.value);
  }
  return m;
}

MeanValue fp_stopped_mean(const RateSchedule& s, double t, const MeanOptions& opt) {
  check_time(t);
  if (s.kind() == ScheduleKind::Linear) {
    throw Error(ErrorKind::DivergentMean, "the mean of a linear process at a first-passage time is infinite");
  }
  validate(Composition::Fp, {}, s);
  return summed_mean(s, t, opt, [&](int k) {
    return survival_from(s, k, [t](double l) { return -std::expm1(-t * std::sqrt(2.0 * l)); });
  });
}

Moments bridge_moments(double lambda, double t) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw Error(ErrorKind::Validation, "bridge_moments needs lambda > 0");
  check_time(t);
  const double a = lambda * t;
  if (a == 0.0) return {1.0, 0.0};
  const double em1 = std::expm1(a);
  // 1 - (1 - e^{-a})/a, by series where it cancels.
  const double bracket =
      a < 1e-3 ? a / 2.0 - a * a / 6.0 + a * a * a / 24.0 - a * a * a * a / 120.0 : 1.0 + std::expm1(-a) / a;
  return {em1 / a, std::exp(a) * em1 / a * bracket};
}

double waiting_time_density(const RateSchedule& s, double nu, int k, double x) {
  if (!(nu > 0.0) || !(nu <= 1.0)) throw Error(ErrorKind::Validation, "nu must lie in (0, 1]");
  if (!(x > 0.0)) throw Error(ErrorKind::Validation, "waiting_time_density needs x > 0");
  if (k < 1 || k > s.kmax()) throw Error(ErrorKind::Validation, "rate index outside the schedule");
  const double l = s.rate(k);
  if (nu == 1.0) return l * std::exp(-l * x);
  return l * std::pow(x, nu - 1.0) * mittag_leffler(nu, nu, -l * std::pow(x, nu)).value;
}

double two_step_density(const RateSchedule& s, double nu, double x) {
  if (s.kmax() < 2) throw Error(ErrorKind::Validation, "two_step_density needs two rates");
  if (!(nu > 0.0) || !(nu <= 1.0)) throw Error(ErrorKind::Validation, "nu must lie in (0, 1]");
  if (!(x > 0.0)) throw Error(ErrorKind::Validation, "two_step_density needs x > 0");
  const double l1 = s.rate(1), l2 = s.rate(2);
  const double xn = std::pow(x, nu);
  const double diff = mittag_leffler(nu, nu, -l1 * xn).value - mittag_leffler(nu, nu, -l2 * xn).value;
  return l1 * l2 / (l2 - l1) * std::pow(x, nu - 1.0) * diff;
}

SpecialValue subordination_integral(const RateSchedule& s, Composition c, const CompositionParams& params, int k,
                                    double t, const QuadratureSpec& spec) {
  validate(c, params, s);
  check_time(t);
  check_state(s, k);
  const Canonical cc = canonical(c, params);
  auto base = [&s, k](double x) { return classical_pmf(s, k, x); };
  if (t == 0.0 || cc.c == Composition::Classical) return {base(t), 4.0 * kEps};
  if (cc.c == Composition::Sojourn) {
    return quad_finite(
        [&](double th) {
          const double h = std::sin(0.5 * th);
          return base(t * h * h) / kPi;
        },
        0.0, kPi, spec);
  }
  if (cc.c == Composition::Bridge) return quad_finite([&](double x) { return base(x) / t; }, 0.0, t, spec);
  const auto dens = half_line_density(cc, t);
  if (!dens) {
    throw Error(ErrorKind::Validation,
                "no single-density subordination form for " + std::string(composition_name(c)));
  }
  return quad_semi_infinite([&](double x) { return base(x) * dens->f(x); }, spec,
                            {1.0, std::exp(std::clamp(dens->log_scale, -600.0, 600.0))});
}

}  // namespace birthsub
