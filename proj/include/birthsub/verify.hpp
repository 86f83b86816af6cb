#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "birthsub/analytic.hpp"
#include "birthsub/rates.hpp"
#include "birthsub/stochastic.hpp"

namespace birthsub {

using ParamList = std::vector<std::pair<std::string, double>>;

/// One numerical identity at one parameter point. For equalities pass means
/// abs_diff <= tolerance; separation checks (`separation` set) pass when
/// abs_diff > tolerance instead.
struct IdentityReport {
  std::string id;
  ParamList params;
  double lhs = 0.0;
  double rhs = 0.0;
  double abs_diff = 0.0;
  double tolerance = 0.0;
  bool separation = false;
  bool pass = false;
  /// Set when a side could not be evaluated; lhs/rhs then hold best estimates.
  std::string note;
};

/// Builds a report and fills abs_diff and pass. NaN on either side fails.
IdentityReport make_report(std::string id, ParamList params, double lhs, double rhs, double tolerance,
                           bool separation = false);

struct GofReport {
  std::string id;
  ParamList params;
  double tv = 0.0;
  double chi_square = 0.0;
  int dof = 0;
  double p_value = 1.0;
  std::uint64_t n_paths = 0;
  double overflow_fraction = 0.0;
  double tv_tolerance = 0.01;
  bool pass = false;
};

/// Chi-square floor applied together with the TV threshold.
inline constexpr double kMinPValue = 1e-3;
/// Largest overflow fraction tolerated in a Monte Carlo comparison.
inline constexpr double kMaxOverflow = 1e-3;

/// Empirical against analytic probabilities on the same support; the overflow
/// bin is compared with the analytic tail. Bins with expected count < 5 are
/// merged with their neighbours before the Pearson statistic. Throws
/// DegenerateSupport when the merged bins collapse into one, Validation on a
/// support mismatch or an empty sample.
GofReport gof_compare(const EmpiricalPmf& empirical, const Pmf& analytic);
/// Two-sample homogeneity version for laws known only by simulation.
GofReport gof_compare(const EmpiricalPmf& a, const EmpiricalPmf& b);

// ---------------------------------------------------------------------------
// Special-function identities.

/// Power-series/asymptotic reference against the integral representation of
/// E_{nu,1}(x), x < 0.
IdentityReport check_mitta_int(double nu, double x, double tol = 1e-6);
/// int_0^inf e^{-z t} E_{nu,1}(-zeta t^nu) dt = z^(nu-1) / (z^nu + zeta).
IdentityReport check_mitlap(double nu, double zeta, double z, double tol = 1e-6);
/// int_0^inf e^{-lambda s} t^-nu W_{-nu,1-nu}(-s t^-nu) ds = E_{nu,1}(-lambda t^nu).
IdentityReport check_ackard(double nu, double lambda, double t, double tol = 1e-6);
/// E_{nu,1}(-z t^nu) against its Wright-function form ("mmm-wright") and its
/// ratio-kernel form ("mmm-kernel").
std::pair<IdentityReport, IdentityReport> check_mmm(double nu, double z, double t, double tol = 1e-6);

/// E_{nu alpha,1}(-lambda t^(nu alpha)) against int K_nu(r) E_alpha(-r lambda^(1/nu) t^alpha) dr
/// ("gen-mitta") and against the commuted int K_alpha(r) E_nu(-r lambda^(1/alpha) t^nu) dr
/// ("gen-mitta2"). K_1 is a point mass at r = 1.
std::pair<IdentityReport, IdentityReport> check_gen_mitta(double nu, double alpha, double lambda, double t,
                                                          double tol = 1e-5);
/// E_{nu alpha beta,1}(-lambda t^(nu alpha beta)) against the nested
/// int int K_nu(r) K_alpha(w) E_beta(-w r^(1/alpha) lambda^(1/(nu alpha)) t^beta) dw dr.
IdentityReport check_triple_index(double nu, double alpha, double beta, double lambda, double t, double tol = 1e-4);

// ---------------------------------------------------------------------------
// Renewal structure of the fractional process.

/// Laplace transform at mu of the density of the sum of the first k waiting
/// times (k = 1 or 2) against prod_j lambda_j / (mu^nu + lambda_j).
IdentityReport check_renewal_convolution(const RateSchedule& s, double nu, int k, double mu, double tol = 1e-6);

// ---------------------------------------------------------------------------
// Governing equations. The classical residual uses central differences with
// step kFdStep and is reported relative to lambda_k p_k + lambda_{k-1} p_{k-1};
// the first-passage residuals are exact derivatives of the exponential sums.

inline constexpr double kFdStep = 1e-4;

IdentityReport check_fra(const RateSchedule& s, int k, double t, double tol = 1e-5);
IdentityReport check_eq_sec(const RateSchedule& s, int k, double t, double tol = 1e-10);
/// d^(2^n)/dt^(2^n) p_k = 2^(2^n - 1) [lambda_k p_k - lambda_{k-1} p_{k-1}] for the
/// n-fold first-passage clock, both sides divided by 2^(2^n - 1).
IdentityReport check_olidata(const RateSchedule& s, int n, int k, double t, double tol = 1e-10);
/// Second-order equation of N(|C(t)|) by central second differences.
/// For k = 1, 2 the equation carries the source term +-2 lambda_1 / (pi t).
IdentityReport check_cauchy_ode(const RateSchedule& s, int k, double t, double tol = 1e-4);

// ---------------------------------------------------------------------------
// Subordination and distributional identities.

/// Analytic pmf against the subordination quadrature.
IdentityReport check_subordination(const RateSchedule& s, Composition c, const CompositionParams& params, int k,
                                   double t, double tol = 1e-6);
/// N(S^(1/2^n)) at time t 2^(1 - 1/2^n) against the n-fold first-passage clock at t.
IdentityReport check_unexpected_relation(const RateSchedule& s, int n, int k, double t, double tol = 1e-12);
/// N^(1/2)(T_t) against the folded-Cauchy quadrature at scale sqrt(2) t.
IdentityReport check_half_fp_cauchy(const RateSchedule& s, int k, double t, double tol = 1e-6);
/// Fractional first-passage transform from the real integral against the
/// complex Mittag-Leffler form -(2/pi) int Im E_{2nu}(-x^(2nu) e^{i pi nu}) / (x + b) dx.
IdentityReport check_frco_complex(double nu, double lambda, double t, double tol = 1e-3);
/// Separation check: TV between N^nu(S^nu(t)) and N(S^nu(T_{2nu}(t))) on the
/// schedule's states and tail must exceed `factor` times the summed error bounds.
IdentityReport check_noncommutativity(const RateSchedule& s, double nu, double t, double factor = 10.0);

// ---------------------------------------------------------------------------
// Closed-form spot values.

/// p_1(t) of N(T_t) against e^{-t sqrt(2 lambda_1)}.
IdentityReport check_fp_spot(double lambda, double t, double tol = 1e-12);
/// n-fold first-passage p_1 at large n against the limit e^{-2t}.
IdentityReport check_iterated_limit(double lambda, double t, int n = 40, double tol = 1e-6);
/// Truncated linear mean against e^{lambda t}.
IdentityReport check_linear_mean(double lambda, double t, int kmax = kLinearMaxK, double tol = 1e-9);
/// Truncated linear fractional mean against E_{nu,1}(lambda t^nu).
IdentityReport check_fractional_mean(double nu, double lambda, double t, int kmax = kLinearMaxK, double tol = 1e-8);
/// Bridge-sojourn moments against direct summation of the logarithmic law
/// ("bridge-mean", "bridge-variance") over k <= kLinearMaxK; keep lambda t <= 2
/// so the omitted tail stays below the tolerance.
std::pair<IdentityReport, IdentityReport> check_bridge_moments(double lambda, double t, double tol = 1e-10);

// ---------------------------------------------------------------------------
// Suite.

struct SuiteResult {
  std::vector<IdentityReport> identities;
  std::vector<GofReport> gof;

  bool all_pass() const;
  std::vector<std::string> failing_ids() const;
  /// [{id, params, lhs, rhs, diff, tol, pass}], Monte Carlo rows included with
  /// lhs = TV and the chi-square fields alongside.
  std::string to_json() const;
  /// id,tv,chi_square,dof,p_value,n_paths,overflow_fraction,tv_tol,pass.
  std::string gof_csv() const;
};

/// Family names recognised in a suite fixture, in execution order.
const std::vector<std::string>& suite_families();

/// Parsed and validated suite fixture. Schedules are built on load, so a bad
/// schedule raises its validation error here rather than during the run.
struct SuiteConfig {
  std::string json_text;

  /// Throws Validation on malformed JSON or unknown families, and the
  /// schedule errors (NonPositiveRate, NearDegenerateRates, ...).
  static SuiteConfig parse(std::string_view json_text);
};

struct SuiteOptions {
  /// Run only these families; empty runs everything in the fixture.
  std::vector<std::string> only;
  /// Overrides the fixture's worker count for Monte Carlo families (0 keeps it).
  unsigned threads = 0;
};

/// Runs every family present in the fixture. Numerical failures become failed
/// reports; the run never aborts half way.
SuiteResult run_suite(const SuiteConfig& config, const SuiteOptions& options = {});

}  // namespace birthsub
