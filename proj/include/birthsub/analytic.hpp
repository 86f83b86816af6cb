#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "birthsub/quadrature.hpp"
#include "birthsub/rates.hpp"

namespace birthsub {

/// The random clocks a birth process can be read at. Names follow the CLI
/// spelling (see composition_name).
enum class Composition {
  Classical,     // N(t)
  Fp,            // N(T_t), Brownian first passage
  FpIterated,    // N(T^1_{T^2_{...T^n_t}})
  Sojourn,       // N(Gamma_t), Brownian sojourn above zero
  Bridge,        // N(G_t), Brownian-bridge sojourn (uniform on [0, t])
  Stable,        // N(S^alpha(t))
  Frac,          // N^nu(t)
  FracFp,        // N^nu(T^1_{...T^n_t})
  FracStable,    // N^nu(S^alpha(t))
  NuOfT2Alpha,   // N^nu(T_{2 alpha}(t))
  StableOfT2Nu,  // N(S^alpha(T_{2 nu}(t)))
  CauchyAbs,     // N(|C(c)|), folded Cauchy clock of scale c
};

std::string_view composition_name(Composition c);
/// Throws Validation on an unknown name.
Composition parse_composition(std::string_view name);
const std::vector<Composition>& all_compositions();

struct CompositionParams {
  double nu = 1.0;
  double alpha = 1.0;
  int n = 1;
  /// Folded-Cauchy scale; <= 0 means "use t".
  double cauchy_scale = 0.0;
};

/// Throws Validation when the parameters are outside the composition's domain.
void validate(Composition c, const CompositionParams& p, const RateSchedule& schedule);

struct PmfValue {
  double value = 0.0;
  double abs_err = 0.0;
  /// "initial", "closed-form", "spectral" or "mixture".
  std::string method;
};

/// Truncated state distribution p_k, k = k_first..k_last.
struct Pmf {
  double t = 0.0;
  int k_first = 1;
  std::vector<double> p;
  std::vector<double> err;
  std::vector<std::string> method;
  /// max(0, 1 - sum p) when k_first == n0, otherwise NaN.
  double tail_mass = 0.0;
  std::string provenance;

  int k_last() const { return k_first + static_cast<int>(p.size()) - 1; }
  double at(int k) const { return p.at(static_cast<std::size_t>(k - k_first)); }
};

PmfValue pmf_value(const RateSchedule& schedule, Composition c, const CompositionParams& params, int k, double t);
Pmf compute_pmf(const RateSchedule& schedule, Composition c, const CompositionParams& params, double t, int k_first,
                int k_last);

/// E exp(-lambda tau) for the random clock tau of the composition at outer time t.
SpecialValue clock_transform(Composition c, const CompositionParams& params, double lambda, double t);

// ---------------------------------------------------------------------------
// Named state probabilities.

double classical_pmf(const RateSchedule& s, int k, double t);
double fractional_pmf(const RateSchedule& s, double nu, int k, double t);
double fp_stopped_pmf(const RateSchedule& s, int k, double t, int n = 1);
double sojourn_pmf(const RateSchedule& s, int k, double t);
double bridge_pmf(const RateSchedule& s, int k, double t);
double stable_stopped_pmf(const RateSchedule& s, double alpha, int k, double t);
double frac_fp_pmf(const RateSchedule& s, double nu, int k, double t, int n = 1);
double frac_stable_pmf(const RateSchedule& s, double nu, double alpha, int k, double t);
double frac_t2alpha_pmf(const RateSchedule& s, double nu, double alpha, int k, double t);
double stable_of_t2nu_pmf(const RateSchedule& s, double nu, double alpha, int k, double t);
/// scale <= 0 selects c = t.
double cauchy_abs_pmf(const RateSchedule& s, int k, double t, double scale = 0.0);

/// P{N(t) > k} for the classical process.
double classical_survival(const RateSchedule& s, int k, double t);

// ---------------------------------------------------------------------------
// Means.

struct MeanValue {
  double t = 0.0;
  /// E min(N, K + 1): the mean truncated at the last state summed.
  double value = 0.0;
  int truncation_k = 0;
  double last_increment = 0.0;
  bool converged = false;
};

struct MeanOptions {
  /// Highest state summed; <= 0 means the schedule's kmax.
  int max_k = 0;
  double tolerance = 1e-10;
  /// Throw TruncationNotConverged instead of reporting converged = false.
  bool strict = false;
};

MeanValue classical_mean(const RateSchedule& s, double t, const MeanOptions& opt = {});
MeanValue fractional_mean(const RateSchedule& s, double nu, double t, const MeanOptions& opt = {});
/// Mean of N(T_t). DivergentMean for linear schedules.
MeanValue fp_stopped_mean(const RateSchedule& s, double t, const MeanOptions& opt = {});

struct Moments {
  double mean = 0.0;
  double variance = 0.0;
};
/// Mean and variance of the logarithmic law of a linear process read at the
/// bridge sojourn time.
Moments bridge_moments(double lambda, double t);

// ---------------------------------------------------------------------------
// Renewal structure of the fractional process.

/// Density lambda_k s^(nu-1) E_{nu,nu}(-lambda_k s^nu) of the k-th waiting time.
double waiting_time_density(const RateSchedule& s, double nu, int k, double x);
/// Closed-form density of the sum of the first two waiting times,
/// (l1 l2/(l2 - l1)) x^(nu-1) [E_{nu,nu}(-l1 x^nu) - E_{nu,nu}(-l2 x^nu)].
double two_step_density(const RateSchedule& s, double nu, double x);

// ---------------------------------------------------------------------------
// Subordination integrals used as independent cross-checks.

/// int_0^inf base_pmf(k, s) f_tau(s) ds for the compositions whose clock has a
/// tractable density (classical, fp, fp-iterated, sojourn, bridge, stable,
/// frac, nu-of-t2alpha, cauchy-abs). The base pmf is the spectral sum for the
/// general kind and the geometric closed form for the linear kind.
SpecialValue subordination_integral(const RateSchedule& s, Composition c, const CompositionParams& params, int k,
                                    double t, const QuadratureSpec& spec = {});

}  // namespace birthsub
