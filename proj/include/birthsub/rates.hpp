#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace birthsub {

enum class ScheduleKind { General, Linear };

/// Birth rates lambda_1..lambda_Kmax of a pure birth process started from n0
/// individuals. Immutable once built; construct through make_schedule,
/// linear_schedule or parse_schedule.
class RateSchedule {
 public:
  ScheduleKind kind() const { return kind_; }
  int n0() const { return n0_; }
  int kmax() const { return static_cast<int>(rates_.size()); }
  /// Per-individual rate of the linear kind; 0 for the general kind.
  double lambda() const { return lambda_; }
  /// lambda_k for 1 <= k <= kmax.
  double rate(int k) const { return rates_.at(static_cast<std::size_t>(k - 1)); }
  const std::vector<double>& rates() const { return rates_; }
  /// sum_k 1/lambda_k over the stored rates (non-explosion diagnostic).
  double inverse_rate_sum() const { return inverse_rate_sum_; }
  const std::vector<std::string>& warnings() const { return warnings_; }

  /// JSON form accepted by parse_schedule.
  std::string to_json() const;

 private:
  friend RateSchedule make_schedule(std::vector<double> rates, int n0);
  friend RateSchedule linear_schedule(double lambda, int kmax, int n0);

  ScheduleKind kind_ = ScheduleKind::General;
  int n0_ = 1;
  double lambda_ = 0.0;
  std::vector<double> rates_;
  double inverse_rate_sum_ = 0.0;
  std::vector<std::string> warnings_;
};

inline constexpr double kRateSeparation = 1e-9;
inline constexpr int kGeneralWarnK = 30;
inline constexpr int kGeneralMaxK = 60;
inline constexpr int kLinearMaxK = 500;

/// General schedule. Throws NonPositiveRate, NearDegenerateRates (relative
/// separation below kRateSeparation) or Validation (empty list, n0 out of range,
/// more than kGeneralMaxK rates).
RateSchedule make_schedule(std::vector<double> rates, int n0 = 1);
/// lambda_k = lambda * k for k = 1..kmax, kmax <= kLinearMaxK.
RateSchedule linear_schedule(double lambda, int kmax, int n0 = 1);
/// {"kind":"linear","lambda":1.0,"kmax":100} or {"kind":"general","rates":[...],"n0":1}.
RateSchedule parse_schedule(std::string_view json_text);

/// Partial-fraction weights c_m = prod_{j=n0}^{k-1} lambda_j / prod_{l != m} (lambda_l - lambda_m),
/// m = n0..k, held as sign and log-magnitude.
struct SpectralCoeffs {
  int n0 = 1;
  int k = 1;
  std::vector<int> sign;
  std::vector<double> log_mag;

  std::size_t size() const { return sign.size(); }
  /// Coefficient of state m (n0 <= m <= k) as a double.
  double coeff(int m) const;
  std::vector<double> values() const;
  double max_abs() const;
};

SpectralCoeffs spectral_coeffs(const RateSchedule& schedule, int k);

/// d_m = c_m lambda_k / lambda_m = prod_{l != m} lambda_l / (lambda_l - lambda_m):
/// P{N(t) > k} = sum_m d_m (1 - e^{-lambda_m t}) and sum_m d_m = 1.
SpectralCoeffs survival_coeffs(const RateSchedule& schedule, int k);

struct SpectralSum {
  double value = 0.0;
  /// sum_m |c_m phi_m|: the scale against which rounding in the sum is judged.
  double abs_sum = 0.0;
};

/// sum_m c_m phi_m with terms added in increasing magnitude under Neumaier
/// compensation. phi[i] belongs to state n0 + i.
SpectralSum spectral_sum(const SpectralCoeffs& c, std::span<const double> phi);

}  // namespace birthsub
