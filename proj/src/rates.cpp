#include "birthsub/rates.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "birthsub/error.hpp"
#include "json.hpp"

namespace birthsub {

namespace {

void check_n0(int n0, int kmax) {
  if (n0 < 1) throw Error(ErrorKind::Validation, "n0 must be at least 1");
  if (n0 > kmax) throw Error(ErrorKind::Validation, "n0 exceeds the number of rates");
}

double log_binomial(int n, int r) {
  return std::lgamma(n + 1.0) - std::lgamma(r + 1.0) - std::lgamma(n - r + 1.0);
}

}  // namespace

RateSchedule make_schedule(std::vector<double> rates, int n0) {
  if (rates.empty()) throw Error(ErrorKind::Validation, "rate list is empty");
  for (std::size_t i = 0; i < rates.size(); ++i) {
    if (std::isnan(rates[i]) || !std::isfinite(rates[i])) {
      throw Error(ErrorKind::Validation, "rate " + std::to_string(i + 1) + " is not finite");
    }
    if (!(rates[i] > 0.0)) {
      throw Error(ErrorKind::NonPositiveRate, "rate " + std::to_string(i + 1) + " = " + std::to_string(rates[i]));
    }
  }
  if (static_cast<int>(rates.size()) > kGeneralMaxK) {
    throw Error(ErrorKind::Validation, "general schedules are limited to " + std::to_string(kGeneralMaxK) + " rates");
  }
  check_n0(n0, static_cast<int>(rates.size()));

  std::vector<double> sorted(rates.begin() + (n0 - 1), rates.end());
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if ((sorted[i] - sorted[i - 1]) / sorted[i] < kRateSeparation) {
      throw Error(ErrorKind::NearDegenerateRates,
                  "rates " + std::to_string(sorted[i - 1]) + " and " + std::to_string(sorted[i]) +
                      " are closer than the relative separation 1e-9");
    }
  }

  RateSchedule s;
  s.kind_ = ScheduleKind::General;
  s.n0_ = n0;
  s.rates_ = std::move(rates);
  s.inverse_rate_sum_ = 0.0;
  for (double r : s.rates_) s.inverse_rate_sum_ += 1.0 / r;
  if (s.kmax() > kGeneralWarnK) {
    s.warnings_.push_back("general schedule with " + std::to_string(s.kmax()) +
                          " rates: spectral sums beyond k = 30 may lose precision to cancellation");
  }
  return s;
}

RateSchedule linear_schedule(double lambda, int kmax, int n0) {
  if (!(lambda > 0.0)) throw Error(ErrorKind::NonPositiveRate, "linear rate lambda must be positive");
  if (!std::isfinite(lambda)) throw Error(ErrorKind::Validation, "linear rate lambda is not finite");
  if (kmax < 1 || kmax > kLinearMaxK) {
    throw Error(ErrorKind::Validation, "linear kmax must lie in [1, " + std::to_string(kLinearMaxK) + "]");
  }
  check_n0(n0, kmax);
  RateSchedule s;
  s.kind_ = ScheduleKind::Linear;
  s.n0_ = n0;
  s.lambda_ = lambda;
  s.rates_.resize(static_cast<std::size_t>(kmax));
  for (int k = 1; k <= kmax; ++k) {
    s.rates_[static_cast<std::size_t>(k - 1)] = lambda * k;
    s.inverse_rate_sum_ += 1.0 / (lambda * k);
  }
  return s;
}

RateSchedule parse_schedule(std::string_view json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Validation, std::string("schedule JSON: ") + e.what());
  }
  try {
    const std::string kind = j.at("kind").get<std::string>();
    const int n0 = j.value("n0", 1);
    if (kind == "linear") return linear_schedule(j.at("lambda").get<double>(), j.at("kmax").get<int>(), n0);
    if (kind == "general") return make_schedule(j.at("rates").get<std::vector<double>>(), n0);
    throw Error(ErrorKind::Validation, "unknown schedule kind '" + kind + "'");
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Validation, std::string("schedule JSON: ") + e.what());
  }
}

std::string RateSchedule::to_json() const {
  nlohmann::json j;
  if (kind_ == ScheduleKind::Linear) {
    j = {{"kind", "linear"}, {"lambda", lambda_}, {"kmax", kmax()}};
  } else {
    j = {{"kind", "general"}, {"rates", rates_}};
  }
  if (n0_ != 1) j["n0"] = n0_;
  return j.dump();
}

double SpectralCoeffs::coeff(int m) const {
  const auto i = static_cast<std::size_t>(m - n0);
  return sign.at(i) * std::exp(log_mag.at(i));
}

std::vector<double> SpectralCoeffs::values() const {
  std::vector<double> out(size());
  for (std::size_t i = 0; i < size(); ++i) out[i] = sign[i] * std::exp(log_mag[i]);
  return out;
}

double SpectralCoeffs::max_abs() const {
  if (log_mag.empty()) return 0.0;
  return std::exp(*std::max_element(log_mag.begin(), log_mag.end()));
}

SpectralCoeffs spectral_coeffs(const RateSchedule& schedule, int k) {
  const int n0 = schedule.n0();
  if (k < n0 || k > schedule.kmax()) {
    throw Error(ErrorKind::Validation, "state k = " + std::to_string(k) + " outside [" + std::to_string(n0) + ", " +
                                           std::to_string(schedule.kmax()) + "]");
  }
  SpectralCoeffs c;
  c.n0 = n0;
  c.k = k;
  const auto count = static_cast<std::size_t>(k - n0 + 1);
  c.sign.resize(count);
  c.log_mag.resize(count);

  if (schedule.kind() == ScheduleKind::Linear) {
    // (-1)^{m-n0} C(k-1, n0-1) C(k-n0, m-n0)
    const double base = log_binomial(k - 1, n0 - 1);
    for (int m = n0; m <= k; ++m) {
      const auto i = static_cast<std::size_t>(m - n0);
      c.sign[i] = (m - n0) % 2 == 0 ? 1 : -1;
      c.log_mag[i] = base + log_binomial(k - n0, m - n0);
    }
    return c;
  }

  double log_num = 0.0;
  for (int j = n0; j < k; ++j) log_num += std::log(schedule.rate(j));
  for (int m = n0; m <= k; ++m) {
    const double lm = schedule.rate(m);
    int sign = 1;
    double log_den = 0.0;
    for (int l = n0; l <= k; ++l) {
      if (l == m) continue;
      const double diff = schedule.rate(l) - lm;
      if (diff < 0.0) sign = -sign;
      log_den += std::log(std::abs(diff));
    }
    const auto i = static_cast<std::size_t>(m - n0);
    c.sign[i] = sign;
    c.log_mag[i] = log_num - log_den;
  }
  return c;
}

SpectralCoeffs survival_coeffs(const RateSchedule& schedule, int k) {
  SpectralCoeffs c = spectral_coeffs(schedule, k);
  const double log_rk = std::log(schedule.rate(k));
  for (int m = c.n0; m <= k; ++m) c.log_mag[static_cast<std::size_t>(m - c.n0)] += log_rk - std::log(schedule.rate(m));
  return c;
}

SpectralSum spectral_sum(const SpectralCoeffs& c, std::span<const double> phi) {
  if (phi.size() != c.size()) throw Error(ErrorKind::Validation, "spectral_sum: size mismatch");
  std::vector<double> terms;
  terms.reserve(c.size());
  double abs_sum = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (phi[i] == 0.0) continue;
    const double mag = std::exp(c.log_mag[i] + std::log(std::abs(phi[i])));
    const double t = (c.sign[i] * (phi[i] < 0.0 ? -1 : 1)) * mag;
    terms.push_back(t);
    abs_sum += mag;
  }
  std::sort(terms.begin(), terms.end(), [](double a, double b) { return std::abs(a) < std::abs(b); });
  double sum = 0.0, comp = 0.0;
  for (double t : terms) {
    const double s = sum + t;
    comp += std::abs(sum) >= std::abs(t) ? (sum - s) + t : (t - s) + sum;
    sum = s;
  }
  return {sum + comp, abs_sum};
}

}  // namespace birthsub
