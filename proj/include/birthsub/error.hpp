#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace birthsub {

enum class ErrorKind {
  Domain,
  NonConvergence,
  NonPositiveRate,
  NearDegenerateRates,
  TruncationNotConverged,
  DivergentMean,
  DegenerateSupport,
  Validation,
};

const char* to_string(ErrorKind kind);

/// Single exception type for the library. The kind drives the CLI exit code;
/// numerical failures may carry the best estimate reached before giving up.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what, std::optional<double> best_estimate = std::nullopt)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what),
        kind_(kind),
        best_estimate_(best_estimate) {}

  ErrorKind kind() const noexcept { return kind_; }
  std::optional<double> best_estimate() const noexcept { return best_estimate_; }

  /// True for failures caused by bad input rather than by the numerics.
  bool is_validation() const noexcept {
    return kind_ != ErrorKind::NonConvergence && kind_ != ErrorKind::TruncationNotConverged;
  }

 private:
  ErrorKind kind_;
  std::optional<double> best_estimate_;
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Domain: return "DomainError";
    case ErrorKind::NonConvergence: return "NonConvergence";
    case ErrorKind::NonPositiveRate: return "NonPositiveRate";
    case ErrorKind::NearDegenerateRates: return "NearDegenerateRates";
    case ErrorKind::TruncationNotConverged: return "TruncationNotConverged";
    case ErrorKind::DivergentMean: return "DivergentMean";
    case ErrorKind::DegenerateSupport: return "DegenerateSupport";
    case ErrorKind::Validation: return "ValidationError";
  }
  return "Error";
}

[[noreturn]] inline void domain_error(const std::string& what) { throw Error(ErrorKind::Domain, what); }

}  // namespace birthsub
