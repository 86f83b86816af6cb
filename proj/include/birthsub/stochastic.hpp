#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "birthsub/analytic.hpp"
#include "birthsub/rates.hpp"

namespace birthsub {

/// Reproducible random stream: identical (seed, stream_id) gives identical
/// draws. Parallel work hands each worker its own stream_id.
class Rng {
 public:
  Rng(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  /// Uniform on the open interval (0, 1).
  double uniform();
  /// Unit-mean exponential.
  double exponential();
  /// Standard normal (Box-Muller, both variates used).
  double normal();

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

enum class Law { LevyFp, Sojourn, BridgeSojourn, Stable, InverseStable, Lamperti, FoldedCauchy, WrightXi };
std::string_view law_name(Law law);

struct SubordinatorSample {
  Law law;
  /// Outer time; 1 for laws without one.
  double t = 1.0;
  double value = 0.0;
};

/// T_t = t^2 / Z^2, iterated n times innermost first.
SubordinatorSample sample_levy_fp(double t, int n, Rng& rng);
/// t sin^2(Theta/2), Theta uniform on (0, 2 pi): the arcsine law.
SubordinatorSample sample_sojourn(double t, Rng& rng);
/// Uniform on (0, t).
SubordinatorSample sample_bridge_sojourn(double t, Rng& rng);
/// Kanter's exact method: t^(1/alpha) (a(U)/E)^((1-alpha)/alpha), U uniform on (0, pi).
SubordinatorSample sample_stable(double alpha, double t, Rng& rng);
/// Hitting-time inverse of the nu-stable subordinator: (t / S^nu(1))^nu.
SubordinatorSample sample_inverse_stable(double nu, double t, Rng& rng);
/// (S1 / S2)^alpha for independent nu-stable S1, S2.
SubordinatorSample sample_lamperti(double nu, double alpha, Rng& rng);
/// scale * tan(pi U / 2).
SubordinatorSample sample_folded_cauchy(double scale, Rng& rng);
/// Random rate with density W_{-nu,1-nu}(-xi): S^nu(1)^(-nu).
SubordinatorSample sample_wright_xi(double nu, Rng& rng);
/// Mittag-Leffler holding time with P{T > x} = E_nu(-lambda x^nu): (E / lambda)^(1/nu) S^nu(1).
double sample_ml_holding(double nu, double lambda, Rng& rng);

/// Final state of the classical process at stop_time. Returns kmax + 1 when
/// the path leaves the schedule (overflow).
int simulate_birth_path(const RateSchedule& schedule, double stop_time, Rng& rng);
/// Fractional process built from Mittag-Leffler holding times.
int simulate_renewal_path(const RateSchedule& schedule, double nu, double stop_time, Rng& rng);

/// Counts of final states k = k_first..k_last plus paths that overflowed.
struct EmpiricalPmf {
  int k_first = 1;
  std::vector<std::uint64_t> counts;
  std::uint64_t n_paths = 0;
  std::uint64_t overflow = 0;

  EmpiricalPmf() = default;
  EmpiricalPmf(int first, int last);

  int k_last() const { return k_first + static_cast<int>(counts.size()) - 1; }
  /// Record one final state; states beyond k_last count as overflow.
  void add(int k);
  double freq(int k) const;
  double overflow_fraction() const { return n_paths ? double(overflow) / double(n_paths) : 0.0; }
  /// Associative, commutative merge; supports must match.
  void merge(const EmpiricalPmf& other);

  /// Columns k,count,freq,overflow_fraction.
  std::string to_csv() const;
  static EmpiricalPmf from_csv(std::string_view csv, std::uint64_t n_paths);

  bool operator==(const EmpiricalPmf&) const = default;
};

/// Paths run in chunks of kChunkPaths; chunk c draws from Rng(seed, c). The
/// result does not depend on the number of threads.
inline constexpr std::uint64_t kChunkPaths = 4096;

struct SimulationOptions {
  std::uint64_t n_paths = 100000;
  std::uint64_t seed = 1;
  /// 0 selects std::thread::hardware_concurrency().
  unsigned threads = 0;
};

/// Runs `final_state` once per path; it returns a state in [n0, kmax + 1].
EmpiricalPmf simulate_states(const RateSchedule& schedule, const SimulationOptions& opt,
                             const std::function<int(Rng&)>& final_state);

/// Classical process read at an arbitrary random clock.
EmpiricalPmf simulate_clock(const RateSchedule& schedule, const SimulationOptions& opt,
                            const std::function<double(Rng&)>& clock);

/// Samples the composition's random time innermost first, then the classical
/// process at that time. Fractional layers use the inverse-stable clock.
double sample_composition_time(Composition c, const CompositionParams& params, double t, Rng& rng);
EmpiricalPmf simulate_composition(const RateSchedule& schedule, Composition c, const CompositionParams& params,
                                  double t, const SimulationOptions& opt);

}  // namespace birthsub
