#include "birthsub/stochastic.hpp"

#include <atomic>
#include <cmath>
#include <charconv>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

#include "birthsub/error.hpp"

namespace birthsub {

namespace {

constexpr double kPi = std::numbers::pi;

void require_time(double t, const char* what) {
  if (!(t > 0.0) || !std::isfinite(t)) throw Error(ErrorKind::Validation, std::string(what) + " must be positive");
}

void require_unit(double x, const char* what, bool closed) {
  if (!(x > 0.0) || !(closed ? x <= 1.0 : x < 1.0)) {
    throw Error(ErrorKind::Validation, std::string(what) + (closed ? " must lie in (0, 1]" : " must lie in (0, 1)"));
  }
}

// log of Kanter's a(u); kept in logs so that small indices do not overflow.
double log_kanter(double alpha, double u) {
  return std::log(std::sin((1.0 - alpha) * u)) + alpha / (1.0 - alpha) * std::log(std::sin(alpha * u)) -
         std::log(std::sin(u)) / (1.0 - alpha);
}

// S^alpha(1); alpha = 1 is the identity clock.
double unit_stable(double alpha, Rng& rng) {
  if (alpha == 1.0) return 1.0;
  const double u = kPi * rng.uniform();
  const double e = rng.exponential();
  return std::exp((1.0 - alpha) / alpha * (log_kanter(alpha, u) - std::log(e)));
}

// Clock helpers accept t = 0 (a nested clock can return 0).
double stable_at(double alpha, double t, Rng& rng) {
  if (t == 0.0 || alpha == 1.0) return t;
  return std::pow(t, 1.0 / alpha) * unit_stable(alpha, rng);
}

double inverse_stable_at(double nu, double t, Rng& rng) {
  if (t == 0.0 || nu == 1.0) return t;
  return std::pow(t / unit_stable(nu, rng), nu);
}

double levy_at(double t, int n, Rng& rng) {
  double x = t;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    x = x * x / (z * z);
  }
  return x;
}

}  // namespace

Rng::Rng(std::uint64_t seed, std::uint64_t stream_id) : seed_(seed), stream_id_(stream_id) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream_id), static_cast<std::uint32_t>(stream_id >> 32),
                    0x62697274u};
  engine_.seed(seq);
}

double Rng::uniform() {
  // 53 random bits, shifted off zero.
  return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double Rng::exponential() { return -std::log(uniform()); }

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double r = std::sqrt(-2.0 * std::log(uniform()));
  const double th = 2.0 * kPi * uniform();
  spare_ = r * std::sin(th);
  has_spare_ = true;
  return r * std::cos(th);
}

std::string_view law_name(Law law) {
  switch (law) {
    case Law::LevyFp: return "levy_fp";
    case Law::Sojourn: return "sojourn";
    case Law::BridgeSojourn: return "bridge_sojourn";
    case Law::Stable: return "stable";
    case Law::InverseStable: return "inverse_stable";
    case Law::Lamperti: return "lamperti";
    case Law::FoldedCauchy: return "folded_cauchy";
    case Law::WrightXi: return "wright_xi";
  }
  return "unknown";
}

SubordinatorSample sample_levy_fp(double t, int n, Rng& rng) {
  require_time(t, "first-passage level t");
  if (n < 1) throw Error(ErrorKind::Validation, "iteration count n must be >= 1");
  return {Law::LevyFp, t, levy_at(t, n, rng)};
}

SubordinatorSample sample_sojourn(double t, Rng& rng) {
  require_time(t, "sojourn horizon t");
  const double s = std::sin(kPi * rng.uniform());
  return {Law::Sojourn, t, t * s * s};
}

SubordinatorSample sample_bridge_sojourn(double t, Rng& rng) {
  require_time(t, "bridge horizon t");
  return {Law::BridgeSojourn, t, t * rng.uniform()};
}

SubordinatorSample sample_stable(double alpha, double t, Rng& rng) {
  require_unit(alpha, "stable index alpha", false);
  require_time(t, "stable time t");
  return {Law::Stable, t, stable_at(alpha, t, rng)};
}

SubordinatorSample sample_inverse_stable(double nu, double t, Rng& rng) {
  require_unit(nu, "inverse-stable index nu", false);
  require_time(t, "inverse-stable time t");
  return {Law::InverseStable, t, inverse_stable_at(nu, t, rng)};
}

SubordinatorSample sample_lamperti(double nu, double alpha, Rng& rng) {
  require_unit(nu, "Lamperti index nu", false);
  require_unit(alpha, "Lamperti exponent alpha", true);
  const double s1 = unit_stable(nu, rng);
  const double s2 = unit_stable(nu, rng);
  return {Law::Lamperti, 1.0, std::pow(s1 / s2, alpha)};
}

SubordinatorSample sample_folded_cauchy(double scale, Rng& rng) {
  require_time(scale, "Cauchy scale");
  return {Law::FoldedCauchy, 1.0, scale * std::tan(0.5 * kPi * rng.uniform())};
}

SubordinatorSample sample_wright_xi(double nu, Rng& rng) {
  require_unit(nu, "Wright index nu", false);
  return {Law::WrightXi, 1.0, std::pow(unit_stable(nu, rng), -nu)};
}

double sample_ml_holding(double nu, double lambda, Rng& rng) {
  const double e = rng.exponential() / lambda;
  if (nu == 1.0) return e;
  return std::pow(e, 1.0 / nu) * unit_stable(nu, rng);
}

int simulate_birth_path(const RateSchedule& schedule, double stop_time, Rng& rng) {
  int k = schedule.n0();
  double clock = 0.0;
  while (k <= schedule.kmax()) {
    clock += rng.exponential() / schedule.rate(k);
    if (!(clock <= stop_time)) return k;
    ++k;
  }
  return k;
}

int simulate_renewal_path(const RateSchedule& schedule, double nu, double stop_time, Rng& rng) {
  require_unit(nu, "nu", true);
  int k = schedule.n0();
  double clock = 0.0;
  while (k <= schedule.kmax()) {
    clock += sample_ml_holding(nu, schedule.rate(k), rng);
    if (!(clock <= stop_time)) return k;
    ++k;
  }
  return k;
}

EmpiricalPmf::EmpiricalPmf(int first, int last) : k_first(first), counts(static_cast<std::size_t>(last - first + 1)) {
  if (last < first) throw Error(ErrorKind::Validation, "empty empirical support");
}

void EmpiricalPmf::add(int k) {
  ++n_paths;
  if (k > k_last()) {
    ++overflow;
    return;
  }
  if (k < k_first) throw Error(ErrorKind::Validation, "state below the empirical support");
  ++counts[static_cast<std::size_t>(k - k_first)];
}

double EmpiricalPmf::freq(int k) const {
  if (k < k_first || k > k_last() || n_paths == 0) return 0.0;
  return double(counts[static_cast<std::size_t>(k - k_first)]) / double(n_paths);
}

void EmpiricalPmf::merge(const EmpiricalPmf& other) {
  if (other.k_first != k_first || other.counts.size() != counts.size()) {
    throw Error(ErrorKind::Validation, "cannot merge empirical pmfs with different supports");
  }
  for (std::size_t i = 0; i < counts.size(); ++i) counts[i] += other.counts[i];
  n_paths += other.n_paths;
  overflow += other.overflow;
}

namespace {

std::string shortest(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

}  // namespace

std::string EmpiricalPmf::to_csv() const {
  std::string out = "k,count,freq,overflow_fraction\n";
  const std::string of = shortest(overflow_fraction());
  for (int k = k_first; k <= k_last(); ++k) {
    out += std::to_string(k) + ',' + std::to_string(counts[static_cast<std::size_t>(k - k_first)]) + ',' +
           shortest(freq(k)) + ',' + of + '\n';
  }
  return out;
}

EmpiricalPmf EmpiricalPmf::from_csv(std::string_view csv, std::uint64_t n_paths) {
  std::istringstream in{std::string(csv)};
  std::string line;
  if (!std::getline(in, line) || line.rfind("k,count", 0) != 0) {
    throw Error(ErrorKind::Validation, "empirical CSV: missing header");
  }
  std::vector<std::pair<int, std::uint64_t>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    int k = 0;
    std::uint64_t c = 0;
    const char* p = line.data();
    const char* end = p + line.size();
    auto r1 = std::from_chars(p, end, k);
    if (r1.ec != std::errc{} || r1.ptr == end || *r1.ptr != ',') throw Error(ErrorKind::Validation, "empirical CSV: bad row");
    auto r2 = std::from_chars(r1.ptr + 1, end, c);
    if (r2.ec != std::errc{}) throw Error(ErrorKind::Validation, "empirical CSV: bad count");
    rows.emplace_back(k, c);
  }
  if (rows.empty()) throw Error(ErrorKind::Validation, "empirical CSV: no rows");
  EmpiricalPmf e(rows.front().first, rows.back().first);
  std::uint64_t total = 0;
  for (const auto& [k, c] : rows) {
    if (k < e.k_first || k > e.k_last()) throw Error(ErrorKind::Validation, "empirical CSV: rows out of order");
    e.counts[static_cast<std::size_t>(k - e.k_first)] = c;
    total += c;
  }
  if (total > n_paths) throw Error(ErrorKind::Validation, "empirical CSV: counts exceed n_paths");
  e.n_paths = n_paths;
  e.overflow = n_paths - total;
  return e;
}

EmpiricalPmf simulate_states(const RateSchedule& schedule, const SimulationOptions& opt,
                             const std::function<int(Rng&)>& final_state) {
  const std::uint64_t chunks = (opt.n_paths + kChunkPaths - 1) / kChunkPaths;
  unsigned threads = opt.threads ? opt.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, std::max<std::uint64_t>(chunks, 1)));

  EmpiricalPmf total(schedule.n0(), schedule.kmax());
  std::atomic<std::uint64_t> next{0};
  std::mutex mu;
  std::exception_ptr failure;
  auto worker = [&] {
    EmpiricalPmf local(schedule.n0(), schedule.kmax());
    try {
      for (std::uint64_t c = next++; c < chunks; c = next++) {
        Rng rng(opt.seed, c);
        const std::uint64_t begin = c * kChunkPaths;
        const std::uint64_t end = std::min(opt.n_paths, begin + kChunkPaths);
        for (std::uint64_t i = begin; i < end; ++i) local.add(final_state(rng));
      }
    } catch (...) {
      std::lock_guard lock(mu);
      if (!failure) failure = std::current_exception();
    }
    std::lock_guard lock(mu);
    total.merge(local);
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
  return total;
}

EmpiricalPmf simulate_clock(const RateSchedule& schedule, const SimulationOptions& opt,
                            const std::function<double(Rng&)>& clock) {
  return simulate_states(schedule, opt, [&](Rng& rng) { return simulate_birth_path(schedule, clock(rng), rng); });
}

double sample_composition_time(Composition c, const CompositionParams& p, double t, Rng& rng) {
  if (t == 0.0) return 0.0;
  switch (c) {
    case Composition::Classical: return t;
    case Composition::Fp: return levy_at(t, 1, rng);
    case Composition::FpIterated: return levy_at(t, p.n, rng);
    case Composition::Sojourn: {
      const double s = std::sin(kPi * rng.uniform());
      return t * s * s;
    }
    case Composition::Bridge: return t * rng.uniform();
    case Composition::Stable: return stable_at(p.alpha, t, rng);
    case Composition::Frac: return inverse_stable_at(p.nu, t, rng);
    case Composition::FracFp: return inverse_stable_at(p.nu, levy_at(t, p.n, rng), rng);
    case Composition::FracStable: return inverse_stable_at(p.nu, stable_at(p.alpha, t, rng), rng);
    case Composition::NuOfT2Alpha: return inverse_stable_at(p.nu, inverse_stable_at(p.alpha, t, rng), rng);
    case Composition::StableOfT2Nu: return stable_at(p.alpha, inverse_stable_at(p.nu, t, rng), rng);
    case Composition::CauchyAbs: {
      const double scale = p.cauchy_scale > 0.0 ? p.cauchy_scale : t;
      return scale * std::tan(0.5 * kPi * rng.uniform());
    }
  }
  throw Error(ErrorKind::Validation, "unknown composition");
}

EmpiricalPmf simulate_composition(const RateSchedule& schedule, Composition c, const CompositionParams& params,
                                  double t, const SimulationOptions& opt) {
  validate(c, params, schedule);
  if (!(t >= 0.0) || !std::isfinite(t)) throw Error(ErrorKind::Validation, "time t must be finite and >= 0");
  return simulate_clock(schedule, opt, [&](Rng& rng) { return sample_composition_time(c, params, t, rng); });
}

}  // namespace birthsub
