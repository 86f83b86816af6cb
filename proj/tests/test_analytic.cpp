#include <cmath>
#include <numbers>

#include "birthsub/analytic.hpp"
#include "birthsub/error.hpp"
#include "birthsub/specfun.hpp"
#include "doctest.h"

using namespace birthsub;

namespace {

const double kE = std::numbers::e;
const double kSqrt2 = std::numbers::sqrt2;

ErrorKind kind_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error thrown");
  return ErrorKind::Domain;
}

}  // namespace

TEST_CASE("classical state probabilities") {
  const auto one = make_schedule({1.0});
  CHECK(classical_pmf(one, 1, 1.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
  const auto two = make_schedule({1.0, 2.0});
  CHECK(classical_pmf(two, 2, 1.0) == doctest::Approx(0.23254415793482963).epsilon(1e-13));
  CHECK(classical_pmf(two, 1, 0.0) == 1.0);
  CHECK(classical_pmf(two, 2, 0.0) == 0.0);

  // The linear closed form agrees with the spectral sum on the same rates, to
  // within the sum's own cancellation estimate.
  for (int n0 : {1, 2, 3}) {
    const auto lin = linear_schedule(0.7, 20, n0);
    std::vector<double> rates;
    for (int k = 1; k <= 20; ++k) rates.push_back(0.7 * k);
    const auto gen = make_schedule(rates, n0);
    for (int k = n0; k <= 20; ++k) {
      for (double t : {0.1, 1.0, 3.0}) {
        const auto g = pmf_value(gen, Composition::Classical, {}, k, t);
        const double diff = std::abs(classical_pmf(lin, k, t) - g.value);
        CHECK(diff <= g.abs_err);
        CHECK(diff < 1e-8);
      }
    }
  }
}

TEST_CASE("first-passage stopped probabilities") {
  const auto one = make_schedule({1.0});
  CHECK(fp_stopped_pmf(one, 1, 1.0) == doctest::Approx(0.24311673443421421).epsilon(1e-14));
  const auto two = make_schedule({1.0, 2.0});
  CHECK(fp_stopped_pmf(two, 2, 1.0) == doctest::Approx(std::exp(-kSqrt2) - std::exp(-2.0)).epsilon(1e-13));
  const auto sub = subordination_integral(two, Composition::Fp, {}, 2, 1.0, {1e-11, 1e-14, 2000});
  CHECK(sub.value == doctest::Approx(fp_stopped_pmf(two, 2, 1.0)).epsilon(1e-9));

  // n -> infinity: explosion with probability 1 - e^{-2t}.
  const auto four = make_schedule({1.0, 2.0, 3.5, 5.0});
  for (double t : {0.5, 1.0, 2.0}) {
    CHECK(std::abs(fp_stopped_pmf(four, 1, t, 40) - std::exp(-2.0 * t)) < 1e-6);
    for (int k = 2; k <= 4; ++k) CHECK(std::abs(fp_stopped_pmf(four, k, t, 40)) < 1e-6);
  }

  // A stable clock of index 1/2^n at time s = t 2^{1-1/2^n} is the n-fold first passage at t.
  for (int n : {1, 2, 3}) {
    const double a = std::ldexp(1.0, -n);
    for (double t : {0.5, 1.0, 2.0}) {
      const double s = t * std::pow(2.0, 1.0 - a);
      for (int k = 1; k <= 4; ++k) {
        CHECK(std::abs(stable_stopped_pmf(four, a, k, s) - fp_stopped_pmf(four, k, t, n)) < 1e-12);
      }
    }
  }
}

TEST_CASE("sojourn and bridge probabilities") {
  const auto one = make_schedule({1.0});
  CHECK(sojourn_pmf(one, 1, 2.0) == doctest::Approx(0.46575960759364044).epsilon(1e-13));
  const auto two = make_schedule({1.0, 2.0});
  CHECK(sojourn_pmf(two, 2, 2.0) == doctest::Approx(0.1572512850399694).epsilon(1e-12));
  CHECK(sojourn_pmf(two, 1, 0.0) == 1.0);

  CHECK(bridge_pmf(one, 1, 1.0) == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-15));
  CHECK(bridge_pmf(two, 1, 0.0) == 1.0);
  CHECK(bridge_pmf(two, 2, 0.0) == 0.0);

  const auto lin = linear_schedule(1.0, 200);
  std::vector<double> rates;
  for (int k = 1; k <= 12; ++k) rates.push_back(k);
  const auto gen = make_schedule(rates);
  for (int k = 1; k <= 12; ++k) {
    const double closed = std::pow(1.0 - std::exp(-1.0), k) / k;
    CHECK(bridge_pmf(lin, k, 1.0) == doctest::Approx(closed).epsilon(1e-13));
    CHECK(bridge_pmf(gen, k, 1.0) == doctest::Approx(closed).epsilon(1e-9));
  }
  const auto pmf = compute_pmf(lin, Composition::Bridge, {}, 1.0, 1, 200);
  CHECK(pmf.tail_mass < 1e-12);
}

TEST_CASE("stable-stopped probabilities") {
  const auto two = make_schedule({2.0});
  CHECK(stable_stopped_pmf(two, 0.5, 1, 1.0) == doctest::Approx(std::exp(-kSqrt2)).epsilon(1e-14));
  const auto s = make_schedule({0.5, 1.3, 2.0, 4.1});
  for (int k = 1; k <= 4; ++k) CHECK(stable_stopped_pmf(s, 1.0, k, 0.9) == classical_pmf(s, k, 0.9));
}

TEST_CASE("fractional probabilities") {
  const auto one = make_schedule({1.0});
  CHECK(fractional_pmf(one, 1.0, 1, 1.0) == classical_pmf(one, 1, 1.0));
  CHECK(fractional_pmf(one, 0.5, 1, 1.0) == doctest::Approx(0.427583576155807).epsilon(1e-13));
  const auto lin = linear_schedule(1.0, 10);
  CHECK(fractional_pmf(lin, 0.6, 2, 1.0) == doctest::Approx(0.17775630983128133).epsilon(1e-12));
  const auto s = make_schedule({0.5, 1.3, 2.0, 4.1});
  for (int k = 1; k <= 4; ++k) CHECK(fractional_pmf(s, 1.0, k, 2.0) == classical_pmf(s, k, 2.0));

  // Product-index reduction is exact, not approximate.
  for (int k = 1; k <= 4; ++k) {
    CHECK(frac_t2alpha_pmf(s, 0.8, 0.5, k, 1.0) == fractional_pmf(s, 0.4, k, 1.0));
    CHECK(frac_t2alpha_pmf(s, 1.0, 1.0, k, 1.0) == classical_pmf(s, k, 1.0));
  }
}

TEST_CASE("fractional first-passage probabilities") {
  const auto one = make_schedule({1.0});
  CHECK(frac_fp_pmf(one, 0.5, 1, 1.0) == doctest::Approx(0.32179946914007192).epsilon(1e-10));
  const auto l15 = make_schedule({1.5});
  CHECK(frac_fp_pmf(l15, 0.7, 1, 0.8, 2) == doctest::Approx(0.22741034276945142).epsilon(1e-10));
  const auto s = make_schedule({0.5, 1.3, 2.0, 4.1});
  CHECK(frac_fp_pmf(s, 0.5, 1, 0.0) == 1.0);
  CHECK(frac_fp_pmf(s, 0.5, 3, 0.0) == 0.0);
  // nu = 1/2: a folded Cauchy clock of scale sqrt(2) t.
  for (int k = 1; k <= 4; ++k) {
    for (double t : {0.3, 1.0, 2.5}) {
      CHECK(std::abs(frac_fp_pmf(s, 0.5, k, t) - cauchy_abs_pmf(s, k, t, kSqrt2 * t)) < 1e-9);
    }
  }
  for (int k = 1; k <= 4; ++k) CHECK(frac_fp_pmf(s, 1.0, k, 0.7, 2) == fp_stopped_pmf(s, k, 0.7, 2));
}

TEST_CASE("fractional stable-stopped probabilities") {
  const auto l2 = make_schedule({2.0});
  CHECK(frac_stable_pmf(l2, 0.6, 0.8, 1, 1.0) == doctest::Approx(0.23671216659305576).epsilon(1e-10));
  const auto one = make_schedule({1.0});
  // alpha = nu goes through the exponential-integral closed form.
  CHECK(frac_stable_pmf(one, 0.3, 0.3, 1, 1.0) == doctest::Approx(0.40088232784960429).epsilon(1e-10));
  CHECK(frac_stable_pmf(one, 0.5, 0.5, 1, 1.0) == doctest::Approx(0.39562711831892246).epsilon(1e-12));
  const auto s = make_schedule({0.5, 1.3, 2.0, 4.1});
  for (int k = 1; k <= 4; ++k) CHECK(frac_stable_pmf(s, 0.7, 1.0, k, 1.0) == fractional_pmf(s, 0.7, k, 1.0));
  // The closed form and the Lamperti quadrature agree away from alpha = nu.
  for (double nu : {0.25, 0.5, 0.8}) {
    for (double a : {0.1, 1.0, 30.0}) {
      const auto closed = clock_transform(Composition::FracStable, {.nu = nu, .alpha = nu}, a, 1.0);
      const auto near = clock_transform(Composition::FracStable, {.nu = nu, .alpha = nu * (1.0 - 1e-9)}, a, 1.0);
      CHECK(closed.value == doctest::Approx(near.value).epsilon(1e-7));
    }
  }
  // alpha = nu / 2^n, n large: the clock W collapses to 1.
  CHECK(std::abs(frac_stable_pmf(one, 0.5, 0.5 * std::ldexp(1.0, -30), 1, 1.3) - std::exp(-1.3)) < 1e-4);
}

TEST_CASE("stable clock of the inverse-stable time") {
  const auto one = make_schedule({1.0});
  CHECK(stable_of_t2nu_pmf(one, 0.5, 0.5, 1, 1.0) == doctest::Approx(0.427583576155807).epsilon(1e-13));
  const auto s = make_schedule({1.0, 2.0});
  CHECK(stable_of_t2nu_pmf(s, 0.5, 0.5, 2, 0.0) == 0.0);
  // The two orders of composition differ.
  const double a = frac_stable_pmf(s, 0.5, 0.5, 2, 1.0);
  const double b = stable_of_t2nu_pmf(s, 0.5, 0.5, 2, 1.0);
  CHECK(std::abs(a - b) > 1e-3);
}

TEST_CASE("folded Cauchy clock") {
  const auto one = make_schedule({1.0});
  CHECK(cauchy_abs_pmf(one, 1, 1.0) == doctest::Approx(0.39562711831892246).epsilon(1e-12));
  const auto s = make_schedule({0.5, 1.3, 2.0, 4.1});
  CHECK(cauchy_abs_pmf(s, 1, 0.0) == 1.0);
  for (int k = 1; k <= 4; ++k) {
    for (double t : {0.2, 1.0, 4.0}) {
      const auto q = subordination_integral(s, Composition::CauchyAbs, {}, k, t, {1e-11, 1e-14, 4000});
      CHECK(std::abs(q.value - cauchy_abs_pmf(s, k, t)) < 1e-9);
    }
  }
}

TEST_CASE("large states on linear schedules use the mixture integral") {
  const auto lin = linear_schedule(1.0, 500);
  struct Case {
    Composition c;
    CompositionParams p;
    double t;
    int k;
    double expect;
  };
  const Case cases[] = {
      {Composition::Fp, {}, 0.5, 40, 0.00063097049738186015},
      {Composition::Stable, {.alpha = 0.7}, 1.0, 60, 0.00043285936342619021},
      {Composition::Sojourn, {}, 3.0, 30, 0.0033029682627633712},
      {Composition::CauchyAbs, {}, 1.0, 50, 0.00072190688602511446},
      {Composition::Frac, {.nu = 0.5}, 1.0, 80, 0.00010011646566638868},
  };
  for (const auto& c : cases) {
    CAPTURE(composition_name(c.c));
    const auto v = pmf_value(lin, c.c, c.p, c.k, c.t);
    CHECK(v.method == "mixture");
    CHECK(v.value == doctest::Approx(c.expect).epsilon(1e-8));
    CHECK(v.abs_err < 1e-10);
  }
  // Early states keep the spectral form.
  CHECK(pmf_value(lin, Composition::Fp, {}, 2, 0.5).method == "spectral");
}

TEST_CASE("pmf vectors") {
  const auto lin = linear_schedule(1.0, 500);
  const auto frac = compute_pmf(lin, Composition::Frac, {.nu = 0.5}, 1.0, 1, 500);
  CHECK(frac.tail_mass == doctest::Approx(5.9208265252185597e-5).epsilon(1e-5));
  for (std::size_t i = 0; i < frac.p.size(); ++i) {
    CHECK(frac.p[i] >= -1e-12);
    CHECK(frac.p[i] <= 1.0);
  }
  CHECK(frac.provenance == "frac(nu=0.5)");

  const auto zero = compute_pmf(lin, Composition::Fp, {}, 0.0, 1, 5);
  CHECK(zero.p == std::vector<double>{1, 0, 0, 0, 0});
  CHECK(zero.tail_mass == 0.0);
  CHECK(std::isnan(compute_pmf(lin, Composition::Fp, {}, 1.0, 2, 5).tail_mass));

  // p_{n0}(t) decreases in t for every composition.
  const auto s = make_schedule({1.0, 2.0, 3.0});
  for (auto c : all_compositions()) {
    CAPTURE(composition_name(c));
    const CompositionParams p{.nu = 0.6, .alpha = 0.7, .n = 2};
    double prev = 1.0;
    for (double t : {0.1, 0.5, 1.0, 2.0, 5.0}) {
      const double v = pmf_value(s, c, p, 1, t).value;
      CHECK(v < prev);
      prev = v;
    }
  }
}

TEST_CASE("subordination integrals reproduce the closed forms") {
  const auto s = make_schedule({1.0, 1.7, 2.2, 3.0, 4.5});
  const QuadratureSpec spec{1e-10, 1e-13, 4000};
  const std::pair<Composition, CompositionParams> comps[] = {
      {Composition::Fp, {}}, {Composition::Sojourn, {}}, {Composition::Bridge, {}}, {Composition::Stable, {.alpha = 0.5}}};
  for (const auto& [c, p] : comps) {
    for (int k = 1; k <= 5; ++k) {
      for (double t : {0.5, 1.0, 2.0}) {
        CAPTURE(composition_name(c));
        const double closed = pmf_value(s, c, p, k, t).value;
        CHECK(std::abs(subordination_integral(s, c, p, k, t, spec).value - closed) < 1e-9);
      }
    }
  }
}

TEST_CASE("means") {
  const auto lin = linear_schedule(1.0, 500);
  for (double t : {0.0, 0.5, 1.0, 2.0}) {
    const auto m = classical_mean(lin, t);
    CHECK(std::abs(m.value - std::exp(t)) < 1e-9);
    CHECK(m.converged);
  }
  CHECK(classical_mean(lin, 0.0).value == 1.0);

  std::vector<double> sq;
  for (int k = 1; k <= 12; ++k) sq.push_back(double(k) * k);
  const auto m = classical_mean(make_schedule(sq), 0.2);
  CHECK(m.value == doctest::Approx(1.3006214937712184).epsilon(1e-10));
  CHECK(m.truncation_k == 12);
  CHECK_FALSE(m.converged);
  CHECK(kind_of([&] { classical_mean(make_schedule(sq), 0.2, {.strict = true}); }) ==
        ErrorKind::TruncationNotConverged);

  const auto fm = fractional_mean(lin, 0.5, 1.0);
  CHECK(fm.value == doctest::Approx(4.9933395591284074).epsilon(1e-9));
  CHECK(fm.last_increment == doctest::Approx(5.9208265252185597e-5).epsilon(1e-6));
  // The untruncated limit E_{1/2}(1) lies just above the truncated mean.
  CHECK(fm.value < 5.0089800807622835);
  CHECK(5.0089800807622835 - fm.value < 0.02);
  CHECK_FALSE(fm.converged);
  CHECK(fractional_mean(lin, 0.5, 0.0).value == 1.0);

  const auto gen = make_schedule({0.5, 1.3, 2.0, 4.1, 6.0, 9.5, 13.0});
  for (double t : {0.2, 1.0}) {
    CHECK(fractional_mean(gen, 1.0, t).value == doctest::Approx(classical_mean(gen, t).value).epsilon(1e-12));
    const auto a = fractional_mean(gen, 0.999999, t).value;
    CHECK(a == doctest::Approx(classical_mean(gen, t).value).epsilon(1e-5));
  }

  CHECK(kind_of([&] { fp_stopped_mean(lin, 1.0); }) == ErrorKind::DivergentMean);
  std::vector<double> cube;
  for (int k = 1; k <= 20; ++k) cube.push_back(double(k) * k * k);
  CHECK(fp_stopped_mean(make_schedule(cube), 0.0).value == 1.0);
}

TEST_CASE("bridge moments") {
  const auto m = bridge_moments(1.0, 1.0);
  CHECK(m.mean == doctest::Approx(kE - 1.0).epsilon(1e-15));
  CHECK(m.variance == doctest::Approx(kE - 1.0).epsilon(1e-14));
  const auto m2 = bridge_moments(0.5, 3.0);
  CHECK(std::abs(m2.mean - 2.3211260468920432) < 1e-10);
  CHECK(std::abs(m2.variance - 5.014939109672385) < 1e-10);
  const auto tiny = bridge_moments(1.0, 1e-9);
  CHECK(tiny.mean == doctest::Approx(1.0));
  CHECK(tiny.variance == doctest::Approx(0.5e-9).epsilon(1e-6));
  // Continuity across the series switch.
  const auto lo = bridge_moments(1.0, 0.999999e-3), hi = bridge_moments(1.0, 1.000001e-3);
  CHECK(lo.variance == doctest::Approx(hi.variance).epsilon(1e-5));
}

TEST_CASE("renewal waiting times") {
  const auto s = make_schedule({1.0, 2.0});
  CHECK(waiting_time_density(s, 1.0, 2, 0.7) == doctest::Approx(2.0 * std::exp(-1.4)).epsilon(1e-15));
  const auto norm =
      quad_semi_infinite([&](double x) { return waiting_time_density(s, 0.5, 1, x); }, {1e-9, 1e-12, 4000}, {0.5, 1.0});
  CHECK(norm.value == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(two_step_density(s, 0.5, 1.0) == doctest::Approx(0.16641555293040897).epsilon(1e-10));
  const auto conv = quad_finite(
      [&](double y) {
        if (!(y > 0.0 && y < 1.0)) return 0.0;
        return waiting_time_density(s, 0.5, 1, y) * waiting_time_density(s, 0.5, 2, 1.0 - y);
      },
      0.0, 1.0,
      {1e-10, 1e-13, 4000});
  CHECK(std::abs(conv.value - two_step_density(s, 0.5, 1.0)) < 1e-5);
}

TEST_CASE("validation") {
  const auto s = make_schedule({1.0, 2.0, 3.0}, 2);
  CHECK(classical_pmf(s, 2, 0.0) == 1.0);
  CHECK(kind_of([&] { fp_stopped_pmf(s, 2, 1.0); }) == ErrorKind::Validation);
  const auto u = make_schedule({1.0, 2.0});
  CHECK(kind_of([&] { fractional_pmf(u, 0.0, 1, 1.0); }) == ErrorKind::Validation);
  CHECK(kind_of([&] { fractional_pmf(u, 1.2, 1, 1.0); }) == ErrorKind::Validation);
  CHECK(kind_of([&] { classical_pmf(u, 3, 1.0); }) == ErrorKind::Validation);
  CHECK(kind_of([&] { classical_pmf(u, 1, -1.0); }) == ErrorKind::Validation);
  CHECK(kind_of([&] { fp_stopped_pmf(u, 1, 1.0, 0); }) == ErrorKind::Validation);
  CHECK(kind_of([&] { parse_composition("brownian"); }) == ErrorKind::Validation);
  CHECK(kind_of([&] { bridge_moments(0.0, 1.0); }) == ErrorKind::Validation);
  for (auto c : all_compositions()) CHECK(parse_composition(composition_name(c)) == c);
}
