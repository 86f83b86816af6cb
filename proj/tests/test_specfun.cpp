#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "birthsub/error.hpp"
#include "birthsub/quadrature.hpp"
#include "birthsub/specfun.hpp"
#include "doctest.h"

using namespace birthsub;
using doctest::Approx;

namespace {
constexpr double kPi = std::numbers::pi;
}

// Reference values below were produced at 50 digits by tests/oracles/specfun_oracle.py.

TEST_CASE("gamma function matches the standard library and high-precision values") {
  for (double x : {0.1, 0.3, 0.5, 1.0, 1.7, 2.5, 7.25, 20.0, 50.5, 120.3}) {
    CHECK(gamma_fn(x) == Approx(std::tgamma(x)).epsilon(1e-13));
    CHECK(log_gamma(x) == Approx(std::lgamma(x)).epsilon(1e-13).scale(1.0));
  }
  CHECK(gamma_fn(0.3) == Approx(2.9915689876875906).epsilon(1e-14));
  CHECK(gamma_fn(-1.5) == Approx(2.3632718012073547).epsilon(1e-14));
  CHECK(gamma_fn(50.5) == Approx(4.2904629123519598e+63).epsilon(1e-13));
  CHECK(rgamma(0.0) == 0.0);
  CHECK(rgamma(-3.0) == 0.0);
  CHECK(rgamma(-2.5) == Approx(1.0 / std::tgamma(-2.5)).epsilon(1e-13));
  CHECK(rgamma(-20.5) == Approx(1.0 / std::tgamma(-20.5)).epsilon(1e-12));
  CHECK(rgamma(200.5) == Approx(std::exp(-std::lgamma(200.5))).epsilon(1e-12));
  CHECK(std::isnan(gamma_fn(-2.0)));
}

TEST_CASE("quadrature engine") {
  SUBCASE("exponential on the half line") {
    CHECK(quad_semi_infinite([](double r) { return std::exp(-r); }).value == Approx(1.0).epsilon(1e-10));
  }
  SUBCASE("inverse square-root endpoint singularity") {
    const auto v = quad_semi_infinite([](double r) { return std::exp(-r) / std::sqrt(r); }, {}, {0.5, 1.0});
    CHECK(std::abs(v.value - std::sqrt(kPi)) < 1e-8);
  }
  SUBCASE("Mittag-Leffler kernel reproduces E_0.6(-1)") {
    const double nu = 0.6;
    const auto v = quad_semi_infinite([&](double r) { return ml_kernel(nu, r) * std::exp(-r); }, {}, {nu, 1.0});
    CHECK(std::abs(v.value - mittag_leffler(nu, 1.0, -1.0).value) < 1e-7);
  }
  SUBCASE("finite interval") {
    const auto q = integrate_finite([](double x) { return std::sin(x); }, 0.0, kPi);
    CHECK(q.converged);
    CHECK(q.value == Approx(2.0).epsilon(1e-12));
  }
  SUBCASE("budget exhaustion carries the best estimate") {
    QuadratureSpec tight{1e-15, 1e-300, 3};
    try {
      quad_finite([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, tight);
      FAIL("expected NonConvergence");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::NonConvergence);
      REQUIRE(e.best_estimate().has_value());
      CHECK(*e.best_estimate() == Approx(2.0).epsilon(0.1));
    }
  }
  SUBCASE("spec validation") {
    CHECK_THROWS_AS(QuadratureSpec({0.0, 1e-12, 10}).validate(), Error);
    CHECK_THROWS_AS(QuadratureSpec({1e-8, 1e-12, 0}).validate(), Error);
  }
}

TEST_CASE("Mittag-Leffler spot values") {
  CHECK(mittag_leffler(1.0, 1.0, 1.0).value == Approx(std::exp(1.0)).epsilon(1e-15));
  CHECK(mittag_leffler(0.7, 1.0, 0.0).value == 1.0);
  CHECK(std::abs(mittag_leffler(0.5, 1.0, -1.0).value - 0.427583576155807) < 1e-13);
  CHECK(std::abs(mittag_leffler(0.5, 1.0, -1.0).value - std::exp(1.0) * std::erfc(1.0)) < 1e-13);
  CHECK(std::abs(mittag_leffler(0.5, 1.0, 1.0).value - 5.0089800807622835) < 1e-12);
  CHECK(std::abs(mittag_leffler(0.25, 1.0, -1.0).value - 0.46385276080171329) < 1e-13);
  CHECK(std::abs(mittag_leffler(0.4, 1.0, -1.0).value - 0.4420633596852235) < 1e-13);
  CHECK(std::abs(mittag_leffler(0.512, 1.0, -1.0).value - 0.42585631985858005) < 1e-13);
  CHECK(std::abs(mittag_leffler(0.6, 1.0, -1.0).value - 0.4133273409431063) < 1e-13);
  CHECK(mittag_leffler(0.6, 1.0, 2.0).value == Approx(39.692804958505463).epsilon(1e-12));
  CHECK(std::abs(mittag_leffler(0.2, 1.0, -50.0).value - 0.016913710147526697) < 1e-12);
  CHECK(std::abs(mittag_leffler(0.9, 1.0, -50.0).value - 0.002175353076856976) < 1e-12);
  CHECK(std::abs(mittag_leffler(0.3, 1.0, -7.0).value - 0.10121701506650601) < 1e-12);
  CHECK(std::abs(mittag_leffler(0.7, 1.0, -3.0).value - 0.13789710966502708) < 1e-12);
}

TEST_CASE("two-parameter Mittag-Leffler") {
  CHECK(std::abs(mittag_leffler(0.5, 0.5, -10.0).value - 0.0027796561095304284) < 1e-11);
  CHECK(mittag_leffler(0.7, 1.3, 2.5).value == Approx(38.861656371997853).epsilon(1e-11));
  CHECK(std::abs(mittag_leffler(0.6, 2.0, -8.0).value - 0.12795089282093064) < 1e-11);
  CHECK(std::abs(mittag_leffler(0.8, 0.8, -4.0).value - 0.020359797587363691) < 1e-11);
  CHECK(std::abs(mittag_leffler(1.0, 2.5, -30.0).value - 0.036974741680552225) < 1e-11);
  // E_{1,2}(x) = (e^x - 1)/x
  CHECK(mittag_leffler(1.0, 2.0, -12.0).value == Approx(-std::expm1(-12.0) / 12.0).epsilon(1e-12));
}

TEST_CASE("complex Mittag-Leffler") {
  const auto a = mittag_leffler(0.5, 1.0, std::complex<double>(-2.0, 3.0));
  CHECK(std::abs(a.value - std::complex<double>(0.092710766426443334, 0.12831696222826158)) < 1e-11);
  const auto b = mittag_leffler(0.8, 1.0, std::complex<double>(-1.2, 0.4));
  CHECK(std::abs(b.value - std::complex<double>(0.30793701332514696, 0.098998884990275823)) < 1e-12);
  // Conjugate symmetry off the real axis.
  const auto c = mittag_leffler(0.4, 1.0, std::complex<double>(-3.0, -9.0));
  const auto d = mittag_leffler(0.4, 1.0, std::complex<double>(-3.0, 9.0));
  CHECK(std::abs(c.value - std::conj(d.value)) < 1e-12);
}

TEST_CASE("Mittag-Leffler domain") {
  CHECK_THROWS_AS(mittag_leffler(0.0, 1.0, -1.0), Error);
  CHECK_THROWS_AS(mittag_leffler(-0.5, 1.0, -1.0), Error);
  CHECK_THROWS_AS(mittag_leffler(1.5, 1.0, -1.0), Error);
  CHECK_THROWS_AS(mittag_leffler(0.5, 0.0, -1.0), Error);
  try {
    mittag_leffler(0.0, 1.0, 1.0);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Domain);
  }
}

TEST_CASE("E_nu(-x) lies in (0, 1] and decreases") {
  for (double nu : {0.1, 0.3, 0.5, 0.75, 0.95, 1.0}) {
    double prev = 1.0;
    for (double x = 0.05; x <= 60.0; x *= 1.4) {
      const double v = mittag_leffler(nu, 1.0, -x).value;
      CHECK(v > 0.0);
      CHECK(v < prev);
      prev = v;
    }
  }
}

TEST_CASE("series, asymptotic and integral routes agree") {
  for (double nu = 0.2; nu < 0.95; nu += 0.1) {
    for (double x : {0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 50.0}) {
      const auto ref = mittag_leffler_reference(nu, x);
      const auto in = mittag_leffler_integral(nu, x);
      CAPTURE(nu);
      CAPTURE(x);
      CHECK(std::abs(ref.value - in.value) < 1e-9);
      CHECK(ref.abs_err < 1e-8);
    }
  }
}

TEST_CASE("Wright function") {
  CHECK(wright_neg(0.5, 0.0).value == Approx(1.0 / std::sqrt(kPi)).epsilon(1e-14));
  CHECK(std::abs(wright_neg(0.5, 1.0).value - 0.4393912894677224) < 1e-15);
  CHECK(std::abs(wright_neg(0.3, 1.0).value - 0.39052334188638718) < 1e-12);
  CHECK(std::abs(wright_neg(0.3, 3.0).value - 0.063511233653723873) < 1e-12);
  CHECK(std::abs(wright_neg(0.8, 2.0).value - 0.13288480043900966) < 1e-12);
  CHECK(std::abs(wright_neg(0.8, 0.5).value - 0.4081222713349697) < 1e-12);
  // Series and Kanter routes meet continuously at the switchover.
  for (double nu : {0.3, 0.6, 0.8}) {
    const double xi = std::pow(4.0, 1.0 - nu);
    CHECK(std::abs(wright_neg(nu, xi * (1 - 1e-12)).value - wright_neg(nu, xi * (1 + 1e-12)).value) < 1e-11);
  }
  for (double nu : {0.3, 0.5, 0.8}) {
    const auto total = quad_semi_infinite([&](double x) { return wright_neg(nu, x).value; }, {}, {1.0, 1.0});
    CAPTURE(nu);
    CHECK(std::abs(total.value - 1.0) < 1e-8);
  }
  CHECK_THROWS_AS(wright_neg(1.0, 1.0), Error);
  CHECK_THROWS_AS(wright_neg(0.5, -1.0), Error);
}

TEST_CASE("Bessel I0") {
  CHECK(bessel_i0(0.0).value == 1.0);
  CHECK(bessel_i0(1.0).value == Approx(1.2660658777520083).epsilon(1e-14));
  CHECK(bessel_i0_scaled(25.0).value == Approx(0.080196773547436708).epsilon(1e-13));
  const auto ring = quad_finite([](double th) { return std::exp(2.0 * std::cos(th)); }, 0.0, 2.0 * kPi);
  CHECK(std::abs(ring.value / (2.0 * kPi) - bessel_i0(2.0).value) < 1e-9);
  // Continuity across the series/asymptotic switch.
  CHECK(bessel_i0_scaled(std::nextafter(20.0, 0.0)).value == Approx(bessel_i0_scaled(std::nextafter(20.0, 30.0)).value).epsilon(1e-14));
  CHECK_THROWS_AS(bessel_i0(-1.0), Error);
}

TEST_CASE("exponential integral") {
  using C = std::complex<double>;
  CHECK(exp_integral_e1(C(1.0, 0.0)).value.real() == Approx(0.21938393439552027).epsilon(1e-14));
  CHECK(std::abs(exp_integral_e1(C(1.0, 1.0)).value - C(0.00028162445198141833, -0.17932453503935894)) < 1e-14);
  CHECK(std::abs(exp_integral_e1(C(-2.0, 0.5)).value - C(-4.7257499447988617, -1.3323418528141997)) < 1e-12);
  CHECK(std::abs(exp_integral_e1(C(-15.0, 2.0)).value / C(65450.090649672763, 223073.97568302618) - 1.0) < 1e-12);
  CHECK(std::abs(exp_integral_e1(C(0.0, 3.0)).value - C(-0.11962978600800033, 0.27785620120457164)) < 1e-14);
  const C z(1.0, 1.0);
  CHECK(std::abs(exp_integral_e1(std::conj(z)).value - std::conj(exp_integral_e1(z).value)) < 1e-15);
  // e^z E1(z) + e^{conj z} E1(conj z) is real.
  const C w(0.7, 2.3);
  const C pair = std::exp(w) * exp_integral_e1(w).value + std::exp(std::conj(w)) * exp_integral_e1(std::conj(w)).value;
  CHECK(std::abs(pair.imag()) < 1e-14);
  CHECK_THROWS_AS(exp_integral_e1(C(-1.0, 0.0)), Error);
  CHECK_THROWS_AS(exp_integral_e1(C(0.0, 0.0)), Error);
}

TEST_CASE("first-passage density") {
  const auto total = quad_semi_infinite([](double s) { return levy_fp_density(1.0, s).value; }, {}, {0.5, 1.0});
  CHECK(std::abs(total.value - 1.0) < 1e-8);
  const auto lt =
      quad_semi_infinite([](double s) { return std::exp(-s) * levy_fp_density(1.0, s).value; }, {}, {0.5, 1.0});
  CHECK(std::abs(lt.value - std::exp(-std::sqrt(2.0))) < 1e-8);
  // q_tt = 2 q_s
  const double h = 1e-3;
  auto q = [](double t, double s) { return levy_fp_density(t, s).value; };
  const double qtt = (q(1 + h, 1) - 2 * q(1, 1) + q(1 - h, 1)) / (h * h);
  const double qs = (q(1, 1 + h) - q(1, 1 - h)) / (2 * h);
  CHECK(std::abs(qtt - 2 * qs) < 1e-5);
}

TEST_CASE("stable density") {
  CHECK(stable_density(0.5, 1.0, 1.0).value == Approx(std::exp(-0.25) / (2 * std::sqrt(kPi))).epsilon(1e-14));
  CHECK(stable_density(0.3, 1.0, 1.0).value == Approx(0.11715700256591615).epsilon(1e-10));
  CHECK(stable_density(0.7, 1.0, 1.0).value == Approx(0.38739501014659244).epsilon(1e-10));
  CHECK(stable_density(0.7, 1.0, 20.0).value == Approx(0.0015816670843142984).epsilon(1e-10));
  CHECK(stable_density(0.3, 1.0, 0.05).value == Approx(1.6149951456973301).epsilon(1e-10));
  // Self-similarity: q(t, s) = t^{-1/a} q(1, s t^{-1/a}).
  CHECK(stable_density(0.7, 2.0, 3.0).value ==
        Approx(std::pow(2.0, -1 / 0.7) * stable_density(0.7, 1.0, 3.0 * std::pow(2.0, -1 / 0.7)).value));
  for (double a : {0.3, 0.5, 0.7}) {
    auto f = [a](double s) { return stable_density(a, 1.0, s).value; };
    const auto total = quad_semi_infinite(f, {1e-9, 1e-13, 2000}, {a, 1.0});
    const auto lt = quad_semi_infinite([&](double s) { return std::exp(-s) * f(s); }, {1e-9, 1e-13, 2000}, {a, 1.0});
    CAPTURE(a);
    CHECK(std::abs(total.value - 1.0) < 1e-6);
    CHECK(std::abs(lt.value - std::exp(-1.0)) < 1e-6);
  }
}

TEST_CASE("Lamperti, folded Cauchy and the remaining laws") {
  for (double w : {0.1, 1.0, 7.0}) {
    CHECK(lamperti_density(0.5, 1.0, w).value == Approx(1.0 / (kPi * std::sqrt(w) * (1 + w))).epsilon(1e-14));
  }
  for (auto [nu, alpha] : std::vector<std::pair<double, double>>{{0.5, 0.5}, {0.7, 1.0}, {0.3, 0.4}}) {
    const auto total = quad_semi_infinite([&](double w) { return lamperti_density(nu, alpha, w).value; }, {},
                                          {nu / alpha, 1.0});
    CHECK(std::abs(total.value - 1.0) < 1e-8);
  }
  CHECK_THROWS_AS(lamperti_density(1.0, 0.5, 1.0), Error);
  CHECK_THROWS_AS(lamperti_density(0.0, 0.5, 1.0), Error);

  const double c = std::sqrt(2.0);
  CHECK(folded_cauchy_density(c, 1.3).value == Approx(c / kPi / (1.3 * 1.3 / 2 + 1)).epsilon(1e-14));
  auto unit = [](auto f, double power) { return quad_semi_infinite(f, {}, {power, 1.0}).value; };
  CHECK(std::abs(unit([&](double w) { return folded_cauchy_density(c, w).value; }, 1.0) - 1.0) < 1e-8);
  for (int n : {1, 2, 5}) {
    CHECK(std::abs(unit([&](double r) { return omega_density(n, r).value; }, 1.0) - 1.0) < 1e-8);
  }
  CHECK(omega_density(60, 2.0).value == Approx(1.0 / 9.0).epsilon(1e-12));
  CHECK(std::abs(unit([](double th) { return inverse_gaussian_density(th).value; }, 0.5) - 1.0) < 1e-8);
  const auto arc = quad_finite([](double s) { return arcsine_density(2.0, s).value; }, 0.0, 2.0);
  CHECK(arc.value == Approx(1.0).epsilon(1e-6));
  for (double nu : {0.3, 0.6}) {
    const auto total =
        quad_semi_infinite([&](double s) { return inverse_stable_density(nu, 2.0, s).value; }, {}, {1.0, 1.0});
    CHECK(std::abs(total.value - 1.0) < 1e-8);
  }
}
