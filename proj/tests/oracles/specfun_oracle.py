"""High-precision reference values for the special-function tests.

Run with mpmath installed; the printed numbers are frozen into
tests/test_specfun.cpp and tests/test_analytic.cpp.
"""
from mpmath import mp, mpf, mpc, gamma, rgamma, quad, inf, sin, cos, pi, exp, erfc, e1, besseli, factorial

mp.dps = 50


def ml_series(nu, g, z, terms=4000):
    # Terms peak near exp(|z|^(1/nu)); carry enough digits to absorb the cancellation.
    extra = int(float(abs(z)) ** (1.0 / nu) / 2.3) + 10
    with mp.workdps(mp.dps + extra):
        return +_ml_series(nu, g, z, terms)


def _ml_series(nu, g, z, terms):
    nu, g = mpf(nu), mpf(g)
    s = mpf(0) if not isinstance(z, mpc) else mpc(0)
    for h in range(terms):
        t = z ** h * rgamma(nu * h + g)
        s += t
        if h > 20 and abs(t) < mpf(10) ** (-45) * max(abs(s), mpf(10) ** -40):
            break
    return s


def ml_integral(nu, zeta):
    nu, zeta = mpf(nu), mpf(zeta)
    c = zeta ** (1 / nu)
    f = lambda r: sin(nu * pi) / pi * r ** (nu - 1) / (r ** (2 * nu) + 2 * r ** nu * cos(nu * pi) + 1) * exp(-r * c)
    return quad(f, [0, 1 / c, 1, inf])


def plain_sum(term, start=0, limit=100000):
    # Direct summation; extrapolating accelerators are misled by the zero
    # terms these series contain.
    s = mpf(0)
    for k in range(start, limit):
        t = term(k)
        s += t
        if k > start + 50 and abs(t) < mpf(10) ** (-45) and abs(term(k + 1)) < mpf(10) ** (-45):
            return s
    raise RuntimeError("series did not converge")


def stable_series(alpha, x):
    alpha, x = mpf(alpha), mpf(x)
    return plain_sum(lambda k: (-1) ** (k + 1) * gamma(alpha * k + 1) / factorial(k) * sin(pi * alpha * k)
                     * x ** (-alpha * k - 1), 1) / pi


def wright_series(nu, xi):
    nu, xi = mpf(nu), mpf(xi)
    return plain_sum(lambda r: (-xi) ** r / factorial(r) * rgamma(1 - nu * (r + 1)))


def show(label, v):
    if isinstance(v, mpc):
        print(f"{label}: {mp.nstr(v.real, 17)} {mp.nstr(v.imag, 17)}")
    else:
        print(f"{label}: {mp.nstr(v, 17)}")


if __name__ == "__main__":
    show("E_0.5(-1)", ml_series(0.5, 1, mpf(-1)))
    show("e*erfc(1)", exp(1) * erfc(1))
    show("E_0.5(1)", ml_series(0.5, 1, mpf(1)))
    show("e*erfc(-1)", exp(1) * erfc(-1))
    for nu in (0.25, 0.4, 0.512, 0.6):
        show(f"E_{nu}(-1)", ml_series(nu, 1, mpf(-1)))
    show("E_0.6(2)", ml_series(0.6, 1, mpf(2)))
    show("E_0.2(-50) integral", ml_integral(0.2, 50))
    show("E_0.9(-50) integral", ml_integral(0.9, 50))
    show("E_0.3(-7) integral", ml_integral(0.3, 7))
    show("E_0.7(-3) series", ml_series(0.7, 1, mpf(-3)))
    show("E_0.5,0.5(-10)", ml_series(0.5, 0.5, mpf(-10), 20000))
    show("E_0.7,1.3(2.5)", ml_series(0.7, 1.3, mpf(2.5)))
    show("E_0.6,2.0(-8)", ml_series(0.6, 2.0, mpf(-8), 20000))
    show("E_0.8,0.8(-4)", ml_series(0.8, 0.8, mpf(-4), 20000))
    show("E_0.5(-2+3i)", ml_series(0.5, 1, mpc(-2, 3), 20000))
    show("E_0.8(-1.2+0.4i)", ml_series(0.8, 1, mpc(-1.2, 0.4)))
    show("E_1,2.5(-30)", ml_series(1, 2.5, mpf(-30), 20000))
    show("M_0.5(1)", wright_series(0.5, 1))
    show("exp(-1/4)/sqrt(pi)", exp(mpf(-0.25)) / mp.sqrt(pi))
    show("M_0.3(1)", wright_series(0.3, 1))
    show("M_0.3(3)", wright_series(0.3, 3))
    show("M_0.8(2)", wright_series(0.8, 2))
    show("M_0.8(0.5)", wright_series(0.8, 0.5))
    show("I0(1)", besseli(0, 1))
    show("I0(25)*e^-25", besseli(0, 25) * exp(-25))
    show("E1(1)", e1(1))
    show("E1(1+i)", e1(mpc(1, 1)))
    show("E1(-2+0.5i)", e1(mpc(-2, 0.5)))
    show("E1(-15+2i)", e1(mpc(-15, 2)))
    show("E1(3i)", e1(mpc(0, 3)))
    show("g_0.3(1)", stable_series(0.3, 1))
    show("g_0.7(1)", stable_series(0.7, 1))
    show("g_0.7(20)", stable_series(0.7, 20))
    show("g_0.3(0.05)", stable_series(0.3, mpf("0.05")))
    show("Gamma(0.3)", gamma(mpf("0.3")))
    show("Gamma(-1.5)", gamma(mpf("-1.5")))
    show("Gamma(50.5)", gamma(mpf("50.5")))
    show("e^-1 I0(1)", exp(-1) * besseli(0, 1))
