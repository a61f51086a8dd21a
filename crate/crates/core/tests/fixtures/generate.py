#!/usr/bin/env python3
"""Regenerate the high-precision reference fixtures used by the test suite.

Every value is produced with mpmath at 60+ significant digits by brute-force
series summation or adaptive quadrature, independently of the Rust code.
Inputs are rounded to binary64 before evaluation so that the reference value
belongs to exactly the argument the tests parse. Output is written next to this
script; lines are whitespace separated decimals.

    python3 generate.py
"""
import os

import mpmath as mp

mp.mp.dps = 80
HERE = os.path.dirname(os.path.abspath(__file__))
DIGITS = 40


def dbl(x):
    """The value the Rust side sees after parsing: nearest binary64."""
    return mp.mpf(float(x))


def fmt(x):
    return mp.nstr(mp.mpf(x), DIGITS, strip_zeros=False)


def wright_phi(delta, eps, z):
    """phi(-delta, eps, z) = sum z^k / (k! Gamma(eps - delta k)), brute force."""
    delta, eps, z = mp.mpf(delta), mp.mpf(eps), mp.mpc(z)
    total = mp.mpc(0)
    small = 0
    k = 0
    while True:
        term = z**k / mp.factorial(k) * mp.rgamma(eps - delta * k)
        total += term
        small = small + 1 if abs(term) <= mp.mpf(10) ** (-70) * max(1, abs(total)) else 0
        if k > 2 * abs(z) + 10 and small > 8:
            break
        k += 1
    return total


def gen_wright(mu, a, nu, b, z):
    mu, a, nu, b, z = (mp.mpf(mu), mp.mpf(a), mp.mpf(nu), mp.mpf(b), mp.mpc(z))
    total = mp.mpc(0)
    small = 0
    n = 0
    while True:
        term = z**n * mp.rgamma(mu * n + a) * mp.rgamma(nu * n + b)
        total += term
        small = small + 1 if abs(term) <= mp.mpf(10) ** (-70) * max(1, abs(total)) else 0
        if n > 2 * abs(z) + 10 and small > 8:
            break
        n += 1
    return total


def mittag_leffler(alpha, z):
    alpha, z = mp.mpf(alpha), mp.mpc(z)
    total = mp.mpc(0)
    small = 0
    k = 0
    while True:
        term = z**k * mp.rgamma(alpha * k + 1)
        total += term
        small = small + 1 if abs(term) <= mp.mpf(10) ** (-70) * max(1, abs(total)) else 0
        if k > 2 * abs(z) + 10 and small > 8:
            break
        k += 1
    return total


def write(name, header, rows):
    with open(os.path.join(HERE, name), "w", newline="\n") as fh:
        fh.write(header + "\n")
        for row in rows:
            fh.write(" ".join(fmt(v) for v in row) + "\n")


def main():
    # reciprocal gamma: x value
    xs = ["0.5", "1", "1.5", "2.5", "3.7", "10.25", "33.3", "101.5", "169.9",
          "-0.5", "-1.5", "-2.25", "-7.9", "-33.3", "0.001", "-0.001", "1e-8"]
    write("recip_gamma.txt", "# x  1/Gamma(x)",
          [(dbl(x), mp.rgamma(dbl(x))) for x in xs])

    s2 = 1 / mp.sqrt(2)
    # phi(-delta, eps, z): delta eps re(z) im(z) re(val) im(val)
    phi_cases = [
        ("0.25", "0.75", -s2, -s2),
        ("0.5", "0.5", "-2", "0"),
        ("0.3", "1.2", "1.5", "0.5"),
        ("0.2", "0.8", "-3", "0"),
        ("0.2", "0.8", -3 * mp.cos(mp.pi / 4), -3 * mp.sin(mp.pi / 4)),
        ("0.1", "1", "-2.5", "1"),
        ("0.375", "0.625", -2 * mp.cos(mp.pi / 4), 2 * mp.sin(mp.pi / 4)),
        ("0.125", "0.3", "-1", "-1"),
    ]
    rows = []
    for d, e, zr, zi in phi_cases:
        z = mp.mpc(dbl(zr), dbl(zi))
        v = wright_phi(dbl(d), dbl(e), z)
        rows.append((dbl(d), dbl(e), z.real, z.imag, v.real, v.imag))
    write("wright_phi.txt", "# delta eps re(z) im(z) re(val) im(val)", rows)

    # generalized Wright: mu a nu b re(z) im(z) re(val) im(val)
    gw_cases = [
        ("-0.5", "1", "1.5", "1", "1", "0"),
        ("1", "1", "1", "1", "2", "0"),
        ("-0.8", "0.75", "3", "1.5", "-1.5", "0.5"),
        ("-0.25", "1.2", "2", "2", "0.7", "0"),
        ("0.5", "0.5", "0.5", "1.5", "-1", "0.25"),
        ("-0.5", "0.9", "4", "2", "3", "0"),
    ]
    rows = []
    for mu, a, nu, b, zr, zi in gw_cases:
        z = mp.mpc(dbl(zr), dbl(zi))
        v = gen_wright(dbl(mu), dbl(a), dbl(nu), dbl(b), z)
        rows.append((dbl(mu), dbl(a), dbl(nu), dbl(b), z.real, z.imag,
                     v.real, v.imag))
    write("gen_wright.txt", "# mu a nu b re(z) im(z) re(val) im(val)", rows)

    # Mittag-Leffler: alpha re(z) im(z) re(val) im(val)
    ml_cases = [
        ("0.8", "-1.5", "0"),
        ("0.5", "-2", "0"),
        ("1.5", "-4", "0"),
        ("1.2", "1", "1"),
        ("0.9", "-0.5", "2"),
        ("1.8", "-10", "0"),
    ]
    rows = []
    for a, zr, zi in ml_cases:
        z = mp.mpc(dbl(zr), dbl(zi))
        v = mittag_leffler(dbl(a), z)
        rows.append((dbl(a), z.real, z.imag, v.real, v.imag))
    write("mittag_leffler.txt", "# alpha re(z) im(z) re(val) im(val)", rows)

    # Riemann-Liouville integral of sin of order 1/2 at y = 1
    mu = mp.mpf("0.5")
    val = mp.quad(lambda z: (1 - z) ** (mu - 1) * mp.sin(z), [0, 0.5, 1]) / mp.gamma(mu)
    write("rl_sin.txt", "# mu y value", [(mu, 1, val)])

    # fourth derivative of exp(-x^2) at 0.5 (symbolic)
    x = mp.mpf("0.5")
    d4 = (16 * x**4 - 48 * x**2 + 12) * mp.exp(-x * x)
    write("d4_gauss.txt", "# x d4/dx4 exp(-x^2)", [(x, d4)])

    # series coefficients by direct product, generic parameters
    m, k, a1, a2 = mp.mpf("0.5"), mp.mpf("0.25"), mp.mpf("0.5"), mp.mpf("2.5")
    j, b, c0, dd = 1, mp.mpf(0), mp.mpf(1), 1
    rows = []
    for n in range(0, 7):
        prod = mp.mpf(1)
        for l in range(1, n + 1):
            arg = -(a1 + k) * (l - 1 + (a2 - j) / (a2 + m)) + b
            prod *= (mp.gamma(arg + 1) * mp.gamma((m + a2) * l - j + 1)
                     / (mp.gamma(arg - a1 + 1) * mp.gamma((m + a2) * l + a2 - j + 1)))
        rows.append((n, c0 * dd**n * prod))
    write("selfsim_coeffs.txt",
          "# n c_n  (m=0.5 k=0.25 alpha1=0.5 alpha2=2.5 j=1 b=0 c0=1 d=1)", rows)

    # decay constant sigma(n=2, alpha=1)
    n, alpha = 2, mp.mpf(1)
    r = alpha / (2 * n)
    sigma = (1 - r) * r ** (alpha / (2 * n - alpha)) * mp.cos((n - 1) * mp.pi / (2 * n - alpha))
    write("sigma.txt", "# n alpha sigma", [(n, alpha, sigma)])

    # truncation radius for n=2 alpha=0.8 b=-0.2 dy=1 tail_tol=1e-10:
    # exact inversion of the envelope tail integral with C calibrated as in the
    # library (max over roots at T0, inflated by 2).
    n, alpha, b = 2, mp.mpf("0.8"), mp.mpf("-0.2")
    delta = alpha / (2 * n)
    q = 2 * n / (2 * n - alpha)
    sigma = (1 - delta) * delta ** (alpha / (2 * n - alpha)) * mp.cos((n - 1) * mp.pi / (2 * n - alpha))
    t0 = (mp.log(mp.mpf(10) ** 12) / sigma) ** (1 / q) / 2
    env = lambda t: t ** (-q * (b + mp.mpf(1) / 2)) * mp.exp(-sigma * t**q)
    roots = [mp.exp(1j * mp.pi * (n - 1 - 2 * kk) / (2 * n)) for kk in range(n)]
    mp.mp.dps = 120
    cmax = max(abs(wright_phi(delta, b + 1, -lam * t0)) for lam in roots)
    mp.mp.dps = 80
    C = 2 * cmax / env(t0)
    tail = lambda T: C * mp.quad(env, [T, T + 5, T + 20, mp.inf])  # dy = 1
    R = mp.findroot(lambda T: mp.log(tail(T)) - mp.log(mp.mpf("1e-10")), 10)
    write("truncation_radius.txt", "# n alpha b dy tail_tol C R_exact",
          [(n, alpha, b, 1, mp.mpf("1e-10"), C, R)])


if __name__ == "__main__":
    main()
