#!/usr/bin/env python3
"""Independent reference values for the test suites.

Nothing here calls the C++ library. Values are computed with mpmath (50
digits) or scipy quadrature and frozen into tests/oracle_values.hpp (takes a
few minutes):

    python3 tests/oracles/generate.py > tests/oracle_values.hpp
"""

import math

import mpmath as mp
from scipy import integrate, stats

mp.mp.dps = 50


def psi(t):
    """Standard normal CDF by integrating the density."""
    t = mp.mpf(t)
    dens = lambda s: mp.exp(-s * s / 2) / mp.sqrt(2 * mp.pi)
    if t <= 0:
        return mp.quad(dens, [-mp.inf, t])
    return mp.mpf(1) - mp.quad(dens, [t, mp.inf])


def m(t):
    t = mp.mpf(t)
    return (mp.exp(t) - 1) / (1 - t)


def m_inv(y):
    return mp.findroot(lambda t: m(t) - y, (mp.mpf(0), mp.mpf(1) - mp.mpf("1e-30")), solver="anderson")


def bicriteria(eps1, eps2):
    """Optimum of the reduced example by a 1-D search over d1.

    The second budget row is active at the optimum, so x = 2 + (d1 + eps2)/2.
    Given x, d2 is limited by the first budget row (d2 <= x - 2 + eps1) and
    the feasibility row (d2 <= m^-1(x)); the objective Psi(d2) - Psi(d1)
    is then a function of d1 alone on [-12, 0] (d1 >= -4 - eps2 keeps x >= 0).
    """
    eps1, eps2 = mp.mpf(eps1), mp.mpf(eps2)

    def d2_of(d1):
        x = 2 + (d1 + eps2) / 2
        return x, min(x - 2 + eps1, m_inv(x))

    def value(d1):
        x, d2 = d2_of(d1)
        if d2 < 0:
            return mp.mpf(-1)
        return psi(d2) - psi(d1)

    lo = max(mp.mpf(-12), -4 - eps2)
    hi = mp.mpf(0)
    # Coarse scan, then golden section on the bracketing cell (V is unimodal in d1).
    n = 400
    pts = [lo + (hi - lo) * k / n for k in range(n + 1)]
    vals = [value(p) for p in pts]
    k = max(range(len(vals)), key=lambda i: vals[i])
    a, b = pts[max(k - 1, 0)], pts[min(k + 1, n)]
    g = (mp.sqrt(5) - 1) / 2
    c, d = b - g * (b - a), a + g * (b - a)
    fc, fd = value(c), value(d)
    while b - a > mp.mpf("1e-25"):
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - g * (b - a)
            fc = value(c)
        else:
            a, c, fc = c, d, fd
            d = a + g * (b - a)
            fd = value(d)
    d1 = (a + b) / 2
    x, d2 = d2_of(d1)
    return value(d1), x, d1, d2


def gauss_disc(center, radius, sigma):
    """Mass of a disc under N(0, diag(sigma^2)) by scipy polar quadrature."""
    cx, cy = center
    sx, sy = sigma

    def f(r, th):
        u, v = cx + r * math.cos(th), cy + r * math.sin(th)
        return r * stats.norm.pdf(u, scale=sx) * stats.norm.pdf(v, scale=sy)

    val, _ = integrate.dblquad(f, 0.0, 2 * math.pi, 0.0, radius, epsabs=1e-14, epsrel=1e-13)
    return val


def gauss_triangle(verts, sigma):
    (ax, ay), (bx, by), (cx, cy) = verts
    sx, sy = sigma

    def f(t, s):  # s in [0,1], t in [0, 1-s]
        u = ax + s * (bx - ax) + t * (cx - ax)
        v = ay + s * (by - ay) + t * (cy - ay)
        return stats.norm.pdf(u, scale=sx) * stats.norm.pdf(v, scale=sy)

    jac = abs((bx - ax) * (cy - ay) - (cx - ax) * (by - ay))
    val, _ = integrate.dblquad(f, 0.0, 1.0, 0.0, lambda s: 1.0 - s, epsabs=1e-14, epsrel=1e-13)
    return jac * val


def emit(name, value, comment):
    print(f"// {comment}")
    print(f"inline constexpr double {name} = {mp.nstr(mp.mpf(value), 17, min_fixed=-30, max_fixed=30)};")


def main():
    print("// SPDX-License-Identifier: Apache-2.0")
    print("// Generated by tests/oracles/generate.py; do not edit by hand.")
    print("#pragma once\n")
    print("namespace oracle {\n")

    for t, name in [(1, "kPsi1"), (1.7, "kPsi1_7"), (-1.7, "kPsiMinus1_7"), (-5, "kPsiMinus5"), (0.3, "kPsi0_3"),
                    (-12, "kPsiMinus12")]:
        emit(name, psi(t), f"Psi({t}) by mpmath quadrature of the normal density")

    emit("kM0_5", m("0.5"), "m(0.5) = (e^0.5 - 1) / 0.5")
    for y in [2, 3, 7, 12]:
        emit(f"kMInv{y}", m_inv(y), f"m^-1({y}) by mpmath root finding")

    print()
    cases = [(0, 5), (0, 10), (0, 20), (3, 0), (0.5, 0), (1, 2), (5, 5), (2, 3)]
    for e1, e2 in cases:
        V, x, d1, d2 = bicriteria(e1, e2)
        tag = f"{e1}_{e2}".replace(".", "p")
        print(f"// bi-criteria optimum at eps = ({e1}, {e2}), 1-D reduction in d1")
        for nm, val in [("V", V), ("X", x), ("D1", d1), ("D2", d2)]:
            print(f"inline constexpr double kBi{nm}_{tag} = {mp.nstr(val, 17)};")

    print()
    emit("kGaussDiscCentered", 1 - mp.exp(mp.mpf("-0.72")), "disc radius 1.2 at the origin, sigma 1: 1 - exp(-r^2/2)")
    emit("kGaussDiscOffset", gauss_disc((0.5, -0.3), 1.2, (1.0, 1.0)), "disc radius 1.2 at (0.5, -0.3), sigma (1, 1)")
    emit("kGaussDiscAniso", gauss_disc((0.2, 0.1), 0.9, (0.5, 2.0)), "disc radius 0.9 at (0.2, 0.1), sigma (0.5, 2)")
    emit("kGaussBall3", stats.chi2.cdf(1.1 ** 2, 3), "3-D ball radius 1.1 at the origin, sigma 1 (chi-square 3 dof)")
    emit("kGaussTriangle", gauss_triangle(((-1.0, -0.5), (1.5, -0.5), (0.0, 1.0)), (1.0, 0.7)),
         "triangle (-1,-0.5), (1.5,-0.5), (0,1) under sigma (1, 0.7)")

    print("\n}  // namespace oracle")


if __name__ == "__main__":
    main()
