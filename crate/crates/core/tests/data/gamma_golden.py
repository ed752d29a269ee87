"""Arbitrary-precision evaluation of the coupling coefficient for golden tests.

Evaluates Gamma = Gamma_E - i Gamma_H directly from its closed form with
mpmath at 50 significant digits (principal branch for complex roots) and
prints Rust array literals for `tests/physics_golden.rs`.
"""
from mpmath import mp, mpf, mpc, sqrt

mp.dps = 50
k0 = mpf("0.51")
g = mpf("9.806")
delta = mpc("0.011", "-0.012")

cases = [
    (1, 1, "5.3", "0.4", "0.7"),
    (1, -1, "1.2", "-0.35", "1.1"),
    (-1, 1, "-2.0", "0.9", "-0.25"),
    (-1, -1, "-4.9", "-1.3", "0.6"),
    (1, -1, "-0.8", "0.2", "0.15"),
]

for m1, m2, w, p, q in cases:
    w, p, q = mpf(w), mpf(p), mpf(q)
    k1 = (p - k0, q)
    k2 = (-p - k0, -q)
    n1 = sqrt(k1[0] ** 2 + k1[1] ** 2)
    n2 = sqrt(k2[0] ** 2 + k2[1] ** 2)
    dot = k1[0] * k2[0] + k1[1] * k2[1]
    proj = (k1[0] * k0) * (k2[0] * k0) / k0**2
    ge = mpf("0.5") * (proj - 2 * dot) / (sqrt(mpc(dot, 0)) - k0 * delta)
    gh = mpf("0.5") * (
        n1 + n2 + (n1 * n2 - dot) / (m1 * m2 * sqrt(n1 * n2)) * (2 * g * k0 + w**2) / (2 * g * k0 - w**2)
    )
    gamma = ge - mpc(0, 1) * gh
    print(
        f"    ({m1}, {m2}, {mp.nstr(w, 17)}, {mp.nstr(p, 17)}, {mp.nstr(q, 17)}, "
        f"{mp.nstr(gamma.real, 17, min_fixed=-30, max_fixed=30)}, {mp.nstr(gamma.imag, 17, min_fixed=-30, max_fixed=30)}),"
    )
