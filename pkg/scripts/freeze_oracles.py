"""Recompute the 50-digit reference values used by the test suite and
write them to tests/data/oracle_values.json.

Everything here goes through mpmath and equations written out from
scratch (secular equations, spectral integrals), not through ibc1d.
"""
import json
from pathlib import Path

import mpmath as mp

mp.mp.dps = 50
OUT = Path(__file__).resolve().parents[1] / "tests" / "data" / "oracle_values.json"


def root(f, bracket):
    # plain bisection, then secant polishing from inside the bracket
    a, b = bracket
    fa = f(a)
    assert fa * f(b) < 0
    while b - a > mp.mpf(10) ** -25 * (1 + abs(a)):
        m = (a + b) / 2
        fm = f(m)
        if fa * fm <= 0:
            b = m
        else:
            a, fa = m, fm
    x = mp.findroot(f, (a + b) / 2)
    assert bracket[0] <= x <= bracket[1]
    assert abs(f(x)) < mp.mpf(10) ** -40 * (1 + abs(x) ** 3), (x, f(x))
    return x


def s(x):
    return mp.nstr(x, 40)


def line_ground(c):
    kappa = mp.cbrt(abs(c) ** 2 / 2)
    return {"c": s(c), "kappa": s(kappa), "energy": s(-kappa**2)}


def massive_kappa(c, M):
    f = lambda k: 2 * k * (k**2 - M) - abs(c) ** 2
    k = root(f, (mp.sqrt(M), mp.sqrt(M) + mp.cbrt(abs(c) ** 2 / 2) + 1))
    return {"c": s(c), "M": s(M), "kappa": s(k), "energy": s(M - k**2)}


def two_source_energy(c1, c2, R):
    rhs = lambda k: abs(c1) ** 2 + abs(c2) ** 2 + 2 * mp.re(mp.conj(c1) * c2) * mp.exp(-k * R)
    hi = mp.cbrt((abs(c1) + abs(c2)) ** 2 / 2)
    k = root(lambda k: 2 * k**3 - rhs(k), (hi / 100, hi))
    return {"c1": s(c1), "c2": s(c2), "R": s(R), "energy": s(-k**2)}


def box_ground(l1, l2, c):
    a2 = abs(c) ** 2
    # k = 0 is a trivial root of the undivided form
    f = lambda k: k**3 - a2 * mp.sinh(k * l1) * mp.sinh(k * l2) / mp.sinh(k * (l1 + l2))
    k0 = mp.cbrt(a2 / 2)
    k = root(f, (mp.mpf("1e-8"), 2 * k0 + 1))
    return {"l1": s(l1), "l2": s(l2), "c": s(c), "energy": s(-k**2)}


def box_levels(l1, l2, c, n):
    """k^3 sin(kl) + |c|^2 sin(k l1) sin(k l2) = 0, bracketed between the
    zeros of the pole-free function on a fine grid."""
    a2 = abs(c) ** 2
    l = l1 + l2
    f = lambda k: k**3 * mp.sin(k * l) + a2 * mp.sin(k * l1) * mp.sin(k * l2)
    roots = []
    grid = [mp.mpf(i) / 2000 for i in range(1, 200000)]
    prev = f(grid[0])
    for a, b in zip(grid, grid[1:]):
        cur = f(b)
        if prev * cur < 0:
            roots.append(root(f, (a, b)))
            if len(roots) == n:
                break
        prev = cur
    return {"l1": s(l1), "l2": s(l2), "c": s(c), "levels": [s(k**2) for k in roots]}


def k00_spectral(c, t):
    """|phi_g^0|^2 e^{i kappa^2 t} + 2 int_0^inf |phi_k^0|^2 e^{-i k^2 t} dk."""
    kap = mp.cbrt(abs(c) ** 2 / 2)
    # |phi_k^0|^2 = 4 k^2 |b|^2 / (2 pi |c|^2),  |b|^2 = kap^6 / (k^6 + kap^6)
    w = lambda k: 4 * k**2 * kap**6 / (2 * mp.pi * abs(c) ** 2 * (k**6 + kap**6))
    # u = k^2 turns the chirp into a plain Fourier tail for quadosc
    g = lambda u: w(mp.sqrt(u)) / (2 * mp.sqrt(u)) * mp.expj(-u * t)
    I = mp.quad(g, [0, 1]) + mp.quadosc(g, [1, mp.inf], omega=t)
    val = mp.mpf(2) / 3 * mp.expj(kap**2 * t) + 2 * I
    return {"c": s(c), "t": s(t), "re": s(mp.re(val)), "im": s(mp.im(val))}


def main():
    data = {
        "line_ground": [line_ground(mp.mpf(1)), line_ground(mp.mpc(0.3, -1.7))],
        "massive": [massive_kappa(mp.mpf(1), mp.mpf(1)), massive_kappa(mp.mpf("0.2"), mp.mpf(3))],
        "two_source": [two_source_energy(mp.mpf(1), mp.mpf(1), R) for R in (mp.mpf("0.5"), mp.mpf(1), mp.mpf(4))]
                      + [two_source_energy(mp.mpf(1), mp.mpc(0, 1), mp.mpf(1)),
                         two_source_energy(mp.mpf(1), mp.mpf(-2), mp.mpf("0.7"))],
        "box_ground": [box_ground(mp.mpf("0.3"), mp.mpf("0.7"), mp.mpf(2)),
                       box_ground(mp.mpf("0.5"), mp.mpf("0.5"), mp.mpf(20)),
                       box_ground(mp.mpf("0.05"), mp.mpf("0.2"), mp.mpf(1))],
        "box_levels": [box_levels(mp.mpf("0.5"), mp.mpf("0.5"), mp.mpf(20), 8),
                       box_levels(mp.mpf("0.3"), mp.mpf("0.7"), mp.mpf(2), 8)],
        "k00": [k00_spectral(mp.mpf(1), mp.mpf(t)) for t in ("0.5", "2", "10")],
    }
    OUT.write_text(json.dumps(data, indent=1) + "\n")
    print(f"wrote {OUT}")


if __name__ == "__main__":
    main()
