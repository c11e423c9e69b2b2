#!/usr/bin/env python3
"""Generates frozen reference values for the special-function tests.

Run from the repo root:

    python3 tools/oracle_gen.py > crates/anplane/tests/oracle_values.txt

The printed arrays are pasted into crates/anplane/tests/special_oracle.rs
and committed; tests never call this script. All values are computed with
mpmath at 50 significant digits and printed with 17 digits, which is
exact for f64 round-tripping.
"""

import mpmath as mp

mp.mp.dps = 50


def fmt(x):
    s = mp.nstr(mp.mpf(x), 17, strip_zeros=False)
    return s


def emit(name, rows, cols):
    print(f"const {name}: &[({', '.join(cols)})] = &[")
    for row in rows:
        print("    (" + ", ".join(fmt(v) + "_f64" for v in row) + "),")
    print("];")
    print()


# ---- log_gamma on the positive axis ----
LG_POINTS = [0.07, 0.5, 1.0, 1.5, 2.0, 3.75, 8.0, 10.5, 77.0, 512.5, 1000.0, 1.0e6 + 0.5]
emit("LOG_GAMMA_CASES", [(z, mp.loggamma(z)) for z in LG_POINTS], ["f64", "f64"])

# ---- standard normal CDF ----
PHI_POINTS = [0.0, 1e-12, 0.1, 0.5, 1.0, 1.3499, 1.5, 2.0, 3.0, 5.0, 8.0, 10.0, 15.0, 20.0, 37.0]


def phi(x):
    return mp.ncdf(x)


rows = []
for x in PHI_POINTS:
    rows.append((x, phi(x)))
    if x > 0:
        rows.append((-x, phi(-x)))
emit("NORMAL_CDF_CASES", rows, ["f64", "f64"])

# ---- Kummer M(-p/2, 1/2, z), z <= 0 ----
KUMMER_CASES = [
    (1.0, -0.5), (1.0, -5.0), (1.0, -60.0), (1.0, -1.0e6), (1.0, -5.0e17),
    (2.0, -0.5), (2.0, -1000.0), (2.0, -5.0e17),
    (3.0, -2.0), (3.0, -75.0), (3.0, -1.0e8),
    (4.0, -1.0), (4.0, -300.0),
    (5.0, -30.0), (5.0, -200.0),
    (10.0, -0.25), (10.0, -90.0),
    (2.5, -0.5), (2.5, -55.0), (2.5, -1.0e4),
    (7.3, -0.5), (7.3, -150.0), (7.3, -250.0), (7.3, -1.0e9),
    (100.0, -3.0),
    (1024.0, -0.125),
]
rows = []
for p, z in KUMMER_CASES:
    m = mp.hyp1f1(mp.mpf(-p) / 2, mp.mpf(1) / 2, mp.mpf(z))
    # log-space reference: every needed M value is positive
    rows.append((p, z, mp.log(m)))
emit("KUMMER_LOG_CASES", rows, ["f64", "f64", "f64"])

# ---- bivariate normal CDF: Phi2(a, b, rho) = P(X<=a, Y<=b) ----
BVN_CASES = [
    (0.0, 0.0, 0.3), (0.0, 0.0, -0.7),
    (1.2, -0.4, 0.5), (-1.0, -1.0, 0.9),
    (2.0, 1.0, -0.95), (0.5, 0.5, 0.999),
    (-0.3, 0.9, -0.999), (1.0, 1.0, 0.9999),
    (-2.0, -2.0, 0.95), (3.0, -3.0, 0.6),
    (0.7, 0.2, 0.925), (1.5, 1.5, -0.925),
    (0.0, 0.0, 0.9999), (-1.5, 2.5, 0.98),
    (4.0, 4.0, 0.5), (-4.0, 1.0, -0.5),
]


def bvn(a, b, rho):
    a, b, rho = mp.mpf(a), mp.mpf(b), mp.mpf(rho)

    def integrand(theta):
        s = mp.sin(theta)
        c2 = mp.cos(theta) ** 2
        return mp.e ** (-(a * a + b * b - 2 * a * b * s) / (2 * c2))

    tail = mp.quad(integrand, [0, mp.asin(rho)])
    return mp.ncdf(a) * mp.ncdf(b) + tail / (2 * mp.pi)


emit("BVN_CASES", [(a, b, r, bvn(a, b, r)) for a, b, r in BVN_CASES],
     ["f64", "f64", "f64", "f64"])

# ---- Gaussian D_p values via direct quadrature of the folded moment ----
# D_p = (E |sigma*eps + mu|^p)^(1/p), eps ~ N(0,1); independent of the
# closed form under test (plain numeric integration).
DP_CASES = [
    (1.0, 0.0, 1.0), (1.0, 1.0, 1.0), (1.0, -3.0, 2.0),
    (0.3, -2.0, 3.7), (2.0, 10.0, 5.0),
    (1.0e-6, 1000.0, 2.0), (1.0e-3, 1.0, 1.0),
    (1.3, 0.7, 2.6), (5.0, 0.0, 16.0),
    (0.5, 40.0, 1.0), (1.0, 0.0, 1024.0),
]


def dp_quad(sigma, mu, p):
    sigma, mu, p = mp.mpf(sigma), mp.mpf(mu), mp.mpf(p)

    def integrand(t):
        x = sigma * t + mu
        return mp.fabs(x) ** p * mp.npdf(t)

    lo, hi = mp.mpf(-45), mp.mpf(45)
    pts = [lo, hi]
    zero_t = -mu / sigma
    if lo < zero_t < hi:
        pts = [lo, zero_t, hi]
    val = mp.quad(integrand, pts)
    return val ** (1 / p)


emit("DP_GAUSSIAN_CASES", [(s, m, p, dp_quad(s, m, p)) for s, m, p in DP_CASES],
     ["f64", "f64", "f64", "f64"])
