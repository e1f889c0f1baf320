"""Calibration sweeps for the constants frozen in nodal_lab/constants.py.

The wavelength-scale estimates only assert that some constant exists.  Each
sweep below measures the implied constant over random eigenfunctions and
balls or cubes, and prints the largest (or smallest) value seen.  The frozen
constants are these values with headroom.

Run:  python3 demos/calibrate_constants.py  (a few minutes on one core)
"""
import math

import numpy as np

from nodal_lab import constants
from nodal_lab.doubling import DoublingParams, check_linfty_estimate, check_monotonicity
from nodal_lab.eigen import lift, nearest_eigenvalue, synth_random
from nodal_lab.geometry import TWO_PI, BallSpec, CubeSpec, Manifold
from nodal_lab.nodal import density_radius
from nodal_lab.quad import QuadratureSpec
from nodal_lab.wavescale import (WavescaleParams, calibrate_epsilon, check_gradient_bound,
                                 check_harnack_corollary, check_sided_sup, random_balls)

rng = np.random.default_rng(20240101)
lams = [nearest_eigenvalue(Manifold.TORUS2, t) for t in np.geomspace(100, 10000, 5)]
exact = DoublingParams(quadrature=QuadratureSpec(kind="exact"), C0=math.inf, C7=math.inf)

# -- C0: N(h, q1) <= C0 max(N(h, q), 0.1) when A q1 lies in q, h the harmonic lift
worst = 0.0
for i, lam in enumerate(lams):
    h = lift(synth_random(Manifold.TORUS2, lam, i))
    s = math.sqrt(lam)
    for _ in range(40):
        half = rng.uniform(0.5, 2.0) / s
        q = CubeSpec(tuple(rng.uniform(0, TWO_PI, 2)) + (0.0,), half)
        h1 = half / exact.A * rng.uniform(0.3, 1.0)
        off = rng.uniform(-1, 1, 3) * (half - exact.A * h1)
        q1 = CubeSpec(tuple(np.asarray(q.center) + off), h1)
        worst = max(worst, check_monotonicity(h, q1, q, exact).ratio)
print(f"C0 (monotonicity, A = {exact.A}): max ratio {worst:.4f}")

# -- C7: sup_{4B/3} |h| <= C7 2^N(h, q) sup_B |h|
worst = 0.0
for i, lam in enumerate(lams):
    h = lift(synth_random(Manifold.TORUS2, lam, 10 + i))
    s = math.sqrt(lam)
    for _ in range(20):
        B = BallSpec(tuple(rng.uniform(0, TWO_PI, 2)) + (rng.uniform(-1, 1) / s,),
                     rng.uniform(0.2, 2.0) / s)
        worst = max(worst, check_linfty_estimate(h, B, exact, samples=512, seed=1).ratio)
print(f"C7 (L-infinity estimate): max implied constant {worst:.4f}")

# -- C1, C2: gradient bound and one-sided sup at r < 0.1 / sqrt(lam)
p = WavescaleParams(epsilon=0.1, C1=math.inf, C2=math.inf)
c1 = c2 = 0.0
for manifold in (Manifold.TORUS2, Manifold.SPHERE2):
    for i, t in enumerate(np.geomspace(100, 10000, 5)):
        lam = nearest_eigenvalue(manifold, t)
        u = synth_random(manifold, lam, 20 + i)
        for B in random_balls(u, 10, 0.1, seed=30 + i):
            c1 = max(c1, check_gradient_bound(u, B, p).constant)
            ch = B.chart if manifold is Manifold.SPHERE2 else None
            v = u if u(np.asarray([B.center]), ch)[0] >= 0 else u.scaled(-1.0)
            c2 = max(c2, check_sided_sup(v, B, p).constant)
print(f"C1 (gradient bound): max implied constant {c1:.4f}")
print(f"C2 (one-sided sup): max implied constant {c2:.4f}")

# the one-sided bound is tightest at nodal points: center the ball on a zero
for i, lam in enumerate(lams):
    u = synth_random(Manifold.TORUS2, lam, 40 + i)
    for _ in range(10):
        a = rng.uniform(0, TWO_PI, 2)
        b = a + rng.uniform(-1, 1, 2) * 3 / math.sqrt(lam)
        fa, fb = u(np.asarray([a]))[0], u(np.asarray([b]))[0]
        if fa * fb > 0:
            continue
        for _ in range(60):
            m = 0.5 * (a + b)
            if (u(np.asarray([m]))[0] > 0) == (fa > 0):
                a = m
            else:
                b = m
        B = BallSpec(tuple(a), 0.099 / math.sqrt(lam))
        v = u if u(np.asarray([a]))[0] >= 0 else u.scaled(-1.0)
        c2 = max(c2, check_sided_sup(v, B, p).constant)
print(f"C2 including nodal centers: {c2:.4f}")

# -- Harnack floor: sup_B h >= c sup_{2B/3} |h| for h(center) >= 0
low = math.inf
for i, lam in enumerate(lams):
    u = synth_random(Manifold.TORUS2, lam, 50 + i)
    for B2 in random_balls(u, 10, 0.1, seed=60 + i):
        B = BallSpec(B2.center + (0.0,), B2.radius)
        h = lift(u if u(np.asarray([B2.center]))[0] >= 0 else u.scaled(-1.0))
        low = min(low, check_harnack_corollary(h, B, WavescaleParams(harnack_floor=0.0)).constant)
print(f"Harnack corollary: min implied c {low:.4f}")

# -- nodal density: max distance to the nodal set times sqrt(lam)
dens = 0.0
for i, lam in enumerate(lams):
    for k in range(3):
        u = synth_random(Manifold.TORUS2, lam, 70 + 3 * i + k)
        dens = max(dens, density_radius(u, samples=2048, seed=k) * math.sqrt(lam))
print(f"density radius * sqrt(lam): max {dens:.4f}")

# -- epsilon: largest radius factor with a violation-free weak maximum principle
eps = calibrate_epsilon(Manifold.TORUS2, [100, 1000, 10000], balls_per_lam=30, lo=0.1, hi=12.0)
print(f"epsilon: weak maximum principle clean up to {eps:.4f}")

print("frozen:", {k: getattr(constants, k) for k in
                  ("C0", "C7", "C1", "C2", "HARNACK_FLOOR", "C_DENS", "EPSILON", "EPSILON_MAX")
                  if hasattr(constants, k)})
