"""Nodal length of random Torus2 eigenfunctions against the eigenvalue.

Sweeps 8 eigenvalues in [100, 4000] with 3 random members each, fits the
log-log exponent and prints the smallest C with length <= C lam^0.75.
Records land in ./out_sweep (rerunning resumes from them).

Run:  python3 demos/nodal_length_sweep.py   (about a minute)
"""
import math

import numpy as np

from nodal_lab.runner import ExperimentConfig, fit_exponent, sweep_nodal_measure, upper_constant

cfg = ExperimentConfig(manifold="Torus2", lambda_min=100, lambda_max=4000, lambda_count=8,
                       ensemble_size=3, seed=7, out_dir="out_sweep")
table = [r for r in sweep_nodal_measure(cfg) if r["value"] is not None]

by_lam = {}
for r in table:
    by_lam.setdefault(r["lambda"], []).append(r["value"])
print(f"{'lambda':>8} {'median length':>14} {'/ sqrt(lam)':>12}")
for lam, v in sorted(by_lam.items()):
    m = float(np.median(v))
    print(f"{lam:8d} {m:14.3f} {m / math.sqrt(lam):12.4f}")

fit = fit_exponent(table)
print(f"exponent {fit.slope:.4f} (R^2 {fit.r_squared:.4f}), prefactor {fit.prefactor:.3f}")
print(f"smallest C with length <= C lam^0.75: {upper_constant(table, 0.75):.3f}")
