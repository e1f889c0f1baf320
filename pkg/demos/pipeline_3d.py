"""Wavelength-cube partition of nodal surfaces on Torus3.

For each eigenvalue the torus is cut into about sqrt(lam)/2 cubes per axis.
Per cube the script records the nodal area and doubling index, and prints
the sum of cube areas against a global extraction.

Run:  python3 demos/pipeline_3d.py   (about a minute)
"""
import numpy as np

from nodal_lab.doubling import DoublingParams
from nodal_lab.eigen import nearest_eigenvalue, synth_random
from nodal_lab.geometry import Manifold
from nodal_lab.quad import QuadratureSpec
from nodal_lab.runner import pipeline_3d_lower_single

params = DoublingParams(quadrature=QuadratureSpec(kind="exact"))
for target in (30, 120, 400):
    lam = nearest_eigenvalue(Manifold.TORUS3, target)
    r = pipeline_3d_lower_single(synth_random(Manifold.TORUS3, lam, seed=1), params)
    print(f"lambda {lam:4d}: {r.cubes_per_axis}^3 cubes, area {r.partition_total:9.3f} "
          f"(global {r.global_total:9.3f}, gap {r.consistency:.2e}); "
          f"median index {np.median(r.indices):.3f}, cubes without zero {r.missing_zero}")
