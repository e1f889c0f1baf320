"""Subdivision cascade on one lifted Torus2 eigenfunction.

Splits the cube Q = [0.5, 1.5]^2 x [-0.5, 0.5] into Y = 16 parts three times,
tracks how the index budget N0 / 2^s spreads over the generations, and
writes the per-cube records to cascade.jsonl.

Run:  python3 demos/cascade_demo.py   (a few seconds)
"""
from nodal_lab.cascade import CascadeParams, binomial_group_sizes, lln_j0, run_cascade
from nodal_lab.eigen import lift, nearest_eigenvalue, synth_random
from nodal_lab.geometry import CubeSpec, Manifold

lam = nearest_eigenvalue(Manifold.TORUS2, 2000)
h = lift(synth_random(Manifold.TORUS2, lam, seed=3))
cp = CascadeParams(Y=16, j=3)

rep = run_cascade(h, CubeSpec((1.0, 1.0), 0.5), cp)
print(f"lambda {lam}: N0 {rep.N0:.3f}, threshold {rep.threshold:.3f}, delta {cp.delta:.5f}")
print(f"goodFraction {rep.good_fraction:.4f}  (vacuous: {rep.vacuous})")
print("binomial group sizes for j = 3, Y = 16:", binomial_group_sizes(3, 16))
print("smallest j with tail >= 1/2 for Y = 16:", lln_j0(16))
rep.write("cascade.jsonl")
