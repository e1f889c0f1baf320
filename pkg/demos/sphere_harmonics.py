"""Nodal lengths on the round sphere.

Sectoral harmonics have 2l meridians of length pi each, so the nodal
length is exactly 2 pi l.  Random degree-l harmonics should scale like l
as well; the ratio length / l is printed for both.

Run:  python3 demos/sphere_harmonics.py   (under a minute)
"""
import math

from nodal_lab.eigen import sectoral, synth_random
from nodal_lab.geometry import Manifold
from nodal_lab.nodal import extract_nodal_2d

print(f"{'l':>4} {'sectoral / 2 pi l':>18} {'random / l':>11}")
for l in (4, 8, 16, 24):
    sec = extract_nodal_2d(sectoral(l), resolution=768).total
    rnd = extract_nodal_2d(synth_random(Manifold.SPHERE2, l * (l + 1), seed=l), resolution=768).total
    print(f"{l:4d} {sec / (2 * math.pi * l):18.5f} {rnd / l:11.4f}")
