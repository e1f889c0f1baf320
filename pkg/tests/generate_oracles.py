"""Recompute the frozen oracle values in tests/data/oracles.json.

Run from the repository root:  python3 tests/generate_oracles.py
Takes a few minutes; the output is committed and read by the tests.
"""
import json
import math
import sys
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).parent))
import oracles  # noqa: E402


def random_poly(seed, n_terms=4, max_freq=4):
    rng = np.random.default_rng(seed)
    k = rng.integers(-max_freq, max_freq + 1, size=(n_terms, 2))
    return k.tolist(), rng.standard_normal(n_terms).tolist(), rng.standard_normal(n_terms).tolist()


def main():
    out = {}

    # spherical harmonic values at fixed points
    rng = np.random.default_rng(1)
    sph = []
    for l, m in [(0, 0), (1, 0), (1, 1), (1, -1), (3, 2), (5, -3), (10, 10), (12, -7)]:
        th, ph = rng.uniform(0.1, 3.0), rng.uniform(0, 2 * math.pi)
        sph.append({"l": l, "m": m, "theta": th, "phi": ph,
                    "value": float(oracles.real_sph_harm(l, m, th, ph))})
    out["sph_harm"] = sph

    # doubling indices of random trigonometric polynomials (adaptive quadrature)
    dbl = []
    for seed in range(4):
        k, a, b = random_poly(seed)
        c = rng.uniform(0, 2 * math.pi, 2).tolist()
        half = float(rng.uniform(0.05, 0.3))
        dbl.append({"freqs": k, "a": a, "b": b, "center": c, "half": half,
                    "N": oracles.doubling_2d(k, a, b, c, half)})
    out["doubling_2d"] = dbl

    # nodal lengths of integer-frequency eigenfunctions from find_contours at 4096^2
    lengths = []
    for lam, vecs, seed in [(25, [(3, 4), (4, -3), (5, 0), (0, 5)], 3), (65, [(1, 8), (8, -1), (4, 7), (7, -4)], 4)]:
        r = np.random.default_rng(seed)
        a, b = r.standard_normal(len(vecs)).tolist(), r.standard_normal(len(vecs)).tolist()
        lengths.append({"lam": lam, "freqs": [list(v) for v in vecs], "a": a, "b": b,
                        "length": oracles.contour_length_torus(vecs, a, b, 4096)})
    out["nodal_length_2d"] = lengths

    out["binom_tail"] = [{"j": j, "Y": Y, "tail": oracles.binom_tail(j, Y)}
                         for j, Y in [(1, 2), (2, 2), (5, 3), (17, 4), (40, 16), (100, 16), (300, 625)]]
    out["multiplicity"] = [{"dim": d, "lam": lam, "count": oracles.lattice_multiplicity(d, lam)}
                           for d, lam in [(2, 25), (2, 65), (2, 325), (3, 3), (3, 9), (3, 50), (3, 101)]]

    oracles.DATA.parent.mkdir(exist_ok=True)
    with open(oracles.DATA, "w") as fh:
        json.dump(out, fh, indent=1, sort_keys=True)
    print(f"wrote {oracles.DATA}")


if __name__ == "__main__":
    main()
