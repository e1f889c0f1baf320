"""Nodal sets: extraction, measurement, density and the inscribed-ball lower bound.

2D extraction is marching squares with zeros located by bisection on the
exact function along sign-changing grid edges; saddle cells are resolved by
the sign at the cell center.  A vertex value with ``|u| < ETA * m``, ``m`` the
largest ``|u|`` among its grid neighbours, is treated as positive, so a zero
lying exactly on a vertex still produces a consistent contour.  The local
scale keeps high-order zeros (where ``|u|`` is tiny on a whole disc) intact.

3D extraction uses scikit-image's marching cubes on a periodic grid.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from . import constants
from .eigen import Eigenfunction
from .errors import PreconditionError
from .geometry import (CAP_RADIUS, TWO_PI, BallSpec, CubeSpec, Manifold, ball_sample,
                       chart_to_xyz, conformal_factor, geodesic_to_chart_radius, sphere_sample,
                       xyz_to_chart)
from .quad import boundary_extremum, sup_abs

ETA = 1e-9
BISECTION_STEPS = 15
MAX_GRID_3D = 512
MIN_CELLS_PER_SQRT_LAM_2D = 16
MIN_CELLS_PER_SQRT_LAM_3D = 8


@dataclass
class NodalMeasure:
    """Extracted nodal set with per-element measures.

    ``elements`` is ``(M, 2, 2)`` (segments) in 2D or ``(M, 3, 3)`` (triangles)
    in 3D, in chart coordinates; ``charts`` names the chart of each element
    when more than one chart is used.
    """

    dim: int
    elements: np.ndarray
    weights: np.ndarray
    total: float
    resolution: int
    charts: np.ndarray | None = None
    meta: dict = field(default_factory=dict)

    @property
    def count(self) -> int:
        return len(self.elements)

    def export_text(self, path) -> None:
        """One element per line: 4 (2D) or 9 (3D) coordinates, fixed width."""
        flat = self.elements.reshape(len(self.elements), -1)
        with open(path, "w") as fh:
            fh.write(f"# dim {self.dim} elements {len(flat)} total {self.total:.12e}\n")
            if self.charts is not None:
                for row, ch in zip(flat, self.charts):
                    fh.write(" ".join(f"{v: .12e}" for v in row) + f" {ch}\n")
            else:
                np.savetxt(fh, flat, fmt="% .12e")


def _accumulate(w) -> float:
    return math.fsum(np.asarray(w, dtype=float).tolist())


# --- marching squares -------------------------------------------------------------

def _positive(v, floor):
    # snapped zeros count as positive
    return (v > 0) | (np.abs(v) < floor)


def _local_floor(V):
    """``ETA`` times the largest neighbouring ``|V|`` (4-neighbours in 2D, 6 in 3D)."""
    A = np.abs(V)
    P = np.pad(A, 1, mode="edge")
    out = np.zeros_like(A)
    for ax in range(A.ndim):
        for sh in (0, 2):
            sl = tuple(slice(sh, sh + A.shape[a]) if a == ax else slice(1, 1 + A.shape[a])
                       for a in range(A.ndim))
            out = np.maximum(out, P[sl])
    return ETA * out


def _edge_zero(f, a, b, slo, steps=BISECTION_STEPS):
    """Zero of ``f`` on segments ``a -> b`` whose endpoint signs differ:
    bisection, then linear interpolation inside the final bracket.
    ``slo`` is the (snapped) sign at ``a``."""
    lo, hi = a.copy(), b.copy()
    for _ in range(steps):
        mid = 0.5 * (lo + hi)
        same = (f(mid) >= 0) == slo
        lo = np.where(same[:, None], mid, lo)
        hi = np.where(same[:, None], hi, mid)
    return _edge_zero_linear(lo, hi, f(lo), f(hi))


def _edge_zero_linear(a, b, va, vb):
    denom = va - vb
    t = np.where(np.abs(denom) > 0, va / np.where(denom == 0, 1.0, denom), 0.5)
    t = np.clip(t, 0.0, 1.0)
    return a + t[:, None] * (b - a)


def marching_squares(values, xs, ys, f=None, floor=None) -> np.ndarray:
    """Zero contour of gridded values as an ``(M, 2, 2)`` segment array.

    ``values[i, j]`` is the function at ``(xs[i], ys[j])``.  With a callable
    ``f`` (points ``(n, 2)`` to values) crossings are refined by bisection and
    saddles use the exact center value; otherwise linear interpolation and the
    mean of the corners are used.  Segment order is fixed (cells in C order).
    """
    V = np.asarray(values, dtype=float)
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    nx, ny = V.shape
    if nx < 2 or ny < 2:
        return np.empty((0, 2, 2))
    S = _positive(V, _local_floor(V) if floor is None else floor)

    def crossings(i0, j0, i1, j1, mask):
        ii, jj = np.nonzero(mask)
        pa = np.stack([xs[ii + i0], ys[jj + j0]], axis=-1)
        pb = np.stack([xs[ii + i1], ys[jj + j1]], axis=-1)
        va = V[ii + i0, jj + j0]
        vb = V[ii + i1, jj + j1]
        out = np.full(mask.shape + (2,), np.nan)
        if len(ii):
            if f is not None:
                out[ii, jj] = _edge_zero(f, pa, pb, S[ii + i0, jj + j0])
            else:
                out[ii, jj] = _edge_zero_linear(pa, pb, va, vb)
        return out

    # horizontal edges (i, j) - (i+1, j), vertical edges (i, j) - (i, j+1)
    hmask = S[:-1, :] != S[1:, :]
    vmask = S[:, :-1] != S[:, 1:]
    PH = crossings(0, 0, 1, 0, hmask)
    PV = crossings(0, 0, 0, 1, vmask)

    s0, s1, s2, s3 = S[:-1, :-1], S[1:, :-1], S[1:, 1:], S[:-1, 1:]
    ch = np.stack([s0 != s1, s1 != s2, s3 != s2, s0 != s3], axis=-1)
    count = ch.sum(axis=-1)
    # edge points per cell: bottom, right, top, left
    E = np.stack([PH[:, :-1], PV[1:, :], PH[:, 1:], PV[:-1, :]], axis=2)
    segs = []
    order = []
    ci, cj = np.nonzero(count == 2)
    if len(ci):
        m = ch[ci, cj]
        e1 = np.argmax(m, axis=1)
        e2 = 3 - np.argmax(m[:, ::-1], axis=1)
        segs.append(np.stack([E[ci, cj, e1], E[ci, cj, e2]], axis=1))
        order.append(ci * ny + cj)
    si, sj = np.nonzero(count == 4)
    if len(si):
        if f is not None:
            centers = np.stack([0.5 * (xs[si] + xs[si + 1]), 0.5 * (ys[sj] + ys[sj + 1])], axis=-1)
            vc = f(centers)
        else:
            vc = 0.25 * (V[si, sj] + V[si + 1, sj] + V[si + 1, sj + 1] + V[si, sj + 1])
        joined = (vc >= 0) == s0[si, sj]
        # joined: c0 and c2 connect through the center, cut around c1 and c3
        ea = np.where(joined, 0, 3)
        eb = np.where(joined, 1, 0)
        ec = np.where(joined, 2, 1)
        ed = np.where(joined, 3, 2)
        first = np.stack([E[si, sj, ea], E[si, sj, eb]], axis=1)
        second = np.stack([E[si, sj, ec], E[si, sj, ed]], axis=1)
        segs.append(np.concatenate([first, second]))
        key = si * ny + sj
        order.append(np.concatenate([key, key]))
    if not segs:
        return np.empty((0, 2, 2))
    segs = np.concatenate(segs)
    order = np.concatenate(order)
    return segs[np.argsort(order, kind="stable")]


def clip_segments_to_disc(segs, center, radius):
    """Portions of segments inside the closed disc."""
    segs = np.asarray(segs, dtype=float)
    if len(segs) == 0:
        return segs
    c = np.asarray(center, dtype=float)
    a = segs[:, 0] - c
    d = segs[:, 1] - segs[:, 0]
    A = np.sum(d * d, axis=1)
    B = 2 * np.sum(a * d, axis=1)
    C = np.sum(a * a, axis=1) - radius * radius
    disc = B * B - 4 * A * C
    ok = (disc > 0) & (A > 0)
    sq = np.sqrt(np.where(ok, disc, 0.0))
    A_ = np.where(A > 0, A, 1.0)
    t0 = np.clip((-B - sq) / (2 * A_), 0.0, 1.0)
    t1 = np.clip((-B + sq) / (2 * A_), 0.0, 1.0)
    keep = ok & (t1 > t0)
    p0 = segs[:, 0] + t0[:, None] * d
    p1 = segs[:, 0] + t1[:, None] * d
    return np.stack([p0, p1], axis=1)[keep]


def _segment_weights(segs, chart=None) -> np.ndarray:
    if len(segs) == 0:
        return np.zeros(0)
    length = np.linalg.norm(segs[:, 1] - segs[:, 0], axis=1)
    if chart not in ("north", "south"):
        return length
    # Simpson rule for the conformal factor along each segment
    fa = conformal_factor(segs[:, 0])
    fb = conformal_factor(segs[:, 1])
    fm = conformal_factor(0.5 * (segs[:, 0] + segs[:, 1]))
    return length * (fa + 4 * fm + fb) / 6.0


# --- 2D extraction ------------------------------------------------------------------

def _check_resolution(u, resolution, per_sqrt, what):
    if u.lam > 0 and resolution < per_sqrt * math.sqrt(u.lam):
        raise PreconditionError(
            f"{what} resolution {resolution} < {per_sqrt} sqrt(lam) = {per_sqrt * math.sqrt(u.lam):.1f}")


def _torus_segments(u: Eigenfunction, n: int):
    h = TWO_PI / n
    V = u.trig.grid(n, offset=0.5)
    V = np.pad(V, ((0, 1), (0, 1)), mode="wrap")
    xs = (np.arange(n + 1) + 0.5) * h
    return marching_squares(V, xs, xs, f=u.trig)


def _square_segments(f, q: CubeSpec, n: int):
    xs = np.linspace(q.lower[0], q.upper[0], n + 1)
    ys = np.linspace(q.lower[1], q.upper[1], n + 1)
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    V = f(np.stack([X, Y], axis=-1).reshape(-1, 2)).reshape(X.shape)
    return marching_squares(V, xs, ys, f=f)


def extract_nodal_2d(u: Eigenfunction, region=None, resolution: int = 1024,
                     chart: str | None = None, check: bool = True) -> NodalMeasure:
    """Nodal line of ``u`` with its length in the manifold metric.

    ``region``: ``None`` for the whole manifold, a 2D :class:`CubeSpec`
    (chart square) or :class:`BallSpec`.  On the torus ``resolution`` is the
    number of grid cells per period; on the sphere it is cells across the
    chart square ``[-1, 1]^2`` of each cap (regions: cells across the region).
    """
    if u.dim != 2:
        raise PreconditionError("extract_nodal_2d needs a surface")
    if check:
        _check_resolution(u, resolution, MIN_CELLS_PER_SQRT_LAM_2D, "2D")
    sphere = u.manifold is Manifold.SPHERE2
    if region is None:
        if not sphere:
            segs = _torus_segments(u, resolution)
            w = _segment_weights(segs)
            return NodalMeasure(2, segs, w, _accumulate(w), resolution)
        return _sphere_global(u, resolution)
    if isinstance(region, BallSpec):
        ch = chart or (region.chart if region.chart in ("north", "south") else None)
        if sphere and ch is None:
            ch = "north"
        q = CubeSpec(region.center, region.radius)
        f = (lambda p: u(p, ch)) if sphere else u.trig
        segs = _square_segments(f, q, resolution)
        segs = clip_segments_to_disc(segs, region.center, region.radius)
        w = _segment_weights(segs, ch if sphere else None)
        return NodalMeasure(2, segs, w, _accumulate(w), resolution,
                            meta={"chart": ch})
    if isinstance(region, CubeSpec):
        ch = chart or ("north" if sphere else None)
        f = (lambda p: u(p, ch)) if sphere else u.trig
        segs = _square_segments(f, region, resolution)
        w = _segment_weights(segs, ch if sphere else None)
        return NodalMeasure(2, segs, w, _accumulate(w), resolution, meta={"chart": ch})
    raise PreconditionError("region must be None, a CubeSpec or a BallSpec")


def _sphere_global(u: Eigenfunction, resolution: int) -> NodalMeasure:
    # each cap owns the closed hemisphere |w| <= 1; a nodal line lying exactly on
    # the equator would be counted by both caps (measure-zero event for random u)
    h = 2.0 / resolution
    margin = 2
    half = 1.0 + margin * h
    n = resolution + 2 * margin
    all_segs, all_w, labels = [], [], []
    for ch in ("north", "south"):
        q = CubeSpec((0.0, 0.0), half)
        segs = _square_segments(lambda p, ch=ch: u(p, ch), q, n)
        segs = clip_segments_to_disc(segs, (0.0, 0.0), 1.0)
        all_segs.append(segs)
        all_w.append(_segment_weights(segs, ch))
        labels.append(np.full(len(segs), ch))
    segs = np.concatenate(all_segs)
    w = np.concatenate(all_w)
    return NodalMeasure(2, segs, w, _accumulate(w), resolution, charts=np.concatenate(labels))


# --- 3D extraction ------------------------------------------------------------------

def extract_nodal_3d(u: Eigenfunction, resolution: int = 128, region: CubeSpec | None = None,
                     offset: float = 0.5, check: bool = True) -> NodalMeasure:
    """Nodal surface of a Torus3 eigenfunction; area from marching cubes.

    ``region=None`` covers the whole torus with the periodic grid
    ``(i + offset) 2pi / resolution``.  For a cube region the grid has
    ``resolution`` cells per axis spanning the cube.
    """
    from skimage.measure import marching_cubes, mesh_surface_area

    if u.manifold is not Manifold.TORUS3:
        raise PreconditionError("extract_nodal_3d needs a Torus3 eigenfunction")
    if check:
        _check_resolution(u, resolution, MIN_CELLS_PER_SQRT_LAM_3D, "3D")
    if resolution > MAX_GRID_3D:
        raise PreconditionError(f"resolution {resolution} exceeds the memory guard {MAX_GRID_3D}")
    if region is None:
        h = TWO_PI / resolution
        V = np.pad(u.trig.grid(resolution, offset=offset), ((0, 1),) * 3, mode="wrap")
        origin = np.full(3, offset * h)
        spacing = (h, h, h)
    else:
        h = region.side / resolution
        axes = [np.linspace(region.lower[a], region.upper[a], resolution + 1) for a in range(3)]
        G = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)
        V = u.trig(G.reshape(-1, 3)).reshape(G.shape[:-1])
        origin = region.lower
        spacing = (h, h, h)
    return _mesh_from_grid(V, origin, spacing, resolution, marching_cubes, mesh_surface_area)


def _mesh_from_grid(V, origin, spacing, resolution, marching_cubes, mesh_surface_area):
    floor = _local_floor(V)
    Vs = np.where(np.abs(V) < floor, np.maximum(floor, 1e-300), V)  # snapped zeros count positive
    if not (np.any(Vs > 0) and np.any(Vs < 0)):
        return NodalMeasure(3, np.empty((0, 3, 3)), np.zeros(0), 0.0, resolution)
    verts, faces, _, _ = marching_cubes(Vs, level=0.0, spacing=spacing, allow_degenerate=False)
    verts = verts + np.asarray(origin)
    tri = verts[faces]
    w = 0.5 * np.linalg.norm(np.cross(tri[:, 1] - tri[:, 0], tri[:, 2] - tri[:, 0]), axis=1)
    total = _accumulate(w)
    meta = {"mesh_area": float(mesh_surface_area(verts, faces))}
    return NodalMeasure(3, tri, w, total, resolution, meta=meta)


def partition_areas(u: Eigenfunction, cubes_per_axis: int, cells_per_cube: int,
                    offset: float = 0.0) -> np.ndarray:
    """Nodal area inside each cube of the ``m^3`` partition of the torus.

    Each cube is extracted on its own, from the slice of the periodic grid
    with ``m * cells_per_cube`` cells and the given ``offset``; with offset 0
    the cube faces lie on grid planes.  Returned in lexicographic cube order.
    """
    from skimage.measure import marching_cubes, mesh_surface_area

    m, k = cubes_per_axis, cells_per_cube
    n = m * k
    if n > MAX_GRID_3D:
        raise PreconditionError(f"grid {n} exceeds the memory guard {MAX_GRID_3D}")
    h = TWO_PI / n
    V = np.pad(u.trig.grid(n, offset=offset), ((0, 1),) * 3, mode="wrap")
    out = np.zeros(m ** 3)
    idx = 0
    for a in range(m):
        for b in range(m):
            for c in range(m):
                block = V[a * k:(a + 1) * k + 1, b * k:(b + 1) * k + 1, c * k:(c + 1) * k + 1]
                origin = (np.array([a, b, c]) * k + offset) * h
                out[idx] = _mesh_from_grid(block, origin, (h, h, h), k, marching_cubes,
                                           mesh_surface_area).total
                idx += 1
    return out


# --- density --------------------------------------------------------------------------

def _densify(segs, spacing):
    if len(segs) == 0:
        return np.empty((0, segs.shape[-1]))
    length = np.linalg.norm(segs[:, 1] - segs[:, 0], axis=1)
    k = np.maximum(1, np.ceil(length / spacing).astype(int))
    reps = np.repeat(np.arange(len(segs)), k + 1)
    starts = np.repeat(np.cumsum(k + 1) - (k + 1), k + 1)
    t = (np.arange(len(reps)) - starts) / np.repeat(k, k + 1)
    a, b = segs[reps, 0], segs[reps, 1]
    return a + t[:, None] * (b - a)


def density_radius(u: Eigenfunction, samples: int = 4096, seed: int = 0,
                   resolution: int | None = None, refine: bool = True) -> float:
    """Largest distance from a point of ``M`` to the nodal set (sampled, then refined).

    Tori use the flat periodic distance; the sphere uses geodesic distance.
    """
    if u.lam == 0:
        raise PreconditionError("constant functions have no nodal set")
    rng = np.random.default_rng(seed)
    s = math.sqrt(u.lam)
    if u.manifold is Manifold.SPHERE2:
        res = resolution or max(256, int(math.ceil(16 * s)))
        nm = extract_nodal_2d(u, resolution=res)
        pts = []
        for ch in ("north", "south"):
            sel = nm.elements[nm.charts == ch]
            dense = _densify(sel, 0.25 * 2.0 / res)
            pts.append(chart_to_xyz(dense, ch))
        cloud = np.concatenate(pts)
        if len(cloud) == 0:
            raise PreconditionError("empty nodal set")
        tree = cKDTree(cloud)
        g = rng.standard_normal((samples, 3))
        x = g / np.linalg.norm(g, axis=1, keepdims=True)

        def dist(p):
            d, _ = tree.query(p)
            return 2.0 * np.arcsin(np.minimum(1.0, d / 2.0))

        def project(p):
            return p / np.linalg.norm(p, axis=1, keepdims=True)

        scale = 2.0 / math.sqrt(samples)
        return _max_distance(dist, x, project, scale, rng, refine)
    d = u.dim
    if d == 2:
        res = resolution or max(256, int(math.ceil(16 * s)))
        nm = extract_nodal_2d(u, resolution=res)
        cloud = _densify(nm.elements, 0.25 * TWO_PI / res)
    else:
        res = resolution or max(64, int(math.ceil(8 * s)))
        nm = extract_nodal_3d(u, resolution=res)
        cloud = nm.elements.reshape(-1, 3)
    if len(cloud) == 0:
        raise PreconditionError("empty nodal set")
    tree = cKDTree(np.mod(cloud, TWO_PI), boxsize=TWO_PI)
    x = rng.uniform(0.0, TWO_PI, size=(samples, d))

    def dist(p):
        return tree.query(np.mod(p, TWO_PI))[0]

    scale = TWO_PI / samples ** (1.0 / d)
    return _max_distance(dist, x, lambda p: p, scale, rng, refine)


def _max_distance(dist, x, project, scale, rng, refine, top=16, rounds=12, cloud=64):
    dx = dist(x)
    if not refine:
        return float(np.max(dx))
    order = np.argsort(dx)[::-1][:top]
    best = float(dx[order[0]])
    for i in order:
        p, v, sc = x[i], dx[i], scale
        for _ in range(rounds):
            cand = project(p + sc * rng.uniform(-1, 1, size=(cloud, x.shape[1])))
            dc = dist(cand)
            j = int(np.argmax(dc))
            if dc[j] > v:
                p, v = cand[j], dc[j]
            else:
                sc *= 0.5
        best = max(best, float(v))
    return best


# --- inscribed-ball lower bound ----------------------------------------------------------

@dataclass(frozen=True)
class LowerBoundReport:
    N: int
    measured: float
    bound: float
    constant: float
    vacuous: bool
    holds: bool
    finding: str = ""


def _local_setup(u: Eigenfunction, O, r: float, epsilon: float, eta: float, chart):
    O = tuple(float(c) for c in O)
    if u.lam > 0 and r > epsilon / math.sqrt(u.lam) * (1 + 1e-12):
        raise PreconditionError(f"r = {r:.3g} exceeds epsilon / sqrt(lam)")
    sphere = u.manifold is Manifold.SPHERE2
    ch = (chart or "north") if sphere else None
    scale = max(u.sup_bound(), 1e-300)
    if abs(float(u(np.asarray([O]), ch)[0])) >= eta * scale:
        raise PreconditionError("u(O) is not a zero")
    return O, sphere, ch


def _chart_radius(r, O, sphere):
    return geodesic_to_chart_radius(r, O) if sphere else r


def vanishing_index(u: Eigenfunction, O, r: float, chart=None, samples: int = 1024,
                    seed: int = 0) -> int:
    """``ceil(log2(sup_{B_{r/2}}|u| / sup_{B_{r/4}}|u|))``, at least 1."""
    sphere = u.manifold is Manifold.SPHERE2
    ch = (chart or "north") if sphere else None
    kind = ch if sphere else "torus"
    r2 = _chart_radius(r / 2, O, sphere)
    r4 = _chart_radius(r / 4, O, sphere)
    big = sup_abs(u, BallSpec(O, r2, kind), samples, seed, chart=ch)
    small = sup_abs(u, BallSpec(O, r4, kind), samples, seed, chart=ch)
    if small <= 0:
        raise PreconditionError("u vanishes identically near O")
    return max(1, int(math.ceil(math.log2(big / small) - 1e-9)))


def local_lower_bound_check(u: Eigenfunction, O, r: float, epsilon: float = constants.EPSILON,
                            eta: float = 1e-6, resolution: int = 512, chart=None,
                            samples: int = 1024) -> LowerBoundReport:
    """Nodal measure in ``B_{r/2}(O)`` against ``r^{n-1} N^{2-n}`` (``n = 2`` here).

    ``N`` is the vanishing index from sup ratios at ``r/2`` and ``r/4``;
    ``N < 4`` makes the lemma vacuous.  The reported constant is
    ``measured / (r^{n-1} N^{2-n})``.
    """
    O, sphere, ch = _local_setup(u, O, r, epsilon, eta, chart)
    if u.dim != 2:
        raise PreconditionError("local_lower_bound_check is implemented for surfaces")
    N = vanishing_index(u, O, r, ch, samples)
    rc = _chart_radius(r / 2, O, sphere)
    nm = extract_nodal_2d(u, BallSpec(O, rc, ch or "torus"), resolution, chart=ch, check=False)
    n = 2
    bound = r ** (n - 1) * N ** (2 - n)
    c = nm.total / bound
    vacuous = N < 4
    finding = ""
    if not vacuous and nm.total == 0.0:
        finding = "empty nodal set in B_{r/2} with N >= 4"
    return LowerBoundReport(N, nm.total, bound, c, vacuous, vacuous or c > 0, finding)


@dataclass(frozen=True)
class SignLayer:
    k: int
    positive_center: tuple
    negative_center: tuple
    radius: float
    positive_ok: bool
    negative_ok: bool


@dataclass(frozen=True)
class SignBallReport:
    N: int
    radii: tuple
    m_plus: tuple
    m_minus: tuple
    layers: tuple
    qualifying: tuple
    weak_max_consistent: bool
    holds: bool
    finding: str = ""

    @property
    def successful(self) -> int:
        return sum(1 for L in self.layers if L.positive_ok and L.negative_ok)


def sign_ball_search(u: Eigenfunction, O, r: float, N: int, C2: float = constants.C2,
                     c1: float = 1.0 / 32.0, samples: int = 512, verify_samples: int = 256,
                     epsilon: float = constants.EPSILON, eta: float = 1e-6, chart=None,
                     seed: int = 0) -> SignBallReport:
    """Layers ``k`` between spheres ``S_k`` and ``S_{k+1}`` where both one-sided
    maxima grow by at most ``128 C2``, each with a positive and a negative ball
    of radius ``c1 r / N`` centered at the extremal points of ``S_k``.
    """
    O, sphere, ch = _local_setup(u, O, r, epsilon, eta, chart)
    if N < 4:
        raise PreconditionError("N must be at least 4")
    kind = ch if sphere else "torus"
    radii = [r * (3.0 / 8.0 + j / (8.0 * N)) for j in range(N + 1)]
    mp, mm, pp, pm = [], [], [], []
    for j, rj in enumerate(radii):
        B = BallSpec(O, _chart_radius(rj, O, sphere), kind)
        vmax, xmax = boundary_extremum(u, B, samples, seed + j, "max", chart=ch)
        vmin, xmin = boundary_extremum(u, B, samples, seed + j, "min", chart=ch)
        mp.append(vmax)
        mm.append(vmin)
        pp.append(xmax)
        pm.append(xmin)
    bound = 128.0 * C2
    qualifying = tuple(k for k in range(N)
                       if mp[k] > 0 and mm[k] < 0
                       and mp[k + 1] <= bound * mp[k] and abs(mm[k + 1]) <= bound * abs(mm[k]))
    rho = _chart_radius(c1 * r / N, O, sphere)
    layers = []
    for k in qualifying:
        pos = ball_sample(BallSpec(tuple(pp[k]), rho, kind), verify_samples, seed)
        neg = ball_sample(BallSpec(tuple(pm[k]), rho, kind), verify_samples, seed)
        layers.append(SignLayer(k, tuple(pp[k]), tuple(pm[k]), c1 * r / N,
                                bool(np.all(u(pos, ch) > 0)), bool(np.all(u(neg, ch) < 0))))
    weak = all(mp[j] <= 2 * mp[j + 1] for j in range(N) if mp[j] > 0)
    ok = sum(1 for L in layers if L.positive_ok and L.negative_ok)
    holds = ok >= N / 2
    finding = "" if holds else f"only {ok} sign layers for N = {N}"
    return SignBallReport(N, tuple(radii), tuple(mp), tuple(mm), tuple(layers), qualifying,
                          weak, holds, finding)


__all__ = [
    "NodalMeasure", "marching_squares", "clip_segments_to_disc", "extract_nodal_2d",
    "extract_nodal_3d", "partition_areas", "density_radius", "vanishing_index",
    "local_lower_bound_check", "sign_ball_search", "LowerBoundReport", "SignBallReport",
]
