"""Integrals of |f|^2 over cubes and sampled extrema over balls, cubes and spheres."""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np

from .eigen import Eigenfunction, LiftedFunction, TrigPolynomial
from .errors import PreconditionError, QuadratureError
from .geometry import BallSpec, CubeSpec, ball_sample, cube_sample, sphere_sample

KINDS = ("tensorGauss", "midpointComposite", "exact")
MASS_FLOOR = 1e-300
MAX_POINTS_PER_CHUNK = 1 << 20
POINTS_PER_OSCILLATION = 8


@dataclass(frozen=True)
class QuadratureSpec:
    """Tensor rule: ``order`` points per axis on each of ``panels`` subintervals.

    ``kind="exact"`` integrates trigonometric polynomials (torus eigenfunctions
    and their lifts) in closed form and ignores ``order``/``panels``.
    """

    order: int = 16
    kind: str = "tensorGauss"
    panels: int = 1

    def __post_init__(self):
        if self.kind not in KINDS:
            raise PreconditionError(f"unknown quadrature kind {self.kind!r}")
        if self.kind == "tensorGauss" and self.order < 2:
            raise PreconditionError("tensorGauss needs order >= 2")
        if self.order < 1 or self.panels < 1:
            raise PreconditionError("order and panels must be positive")

    def refined(self) -> "QuadratureSpec":
        """Same rule with twice the points per axis."""
        return replace(self, order=2 * self.order)

    def resolved(self, frequency: float, half_side: float) -> "QuadratureSpec":
        """Add panels so each oscillation of ``|f|^2`` gets enough points.

        ``frequency`` is that of ``f``; ``|f|^2`` oscillates at twice it.
        """
        if self.kind == "exact" or frequency <= 0:
            return self
        oscillations = 2.0 * frequency * 2.0 * half_side / (2.0 * math.pi)
        need = math.ceil(POINTS_PER_OSCILLATION * oscillations)
        panels = max(self.panels, math.ceil(need / self.order))
        return replace(self, panels=panels)


@lru_cache(maxsize=64)
def _rule_1d(order: int, kind: str, panels: int):
    """Nodes and weights on [-1, 1]."""
    edges = np.linspace(-1.0, 1.0, panels + 1)
    half = 1.0 / panels
    if kind == "tensorGauss":
        x, w = np.polynomial.legendre.leggauss(order)
    else:
        x = -1.0 + (2.0 * np.arange(order) + 1.0) / order
        w = np.full(order, 2.0 / order)
    mids = 0.5 * (edges[:-1] + edges[1:])
    nodes = (mids[:, None] + half * x[None, :]).ravel()
    weights = np.tile(w * half, panels)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def _as_callable(f, chart):
    if chart is not None and isinstance(f, (Eigenfunction, LiftedFunction)):
        return lambda p: f(p, chart)
    return f


def integrate_sq(f, q: CubeSpec, spec: QuadratureSpec = QuadratureSpec(), chart=None) -> float:
    """Approximate ``int_q |f|^2`` with a fixed tensor rule (or exactly).

    The summation order is fixed, so results are bitwise reproducible.
    """
    if spec.kind == "exact":
        return exact_mass(f, q)
    g = _as_callable(f, chart)
    x1, w1 = _rule_1d(spec.order, spec.kind, spec.panels)
    d = q.dim
    c = np.asarray(q.center)
    a = q.half_side
    axes = [c[i] + a * x1 for i in range(d)]
    n = len(x1)
    # iterate over slabs of the leading axis to bound memory
    rest = n ** (d - 1)
    slab = max(1, MAX_POINTS_PER_CHUNK // max(1, rest))
    w_rest = np.ones(1)
    for _ in range(d - 1):
        w_rest = np.multiply.outer(w_rest, w1).ravel()
    grids_rest = np.meshgrid(*axes[1:], indexing="ij") if d > 1 else []
    rest_pts = np.stack([gr.ravel() for gr in grids_rest], axis=-1) if d > 1 else np.empty((1, 0))
    total = 0.0
    for s in range(0, n, slab):
        x0 = axes[0][s:s + slab]
        pts = np.concatenate([np.repeat(x0, len(rest_pts))[:, None],
                              np.tile(rest_pts, (len(x0), 1))], axis=1)
        vals = np.asarray(g(pts), dtype=float)
        bad = ~np.isfinite(vals)
        if bad.any():
            p = pts[np.argmax(bad)]
            raise QuadratureError(f"non-finite value at {p.tolist()}", point=p)
        sq = (vals * vals).reshape(len(x0), -1)
        total += float(w1[s:s + slab] @ (sq @ w_rest))
    return total * a ** d


def exact_mass(f, q: CubeSpec) -> float:
    return float(exact_mass_many(f, np.asarray([q.center]), q.half_side)[0])


def exact_mass_many(f, centers, half_side) -> np.ndarray:
    """Closed-form ``int |f|^2`` over many equal cubes.

    Handles trigonometric polynomials, torus eigenfunctions, their lifts, and
    any object with its own ``mass_on_cubes(centers, half_side)`` method.
    """
    centers = np.atleast_2d(np.asarray(centers, dtype=float))
    if isinstance(f, TrigPolynomial) or hasattr(f, "mass_on_cubes"):
        return np.asarray(f.mass_on_cubes(centers, half_side), dtype=float)
    if isinstance(f, Eigenfunction):
        if not f.manifold.is_torus:
            raise PreconditionError("exact quadrature needs a torus eigenfunction")
        return f.trig.mass_on_cubes(centers, half_side)
    if isinstance(f, LiftedFunction):
        base = exact_mass_many(f.base, centers[:, :-1], half_side)
        s = f.base.sqrt_lam
        tm = np.exp(2 * s * centers[:, -1]) * math.sinh(2 * s * half_side) / s
        return base * tm
    raise PreconditionError(f"exact quadrature unsupported for {type(f).__name__}")


def convergence_gap(f, q: CubeSpec, spec: QuadratureSpec, chart=None) -> tuple:
    """(value, relative change when the rule is refined)."""
    v = integrate_sq(f, q, spec, chart)
    if spec.kind == "exact":
        return v, 0.0
    v2 = integrate_sq(f, q, spec.refined(), chart)
    return v2, abs(v2 - v) / max(abs(v2), MASS_FLOOR)


# --- sampled extrema -------------------------------------------------------------

def _score(vals, mode):
    if mode == "abs":
        return np.abs(vals)
    if mode == "max":
        return vals
    if mode == "min":
        return -vals
    raise PreconditionError(f"unknown mode {mode!r}")


def _checked(g, pts):
    vals = np.asarray(g(pts), dtype=float)
    bad = ~np.isfinite(vals)
    if bad.any():
        p = pts[np.argmax(bad)]
        raise QuadratureError(f"non-finite value at {p.tolist()}", point=p)
    return vals


def _refine(g, best_pt, best_val, mode, project, scale, dim, seed, rounds=6, cloud=48):
    rng = np.random.default_rng(seed + 7919)
    for _ in range(rounds):
        pts = project(best_pt + scale * rng.uniform(-1.0, 1.0, size=(cloud, dim)))
        vals = _checked(g, pts)
        sc = _score(vals, mode)
        i = int(np.argmax(sc))
        if sc[i] > _score(np.array([best_val]), mode)[0]:
            best_pt, best_val = pts[i], vals[i]
        scale *= 0.3
    return best_pt, best_val


def extremum(f, region, samples: int = 256, seed: int = 0, mode: str = "abs",
             refine: bool = True, chart=None):
    """Sampled extremum of ``f`` over a cube or closed ball.

    ``mode`` is ``"abs"`` (max |f|), ``"max"`` or ``"min"``.  Returns
    ``(value, point)``; for ``"abs"`` the value is ``|f|`` at the point.
    """
    if samples < 8:
        raise PreconditionError("need at least 8 samples")
    g = _as_callable(f, chart)
    if isinstance(region, BallSpec):
        pts = ball_sample(region, samples, seed)
        c, r = np.asarray(region.center), region.radius

        def project(p):
            v = p - c
            nrm = np.linalg.norm(v, axis=-1, keepdims=True)
            return np.where(nrm > r, c + v * (r / np.maximum(nrm, 1e-300)), p)

        size = r
    elif isinstance(region, CubeSpec):
        pts = cube_sample(region, samples, seed)
        lo, hi = region.lower, region.upper

        def project(p):
            return np.clip(p, lo, hi)

        size = region.half_side
    else:
        raise PreconditionError("region must be a CubeSpec or BallSpec")
    vals = _checked(g, pts)
    i = int(np.argmax(_score(vals, mode)))
    best_pt, best_val = pts[i], vals[i]
    if refine:
        d = pts.shape[1]
        scale = 2.0 * size * samples ** (-1.0 / d)
        best_pt, best_val = _refine(g, best_pt, best_val, mode, project, scale, d, seed)
    value = abs(best_val) if mode == "abs" else best_val
    return float(value), np.asarray(best_pt)


def sup_abs(f, region, samples: int = 256, seed: int = 0, refine: bool = True, chart=None) -> float:
    """``sup |f|`` over a cube or ball: quasi-uniform grid plus local refinement."""
    return extremum(f, region, samples, seed, "abs", refine, chart)[0]


def boundary_extremum(f, ball: BallSpec, samples: int = 256, seed: int = 0, mode: str = "abs",
                      refine: bool = True, chart=None):
    """Extremum of ``f`` over the boundary sphere of ``ball``; returns (value, point)."""
    if samples < 8:
        raise PreconditionError("need at least 8 samples")
    g = _as_callable(f, chart)
    c, r = np.asarray(ball.center), ball.radius
    pts = sphere_sample(ball, samples, seed)
    vals = _checked(g, pts)
    i = int(np.argmax(_score(vals, mode)))
    best_pt, best_val = pts[i], vals[i]
    if refine:
        def project(p):
            v = p - c
            return c + r * v / np.maximum(np.linalg.norm(v, axis=-1, keepdims=True), 1e-300)

        d = len(c)
        scale = 2.0 * r * samples ** (-1.0 / max(1, d - 1))
        best_pt, best_val = _refine(g, best_pt, best_val, mode, project, scale, d, seed)
    value = abs(best_val) if mode == "abs" else best_val
    return float(value), np.asarray(best_pt)


def boundary_max_abs(f, ball: BallSpec, samples: int = 256, seed: int = 0, chart=None) -> float:
    return boundary_extremum(f, ball, samples, seed, "abs", True, chart)[0]
