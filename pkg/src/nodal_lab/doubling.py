"""Doubling indices of functions on cubes.

``N(f, q)`` is defined by ``int_{lq} |f|^2 = 2^{2N} int_q |f|^2`` where ``lq``
is the homothetic copy of ``q`` with coefficient ``l`` (odd, ``l > 2 sqrt(dim)``).
``tilde_index`` approximates ``sup N(f, c)`` over subcubes ``c`` of ``q`` by
the dyadic subcubes down to a fixed depth.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import constants
from .eigen import Eigenfunction, LiftedFunction, TrigPolynomial
from .errors import MassUnderflowError, PreconditionError
from .geometry import (BallSpec, CubeSpec, check_ball_in_chart, check_cube_in_chart,
                       dilate, subcube_centers, subdivide)
from .quad import MASS_FLOOR, QuadratureSpec, exact_mass_many, integrate_sq, sup_abs

CONVERGENCE_TOL = 1e-8


@dataclass(frozen=True)
class DoublingParams:
    l: int = 5
    quadrature: QuadratureSpec = field(default_factory=QuadratureSpec)
    tilde_depth: int = 3
    A: int = 16
    C0: float = constants.C0
    C7: float = constants.C7
    tau: float = 1e-3
    check_convergence: bool = True

    def __post_init__(self):
        if self.l < 1 or self.l % 2 == 0:
            raise PreconditionError("l must be a positive odd integer")
        if self.tilde_depth < 1:
            raise PreconditionError("tilde_depth must be >= 1")

    def validate_dim(self, dim: int) -> None:
        if not self.l > 2.0 * math.sqrt(dim):
            raise PreconditionError(f"l = {self.l} must exceed 2 sqrt({dim})")

    def with_quadrature(self, **kw) -> "DoublingParams":
        return replace(self, quadrature=replace(self.quadrature, **kw))


@dataclass(frozen=True)
class DoublingRecord:
    cube: CubeSpec
    N: float
    mass_inner: float
    mass_outer: float
    converged: bool
    gap: float = 0.0


def _frequency(f) -> float:
    if isinstance(f, (Eigenfunction, LiftedFunction)):
        return math.sqrt(f.lam)
    if isinstance(f, TrigPolynomial):
        return float(np.max(np.linalg.norm(f.freqs, axis=1))) if len(f.freqs) else 0.0
    return float(getattr(f, "frequency", 0.0))


def cube_mass(f, q: CubeSpec, spec: QuadratureSpec, chart=None) -> float:
    """``int_q |f|^2`` with the resolution rule applied.

    Lifted functions factorise: (base mass) x (closed-form t integral).
    """
    if spec.kind == "exact":
        return float(exact_mass_many(f, np.asarray([q.center]), q.half_side)[0])
    spec = spec.resolved(_frequency(f), q.half_side)
    if isinstance(f, LiftedFunction):
        base = CubeSpec(q.center[:-1], q.half_side)
        return integrate_sq(f.base, base, spec, chart) * f.t_mass(q.center[-1], q.half_side)
    return integrate_sq(f, q, spec, chart)


def _mass_with_gap(f, q, spec, check, chart):
    v = cube_mass(f, q, spec, chart)
    if not check or spec.kind == "exact":
        return v, 0.0
    v2 = cube_mass(f, q, spec.refined(), chart)
    return v2, abs(v2 - v) / max(abs(v2), MASS_FLOOR)


def _index(inner, outer):
    if inner < MASS_FLOOR:
        raise MassUnderflowError(f"mass {inner:.3g} on cube is below the floor guard")
    return 0.5 * math.log2(outer / inner)


def doubling_index(f, q: CubeSpec, params: DoublingParams = DoublingParams(),
                   manifold=None, chart=None) -> DoublingRecord:
    """Doubling index ``N(f, q)`` with its masses and a convergence flag.

    For a lift ``h = u e^{sqrt(lam) t}`` the index splits exactly into the base
    index plus a closed-form t term; masses are then reported for the base
    cube, since the full product masses overflow on large cubes.
    """
    params.validate_dim(q.dim)
    lq = dilate(q, params.l)
    if manifold is not None:
        check_cube_in_chart(manifold, lq, chart)
    if isinstance(f, LiftedFunction):
        base = doubling_index(f.base, CubeSpec(q.center[:-1], q.half_side), params, chart=chart)
        n = base.N + _lift_t_index(f, q.half_side, params.l)
        return DoublingRecord(q, n, base.mass_inner, base.mass_outer, base.converged, base.gap)
    inner, g1 = _mass_with_gap(f, q, params.quadrature, params.check_convergence, chart)
    outer, g2 = _mass_with_gap(f, lq, params.quadrature, params.check_convergence, chart)
    n = _index(inner, outer)
    gap = max(g1, g2)
    return DoublingRecord(q, n, inner, outer, gap <= CONVERGENCE_TOL, gap)


def doubling_indices(f, centers, half_side: float, params: DoublingParams = DoublingParams(),
                     chart=None) -> np.ndarray:
    """Doubling indices of many equal cubes.  Vectorised when quadrature is exact."""
    centers = np.atleast_2d(np.asarray(centers, dtype=float))
    params.validate_dim(centers.shape[1])
    if isinstance(f, LiftedFunction):
        base, inv = np.unique(centers[:, :-1], axis=0, return_inverse=True)
        nb = _base_indices(f.base, base, half_side, params, chart)
        return nb[np.ravel(inv)] + _lift_t_index(f, half_side, params.l)
    return _base_indices(f, centers, half_side, params, chart)


def _base_indices(f, centers, half_side, params, chart):
    if params.quadrature.kind == "exact":
        inner = exact_mass_many(f, centers, half_side)
        outer = exact_mass_many(f, centers, half_side * params.l)
        if np.any(inner < MASS_FLOOR):
            raise MassUnderflowError("mass below the floor guard on some cube")
        return 0.5 * np.log2(outer / inner)
    return np.array([doubling_index(f, CubeSpec(c, half_side), params, chart=chart).N
                     for c in centers])


def tilde_index(f, q: CubeSpec, params: DoublingParams = DoublingParams(),
                manifold=None, chart=None, return_cube: bool = False):
    """Max of ``N(f, c)`` over ``q`` and its dyadic subcubes down to ``tilde_depth``.

    A lower bound for the supremum over all subcubes; nondecreasing in depth.
    """
    params.validate_dim(q.dim)
    if manifold is not None:
        check_cube_in_chart(manifold, dilate(q, params.l), chart)
    best, best_cube = -math.inf, q
    for depth in range(params.tilde_depth + 1):
        m = 1 << depth
        centers = subcube_centers(q, m)
        h = q.half_side / m
        vals = doubling_indices(f, centers, h, params, chart)
        i = int(np.argmax(vals))
        if vals[i] > best:
            best, best_cube = float(vals[i]), CubeSpec(centers[i], h)
    return (best, best_cube) if return_cube else best


def tilde_indices(f, centers, half_side: float, params: DoublingParams = DoublingParams(),
                  chart=None) -> np.ndarray:
    """:func:`tilde_index` for many equal cubes at once."""
    centers = np.atleast_2d(np.asarray(centers, dtype=float))
    d = centers.shape[1]
    params.validate_dim(d)
    best = np.full(len(centers), -np.inf)
    for depth in range(params.tilde_depth + 1):
        m = 1 << depth
        offs = subcube_centers(CubeSpec((0.0,) * d, half_side), m)
        pts = (centers[:, None, :] + offs[None, :, :]).reshape(-1, d)
        vals = doubling_indices(f, pts, half_side / m, params, chart).reshape(len(centers), -1)
        best = np.maximum(best, vals.max(axis=1))
    return best


def _lift_t_index(h: LiftedFunction, half: float, l: int) -> float:
    s = h.base.sqrt_lam
    # 1/2 log2( sinh(2 s l a) / sinh(2 s a) ), evaluated stably
    x, y = 2 * s * l * half, 2 * s * half
    log_ratio = (x - y) + math.log1p(-math.exp(-2 * x)) - math.log1p(-math.exp(-2 * y))
    return 0.5 * log_ratio / math.log(2)


def lift_index_offset(h: LiftedFunction, half: float, l: int = 5) -> float:
    """``N(h, q x I) - N(u, q)`` for ``|I| = 2 half``: independent of position."""
    return _lift_t_index(h, half, l)


# --- Lemma-level checks ----------------------------------------------------------


@dataclass(frozen=True)
class SubdivisionReport:
    N0: float
    threshold: float
    lhs: float
    rhs: float
    vacuous: bool
    holds: bool
    holds_provable: bool
    count: int

    @property
    def margin(self) -> float:
        return self.lhs - self.rhs


def subdivision_threshold(dim: int, l: int) -> float:
    return 2.0 * dim * math.log(l) / math.log(2.0)


def verify_subdivision_lemma(f, Q: CubeSpec, K: int, params: DoublingParams = DoublingParams(),
                             chart=None) -> SubdivisionReport:
    """Check ``N(f, Q/l) >= K N0`` where ``N0`` is the least index over the
    ``(Kl)^dim`` grid cubes ``q`` with ``lq`` inside ``Q``.

    Applies to any square-integrable ``f``.  Also reports the weaker bound
    ``N(f, Q/l) >= (3/4) K N0`` that follows from the covering argument with
    ``K`` shells of width ``(l-1)/2`` grid cells.
    """
    if K < 1:
        raise PreconditionError("K must be >= 1")
    l, d = params.l, Q.dim
    params.validate_dim(d)
    m = K * l
    l0 = (l - 1) // 2
    centers = subcube_centers(Q, m)
    grid = np.stack(np.meshgrid(*[np.arange(m)] * d, indexing="ij"), axis=-1).reshape(-1, d)
    inside = np.all((grid >= l0) & (grid < m - l0), axis=1)
    idx = doubling_indices(f, centers[inside], Q.half_side / m, params, chart)
    n0 = float(np.min(idx))
    thr = subdivision_threshold(d, l)
    lhs = doubling_index(f, dilate(Q, 1.0 / l), params, chart=chart).N
    rhs = K * n0
    vacuous = n0 < thr
    tol = params.tau * max(abs(rhs), 1.0)
    holds = vacuous or lhs >= rhs - tol
    holds_provable = vacuous or lhs >= 0.75 * rhs - tol
    return SubdivisionReport(n0, thr, lhs, rhs, vacuous, holds, holds_provable, int(inside.sum()))


@dataclass(frozen=True)
class RatioReport:
    ratio: float
    bound: float
    holds: bool
    lhs: float = math.nan
    rhs: float = math.nan


def check_monotonicity(f, q1: CubeSpec, q: CubeSpec, params: DoublingParams = DoublingParams(),
                       chart=None) -> RatioReport:
    """``N(f, q1) / max(N(f, q), 0.1)`` against ``C0`` when ``A q1`` lies in ``q``."""
    if not q.contains(dilate(q1, params.A)):
        raise PreconditionError("A*q1 is not contained in q")
    n1 = doubling_index(f, q1, params, chart=chart).N
    n = doubling_index(f, q, params, chart=chart).N
    ratio = n1 / max(n, 0.1)
    return RatioReport(ratio, params.C0, ratio <= params.C0, n1, n)


def check_linfty_estimate(h, B: BallSpec, params: DoublingParams = DoublingParams(),
                          samples: int = 512, seed: int = 0, manifold=None) -> RatioReport:
    """Implied constant of ``sup_{4B/3}|h| <= C7 2^{N(h,q)} sup_B |h|``, ``q`` inscribed in ``B``."""
    if manifold is not None:
        check_ball_in_chart(manifold, B.scaled(2.0))
    chart = B.chart if B.chart in ("north", "south") else None
    q = CubeSpec(B.center, B.radius / math.sqrt(B.dim))
    n = doubling_index(h, q, params, chart=chart).N
    big = sup_abs(h, B.scaled(4.0 / 3.0), samples, seed, chart=chart)
    small = sup_abs(h, B, samples, seed, chart=chart)
    implied = big / (2.0 ** n * small)
    return RatioReport(implied, params.C7, implied <= params.C7, big, small)


def subdivide_inside(Q: CubeSpec, m: int, l: int) -> list:
    """Grid cubes ``q`` of ``subdivide(Q, m)`` whose dilate ``lq`` stays in ``Q``."""
    return [q for q in subdivide(Q, m) if Q.contains(dilate(q, l))]
