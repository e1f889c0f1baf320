"""Charts, cubes, balls and subdivision on the model manifolds.

Tori use one global periodic chart (coordinates in R^d, functions are
2*pi periodic), so every cube fits.  The round sphere is covered by two
stereographic caps, ``"north"`` (projection from the south pole) and
``"south"`` (projection from the north pole).  Each cap chart is the disc
``|w| <= CAP_RADIUS``; the caps overlap in ``1/CAP_RADIUS <= |w| <= CAP_RADIUS``.
"""
from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import qmc

from .errors import ChartError, PreconditionError

CAP_RADIUS = 1.5
TWO_PI = 2.0 * math.pi


class Manifold(enum.Enum):
    TORUS2 = "Torus2"
    SPHERE2 = "Sphere2"
    TORUS3 = "Torus3"

    @property
    def dim(self) -> int:
        return 3 if self is Manifold.TORUS3 else 2

    @property
    def is_torus(self) -> bool:
        return self is not Manifold.SPHERE2

    @property
    def volume(self) -> float:
        if self is Manifold.SPHERE2:
            return 4.0 * math.pi
        return TWO_PI ** self.dim

    @property
    def default_chart(self) -> str:
        return "north" if self is Manifold.SPHERE2 else "torus"

    @classmethod
    def parse(cls, value) -> "Manifold":
        if isinstance(value, cls):
            return value
        for m in cls:
            if value.lower() in (m.value.lower(), m.name.lower()):
                return m
        raise ValueError(f"unknown manifold {value!r}")


@dataclass(frozen=True)
class CubeSpec:
    """Axis-aligned cube ``center +- half_side`` in a chart."""

    center: tuple
    half_side: float

    def __post_init__(self):
        object.__setattr__(self, "center", tuple(float(c) for c in self.center))
        object.__setattr__(self, "half_side", float(self.half_side))
        if not self.half_side > 0:
            raise PreconditionError(f"half_side must be positive, got {self.half_side}")
        if not 1 <= len(self.center) <= 4:
            raise PreconditionError("cube dimension must be between 1 and 4")

    @property
    def dim(self) -> int:
        return len(self.center)

    @property
    def side(self) -> float:
        return 2.0 * self.half_side

    @property
    def volume(self) -> float:
        return self.side ** self.dim

    @property
    def lower(self) -> np.ndarray:
        return np.asarray(self.center) - self.half_side

    @property
    def upper(self) -> np.ndarray:
        return np.asarray(self.center) + self.half_side

    def contains(self, other: "CubeSpec", rtol: float = 1e-12) -> bool:
        """True if ``other`` lies inside this cube (closed, with slack ``rtol``)."""
        slack = rtol * max(self.half_side, other.half_side)
        return bool(np.all(other.lower >= self.lower - slack)
                    and np.all(other.upper <= self.upper + slack))

    def contains_point(self, p) -> bool:
        p = np.asarray(p, dtype=float)
        return bool(np.all(np.abs(p - np.asarray(self.center)) <= self.half_side))

    def inscribed_in(self, ball: "BallSpec") -> "CubeSpec":
        return CubeSpec(ball.center, ball.radius / math.sqrt(len(ball.center)))


@dataclass(frozen=True)
class BallSpec:
    """Euclidean ball in chart coordinates.

    On the tori the chart metric is the manifold metric.  On the sphere the
    chart is conformal, with length factor ``2 / (1 + |w|^2)``.
    """

    center: tuple
    radius: float
    chart: str = "torus"

    def __post_init__(self):
        object.__setattr__(self, "center", tuple(float(c) for c in self.center))
        object.__setattr__(self, "radius", float(self.radius))
        if not self.radius > 0:
            raise PreconditionError(f"radius must be positive, got {self.radius}")
        if self.chart not in ("torus", "north", "south", "flat"):
            raise PreconditionError(f"unknown chart {self.chart!r}")

    @property
    def dim(self) -> int:
        return len(self.center)

    def scaled(self, s: float) -> "BallSpec":
        return BallSpec(self.center, self.radius * s, self.chart)


def subdivide(q: CubeSpec, m: int) -> list:
    """Split ``q`` into ``m**dim`` congruent subcubes, lexicographic by grid index."""
    if m < 1:
        raise PreconditionError("m must be >= 1")
    h = q.half_side / m
    lo = q.lower
    offsets = [lo[a] + h * (2 * np.arange(m) + 1) for a in range(q.dim)]
    return [CubeSpec(tuple(offsets[a][i] for a, i in enumerate(idx)), h)
            for idx in itertools.product(range(m), repeat=q.dim)]


def subcube_centers(q: CubeSpec, m: int) -> np.ndarray:
    """Array form of :func:`subdivide`: ``(m**dim, dim)`` centers, same order."""
    h = q.half_side / m
    axes = [q.lower[a] + h * (2 * np.arange(m) + 1) for a in range(q.dim)]
    grids = np.meshgrid(*axes, indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=-1)


def dilate(q: CubeSpec, s: float) -> CubeSpec:
    """Homothety of ``q`` about its center with coefficient ``s``."""
    if not s > 0:
        raise PreconditionError("dilation factor must be positive")
    return CubeSpec(q.center, q.half_side * s)


def lift_cube(q: CubeSpec, t_center: float = 0.0) -> CubeSpec:
    """Product cube ``q x I`` with ``I`` of the same side, centered at ``t_center``."""
    return CubeSpec(q.center + (t_center,), q.half_side)


# --- sphere charts -------------------------------------------------------

def chart_to_xyz(w, chart: str = "north") -> np.ndarray:
    """Inverse stereographic projection of chart points ``(..., 2)``.

    Works for complex input as well (used for complex-step derivatives).
    """
    w = np.asarray(w)
    a, b = w[..., 0], w[..., 1]
    r2 = a * a + b * b
    d = 1.0 + r2
    z = (1.0 - r2) / d
    if chart == "south":
        z = -z
    elif chart != "north":
        raise ChartError(f"{chart!r} is not a sphere chart")
    return np.stack([2.0 * a / d, 2.0 * b / d, z], axis=-1)


def xyz_to_chart(xyz, chart: str = "north") -> np.ndarray:
    xyz = np.asarray(xyz, dtype=float)
    x, y, z = xyz[..., 0], xyz[..., 1], xyz[..., 2]
    denom = 1.0 + z if chart == "north" else 1.0 - z
    return np.stack([x / denom, y / denom], axis=-1)


def conformal_factor(w) -> np.ndarray:
    """Length scale of the stereographic chart: ``ds = factor * |dw|``."""
    w = np.asarray(w, dtype=float)
    return 2.0 / (1.0 + np.sum(w * w, axis=-1))


def chart_distortion(manifold: Manifold) -> tuple:
    """(min, max) of the chart length factor over the chart domain."""
    if manifold.is_torus:
        return (1.0, 1.0)
    return (2.0 / (1.0 + CAP_RADIUS ** 2), 2.0)


def check_cube_in_chart(manifold, q: CubeSpec, chart: str | None = None) -> None:
    if manifold is None or Manifold.parse(manifold).is_torus:
        return
    r = float(np.max(np.linalg.norm(_cube_corners(q)[:, :2], axis=-1)))
    if r > CAP_RADIUS * (1 + 1e-12):
        raise ChartError(f"cube reaches |w| = {r:.4g} > {CAP_RADIUS}")


def check_ball_in_chart(manifold, b: BallSpec) -> None:
    if manifold is None or Manifold.parse(manifold).is_torus or b.chart in ("torus", "flat"):
        return
    r = math.hypot(*b.center[:2]) + b.radius
    if r > CAP_RADIUS * (1 + 1e-12):
        raise ChartError(f"ball reaches |w| = {r:.4g} > {CAP_RADIUS}")


def _cube_corners(q: CubeSpec) -> np.ndarray:
    signs = np.array(list(itertools.product((-1.0, 1.0), repeat=q.dim)))
    return np.asarray(q.center) + q.half_side * signs


def geodesic_to_chart_radius(r: float, center=(0.0, 0.0)) -> float:
    """Chart radius of a small geodesic ball on the sphere.

    Exact at the chart origin (``tan(r/2)``); elsewhere first order in ``r``.
    """
    if np.allclose(center, 0.0):
        return math.tan(r / 2.0)
    return r / float(conformal_factor(np.asarray(center)))


# --- sampling --------------------------------------------------------------

def sphere_sample(b: BallSpec, count: int, seed: int = 0, manifold=None) -> np.ndarray:
    """Deterministic quasi-uniform points on the boundary sphere of ``b``.

    2D: equally spaced angles with a seeded rotation, so doubling ``count``
    halves the largest gap.  Higher dimensions: scrambled Sobol points pushed
    through the inverse normal CDF and normalised.
    """
    if count < 1:
        raise PreconditionError("count must be >= 1")
    check_ball_in_chart(manifold, b)
    c = np.asarray(b.center)
    rng = np.random.default_rng(seed)
    if b.dim == 1:
        dirs = np.array([[-1.0], [1.0]])[: max(1, min(count, 2))]
    elif b.dim == 2:
        phase = rng.uniform(0.0, TWO_PI)
        ang = phase + TWO_PI * np.arange(count) / count
        dirs = np.stack([np.cos(ang), np.sin(ang)], axis=-1)
    else:
        dirs = _sobol_directions(b.dim, count, seed)
    return c + b.radius * dirs


def _sobol_directions(dim: int, count: int, seed: int) -> np.ndarray:
    from scipy.special import ndtri

    n = 1 << max(0, math.ceil(math.log2(count)))
    u = qmc.Sobol(dim, scramble=True, seed=seed).random(n)[:count]
    g = ndtri(np.clip(u, 1e-12, 1 - 1e-12))
    return g / np.linalg.norm(g, axis=-1, keepdims=True)


def ball_sample(b: BallSpec, count: int, seed: int = 0) -> np.ndarray:
    """Quasi-uniform points in the closed ball (Sobol prefix, so nested in ``count``).

    The center is always the first point.
    """
    d = b.dim
    n = 1 << max(1, math.ceil(math.log2(max(2, count))))
    pts = [np.zeros((1, d))]
    got = 1
    sob = qmc.Sobol(d, scramble=True, seed=seed)
    while got < count:
        u = 2.0 * sob.random(n) - 1.0
        u = u[np.sum(u * u, axis=-1) <= 1.0]
        pts.append(u)
        got += len(u)
    return np.asarray(b.center) + b.radius * np.concatenate(pts)[:count]


def cube_sample(q: CubeSpec, count: int, seed: int = 0) -> np.ndarray:
    d = q.dim
    n = 1 << max(1, math.ceil(math.log2(max(2, count))))
    u = 2.0 * qmc.Sobol(d, scramble=True, seed=seed).random(n)[: count - 1] - 1.0
    u = np.concatenate([np.zeros((1, d)), u])
    return np.asarray(q.center) + q.half_side * u
