"""Wavelength-scale estimates checked numerically.

At radius ``r < epsilon / sqrt(lam)`` an eigenfunction behaves like a
harmonic function: the weak maximum principle with factor 2, a gradient
bound, a one-sided sup bound, and (for the lift) a Harnack-type inequality.
Each check returns the implied constant so sweeps can calibrate it.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from . import constants
from .eigen import Eigenfunction, LiftedFunction, nearest_eigenvalue, riemannian_grad_norm, synth_random
from .errors import PreconditionError
from .geometry import TWO_PI, BallSpec, Manifold, conformal_factor
from .quad import boundary_extremum, extremum, sup_abs


@dataclass(frozen=True)
class WavescaleParams:
    epsilon: float = constants.EPSILON
    C1: float = constants.C1
    C2: float = constants.C2
    harnack_floor: float = constants.HARNACK_FLOOR
    boundary_samples: int = 256
    interior_samples: int = 512
    tau: float = 1e-3
    seed: int = 0
    # calibration sweeps probe epsilon beyond the validated range
    calibrating: bool = False

    def __post_init__(self):
        if not self.epsilon > 0:
            raise PreconditionError("epsilon must be positive")
        if not self.calibrating and self.epsilon > constants.EPSILON_MAX:
            raise PreconditionError(
                f"epsilon must lie in (0, {constants.EPSILON_MAX}], the validated range")
        if self.boundary_samples < 8 or self.interior_samples < 8:
            raise PreconditionError("need at least 8 samples")


@dataclass(frozen=True)
class CheckReport:
    name: str
    lhs: float
    rhs: float
    constant: float
    bound: float
    holds: bool
    meta: dict = field(default_factory=dict)

    def to_record(self) -> dict:
        return asdict(self)


def _chart(f, B: BallSpec):
    if f.manifold is Manifold.SPHERE2:
        if B.chart not in ("north", "south"):
            raise PreconditionError("sphere balls need a north or south chart")
        return B.chart
    return None


def _metric_radius(f, B: BallSpec) -> float:
    if f.manifold is Manifold.SPHERE2:
        return B.radius * float(conformal_factor(np.asarray(B.center[:2])))
    return B.radius


def _check_radius(f, B: BallSpec, p: WavescaleParams) -> float:
    r = _metric_radius(f, B)
    lam = f.lam
    if lam > 0 and not r < p.epsilon / math.sqrt(lam):
        raise PreconditionError(f"radius {r:.3g} is not below epsilon / sqrt(lam)")
    return r


def check_weak_max(u: Eigenfunction, B: BallSpec, p: WavescaleParams = WavescaleParams()) -> CheckReport:
    """``sup_B |u| <= 2 max_{dB} |u|``."""
    _check_radius(u, B, p)
    ch = _chart(u, B)
    lhs = sup_abs(u, B, p.interior_samples, p.seed, chart=ch)
    edge = boundary_extremum(u, B, p.boundary_samples, p.seed, "abs", chart=ch)[0]
    rhs = 2.0 * edge
    c = lhs / edge if edge > 0 else math.inf
    return CheckReport("weak_max", lhs, rhs, c, 2.0, lhs <= rhs * (1 + p.tau))


def check_gradient_bound(u: Eigenfunction, B: BallSpec,
                         p: WavescaleParams = WavescaleParams()) -> CheckReport:
    """Implied ``C1`` in ``sup_{B_{r/2}} |grad u| <= C1 max_{dB_r} |u| / r``."""
    r = _check_radius(u, B, p)
    ch = _chart(u, B)
    lhs = extremum(lambda x: riemannian_grad_norm(u, x, ch), B.scaled(0.5),
                   p.interior_samples, p.seed, "max")[0]
    edge = boundary_extremum(u, B, p.boundary_samples, p.seed, "abs", chart=ch)[0]
    rhs = edge / r
    if lhs == 0:
        c = 0.0
    else:
        c = lhs / rhs if rhs > 0 else math.inf
    return CheckReport("gradient", lhs, rhs, c, p.C1, c <= p.C1 * (1 + p.tau))


def check_sided_sup(u: Eigenfunction, B: BallSpec, p: WavescaleParams = WavescaleParams()) -> CheckReport:
    """Implied ``C2`` in ``sup_{B_{2r/3}} |u| <= C2 A`` with ``A = max_{dB} u``."""
    _check_radius(u, B, p)
    ch = _chart(u, B)
    if float(u(np.asarray([B.center]), ch)[0]) < 0:
        raise PreconditionError("u is negative at the center")
    A = boundary_extremum(u, B, p.boundary_samples, p.seed, "max", chart=ch)[0]
    lhs = sup_abs(u, B.scaled(2.0 / 3.0), p.interior_samples, p.seed, chart=ch)
    c = lhs / A if A > 0 else math.inf
    return CheckReport("sided_sup", lhs, A, c, p.C2, c <= p.C2 * (1 + p.tau), {"A": A})


def check_harnack_corollary(h: LiftedFunction, B: BallSpec,
                            p: WavescaleParams = WavescaleParams()) -> CheckReport:
    """Implied ``c`` in ``sup_B h >= c sup_{2B/3} |h|`` for ``h(center) >= 0``."""
    if B.dim != h.dim:
        raise PreconditionError("ball dimension must match the lift")
    ch = _chart(h, B)
    if float(h(np.asarray([B.center]), ch)[0]) < 0:
        raise PreconditionError("h is negative at the center")
    lhs = extremum(h, B, p.interior_samples, p.seed, "max", chart=ch)[0]
    rhs = sup_abs(h, B.scaled(2.0 / 3.0), p.interior_samples, p.seed, chart=ch)
    c = lhs / rhs if rhs > 0 else math.inf
    return CheckReport("harnack", lhs, rhs, c, p.harnack_floor,
                       c >= p.harnack_floor * (1 - p.tau))


# --- sweeps -----------------------------------------------------------------------

def random_balls(u: Eigenfunction, count: int, epsilon: float, seed: int = 0) -> list:
    """Balls of radius ``U(0.1, 1) * epsilon / sqrt(lam)`` at random centers.

    Radii stay strictly below ``epsilon / sqrt(lam)``.  Sphere balls are
    centered in the unit disc of a random cap chart.
    """
    rng = np.random.default_rng(seed)
    s = math.sqrt(max(u.lam, 1))
    out = []
    for _ in range(count):
        frac = rng.uniform(0.1, 0.999)
        if u.manifold is Manifold.SPHERE2:
            rho, th = math.sqrt(rng.uniform()), rng.uniform(0, TWO_PI)
            c = (rho * math.cos(th), rho * math.sin(th))
            chart = "north" if rng.uniform() < 0.5 else "south"
            rad = frac * epsilon / s / float(conformal_factor(np.asarray(c)))
            out.append(BallSpec(c, rad, chart))
        else:
            c = tuple(rng.uniform(0, TWO_PI, size=u.dim))
            out.append(BallSpec(c, frac * epsilon / s))
    return out


def weak_max_sweep(manifold, lams, balls_per_lam: int, epsilon: float, seed: int = 0,
                   p: WavescaleParams | None = None) -> list:
    """Weak-max reports for random eigenfunctions at each eigenvalue target."""
    manifold = Manifold.parse(manifold)
    p = p or WavescaleParams(epsilon=epsilon)
    if p.epsilon < epsilon:
        raise PreconditionError("ball radii would exceed the checked epsilon")
    reports = []
    for i, target in enumerate(lams):
        lam = nearest_eigenvalue(manifold, target)
        u = synth_random(manifold, lam, seed + i)
        for B in random_balls(u, balls_per_lam, epsilon, seed + 1000 + i):
            reports.append(check_weak_max(u, B, p))
    return reports


def calibrate_epsilon(manifold, lams, balls_per_lam: int = 20, lo: float = 0.1, hi: float = 3.0,
                      steps: int = 8, seed: int = 0) -> float:
    """Largest ``epsilon`` in ``[lo, hi]`` (by bisection) with a violation-free sweep.

    Returns ``lo`` itself only if the sweep at ``lo`` is clean; raises if not.
    """
    def clean(eps):
        p = WavescaleParams(epsilon=eps, boundary_samples=128, interior_samples=256,
                            calibrating=True)
        return all(r.holds for r in weak_max_sweep(manifold, lams, balls_per_lam, eps, seed, p))

    if not clean(lo):
        raise PreconditionError(f"weak maximum principle already fails at epsilon = {lo}")
    if clean(hi):
        return hi
    for _ in range(steps):
        mid = 0.5 * (lo + hi)
        if clean(mid):
            lo = mid
        else:
            hi = mid
    return lo
