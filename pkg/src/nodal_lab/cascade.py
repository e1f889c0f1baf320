"""Iterated subdivision of a cube with doubling-index budgets.

Each step splits every cube into ``Y`` congruent subcubes.  The bookkeeping
says that after ``j`` steps at most ``C(j, k) (Y-1)^(j-k)`` cubes carry the
budget ``N0 / 2^k``; :func:`binomial_group_sizes` and :func:`lln_tail` give
the exact combinatorics, :func:`run_cascade` measures the real indices.
"""
from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .doubling import (DoublingParams, doubling_indices, lift_index_offset, tilde_index,
                       tilde_indices)
from .eigen import Eigenfunction, LiftedFunction, lift
from .errors import MassUnderflowError, PreconditionError, QuadratureError
from .geometry import CubeSpec, lift_cube, subcube_centers
from .quad import QuadratureSpec

SCHEMA_VERSION = 1


def binomial_group_sizes(j: int, Y: int) -> list:
    """``[C(j, k) (Y-1)^(j-k) for k = 0..j]``; sums to ``Y**j`` exactly."""
    if j < 0 or Y < 2:
        raise PreconditionError("need j >= 0 and Y >= 2")
    return [math.comb(j, k) * (Y - 1) ** (j - k) for k in range(j + 1)]


def _tail_threshold(j: int, Y: int) -> int:
    # smallest integer k with k >= j / (2Y)
    return -(-j // (2 * Y))


def lln_tail_exact(j: int, Y: int) -> Fraction:
    """``P(Binomial(j, 1/Y) >= j / (2Y))`` as an exact fraction."""
    if j < 1 or Y < 2:
        raise PreconditionError("need j >= 1 and Y >= 2")
    t = _tail_threshold(j, Y)
    below = sum(math.comb(j, k) * (Y - 1) ** (j - k) for k in range(t))
    total = Y ** j
    return Fraction(total - below, total)


def lln_tail(j: int, Y: int) -> float:
    return float(lln_tail_exact(j, Y))


def chernoff_horizon(Y: int) -> int:
    """Beyond this ``j`` the lower-tail bound ``exp(-j / (8Y)) <= 1/2`` certifies the tail."""
    return math.ceil(8 * Y * math.log(2))


def lln_j0(Y: int) -> int:
    """Smallest ``j0`` with ``lln_tail(j, Y) >= 1/2`` for every ``j >= j0``.

    Exact integer comparison for ``j`` up to :func:`chernoff_horizon`; the
    multiplicative Chernoff bound covers larger ``j``.
    """
    if Y < 2:
        raise PreconditionError("Y >= 2")
    last_bad = 0
    power = 1
    for j in range(1, chernoff_horizon(Y) + 1):
        power *= Y
        t = _tail_threshold(j, Y)
        below = sum(math.comb(j, k) * (Y - 1) ** (j - k) for k in range(t))
        if 2 * below > power:
            last_bad = j
    return last_bad + 1


def default_delta(Y: int) -> float:
    """Largest float ``delta`` with ``Y**delta < 2**(1/(4Y))``."""
    bound = 1.0 / (4.0 * Y * math.log2(Y))
    d = bound
    while Y ** d >= 2 ** (1.0 / (4 * Y)):
        d = math.nextafter(d, 0.0)
    return d


def covering_Y(l: int, K: int, A: int, dim: int) -> int:
    """Subcubes per step of the covering argument: ``(l K A)^dim``."""
    return (l * K * A) ** dim


def _perfect_root(Y: int, dim: int):
    m = round(Y ** (1.0 / dim))
    for c in (m - 1, m, m + 1):
        if c >= 1 and c ** dim == Y:
            return c
    return None


@dataclass(frozen=True)
class CascadeParams:
    Y: int = 16
    j: int = 3
    K: int = 5
    delta: float | None = None
    params: DoublingParams = field(default_factory=lambda: DoublingParams(
        quadrature=QuadratureSpec(kind="exact")))

    def __post_init__(self):
        if self.Y < 2 or self.j < 1:
            raise PreconditionError("need Y >= 2 and j >= 1")
        if not self.K > 2 * self.params.C0:
            raise PreconditionError(f"K = {self.K} must exceed 2 C0 = {2 * self.params.C0}")
        if self.delta is None:
            object.__setattr__(self, "delta", default_delta(self.Y))
        if not self.delta > 0:
            raise PreconditionError("delta must be positive")

    @property
    def B(self) -> int:
        return self.Y ** self.j


@dataclass
class CascadeReport:
    N0: float
    threshold: float
    dim: int
    Y: int
    j: int
    delta: float
    per_step_histogram: list
    theoretical_counts: list
    empirical_indices: np.ndarray
    empirical_tilde: np.ndarray
    final_centers: np.ndarray
    final_half_side: float
    good_fraction: float
    unresolved: int = 0
    over_budget: int = 0
    budget_dominates: list = field(default_factory=list)
    vacuous: bool = False

    def summary(self) -> dict:
        return {
            "schema": SCHEMA_VERSION, "kind": "cascade_summary", "N0": self.N0,
            "threshold": self.threshold, "dim": self.dim, "Y": self.Y, "j": self.j,
            "delta": self.delta, "good_fraction": self.good_fraction,
            "unresolved": self.unresolved, "over_budget": self.over_budget,
            "vacuous": self.vacuous,
            "per_step_histogram": self.per_step_histogram,
            "theoretical_counts": [str(c) for c in self.theoretical_counts],
            "budget_dominates": self.budget_dominates,
        }

    def records(self):
        for i, (c, n, nt) in enumerate(zip(self.final_centers, self.empirical_indices,
                                           self.empirical_tilde)):
            yield {"schema": SCHEMA_VERSION, "kind": "cascade_cube", "index": i,
                   "center": [float(x) for x in c], "half_side": self.final_half_side,
                   "N": None if not np.isfinite(n) else float(n),
                   "tilde_N": None if not np.isfinite(nt) else float(nt),
                   "good": bool(np.isfinite(n) and n <= self.threshold)}
        yield self.summary()

    def write(self, path) -> None:
        """Line-delimited JSON: one record per final cube, then the summary."""
        with open(path, "w") as fh:
            for rec in self.records():
                fh.write(json.dumps(rec, sort_keys=True) + "\n")


def _group_of(values, n0, steps):
    """Budget group ``k``: ``N0/2^(k+1) < v <= N0/2^k``; ``-1`` if over ``N0``."""
    out = np.empty(len(values), dtype=int)
    for i, v in enumerate(values):
        if not np.isfinite(v):
            out[i] = -2
        elif v > n0:
            out[i] = -1
        else:
            k = 0
            while k < steps and v <= n0 / 2 ** (k + 1):
                k += 1
            out[i] = k
    return out


def _indices_safe(f, centers, half, params, tilde, jobs):
    def work(chunk):
        out_n = np.full(len(chunk), np.nan)
        out_t = np.full(len(chunk), np.nan)
        try:
            out_n[:] = doubling_indices(f, chunk, half, params)
            if tilde:
                out_t[:] = tilde_indices(f, chunk, half, params)
            return out_n, out_t
        except (MassUnderflowError, QuadratureError):
            pass
        for i, c in enumerate(chunk):
            try:
                out_n[i] = doubling_indices(f, c[None, :], half, params)[0]
                if tilde:
                    out_t[i] = tilde_index(f, CubeSpec(c, half), params)
            except (MassUnderflowError, QuadratureError):
                continue
        return out_n, out_t

    size = max(1, len(centers) // max(1, 4 * jobs))
    chunks = [centers[s:s + size] for s in range(0, len(centers), size)]
    if jobs > 1:
        with ThreadPoolExecutor(jobs) as ex:
            parts = list(ex.map(work, chunks))
    else:
        parts = [work(c) for c in chunks]
    n = np.concatenate([p[0] for p in parts])
    t = np.concatenate([p[1] for p in parts])
    return n, t


def _cascade_geometry(f, Q: CubeSpec, Y: int):
    """Subdivision axes and a map from base centers to cubes of ``f``'s dimension."""
    if Q.dim == f.dim:
        m = _perfect_root(Y, Q.dim)
        if m is None:
            raise PreconditionError(f"Y = {Y} is not a perfect {Q.dim}-th power")
        return m, (lambda c, h: c), Q
    if isinstance(f, LiftedFunction) and Q.dim == f.dim - 1:
        # dimension-reduced mode: subdivide the base cube, lift each piece
        # with a centered t-interval of the same side.
        m = _perfect_root(Y, Q.dim)
        if m is None:
            raise PreconditionError(f"Y = {Y} is not a perfect {Q.dim}-th power")
        return m, (lambda c, h: np.concatenate([c, np.zeros((len(c), 1))], axis=1)), lift_cube(Q)
    raise PreconditionError("cube dimension does not match the function")


def run_cascade(f, Q: CubeSpec, cp: CascadeParams = CascadeParams(), jobs: int = 1,
                tilde: bool = True) -> CascadeReport:
    """Run ``cp.j`` subdivision steps and measure the indices of every cube.

    ``Q`` is either a cube of ``f``'s dimension (then ``Y = m^dim``) or, for a
    lift, a base cube (``Y = m^(dim-1)``; each piece ``q`` is measured as
    ``q x I`` with ``I`` centered at 0 and ``|I| = side(q)``).
    """
    m, to_cube, Qf = _cascade_geometry(f, Q, cp.Y)
    params = cp.params
    n0 = tilde_index(f, Qf, params)
    dim = Qf.dim
    threshold = max(n0 / cp.B ** cp.delta, 10.0 * dim)
    hist, theory, dominates = [], [], []
    emp_n = emp_t = None
    centers = None
    over = 0
    for s in range(1, cp.j + 1):
        per_axis = m ** s
        base_centers = subcube_centers(Q, per_axis)
        half = Q.half_side / per_axis
        centers = to_cube(base_centers, half)
        final = s == cp.j
        n, t = _indices_safe(f, centers, half, params, tilde, jobs)
        measure = t if tilde else n
        groups = _group_of(measure, n0, s)
        counts = [int(np.sum(groups == k)) for k in range(s + 1)]
        over_s = int(np.sum(groups == -1))
        hist.append({"step": s, "counts": counts, "over_budget": over_s,
                     "unresolved": int(np.sum(groups == -2))})
        th = binomial_group_sizes(s, cp.Y)
        theory.append(th)
        # at least sum_{i>=k} th[i] cubes should sit at budget N0/2^k or lower;
        # budgets stop halving at the floor 10*dim where subdivision says nothing
        floor = 10.0 * dim
        cum_emp = [int(np.sum(measure <= max(n0 / 2 ** k, floor) + params.tau * max(n0, 1.0)))
                   for k in range(s + 1)]
        cum_th = np.cumsum(th[::-1])[::-1]
        dominates.append(bool(all(int(e) >= int(c) for e, c in zip(cum_emp, cum_th))))
        if final:
            emp_n, emp_t, over = n, t, over_s
    good = np.isfinite(emp_n) & (emp_n <= threshold)
    resolved = np.isfinite(emp_n)
    frac = float(np.sum(good) / max(1, len(emp_n)))
    return CascadeReport(
        N0=n0, threshold=threshold, dim=dim, Y=cp.Y, j=cp.j, delta=cp.delta,
        per_step_histogram=hist, theoretical_counts=theory[-1],
        empirical_indices=emp_n, empirical_tilde=emp_t, final_centers=centers,
        final_half_side=Q.half_side / m ** cp.j, good_fraction=frac,
        unresolved=int(np.sum(~resolved)), over_budget=over, budget_dominates=dominates,
        vacuous=bool(n0 / cp.B ** cp.delta < 2 * dim))


def good_cube_fraction(u: Eigenfunction, Q: CubeSpec, B: int, threshold: float,
                       Y: int = 16, params: DoublingParams | None = None) -> float:
    """Fraction of the ``B`` final cubes of ``Q`` whose index of ``u`` is at most ``threshold``.

    The index is read off the lift: ``N(u, q) = N(h, q x I) - t-term``.
    """
    j = round(math.log(B) / math.log(Y))
    if Y ** j != B:
        raise PreconditionError(f"B = {B} is not a power of Y = {Y}")
    m = _perfect_root(Y, Q.dim)
    if m is None:
        raise PreconditionError(f"Y = {Y} is not a perfect {Q.dim}-th power")
    params = params or DoublingParams(quadrature=QuadratureSpec(kind="exact"))
    per_axis = m ** j
    half = Q.half_side / per_axis
    base = subcube_centers(Q, per_axis)
    if u.lam > 0:
        h = lift(u)
        cubes = np.concatenate([base, np.zeros((len(base), 1))], axis=1)
        n = doubling_indices(h, cubes, half, params) - lift_index_offset(h, half, params.l)
    else:
        n = doubling_indices(u, base, half, params)
    return float(np.mean(n <= threshold))
