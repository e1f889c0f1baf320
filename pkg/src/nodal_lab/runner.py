"""Experiment orchestration: configs, sweeps, exponent fits and the two pipelines.

Every measurement becomes one JSON record keyed by
``(manifold, lambda, member, quantity)``.  Record files are rewritten sorted by
key with fixed formatting, so a rerun with the same config reproduces the
file byte for byte and an interrupted sweep resumes where it stopped.
"""
from __future__ import annotations

import configparser
import csv
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import constants
from .cascade import CascadeParams
from .doubling import DoublingParams, doubling_indices, tilde_indices
from .eigen import (Eigenfunction, eigenvalue_list, lift, nearest_eigenvalue, product_mode,
                    synth_random)
from .errors import NodalLabError, PreconditionError
from .geometry import TWO_PI, CubeSpec, Manifold, subcube_centers
from .nodal import extract_nodal_2d, extract_nodal_3d, partition_areas
from .quad import QuadratureSpec
from .wavescale import WavescaleParams, weak_max_sweep

SCHEMA_VERSION = 1
SEED_ENV = "NODAL_LAB_SEED"


# --- configuration -----------------------------------------------------------------

@dataclass(frozen=True)
class ExperimentConfig:
    manifold: Manifold = Manifold.TORUS2
    lambda_min: float = 100.0
    lambda_max: float = 10000.0
    lambda_count: int = 20
    ensemble_size: int = 5
    seed: int = 0
    mode: str = "random"
    cells_per_sqrt_lambda: float = 16.0
    min_resolution: int = 256
    jobs: int = 1
    out_dir: str = "nodal_lab_out"
    doubling: DoublingParams = field(default_factory=lambda: DoublingParams(
        quadrature=QuadratureSpec(kind="exact")))
    cascade: CascadeParams = field(default_factory=CascadeParams)
    wavescale: WavescaleParams = field(default_factory=WavescaleParams)

    def __post_init__(self):
        object.__setattr__(self, "manifold", Manifold.parse(self.manifold))
        if self.lambda_min < 1:
            raise PreconditionError("lambda_min must be >= 1")
        if self.ensemble_size < 1 or self.lambda_count < 1:
            raise PreconditionError("ensemble_size and lambda_count must be >= 1")
        if self.mode not in ("random", "product"):
            raise PreconditionError(f"unknown mode {self.mode!r}")
        if self.jobs < 1:
            raise PreconditionError("jobs must be >= 1")

    def resolution(self, lam: float) -> int:
        """Grid cells per axis for an eigenvalue (even, at least ``min_resolution``)."""
        n = max(self.min_resolution, math.ceil(self.cells_per_sqrt_lambda * math.sqrt(lam)))
        return n + (n % 2)


def _section(cp, name):
    return cp[name] if cp.has_section(name) else {}


def load_config(path=None, **overrides) -> ExperimentConfig:
    """Read an INI file with sections ``experiment``, ``doubling``, ``cascade``
    and ``wavescale``; keyword overrides win, then ``NODAL_LAB_SEED``."""
    cp = configparser.ConfigParser()
    if path is not None:
        if not cp.read(path):
            raise PreconditionError(f"cannot read config {path}")
    ex = _section(cp, "experiment")
    kw = {}
    conv = {"manifold": str, "lambda_min": float, "lambda_max": float, "lambda_count": int,
            "ensemble_size": int, "seed": int, "mode": str, "cells_per_sqrt_lambda": float,
            "min_resolution": int, "jobs": int, "out_dir": str}
    for key, typ in conv.items():
        if key in ex:
            kw[key] = typ(ex[key])
    d = _section(cp, "doubling")
    quad = QuadratureSpec(order=int(d.get("order", 16)), kind=d.get("kind", "exact"),
                          panels=int(d.get("panels", 1)))
    dp = DoublingParams(l=int(d.get("l", 5)), quadrature=quad,
                        tilde_depth=int(d.get("tilde_depth", 3)), A=int(d.get("A", 16)),
                        C0=float(d.get("C0", constants.C0)), C7=float(d.get("C7", constants.C7)),
                        tau=float(d.get("tau", 1e-3)))
    c = _section(cp, "cascade")
    delta = c.get("delta")
    cas = CascadeParams(Y=int(c.get("Y", 16)), j=int(c.get("j", 3)), K=int(c.get("K", 5)),
                        delta=float(delta) if delta else None, params=dp)
    w = _section(cp, "wavescale")
    wav = WavescaleParams(epsilon=float(w.get("epsilon", constants.EPSILON)),
                          C1=float(w.get("C1", constants.C1)), C2=float(w.get("C2", constants.C2)),
                          boundary_samples=int(w.get("boundary_samples", 256)),
                          interior_samples=int(w.get("interior_samples", 512)))
    kw.update(doubling=dp, cascade=cas, wavescale=wav)
    kw.update({k: v for k, v in overrides.items() if v is not None})
    env = os.environ.get(SEED_ENV)
    if env is not None and env.strip():
        kw["seed"] = int(env)
    return ExperimentConfig(**kw)


def eigenvalue_targets(cfg: ExperimentConfig) -> list:
    """Geometric targets in ``[lambda_min, lambda_max]`` snapped to true eigenvalues."""
    if cfg.lambda_max < cfg.lambda_min:
        return []
    if cfg.lambda_count == 1:
        targets = [cfg.lambda_max]
    else:
        targets = np.geomspace(cfg.lambda_min, cfg.lambda_max, cfg.lambda_count)
    out = []
    for t in targets:
        lam = nearest_eigenvalue(cfg.manifold, float(t))
        if lam not in out:
            out.append(lam)
    return out


def member_seed(seed: int, lam: int, k: int) -> int:
    return int(np.random.SeedSequence([seed, int(lam), k]).generate_state(1)[0])


# --- records -----------------------------------------------------------------------

def make_record(manifold, lam, member, quantity, value, seed, **meta) -> dict:
    rec = {"schema": SCHEMA_VERSION, "manifold": Manifold.parse(manifold).value,
           "lambda": int(lam), "member": str(member), "seed": int(seed),
           "quantity": quantity, "value": None if value is None else float(value)}
    rec.update(meta)
    return rec


def record_key(rec) -> tuple:
    return (rec["manifold"], rec["lambda"], rec["member"], rec["quantity"])


def read_records(path) -> list:
    path = Path(path)
    if not path.exists():
        return []
    with open(path) as fh:
        return [json.loads(line) for line in fh if line.strip()]


def write_records(path, records) -> None:
    """Sorted by key, one compact JSON object per line; later duplicates win."""
    merged = {}
    for r in records:
        merged[record_key(r)] = r
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(path.suffix + ".tmp")
    with open(tmp, "w") as fh:
        for k in sorted(merged):
            fh.write(json.dumps(merged[k], sort_keys=True, separators=(",", ":")) + "\n")
    os.replace(tmp, path)


def write_summary_csv(path, table, value="value") -> list:
    """Per-lambda median, quartiles, mean and count; returns the rows."""
    by = {}
    for row in table:
        if row.get(value) is not None:
            by.setdefault(row["lambda"], []).append(row[value])
    rows = []
    for lam in sorted(by):
        v = np.asarray(by[lam], dtype=float)
        q1, med, q3 = np.percentile(v, [25, 50, 75])
        rows.append({"lambda": lam, "median": med, "q1": q1, "q3": q3,
                     "mean": float(v.mean()), "count": len(v)})
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=["lambda", "median", "q1", "q3", "mean", "count"])
        w.writeheader()
        for r in rows:
            w.writerow({k: (f"{x:.12g}" if isinstance(x, float) else x) for k, x in r.items()})
    return rows


# --- nodal measure sweep ---------------------------------------------------------------

def _members(cfg: ExperimentConfig, lam: int) -> list:
    """(member label, eigenfunction factory args) for one eigenvalue."""
    if cfg.mode == "product":
        if cfg.manifold is not Manifold.TORUS2:
            raise PreconditionError("product mode is defined on Torus2")
        out = []
        n = 1
        while n * n < lam:
            m2 = lam - n * n
            m = math.isqrt(m2)
            if m >= 1 and m * m == m2:
                out.append((f"{n}x{m}", ("product", n, m)))
            n += 1
        return out
    return [(f"s{k}", ("random", member_seed(cfg.seed, lam, k))) for k in range(cfg.ensemble_size)]


def _build(manifold, lam, spec) -> Eigenfunction:
    if spec[0] == "product":
        return product_mode(("sin", spec[1]), ("sin", spec[2]))
    return synth_random(manifold, lam, spec[1])


def _measure_job(args):
    manifold, lam, member, spec, res, seed = args
    manifold = Manifold.parse(manifold)
    try:
        u = _build(manifold, lam, spec)
        if manifold is Manifold.TORUS3:
            m = extract_nodal_3d(u, resolution=res)
        else:
            m = extract_nodal_2d(u, resolution=res)
        return make_record(manifold, lam, member, "nodal_measure", m.total, seed,
                           resolution=res, elements=m.count)
    except NodalLabError as exc:
        return make_record(manifold, lam, member, "nodal_measure", None, seed,
                           resolution=res, error=str(exc))


def _run_jobs(fn, jobs, n_jobs):
    if n_jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(n_jobs) as ex:
            return list(ex.map(fn, jobs))
    return [fn(j) for j in jobs]


def sweep_nodal_measure(cfg: ExperimentConfig, lams=None, path=None) -> list:
    """Measure the nodal set for every (eigenvalue, member); resumable.

    Returns table rows ``{"lambda", "member", "seed", "value"}`` sorted by key.
    Records already present in the output file are not recomputed.
    """
    if lams is None:
        if cfg.mode == "product":
            lams = [l for l, _ in eigenvalue_list(cfg.manifold, cfg.lambda_max)
                    if l >= cfg.lambda_min]
        else:
            lams = eigenvalue_targets(cfg)
    lams = [l for l in lams if _members(cfg, l)]
    path = Path(path or Path(cfg.out_dir) / f"sweep_{cfg.manifold.value}.jsonl")
    existing = read_records(path)
    done = {record_key(r) for r in existing}
    per_sqrt = 8.0 if cfg.manifold is Manifold.TORUS3 else cfg.cells_per_sqrt_lambda
    jobs = []
    for lam in lams:
        res = cfg.resolution(lam) if cfg.manifold is not Manifold.TORUS3 else _res3(cfg, lam, per_sqrt)
        for member, spec in _members(cfg, lam):
            key = (cfg.manifold.value, int(lam), member, "nodal_measure")
            if key not in done:
                jobs.append((cfg.manifold.value, lam, member, spec, res, cfg.seed))
    new = _run_jobs(_measure_job, jobs, cfg.jobs)
    records = existing + new
    write_records(path, records)
    wanted = {int(l) for l in lams}
    table = [{"lambda": r["lambda"], "member": r["member"], "seed": r["seed"], "value": r["value"]}
             for r in sorted(records, key=record_key)
             if r["quantity"] == "nodal_measure" and r["lambda"] in wanted]
    write_summary_csv(path.with_suffix(".csv"), table)
    return table


def _res3(cfg, lam, per_sqrt):
    n = max(64, math.ceil(per_sqrt * math.sqrt(lam)))
    return n + (n % 2)


# --- exponent fits -------------------------------------------------------------------

@dataclass(frozen=True)
class ExponentFit:
    slope: float
    intercept: float
    r_squared: float
    point_count: int
    mean_slope: float = math.nan

    @property
    def prefactor(self) -> float:
        return math.exp(self.intercept)


def _ols(x, y):
    X = np.stack([x, np.ones_like(x)], axis=1)
    coef = np.linalg.lstsq(X, y, rcond=None)[0]
    resid = y - X @ coef
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid ** 2)) / ss_tot if ss_tot > 0 else 1.0
    return float(coef[0]), float(coef[1]), min(1.0, max(0.0, r2))


def fit_exponent(table, value: str = "value") -> ExponentFit:
    """Least squares of ``ln(median measure)`` on ``ln(lambda)``.

    ``table`` holds mappings with ``"lambda"`` and ``value`` (or
    ``(lambda, value)`` pairs).  Nonpositive or missing values are dropped.
    """
    by = {}
    for row in table:
        lam, v = (row["lambda"], row[value]) if isinstance(row, dict) else row
        if v is not None and v > 0:
            by.setdefault(float(lam), []).append(float(v))
    if len(by) < 3:
        raise PreconditionError("need at least 3 distinct eigenvalues to fit an exponent")
    lams = np.array(sorted(by))
    x = np.log(lams)
    med = np.log([np.median(by[l]) for l in lams])
    mean = np.log([np.mean(by[l]) for l in lams])
    slope, intercept, r2 = _ols(x, med)
    mslope = _ols(x, mean)[0]
    return ExponentFit(slope, intercept, r2, len(lams), mslope)


def upper_constant(table, exponent: float = 0.75, value: str = "value") -> float:
    """Smallest ``C`` with ``measure <= C lambda^exponent`` for every row."""
    vals = [row[value] / row["lambda"] ** exponent for row in table if row[value] is not None]
    if not vals:
        raise PreconditionError("empty table")
    return float(max(vals))


# --- doubling-index sweep -----------------------------------------------------------

def _fixed_partition(manifold: Manifold, per_axis: int = 4):
    base = CubeSpec((math.pi,) * manifold.dim, math.pi)
    return subcube_centers(base, per_axis), math.pi / per_axis


def _doubling_job(args):
    manifold, lam, member, spec, seed, params, per_axis = args
    manifold = Manifold.parse(manifold)
    u = _build(manifold, lam, spec)
    centers, half = _fixed_partition(manifold, per_axis)
    lifted = np.concatenate([centers, np.zeros((len(centers), 1))], axis=1)
    vals = tilde_indices(lift(u), lifted, half, params)
    return make_record(manifold, lam, member, "max_tilde_index", float(np.max(vals)), seed,
                       cubes=len(centers), half_side=half,
                       ratio=float(np.max(vals)) / math.sqrt(lam))


def df_doubling_sweep(cfg: ExperimentConfig, lams=None, path=None, per_axis: int = 4) -> list:
    """Max tilde index of the lift over a fixed partition of the torus.

    Cubes are ``q x [-a, a]`` with ``q`` running over the ``per_axis^dim``
    partition and ``a`` its half side.  Rows carry ``maxTildeIndex`` and its
    ratio to ``sqrt(lambda)``.
    """
    if not cfg.manifold.is_torus:
        raise PreconditionError("the doubling sweep uses exact torus integration")
    lams = eigenvalue_targets(cfg) if lams is None else list(lams)
    path = Path(path or Path(cfg.out_dir) / f"doubling_{cfg.manifold.value}.jsonl")
    existing = read_records(path)
    done = {record_key(r) for r in existing}
    jobs = []
    for lam in lams:
        for member, spec in _members(cfg, lam):
            if (cfg.manifold.value, int(lam), member, "max_tilde_index") not in done:
                jobs.append((cfg.manifold.value, lam, member, spec, cfg.seed, cfg.doubling, per_axis))
    records = existing + _run_jobs(_doubling_job, jobs, cfg.jobs)
    write_records(path, records)
    wanted = {int(l) for l in lams}
    table = [{"lambda": r["lambda"], "member": r["member"], "value": r["value"], "ratio": r["ratio"]}
             for r in sorted(records, key=record_key)
             if r["quantity"] == "max_tilde_index" and r["lambda"] in wanted]
    write_summary_csv(path.with_suffix(".csv"), table)
    return table


def ratio_spread(table, key: str = "ratio") -> float:
    """max / min of the per-lambda median of ``key``."""
    by = {}
    for r in table:
        by.setdefault(r["lambda"], []).append(r[key])
    med = [float(np.median(v)) for v in by.values()]
    return max(med) / min(med)


# --- 2D upper-bound pipeline -----------------------------------------------------------

@dataclass
class Pipeline2DResult:
    lam: int
    member: str
    squares: int
    side: float
    lengths: np.ndarray
    tilde: np.ndarray
    constants: np.ndarray
    max_constant: float
    total_length: float
    sum_sqrt_tilde: float
    group_bound: float
    N0: float
    skipped: int = 0


def _squares_per_axis(lam: float) -> int:
    # side 2pi / n closest to lam^(-1/4)
    return max(4, int(round(TWO_PI * lam ** 0.25)))


def _split_at_grid(segs, side):
    """Cut segments where they cross the lines ``x = k side`` or ``y = k side``.

    Segments are shorter than ``side``, so each crosses at most one line per axis.
    """
    a, b = segs[:, 0], segs[:, 1]
    d = b - a
    cuts = [np.zeros(len(segs)), np.ones(len(segs))]
    for ax in range(2):
        ka, kb = np.floor(a[:, ax] / side), np.floor(b[:, ax] / side)
        line = np.maximum(ka, kb) * side
        with np.errstate(divide="ignore", invalid="ignore"):
            t = (line - a[:, ax]) / d[:, ax]
        cuts.append(np.where((ka != kb) & (t > 0) & (t < 1), t, 1.0))
    T = np.sort(np.stack(cuts, axis=1), axis=1)
    p = a[:, None, :] + T[:, :, None] * d[:, None, :]
    pieces = np.stack([p[:, :-1], p[:, 1:]], axis=2).reshape(-1, 2, 2)
    return pieces[np.any(pieces[:, 0] != pieces[:, 1], axis=1)]


def pipeline_2d_upper_single(u: Eigenfunction, params: DoublingParams, resolution: int,
                             member: str = "", dilation: float = 100.0) -> Pipeline2DResult:
    """Per-square nodal length against ``Ntilde(u, 100 q)^(1/2)`` on Torus2."""
    if u.manifold is not Manifold.TORUS2:
        raise PreconditionError("the 2D pipeline runs on Torus2")
    per_axis = _squares_per_axis(u.lam)
    side = TWO_PI / per_axis
    nm = extract_nodal_2d(u, resolution=resolution, check=False)
    lengths = np.zeros(per_axis * per_axis)
    if nm.count:
        pieces = _split_at_grid(nm.elements, side)
        w = np.linalg.norm(pieces[:, 1] - pieces[:, 0], axis=1)
        mid = np.mod(0.5 * (pieces[:, 0] + pieces[:, 1]), TWO_PI)
        ij = np.minimum((mid // side).astype(int), per_axis - 1)
        np.add.at(lengths, ij[:, 0] * per_axis + ij[:, 1], w)
    K = CubeSpec((math.pi, math.pi), math.pi)
    centers = subcube_centers(K, per_axis)
    # the dilated squares wrap around the torus; exact integration on the cover
    tilde = tilde_indices(u, centers, 0.5 * side * dilation, params)
    consts = lengths / np.sqrt(np.maximum(tilde, 1e-12))
    n0 = float(tilde_indices(u, np.asarray([K.center]), K.half_side, params)[0])
    # group summation with Y = 4 (one halving step per axis); j need not be an integer
    Y, j = 4, math.log2(per_axis)
    bound = (Y - 1 + 2 ** -0.5) ** j * math.sqrt(max(n0, 0.0))
    return Pipeline2DResult(u.lam, member, per_axis ** 2, side, lengths, tilde, consts,
                            float(consts.max()), float(lengths.sum()),
                            float(np.sqrt(np.maximum(tilde, 0)).sum()), bound, n0)


def pipeline_2d_upper(cfg: ExperimentConfig, lams=None) -> dict:
    """Run the 2D pipeline per (eigenvalue, member); stability of the max constant."""
    if cfg.manifold is not Manifold.TORUS2:
        raise PreconditionError("the 2D pipeline runs on Torus2")
    lams = eigenvalue_targets(cfg) if lams is None else list(lams)
    results = []
    for lam in lams:
        for member, spec in _members(cfg, lam):
            u = _build(cfg.manifold, lam, spec)
            results.append(pipeline_2d_upper_single(u, cfg.doubling, cfg.resolution(lam), member))
    per_lam = {}
    for r in results:
        per_lam.setdefault(r.lam, []).append(r.max_constant)
    med = {lam: float(np.median(v)) for lam, v in per_lam.items()}
    spread = max(med.values()) / min(med.values()) if med else math.nan
    return {"results": results, "median_max_constant": med, "spread": spread,
            "stable": bool(spread <= 2.0) if med else True}


# --- 3D lower-bound pipeline -------------------------------------------------------------

@dataclass
class Pipeline3DResult:
    lam: int
    member: str
    cubes_per_axis: int
    areas: np.ndarray
    indices: np.ndarray
    has_zero: np.ndarray
    good: np.ndarray
    implied: np.ndarray
    total_good_area: float
    partition_total: float
    global_total: float
    missing_zero: int

    @property
    def consistency(self) -> float:
        """Relative gap between the global area and the per-cube sum."""
        if self.global_total == 0:
            return 0.0 if self.partition_total == 0 else math.inf
        return abs(self.partition_total - self.global_total) / self.global_total


def _inner_tenth_zero(u: Eigenfunction, centers, half, samples_per_axis=7) -> np.ndarray:
    g = np.linspace(-half / 10, half / 10, samples_per_axis)
    offs = np.stack(np.meshgrid(g, g, g, indexing="ij"), axis=-1).reshape(-1, 3)
    vals = u.trig((centers[:, None, :] + offs[None]).reshape(-1, 3)).reshape(len(centers), -1)
    return (vals.min(axis=1) <= 0) & (vals.max(axis=1) >= 0)


def pipeline_3d_lower_single(u: Eigenfunction, params: DoublingParams, threshold: float = math.inf,
                             member: str = "", cubes_per_axis: int | None = None,
                             cells_per_cube: int | None = None) -> Pipeline3DResult:
    """Wavelength cubes of Torus3: zero check, index, per-cube area and its implied constant.

    The implied constant of ``area(q) >= c / (lam N(u, q))`` is ``area * lam * N``.
    """
    if u.manifold is not Manifold.TORUS3:
        raise PreconditionError("the 3D pipeline runs on Torus3")
    s = math.sqrt(max(u.lam, 1))
    m = cubes_per_axis or max(2, int(round(s / 2)))
    k = cells_per_cube or max(8, math.ceil(8 * s / m))
    areas = partition_areas(u, m, k, offset=0.0)
    n = m * k
    glob = extract_nodal_3d(u, resolution=n, offset=0.5, check=False).total
    centers, half = subcube_centers(CubeSpec((math.pi,) * 3, math.pi), m), math.pi / m
    idx = doubling_indices(u, centers, half, params)
    has_zero = _inner_tenth_zero(u, centers, half)
    good = idx <= threshold
    implied = areas * u.lam * idx
    return Pipeline3DResult(u.lam, member, m, areas, idx, has_zero, good, implied,
                            float(math.fsum(areas[good])), float(math.fsum(areas)), glob,
                            int(np.sum(~has_zero)))


def pipeline_3d_lower(cfg: ExperimentConfig, lams=None, threshold: float = math.inf) -> dict:
    if cfg.manifold is not Manifold.TORUS3:
        raise PreconditionError("the 3D pipeline runs on Torus3")
    lams = eigenvalue_targets(cfg) if lams is None else list(lams)
    results = []
    for lam in lams:
        for member, spec in _members(cfg, lam):
            u = _build(cfg.manifold, lam, spec)
            results.append(pipeline_3d_lower_single(u, cfg.doubling, threshold, member))
    table = [{"lambda": r.lam, "value": r.total_good_area} for r in results]
    fit = fit_exponent(table) if len({r.lam for r in results}) >= 3 else None
    return {"results": results, "fit": fit,
            "grows": bool(fit is not None and fit.slope > 0),
            "max_inconsistency": max((r.consistency for r in results), default=0.0)}


# --- release-blocking verification ---------------------------------------------------------

def verify_weak_max(cfg: ExperimentConfig, balls: int = 500, lam_max: float | None = None,
                    path=None) -> dict:
    """Weak maximum principle on ``balls`` random balls; violations block release."""
    lam_max = lam_max or cfg.lambda_max
    lams = [l for l in np.geomspace(max(cfg.lambda_min, 1), lam_max, 10)]
    per = max(1, balls // len(lams))
    eps = min(cfg.wavescale.epsilon, 0.1)
    reps = weak_max_sweep(cfg.manifold, lams, per, eps, cfg.seed, replace(cfg.wavescale, epsilon=eps))
    violations = [r for r in reps if not r.holds]
    out = {"balls": len(reps), "violations": len(violations),
           "max_ratio": max(r.lhs / r.rhs for r in reps), "ok": not violations}
    if path is not None:
        recs = [make_record(cfg.manifold, 0, f"b{i:04d}", "weak_max_ratio", r.lhs / r.rhs, cfg.seed,
                            holds=r.holds) for i, r in enumerate(reps)]
        write_records(path, recs)
    return out


__all__ = [
    "ExperimentConfig", "load_config", "eigenvalue_targets", "sweep_nodal_measure",
    "fit_exponent", "upper_constant", "ExponentFit", "df_doubling_sweep", "ratio_spread",
    "pipeline_2d_upper", "pipeline_2d_upper_single", "pipeline_3d_lower",
    "pipeline_3d_lower_single", "verify_weak_max", "read_records", "write_records",
    "make_record", "write_summary_csv", "eigenvalue_list",
]
