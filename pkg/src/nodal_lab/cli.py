"""Command line interface: ``nodal-lab <command> [options]``.

Commands write line-delimited JSON records and CSV summaries to ``--out``.
The exit code is nonzero only when a release-blocking check fails
(``verify``) or a command cannot run.
"""
from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import runner
from .cascade import run_cascade
from .eigen import lift, nearest_eigenvalue, product_mode, sectoral, synth_random
from .errors import NodalLabError
from .geometry import CubeSpec, Manifold
from .nodal import extract_nodal_2d, extract_nodal_3d

log = logging.getLogger("nodal_lab")


def _config(args) -> runner.ExperimentConfig:
    over = {"lambda_max": args.lambda_max, "seed": args.seed, "out_dir": args.out,
            "jobs": args.jobs, "min_resolution": args.resolution}
    if getattr(args, "manifold", None):
        over["manifold"] = args.manifold
    cfg = runner.load_config(args.config, **over)
    if cfg.lambda_min > cfg.lambda_max:
        cfg = replace(cfg, lambda_min=max(1.0, cfg.lambda_max))
    return cfg


def cmd_sweep(args) -> int:
    cfg = _config(args)
    table = runner.sweep_nodal_measure(cfg)
    ok = [r for r in table if r["value"] is not None]
    print(f"{len(table)} records ({len(table) - len(ok)} failed) in {cfg.out_dir}")
    if len({r['lambda'] for r in ok}) >= 3:
        fit = runner.fit_exponent(ok)
        print(f"exponent {fit.slope:.4f}  R^2 {fit.r_squared:.4f}  points {fit.point_count}")
    return 0


def cmd_cascade(args) -> int:
    cfg = _config(args)
    if not cfg.manifold.is_torus:
        raise NodalLabError("cascade runs use exact torus integration")
    lam = nearest_eigenvalue(cfg.manifold, cfg.lambda_max)
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    base = CubeSpec((1.0,) * cfg.manifold.dim, 0.5)
    for k in range(cfg.ensemble_size):
        u = synth_random(cfg.manifold, lam, runner.member_seed(cfg.seed, lam, k))
        rep = run_cascade(lift(u), base, cfg.cascade, jobs=cfg.jobs)
        path = out / f"cascade_{cfg.manifold.value}_{lam}_s{k}.jsonl"
        rep.write(path)
        print(f"lambda {lam} member s{k}: N0 {rep.N0:.3f} threshold {rep.threshold:.3f} "
              f"goodFraction {rep.good_fraction:.4f} vacuous {rep.vacuous}")
    return 0


def cmd_doubling(args) -> int:
    cfg = _config(args)
    table = runner.df_doubling_sweep(cfg)
    if table:
        print(f"{len(table)} records; max/min of median maxTildeIndex/sqrt(lambda): "
              f"{runner.ratio_spread(table):.3f}")
    return 0


def _named_function(spec: str, manifold: Manifold, lam, seed):
    kind, _, rest = spec.partition(":")
    if kind == "random":
        return synth_random(manifold, nearest_eigenvalue(manifold, lam), seed)
    if kind == "sectoral":
        return sectoral(int(rest))
    if kind == "product":
        return product_mode(*[(p[:3], int(p[3:])) for p in rest.split(",")])
    raise NodalLabError(f"unknown function spec {spec!r}")


def cmd_nodal(args) -> int:
    cfg = _config(args)
    manifold = cfg.manifold
    u = _named_function(args.function, manifold, cfg.lambda_max, cfg.seed)
    if u.manifold is Manifold.TORUS3:
        res = args.resolution or max(64, math.ceil(8 * math.sqrt(max(u.lam, 1))))
        m = extract_nodal_3d(u, resolution=res)
    else:
        res = args.resolution or cfg.resolution(max(u.lam, 1))
        m = extract_nodal_2d(u, resolution=res)
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    path = out / f"nodal_{u.manifold.value}_{u.lam}.txt"
    m.export_text(path)
    print(json.dumps({"manifold": u.manifold.value, "lambda": u.lam, "measure": m.total,
                      "elements": m.count, "resolution": res, "file": str(path)}, sort_keys=True))
    return 0


def cmd_verify(args) -> int:
    cfg = _config(args)
    res = runner.verify_weak_max(cfg, balls=args.balls,
                                 path=Path(cfg.out_dir) / f"verify_{cfg.manifold.value}.jsonl")
    print(json.dumps(res, sort_keys=True))
    return 0 if res["ok"] else 1


def cmd_fit(args) -> int:
    cfg = _config(args)
    path = Path(args.records or Path(cfg.out_dir) / f"sweep_{cfg.manifold.value}.jsonl")
    recs = [r for r in runner.read_records(path) if r.get("value") is not None]
    quantity = args.quantity
    table = [{"lambda": r["lambda"], "value": r["value"]} for r in recs if r["quantity"] == quantity]
    fit = runner.fit_exponent(table)
    print(json.dumps({"slope": fit.slope, "intercept": fit.intercept, "r_squared": fit.r_squared,
                      "points": fit.point_count, "mean_slope": fit.mean_slope,
                      "upper_constant_0.75": runner.upper_constant(table, 0.75)}, sort_keys=True))
    return 0


def cmd_report(args) -> int:
    cfg = _config(args)
    out = Path(cfg.out_dir)
    files = sorted(out.glob("*.jsonl"))
    if not files:
        print(f"no record files in {out}")
        return 0
    for f in files:
        recs = runner.read_records(f)
        by = {}
        for r in recs:
            if "quantity" in r and r.get("value") is not None:
                by.setdefault(r["quantity"], []).append(r["value"])
        for q, v in sorted(by.items()):
            v = np.asarray(v, dtype=float)
            print(f"{f.name}: {q} n={len(v)} median={np.median(v):.6g} "
                  f"min={v.min():.6g} max={v.max():.6g}")
        if not by:
            print(f"{f.name}: {len(recs)} records")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="nodal-lab", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", help="INI config file")
        sp.add_argument("--lambda-max", type=float, dest="lambda_max")
        sp.add_argument("--seed", type=int)
        sp.add_argument("--out", help="output directory")
        sp.add_argument("--jobs", type=int)
        sp.add_argument("--resolution", type=int, help="minimum grid cells per axis")
        sp.add_argument("--manifold", choices=[m.value for m in Manifold])
        return sp

    common(sub.add_parser("sweep", help="nodal measure over an eigenvalue range")).set_defaults(fn=cmd_sweep)
    common(sub.add_parser("cascade", help="subdivision cascade for lifted eigenfunctions")).set_defaults(fn=cmd_cascade)
    common(sub.add_parser("doubling", help="max tilde index against sqrt(lambda)")).set_defaults(fn=cmd_doubling)
    sp = common(sub.add_parser("nodal", help="extract and export one nodal set"))
    sp.add_argument("--function", default="random",
                    help="random | sectoral:L | product:sin3,sin4")
    sp.set_defaults(fn=cmd_nodal)
    sp = common(sub.add_parser("verify", help="release-blocking weak maximum principle check"))
    sp.add_argument("--balls", type=int, default=500)
    sp.set_defaults(fn=cmd_verify)
    sp = common(sub.add_parser("fit", help="log-log exponent fit of a record file"))
    sp.add_argument("--records")
    sp.add_argument("--quantity", default="nodal_measure")
    sp.set_defaults(fn=cmd_fit)
    common(sub.add_parser("report", help="summarise record files")).set_defaults(fn=cmd_report)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return args.fn(args)
    except NodalLabError as exc:
        log.error("%s", exc)
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
