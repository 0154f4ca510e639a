"""Command-line interface.

Subcommands: run (execute a plan file, write records/curves), fit (growth
fit of a curve CSV), bounds (closed-form bound values, optionally over a
grid), tail-check (empirical vs bound tail frequencies), mp-quantiles.
"""

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from cglab import bounds, ensembles, experiments
from cglab.errors import CgLabError


def _cmd_run(args) -> int:
    plan = experiments.load_plan(args.plan)
    if args.seed is not None:
        from dataclasses import replace

        plan = replace(plan, master_seed=args.seed)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    records = experiments.run_plan(plan, workers=args.workers)
    experiments.save_records(records, out / "records.csv")
    curves = experiments.sample_mean_curve(records, "tau_l2") + experiments.sample_mean_curve(
        records, "tau_w"
    )
    experiments.save_curves(curves, out / "curves.csv")
    experiments.save_plan(plan, out / "plan.txt")
    print(f"wrote {len(records)} records to {out}/records.csv (digest {plan.digest()})")
    return 0


def _cmd_fit(args) -> int:
    curve = [pt for pt in experiments.load_curves(args.curve) if pt.field == args.field]
    fit = experiments.fit_growth(curve, p=args.p)
    experiments.save_fit(fit, args.out)
    print(f"a = {fit.a:.6g}, b = {fit.b:.6g}, residual = {fit.residual_norm:.6g}")
    return 0


def _cmd_bounds(args) -> int:
    grid = [args.N] if args.grid is None else [int(tok) for tok in args.grid.split(",")]
    rows = [
        (n, bounds.theorem1_bound(args.part, args.j, n, args.gamma, args.c, args.sigma, args.eps))
        for n in grid
    ]
    text = "\n".join(f"{n},{val:.17g}" for n, val in rows)
    if args.out:
        Path(args.out).write_text("N,value\n" + text + "\n")
        print(f"wrote {len(rows)} bound values to {args.out}")
    else:
        print("N,value")
        print(text)
    return 0


def _cmd_tail_check(args) -> int:
    spec = ensembles.EnsembleSpec(N=args.N, gamma=args.gamma, c=args.c, sigma=math.inf)
    lam_max = np.empty(args.samples)
    kappas = np.empty(args.samples)
    for i in range(args.samples):
        h = ensembles.sample_lue(spec, ensembles.SeededRng(args.seed, i))
        lam = np.linalg.eigvalsh(h)
        lam_max[i] = lam[-1]
        kappas[i] = lam[-1] / lam[0]
    params = bounds.BoundParams.from_ensemble(spec, d=args.d, delta=0.5)
    print(f"N={args.N} alpha={spec.alpha} nu={spec.nu} samples={args.samples}")
    print("branch,t,empirical,bound")
    for t in (1.05, 1.1):
        emp = float(np.mean(lam_max > t))
        tb = bounds.lue_tail_bounds(spec, args.d, t)
        print(f"lambda_max,{t:g},{emp:.6g},{tb.t_max:.6g}")
    for mult in (1.0, 2.0):
        t = mult * params.a * params.f_N * (1.0 + params.delta_N)
        emp = float(np.mean(kappas > t))
        print(f"kappa,{t:.6g},{emp:.6g},{bounds.lemma2_kappa_tail(params, t):.6g}")
    return 0


def _cmd_mp_quantiles(args) -> int:
    for j, z in enumerate(ensembles.mp_quantiles(args.k, tol=args.tol), start=1):
        print(f"{j},{z:.17g}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cglab", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run an experiment plan")
    p.add_argument("--plan", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("fit", help="growth fit a N^p log N + b N^p of a curve CSV")
    p.add_argument("--curve", required=True)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--field", default="tau_l2", choices=["tau_l2", "tau_w"])
    p.set_defaults(func=_cmd_fit)

    p = sub.add_parser("bounds", help="closed-form halting-time bound values")
    p.add_argument("--part", required=True, choices=[bounds.L2, bounds.WEIGHTED, bounds.RESID])
    p.add_argument("--N", type=int, default=100)
    p.add_argument("--grid", default=None, help="comma-separated N values (overrides --N)")
    p.add_argument("--gamma", type=float, default=0.5)
    p.add_argument("--c", type=float, default=1.0)
    p.add_argument("--sigma", type=float, default=math.inf)
    p.add_argument("--eps", type=float, default=1e-4)
    p.add_argument("--j", type=int, default=1)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_bounds)

    p = sub.add_parser("tail-check", help="empirical tail frequencies vs bounds")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--gamma", type=float, default=0.5)
    p.add_argument("--c", type=float, default=1.0)
    p.add_argument("--d", type=float, default=1.0)
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_tail_check)

    p = sub.add_parser("mp-quantiles", help="Marchenko-Pastur quantiles")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--tol", type=float, default=1e-12)
    p.set_defaults(func=_cmd_mp_quantiles)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CgLabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
