"""Command-line entry point: ``primalcurv {bound,sweep,validate,adaptive}``.

Exit codes: 0 success, 1 input error, 2 infeasible enumeration, 3 property
violation.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
from pathlib import Path

from . import adaptive as ad
from .errors import EnumerationInfeasibleError, InputError, PrimalCurvError
from .objectives import build, load_instance
from .pipeline import analyze
from .ratios import classic_ratio, fixed_gamma_ratio, wang_ratio

EXIT_OK, EXIT_INPUT, EXIT_INFEASIBLE, EXIT_VIOLATION = 0, 1, 2, 3

SWEEP_FORMULAS = ("wang", "wang_literal", "fixed_gamma", "adaptive", "classic")


def fmt(x):
    """Six significant digits; the single number format of every CSV."""
    if x is None:
        return ""
    if isinstance(x, float) and math.isinf(x):
        return "inf"
    return f"{x:.6g}"


def _write(text, out):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _summary(rep):
    lines = [
        f"k={rep.k} n={rep.n} picks={rep.picks} f(S)={fmt(rep.greedy_value)} "
        f"f(S+)={fmt(rep.extension_value)} f(S*)={fmt(rep.optimum_value)}",
        f"gamma_hat={fmt(rep.gamma_hat)} gamma_hat_max={fmt(rep.gamma_hat_max)} "
        f"alpha={fmt(rep.alpha)} total_curvature={fmt(rep.total_curvature)}",
    ]
    for name in (
        "primal_ratio",
        "fixed_gamma_ratio",
        "wang_ratio",
        "conforti_ratio",
        "conforti_uniform_ratio",
        "classic_ratio",
        "exact_ratio",
    ):
        val = getattr(rep, name)
        if val is None:
            lines.append(f"  {name:24s} absent ({rep.absent.get(name, '')})")
        else:
            lines.append(f"  {name:24s} {fmt(val):>10s}  [{rep.provenance.get(name, '')}]")
    lines.extend(f"  note: {fl}" for fl in rep.flags)
    return "\n".join(lines) + "\n"


def cmd_bound(args):
    inst = load_instance(args.instance)
    f = build(inst)
    if args.k is None or not 1 <= args.k <= f.n:
        raise InputError(f"--k must lie in 1..{f.n}")
    an = analyze(
        f,
        args.k,
        mode=args.mode,
        trials=args.trials,
        seed=args.seed,
        cap=args.cap,
        wang_literal=args.wang_literal,
    )
    payload = json.dumps(an.report.to_dict(), indent=2, sort_keys=True) + "\n"
    if args.format == "json":
        _write(payload, args.out)
    else:
        if args.out:
            Path(args.out).write_text(payload)
        sys.stdout.write(_summary(an.report))
    return EXIT_INFEASIBLE if an.infeasible else EXIT_OK


def _parse_params(raw, formula):
    if formula == "classic":
        return ["k"]
    out = []
    for tok in raw:
        out.append("k" if tok == "k" else float(tok))
    return out


def sweep_rows(formula, params, ks):
    """Rows ``(formula, k, parameter, ratio)`` in input order (params outer, k inner)."""
    rows = []
    for param in params:
        for k in ks:
            value = float(k) if param == "k" else param
            if formula == "wang":
                r = wang_ratio(value, k)
            elif formula == "wang_literal":
                r = wang_ratio(value, k, literal=True) if k > 1 else None
            elif formula == "fixed_gamma":
                r = fixed_gamma_ratio(value, k)
            elif formula == "adaptive":
                r = ad.adaptive_ratio(value, k)
            elif formula == "classic":
                r = classic_ratio(k)
            else:
                raise InputError(f"unknown formula {formula!r}")
            rows.append((formula, k, value, r))
    return rows


def cmd_sweep(args):
    if args.formula not in SWEEP_FORMULAS:
        raise InputError(f"--formula must be one of {SWEEP_FORMULAS}")
    ks = list(range(args.k_min, args.k_max + 1)) if args.ks is None else args.ks
    params = _parse_params(args.param or ["1.0"], args.formula)
    if not ks or not params:
        raise InputError("empty parameter grid")
    rows = sweep_rows(args.formula, params, ks)
    if args.format == "json":
        data = [{"formula": f, "k": k, "parameter": p, "ratio": r} for f, k, p, r in rows]
        text = json.dumps(data, indent=2, sort_keys=True) + "\n"
    else:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["formula", "k", "parameter", "ratio"])
        for f, k, p, r in rows:
            w.writerow([f, k, fmt(p), fmt(r)])
        text = buf.getvalue()
    _write(text, args.out)
    return EXIT_OK


def cmd_validate(args):
    from .validate import run_validation

    summary = run_validation(
        seed=args.seed,
        count=args.count,
        adaptive_count=args.adaptive_count,
        max_n=args.max_n,
        max_k=args.max_k,
        out_dir=args.out,
        jobs=args.jobs,
        mutation=args.inject,
    )
    sys.stdout.write(summary.to_json() + "\n")
    return EXIT_OK if summary.passed else EXIT_VIOLATION


def cmd_adaptive(args):
    inst = ad.load_adaptive(args.instance)
    if args.k is None or not 1 <= args.k <= inst.n:
        raise InputError(f"--k must lie in 1..{inst.n}")
    rep = ad.analyze_adaptive(inst, args.k, cap=args.cap or ad.DEFAULT_ADAPTIVE_CAP)
    payload = json.dumps(rep.to_dict(), indent=2, sort_keys=True) + "\n"
    if args.format == "json":
        _write(payload, args.out)
    else:
        if args.out:
            Path(args.out).write_text(payload)
        verdict = {True: "holds", False: "VIOLATED", None: "not checked"}[rep.bound_holds]
        sys.stdout.write(
            f"k={rep.k} items={rep.n} first-branch picks={rep.greedy_picks_first_branch}\n"
            f"f_avg per level: {' '.join(fmt(v) for v in rep.f_avg)}\n"
            f"gamma_hat_k={fmt(rep.gamma_hat_k)} adaptive_ratio={fmt(rep.adaptive_ratio)} "
            f"optimal_policy={fmt(rep.optimal_value)}\n"
            f"bound check: {verdict}\n"
        )
    return EXIT_OK if rep.bound_holds is not False else EXIT_VIOLATION


def build_parser():
    p = argparse.ArgumentParser(prog="primalcurv", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    b = sub.add_parser("bound", help="greedy + ratio certificates for one instance file")
    b.add_argument("--instance", required=True)
    b.add_argument("--k", type=int, required=True)
    b.add_argument("--mode", choices=("exact", "sampled"), default="exact")
    b.add_argument("--trials", type=int, default=1000)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--cap", type=int, default=None)
    b.add_argument("--out")
    b.add_argument("--format", choices=("text", "json"), default="text")
    b.add_argument("--wang-literal", action="store_true", help="A_k summed over i = 1..k-1 instead of 0..k-1")
    b.set_defaults(func=cmd_bound)

    s = sub.add_parser("sweep", help="evaluate a ratio formula over a (k, parameter) grid")
    s.add_argument("--formula", required=True, choices=SWEEP_FORMULAS)
    s.add_argument("--param", nargs="+", help="alpha or Γ̂ values; 'k' means Γ̂ = k")
    s.add_argument("--k-min", type=int, default=1)
    s.add_argument("--k-max", type=int, default=25)
    s.add_argument("--k", dest="ks", type=int, nargs="+")
    s.add_argument("--out")
    s.add_argument("--format", choices=("csv", "json"), default="csv")
    s.set_defaults(func=cmd_sweep)

    v = sub.add_parser("validate", help="seeded bound/identity checks against brute force")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--count", type=int, default=500)
    v.add_argument("--adaptive-count", type=int, default=50)
    v.add_argument("--max-n", type=int, default=10)
    v.add_argument("--max-k", type=int, default=3)
    v.add_argument("--jobs", type=int, default=1)
    v.add_argument("--out", help="directory for replayable violation files")
    v.add_argument("--inject", choices=("off-by-one-k",), help=argparse.SUPPRESS)
    v.set_defaults(func=cmd_validate)

    a = sub.add_parser("adaptive", help="adaptive greedy policy and its ratio")
    a.add_argument("--instance", required=True)
    a.add_argument("--k", type=int, required=True)
    a.add_argument("--cap", type=int, default=None)
    a.add_argument("--out")
    a.add_argument("--format", choices=("text", "json"), default="text")
    a.set_defaults(func=cmd_adaptive)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR)
    try:
        return args.func(args)
    except EnumerationInfeasibleError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INFEASIBLE
    except (InputError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INPUT
    except PrimalCurvError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
