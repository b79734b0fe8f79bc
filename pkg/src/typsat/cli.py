"""Command-line front end: certify, curves, empirical, oracle.

Every run writes its outputs under a single directory with a manifest
recording arguments, seed, and versions.  Exit codes: 0 when the requested
verdict holds, 2 when it fails, 3 on a configuration error.
"""

from __future__ import annotations

import argparse
import platform
import sys
from pathlib import Path

import numpy as np

from .pipeline import (VERSION, certify, counting_oracle, emit_curves,
                      empirical_csv, empirical_report, oracle_csv)
from .errors import ConfigurationError, GuardError
from .params import ModelParams


def _write_manifest(out: Path, args: argparse.Namespace) -> None:
    lines = [
        f"command: {args.command}",
        f"args: {vars(args)}",
        f"typsat: {VERSION}",
        f"python: {platform.python_version()}",
        f"numpy: {np.__version__}",
    ]
    (out / "manifest.txt").write_text("\n".join(lines) + "\n")


def _outdir(args: argparse.Namespace) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _cmd_certify(args: argparse.Namespace) -> int:
    cert = certify(c=args.c, x_max=args.xmax, eps=args.eps, mode=args.mode,
                      seed=args.seed, width_target=args.width_target)
    for s in cert.stages:
        print(f"[{'ok' if s['ok'] else 'FAIL'}] {s['name']}: {s['detail']}")
    print(f"verdict: {cert.verdict}" + (f" (rate {cert.rate:.9f})" if cert.rate else ""))
    if args.out:
        out = _outdir(args)
        cert.dump(out / "certificate.json")
        _write_manifest(out, args)
        print(f"wrote {out / 'certificate.json'}")
    return 0 if cert.verdict else 2


def _cmd_curves(args: argparse.Namespace) -> int:
    params = ModelParams(c=args.c, x_max=args.xmax, epsilon=args.eps)
    rows, text = emit_curves(params, args.density)
    if args.out:
        out = _outdir(args)
        (out / "curves.csv").write_text(text)
        _write_manifest(out, args)
        print(f"wrote {out / 'curves.csv'} ({len(rows)} samples per locus)")
    else:
        sys.stdout.write(text)
    return 0


def _cmd_empirical(args: argparse.Namespace) -> int:
    report = empirical_report(args.n, args.c, args.formulas, args.seed,
                                 x_cap=args.xcap,
                                 pps_sub=(args.pps_n, args.pps_formulas)
                                 if args.pps_formulas else None)
    print(f"max |mean omega - kappa| = {report['max_abs_deviation']:.3e}; "
          f"cells over budget: {report['cells_over_budget']}; ok: {report['ok']}")
    if "pps_subreport" in report:
        sub = report["pps_subreport"]
        print(f"pps subreport at n={sub['n']}: {sub['satisfiable_with_pps']}/"
              f"{sub['satisfiable']} satisfiable formulas have a locally maximal "
              f"solution; ok: {sub['ok']}")
    if args.out:
        out = _outdir(args)
        (out / "empirical.csv").write_text(empirical_csv(report))
        _write_manifest(out, args)
        print(f"wrote {out / 'empirical.csv'}")
    ok = report["ok"] and report.get("pps_subreport", {}).get("ok", True)
    return 0 if ok else 2


def _cmd_oracle(args: argparse.Namespace) -> int:
    result = counting_oracle(args.n, args.c)
    print(f"{result['formulas']} formulas, {result['pairs']} locally-maximal pairs, "
          f"{result['signatures']} signatures, {result['violations']} bound violations")
    if args.out:
        out = _outdir(args)
        (out / "oracle.csv").write_text(oracle_csv(result))
        _write_manifest(out, args)
        print(f"wrote {out / 'oracle.csv'}")
    return 0 if result["ok"] else 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="typsat",
        description="Certified first-moment bound 4.506 for random 3-SAT.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("certify", help="run the full certification pipeline")
    p.add_argument("--c", type=float, default=4.506)
    p.add_argument("--xmax", type=int, default=56)
    p.add_argument("--eps", type=float, default=1e-15)
    p.add_argument("--mode", choices=("float", "interval"), default="float")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--width-target", type=float, default=4e-7)
    p.add_argument("--out", type=str, default="")
    p.set_defaults(func=_cmd_certify)

    p = sub.add_parser("curves", help="sample the eq1=0 and eq2=0 loci to CSV")
    p.add_argument("--c", type=float, default=4.506)
    p.add_argument("--xmax", type=int, default=56)
    p.add_argument("--eps", type=float, default=1e-15)
    p.add_argument("--density", type=int, default=60)
    p.add_argument("--out", type=str, default="")
    p.set_defaults(func=_cmd_curves)

    p = sub.add_parser("empirical", help="occurrence-distribution measurement report")
    p.add_argument("--n", type=int, default=100000)
    p.add_argument("--c", type=float, default=4.506)
    p.add_argument("--formulas", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--xcap", type=int, default=8)
    p.add_argument("--pps-n", type=int, default=12)
    p.add_argument("--pps-formulas", type=int, default=0,
                   help="when > 0, add an exhaustive locally-maximal subreport")
    p.add_argument("--out", type=str, default="")
    p.set_defaults(func=_cmd_empirical)

    p = sub.add_parser("oracle", help="exhaustive tiny-instance counting comparison")
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--c", type=float, default=0.5)
    p.add_argument("--out", type=str, default="")
    p.set_defaults(func=_cmd_oracle)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigurationError, GuardError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
