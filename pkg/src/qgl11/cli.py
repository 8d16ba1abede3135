"""Command-line harness for the verification registry.

Exit codes: 0 when every selected check ends PASS or
OBSTRUCTION-CONFIRMED, 1 when any check fails (or hits a persistent
numeric pole), 2 for configuration errors (unknown check names, invalid
R-matrix files, bad flag values).
"""
from __future__ import annotations

import argparse
import sys

from .registry import ConfigError, SuiteConfig, run_suite, select_checks, \
    _load_rmatrices
from .report import build_suite_report, suite_to_json

_RESIDUALS_SHOWN = 4


def build_parser():
    ap = argparse.ArgumentParser(
        prog="verify",
        description="Run the exact-arithmetic verification suite for the"
                    " three deformed (1|1) matrix bialgebras and their"
                    " enveloping duals.")
    ap.add_argument("--case", action="append", dest="cases",
                    choices=["r22", "r12", "r11", "all"],
                    help="restrict to one deformation case (repeatable;"
                         " default: all, which includes the undeformed"
                         " reference case)")
    ap.add_argument("--framework", action="append", dest="frameworks",
                    choices=["unbraided", "braided", "all"],
                    help="restrict to one tensor-product convention"
                         " (repeatable; default: all)")
    ap.add_argument("--check", action="append", dest="checks",
                    metavar="GLOB",
                    help="run only checks whose id matches the glob"
                         " (repeatable); negative controls live under"
                         " control.* and are excluded by positive globs")
    ap.add_argument("--max-degree", type=int, default=None, metavar="N",
                    help="override the per-check monomial degree / grid"
                         " bound")
    ap.add_argument("--mode", choices=["symbolic", "numeric"],
                    default="symbolic",
                    help="symbolic: exact rational-function arithmetic;"
                         " numeric: exact rationals at seeded random"
                         " assignments")
    ap.add_argument("--trials", type=int, default=3, metavar="T",
                    help="number of numeric assignments per check"
                         " (numeric mode)")
    ap.add_argument("--seed", type=int, default=0, metavar="S",
                    help="suite seed; fixes probe words and numeric"
                         " assignments")
    ap.add_argument("--rmatrix", metavar="FILE.json", default=None,
                    help="JSON matrix override: a built-in name replaces"
                         " that matrix in its braid check, a new name adds"
                         " a braid check")
    ap.add_argument("--output", choices=["text", "json"], default="text",
                    help="report format")
    ap.add_argument("--list", action="store_true", dest="list_only",
                    help="list the selected check ids and exit")
    return ap


def _config_from_args(args):
    if args.max_degree is not None and args.max_degree < 0:
        raise ConfigError("--max-degree must be >= 0")
    if args.trials < 1:
        raise ConfigError("--trials must be >= 1")
    return SuiteConfig(
        cases=tuple(args.cases) if args.cases else ("all",),
        frameworks=tuple(args.frameworks) if args.frameworks else ("all",),
        checks=tuple(args.checks) if args.checks else None,
        max_degree=args.max_degree,
        mode=args.mode,
        trials=args.trials,
        seed=args.seed,
        rmatrix_path=args.rmatrix,
        output=args.output,
    )


def _print_list(config, out):
    rmatrices, extra = _load_rmatrices(config)
    for defn in select_checks(config, extra):
        scope = defn.case or "-"
        if defn.framework:
            scope += "." + defn.framework
        out.write(f"{defn.check_id:40s} [{scope}] {defn.anchor}\n")
    return 0


def _print_text(config, reports, ok, out):
    for rep in reports:
        line = (f"{rep.status:22s} {rep.check:40s} "
                f"[{rep.case}.{rep.framework}] {rep.seconds:7.2f}s")
        if rep.residual_total:
            line += f"  residuals={rep.residual_total}"
        out.write(line + "\n")
        for ctx, val in rep.residuals[:_RESIDUALS_SHOWN]:
            out.write(f"    {ctx}: {val}\n")
    counts = {}
    for rep in reports:
        counts[rep.status] = counts.get(rep.status, 0) + 1
    total = sum(r.seconds for r in reports)
    tally = ", ".join(f"{k}={v}" for k, v in sorted(counts.items()))
    out.write(f"{len(reports)} checks ({tally}) in {total:.1f}s: "
              f"{'OK' if ok else 'FAILED'}\n")
    return 0 if ok else 1


def main(argv=None, out=None):
    out = sys.stdout if out is None else out
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        config = _config_from_args(args)
        if args.list_only:
            return _print_list(config, out)
        reports, ok = run_suite(config)
        if config.output == "json":
            out.write(suite_to_json(build_suite_report(config.to_dict(),
                                                       reports)))
            return 0 if ok else 1
        return _print_text(config, reports, ok, out)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except BrokenPipeError:
        return 0


if __name__ == "__main__":
    sys.exit(main())
