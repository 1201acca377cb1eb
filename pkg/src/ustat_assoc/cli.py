"""Command-line entry point: ``ustat-assoc <subcommand> ...``.

Exit status is 0 on success, 2 for usage errors and 1 for runtime failures.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import montecarlo as mc
from .errors import (
    InvalidArgumentError,
    RequiresOracleError,
    ResourceLimitError,
    UnsupportedOperationError,
)
from .generators import Family, GeneratorScheme, Sample, generate, scheme_from_label
from .jointdf import joint_df_grid
from .kernels import gini_kernel
from .ustat import gini_fast, u_stat_degree2
from .variance import BlockRange, b_n_hat, block_length
from .variation import GridFunction, hk_variation, vitali_variation, VariationReport


class UsageError(Exception):
    pass


def _scheme_label(text: str) -> GeneratorScheme:
    try:
        return scheme_from_label(text)
    except InvalidArgumentError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _add_scheme_args(p, seed_required=True):
    p.add_argument("--scheme", type=_scheme_label, help="scheme label S1..S6")
    p.add_argument("--family", choices=[f.value for f in Family], help="explicit family")
    p.add_argument("--m", type=int, help="explicit window length (with --family)")
    p.add_argument("--seed", type=int, required=seed_required, help="64-bit master seed")


def _add_output_args(p, formats=("csv", "json"), default="json"):
    p.add_argument("--format", choices=formats, default=default)
    p.add_argument("--output", "-o", help="write to this path instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ustat-assoc", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a sample")
    _add_scheme_args(p)
    p.add_argument("--n", type=int, required=True)
    _add_output_args(p, default="csv")

    p = sub.add_parser("gini", help="Gini mean difference of a file or generated sample")
    p.add_argument("--input", help="sample file (CSV with header x, or JSON)")
    _add_scheme_args(p, seed_required=False)
    p.add_argument("--n", type=int)
    p.add_argument("--naive", action="store_true", help="use the O(n^2) pairwise sum")
    _add_output_args(p)

    p = sub.add_parser("estimate-sigma", help="plug-in block estimate of sigma_U")
    p.add_argument("--input")
    _add_scheme_args(p, seed_required=False)
    p.add_argument("--n", type=int)
    p.add_argument("--exponent", type=float, default=0.6, help="block length exponent")
    p.add_argument("--ell", type=int, help="explicit block length")
    p.add_argument("--block-range", choices=[b.value for b in BlockRange], default="lemma")
    _add_output_args(p, formats=("json",))

    p = sub.add_parser("variation", help="Vitali / Hardy-Krause variation of a grid CSV")
    p.add_argument("--input", required=True)
    p.add_argument("--hk", action="store_true", help="also compute Hardy-Krause variation")
    _add_output_args(p, formats=("json",))

    p = sub.add_parser("jointdf", help="lag-k joint distribution function on a grid")
    p.add_argument("--input")
    _add_scheme_args(p, seed_required=False)
    p.add_argument("--n", type=int)
    p.add_argument("--lag", type=int, default=1)
    p.add_argument("--grid-s", type=float, nargs="+")
    p.add_argument("--grid-t", type=float, nargs="+")
    p.add_argument("--grid-size", type=int, default=11,
                   help="points per axis spanning the sample range when no grid is given")
    _add_output_args(p, formats=("csv",), default="csv")

    p = sub.add_parser("table", help="replication summaries (simulation table rows)")
    _add_scheme_args(p)
    p.add_argument("--n", type=int, nargs="+", required=True)
    p.add_argument("--reps", type=int, default=2000)
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--exponent", type=float, default=0.6)
    p.add_argument("--block-range", choices=[b.value for b in BlockRange], default="lemma")
    _add_output_args(p, default="csv")

    p = sub.add_parser("clt-check", help="standardized Gini values and normality summaries")
    _add_scheme_args(p)
    p.add_argument("--n", type=int, nargs="+", required=True)
    p.add_argument("--reps", type=int, default=2000)
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--oracle", choices=["auto", "table", "quadrature", "long-run"], default="auto")
    _add_output_args(p, formats=("json",))

    p = sub.add_parser("sup-check", help="sup-deviation statistic along one sample path")
    _add_scheme_args(p)
    p.add_argument("--n", type=int, nargs="+", default=[250, 500, 1000, 2000])
    p.add_argument("--u", type=float, default=1.1)
    p.add_argument("--p", type=float, default=0.85)
    p.add_argument("--grid-size", type=int, default=1000)
    _add_output_args(p, formats=("json",))
    return parser


def _scheme(args) -> GeneratorScheme:
    if args.scheme and (args.family or args.m is not None):
        # explicit overrides on top of a label
        base = args.scheme
        return GeneratorScheme(Family(args.family or base.family), args.m or base.m)
    if args.scheme:
        return args.scheme
    if args.family and args.m is not None:
        return GeneratorScheme(Family(args.family), args.m)
    raise UsageError("give --scheme, or both --family and --m")


def _read_sample(path: str) -> Sample:
    text = Path(path).read_text()
    if text.lstrip().startswith(("{", "[")):
        data = json.loads(text)
        if isinstance(data, list):
            return Sample(data)
        return Sample.from_json(text)
    return Sample.from_csv(text)


def _sample(args) -> Sample:
    if args.input:
        return _read_sample(args.input)
    if args.n is None or args.seed is None:
        raise UsageError("give --input, or a scheme with --n and --seed")
    return generate(_scheme(args), args.n, args.seed)


def _emit(text: str, args):
    if not text.endswith("\n"):
        text += "\n"
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)


def _json(obj) -> str:
    return json.dumps(obj, indent=2)


def _cmd_gen(args):
    sample = generate(_scheme(args), args.n, args.seed)
    _emit(sample.to_json() if args.format == "json" else sample.to_csv(), args)


def _cmd_gini(args):
    sample = _sample(args)
    res = u_stat_degree2(gini_kernel(), sample) if args.naive else gini_fast(sample)
    if args.format == "csv":
        _emit(f"value,n\n{res.value!r},{res.n}", args)
    else:
        _emit(_json({"value": res.value, "n": res.n, "degree": res.degree, "kernel": res.kernel}),
              args)


def _cmd_estimate_sigma(args):
    sample = _sample(args)
    ell = args.ell if args.ell is not None else block_length(sample.n, args.exponent)
    est = b_n_hat(sample, ell, args.block_range)
    _emit(_json(est.to_dict()), args)


def _cmd_variation(args):
    grid = GridFunction.from_csv(Path(args.input).read_text())
    report = hk_variation(grid) if args.hk else VariationReport(vitali_variation(grid))
    _emit(_json(report.to_dict()), args)


def _cmd_jointdf(args):
    sample = _sample(args)
    lo, hi = float(np.min(sample.values)), float(np.max(sample.values))
    gs = args.grid_s or np.linspace(lo, hi, args.grid_size)
    gt = args.grid_t or np.linspace(lo, hi, args.grid_size)
    _emit(joint_df_grid(sample, args.lag, gs, gt).to_csv(), args)


def _cmd_table(args):
    scheme = _scheme(args)
    rows = []
    for n in args.n:
        mc._progress(f"{scheme.name}: n={n}, r={args.reps}")
        rows.append(mc.run_table(scheme, n, args.reps, args.seed, workers=args.workers,
                                 exponent=args.exponent, block_range=args.block_range))
    if args.format == "json":
        _emit(_json([r.to_dict() for r in rows]), args)
    else:
        _emit(mc.summaries_to_csv(rows), args)


def _cmd_clt(args):
    scheme = _scheme(args)
    out = []
    for n in args.n:
        mc._progress(f"{scheme.name}: n={n}, r={args.reps}")
        diag = mc.clt_diagnostic(scheme, n, args.reps, args.seed, workers=args.workers,
                                 oracle=args.oracle)
        out.append(diag.to_dict())
    _emit(_json(out), args)


def _cmd_sup(args):
    scheme = _scheme(args)
    pts = mc.sup_deviation_series(scheme, args.n, args.u, args.p, args.grid_size, args.seed)
    _emit(_json([{"n": p.n, "statistic": p.statistic, "u": p.u, "p": p.p} for p in pts]), args)


_COMMANDS = {
    "gen": _cmd_gen,
    "gini": _cmd_gini,
    "estimate-sigma": _cmd_estimate_sigma,
    "variation": _cmd_variation,
    "jointdf": _cmd_jointdf,
    "table": _cmd_table,
    "clt-check": _cmd_clt,
    "sup-check": _cmd_sup,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _COMMANDS[args.command](args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"{parser.prog}: error: {exc}", file=sys.stderr)
        return 2
    except (InvalidArgumentError, UnsupportedOperationError, ResourceLimitError,
            RequiresOracleError, OSError, ValueError) as exc:
        print(f"{parser.prog}: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
