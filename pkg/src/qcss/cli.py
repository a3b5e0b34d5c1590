"""Command-line entry point: ``qcss build | validate | table | sweep``.

Every artifact echoes its generating configuration as ``# key=value`` lines.
The worker count is never echoed since it cannot change any result.
"""

from __future__ import annotations

import argparse
import csv
import io
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .bch import BchCode
from .bp import BpConfig
from .channel import run_trials_x
from .codefile import CodeFileError, degree_summary, read_code_file, validate_code, write_code_file
from .css import InsufficientPool, PoolExhausted, build_css_code
from .galois import NonPrimitivePolynomial
from .gf2 import rank_gf2
from .table import table_row

OUTPUT_DIR_ENV = "QCSS_OUTPUT_DIR"
SWEEP_COLUMNS = [
    "p_x", "trials", "block_errors", "estimate", "ci_low", "ci_high",
    "metric", "seed", "nonconverged", "mean_iterations",
]
TABLE_COLUMNS = ["m", "t", "N", "P_block", "p_z", "M_z", "Q_z", "p_x", "M_x", "Q_x", "Q"]
_NOT_ECHOED = {"config", "workers", "func", "command"}
_META_KEYS = {"tool", "version", "command"}


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.6g}"
    return str(v)


def _output_path(path: str | None, default_name: str) -> Path:
    base = Path(os.environ.get(OUTPUT_DIR_ENV, "."))
    p = Path(path) if path else Path(default_name)
    return p if p.is_absolute() else base / p


def _echo(args: argparse.Namespace) -> dict[str, str]:
    out = {"tool": "qcss", "version": __version__, "command": args.command}
    for k, v in sorted(vars(args).items()):
        if k in _NOT_ECHOED or v is None:
            continue
        if isinstance(v, (list, tuple)):
            v = ",".join(_fmt(x) for x in v)
        out[k] = _fmt(v)
    return out


def _read_config_file(path: str) -> dict[str, str]:
    values: dict[str, str] = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise SystemExit(f"{path}:{lineno}: expected key=value")
        key = key.strip().replace("-", "_")
        if key not in _META_KEYS:
            values[key] = value.strip()
    return values


def _parse_prim_poly(text: str) -> int:
    return int(text, 0)


def _parse_float_list(text: str) -> list[float]:
    return [float(tok) for tok in text.replace(",", " ").split()]


# -- subcommands -------------------------------------------------------------


def cmd_build(args: argparse.Namespace) -> int:
    try:
        code = BchCode.from_params(args.m, args.t, args.prim_poly)
        css = build_css_code(
            code, args.mx, seed=args.seed, pool_size=args.pool_size,
            tie_break=args.tie_break, avoid_4cycles=args.avoid_4cycles, workers=args.workers,
        )
    except (ValueError, NonPrimitivePolynomial, PoolExhausted, InsufficientPool) as exc:
        print(f"build failed: {exc}", file=sys.stderr)
        return 1
    if args.pool_size is None:
        args.pool_size = css.pool_size
    args.prim_poly = f"{code.field.prim_poly:#x}"
    out = _output_path(args.out, f"code_m{args.m}_t{args.t}_mx{args.mx}_s{args.seed}.qcss")
    out.parent.mkdir(parents=True, exist_ok=True)
    write_code_file(css, out, _echo(args))

    Q_z, Q_x, Q = css.rates()
    stats = css.metadata["pool_stats"]
    rank = rank_gf2(css.H_x)
    print(f"wrote {out}")
    print(f"N={css.N} M_z={css.M_z} M_x={css.M_x}")
    print(f"Q_z={Q_z:.3f} Q_x={Q_x:.3f} Q={Q:.3f}")
    print(f"rank(H^x)={rank} ({'full' if rank == css.M_x else 'DEFICIENT'})")
    print(f"degrees {degree_summary(css)}")
    print(f"pool acceptance {stats.accepted}/{stats.attempts} = {stats.acceptance_rate:.4f}"
          f" (duplicates {stats.duplicates})")
    return 0 if rank == css.M_x else 1


def cmd_validate(args: argparse.Namespace) -> int:
    try:
        css, _ = read_code_file(args.code)
    except (OSError, CodeFileError) as exc:
        print(f"{args.code}: {exc}", file=sys.stderr)
        return 2
    problems = validate_code(css)
    for p in problems:
        print(f"FAIL {p}")
    if problems:
        return 1
    Q_z, Q_x, Q = css.rates()
    print(f"OK N={css.N} t={css.bch.t} M_x={css.M_x} Q={Q:.3f} degrees {degree_summary(css)}")
    return 0


def cmd_table(args: argparse.Namespace) -> int:
    row = table_row(args.m, args.t, args.p_block, M_x=args.mx, asymmetry=args.asymmetry).as_dict()
    buf = io.StringIO()
    for k, v in _echo(args).items():
        buf.write(f"# {k}={v}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(TABLE_COLUMNS)
    w.writerow([_fmt(row[c]) for c in TABLE_COLUMNS])
    _emit(buf.getvalue(), args.out)
    return 0


def cmd_sweep(args: argparse.Namespace) -> int:
    try:
        css, _ = read_code_file(args.code)
    except (OSError, CodeFileError) as exc:
        print(f"{args.code}: {exc}", file=sys.stderr)
        return 2
    grid = list(args.px or [])
    if args.px_log:
        lo, hi, n = args.px_log
        grid.extend(np.geomspace(lo, hi, int(n)).tolist())
    if not grid:
        print("no p_x values given (use --px or --px-log)", file=sys.stderr)
        return 2

    buf = io.StringIO()
    for k, v in _echo(args).items():
        buf.write(f"# {k}={v}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SWEEP_COLUMNS)
    for p_x in grid:
        bp = BpConfig(p_x, max_iterations=args.max_iter, damping=args.damping) if p_x > 0 else None
        rep = run_trials_x(css, p_x, args.trials, args.metric, bp, args.seed, workers=args.workers)
        w.writerow([
            _fmt(p_x), rep.trials, rep.block_errors, _fmt(rep.estimate), _fmt(rep.ci_low),
            _fmt(rep.ci_high), args.metric, args.seed, rep.nonconverged, _fmt(rep.mean_iterations),
        ])
        if args.out:
            print(f"p_x={p_x:.4g} errors={rep.block_errors}/{rep.trials}", file=sys.stderr)
    _emit(buf.getvalue(), args.out)
    return 0


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    path = _output_path(out, out)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)


# -- parser ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qcss", description="Quantum CSS codes from BCH and LDPC checks.")
    parser.add_argument("--version", action="version", version=f"qcss {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key=value file supplying defaults for any option")
    common.add_argument("--workers", type=int, default=1, help="worker processes (results do not depend on it)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", parents=[common], help="generate a code and write a code file")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--mx", type=int, required=True, help="number of x-checks")
    p.add_argument("--prim-poly", type=_parse_prim_poly, default=None)
    p.add_argument("--pool-size", type=int, default=None, help="candidate pool size (default 40*M_x)")
    p.add_argument("--tie-break", choices=["uniform", "load"], default="load")
    p.add_argument("--avoid-4cycles", action=argparse.BooleanOptionalAction, default=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("validate", parents=[common], help="check a code file's invariants")
    p.add_argument("code")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("table", parents=[common], help="analytic p_z and rate row")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--p-block", type=float, default=1e-4)
    p.add_argument("--mx", type=int, default=None)
    p.add_argument("--asymmetry", type=float, default=None, help="ratio p_z/p_x; fills the p_x column")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("sweep", parents=[common], help="x-channel block error over a p_x grid")
    p.add_argument("code")
    p.add_argument("--px", type=_parse_float_list, default=None, help="comma-separated p_x values")
    p.add_argument("--px-log", type=float, nargs=3, metavar=("LO", "HI", "N"), default=None)
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--metric", choices=["strict", "degenerate"], default="strict")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-iter", type=int, default=200)
    p.add_argument("--damping", type=float, default=0.3, help="check-message damping (0 = plain sum-product)")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_sweep)
    return parser


def _apply_config_file(parser: argparse.ArgumentParser, argv: list[str]) -> argparse.Namespace:
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    subparsers = parser._subparsers._group_actions[0].choices
    command = next((a for a in argv if a in subparsers), None)
    if not known.config or command is None:
        return parser.parse_args(argv)
    sub = subparsers[command]
    actions = {a.dest: a for a in sub._actions}
    converted = {}
    for key, raw in _read_config_file(known.config).items():
        action = actions.get(key)
        if action is None or key in ("help", "config"):
            raise SystemExit(f"{known.config}: unknown option {key!r} for {command}")
        if isinstance(action, argparse.BooleanOptionalAction):
            val = raw.lower() in ("1", "true", "yes", "on")
        elif isinstance(action.nargs, int):
            val = [action.type(tok) for tok in raw.replace(",", " ").split()]
        else:
            val = action.type(raw) if action.type else raw
        action.required = False
        converted[key] = val
    # flags on the command line still win over the file
    sub.set_defaults(**converted)
    return parser.parse_args(argv)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    args = _apply_config_file(parser, argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
