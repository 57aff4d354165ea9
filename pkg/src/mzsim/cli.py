"""Command-line front end.

Exit codes: 0 success, 1 I/O failure, 2 usage or validation error,
3 data mismatch between records and coin history.
"""

from __future__ import annotations

import argparse
import math
import sys
from datetime import datetime, timezone
from pathlib import Path

from . import __version__
from .cipher import partition_by_coins, read_coin_file, write_coin_file, coins_from_records
from .datafiles import (
    MalformedFile,
    RunManifest,
    format_records,
    read_counts,
    read_records,
    write_counts,
)
from .errors import LengthMismatch, MixedPlans
from .mixtures import NoiseModel, fringe_contrast, rho_bar_coin, rho_bar_gaussian
from .qmath import eig_hermitian, von_neumann_entropy
from .svgplot import render_counts_svg
from .trials import DEFAULT_PHI_STEP, Coin, ExperimentPlan, Mode, aggregate, run_experiment

EXIT_OK, EXIT_IO, EXIT_USAGE, EXIT_MISMATCH = 0, 1, 2, 3

RECORDS_NAME = "records.csv"
COUNTS_NAME = "counts.csv"
COINS_NAME = "coins.txt"
MANIFEST_NAME = "manifest.txt"


class UsageError(Exception):
    pass


def _finite_float(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not math.isfinite(value):
        raise argparse.ArgumentTypeError(f"must be finite: {text!r}")
    return value


def _nonneg_float(text: str) -> float:
    value = _finite_float(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0: {text!r}")
    return value


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1: {text!r}")
    return value


def _u64(text: str) -> int:
    try:
        value = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if not 0 <= value < 2 ** 64:
        raise argparse.ArgumentTypeError(f"seed must be in [0, 2**64): {text!r}")
    return value


def _err(msg: str) -> None:
    print(f"mzsim: error: {msg}", file=sys.stderr)


# -- simulate -----------------------------------------------------------------

_PLAN_FLAGS = {
    "mode": "mode",
    "phi_start": "phi_start",
    "phi_step": "phi_step",
    "settings": "n_settings",
    "trials": "trials_per_setting",
    "sigma": "sigma",
    "seed": "seed",
}


def _plan_from_args(args) -> ExperimentPlan:
    if args.manifest:
        given = [f"--{k.replace('_', '-')}" for k in _PLAN_FLAGS if getattr(args, k) is not None]
        if given:
            raise UsageError(f"--manifest cannot be combined with {', '.join(given)}")
        return RunManifest.read(args.manifest).plan
    if args.mode is None:
        raise UsageError("--mode is required unless --manifest is given")
    kwargs = {field: getattr(args, flag) for flag, field in _PLAN_FLAGS.items()}
    kwargs = {k: v for k, v in kwargs.items() if v is not None}
    kwargs["mode"] = Mode(kwargs["mode"])
    try:
        return ExperimentPlan(**kwargs)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_simulate(args) -> int:
    try:
        plan = _plan_from_args(args)
    except UsageError as exc:
        _err(str(exc))
        return EXIT_USAGE
    except MalformedFile as exc:
        _err(str(exc))
        return EXIT_USAGE
    except OSError as exc:
        _err(f"cannot read manifest: {exc}")
        return EXIT_IO

    records, counts = run_experiment(plan, workers=args.workers)
    out = Path(args.out_dir)
    outputs = {"records_csv": RECORDS_NAME, "counts_csv": COUNTS_NAME}
    if plan.mode.randomized:
        outputs["coins_file"] = COINS_NAME
    manifest = RunManifest(
        plan=plan,
        tool_version=__version__,
        timestamp=datetime.now(timezone.utc).isoformat(timespec="seconds"),
        outputs=outputs,
    )
    try:
        out.mkdir(parents=True, exist_ok=True)
        with open(out / RECORDS_NAME, "w", encoding="utf-8", newline="") as fh:
            fh.write(format_records(records))
        write_counts(out / COUNTS_NAME, counts)
        if plan.mode.randomized:
            write_coin_file(out / COINS_NAME, coins_from_records(records))
        manifest.write(out / MANIFEST_NAME)
    except OSError as exc:
        _err(f"cannot write outputs: {exc}")
        return EXIT_IO

    print(f"{plan.n_trials} trials, {len(counts)} settings -> {out}")
    return EXIT_OK


# -- decrypt ------------------------------------------------------------------

def cmd_decrypt(args) -> int:
    try:
        records = read_records(args.records)
        coins = read_coin_file(args.coins)
    except OSError as exc:
        _err(str(exc))
        return EXIT_IO
    except (MalformedFile, ValueError) as exc:
        _err(str(exc))
        return EXIT_USAGE

    if all(r.coin is Coin.NONE for r in records):
        _err("records carry no coin flips; nothing to decrypt")
        return EXIT_USAGE
    try:
        heads, tails = partition_by_coins(records, coins)
        heads_counts, tails_counts = aggregate(heads), aggregate(tails)
    except LengthMismatch as exc:
        _err(str(exc))
        return EXIT_MISMATCH
    except MixedPlans as exc:
        _err(str(exc))
        return EXIT_USAGE

    out = Path(args.out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
        write_counts(out / "heads_counts.csv", heads_counts)
        write_counts(out / "tails_counts.csv", tails_counts)
    except OSError as exc:
        _err(f"cannot write outputs: {exc}")
        return EXIT_IO
    print(f"{len(heads)} heads / {len(tails)} tails trials -> {out}")
    return EXIT_OK


# -- entropy ------------------------------------------------------------------

def _entropy_rows(args) -> tuple[str, list[str]]:
    if args.model == "coin":
        if args.mu is not None or args.sigma is not None:
            raise UsageError("--mu/--sigma apply to --model gaussian only")
        if args.phi is not None:
            phis = args.phi
        else:
            start = args.phi_start if args.phi_start is not None else 0.0
            step = args.phi_step if args.phi_step is not None else DEFAULT_PHI_STEP
            n = args.settings if args.settings is not None else 33
            phis = [start + k * step for k in range(n)]
        rows = []
        for phi in phis:
            d = rho_bar_coin(phi)
            pair = eig_hermitian(d)
            rows.append(
                f"{phi!r},{pair.lambda_plus!r},{pair.lambda_minus!r},{von_neumann_entropy(d)!r}"
            )
        return "phi,lambda_plus,lambda_minus,entropy_bits", rows

    if args.phi is not None or args.phi_start is not None or args.settings is not None:
        raise UsageError("--phi/--phi-start/--settings apply to --model coin only")
    if args.sigma is None:
        raise UsageError("--model gaussian requires --sigma")
    rows = []
    for mu in args.mu if args.mu is not None else [0.0]:
        for sigma in args.sigma:
            n = NoiseModel(mu, sigma)
            rows.append(
                f"{mu!r},{sigma!r},{fringe_contrast(n)!r},{von_neumann_entropy(rho_bar_gaussian(n))!r}"
            )
    return "mu,sigma,contrast,entropy_bits", rows


def cmd_entropy(args) -> int:
    try:
        header, rows = _entropy_rows(args)
    except UsageError as exc:
        _err(str(exc))
        return EXIT_USAGE
    text = header + "\n" + "".join(r + "\n" for r in rows)
    if args.out:
        try:
            Path(args.out).write_text(text, encoding="utf-8")
        except OSError as exc:
            _err(f"cannot write {args.out}: {exc}")
            return EXIT_IO
    else:
        sys.stdout.write(text)
    return EXIT_OK


# -- plot ---------------------------------------------------------------------

def cmd_plot(args) -> int:
    try:
        table = read_counts(args.counts)
    except OSError as exc:
        _err(str(exc))
        return EXIT_IO
    except MalformedFile as exc:
        _err(str(exc))
        return EXIT_USAGE
    if len(table) == 0:
        _err(f"{args.counts}: no data rows")
        return EXIT_USAGE
    svg = render_counts_svg(table, title=args.title or "", overlay=args.overlay)
    try:
        Path(args.out).write_text(svg, encoding="utf-8")
    except OSError as exc:
        _err(f"cannot write {args.out}: {exc}")
        return EXIT_IO
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mzsim",
        description="Mach-Zehnder trial simulator with coin encryption and phase noise.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run an experiment and write CSV files")
    p.add_argument("--mode", choices=[m.value for m in Mode])
    p.add_argument("--phi-start", type=_finite_float, help="first phase setting (rad, default 0)")
    p.add_argument("--phi-step", type=_finite_float, help="phase increment (rad, default 2pi/32)")
    p.add_argument("--settings", type=_positive_int, help="number of phase settings (default 33)")
    p.add_argument("--trials", type=_positive_int, help="trials per setting (default 1000)")
    p.add_argument("--sigma", type=_nonneg_float, help="phase noise std-dev (rad), noisy modes")
    p.add_argument("--seed", type=_u64, help="64-bit seed (default 0)")
    p.add_argument("--manifest", help="take the plan from an earlier run's manifest")
    p.add_argument("--workers", type=_positive_int, default=1, help="worker threads")
    p.add_argument("--out-dir", default=".", help="output directory")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("decrypt", help="split a randomized run into heads and tails counts")
    p.add_argument("--records", required=True)
    p.add_argument("--coins", required=True)
    p.add_argument("--out-dir", default=".")
    p.set_defaults(func=cmd_decrypt)

    p = sub.add_parser("entropy", help="eigenvalues and entropy of the mixed states")
    p.add_argument("--model", choices=["coin", "gaussian"], required=True)
    p.add_argument("--phi", type=_finite_float, nargs="+")
    p.add_argument("--phi-start", type=_finite_float)
    p.add_argument("--phi-step", type=_finite_float)
    p.add_argument("--settings", type=_positive_int)
    p.add_argument("--mu", type=_finite_float, nargs="+")
    p.add_argument("--sigma", type=_nonneg_float, nargs="+")
    p.add_argument("--out", help="CSV path (default stdout)")
    p.set_defaults(func=cmd_entropy)

    p = sub.add_parser("plot", help="render a counts CSV as SVG")
    p.add_argument("--counts", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--overlay", choices=["heads", "tails", "flat"])
    p.add_argument("--title")
    p.set_defaults(func=cmd_plot)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
