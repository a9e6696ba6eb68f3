"""Command line runner: ``ehrelay {eval,sweep-snr,sweep-pex,diversity}``."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

from .analytic import FitError
from .experiments import (
    SweepResult,
    SweepSpec,
    load_config,
    run,
    run_single_point,
    spec_from_config,
)
from .model import SystemParams, ValidationError
from .report import emit_outputs

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_IO = 2
EXIT_CHECK = 3

COMMANDS = {
    "eval": "single_point",
    "sweep-snr": "snr_sweep",
    "sweep-pex": "pex_sweep",
    "diversity": "diversity",
}



class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_VALIDATION, f"{self.prog}: error: {message}\n")


def _pex_list(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", type=Path, help="JSON file with system/energy/sweep sections")
    common.add_argument("--trials", type=int, help="Monte Carlo trials per point")
    common.add_argument("--seed", type=int, help="PRNG seed")
    common.add_argument("--workers", type=int, help="parallel worker processes")
    common.add_argument("--confidence", type=float, help="confidence level of MC intervals")
    common.add_argument("--out-dir", type=Path, default=Path("."), help="output directory")
    common.add_argument(
        "--snr-db",
        help="start:stop:step in dB for sweeps, or a single value for eval / sweep-pex",
    )
    common.add_argument("--pex", type=_pex_list, help="comma-separated p_ex values")
    common.add_argument("--svg", action=argparse.BooleanOptionalAction, default=None, help="write SVG chart")
    common.add_argument("--png", action="store_true", help="also render a PNG with matplotlib")
    common.add_argument("--script", action="store_true", help="write a plotting script for the CSV")
    common.add_argument(
        "--check",
        action="store_true",
        help="exit 3 unless every MC value lies within 4 standard errors of the exact value",
    )
    common.add_argument("-v", "--verbose", action="store_true")

    parser = _Parser(
        prog="ehrelay",
        description="Outage probability of an energy-harvesting AF relay network over Rayleigh fading.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("eval", parents=[common], help="evaluate one operating point")
    sub.add_parser("sweep-snr", parents=[common], help="outage vs SNR, one curve per p_ex")
    sub.add_parser("sweep-pex", parents=[common], help="outage vs p_ex at a fixed SNR")
    div = sub.add_parser("diversity", parents=[common], help="fit diversity order over a high-SNR window")
    div.add_argument("--source", choices=("exact", "mc"), help="curve used for the slope fit")
    return parser


def _make_spec(args, mode: str, config: dict) -> SweepSpec:
    overrides = {
        "trials": args.trials,
        "seed": args.seed,
        "workers": args.workers,
        "confidence": args.confidence,
        "pex_values": args.pex,
        "diversity_source": getattr(args, "source", None),
    }
    if args.snr_db is not None:
        if ":" in args.snr_db:
            overrides["snr_db_range"] = args.snr_db
        else:
            try:
                overrides["fixed_snr_db"] = float(args.snr_db)
            except ValueError:
                raise ValidationError("snr_db", f"not a number: {args.snr_db!r}") from None
    outputs = list(config.get("sweep", {}).get("outputs", ["csv", "svg"]))
    if "csv" not in outputs:
        outputs.append("csv")
    if args.svg is True and "svg" not in outputs:
        outputs.append("svg")
    if args.svg is False and "svg" in outputs:
        outputs.remove("svg")
    if args.png:
        outputs.append("png")
    if args.script:
        outputs.append("script")
    overrides["outputs"] = tuple(outputs)
    return spec_from_config(config, mode, overrides)


def _print_table(result: SweepResult, out=None) -> None:
    out = out or sys.stdout
    print(
        f"{'snr_db':>7} {'p_ex':>8} {'direct':>11} {'exact':>11} {'closed':>11} {'mc':>11} {'mc_se':>10}",
        file=out,
    )
    for r in result.rows:
        flag = " *" if r.closed_clamped else ""
        print(
            f"{r.snr_db:7.2f} {r.p_ex:8.3g} {r.p_direct_exact:11.4e} {r.p_coop_exact:11.4e} "
            f"{r.p_coop_closed:11.4e} {r.p_mc:11.4e} {r.mc_se:10.3e}{flag}",
            file=out,
        )
    if any(r.closed_clamped for r in result.rows):
        print("* closed form exceeded 1 and was clamped", file=out)
    for f in result.fits:
        print(
            f"diversity p_ex={f.p_ex:g} ({f.source}): fitted d={f.fit.slope:.4f} "
            f"predicted d={f.predicted} (points={f.fit.points_used}, rms={f.fit.residual_rms:.2e})",
            file=out,
        )


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    mode = COMMANDS[args.command]
    try:
        config = load_config(args.config) if args.config else {}
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION

    try:
        spec = _make_spec(args, mode, config)
        system = config.get("system", {})
        if mode == "single_point" and args.snr_db is None and {"p_s", "p_r"} <= set(system):
            result = run_single_point(spec, SystemParams(**system))
        else:
            result = run(spec)
    except (ValidationError, FitError, ValueError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION

    _print_table(result)
    try:
        paths = emit_outputs(result, spec, args.out_dir)
    except OSError as exc:
        print(f"error: cannot write outputs: {exc}", file=sys.stderr)
        return EXIT_IO
    for p in paths:
        print(f"wrote {p}")

    if args.check:
        failed = result.failed_checks()
        if failed:
            for r in failed:
                print(
                    f"check failed: snr_db={r.snr_db:g} p_ex={r.p_ex:g} mc={r.p_mc:.6g} "
                    f"exact={r.p_coop_exact:.6g}",
                    file=sys.stderr,
                )
            return EXIT_CHECK
        print(f"check passed: {len(result.rows)} rows within 4 standard errors")
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
