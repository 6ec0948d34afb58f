"""Command-line experiment runner.

Comma-separated ``--stream`` / ``--detector`` values form a matrix of
cells; a single value of each runs one cell.  ``--dump PATH`` writes the
synthetic stream to CSV instead of running experiments.  A config file
(``--config``) supplies any flag as ``key=value`` lines (``#`` starts a
comment); explicit flags win over the file.

Exit codes: 0 success, 2 usage error, 3 data error, 4 internal error.
"""

from __future__ import annotations

import argparse
import sys
from typing import Optional

from .errors import DataFormatError, UsageError
from .experiments import (
    DETECTORS,
    ExperimentConfig,
    format_console_table,
    run_matrix,
)
from .streams import StreamSpec, dump_stream

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_INTERNAL = 4

_FLAGS = ("stream", "detector", "runs", "seed", "window-size", "delta",
          "accept-delay", "noise", "policy", "out", "dump", "set", "config")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="driftbench",
        description="Run drift-detection experiments over synthetic or CSV "
                    "streams and report acceptable-delay scores.")
    parser.add_argument("--stream", help="comma-separated stream names "
                        "(sine1, mixed, circles, led) and/or CSV paths")
    parser.add_argument("--detector", help="comma-separated detector names: "
                        + ", ".join(sorted(DETECTORS)))
    parser.add_argument("--runs", type=int, help="runs per cell (default 100)")
    parser.add_argument("--seed", type=int, help="base seed; run i uses seed+i "
                        "(default 1)")
    parser.add_argument("--window-size", type=int, dest="window_size",
                        help="detector window size (default 25, or 100 for "
                        "circles/led)")
    parser.add_argument("--delta", type=float, help="confidence level of the "
                        "windowed detectors (default 1e-6)")
    parser.add_argument("--accept-delay", type=int, dest="accept_delay",
                        help="acceptable delay length (default 250, or 1000 "
                        "for circles/led)")
    parser.add_argument("--noise", type=float, help="class noise rate of "
                        "synthetic streams (default 0.10)")
    parser.add_argument("--policy", help="adaptation policy: reset (default), "
                        "none, or blind:<period>")
    parser.add_argument("--out", help="per-run CSV path (aggregate rows go to "
                        "<out stem>_aggregate<ext>)")
    parser.add_argument("--dump", help="write the synthetic stream to this "
                        "CSV path and exit")
    parser.add_argument("--set", action="append", default=None, metavar="K=V",
                        help="detector- or stream-specific parameter override "
                        "(repeatable); stream keys: length, zeta, drift_every")
    parser.add_argument("--config", help="key=value config file supplying any "
                        "flag")
    return parser


def _read_config_file(path) -> dict:
    values = {}
    try:
        with open(path, encoding="utf-8") as handle:
            for line_no, raw in enumerate(handle, start=1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise UsageError(
                        f"{path}: line {line_no}: expected key=value, got {raw!r}")
                key, value = line.split("=", 1)
                key = key.strip().replace("-", "_")
                if key.replace("_", "-") not in _FLAGS:
                    raise UsageError(f"{path}: line {line_no}: unknown key {key!r}")
                if key == "set":
                    values.setdefault("set", []).append(value.strip())
                else:
                    values[key] = value.strip()
    except OSError as exc:
        raise UsageError(f"cannot read config file {path}: {exc}") from exc
    return values


def _parse_set_args(pairs) -> dict:
    params = {}
    for pair in pairs or ():
        if "=" not in pair:
            raise UsageError(f"--set expects key=value, got {pair!r}")
        key, value = pair.split("=", 1)
        try:
            params[key.strip()] = float(value)
        except ValueError as exc:
            raise UsageError(f"--set {key}: {value!r} is not a number") from exc
    return params


_CASTS = {"runs": int, "seed": int, "window_size": int, "delta": float,
          "accept_delay": int, "noise": float}


def _merge_config(args: argparse.Namespace) -> argparse.Namespace:
    if not args.config:
        return args
    file_values = _read_config_file(args.config)
    for key, value in file_values.items():
        if key == "set":
            merged = list(value) + list(args.set or [])
            args.set = merged
        elif getattr(args, key, None) is None:
            cast = _CASTS.get(key, str)
            try:
                setattr(args, key, cast(value))
            except ValueError as exc:
                raise UsageError(f"config {key}: bad value {value!r}") from exc
    return args


def main(argv: Optional[list[str]] = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        args = _merge_config(args)
        params = _parse_set_args(args.set)

        if args.dump:
            if not args.stream or "," in args.stream:
                raise UsageError("--dump needs exactly one synthetic --stream")
            spec = StreamSpec(family=args.stream,
                              length=int(params.get("length", 100_000)),
                              noise=args.noise if args.noise is not None else 0.10,
                              seed=args.seed if args.seed is not None else 1)
            dump_stream(spec, args.dump)
            return EXIT_OK

        if not args.stream:
            raise UsageError("--stream is required (or supply it via --config)")
        streams = [s.strip() for s in args.stream.split(",") if s.strip()]
        detectors = [d.strip() for d in (args.detector or "none").split(",")
                     if d.strip()]
        base = ExperimentConfig(
            stream=streams[0] if streams else "sine1",
            detector="none",
            runs=args.runs if args.runs is not None else 100,
            seed=args.seed if args.seed is not None else 1,
            window_size=args.window_size,
            delta=args.delta if args.delta is not None else 1e-6,
            accept_delay=args.accept_delay,
            noise=args.noise if args.noise is not None else 0.10,
            policy=args.policy or "reset",
            params=params)
        report = run_matrix(streams, detectors, base, out=args.out)
        table = format_console_table(report.aggregates)
        if table:
            print(table)
        for cell in report.errors:
            print(f"error: {cell.stream} x {cell.detector}: {cell.error}",
                  file=sys.stderr)
        if report.errors and not report.aggregates:
            if any(isinstance(c.error, (DataFormatError, OSError))
                   for c in report.errors):
                return EXIT_DATA
            return EXIT_USAGE
        return EXIT_OK
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DataFormatError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except Exception as exc:  # pragma: no cover - invariant violations
        print(f"internal error: {exc!r}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
