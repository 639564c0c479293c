"""Command-line entry point: run an experiment, write CSV plus a run manifest.

Exit codes: 0 success, 2 configuration problem, 3 I/O problem, 4 infeasible
(a solve or a whole sweep has no feasible point). Output files are written
via temp-then-rename so an interrupted run never leaves a truncated CSV.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import os
import subprocess
import sys
import tempfile
import time
from dataclasses import asdict, replace
from pathlib import Path

from . import __version__
from .errors import ConfigError, InfeasibleError, InvalidParamsError
from .montecarlo import (
    ALL_PROTOCOLS,
    EXPERIMENTS,
    SweepSpec,
    run_protocol_sweep,
    run_two_user_sweep,
)
from .multiuser import ProtocolKind
from .params import (
    SystemParams,
    config_snapshot,
    derive_constants,
    load_config,
)
from .twouser import solve_two_user

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3
EXIT_INFEASIBLE = 4

EXPERIMENT_NAMES = tuple(EXPERIMENTS) + ("custom-sweep", "solve-once")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tpass",
        description=(
            "Simulate and optimize a transmit pinching-antenna system serving "
            "one wired and multiple wireless users over a single waveguide."
        ),
    )
    parser.add_argument("--config", metavar="PATH", help="key = value parameter file")
    parser.add_argument(
        "--experiment",
        required=True,
        choices=EXPERIMENT_NAMES,
        help="which preset experiment (or custom-sweep / solve-once) to run",
    )
    parser.add_argument("--trials", type=int, help="trials per sweep point")
    parser.add_argument("--seed", type=int, help="override the base RNG seed")
    parser.add_argument("--out", default="out", metavar="DIR", help="output directory")
    parser.add_argument(
        "--protocols",
        metavar="LIST",
        help="comma-separated subset of FRFP,FRAP,ARFP,ARAP",
    )
    parser.add_argument(
        "--full-scale",
        action="store_true",
        help="run 1000 trials per point instead of the desk-scale default",
    )
    parser.add_argument("--workers", type=int, default=1, help="parallel trial workers")
    parser.add_argument(
        "--q-grid", type=int, help="override the 1D search resolution"
    )
    parser.add_argument(
        "--ue", metavar="X,Y", help="user position for solve-once, e.g. 50,0"
    )
    parser.add_argument(
        "--delta", type=float, help="pin the radiation split in solve-once"
    )
    parser.add_argument(
        "--sweep-param", choices=("D_x", "P_max", "K"), help="custom-sweep parameter"
    )
    parser.add_argument(
        "--sweep-values", metavar="LIST", help="comma-separated sweep values"
    )
    parser.add_argument(
        "--mode",
        choices=("two-user", "multiuser"),
        default="multiuser",
        help="custom-sweep solver family",
    )
    return parser


def _format_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        if math.isnan(value):
            return ""
        return f"{value:.9g}"
    return str(value)


def _csv_text(fieldnames: list[str], rows: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(fieldnames)
    for row in rows:
        writer.writerow([_format_cell(row.get(name)) for name in fieldnames])
    return buf.getvalue()


def _write_atomic(path: Path, text: str) -> None:
    fd, tmp = tempfile.mkstemp(dir=str(path.parent), prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _version_string() -> str:
    try:
        probe = subprocess.run(
            ["git", "rev-parse", "--short", "HEAD"],
            capture_output=True,
            text=True,
            cwd=os.path.dirname(os.path.abspath(__file__)),
            timeout=5,
        )
        if probe.returncode == 0 and probe.stdout.strip():
            return f"{__version__}+g{probe.stdout.strip()}"
    except OSError:
        pass
    return __version__


def _parse_protocols(raw: str | None) -> tuple:
    if not raw:
        return ALL_PROTOCOLS
    kinds = []
    for token in raw.split(","):
        token = token.strip().upper()
        try:
            kinds.append(ProtocolKind[token])
        except KeyError:
            raise ConfigError(
                f"unknown protocol {token!r}; choose from FRFP, FRAP, ARFP, ARAP"
            ) from None
    return tuple(kinds)


def _parse_ue(raw: str | None) -> tuple:
    if not raw:
        raise ConfigError("solve-once needs --ue X,Y")
    parts = [p for p in raw.split(",") if p.strip()]
    if len(parts) not in (2, 3):
        raise ConfigError(f"--ue needs 2 or 3 coordinates, got {raw!r}")
    return tuple(float(p) for p in parts)


def _solve_once(args, params: SystemParams) -> int:
    ue = _parse_ue(args.ue)
    solution = solve_two_user(ue, params, delta=args.delta)
    payload = asdict(solution)
    payload["sic_order"] = solution.sic_order.value
    payload["ue"] = list(ue)
    print(json.dumps(payload, indent=2, sort_keys=True))
    return EXIT_OK


def _custom_sweep_rows(args, params: SystemParams):
    if not args.sweep_param or not args.sweep_values:
        raise ConfigError("custom-sweep needs --sweep-param and --sweep-values")
    raw_values = [v for v in args.sweep_values.split(",") if v.strip()]
    if args.sweep_param == "K":
        values = tuple(int(v) for v in raw_values)
    else:
        values = tuple(float(v) for v in raw_values)
    spec = SweepSpec(
        param=args.sweep_param,
        values=values,
        protocols=_parse_protocols(args.protocols),
        trials=params.n_trials,
    )
    if args.mode == "two-user":
        _, stats = run_two_user_sweep(spec, params, n_workers=args.workers)
    else:
        _, stats = run_protocol_sweep(
            spec, params, q_grid=args.q_grid, n_workers=args.workers
        )
    rows = []
    for s in stats:
        row = asdict(s)
        row[args.sweep_param] = row.pop("sweep_value")
        rows.append(row)
    fields = [args.sweep_param] + [
        f for f in rows[0] if f != args.sweep_param
    ]
    return fields, rows


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:]) if argv is None else list(argv)
    parser = build_parser()
    args = parser.parse_args(argv)

    try:
        params = SystemParams()
        if args.config:
            params = load_config(args.config, base=params)
        if args.seed is not None:
            params = replace(params, rng_seed=args.seed)
        if args.full_scale:
            params = replace(params, n_trials=1000)
        if args.trials is not None:
            params = replace(params, n_trials=args.trials)
        params.validate()

        if args.experiment == "solve-once":
            return _solve_once(args, params)

        started = time.monotonic()
        if args.experiment == "custom-sweep":
            fieldnames, rows = _custom_sweep_rows(args, params)
        else:
            runner = EXPERIMENTS[args.experiment]
            fieldnames, rows = runner(
                params,
                trials=params.n_trials,
                protocols=_parse_protocols(args.protocols),
                q_grid=args.q_grid,
                n_workers=args.workers,
            )
        elapsed = time.monotonic() - started

        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        csv_name = f"{args.experiment}.csv"
        _write_atomic(out_dir / csv_name, _csv_text(fieldnames, rows))

        snapshot = config_snapshot(params)
        manifest = {
            "experiment": args.experiment,
            "version": _version_string(),
            "created_utc": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
            "runtime_seconds": round(elapsed, 3),
            "argv": argv,
            "config": snapshot,
            "config_hash": hashlib.sha256(
                json.dumps(snapshot, sort_keys=True).encode()
            ).hexdigest()[:12],
            "derived_constants": asdict(derive_constants(params)),
            "outputs": [csv_name],
        }
        _write_atomic(out_dir / "manifest.json", json.dumps(manifest, indent=2) + "\n")

        if not rows:
            print("error: experiment produced no rows", file=sys.stderr)
            return EXIT_INFEASIBLE
        fractions = [r["feasible_fraction"] for r in rows if "feasible_fraction" in r]
        if fractions and max(fractions) == 0.0:
            print(
                "error: every sweep point was infeasible; see the reason column",
                file=sys.stderr,
            )
            return EXIT_INFEASIBLE
        return EXIT_OK

    except (ConfigError, InvalidParamsError, ValueError) as err:
        print(f"config error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except InfeasibleError as err:
        print(f"infeasible: {err}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except OSError as err:
        print(f"io error: {err}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
