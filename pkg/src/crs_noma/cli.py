"""Command-line experiment runner.

Examples::

    crs-noma --preset paper-fig2a --methods analytic,mc --out fig2a.csv
    crs-noma --config link.cfg --antennas 2x2,2x4 --snr-db 0:40:5 --methods analytic,quadrature
    crs-noma --validate
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import fields
from pathlib import Path

from .model import ConfigError, SystemConfig, reference_config, validate_noma_feasibility
from .oracle.montecarlo import OMA_COMBINERS, OMA_MRC_ACROSS_SLOTS
from .results import write
from .sweep import PRESETS, SweepSpec, parse_antennas, parse_methods, parse_snr_range, run_sweep, with_overrides
from .validation import run_validation, summarize

_INT_KEYS = {"n_r", "n_d", "antenna_cap"}


def load_config(path: str | Path) -> SystemConfig:
    """Read a flat ``key = value`` file whose keys are ``SystemConfig`` fields.

    Blank lines and ``#`` comments are ignored.
    """
    known = {f.name for f in fields(SystemConfig)}
    values = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror or exc}") from exc
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key=value, got {raw.strip()!r}")
        key, val = (s.strip() for s in line.split("=", 1))
        if key not in known:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        try:
            values[key] = int(val) if key in _INT_KEYS else float(val)
        except ValueError:
            raise ConfigError(f"{path}:{lineno}: bad value for {key}: {val!r}") from None
    return SystemConfig(**values)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="crs-noma",
        description="Average rates and outage of NOMA cooperative relaying with SC/MRC receive diversity.",
    )
    p.add_argument("--config", metavar="PATH", help="flat key=value system configuration")
    p.add_argument("--preset", choices=sorted(PRESETS), help="figure sweep preset")
    p.add_argument("--methods", metavar="LIST", help="comma list of analytic, quadrature, mc")
    p.add_argument("--snr-db", metavar="START:STOP:STEP", help="transmit SNR grid in dB, stop inclusive")
    p.add_argument("--antennas", metavar="NrxNd,...", help='antenna pairs, e.g. "1x1,2x2"')
    p.add_argument("--trials", type=int, metavar="N", help="Monte Carlo trials per point")
    p.add_argument("--seed", type=int, default=0, metavar="N")
    p.add_argument("--out", metavar="PATH", default="-", help="output file (default stdout)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--validate", action="store_true", help="run the closed-form/quadrature/Monte Carlo agreement suite")
    p.add_argument("--oma-combiner", choices=OMA_COMBINERS, default=OMA_MRC_ACROSS_SLOTS,
                   help="how the OMA destination combines the two slots")
    p.add_argument("--workers", type=int, metavar="N", help="worker threads (capped by $CRS_NOMA_THREADS)")
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    try:
        methods = parse_methods(args.methods) if args.methods else None
        antennas = parse_antennas(args.antennas) if args.antennas else None
        snr_db = parse_snr_range(args.snr_db) if args.snr_db else None
    except ValueError as exc:
        parser.error(str(exc))
    if args.trials is not None and args.trials < 1:
        parser.error("--trials must be >= 1")
    if args.workers is not None and args.workers < 1:
        parser.error("--workers must be >= 1")

    try:
        cfg = load_config(args.config) if args.config else reference_config()
    except ConfigError as exc:
        print(f"crs-noma: config error: {exc}", file=sys.stderr)
        return 1
    report = validate_noma_feasibility(cfg)
    if not report.feasible:
        print(f"crs-noma: {report.message}", file=sys.stderr)
        return 1

    if args.validate:
        kwargs = {}
        if args.trials:
            kwargs.update(rate_trials=args.trials, outage_trials=args.trials)
        results = run_validation(cfg, seed=args.seed, workers=args.workers,
                                 antennas=antennas, snr_db=snr_db, **kwargs)
        for line in summarize(results):
            print(line)
        ok = all(r.ok for r in results)
        print("validation passed" if ok else "validation FAILED")
        return 0 if ok else 1

    base = PRESETS[args.preset] if args.preset else SweepSpec()
    spec = with_overrides(
        base,
        cfg=cfg,
        methods=methods,
        antennas=antennas,
        snr_db=snr_db,
        rate_trials=args.trials,
        outage_trials=args.trials,
        seed=args.seed,
        oma_combiner=args.oma_combiner,
        workers=args.workers,
    )
    try:
        rows = run_sweep(spec)
    except ConfigError as exc:
        print(f"crs-noma: config error: {exc}", file=sys.stderr)
        return 1
    try:
        write(rows, args.out, args.format)
    except OSError as exc:
        print(f"crs-noma: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
