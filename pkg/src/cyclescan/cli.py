"""Command-line entry points: ingest, analyze, cohort, devindex, synth."""

from __future__ import annotations

import argparse
import configparser
import os
import sys
from pathlib import Path

from .devindex import GROUP_LABELS
from .errors import CyclescanError
from .ingest import load_prices, log_returns
from .peaks import CYCLE_INTERVALS
from .pipeline import MarketInput, RunConfig, run_cohort, run_market
from .synth import SynthSpec, generate, write_price_csv

SEED_ENV = "CYCLESCAN_SEED"


def _add_analysis_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--lag", type=int, default=None, help="return lag in trading days")
    p.add_argument("--voices", type=int, default=None,
                   help="scale-grid voices per octave")
    p.add_argument("--level", type=float, default=None,
                   help="peak significance level (default 0.10)")
    p.add_argument("--coi-only", action="store_true", default=None,
                   help="restrict spectra to inside-coi cells")
    p.add_argument("--prominence", type=float, default=None,
                   help="peak prominence as a fraction of the scalegram max")
    p.add_argument("--amplitude-mode", choices=("abs", "real", "power"), default=None)
    p.add_argument("--tddma-window", type=int, default=None,
                   help="sliding window size (default 1000)")
    p.add_argument("--tddma-step", type=int, default=None,
                   help="sliding window step (default 1)")
    p.add_argument("--tddma-min-window", type=int, default=None)
    p.add_argument("--hurst-method", choices=("scale_fit", "tddma_mean"), default=None)


_CFG_KEYS = {
    "lag": ("lag", int),
    "voices": ("voices_per_octave", int),
    "level": ("significance_level", float),
    "coi_only": ("coi_only", lambda v: str(v).lower() in ("1", "true", "yes")),
    "prominence": ("prominence_fraction", float),
    "amplitude_mode": ("amplitude_mode", str),
    "tddma_window": ("tddma_window", int),
    "tddma_step": ("tddma_step", int),
    "tddma_min_window": ("tddma_min_window", int),
    "hurst_method": ("hurst_method", str),
    "mode": ("devindex_mode", str),
    "jobs": ("jobs", int),
    "out": ("out_dir", str),
}


def _config_from_file(path: str) -> dict:
    """Read the `[run]` and `[markets]` sections of a key-value config file."""
    parser = configparser.ConfigParser()
    read = parser.read(path)
    if not read:
        raise CyclescanError(f"cannot read config file {path}")
    values: dict = {}
    if parser.has_section("run"):
        for key, raw in parser.items("run"):
            if key not in _CFG_KEYS:
                raise CyclescanError(f"{path}: unknown config key {key!r}")
            name, conv = _CFG_KEYS[key]
            values[name] = conv(raw)
    inputs = []
    if parser.has_section("markets"):
        for market_id, raw in parser.items("markets"):
            parts = [p.strip() for p in raw.split(",")]
            if not parts or not parts[0]:
                raise CyclescanError(f"{path}: market {market_id!r} needs a path")
            group = parts[1] if len(parts) > 1 and parts[1] else None
            inputs.append(MarketInput(path=parts[0], market_id=market_id, group=group))
    if inputs:
        values["inputs"] = tuple(inputs)
    return values


def _build_config(args, inputs=None) -> RunConfig:
    """Config file first, command-line flags override."""
    values: dict = {}
    if getattr(args, "config", None):
        values.update(_config_from_file(args.config))
    flag_map = {
        "lag": "lag",
        "voices": "voices_per_octave",
        "level": "significance_level",
        "coi_only": "coi_only",
        "prominence": "prominence_fraction",
        "amplitude_mode": "amplitude_mode",
        "tddma_window": "tddma_window",
        "tddma_step": "tddma_step",
        "tddma_min_window": "tddma_min_window",
        "hurst_method": "hurst_method",
        "mode": "devindex_mode",
        "jobs": "jobs",
        "out": "out_dir",
    }
    for flag, key in flag_map.items():
        value = getattr(args, flag, None)
        if value is not None:
            values[key] = value
    if inputs:
        values["inputs"] = tuple(inputs)
    return RunConfig(**values)


def _parse_input_spec(spec: str) -> MarketInput:
    parts = spec.split(":")
    if len(parts) == 2:
        return MarketInput(path=parts[0], market_id=parts[1])
    if len(parts) == 3:
        return MarketInput(path=parts[0], market_id=parts[1], group=parts[2])
    raise CyclescanError(f"--input expects PATH:MARKET_ID[:GROUP], got {spec!r}")


def _cmd_ingest(args) -> int:
    prices = load_prices(args.path, args.market_id)
    returns = log_returns(prices, args.lag if args.lag is not None else 1)
    out = Path(args.out)
    with out.open("w", encoding="utf-8") as fh:
        fh.write("date,log_return\n")
        for date, value in zip(returns.dates, returns.values):
            fh.write(f"{date.isoformat()},{float(value)!r}\n")
    print(f"{returns.market_id}: {returns.n} returns (lag {returns.lag}) -> {out}")
    return 0


def _cmd_analyze(args) -> int:
    cfg = _build_config(args)
    market = MarketInput(path=args.path, market_id=args.market_id, group=args.group)
    report = run_market(cfg, market)
    present = [iv.label for iv, ok in
               zip(CYCLE_INTERVALS, report.interval_map.presence) if ok]
    print(f"{report.market_id}: N={report.n_returns}, "
          f"H_global={report.hurst_global.h:.3f} "
          f"(r2={report.hurst_global.r_squared:.3f}), "
          f"intervals present: {','.join(present) if present else 'none'}")
    print(f"outputs in {report.out_dir}")
    return 0


def _cmd_cohort(args) -> int:
    inputs = [_parse_input_spec(s) for s in args.input or []]
    cfg = _build_config(args, inputs=inputs or None)
    report = run_cohort(cfg, fixtures=args.fixtures)
    if report.development is not None:
        cls = report.development.classification
        print(f"|Pi|_max = {cls.pi_max:.4f}, borders = "
              f"({cls.border_lower:+.4f}, {cls.border_upper:+.4f})")
        for market in report.development.market_ids:
            pi = report.development.indices[market]
            print(f"  {market:14s} Pi = {pi:+.4f} -> {cls.classes[market]}")
    for note in (report.groupstats_note, report.development_note):
        if note:
            print(f"note: {note}")
    print(f"outputs in {Path(cfg.out_dir) / 'cohort'}")
    return 0


def _cmd_devindex(args) -> int:
    ns = argparse.Namespace(**{**vars(args), "input": None, "jobs": None})
    ns.fixtures = args.fixtures or "table4"
    return _cmd_cohort(ns)


def _cmd_synth(args) -> int:
    seed = args.seed
    if seed is None:
        seed = int(os.environ.get(SEED_ENV, "0"))
    def _floats(raw):
        return tuple(float(v) for v in raw.split(",")) if raw else ()
    spec = SynthSpec(
        kind=args.kind,
        n=args.n,
        hurst=args.hurst,
        periods=_floats(args.periods),
        amps=_floats(args.amps),
        phases=_floats(args.phases),
        noise_sigma=args.noise_sigma,
        seed=seed,
    )
    returns = generate(spec)
    write_price_csv(returns, args.out)
    print(f"{returns.market_id}: wrote {returns.n + 1} prices -> {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cyclescan",
        description="Cycle detection and scaling analysis of stock index returns",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="price CSV to log-return CSV")
    p.add_argument("path")
    p.add_argument("--market-id", required=True)
    p.add_argument("--lag", type=int, default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_ingest)

    p = sub.add_parser("analyze", help="full single-market analysis")
    p.add_argument("path")
    p.add_argument("--market-id", required=True)
    p.add_argument("--group", choices=GROUP_LABELS, default=None)
    p.add_argument("--out", default=None, help="output directory (default: out)")
    p.add_argument("--config", default=None, help="key-value config file")
    _add_analysis_options(p)
    p.set_defaults(func=_cmd_analyze)

    p = sub.add_parser("cohort", help="multi-market statistics and devindex")
    p.add_argument("--input", action="append",
                   help="PATH:MARKET_ID[:GROUP], repeatable")
    p.add_argument("--config", default=None, help="key-value config file")
    p.add_argument("--out", default=None)
    p.add_argument("--fixtures", choices=("table4",), default=None,
                   help="run devindex from the bundled 18-market fixture")
    p.add_argument("--mode", choices=("canonical", "formula"), default=None)
    p.add_argument("--jobs", type=int, default=None)
    _add_analysis_options(p)
    p.set_defaults(func=_cmd_cohort)

    p = sub.add_parser("devindex", help="Hurst-space development report")
    p.add_argument("--fixtures", choices=("table4",), default="table4")
    p.add_argument("--mode", choices=("canonical", "formula"), default=None)
    p.add_argument("--out", default=None)
    p.add_argument("--config", default=None)
    p.set_defaults(func=_cmd_devindex)

    p = sub.add_parser("synth", help="generate a synthetic price CSV")
    p.add_argument("--kind", choices=("white", "fgn", "harmonic", "composite"),
                   required=True)
    p.add_argument("--N", dest="n", type=int, required=True)
    p.add_argument("--H", dest="hurst", type=float, default=None)
    p.add_argument("--periods", default="", help="comma-separated trading days")
    p.add_argument("--amps", default="")
    p.add_argument("--phases", default="")
    p.add_argument("--noise-sigma", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=None,
                   help=f"default 0, or ${SEED_ENV} when set")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_synth)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CyclescanError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
