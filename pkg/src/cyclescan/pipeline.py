"""Per-market and cross-market analysis pipelines with file outputs.

run_market chains ingestion, the wavelet stage (scalegram, significance,
peaks, band metrics), and the DMA stage (global fit, local exponents,
per-interval Hurst vector) for one market, writing

    <out>/<market>/scalegram.csv
    <out>/<market>/peaks.csv
    <out>/<market>/tddma.csv
    <out>/<market>/hurst_vector.json

run_cohort runs every configured market, compares group band metrics,
and builds the Hurst-space development report:

    <out>/cohort/groupstats.json  (+ groupstats.csv mirror)
    <out>/cohort/devindex.json

Every failure is re-raised as StageError tagged with market and stage.
"""

from __future__ import annotations

import csv
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from . import devindex as devindex_mod
from . import dma, ingest, spectral_stats
from .cwt import build_scale_grid, cwt, scalegram, scalegram_csv_rows, significance
from .errors import ConfigError, EmptyBand, StageError
from .peaks import CYCLE_INTERVALS, assign_intervals, detect_peaks, peaks_csv_rows

__all__ = ["MarketInput", "RunConfig", "MarketReport", "CohortReport",
           "run_market", "run_cohort"]

MIN_TDDMA_SERIES = 200  # local analysis skipped below this length


@dataclass(frozen=True)
class MarketInput:
    path: str
    market_id: str
    group: str | None = None


@dataclass(frozen=True)
class RunConfig:
    """Pipeline parameters; defaults follow the reference analysis setup."""

    inputs: tuple[MarketInput, ...] = ()
    out_dir: str = "out"
    lag: int = 1
    voices_per_octave: int = 8
    significance_level: float = 0.10
    coi_only: bool = False
    prominence_fraction: float = 0.05
    amplitude_mode: str = "abs"
    tddma_window: int = 1000
    tddma_step: int = 1
    tddma_min_window: int = dma.DEFAULT_N_MIN_WINDOW
    hurst_method: str = "scale_fit"
    devindex_mode: str = "canonical"
    jobs: int = 1

    def __post_init__(self):
        if not 0.0 < self.significance_level < 1.0:
            raise ConfigError("significance level must lie in (0, 1)")
        for item in self.inputs:
            if item.group is not None and item.group not in devindex_mod.GROUP_LABELS:
                raise ConfigError(
                    f"{item.market_id}: group {item.group!r} not in "
                    f"{devindex_mod.GROUP_LABELS}"
                )
        if self.jobs < 1:
            raise ConfigError("jobs must be >= 1")


@dataclass(frozen=True)
class MarketReport:
    market_id: str
    group: str | None
    n_returns: int
    scalegram: object
    significance: object
    peaks: list
    interval_map: object
    band_metrics: dict  # interval index -> BandMetric
    hurst_global: object
    tddma: object | None
    tddma_note: str | None
    hurst_vector: object
    out_dir: str


@dataclass(frozen=True)
class CohortReport:
    markets: tuple[MarketReport, ...]
    groupstats: object | None
    groupstats_note: str | None
    development: object | None
    development_note: str | None
    excluded_from_devindex: tuple[str, ...] = field(default=())


def _write_csv(path: Path, rows) -> None:
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        for row in rows:
            writer.writerow(row)


def _hurst_vector_json(vector: dma.HurstVector, method: str) -> str:
    payload = {
        "market_id": vector.market_id,
        "method": method,
        "intervals": {
            str(interval.index): (float(vector.h[k]) if vector.available[k] else None)
            for k, interval in enumerate(CYCLE_INTERVALS)
        },
        "available": [bool(v) for v in vector.available],
    }
    return json.dumps(payload, indent=2)


def run_market(cfg: RunConfig, market: MarketInput,
               returns: ingest.ReturnSeries | None = None) -> MarketReport:
    """Full single-market pipeline; ``returns`` bypasses file ingestion."""

    def stage(name):
        def wrap(fn, *args, **kwargs):
            try:
                return fn(*args, **kwargs)
            except StageError:
                raise
            except Exception as exc:
                raise StageError(market.market_id, name, exc) from exc
        return wrap

    if returns is None:
        prices = stage("ingest")(ingest.load_prices, market.path, market.market_id)
        returns = stage("ingest")(ingest.log_returns, prices, cfg.lag)

    grid = stage("cwt")(build_scale_grid, returns.n, cfg.voices_per_octave)
    field_w = stage("cwt")(cwt, returns, grid)
    sgram = stage("cwt")(scalegram, field_w, cfg.coi_only)
    sig = stage("significance")(significance, field_w, cfg.significance_level,
                                cfg.coi_only)
    found = stage("peaks")(detect_peaks, sgram, sig, cfg.prominence_fraction)
    interval_map = stage("peaks")(assign_intervals, found)

    metrics = {}
    for interval in CYCLE_INTERVALS:
        try:
            metrics[interval.index] = spectral_stats.band_metrics(
                field_w, interval, mode=cfg.amplitude_mode
            )
        except EmptyBand:
            metrics[interval.index] = None

    x = dma.profile(returns.values)
    h_global = stage("dma")(dma.hurst_global, x)
    window = min(cfg.tddma_window, returns.n)
    local, note = None, None
    if window >= max(cfg.tddma_min_window, MIN_TDDMA_SERIES):
        local = stage("tddma")(dma.tddma, x, window, cfg.tddma_step,
                               cfg.tddma_min_window)
    else:
        note = f"series too short for local analysis (N={returns.n})"
    vector = stage("hurst_vector")(dma.hurst_vector, x, market.market_id,
                                   CYCLE_INTERVALS, cfg.hurst_method)

    market_dir = Path(cfg.out_dir) / market.market_id
    try:
        market_dir.mkdir(parents=True, exist_ok=True)
        _write_csv(market_dir / "scalegram.csv", scalegram_csv_rows(sgram, sig))
        _write_csv(market_dir / "peaks.csv", peaks_csv_rows(interval_map))
        rows = [("center", "h_local", "r_squared", "flagged")]
        if local is not None:
            rows += [
                (int(c), f"{float(h)!r}", f"{float(r)!r}", "1" if fl else "0")
                for c, h, r, fl in zip(local.centers, local.h_local,
                                       local.r_squared, local.flagged)
            ]
        _write_csv(market_dir / "tddma.csv", rows)
        (market_dir / "hurst_vector.json").write_text(
            _hurst_vector_json(vector, cfg.hurst_method), encoding="utf-8"
        )
    except OSError as exc:
        raise StageError(market.market_id, "write", exc) from exc

    return MarketReport(
        market_id=market.market_id,
        group=market.group,
        n_returns=returns.n,
        scalegram=sgram,
        significance=sig,
        peaks=found,
        interval_map=interval_map,
        band_metrics=metrics,
        hurst_global=h_global,
        tddma=local,
        tddma_note=note,
        hurst_vector=vector,
        out_dir=str(market_dir),
    )


def _groupstats_json(report: spectral_stats.GroupComparisonReport) -> str:
    cells = []
    for cell in report.cells:
        cells.append({
            "interval": cell.interval_index,
            "metric": cell.metric,
            "group_sizes": cell.group_sizes,
            "group_means": cell.group_means,
            "shapiro": {g: {"w": w, "p": p} for g, (w, p) in cell.shapiro.items()},
            "all_normal": cell.all_normal,
            "omnibus_test": cell.omnibus_test,
            "statistic": cell.statistic,
            "p_value": cell.p_value,
            "significant": cell.significant,
            "pairwise": [
                {"a": p.group_a, "b": p.group_b, "statistic": p.statistic,
                 "p_raw": p.p_raw, "p_adjusted": p.p_adjusted,
                 "significant": p.significant}
                for p in cell.pairwise
            ],
        })
    return json.dumps({
        "alpha": report.alpha,
        "cells": cells,
        "skipped": [{"interval": i, "metric": m, "reason": r}
                    for i, m, r in report.skipped],
    }, indent=2)


def _groupstats_csv_rows(report: spectral_stats.GroupComparisonReport):
    yield ("interval", "metric", "omnibus_test", "statistic", "p_value",
           "significant", "pairwise_significant")
    for cell in report.cells:
        pairs = ";".join(f"{p.group_a}|{p.group_b}" for p in cell.pairwise
                         if p.significant)
        yield (cell.interval_index, cell.metric, cell.omnibus_test,
               f"{float(cell.statistic)!r}", f"{float(cell.p_value)!r}",
               "1" if cell.significant else "0", pairs)


def run_cohort(cfg: RunConfig, fixtures: str | None = None) -> CohortReport:
    """Cross-market pipeline: group statistics plus the development report.

    ``fixtures="table4"`` skips estimation entirely and runs the
    Hurst-space analysis from the bundled 18-market fixture.
    """
    cohort_dir = Path(cfg.out_dir) / "cohort"
    cohort_dir.mkdir(parents=True, exist_ok=True)

    if fixtures is not None:
        if fixtures != "table4":
            raise ConfigError(f"unknown fixture set {fixtures!r}")
        report = devindex_mod.fixture_report(mode=cfg.devindex_mode)
        (cohort_dir / "devindex.json").write_text(report.to_json(), encoding="utf-8")
        return CohortReport(markets=(), groupstats=None,
                            groupstats_note="fixture run: no market estimation",
                            development=report, development_note=None)

    if len(cfg.inputs) < 2:
        raise ConfigError("cohort analysis needs at least 2 markets")

    ordered = sorted(cfg.inputs, key=lambda it: it.market_id)
    if cfg.jobs > 1:
        with ThreadPoolExecutor(max_workers=cfg.jobs) as pool:
            reports = list(pool.map(lambda it: run_market(cfg, it), ordered))
    else:
        reports = [run_market(cfg, it) for it in ordered]

    # group statistics over band metrics of intervals present per market
    groupstats, gs_note = None, None
    grouping = {r.market_id: r.group for r in reports}
    if any(g is None for g in grouping.values()):
        gs_note = "group statistics skipped: missing group labels"
    else:
        metrics = {
            r.market_id: {
                interval.index: (r.band_metrics[interval.index]
                                 if r.interval_map.present(interval.index) else None)
                for interval in CYCLE_INTERVALS
            }
            for r in reports
        }
        try:
            groupstats = spectral_stats.group_compare(metrics, grouping)
        except Exception as exc:
            raise StageError("cohort", "groupstats", exc) from exc
        (cohort_dir / "groupstats.json").write_text(_groupstats_json(groupstats),
                                                    encoding="utf-8")
        _write_csv(cohort_dir / "groupstats.csv", _groupstats_csv_rows(groupstats))

    # development report over complete Hurst vectors
    complete = [r for r in reports if r.hurst_vector.complete]
    excluded = tuple(r.market_id for r in reports if not r.hurst_vector.complete)
    development, dev_note = None, None
    if len(complete) >= 2:
        try:
            development = devindex_mod.development_report(
                [r.hurst_vector for r in complete], mode=cfg.devindex_mode
            )
        except Exception as exc:
            raise StageError("cohort", "devindex", exc) from exc
        (cohort_dir / "devindex.json").write_text(development.to_json(),
                                                  encoding="utf-8")
    else:
        dev_note = (f"development report needs >= 2 complete Hurst vectors, "
                    f"got {len(complete)}")

    return CohortReport(
        markets=tuple(reports),
        groupstats=groupstats,
        groupstats_note=gs_note,
        development=development,
        development_note=dev_note,
        excluded_from_devindex=excluded,
    )
