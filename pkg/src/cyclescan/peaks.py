"""Scalegram peak detection and assignment to the nine canonical cycle bands.

Scales computed on the trading-day axis are reported in real days using
the 5-trading-days-per-week convention (factor 7/5). The nine cycle
intervals, in real days, run from the 5-day working-week cycle up to
the 600-day multi-year cycle; interval bounds are shared, and a peak
landing exactly on a bound belongs to the lower interval.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.signal import find_peaks

from .cwt import Scalegram, SignificanceResult

__all__ = [
    "TRADING_TO_REAL",
    "CycleInterval",
    "CYCLE_INTERVALS",
    "Peak",
    "PeakIntervalMap",
    "trading_to_real_days",
    "real_to_trading_days",
    "detect_peaks",
    "assign_intervals",
    "interval_for_real_days",
    "peaks_csv_rows",
]

#: 5 trading days span 7 calendar days.
TRADING_TO_REAL = 7.0 / 5.0

ROMAN = ("I", "II", "III", "IV", "V", "VI", "VII", "VIII", "IX")


@dataclass(frozen=True)
class CycleInterval:
    """One canonical cycle band: nominal peak position and real-day bounds."""

    index: int  # 1..9
    label: str  # roman numeral
    nominal_peak_days: float
    lo: float
    hi: float


CYCLE_INTERVALS: tuple[CycleInterval, ...] = tuple(
    CycleInterval(index=k + 1, label=ROMAN[k], nominal_peak_days=peak, lo=lo, hi=hi)
    for k, (peak, (lo, hi)) in enumerate(
        zip(
            (5, 7, 14, 30, 90, 150, 210, 360, 600),
            ((2, 6), (6, 10), (10, 25), (25, 60), (60, 110),
             (110, 190), (190, 250), (250, 450), (450, 900)),
        )
    )
)


@dataclass(frozen=True)
class Peak:
    """A scalegram local maximum."""

    scale_trading: float
    scale_real: float
    energy: float
    significant: bool
    grid_index: int


@dataclass(frozen=True)
class PeakIntervalMap:
    """Representative significant peak per canonical interval, if any."""

    entries: tuple[Peak | None, ...]  # one slot per CYCLE_INTERVALS
    unassigned: tuple[Peak, ...] = field(default=())

    def present(self, index: int) -> bool:
        """True when interval ``index`` (1..9) has a representative peak."""
        return self.entries[index - 1] is not None

    @property
    def presence(self) -> tuple[bool, ...]:
        return tuple(e is not None for e in self.entries)


def trading_to_real_days(a: float) -> float:
    """Convert a trading-day scale to real (calendar) days."""
    if a <= 0:
        raise ValueError(f"scale must be positive, got {a}")
    return a * TRADING_TO_REAL


def real_to_trading_days(days: float) -> float:
    """Convert real days back to the trading-day axis."""
    if days <= 0:
        raise ValueError(f"scale must be positive, got {days}")
    return days / TRADING_TO_REAL


def detect_peaks(sgram: Scalegram, sig: SignificanceResult,
                 prominence_fraction: float = 0.05) -> list[Peak]:
    """Scalegram local maxima with prominence above the jitter floor.

    A grid point is a peak when strictly greater than both neighbors
    and its topographic prominence reaches ``prominence_fraction`` of
    the scalegram maximum (suppresses grid-level jitter). Peaks are
    flagged significant when their scale passes the significance test.
    """
    if len(sgram.scales) != len(sig.global_spectrum):
        raise ValueError("scalegram and significance must share one grid")
    energy = sgram.energy
    if not np.any(energy > 0):
        return []
    idx, _ = find_peaks(energy, prominence=prominence_fraction * energy.max())
    out = []
    for j in idx:
        a = float(sgram.scales[j])
        out.append(
            Peak(
                scale_trading=a,
                scale_real=trading_to_real_days(a),
                energy=float(energy[j]),
                significant=bool(sig.scale_significant[j]),
                grid_index=int(j),
            )
        )
    return out


def interval_for_real_days(days: float) -> CycleInterval | None:
    """The unique interval containing a real-day scale; bounds go downward."""
    first = CYCLE_INTERVALS[0]
    if days < first.lo or days > CYCLE_INTERVALS[-1].hi:
        return None
    for interval in CYCLE_INTERVALS:
        lo_ok = days >= interval.lo if interval.index == 1 else days > interval.lo
        if lo_ok and days <= interval.hi:
            return interval
    return None


def assign_intervals(detected: list[Peak]) -> PeakIntervalMap:
    """Map significant peaks onto the nine intervals.

    Per interval the highest-energy significant peak wins. Significant
    peaks outside [2, 900] real days are reported as unassigned;
    insignificant peaks are dropped.
    """
    slots: list[Peak | None] = [None] * len(CYCLE_INTERVALS)
    unassigned: list[Peak] = []
    for peak in detected:
        if not peak.significant:
            continue
        interval = interval_for_real_days(peak.scale_real)
        if interval is None:
            unassigned.append(peak)
            continue
        k = interval.index - 1
        if slots[k] is None or peak.energy > slots[k].energy:
            slots[k] = peak
    return PeakIntervalMap(entries=tuple(slots), unassigned=tuple(unassigned))


def peaks_csv_rows(mapping: PeakIntervalMap):
    """Rows for the per-market peak table.

    Header: interval,nominal_days,scale_real_days,energy,significant
    """
    yield ("interval", "nominal_days", "scale_real_days", "energy", "significant")
    for interval, peak in zip(CYCLE_INTERVALS, mapping.entries):
        if peak is None:
            yield (interval.label, f"{interval.nominal_peak_days:g}", "", "", "0")
        else:
            yield (interval.label, f"{interval.nominal_peak_days:g}",
                   f"{float(peak.scale_real)!r}", f"{float(peak.energy)!r}",
                   "1" if peak.significant else "0")
