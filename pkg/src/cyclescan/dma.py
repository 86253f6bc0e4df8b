"""Centered detrended moving average (cDMA) Hurst estimation.

The method operates on the profile (cumulative sum) of a return series,
the convention under which uncorrelated returns give H = 0.5. For an
even window n, fluctuations are deviations from the symmetric moving
average over n+1 points:

    y_n(i) = x(i) - mean(x[i-n/2 .. i+n/2]),  i = n/2 .. N-1-n/2
    sigma(n) = sqrt( sum_i y_n(i)^2 / (N - n) )

The symmetric stencil reproduces any affine profile exactly, so a
constant or a pure linear trend yields sigma(n) = 0 identically. Odd
window sizes are rounded up to even.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import RangeTooNarrow, SeriesTooShort, ZeroFluctuation
from .peaks import CYCLE_INTERVALS, CycleInterval, real_to_trading_days

__all__ = [
    "FluctuationCurve",
    "HurstEstimate",
    "LocalHurstSeries",
    "HurstVector",
    "profile",
    "default_window_grid",
    "cdma_fluctuation",
    "fit_hurst",
    "hurst_global",
    "tddma",
    "interval_windows",
    "hurst_vector",
    "hurst_vector_from_sigma",
]

#: Largest window as a fraction of the series: n <= N/4.
MAX_WINDOW_FRACTION = 4
DEFAULT_POINTS_PER_DECADE = 20
DEFAULT_N_MIN_WINDOW = 200  # smallest tdDMA subset supporting the scaling fit
DEFAULT_R2_GATE = 0.95


@dataclass(frozen=True)
class FluctuationCurve:
    """sigma_cDMA(n) sampled on an even window grid."""

    n_values: np.ndarray
    sigma: np.ndarray
    n_max: int  # series length used

    def __post_init__(self):
        if len(self.n_values) != len(self.sigma):
            raise ValueError("n_values and sigma must align")
        if np.any(self.sigma < 0):
            raise ValueError("sigma must be non-negative")


@dataclass(frozen=True)
class HurstEstimate:
    """Slope of log sigma(n) vs log n with fit diagnostics."""

    h: float
    fit_range: tuple[float, float]
    r_squared: float
    stderr: float
    n_points: int

    @property
    def warn(self) -> bool:
        """Set when the estimate leaves the physical [0, 1] range."""
        return not 0.0 <= self.h <= 1.0


@dataclass(frozen=True)
class LocalHurstSeries:
    """Time-dependent DMA: one Hurst estimate per sliding-window position."""

    window_size: int
    step: int
    min_window: int
    centers: np.ndarray
    h_local: np.ndarray
    r_squared: np.ndarray
    flagged: np.ndarray  # True where the fit failed the r^2 gate


@dataclass(frozen=True)
class HurstVector:
    """Per-cycle-interval Hurst exponents of one market (9 components)."""

    market_id: str
    h: np.ndarray  # NaN where unavailable
    available: np.ndarray
    r_squared: np.ndarray

    def __post_init__(self):
        if len(self.h) != len(CYCLE_INTERVALS):
            raise ValueError("expected one component per cycle interval")

    @property
    def complete(self) -> bool:
        return bool(np.all(self.available))


def profile(returns: np.ndarray) -> np.ndarray:
    """Cumulative sum of returns, the series the DMA operates on."""
    return np.cumsum(np.asarray(returns, dtype=float))


def default_window_grid(n_max: int, points_per_decade: int = DEFAULT_POINTS_PER_DECADE,
                        n_min: int = 4) -> np.ndarray:
    """Log-spaced even windows covering [n_min, n_max]."""
    if n_max < n_min:
        raise RangeTooNarrow(f"n_max={n_max} below n_min={n_min}")
    raw = 10.0 ** np.arange(np.log10(n_min), np.log10(n_max) + 1e-12,
                            1.0 / points_per_decade)
    ns = np.unique(_round_up_even(raw))
    return ns[(ns >= n_min) & (ns <= n_max)]


def _round_up_even(n) -> np.ndarray:
    n = np.ceil(np.asarray(n)).astype(int)
    return n + (n % 2)


def _sigma_single(x: np.ndarray, cumsum0: np.ndarray, n: int) -> float:
    y = _residuals(x, cumsum0, n)
    return float(np.sqrt(np.mean(y * y)))


def _residuals(x: np.ndarray, cumsum0: np.ndarray, n: int) -> np.ndarray:
    """y_n(i) over the valid range i = n/2 .. N-1-n/2 (length N-n)."""
    m = n // 2
    size = len(x)
    ma = (cumsum0[n + 1:] - cumsum0[: size - n]) / (n + 1)
    return x[m: size - m] - ma


def cdma_fluctuation(x: np.ndarray, n_values=None) -> FluctuationCurve:
    """sigma_cDMA(n) of a profile ``x`` over the given window sizes.

    Windows are forced even (odd values round up), deduplicated, and
    must satisfy n <= N/4. The series must cover 4x the largest window.
    """
    x = np.asarray(x, dtype=float)
    size = len(x)
    if n_values is None:
        n_values = default_window_grid(size // MAX_WINDOW_FRACTION)
    ns = np.unique(_round_up_even(np.atleast_1d(n_values)))
    if ns.size == 0 or ns[0] < 2:
        raise ValueError("window sizes must be >= 2")
    if size < MAX_WINDOW_FRACTION * ns[-1]:
        raise SeriesTooShort(
            f"profile length {size} below 4x the largest window {ns[-1]}"
        )
    cumsum0 = np.concatenate(([0.0], np.cumsum(x)))
    sigma = np.array([_sigma_single(x, cumsum0, int(n)) for n in ns])
    return FluctuationCurve(n_values=ns, sigma=sigma, n_max=size)


def fit_hurst(curve: FluctuationCurve,
              fit_range: tuple[float, float] | None = None) -> HurstEstimate:
    """Least-squares slope of log sigma(n) vs log n over ``fit_range``.

    Requires at least 6 window sizes inside the range; sigma = 0 there
    makes the log fit undefined and raises ZeroFluctuation.
    """
    ns, sigma = curve.n_values, curve.sigma
    if fit_range is None:
        fit_range = (float(ns[0]), float(ns[-1]))
    lo, hi = fit_range
    mask = (ns >= lo) & (ns <= hi)
    if mask.sum() < 6:
        raise RangeTooNarrow(
            f"fit range [{lo}, {hi}] holds {int(mask.sum())} windows; need >= 6"
        )
    if np.any(sigma[mask] == 0):
        raise ZeroFluctuation("sigma(n) = 0 inside the fit range")
    lx = np.log(ns[mask].astype(float))
    ly = np.log(sigma[mask])
    h, _, r2, se = _ols_line(lx, ly)
    return HurstEstimate(h=h, fit_range=(float(lo), float(hi)), r_squared=r2,
                         stderr=se, n_points=int(mask.sum()))


def _ols_line(x: np.ndarray, y: np.ndarray) -> tuple[float, float, float, float]:
    xm, ym = x.mean(), y.mean()
    sxx = np.sum((x - xm) ** 2)
    slope = np.sum((x - xm) * (y - ym)) / sxx
    intercept = ym - slope * xm
    resid = y - intercept - slope * x
    ss_res = float(np.sum(resid**2))
    ss_tot = float(np.sum((y - ym) ** 2))
    r2 = 1.0 if ss_tot == 0 else 1.0 - ss_res / ss_tot
    n = len(x)
    se = float(np.sqrt(ss_res / (n - 2) / sxx)) if n > 2 else np.nan
    return float(slope), float(intercept), float(r2), se


def hurst_global(x: np.ndarray, fit_range: tuple[float, float] | None = None,
                 n_values=None) -> HurstEstimate:
    """Global Hurst exponent of a profile from the cDMA power law."""
    x = np.asarray(x, dtype=float)
    if n_values is None:
        n_values = default_window_grid(len(x) // MAX_WINDOW_FRACTION)
    curve = cdma_fluctuation(x, n_values)
    return fit_hurst(curve, fit_range)


def tddma(x: np.ndarray, window_size: int = 1000, step: int = 1,
          min_window: int = DEFAULT_N_MIN_WINDOW,
          r2_gate: float = DEFAULT_R2_GATE) -> LocalHurstSeries:
    """Local Hurst exponents over a sliding window of the profile.

    Each window position fits sigma(n) on windows n in [4, window/4],
    exactly as hurst_global would on the windowed subset (the centered
    moving average never reaches outside the window at the retained
    positions). Estimates whose fit falls below ``r2_gate`` are kept
    but flagged.
    """
    x = np.asarray(x, dtype=float)
    size = len(x)
    if not size >= window_size >= min_window:
        raise SeriesTooShort(
            f"need N >= window_size >= {min_window}, got N={size}, window={window_size}"
        )
    if step < 1:
        raise ValueError("step must be >= 1")
    ns = default_window_grid(window_size // MAX_WINDOW_FRACTION)
    if len(ns) < 6:
        raise RangeTooNarrow(f"window {window_size} admits only {len(ns)} fit points")
    starts = np.arange(0, size - window_size + 1, step)
    cumsum0 = np.concatenate(([0.0], np.cumsum(x)))

    # sigma^2 for every (window position, n) from one global pass per n
    log_sigma = np.empty((len(starts), len(ns)))
    for j, n in enumerate(ns):
        y = _residuals(x, cumsum0, int(n))  # value at i = n/2 .. N-1-n/2
        m = int(n) // 2
        sq = np.concatenate(([0.0], np.cumsum(y * y)))
        # window [w, w+window_size) keeps i = w+m .. w+window_size-1-m,
        # i.e. y indices w .. w+window_size-n-1 relative to offset m
        lo = starts
        hi = starts + window_size - int(n)
        var = (sq[hi] - sq[lo]) / (window_size - int(n))
        log_sigma[:, j] = 0.5 * np.log(var)

    lx = np.log(ns.astype(float))
    lxc = lx - lx.mean()
    sxx = float(np.sum(lxc**2))
    ym = log_sigma.mean(axis=1)
    h = (log_sigma @ lxc) / sxx
    resid = log_sigma - ym[:, None] - h[:, None] * lxc[None, :]
    ss_res = np.sum(resid**2, axis=1)
    ss_tot = np.sum((log_sigma - ym[:, None]) ** 2, axis=1)
    with np.errstate(invalid="ignore", divide="ignore"):
        r2 = np.where(ss_tot > 0, 1.0 - ss_res / ss_tot, 1.0)
    centers = starts + window_size // 2
    return LocalHurstSeries(
        window_size=window_size,
        step=step,
        min_window=min_window,
        centers=centers,
        h_local=h,
        r_squared=r2,
        flagged=r2 < r2_gate,
    )


def interval_windows(interval: CycleInterval, n_cap: int) -> np.ndarray:
    """Even windows inside the interval's trading-day range plus its borders.

    The fit range for a cycle interval includes and borders the peak
    region: all even n within [lo, hi] * 5/7 together with the nearest
    even window on each side. Narrow short-scale intervals (I, II)
    only admit a fit at all through the bordering windows.
    """
    lo_t = real_to_trading_days(interval.lo)
    hi_t = real_to_trading_days(interval.hi)
    ns = np.arange(2, n_cap + 1, 2)
    inside = ns[(ns >= lo_t) & (ns <= hi_t)]
    below = ns[ns < lo_t]
    above = ns[ns > hi_t]
    parts = []
    if below.size:
        parts.append(below[-1:])
    parts.append(inside)
    if above.size:
        parts.append(above[:1])
    return np.concatenate(parts) if parts else inside


def hurst_vector_from_sigma(n_values: np.ndarray, sigma: np.ndarray,
                            market_id: str = "",
                            intervals: tuple[CycleInterval, ...] = CYCLE_INTERVALS,
                            n_cap: int | None = None) -> HurstVector:
    """Per-interval fits from an existing fluctuation curve.

    Each interval uses the exact window set of ``interval_windows``; a
    component is unavailable when the curve does not cover that set,
    the set exceeds ``n_cap``, or sigma vanishes there.
    """
    n_values = np.asarray(n_values, dtype=int)
    sigma = np.asarray(sigma, dtype=float)
    if n_cap is None:
        n_cap = int(n_values[-1])
    h = np.full(len(intervals), np.nan)
    r2 = np.full(len(intervals), np.nan)
    avail = np.zeros(len(intervals), dtype=bool)
    lookup = {int(n): float(s) for n, s in zip(n_values, sigma)}
    for k, interval in enumerate(intervals):
        ns = interval_windows(interval, n_cap)
        if len(ns) < 2 or ns[-1] > n_cap:
            continue
        if any(int(n) not in lookup for n in ns):
            continue
        sig = np.array([lookup[int(n)] for n in ns])
        if np.any(sig == 0):
            continue
        slope, _, rr, _ = _ols_line(np.log(ns.astype(float)), np.log(sig))
        h[k] = slope
        r2[k] = rr
        avail[k] = True
    return HurstVector(market_id=market_id, h=h, available=avail, r_squared=r2)


def hurst_vector(x: np.ndarray, market_id: str = "",
                 intervals: tuple[CycleInterval, ...] = CYCLE_INTERVALS,
                 method: str = "scale_fit",
                 tddma_kwargs: dict | None = None) -> HurstVector:
    """Per-interval Hurst exponents of a profile.

    ``scale_fit`` (default) restricts the global log-log fit to each
    interval's trading-day window range; it is deterministic given the
    series. ``tddma_mean`` instead averages the time-dependent local
    exponents fitted per interval range over all window positions.
    Intervals whose window range exceeds N/4 (or admits fewer than two
    windows) are marked unavailable rather than failing the call.
    """
    x = np.asarray(x, dtype=float)
    n_cap = len(x) // MAX_WINDOW_FRACTION
    h = np.full(len(intervals), np.nan)
    r2 = np.full(len(intervals), np.nan)
    avail = np.zeros(len(intervals), dtype=bool)

    if method == "scale_fit":
        needed = sorted({int(n) for interval in intervals
                         for n in interval_windows(interval, n_cap)})
        cumsum0 = np.concatenate(([0.0], np.cumsum(x)))
        sigma = np.array([_sigma_single(x, cumsum0, n) for n in needed])
        return hurst_vector_from_sigma(np.array(needed), sigma, market_id,
                                       intervals, n_cap)
    if method == "tddma_mean":
        kwargs = dict(tddma_kwargs or {})
        window = kwargs.pop("window_size", min(1000, len(x)))
        step = kwargs.pop("step", max(1, window // 10))
        for k, interval in enumerate(intervals):
            ns = interval_windows(interval, window // MAX_WINDOW_FRACTION)
            if len(ns) < 2:
                continue
            series = _tddma_restricted(x, window, step, ns)
            if series is None:
                continue
            h[k] = float(np.mean(series))
            r2[k] = np.nan
            avail[k] = True
        return HurstVector(market_id=market_id, h=h, available=avail, r_squared=r2)
    raise ValueError(f"unknown method {method!r}")


def _tddma_restricted(x: np.ndarray, window: int, step: int,
                      ns: np.ndarray) -> np.ndarray | None:
    """Per-window slopes over a fixed window-size set; None if unusable."""
    size = len(x)
    if size < window:
        return None
    starts = np.arange(0, size - window + 1, step)
    cumsum0 = np.concatenate(([0.0], np.cumsum(x)))
    log_sigma = np.empty((len(starts), len(ns)))
    for j, n in enumerate(ns):
        y = _residuals(x, cumsum0, int(n))
        sq = np.concatenate(([0.0], np.cumsum(y * y)))
        var = (sq[starts + window - int(n)] - sq[starts]) / (window - int(n))
        if np.any(var <= 0):
            return None
        log_sigma[:, j] = 0.5 * np.log(var)
    lx = np.log(ns.astype(float))
    lxc = lx - lx.mean()
    return (log_sigma @ lxc) / float(np.sum(lxc**2))
