"""Band energy/amplitude metrics and the three-group comparison pipeline.

Band quantities are double integrals of the wavelet field over a scale
band and the full time axis,

    E_band = (1/t) * integral |W(a,b)|^2 / a^2 da db
    A_band = (1/t) * 1/(s2-s1) * integral |W(a,b)| / a^2 da db

computed with trapezoidal quadrature: unit step in b, the actual
log-grid spacing in a, and the 1/a^2 weight applied pointwise. The
scale integral uses the piecewise-linear interpolant of the per-scale
integrand, so band values are exactly additive over any partition of
the scale axis. Relative quantities divide by the same integral taken
over the whole grid (the amplitude total carries no bandwidth factor).

The group pipeline follows the decision tree used for Table-3-style
comparisons: Shapiro-Wilk per group, then one-way ANOVA with
Bonferroni post-hoc when all groups test normal, otherwise
Kruskal-Wallis with Mann-Whitney post-hoc, all at alpha = 0.05.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import chi2, f as f_dist, norm, t as t_dist

from .cwt import WaveletField
from .errors import EmptyBand, SampleTooSmall
from .peaks import CYCLE_INTERVALS, CycleInterval, real_to_trading_days

__all__ = [
    "BandMetric",
    "band_energy",
    "band_amplitude",
    "relative_energy",
    "relative_amplitude",
    "band_metrics",
    "shapiro_wilk",
    "anova_oneway",
    "bonferroni_pairwise",
    "kruskal_wallis",
    "mann_whitney",
    "mann_whitney_null_distribution",
    "PairwiseResult",
    "ComparisonCell",
    "GroupComparisonReport",
    "compare_groups",
    "group_compare",
]

ALPHA = 0.05
AMPLITUDE_MODES = ("abs", "real", "power")


# ---------------------------------------------------------------------------
# band integrals

def _band_bounds_trading(band, units: str) -> tuple[float, float]:
    if isinstance(band, CycleInterval):
        return real_to_trading_days(band.lo), real_to_trading_days(band.hi)
    lo, hi = band
    if lo >= hi:
        raise ValueError(f"band bounds must satisfy lo < hi, got ({lo}, {hi})")
    if units == "real":
        return real_to_trading_days(lo), real_to_trading_days(hi)
    if units == "trading":
        return float(lo), float(hi)
    raise ValueError(f"units must be 'real' or 'trading', got {units!r}")


def _scale_integrand(field: WaveletField, mode: str) -> np.ndarray:
    """Per-scale integrand: trapezoid over b of the weighted field."""
    if mode == "power":
        values = np.abs(field.coefficients) ** 2
    elif mode == "abs":
        values = np.abs(field.coefficients)
    elif mode == "real":
        values = field.coefficients.real
    else:
        raise ValueError(f"mode must be one of {AMPLITUDE_MODES}")
    per_scale = np.trapezoid(values, axis=1)
    return per_scale / field.grid.scales**2


def _integral_to(scales: np.ndarray, integrand: np.ndarray, s: float) -> float:
    """Integral of the piecewise-linear integrand from scales[0] to s."""
    cum = np.concatenate(([0.0], np.cumsum(
        0.5 * (integrand[1:] + integrand[:-1]) * np.diff(scales))))
    j = int(np.searchsorted(scales, s, side="right") - 1)
    j = min(max(j, 0), len(scales) - 2)
    a0, a1 = scales[j], scales[j + 1]
    f0, f1 = integrand[j], integrand[j + 1]
    fs = f0 + (f1 - f0) * (s - a0) / (a1 - a0)
    return float(cum[j] + 0.5 * (f0 + fs) * (s - a0))


def _band_integral(field: WaveletField, lo_t: float, hi_t: float,
                   mode: str) -> tuple[float, float, float]:
    """(band integral, clamped lo, clamped hi), already 1/t normalized."""
    scales = field.grid.scales
    lo_c = max(lo_t, float(scales[0]))
    hi_c = min(hi_t, float(scales[-1]))
    if hi_c <= lo_c:
        raise EmptyBand(
            f"band [{lo_t:g}, {hi_t:g}] trading days does not overlap "
            f"grid [{scales[0]:g}, {scales[-1]:g}]"
        )
    integrand = _scale_integrand(field, mode)
    value = _integral_to(scales, integrand, hi_c) - _integral_to(scales, integrand, lo_c)
    return value / field.n_times, lo_c, hi_c


def band_energy(field: WaveletField, band, units: str = "real") -> float:
    """Average energy content E of a scale band (1/a^2-weighted power).

    ``band`` is a CycleInterval or a (lo, hi) pair; pairs are real days
    unless ``units="trading"``.
    """
    lo_t, hi_t = _band_bounds_trading(band, units)
    value, _, _ = _band_integral(field, lo_t, hi_t, "power")
    return value


def band_amplitude(field: WaveletField, band, units: str = "real",
                   mode: str = "abs") -> float:
    """Average amplitude A of a band, bandwidth-normalized.

    The field enters through |W| by default; Re(W) and |W|^2 are
    selectable for sensitivity analysis via ``mode``.
    """
    lo_t, hi_t = _band_bounds_trading(band, units)
    value, lo_c, hi_c = _band_integral(field, lo_t, hi_t, mode)
    return value / (hi_c - lo_c)


def _total(field: WaveletField, mode: str) -> float:
    scales = field.grid.scales
    value, _, _ = _band_integral(field, float(scales[0]), float(scales[-1]), mode)
    return value


def relative_energy(field: WaveletField, band, units: str = "real") -> float:
    """e_W = E_band / E_total over the full grid [a_min, N/5]."""
    total = _total(field, "power")
    if total == 0:
        return 0.0
    return band_energy(field, band, units) / total


def relative_amplitude(field: WaveletField, band, units: str = "real",
                       mode: str = "abs") -> float:
    """a_W = A_band / A_total; the total carries no bandwidth factor."""
    total = _total(field, mode)
    if total == 0:
        return 0.0
    return band_amplitude(field, band, units, mode) / total


@dataclass(frozen=True)
class BandMetric:
    """Raw and relative energy/amplitude of one cycle band."""

    interval: CycleInterval
    e_w: float
    a_w: float
    e_band: float
    a_band: float
    e_total: float
    a_total: float


def band_metrics(field: WaveletField, interval: CycleInterval,
                 mode: str = "abs") -> BandMetric:
    """All band quantities of one canonical interval in a single pass."""
    e_band = band_energy(field, interval)
    a_band = band_amplitude(field, interval, mode=mode)
    e_total = _total(field, "power")
    a_total = _total(field, mode)
    return BandMetric(
        interval=interval,
        e_w=e_band / e_total if e_total else 0.0,
        a_w=a_band / a_total if a_total else 0.0,
        e_band=e_band,
        a_band=a_band,
        e_total=e_total,
        a_total=a_total,
    )


# ---------------------------------------------------------------------------
# Shapiro-Wilk (Royston 1995 approximation, n = 3..50)

_SW_C1 = (0.0, 0.221157, -0.147981, -2.071190, 4.434685, -2.706056)
_SW_C2 = (0.0, 0.042981, -0.293762, -1.752461, 5.682633, -3.582633)


def _poly(coeffs, x):
    return sum(c * x**k for k, c in enumerate(coeffs))


def shapiro_wilk(sample) -> tuple[float, float]:
    """Shapiro-Wilk W statistic and p-value for 3 <= n <= 50.

    Weights follow Royston's normal-scores approximation; the p-value
    uses his normalizing transforms of 1 - W (exact arcsine law at
    n = 3).
    """
    x = np.sort(np.asarray(sample, dtype=float))
    n = len(x)
    if n < 3:
        raise SampleTooSmall(f"Shapiro-Wilk needs n >= 3, got {n}")
    if n > 50:
        raise ValueError(f"Shapiro-Wilk supported for n <= 50, got {n}")
    if x[0] == x[-1]:
        raise ValueError("sample has zero range; W undefined")

    m = norm.ppf((np.arange(1, n + 1) - 0.375) / (n + 0.25))
    ssm = float(np.sum(m * m))
    rsn = 1.0 / math.sqrt(n)
    a = np.empty(n)
    if n == 3:
        a[0], a[1], a[2] = -math.sqrt(0.5), 0.0, math.sqrt(0.5)
    else:
        cn = m[-1] / math.sqrt(ssm)
        an = cn + _poly(_SW_C1, rsn)
        if n <= 5:
            phi = (ssm - 2.0 * m[-1] ** 2) / (1.0 - 2.0 * an**2)
            a[1:-1] = m[1:-1] / math.sqrt(phi)
            a[-1], a[0] = an, -an
        else:
            cn1 = m[-2] / math.sqrt(ssm)
            an1 = cn1 + _poly(_SW_C2, rsn)
            phi = (ssm - 2.0 * m[-1] ** 2 - 2.0 * m[-2] ** 2) / (
                1.0 - 2.0 * an**2 - 2.0 * an1**2
            )
            a[2:-2] = m[2:-2] / math.sqrt(phi)
            a[-1], a[0] = an, -an
            a[-2], a[1] = an1, -an1

    xm = x - x.mean()
    w = float(np.dot(a, x) ** 2 / np.dot(xm, xm))
    w = min(w, 1.0)

    if n == 3:
        p = 6.0 / math.pi * (math.asin(math.sqrt(w)) - math.asin(math.sqrt(0.75)))
        p = min(max(p, 0.0), 1.0)
        return w, p
    if n <= 11:
        g = -2.273 + 0.459 * n
        wt = -math.log(g - math.log(1.0 - w))
        mu = 0.5440 - 0.39978 * n + 0.025054 * n**2 - 0.0006714 * n**3
        sd = math.exp(1.3822 - 0.77857 * n + 0.062767 * n**2 - 0.0020322 * n**3)
    else:
        wt = math.log(1.0 - w)
        y = math.log(n)
        mu = -1.5861 - 0.31082 * y - 0.083751 * y**2 + 0.0038915 * y**3
        sd = math.exp(-0.4803 - 0.082676 * y + 0.0030302 * y**2)
    p = float(norm.sf((wt - mu) / sd))
    return w, p


# ---------------------------------------------------------------------------
# omnibus and pairwise tests

def _as_groups(groups) -> list[np.ndarray]:
    out = [np.asarray(g, dtype=float) for g in groups]
    if len(out) < 2:
        raise SampleTooSmall("need at least 2 groups")
    if any(len(g) < 2 for g in out):
        raise SampleTooSmall("each group needs n >= 2")
    return out


def anova_oneway(groups) -> tuple[float, float]:
    """Classical one-way ANOVA F statistic with (k-1, N-k) dof.

    Zero within-group variance everywhere gives F = 0 when means are
    equal and (inf, 0) under exact separation.
    """
    gs = _as_groups(groups)
    total = np.concatenate(gs)
    grand = total.mean()
    k = len(gs)
    n = len(total)
    ssb = sum(len(g) * (g.mean() - grand) ** 2 for g in gs)
    ssw = sum(float(np.sum((g - g.mean()) ** 2)) for g in gs)
    if ssw == 0.0:
        if ssb == 0.0:
            return 0.0, 1.0
        return math.inf, 0.0  # exact separation
    f_stat = (ssb / (k - 1)) / (ssw / (n - k))
    return float(f_stat), float(f_dist.sf(f_stat, k - 1, n - k))


@dataclass(frozen=True)
class PairwiseResult:
    group_a: str
    group_b: str
    statistic: float
    p_raw: float
    p_adjusted: float
    significant: bool


def _t_pooled(x: np.ndarray, y: np.ndarray) -> tuple[float, float]:
    n, m = len(x), len(y)
    sp2 = (np.sum((x - x.mean()) ** 2) + np.sum((y - y.mean()) ** 2)) / (n + m - 2)
    if sp2 == 0.0:
        if x.mean() == y.mean():
            return 0.0, 1.0
        return math.inf, 0.0
    t_stat = (x.mean() - y.mean()) / math.sqrt(sp2 * (1.0 / n + 1.0 / m))
    p = 2.0 * float(t_dist.sf(abs(t_stat), n + m - 2))
    return float(t_stat), p


def bonferroni_pairwise(groups, labels=None, alpha: float = ALPHA) -> list[PairwiseResult]:
    """All pairwise pooled-variance t tests, Bonferroni adjusted.

    Raw two-sided p-values are multiplied by the number of pairs and
    capped at 1.
    """
    gs = _as_groups(groups)
    labels = list(labels) if labels is not None else [str(i) for i in range(len(gs))]
    pairs = [(i, j) for i in range(len(gs)) for j in range(i + 1, len(gs))]
    results = []
    for i, j in pairs:
        t_stat, p = _t_pooled(gs[i], gs[j])
        adj = min(1.0, p * len(pairs))
        results.append(PairwiseResult(labels[i], labels[j], t_stat, p, adj, adj < alpha))
    return results


def _midranks(pooled: np.ndarray) -> np.ndarray:
    order = np.argsort(pooled, kind="mergesort")
    ranks = np.empty(len(pooled))
    sorted_vals = pooled[order]
    i = 0
    while i < len(pooled):
        j = i
        while j + 1 < len(pooled) and sorted_vals[j + 1] == sorted_vals[i]:
            j += 1
        ranks[order[i:j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    return ranks


def _tie_term(pooled: np.ndarray) -> float:
    _, counts = np.unique(pooled, return_counts=True)
    return float(np.sum(counts**3 - counts))


def kruskal_wallis(groups) -> tuple[float, float]:
    """Kruskal-Wallis H with midranks, tie correction, chi2 p-value."""
    gs = _as_groups(groups)
    pooled = np.concatenate(gs)
    n = len(pooled)
    ranks = _midranks(pooled)
    offset = 0
    h = 0.0
    for g in gs:
        r = ranks[offset:offset + len(g)]
        h += r.sum() ** 2 / len(g)
        offset += len(g)
    h = 12.0 / (n * (n + 1)) * h - 3.0 * (n + 1)
    correction = 1.0 - _tie_term(pooled) / (n**3 - n)
    if correction <= 0.0:
        return 0.0, 1.0  # every pooled value identical
    h /= correction
    h = max(h, 0.0)
    return float(h), float(chi2.sf(h, len(gs) - 1))


def mann_whitney_null_distribution(n: int, m: int) -> np.ndarray:
    """Exact null counts of U = 0..n*m for sample sizes (n, m), no ties.

    Counts arrangements via the Gaussian binomial generating function,
    built by exact integer polynomial multiplication by (1 - q^(m+k))
    and synthetic division by (1 - q^k) for k = 1..n. The counts sum to
    C(n+m, n).
    """
    counts = np.ones(1, dtype=np.int64)
    for k in range(1, n + 1):
        prev_deg = (k - 1) * m
        mult_deg = prev_deg + m + k
        target_deg = k * m
        work = np.zeros(mult_deg + 1, dtype=np.int64)
        work[: prev_deg + 1] += counts
        work[m + k : m + k + prev_deg + 1] -= counts
        for u in range(k, target_deg + 1):
            work[u] += work[u - k]
        counts = work[: target_deg + 1].copy()
    return counts


def mann_whitney(x, y) -> tuple[float, float]:
    """Two-sided Mann-Whitney U test; U is the first sample's statistic.

    The exact tie-free null distribution is used when min(n, m) <= 8;
    ties or larger samples fall back to the normal approximation with
    midranks, tie correction, and continuity correction.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    n, m = len(x), len(y)
    if n < 1 or m < 1:
        raise SampleTooSmall("both samples must be non-empty")
    pooled = np.concatenate([x, y])
    ranks = _midranks(pooled)
    u_x = float(ranks[:n].sum() - n * (n + 1) / 2.0)
    has_ties = len(np.unique(pooled)) < n + m

    if min(n, m) <= 8 and not has_ties:
        counts = mann_whitney_null_distribution(n, m).astype(float)
        total = counts.sum()
        k = int(round(u_x))
        cdf = counts[: k + 1].sum() / total
        sf = counts[k:].sum() / total
        return u_x, float(min(1.0, 2.0 * min(cdf, sf)))

    tie = _tie_term(pooled)
    nm = n + m
    mu = n * m / 2.0
    var = n * m / 12.0 * ((nm + 1) - tie / (nm * (nm - 1)))
    if var == 0.0:
        return u_x, 1.0
    z = (u_x - mu - math.copysign(0.5, u_x - mu)) / math.sqrt(var) if u_x != mu else 0.0
    return u_x, float(min(1.0, 2.0 * norm.sf(abs(z))))


# ---------------------------------------------------------------------------
# group comparison pipeline

@dataclass(frozen=True)
class ComparisonCell:
    """One interval x metric comparison across the three market groups."""

    interval_index: int
    metric: str
    group_sizes: dict
    group_means: dict
    shapiro: dict  # group -> (W, p)
    all_normal: bool
    omnibus_test: str  # "anova" or "kruskal-wallis"
    statistic: float
    p_value: float
    significant: bool
    pairwise: tuple[PairwiseResult, ...] = field(default=())


@dataclass(frozen=True)
class GroupComparisonReport:
    alpha: float
    cells: tuple[ComparisonCell, ...]
    skipped: tuple[tuple[int, str, str], ...]  # (interval, metric, reason)

    def cell(self, interval_index: int, metric: str) -> ComparisonCell | None:
        for c in self.cells:
            if c.interval_index == interval_index and c.metric == metric:
                return c
        return None


def compare_groups(samples: dict, interval_index: int = 0, metric: str = "",
                   alpha: float = ALPHA) -> ComparisonCell:
    """Shapiro-Wilk gated ANOVA / Kruskal-Wallis comparison of groups.

    ``samples`` maps group label to a value sequence. Post-hoc pairwise
    tests (Bonferroni t or Mann-Whitney) run only when the omnibus test
    is significant at ``alpha``.
    """
    labels = list(samples)
    gs = [np.asarray(samples[g], dtype=float) for g in labels]
    if any(len(g) < 3 for g in gs):
        raise SampleTooSmall("each group needs n >= 3 for the normality gate")
    sw = {}
    all_normal = True
    for label, g in zip(labels, gs):
        try:
            w, p = shapiro_wilk(g)
        except ValueError:  # zero-range group: not plausibly normal
            w, p = 0.0, 0.0
        sw[label] = (w, p)
        all_normal &= p >= alpha

    pairwise: tuple[PairwiseResult, ...] = ()
    if all_normal:
        stat, p_val = anova_oneway(gs)
        test = "anova"
        if p_val < alpha:
            pairwise = tuple(bonferroni_pairwise(gs, labels, alpha))
    else:
        stat, p_val = kruskal_wallis(gs)
        test = "kruskal-wallis"
        if p_val < alpha:
            n_pairs = len(labels) * (len(labels) - 1) // 2
            results = []
            for i in range(len(labels)):
                for j in range(i + 1, len(labels)):
                    u, p_raw = mann_whitney(gs[i], gs[j])
                    adj = min(1.0, p_raw * n_pairs)
                    results.append(PairwiseResult(labels[i], labels[j], u,
                                                  p_raw, adj, adj < alpha))
            pairwise = tuple(results)

    return ComparisonCell(
        interval_index=interval_index,
        metric=metric,
        group_sizes={g: len(s) for g, s in zip(labels, gs)},
        group_means={g: float(s.mean()) for g, s in zip(labels, gs)},
        shapiro=sw,
        all_normal=all_normal,
        omnibus_test=test,
        statistic=stat,
        p_value=p_val,
        significant=p_val < alpha,
        pairwise=pairwise,
    )


def group_compare(metrics_per_market: dict, grouping: dict,
                  alpha: float = ALPHA) -> GroupComparisonReport:
    """Full per-interval, per-metric comparison across labeled markets.

    ``metrics_per_market`` maps market id to {interval index: BandMetric
    or None}; intervals absent for a market are skipped for that market.
    Cells where any group ends up with fewer than 3 values are recorded
    as skipped.
    """
    unknown = [mk for mk in metrics_per_market if mk not in grouping]
    if unknown:
        raise ValueError(f"markets without group label: {unknown}")
    cells = []
    skipped = []
    for interval in CYCLE_INTERVALS:
        for metric in ("e_w", "a_w"):
            samples: dict[str, list[float]] = {}
            for market, per_interval in metrics_per_market.items():
                bm = per_interval.get(interval.index)
                if bm is None:
                    continue
                samples.setdefault(grouping[market], []).append(getattr(bm, metric))
            if len(samples) < 2 or any(len(v) < 3 for v in samples.values()):
                skipped.append((interval.index, metric, "group below minimum size"))
                continue
            cells.append(compare_groups(samples, interval.index, metric, alpha))
    return GroupComparisonReport(alpha=alpha, cells=tuple(cells),
                                 skipped=tuple(skipped))
