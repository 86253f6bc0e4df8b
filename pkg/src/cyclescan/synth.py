"""Seeded synthetic return-series generators used as estimator oracles.

All generators draw from numpy's PCG64 bit generator via
``numpy.random.default_rng(seed)``, so identical (spec, seed) pairs
reproduce bitwise-identical output on any platform.
"""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidSpec
from .ingest import ReturnSeries

__all__ = ["SynthSpec", "generate", "fractional_gaussian_noise", "write_price_csv"]

KINDS = ("white", "fgn", "harmonic", "composite")


@dataclass(frozen=True)
class SynthSpec:
    """Recipe for one synthetic return series.

    kind
        ``white``     i.i.d. standard Gaussian returns.
        ``fgn``       fractional Gaussian noise with target exponent ``hurst``,
                      normalized to zero mean and unit variance.
        ``harmonic``  sum of cosines plus white Gaussian noise of sd
                      ``noise_sigma``.
        ``composite`` sum of cosines plus ``noise_sigma`` * fgn(hurst).
    """

    kind: str
    n: int
    hurst: float | None = None
    periods: tuple[float, ...] = ()
    amps: tuple[float, ...] = ()
    phases: tuple[float, ...] = ()
    noise_sigma: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidSpec(f"unknown kind {self.kind!r}; expected one of {KINDS}")
        if self.n < 16:
            raise InvalidSpec(f"n={self.n} < 16")
        if self.kind in ("fgn", "composite"):
            if self.hurst is None or not 0.0 < self.hurst < 1.0:
                raise InvalidSpec(f"fgn requires 0 < hurst < 1, got {self.hurst}")
        if self.kind in ("harmonic", "composite"):
            if not self.periods:
                raise InvalidSpec("harmonic spec requires at least one period")
            if any(p <= 0 or p >= self.n / 2 for p in self.periods):
                raise InvalidSpec("periods must lie in (0, n/2)")
            if self.amps and len(self.amps) != len(self.periods):
                raise InvalidSpec("amps must match periods")
            if self.phases and len(self.phases) != len(self.periods):
                raise InvalidSpec("phases must match periods")
        if self.noise_sigma < 0:
            raise InvalidSpec("noise_sigma must be >= 0")


def fractional_gaussian_noise(n: int, hurst: float, rng: np.random.Generator) -> np.ndarray:
    """Spectral-synthesis fGn: power spectrum ~ f^(1-2H), random phases.

    The inverse transform of Gaussian spectral amplitudes shaped by the
    target spectrum gives a stationary Gaussian series; it is normalized
    to zero mean (DC bin is zero) and unit sample variance. Median
    estimator calibration on this generator is within +-0.03 of target
    for H in {0.3, 0.5, 0.7} (see test suite).
    """
    freqs = np.fft.rfftfreq(n)[1:]
    amp = freqs ** ((1.0 - 2.0 * hurst) / 2.0)
    z = (rng.standard_normal(len(freqs)) + 1j * rng.standard_normal(len(freqs)))
    z /= np.sqrt(2.0)
    spectrum = np.concatenate(([0.0 + 0.0j], amp * z))
    if n % 2 == 0:
        # Nyquist bin of a real series is real
        spectrum[-1] = spectrum[-1].real * np.sqrt(2.0)
    x = np.fft.irfft(spectrum, n=n) * np.sqrt(n)
    return x / np.std(x)


def _harmonics(spec: SynthSpec) -> np.ndarray:
    t = np.arange(spec.n, dtype=float)
    amps = spec.amps or tuple(1.0 for _ in spec.periods)
    phases = spec.phases or tuple(0.0 for _ in spec.periods)
    out = np.zeros(spec.n)
    for period, amp, phase in zip(spec.periods, amps, phases):
        out += amp * np.cos(2.0 * np.pi * t / period + phase)
    return out


def generate(spec: SynthSpec, market_id: str | None = None) -> ReturnSeries:
    """Deterministically generate the return series described by ``spec``."""
    rng = np.random.default_rng(spec.seed)
    if spec.kind == "white":
        values = rng.standard_normal(spec.n)
    elif spec.kind == "fgn":
        values = fractional_gaussian_noise(spec.n, spec.hurst, rng)
    elif spec.kind == "harmonic":
        values = _harmonics(spec)
        if spec.noise_sigma > 0:
            values = values + spec.noise_sigma * rng.standard_normal(spec.n)
    else:  # composite
        values = _harmonics(spec)
        if spec.noise_sigma > 0:
            values = values + spec.noise_sigma * fractional_gaussian_noise(
                spec.n, spec.hurst, rng
            )
    name = market_id or f"synth-{spec.kind}-{spec.seed}"
    return ReturnSeries(market_id=name, values=values, lag=1)


def write_price_csv(returns: ReturnSeries, path, start=dt.date(2000, 1, 3),
                    base_price: float = 100.0) -> None:
    """Emit a `date,close` CSV whose log returns reproduce ``returns``.

    Dates walk a synthetic weekday calendar from ``start``; closes are
    base_price * exp(cumsum(returns)). Round-tripping through
    ingest.load_prices/log_returns recovers the values to float
    precision.
    """
    closes = base_price * np.exp(np.concatenate(([0.0], np.cumsum(returns.values))))
    day = start
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("date,close\n")
        for close in closes:
            while day.weekday() >= 5:
                day += dt.timedelta(days=1)
            fh.write(f"{day.isoformat()},{float(close)!r}\n")
            day += dt.timedelta(days=1)
