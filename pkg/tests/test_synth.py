"""Synthetic generator contracts: reproducibility and calibration."""

import numpy as np
import pytest

from cyclescan.dma import hurst_global, profile
from cyclescan.errors import InvalidSpec
from cyclescan.ingest import load_prices, log_returns
from cyclescan.synth import (SynthSpec, fractional_gaussian_noise, generate,
                             write_price_csv)


def test_identical_spec_and_seed_bitwise_identical():
    spec = SynthSpec(kind="fgn", n=512, hurst=0.6, seed=42)
    a = generate(spec)
    b = generate(spec)
    assert np.array_equal(a.values, b.values)


def test_different_seed_differs():
    a = generate(SynthSpec(kind="white", n=256, seed=1))
    b = generate(SynthSpec(kind="white", n=256, seed=2))
    assert not np.array_equal(a.values, b.values)


@pytest.mark.parametrize("kwargs", [
    dict(kind="pink", n=64),
    dict(kind="white", n=8),
    dict(kind="fgn", n=64),                       # missing hurst
    dict(kind="fgn", n=64, hurst=1.0),
    dict(kind="fgn", n=64, hurst=0.0),
    dict(kind="harmonic", n=64),                  # missing periods
    dict(kind="harmonic", n=64, periods=(40.0,)), # period >= n/2
    dict(kind="harmonic", n=64, periods=(10.0,), amps=(1.0, 2.0)),
    dict(kind="white", n=64, noise_sigma=-1.0),
])
def test_invalid_specs_rejected(kwargs):
    with pytest.raises(InvalidSpec):
        SynthSpec(**kwargs)


def test_fgn_zero_mean_unit_variance():
    x = generate(SynthSpec(kind="fgn", n=4096, hurst=0.7, seed=3)).values
    assert abs(x.mean()) < 1e-12  # DC bin is zero by construction
    assert x.std() == pytest.approx(1.0, abs=1e-12)
    assert np.all(np.isfinite(x))


def test_harmonic_zero_noise_is_exact_cosine_sum():
    spec = SynthSpec(kind="harmonic", n=128, periods=(16.0, 32.0),
                     amps=(2.0, 0.5), phases=(0.3, 1.1), seed=9)
    x = generate(spec).values
    t = np.arange(128)
    expected = (2.0 * np.cos(2 * np.pi * t / 16.0 + 0.3)
                + 0.5 * np.cos(2 * np.pi * t / 32.0 + 1.1))
    np.testing.assert_allclose(x, expected, atol=1e-12)


def test_composite_decomposes_into_harmonics_plus_scaled_fgn():
    spec = SynthSpec(kind="composite", n=256, hurst=0.6, periods=(20.0,),
                     amps=(1.5,), noise_sigma=0.4, seed=11)
    x = generate(spec).values
    harm = generate(SynthSpec(kind="harmonic", n=256, periods=(20.0,),
                              amps=(1.5,), seed=11)).values
    noise = fractional_gaussian_noise(256, 0.6, np.random.default_rng(11))
    np.testing.assert_allclose(x, harm + 0.4 * noise, atol=1e-12)


@pytest.mark.parametrize("target", [0.3, 0.5, 0.7])
def test_fgn_calibration_median_within_003(target):
    # generator invariant: 200-seed median of the DMA estimate within +-0.03
    n = 8192
    estimates = []
    for seed in range(200):
        x = fractional_gaussian_noise(n, target, np.random.default_rng(seed))
        estimates.append(hurst_global(profile(x), (10, n // 4)).h)
    assert abs(float(np.median(estimates)) - target) <= 0.03


def test_white_noise_hurst_near_half():
    estimates = []
    for seed in range(100):
        x = generate(SynthSpec(kind="white", n=8192, seed=seed)).values
        estimates.append(hurst_global(profile(x), (10, 2048)).h)
    assert float(np.mean(estimates)) == pytest.approx(0.5, abs=0.02)


def test_price_csv_round_trip(tmp_path):
    returns = generate(SynthSpec(kind="fgn", n=300, hurst=0.4, seed=5))
    out = tmp_path / "synth.csv"
    write_price_csv(returns, out)
    recovered = log_returns(load_prices(out, returns.market_id))
    np.testing.assert_allclose(recovered.values, returns.values, atol=1e-9)
