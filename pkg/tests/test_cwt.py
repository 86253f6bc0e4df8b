"""Wavelet transform contracts: grid, linearity, scalegram, significance."""

import math

import numpy as np
import pytest

from conftest import make_field
from cyclescan.cwt import (FOURIER_FACTOR, Scalegram, build_scale_grid, cwt,
                           scalegram, significance, significance_multiplier,
                           spectral_exponent, scalegram_csv_rows)
from cyclescan.errors import RangeTooNarrow, SeriesTooShort
from cyclescan.synth import SynthSpec, fractional_gaussian_noise, generate


# --- scale grid -----------------------------------------------------------

def test_grid_respects_n_over_five():
    grid = build_scale_grid(1000, voices_per_octave=8)
    assert grid.scales[-1] <= 200.0
    assert grid.a_min == 2.0
    assert np.all(np.diff(grid.scales) > 0)


def test_grid_minimal_series_single_scale():
    grid = build_scale_grid(10, voices_per_octave=8)
    assert grid.scales.tolist() == [2.0]


def test_grid_dyadic():
    grid = build_scale_grid(5120, voices_per_octave=1)
    assert grid.scales.tolist() == [2.0, 4.0, 8.0, 16.0, 32.0, 64.0,
                                    128.0, 256.0, 512.0, 1024.0]


def test_grid_too_short():
    with pytest.raises(SeriesTooShort):
        build_scale_grid(9)


def test_grid_log_spacing():
    grid = build_scale_grid(4096, voices_per_octave=8)
    ratios = grid.scales[1:] / grid.scales[:-1]
    np.testing.assert_allclose(ratios, 2 ** 0.125, rtol=1e-12)


# --- transform ------------------------------------------------------------

def test_zero_series_gives_zero_field():
    grid = build_scale_grid(200)
    field = cwt(np.zeros(200), grid)
    assert np.all(field.coefficients == 0)


def test_linearity(rng):
    grid = build_scale_grid(300)
    x = rng.standard_normal(300)
    y = rng.standard_normal(300)
    wx = cwt(x, grid).coefficients
    wy = cwt(y, grid).coefficients
    wxy = cwt(x + y, grid).coefficients
    assert np.max(np.abs(wxy - (wx + wy))) < 1e-9


def test_amplitude_scaling(rng):
    grid = build_scale_grid(300)
    x = rng.standard_normal(300)
    w1 = cwt(x, grid)
    w3 = cwt(3.0 * x, grid)
    assert np.max(np.abs(w3.coefficients - 3.0 * w1.coefficients)) < 1e-9
    np.testing.assert_allclose(scalegram(w3).energy, 9.0 * scalegram(w1).energy,
                               rtol=1e-9)


def test_direct_and_fft_paths_agree(rng):
    for n in (128, 500, 700):
        grid = build_scale_grid(n)
        x = rng.standard_normal(n)
        direct = cwt(x, grid, method="direct").coefficients
        fast = cwt(x, grid, method="fft").coefficients
        assert np.max(np.abs(direct - fast)) < 1e-9


def test_time_shift_covariance(rng):
    n, k = 400, 37
    grid = build_scale_grid(n)
    x = rng.standard_normal(n)
    shifted = np.concatenate([np.zeros(k), x])
    w = cwt(x, grid).coefficients
    ws = cwt(shifted, grid).coefficients
    assert np.max(np.abs(ws[:, k:] - w)) < 1e-9


def test_cosine_peak_at_morlet_predicted_scale():
    # |W| maximal at a ~ P*(w0+sqrt(2+w0^2))/(4*pi) = P/1.0330 for w0=6;
    # oracle: brute-force argmax over the grid
    n = 2048
    grid = build_scale_grid(n)
    step = 2 ** (1.0 / grid.voices_per_octave)
    for period in (10.0, 20.0, 50.0):
        x = np.cos(2 * np.pi * np.arange(n) / period)
        field = cwt(x, grid)
        amax = grid.scales[np.argmax(np.abs(field.coefficients[:, n // 2]))]
        predicted = period / FOURIER_FACTOR
        assert max(amax / predicted, predicted / amax) <= step * (1 + 1e-9)


def test_coi_capped_and_edge_shaped():
    grid = build_scale_grid(500)
    field = cwt(np.ones(500), grid)
    assert np.all(field.coi <= grid.a_max)
    assert field.coi[0] == 0.0
    assert field.coi[250] == pytest.approx(min(249 / math.sqrt(2), grid.a_max))


# --- scalegram ------------------------------------------------------------

def test_zero_field_zero_scalegram():
    grid = build_scale_grid(200)
    assert np.all(scalegram(cwt(np.zeros(200), grid)).energy == 0)


def test_scalegram_argmax_matches_cosine_prediction():
    n = 2048
    grid = build_scale_grid(n)
    step = 2 ** (1.0 / grid.voices_per_octave)
    x = np.cos(2 * np.pi * np.arange(n) / 50.0)
    sg = scalegram(cwt(x, grid))
    amax = grid.scales[np.argmax(sg.energy)]
    predicted = 50.0 / FOURIER_FACTOR
    assert max(amax / predicted, predicted / amax) <= step * (1 + 1e-9)


def test_white_noise_scalegram_flat_within_15_percent():
    n = 4096
    grid = build_scale_grid(n)
    total = np.zeros(len(grid))
    seeds = 100
    for seed in range(seeds):
        x = generate(SynthSpec(kind="white", n=n, seed=seed)).values
        total += scalegram(cwt(x, grid)).energy
    mean_energy = total / seeds
    deviation = mean_energy / mean_energy.mean() - 1.0
    assert np.max(np.abs(deviation)) < 0.15


def test_coi_only_scalegram_not_larger():
    grid = build_scale_grid(400)
    field = cwt(np.random.default_rng(0).standard_normal(400), grid)
    full = scalegram(field).energy
    inside = scalegram(field, coi_only=True).energy
    assert np.all(inside <= full + 1e-12)


# --- significance ---------------------------------------------------------

def test_multiplier_value_against_analytic_quantile():
    # chi2 with 2 dof has CDF 1 - exp(-x/2); the (1-level) quantile is
    # -2*ln(level), so the multiplier is -ln(level)
    assert significance_multiplier(0.10) == pytest.approx(2.302585092994046,
                                                          abs=1e-12)
    for level in (0.01, 0.05, 0.10, 0.5):
        assert significance_multiplier(level) == pytest.approx(
            -math.log(level), rel=1e-12)


def test_multiplier_rejects_bad_level():
    with pytest.raises(ValueError):
        significance_multiplier(0.0)
    with pytest.raises(ValueError):
        significance_multiplier(1.0)


def test_constant_power_field_nothing_significant():
    # power equal to the background never exceeds the chi2 threshold as
    # long as the multiplier -ln(level) stays >= 1, i.e. level <= 1/e
    field = make_field(np.full((30, 200), 1.5 + 0.0j))
    for level in (0.05, 0.10, 0.25, math.exp(-1)):
        sig = significance(field, level)
        assert not sig.cell_significant.any()
        assert not sig.scale_significant.any()


def test_threshold_positive_where_spectrum_positive(rng):
    grid = build_scale_grid(300)
    sig = significance(cwt(rng.standard_normal(300), grid))
    assert np.all(sig.threshold[sig.global_spectrum > 0] > 0)


def test_white_noise_cell_false_positive_rate(rng):
    n = 1024
    grid = build_scale_grid(n)
    rates = []
    for seed in range(20):
        x = generate(SynthSpec(kind="white", n=n, seed=seed)).values
        sig = significance(cwt(x, grid), level=0.10)
        rates.append(sig.cell_significant.mean())
    assert 0.05 <= float(np.mean(rates)) <= 0.15


def test_harmonic_scale_flagged_significant():
    n = 1024
    grid = build_scale_grid(n)
    x = generate(SynthSpec(kind="harmonic", n=n, periods=(20.0,), amps=(2.0,),
                           noise_sigma=1.0, seed=7)).values
    sig = significance(cwt(x, grid), level=0.10)
    target = np.argmin(np.abs(grid.scales - 20.0 / FOURIER_FACTOR))
    assert sig.scale_significant[target]


# --- spectral exponent ----------------------------------------------------

def test_exact_power_law_recovered():
    scales = 2.0 * 2 ** (np.arange(40) / 8.0)
    sg = Scalegram(scales=scales, energy=3.7 * scales**1.0)
    fit = spectral_exponent(sg, (scales[0], scales[-1]))
    assert fit.beta == pytest.approx(1.0, abs=1e-6)
    assert fit.r_squared == pytest.approx(1.0, abs=1e-12)


def test_fit_range_too_narrow():
    scales = 2.0 * 2 ** (np.arange(40) / 8.0)
    sg = Scalegram(scales=scales, energy=scales**0.5)
    with pytest.raises(RangeTooNarrow):
        spectral_exponent(sg, (2.0, 2.5))


def test_white_noise_beta_near_zero():
    n = 2048
    grid = build_scale_grid(n)
    betas = []
    for seed in range(20):
        x = generate(SynthSpec(kind="white", n=n, seed=seed)).values
        sg = scalegram(cwt(x, grid))
        betas.append(spectral_exponent(sg, (4, n / 20)).beta)
    assert abs(float(np.median(betas))) <= 0.15


def test_fgn_beta_matches_two_h_minus_one():
    n = 2048
    grid = build_scale_grid(n)
    betas = []
    for seed in range(20):
        x = fractional_gaussian_noise(n, 0.8, np.random.default_rng(seed))
        sg = scalegram(cwt(x, grid))
        betas.append(spectral_exponent(sg, (4, n / 20)).beta)
    assert float(np.median(betas)) == pytest.approx(0.6, abs=0.2)


# --- export ---------------------------------------------------------------

def test_scalegram_csv_header_and_conversion(rng):
    grid = build_scale_grid(300)
    field = cwt(rng.standard_normal(300), grid)
    sg = scalegram(field)
    sig = significance(field)
    rows = list(scalegram_csv_rows(sg, sig))
    assert rows[0] == ("scale_trading_days", "scale_real_days", "energy",
                       "global", "threshold", "significant")
    assert len(rows) == len(grid) + 1
    first = rows[1]
    assert float(first[1]) == pytest.approx(float(first[0]) * 1.4, rel=1e-12)
