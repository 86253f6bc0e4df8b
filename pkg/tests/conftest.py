"""Shared helpers for the test suite."""

import numpy as np
import pytest

from cyclescan.cwt import ScaleGrid, WaveletField, build_scale_grid


def make_field(coefficients, a_min=2.0, voices=8) -> WaveletField:
    """Wrap a raw coefficient block in a WaveletField on a log grid."""
    coefficients = np.asarray(coefficients, dtype=complex)
    n_scales, n_times = coefficients.shape
    scales = a_min * 2.0 ** (np.arange(n_scales) / voices)
    grid = ScaleGrid(scales=scales, a_min=a_min, a_max=float(scales[-1]),
                     voices_per_octave=voices)
    t = np.arange(n_times, dtype=float)
    coi = np.minimum(np.minimum(t, n_times - 1 - t) / np.sqrt(2.0), grid.a_max)
    return WaveletField(coefficients=coefficients, grid=grid,
                        n_times=n_times, coi=coi)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def write_csv(path, rows, header="date,close"):
    path.write_text(header + "\n" + "\n".join(rows) + "\n", encoding="utf-8")
    return path
