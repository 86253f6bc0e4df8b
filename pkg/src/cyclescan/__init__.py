"""Cycle detection and scaling analysis of stock-market-index returns.

The package chains four capabilities over daily log-return series:

* Morlet wavelet scalegrams with peak significance testing (``cwt``,
  ``peaks``) and band energy/amplitude statistics (``spectral_stats``);
* centered detrended moving average Hurst estimation, global,
  time-dependent, and per cycle interval (``dma``);
* Hurst-space market comparison and the Development Index
  (``devindex``);
* seeded synthetic oracles (``synth``) and batch pipelines
  (``pipeline``, ``cli``).
"""

from .cwt import (
    FOURIER_FACTOR,
    OMEGA0,
    ScaleGrid,
    Scalegram,
    SignificanceResult,
    SpectralFit,
    WaveletField,
    build_scale_grid,
    cwt,
    scalegram,
    significance,
    significance_multiplier,
    spectral_exponent,
)
from .devindex import (
    CANONICAL_DIRECTION,
    ClassificationResult,
    DevelopmentDirection,
    DevelopmentReport,
    ReferenceVector,
    UnitVector,
    classify,
    development_direction,
    development_index,
    development_report,
    fixture_report,
    load_fixture,
    reference_vector,
    similarity_matrix,
    unit_vector,
)
from .dma import (
    FluctuationCurve,
    HurstEstimate,
    HurstVector,
    LocalHurstSeries,
    cdma_fluctuation,
    default_window_grid,
    hurst_global,
    hurst_vector,
    profile,
    tddma,
)
from .errors import CyclescanError
from .ingest import PriceSeries, ReturnSeries, load_prices, log_returns
from .peaks import (
    CYCLE_INTERVALS,
    TRADING_TO_REAL,
    CycleInterval,
    Peak,
    PeakIntervalMap,
    assign_intervals,
    detect_peaks,
    interval_for_real_days,
    real_to_trading_days,
    trading_to_real_days,
)
from .pipeline import CohortReport, MarketInput, MarketReport, RunConfig, run_cohort, run_market
from .spectral_stats import (
    BandMetric,
    band_amplitude,
    band_energy,
    band_metrics,
    anova_oneway,
    bonferroni_pairwise,
    compare_groups,
    group_compare,
    kruskal_wallis,
    mann_whitney,
    mann_whitney_null_distribution,
    relative_amplitude,
    relative_energy,
    shapiro_wilk,
)
from .synth import SynthSpec, fractional_gaussian_noise, generate

__version__ = "0.1.0"
