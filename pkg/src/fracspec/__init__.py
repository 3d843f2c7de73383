"""Scale-spectrum analytics for daily price series.

Estimates local power-law structure (Hurst exponent, volatility) through
Haar scale spectra, detects regime switches by residual-minimizing
segmentation, measures multifractality via q-moment spectra, and
validates itself against synthetic fractional Brownian motion.
"""

from .errors import FracspecError
from .estimator import (
    PowerLawFit,
    R1,
    R3,
    RollingTrack,
    WeightScheme,
    fit_power_law,
    generalized_hurst,
    generalized_hurst_track,
    gls_fit,
    rescale_volatility,
    rolling_estimate,
)
from .ingest import (
    LogPriceSeries,
    PriceSeries,
    ReturnSeries,
    load_csv,
    to_log,
    to_returns,
    write_csv,
)
from .regularize import RegularizedSeries, compare_tracks, gaussianize_diffs
from .segment import Partition, SearchConfig, search_partition, segment_residual
from .spectrum import (
    InertialRange,
    QSpectrum,
    ScaleSpectrum,
    approx_coeffs,
    consecutive_return_corr,
    detail_coeffs,
    model_spectrum,
    q_spectrum,
    scale_spectrum,
    spectral_scaling,
)
from .synth import (
    FbmSpec,
    MbmSpec,
    SyntheticPath,
    fbm_covariance,
    fbm_log_prices,
    integrated_observations,
    sample_fbm,
    sample_mbm,
)
from .xcorr import AlignedPanel, ScaleCorrelations, align, pearson, scale_correlations

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
