"""Recreate fine-grained semi-synthetic time series from averaged measurements."""

from . import datasets
from .core import Interpolant, TimeSeries, average, make_interpolant, trapezoid_integral, validate
from .errors import (
    NumericalError,
    PartialGroupWarning,
    SignFlipWarning,
    StageError,
    ValidationError,
    WeaverError,
)
from .match import MatchSpec, integral_match
from .oversampling import STRATEGIES, OversampleSpec, allocate_windows, oversample, transition
from .pipeline import PipelineConfig, StageDescriptor, Weaver, derive_seed, replay, run_pipeline
from .transform import (
    NoiseSpec,
    SmoothSpec,
    TrendSpec,
    add_noise,
    apply_trend,
    default_smoothing,
    repeat,
    smooth,
)
from .trendexpr import TrendExpression, parse_trend

__version__ = "0.1.0"
