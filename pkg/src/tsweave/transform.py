"""Post-processing stages: smoothing, repetition, trend and noise."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Union

import numpy as np
from scipy.linalg import solveh_banded

from .core import TimeSeries, require_points, uniform_step
from .errors import NumericalError, ValidationError

RNG_ALGORITHM = "PCG64"

# --------------------------------------------------------------------------
# smoothing


@dataclass(frozen=True)
class SmoothSpec:
    """Residual bound ``s`` of the smoothing spline; ``None`` picks it from the data."""

    s: Optional[float] = None

    def __post_init__(self):
        if self.s is not None and (not np.isfinite(self.s) or self.s < 0):
            raise ValidationError(f"smoothing condition s must be a non-negative number, got {self.s!r}")


class _PenalizedSpline:
    """Reinsch form of the cubic smoothing spline on fixed knots.

    For a penalty weight ``lam`` the fitted values are ``g = y - lam * Q @ gamma``
    where ``(R + lam * Q.T @ Q) @ gamma = Q.T @ y``; ``gamma`` holds the
    second derivatives at the interior knots.
    """

    def __init__(self, x, y):
        h = np.diff(x)
        self.y = y
        inv = 1.0 / h
        # columns of Q: interior knot j has entries at rows j-1, j, j+1
        self.qa = inv[:-1]
        self.qb = -inv[:-1] - inv[1:]
        self.qc = inv[1:]
        k = h.size - 1
        self.r_diag = (h[:-1] + h[1:]) / 3.0
        self.r_off = h[1:-1] / 6.0
        qa, qb, qc = self.qa, self.qb, self.qc
        self.qtq0 = qa**2 + qb**2 + qc**2
        self.qtq1 = qb[:-1] * qa[1:] + qc[:-1] * qb[1:]
        self.qtq2 = qc[:-2] * qa[2:]
        self.qty = qa * y[:-2] + qb * y[1:-1] + qc * y[2:]
        self.k = k

    def _q_times(self, gamma):
        out = np.zeros(self.y.size)
        out[:-2] += self.qa * gamma
        out[1:-1] += self.qb * gamma
        out[2:] += self.qc * gamma
        return out

    def fit(self, lam):
        """Return ``(fitted values, residual sum of squares)``."""
        k = self.k
        ab = np.zeros((3, k))
        ab[2] = self.r_diag + lam * self.qtq0
        ab[1, 1:] = self.r_off + lam * self.qtq1
        ab[0, 2:] = lam * self.qtq2
        gamma = solveh_banded(ab, self.qty)
        correction = lam * self._q_times(gamma)
        return self.y - correction, float(correction @ correction)


def _line_fit(x, y):
    design = np.column_stack((np.ones_like(x), x - x.mean()))
    coef, *_ = np.linalg.lstsq(design, y, rcond=None)
    fitted = design @ coef
    return fitted, float(np.sum((y - fitted) ** 2))


def default_smoothing(ts: TimeSeries) -> float:
    """``m * sigma**2`` with sigma a MAD-based noise scale from second differences."""
    require_points(ts, 4, "smoothing")
    d2 = np.diff(ts.y, 2)
    sigma = np.median(np.abs(d2)) / (np.sqrt(6.0) * 0.6745)
    return float(len(ts) * sigma**2)


def smoothing_fit(ts: TimeSeries, s: float, rtol: float = 1e-10):
    """Fit the smoothing spline with residual bound ``s``.

    Returns ``(fitted values, penalty weight)``; the weight is ``inf`` when
    the bound admits the least-squares straight line.
    """
    x, y = ts
    if s == 0:
        return y.copy(), 0.0
    line, line_rss = _line_fit(x, y)
    if line_rss <= s:
        return line, np.inf
    spline = _PenalizedSpline(x, y)

    def rss(log_lam):
        return spline.fit(np.exp(log_lam))[1]

    # bracket: rss(lo) <= s < rss(hi); rss is increasing in the weight
    lo = hi = 0.0
    while rss(hi) <= s:
        lo, hi = hi, hi + 8.0
        if hi > 700:
            return line, np.inf
    while rss(lo) > s:
        lo, hi = lo - 8.0, lo
        if lo < -700:
            return y.copy(), 0.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        value = rss(mid)
        if value > s:
            hi = mid
        else:
            lo = mid
            if s - value <= rtol * s:
                break
        if hi - lo < 1e-14 * max(1.0, abs(lo)):
            break
    fitted, _ = spline.fit(np.exp(lo))
    return fitted, float(np.exp(lo))


def smooth(ts: TimeSeries, spec: SmoothSpec = SmoothSpec()) -> TimeSeries:
    """Smoothing spline through ``ts`` sampled back on its own grid.

    Among cubic splines with residual sum of squares at most ``s`` this
    picks the one with least integrated squared second derivative. ``s=0``
    reproduces the data.
    """
    require_points(ts, 4, "smoothing")
    s = default_smoothing(ts) if spec.s is None else float(spec.s)
    fitted, _ = smoothing_fit(ts, s)
    return ts.with_y(fitted)


# --------------------------------------------------------------------------
# repetition and trend


def repeat(ts: TimeSeries, k: int) -> TimeSeries:
    """Tile ``ts`` ``k`` times with period ``m * dx`` (one wrap interval per copy)."""
    if isinstance(k, bool) or int(k) != k or k < 1:
        raise ValidationError(f"repeat count must be a positive integer, got {k!r}")
    k = int(k)
    step = uniform_step(ts)
    period = len(ts) * step
    shifts = np.arange(k)[:, None] * period
    x = (ts.x[None, :] + shifts).ravel()
    return TimeSeries(x, np.tile(ts.y, k))


@dataclass(frozen=True)
class TrendSpec:
    """Additive shift as a function of time normalised to ``[0, 1]``."""

    f: Callable


def _evaluate_trend(f, t):
    try:
        out = np.asarray(f(t), dtype=float)
        if out.shape == ():
            out = np.full(t.shape, float(out))
        if out.shape == t.shape:
            return out
    except (TypeError, ValueError):
        pass
    return np.array([float(f(float(v))) for v in t])


def apply_trend(ts: TimeSeries, spec: Union[TrendSpec, Callable]) -> TimeSeries:
    """Add ``f(t)`` to every sample, ``t`` running from 0 at the first x to 1 at the last."""
    f = spec.f if isinstance(spec, TrendSpec) else spec
    require_points(ts, 2, "trend")
    x0, x1 = ts.domain
    t = (ts.x - x0) / (x1 - x0)
    shift = _evaluate_trend(f, t)
    bad = np.flatnonzero(~np.isfinite(shift))
    if bad.size:
        i = int(bad[0])
        raise NumericalError(f"trend returned non-finite value at index {i} (t={t[i]!r})", index=i)
    return ts.with_y(ts.y + shift)


# --------------------------------------------------------------------------
# noise


@dataclass(frozen=True)
class NoiseSpec:
    """Gaussian noise given either as SNR in dB or as a standard deviation.

    ``snr_db`` may be a scalar or one value per sample. ``seed`` feeds a
    PCG64 generator; ``None`` draws fresh entropy.
    """

    snr_db: Union[None, float, Sequence[float]] = None
    std: Optional[float] = None
    seed: Optional[int] = None

    def __post_init__(self):
        if (self.snr_db is None) == (self.std is None):
            raise ValidationError("exactly one of snr_db and std must be given")
        if self.std is not None and (not np.isfinite(self.std) or self.std < 0):
            raise ValidationError(f"std must be a non-negative number, got {self.std!r}")
        if self.snr_db is not None:
            snr = np.asarray(self.snr_db, dtype=float)
            if snr.ndim > 1 or not np.all(np.isfinite(snr)):
                raise ValidationError("snr_db must be a finite scalar or sequence")
        if self.seed is not None and (isinstance(self.seed, bool) or int(self.seed) != self.seed or self.seed < 0):
            raise ValidationError(f"seed must be a non-negative integer, got {self.seed!r}")

    def sigma(self, y: np.ndarray) -> np.ndarray:
        """Per-sample noise standard deviation for signal ``y``."""
        if self.std is not None:
            return np.full(y.size, float(self.std))
        snr = np.asarray(self.snr_db, dtype=float)
        if snr.ndim == 1 and snr.size != y.size:
            raise ValidationError(f"snr_db has {snr.size} values for a series of {y.size} points")
        power = np.mean(y**2)
        return np.broadcast_to(np.sqrt(power / 10.0 ** (snr / 10.0)), y.shape)


def add_noise(ts: TimeSeries, spec: NoiseSpec) -> TimeSeries:
    sigma = spec.sigma(ts.y)
    rng = np.random.Generator(np.random.PCG64(spec.seed))
    return ts.with_y(ts.y + sigma * rng.standard_normal(len(ts)))
