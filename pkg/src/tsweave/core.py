"""Time series value type, integration, averaging and interpolants."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_banded

from .errors import PartialGroupWarning, ValidationError

UNIFORM_RTOL = 1e-9

INTERPOLANT_KINDS = ("piecewise-constant-left", "piecewise-linear", "natural-cubic")


def _as_vector(values, name):
    try:
        arr = np.array(values, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"{name} is not a real sequence: {exc}") from None
    if arr.ndim != 1:
        raise ValidationError(f"{name} must be one-dimensional, got shape {arr.shape}")
    return arr


@dataclass(frozen=True, eq=False)
class TimeSeries:
    """Samples ``(x, y)`` with strictly increasing, finite ``x``.

    Both arrays are stored read-only. Iterating yields ``x`` then ``y`` so a
    series unpacks like a pair: ``x, y = ts``.

    A single point is structurally allowed (averaging can produce one
    group); use :func:`validate` for user input, which requires two.
    """

    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        x = _as_vector(self.x, "x")
        y = _as_vector(self.y, "y")
        if x.size != y.size:
            raise ValidationError(f"length mismatch: len(x)={x.size}, len(y)={y.size}")
        if x.size == 0:
            raise ValidationError("too few points: series is empty")
        for name, arr in (("x", x), ("y", y)):
            bad = np.flatnonzero(~np.isfinite(arr))
            if bad.size:
                raise ValidationError(f"non-finite {name} at index {bad[0]}", index=int(bad[0]))
        bad = np.flatnonzero(np.diff(x) <= 0)
        if bad.size:
            i = int(bad[0]) + 1
            raise ValidationError(f"non-increasing x at index {i}", index=i)
        x.flags.writeable = False
        y.flags.writeable = False
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    def __len__(self):
        return self.x.size

    def __iter__(self):
        yield self.x
        yield self.y

    def __eq__(self, other):
        if not isinstance(other, TimeSeries):
            return NotImplemented
        return np.array_equal(self.x, other.x) and np.array_equal(self.y, other.y)

    def __repr__(self):
        return f"TimeSeries(m={len(self)}, x=[{float(self.x[0])!r}..{float(self.x[-1])!r}])"

    @property
    def domain(self):
        return float(self.x[0]), float(self.x[-1])

    def with_y(self, y):
        return TimeSeries(self.x, y)


def validate(x, y) -> TimeSeries:
    """Build a :class:`TimeSeries` from user data, requiring at least two points."""
    ts = TimeSeries(x, y)
    if len(ts) < 2:
        raise ValidationError(f"too few points: need at least 2, got {len(ts)}")
    return ts


def require_points(ts: TimeSeries, m: int, what: str = "operation"):
    if len(ts) < m:
        raise ValidationError(f"{what} needs at least {m} points, got {len(ts)}")


def uniform_step(ts: TimeSeries, rtol: float = UNIFORM_RTOL) -> float:
    """Return the common spacing of ``ts`` or raise if the grid is not uniform."""
    require_points(ts, 2, "uniform spacing check")
    dx = np.diff(ts.x)
    step = (ts.x[-1] - ts.x[0]) / (len(ts) - 1)
    bad = np.flatnonzero(np.abs(dx - step) > rtol * abs(step))
    if bad.size:
        i = int(bad[0]) + 1
        raise ValidationError(f"non-uniform spacing at index {i}", index=i)
    return float(step)


def trapezoid_integral(ts: TimeSeries, a: float, b: float) -> float:
    """Integrate the piecewise-linear interpolant of ``ts`` over ``[a, b]``."""
    x, y = ts
    if not (x[0] <= a < b <= x[-1]):
        raise ValidationError(f"bounds [{a}, {b}] outside domain [{x[0]}, {x[-1]}] or empty")
    lo = np.searchsorted(x, a, side="right")
    hi = np.searchsorted(x, b, side="left")
    xs = np.concatenate(([a], x[lo:hi], [b]))
    ys = np.concatenate(([np.interp(a, x, y)], y[lo:hi], [np.interp(b, x, y)]))
    return float(np.sum(0.5 * (ys[1:] + ys[:-1]) * np.diff(xs)))


def average(ts: TimeSeries, n: int) -> TimeSeries:
    """Average groups of ``n`` intervals of a uniformly spaced series.

    Each output point sits at its group start; its value is the trapezoid
    integral over the group span divided by that span, so the result is
    meant to be drawn as steps-post. Intervals left over after the last
    whole group are dropped with a :class:`PartialGroupWarning`.
    """
    if isinstance(n, bool) or int(n) != n or n < 1:
        raise ValidationError(f"group size n must be a positive integer, got {n!r}")
    n = int(n)
    uniform_step(ts)
    x, y = ts
    groups, rest = divmod(len(ts) - 1, n)
    if groups == 0:
        raise ValidationError(f"series has {len(ts) - 1} intervals, fewer than one group of {n}")
    if rest:
        warnings.warn(
            f"dropping {rest} trailing interval(s) that do not fill a group of {n}",
            PartialGroupWarning,
            stacklevel=2,
        )
    areas = 0.5 * (y[1:] + y[:-1]) * np.diff(x)
    sums = areas[: groups * n].reshape(groups, n).sum(axis=1)
    starts = x[: groups * n + 1 : n]
    return TimeSeries(starts[:-1], sums / np.diff(starts))


def _natural_second_derivatives(x, y):
    """Second derivatives at the knots of the natural cubic interpolant."""
    m = x.size
    moments = np.zeros(m)
    if m < 3:
        return moments
    h = np.diff(x)
    slopes = np.diff(y) / h
    ab = np.zeros((3, m - 2))
    ab[0, 1:] = h[1:-1]
    ab[1] = 2.0 * (h[:-1] + h[1:])
    ab[2, :-1] = h[1:-1]
    moments[1:-1] = solve_banded((1, 1), ab, 6.0 * np.diff(slopes))
    return moments


class Interpolant:
    """Evaluable function through the points of a series.

    Calling it outside ``[x_first, x_last]`` raises; at a knot it returns
    the knot value exactly, whatever the kind.
    """

    def __init__(self, ts: TimeSeries, kind: str = "natural-cubic"):
        if kind not in INTERPOLANT_KINDS:
            raise ValidationError(f"unknown interpolant kind {kind!r}; expected one of {INTERPOLANT_KINDS}")
        require_points(ts, 2, "interpolation")
        self.kind = kind
        self.knots = ts
        self._moments = _natural_second_derivatives(ts.x, ts.y) if kind == "natural-cubic" else None

    @property
    def domain(self):
        return self.knots.domain

    def __repr__(self):
        return f"Interpolant(kind={self.kind!r}, knots={self.knots!r})"

    def __call__(self, t):
        scalar = np.ndim(t) == 0
        t = np.asarray(t, dtype=float)
        x, y = self.knots
        if np.any(~np.isfinite(t)) or np.any(t < x[0]) or np.any(t > x[-1]):
            raise ValidationError(f"evaluation outside domain [{x[0]}, {x[-1]}]")
        # segment index i such that x[i] <= t < x[i+1]; the right end maps to the last segment
        i = np.clip(np.searchsorted(x, t, side="right") - 1, 0, x.size - 2)
        if self.kind == "piecewise-constant-left":
            out = y[i].astype(float)
        elif self.kind == "piecewise-linear":
            h = x[i + 1] - x[i]
            out = y[i] + (t - x[i]) * ((y[i + 1] - y[i]) / h)
        else:
            # local polynomial around x[i]; flat data stays exactly flat
            h = x[i + 1] - x[i]
            d = t - x[i]
            mi, mj = self._moments[i], self._moments[i + 1]
            slope = (y[i + 1] - y[i]) / h - h * (2.0 * mi + mj) / 6.0
            out = y[i] + d * (slope + d * (mi / 2.0 + d * (mj - mi) / (6.0 * h)))
        hit = np.minimum(np.searchsorted(x, t), x.size - 1)
        on_knot = x[hit] == t
        out = np.where(on_knot, y[hit], out)
        return float(out) if scalar else out


def make_interpolant(ts: TimeSeries, kind: str = "natural-cubic") -> Interpolant:
    return Interpolant(ts, kind)
