"""Refine a coarse series to ``n`` samples per interval.

Every strategy produces the same uniform refinement of each original
interval; they differ in how the value moves from one level to the next.
The window strategies start from a left-constant baseline and replace the
step at each knot by a monotone ramp over a transition window straddling
that knot.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import TimeSeries, make_interpolant, require_points
from .errors import ValidationError

STRATEGIES = (
    "piecewise_constant",
    "cubic_spline",
    "linear_fixed",
    "exp_fixed",
    "linear_adaptive",
    "exp_adaptive",
)


@dataclass(frozen=True)
class OversampleSpec:
    """Parameters of one oversampling run.

    ``alpha`` is the share of an interval a knot's transition window may
    take, ``lam`` the weight of the linear term in the exponential ramp and
    ``gamma`` the curvature of its exponential term.
    """

    n: int
    strategy: str = "exp_adaptive"
    alpha: float = 0.5
    lam: float = 0.5
    gamma: float = 5.0

    def __post_init__(self):
        if isinstance(self.n, bool) or int(self.n) != self.n or self.n < 2:
            raise ValidationError(f"n must be an integer >= 2, got {self.n!r}")
        object.__setattr__(self, "n", int(self.n))
        if self.strategy not in STRATEGIES:
            raise ValidationError(f"unknown strategy {self.strategy!r}; expected one of {STRATEGIES}")
        if not 0 < self.alpha <= 1:
            raise ValidationError(f"alpha must lie in (0, 1], got {self.alpha!r}")
        if not 0 <= self.lam <= 1:
            raise ValidationError(f"lam must lie in [0, 1], got {self.lam!r}")
        if not self.gamma > 0 or not np.isfinite(self.gamma):
            raise ValidationError(f"gamma must be positive, got {self.gamma!r}")


@dataclass(frozen=True)
class WindowAllocation:
    """Transition half-widths per knot as fractions of the adjacent interval.

    ``left[i]`` is measured in the interval left of knot ``i`` and
    ``right[i]`` in the interval to its right. The first knot has no left
    window and the last no right window.
    """

    left: np.ndarray
    right: np.ndarray


def allocate_windows(ts: TimeSeries, alpha: float) -> WindowAllocation:
    """Split each interior knot's window inversely to the change on each side.

    A large jump on the right side of a knot shrinks the right half-window;
    the two halves always sum to ``alpha / 2``.
    """
    require_points(ts, 2, "window allocation")
    m = len(ts)
    left = np.zeros(m)
    right = np.zeros(m)
    quarter = alpha / 4.0
    right[0] = quarter
    left[-1] = quarter
    if m > 2:
        change = np.abs(np.diff(ts.y))
        d_left, d_right = change[:-1], change[1:]
        total = d_left + d_right
        flat = total == 0
        safe = np.where(flat, 1.0, total)
        # divide before scaling so tiny (subnormal) changes keep their ratio
        left[1:-1] = np.where(flat, quarter, 0.5 * alpha * (d_right / safe))
        right[1:-1] = np.where(flat, quarter, 0.5 * alpha * (d_left / safe))
    return WindowAllocation(left, right)


def fixed_windows(ts: TimeSeries, alpha: float) -> WindowAllocation:
    m = len(ts)
    left = np.full(m, alpha / 4.0)
    right = np.full(m, alpha / 4.0)
    left[0] = 0.0
    right[-1] = 0.0
    return WindowAllocation(left, right)


def _shape_fraction(t, shape, lam, gamma):
    if shape == "linear":
        return t
    if shape != "exp":
        raise ValidationError(f"unknown transition shape {shape!r}")
    return lam * t + (1.0 - lam) * np.expm1(gamma * t) / np.expm1(gamma)


def transition(t, y0, y1, shape="linear", lam=0.5, gamma=5.0):
    """Value of the ramp from ``y0`` (``t=0``) to ``y1`` (``t=1``)."""
    t_arr = np.asarray(t, dtype=float)
    if np.any(~(t_arr >= 0)) or np.any(t_arr > 1):
        raise ValidationError(f"transition parameter t must lie in [0, 1], got {t!r}")
    c = _shape_fraction(t_arr, shape, lam, gamma)
    out = np.where(t_arr >= 1.0, y1, y0 + c * (np.asarray(y1) - y0))
    return float(out) if out.ndim == 0 else out


def refine_grid(x: np.ndarray, n: int) -> np.ndarray:
    """Uniform refinement with ``n`` points per interval plus the final knot."""
    frac = np.arange(n) / n
    inner = x[:-1, None] + frac[None, :] * np.diff(x)[:, None]
    return np.append(inner.ravel(), x[-1])


def _windowed(ts: TimeSeries, n: int, windows: WindowAllocation, shape: str, lam: float, gamma: float):
    x, y = ts
    m = len(ts)
    width = np.diff(x)
    values = np.append(np.repeat(y[:-1], n), y[-1])

    # fractional position j/n of every refined sample inside its interval
    frac = np.append(np.tile(np.arange(n) / n, m - 1), 1.0)
    seg = np.append(np.repeat(np.arange(m - 1), n), m - 2)
    # knot k's window spans [x_k - left_k * w_{k-1}, x_k + right_k * w_k]
    span = np.zeros(m)
    span[1:] += windows.left[1:] * width
    span[:-1] += windows.right[:-1] * width

    # samples in the left half of the window of knot seg+1
    knot = seg + 1
    in_left = frac >= 1.0 - windows.left[knot]
    offset = (frac - (1.0 - windows.left[knot])) * width[seg]
    # samples in the right half of the window of knot seg; knot 0 has no ramp
    in_right = (frac <= windows.right[seg]) & (seg >= 1) & ~in_left
    knot = np.where(in_left, knot, seg)
    offset = np.where(in_left, offset, windows.left[seg] * width[np.maximum(seg - 1, 0)] + frac * width[seg])

    ramp = in_left | in_right
    k = knot[ramp]
    t = np.clip(offset[ramp] / span[k], 0.0, 1.0)
    values[ramp] = transition(t, y[k - 1], y[k], shape, lam, gamma)
    return values


def oversample(ts: TimeSeries, spec: OversampleSpec) -> TimeSeries:
    """Return ``ts`` refined to ``spec.n`` samples per original interval."""
    require_points(ts, 2, "oversampling")
    n = spec.n
    grid = refine_grid(ts.x, n)
    strategy = spec.strategy
    if strategy == "piecewise_constant":
        values = np.append(np.repeat(ts.y[:-1], n), ts.y[-1])
    elif strategy == "cubic_spline":
        values = make_interpolant(ts, "natural-cubic")(grid)
    else:
        shape, mode = strategy.split("_")
        if mode == "adaptive":
            windows = allocate_windows(ts, spec.alpha)
        else:
            windows = fixed_windows(ts, spec.alpha)
        values = _windowed(ts, n, windows, shape, spec.lam, spec.gamma)
    return TimeSeries(grid, values)
