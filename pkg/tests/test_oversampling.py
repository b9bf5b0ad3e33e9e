import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tsweave.core import make_interpolant, validate
from tsweave.errors import ValidationError
from tsweave.oversampling import (
    STRATEGIES,
    OversampleSpec,
    allocate_windows,
    fixed_windows,
    oversample,
    refine_grid,
    transition,
)

WINDOWED = [s for s in STRATEGIES if s.endswith(("_fixed", "_adaptive"))]


def test_piecewise_constant_example():
    out = oversample(validate([0, 1, 2], [10, 20, 30]), OversampleSpec(4, "piecewise_constant"))
    assert out.x.tolist() == [0, 0.25, 0.5, 0.75, 1, 1.25, 1.5, 1.75, 2]
    assert out.y.tolist() == [10, 10, 10, 10, 20, 20, 20, 20, 30]


@pytest.mark.parametrize("strategy", STRATEGIES)
def test_constant_input_is_exact(strategy):
    out = oversample(validate([0, 1, 2], [5, 5, 5]), OversampleSpec(10, strategy))
    assert np.all(out.y == 5.0)


def test_adaptive_example_window_ratio():
    # changes around the knot at x=1: 1 on the left, 3 on the right
    w = allocate_windows(validate([0, 1, 2, 3], [0, 1, 4, 5]), 1.0)
    assert w.left[1] == pytest.approx(3 / 8)
    assert w.right[1] == pytest.approx(1 / 8)
    assert w.left[1] / w.right[1] == pytest.approx(3.0)


def test_adaptive_example_in_samples():
    ts = validate([0, 1, 2, 3], [0, 1, 4, 5])
    out = oversample(ts, OversampleSpec(100, "linear_adaptive", alpha=1.0))
    x, y = out
    # ramp from 0 to 1 around x=1 occupies [1 - 3/8, 1 + 1/8]
    inside = (x >= 1 - 3 / 8 - 1e-12) & (x <= 1 + 1 / 8 + 1e-12)
    assert np.allclose(y[inside], (x[inside] - (1 - 3 / 8)) / 0.5, atol=1e-12)
    assert np.all(y[(x >= 0.25 - 1e-12) & (x < 1 - 3 / 8 - 1e-12)] == 0.0)


@pytest.mark.parametrize(
    "d_left, d_right, alpha, zl, zr",
    [(1, 3, 1.0, 3 / 8, 1 / 8), (2, 2, 0.5, 1 / 8, 1 / 8), (0, 0, 0.8, 0.2, 0.2)],
)
def test_allocation_formula(d_left, d_right, alpha, zl, zr):
    ts = validate([0, 1, 2], [0, d_left, d_left + d_right])
    w = allocate_windows(ts, alpha)
    assert w.left[1] == pytest.approx(zl, abs=1e-15)
    assert w.right[1] == pytest.approx(zr, abs=1e-15)
    assert w.right[0] == alpha / 4 and w.left[-1] == alpha / 4
    assert w.left[0] == 0 and w.right[-1] == 0


@given(st.lists(st.floats(-50, 50), min_size=3, max_size=20), st.floats(0.01, 1.0))
def test_windows_never_overlap(ys, alpha):
    ts = validate(np.arange(len(ys), dtype=float), ys)
    w = allocate_windows(ts, alpha)
    assert np.all(w.left <= alpha / 2 + 1e-15) and np.all(w.right <= alpha / 2 + 1e-15)
    assert np.all(w.right[:-1] + w.left[1:] <= alpha + 1e-15)


def test_transition_examples():
    for shape in ("linear", "exp"):
        assert transition(0.0, 3.0, 7.0, shape) == 3.0
        assert transition(1.0, 3.0, 7.0, shape) == 7.0
    assert transition(0.5, 0.0, 10.0, "linear") == 5.0
    expected = 0.5 * 0.5 + 0.5 * (math.exp(2.5) - 1) / (math.exp(5) - 1)
    assert transition(0.5, 0.0, 1.0, "exp", lam=0.5, gamma=5.0) == pytest.approx(expected, rel=1e-14)
    assert expected == pytest.approx(0.28793, abs=1e-5)


def test_transition_rejects_t_outside():
    with pytest.raises(ValidationError):
        transition(1.5, 0, 1)
    with pytest.raises(ValidationError):
        transition(-0.1, 0, 1)


def test_exp_is_strictly_increasing():
    t = np.linspace(0, 1, 1001)
    c = transition(t, 0.0, 1.0, "exp", lam=0.0, gamma=5.0)
    assert np.all(np.diff(c) > 0)


def test_exp_with_full_linear_mix_equals_linear():
    t = np.linspace(0, 1, 257)
    a = transition(t, -2.0, 9.0, "exp", lam=1.0, gamma=7.0)
    b = transition(t, -2.0, 9.0, "linear")
    assert np.max(np.abs(a - b)) <= 1e-12


@pytest.mark.parametrize(
    "kwargs",
    [dict(n=1), dict(n=2.5), dict(n=4, strategy="fourier"), dict(n=4, alpha=0), dict(n=4, alpha=1.1),
     dict(n=4, lam=-0.1), dict(n=4, gamma=0)],
)
def test_spec_validation(kwargs):
    with pytest.raises(ValidationError):
        OversampleSpec(**kwargs)


random_series = st.lists(st.floats(0, 100), min_size=2, max_size=15)


@pytest.mark.parametrize("strategy", STRATEGIES)
@settings(max_examples=25, deadline=None)
@given(ys=random_series, n=st.integers(2, 40))
def test_length_grid_and_bounds(strategy, ys, n):
    ts = validate(np.arange(len(ys), dtype=float) * 1.5, ys)
    out = oversample(ts, OversampleSpec(n, strategy))
    assert len(out) == (len(ts) - 1) * n + 1
    assert np.all(np.diff(out.x) > 0)
    assert np.allclose(out.x, refine_grid(ts.x, n))
    assert np.all(out.x[::n] == ts.x)
    if strategy != "cubic_spline":
        assert out.y.min() >= ts.y.min() and out.y.max() <= ts.y.max()


@pytest.mark.parametrize("strategy", ["piecewise_constant", "cubic_spline"])
def test_passes_through_knots(strategy):
    ts = validate([0, 1, 2, 3, 4], [3, 8, 1, 4, 4])
    out = oversample(ts, OversampleSpec(9, strategy))
    assert np.array_equal(out.y[::9], ts.y)


def test_cubic_strategy_is_the_natural_spline():
    ts = validate([0, 1, 2, 3], [1, 4, 2, 3])
    out = oversample(ts, OversampleSpec(7, "cubic_spline"))
    assert np.array_equal(out.y, make_interpolant(ts, "natural-cubic")(out.x))


@pytest.mark.parametrize("strategy", WINDOWED)
def test_windowed_knots_keep_value_when_level_unchanged(strategy):
    ts = validate([0, 1, 2, 3], [2, 2, 7, 7])
    out = oversample(ts, OversampleSpec(8, strategy))
    assert out.y[8] == 2 and out.y[24] == 7


def _windows(ts, strategy, alpha):
    return allocate_windows(ts, alpha) if strategy.endswith("adaptive") else fixed_windows(ts, alpha)


@pytest.mark.parametrize("strategy", WINDOWED)
def test_window_monotonicity_random(strategy):
    rng = np.random.default_rng(2024)
    for _ in range(100):
        m = int(rng.integers(3, 12))
        n = int(rng.integers(2, 80))
        alpha = float(rng.uniform(0.05, 1.0))
        ts = validate(np.cumsum(rng.uniform(0.5, 2.0, m)), rng.uniform(0, 50, m))
        out = oversample(ts, OversampleSpec(n, strategy, alpha=alpha, lam=float(rng.uniform()), gamma=float(rng.uniform(0.5, 8))))
        w = _windows(ts, strategy, alpha)
        for k in range(1, m):
            lo = ts.x[k] - w.left[k] * (ts.x[k] - ts.x[k - 1])
            hi = ts.x[k] + (w.right[k] * (ts.x[k + 1] - ts.x[k]) if k < m - 1 else 0.0)
            seg = out.y[(out.x >= lo) & (out.x <= hi)]
            step = np.diff(seg) * np.sign(ts.y[k] - ts.y[k - 1])
            assert np.all(step >= -1e-12)
            a, b = sorted((ts.y[k - 1], ts.y[k]))
            assert np.all((seg >= a - 1e-12) & (seg <= b + 1e-12))


def test_fixed_window_width():
    ts = validate([0, 1, 2], [0, 4, 4])
    out = oversample(ts, OversampleSpec(40, "linear_fixed", alpha=0.5))
    x, y = out
    ramp = (y > 0) & (y < 4)
    assert x[ramp].min() > 1 - 0.125 - 1e-12 and x[ramp].max() < 1 + 0.125 + 1e-12


def test_window_split_survives_subnormal_changes():
    w = allocate_windows(validate([0, 1, 2], [2.225073858507e-311, 0.0, 0.0]), 0.125)
    assert w.left[1] == 0.0 and w.right[1] == 0.0625
