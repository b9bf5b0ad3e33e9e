import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad, trapezoid
from scipy.interpolate import CubicSpline

from tsweave.core import TimeSeries, average, make_interpolant, trapezoid_integral, validate
from tsweave.errors import PartialGroupWarning, ValidationError


def test_validate_ok():
    ts = validate([0, 1, 2], [1, 2, 3])
    assert len(ts) == 3
    x, y = ts
    assert x.tolist() == [0, 1, 2] and y.tolist() == [1, 2, 3]


@pytest.mark.parametrize(
    "x, y, fragment, index",
    [
        ([0, 0, 1], [1, 2, 3], "non-increasing", 1),
        ([0, 2, 1], [1, 2, 3], "non-increasing", 2),
        ([0, 1, 2], [1, np.nan, 3], "non-finite", 1),
        ([0, 1, np.inf], [1, 2, 3], "non-finite", 2),
    ],
)
def test_validate_reports_index(x, y, fragment, index):
    with pytest.raises(ValidationError, match=fragment) as exc:
        validate(x, y)
    assert exc.value.index == index


def test_validate_too_few_and_mismatch():
    with pytest.raises(ValidationError, match="too few"):
        validate([0], [1])
    with pytest.raises(ValidationError, match="length mismatch"):
        validate([0, 1], [1, 2, 3])


def test_series_is_read_only():
    ts = validate([0, 1], [2, 3])
    with pytest.raises(ValueError):
        ts.y[0] = 5


@pytest.mark.parametrize(
    "x, y, a, b, expected",
    [
        ([0, 1, 2], [1, 1, 1], 0, 2, 2.0),
        ([0, 2], [0, 2], 0, 2, 2.0),
        ([0, 1, 2], [1, 3, 1], 0.5, 1.5, 2.5),
    ],
)
def test_trapezoid_examples(x, y, a, b, expected):
    assert trapezoid_integral(validate(x, y), a, b) == pytest.approx(expected, rel=1e-14)


def test_trapezoid_bounds():
    ts = validate([0, 1, 2], [1, 1, 1])
    with pytest.raises(ValidationError):
        trapezoid_integral(ts, -0.1, 1)
    with pytest.raises(ValidationError):
        trapezoid_integral(ts, 1, 1)


series = st.integers(3, 30).flatmap(
    lambda m: st.tuples(
        st.lists(st.floats(0.01, 5), min_size=m - 1, max_size=m - 1),
        st.lists(st.floats(-100, 100), min_size=m, max_size=m),
    )
)


def _build(data):
    steps, ys = data
    return validate(np.concatenate(([0.0], np.cumsum(steps))), ys)


@given(series, st.floats(0, 1), st.floats(0, 1), st.floats(0, 1))
def test_trapezoid_matches_quadrature_and_is_additive(data, u, v, w):
    ts = _build(data)
    x0, x1 = ts.domain
    a, b, c = sorted(x0 + (x1 - x0) * np.array([u, v, w]))
    if not a < b < c:
        return
    whole = trapezoid_integral(ts, a, c)
    parts = trapezoid_integral(ts, a, b) + trapezoid_integral(ts, b, c)
    scale = trapezoid_integral(ts.with_y(np.abs(ts.y)), a, c) + 1e-300
    assert abs(whole - parts) <= 1e-12 * scale
    kinks = [k for k in ts.x if a < k < c]
    oracle = quad(lambda t: np.interp(t, ts.x, ts.y), a, c, points=kinks or None, limit=200, epsabs=1e-12)[0]
    assert whole == pytest.approx(oracle, rel=1e-8, abs=1e-9)


@pytest.mark.parametrize(
    "x, y, n, ex, ey",
    [
        ([0, 1, 2, 3, 4], [2, 2, 2, 2, 2], 2, [0, 2], [2, 2]),
        ([0, 1, 2, 3, 4], [0, 2, 4, 6, 8], 2, [0, 2], [2, 6]),
        ([0, 1, 2], [1, 3, 5], 2, [0], [3]),
    ],
)
def test_average_examples(x, y, n, ex, ey):
    out = average(validate(x, y), n)
    assert out.x.tolist() == ex
    assert out.y == pytest.approx(ey, rel=1e-14)


def test_average_against_group_trapezoid():
    rng = np.random.default_rng(7)
    x = 3.0 + 0.25 * np.arange(61)
    y = rng.normal(size=61)
    out = average(validate(x, y), 12)
    expected = [trapezoid(y[k * 12 : k * 12 + 13], x[k * 12 : k * 12 + 13]) / 3.0 for k in range(5)]
    assert out.y == pytest.approx(expected, rel=1e-12)
    assert out.x.tolist() == x[:60:12].tolist()


def test_average_drops_partial_group_with_warning():
    ts = validate(np.arange(8.0), np.ones(8))
    with pytest.warns(PartialGroupWarning):
        out = average(ts, 3)
    assert len(out) == 2


def test_average_n1_is_per_interval_mean():
    ts = validate([0, 1, 2, 3], [1, 3, 2, 6])
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        out = average(ts, 1)
    assert out.y.tolist() == [2.0, 2.5, 4.0]


@pytest.mark.parametrize("n", [1, 3, 7])
def test_average_constant(n):
    ts = validate(np.linspace(0, 2, 22), np.full(22, 4.5))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", PartialGroupWarning)
        assert np.allclose(average(ts, n).y, 4.5, rtol=1e-14)


def test_average_errors():
    with pytest.raises(ValidationError, match="non-uniform"):
        average(validate([0, 1, 3], [1, 1, 1]), 1)
    with pytest.raises(ValidationError):
        average(validate([0, 1, 2], [1, 1, 1]), 0)


def test_interpolant_examples():
    assert make_interpolant(validate([0, 1], [5, 7]), "piecewise-linear")(0.5) == 6.0
    assert make_interpolant(validate([0, 1, 2], [1, 1, 1]), "natural-cubic")(0.3) == pytest.approx(1.0, abs=1e-15)
    assert make_interpolant(validate([0, 1, 2], [0, 1, 0]), "piecewise-constant-left")(1.5) == 1.0


def test_interpolant_errors():
    f = make_interpolant(validate([0, 1], [5, 7]))
    with pytest.raises(ValidationError):
        f(1.01)
    with pytest.raises(ValidationError):
        f([-0.5, 0.5])
    with pytest.raises(ValidationError, match="unknown interpolant"):
        make_interpolant(validate([0, 1], [5, 7]), "quintic")


@pytest.mark.parametrize("kind", ["piecewise-constant-left", "piecewise-linear", "natural-cubic"])
@settings(max_examples=30)
@given(data=series)
def test_interpolant_exact_at_knots(kind, data):
    ts = _build(data)
    f = make_interpolant(ts, kind)
    assert np.array_equal(f(ts.x), ts.y)
    assert all(f(float(xi)) == yi for xi, yi in zip(ts.x, ts.y))


def test_natural_cubic_matches_scipy():
    rng = np.random.default_rng(3)
    x = np.cumsum(rng.uniform(0.1, 2.0, 15))
    y = rng.normal(size=15)
    t = np.linspace(x[0], x[-1], 500)
    ours = make_interpolant(validate(x, y), "natural-cubic")(t)
    assert np.allclose(ours, CubicSpline(x, y, bc_type="natural")(t), rtol=1e-10, atol=1e-12)


def test_natural_cubic_reproduces_affine():
    rng = np.random.default_rng(11)
    x = np.cumsum(rng.uniform(0.1, 1.0, 12))
    y = -3.5 * x + 2.0
    t = rng.uniform(x[0], x[-1], 100)
    out = make_interpolant(validate(x, y), "natural-cubic")(t)
    assert np.allclose(out, -3.5 * t + 2.0, rtol=1e-10, atol=0)


def test_timeseries_unpacks_and_compares():
    ts = validate([0, 1], [2, 3])
    x, y = ts
    assert ts == TimeSeries(x, y)
    assert ts != validate([0, 1], [2, 4])
