import math

import numpy as np
import pytest

from mtjsng.errors import NoBracket, QuadratureFailure
from mtjsng.quadrature import adaptive_simpson, bisect_increasing, simpson_richardson


@pytest.mark.parametrize(
    "f, a, b, exact",
    [
        (math.sin, 0.0, math.pi, 2.0),
        (math.exp, -1.0, 2.0, math.e**2 - math.exp(-1.0)),
        (lambda x: 1.0 / (1.0 + x * x), 0.0, 10.0, math.atan(10.0)),
        (lambda x: x**3 - 2 * x, -1.0, 3.0, 20.0 - 8.0),
    ],
)
def test_simpson_matches_closed_form(f, a, b, exact):
    res = adaptive_simpson(f, a, b, 1e-13)
    assert res.value == pytest.approx(exact, rel=1e-11, abs=1e-12)


def test_panels_are_ordered_and_sum_to_total():
    res = adaptive_simpson(lambda x: math.exp(-50 * (x - 0.3) ** 2), 0.0, 1.0, 1e-12)
    assert res.edges[0] == 0.0 and res.edges[-1] == 1.0
    assert np.all(np.diff(res.edges) > 0)
    assert len(res.panel_values) == len(res.edges) - 1
    assert math.fsum(res.panel_values) == pytest.approx(res.value, rel=1e-14)


def test_empty_interval():
    assert adaptive_simpson(math.sin, 1.0, 1.0, 1e-9).value == 0.0


def test_bad_arguments():
    with pytest.raises(ValueError):
        adaptive_simpson(math.sin, 0.0, 1.0, 0.0)
    with pytest.raises(ValueError):
        adaptive_simpson(math.sin, 1.0, 0.0, 1e-9)


def test_quadrature_failure_on_singularity():
    with pytest.raises(QuadratureFailure):
        adaptive_simpson(lambda x: 1.0 / x if x else 1e300, 0.0, 1.0, 1e-15, max_depth=20)


def test_bisect_stops_on_function_value():
    x = bisect_increasing(lambda x: x**3, 0.3, 0.0, 1.0, 1e-10)
    assert abs(x**3 - 0.3) <= 1e-10


def test_bisect_no_bracket():
    with pytest.raises(NoBracket):
        bisect_increasing(math.tanh, 2.0, 0.0, 10.0, 1e-9)


def test_simpson_richardson_vectorised():
    lo = np.array([0.0, 1.0])
    hi = np.array([0.5, 2.0])
    got = simpson_richardson(lambda x: x**4, lo, hi)
    assert got == pytest.approx((hi**5 - lo**5) / 5, rel=1e-12)
