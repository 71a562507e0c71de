import math

import pytest

from umbilic_atlas.quadrature import adaptive_simpson


def test_exact_on_cubics():
    assert adaptive_simpson(lambda x: x ** 3 - 2 * x, 0.0, 2.0) == \
        pytest.approx(4.0 - 4.0, abs=1e-14)


def test_cosine():
    assert adaptive_simpson(math.cos, 0.0, math.pi / 2) == \
        pytest.approx(1.0, abs=1e-12)


def test_empty_interval():
    assert adaptive_simpson(math.exp, 1.3, 1.3) == 0.0


def test_reversed_bounds():
    forward = adaptive_simpson(math.exp, 0.0, 1.0)
    backward = adaptive_simpson(math.exp, 1.0, 0.0)
    assert backward == pytest.approx(-forward, abs=1e-12)


def test_elliptic_profile_integrand():
    # reference from mpmath.quad at 50 digits
    value = adaptive_simpson(
        lambda r: math.sqrt(1.0 - 0.49 * math.cos(r) ** 2),
        0.0, math.pi / 2.0)
    assert value == pytest.approx(1.3556611355719554, abs=1e-12)


def test_rapidly_varying_but_smooth():
    value = adaptive_simpson(lambda x: math.sin(40.0 * x), 0.0, 1.0)
    exact = (1.0 - math.cos(40.0)) / 40.0
    assert value == pytest.approx(exact, abs=1e-11)
