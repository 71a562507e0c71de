import math

import pytest

from umbilic_atlas import gallery
from umbilic_atlas.curves import Rect
from umbilic_atlas.errors import UmbilicPointError, WindingError
from umbilic_atlas.lines import principal_directions, trace_line
from umbilic_atlas.pairs import immersed_pair, synthetic_hopf_pair
from umbilic_atlas.umbilics import (find_umbilics, interior_index,
                                    track_winding, zero_order)


def test_principal_directions_diagonal():
    pair = synthetic_hopf_pair(0, H0=3.0)
    # B = diag(4, 2): coordinate axes are principal, k1 dir first
    from umbilic_atlas.jets import Jet3
    from umbilic_atlas.pairs import abstract_pair

    def a_rule(uj, vj):
        return Jet3.constant(1.0), Jet3.constant(0.0), Jet3.constant(1.0)

    def b_rule(uj, vj):
        return Jet3.constant(2.0), Jet3.constant(0.0), Jet3.constant(4.0)

    diag = abstract_pair((-1, 1, -1, 1), a_rule, b_rule)
    d1, d2 = principal_directions(diag, 0.1, 0.2)
    assert d1 == pytest.approx([0.0, 1.0])      # k1 = 4 along v
    assert d2 == pytest.approx([1.0, 0.0])


def test_principal_directions_orthogonal_in_A():
    pair = immersed_pair(gallery.make("ellipsoid"))
    for (u, v) in [(0.5, 0.3), (1.5, -0.6), (2.8, 0.9)]:
        d1, d2 = principal_directions(pair, u, v)
        A, _ = pair.forms(u, v)
        inner = (A.E * d1[0] * d2[0] + A.F * (d1[0] * d2[1] + d1[1] * d2[0])
                 + A.G * d1[1] * d2[1])
        assert abs(inner) < 1e-9


def test_principal_directions_error_at_umbilic():
    pair = immersed_pair(gallery.make("round_sphere"))
    with pytest.raises(UmbilicPointError):
        principal_directions(pair, 0.3, 0.4)


def test_track_winding_simple():
    total = track_winding(lambda p: math.fmod(3.0 * p, 2 * math.pi),
                          0.0, 2 * math.pi)
    assert total == pytest.approx(6 * math.pi, abs=1e-9)


def test_interior_index_synthetic():
    for k, expected in [(1, -0.5), (2, -1.0), (3, -1.5), (4, -2.0)]:
        pair = synthetic_hopf_pair(k)
        res = interior_index(pair, (0.0, 0.0), 0.4)
        assert res.index == expected
        assert res.snap_residual < 0.02


def test_interior_index_requires_umbilic_center():
    pair = synthetic_hopf_pair(1)
    with pytest.raises(UmbilicPointError):
        interior_index(pair, (0.5, 0.5), 0.1)


def test_zero_order_synthetic():
    for k in (1, 2, 3):
        pair = synthetic_hopf_pair(k)
        res = zero_order(pair, (0.0, 0.0), 0.4)
        assert res.k == k
        assert res.method == "hopf-winding"
        assert res.agreement is True
        assert res.claim1_consistent
        assert res.index == -k / 2.0


def test_zero_order_loop_crossing_detection():
    pair = synthetic_hopf_pair(2)
    with pytest.raises((UmbilicPointError, WindingError)):
        # radius reaching exactly through the central zero
        zero_order(pair, (0.4, 0.0), 0.4)


def test_find_umbilics_sphere_totally_umbilical():
    pair = immersed_pair(gallery.make("round_sphere"))
    scan = find_umbilics(pair, Rect(*pair.domain), grid_n=12, q_tol=1e-9)
    assert scan.totally_umbilical
    assert scan.fraction_below == 1.0


def test_find_umbilics_torus_empty():
    pair = immersed_pair(gallery.make("torus"))
    scan = find_umbilics(pair, Rect(*pair.domain), grid_n=16)
    assert not scan.totally_umbilical
    assert scan.records == ()


def test_find_umbilics_ellipsoid():
    a, b, c = 1.5, 1.0, 0.5
    pair = immersed_pair(gallery.make("ellipsoid", {"a": a, "b": b, "c": c}))
    scan = find_umbilics(pair, Rect(*pair.domain), grid_n=40)
    assert len(scan.records) == 4
    # classical umbilic locations: (+-x*, 0, +-z*)
    x_star = a * math.sqrt((a * a - b * b) / (a * a - c * c))
    z_star = c * math.sqrt((b * b - c * c) / (a * a - c * c))
    patch = pair.patch
    for rec in scan.records:
        x, y, z = patch.position(*rec.location)
        assert abs(abs(x) - x_star) < 1e-4
        assert abs(y) < 1e-4
        assert abs(abs(z) - z_star) < 1e-4
        assert rec.index == 0.5
        assert not rec.claim1_consistent
        assert rec.q_min < 1e-10


def test_trace_line_rotational_structure():
    # on this torus k1 is the parallel direction everywhere, so family 1
    # keeps v constant and family 2 keeps u constant
    pair = immersed_pair(gallery.make("torus"))
    parallel = trace_line(pair, (0.0, 0.9), family=1, step=0.02, max_len=1.0)
    assert parallel.shape[0] > 30
    assert max(abs(parallel[:, 1] - 0.9)) < 1e-8
    meridian = trace_line(pair, (0.0, 0.9), family=2, step=0.02, max_len=1.0)
    assert max(abs(meridian[:, 0] - 0.0)) < 1e-8


def test_trace_line_errors_on_sphere():
    pair = immersed_pair(gallery.make("round_sphere"))
    with pytest.raises(UmbilicPointError):
        trace_line(pair, (0.2, 0.3), family=1)


def test_trace_line_w_residual_invariant():
    pair = immersed_pair(gallery.make("ellipsoid"))
    from umbilic_atlas.pairs import lines_form
    line = trace_line(pair, (0.8, 0.2), family=1, step=0.01, max_len=0.8)
    assert line.shape[0] > 10
    for i in range(1, line.shape[0] - 1):
        du = line[i + 1][0] - line[i - 1][0]
        dv = line[i + 1][1] - line[i - 1][1]
        a, b, c = lines_form(pair, *line[i])
        A, _ = pair.forms(*line[i])
        norm = (A.E * du * du + 2 * A.F * du * dv + A.G * dv * dv)
        scale = max(abs(a), abs(b), abs(c))
        w_val = abs(a * du * du + b * du * dv + c * dv * dv)
        assert w_val / (norm * scale) < 1e-3


def test_trace_line_star_pattern_z1():
    # Q = z: 3 separatrices per family at equal angles; radial rays at
    # angles 0, 2pi/3, 4pi/3 stay radial for one family
    pair = synthetic_hopf_pair(1)
    for base_angle in (0.0, 2 * math.pi / 3, 4 * math.pi / 3):
        start = (0.3 * math.cos(base_angle), 0.3 * math.sin(base_angle))
        best = None
        for family in (1, 2):
            line = trace_line(pair, start, family=family, step=0.01,
                              max_len=0.6)
            # residual distance from the ray through the origin
            d = [abs(math.sin(math.atan2(p[1], p[0]) - base_angle))
                 * math.hypot(*p) for p in line]
            worst = max(d)
            best = worst if best is None else min(best, worst)
        assert best < 1e-6, base_angle
