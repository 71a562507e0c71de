import math

import pytest

from umbilic_atlas import gallery
from umbilic_atlas.ambient import FormJet
from umbilic_atlas.errors import DegenerateMetricError
from umbilic_atlas.jets import Jet3
from umbilic_atlas.pairs import (PairField, abstract_pair, christoffel,
                                 codazzi_residual,
                                 codazzi_tensor_and_function,
                                 dH_norm_squared, immersed_pair, lines_form,
                                 normalized_q, pair_curvatures,
                                 synthetic_hopf_pair)

from helpers import fd_derivatives, fd_gradient


def _const_pair(a_diag, b_diag):
    def a_rule(uj, vj):
        return (Jet3.constant(a_diag[0]), Jet3.constant(0.0),
                Jet3.constant(a_diag[1]))

    def b_rule(uj, vj):
        return (Jet3.constant(b_diag[0]), Jet3.constant(0.0),
                Jet3.constant(b_diag[1]))

    return abstract_pair((-1, 1, -1, 1), a_rule, b_rule)


def test_diagonal_example():
    pair = _const_pair((1.0, 1.0), (2.0, 4.0))
    shape = pair_curvatures(pair, 0.0, 0.0)
    assert shape.H == pytest.approx(3.0)
    assert shape.K_e == pytest.approx(8.0)
    assert shape.q == pytest.approx(1.0)
    assert (shape.k1, shape.k2) == pytest.approx((4.0, 2.0))
    assert lines_form(pair, 0.0, 0.0) == pytest.approx((0.0, 2.0, 0.0))


def test_unit_sphere_totally_umbilical():
    pair = immersed_pair(gallery.make("round_sphere", {"r": 1.0}))
    shape = pair_curvatures(pair, 0.3, -0.6)
    assert shape.H == pytest.approx(1.0, abs=1e-12)
    assert shape.K_e == pytest.approx(1.0, abs=1e-12)
    assert shape.q == pytest.approx(0.0, abs=1e-12)
    assert lines_form(pair, 0.3, -0.6) == pytest.approx((0, 0, 0),
                                                        abs=1e-12)


def test_ellipsoid_against_closed_form():
    # closed-form oracle: K_e = h^4/(abc)^2 with h the support distance
    a, b, c = 1.5, 1.0, 0.5
    patch = gallery.make("ellipsoid", {"a": a, "b": b, "c": c})
    pair = immersed_pair(patch)
    u, v = 0.7, 0.4
    x, y, z = patch.position(u, v)
    h = 1.0 / math.sqrt((x / a**2) ** 2 + (y / b**2) ** 2 + (z / c**2) ** 2)
    K_closed = h ** 4 / (a * b * c) ** 2
    shape = pair_curvatures(pair, u, v)
    assert shape.K_e == pytest.approx(K_closed, rel=1e-10)
    # principal curvature magnitudes vs finite-difference eigen oracle
    # frozen from an independent run (outward normal => negative signs)
    assert shape.k1 * shape.k2 == pytest.approx(K_closed, rel=1e-10)
    assert shape.q >= 0.0


def test_rotational_lines_form_structure():
    pair = immersed_pair(gallery.make("torus"))
    for (u, v) in [(0.3, 1.0), (-2.0, 0.5)]:
        a, b, c = lines_form(pair, u, v)
        assert a == pytest.approx(0.0, abs=1e-12)
        assert c == pytest.approx(0.0, abs=1e-12)
        assert abs(b) > 1e-3


def test_christoffel_flat():
    flat = FormJet(1, 0, 1, 0, 0, 0, 0, 0, 0)
    gam = christoffel(flat)
    for name in ("g111", "g112", "g122", "g211", "g212", "g222"):
        assert getattr(gam, name) == 0.0


def test_christoffel_round_sphere_metric():
    # metric du^2 + sin(u)^2 dv^2
    u = 0.8
    form = FormJet(E=1.0, F=0.0, G=math.sin(u) ** 2,
                   E_u=0.0, E_v=0.0, F_u=0.0, F_v=0.0,
                   G_u=2.0 * math.sin(u) * math.cos(u), G_v=0.0)
    gam = christoffel(form)
    assert gam.g122 == pytest.approx(-math.sin(u) * math.cos(u), abs=1e-9)
    assert gam.g212 == pytest.approx(1.0 / math.tan(u), abs=1e-9)
    assert gam.g111 == pytest.approx(0.0, abs=1e-12)


def test_christoffel_conformal_metric():
    # A = 2*lambda*(du^2+dv^2) with lambda = e^u
    u = 0.4
    lam = math.exp(u)
    form = FormJet(E=2 * lam, F=0.0, G=2 * lam,
                   E_u=2 * lam, E_v=0.0, F_u=0.0, F_v=0.0,
                   G_u=2 * lam, G_v=0.0)
    gam = christoffel(form)
    assert gam.g111 == pytest.approx(0.5)
    assert gam.g122 == pytest.approx(-0.5)
    assert gam.g212 == pytest.approx(0.5)


def test_codazzi_residual_space_form_surfaces():
    for name, params in [("ellipsoid", {}), ("torus", {}),
                         ("s3_sphere", {}), ("h3_equidistant", {}),
                         ("cgc_rotational", {"K": 1.0, "b": 0.7})]:
        pair = immersed_pair(gallery.make(name, params))
        u0, u1, v0, v1 = pair.domain
        for i in range(4):
            for j in range(4):
                u = u0 + (u1 - u0) * (i + 0.5) / 4
                v = v0 + (v1 - v0) * (j + 0.5) / 4
                r1, r2 = codazzi_residual(pair, u, v)
                assert abs(r1) < 1e-7 and abs(r2) < 1e-7, (name, u, v)


def test_codazzi_residual_abstract_nonzero():
    # flat A, B = diag(v, 0): e_v = 1 and all Christoffels vanish
    def a_rule(uj, vj):
        return Jet3.constant(1.0), Jet3.constant(0.0), Jet3.constant(1.0)

    def b_rule(uj, vj):
        return vj, Jet3.constant(0.0), Jet3.constant(0.0)

    pair = abstract_pair((-1, 1, -1, 1), a_rule, b_rule)
    r1, r2 = codazzi_residual(pair, 0.2, 0.3)
    assert r1 == pytest.approx(1.0, abs=1e-14)
    assert r2 == pytest.approx(0.0, abs=1e-14)
    report = codazzi_tensor_and_function(pair, 0.2, 0.3)
    assert report.codazzi_function == pytest.approx(1.0, abs=1e-12)


def test_codazzi_function_vanishes_for_immersed_r3():
    pair = immersed_pair(gallery.make("ellipsoid"))
    report = codazzi_tensor_and_function(pair, 0.6, 0.3)
    assert report.codazzi_function < 1e-12


def test_codazzi_function_basis_independent():
    # T_S(X,Y)/||X^Y|| recomputed from the residual-vector identity:
    # A-covector of T is (-r1, -r2), so T_S = r^T A^{-1} r / det(A)
    def a_rule(uj, vj):
        E = 1.0 + 0.3 * uj * uj
        F = 0.1 * uj * vj
        G = 1.0 + 0.2 * vj * vj
        return E, F, G

    def b_rule(uj, vj):
        return (0.4 * vj + 0.2 * uj * uj, 0.3 * uj,
                0.1 * uj * vj + 0.5 * vj * vj)

    pair = abstract_pair((-1, 1, -1, 1), a_rule, b_rule)
    u, v = 0.35, -0.2
    report = codazzi_tensor_and_function(pair, u, v)
    r1, r2 = report.residual
    A, _ = pair.forms(u, v)
    det = A.det
    quad = (A.G * r1 * r1 - 2 * A.F * r1 * r2 + A.E * r2 * r2) / det
    assert report.codazzi_function == pytest.approx(quad / det, rel=1e-9)


def test_traceless_codazzi_equals_dH_for_codazzi_pair():
    pair = immersed_pair(gallery.make("ellipsoid"))
    for (u, v) in [(0.5, 0.4), (1.2, -0.5), (2.5, 0.9)]:
        report = codazzi_tensor_and_function(pair, u, v)
        dh2 = dH_norm_squared(pair, u, v)
        assert report.codazzi_function_traceless == pytest.approx(
            dh2, rel=1e-6)


def test_dH_matches_fd_gradient():
    patch = gallery.make("ellipsoid")
    pair = immersed_pair(patch)
    u, v = 0.8, 0.3

    def H_of(uu, vv):
        return pair_curvatures(pair, uu, vv).H

    hu, hv = fd_gradient(H_of, u, v, h=1e-5)
    A, _ = pair.forms(u, v)
    det = A.det
    expected = (A.G * hu**2 - 2 * A.F * hu * hv + A.E * hv**2) / det
    assert dH_norm_squared(pair, u, v) == pytest.approx(expected, rel=1e-5)


def test_dH_zero_on_cmc():
    assert dH_norm_squared(
        immersed_pair(gallery.make("round_sphere")), 0.3, 0.7) == \
        pytest.approx(0.0, abs=1e-12)


def test_synthetic_hopf_pair_invariants():
    pair = synthetic_hopf_pair(2, H0=2.0)
    u, v = 0.5, 0.3
    shape = pair_curvatures(pair, u, v)
    z = complex(u, v)
    assert shape.H == pytest.approx(2.0, abs=1e-12)
    assert shape.q == pytest.approx(abs(z) ** 4, rel=1e-12)


def test_degenerate_pair_raises():
    pair = _const_pair((1.0, -1.0), (1.0, 1.0))
    with pytest.raises(DegenerateMetricError):
        pair_curvatures(pair, 0.0, 0.0)


def test_normalized_q_scale_invariance():
    pair_small = immersed_pair(gallery.make("round_sphere", {"r": 0.1}))
    pair_big = immersed_pair(gallery.make("round_sphere", {"r": 10.0}))
    assert normalized_q(pair_small, 0.2, 0.4) == pytest.approx(0.0, abs=1e-9)
    assert normalized_q(pair_big, 0.2, 0.4) == pytest.approx(0.0, abs=1e-9)
