import math

import numpy as np
import pytest

from umbilic_atlas import gallery
from umbilic_atlas.ambient import (POLE_MARGIN, SurfacePatch, eval_immersion,
                                   first_form, gauss_curvature,
                                   model_residual, product_geometry,
                                   second_form, space_form, unit_normal,
                                   validate_patch)
from umbilic_atlas.errors import ValidationError
from umbilic_atlas.exprs import parse

from helpers import fd_derivatives


def _fd_forms(patch, u, v, h=2e-3):
    """Finite-difference oracle for the fundamental forms (independent
    of the jet pipeline: positions only); one Richardson step."""
    def pos(uu, vv):
        return patch.position(uu, vv)

    def rich(stencil):
        return (4.0 * stencil(h / 2.0) - stencil(h)) / 3.0

    pu = rich(lambda s: (pos(u + s, v) - pos(u - s, v)) / (2 * s))
    pv = rich(lambda s: (pos(u, v + s) - pos(u, v - s)) / (2 * s))
    puu = rich(lambda s: (pos(u + s, v) - 2 * pos(u, v)
                          + pos(u - s, v)) / s**2)
    pvv = rich(lambda s: (pos(u, v + s) - 2 * pos(u, v)
                          + pos(u, v - s)) / s**2)
    puv = rich(lambda s: (pos(u + s, v + s) - pos(u + s, v - s)
                          - pos(u - s, v + s) + pos(u - s, v - s))
               / (4 * s**2))
    w = np.array(patch.ambient.weights)

    def dot(x, y):
        return float(np.sum(w * x * y))

    return pu, pv, puu, puv, pvv, dot


def test_sphere_chart_example():
    sphere = SurfacePatch.from_expressions(
        space_form(0),
        [parse("cos(u)*cos(v)"), parse("sin(u)*cos(v)"), parse("sin(v)")],
        (-1.0, 1.0, -1.0, 1.0))
    jets = eval_immersion(sphere, 0.0, 0.0)
    assert [j.f for j in jets] == pytest.approx([1.0, 0.0, 0.0])
    assert [j.fu for j in jets] == pytest.approx([0.0, 1.0, 0.0])


def test_plane_forms():
    plane = gallery.make("plane")
    I = first_form(plane, 0.3, -0.4)
    assert (I.E, I.F, I.G) == pytest.approx((1.0, 0.0, 1.0))
    assert (I.E_u, I.E_v, I.G_u, I.G_v) == pytest.approx((0, 0, 0, 0))
    II = second_form(plane, 0.3, -0.4)
    assert (II.E, II.F, II.G) == pytest.approx((0.0, 0.0, 0.0), abs=1e-15)
    n, n_u, n_v = unit_normal(plane, 0.3, -0.4)
    assert n == pytest.approx([0.0, 0.0, 1.0])


def test_unit_sphere_inward_normal_and_umbilicity():
    sphere = gallery.make("round_sphere", {"r": 1.0})
    u, v = 0.4, -0.8
    pos = sphere.position(u, v)
    n, _, _ = unit_normal(sphere, u, v)
    assert n == pytest.approx(-pos, abs=1e-12)
    I = first_form(sphere, u, v)
    II = second_form(sphere, u, v)
    assert II.E == pytest.approx(I.E, abs=1e-12)
    assert II.F == pytest.approx(I.F, abs=1e-12)
    assert II.G == pytest.approx(I.G, abs=1e-12)


def test_cgc_profile_first_form():
    # I = k(t)^2 ds^2 + dt^2 with k' ^2 + h'^2 = 1 by construction
    patch = gallery.make("cgc_rotational", {"K": 1.0, "b": 0.7})
    for (u, v) in [(0.3, 0.7), (-1.1, 1.9), (2.0, 2.6)]:
        I = first_form(patch, u, v)
        k = 0.7 * math.sin(v)
        assert I.E == pytest.approx(k * k, abs=1e-10)
        assert I.F == pytest.approx(0.0, abs=1e-12)
        assert I.G == pytest.approx(1.0, abs=1e-10)


def test_cgc_position_with_quadrature_height():
    patch = gallery.make("cgc_rotational", {"K": 1.0, "b": 0.7})
    pos = patch.position(0.0, math.pi / 2.0)
    # h(pi/2) frozen from mpmath.quad at 50 digits
    assert pos == pytest.approx([0.0, 0.7, 1.3556611355719554], abs=1e-11)


def test_second_form_matches_fd_oracle_on_ellipsoid():
    patch = gallery.make("ellipsoid", {"a": 1.5, "b": 1.0, "c": 0.5})
    u, v = 0.7, 0.4
    pu, pv, puu, puv, pvv, dot = _fd_forms(patch, u, v)
    n, _, _ = unit_normal(patch, u, v)
    II = second_form(patch, u, v)
    assert II.E == pytest.approx(dot(puu, n), abs=1e-7)
    assert II.F == pytest.approx(dot(puv, n), abs=1e-7)
    assert II.G == pytest.approx(dot(pvv, n), abs=1e-7)


def test_form_partials_match_fd():
    patch = gallery.make("ellipsoid", {"a": 1.5, "b": 1.0, "c": 0.5})
    u0, v0 = 0.5, -0.3

    def form_value(name, idx):
        def f(u, v):
            form = first_form(patch, u, v) if name == "I" \
                else second_form(patch, u, v)
            return (form.E, form.F, form.G)[idx]
        return f

    for name in ("I", "II"):
        for idx in range(3):
            f = form_value(name, idx)
            fd = fd_derivatives(f, u0, v0)
            form = first_form(patch, u0, v0) if name == "I" \
                else second_form(patch, u0, v0)
            got = [(form.E_u, form.E_v), (form.F_u, form.F_v),
                   (form.G_u, form.G_v)][idx]
            assert abs(got[0] - fd[(1, 0)]) <= 1e-6 * abs(fd[(1, 0)]) + 1e-7
            assert abs(got[1] - fd[(0, 1)]) <= 1e-6 * abs(fd[(0, 1)]) + 1e-7


def test_space_form_normals():
    for name, params in [("s3_sphere", {"r": 0.8}),
                         ("h3_equidistant", {"d": 0.6})]:
        patch = gallery.make(name, params)
        w = np.array(patch.ambient.weights)
        for (u, v) in [(0.3, 0.9), (-1.0, 1.4)]:
            pos = patch.position(u, v)
            n, _, _ = unit_normal(patch, u, v)
            assert abs(float(np.sum(w * n * pos))) < 1e-10
            assert float(np.sum(w * n * n)) == pytest.approx(1.0, abs=1e-10)
            assert model_residual(patch, u, v) < 1e-12


def test_mixed_partial_symmetry():
    patch = gallery.make("torus")
    data_f = second_form(patch, 0.4, 1.1).F
    # f recomputed from psi_vu instead of psi_uv
    jets = patch.jets(0.4, 1.1)
    pvu = [j.dv().du() for j in jets]
    from umbilic_atlas.ambient import ImmersionData
    data = ImmersionData(patch, 0.4, 1.1)
    w = patch.ambient.weights
    f_alt = sum(w[i] * pvu[i].f * data.normal[i].f for i in range(3))
    assert data_f == pytest.approx(f_alt, abs=1e-14)


def test_product_geometry_slice_and_cylinder():
    slice_patch = gallery.make("slice", {"eps": 1, "t0": 0.5})
    geo = product_geometry(slice_patch, 0.3, 0.2)
    assert abs(geo.nu) == pytest.approx(1.0, abs=1e-12)
    assert geo.grad_norm_sq == pytest.approx(0.0, abs=1e-12)
    assert geo.h == pytest.approx(0.5)

    cyl = gallery.make("vertical_cylinder", {"eps": -1, "r": 0.8})
    geo = product_geometry(cyl, 0.9, -0.2)
    assert geo.nu == pytest.approx(0.0, abs=1e-12)
    assert geo.grad_norm_sq == pytest.approx(1.0, abs=1e-12)

    cyl_e = first_form(cyl, 0.9, -0.2)
    assert cyl_e.E == pytest.approx(math.sinh(0.8) ** 2, abs=1e-12)
    assert cyl_e.F == pytest.approx(0.0, abs=1e-13)
    assert cyl_e.G == pytest.approx(1.0, abs=1e-13)


def test_vertical_decomposition_identity_tilted():
    patch = gallery.make("tilted_graph", {"eps": -1, "expr": "v+0.3*sin(u)"})
    for (u, v) in [(0.2, 0.8), (1.0, 1.5), (-2.0, 0.4)]:
        geo = product_geometry(patch, u, v)
        assert geo.defect < 1e-10


def test_model_residual_detects_broken_chart():
    bad = SurfacePatch.from_expressions(
        space_form(1),
        [parse(e) for e in ["1.01*sin(r)*cos(u)*cos(v)",
                            "1.01*sin(r)*cos(u)*sin(v)",
                            "1.01*sin(r)*sin(u)", "1.01*cos(r)"]],
        (-0.5, 0.5, -0.5, 0.5), params={"r": 0.8})
    res = model_residual(bad, 0.1, 0.2)
    assert res == pytest.approx(abs(1.01 ** 2 - 1.0), abs=1e-12)
    with pytest.raises(ValidationError):
        validate_patch(bad, grid=4)


def test_gauss_curvature_brioschi():
    sphere = gallery.make("round_sphere", {"r": 2.0})
    assert gauss_curvature(sphere, 0.3, 0.5) == pytest.approx(0.25, abs=1e-10)
    torus = gallery.make("torus", {"R": 2.0, "r": 0.8})
    u, v = 0.7, 1.2
    expected = math.cos(v) / (0.8 * (2.0 + 0.8 * math.cos(v)))
    assert gauss_curvature(torus, u, v) == pytest.approx(expected, abs=1e-9)
    cgc = gallery.make("cgc_rotational", {"K": 1.0, "b": 0.7})
    assert gauss_curvature(cgc, 0.4, 1.3) == pytest.approx(1.0, abs=1e-9)


def test_gallery_validation():
    for name in ("plane", "round_sphere", "torus", "s3_sphere",
                 "h3_equidistant", "slice", "vertical_cylinder"):
        validate_patch(gallery.make(name), grid=8)


def test_gallery_param_errors():
    with pytest.raises(ValidationError):
        gallery.make("cgc_rotational", {"K": 4.0, "b": 0.9})
    with pytest.raises(ValidationError):
        gallery.make("nonexistent")
    with pytest.raises(ValidationError):
        gallery.make("torus", {"R": 2.0, "bogus": 1.0})
