"""Built-in surfaces with documented expected properties.

Names and parameter schemas are exposed through the CLI ``gallery``
command; ``expected_properties`` feeds the ``verify`` command.  The
product-space constant-curvature entry integrates its profile by
shooting (RK4) on the curvature ODE and is validated downstream by the
intrinsic-curvature oracle, not by a formula taken on faith.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .ambient import POLE_MARGIN, SurfacePatch, product_space, space_form
from .errors import ValidationError
from .exprs import parse
from .jets import Jet3, compose_univariate, jcos, jcosh, jsin, jsinh


@dataclass(frozen=True)
class GalleryEntry:
    name: str
    schema: dict                  # param -> {"default": x, "min": m, "max": M}
    factory: object = field(repr=False)
    expected: tuple = ()
    notes: str = ""


def _check_params(entry, params):
    out = {}
    for key, spec in entry.schema.items():
        if key in params:
            value = params[key]
        elif "default" in spec:
            value = spec["default"]
        else:
            raise ValidationError(f"{entry.name}: missing parameter '{key}'")
        if spec.get("kind") == "expr":
            out[key] = str(value)
            continue
        value = float(value)
        if spec.get("choices") is not None:
            if int(value) not in spec["choices"]:
                raise ValidationError(
                    f"{entry.name}: {key} must be one of {spec['choices']}")
            out[key] = int(value)
            continue
        lo, hi = spec.get("min"), spec.get("max")
        if lo is not None and value < lo or hi is not None and value > hi:
            raise ValidationError(
                f"{entry.name}: {key}={value} outside [{lo}, {hi}]")
        out[key] = value
    extra = set(params) - set(entry.schema)
    if extra:
        raise ValidationError(
            f"{entry.name}: unknown parameter(s) {sorted(extra)}")
    return out


# -- R^3 entries --------------------------------------------------------

def _plane(p):
    return SurfacePatch.from_expressions(
        space_form(0), [parse("u"), parse("v"), parse("0")],
        (-2.0, 2.0, -2.0, 2.0), name="plane")


def _round_sphere(p):
    r = p["r"]
    # latitude-first chart: (psi_u, psi_v, N) orientation makes N inward
    # so the mean curvature of the unit sphere is +1
    exprs = ["r*cos(u)*cos(v)", "r*cos(u)*sin(v)", "r*sin(u)"]
    m = 0.35
    return SurfacePatch.from_expressions(
        space_form(0), [parse(e) for e in exprs],
        (-math.pi / 2 + m, math.pi / 2 - m, -math.pi, math.pi),
        params={"r": r}, name="round_sphere")


def _ellipsoid(p):
    exprs = ["a*cos(u)*cos(v)", "b*sin(u)*cos(v)", "c*sin(v)"]
    return SurfacePatch.from_expressions(
        space_form(0), [parse(e) for e in exprs],
        (-math.pi / 2, 3 * math.pi / 2, -1.25, 1.25),
        params={"a": p["a"], "b": p["b"], "c": p["c"]}, name="ellipsoid")


def _torus(p):
    exprs = ["(R+r*cos(v))*cos(u)", "(R+r*cos(v))*sin(u)", "r*sin(v)"]
    return SurfacePatch.from_expressions(
        space_form(0), [parse(e) for e in exprs],
        (-math.pi, math.pi, -math.pi, math.pi),
        params={"R": p["R"], "r": p["r"]}, name="torus", rotational=True)


def _graph(p):
    height = parse(p["expr"])
    return SurfacePatch.from_expressions(
        space_form(0), [parse("u"), parse("v"), height],
        (p["u0"], p["u1"], p["v0"], p["v1"]),
        name="graph")


def _cgc_rotational(p):
    K, b = p["K"], p["b"]
    if b * b * K > 1.0 + 1e-12:
        raise ValidationError(
            f"cgc_rotational: b*sqrt(K) = {b * math.sqrt(K):.4f} > 1 makes "
            "the profile radicand negative")
    exprs = [
        "sin(u)*b*sin(w*v)",
        "cos(u)*b*sin(w*v)",
        "integral(sqrt(1-b^2*K*cos(w*r)^2), r, 0, v)",
    ]
    t_max = math.pi / math.sqrt(K)
    return SurfacePatch.from_expressions(
        space_form(0), [parse(e) for e in exprs],
        (-math.pi, math.pi, POLE_MARGIN, t_max - POLE_MARGIN),
        params={"K": K, "b": b, "w": math.sqrt(K)},
        name="cgc_rotational", rotational=True)


# -- space-form entries in S^3 / H^3 -------------------------------------

def _s3_sphere(p):
    r = p["r"]
    exprs = ["sin(r)*cos(u)*cos(v)", "sin(r)*cos(u)*sin(v)",
             "sin(r)*sin(u)", "cos(r)"]
    m = 0.35
    return SurfacePatch.from_expressions(
        space_form(1), [parse(e) for e in exprs],
        (-math.pi / 2 + m, math.pi / 2 - m, -math.pi, math.pi),
        params={"r": r}, name="s3_sphere")


def _h3_equidistant(p):
    d = p["d"]
    exprs = ["cosh(d)*sinh(v)*cos(u)", "cosh(d)*sinh(v)*sin(u)",
             "sinh(d)", "cosh(d)*cosh(v)"]
    return SurfacePatch.from_expressions(
        space_form(-1), [parse(e) for e in exprs],
        (-math.pi, math.pi, 0.2, 2.0),
        params={"d": d}, name="h3_equidistant")


# -- product-space entries ------------------------------------------------

def _base_chart_exprs(eps):
    if eps == 1:
        return ["cos(v)*cos(u)", "cos(v)*sin(u)", "sin(v)"]
    return ["sinh(v)*cos(u)", "sinh(v)*sin(u)", "cosh(v)"]


def _base_domain(eps):
    if eps == 1:
        m = 0.35
        return (-math.pi, math.pi, -math.pi / 2 + m, math.pi / 2 - m)
    return (-math.pi, math.pi, 0.2, 2.0)


def _slice(p):
    eps = p["eps"]
    exprs = _base_chart_exprs(eps) + [repr(float(p["t0"]))]
    return SurfacePatch.from_expressions(
        product_space(eps), [parse(e) for e in exprs],
        _base_domain(eps), params={}, name="slice")


def _vertical_cylinder(p):
    eps, r = p["eps"], p["r"]
    if eps == 1:
        exprs = ["sin(r)*cos(u)", "sin(r)*sin(u)", "cos(r)", "v"]
    else:
        exprs = ["sinh(r)*cos(u)", "sinh(r)*sin(u)", "cosh(r)", "v"]
    return SurfacePatch.from_expressions(
        product_space(eps), [parse(e) for e in exprs],
        (-math.pi, math.pi, -1.0, 1.0), params={"r": r},
        name="vertical_cylinder")


def _tilted_graph(p):
    eps = p["eps"]
    exprs = _base_chart_exprs(eps) + [p["expr"]]
    return SurfacePatch.from_expressions(
        product_space(eps), [parse(e) for e in exprs],
        _base_domain(eps), name="tilted_graph")


# -- shooting profile for the product K-surface ---------------------------

def _sn_cs(eps):
    if eps == 1:
        return math.sin, math.cos, math.asin
    return math.sinh, math.cosh, math.asinh


def _profile_rhs(eps, K, state):
    rho, drho = state[0], state[1]
    sn, cs, _ = _sn_cs(eps)
    acc = sn(rho) * (eps * drho * drho - K) / cs(rho)
    rad = 1.0 - drho * drho
    dz = math.sqrt(rad) if rad > 0.0 else 0.0
    return (drho, acc, dz)


def _rk4_step(eps, K, state, h):
    k1 = _profile_rhs(eps, K, state)
    s2 = tuple(state[i] + 0.5 * h * k1[i] for i in range(3))
    k2 = _profile_rhs(eps, K, s2)
    s3 = tuple(state[i] + 0.5 * h * k2[i] for i in range(3))
    k3 = _profile_rhs(eps, K, s3)
    s4 = tuple(state[i] + h * k3[i] for i in range(3))
    k4 = _profile_rhs(eps, K, s4)
    return tuple(state[i] + h / 6.0 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i])
                 for i in range(3))


class _ShotProfile:
    """Dense RK4 table for (rho, rho', z)(t) plus jet evaluation.

    The second-order curvature ODE comes from requiring the intrinsic
    Gaussian curvature of sn(rho)^2 ds^2 + dt^2 to equal K; third
    derivatives for jets are taken from the ODE itself, never from the
    table.
    """

    def __init__(self, eps, K, b, t0, t1, n=20000):
        sn, cs, arcsn = _sn_cs(eps)
        self.eps, self.K = eps, K
        t_mid = math.pi / (2.0 * math.sqrt(K))
        state = (arcsn(b), 0.0, 0.0)
        # march backward from the equator to t0 to get starting data
        m = max(200, int(math.ceil((t_mid - t0) / ((t1 - t0) / n))))
        hb = (t0 - t_mid) / m
        for _ in range(m):
            state = _rk4_step(eps, K, state, hb)
        self.t_start = t0
        self.h = (t1 - t0) / n
        table = [state]
        for _ in range(n):
            state = _rk4_step(eps, K, state, self.h)
            table.append(state)
        self.table = table

    def state(self, t):
        idx = int((t - self.t_start) / self.h)
        idx = max(0, min(idx, len(self.table) - 1))
        base = self.table[idx]
        delta = t - (self.t_start + idx * self.h)
        if delta != 0.0:
            base = _rk4_step(self.eps, self.K, base, delta)
        return base

    def jets(self, t_jet):
        """(rho, z) as jets composed through an arbitrary t jet."""
        sn, cs, _ = _sn_cs(self.eps)
        eps, K = self.eps, self.K
        t0 = t_jet.c[0] if isinstance(t_jet, Jet3) else t_jet
        rho, d1, z = self.state(t0)
        A = eps * d1 * d1 - K
        d2 = sn(rho) * A / cs(rho)
        d3 = A * d1 / cs(rho) ** 2 + 2.0 * eps * d1 * sn(rho) / cs(rho) * d2
        q = math.sqrt(max(1.0 - d1 * d1, 1e-300))
        z1 = q
        z2 = -d1 * d2 / q
        z3 = -(d2 * d2 + d1 * d3) / q - (d1 * d2) ** 2 / q ** 3
        if not isinstance(t_jet, Jet3):
            t_jet = Jet3.constant(t_jet)
        rho_jet = compose_univariate([rho, d1, d2 / 2.0, d3 / 6.0], t_jet)
        z_jet = compose_univariate([z, z1, z2 / 2.0, z3 / 6.0], t_jet)
        return rho_jet, z_jet


def _k_rotational_product(p):
    eps, K, b = p["eps"], p["K"], p["b"]
    if K <= max(0.0, float(eps)):
        raise ValidationError(
            f"k_rotational_product needs K > max(0, eps); got K={K}, "
            f"eps={eps}")
    if b * math.sqrt(K) > 1.0 + 1e-12:
        raise ValidationError(
            f"k_rotational_product: b={b} exceeds 1/sqrt(K); the profile "
            "would leave the arc-length constraint")
    t_max = math.pi / math.sqrt(K)
    t0, t1 = POLE_MARGIN, t_max - POLE_MARGIN
    profile = _ShotProfile(eps, K, b, t0, t1)

    if eps == 1:
        fsin, fcos = jsin, jcos
    else:
        fsin, fcos = jsinh, jcosh

    def immersion(uj, vj):
        rho, z = profile.jets(vj)
        return [fsin(rho) * jcos(uj), fsin(rho) * jsin(uj), fcos(rho), z]

    patch = SurfacePatch(product_space(eps), immersion, (
        -math.pi, math.pi, t0, t1),
        name="k_rotational_product",
        params={"eps": eps, "K": K, "b": b}, rotational=True)
    return patch


# -- registry -------------------------------------------------------------

def _entry(name, schema, factory, expected, notes=""):
    return GalleryEntry(name, schema, factory, tuple(expected), notes)


ENTRIES = {e.name: e for e in [
    _entry("plane", {}, _plane,
           [("totally_umbilical", 1e-9), ("codazzi_I_II", 1e-7)]),
    _entry("round_sphere", {"r": {"default": 1.0, "min": 0.05, "max": 50.0}},
           _round_sphere,
           [("totally_umbilical", 1e-9), ("codazzi_I_II", 1e-7),
            ("cmc", 1e-9)]),
    _entry("ellipsoid",
           {"a": {"default": 1.5, "min": 0.05, "max": 50.0},
            "b": {"default": 1.0, "min": 0.05, "max": 50.0},
            "c": {"default": 0.5, "min": 0.05, "max": 50.0}},
           _ellipsoid, [("codazzi_I_II", 1e-7)]),
    _entry("torus",
           {"R": {"default": 2.0, "min": 0.1, "max": 50.0},
            "r": {"default": 0.8, "min": 0.05, "max": 50.0}},
           _torus,
           [("no_umbilics", 1e-6), ("codazzi_I_II", 1e-7),
            ("coordinate_curvature_lines", 1e-8)]),
    _entry("graph",
           {"expr": {"kind": "expr", "default": "0.3*sin(u)*cos(v)"},
            "u0": {"default": -1.0}, "u1": {"default": 1.0},
            "v0": {"default": -1.0}, "v1": {"default": 1.0}},
           _graph, [("codazzi_I_II", 1e-7)]),
    _entry("cgc_rotational",
           {"K": {"default": 1.0, "min": 1e-4, "max": 100.0},
            "b": {"default": 0.7, "min": 1e-3, "max": 1.0}},
           _cgc_rotational,
           [("gauss_curvature_const", 1e-6), ("codazzi_I_II", 1e-7),
            ("coordinate_curvature_lines", 1e-8)],
           notes="profile height by quadrature; b=1 (with K=1) degenerates "
                 "to the round sphere"),
    _entry("s3_sphere", {"r": {"default": 0.8, "min": 0.05,
                               "max": math.pi / 2}},
           _s3_sphere,
           [("totally_umbilical", 1e-9), ("codazzi_I_II", 1e-7),
            ("model_residual", 1e-9)]),
    _entry("h3_equidistant", {"d": {"default": 0.6, "min": 0.0, "max": 5.0}},
           _h3_equidistant,
           [("totally_umbilical", 1e-9), ("codazzi_I_II", 1e-7),
            ("model_residual", 1e-9)]),
    _entry("slice",
           {"eps": {"default": 1, "choices": (-1, 1)},
            "t0": {"default": 0.5, "min": -50.0, "max": 50.0}},
           _slice,
           [("ar_totally_umbilical", 1e-10), ("eq_h_identity", 1e-10),
            ("ar_mean_identity", 1e-9)]),
    _entry("vertical_cylinder",
           {"eps": {"default": -1, "choices": (-1, 1)},
            "r": {"default": 0.8, "min": 0.05, "max": 5.0}},
           _vertical_cylinder,
           [("cmc", 1e-10), ("ar_codazzi", 1e-7), ("eq_h_identity", 1e-10),
            ("ar_mean_identity", 1e-9)]),
    _entry("tilted_graph",
           {"eps": {"default": 1, "choices": (-1, 1)},
            "expr": {"kind": "expr", "default": "v+0.2*sin(u)"}},
           _tilted_graph,
           [("eq_h_identity", 1e-10), ("ar_mean_identity", 1e-9)]),
    _entry("k_rotational_product",
           {"eps": {"default": -1, "choices": (-1, 1)},
            "K": {"default": 1.0, "min": 1e-3, "max": 100.0},
            "b": {"default": 0.7, "min": 1e-3, "max": 1.0}},
           _k_rotational_product,
           [("gauss_curvature_const", 1e-5), ("kpair_extrinsic_const", 1e-5),
            ("kpair_codazzi", 1e-5), ("eq_h_identity", 1e-10),
            ("ar_mean_identity", 1e-9)],
           notes="profile shot from the curvature ODE; marked derived — "
                 "validated by the intrinsic-curvature oracle"),
]}


def make(name, params=None):
    """Instantiate a gallery surface; raises on unknown name or
    out-of-range parameters."""
    if name not in ENTRIES:
        raise ValidationError(f"unknown gallery entry '{name}'")
    entry = ENTRIES[name]
    return entry.factory(_check_params(entry, params or {}))


def expected_properties(name):
    if name not in ENTRIES:
        raise ValidationError(f"unknown gallery entry '{name}'")
    return [{"property": prop, "tolerance": tol}
            for prop, tol in ENTRIES[name].expected]


def schema(name):
    if name not in ENTRIES:
        raise ValidationError(f"unknown gallery entry '{name}'")
    return dict(ENTRIES[name].schema)
