"""Ambient spaces as flat-model submanifolds and immersed patches.

Space forms: R^3; the unit sphere S^3 in R^4; hyperbolic H^3 as the
upper hyperboloid in Minkowski R^4.  Products M^2(eps) x R use the
S^2 or hyperboloid-H^2 model in the first three slots and height in the
last.  Because every model sits in a flat space with a constant
diagonal bilinear form, second fundamental forms reduce to flat second
derivatives against a model-tangent unit normal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateMetricError, NumericalError, ValidationError
from .exprs import eval_jet
from .jets import Jet3, jsqrt

POLE_MARGIN = 1e-3
GRAM_FLOOR = 1e-12
MODEL_RESIDUAL_TOL = 1e-9


@dataclass(frozen=True)
class AmbientSpace:
    """Flat-model description of the ambient 3-manifold."""

    kind: str                 # "space_form" | "product"
    epsilon: int
    dim: int                  # flat-model dimension (3 or 4)
    weights: tuple            # diagonal of the ambient bilinear form
    label: str

    @property
    def is_product(self):
        return self.kind == "product"

    def inner(self, x, y):
        s = x[0] * y[0] * self.weights[0]
        for i in range(1, self.dim):
            s = s + x[i] * y[i] * self.weights[i]
        return s

    def constraint(self, p):
        """Defining-function value of the model; 0 on the model."""
        if self.kind == "space_form":
            if self.epsilon == 0:
                return 0.0 * p[0] if isinstance(p[0], Jet3) else 0.0
            return self.inner(p, p) - self.epsilon
        s = p[0] * p[0] * self.weights[0]
        for i in (1, 2):
            s = s + p[i] * p[i] * self.weights[i]
        return s - self.epsilon

    def model_normal(self, p):
        """Vector spanning the model's normal line in the flat space
        (with respect to the ambient bilinear form); None for R^3."""
        if self.kind == "space_form":
            if self.epsilon == 0:
                return None
            return list(p)
        zero = (p[0] * 0.0) if isinstance(p[0], Jet3) else 0.0
        return [p[0], p[1], p[2], zero]


def space_form(epsilon):
    if epsilon == 0:
        return AmbientSpace("space_form", 0, 3, (1.0, 1.0, 1.0), "R3")
    if epsilon == 1:
        return AmbientSpace("space_form", 1, 4, (1.0, 1.0, 1.0, 1.0), "S3")
    if epsilon == -1:
        return AmbientSpace("space_form", -1, 4, (1.0, 1.0, 1.0, -1.0), "H3")
    raise ValidationError(f"space form curvature must be -1, 0 or 1: {epsilon}")


def product_space(epsilon):
    if epsilon == 1:
        return AmbientSpace("product", 1, 4, (1.0, 1.0, 1.0, 1.0), "S2xR")
    if epsilon == -1:
        return AmbientSpace("product", -1, 4, (1.0, 1.0, -1.0, 1.0), "H2xR")
    raise ValidationError(f"product base curvature must be -1 or 1: {epsilon}")


AMBIENTS = {
    "r3": space_form(0), "s3": space_form(1), "h3": space_form(-1),
    "s2xr": product_space(1), "h2xr": product_space(-1),
}


class SurfacePatch:
    """Chart rectangle plus an immersion into a flat ambient model.

    The immersion is a closure mapping two Jet3 chart seeds to one jet
    per flat-model coordinate; patches built from expression strings
    wrap ``eval_jet``.  Patches are immutable after construction.
    """

    def __init__(self, ambient, immersion, domain, name="patch",
                 params=None, mask=None, rotational=False):
        self.ambient = ambient
        self._immersion = immersion
        self.domain = tuple(float(x) for x in domain)
        self.name = name
        self.params = dict(params or {})
        self.mask = mask
        self.rotational = rotational

    @classmethod
    def from_expressions(cls, ambient, coord_asts, domain, params=None,
                         name="patch", mask=None, rotational=False):
        if len(coord_asts) != ambient.dim:
            raise ValidationError(
                f"{ambient.label} needs {ambient.dim} immersion "
                f"coordinates, got {len(coord_asts)}")
        params = dict(params or {})

        def immersion(uj, vj):
            env = {"u": uj, "v": vj}
            env.update(params)
            return [Jet3.lift(eval_jet(ast, env)) for ast in coord_asts]

        return cls(ambient, immersion, domain, name=name, params=params,
                   mask=mask, rotational=rotational)

    def in_domain(self, u, v):
        u0, u1, v0, v1 = self.domain
        if not (u0 <= u <= u1 and v0 <= v <= v1):
            return False
        return self.mask is None or bool(self.mask(u, v))

    def jets(self, u, v, order=3):
        uj = Jet3.variable(u, "u", order)
        vj = Jet3.variable(v, "v", order)
        return [Jet3.lift(c) for c in self._immersion(uj, vj)]

    def jets_from(self, ujet, vjet):
        """Evaluate the immersion on caller-supplied jets (chart
        composition)."""
        return [Jet3.lift(c) for c in self._immersion(ujet, vjet)]

    def position(self, u, v):
        return np.array([j.f for j in self.jets(u, v, order=0)])


@dataclass(frozen=True)
class FormJet:
    """Quadratic-form coefficients with first chart partials."""

    E: float
    F: float
    G: float
    E_u: float
    E_v: float
    F_u: float
    F_v: float
    G_u: float
    G_v: float

    @classmethod
    def from_jets(cls, Ej, Fj, Gj):
        return cls(Ej.f, Fj.f, Gj.f, Ej.fu, Ej.fv, Fj.fu, Fj.fv,
                   Gj.fu, Gj.fv)

    @property
    def det(self):
        return self.E * self.G - self.F * self.F


@dataclass(frozen=True)
class ProductGeometry:
    """Height/angle data of a product-space immersion at a point."""

    h: float
    dh: tuple                 # (h_u, h_v)
    grad_h: tuple             # chart components of the metric gradient
    grad_norm_sq: float
    nu: float
    defect: float             # | ||grad h||^2 + nu^2 - 1 |


def _cross3(a, b):
    return [a[1] * b[2] - a[2] * b[1],
            a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0]]


def _det3(m):
    return (m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]))


def _cross4(a, b, c):
    """Vector orthogonal (Euclidean) to the three rows; components from
    cofactor expansion of det[[e], [a], [b], [c]] along the first row."""
    out = []
    for i in range(4):
        cols = [j for j in range(4) if j != i]
        minor = [[row[j] for j in cols] for row in (a, b, c)]
        out.append(_det3(minor) * (1.0 if i % 2 == 0 else -1.0))
    return out


class ImmersionData:
    """Jet-level geometry of a patch at one chart point.

    The metric block is computed eagerly; the normal and second form
    only on first access (metric-only callers stay cheap)."""

    __slots__ = ("patch", "u", "v", "psi", "psi_u", "psi_v",
                 "E", "F", "G", "_normal", "_second")

    def __init__(self, patch, u, v):
        space = patch.ambient
        self.patch = patch
        self.u = u
        self.v = v
        psi = patch.jets(u, v)
        self.psi = psi
        pu = [j.du() for j in psi]
        pv = [j.dv() for j in psi]
        self.psi_u = pu
        self.psi_v = pv
        self.E = space.inner(pu, pu)
        self.F = space.inner(pu, pv)
        self.G = space.inner(pv, pv)
        gram = self.E.f * self.G.f - self.F.f * self.F.f
        if gram <= GRAM_FLOOR:
            raise DegenerateMetricError(
                f"degenerate first form at ({u}, {v}): EG-F^2 = {gram}")
        self._normal = None
        self._second = None

    @property
    def normal(self):
        if self._normal is None:
            space = self.patch.ambient
            psi, pu, pv = self.psi, self.psi_u, self.psi_v
            if space.dim == 3:
                raw = _cross3(pu, pv)
            else:
                w = space.weights
                base = space.model_normal(psi)
                raw = _cross4([w[i] * base[i] for i in range(4)],
                              [w[i] * pu[i] for i in range(4)],
                              [w[i] * pv[i] for i in range(4)])
            norm_sq = space.inner(raw, raw)
            if norm_sq.f <= GRAM_FLOOR:
                raise DegenerateMetricError(
                    f"degenerate normal at ({self.u}, {self.v})")
            inv = 1.0 / jsqrt(norm_sq)
            normal = [r * inv for r in raw]
            # orientation: (psi_u, psi_v, N) positive in the model
            # tangent space, measured with the flat-model determinant
            if space.dim == 3:
                orient = _det3([[x.f for x in pu], [x.f for x in pv],
                                [x.f for x in normal]])
            else:
                base_f = [x.f if isinstance(x, Jet3) else x
                          for x in space.model_normal(psi)]
                orient = float(np.linalg.det(np.array(
                    [base_f, [x.f for x in pu], [x.f for x in pv],
                     [x.f for x in normal]])))
            if orient < 0.0:
                normal = [-n for n in normal]
            self._normal = normal
        return self._normal

    @property
    def e(self):
        return self._second_forms()[0]

    @property
    def f(self):
        return self._second_forms()[1]

    @property
    def g(self):
        return self._second_forms()[2]

    def _second_forms(self):
        if self._second is None:
            space = self.patch.ambient
            normal = self.normal
            psi_uu = [j.du() for j in self.psi_u]
            psi_uv = [j.dv() for j in self.psi_u]
            psi_vv = [j.dv() for j in self.psi_v]
            self._second = (space.inner(psi_uu, normal),
                            space.inner(psi_uv, normal),
                            space.inner(psi_vv, normal))
        return self._second

    def first_form_jets(self):
        return self.E, self.F, self.G

    def second_form_jets(self):
        return self._second_forms()


def metric_values(patch, u, v):
    """Fast order-1 evaluation of (E, F, G) values only."""
    jets = patch.jets(u, v, order=1)
    w = patch.ambient.weights
    n = patch.ambient.dim
    pu = [jets[i].fu for i in range(n)]
    pv = [jets[i].fv for i in range(n)]
    E = sum(w[i] * pu[i] * pu[i] for i in range(n))
    F = sum(w[i] * pu[i] * pv[i] for i in range(n))
    G = sum(w[i] * pv[i] * pv[i] for i in range(n))
    return E, F, G


def immersion_data(patch, u, v):
    return ImmersionData(patch, u, v)


def eval_immersion(patch, u, v):
    """Order-3 jets of the immersion coordinates at a chart point."""
    if not patch.in_domain(u, v):
        raise ValidationError(f"point ({u}, {v}) outside patch domain")
    return patch.jets(u, v)


def first_form(patch, u, v) -> FormJet:
    data = ImmersionData(patch, u, v)
    return FormJet.from_jets(*data.first_form_jets())


def second_form(patch, u, v) -> FormJet:
    data = ImmersionData(patch, u, v)
    return FormJet.from_jets(*data.second_form_jets())


def unit_normal(patch, u, v):
    """Unit normal with first partials: (n, n_u, n_v) float arrays."""
    data = ImmersionData(patch, u, v)
    n = np.array([x.f for x in data.normal])
    n_u = np.array([x.fu for x in data.normal])
    n_v = np.array([x.fv for x in data.normal])
    return n, n_u, n_v


def model_residual(patch, u, v):
    value = patch.ambient.constraint(patch.jets(u, v, order=0))
    if isinstance(value, Jet3):
        value = value.f
    return abs(value)


def product_geometry(patch, u, v) -> ProductGeometry:
    space = patch.ambient
    if not space.is_product:
        raise ValidationError(
            f"product geometry asked of non-product ambient {space.label}")
    data = ImmersionData(patch, u, v)
    h = data.psi[3]
    hu, hv = h.fu, h.fv
    E, F, G = data.E.f, data.F.f, data.G.f
    det = E * G - F * F
    grad = ((G * hu - F * hv) / det, (E * hv - F * hu) / det)
    grad_norm_sq = grad[0] * hu + grad[1] * hv
    nu = data.normal[3].f
    defect = abs(grad_norm_sq + nu * nu - 1.0)
    if defect > 1e-10:
        raise NumericalError(
            f"vertical decomposition identity violated at ({u}, {v}): "
            f"defect {defect}")
    return ProductGeometry(h.f, (hu, hv), grad, grad_norm_sq, nu, defect)


def gauss_curvature(patch, u, v):
    """Intrinsic Gaussian curvature of the induced metric (Brioschi)."""
    data = ImmersionData(patch, u, v)
    E, F, G = data.E, data.F, data.G
    det = E.f * G.f - F.f * F.f
    m1 = [[-0.5 * E.fvv + F.fuv - 0.5 * G.fuu,
           0.5 * E.fu, F.fu - 0.5 * E.fv],
          [F.fv - 0.5 * G.fu, E.f, F.f],
          [0.5 * G.fv, F.f, G.f]]
    m2 = [[0.0, 0.5 * E.fv, 0.5 * G.fu],
          [0.5 * E.fv, E.f, F.f],
          [0.5 * G.fu, F.f, G.f]]
    return (_det3(m1) - _det3(m2)) / (det * det)


def validate_patch(patch, grid=32):
    """Probe-grid validation: model residual and rank-2 check."""
    u0, u1, v0, v1 = patch.domain
    for i in range(grid):
        for j in range(grid):
            u = u0 + (u1 - u0) * (i + 0.5) / grid
            v = v0 + (v1 - v0) * (j + 0.5) / grid
            if patch.mask is not None and not patch.mask(u, v):
                continue
            res = model_residual(patch, u, v)
            if res >= MODEL_RESIDUAL_TOL:
                raise ValidationError(
                    f"patch '{patch.name}' leaves the {patch.ambient.label} "
                    f"model at ({u:.4f}, {v:.4f}): residual {res:.3e}")
            jets = patch.jets(u, v, order=1)
            pu = [j.fu for j in jets]
            pv = [j.fv for j in jets]
            w = patch.ambient.weights
            E = sum(w[k] * pu[k] * pu[k] for k in range(len(pu)))
            F = sum(w[k] * pu[k] * pv[k] for k in range(len(pu)))
            G = sum(w[k] * pv[k] * pv[k] for k in range(len(pu)))
            if E * G - F * F <= GRAM_FLOOR:
                raise ValidationError(
                    f"patch '{patch.name}' degenerates at "
                    f"({u:.4f}, {v:.4f})")
    return True
