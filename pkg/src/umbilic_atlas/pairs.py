"""Fundamental-pair calculus: curvature invariants, shape operator,
lines-of-curvature form, Christoffel symbols, Codazzi residuals and the
Codazzi tensor/function.

A ``PairField`` is a pointwise rule producing the two quadratic forms
(A, B) as coefficient jets; sources are immersed (I, II), the product
Abresch-Rosenberg-type pair (I, B), the product K-surface pair (A, II),
or abstract coefficient rules over a flat rectangle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .ambient import FormJet, ImmersionData
from .errors import DegenerateMetricError, NumericalError
from .jets import Jet3

Q_FLOOR = 1e-6


class PairField:
    """Pointwise evaluator returning coefficient jets of (A, B)."""

    def __init__(self, kind, evaluator, domain, patch=None, label=None,
                 extra=None):
        self.kind = kind
        self._evaluator = evaluator
        self.domain = tuple(float(x) for x in domain)
        self.patch = patch
        self.label = label or kind
        self.extra = dict(extra or {})

    @property
    def rotational(self):
        return bool(self.patch is not None and self.patch.rotational)

    def forms_jets(self, u, v):
        a_jets, b_jets = self._evaluator(u, v)
        E = a_jets[0].f
        det = E * a_jets[2].f - a_jets[1].f ** 2
        if E <= 0.0 or det <= 1e-12:
            raise DegenerateMetricError(
                f"pair '{self.label}': A not positive definite at "
                f"({u}, {v}): E={E}, det={det}")
        return a_jets, b_jets

    def forms(self, u, v):
        a_jets, b_jets = self.forms_jets(u, v)
        return FormJet.from_jets(*a_jets), FormJet.from_jets(*b_jets)

    def in_domain(self, u, v):
        if self.patch is not None:
            return self.patch.in_domain(u, v)
        u0, u1, v0, v1 = self.domain
        return u0 <= u <= u1 and v0 <= v <= v1


def immersed_pair(patch):
    """(I, II) of an immersed patch, any ambient."""

    def evaluator(u, v):
        data = ImmersionData(patch, u, v)
        return data.first_form_jets(), data.second_form_jets()

    return PairField("immersed", evaluator, patch.domain, patch=patch,
                     label=f"I-II[{patch.name}]")


def abstract_pair(domain, a_rule, b_rule, label="abstract"):
    """Pair from coefficient rules (u_jet, v_jet) -> three jets each."""

    def evaluator(u, v):
        uj = Jet3.variable(u, "u")
        vj = Jet3.variable(v, "v")
        a = tuple(Jet3.lift(x) for x in a_rule(uj, vj))
        b = tuple(Jet3.lift(x) for x in b_rule(uj, vj))
        return a, b

    return PairField("abstract", evaluator, domain, label=label)


def synthetic_hopf_pair(k, H0=2.0):
    """Flat conformal metric with B chosen so the Hopf-type coefficient
    is exactly z^k / 2 (lambda = 1/2); the standard index test field."""

    def a_rule(uj, vj):
        one = Jet3.constant(1.0)
        zero = Jet3.constant(0.0)
        return one, zero, one

    def b_rule(uj, vj):
        re, im = Jet3.constant(1.0), Jet3.constant(0.0)
        for _ in range(k):
            re, im = re * uj - im * vj, re * vj + im * uj
        return H0 + re, -im, H0 - re

    return abstract_pair((-1.5, 1.5, -1.5, 1.5), a_rule, b_rule,
                         label=f"hopf-z^{k}")


@dataclass(frozen=True)
class ShapeData:
    S: tuple                  # ((S11, S12), (S21, S22))
    H: float
    K_e: float
    q: float
    k1: float
    k2: float


@dataclass(frozen=True)
class ChristoffelSymbols:
    g111: float
    g112: float
    g122: float
    g211: float
    g212: float
    g222: float

    def gamma(self, k, i, j):
        key = {(1, 1, 1): "g111", (1, 1, 2): "g112", (1, 2, 1): "g112",
               (1, 2, 2): "g122", (2, 1, 1): "g211", (2, 1, 2): "g212",
               (2, 2, 1): "g212", (2, 2, 2): "g222"}[(k, i, j)]
        return getattr(self, key)


@dataclass(frozen=True)
class CodazziReport:
    residual: tuple           # (r1, r2) of the classical equations
    tensor: tuple             # chart components of T_S(du, dv)
    codazzi_function: float   # T_S
    codazzi_function_traceless: float


def _invariants_from_forms(A: FormJet, B: FormJet):
    det = A.det
    H = (A.E * B.G - 2.0 * A.F * B.F + A.G * B.E) / (2.0 * det)
    K_e = (B.E * B.G - B.F * B.F) / det
    return H, K_e, H * H - K_e


def pair_curvatures(pair: PairField, u, v) -> ShapeData:
    A, B = pair.forms(u, v)
    det = A.det
    H, K_e, q = _invariants_from_forms(A, B)
    scale = H * H + abs(K_e) + 1.0
    if q < -1e-12 * scale:
        raise NumericalError(
            f"skew curvature q={q} negative beyond tolerance at ({u}, {v})")
    s = math.sqrt(max(q, 0.0))
    S = (((A.G * B.E - A.F * B.F) / det,
          (A.G * B.F - A.F * B.G) / det),
         ((A.E * B.F - A.F * B.E) / det,
          (A.E * B.G - A.F * B.F) / det))
    return ShapeData(S, H, K_e, q, H + s, H - s)


def normalized_q(pair: PairField, u, v):
    """Skew curvature divided by H^2 + |K_e| + 1 (scale invariant)."""
    A, B = pair.forms(u, v)
    H, K_e, q = _invariants_from_forms(A, B)
    return q / (H * H + abs(K_e) + 1.0)


def lines_form(pair: PairField, u, v):
    """Coefficients (a, b, c) of sqrt(EG-F^2) W."""
    A, B = pair.forms(u, v)
    return (A.E * B.F - A.F * B.E,
            A.E * B.G - A.G * B.E,
            A.F * B.G - A.G * B.F)


def lines_form_coeffs(A: FormJet, B: FormJet):
    return (A.E * B.F - A.F * B.E,
            A.E * B.G - A.G * B.E,
            A.F * B.G - A.G * B.F)


def christoffel(A: FormJet) -> ChristoffelSymbols:
    det = A.det
    if A.E <= 0.0 or det <= 1e-12:
        raise DegenerateMetricError("metric not positive definite")
    inv = ((A.G / det, -A.F / det), (-A.F / det, A.E / det))
    # dg[k][i][j] = d_k g_ij
    g_u = ((A.E_u, A.F_u), (A.F_u, A.G_u))
    g_v = ((A.E_v, A.F_v), (A.F_v, A.G_v))
    dg = (g_u, g_v)
    gam = {}
    for k in range(2):
        for i in range(2):
            for j in range(i, 2):
                s = 0.0
                for l in range(2):
                    s += inv[k][l] * (dg[i][j][l] + dg[j][i][l]
                                      - dg[l][i][j])
                gam[(k + 1, i + 1, j + 1)] = 0.5 * s
    return ChristoffelSymbols(
        g111=gam[(1, 1, 1)], g112=gam[(1, 1, 2)], g122=gam[(1, 2, 2)],
        g211=gam[(2, 1, 1)], g212=gam[(2, 1, 2)], g222=gam[(2, 2, 2)])


def codazzi_residual(pair: PairField, u, v):
    """Residuals of the classical Codazzi equations for (A, B)."""
    A, B = pair.forms(u, v)
    gam = christoffel(A)
    r1 = B.E_v - B.F_u - (B.E * gam.g112
                          + B.F * (gam.g212 - gam.g111)
                          - B.G * gam.g211)
    r2 = B.F_v - B.G_u - (B.E * gam.g122
                          + B.F * (gam.g222 - gam.g112)
                          - B.G * gam.g212)
    return r1, r2


def _shape_operator_jets(a_jets, b_jets):
    Ej, Fj, Gj = a_jets
    ej, fj, gj = b_jets
    det = Ej * Gj - Fj * Fj
    S11 = (Gj * ej - Fj * fj) / det
    S12 = (Gj * fj - Fj * gj) / det
    S21 = (Ej * fj - Fj * ej) / det
    S22 = (Ej * gj - Fj * fj) / det
    return ((S11, S12), (S21, S22)), det


def mean_curvature_jet(pair: PairField, u, v):
    a_jets, b_jets = pair.forms_jets(u, v)
    Ej, Fj, Gj = a_jets
    ej, fj, gj = b_jets
    det = Ej * Gj - Fj * Fj
    H = (Ej * gj - 2.0 * Fj * fj + Gj * ej) / (det * 2.0)
    return H, a_jets, b_jets


def _tensor_components(S, gam):
    """T_S(du, dv) = nabla_u(S dv) - nabla_v(S du) in chart components;
    S given as entry jets."""
    out = []
    for k in (0, 1):
        term_u = S[k][1].du() \
            + S[0][1] * gam.gamma(k + 1, 1, 1) \
            + S[1][1] * gam.gamma(k + 1, 1, 2)
        term_v = S[k][0].dv() \
            + S[0][0] * gam.gamma(k + 1, 1, 2) \
            + S[1][0] * gam.gamma(k + 1, 2, 2)
        out.append(term_u.f - term_v.f)
    return tuple(out)


def codazzi_tensor_and_function(pair: PairField, u, v) -> CodazziReport:
    a_jets, b_jets = pair.forms_jets(u, v)
    A = FormJet.from_jets(*a_jets)
    gam = christoffel(A)
    S, det_jet = _shape_operator_jets(a_jets, b_jets)
    T = _tensor_components(S, gam)
    det = A.det
    t_s = (A.E * T[0] ** 2 + 2.0 * A.F * T[0] * T[1]
           + A.G * T[1] ** 2) / det

    Ej, Fj, Gj = a_jets
    ej, fj, gj = b_jets
    H = (Ej * gj - 2.0 * Fj * fj + Gj * ej) / (det_jet * 2.0)
    S_tilde = ((S[0][0] - H, S[0][1]), (S[1][0], S[1][1] - H))
    Tt = _tensor_components(S_tilde, gam)
    t_s_tilde = (A.E * Tt[0] ** 2 + 2.0 * A.F * Tt[0] * Tt[1]
                 + A.G * Tt[1] ** 2) / det

    r1, r2 = codazzi_residual(pair, u, v)
    return CodazziReport((r1, r2), T, t_s, t_s_tilde)


def dH_norm_squared(pair: PairField, u, v):
    """||dH||^2 in the metric A, with H differentiated exactly."""
    H, a_jets, _ = mean_curvature_jet(pair, u, v)
    A = FormJet.from_jets(*a_jets)
    det = A.det
    return (A.G * H.fu ** 2 - 2.0 * A.F * H.fu * H.fv
            + A.E * H.fv ** 2) / det
