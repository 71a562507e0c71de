"""Isothermal charts and the Hopf-type quadratic coefficient.

Only two chart sources are supported: rotational surfaces, where the
profile variable is reparametrized by quadrature so the metric becomes
E(t(w)) (ds^2 + dw^2), and user-asserted charts where the metric is
already conformal.  The convention is A = 2*lambda*|dz|^2, z = s + i w,
so lambda = E/2, Q = (e - g - 2 i f)/4 and Q_zbar = (Q_u + i Q_v)/2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .ambient import ImmersionData, SurfacePatch, metric_values
from .errors import NumericalError, ValidationError
from .jets import Jet3, compose_univariate, jsqrt
from .pairs import (PairField, codazzi_tensor_and_function, dH_norm_squared,
                    immersed_pair)
from .quadrature import adaptive_simpson

CHART_CONF_TOL = 1e-8


class IsothermalChart:
    """Conformal chart for the metric A of a pair.

    ``pair`` evaluates in chart coordinates (s, w); ``to_chart`` /
    ``from_chart`` translate between base and chart coordinates.
    """

    def __init__(self, pair, kind, to_chart, from_chart, domain,
                 conf_tol=CHART_CONF_TOL):
        self.pair = pair
        self.kind = kind
        self.to_chart = to_chart
        self.from_chart = from_chart
        self.domain = tuple(float(x) for x in domain)
        self.conf_tol = conf_tol

    def conformal_factor(self, s, w):
        A, _ = self.pair.forms(s, w)
        return 0.25 * (A.E + A.G)

    def conformality_defect(self, s, w):
        A, _ = self.pair.forms(s, w)
        return max(abs(A.E - A.G), 2.0 * abs(A.F)) / A.E

    def require_conformal(self, s, w):
        defect = self.conformality_defect(s, w)
        if defect > self.conf_tol:
            raise NumericalError(
                f"chart not conformal at ({s}, {w}): defect {defect:.3e}")
        return defect


def identity_isothermal(pair: PairField, conf_tol=CHART_CONF_TOL):
    """Chart asserting the pair's own coordinates are conformal."""
    ident = lambda u, v: (u, v)
    return IsothermalChart(pair, "identity", ident, ident, pair.domain,
                           conf_tol)


class _RotationalReparam:
    """Monotone profile reparametrization t -> w with dw = sqrt(G/E) dt."""

    def __init__(self, patch, n_cells=400):
        u0, u1, v0, v1 = patch.domain
        self.patch = patch
        self.u_mid = 0.5 * (u0 + u1)
        self.v0, self.v1 = v0, v1
        self._sigma_cache = {}
        self.ts = [v0 + (v1 - v0) * k / n_cells for k in range(n_cells + 1)]
        self.ws = [0.0]
        for k in range(n_cells):
            piece = adaptive_simpson(self._sigma, self.ts[k], self.ts[k + 1],
                                     tol=1e-13)
            self.ws.append(self.ws[-1] + piece)

    def _sigma(self, t):
        cached = self._sigma_cache.get(t)
        if cached is not None:
            return cached
        E, _, G = metric_values(self.patch, self.u_mid, t)
        if E <= 0.0:
            raise NumericalError(f"metric coefficient E vanishes at t={t}")
        value = math.sqrt(G / E)
        self._sigma_cache[t] = value
        return value

    def w_of_t(self, t):
        idx = self._locate(self.ts, t)
        return self.ws[idx] + adaptive_simpson(self._sigma, self.ts[idx], t,
                                               tol=1e-13)

    def t_of_w(self, w):
        idx = self._locate(self.ws, w)
        t = self.ts[idx]
        if idx + 1 < len(self.ts) and self.ws[idx + 1] > self.ws[idx]:
            frac = (w - self.ws[idx]) / (self.ws[idx + 1] - self.ws[idx])
            t = self.ts[idx] + frac * (self.ts[idx + 1] - self.ts[idx])
        for _ in range(40):
            delta = (self.w_of_t(t) - w) / self._sigma(t)
            t -= delta
            t = min(max(t, self.v0), self.v1)
            if abs(delta) < 1e-14 * (1.0 + abs(t)):
                break
        else:
            raise NumericalError(f"profile reparametrization failed at w={w}")
        return t

    @staticmethod
    def _locate(table, x):
        lo, hi = 0, len(table) - 2
        if x <= table[0]:
            return 0
        if x >= table[-1]:
            return hi
        while lo < hi:
            mid = (lo + hi + 1) // 2
            if table[mid] <= x:
                lo = mid
            else:
                hi = mid - 1
        return lo


def rotational_isothermal(patch: SurfacePatch, n_cells=600,
                          conf_tol=CHART_CONF_TOL) -> IsothermalChart:
    """Conformal chart for a rotational patch (metric E(t), F=0, G(t))."""
    if not patch.rotational:
        raise ValidationError(
            f"patch '{patch.name}' is not marked rotational")
    u0, u1, v0, v1 = patch.domain
    # precondition probe: metric diagonal and independent of the angle
    for t in (v0 + 0.25 * (v1 - v0), v0 + 0.75 * (v1 - v0)):
        d1 = ImmersionData(patch, u0 + 0.3 * (u1 - u0), t)
        d2 = ImmersionData(patch, u0 + 0.8 * (u1 - u0), t)
        if abs(d1.F.f) > 1e-10 * d1.E.f or \
           abs(d1.E.f - d2.E.f) > 1e-9 * d1.E.f:
            raise ValidationError(
                f"patch '{patch.name}' metric is not rotational "
                f"(E=E(t), F=0)")

    reparam = _RotationalReparam(patch, n_cells)

    def t_jet_of(w_jet):
        w0 = w_jet.c[0] if isinstance(w_jet, Jet3) else float(w_jet)
        t0 = reparam.t_of_w(w0)
        data = ImmersionData(patch, reparam.u_mid, t0)  # metric only
        chi = jsqrt(data.E / data.G)    # dt/dw as a jet in (u, t)
        chi0, chi1, chi2 = chi.f, chi.fv, chi.fvv
        t1 = chi0
        t2 = chi1 * chi0 / 2.0
        t3 = (chi2 * chi0 * chi0 + chi1 * chi1 * chi0) / 6.0
        if not isinstance(w_jet, Jet3):
            w_jet = Jet3.constant(w_jet)
        return compose_univariate([t0, t1, t2, t3], w_jet)

    def immersion(sj, wj):
        return patch.jets_from(sj, t_jet_of(wj))

    w0_dom = reparam.w_of_t(v0)
    w1_dom = reparam.w_of_t(v1)
    derived = SurfacePatch(
        patch.ambient, immersion, (u0, u1, w0_dom, w1_dom),
        name=f"{patch.name}[conformal]", params=patch.params,
        rotational=True)

    def to_chart(u, v):
        return u, reparam.w_of_t(v)

    def from_chart(s, w):
        return s, reparam.t_of_w(w)

    return IsothermalChart(immersed_pair(derived), "rotational",
                           to_chart, from_chart, derived.domain, conf_tol)


@dataclass(frozen=True)
class HopfData:
    Q: complex
    Q_zbar: complex
    lam: float
    delta_conf: float
    lines_form_gap: float     # consistency of -2 Im(Q) against W


def hopf_Q(pair, chart: IsothermalChart, u, v) -> HopfData:
    """Hopf-type coefficient and its zbar-derivative at chart point
    (u, v); also cross-checks -2 Im(Q dz^2) against the W coefficients."""
    if pair is not None and chart.kind == "identity" \
            and pair is not chart.pair:
        raise ValidationError("chart does not belong to the given pair")
    field = chart.pair
    defect = chart.require_conformal(u, v)
    A, B = field.forms(u, v)
    lam = 0.25 * (A.E + A.G)
    Q = complex(0.25 * (B.E - B.G), -0.5 * B.F)
    Q_u = complex(0.25 * (B.E_u - B.G_u), -0.5 * B.F_u)
    Q_v = complex(0.25 * (B.E_v - B.G_v), -0.5 * B.F_v)
    Q_zbar = 0.5 * (Q_u + 1j * Q_v)

    # sqrt(det A) * W = (a, b, c); in a conformal chart sqrt(det A) =
    # 2 lam and -2 Im(Q dz^2) = f du^2 + (g - e) du dv - f dv^2
    from .pairs import lines_form_coeffs
    a, b, c = lines_form_coeffs(A, B)
    scale = max(abs(B.E), abs(B.F), abs(B.G), 1e-30)
    gap = max(abs(a / (2 * lam) - B.F),
              abs(b / (2 * lam) - (B.G - B.E)),
              abs(c / (2 * lam) + B.F)) / scale
    return HopfData(Q, Q_zbar, lam, defect, gap)


@dataclass(frozen=True)
class Lemma2Report:
    t_s_tilde: float          # Codazzi function of the traceless shape op
    from_q_zbar: float        # 2 |Q_zbar|^2 / lambda^3
    gap_qzbar: float          # relative gap of the two above
    dh_norm_sq: float         # ||dH||^2
    gap_dh: float             # relative gap of T_S~ against ||dH||^2
    codazzi_residual_sup: float
    q: float
    lam: float
    q_identity_gap: float     # relative gap of |Q|^2 = lambda^2 q


def lemma2_check(pair, chart: IsothermalChart, u, v,
                 q_floor=1e-6) -> Lemma2Report:
    """Verify the structural identity T_S~ = 2|Q_zbar|^2 / lambda^3 and,
    for Codazzi pairs, T_S~ = ||dH||^2, at one chart point."""
    field = chart.pair
    hopf = hopf_Q(pair, chart, u, v)
    report = codazzi_tensor_and_function(field, u, v)
    lhs = report.codazzi_function_traceless
    rhs = 2.0 * abs(hopf.Q_zbar) ** 2 / hopf.lam ** 3

    def rel_gap(x, y):
        return abs(x - y) / max(abs(x), abs(y), 1e-12)

    dh2 = dH_norm_squared(field, u, v)
    r_sup = max(abs(report.residual[0]), abs(report.residual[1]))

    from .pairs import pair_curvatures
    shape = pair_curvatures(field, u, v)
    q_gap = rel_gap(abs(hopf.Q) ** 2, hopf.lam ** 2 * shape.q)

    return Lemma2Report(lhs, rhs, rel_gap(lhs, rhs), dh2,
                        rel_gap(lhs, dh2), r_sup, shape.q, hopf.lam, q_gap)
