"""Product-space pairs: the gradient-corrected mean-curvature form and
the K-surface pair, plus the boundary-curve classifiers.

For an immersed surface in M^2(eps) x R with height h, mean curvature H
and angle function nu:

    B = 2 H II - eps dh^2 + (eps/2) ||grad h||^2 I
    A = I + (eps / (K - eps)) dh^2        (K > max(0, eps))

(I, B) is Codazzi exactly when H is constant; (A, II) is Codazzi when
the surface has constant Gaussian curvature K.  ||grad h||^2 is taken
as 1 - nu^2 so the vertical decomposition identity stays exact.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .ambient import FormJet, ImmersionData
from .curves import Curve
from .errors import ValidationError
from .jets import jsqrt
from .lines import CurveResidual, curvature_line_residual
from .pairs import PairField, immersed_pair


def _require_product(patch):
    if not patch.ambient.is_product:
        raise ValidationError(
            f"pair needs a product ambient; patch '{patch.name}' lives "
            f"in {patch.ambient.label}")


def ar_pair_field(patch) -> PairField:
    """(I, B) on a product-space patch."""
    _require_product(patch)
    eps = patch.ambient.epsilon

    def evaluator(u, v):
        data = ImmersionData(patch, u, v)
        E, F, G = data.first_form_jets()
        e, f, g = data.second_form_jets()
        det = E * G - F * F
        H = (E * g - 2.0 * F * f + G * e) / (det * 2.0)
        h = data.psi[3]
        hu, hv = h.du(), h.dv()
        nu = data.normal[3]
        grad_sq = 1.0 - nu * nu
        BE = 2.0 * H * e - eps * hu * hu + (eps / 2.0) * grad_sq * E
        BF = 2.0 * H * f - eps * hu * hv + (eps / 2.0) * grad_sq * F
        BG = 2.0 * H * g - eps * hv * hv + (eps / 2.0) * grad_sq * G
        return (E, F, G), (BE, BF, BG)

    return PairField("product_ar", evaluator, patch.domain, patch=patch,
                     label=f"I-B[{patch.name}]")


def ar_pair(patch, u, v):
    field = ar_pair_field(patch)
    return field.forms(u, v)


def k_pair_field(patch, K) -> PairField:
    """(A, II) on a product-space patch, A = I + (eps/(K-eps)) dh^2."""
    _require_product(patch)
    eps = patch.ambient.epsilon
    K = float(K)
    if K <= max(0.0, float(eps)):
        raise ValidationError(
            f"K-pair needs K > max(0, eps) = {max(0.0, float(eps))}; "
            f"got K={K}")
    coeff = eps / (K - eps)

    def evaluator(u, v):
        data = ImmersionData(patch, u, v)
        E, F, G = data.first_form_jets()
        e, f, g = data.second_form_jets()
        h = data.psi[3]
        hu, hv = h.du(), h.dv()
        AE = E + coeff * hu * hu
        AF = F + coeff * hu * hv
        AG = G + coeff * hv * hv
        return (AE, AF, AG), (e, f, g)

    return PairField("k_pair", evaluator, patch.domain, patch=patch,
                     label=f"K-pair[{patch.name}, K={K}]",
                     extra={"K": K})


def k_pair(patch, K, u, v):
    field = k_pair_field(patch, K)
    return field.forms(u, v)


class CurveClass(enum.Enum):
    HORIZONTAL = "horizontal"
    GRADIENT_LINE = "gradient-line"
    NEITHER = "neither"


def classify_curve(patch, curve: Curve, n=96) -> CurveClass:
    """Lemma-3 dichotomy: horizontal curve, integral curve of grad h,
    or neither.  Invariant under curve reparametrization (tangents are
    unit-normalized in I)."""
    _require_product(patch)
    sup_dh = 0.0
    sup_sine = 0.0
    has_gradient_sample = False
    length = 0.0
    prev_r = None
    for r in curve.params(n):
        u, v = curve.point(r)
        du, dv = curve.velocity(r)
        data = ImmersionData(patch, u, v)
        E, F, G = data.E.f, data.F.f, data.G.f
        det = E * G - F * F
        h = data.psi[3]
        hu, hv = h.fu, h.fv
        speed = math.sqrt(E * du * du + 2 * F * du * dv + G * dv * dv)
        if prev_r is not None:
            length += speed * (r - prev_r)
        prev_r = r
        tu, tv = du / speed, dv / speed
        sup_dh = max(sup_dh, abs(hu * tu + hv * tv))
        grad_sq = (G * hu * hu - 2 * F * hu * hv + E * hv * hv) / det
        if grad_sq > 1e-20:
            has_gradient_sample = True
            # sine of the I-angle between gamma' and grad h, via the
            # wedge: ||X ^ Y||^2 = det(I) (X1 Y2 - X2 Y1)^2 in 2D
            # (sqrt(1 - cos^2) would bottom out at sqrt(eps) noise)
            g1 = (G * hu - F * hv) / det
            g2 = (E * hv - F * hu) / det
            cross = tu * g2 - tv * g1
            sine = math.sqrt(det) * abs(cross) / math.sqrt(grad_sq)
            sup_sine = max(sup_sine, sine)
    if sup_dh < 1e-8 * max(length, 1e-8):
        return CurveClass.HORIZONTAL
    if has_gradient_sample and sup_sine < 1e-8:
        return CurveClass.GRADIENT_LINE
    return CurveClass.NEITHER


@dataclass(frozen=True)
class Lemma3Report:
    curve_class: CurveClass
    classical_residual: CurveResidual    # for (I, II)
    k_pair_residual: CurveResidual       # for (A, II)
    equivalent: bool                     # both vanish or both do not


def lemma3_check(patch, K, curve: Curve, tol=1e-8, n=128) -> Lemma3Report:
    """Check that being a curvature line is equivalent for (I, II) and
    (A, II) along a horizontal or gradient curve."""
    cls = classify_curve(patch, curve)
    if cls is CurveClass.NEITHER:
        raise ValidationError(
            "lemma3_check needs a horizontal or gradient curve; "
            f"'{curve.label}' is neither")
    classical = curvature_line_residual(immersed_pair(patch), curve, n)
    kp = curvature_line_residual(k_pair_field(patch, K), curve, n)
    both_zero = classical.value < tol and kp.value < tol
    both_nonzero = classical.value >= tol and kp.value >= tol
    return Lemma3Report(cls, classical, kp, both_zero or both_nonzero)
