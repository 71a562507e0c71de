"""Principal direction fields, curvature-line tracing, and the
normalized line-of-curvature residual for curves."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .curves import Rect
from .errors import UmbilicPointError
from .pairs import Q_FLOOR, PairField, lines_form, normalized_q

_COEFF_TINY = 1e-14


def _a_norm_sq(A, x):
    return A.E * x[0] ** 2 + 2.0 * A.F * x[0] * x[1] + A.G * x[1] ** 2


def _skew_scale(A, a, b, c):
    """sup_X |W(X,X)| / ||X||_A^2: the W matrix is A-traceless with
    eigenvalues +/- sqrt(-det W / det A)."""
    det_w = a * c - 0.25 * b * b
    return math.sqrt(max(0.0, -det_w / A.det))


def principal_directions(pair: PairField, u, v, q_floor=Q_FLOOR):
    """The two A-unit principal directions, k1 direction first."""
    if normalized_q(pair, u, v) <= q_floor:
        raise UmbilicPointError(
            f"umbilic point at ({u}, {v}): principal directions undefined")
    a, b, c = lines_form(pair, u, v)
    A, B = pair.forms(u, v)
    scale = max(abs(a), abs(b), abs(c))
    if abs(a) <= _COEFF_TINY * scale and abs(c) <= _COEFF_TINY * scale:
        dirs = [np.array([1.0, 0.0]), np.array([0.0, 1.0])]
    else:
        disc = math.sqrt(max(0.0, b * b - 4.0 * a * c))
        sgn = 1.0 if b >= 0.0 else -1.0
        qq = -0.5 * (b + sgn * disc)
        if abs(a) >= abs(c):
            roots = [qq / a, c / qq] if qq != 0.0 else [0.0, -b / a]
            dirs = [np.array([x, 1.0]) for x in roots]
        else:
            roots = [qq / c, a / qq] if qq != 0.0 else [0.0, -b / c]
            dirs = [np.array([1.0, y]) for y in roots]

    out = []
    for d in dirs:
        n = math.sqrt(_a_norm_sq(A, d))
        d = d / n
        if d[0] < 0.0 or (d[0] == 0.0 and d[1] < 0.0):
            d = -d
        out.append(d)

    def rayleigh(d):
        return (B.E * d[0] ** 2 + 2.0 * B.F * d[0] * d[1]
                + B.G * d[1] ** 2)

    out.sort(key=rayleigh, reverse=True)
    return out[0], out[1]


@dataclass(frozen=True)
class CurveResidual:
    value: float              # normalized sup residual
    vacuous: bool             # totally umbilical along the whole curve
    samples: int


def curvature_line_residual(pair: PairField, curve, n=128,
                            q_floor=Q_FLOOR) -> CurveResidual:
    """sup over samples of |W(gamma', gamma')| / (||gamma'||_A^2 * s)
    with s the pointwise W scale; dimensionless.  Samples inside
    totally umbilical spots are vacuous and skipped."""
    worst = 0.0
    vacuous_count = 0
    for r in curve.params(n):
        u, v = curve.point(r)
        du, dv = curve.velocity(r)
        a, b, c = lines_form(pair, u, v)
        A, _ = pair.forms(u, v)
        s = _skew_scale(A, a, b, c)
        if normalized_q(pair, u, v) < q_floor or s == 0.0:
            vacuous_count += 1
            continue
        w_val = abs(a * du * du + b * du * dv + c * dv * dv)
        worst = max(worst, w_val / (_a_norm_sq(A, (du, dv)) * s))
    if vacuous_count == n:
        return CurveResidual(0.0, True, n)
    return CurveResidual(worst, False, n - vacuous_count)


def trace_line(pair: PairField, start, family, step=0.01, max_len=10.0,
               region=None, q_floor=Q_FLOOR):
    """Fixed-step RK4 streamline of the chosen principal family.

    The direction field is normalized in A and sign-continued against
    the previous step; tracing stops at the region boundary, near an
    umbilic (normalized q below 10*q_floor), or at max_len.
    """
    if family not in (1, 2):
        raise ValueError("family must be 1 or 2")
    if region is None:
        region = Rect(*pair.domain)
    u, v = float(start[0]), float(start[1])
    d0 = principal_directions(pair, u, v, q_floor)[family - 1]

    def field(uu, vv, ref):
        d = principal_directions(pair, uu, vv, q_floor)[family - 1]
        if float(np.dot(d, ref)) < 0.0:
            d = -d
        return d

    points = [(u, v)]
    ref = d0
    length = 0.0
    while length < max_len:
        try:
            k1 = field(u, v, ref)
            k2 = field(u + 0.5 * step * k1[0], v + 0.5 * step * k1[1], k1)
            k3 = field(u + 0.5 * step * k2[0], v + 0.5 * step * k2[1], k2)
            k4 = field(u + step * k3[0], v + step * k3[1], k3)
        except UmbilicPointError:
            break
        delta = (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0
        nu_, nv_ = u + step * delta[0], v + step * delta[1]
        if not (region.contains(nu_, nv_) and pair.in_domain(nu_, nv_)):
            break
        if normalized_q(pair, nu_, nv_) < 10.0 * q_floor:
            break
        u, v = nu_, nv_
        ref = field(u, v, delta)
        points.append((u, v))
        length += step
    return np.array(points)
