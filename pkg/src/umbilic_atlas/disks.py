"""Disk regions with piecewise-differentiable boundary: vertex angles
measured in the pair metric, curvature-line residuals of boundary
curves, and boundary rotation indices.

Boundary indices come from the angle/order formula
I* = 1 - theta (k+2) / (2 pi), with k fitted one-sidedly; on
coordinate-aligned conformal boundaries the reflection-doubling winding
is computed as an independent second method.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from .conformal import IsothermalChart, hopf_Q
from .curves import Curve
from .errors import NumericalError, ValidationError, WindingError
from .lines import curvature_line_residual, principal_directions
from .pairs import Q_FLOOR, PairField
from .umbilics import SNAP_GATE, TWO_PI, snap, track_winding

CLOSURE_TOL = 1e-10
BOUNDARY_LINE_TOL = 1e-6


class DiskRegion:
    """Ordered, positively oriented boundary curves (region on the
    left); vertices are the curve junctions."""

    def __init__(self, curves, polyline_per_curve=200):
        if not curves:
            raise ValidationError("disk needs at least one boundary curve")
        self.curves = list(curves)
        pts = []
        for i, curve in enumerate(self.curves):
            nxt = self.curves[(i + 1) % len(self.curves)]
            end = curve.point(curve.r1)
            start = nxt.point(nxt.r0)
            gap = math.hypot(end[0] - start[0], end[1] - start[1])
            if gap > CLOSURE_TOL:
                raise ValidationError(
                    f"boundary does not close: gap {gap:.2e} between "
                    f"curve {i} and {(i + 1) % len(self.curves)}")
            for r in curve.params(polyline_per_curve)[:-1]:
                pts.append(curve.point(r))
        self._poly = pts
        us = [p[0] for p in pts]
        vs = [p[1] for p in pts]
        self._bounds = (min(us), max(us), min(vs), max(vs))

    @classmethod
    def rectangle(cls, u0, u1, v0, v1):
        edges = [
            Curve.iso_v(v0, (u0, u1), label="bottom"),
            Curve.iso_u(u1, (v0, v1), label="right"),
            Curve.iso_v(v1, (u0, u1), label="top").reversed(),
            Curve.iso_u(u0, (v0, v1), label="left").reversed(),
        ]
        return cls(edges)

    @property
    def bounds(self):
        return self._bounds

    def vertices(self):
        return [c.point(c.r0) for c in self.curves]

    def vertex_tangents(self, i):
        """One-sided tangents at vertex i: incoming curve end and
        outgoing curve start."""
        incoming = self.curves[(i - 1) % len(self.curves)]
        outgoing = self.curves[i]
        t_in = incoming.velocity(incoming.r1)
        t_out = outgoing.velocity(outgoing.r0)
        if math.hypot(*t_in) < 1e-12 or math.hypot(*t_out) < 1e-12:
            raise NumericalError(
                f"vanishing one-sided tangent at vertex {i}")
        return t_in, t_out

    def contains(self, u, v):
        # crossing number against the dense boundary polyline
        inside = False
        pts = self._poly
        n = len(pts)
        for i in range(n):
            (x0, y0), (x1, y1) = pts[i], pts[(i + 1) % n]
            if (y0 > v) != (y1 > v):
                x_cross = x0 + (v - y0) * (x1 - x0) / (y1 - y0)
                if x_cross > u:
                    inside = not inside
        return inside

    def boundary_distance(self, u, v):
        return min(math.hypot(u - p[0], v - p[1]) for p in self._poly)


def _cholesky(A):
    lu = math.sqrt(A.E)
    return ((lu, A.F / lu), (0.0, math.sqrt(A.det / A.E)))


def _apply(m, x):
    return (m[0][0] * x[0] + m[0][1] * x[1],
            m[1][0] * x[0] + m[1][1] * x[1])


def _pick_interior_arc(phi1, phi2, probe_inside):
    """Choose the arc (start angle, extent) between the two rays whose
    points lie inside the region; probe_inside(angle) tests a direction."""
    d12 = (phi2 - phi1) % TWO_PI
    arcs = [(phi1, d12), (phi2, TWO_PI - d12)]
    for start, extent in arcs:
        if extent < 1e-12:
            continue
        if probe_inside(start + 0.5 * extent):
            return start, extent
    raise NumericalError(
        "could not determine the interior sector at a vertex (degenerate "
        "probe); vertex angle ambiguous")


def vertex_angle(pair: PairField, disk: DiskRegion, vertex_index,
                 probe_delta=1e-5):
    """Interior angle at a vertex, measured in the metric A, with the
    interior side disambiguated by probing the region."""
    t_in, t_out = disk.vertex_tangents(vertex_index)
    z0 = disk.vertices()[vertex_index]
    A, _ = pair.forms(*z0)
    L = _cholesky(A)
    inv_det = L[0][0] * L[1][1]
    L_inv = ((L[1][1] / inv_det, -L[0][1] / inv_det),
             (0.0, L[0][0] / inv_det))

    r1 = _apply(L, (-t_in[0], -t_in[1]))
    r2 = _apply(L, t_out)
    # regular point passed as a vertex: the rays are antiparallel
    cross = r1[0] * r2[1] - r1[1] * r2[0]
    dot = r1[0] * r2[0] + r1[1] * r2[1]
    if abs(cross) < 1e-9 * math.hypot(*r1) * math.hypot(*r2) and dot < 0.0:
        return math.pi
    phi1 = math.atan2(r1[1], r1[0])
    phi2 = math.atan2(r2[1], r2[0])

    scale = max(abs(disk.bounds[1] - disk.bounds[0]),
                abs(disk.bounds[3] - disk.bounds[2]))

    def probe_inside(angle):
        direction = _apply(L_inv, (math.cos(angle), math.sin(angle)))
        norm = math.hypot(*direction)
        for delta in (probe_delta, probe_delta * 10.0):
            p = (z0[0] + delta * scale * direction[0] / norm,
                 z0[1] + delta * scale * direction[1] / norm)
            if disk.contains(*p):
                return True
        return False

    _, theta = _pick_interior_arc(phi1, phi2, probe_inside)
    return theta


def boundary_is_curvature_line(pair: PairField, curve: Curve, n=128,
                               q_floor=Q_FLOOR):
    """Normalized sup of W(gamma', gamma') along the curve; vacuously
    satisfied (flagged) in totally umbilical regions."""
    return curvature_line_residual(pair, curve, n, q_floor)


@dataclass(frozen=True)
class VertexRecord:
    location: tuple
    theta: float
    k: int
    index_star: float         # snapped doubled index I*
    index: float              # I = I*/2
    raw_index_star: float
    snap_residual: float
    quantization_error: float # relative gap of theta to pi/(k+2) grid
    k_method: str
    doubling_index_star: float | None
    methods_agree: bool | None


def _chart_frame(chart, z0):
    """Vertex location and ray push-forward in chart coordinates."""
    s0, w0 = chart.to_chart(*z0)
    h = 1e-6

    def push(ray):
        norm = math.hypot(*ray)
        p = chart.to_chart(z0[0] + h * ray[0] / norm,
                           z0[1] + h * ray[1] / norm)
        return (p[0] - s0, p[1] - w0)

    return (s0, w0), push


def _fit_k_by_regression(chart, center, alpha0, theta, radius, k_max=6):
    """Slope of log |Q| against log r on rays inside the sector."""
    radii = [radius * 0.5 ** j for j in range(6)]
    margin = theta / 16.0
    angles = [alpha0 + margin + (theta - 2 * margin) * (i + 0.5) / 8.0
              for i in range(8)]
    logs = []
    for r in radii:
        vals = []
        for ang in angles:
            s = center[0] + r * math.cos(ang)
            w = center[1] + r * math.sin(ang)
            hopf = hopf_Q(None, chart, s, w)
            magnitude = abs(hopf.Q)
            if magnitude <= 0.0:
                return None, float("inf")
            vals.append(math.log(magnitude))
        logs.append(sum(vals) / len(vals))
    xs = [math.log(r) for r in radii]
    n = len(xs)
    mx = sum(xs) / n
    my = sum(logs) / n
    sxx = sum((x - mx) ** 2 for x in xs)
    sxy = sum((x - mx) * (y - my) for x, y in zip(xs, logs))
    slope = sxy / sxx

    def sse(k):
        c = my - k * mx
        return sum((y - (k * x + c)) ** 2 for x, y in zip(xs, logs))

    k_hat = min(max(int(round(slope)), 0), k_max)
    candidates = sorted({max(k_hat - 1, 0), k_hat, min(k_hat + 1, k_max)})
    errs = sorted((sse(k), k) for k in candidates)
    if len(errs) > 1 and errs[0][0] < 0.5 * errs[1][0]:
        return errs[0][1], errs[0][0]
    # regression ambiguous: fall back to the theta-quantization signal
    best = min(candidates,
               key=lambda k: _quantization_error(theta, k))
    return best, errs[0][0]


def _quantization_error(theta, k):
    unit = math.pi / (k + 2)
    m = max(1, round(theta / unit))
    return abs(theta - m * unit) / theta


def _doubling_winding(chart, center, alpha0, theta, radius):
    """Reflection-doubling index: pull the coefficient back through the
    sector-opening map, reflect across the boundary, and wind."""
    exponent = theta / math.pi
    rot = cmath.exp(1j * alpha0)

    def f_arg(phi):
        if phi > math.pi:
            return -f_arg(TWO_PI - phi)
        xi = radius * cmath.exp(1j * min(phi, math.pi))
        z = rot * xi ** exponent
        s = center[0] + z.real
        w = center[1] + z.imag
        hopf = hopf_Q(None, chart, s, w)
        dz_dxi = rot * exponent * xi ** (exponent - 1.0)
        f = hopf.Q * dz_dxi * dz_dxi
        return cmath.phase(f)

    total = track_winding(f_arg, 0.0, TWO_PI, samples=128)
    return -total / (2.0 * TWO_PI)


def _axis_aligned(push, t_in, t_out, tol=1e-6):
    for ray in (push((-t_in[0], -t_in[1])), push(t_out)):
        norm = math.hypot(*ray)
        if min(abs(ray[0]), abs(ray[1])) > tol * norm:
            return False
    return True


def boundary_index(pair: PairField, disk: DiskRegion, vertex_index,
                   chart: IsothermalChart = None, radius=None,
                   q_floor=Q_FLOOR) -> VertexRecord:
    """Rotation index at a boundary vertex.

    Primary: I* = 1 - theta (k+2)/(2 pi) with theta the A-angle and k
    the one-sided zero order (log|Q| regression in a conformal chart
    when available, else sector winding of the direction field).
    Secondary: explicit reflection doubling on coordinate-aligned
    conformal boundaries.
    """
    z0 = disk.vertices()[vertex_index]
    for adj in (vertex_index - 1, vertex_index):
        res = boundary_is_curvature_line(
            pair, disk.curves[adj % len(disk.curves)], q_floor=q_floor)
        if not res.vacuous and res.value > BOUNDARY_LINE_TOL:
            raise ValidationError(
                f"boundary curve {adj % len(disk.curves)} adjacent to "
                f"vertex {vertex_index} is not a curvature line "
                f"(residual {res.value:.2e})")
    theta = vertex_angle(pair, disk, vertex_index)
    t_in, t_out = disk.vertex_tangents(vertex_index)

    k = None
    k_method = "sector-winding"
    doubling = None
    if chart is not None:
        center, push = _chart_frame(chart, z0)
        r1c = push((-t_in[0], -t_in[1]))
        r2c = push(t_out)
        phi1 = math.atan2(r1c[1], r1c[0])
        phi2 = math.atan2(r2c[1], r2c[0])

        def probe_inside(angle):
            for delta in (1e-4, 1e-3):
                s = center[0] + delta * math.cos(angle)
                w = center[1] + delta * math.sin(angle)
                base = chart.from_chart(s, w)
                if disk.contains(*base):
                    return True
            return False

        alpha0, theta_chart = _pick_interior_arc(phi1, phi2, probe_inside)
        if abs(theta_chart - theta) > 0.02 * theta:
            raise NumericalError(
                f"chart sector angle {theta_chart:.6f} disagrees with the "
                f"A-angle {theta:.6f} at vertex {vertex_index}")
        if radius is None:
            radius = 0.05 * max(abs(chart.domain[1] - chart.domain[0]),
                                abs(chart.domain[3] - chart.domain[2]))
        k, _ = _fit_k_by_regression(chart, center, alpha0, theta, radius)
        k_method = "log|Q|-regression"
        if k is not None and _axis_aligned(push, t_in, t_out):
            doubling = _doubling_winding(chart, center, alpha0, theta,
                                         radius)
    if k is None:
        k, k_method = _sector_winding_k(pair, disk, z0, theta, t_in, t_out,
                                        q_floor)

    quant = _quantization_error(theta, k)
    if quant > 0.02:
        raise NumericalError(
            f"vertex angle {theta:.6f} is not a multiple of pi/(k+2) "
            f"for k={k} within 2% (error {quant:.3f})")
    raw = 1.0 - theta * (k + 2) / TWO_PI
    snapped, residual = snap(raw, 0.5)
    if residual >= SNAP_GATE:
        raise WindingError(
            f"boundary index {raw:.4f} does not snap to the half-integer "
            f"grid (residual {residual:.3f})")
    agree = None
    doubling_snapped = None
    if doubling is not None:
        doubling_snapped, d_res = snap(doubling, 0.5)
        if d_res >= SNAP_GATE:
            raise WindingError(
                f"doubling index {doubling:.4f} failed to snap "
                f"(residual {d_res:.3f})")
        agree = doubling_snapped == snapped
    return VertexRecord(tuple(z0), theta, int(k), snapped, snapped / 2.0,
                        raw, residual, quant, k_method, doubling_snapped,
                        agree)


def _sector_winding_k(pair, disk, z0, theta, t_in, t_out, q_floor,
                      radius_scale=0.02):
    """Fallback zero order from the doubled-angle sweep of the interior
    direction field across the vertex sector."""
    A, _ = pair.forms(*z0)
    L = _cholesky(A)
    inv_det = L[0][0] * L[1][1]
    L_inv = ((L[1][1] / inv_det, -L[0][1] / inv_det),
             (0.0, L[0][0] / inv_det))
    r1 = _apply(L, (-t_in[0], -t_in[1]))
    r2 = _apply(L, t_out)
    phi1 = math.atan2(r1[1], r1[0])
    phi2 = math.atan2(r2[1], r2[0])
    scale = max(abs(disk.bounds[1] - disk.bounds[0]),
                abs(disk.bounds[3] - disk.bounds[2]))

    def probe_inside(angle):
        d = _apply(L_inv, (math.cos(angle), math.sin(angle)))
        n = math.hypot(*d)
        p = (z0[0] + 1e-4 * scale * d[0] / n,
             z0[1] + 1e-4 * scale * d[1] / n)
        return disk.contains(*p)

    alpha0, extent = _pick_interior_arc(phi1, phi2, probe_inside)
    radius = radius_scale * scale
    margin = extent / 24.0

    def doubled(angle):
        d = _apply(L_inv, (math.cos(angle), math.sin(angle)))
        n = math.hypot(*d)
        p = (z0[0] + radius * d[0] / n, z0[1] + radius * d[1] / n)
        d1, _ = principal_directions(pair, p[0], p[1], q_floor)
        return math.fmod(2.0 * math.atan2(d1[1], d1[0]), TWO_PI)

    total = track_winding(doubled, alpha0 + margin,
                          alpha0 + extent - margin, samples=48)
    k_raw = -total / theta
    k, _ = snap(k_raw, 1.0)
    return max(int(k), 0), "sector-winding"
