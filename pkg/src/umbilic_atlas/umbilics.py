"""Umbilic detection and rotation-index calculus.

Line fields are mod-pi objects, so windings track the doubled angle and
divide by 4*pi; every angular step is kept below pi/4 by adaptive loop
refinement, otherwise the count may silently slip.  Interior indices
snap to the half-integer grid with a hard residual gate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .conformal import hopf_Q, identity_isothermal
from .errors import UmbilicPointError, WindingError
from .jets import Jet3
from .lines import principal_directions
from .pairs import Q_FLOOR, PairField, normalized_q

TWO_PI = 2.0 * math.pi
MAX_ANGLE_STEP = math.pi / 4.0
SNAP_GATE = 0.05


def _wrap(angle):
    """Map to (-pi, pi]."""
    wrapped = math.fmod(angle + math.pi, TWO_PI)
    if wrapped <= 0.0:
        wrapped += TWO_PI
    return wrapped - math.pi


def track_winding(angle_fn, start, end, samples=64, max_evals=20000,
                  closed=True):
    """Total continuous change of angle_fn (values mod 2*pi) over
    [start, end], refining until every step is < pi/4."""
    params = [start + (end - start) * k / samples for k in range(samples + 1)]
    values = [angle_fn(p) for p in params]
    total = 0.0
    evals = len(values)
    stack = [(params[i], params[i + 1], values[i], values[i + 1])
             for i in range(len(params) - 1)]
    stack.reverse()
    while stack:
        a, b, va, vb = stack.pop()
        delta = _wrap(vb - va)
        if abs(delta) < MAX_ANGLE_STEP:
            total += delta
            continue
        evals += 1
        if evals > max_evals:
            raise WindingError(
                "winding loop would not refine below pi/4 steps "
                f"(>{max_evals} evaluations); loop not isolating?")
        mid = 0.5 * (a + b)
        vm = angle_fn(mid)
        stack.append((mid, b, vm, vb))
        stack.append((a, mid, va, vm))
    return total


def _doubled_angle_fn(pair, center, radius, q_floor):
    cu, cv = center

    def fn(phi):
        u = cu + radius * math.cos(phi)
        v = cv + radius * math.sin(phi)
        d1, _ = principal_directions(pair, u, v, q_floor)
        return math.fmod(2.0 * math.atan2(d1[1], d1[0]), TWO_PI)

    return fn


def snap(value, grid):
    snapped = round(value / grid) * grid
    return snapped, abs(value - snapped)


@dataclass(frozen=True)
class IndexResult:
    index: float              # snapped half-integer
    raw: float
    snap_residual: float


def interior_index(pair: PairField, center, loop_radius, samples=64,
                   q_floor=Q_FLOOR) -> IndexResult:
    """Rotation index of the curvature-line field around an isolated
    interior umbilic: doubled-angle winding / (4*pi)."""
    if normalized_q(pair, *center) > 100.0 * q_floor:
        raise UmbilicPointError(
            f"center {center} is not an umbilic point")
    fn = _doubled_angle_fn(pair, center, loop_radius, q_floor)
    total = track_winding(fn, 0.0, TWO_PI, samples)
    raw = total / (2.0 * TWO_PI)
    snapped, residual = snap(raw, 0.5)
    if residual >= SNAP_GATE:
        raise WindingError(
            f"interior index {raw:.4f} does not snap to a half-integer "
            f"(residual {residual:.3f}); refine the loop or radius")
    return IndexResult(snapped, raw, residual)


@dataclass(frozen=True)
class ZeroOrderResult:
    k: int                    # signed winding order (Lemma-1 k when >= 1)
    residual: float
    method: str               # "hopf-winding" | "direction-field"
    agreement: bool | None    # both methods agree (None: one method)
    index: float              # snapped rotation index
    claim1_consistent: bool   # index <= -1/2, the Codazzi screening regime


def _conformal_chart_for(pair, center, chart):
    if chart is not None:
        return chart
    probe = identity_isothermal(pair)
    try:
        for du, dv in ((0.0, 0.0), (0.05, 0.0), (0.0, 0.05),
                       (-0.05, 0.0), (0.0, -0.05)):
            if probe.conformality_defect(center[0] + du,
                                         center[1] + dv) > probe.conf_tol:
                return None
    except Exception:
        return None
    return probe


def zero_order(pair: PairField, center, radius, chart=None, samples=64,
               q_floor=Q_FLOOR) -> ZeroOrderResult:
    """Zero order k of the Hopf-type coefficient at an isolated umbilic.

    Primary method: winding of the complex coefficient in a conformal
    frame (when one is available).  Fallback: doubled-angle winding of
    the principal direction field, k = -2 * index.
    """
    if normalized_q(pair, *center) > 100.0 * q_floor:
        raise UmbilicPointError(f"center {center} is not an umbilic point")
    for phi in (0.0, 1.1, 2.3, 3.6, 4.9):
        u = center[0] + radius * math.cos(phi)
        v = center[1] + radius * math.sin(phi)
        if normalized_q(pair, u, v) <= q_floor:
            raise UmbilicPointError(
                f"winding loop of radius {radius} crosses another umbilic "
                f"near ({u:.4f}, {v:.4f})")

    idx = interior_index(pair, center, radius, samples, q_floor)
    k_fallback = int(round(-2.0 * idx.index))

    chart = _conformal_chart_for(pair, center, chart)
    if chart is None:
        return ZeroOrderResult(k_fallback, idx.snap_residual,
                               "direction-field", None, idx.index,
                               idx.index <= -0.5 + 1e-12)

    cs, cw = chart.to_chart(*center)

    def arg_q(phi):
        s = cs + radius * math.cos(phi)
        w = cw + radius * math.sin(phi)
        hopf = hopf_Q(None, chart, s, w)
        return math.atan2(hopf.Q.imag, hopf.Q.real)

    total = track_winding(arg_q, 0.0, TWO_PI, samples)
    raw_k = total / TWO_PI
    k_primary, residual = snap(raw_k, 1.0)
    if residual > 0.1:
        raise WindingError(
            f"coefficient winding {raw_k:.4f} is not integer-consistent "
            f"(residual {residual:.3f})")
    return ZeroOrderResult(int(k_primary), residual, "hopf-winding",
                           int(k_primary) == k_fallback, idx.index,
                           idx.index <= -0.5 + 1e-12)


@dataclass(frozen=True)
class UmbilicRecord:
    location: tuple
    k: int
    index: float
    q_min: float              # normalized q at the refined point
    order_residual: float
    method: str
    claim1_consistent: bool


@dataclass(frozen=True)
class UmbilicScan:
    totally_umbilical: bool
    records: tuple
    fraction_below: float
    grid_n: int
    q_tol: float


def skew_curvature_jet(pair: PairField, u, v):
    """q = H^2 - K_e as an order-1 jet (exact gradient)."""
    a_jets, b_jets = pair.forms_jets(u, v)
    Ej, Fj, Gj = a_jets
    ej, fj, gj = b_jets
    det = Ej * Gj - Fj * Fj
    H = (Ej * gj - 2.0 * Fj * fj + Gj * ej) / (det * 2.0)
    Ke = (ej * gj - fj * fj) / det
    return H * H - Ke


def _newton_refine(pair, u, v, spacing, iters=30):
    """Newton on grad q = 0; exact gradient, finite-difference Hessian."""
    h = max(1e-7, 1e-3 * spacing)
    for _ in range(iters):
        q = skew_curvature_jet(pair, u, v)
        gu, gv = q.fu, q.fv
        if math.hypot(gu, gv) < 1e-12:
            return u, v, True
        try:
            qpu = skew_curvature_jet(pair, u + h, v)
            qmu = skew_curvature_jet(pair, u - h, v)
            qpv = skew_curvature_jet(pair, u, v + h)
            qmv = skew_curvature_jet(pair, u, v - h)
        except Exception:
            return u, v, False
        huu = (qpu.fu - qmu.fu) / (2 * h)
        huv = (qpv.fu - qmv.fu) / (2 * h)
        hvu = (qpu.fv - qmu.fv) / (2 * h)
        hvv = (qpv.fv - qmv.fv) / (2 * h)
        det = huu * hvv - huv * hvu
        if abs(det) < 1e-300:
            return u, v, False
        du = (hvv * gu - huv * gv) / det
        dv = (-hvu * gu + huu * gv) / det
        step = math.hypot(du, dv)
        limit = 2.0 * spacing
        if step > limit:
            du *= limit / step
            dv *= limit / step
        u -= du
        v -= dv
        if not pair.in_domain(u, v):
            return u, v, False
    q = skew_curvature_jet(pair, u, v)
    return u, v, math.hypot(q.fu, q.fv) < 1e-9


def find_umbilics(pair: PairField, region, grid_n=48, q_tol=1e-8,
                  q_floor=Q_FLOOR, candidate_gate=1e-2) -> UmbilicScan:
    """Grid scan for umbilics inside the region, Newton-refined; or the
    TotallyUmbilical flag when normalized q is tiny almost everywhere."""
    u0, u1, v0, v1 = region.bounds
    du = (u1 - u0) / grid_n
    dv = (v1 - v0) / grid_n
    spacing = math.hypot(du, dv)

    points = []
    values = {}
    below = 0
    for i in range(grid_n):
        for j in range(grid_n):
            u = u0 + du * (i + 0.5)
            v = v0 + dv * (j + 0.5)
            if not (region.contains(u, v) and pair.in_domain(u, v)):
                continue
            qn = normalized_q(pair, u, v)
            values[(i, j)] = qn
            points.append((i, j, u, v, qn))
            if qn < q_tol:
                below += 1
    if not points:
        raise UmbilicPointError("region contains no sample points")
    fraction = below / len(points)
    if fraction >= 0.95:
        return UmbilicScan(True, (), fraction, grid_n, q_tol)

    candidates = []
    for (i, j, u, v, qn) in points:
        if qn >= candidate_gate:
            continue
        neighbors = [values.get((i + di, j + dj))
                     for di in (-1, 0, 1) for dj in (-1, 0, 1)
                     if (di, dj) != (0, 0)]
        if all(nb is None or qn <= nb for nb in neighbors):
            candidates.append((u, v, qn))

    found = []
    for (u, v, qn) in candidates:
        ru, rv, converged = _newton_refine(pair, u, v, spacing)
        if not (pair.in_domain(ru, rv) and region.contains(ru, rv)):
            ru, rv = u, v    # demote to grid-resolution location
        q_ref = normalized_q(pair, ru, rv)
        if q_ref >= q_tol:
            continue
        if any(math.hypot(ru - fu, rv - fv) < 1.5 * spacing
               for (fu, fv) in found):
            continue
        found.append((ru, rv))

    found.sort()
    records = []
    for (ru, rv) in found:
        iso = min([math.hypot(ru - ou, rv - ov)
                   for (ou, ov) in found if (ou, ov) != (ru, rv)],
                  default=float("inf"))
        border = region.boundary_distance(ru, rv)
        radius = 0.5 * min(iso, border)
        radius = min(radius, 10.0 * spacing)
        radius = max(radius, 2.0 * spacing)
        try:
            order = zero_order(pair, (ru, rv), radius, q_floor=q_floor)
            records.append(UmbilicRecord(
                (ru, rv), order.k, order.index,
                normalized_q(pair, ru, rv), order.residual, order.method,
                order.claim1_consistent))
        except (WindingError, UmbilicPointError) as err:
            raise WindingError(
                f"umbilic at ({ru:.5f}, {rv:.5f}) did not resolve: {err}")
    return UmbilicScan(False, tuple(records), fraction, grid_n, q_tol)
