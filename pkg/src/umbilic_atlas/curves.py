"""Parametric chart curves and rectangular regions."""

from __future__ import annotations

import math

from .errors import ValidationError
from .exprs import eval_jet, parse
from .jets import Jet3


class Rect:
    """Axis-aligned chart rectangle used as a scan/trace region."""

    def __init__(self, u0, u1, v0, v1):
        if not (u0 < u1 and v0 < v1):
            raise ValidationError(f"empty rectangle [{u0},{u1}]x[{v0},{v1}]")
        self.u0, self.u1, self.v0, self.v1 = map(float, (u0, u1, v0, v1))

    @property
    def bounds(self):
        return (self.u0, self.u1, self.v0, self.v1)

    def contains(self, u, v):
        return self.u0 <= u <= self.u1 and self.v0 <= v <= self.v1

    def boundary_distance(self, u, v):
        return min(u - self.u0, self.u1 - u, v - self.v0, self.v1 - v)

    def grid(self, n):
        for i in range(n):
            for j in range(n):
                yield (self.u0 + (self.u1 - self.u0) * (i + 0.5) / n,
                       self.v0 + (self.v1 - self.v0) * (j + 0.5) / n)


class Curve:
    """Differentiable chart curve r in [r0, r1] -> (u(r), v(r)).

    Components are callables on jets, so tangents and curve jets come
    out exactly.  The parameter variable of expression-defined curves is
    named r.
    """

    def __init__(self, component_fn, r_range, label="curve"):
        self._fn = component_fn
        self.r0, self.r1 = float(r_range[0]), float(r_range[1])
        if not self.r0 < self.r1:
            raise ValidationError(f"curve range [{self.r0}, {self.r1}] empty")
        self.label = label

    @classmethod
    def from_expressions(cls, u_src, v_src, r_range, params=None,
                         label="curve"):
        u_ast, v_ast = parse(u_src), parse(v_src)
        params = dict(params or {})

        def fn(rj):
            env = {"r": rj}
            env.update(params)
            return (Jet3.lift(eval_jet(u_ast, env)),
                    Jet3.lift(eval_jet(v_ast, env)))

        return cls(fn, r_range, label=label)

    @classmethod
    def segment(cls, p0, p1, label="segment"):
        (a0, b0), (a1, b1) = p0, p1

        def fn(rj):
            return (a0 + (a1 - a0) * rj, b0 + (b1 - b0) * rj)

        return cls(fn, (0.0, 1.0), label=label)

    @classmethod
    def iso_u(cls, u0, v_range, label=None):
        """Coordinate curve u = u0 (a meridian on rotational patches)."""

        def fn(rj):
            return (Jet3.constant(u0) + 0.0 * rj, rj)

        return cls(fn, v_range, label=label or f"u={u0}")

    @classmethod
    def iso_v(cls, v0, u_range, label=None):
        """Coordinate curve v = v0 (a parallel on rotational patches)."""

        def fn(rj):
            return (rj, Jet3.constant(v0) + 0.0 * rj)

        return cls(fn, u_range, label=label or f"v={v0}")

    def jets(self, r, order=2):
        rj = Jet3.variable(r, "u", order)
        uj, vj = self._fn(rj)
        return Jet3.lift(uj), Jet3.lift(vj)

    def point(self, r):
        uj, vj = self.jets(r, order=0)
        return uj.f, vj.f

    def velocity(self, r):
        uj, vj = self.jets(r, order=1)
        return uj.fu, vj.fu

    def params(self, n):
        return [self.r0 + (self.r1 - self.r0) * k / (n - 1)
                for k in range(n)]

    def endpoints(self):
        return self.point(self.r0), self.point(self.r1)

    def reversed(self):
        """Orientation-reversed copy (same trace)."""
        r0, r1 = self.r0, self.r1

        def fn(rj):
            return self._fn(r0 + r1 - rj)

        return Curve(fn, (r0, r1), label=f"{self.label}[rev]")
