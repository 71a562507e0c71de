"""Order-3 jets in two chart variables: the forward-AD carrier.

A ``Jet3`` stores the truncated Taylor expansion of a scalar function of
(u, v) around the evaluation point, up to total degree 3.  All arithmetic
propagates derivatives exactly (product/chain rule on truncated series),
so downstream quantities built from jets carry exact partials.

Jets are graded: differentiating (``du``/``dv``) or multiplying jets of
different orders lowers the trusted order, and reading a derivative slot
beyond the trusted order raises instead of returning garbage.
"""

from __future__ import annotations

import math

from .errors import EvalDomainError

# Multi-index layout: (i, j) = du^i dv^j, total degree <= 3.
_MULTI = [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2),
          (3, 0), (2, 1), (1, 2), (0, 3)]
_IDX = {m: k for k, m in enumerate(_MULTI)}
_DEG = [i + j for (i, j) in _MULTI]
# derivative = taylor coefficient * i! * j!
_FACT = [math.factorial(i) * math.factorial(j) for (i, j) in _MULTI]

# Precomputed product table: (ia, ib, iout) for every coefficient pair
# with deg(a)+deg(b) <= 3, grouped by output slot.
_MUL_TERMS: list[list[tuple[int, int]]] = [[] for _ in range(10)]
for _a, (_ia, _ja) in enumerate(_MULTI):
    for _b, (_ib, _jb) in enumerate(_MULTI):
        _m = (_ia + _ib, _ja + _jb)
        if _m in _IDX:
            _MUL_TERMS[_IDX[_m]].append((_a, _b))

# Shift tables for d/du and d/dv: (src_index, factor) per output slot of
# the degree<=2 part.
_DU_SHIFT = []
_DV_SHIFT = []
for _k, (_i, _j) in enumerate(_MULTI):
    if _i + _j <= 2:
        _DU_SHIFT.append((_k, _IDX[(_i + 1, _j)], _i + 1))
        _DV_SHIFT.append((_k, _IDX[(_i, _j + 1)], _j + 1))


class Jet3:
    """Scalar value with partial derivatives through order 3 in (u, v)."""

    __slots__ = ("c", "order")

    def __init__(self, coeffs, order=3):
        self.c = coeffs          # list of 10 Taylor coefficients
        self.order = order       # trusted total degree

    # -- constructors -------------------------------------------------

    @staticmethod
    def constant(x, order=3):
        c = [0.0] * 10
        c[0] = float(x)
        return Jet3(c, order)

    @staticmethod
    def variable(x, slot, order=3):
        """Seed a chart variable: slot 'u' or 'v'."""
        c = [0.0] * 10
        c[0] = float(x)
        if order >= 1:
            c[1 if slot == "u" else 2] = 1.0
        return Jet3(c, order)

    @staticmethod
    def lift(x, order=3):
        return x if isinstance(x, Jet3) else Jet3.constant(x, order)

    # -- derivative accessors -----------------------------------------

    def _get(self, k):
        if _DEG[k] > self.order:
            raise ValueError(
                f"jet holds order {self.order}; slot of degree {_DEG[k]} untrusted")
        return self.c[k] * _FACT[k]

    @property
    def f(self):
        return self.c[0]

    @property
    def fu(self):
        return self._get(1)

    @property
    def fv(self):
        return self._get(2)

    @property
    def fuu(self):
        return self._get(3)

    @property
    def fuv(self):
        return self._get(4)

    @property
    def fvv(self):
        return self._get(5)

    @property
    def fuuu(self):
        return self._get(6)

    @property
    def fuuv(self):
        return self._get(7)

    @property
    def fuvv(self):
        return self._get(8)

    @property
    def fvvv(self):
        return self._get(9)

    def derivatives(self):
        """All trusted derivatives as a dict keyed by (i, j)."""
        return {m: self.c[k] * _FACT[k]
                for k, m in enumerate(_MULTI) if _DEG[k] <= self.order}

    def __repr__(self):
        return f"Jet3({self.c[0]!r}, order={self.order})"

    # -- grading -------------------------------------------------------

    def du(self):
        """Jet of the u-partial; trusted order drops by one."""
        c = [0.0] * 10
        for dst, src, fac in _DU_SHIFT:
            c[dst] = fac * self.c[src]
        return Jet3(c, self.order - 1)

    def dv(self):
        c = [0.0] * 10
        for dst, src, fac in _DV_SHIFT:
            c[dst] = fac * self.c[src]
        return Jet3(c, self.order - 1)

    # -- arithmetic -----------------------------------------------------

    def __add__(self, other):
        if isinstance(other, Jet3):
            a, b = self.c, other.c
            return Jet3([a[k] + b[k] for k in range(10)],
                        min(self.order, other.order))
        c = self.c[:]
        c[0] += other
        return Jet3(c, self.order)

    __radd__ = __add__

    def __neg__(self):
        return Jet3([-x for x in self.c], self.order)

    def __sub__(self, other):
        if isinstance(other, Jet3):
            a, b = self.c, other.c
            return Jet3([a[k] - b[k] for k in range(10)],
                        min(self.order, other.order))
        c = self.c[:]
        c[0] -= other
        return Jet3(c, self.order)

    def __rsub__(self, other):
        c = [-x for x in self.c]
        c[0] += other
        return Jet3(c, self.order)

    def __mul__(self, other):
        if isinstance(other, Jet3):
            order = min(self.order, other.order)
            a, b = self.c, other.c
            c = [0.0] * 10
            for k in range(10):
                if _DEG[k] > order:
                    break
                s = 0.0
                for ia, ib in _MUL_TERMS[k]:
                    s += a[ia] * b[ib]
                c[k] = s
            return Jet3(c, order)
        return Jet3([x * other for x in self.c], self.order)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Jet3):
            return self * _recip(other)
        return Jet3([x / other for x in self.c], self.order)

    def __rtruediv__(self, other):
        return _recip(self) * other

    def __pow__(self, p):
        if isinstance(p, Jet3):
            if all(x == 0.0 for x in p.c[1:]):
                p = p.c[0]
            else:
                return jexp(p * jlog(self))
        if isinstance(p, float) and p.is_integer():
            p = int(p)
        if isinstance(p, int):
            return _int_pow(self, p)
        x0 = self.c[0]
        if x0 <= 0.0:
            raise EvalDomainError(
                f"non-integer power of non-positive base {x0}")
        g = [x0 ** p,
             p * x0 ** (p - 1),
             p * (p - 1) * x0 ** (p - 2) / 2.0,
             p * (p - 1) * (p - 2) * x0 ** (p - 3) / 6.0]
        return compose_univariate(g, self)

    def scaled(self, s):
        return Jet3([x * s for x in self.c], self.order)


def _int_pow(x: Jet3, n: int) -> Jet3:
    if n < 0:
        return _recip(_int_pow(x, -n))
    result = Jet3.constant(1.0, x.order)
    base = x
    while n:
        if n & 1:
            result = result * base
        base = base * base
        n >>= 1
    return result


def _recip(x: Jet3) -> Jet3:
    x0 = x.c[0]
    if x0 == 0.0:
        raise EvalDomainError("division by zero jet value")
    inv = 1.0 / x0
    return compose_univariate([inv, -inv * inv, inv ** 3, -inv ** 4], x)


def compose_univariate(g, x: Jet3) -> Jet3:
    """Compose Taylor coefficients g = [g(x0), g'(x0), g''/2!, g'''/3!]
    with the jet x around its own value x0."""
    p = x.c[:]
    p[0] = 0.0
    p = Jet3(p, x.order)
    p2 = p * p
    out = (p2 * p).scaled(g[3]) + p2.scaled(g[2]) + p.scaled(g[1])
    out.c[0] += g[0]
    return out


# -- math functions on jets (accept floats too) ------------------------

def _as_jet(x):
    return x if isinstance(x, Jet3) else None


def jsin(x):
    j = _as_jet(x)
    if j is None:
        return math.sin(x)
    s, c = math.sin(j.c[0]), math.cos(j.c[0])
    return compose_univariate([s, c, -s / 2.0, -c / 6.0], j)


def jcos(x):
    j = _as_jet(x)
    if j is None:
        return math.cos(x)
    s, c = math.sin(j.c[0]), math.cos(j.c[0])
    return compose_univariate([c, -s, -c / 2.0, s / 6.0], j)


def jtan(x):
    j = _as_jet(x)
    if j is None:
        return math.tan(x)
    t = math.tan(j.c[0])
    d1 = 1.0 + t * t
    return compose_univariate(
        [t, d1, t * d1, d1 * (1.0 + 3.0 * t * t) / 3.0], j)


def jsinh(x):
    j = _as_jet(x)
    if j is None:
        return math.sinh(x)
    s, c = math.sinh(j.c[0]), math.cosh(j.c[0])
    return compose_univariate([s, c, s / 2.0, c / 6.0], j)


def jcosh(x):
    j = _as_jet(x)
    if j is None:
        return math.cosh(x)
    s, c = math.sinh(j.c[0]), math.cosh(j.c[0])
    return compose_univariate([c, s, c / 2.0, s / 6.0], j)


def jexp(x):
    j = _as_jet(x)
    if j is None:
        return math.exp(x)
    e = math.exp(j.c[0])
    return compose_univariate([e, e, e / 2.0, e / 6.0], j)


def jlog(x):
    j = _as_jet(x)
    if j is None:
        if x <= 0.0:
            raise EvalDomainError(f"log of non-positive value {x}")
        return math.log(x)
    x0 = j.c[0]
    if x0 <= 0.0:
        raise EvalDomainError(f"log of non-positive value {x0}")
    inv = 1.0 / x0
    return compose_univariate(
        [math.log(x0), inv, -inv * inv / 2.0, inv ** 3 / 3.0], j)


def jsqrt(x):
    j = _as_jet(x)
    if j is None:
        if x < 0.0:
            raise EvalDomainError(f"sqrt of negative value {x}")
        return math.sqrt(x)
    x0 = j.c[0]
    if x0 <= 0.0:
        raise EvalDomainError(f"sqrt of non-positive jet value {x0}")
    r = math.sqrt(x0)
    return compose_univariate(
        [r, 0.5 / r, -1.0 / (8.0 * r * x0), 1.0 / (16.0 * r * x0 * x0)], j)


def jatan(x):
    j = _as_jet(x)
    if j is None:
        return math.atan(x)
    t = j.c[0]
    d = 1.0 + t * t
    return compose_univariate(
        [math.atan(t), 1.0 / d, -t / (d * d),
         (3.0 * t * t - 1.0) / (3.0 * d ** 3)], j)


def jatan2(y, x):
    """atan2 on jets; exact derivatives away from the origin.

    Away from the half-axes the angle differs from atan(y/x) (or
    -atan(x/y)) by a locally constant branch shift, so derivatives can
    be taken from whichever quotient is well conditioned.
    """
    jy, jx = Jet3.lift(y), Jet3.lift(x)
    y0, x0 = jy.c[0], jx.c[0]
    if x0 == 0.0 and y0 == 0.0:
        raise EvalDomainError("atan2 at the origin")
    base = math.atan2(y0, x0)
    if abs(x0) >= abs(y0):
        out = jatan(jy / jx) + (base - math.atan(y0 / x0))
    else:
        out = -jatan(jx / jy) + (base + math.atan(x0 / y0))
    out.c[0] = base
    return out
