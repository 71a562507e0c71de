"""Adaptive Simpson quadrature for smooth 1-D integrands."""

from __future__ import annotations

import bisect
import threading

from .errors import NumericalError


def adaptive_simpson(f, a, b, tol=1e-12, max_depth=40):
    """Integrate f over [a, b] by recursive interval bisection.

    Absolute tolerance; depth capped at max_depth (raises beyond it).
    """
    a = float(a)
    b = float(b)
    if a == b:
        return 0.0
    fa, fb = f(a), f(b)
    m = 0.5 * (a + b)
    fm = f(m)
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    return _simpson_rec(f, a, b, fa, fm, fb, whole, tol, max_depth)


def _simpson_rec(f, a, b, fa, fm, fb, whole, tol, depth):
    m = 0.5 * (a + b)
    lm = 0.5 * (a + m)
    rm = 0.5 * (m + b)
    flm, frm = f(lm), f(rm)
    left = (m - a) / 6.0 * (fa + 4.0 * flm + fm)
    right = (b - m) / 6.0 * (fm + 4.0 * frm + fb)
    delta = left + right - whole
    if abs(delta) <= 15.0 * tol:
        return left + right + delta / 15.0
    if depth <= 0:
        raise NumericalError(
            f"adaptive Simpson hit depth limit on [{a}, {b}]")
    half = 0.5 * tol
    return (_simpson_rec(f, a, m, fa, flm, fm, left, half, depth - 1)
            + _simpson_rec(f, m, b, fm, frm, fb, right, half, depth - 1))


class CumulativeIntegral:
    """Antiderivative F(x) = int_base^x f, evaluated incrementally.

    Repeated queries reuse the nearest previously computed anchor, so n
    scattered evaluations cost one short quadrature each instead of n
    full-interval ones.  A lock keeps concurrent use safe.
    """

    def __init__(self, f, base, tol=1e-12, max_depth=40):
        self.f = f
        self.tol = tol
        self.max_depth = max_depth
        self.xs = [float(base)]
        self.vals = [0.0]
        self._lock = threading.Lock()

    def value(self, x):
        x = float(x)
        with self._lock:
            i = bisect.bisect_left(self.xs, x)
            if i < len(self.xs) and self.xs[i] == x:
                return self.vals[i]
            # nearest existing anchor
            cand = []
            if i > 0:
                cand.append(i - 1)
            if i < len(self.xs):
                cand.append(i)
            j = min(cand, key=lambda k: abs(self.xs[k] - x))
            v = self.vals[j] + adaptive_simpson(
                self.f, self.xs[j], x, self.tol, self.max_depth)
            self.xs.insert(i, x)
            self.vals.insert(i, v)
            return v
