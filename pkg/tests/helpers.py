"""Shared test oracles: Richardson finite differences and a random
expression generator.  These stay independent of the jet propagation
they are used to check."""

from __future__ import annotations

import random

from umbilic_atlas import exprs
from umbilic_atlas.exprs import BinOp, Call, Integral, Neg, Num, Var

# step sizes per derivative order; third-order stencils need a larger
# step to keep roundoff below the comparison tolerances
H1 = 1e-3
H2 = 2e-3
H3 = 1e-2


def _richardson(d, h):
    return (4.0 * d(h / 2.0) - d(h)) / 3.0


def fd_derivatives(f, u, v):
    """Estimate all partials of f(u, v) through order 3.

    Central differences with one Richardson refinement step; returns a
    dict keyed by multi-index (i, j).
    """
    out = {(0, 0): f(u, v)}

    out[(1, 0)] = _richardson(
        lambda h: (f(u + h, v) - f(u - h, v)) / (2 * h), H1)
    out[(0, 1)] = _richardson(
        lambda h: (f(u, v + h) - f(u, v - h)) / (2 * h), H1)

    out[(2, 0)] = _richardson(
        lambda h: (f(u + h, v) - 2 * f(u, v) + f(u - h, v)) / h**2, H2)
    out[(0, 2)] = _richardson(
        lambda h: (f(u, v + h) - 2 * f(u, v) + f(u, v - h)) / h**2, H2)
    out[(1, 1)] = _richardson(
        lambda h: (f(u + h, v + h) - f(u + h, v - h)
                   - f(u - h, v + h) + f(u - h, v - h)) / (4 * h**2), H2)

    def d3(g):
        return _richardson(
            lambda h: (g(2 * h) - 2 * g(h) + 2 * g(-h) - g(-2 * h))
            / (2 * h**3), H3)

    out[(3, 0)] = d3(lambda h: f(u + h, v))
    out[(0, 3)] = d3(lambda h: f(u, v + h))

    def mixed(du_count):
        # d/du^2 d/dv or d/du d/dv^2 via nested central stencils
        def inner(h):
            if du_count == 2:
                def fuu(vv):
                    return (f(u + h, vv) - 2 * f(u, vv) + f(u - h, vv)) / h**2
                return (fuu(v + h) - fuu(v - h)) / (2 * h)
            def fvv(uu):
                return (f(uu, v + h) - 2 * f(uu, v) + f(uu, v - h)) / h**2
            return (fvv(u + h) - fvv(u - h)) / (2 * h)
        return _richardson(inner, H3)

    out[(2, 1)] = mixed(2)
    out[(1, 2)] = mixed(1)
    return out


def fd_gradient(f, u, v, h=1e-5):
    gu = (f(u + h, v) - f(u - h, v)) / (2 * h)
    gv = (f(u, v + h) - f(u, v - h)) / (2 * h)
    return gu, gv


# -- random expression generator -----------------------------------------

_LEAF_NAMES = ["u", "v", "a", "b"]


def _gen_node(rng, depth):
    if depth <= 0:
        kind = rng.random()
        if kind < 0.45:
            return Var(rng.choice(_LEAF_NAMES))
        return Num(round(rng.uniform(0.3, 2.4), 3))
    roll = rng.random()
    child = depth - 1
    if roll < 0.16:
        return BinOp("+", _gen_node(rng, child), _gen_node(rng, child))
    if roll < 0.30:
        return BinOp("-", _gen_node(rng, child), _gen_node(rng, child))
    if roll < 0.46:
        return BinOp("*", _gen_node(rng, child), _gen_node(rng, child))
    if roll < 0.54:
        # guarded denominator keeps evaluation away from poles
        denom = BinOp("+", Num(1.5),
                      BinOp("*", _gen_node(rng, child), Num(0.25)))
        return BinOp("/", _gen_node(rng, child), Call("cosh", (denom,)))
    if roll < 0.62:
        return Call(rng.choice(["sin", "cos"]), (_gen_node(rng, child),))
    if roll < 0.68:
        return Call("exp", (BinOp("*", Num(0.3), _gen_node(rng, child)),))
    if roll < 0.74:
        return Call("sqrt",
                    (BinOp("+", Num(1.2),
                           BinOp("^", _gen_node(rng, child), Num(2.0))),))
    if roll < 0.80:
        return Call("log",
                    (BinOp("+", Num(2.0),
                           Call("sin", (_gen_node(rng, child),))),))
    if roll < 0.85:
        return Call("atan2",
                    (_gen_node(rng, child),
                     BinOp("+", Num(2.0),
                           Call("sin", (_gen_node(rng, child),)))))
    if roll < 0.90:
        return BinOp("^", Call("cosh", (BinOp("*", Num(0.4),
                                              _gen_node(rng, child)),)),
                     Num(float(rng.choice([2, 3]))))
    if roll < 0.95:
        return Neg(_gen_node(rng, child))
    upper = BinOp("*", Num(0.8), _gen_node(rng, child))
    integrand = BinOp("+", Num(1.0),
                      BinOp("*", Num(0.4), Call("cos", (Var("w"),))))
    return Integral(integrand, "w", Num(0.0), upper)


def random_expression(rng: random.Random, max_depth=6, check_env=None):
    """Generate a random AST that evaluates safely (bounded, no domain
    errors) at the probe environment."""
    while True:
        depth = rng.randint(1, max_depth)
        node = _gen_node(rng, depth)
        if check_env is None:
            return node
        try:
            value = exprs.eval_jet(node, dict(check_env))
        except Exception:
            continue
        coeffs = value.c if hasattr(value, "c") else [value]
        if all(abs(x) < 1e4 for x in coeffs):
            return node
