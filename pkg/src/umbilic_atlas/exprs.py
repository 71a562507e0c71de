"""Small math-expression language evaluated on order-3 jets.

Used by surface-definition files (immersion coordinates, abstract pair
coefficients, boundary curves).  Supports a one-variable definite
integral primitive whose value is computed by adaptive Simpson
quadrature and whose derivatives flow through the integration bounds
(fundamental theorem of calculus).

Operator precedence: power > unary minus > * / > + -.
"""

from __future__ import annotations

import math
import weakref
from dataclasses import dataclass, field

from .errors import (EvalDomainError, ExprArityError, ExprNameError,
                     ExprSyntaxError)
from .jets import (Jet3, compose_univariate, jatan, jatan2, jcos, jcosh,
                   jexp, jlog, jsin, jsinh, jsqrt, jtan)
from .quadrature import CumulativeIntegral

INTEGRAL_TOL = 1e-12
INTEGRAL_MAX_DEPTH = 40

_FUNCTIONS = {
    "sin": 1, "cos": 1, "tan": 1, "sinh": 1, "cosh": 1,
    "exp": 1, "log": 1, "sqrt": 1, "atan": 1, "atan2": 2,
}

_JET_FUNCS = {
    "sin": jsin, "cos": jcos, "tan": jtan, "sinh": jsinh, "cosh": jcosh,
    "exp": jexp, "log": jlog, "sqrt": jsqrt, "atan": jatan, "atan2": jatan2,
}

_SCALAR_FUNCS = {
    "sin": math.sin, "cos": math.cos, "tan": math.tan, "sinh": math.sinh,
    "cosh": math.cosh, "exp": math.exp, "atan": math.atan,
    "atan2": math.atan2,
}


# -- AST ----------------------------------------------------------------

@dataclass(frozen=True)
class Num:
    value: float
    span: tuple = field(default=(0, 0), compare=False)


@dataclass(frozen=True)
class Var:
    name: str
    span: tuple = field(default=(0, 0), compare=False)


@dataclass(frozen=True)
class Neg:
    arg: object
    span: tuple = field(default=(0, 0), compare=False)


@dataclass(frozen=True)
class BinOp:
    op: str
    lhs: object
    rhs: object
    span: tuple = field(default=(0, 0), compare=False)


@dataclass(frozen=True)
class Call:
    name: str
    args: tuple
    span: tuple = field(default=(0, 0), compare=False)


@dataclass(frozen=True)
class Integral:
    integrand: object
    var: str
    lower: object
    upper: object
    span: tuple = field(default=(0, 0), compare=False)


# -- tokenizer ----------------------------------------------------------

_SINGLE = set("+-*/^(),")


def _tokenize(src):
    tokens = []
    i, n = 0, len(src)
    while i < n:
        ch = src[i]
        if ch.isspace():
            i += 1
            continue
        if ch in _SINGLE:
            tokens.append((ch, ch, i))
            i += 1
            continue
        if ch.isdigit() or ch == ".":
            j = i
            while j < n and (src[j].isdigit() or src[j] == "."):
                j += 1
            if j < n and src[j] in "eE":
                k = j + 1
                if k < n and src[k] in "+-":
                    k += 1
                if k < n and src[k].isdigit():
                    j = k
                    while j < n and src[j].isdigit():
                        j += 1
            text = src[i:j]
            try:
                value = float(text)
            except ValueError:
                raise ExprSyntaxError(f"bad number '{text}'", i)
            tokens.append(("num", value, i))
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (src[j].isalnum() or src[j] == "_"):
                j += 1
            tokens.append(("ident", src[i:j], i))
            i = j
            continue
        raise ExprSyntaxError(f"unexpected character '{ch}'", i)
    tokens.append(("end", None, n))
    return tokens


# -- parser -------------------------------------------------------------

class _Parser:
    def __init__(self, src):
        self.src = src
        self.tokens = _tokenize(src)
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos]

    def next(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, kind):
        tok = self.next()
        if tok[0] != kind:
            raise ExprSyntaxError(
                f"expected '{kind}', found '{tok[1]}'" if tok[0] != "end"
                else f"expected '{kind}', found end of input", tok[2])
        return tok

    def parse(self):
        ast = self.expr()
        tok = self.peek()
        if tok[0] != "end":
            raise ExprSyntaxError(f"unexpected '{tok[1]}'", tok[2])
        return ast

    def expr(self):
        node = self.term()
        while self.peek()[0] in ("+", "-"):
            op, _, at = self.next()
            rhs = self.term()
            node = BinOp(op, node, rhs, (node.span[0], rhs.span[1]))
        return node

    def term(self):
        node = self.unary()
        while self.peek()[0] in ("*", "/"):
            op, _, at = self.next()
            rhs = self.unary()
            node = BinOp(op, node, rhs, (node.span[0], rhs.span[1]))
        return node

    def unary(self):
        tok = self.peek()
        if tok[0] == "-":
            self.next()
            arg = self.unary()
            return Neg(arg, (tok[2], arg.span[1]))
        if tok[0] == "+":
            self.next()
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[0] == "^":
            self.next()
            expo = self.unary()
            return BinOp("^", base, expo, (base.span[0], expo.span[1]))
        return base

    def atom(self):
        tok = self.next()
        kind, value, at = tok
        if kind == "num":
            return Num(value, (at, self.peek()[2]))
        if kind == "(":
            node = self.expr()
            self.expect(")")
            return node
        if kind == "ident":
            if self.peek()[0] != "(":
                return Var(value, (at, at + len(value)))
            self.next()
            if value == "integral":
                return self._integral(at)
            if value not in _FUNCTIONS:
                raise ExprNameError(f"unknown identifier '{value}'", at)
            args = [self.expr()]
            while self.peek()[0] == ",":
                self.next()
                args.append(self.expr())
            close = self.expect(")")
            if len(args) != _FUNCTIONS[value]:
                raise ExprArityError(
                    f"{value} takes {_FUNCTIONS[value]} argument(s), "
                    f"got {len(args)}", at)
            return Call(value, tuple(args), (at, close[2] + 1))
        if kind == "end":
            raise ExprSyntaxError("unexpected end of input", at)
        raise ExprSyntaxError(f"unexpected '{value}'", at)

    def _integral(self, at):
        integrand = self.expr()
        self.expect(",")
        var_tok = self.next()
        if var_tok[0] != "ident":
            raise ExprArityError(
                "integral's second argument must be the bound variable name",
                var_tok[2])
        self.expect(",")
        lower = self.expr()
        self.expect(",")
        upper = self.expr()
        close = self.expect(")")
        return Integral(integrand, var_tok[1], lower, upper,
                        (at, close[2] + 1))


def parse(src):
    """Parse expression text into an AST with source spans."""
    return _Parser(src).parse()


# -- printer ------------------------------------------------------------

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "neg": 3, "^": 4, "atom": 5}


def _prec(node):
    if isinstance(node, BinOp):
        return _PREC[node.op]
    if isinstance(node, Neg):
        return _PREC["neg"]
    return _PREC["atom"]


def to_source(node):
    """Print an AST back to expression text; parse(to_source(a)) == a."""
    if isinstance(node, Num):
        return repr(node.value)
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Neg):
        inner = to_source(node.arg)
        if _prec(node.arg) < _PREC["neg"]:
            inner = f"({inner})"
        return f"-{inner}"
    if isinstance(node, BinOp):
        lhs, rhs = to_source(node.lhs), to_source(node.rhs)
        p = _PREC[node.op]
        if node.op == "^":
            if _prec(node.lhs) <= p:
                lhs = f"({lhs})"
            if _prec(node.rhs) < _PREC["neg"]:
                rhs = f"({rhs})"
        else:
            if _prec(node.lhs) < p:
                lhs = f"({lhs})"
            if _prec(node.rhs) <= p:
                rhs = f"({rhs})"
        return f"{lhs}{node.op}{rhs}"
    if isinstance(node, Call):
        args = ", ".join(to_source(a) for a in node.args)
        return f"{node.name}({args})"
    if isinstance(node, Integral):
        return (f"integral({to_source(node.integrand)}, {node.var}, "
                f"{to_source(node.lower)}, {to_source(node.upper)})")
    raise TypeError(f"not an AST node: {node!r}")


def free_names(node, bound=frozenset()):
    """Free identifiers (integral bound variables excluded)."""
    if isinstance(node, Var):
        return set() if node.name in bound else {node.name}
    if isinstance(node, Neg):
        return free_names(node.arg, bound)
    if isinstance(node, BinOp):
        return free_names(node.lhs, bound) | free_names(node.rhs, bound)
    if isinstance(node, Call):
        out = set()
        for a in node.args:
            out |= free_names(a, bound)
        return out
    if isinstance(node, Integral):
        out = free_names(node.integrand, bound | {node.var})
        out |= free_names(node.lower, bound)
        out |= free_names(node.upper, bound)
        return out
    return set()


# -- evaluation ---------------------------------------------------------

def eval_jet(node, env):
    """Evaluate on jets. env maps identifier -> Jet3 | float."""
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Var):
        try:
            return env[node.name]
        except KeyError:
            raise ExprNameError(f"unbound identifier '{node.name}'",
                                node.span[0])
    if isinstance(node, Neg):
        return -eval_jet(node.arg, env)
    if isinstance(node, BinOp):
        a = eval_jet(node.lhs, env)
        b = eval_jet(node.rhs, env)
        if node.op == "+":
            return a + b
        if node.op == "-":
            return a - b
        if node.op == "*":
            return a * b
        if node.op == "/":
            if not isinstance(a, Jet3) and not isinstance(b, Jet3):
                if b == 0.0:
                    raise EvalDomainError("division by zero")
                return a / b
            return Jet3.lift(a) / b if not isinstance(a, Jet3) else a / b
        if node.op == "^":
            if isinstance(a, Jet3):
                return a ** b
            if isinstance(b, Jet3):
                return Jet3.lift(a) ** b
            return _scalar_pow(a, b)
        raise TypeError(node.op)
    if isinstance(node, Call):
        args = [eval_jet(a, env) for a in node.args]
        return _JET_FUNCS[node.name](*args)
    if isinstance(node, Integral):
        return _eval_integral(node, env)
    raise TypeError(f"not an AST node: {node!r}")


def eval_scalar(node, env):
    """Fast float-only evaluation (quadrature inner loops, oracles)."""
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Var):
        try:
            value = env[node.name]
        except KeyError:
            raise ExprNameError(f"unbound identifier '{node.name}'",
                                node.span[0])
        return value.c[0] if isinstance(value, Jet3) else value
    if isinstance(node, Neg):
        return -eval_scalar(node.arg, env)
    if isinstance(node, BinOp):
        a = eval_scalar(node.lhs, env)
        b = eval_scalar(node.rhs, env)
        if node.op == "+":
            return a + b
        if node.op == "-":
            return a - b
        if node.op == "*":
            return a * b
        if node.op == "/":
            if b == 0.0:
                raise EvalDomainError("division by zero")
            return a / b
        return _scalar_pow(a, b)
    if isinstance(node, Call):
        args = [eval_scalar(a, env) for a in node.args]
        if node.name == "sqrt":
            if args[0] < 0.0:
                raise EvalDomainError(f"sqrt of negative value {args[0]}")
            return math.sqrt(args[0])
        if node.name == "log":
            if args[0] <= 0.0:
                raise EvalDomainError(f"log of non-positive value {args[0]}")
            return math.log(args[0])
        return _SCALAR_FUNCS[node.name](*args)
    if isinstance(node, Integral):
        lo = eval_scalar(node.lower, env)
        hi = eval_scalar(node.upper, env)
        return _integral_value(node, env, lo, hi)
    raise TypeError(f"not an AST node: {node!r}")


def _scalar_pow(a, b):
    if a < 0.0 and not float(b).is_integer():
        raise EvalDomainError(f"non-integer power of negative base {a}")
    if a == 0.0 and b < 0.0:
        raise EvalDomainError("zero base with negative exponent")
    return a ** b


def _is_scalar_like(value):
    return not isinstance(value, Jet3) or all(x == 0.0 for x in value.c[1:])


# Per-node antiderivative caches: repeated evaluations of the same
# integral with the same scalar bindings reuse earlier quadrature work.
_INTEGRAL_CACHE = weakref.WeakKeyDictionary()
_FREE_NAME_CACHE = weakref.WeakKeyDictionary()


def _integrand_free_names(node):
    try:
        return _FREE_NAME_CACHE[node]
    except KeyError:
        names = tuple(sorted(free_names(node.integrand,
                                        frozenset({node.var}))))
        _FREE_NAME_CACHE[node] = names
        return names


def _integral_value(node, env, lo, hi):
    inner = {name: (value.c[0] if isinstance(value, Jet3) else value)
             for name, value in env.items()}
    key = (tuple((n, inner[n]) for n in _integrand_free_names(node)
                 if n in inner), float(lo))

    per_node = _INTEGRAL_CACHE.setdefault(node, {})
    cumulative = per_node.get(key)
    if cumulative is None:
        frozen = dict(inner)

        def integrand(r):
            frozen[node.var] = r
            return eval_scalar(node.integrand, frozen)

        cumulative = CumulativeIntegral(integrand, lo, INTEGRAL_TOL,
                                        INTEGRAL_MAX_DEPTH)
        per_node[key] = cumulative
    return cumulative.value(hi)


def _eval_integral(node, env):
    for name in free_names(node.integrand, bound=frozenset({node.var})):
        if name in env and not _is_scalar_like(env[name]):
            raise ExprNameError(
                "integral integrand may depend on seeded chart variables "
                f"only through its bounds; '{name}' carries derivatives",
                node.span[0])
    lower = eval_jet(node.lower, env)
    upper = eval_jet(node.upper, env)
    lo = lower.c[0] if isinstance(lower, Jet3) else lower
    hi = upper.c[0] if isinstance(upper, Jet3) else upper
    value = _integral_value(node, env, lo, hi)
    out = Jet3.constant(value)
    out = out + _ftc_terms(node, env, upper, hi)
    out = out - _ftc_terms(node, env, lower, lo)
    return out


def _ftc_terms(node, env, bound, b0):
    """Derivative contribution of one integration bound: compose the
    antiderivative's series (from integrand jets at b0) with the bound."""
    if not isinstance(bound, Jet3):
        return Jet3.constant(0.0)
    inner = {name: (value.c[0] if isinstance(value, Jet3) else value)
             for name, value in env.items()}
    inner[node.var] = Jet3.variable(b0, "u")
    phi = Jet3.lift(eval_jet(node.integrand, inner))
    t0, t1, t2 = phi.c[0], phi.c[1], phi.c[3]
    return compose_univariate([0.0, t0, t1 / 2.0, t2 / 3.0], bound)
