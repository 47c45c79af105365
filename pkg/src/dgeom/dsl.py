"""Expression DSL for scalar fields over bundle coordinates.

Fields are written in the coordinates ``x1..xn`` (base) and ``y1..ym``
(fiber) with the usual arithmetic operators, integer powers and the
functions ``sin cos tan exp log sqrt``.  A parsed :class:`ScalarField`
evaluates to a float or to a :class:`~dgeom.jets.Jet` carrying all partial
derivatives up to a requested order.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

import numpy as np

from .jets import Jet, JetDomainError, JetOrderError, MAX_EVAL_ORDER

__all__ = [
    "BundleShape",
    "ScalarField",
    "JetField",
    "parse_field",
    "eval_jet",
    "DslError",
    "ParseError",
    "UnknownSymbolError",
    "ArityError",
    "EvalDomainError",
]


class DslError(ValueError):
    """Base class for parse-time diagnostics; carries a source position."""

    def __init__(self, message: str, position: int | None = None):
        self.position = position
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)


class ParseError(DslError):
    pass


class UnknownSymbolError(DslError):
    def __init__(self, name: str, position: int | None = None):
        self.name = name
        super().__init__(f"unknown symbol '{name}'", position)


class ArityError(DslError):
    pass


class EvalDomainError(ArithmeticError):
    """A field left its domain during evaluation."""


@dataclass(frozen=True)
class BundleShape:
    """Dimensions (n, m) of base and fiber; total dimension d = n + m <= 6."""

    n: int
    m: int

    def __post_init__(self):
        if self.n < 1 or self.m < 1:
            raise ValueError("bundle shape requires n >= 1 and m >= 1")
        if self.n + self.m > 6:
            raise ValueError("supported range is n + m <= 6")

    @property
    def d(self) -> int:
        return self.n + self.m

    def var_names(self) -> list[str]:
        return [f"x{i + 1}" for i in range(self.n)] + [
            f"y{a + 1}" for a in range(self.m)
        ]


_FUNCTIONS = {"sin": 1, "cos": 1, "tan": 1, "exp": 1, "log": 1, "sqrt": 1}

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<ident>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^(),]))"
)


def _tokenize(src: str):
    tokens = []
    pos = 0
    while pos < len(src):
        m = _TOKEN_RE.match(src, pos)
        if m is None or m.end() == pos:
            stripped = src[pos:].lstrip()
            if not stripped:
                break
            at = len(src) - len(stripped)
            raise ParseError(f"unexpected character {src[at]!r}", at)
        pos = m.end()
        if m.group("num") is not None:
            tokens.append(("num", m.group("num"), m.start("num")))
        elif m.group("ident") is not None:
            tokens.append(("ident", m.group("ident"), m.start("ident")))
        else:
            tokens.append(("op", m.group("op"), m.start("op")))
    tokens.append(("end", "", len(src)))
    return tokens


class _Parser:
    """Recursive-descent parser producing a tuple AST.

    Nodes: ('num', v) ('var', axis) ('call', name, arg)
           ('+'|'-'|'*'|'/', a, b) ('neg', a) ('pow', a, int_exponent)
    """

    def __init__(self, src: str, shape: BundleShape):
        self.tokens = _tokenize(src)
        self.k = 0
        self.shape = shape
        self.vars = {name: axis for axis, name in enumerate(shape.var_names())}

    def peek(self):
        return self.tokens[self.k]

    def advance(self):
        tok = self.tokens[self.k]
        self.k += 1
        return tok

    def expect_op(self, op: str):
        kind, text, pos = self.peek()
        if kind != "op" or text != op:
            raise ParseError(f"expected '{op}'", pos)
        return self.advance()

    def parse(self):
        node = self.expression()
        kind, text, pos = self.peek()
        if kind != "end":
            raise ParseError(f"unexpected token {text!r}", pos)
        return node

    def expression(self):
        node = self.term()
        while True:
            kind, text, _ = self.peek()
            if kind == "op" and text in "+-":
                self.advance()
                node = (text, node, self.term())
            else:
                return node

    def term(self):
        node = self.unary()
        while True:
            kind, text, _ = self.peek()
            if kind == "op" and text in "*/":
                self.advance()
                node = (text, node, self.unary())
            else:
                return node

    def unary(self):
        kind, text, _ = self.peek()
        if kind == "op" and text == "-":
            self.advance()
            return ("neg", self.unary())
        if kind == "op" and text == "+":
            self.advance()
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        kind, text, pos = self.peek()
        if kind == "op" and text == "^":
            self.advance()
            return ("pow", base, self.int_exponent())
        return base

    def int_exponent(self) -> int:
        sign = 1
        kind, text, pos = self.peek()
        if kind == "op" and text == "-":
            self.advance()
            sign = -1
        kind, text, pos = self.peek()
        if kind != "num":
            raise ParseError("exponent must be an integer literal", pos)
        self.advance()
        val = float(text)
        if val != int(val):
            raise ParseError("exponent must be an integer", pos)
        return sign * int(val)

    def atom(self):
        kind, text, pos = self.advance()
        if kind == "num":
            return ("num", float(text))
        if kind == "ident":
            if text in _FUNCTIONS:
                self.expect_op("(")
                arg = self.expression()
                k2, t2, p2 = self.peek()
                if k2 == "op" and t2 == ",":
                    raise ArityError(f"'{text}' takes exactly one argument", p2)
                self.expect_op(")")
                return ("call", text, arg)
            if text in self.vars:
                return ("var", self.vars[text])
            raise UnknownSymbolError(text, pos)
        if kind == "op" and text == "(":
            node = self.expression()
            self.expect_op(")")
            return node
        raise ParseError(f"unexpected token {text!r}" if text else "unexpected end of input", pos)


def _eval_float(node, u: np.ndarray) -> float:
    op = node[0]
    if op == "num":
        return node[1]
    if op == "var":
        return float(u[node[1]])
    if op == "neg":
        return -_eval_float(node[1], u)
    if op == "+":
        return _eval_float(node[1], u) + _eval_float(node[2], u)
    if op == "-":
        return _eval_float(node[1], u) - _eval_float(node[2], u)
    if op == "*":
        return _eval_float(node[1], u) * _eval_float(node[2], u)
    if op == "/":
        b = _eval_float(node[2], u)
        if abs(b) < 1e-300:
            raise EvalDomainError("division by zero")
        return _eval_float(node[1], u) / b
    if op == "pow":
        return _eval_float(node[1], u) ** node[2]
    if op == "call":
        x = _eval_float(node[2], u)
        name = node[1]
        if name == "sqrt" and x < 0:
            raise EvalDomainError(f"sqrt of negative value {x}")
        if name == "log" and x <= 0:
            raise EvalDomainError(f"log of non-positive value {x}")
        return getattr(math, name)(x)
    raise AssertionError(f"bad node {node!r}")


def _eval_jet(node, seeds: list[Jet]) -> Jet:
    op = node[0]
    if op == "num":
        ref = seeds[0]
        return Jet.constant(node[1], ref.dim, ref.order)
    if op == "var":
        return seeds[node[1]]
    if op == "neg":
        return -_eval_jet(node[1], seeds)
    if op in "+-*/":
        a = _eval_jet(node[1], seeds)
        b = _eval_jet(node[2], seeds)
        try:
            return {"+": a.__add__, "-": a.__sub__, "*": a.__mul__, "/": a.__truediv__}[op](b)
        except JetDomainError as exc:
            raise EvalDomainError(str(exc)) from exc
    if op == "pow":
        try:
            return _eval_jet(node[1], seeds) ** node[2]
        except JetDomainError as exc:
            raise EvalDomainError(str(exc)) from exc
    if op == "call":
        arg = _eval_jet(node[2], seeds)
        try:
            return getattr(arg, node[1])()
        except JetDomainError as exc:
            raise EvalDomainError(str(exc)) from exc
    raise AssertionError(f"bad node {node!r}")


class ScalarField:
    """A parsed scalar field over the coordinates of a bundle.

    Instances are immutable and shareable; evaluation is pure.  ``field(u)``
    returns the value at a point, ``field.jet(u, order)`` the truncated
    Taylor expansion with all partials up to ``order``.
    """

    __slots__ = ("shape", "source", "_ast")

    def __init__(self, shape: BundleShape, source: str, ast):
        self.shape = shape
        self.source = source
        self._ast = ast

    @classmethod
    def constant(cls, value: float, shape: BundleShape) -> "ScalarField":
        return cls(shape, repr(float(value)), ("num", float(value)))

    def __call__(self, u) -> float:
        u = np.asarray(u, dtype=np.float64)
        if u.shape != (self.shape.d,):
            raise ValueError(f"point must have {self.shape.d} coordinates")
        return _eval_float(self._ast, u)

    def jet(self, u, order: int) -> Jet:
        if order < 0 or order > MAX_EVAL_ORDER:
            raise JetOrderError(
                f"jet order {order} outside supported range 0..{MAX_EVAL_ORDER}"
            )
        return self._jet_unchecked(u, order)

    def _jet_unchecked(self, u, order: int) -> Jet:
        u = np.asarray(u, dtype=np.float64)
        if u.shape != (self.shape.d,):
            raise ValueError(f"point must have {self.shape.d} coordinates")
        seeds = Jet.seed_point(u, order)
        return _eval_jet(self._ast, seeds)

    def to_source(self) -> str:
        """Fully parenthesized rendering that re-parses to the same field."""
        names = self.shape.var_names()

        def render(node) -> str:
            op = node[0]
            if op == "num":
                return repr(node[1])
            if op == "var":
                return names[node[1]]
            if op == "neg":
                return f"(-{render(node[1])})"
            if op == "pow":
                return f"({render(node[1])}^{node[2]})"
            if op == "call":
                return f"{node[1]}({render(node[2])})"
            return f"({render(node[1])} {op} {render(node[2])})"

        return render(self._ast)

    def __repr__(self):
        return f"ScalarField({self.source!r}, shape=({self.shape.n},{self.shape.m}))"


class JetField:
    """Field-like adapter around a jet-producing callable.

    Used for fields that are computed by a pipeline rather than parsed from
    text (Finsler metrics, geometry-backed gauge potentials).  The callable
    receives ``(u, order)`` and returns a :class:`Jet`.
    """

    __slots__ = ("shape", "_fn")

    def __init__(self, shape: BundleShape, fn):
        self.shape = shape
        self._fn = fn

    def __call__(self, u) -> float:
        return self._fn(np.asarray(u, dtype=np.float64), 0).value

    def jet(self, u, order: int) -> Jet:
        return self._fn(np.asarray(u, dtype=np.float64), order)

    _jet_unchecked = jet


def parse_field(src: str, shape: BundleShape) -> ScalarField:
    """Parse ``src`` into a :class:`ScalarField` over ``shape``.

    Raises :class:`ParseError`, :class:`UnknownSymbolError` or
    :class:`ArityError` with the offending source position.
    """
    if isinstance(shape, tuple):
        shape = BundleShape(*shape)
    ast = _Parser(src, shape).parse()
    return ScalarField(shape, src, ast)


def eval_jet(field: ScalarField, u, order: int) -> Jet:
    """Evaluate ``field`` at ``u`` with all partial derivatives up to
    ``order`` (capped at 4)."""
    return field.jet(u, order)
