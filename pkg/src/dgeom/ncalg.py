"""Complex polynomials and the three star products.

Polynomials in commuting variables carry the algebra of a noncommutative
space through a deformed product: the canonical (constant theta) product,
a Lie-type product for linear commutation relations (exponential kernel
truncated at second order in the structure constants), and the quantum
plane product in two variables.  On polynomials the canonical series
terminates, so associativity and the coordinate commutation relations are
exact up to roundoff.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

import numpy as np

__all__ = [
    "Poly",
    "ThetaMatrix",
    "LieStructure",
    "moyal_star",
    "lie_star",
    "qplane_star",
    "star_commutator",
    "parse_poly",
]


class Poly:
    """Multivariate polynomial with complex coefficients.

    Immutable in spirit: operations return new instances; zero
    coefficients are never stored.  Exponent keys are integer tuples of
    length ``nvars``.
    """

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms: dict | None = None):
        self.nvars = nvars
        clean = {}
        for expo, coeff in (terms or {}).items():
            c = complex(coeff)
            if c != 0:
                clean[tuple(expo)] = c
        self.terms = clean

    # -- constructors ---------------------------------------------------

    @classmethod
    def zero(cls, nvars: int) -> "Poly":
        return cls(nvars, {})

    @classmethod
    def const(cls, value, nvars: int) -> "Poly":
        return cls(nvars, {tuple([0] * nvars): value})

    @classmethod
    def coordinate(cls, axis: int, nvars: int) -> "Poly":
        e = [0] * nvars
        e[axis] = 1
        return cls(nvars, {tuple(e): 1.0})

    # -- ring operations --------------------------------------------------

    def _check(self, other: "Poly"):
        if self.nvars != other.nvars:
            raise ValueError("polynomial variable counts disagree")

    def __add__(self, other):
        if not isinstance(other, Poly):
            other = Poly.const(other, self.nvars)
        self._check(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, 0) + c
        return Poly(self.nvars, out)

    __radd__ = __add__

    def __neg__(self):
        return Poly(self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        if not isinstance(other, Poly):
            other = Poly.const(other, self.nvars)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Poly):
            return Poly(self.nvars, {e: c * other for e, c in self.terms.items()})
        self._check(other)
        out: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                key = tuple(a + b for a, b in zip(e1, e2))
                out[key] = out.get(key, 0) + c1 * c2
        return Poly(self.nvars, out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = Poly.const(1.0, self.nvars)
        for _ in range(int(k)):
            out = out * self
        return out

    def __eq__(self, other):
        return isinstance(other, Poly) and self.nvars == other.nvars and self.terms == other.terms

    def __hash__(self):
        return hash((self.nvars, frozenset(self.terms.items())))

    # -- calculus and queries ----------------------------------------------

    def derivative(self, axis: int) -> "Poly":
        out = {}
        for e, c in self.terms.items():
            if e[axis] == 0:
                continue
            key = list(e)
            key[axis] -= 1
            out[tuple(key)] = out.get(tuple(key), 0) + c * e[axis]
        return Poly(self.nvars, out)

    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=0)

    def is_zero(self, tol: float = 0.0) -> bool:
        return all(abs(c) <= tol for c in self.terms.values())

    def conjugate(self) -> "Poly":
        return Poly(self.nvars, {e: c.conjugate() for e, c in self.terms.items()})

    def substitute(self, axis: int, value: complex) -> "Poly":
        """Fix one variable to a constant, dropping it from the ring."""
        out: dict = {}
        for e, c in self.terms.items():
            key = e[:axis] + e[axis + 1:]
            out[key] = out.get(key, 0) + c * value ** e[axis]
        return Poly(self.nvars - 1, out)

    def eval(self, point) -> complex:
        out = 0j
        for e, c in self.terms.items():
            out += c * math.prod(p**k for p, k in zip(point, e))
        return out

    def max_coeff_diff(self, other: "Poly") -> float:
        keys = set(self.terms) | set(other.terms)
        return max(
            (abs(self.terms.get(k, 0) - other.terms.get(k, 0)) for k in keys),
            default=0.0,
        )

    def __repr__(self):
        if not self.terms:
            return "0"
        bits = []
        for e in sorted(self.terms, key=lambda t: (sum(t), t)):
            c = self.terms[e]
            mono = "*".join(
                f"u{k + 1}" + (f"^{p}" if p > 1 else "")
                for k, p in enumerate(e)
                if p > 0
            )
            bits.append(f"({c.real:g}{c.imag:+g}i)" + ("*" + mono if mono else ""))
        return " + ".join(bits)


@dataclass(frozen=True)
class ThetaMatrix:
    """Real antisymmetric deformation matrix for the canonical product."""

    theta: np.ndarray

    def __post_init__(self):
        th = np.asarray(self.theta, dtype=np.float64)
        if th.ndim != 2 or th.shape[0] != th.shape[1]:
            raise ValueError("theta must be square")
        if np.max(np.abs(th + th.T)) > 1e-13:
            raise ValueError("theta must be antisymmetric")
        object.__setattr__(self, "theta", th)

    @property
    def n(self) -> int:
        return self.theta.shape[0]

    def scaled(self, s: float) -> "ThetaMatrix":
        return ThetaMatrix(self.theta * s)


class LieStructure:
    """Structure constants f^{ab}_c with [I^a, I^b] = i f^{ab}_c I^c.

    The array layout is f[a, b, c].  Antisymmetry in (a, b) and the Jacobi
    identity are validated on construction.
    """

    def __init__(self, f: np.ndarray):
        f = np.asarray(f, dtype=np.float64)
        if f.ndim != 3 or len({*f.shape}) != 1:
            raise ValueError("structure constants must be S x S x S")
        if np.max(np.abs(f + f.transpose(1, 0, 2))) > 1e-12:
            raise ValueError("structure constants must be antisymmetric")
        jac = np.einsum("abe,ecd->abcd", f, f)
        jacobi = jac + np.einsum("bce,ead->abcd", f, f) + np.einsum("cae,ebd->abcd", f, f)
        if np.max(np.abs(jacobi)) > 1e-12:
            raise ValueError(
                f"Jacobi identity violated (residual {np.max(np.abs(jacobi)):.2e})"
            )
        self.f = f

    @property
    def dim(self) -> int:
        return self.f.shape[0]

    @property
    def jacobi_residual(self) -> float:
        f = self.f
        jac = (
            np.einsum("abe,ecd->abcd", f, f)
            + np.einsum("bce,ead->abcd", f, f)
            + np.einsum("cae,ebd->abcd", f, f)
        )
        return float(np.max(np.abs(jac)))

    @classmethod
    def from_matrices(cls, mats) -> "LieStructure":
        """Structure constants of real matrix generators with
        [M_a, M_b] = f^{ab}_c M_c (closure is solved by least squares and
        verified)."""
        mats = [np.asarray(M, dtype=np.float64) for M in mats]
        S = len(mats)
        basis = np.stack([M.ravel() for M in mats], axis=1)
        f = np.zeros((S, S, S))
        for a in range(S):
            for b in range(S):
                comm = (mats[a] @ mats[b] - mats[b] @ mats[a]).ravel()
                coeffs, *_ = np.linalg.lstsq(basis, comm, rcond=None)
                resid = basis @ coeffs - comm
                if np.max(np.abs(resid)) > 1e-10:
                    raise ValueError("generators do not close under commutation")
                f[a, b] = coeffs
        return cls(f)

    @classmethod
    def su2(cls) -> "LieStructure":
        eps = np.zeros((3, 3, 3))
        for a, b, c in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
            eps[a, b, c] = 1.0
            eps[b, a, c] = -1.0
        return cls(eps)

    @classmethod
    def heisenberg(cls, theta: ThetaMatrix) -> "LieStructure":
        """Central extension encoding a constant theta: S = n + 1 with
        f^{ij}_central = theta^{ij} and the central element commuting."""
        n = theta.n
        f = np.zeros((n + 1, n + 1, n + 1))
        f[:n, :n, n] = theta.theta
        return cls(f)


def moyal_star(f: Poly, g: Poly, theta: ThetaMatrix) -> Poly:
    """Canonical star product; a finite sum for polynomials, exact.

    The bidifferential series is enumerated over multiplicity assignments
    to the nonzero theta entries, so each derivative pair is formed once.
    """
    if f.nvars != g.nvars:
        raise ValueError("polynomial variable counts disagree")
    if theta.n != f.nvars:
        raise ValueError("theta size does not match the variable count")
    th = theta.theta
    nz = [(i, j) for i in range(theta.n) for j in range(theta.n) if th[i, j] != 0.0]
    acc: dict = {}

    def add(poly: Poly, coeff: complex):
        for e, c in poly.terms.items():
            acc[e] = acc.get(e, 0) + c * coeff

    def rec(slot: int, fp: Poly, gp: Poly, coeff: complex):
        if slot == len(nz):
            add(fp * gp, coeff)
            return
        i, j = nz[slot]
        rec(slot + 1, fp, gp, coeff)
        m = 1
        while True:
            fp = fp.derivative(i)
            if not fp.terms:
                return
            gp = gp.derivative(j)
            if not gp.terms:
                return
            coeff = coeff * 0.5j * th[i, j] / m
            rec(slot + 1, fp, gp, coeff)
            m += 1

    rec(0, f, g, 1.0 + 0j)
    return Poly(f.nvars, acc)


def lie_star(f: Poly, g: Poly, L: LieStructure, order: int = 2) -> Poly:
    """Lie-type star product from the exponential kernel, truncated at
    ``order`` (at most 2) in the structure constants.

    The first correction is (i/2) u^n f^{ij}_n d_i f d_j g; the second
    order carries the cubic kernel term and the square of the first.
    """
    if order < 0 or order > 2:
        raise ValueError("lie_star truncation order must be 0, 1 or 2")
    if f.nvars != g.nvars or f.nvars != L.dim:
        raise ValueError("variable counts disagree with the Lie structure")
    n = L.dim
    fc = L.f
    out = f * g
    if order >= 1:
        for nn in range(n):
            acc = Poly.zero(n)
            for i in range(n):
                df = f.derivative(i)
                if not df.terms:
                    continue
                for j in range(n):
                    if fc[i, j, nn] == 0.0:
                        continue
                    acc = acc + (df * g.derivative(j)) * fc[i, j, nn]
            out = out + Poly.coordinate(nn, n) * acc * 0.5j
    if order >= 2:
        # kernel term: -(1/12) u^n f^{ij}_m f^{mk}_n (d_i f d_jk g - d_ik f d_j g)
        for nn in range(n):
            acc = Poly.zero(n)
            for i in range(n):
                for j in range(n):
                    for kk in range(n):
                        c = float(np.dot(fc[i, j, :], fc[:, kk, nn]))
                        if c == 0.0:
                            continue
                        t1 = f.derivative(i) * g.derivative(j).derivative(kk)
                        t2 = f.derivative(i).derivative(kk) * g.derivative(j)
                        acc = acc + (t1 - t2) * c
            out = out - Poly.coordinate(nn, n) * acc * (1.0 / 12.0)
        # square of the first-order kernel:
        # -(1/8) u^n u^m f^{ij}_n f^{kl}_m d_ik f d_jl g
        for nn in range(n):
            for mm in range(n):
                acc = Poly.zero(n)
                for i in range(n):
                    for j in range(n):
                        if fc[i, j, nn] == 0.0:
                            continue
                        for kk in range(n):
                            for ll in range(n):
                                if fc[kk, ll, mm] == 0.0:
                                    continue
                                t = f.derivative(i).derivative(kk) * g.derivative(j).derivative(ll)
                                acc = acc + t * (fc[i, j, nn] * fc[kk, ll, mm])
                if acc.terms:
                    out = out - Poly.coordinate(nn, n) * Poly.coordinate(mm, n) * acc * 0.125
    return out


def qplane_star(f: Poly, g: Poly, q: complex) -> Poly:
    """Quantum-plane product in two variables.

    Products are normal-ordered to u-before-v with the reordering rule
    v u = q^{-1} u v; on monomials u^a v^b * u^c v^d = q^{-bc} u^{a+c} v^{b+d}.
    """
    if f.nvars != 2 or g.nvars != 2:
        raise ValueError("the quantum-plane product takes polynomials in (u, v)")
    q = complex(q)
    if q == 0:
        raise ValueError("q must be nonzero")
    out: dict = {}
    for (a, b), c1 in f.terms.items():
        for (c, dd), c2 in g.terms.items():
            key = (a + c, b + dd)
            out[key] = out.get(key, 0) + c1 * c2 * q ** (-b * c)
    return Poly(2, out)


def star_commutator(f: Poly, g: Poly, product: str, **params) -> Poly:
    """f * g - g * f under the named product ("moyal", "lie", "qplane")."""
    if product == "moyal":
        theta = params["theta"]
        return moyal_star(f, g, theta) - moyal_star(g, f, theta)
    if product == "lie":
        L = params["structure"]
        order = params.get("order", 1)
        return lie_star(f, g, L, order) - lie_star(g, f, L, order)
    if product == "qplane":
        q = params["q"]
        return qplane_star(f, g, q) - qplane_star(g, f, q)
    raise ValueError(f"unknown star product {product!r}")


# -- polynomial literals ------------------------------------------------

_POLY_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<ident>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^()]))"
)


def parse_poly(src: str, nvars: int) -> Poly:
    """Parse a polynomial literal in u1..uN with complex coefficients.

    ``i`` is the imaginary unit; division is allowed by constants only,
    e.g. "(1+2i)*u1^2*u2 - u3/2".
    """
    tokens = []
    pos = 0
    while pos < len(src):
        m = _POLY_TOKEN.match(src, pos)
        if m is None or m.end() == pos:
            rest = src[pos:].lstrip()
            if not rest:
                break
            raise ValueError(f"unexpected character {rest[0]!r} in polynomial")
        pos = m.end()
        if m.group("num"):
            tokens.append(("num", m.group("num")))
        elif m.group("ident"):
            tokens.append(("ident", m.group("ident")))
        else:
            tokens.append(("op", m.group("op")))
    tokens.append(("end", ""))

    state = {"k": 0}

    def peek():
        return tokens[state["k"]]

    def advance():
        tok = tokens[state["k"]]
        state["k"] += 1
        return tok

    def expression():
        node = term()
        while peek() == ("op", "+") or peek() == ("op", "-"):
            _, op = advance()
            rhs = term()
            node = node + rhs if op == "+" else node - rhs
        return node

    def term():
        node = unary()
        while peek()[0] == "op" and peek()[1] in "*/":
            _, op = advance()
            rhs = unary()
            if op == "*":
                node = node * rhs
            else:
                if rhs.degree() > 0:
                    raise ValueError("polynomial division only by constants")
                node = node * (1.0 / rhs.terms.get(tuple([0] * nvars), 0))
        return node

    def unary():
        if peek() == ("op", "-"):
            advance()
            return -unary()
        if peek() == ("op", "+"):
            advance()
            return unary()
        return power()

    def power():
        base = atom()
        if peek() == ("op", "^"):
            advance()
            kind, text = advance()
            if kind != "num" or float(text) != int(float(text)) or float(text) < 0:
                raise ValueError("polynomial exponents must be non-negative integers")
            return base ** int(float(text))
        return base

    def atom():
        kind, text = advance()
        if kind == "num":
            # 2i style literals arrive as NUM IDENT; handled below via ident
            if peek() == ("ident", "i"):
                advance()
                return Poly.const(complex(0, float(text)), nvars)
            return Poly.const(float(text), nvars)
        if kind == "ident":
            if text == "i":
                return Poly.const(1j, nvars)
            m = re.fullmatch(r"u(\d+)", text)
            if m and 1 <= int(m.group(1)) <= nvars:
                return Poly.coordinate(int(m.group(1)) - 1, nvars)
            raise ValueError(f"unknown symbol {text!r} in polynomial")
        if kind == "op" and text == "(":
            node = expression()
            if advance() != ("op", ")"):
                raise ValueError("unbalanced parenthesis in polynomial")
            return node
        raise ValueError("unexpected end of polynomial" if kind == "end" else f"unexpected {text!r}")

    out = expression()
    if peek()[0] != "end":
        raise ValueError(f"trailing input in polynomial: {peek()[1]!r}")
    return out
