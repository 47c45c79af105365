"""Truncated multivariate Taylor arithmetic (forward-mode jets).

A :class:`Jet` stores the Taylor coefficients of a scalar function at a
point, truncated at a fixed total degree.  All arithmetic is exact on the
retained coefficients, so derivatives of polynomial data are exact to
roundoff and derivatives of transcendental expressions are exact at the
expansion point.  Jets are the single derivative engine of the package:
every adapted-frame derivative, connection coefficient and curvature
component is obtained by running plain formulas on jet-valued entries.

Conventions
-----------
Coefficients are indexed by multi-indices ``beta`` over ``dim`` variables
with ``|beta| <= order``, listed degree-major and lexicographic within a
degree.  The stored number for ``beta`` is the Taylor coefficient
``D^beta f / beta!``; :meth:`Jet.derivative` rescales to the raw partial
derivative.
"""

from __future__ import annotations

import itertools
import math
from functools import lru_cache

import numpy as np

__all__ = [
    "Jet",
    "JetDomainError",
    "JetOrderError",
    "MAX_EVAL_ORDER",
    "multi_indices",
    "index_position",
    "inv_jet_matrix",
    "det_jet_value",
]

# Cap for user-facing evaluation requests; internal pipelines may build
# deeper tables (the index machinery is order-generic).
MAX_EVAL_ORDER = 4


class JetDomainError(ArithmeticError):
    """A function left its domain during jet evaluation (sqrt of a
    negative value, log of a non-positive value, division by ~0)."""


class JetOrderError(ValueError):
    """Requested truncation order outside the supported range."""


@lru_cache(maxsize=None)
def multi_indices(dim: int, order: int) -> tuple[tuple[int, ...], ...]:
    """All multi-indices with ``|beta| <= order``, degree-major then lex.

    The listing for order ``k`` is a prefix of the listing for ``k+1``,
    which makes truncation a slice.
    """
    out: list[tuple[int, ...]] = []
    for deg in range(order + 1):
        level = []
        for bars in itertools.combinations(range(deg + dim - 1), dim - 1):
            comp = []
            prev = -1
            for b in bars:
                comp.append(b - prev - 1)
                prev = b
            comp.append(deg + dim - 2 - prev)
            level.append(tuple(comp))
        out.extend(sorted(level))
    return tuple(out)


@lru_cache(maxsize=None)
def index_position(dim: int, order: int) -> dict[tuple[int, ...], int]:
    return {beta: k for k, beta in enumerate(multi_indices(dim, order))}


@lru_cache(maxsize=None)
def _product_table(dim: int, order: int):
    """Index triples (i, j, k) with beta_i + beta_j = beta_k, all degrees <= order."""
    idx = multi_indices(dim, order)
    pos = index_position(dim, order)
    ii, jj, kk = [], [], []
    for i, a in enumerate(idx):
        da = sum(a)
        for j, b in enumerate(idx):
            if da + sum(b) > order:
                continue
            ii.append(i)
            jj.append(j)
            kk.append(pos[tuple(x + y for x, y in zip(a, b))])
    return (
        np.asarray(ii, dtype=np.intp),
        np.asarray(jj, dtype=np.intp),
        np.asarray(kk, dtype=np.intp),
    )


@lru_cache(maxsize=None)
def _partial_table(dim: int, order: int, axis: int):
    """Source positions and factors mapping a jet to its ``axis`` partial.

    Target coefficients live at order - 1; for target index beta the source
    is beta + e_axis and the factor is beta[axis] + 1 (Taylor rescaling).
    """
    tgt = multi_indices(dim, order - 1)
    pos = index_position(dim, order)
    src = np.empty(len(tgt), dtype=np.intp)
    fac = np.empty(len(tgt), dtype=np.float64)
    for k, beta in enumerate(tgt):
        up = list(beta)
        up[axis] += 1
        src[k] = pos[tuple(up)]
        fac[k] = beta[axis] + 1
    return src, fac


@lru_cache(maxsize=None)
def _factorials(dim: int, order: int) -> np.ndarray:
    idx = multi_indices(dim, order)
    return np.asarray(
        [math.prod(math.factorial(b) for b in beta) for beta in idx], dtype=np.float64
    )


class Jet:
    """Taylor expansion of a scalar function, truncated at ``order``.

    Supports ``+ - * / **`` with other jets and plain numbers, the
    elementary functions used by the expression DSL, extraction of partial
    derivatives, and truncation.  Binary operations between jets of
    different orders truncate to the lower order.
    """

    __slots__ = ("dim", "order", "c")

    def __init__(self, dim: int, order: int, coeffs: np.ndarray):
        self.dim = dim
        self.order = order
        self.c = coeffs

    # -- constructors -------------------------------------------------

    @classmethod
    def constant(cls, value: float, dim: int, order: int) -> "Jet":
        c = np.zeros(len(multi_indices(dim, order)))
        c[0] = value
        return cls(dim, order, c)

    @classmethod
    def variable(cls, value: float, axis: int, dim: int, order: int) -> "Jet":
        c = np.zeros(len(multi_indices(dim, order)))
        c[0] = value
        if order >= 1:
            e = tuple(1 if k == axis else 0 for k in range(dim))
            c[index_position(dim, order)[e]] = 1.0
        return cls(dim, order, c)

    @classmethod
    def seed_point(cls, u, order: int) -> list["Jet"]:
        """Coordinate jets for a point ``u`` (one jet per coordinate)."""
        u = np.asarray(u, dtype=np.float64)
        d = len(u)
        return [cls.variable(u[k], k, d, order) for k in range(d)]

    # -- basic queries -------------------------------------------------

    @property
    def value(self) -> float:
        return float(self.c[0])

    def derivative(self, beta) -> float:
        """Raw partial derivative ``D^beta f`` at the expansion point."""
        beta = tuple(beta)
        if sum(beta) > self.order:
            raise JetOrderError(f"multi-index {beta} exceeds jet order {self.order}")
        k = index_position(self.dim, self.order)[beta]
        return float(self.c[k] * _factorials(self.dim, self.order)[k])

    def coefficients(self) -> dict[tuple[int, ...], float]:
        """Raw partial derivatives for every retained multi-index."""
        fac = _factorials(self.dim, self.order)
        return {
            beta: float(self.c[k] * fac[k])
            for k, beta in enumerate(multi_indices(self.dim, self.order))
        }

    def truncate(self, order: int) -> "Jet":
        if order > self.order:
            raise JetOrderError("cannot extend a jet to a higher order")
        if order == self.order:
            return self
        n = len(multi_indices(self.dim, order))
        return Jet(self.dim, order, self.c[:n].copy())

    def partial(self, axis: int) -> "Jet":
        """Jet of the partial derivative along ``axis`` (order drops by one)."""
        if self.order < 1:
            raise JetOrderError("cannot differentiate an order-0 jet")
        src, fac = _partial_table(self.dim, self.order, axis)
        return Jet(self.dim, self.order - 1, self.c[src] * fac)

    def gradient(self) -> np.ndarray:
        """First-derivative values along every axis."""
        e = np.eye(self.dim, dtype=int)
        return np.asarray([self.derivative(tuple(e[k])) for k in range(self.dim)])

    # -- arithmetic ----------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, Jet):
            if other.dim != self.dim:
                raise ValueError("jet dimension mismatch")
            if other.order == self.order:
                return self, other
            k = min(self.order, other.order)
            return self.truncate(k), other.truncate(k)
        if isinstance(other, (int, float, np.integer, np.floating)):
            return self, Jet.constant(float(other), self.dim, self.order)
        return self, NotImplemented

    def __add__(self, other):
        a, b = self._coerce(other)
        if b is NotImplemented:
            return NotImplemented
        return Jet(a.dim, a.order, a.c + b.c)

    __radd__ = __add__

    def __neg__(self):
        return Jet(self.dim, self.order, -self.c)

    def __sub__(self, other):
        a, b = self._coerce(other)
        if b is NotImplemented:
            return NotImplemented
        return Jet(a.dim, a.order, a.c - b.c)

    def __rsub__(self, other):
        return (-self).__add__(other)

    def __mul__(self, other):
        if isinstance(other, (int, float, np.integer, np.floating)):
            return Jet(self.dim, self.order, self.c * float(other))
        a, b = self._coerce(other)
        if b is NotImplemented:
            return NotImplemented
        ii, jj, kk = _product_table(a.dim, a.order)
        out = np.bincount(kk, weights=a.c[ii] * b.c[jj], minlength=len(a.c))
        return Jet(a.dim, a.order, out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, float, np.integer, np.floating)):
            if abs(other) < 1e-300:
                raise JetDomainError("division by zero")
            return Jet(self.dim, self.order, self.c / float(other))
        a, b = self._coerce(other)
        if b is NotImplemented:
            return NotImplemented
        return a * b.reciprocal()

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def __pow__(self, n):
        if not isinstance(n, (int, np.integer)):
            raise JetOrderError("jet powers must be integers")
        n = int(n)
        if n < 0:
            return self.reciprocal() ** (-n)
        out = Jet.constant(1.0, self.dim, self.order)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base if n > 1 else base
            n >>= 1
        return out

    # -- composition with a univariate series ---------------------------

    def _series(self, taylor: list[float]) -> "Jet":
        """Compose with a univariate function given by Taylor coefficients
        at ``self.value`` (``taylor[k] = g^(k)(c)/k!``)."""
        w = Jet(self.dim, self.order, self.c.copy())
        w.c[0] = 0.0
        out = Jet.constant(taylor[0], self.dim, self.order)
        wp = None
        for k in range(1, self.order + 1):
            wp = w if wp is None else wp * w
            if taylor[k] != 0.0:
                out = out + wp * taylor[k]
        return out

    def reciprocal(self) -> "Jet":
        c = self.value
        if abs(c) < 1e-300:
            raise JetDomainError("division by a jet with zero value")
        taylor = [(-1.0) ** k / c ** (k + 1) for k in range(self.order + 1)]
        return self._series(taylor)

    def sqrt(self) -> "Jet":
        c = self.value
        if c <= 0.0:
            raise JetDomainError(f"sqrt of non-positive value {c}")
        # taylor[k] = binom(1/2, k) c^(1/2 - k)
        taylor = [_binom_half(k) * c ** (0.5 - k) for k in range(self.order + 1)]
        return self._series(taylor)

    def exp(self) -> "Jet":
        e = math.exp(self.value)
        taylor = [e / math.factorial(k) for k in range(self.order + 1)]
        return self._series(taylor)

    def log(self) -> "Jet":
        c = self.value
        if c <= 0.0:
            raise JetDomainError(f"log of non-positive value {c}")
        taylor = [math.log(c)]
        for k in range(1, self.order + 1):
            taylor.append((-1.0) ** (k - 1) / (k * c**k))
        return self._series(taylor)

    def sin(self) -> "Jet":
        c = self.value
        cyc = [math.sin(c), math.cos(c), -math.sin(c), -math.cos(c)]
        taylor = [cyc[k % 4] / math.factorial(k) for k in range(self.order + 1)]
        return self._series(taylor)

    def cos(self) -> "Jet":
        c = self.value
        cyc = [math.cos(c), -math.sin(c), -math.cos(c), math.sin(c)]
        taylor = [cyc[k % 4] / math.factorial(k) for k in range(self.order + 1)]
        return self._series(taylor)

    def tan(self) -> "Jet":
        cos = self.cos()
        if abs(cos.value) < 1e-12:
            raise JetDomainError("tan evaluated at a pole")
        return self.sin() / cos

    def __repr__(self):
        return f"Jet(dim={self.dim}, order={self.order}, value={self.value:.6g})"


@lru_cache(maxsize=None)
def _binom_half(k: int) -> float:
    out = 1.0
    for j in range(k):
        out *= (0.5 - j) / (j + 1)
    return out


# -- linear algebra on object arrays of jets ---------------------------


def inv_jet_matrix(a: np.ndarray) -> np.ndarray:
    """Invert a small square matrix with Jet (or float) entries.

    Gauss-Jordan with partial pivoting on the entry values.  Raises
    :class:`JetDomainError` when the matrix is numerically singular.
    """
    n = a.shape[0]
    ref = next((x for x in a.flat if isinstance(x, Jet)), None)
    m = np.empty((n, 2 * n), dtype=object)
    m[:, :n] = a
    for i in range(n):
        for j in range(n):
            one = 1.0 if i == j else 0.0
            m[i, n + j] = Jet.constant(one, ref.dim, ref.order) if ref is not None else one
    for col in range(n):
        piv = max(range(col, n), key=lambda r: abs(_val(m[r, col])))
        if abs(_val(m[piv, col])) < 1e-13:
            raise JetDomainError("singular matrix in jet inversion")
        if piv != col:
            m[[col, piv]] = m[[piv, col]]
        inv_piv = 1.0 / m[col, col]
        for j in range(2 * n):
            m[col, j] = m[col, j] * inv_piv
        for r in range(n):
            if r == col:
                continue
            f = m[r, col]
            if isinstance(f, Jet) or f != 0.0:
                for j in range(col, 2 * n):
                    m[r, j] = m[r, j] - f * m[col, j]
    return m[:, n:].copy()


def det_jet_value(a: np.ndarray) -> float:
    """Determinant of a small matrix of Jets/floats, at the value level."""
    n = a.shape[0]
    vals = np.empty((n, n))
    for i in range(n):
        for j in range(n):
            vals[i, j] = _val(a[i, j])
    return float(np.linalg.det(vals))


def _val(x) -> float:
    return x.value if isinstance(x, Jet) else float(x)
