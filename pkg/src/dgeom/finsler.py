"""Finsler and Lagrange metric generation on tangent-bundle-like shapes.

A Finsler function F(x, y) is positive and 1-homogeneous in y away from
the zero section; its fundamental tensor is half the y-Hessian of F^2.
The associated Cartan nonlinear connection is obtained from the geodesic
spray

    G^i = 1/4 g^{il} ( y^k d^2F^2/dy^l dx^k - dF^2/dx^l ),
    N^i_j = dG^i/dy^j,

which reduces to N^i_j = Gamma^i_{jk}(x) y^k in the Riemannian case.
Combining g^[F] with the Cartan N gives the almost-Kaehler model: the
2-form g^[F]_ij delta-y^i wedge dx^j is closed, which
:func:`kahler_form_closure` verifies numerically by expanding the frame.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dsl import BundleShape, EvalDomainError, parse_field
from .jets import Jet, inv_jet_matrix

__all__ = [
    "FinslerFunction",
    "FinslerMetricPoint",
    "CartanNConnection",
    "FinslerDMetric",
    "finsler_metric",
    "cartan_nconnection",
    "lagrange_metric",
    "kahler_form_closure",
    "almost_complex_matrix",
    "builtin_finsler",
]

ZERO_SECTION_RADIUS = 1e-3


@dataclass(frozen=True)
class FinslerMetricPoint:
    """Fundamental tensor at a point with rank and definiteness data."""

    gF: np.ndarray
    rank: int
    min_eigenvalue: float

    @property
    def positive_definite(self) -> bool:
        return self.min_eigenvalue > 0.0


class FinslerFunction:
    """A Finsler norm candidate on an (n, n)-shaped bundle.

    ``F`` may be DSL source text or a field-like object.  Evaluation is
    refused within ``ZERO_SECTION_RADIUS`` of the zero section, where F is
    not smooth.
    """

    def __init__(self, F, n: int):
        self.shape = BundleShape(n, n)
        self.n = n
        self.F = parse_field(F, self.shape) if isinstance(F, str) else F

    def _guard(self, u):
        u = np.asarray(u, dtype=np.float64)
        y = u[self.n:]
        if float(np.linalg.norm(y)) < ZERO_SECTION_RADIUS:
            raise EvalDomainError(
                "Finsler function evaluated too close to the zero section"
            )
        return u

    def value(self, u) -> float:
        return self.F(self._guard(u))

    def f2_jet(self, u, order: int) -> Jet:
        jet = self.F._jet_unchecked(self._guard(u), order)
        return jet * jet

    def homogeneity_residual(self, u, factors=(0.5, 2.0, 3.0)) -> float:
        """max |F(x, s y) - s F(x, y)| over the scale factors."""
        u = self._guard(u)
        base = self.value(u)
        worst = 0.0
        for s in factors:
            v = u.copy()
            v[self.n:] *= s
            worst = max(worst, abs(self.value(v) - s * base))
        return worst


def _finsler_metric_jets(F: FinslerFunction, u, order: int) -> np.ndarray:
    n = F.n
    f2 = F.f2_jet(u, order + 2)
    out = np.empty((n, n), dtype=object)
    for i in range(n):
        for j in range(i, n):
            jet = f2.partial(n + i).partial(n + j) * 0.5
            out[i, j] = out[j, i] = jet
    return out


def finsler_metric(F: FinslerFunction, u) -> FinslerMetricPoint:
    """Fundamental tensor g^[F] = 1/2 d^2(F^2)/dy dy at ``u``."""
    jets = _finsler_metric_jets(F, u, 0)
    n = F.n
    gF = np.array([[jets[i, j].value for j in range(n)] for i in range(n)])
    eig = np.linalg.eigvalsh(gF)
    rank = int(np.sum(np.abs(eig) > 1e-10))
    return FinslerMetricPoint(gF=gF, rank=rank, min_eigenvalue=float(eig[0]))


def _spray_jets(F: FinslerFunction, u, order: int) -> np.ndarray:
    """Geodesic spray coefficients G^i as jets of the requested order."""
    n = F.n
    f2 = F.f2_jet(u, order + 2)
    g = _finsler_metric_jets(F, u, order)
    g_inv = inv_jet_matrix(g)
    y = Jet.seed_point(np.asarray(u, dtype=np.float64), order)[n:]
    G = np.empty(n, dtype=object)
    for i in range(n):
        acc = None
        for l in range(n):
            inner = None
            for k in range(n):
                t = y[k] * f2.partial(n + l).partial(k)
                inner = t if inner is None else inner + t
            inner = inner - f2.partial(l).truncate(order)
            term = g_inv[i, l] * inner
            acc = term if acc is None else acc + term
        G[i] = acc * 0.25
    return G


def cartan_nconnection_jets(F: FinslerFunction, u, order: int) -> np.ndarray:
    """Cartan N-coefficients N^i_j as jets (layout (m=n, n): [j_upper? no]).

    Layout matches :class:`~dgeom.bundle.NConnectionField`: entry [a, i]
    is the coefficient N_i^a, here N^a_i = dG^a/dy^i.
    """
    n = F.n
    G = _spray_jets(F, u, order + 1)
    out = np.empty((n, n), dtype=object)
    for a in range(n):
        for i in range(n):
            out[a, i] = G[a].partial(n + i)
    return out


def cartan_nconnection(F: FinslerFunction, u) -> np.ndarray:
    """Cartan nonlinear connection values N^i_j at ``u`` (layout [i, j],
    upper index first)."""
    jets = cartan_nconnection_jets(F, u, 0)
    n = F.n
    return np.array([[jets[i, j].value for j in range(n)] for i in range(n)])


class CartanNConnection:
    """N-connection-field adapter computing Cartan coefficients from F.

    Provides the same block interface as
    :class:`~dgeom.bundle.NConnectionField` so Finsler-generated bundles
    feed the connection and curvature pipeline directly.
    """

    def __init__(self, F: FinslerFunction):
        self.F = F
        self.shape = F.shape
        self._cache: dict = {}

    def _jets(self, u, order: int) -> np.ndarray:
        key = (tuple(np.asarray(u, dtype=np.float64)), order)
        hit = self._cache.get(key)
        if hit is None:
            hit = cartan_nconnection_jets(self.F, u, order)
            self._cache.clear()
            self._cache[key] = hit
        return hit

    def values(self, u) -> np.ndarray:
        jets = self._jets(u, 0)
        n = self.shape.n
        return np.array([[jets[a, i].value for i in range(n)] for a in range(n)])

    def jets_block(self, u, order: int) -> np.ndarray:
        return self._jets(u, order)


class FinslerDMetric:
    """d-metric adapter with g = h = g^[F], for Finsler-generated bundles."""

    def __init__(self, F: FinslerFunction):
        self.F = F
        self.shape = F.shape
        self._cache: dict = {}

    def _jets(self, u, order: int) -> np.ndarray:
        key = (tuple(np.asarray(u, dtype=np.float64)), order)
        hit = self._cache.get(key)
        if hit is None:
            hit = _finsler_metric_jets(self.F, u, order)
            self._cache.clear()
            self._cache[key] = hit
        return hit

    def _values(self, u) -> np.ndarray:
        jets = self._jets(u, 0)
        n = self.shape.n
        return np.array([[jets[i, j].value for j in range(n)] for i in range(n)])

    g_values = _values
    h_values = _values

    def g_jets(self, u, order: int) -> np.ndarray:
        return self._jets(u, order)

    h_jets = g_jets

    def check_nondegenerate(self, u, tol: float = 1e-10) -> None:
        from .bundle import DegenerateMetricError

        det = float(np.linalg.det(self._values(u)))
        if abs(det) <= tol:
            raise DegenerateMetricError(f"Finsler metric degenerate at {np.asarray(u)}")


def lagrange_metric(L, u, n: int | None = None) -> FinslerMetricPoint:
    """Metric of a regular Lagrangian: 1/2 d^2 L/dy dy, no homogeneity
    assumed.  ``L`` is a field on an (n, n) shape."""
    if n is None:
        n = L.shape.n
    jet = L._jet_unchecked(np.asarray(u, dtype=np.float64), 2)
    gL = np.empty((n, n))
    for i in range(n):
        for j in range(i, n):
            gL[i, j] = gL[j, i] = 0.5 * jet.partial(n + i).partial(n + j).value
    eig = np.linalg.eigvalsh(gL)
    return FinslerMetricPoint(
        gF=gL, rank=int(np.sum(np.abs(eig) > 1e-10)), min_eigenvalue=float(eig[0])
    )


def kahler_form_closure(F: FinslerFunction, u) -> float:
    """Max component of d(theta) for theta = g^[F]_ij delta-y^i wedge dx^j.

    The form is expanded into the coordinate co-basis (delta-y^i = dy^i +
    N^i_k dx^k with the Cartan N) and differentiated once; the result is
    zero for every Finsler function, which is the almost-Kaehler property.
    """
    n = F.n
    d = 2 * n
    g = _finsler_metric_jets(F, u, 1)
    Nj = cartan_nconnection_jets(F, u, 1)  # [upper a, lower i]
    theta = np.empty((d, d), dtype=object)
    zero = Jet.constant(0.0, d, 1)
    for A in range(d):
        for B in range(d):
            theta[A, B] = zero
    for i in range(n):
        for j in range(n):
            theta[n + i, j] = theta[n + i, j] + g[i, j]
            theta[j, n + i] = theta[j, n + i] - g[i, j]
    for k in range(n):
        for j in range(n):
            acc = zero
            for i in range(n):
                acc = acc + g[i, j] * Nj[i, k]
            theta[k, j] = theta[k, j] + acc
            theta[j, k] = theta[j, k] - acc
    worst = 0.0
    for A in range(d):
        for B in range(A + 1, d):
            for C in range(B + 1, d):
                comp = (
                    theta[B, C].partial(A).value
                    + theta[C, A].partial(B).value
                    + theta[A, B].partial(C).value
                )
                worst = max(worst, abs(comp))
    return worst


def almost_complex_matrix(n: int) -> np.ndarray:
    """Almost-complex structure in the adapted basis (delta_i, d/dy^i):
    swaps the blocks with a sign, squares to minus the identity."""
    J = np.zeros((2 * n, 2 * n))
    J[n:, :n] = -np.eye(n)
    J[:n, n:] = np.eye(n)
    return J


def builtin_finsler(name: str) -> FinslerFunction:
    """Finsler catalog: "euclidean[:n=K]", "quartic[:n=K]",
    "riemann:<g11|g12|g22>", "randers:<a11|a12|a22;b1|b2>".

    Metric entries are DSL expressions in the base coordinates; upper
    triangles are given row-major, pipe-separated.  The Randers family
    F = sqrt(a_ij y^i y^j) + b_i y^i is a standard catalog addition, not a
    construction specific to this geometry.
    """
    head, _, arg = name.partition(":")
    if head == "euclidean":
        n = _parse_n(arg)
        src = "sqrt(" + "+".join(f"y{i + 1}^2" for i in range(n)) + ")"
        return FinslerFunction(src, n)
    if head == "quartic":
        n = _parse_n(arg)
        src = "sqrt(sqrt(" + "+".join(f"y{i + 1}^4" for i in range(n)) + "))"
        return FinslerFunction(src, n)
    if head == "riemann":
        entries, n = _parse_triangle(arg)
        src = "sqrt(" + _quadratic_src(entries, n) + ")"
        return FinslerFunction(src, n)
    if head == "randers":
        a_part, _, b_part = arg.partition(";")
        entries, n = _parse_triangle(a_part)
        bs = [s.strip() for s in b_part.split("|")]
        if len(bs) != n:
            raise ValueError(f"randers drift needs {n} components, got {len(bs)}")
        drift = "+".join(f"({b})*y{i + 1}" for i, b in enumerate(bs))
        src = "sqrt(" + _quadratic_src(entries, n) + ") + " + drift
        return FinslerFunction(src, n)
    raise ValueError(f"unknown builtin Finsler function {name!r}")


def _parse_n(arg: str) -> int:
    if not arg:
        return 2
    key, _, val = arg.partition("=")
    if key.strip() != "n":
        raise ValueError(f"unrecognized parameter {arg!r}")
    return int(val)


def _parse_triangle(arg: str):
    entries = [s.strip() for s in arg.split("|")]
    k = len(entries)
    n = int((np.sqrt(8 * k + 1) - 1) / 2)
    if n * (n + 1) // 2 != k:
        raise ValueError(f"{k} entries do not fill an upper triangle")
    return entries, n


def _quadratic_src(entries, n: int) -> str:
    terms = []
    pos = 0
    for i in range(n):
        for j in range(i, n):
            coeff = entries[pos]
            pos += 1
            factor = "" if i == j else "2*"
            terms.append(f"{factor}({coeff})*y{i + 1}*y{j + 1}")
    return "+".join(terms)
