"""Nonlinear-connection geometry: adapted frames, anholonomy, N-curvature.

The local model is a bundle with base coordinates ``x^i`` (i = 1..n) and
fiber coordinates ``y^a`` (a = 1..m).  A nonlinear connection is a set of
coefficient fields ``N_i^a(x, y)``; it elongates the coordinate frame to

    delta_i = d/dx^i - N_i^a d/dy^a,     d/dy^a unchanged,

with dual co-frame ``dx^i`` and ``delta y^a = dy^a + N_i^a dx^i``.  Index
conventions for stored arrays are (upper, then lower indices left to
right) throughout the package.

Because the adapted frame is anholonomic, its commutators do not vanish:
``[delta_alpha, delta_beta] = W^gamma_{alpha beta} delta_gamma``.  The
implemented component values are the ones produced by expanding the
commutators directly:

    W^a_{ij} = +Omega^a_{ij},   W^b_{i,a} = d N_i^b / dy^a = -W^b_{a,i},

with ``Omega`` the N-curvature returned by :func:`n_curvature`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dsl import BundleShape, ScalarField, parse_field
from .jets import Jet

__all__ = [
    "NConnectionField",
    "DMetricField",
    "FramePoint",
    "AnholonomyPoint",
    "NCurvaturePoint",
    "adapted_frame",
    "anholonomy",
    "n_curvature",
    "offdiagonal_metric",
    "n_transform",
    "delta_jet",
    "DegenerateMetricError",
]


class DegenerateMetricError(ArithmeticError):
    """Metric block numerically degenerate at a sample point."""


def _as_field(entry, shape: BundleShape):
    if isinstance(entry, str):
        return parse_field(entry, shape)
    if isinstance(entry, (int, float)):
        return ScalarField.constant(float(entry), shape)
    return entry  # field-like


class NConnectionField:
    """Coefficients ``N_i^a(x, y)`` of a nonlinear connection.

    ``entries[a][i]`` may be DSL source text, numbers, or field-like
    objects.  The block accessors return plain value arrays or object
    arrays of jets with layout ``(m, n)``.
    """

    def __init__(self, shape: BundleShape, entries):
        self.shape = shape
        ent = np.empty((shape.m, shape.n), dtype=object)
        for a in range(shape.m):
            for i in range(shape.n):
                ent[a, i] = _as_field(entries[a][i], shape)
        self.N = ent

    @classmethod
    def zero(cls, shape: BundleShape) -> "NConnectionField":
        return cls(shape, [[0.0] * shape.n for _ in range(shape.m)])

    def values(self, u) -> np.ndarray:
        out = np.empty((self.shape.m, self.shape.n))
        for a in range(self.shape.m):
            for i in range(self.shape.n):
                out[a, i] = self.N[a, i](u)
        return out

    def jets_block(self, u, order: int) -> np.ndarray:
        out = np.empty((self.shape.m, self.shape.n), dtype=object)
        for a in range(self.shape.m):
            for i in range(self.shape.n):
                out[a, i] = self.N[a, i]._jet_unchecked(u, order)
        return out


class DMetricField:
    """Block metric ``(g_ij(x,y), h_ab(x,y))`` adapted to the N-connection.

    Symmetry is structural: entry (j, i) is stored as the same field object
    as (i, j), taken from the upper triangle of the input.
    """

    def __init__(self, shape: BundleShape, g_entries, h_entries):
        self.shape = shape
        self.g = self._sym_block(g_entries, shape.n, shape)
        self.h = self._sym_block(h_entries, shape.m, shape)

    @staticmethod
    def _sym_block(entries, k: int, shape: BundleShape) -> np.ndarray:
        out = np.empty((k, k), dtype=object)
        for i in range(k):
            for j in range(i, k):
                f = _as_field(entries[i][j], shape)
                out[i, j] = f
                out[j, i] = f
        return out

    @classmethod
    def flat(cls, shape: BundleShape) -> "DMetricField":
        eye_n = [[1.0 if i == j else 0.0 for j in range(shape.n)] for i in range(shape.n)]
        eye_m = [[1.0 if i == j else 0.0 for j in range(shape.m)] for i in range(shape.m)]
        return cls(shape, eye_n, eye_m)

    def _block_values(self, block: np.ndarray, u) -> np.ndarray:
        k = block.shape[0]
        out = np.empty((k, k))
        for i in range(k):
            for j in range(i, k):
                out[i, j] = out[j, i] = block[i, j](u)
        return out

    def _block_jets(self, block: np.ndarray, u, order: int) -> np.ndarray:
        k = block.shape[0]
        out = np.empty((k, k), dtype=object)
        for i in range(k):
            for j in range(i, k):
                jet = block[i, j]._jet_unchecked(u, order)
                out[i, j] = out[j, i] = jet
        return out

    def g_values(self, u) -> np.ndarray:
        return self._block_values(self.g, u)

    def h_values(self, u) -> np.ndarray:
        return self._block_values(self.h, u)

    def g_jets(self, u, order: int) -> np.ndarray:
        return self._block_jets(self.g, u, order)

    def h_jets(self, u, order: int) -> np.ndarray:
        return self._block_jets(self.h, u, order)

    def check_nondegenerate(self, u, tol: float = 1e-10) -> None:
        for block, name in ((self.g_values(u), "g"), (self.h_values(u), "h")):
            det = float(np.linalg.det(block))
            if abs(det) <= tol:
                raise DegenerateMetricError(
                    f"metric block {name} degenerate at {np.asarray(u)}: |det| = {abs(det):.3e}"
                )


@dataclass(frozen=True)
class FramePoint:
    """Adapted frame at a point: columns of ``e`` are the frame vectors
    ``delta_alpha`` in the coordinate basis, rows of ``e_inv`` the dual
    co-frame (identity diagonal blocks, -N / +N off blocks)."""

    e: np.ndarray
    e_inv: np.ndarray


@dataclass(frozen=True)
class AnholonomyPoint:
    """Structure functions ``W^gamma_{alpha beta}``, antisymmetric in the
    lower pair; layout W[gamma, alpha, beta]."""

    W: np.ndarray


@dataclass(frozen=True)
class NCurvaturePoint:
    """N-connection curvature ``Omega^a_{ij} = delta_j N_i^a - delta_i N_j^a``,
    layout Omega[a, i, j]."""

    Omega: np.ndarray


def adapted_frame(N: NConnectionField, u) -> FramePoint:
    """Frame and co-frame matrices of the N-elongated basis at ``u``."""
    n, m = N.shape.n, N.shape.m
    d = n + m
    vals = N.values(u)
    e = np.eye(d)
    e_inv = np.eye(d)
    for a in range(m):
        for i in range(n):
            e[n + a, i] = -vals[a, i]
            e_inv[n + a, i] = vals[a, i]
    return FramePoint(e=e, e_inv=e_inv)


def delta_jet(f: Jet, N_jets: np.ndarray, alpha: int, n: int) -> Jet:
    """Adapted derivative ``delta_alpha f`` of a jet.

    ``N_jets`` is the (m, n) jet block of the N-coefficients; the result
    drops one jet order.  For vertical alpha this is the plain partial.
    """
    if alpha >= n:
        return f.partial(alpha)
    out = f.partial(alpha)
    m = N_jets.shape[0]
    for a in range(m):
        out = out - N_jets[a, alpha] * f.partial(n + a)
    return out


def n_curvature_jets(N_jets: np.ndarray, n: int) -> np.ndarray:
    """Omega^a_{ij} as jets (one order below the N jets)."""
    m = N_jets.shape[0]
    out = np.empty((m, n, n), dtype=object)
    for a in range(m):
        for i in range(n):
            for j in range(n):
                out[a, i, j] = delta_jet(N_jets[a, i], N_jets, j, n) - delta_jet(
                    N_jets[a, j], N_jets, i, n
                )
    return out


def n_curvature(N: NConnectionField, u) -> NCurvaturePoint:
    """Curvature ``Omega^a_{ij}`` of the N-connection at ``u``."""
    n, m = N.shape.n, N.shape.m
    jets = N.jets_block(u, 1)
    om = n_curvature_jets(jets, n)
    out = np.empty((m, n, n))
    for a in range(m):
        for i in range(n):
            for j in range(n):
                out[a, i, j] = om[a, i, j].value
    return NCurvaturePoint(Omega=out)


def anholonomy(N: NConnectionField, u) -> AnholonomyPoint:
    """Anholonomy coefficients of the adapted frame at ``u``."""
    n, m = N.shape.n, N.shape.m
    d = n + m
    W = np.zeros((d, d, d))
    om = n_curvature(N, u).Omega
    jets = N.jets_block(u, 1)
    for a in range(m):
        for i in range(n):
            for j in range(n):
                W[n + a, i, j] = om[a, i, j]
    for b in range(m):
        for i in range(n):
            for a in range(m):
                dn = jets[b, i].derivative(_unit(d, n + a))
                W[n + b, i, n + a] = dn
                W[n + b, n + a, i] = -dn
    return AnholonomyPoint(W=W)


def offdiagonal_metric(M: DMetricField, N: NConnectionField, u) -> np.ndarray:
    """Assemble the generic off-diagonal metric in the coordinate basis.

    Upper-left block ``g_ij + N_i^a N_j^b h_ab``, off blocks ``h_ab N_i^a``,
    lower-right ``h_ab``.
    """
    if M.shape != N.shape:
        raise ValueError("metric and N-connection shapes disagree")
    n, m = M.shape.n, M.shape.m
    g = M.g_values(u)
    h = M.h_values(u)
    Nv = N.values(u)  # (m, n)
    out = np.zeros((n + m, n + m))
    out[:n, :n] = g + Nv.T @ h @ Nv
    out[:n, n:] = Nv.T @ h
    out[n:, :n] = h @ Nv
    out[n:, n:] = h
    return out


def n_transform(N: NConnectionField, Mx, u) -> np.ndarray:
    """Transformed coefficients under a fiber transform ``y' = M(x) y``.

    ``Mx`` is an (m, m) array of field-like entries depending on x only.
    Returns ``N'^{a'}_i = M^{a'}_a N^a_i - (d_i M^{a'}_a) y^a`` evaluated at
    ``u``; raises on a singular transform.
    """
    shape = N.shape
    n, m = shape.n, shape.m
    u = np.asarray(u, dtype=np.float64)
    Mx_arr = np.empty((m, m), dtype=object)
    for p in range(m):
        for q in range(m):
            Mx_arr[p, q] = _as_field(Mx[p][q], shape)
    Mvals = np.array([[Mx_arr[p, q](u) for q in range(m)] for p in range(m)])
    if abs(np.linalg.det(Mvals)) < 1e-12:
        raise DegenerateMetricError("fiber transform singular at the base point")
    Nv = N.values(u)
    y = u[n:]
    out = np.empty((m, n))
    for ap in range(m):
        for i in range(n):
            acc = 0.0
            for a in range(m):
                jet = Mx_arr[ap, a]._jet_unchecked(u, 1)
                acc += Mvals[ap, a] * Nv[a, i] - jet.derivative(_unit(n + m, i)) * y[a]
            out[ap, i] = acc
    return out


def _unit(d: int, axis: int) -> tuple[int, ...]:
    return tuple(1 if k == axis else 0 for k in range(d))
