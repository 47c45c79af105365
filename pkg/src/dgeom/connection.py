"""Canonical and Levi-Civita d-connections, metric compatibility.

Both connections preserve the horizontal/vertical splitting and are
described by the four coefficient families

    L^i_jk,  L^a_bk,  C^i_jc,  C^a_bc,

stored with the upper index first.  The canonical connection is built
only from the metric blocks and the N-coefficients; the Levi-Civita
connection written in the adapted frame differs from it by the term
``+ 1/2 g^{ik} Omega^a_{jk} h_ca`` in the ``C^i_jc`` family, so the two
coincide exactly when the N-curvature vanishes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bundle import DMetricField, NConnectionField, delta_jet, n_curvature_jets
from .jets import Jet, inv_jet_matrix

__all__ = [
    "DConnectionPoint",
    "NLinearPoint",
    "canonical_dconnection",
    "levi_civita_anholonomic",
    "n_linear_connection",
    "metric_compatibility_residual",
    "connection_jets",
]


@dataclass
class DConnectionPoint:
    """Coefficient families of a d-connection at a point.

    Layouts: L_hh[i, j, k] = L^i_jk, L_vv_h[a, b, k] = L^a_bk,
    C_hh_v[i, j, c] = C^i_jc, C_vv_v[a, b, c] = C^a_bc.  Entries are
    floats or jets depending on how the point was produced.
    """

    L_hh: np.ndarray
    L_vv_h: np.ndarray
    C_hh_v: np.ndarray
    C_vv_v: np.ndarray

    def values(self) -> "DConnectionPoint":
        """Strip jet entries down to their values."""

        def val(arr):
            out = np.empty(arr.shape)
            for idx in np.ndindex(arr.shape):
                x = arr[idx]
                out[idx] = x.value if isinstance(x, Jet) else float(x)
            return out

        return DConnectionPoint(
            L_hh=val(self.L_hh),
            L_vv_h=val(self.L_vv_h),
            C_hh_v=val(self.C_hh_v),
            C_vv_v=val(self.C_vv_v),
        )


@dataclass(frozen=True)
class NLinearPoint:
    """Linear connection generated by N alone: Gamma_N[a, b, i] = dN_i^a/dy^b."""

    Gamma_N: np.ndarray


def _canonical_jets(g_jets, h_jets, N_jets, n: int, m: int) -> DConnectionPoint:
    """Core formula; all inputs jet blocks, outputs one order lower."""
    g_inv = inv_jet_matrix(g_jets)
    h_inv = inv_jet_matrix(h_jets)

    def dg(i, j, alpha):
        return delta_jet(g_jets[i, j], N_jets, alpha, n)

    def dh(a, b, alpha):
        return delta_jet(h_jets[a, b], N_jets, alpha, n)

    L_hh = np.empty((n, n, n), dtype=object)
    for i in range(n):
        for j in range(n):
            for k in range(n):
                acc = None
                for p in range(n):
                    term = g_inv[i, p] * (dg(p, j, k) + dg(p, k, j) - dg(j, k, p))
                    acc = term if acc is None else acc + term
                L_hh[i, j, k] = acc * 0.5

    # dN[a, i] jets of dN_i^a/dy^b demand one partial of the N block
    def dN(a, k, b):
        return N_jets[a, k].partial(n + b)

    L_vv_h = np.empty((m, m, n), dtype=object)
    for a in range(m):
        for b in range(m):
            for k in range(n):
                acc = dN(a, k, b)
                corr = None
                for c in range(m):
                    inner = dh(b, c, k)
                    for dd in range(m):
                        inner = inner - h_jets[dd, c] * dN(dd, k, b) - h_jets[dd, b] * dN(dd, k, c)
                    term = h_inv[a, c] * inner
                    corr = term if corr is None else corr + term
                L_vv_h[a, b, k] = acc + corr * 0.5

    C_hh_v = np.empty((n, n, m), dtype=object)
    for i in range(n):
        for j in range(n):
            for c in range(m):
                acc = None
                for k in range(n):
                    term = g_inv[i, k] * g_jets[j, k].partial(n + c)
                    acc = term if acc is None else acc + term
                C_hh_v[i, j, c] = acc * 0.5

    C_vv_v = np.empty((m, m, m), dtype=object)
    for a in range(m):
        for b in range(m):
            for c in range(m):
                acc = None
                for dd in range(m):
                    term = h_inv[a, dd] * (
                        h_jets[dd, b].partial(n + c)
                        + h_jets[dd, c].partial(n + b)
                        - h_jets[b, c].partial(n + dd)
                    )
                    acc = term if acc is None else acc + term
                C_vv_v[a, b, c] = acc * 0.5

    return DConnectionPoint(L_hh=L_hh, L_vv_h=L_vv_h, C_hh_v=C_hh_v, C_vv_v=C_vv_v)


def _levi_civita_jets(g_jets, h_jets, N_jets, n: int, m: int) -> DConnectionPoint:
    conn = _canonical_jets(g_jets, h_jets, N_jets, n, m)
    g_inv = inv_jet_matrix(g_jets)
    omega = n_curvature_jets(N_jets, n)
    C = conn.C_hh_v
    for i in range(n):
        for j in range(n):
            for c in range(m):
                extra = None
                for k in range(n):
                    for a in range(m):
                        term = g_inv[i, k] * omega[a, j, k] * h_jets[c, a]
                        extra = term if extra is None else extra + term
                C[i, j, c] = C[i, j, c] + extra * 0.5
    return conn


def connection_jets(
    selector, M: DMetricField, N: NConnectionField, u, order: int
) -> DConnectionPoint:
    """Connection coefficients as jets of the requested order.

    ``selector`` is "canonical", "levi-civita", or a callable with the same
    signature returning a :class:`DConnectionPoint`.
    """
    if callable(selector):
        return selector(M, N, u, order)
    n, m = M.shape.n, M.shape.m
    g = M.g_jets(u, order + 1)
    h = M.h_jets(u, order + 1)
    Nj = N.jets_block(u, order + 1)
    if selector == "canonical":
        return _canonical_jets(g, h, Nj, n, m)
    if selector == "levi-civita":
        return _levi_civita_jets(g, h, Nj, n, m)
    raise ValueError(f"unknown connection selector {selector!r}")


def canonical_dconnection(M: DMetricField, N: NConnectionField, u) -> DConnectionPoint:
    """Canonical metric-compatible d-connection at ``u`` (values)."""
    M.check_nondegenerate(u)
    return connection_jets("canonical", M, N, u, 0).values()


def levi_civita_anholonomic(M: DMetricField, N: NConnectionField, u) -> DConnectionPoint:
    """Levi-Civita connection expressed in the adapted frame at ``u``."""
    M.check_nondegenerate(u)
    return connection_jets("levi-civita", M, N, u, 0).values()


def n_linear_connection(N: NConnectionField, u) -> NLinearPoint:
    """Fiber-linear connection induced by N: dN_i^a/dy^b."""
    n, m = N.shape.n, N.shape.m
    jets = N.jets_block(u, 1)
    out = np.empty((m, m, n))
    for a in range(m):
        for b in range(m):
            for i in range(n):
                out[a, b, i] = jets[a, i].partial(n + b).value
    return NLinearPoint(Gamma_N=out)


def metric_compatibility_residual(
    conn: DConnectionPoint, M: DMetricField, N: NConnectionField, u
) -> float:
    """Max absolute component of the covariant derivative of the d-metric.

    The derivative is taken blockwise in the adapted basis: horizontal
    directions use the (L^i_jk, L^a_bk) families, vertical ones the
    (C^i_jc, C^a_bc) families.  Zero characterizes compatibility.
    """
    n, m = M.shape.n, M.shape.m
    g = M.g_jets(u, 1)
    h = M.h_jets(u, 1)
    Nj = N.jets_block(u, 1)
    gv = np.array([[g[i, j].value for j in range(n)] for i in range(n)])
    hv = np.array([[h[a, b].value for b in range(m)] for a in range(m)])
    L = conn.L_hh
    Lv = conn.L_vv_h
    Ch = conn.C_hh_v
    Cv = conn.C_vv_v
    worst = 0.0
    for k in range(n):
        for i in range(n):
            for j in range(n):
                r = delta_jet(g[i, j], Nj, k, n).value
                r -= sum(L[p, i, k] * gv[p, j] + L[p, j, k] * gv[i, p] for p in range(n))
                worst = max(worst, abs(r))
        for a in range(m):
            for b in range(m):
                r = delta_jet(h[a, b], Nj, k, n).value
                r -= sum(Lv[c, a, k] * hv[c, b] + Lv[c, b, k] * hv[a, c] for c in range(m))
                worst = max(worst, abs(r))
    for c in range(m):
        for i in range(n):
            for j in range(n):
                r = g[i, j].partial(n + c).value
                r -= sum(Ch[p, i, c] * gv[p, j] + Ch[p, j, c] * gv[i, p] for p in range(n))
                worst = max(worst, abs(r))
        for a in range(m):
            for b in range(m):
                r = h[a, b].partial(n + c).value
                r -= sum(Cv[d, a, c] * hv[d, b] + Cv[d, b, c] * hv[a, d] for d in range(m))
                worst = max(worst, abs(r))
    return worst
