"""d-torsion, d-curvature, Ricci splits and Einstein residuals.

The torsion and curvature of a d-connection decompose into irreducible
horizontal/vertical families.  The component formulas implemented here
are the standard ones for connections adapted to a nonlinear connection;
the anholonomy of the adapted frame enters through the N-curvature
``Omega`` and through the fiber derivative of the N-coefficients.

Sign conventions are fixed by three reference checks: a flat block metric
with vanishing N gives zero for every family, the round 2-sphere block
gives scalar curvature +2/r^2, and for the Levi-Civita connection in a
holonomic frame every torsion family vanishes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bundle import DMetricField, NConnectionField, delta_jet, n_curvature_jets
from .connection import DConnectionPoint, connection_jets
from .jets import Jet, inv_jet_matrix

__all__ = [
    "TorsionPoint",
    "CurvaturePoint",
    "RicciPoint",
    "EinsteinReport",
    "d_torsion",
    "d_curvature",
    "ricci_scalar",
    "einstein_residual",
    "scalar_curvature_jet",
    "covariant_laplacian_scalar",
]


@dataclass
class TorsionPoint:
    """Irreducible torsion families of a d-connection.

    T_hh[i, j, k] = L^i_jk - L^i_kj          (h, hh)
    T_hv[i, j, a] = C^i_ja                   (h, hv); the (h, vh) slot is its negative
    S_vv[a, b, c] = C^a_bc - C^a_cb          (v, vv)
    T_vhh[a, i, j] = -Omega^a_ij             (v, hh)
    T_vvh[a, b, i] = dN_i^a/dy^b - L^a_bi    (v, vh); the (v, hv) slot is its negative
    """

    T_hh: np.ndarray
    T_hv: np.ndarray
    S_vv: np.ndarray
    T_vhh: np.ndarray
    T_vvh: np.ndarray
    n: int
    m: int

    def assemble(self) -> np.ndarray:
        """Full T^alpha_{beta gamma}, antisymmetric in the lower pair."""
        n, m = self.n, self.m
        d = n + m
        T = np.zeros((d, d, d))
        T[:n, :n, :n] = self.T_hh
        for i in range(n):
            for j in range(n):
                for a in range(m):
                    T[i, j, n + a] = self.T_hv[i, j, a]
                    T[i, n + a, j] = -self.T_hv[i, j, a]
        T[n:, n:, n:] = self.S_vv
        T[n:, :n, :n] = self.T_vhh
        for a in range(m):
            for b in range(m):
                for i in range(n):
                    T[n + a, n + b, i] = self.T_vvh[a, b, i]
                    T[n + a, i, n + b] = -self.T_vvh[a, b, i]
        return T


@dataclass
class CurvaturePoint:
    """Irreducible curvature families; layouts carry the upper index first.

    R_hh[i, h, j, k] = R^i_{h jk},   R_vv[a, b, j, k] = R^a_{b jk},
    P_h[i, j, k, a] = P^i_{j ka},    P_v[c, b, k, a] = P^c_{b ka},
    S_h[i, j, b, c] = S^i_{j bc},    S_v[a, b, c, d] = S^a_{b cd}.
    """

    R_hh: np.ndarray
    R_vv: np.ndarray
    P_h: np.ndarray
    P_v: np.ndarray
    S_h: np.ndarray
    S_v: np.ndarray
    n: int
    m: int

    def assemble(self) -> np.ndarray:
        """Full R^alpha_{beta.gamma tau}, antisymmetric in (gamma, tau)."""
        n, m = self.n, self.m
        d = n + m
        R = np.zeros((d, d, d, d))
        R[:n, :n, :n, :n] = self.R_hh
        R[n:, n:, :n, :n] = self.R_vv
        for i in range(n):
            for j in range(n):
                for k in range(n):
                    for a in range(m):
                        R[i, j, k, n + a] = self.P_h[i, j, k, a]
                        R[i, j, n + a, k] = -self.P_h[i, j, k, a]
        for c in range(m):
            for b in range(m):
                for k in range(n):
                    for a in range(m):
                        R[n + c, n + b, k, n + a] = self.P_v[c, b, k, a]
                        R[n + c, n + b, n + a, k] = -self.P_v[c, b, k, a]
        R[:n, :n, n:, n:] = self.S_h
        R[n:, n:, n:, n:] = self.S_v
        return R


@dataclass
class RicciPoint:
    """Ricci families, scalar parts and the total scalar curvature.

    R_h[i, j] = R^k_{i jk}, P2[i, a] = P^k_{i ka}, P1[a, i] = P^b_{a ib},
    S_v[a, b] = S^c_{a bc}; rhat = g^{ij} R_ij, s = h^{ab} S_ab,
    total = rhat + s.  The mixed blocks are generally unequal: the Ricci
    tensor of a d-connection need not be symmetric.
    """

    R_h: np.ndarray
    P2: np.ndarray
    P1: np.ndarray
    S_v: np.ndarray
    rhat: float
    s: float
    total: float

    @property
    def asymmetry(self) -> float:
        """max |P1_ai - P2_ia| over the mixed blocks."""
        return float(np.max(np.abs(self.P1 - self.P2.T))) if self.P1.size else 0.0


@dataclass
class EinsteinReport:
    """Residual blocks of the Einstein equations in h-v form."""

    res_hh: np.ndarray
    res_vv: np.ndarray
    res_vh: np.ndarray
    res_hv: np.ndarray
    rhat: float
    s: float

    @property
    def max_abs(self) -> float:
        return float(
            max(
                np.max(np.abs(self.res_hh)),
                np.max(np.abs(self.res_vv)),
                np.max(np.abs(self.res_vh)) if self.res_vh.size else 0.0,
                np.max(np.abs(self.res_hv)) if self.res_hv.size else 0.0,
            )
        )


def _val(x):
    return x.value if isinstance(x, Jet) else float(x)


def d_torsion(selector, M: DMetricField, N: NConnectionField, u) -> TorsionPoint:
    """Torsion families of the selected connection at ``u``."""
    n, m = M.shape.n, M.shape.m
    conn = connection_jets(selector, M, N, u, 0).values()
    Nj = N.jets_block(u, 1)
    om = n_curvature_jets(Nj, n)
    T_hh = conn.L_hh - conn.L_hh.transpose(0, 2, 1)
    T_hv = conn.C_hh_v.copy()
    S_vv = conn.C_vv_v - conn.C_vv_v.transpose(0, 2, 1)
    T_vhh = np.empty((m, n, n))
    for a in range(m):
        for i in range(n):
            for j in range(n):
                T_vhh[a, i, j] = -om[a, i, j].value
    T_vvh = np.empty((m, m, n))
    for a in range(m):
        for b in range(m):
            for i in range(n):
                T_vvh[a, b, i] = Nj[a, i].partial(n + b).value - conn.L_vv_h[a, b, i]
    return TorsionPoint(T_hh=T_hh, T_hv=T_hv, S_vv=S_vv, T_vhh=T_vhh, T_vvh=T_vvh, n=n, m=m)


def _curvature_families(conn: DConnectionPoint, N_jets, omega, n: int, m: int):
    """Families from jet-valued connection coefficients (order drops by 1)."""
    L, Lv, Ch, Cv = conn.L_hh, conn.L_vv_h, conn.C_hh_v, conn.C_vv_v

    def d(entry, alpha):
        return delta_jet(entry, N_jets, alpha, n)

    # hv-torsion entering the mixed families: dN_k^b/dy^a - L^b_ak
    def P_tors(b, k, a):
        return N_jets[b, k].partial(n + a) - Lv[b, a, k]

    R_hh = np.empty((n, n, n, n), dtype=object)
    for i in range(n):
        for h in range(n):
            for j in range(n):
                for k in range(n):
                    acc = d(L[i, h, j], k) - d(L[i, h, k], j)
                    for p in range(n):
                        acc = acc + L[p, h, j] * L[i, p, k] - L[p, h, k] * L[i, p, j]
                    for a in range(m):
                        acc = acc - Ch[i, h, a] * omega[a, j, k]
                    R_hh[i, h, j, k] = acc

    R_vv = np.empty((m, m, n, n), dtype=object)
    for a in range(m):
        for b in range(m):
            for j in range(n):
                for k in range(n):
                    acc = d(Lv[a, b, j], k) - d(Lv[a, b, k], j)
                    for c in range(m):
                        acc = acc + Lv[c, b, j] * Lv[a, c, k] - Lv[c, b, k] * Lv[a, c, j]
                    for c in range(m):
                        acc = acc - Cv[a, b, c] * omega[c, j, k]
                    R_vv[a, b, j, k] = acc

    P_h = np.empty((n, n, n, m), dtype=object)
    for i in range(n):
        for j in range(n):
            for k in range(n):
                for a in range(m):
                    acc = L[i, j, k].partial(n + a) - d(Ch[i, j, a], k)
                    for b in range(m):
                        acc = acc + Ch[i, j, b] * P_tors(b, k, a)
                    for l in range(n):
                        acc = acc - L[i, l, k] * Ch[l, j, a] + L[l, j, k] * Ch[i, l, a]
                    for c in range(m):
                        acc = acc + Lv[c, a, k] * Ch[i, j, c]
                    P_h[i, j, k, a] = acc

    P_v = np.empty((m, m, n, m), dtype=object)
    for c in range(m):
        for b in range(m):
            for k in range(n):
                for a in range(m):
                    acc = Lv[c, b, k].partial(n + a) - d(Cv[c, b, a], k)
                    for dd in range(m):
                        acc = acc + Cv[c, b, dd] * P_tors(dd, k, a)
                    for dd in range(m):
                        acc = acc - Lv[c, dd, k] * Cv[dd, b, a] + Lv[dd, b, k] * Cv[c, dd, a]
                    for dd in range(m):
                        acc = acc + Lv[dd, a, k] * Cv[c, b, dd]
                    P_v[c, b, k, a] = acc

    S_h = np.empty((n, n, m, m), dtype=object)
    for i in range(n):
        for j in range(n):
            for b in range(m):
                for c in range(m):
                    acc = Ch[i, j, b].partial(n + c) - Ch[i, j, c].partial(n + b)
                    for h in range(n):
                        acc = acc + Ch[h, j, b] * Ch[i, h, c] - Ch[h, j, c] * Ch[i, h, b]
                    S_h[i, j, b, c] = acc

    S_v = np.empty((m, m, m, m), dtype=object)
    for a in range(m):
        for b in range(m):
            for c in range(m):
                for dd in range(m):
                    acc = Cv[a, b, c].partial(n + dd) - Cv[a, b, dd].partial(n + c)
                    for e in range(m):
                        acc = acc + Cv[e, b, c] * Cv[a, e, dd] - Cv[e, b, dd] * Cv[a, e, c]
                    S_v[a, b, c, dd] = acc

    return R_hh, R_vv, P_h, P_v, S_h, S_v


def d_curvature_jets(
    selector, M: DMetricField, N: NConnectionField, u, order: int
) -> CurvaturePoint:
    """Curvature families with jet entries of the requested order."""
    n, m = M.shape.n, M.shape.m
    conn = connection_jets(selector, M, N, u, order + 1)
    Nj = N.jets_block(u, order + 1)
    omega = n_curvature_jets(Nj, n)
    fams = _curvature_families(conn, Nj, omega, n, m)
    return CurvaturePoint(*fams, n=n, m=m)


def d_curvature(selector, M: DMetricField, N: NConnectionField, u) -> CurvaturePoint:
    """Curvature families of the selected connection at ``u`` (values)."""
    cp = d_curvature_jets(selector, M, N, u, 0)

    def val(arr):
        out = np.empty(arr.shape)
        for idx in np.ndindex(arr.shape):
            out[idx] = _val(arr[idx])
        return out

    return CurvaturePoint(
        R_hh=val(cp.R_hh),
        R_vv=val(cp.R_vv),
        P_h=val(cp.P_h),
        P_v=val(cp.P_v),
        S_h=val(cp.S_h),
        S_v=val(cp.S_v),
        n=cp.n,
        m=cp.m,
    )


def ricci_scalar(curv: CurvaturePoint, M: DMetricField, u) -> RicciPoint:
    """Ricci families and scalar curvature from curvature families."""
    n, m = curv.n, curv.m
    R_h = np.einsum("kijk->ij", curv.R_hh)
    P2 = np.einsum("kika->ia", curv.P_h)
    P1 = np.einsum("baib->ai", curv.P_v)
    S_v = np.einsum("cabc->ab", curv.S_v)
    g = M.g_values(u)
    h = M.h_values(u)
    rhat = float(np.einsum("ij,ij->", np.linalg.inv(g), R_h))
    s = float(np.einsum("ab,ab->", np.linalg.inv(h), S_v))
    return RicciPoint(R_h=R_h, P2=P2, P1=P1, S_v=S_v, rhat=rhat, s=s, total=rhat + s)


def einstein_residual(
    M: DMetricField,
    N: NConnectionField,
    selector,
    kappa: float,
    sources,
    u,
) -> EinsteinReport:
    """Residuals of the h-v Einstein equations at ``u``.

    ``sources`` is None for vacuum or a mapping with blocks "hh" (n, n),
    "vv" (m, m), "vh" (m, n), "hv" (n, m).
    """
    n, m = M.shape.n, M.shape.m
    curv = d_curvature(selector, M, N, u)
    ric = ricci_scalar(curv, M, u)
    g = M.g_values(u)
    h = M.h_values(u)
    zero = {
        "hh": np.zeros((n, n)),
        "vv": np.zeros((m, m)),
        "vh": np.zeros((m, n)),
        "hv": np.zeros((n, m)),
    }
    ups = dict(zero, **(sources or {}))
    half_r = 0.5 * (ric.rhat + ric.s)
    return EinsteinReport(
        res_hh=ric.R_h - half_r * g - kappa * np.asarray(ups["hh"]),
        res_vv=ric.S_v - half_r * h - kappa * np.asarray(ups["vv"]),
        res_vh=ric.P1 - kappa * np.asarray(ups["vh"]),
        res_hv=ric.P2 - kappa * np.asarray(ups["hv"]),
        rhat=ric.rhat,
        s=ric.s,
    )


def scalar_curvature_jet(
    selector, M: DMetricField, N: NConnectionField, u, order: int
) -> Jet:
    """Total scalar curvature as a jet of the requested order."""
    n, m = M.shape.n, M.shape.m
    curv = d_curvature_jets(selector, M, N, u, order)
    g_inv = inv_jet_matrix(M.g_jets(u, order))
    h_inv = inv_jet_matrix(M.h_jets(u, order))
    acc = None
    for i in range(n):
        for j in range(n):
            term = g_inv[i, j] * sum_jets(curv.R_hh[k, i, j, k] for k in range(n))
            acc = term if acc is None else acc + term
    for a in range(m):
        for b in range(m):
            term = h_inv[a, b] * sum_jets(curv.S_v[c, a, b, c] for c in range(m))
            acc = acc + term
    return acc


def sum_jets(items):
    acc = None
    for x in items:
        acc = x if acc is None else acc + x
    return acc


def covariant_laplacian_scalar(
    s_jet: Jet, selector, M: DMetricField, N: NConnectionField, u
) -> float:
    """D_mu D^mu of a scalar given as an order-2 jet at ``u``."""
    n, m = M.shape.n, M.shape.m
    conn = connection_jets(selector, M, N, u, 0).values()
    Nj = N.jets_block(u, 1)
    Nj2 = N.jets_block(u, 2)
    g_inv = np.linalg.inv(M.g_values(u))
    h_inv = np.linalg.inv(M.h_values(u))
    # first adapted derivatives of s as jets of order 1
    ds = [delta_jet(s_jet, Nj2, alpha, n) for alpha in range(n + m)]
    out = 0.0
    for i in range(n):
        for j in range(n):
            second = delta_jet(ds[j], Nj, i, n).value
            corr = sum(conn.L_hh[k, j, i] * ds[k].value for k in range(n))
            out += g_inv[i, j] * (second - corr)
    for a in range(m):
        for b in range(m):
            second = ds[n + b].partial(n + a).value
            corr = sum(conn.C_vv_v[c, b, a] * ds[n + c].value for c in range(m))
            out += h_inv[a, b] * (second - corr)
    return float(out)
