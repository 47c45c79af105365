import numpy as np
import pytest

from dgeom.bundle import DMetricField, NConnectionField, n_curvature
from dgeom.catalog import builtin_metric, builtin_nconnection, sample_points
from dgeom.connection import canonical_dconnection
from dgeom.curvature import (
    d_curvature,
    d_torsion,
    einstein_residual,
    ricci_scalar,
)
from dgeom.dsl import BundleShape


def fd_curvature_families(M, N, u, h=1e-4):
    """Curvature families recomputed with finite differences of the
    connection coefficient field instead of nested jets."""
    n, m = M.shape.n, M.shape.m
    d = n + m

    def conn_at(v):
        return canonical_dconnection(M, N, v)

    base = conn_at(u)
    Nv = N.values(u)
    om = n_curvature(N, u).Omega

    dL = np.empty((d, n, n, n))
    dLv = np.empty((d, m, m, n))
    dCh = np.empty((d, n, n, m))
    dCv = np.empty((d, m, m, m))
    for c in range(d):
        up, dn = u.copy(), u.copy()
        up[c] += h
        dn[c] -= h
        cu, cd = conn_at(up), conn_at(dn)
        dL[c] = (cu.L_hh - cd.L_hh) / (2 * h)
        dLv[c] = (cu.L_vv_h - cd.L_vv_h) / (2 * h)
        dCh[c] = (cu.C_hh_v - cd.C_hh_v) / (2 * h)
        dCv[c] = (cu.C_vv_v - cd.C_vv_v) / (2 * h)

    def delta(darr, k):
        # adapted derivative of a coefficient array along horizontal k
        return darr[k] - sum(Nv[a, k] * darr[n + a] for a in range(m))

    # dN^b_k / dy^a by finite differences
    dN = np.empty((m, n, m))
    for a in range(m):
        up, dn = u.copy(), u.copy()
        up[n + a] += h
        dn[n + a] -= h
        dN[:, :, a] = (N.values(up) - N.values(dn)) / (2 * h)

    L, Lv, Ch, Cv = base.L_hh, base.L_vv_h, base.C_hh_v, base.C_vv_v
    R_hh = np.empty((n, n, n, n))
    for i in range(n):
        for hh in range(n):
            for j in range(n):
                for k in range(n):
                    acc = delta(dL, k)[i, hh, j] - delta(dL, j)[i, hh, k]
                    acc += sum(
                        L[p, hh, j] * L[i, p, k] - L[p, hh, k] * L[i, p, j]
                        for p in range(n)
                    )
                    acc -= sum(Ch[i, hh, a] * om[a, j, k] for a in range(m))
                    R_hh[i, hh, j, k] = acc

    P_h = np.empty((n, n, n, m))
    for i in range(n):
        for j in range(n):
            for k in range(n):
                for a in range(m):
                    acc = dL[n + a][i, j, k] - delta(dCh, k)[i, j, a]
                    acc += sum(
                        Ch[i, j, b] * (dN[b, k, a] - Lv[b, a, k]) for b in range(m)
                    )
                    acc += sum(
                        -L[i, l, k] * Ch[l, j, a] + L[l, j, k] * Ch[i, l, a]
                        for l in range(n)
                    )
                    acc += sum(Lv[c, a, k] * Ch[i, j, c] for c in range(m))
                    P_h[i, j, k, a] = acc

    S_v = np.empty((m, m, m, m))
    for a in range(m):
        for b in range(m):
            for c in range(m):
                for dd in range(m):
                    acc = dCv[n + dd][a, b, c] - dCv[n + c][a, b, dd]
                    acc += sum(
                        Cv[e, b, c] * Cv[a, e, dd] - Cv[e, b, dd] * Cv[a, e, c]
                        for e in range(m)
                    )
                    S_v[a, b, c, dd] = acc
    return R_hh, P_h, S_v


def test_flat_curvature_zero():
    ex = builtin_metric("flat")
    u = np.array([0.3, -0.2, 0.7, 1.1])
    curv = d_curvature("canonical", ex.metric, ex.nconn, u)
    for fam in (curv.R_hh, curv.R_vv, curv.P_h, curv.P_v, curv.S_h, curv.S_v):
        assert np.allclose(fam, 0.0, atol=1e-12)
    T = d_torsion("levi-civita", ex.metric, ex.nconn, u)
    assert np.allclose(T.assemble(), 0.0, atol=1e-12)


@pytest.mark.parametrize("r", [1.0, 2.0])
def test_sphere_scalar_curvature(r):
    ex = builtin_metric(f"sphere2xflat:r={r}")
    for u in sample_points(ex, 5, seed=20):
        curv = d_curvature("canonical", ex.metric, ex.nconn, u)
        ric = ricci_scalar(curv, ex.metric, u)
        assert ric.rhat == pytest.approx(2.0 / r**2, abs=1e-8)
        assert ric.s == pytest.approx(0.0, abs=1e-10)
        assert ric.total == pytest.approx(2.0 / r**2, abs=1e-8)


def test_assembled_antisymmetry():
    ex = builtin_metric("anisotropic")
    for u in sample_points(ex, 5, seed=33):
        R = d_curvature("canonical", ex.metric, ex.nconn, u).assemble()
        assert np.allclose(R, -R.transpose(0, 1, 3, 2), atol=1e-9)
        T = d_torsion("canonical", ex.metric, ex.nconn, u).assemble()
        assert np.allclose(T, -T.transpose(0, 2, 1), atol=1e-12)


def test_torsion_families_match_assembly():
    ex = builtin_metric("anisotropic")
    u = sample_points(ex, 1, seed=3)[0]
    tp = d_torsion("canonical", ex.metric, ex.nconn, u)
    T = tp.assemble()
    n = 2
    for i in range(2):
        for j in range(2):
            for k in range(2):
                assert T[i, j, k] == tp.T_hh[i, j, k]
    for a in range(2):
        for i in range(2):
            for j in range(2):
                assert T[n + a, i, j] == tp.T_vhh[a, i, j]
    for i in range(2):
        for j in range(2):
            for a in range(2):
                assert T[i, j, n + a] == tp.T_hv[i, j, a]
                assert T[i, n + a, j] == -tp.T_hv[i, j, a]


def test_torsion_n_curvature_family():
    ex = builtin_metric("anisotropic")
    for u in sample_points(ex, 10, seed=91):
        tp = d_torsion("canonical", ex.metric, ex.nconn, u)
        om = n_curvature(ex.nconn, u).Omega
        assert np.allclose(tp.T_vhh + om, 0.0, atol=1e-10)


def test_levi_civita_holonomic_torsion_free_and_symmetric_ricci():
    # N = 0 with block metrics: torsion vanishes and the Ricci tensor has
    # no mixed blocks
    shape = BundleShape(2, 2)
    M = DMetricField(
        shape,
        [["1 + 0.5*x1^2", "0.2*x1*x2"], [None, "2 + 0.3*x2^2"]],
        [["1 + 0.4*y1^2", "0.1*y1*y2"], [None, "1 + 0.2*y2^2"]],
    )
    N = NConnectionField.zero(shape)
    rng = np.random.default_rng(17)
    for _ in range(5):
        u = rng.uniform(0.2, 1.0, size=4)
        T = d_torsion("levi-civita", M, N, u)
        assert np.allclose(T.assemble(), 0.0, atol=1e-10)
        curv = d_curvature("levi-civita", M, N, u)
        ric = ricci_scalar(curv, M, u)
        assert np.allclose(ric.P1, 0.0, atol=1e-10)
        assert np.allclose(ric.P2, 0.0, atol=1e-10)
        assert np.allclose(ric.R_h, ric.R_h.T, atol=1e-10)


def test_ricci_asymmetry_on_y_dependent_metric():
    ex = builtin_metric("anisotropic")
    u = sample_points(ex, 1, seed=42)[0]
    curv = d_curvature("canonical", ex.metric, ex.nconn, u)
    ric = ricci_scalar(curv, ex.metric, u)
    assert ric.asymmetry > 1e-6


def test_scalar_total_matches_direct_contraction():
    ex = builtin_metric("anisotropic")
    for u in sample_points(ex, 5, seed=9):
        curv = d_curvature("canonical", ex.metric, ex.nconn, u)
        ric = ricci_scalar(curv, ex.metric, u)
        R = curv.assemble()
        ricci_full = np.einsum("abga->bg", R)
        G = np.zeros((4, 4))
        G[:2, :2] = ex.metric.g_values(u)
        G[2:, 2:] = ex.metric.h_values(u)
        total = np.einsum("bg,bg->", np.linalg.inv(G), ricci_full)
        assert ric.total == pytest.approx(total, abs=1e-10)


def test_jet_curvature_matches_finite_differences():
    ex = builtin_metric("anisotropic")
    u = sample_points(ex, 1, seed=60)[0]
    curv = d_curvature("canonical", ex.metric, ex.nconn, u)
    R_hh, P_h, S_v = fd_curvature_families(ex.metric, ex.nconn, u)
    assert np.allclose(curv.R_hh, R_hh, atol=1e-5)
    assert np.allclose(curv.P_h, P_h, atol=1e-5)
    assert np.allclose(curv.S_v, S_v, atol=1e-5)


def test_einstein_flat_vacuum():
    ex = builtin_metric("flat")
    u = np.array([0.5, 0.5, 0.5, 0.5])
    rep = einstein_residual(ex.metric, ex.nconn, "canonical", 1.0, None, u)
    assert rep.max_abs == pytest.approx(0.0, abs=1e-12)


def test_einstein_self_consistency():
    # sources chosen as kappa^{-1} times the Einstein blocks: residual 0
    ex = builtin_metric("anisotropic")
    u = sample_points(ex, 1, seed=5)[0]
    kappa = 2.5
    rep0 = einstein_residual(ex.metric, ex.nconn, "canonical", kappa, None, u)
    ups = {
        "hh": rep0.res_hh / kappa,
        "vv": rep0.res_vv / kappa,
        "vh": rep0.res_vh / kappa,
        "hv": rep0.res_hv / kappa,
    }
    rep = einstein_residual(ex.metric, ex.nconn, "canonical", kappa, ups, u)
    assert rep.max_abs == pytest.approx(0.0, abs=1e-12)


def test_einstein_sphere_vacuum_oracle():
    ex = builtin_metric("sphere2xflat")
    u = sample_points(ex, 1, seed=8)[0]
    rep = einstein_residual(ex.metric, ex.nconn, "canonical", 1.0, None, u)
    curv = d_curvature("canonical", ex.metric, ex.nconn, u)
    ric = ricci_scalar(curv, ex.metric, u)
    g = ex.metric.g_values(u)
    expected = ric.R_h - 0.5 * (2.0) * g  # rhat = 2 for unit sphere, s = 0
    assert np.allclose(rep.res_hh, expected, atol=1e-8)
