"""Runnable invariant suites, one per subsystem.

Each suite returns (name, passed, detail) triples; the CLI's verify
subcommand turns the first failure into a nonzero exit.  The checks
mirror the per-module invariants at a budget small enough to keep the
full run comfortably inside a couple of minutes.
"""

from __future__ import annotations

import math

import numpy as np

import dgeom.bundle as bundle
from .bundle import DMetricField, NConnectionField, adapted_frame, delta_jet, offdiagonal_metric
from .catalog import BUILTIN_METRICS, builtin_metric, builtin_nconnection, sample_points
from .connection import (
    canonical_dconnection,
    levi_civita_anholonomic,
    metric_compatibility_residual,
)
from .curvature import d_curvature, d_torsion, ricci_scalar
from .dsl import BundleShape, parse_field
from .finsler import builtin_finsler, cartan_nconnection, finsler_metric, kahler_form_closure
from .gauge import (
    GaugeLevel1,
    closure_check,
    corrected_curvature,
    desitter_algebra,
    gauge_curvature,
    geometry_gauge_level1,
    sw_dw_residual,
    sw_expand,
    GaugeConstants,
)
from .ncalg import LieStructure, Poly, ThetaMatrix, lie_star, moyal_star, qplane_star, star_commutator
from .spectral import cutoff_moments, flat_gammas, gamma_frame, spectral_action, spin_connection, vielbein

__all__ = ["SUITES", "run_suite", "run_all"]

TEST_FIELDS = [
    "x1*y1 + x2^2",
    "sin(x1)*y2",
    "exp(0.3*x2)*y1*y2",
    "x1^2*y2^2 + 0.5*x2",
    "cos(x1*x2) + y1^3",
    "x1 + x2 + y1 + y2",
    "0.2*x1^3 - y1*y2^2",
    "sin(y1)*cos(x2)",
    "x2*y1^2 - 0.7",
    "exp(0.1*x1*y2)",
]


def _check(results, name, worst, tol):
    results.append((name, worst < tol, f"max residual {worst:.3e} (tol {tol:g})"))


def verify_bundle() -> list:
    results = []
    shape = BundleShape(2, 2)
    N = builtin_nconnection("generic", shape)
    ex = builtin_metric("anisotropic")
    pts = sample_points(ex, 10, seed=101)

    worst = 0.0
    for u in pts:
        fp = adapted_frame(N, u)
        worst = max(worst, float(np.max(np.abs(fp.e @ fp.e_inv - np.eye(4)))))
    _check(results, "bundle: frame/co-frame duality", worst, 1e-12)

    worst = 0.0
    for src in TEST_FIELDS:
        f = parse_field(src, shape)
        for u in pts[:5]:
            W = bundle.anholonomy(N, u).W
            jet2 = f.jet(u, 2)
            Nj2 = N.jets_block(u, 2)
            Nj1 = N.jets_block(u, 1)
            first = [delta_jet(jet2, Nj2, alpha, 2) for alpha in range(4)]
            vals = [j.value for j in first]
            for alpha in range(4):
                for beta in range(4):
                    lhs = (
                        delta_jet(first[beta], Nj1, alpha, 2).value
                        - delta_jet(first[alpha], Nj1, beta, 2).value
                    )
                    rhs = sum(W[g, alpha, beta] * vals[g] for g in range(4))
                    worst = max(worst, abs(lhs - rhs))
    _check(results, "bundle: commutator identity", worst, 1e-8)

    worst = 0.0
    for u in pts:
        W = bundle.anholonomy(N, u).W
        om = bundle.n_curvature(N, u).Omega
        for a in range(2):
            worst = max(worst, float(np.max(np.abs(W[2 + a, :2, :2] - om[a]))))
    _check(results, "bundle: anholonomy matches N-curvature", worst, 1e-10)

    worst = 0.0
    for u in pts:
        out = offdiagonal_metric(ex.metric, ex.nconn, u)
        worst = max(worst, float(np.max(np.abs(out - out.T))))
        det_split = np.linalg.det(ex.metric.g_values(u)) * np.linalg.det(
            ex.metric.h_values(u)
        )
        worst = max(worst, abs(np.linalg.det(out) - det_split) / abs(det_split))
    _check(results, "bundle: off-diagonal symmetry and determinant", worst, 1e-9)
    return results


def verify_connection() -> list:
    results = []
    worst = 0.0
    for name in BUILTIN_METRICS:
        ex = builtin_metric(name)
        for u in sample_points(ex, 10, seed=7):
            conn = canonical_dconnection(ex.metric, ex.nconn, u)
            worst = max(
                worst, metric_compatibility_residual(conn, ex.metric, ex.nconn, u)
            )
    _check(results, "connection: canonical metricity on builtins", worst, 1e-9)

    ex = builtin_metric("anisotropic")
    N = builtin_nconnection("puregauge", ex.shape)
    worst = 0.0
    for u in sample_points(ex, 5, seed=3):
        a = canonical_dconnection(ex.metric, N, u)
        b = levi_civita_anholonomic(ex.metric, N, u)
        for x, y in (
            (a.L_hh, b.L_hh),
            (a.L_vv_h, b.L_vv_h),
            (a.C_hh_v, b.C_hh_v),
            (a.C_vv_v, b.C_vv_v),
        ):
            worst = max(worst, float(np.max(np.abs(x - y))))
    _check(results, "connection: coincidence for vanishing N-curvature", worst, 1e-10)
    return results


def verify_curvature() -> list:
    results = []
    ex = builtin_metric("anisotropic")
    pts = sample_points(ex, 5, seed=11)

    worst = 0.0
    for u in pts:
        tp = d_torsion("canonical", ex.metric, ex.nconn, u)
        T = tp.assemble()
        worst = max(worst, float(np.max(np.abs(T + T.transpose(0, 2, 1)))))
    _check(results, "curvature: torsion antisymmetry", worst, 1e-12)

    worst = 0.0
    for u in pts:
        tp = d_torsion("canonical", ex.metric, ex.nconn, u)
        om = bundle.n_curvature(ex.nconn, u).Omega
        worst = max(worst, float(np.max(np.abs(tp.T_vhh + om))))
    _check(results, "curvature: torsion matches N-curvature", worst, 1e-10)

    worst = 0.0
    for u in pts:
        R = d_curvature("canonical", ex.metric, ex.nconn, u).assemble()
        worst = max(worst, float(np.max(np.abs(R + R.transpose(0, 1, 3, 2)))))
    _check(results, "curvature: antisymmetry in the form indices", worst, 1e-9)

    sph = builtin_metric("sphere2xflat:r=2")
    worst = 0.0
    for u in sample_points(sph, 3, seed=5):
        ric = ricci_scalar(d_curvature("canonical", sph.metric, sph.nconn, u), sph.metric, u)
        worst = max(worst, abs(ric.total - 0.5))
    _check(results, "curvature: sphere scalar 2/r^2", worst, 1e-8)

    worst = 0.0
    for u in pts:
        curv = d_curvature("canonical", ex.metric, ex.nconn, u)
        ric = ricci_scalar(curv, ex.metric, u)
        R = curv.assemble()
        G = np.zeros((4, 4))
        G[:2, :2] = ex.metric.g_values(u)
        G[2:, 2:] = ex.metric.h_values(u)
        total = float(np.einsum("bg,bg->", np.linalg.inv(G), np.einsum("abga->bg", R)))
        worst = max(worst, abs(ric.total - total))
    _check(results, "curvature: scalar equals double contraction", worst, 1e-10)
    return results


def verify_finsler() -> list:
    results = []
    randers = builtin_finsler("randers:1|0|1;0.3*sin(x1)|0.2*cos(x2)")
    rng = np.random.default_rng(4)
    pts = []
    for _ in range(5):
        x = rng.uniform(-1, 1, size=2)
        y = rng.uniform(0.3, 1.5, size=2) * np.where(rng.random(2) < 0.5, -1, 1)
        pts.append(np.concatenate([x, y]))

    worst = 0.0
    for u in pts:
        base = finsler_metric(randers, u).gF
        for s in (0.5, 2.0, 3.0):
            v = u.copy()
            v[2:] *= s
            worst = max(worst, float(np.max(np.abs(finsler_metric(randers, v).gF - base))))
    _check(results, "finsler: fundamental tensor 0-homogeneous", worst, 1e-9)

    worst = 0.0
    for u in pts:
        base = cartan_nconnection(randers, u)
        for s in (0.5, 2.0, 3.0):
            v = u.copy()
            v[2:] *= s
            worst = max(worst, float(np.max(np.abs(cartan_nconnection(randers, v) - s * base))))
    _check(results, "finsler: Cartan coefficients 1-homogeneous", worst, 1e-9)

    riem = builtin_finsler("riemann:1 + 0.5*x1^2|0.2*x1*x2|2 + 0.3*x2^2")
    worst = 0.0
    for u in pts:
        N = cartan_nconnection(riem, u)
        # classical Christoffel by finite differences of the quadratic form
        h = 1e-6

        def g_fn(x):
            return np.array(
                [
                    [1 + 0.5 * x[0] ** 2, 0.2 * x[0] * x[1]],
                    [0.2 * x[0] * x[1], 2 + 0.3 * x[1] ** 2],
                ]
            )

        x = u[:2].copy()
        ginv = np.linalg.inv(g_fn(x))
        dg = np.empty((2, 2, 2))
        for c in range(2):
            up, dn = x.copy(), x.copy()
            up[c] += h
            dn[c] -= h
            dg[c] = (g_fn(up) - g_fn(dn)) / (2 * h)
        gamma = np.empty((2, 2, 2))
        for i in range(2):
            for j in range(2):
                for l in range(2):
                    gamma[i, j, l] = 0.5 * sum(
                        ginv[i, p] * (dg[l, p, j] + dg[j, p, l] - dg[p, j, l])
                        for p in range(2)
                    )
        worst = max(worst, float(np.max(np.abs(N - np.einsum("ijk,k->ij", gamma, u[2:])))))
    _check(results, "finsler: Riemannian reduction of Cartan N", worst, 1e-8)

    worst = 0.0
    for name in ("euclidean", "quartic", "randers:1|0|1;0.3*sin(x1)|0.2*cos(x2)"):
        F = builtin_finsler(name)
        for u in pts:
            worst = max(worst, kahler_form_closure(F, u))
    _check(results, "finsler: almost-Kaehler 2-form closed", worst, 1e-7)
    return results


def verify_spectral() -> list:
    results = []
    worst = 0.0
    for name in ("anisotropic", "sphere2xflat:m=3"):
        ex = builtin_metric(name)
        d = ex.shape.d
        for u in sample_points(ex, 3, seed=2):
            gam = gamma_frame(ex.metric, u)
            G = np.zeros((d, d))
            G[: ex.shape.n, : ex.shape.n] = ex.metric.g_values(u)
            G[ex.shape.n:, ex.shape.n:] = ex.metric.h_values(u)
            G_inv = np.linalg.inv(G)
            eye = np.eye(gam[0].shape[0])
            for a in range(d):
                for b in range(d):
                    anti = gam[a] @ gam[b] + gam[b] @ gam[a]
                    worst = max(worst, float(np.max(np.abs(anti - 2 * G_inv[a, b] * eye))))
    _check(results, "spectral: Clifford relation on builtins", worst, 1e-12)

    ex = builtin_metric("anisotropic")
    worst = 0.0
    for u in sample_points(ex, 3, seed=6):
        sc = spin_connection("canonical", ex.metric, ex.nconn, u)
        for mu in range(4):
            worst = max(
                worst, float(np.max(np.abs(sc.Gamma_S[mu] + sc.Gamma_S[mu].conj().T)))
            )
    _check(results, "spectral: spin connection anti-Hermitian", worst, 1e-12)

    f0, f2 = cutoff_moments()
    worst = abs(f0 - 0.5) + abs(f2 - 1.0)
    f0m, _ = cutoff_moments(4.0, 2.0)
    worst = max(worst, abs(f0m))
    _check(results, "spectral: cutoff moments and cancellation", worst, 1e-15)

    grid = [(np.array([1.0, 0.1, 0.4, 0.3]), 1.0)]
    r1 = builtin_metric("sphere2xflat:r=1")
    r2m = builtin_metric("sphere2xflat:r=2")
    rep1 = spectral_action(r1.metric, r1.nconn, "canonical", 2.0, grid, include_volume=False)
    rep2 = spectral_action(r2m.metric, r2m.nconn, "canonical", 2.0, grid, include_volume=False)
    worst = abs(rep2["lambda2_term"] - rep1["lambda2_term"] / 4.0)
    _check(results, "spectral: curvature scaling of the Lambda^2 term", worst, 1e-8)
    return results


def verify_ncalg() -> list:
    results = []
    rng = np.random.default_rng(1)
    th = np.zeros((4, 4))
    vals = [0.31, -0.17, 0.23, 0.11, -0.29, 0.07]
    k = 0
    for i in range(4):
        for j in range(i + 1, 4):
            th[i, j], th[j, i] = vals[k], -vals[k]
            k += 1
    theta = ThetaMatrix(th)

    def rand_poly(nvars, deg):
        terms = {}
        for _ in range(6):
            e = tuple(int(x) for x in rng.integers(0, deg + 1, size=nvars))
            while sum(e) > deg:
                e = tuple(int(x) for x in rng.integers(0, deg + 1, size=nvars))
            terms[e] = complex(rng.normal(), rng.normal())
        return Poly(nvars, terms)

    worst = 0.0
    for _ in range(50):
        f, g, h = (rand_poly(4, 4) for _ in range(3))
        lhs = moyal_star(moyal_star(f, g, theta), h, theta)
        rhs = moyal_star(f, moyal_star(g, h, theta), theta)
        scale = max(abs(c) for c in lhs.terms.values())
        worst = max(worst, lhs.max_coeff_diff(rhs) / max(1.0, scale))
    _check(results, "ncalg: canonical star associativity", worst, 1e-12)

    worst = 0.0
    for i in range(4):
        for j in range(4):
            comm = star_commutator(
                Poly.coordinate(i, 4), Poly.coordinate(j, 4), "moyal", theta=theta
            )
            worst = max(worst, comm.max_coeff_diff(Poly.const(1j * th[i, j], 4)))
    _check(results, "ncalg: coordinate commutator i theta", worst, 1e-15)

    su2 = LieStructure.su2()
    worst = 0.0
    for i in range(3):
        for j in range(3):
            comm = star_commutator(
                Poly.coordinate(i, 3), Poly.coordinate(j, 3), "lie", structure=su2, order=1
            )
            expected = Poly(3, {})
            for kk in range(3):
                if su2.f[i, j, kk] != 0.0:
                    expected = expected + Poly.coordinate(kk, 3) * (1j * su2.f[i, j, kk])
            worst = max(worst, comm.max_coeff_diff(expected))
    _check(results, "ncalg: Lie star coordinate commutator", worst, 1e-15)

    worst = 0.0
    q = 1.3 - 0.4j
    for _ in range(30):
        mono = [
            Poly(2, {(int(rng.integers(0, 4)), int(rng.integers(0, 4))): complex(rng.normal(), rng.normal())})
            for _ in range(3)
        ]
        f, g, h = mono
        lhs = qplane_star(qplane_star(f, g, q), h, q)
        rhs = qplane_star(f, qplane_star(g, h, q), q)
        worst = max(worst, lhs.max_coeff_diff(rhs))
    _check(results, "ncalg: quantum-plane associativity", worst, 1e-12)

    heis = LieStructure.heisenberg(ThetaMatrix(np.array([[0.0, 0.4], [-0.4, 0.0]])))
    worst = 0.0
    for _ in range(5):
        f2, g2 = rand_poly(2, 2), rand_poly(2, 2)
        lift_f = Poly(3, {e + (0,): c for e, c in f2.terms.items()})
        lift_g = Poly(3, {e + (0,): c for e, c in g2.terms.items()})
        got = lie_star(lift_f, lift_g, heis, 2).substitute(2, 1.0)
        want = moyal_star(f2, g2, ThetaMatrix(np.array([[0.0, 0.4], [-0.4, 0.0]])))
        worst = max(worst, got.max_coeff_diff(want))
    _check(results, "ncalg: Heisenberg reduction to canonical star", worst, 1e-12)
    return results


def verify_gauge() -> list:
    results = []
    alg = desitter_algebra([1, -1, -1, -1, -1], l=1.3)
    worst = max(alg.commutator_residual(), alg.split_residual(), alg.jacobi_residual())
    _check(results, "gauge: de Sitter commutators and Jacobi", worst, 1e-12)

    shape = BundleShape(2, 2)
    rng = np.random.default_rng(2)
    pieces = ["x1*y1", "sin(x2)", "0.3*x1^2", "y2*x2", "cos(x1)*y1", "0.2*x2*y2"]

    def rand_fields(count):
        return np.array(
            [
                parse_field(str(rng.choice(pieces)) + f" + {rng.uniform(-0.5, 0.5):.4f}*x1*x2", shape)
                for _ in range(count)
            ],
            dtype=object,
        )

    algE = desitter_algebra([1, 1, 1, 1, -1], l=1.0)
    L = algE.to_lie_structure()
    lvl = GaugeLevel1(
        np.array([rand_fields(10) for _ in range(4)], dtype=object), rand_fields(10)
    )
    u = np.array([0.4, 0.7, 0.3, -0.5])
    th = np.zeros((4, 4))
    th[0, 1], th[1, 0], th[2, 3], th[3, 2] = 0.3, -0.3, -0.2, 0.2
    theta = ThetaMatrix(th)

    out0 = sw_expand(lvl, ThetaMatrix(np.zeros((4, 4))), L, u)
    outa = sw_expand(lvl, theta, L, u)
    outb = sw_expand(lvl, theta.scaled(2.0), L, u)
    worst = max(
        float(np.max(np.abs(out0.gamma2))),
        float(np.max(np.abs(out0.q2))),
        float(np.max(np.abs(outb.gamma2 - 2 * outa.gamma2))),
        float(np.max(np.abs(outb.q2 - 2 * outa.q2))),
    )
    _check(results, "gauge: expansion vanishes at theta 0 and is linear", worst, 1e-12)

    res = [sw_dw_residual(lvl, theta.scaled(s), L, u) for s in (1.0, 0.5, 0.25)]
    slope_ok = (
        res[0] > 1e-10
        and abs(math.log2(res[0] / res[1]) - 2.0) < 0.1
        and abs(math.log2(res[1] / res[2]) - 2.0) < 0.1
    )
    results.append(
        (
            "gauge: consistency residual decays quadratically",
            slope_ok,
            f"residuals {res[0]:.3e} -> {res[1]:.3e} -> {res[2]:.3e}",
        )
    )

    worst = closure_check(lvl, rand_fields(10), L, theta, u)
    _check(results, "gauge: transformation closure at first order", worst, 1e-9)

    R1, R2 = corrected_curvature(lvl, theta, L, u)
    worst = max(
        float(np.max(np.abs(R1 + R1.transpose(1, 0, 2)))),
        float(np.max(np.abs(R2 + R2.transpose(1, 0, 2, 3)))),
    )
    _check(results, "gauge: corrected curvature antisymmetry", worst, 1e-10)

    ex = builtin_metric("sphere2xflat")
    consts = GaugeConstants(l0=1.7, lam=0.8)
    lvl_geo = geometry_gauge_level1(ex.metric, ex.nconn, "canonical", consts, algE)
    u2 = np.array([1.1, 0.4, 0.3, 0.2])
    R1 = gauge_curvature(lvl_geo, L, u2)
    curv = d_curvature("canonical", ex.metric, ex.nconn, u2).assemble()
    E = vielbein(ex.metric, u2).full()
    E_inv = np.linalg.inv(E)
    worst = 0.0
    for tau in range(4):
        for mu in range(4):
            mat = sum(R1[tau, mu, s] * algE.M[s] for s in range(10))
            pi = (np.outer(E[tau], E[mu]) - np.outer(E[mu], E[tau])) / consts.l0**2
            geo = np.einsum("aA,Bb,AB->ab", E, E_inv.T, curv[:, :, mu, tau])
            worst = max(worst, float(np.max(np.abs(mat[:4, :4] - pi - geo))))
    _check(results, "gauge: field strength matches frame-contracted curvature", worst, 1e-8)
    return results


SUITES = {
    "bundle": verify_bundle,
    "connection": verify_connection,
    "curvature": verify_curvature,
    "finsler": verify_finsler,
    "spectral": verify_spectral,
    "ncalg": verify_ncalg,
    "gauge": verify_gauge,
}


def run_suite(name: str) -> list:
    if name == "all":
        out = []
        for key in SUITES:
            out.extend(SUITES[key]())
        return out
    if name not in SUITES:
        raise KeyError(name)
    return SUITES[name]()


def run_all() -> list:
    return run_suite("all")
