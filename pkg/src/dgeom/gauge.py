"""de Sitter gauge algebra, nonlinear potential, and the first-order
Seiberg-Witten expansion.

Gauge data are Lie-algebra-valued coefficient fields q1[mu, a] over the
bundle coordinates, with structure constants normalized by
``[I^a, I^b] = i f^{ab}_c I^c`` for Hermitian generators ``I = i M`` built
from the real so(5) matrices; with this normalization the f appearing in
all coefficient formulas are the real constants of ``[M_a, M_b] =
f^{ab}_c M_c``, and a connection assembled from frame/connection blocks
has gauge curvature equal to the geometric curvature 2-form.

The enveloping level is truncated after the symmetric second order: an
element is a pair (level-1 coefficients, symmetric level-2 coefficients).
Products of generators are normal-ordered with the commutation rule and
projected back onto this truncation, which is what the closure and
delta-W consistency checks exercise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .jets import Jet
from .ncalg import LieStructure, ThetaMatrix

__all__ = [
    "DeSitterAlgebra",
    "GaugeConstants",
    "GaugeLevel1",
    "GaugeLevel2",
    "desitter_algebra",
    "nonlinear_potential",
    "gauge_curvature",
    "gauge_variation",
    "sw_expand",
    "closure_check",
    "sw_dw_residual",
    "corrected_curvature",
    "lagrangian_density",
    "geometry_gauge_level1",
    "action_density",
]


# -- de Sitter algebra ---------------------------------------------------


@dataclass
class DeSitterAlgebra:
    """so(eta)(5) in the faithful 5x5 realization
    (M_AB)^C_D = eta_AD delta^C_B - eta_BD delta^C_A.

    Generators are listed pairwise (A < B) lexicographically; the first six
    pairs lie inside the 4x4 block (rotation part F), the last four involve
    the fifth direction and give the translational part P = M_{5 alpha}/l.
    """

    eta: np.ndarray
    l: float
    pairs: tuple
    M: np.ndarray  # (10, 5, 5)

    def gen(self, A: int, B: int) -> np.ndarray:
        """M_AB for arbitrary index order (antisymmetric, zero diagonal)."""
        if A == B:
            return np.zeros((5, 5))
        if A < B:
            return self.M[self.pairs.index((A, B))]
        return -self.M[self.pairs.index((B, A))]

    @property
    def F(self) -> list[np.ndarray]:
        return [self.gen(a, b) for a in range(4) for b in range(a + 1, 4)]

    @property
    def P(self) -> list[np.ndarray]:
        return [self.gen(4, a) / self.l for a in range(4)]

    def hermitian_generators(self) -> list[np.ndarray]:
        """I^s = i M_s; they satisfy [I^a, I^b] = i f^{ab}_c I^c with the
        real structure constants of the M basis."""
        return [1j * m for m in self.M]

    def to_lie_structure(self) -> LieStructure:
        return LieStructure.from_matrices(list(self.M))

    def commutator_residual(self) -> float:
        """Deviation of all generator pairs from the so(eta)(5) relations."""
        eta = self.eta
        worst = 0.0
        for (A, B) in self.pairs:
            for (C, D) in self.pairs:
                lhs = self.gen(A, B) @ self.gen(C, D) - self.gen(C, D) @ self.gen(A, B)
                rhs = (
                    eta[A] * (A == C) * self.gen(B, D)
                    - eta[B] * (B == C) * self.gen(A, D)
                    - eta[A] * (A == D) * self.gen(B, C)
                    + eta[B] * (B == D) * self.gen(A, C)
                )
                worst = max(worst, float(np.max(np.abs(lhs - rhs))))
        return worst

    def split_residual(self) -> float:
        """Deviation of the F/P split relations implied by the so(5)
        commutators: [P_a, P_b] = eta_55 l^-2 F_ab and
        [P_a, F_bc] = eta_ac P_b - eta_ab P_c."""
        eta = self.eta
        P = self.P
        worst = 0.0
        for a in range(4):
            for b in range(4):
                lhs = P[a] @ P[b] - P[b] @ P[a]
                rhs = eta[4] / self.l**2 * self.gen(a, b)
                worst = max(worst, float(np.max(np.abs(lhs - rhs))))
        for a in range(4):
            for b in range(4):
                for c in range(4):
                    F_bc = self.gen(b, c)
                    lhs = P[a] @ F_bc - F_bc @ P[a]
                    rhs = eta[a] * ((a == c) * P[b] - (a == b) * P[c])
                    worst = max(worst, float(np.max(np.abs(lhs - rhs))))
        return worst

    def jacobi_residual(self) -> float:
        worst = 0.0
        for X in self.M:
            for Y in self.M:
                for Z in self.M:
                    val = (
                        _comm(X, _comm(Y, Z))
                        + _comm(Y, _comm(Z, X))
                        + _comm(Z, _comm(X, Y))
                    )
                    worst = max(worst, float(np.max(np.abs(val))))
        return worst


def _comm(a, b):
    return a @ b - b @ a


def desitter_algebra(eta, l: float = 1.0) -> DeSitterAlgebra:
    """Construct the algebra for a five-sign diagonal metric ``eta``."""
    eta = np.asarray(eta, dtype=np.float64)
    if eta.shape != (5,) or not np.all(np.abs(eta) == 1.0):
        raise ValueError("eta must be five entries of +-1")
    pairs = tuple((A, B) for A in range(5) for B in range(A + 1, 5))
    M = np.zeros((10, 5, 5))
    for k, (A, B) in enumerate(pairs):
        for C in range(5):
            for D in range(5):
                M[k, C, D] = eta[A] * (A == D) * (C == B) - eta[B] * (B == D) * (C == A)
    return DeSitterAlgebra(eta=eta, l=float(l), pairs=pairs, M=M)


@dataclass(frozen=True)
class GaugeConstants:
    """Coupling constants of the gauge gravity Lagrangian; l^2 = 2 l0^2 lam
    and lam1 = -3/l0 hold by construction."""

    l0: float
    lam: float

    @property
    def lam1(self) -> float:
        return -3.0 / self.l0

    @property
    def l2(self) -> float:
        return 2.0 * self.l0**2 * self.lam


# -- gauge field containers ----------------------------------------------


class GaugeLevel1:
    """Lie-algebra-valued potential q1[mu, a] and parameter gamma1[a].

    Entries are field-like (DSL fields or jet-backed adapters) over ``dim``
    coordinates; ``S`` is the gauge-algebra dimension.
    """

    def __init__(self, q1, gamma1=None):
        self.q1 = np.asarray(q1, dtype=object)
        self.dim, self.S = self.q1.shape
        self.gamma1 = None if gamma1 is None else np.asarray(gamma1, dtype=object)

    def q_jets(self, u, order: int) -> np.ndarray:
        out = np.empty((self.dim, self.S), dtype=object)
        for mu in range(self.dim):
            for a in range(self.S):
                out[mu, a] = self.q1[mu, a]._jet_unchecked(u, order)
        return out

    def gamma_jets(self, u, order: int) -> np.ndarray:
        out = np.empty(self.S, dtype=object)
        for a in range(self.S):
            out[a] = self.gamma1[a]._jet_unchecked(u, order)
        return out


@dataclass
class GaugeLevel2:
    """Enveloping-level output of the Seiberg-Witten expansion."""

    gamma2: np.ndarray  # (S, S)
    q2: np.ndarray  # (dim, S, S)


# -- curvature, variation, expansion ---------------------------------------


def _curvature_from_jets(qj: np.ndarray, f: np.ndarray):
    """R1[tau, mu, b] jets from q jets (order drops by one)."""
    dim, S = qj.shape
    out = np.empty((dim, dim, S), dtype=object)
    for tau in range(dim):
        for mu in range(dim):
            for b in range(S):
                acc = qj[mu, b].partial(tau) - qj[tau, b].partial(mu)
                for e in range(S):
                    for c in range(S):
                        if f[e, c, b] == 0.0:
                            continue
                        acc = acc + qj[tau, e] * qj[mu, c] * f[e, c, b]
                out[tau, mu, b] = acc
    return out


def gauge_curvature(level1: GaugeLevel1, L: LieStructure, u) -> np.ndarray:
    """Field strength R1_{tau mu, b} = d_tau q_mu - d_mu q_tau +
    f^{ec}_b q_{tau,e} q_{mu,c}; antisymmetric in (tau, mu)."""
    qj = level1.q_jets(u, 1)
    jets = _curvature_from_jets(qj, L.f)
    dim, S = level1.dim, level1.S
    out = np.empty((dim, dim, S))
    for idx in np.ndindex(dim, dim, S):
        out[idx] = jets[idx].value
    return out


def gauge_variation(level1: GaugeLevel1, L: LieStructure, u) -> np.ndarray:
    """delta q1_{mu,a} = d_mu gamma1_a - f^{bc}_a gamma1_b q1_{mu,c}."""
    qj = level1.q_jets(u, 0)
    gj = level1.gamma_jets(u, 1)
    dim, S = level1.dim, level1.S
    out = np.empty((dim, S))
    for mu in range(dim):
        for a in range(S):
            acc = gj[a].partial(mu).value
            for b in range(S):
                for c in range(S):
                    if L.f[b, c, a] == 0.0:
                        continue
                    acc -= L.f[b, c, a] * gj[b].value * qj[mu, c].value
            out[mu, a] = acc
    return out


def sw_expand(level1: GaugeLevel1, theta: ThetaMatrix, L: LieStructure, u) -> GaugeLevel2:
    """First-order Seiberg-Witten data.

    gamma2_{ab} = 1/2 theta^{nu mu} (d_nu gamma1_a) q1_{mu,b};
    q2_{mu,ab} = -1/2 theta^{nu tau} q1_{nu,a} (d_tau q1_{mu,b} + R1_{tau mu,b}).
    """
    th = theta.theta
    dim, S = level1.dim, level1.S
    if th.shape[0] != dim:
        raise ValueError("theta size must match the coordinate count")
    qj = level1.q_jets(u, 1)
    R1 = _curvature_from_jets(qj, L.f)
    gamma2 = np.zeros((S, S))
    if level1.gamma1 is not None:
        gj = level1.gamma_jets(u, 1)
        for a in range(S):
            for b in range(S):
                acc = 0.0
                for nu in range(dim):
                    for mu in range(dim):
                        if th[nu, mu] == 0.0:
                            continue
                        acc += 0.5 * th[nu, mu] * gj[a].partial(nu).value * qj[mu, b].value
                gamma2[a, b] = acc
    q2 = np.zeros((dim, S, S))
    for mu in range(dim):
        for a in range(S):
            for b in range(S):
                acc = 0.0
                for nu in range(dim):
                    for tau in range(dim):
                        if th[nu, tau] == 0.0:
                            continue
                        acc += (
                            -0.5
                            * th[nu, tau]
                            * qj[nu, a].value
                            * (qj[mu, b].partial(tau).value + R1[tau, mu, b].value)
                        )
                q2[mu, a, b] = acc
    return GaugeLevel2(gamma2=gamma2, q2=q2)


def corrected_curvature(level1: GaugeLevel1, theta: ThetaMatrix, L: LieStructure, u):
    """Curvature with its first-order noncommutative correction.

    Returns (R1, R2) where R2[tau, lam, a, b] multiplies the symmetric
    second-order generator product:

        R2 = theta^{mu nu} ( R1_{tau mu, a} R1_{lam nu, b}
             - 1/2 q1_{mu,a} [ (D_nu R1_{tau lam, b}) + d_nu R1_{tau lam, b} ] )

    with D_nu R1_{tau lam, b} = d_nu R1_{tau lam, b} +
    q1_{nu,c} R1_{tau lam, d} f^{cd}_b.
    """
    th = theta.theta
    dim, S = level1.dim, level1.S
    qj = level1.q_jets(u, 2)
    R1_jets = _curvature_from_jets(qj, L.f)  # order 1

    R1 = np.empty((dim, dim, S))
    for idx in np.ndindex(dim, dim, S):
        R1[idx] = R1_jets[idx].value

    def DR(nu, tau, lam, b):
        acc = R1_jets[tau, lam, b].partial(nu).value
        for c in range(S):
            for dd in range(S):
                if L.f[c, dd, b] == 0.0:
                    continue
                acc += qj[nu, c].value * R1[tau, lam, dd] * L.f[c, dd, b]
        return acc

    R2 = np.zeros((dim, dim, S, S))
    for tau in range(dim):
        for lam in range(dim):
            for a in range(S):
                for b in range(S):
                    acc = 0.0
                    for mu in range(dim):
                        for nu in range(dim):
                            if th[mu, nu] == 0.0:
                                continue
                            acc += th[mu, nu] * (
                                R1[tau, mu, a] * R1[lam, nu, b]
                                - 0.5
                                * qj[mu, a].value
                                * (DR(nu, tau, lam, b) + R1_jets[tau, lam, b].partial(nu).value)
                            )
                    R2[tau, lam, a, b] = acc
    # second-order coefficients multiply the symmetric generator products
    R2 = 0.5 * (R2 + R2.transpose(0, 1, 3, 2))
    return R1, R2


# -- enveloping reduction ---------------------------------------------------


def _normal_order(word: tuple, coeff: complex, f: np.ndarray, out: dict):
    """Rewrite a generator word into sorted order with [I^a, I^b] = i f I."""
    for k in range(len(word) - 1):
        a, b = word[k], word[k + 1]
        if a > b:
            swapped = word[:k] + (b, a) + word[k + 2:]
            _normal_order(swapped, coeff, f, out)
            for c in range(f.shape[0]):
                if f[a, b, c] == 0.0:
                    continue
                shorter = word[:k] + (c,) + word[k + 2:]
                _normal_order(shorter, coeff * 1j * f[a, b, c], f, out)
            return
    out[word] = out.get(word, 0j) + coeff


def _project_word(word: tuple, coeff: complex, f: np.ndarray, c1, c2):
    """Accumulate a sorted word into level-1/level-2 symmetric storage,
    dropping the genuinely third-order symmetric part."""
    if len(word) == 1:
        c1[word[0]] += coeff
    elif len(word) == 2:
        a, b = word
        if a == b:
            c2[a, a] += coeff
        else:
            # I^a I^b = sym + (i/2) f^{ab}_c I^c
            c2[a, b] += coeff / 2
            c2[b, a] += coeff / 2
            for c in range(f.shape[0]):
                if f[a, b, c] != 0.0:
                    c1[c] += coeff * 0.5j * f[a, b, c]
    # longer sorted words are third order or higher: projected out


def _reduce_product(words: list, f: np.ndarray, S: int):
    """Project a sum of generator words onto (level-1, level-2 symmetric)."""
    c1 = np.zeros(S, dtype=complex)
    c2 = np.zeros((S, S), dtype=complex)
    ordered: dict = {}
    for word, coeff in words:
        _normal_order(tuple(word), complex(coeff), f, ordered)
    for word, coeff in ordered.items():
        _project_word(word, coeff, f, c1, c2)
    return c1, c2


def closure_check(
    level1: GaugeLevel1,
    sigma1,
    L: LieStructure,
    theta: ThetaMatrix,
    u,
) -> float:
    """Residual of the composition law of two restricted transformations.

    Applies (delta_gamma delta_sigma - delta_sigma delta_gamma) to q1 and
    subtracts the transformation generated by i(sigma * gamma - gamma *
    sigma), whose level-1 part is computed through the truncated enveloping
    star product to first order in theta.
    """
    f = L.f
    th = theta.theta
    dim, S = level1.dim, level1.S
    qj = level1.q_jets(u, 1)
    gj = level1.gamma_jets(u, 1)
    sj = np.empty(S, dtype=object)
    for a in range(S):
        sj[a] = sigma1[a]._jet_unchecked(u, 1)

    gv = np.array([g.value for g in gj])
    sv = np.array([s.value for s in sj])
    qv = np.array([[qj[mu, a].value for a in range(S)] for mu in range(dim)])
    dg = np.array([[gj[a].partial(mu).value for a in range(S)] for mu in range(dim)])
    ds = np.array([[sj[a].partial(mu).value for a in range(S)] for mu in range(dim)])

    # [delta_gamma, delta_sigma] q: only the f-term of one variation feels
    # the other variation
    lhs = np.zeros((dim, S))
    for mu in range(dim):
        dgam_q = dg[mu] - np.einsum("bca,b,c->a", f, gv, qv[mu])
        dsig_q = ds[mu] - np.einsum("bca,b,c->a", f, sv, qv[mu])
        lhs[mu] = -np.einsum("bca,b,c->a", f, sv, dgam_q) + np.einsum(
            "bca,b,c->a", f, gv, dsig_q
        )

    # composite parameter i(sigma * gamma - gamma * sigma), level-1 part,
    # including the first-order theta correction of the star product
    lam1 = np.zeros((dim + 1, S), dtype=complex)  # [0]: value, [1:]: d/du
    words_val = []
    for a in range(S):
        for b in range(S):
            words_val.append(((a, b), 1j * sv[a] * gv[b]))
            words_val.append(((a, b), -1j * gv[a] * sv[b]))
            for nu in range(dim):
                for mu in range(dim):
                    if th[nu, mu] == 0.0:
                        continue
                    corr = 1j * 0.5j * th[nu, mu]
                    words_val.append(((a, b), corr * ds[nu, a] * dg[mu, b]))
                    words_val.append(((a, b), -corr * dg[nu, a] * ds[mu, b]))
    c1_val, _c2_val = _reduce_product(words_val, f, S)

    # derivative of the level-1 composite (theta term dropped: it needs
    # second derivatives and is symmetric, hence level-2 only)
    for mu in range(dim):
        words_d = []
        for a in range(S):
            for b in range(S):
                words_d.append(
                    ((a, b), 1j * (ds[mu, a] * gv[b] + sv[a] * dg[mu, b]))
                )
                words_d.append(
                    ((a, b), -1j * (dg[mu, a] * sv[b] + gv[a] * ds[mu, b]))
                )
        d1, _ = _reduce_product(words_d, f, S)
        lam1[1 + mu] = d1
    lam1[0] = c1_val

    rhs = np.zeros((dim, S))
    for mu in range(dim):
        rhs[mu] = np.real(lam1[1 + mu]) - np.einsum(
            "bca,b,c->a", f, np.real(lam1[0]), qv[mu]
        )
    return float(np.max(np.abs(lhs - rhs)))


def sw_dw_residual(
    level1: GaugeLevel1, theta: ThetaMatrix, L: LieStructure, u
) -> float:
    """Residual of the enveloping consistency equation for the expansion.

    The enveloping potential Q = q1 + q2 and parameter Lambda = gamma1 +
    gamma2 built by the expansion must satisfy delta Q_mu = d_mu Lambda +
    i [Lambda *, Q_mu], where the left side is the variation induced by
    the restricted transformation of q1.  Both sides are evaluated in the
    symmetric-ordered algebra truncated after second order, with the star
    product expanded through theta^2.  The expansion solves the equation
    at first order: the level-2 projection matches identically and the
    level-1 projection is violated only by second-order star tails, so
    the returned maximum residual scales as theta^2.
    """
    f = L.f
    th = theta.theta
    dim, S = level1.dim, level1.S
    qj = level1.q_jets(u, 2)
    gj = level1.gamma_jets(u, 2)
    qv = np.array([[qj[mu, a].value for a in range(S)] for mu in range(dim)])
    gv = np.array([g.value for g in gj])
    dq = np.array(
        [
            [[qj[mu, a].partial(nu).value for a in range(S)] for mu in range(dim)]
            for nu in range(dim)
        ]
    )  # dq[nu, mu, a]
    ddq = np.array(
        [
            [
                [
                    [qj[mu, a].partial(nu).partial(tau).value for a in range(S)]
                    for mu in range(dim)
                ]
                for nu in range(dim)
            ]
            for tau in range(dim)
        ]
    )  # ddq[tau, nu, mu, a]
    dg = np.array([[gj[a].partial(mu).value for a in range(S)] for mu in range(dim)])
    ddg = np.array(
        [
            [[gj[a].partial(mu).partial(nu).value for a in range(S)] for mu in range(dim)]
            for nu in range(dim)
        ]
    )  # ddg[nu, mu, a]

    R1 = np.zeros((dim, dim, S))
    for tau in range(dim):
        for mu in range(dim):
            R1[tau, mu] = dq[tau, mu] - dq[mu, tau] + np.einsum(
                "ecb,e,c->b", f, qv[tau], qv[mu]
            )

    # delta q1 and its coordinate derivatives
    dlt = np.zeros((dim, S))
    ddlt = np.zeros((dim, dim, S))  # ddlt[nu, mu, a] = d_nu (delta q_mu)_a
    for mu in range(dim):
        dlt[mu] = dg[mu] - np.einsum("bca,b,c->a", f, gv, qv[mu])
        for nu in range(dim):
            ddlt[nu, mu] = ddg[nu, mu] - np.einsum(
                "bca,b,c->a", f, dg[nu], qv[mu]
            ) - np.einsum("bca,b,c->a", f, gv, dq[nu, mu])

    def dR1(nu, tau, mu):
        return (
            ddq[nu, tau, mu]
            - ddq[nu, mu, tau]
            + np.einsum("ecb,e,c->b", f, dq[nu, tau], qv[mu])
            + np.einsum("ecb,e,c->b", f, qv[tau], dq[nu, mu])
        )

    def deltaR1(tau, mu):
        return (
            ddlt[tau, mu]
            - ddlt[mu, tau]
            + np.einsum("ecb,e,c->b", f, dlt[tau], qv[mu])
            + np.einsum("ecb,e,c->b", f, qv[tau], dlt[mu])
        )

    # left side: induced variation of q2, symmetrized
    lhs = np.zeros((dim, S, S))
    for mu in range(dim):
        for a in range(S):
            for b in range(S):
                acc = 0.0
                for nu in range(dim):
                    for tau in range(dim):
                        if th[nu, tau] == 0.0:
                            continue
                        acc += -0.5 * th[nu, tau] * (
                            dlt[nu][a] * (dq[tau, mu, b] + R1[tau, mu, b])
                            + qv[nu, a]
                            * (ddlt[tau, mu][b] + deltaR1(tau, mu)[b])
                        )
                lhs[mu, a, b] = acc
    lhs = 0.5 * (lhs + lhs.transpose(0, 2, 1))

    # gamma2 and q2 values and derivatives; the coefficients multiply the
    # symmetric generator products, so only their symmetric parts enter
    def sym(arr):
        return 0.5 * (arr + arr.swapaxes(-1, -2))

    gamma2 = sym(0.5 * np.einsum("nm,na,mb->ab", th, dg, qv))
    dgamma2 = np.zeros((dim, S, S))
    for mu in range(dim):
        dgamma2[mu] = sym(
            0.5
            * (
                np.einsum("nm,na,mb->ab", th, ddg[mu], qv)
                + np.einsum("nm,na,mb->ab", th, dg, dq[mu])
            )
        )
    q2 = np.zeros((dim, S, S))
    dq2 = np.zeros((dim, dim, S, S))  # dq2[nu, mu, a, b]
    for mu in range(dim):
        for nu in range(dim):
            for tau in range(dim):
                if th[nu, tau] == 0.0:
                    continue
                q2[mu] += -0.5 * th[nu, tau] * np.einsum(
                    "a,b->ab", qv[nu], dq[tau, mu] + R1[tau, mu]
                )
                for rho in range(dim):
                    dq2[rho, mu] += -0.5 * th[nu, tau] * (
                        np.einsum("a,b->ab", dq[rho, nu], dq[tau, mu] + R1[tau, mu])
                        + np.einsum(
                            "a,b->ab",
                            qv[nu],
                            ddq[rho, tau, mu] + dR1(rho, tau, mu),
                        )
                    )
    q2 = sym(q2)
    dq2 = sym(dq2)

    # right side: i(Lambda * Q_mu - Q_mu * Lambda) reduced in the algebra,
    # star product through theta^2 where the data support it
    worst = 0.0
    nz = [(nu, tau) for nu in range(dim) for tau in range(dim) if th[nu, tau] != 0.0]
    for mu in range(dim):
        words = []
        for a in range(S):
            for c in range(S):
                # (gamma1, q1): pointwise, theta and theta^2 layers
                words.append(((a, c), 1j * gv[a] * qv[mu, c]))
                words.append(((c, a), -1j * qv[mu, c] * gv[a]))
                for nu, tau in nz:
                    corr = 1j * 0.5j * th[nu, tau]
                    words.append(((a, c), corr * dg[nu, a] * dq[tau, mu, c]))
                    words.append(((c, a), -corr * dq[nu, mu, c] * dg[tau, a]))
                    for nu2, tau2 in nz:
                        corr2 = 1j * (0.5j) ** 2 * 0.5 * th[nu, tau] * th[nu2, tau2]
                        words.append(
                            ((a, c), corr2 * ddg[nu2, nu, a] * ddq[tau2, tau, mu, c])
                        )
                        words.append(
                            ((c, a), -corr2 * ddq[nu2, nu, mu, c] * ddg[tau2, tau, a])
                        )
        for a in range(S):
            for c in range(S):
                for dd in range(S):
                    # (gamma1, q2) and (gamma2, q1): pointwise and theta;
                    # the word lists the left factor's generators first
                    words.append(((a, c, dd), 1j * gv[a] * q2[mu, c, dd]))
                    words.append(((c, dd, a), -1j * q2[mu, c, dd] * gv[a]))
                    words.append(((c, dd, a), 1j * gamma2[c, dd] * qv[mu, a]))
                    words.append(((a, c, dd), -1j * qv[mu, a] * gamma2[c, dd]))
                    for nu, tau in nz:
                        corr = 1j * 0.5j * th[nu, tau]
                        words.append(
                            ((a, c, dd), corr * dg[nu, a] * dq2[tau, mu, c, dd])
                        )
                        words.append(
                            ((c, dd, a), -corr * dq2[nu, mu, c, dd] * dg[tau, a])
                        )
                        words.append(
                            ((c, dd, a), corr * dgamma2[nu, c, dd] * dq[tau, mu, a])
                        )
                        words.append(
                            ((a, c, dd), -corr * dq[nu, mu, a] * dgamma2[tau, c, dd])
                        )
        for a in range(S):
            for b in range(S):
                for c in range(S):
                    for dd in range(S):
                        # (gamma2, q2): pointwise only (already second order)
                        words.append(((a, b, c, dd), 1j * gamma2[a, b] * q2[mu, c, dd]))
                        words.append(((c, dd, a, b), -1j * q2[mu, c, dd] * gamma2[a, b]))
        c1, c2 = _reduce_product(words, f, S)
        rhs1 = dg[mu] + np.real(c1)
        rhs2 = dgamma2[mu] + np.real(c2)
        worst = max(worst, float(np.max(np.abs(rhs1 - dlt[mu]))))
        worst = max(worst, float(np.max(np.abs(rhs2 - lhs[mu]))))
    return worst


# -- nonlinear de Sitter potential ------------------------------------------


def nonlinear_potential(omega_vals, theta_vals, t_fields, eta4, u):
    """Dress an so(4)-valued potential with a coset section.

    ``omega_vals``: (dim, 4, 4) antisymmetric rotation coefficients per
    direction; ``theta_vals``: (dim, 4) translational coefficients;
    ``t_fields``: five field-like sections (t^1..t^4, t^5).  Returns the
    dressed (Gamma, theta) rows and the bordered 5x5 matrix per direction,
    whose corner entry vanishes identically.
    """
    omega_vals = np.asarray(omega_vals, dtype=np.float64)
    theta_vals = np.asarray(theta_vals, dtype=np.float64)
    eta4 = np.asarray(eta4, dtype=np.float64)
    u = np.asarray(u, dtype=np.float64)
    dim = omega_vals.shape[0]
    t_jets = [t._jet_unchecked(u, 1) for t in t_fields]
    t_up = np.array([t.value for t in t_jets[:4]])
    t5 = t_jets[4].value
    if abs(1.0 + t5) < 1e-12:
        raise ZeroDivisionError("nonlinear parametrization pole: 1 + t5 = 0")
    t_dn = eta4 * t_up  # lowered flat index
    dt = np.array([[t_jets[a].partial(mu).value for a in range(5)] for mu in range(dim)])

    Gamma = np.zeros((dim, 4, 4))
    theta_out = np.zeros((dim, 4))
    bordered = np.zeros((dim, 5, 5))
    for mu in range(dim):
        Dt = dt[mu, :4] + omega_vals[mu] @ t_up
        Dt_dn = eta4 * Dt
        denom = 1.0 + t5
        Gamma[mu] = omega_vals[mu] - (
            np.outer(t_up, Dt_dn) - np.outer(Dt, t_dn)
        ) / denom
        theta_out[mu] = (
            t5 * theta_vals[mu]
            + Dt
            - t_up * (dt[mu, 4] + float(theta_vals[mu] @ t_dn)) / denom
        )
        bordered[mu, :4, :4] = Gamma[mu]
        bordered[mu, :4, 4] = theta_out[mu]
        bordered[mu, 4, :4] = eta4 * theta_out[mu]
    return Gamma, theta_out, bordered


# -- Lagrangian density and the geometry bridge -----------------------------


def lagrangian_density(R_flat, T_flat, consts: GaugeConstants, G, scalar_curv):
    """Gauge gravitational Lagrangian density.

    ``R_flat``: (dim, dim, 4, 4) curvature with flat index pair;
    ``T_flat``: (dim, dim, 4) torsion with one flat index; ``G``: the
    (dim, dim) metric for raising form indices; ``scalar_curv``: the total
    scalar curvature.  Returns

        [ 1/(2 l^2) T.T + 1/(8 lam) R.R - (scalar - 2 lam1)/l^2 ] sqrt|det G|.
    """
    G = np.asarray(G, dtype=np.float64)
    G_inv = np.linalg.inv(G)
    R_flat = np.asarray(R_flat, dtype=np.float64)
    T_flat = np.asarray(T_flat, dtype=np.float64)
    t2 = np.einsum("mna,pqa,mp,nq->", T_flat, T_flat, G_inv, G_inv)
    r2 = np.einsum("mnab,pqba,mp,nq->", R_flat, R_flat, G_inv, G_inv)
    vol = math.sqrt(abs(float(np.linalg.det(G))))
    dens = (
        t2 / (2.0 * consts.l2)
        + r2 / (8.0 * consts.lam)
        - (scalar_curv - 2.0 * consts.lam1) / consts.l2
    )
    return dens * vol


def geometry_gauge_level1(M, N, selector, consts: GaugeConstants, algebra: DeSitterAlgebra):
    """Assemble a Lie-algebra-valued q1 from a d-metric per the bordered
    connection form: rotation block from the flat-index d-connection,
    translation block from the vielbein over l0.

    The returned GaugeLevel1 carries jet-backed entries so the gauge
    curvature can differentiate through the geometric pipeline; with
    real so(5) coefficients the field strength reproduces the geometric
    curvature 2-form exactly.
    """
    from .dsl import JetField
    from .spectral import spin_coefficients_jets, vielbein_jets

    d = M.shape.d
    basis = np.stack([m.ravel() for m in algebra.M], axis=1)
    cache: dict = {}

    def coefficients(u, order):
        key = (tuple(np.asarray(u, dtype=np.float64)), order)
        hit = cache.get(key)
        if hit is not None:
            return hit
        gamma_flat = spin_coefficients_jets(selector, M, N, u, order)
        e_h, e_v = vielbein_jets(M, u, order)
        zero = Jet.constant(0.0, d, order)
        n = M.shape.n
        out = np.empty((d, 10), dtype=object)
        for mu in range(d):
            # bordered so(5) element: [[Gamma^a_b, chi^a / l0], [chi_b / l0, 0]]
            mat = np.empty((5, 5), dtype=object)
            for i in range(5):
                for j in range(5):
                    mat[i, j] = zero
            for ab in range(4):
                for bb in range(4):
                    mat[ab, bb] = gamma_flat[mu, ab, bb]
            # chi^a_mu: vielbein row of the co-frame (E[mu, abar])
            E_row = [
                (e_h[mu, ab] if (mu < n and ab < n) else
                 e_v[mu - n, ab - n] if (mu >= n and ab >= n) else zero)
                for ab in range(4)
            ]
            for ab in range(4):
                mat[ab, 4] = E_row[ab] * (1.0 / consts.l0)
                mat[4, ab] = E_row[ab] * (1.0 / consts.l0)
            # project the 5x5 jet matrix onto the generator basis entrywise
            flat = np.array(
                [[mat[i, j] for j in range(5)] for i in range(5)], dtype=object
            ).ravel()
            coeff_rows = np.linalg.pinv(basis)
            coeffs = np.empty(10, dtype=object)
            for s in range(10):
                acc = None
                for k in range(25):
                    w = coeff_rows[s, k]
                    if abs(w) < 1e-14:
                        continue
                    t = flat[k] * float(w)
                    acc = t if acc is None else acc + t
                coeffs[s] = acc if acc is not None else zero
            out[mu] = coeffs
        cache.clear()
        cache[key] = out
        return out

    fields = np.empty((d, 10), dtype=object)
    for mu in range(d):
        for s in range(10):
            fields[mu, s] = JetField(
                M.shape, (lambda mm, ss: lambda u, order: coefficients(u, order)[mm, ss])(mu, s)
            )
    return GaugeLevel1(fields)


def action_density(R1, G, algebra: DeSitterAlgebra) -> float:
    """Pointwise invariant density 1/4 R_{tau lam} R^{tau lam} with the
    generator trace form of the hermitian representation."""
    I = algebra.hermitian_generators()
    K = np.real(np.array([[np.trace(I[a] @ I[b]) for b in range(10)] for a in range(10)]))
    G_inv = np.linalg.inv(np.asarray(G, dtype=np.float64))
    return 0.25 * float(
        np.einsum("tla,pqb,tp,lq,ab->", R1, R1, G_inv, G_inv, K)
    )
