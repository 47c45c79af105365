"""Finsler metrics, the Cartan nonlinear connection, and the closed 2-form.

A Randers norm F = sqrt(a_ij y^i y^j) + b_i(x) y^i is the simplest
genuinely non-Riemannian Finsler function.  Its fundamental tensor is the
y-Hessian of F^2/2; the geodesic spray generates the Cartan nonlinear
connection; and the associated 2-form g_ij delta-y^i wedge dx^j closes,
which is the almost-Kaehler property checked numerically below.
"""

import numpy as np

from dgeom.connection import canonical_dconnection, metric_compatibility_residual
from dgeom.finsler import (
    CartanNConnection,
    FinslerDMetric,
    builtin_finsler,
    cartan_nconnection,
    finsler_metric,
    kahler_form_closure,
)

F = builtin_finsler("randers:1|0|1;0.3*sin(x1)|0.2*cos(x2)")
u = np.array([0.5, -0.3, 0.9, 0.7])

mp = finsler_metric(F, u)
print("fundamental tensor g^[F]:")
print(np.array_str(mp.gF, precision=5))
print("rank:", mp.rank, " min eigenvalue:", f"{mp.min_eigenvalue:.4f}")

# 1-homogeneity of F forces 0-homogeneity of the metric
v = u.copy()
v[2:] *= 2.0
print("g^[F](x, 2y) - g^[F](x, y) max:", np.max(np.abs(finsler_metric(F, v).gF - mp.gF)))

N = cartan_nconnection(F, u)
print("\nCartan nonlinear connection N^i_j:")
print(np.array_str(N, precision=5))
print("1-homogeneity: N(x,2y) - 2N(x,y) max:",
      np.max(np.abs(cartan_nconnection(F, v) - 2 * N)))

print("\nclosedness of the almost-Kaehler 2-form, max d(theta) component:",
      kahler_form_closure(F, u))

# the Finsler data feed the whole connection pipeline
M = FinslerDMetric(F)
NC = CartanNConnection(F)
conn = canonical_dconnection(M, NC, u)
res = metric_compatibility_residual(conn, M, NC, u)
print("metricity of the canonical connection on the Finsler bundle:", res)
