"""The three deformed products on polynomial coordinates.

Constant commutators give the canonical (Moyal-type) product, linear ones
the Lie-type product from the exponential kernel, and the quantum plane
reorders monomials with a q-weight.  On polynomials the canonical series
terminates, so every identity below is exact to roundoff.
"""

import numpy as np

from dgeom.ncalg import (
    LieStructure,
    Poly,
    ThetaMatrix,
    lie_star,
    moyal_star,
    parse_poly,
    qplane_star,
    star_commutator,
)

theta = ThetaMatrix(np.array([[0.0, 0.5], [-0.5, 0.0]]))
u1, u2 = Poly.coordinate(0, 2), Poly.coordinate(1, 2)

print("[u1, u2] under the canonical product:",
      star_commutator(u1, u2, "moyal", theta=theta))

f = parse_poly("(1+2i)*u1^2*u2 - u2", 2)
g = parse_poly("u1*u2 + 3", 2)
h = parse_poly("u2^2 - i*u1", 2)
assoc = moyal_star(moyal_star(f, g, theta), h, theta).max_coeff_diff(
    moyal_star(f, moyal_star(g, h, theta), theta)
)
print("canonical associativity defect on a random triple:", assoc)

su2 = LieStructure.su2()
x, y = Poly.coordinate(0, 3), Poly.coordinate(1, 3)
print("\n[x, y] under the rotation-algebra product (order 1):",
      star_commutator(x, y, "lie", structure=su2, order=1))
print("second-order correction on (u1, u1*u2):",
      lie_star(x, x * y, su2, 2) - lie_star(x, x * y, su2, 1))

# the central extension of a constant theta reproduces the canonical product
heis = LieStructure.heisenberg(theta)
lift = lambda p: Poly(3, {e + (0,): c for e, c in p.terms.items()})
f2 = parse_poly("u1*u2 + u1^2", 2)
g2 = parse_poly("u2^2 - u1", 2)
via_lie = lie_star(lift(f2), lift(g2), heis, 2).substitute(2, 1.0)
print("Heisenberg-lift vs canonical product:",
      via_lie.max_coeff_diff(moyal_star(f2, g2, theta)))

q = 0.7 + 0.2j
u, v = Poly.coordinate(0, 2), Poly.coordinate(1, 2)
print("\nquantum plane: v * u =", qplane_star(v, u, q), " (q^-1 u v)")
print("u * v - q v * u =",
      (qplane_star(u, v, q) - qplane_star(v, u, q) * q))
