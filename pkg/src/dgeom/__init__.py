"""Numerical tensor calculus on bundles with nonlinear connections.

Subpackages cover the adapted-frame geometry (bundle, connection,
curvature), Finsler/Lagrange metric generation, Dirac-operator and
heat-kernel densities, polynomial star products, and the first-order
Seiberg-Witten expansion for the de Sitter gauge algebra.
"""

from .dsl import BundleShape, ScalarField, parse_field, eval_jet
from .jets import Jet

__version__ = "0.1.0"

__all__ = ["BundleShape", "ScalarField", "parse_field", "eval_jet", "Jet", "__version__"]
