"""Builtin bundle metrics and N-connections used by the demos, the
verification suites and the report runner.

Every entry fixes a shape, metric blocks, N-coefficients and a sample box
on which the fields are smooth and nondegenerate.  Identifiers accept
``name:key=value,...`` parameters, e.g. ``sphere2xflat:r=2,m=3``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .bundle import DMetricField, NConnectionField
from .dsl import BundleShape
from .finsler import CartanNConnection, FinslerDMetric, builtin_finsler

__all__ = ["BundleExample", "builtin_metric", "builtin_nconnection", "BUILTIN_METRICS", "sample_points"]


@dataclass
class BundleExample:
    name: str
    shape: BundleShape
    metric: object
    nconn: object
    box: np.ndarray  # (d, 2) coordinate bounds for sampling
    params: dict = field(default_factory=dict)


def _default_box(shape: BundleShape, ylo=0.1, yhi=2.0) -> np.ndarray:
    box = np.empty((shape.d, 2))
    box[: shape.n] = (-1.0, 1.0)
    box[shape.n:] = (ylo, yhi)
    return box


def _parse_params(arg: str) -> dict:
    out = {}
    if not arg:
        return out
    for piece in arg.split(","):
        key, _, val = piece.partition("=")
        out[key.strip()] = float(val) if "." in val or "e" in val.lower() else int(val)
    return out


def builtin_metric(name: str) -> BundleExample:
    """Resolve a builtin metric id to a fully assembled bundle example."""
    head, _, arg = name.partition(":")
    p = _parse_params(arg)
    if head == "flat":
        shape = BundleShape(int(p.get("n", 2)), int(p.get("m", 2)))
        return BundleExample(
            name=name,
            shape=shape,
            metric=DMetricField.flat(shape),
            nconn=NConnectionField.zero(shape),
            box=_default_box(shape),
            params=p,
        )
    if head == "sphere2xflat":
        r = float(p.get("r", 1.0))
        shape = BundleShape(2, int(p.get("m", 2)))
        # lower-triangle entries are ignored; blocks are symmetric by construction
        g = [[f"{r * r}", "0"], [None, f"{r * r}*sin(x1)^2"]]
        h = [["1.0" if i == j else "0" for j in range(shape.m)] for i in range(shape.m)]
        box = _default_box(shape)
        box[0] = (0.4, 2.7)  # keep sin(x1) away from zero
        return BundleExample(
            name=name,
            shape=shape,
            metric=DMetricField(shape, g, h),
            nconn=NConnectionField.zero(shape),
            box=box,
            params={"r": r, **p},
        )
    if head == "anisotropic":
        # y-dependent blocks and a nonzero N: exhibits a nonsymmetric Ricci
        shape = BundleShape(2, 2)
        g = [
            ["1 + 0.2*x1^2 + 0.3*y1^2", "0.1*x1*x2 + 0.05*y1*y2"],
            [None, "1 + 0.2*x2^2 + 0.3*y2^2"],
        ]
        h = [
            ["1 + 0.1*y1^2 + 0.1*x1^2", "0.05*y1*y2"],
            [None, "1 + 0.1*y2^2 + 0.1*x2^2"],
        ]
        N = [
            ["0.2*x2*y1", "0.1*x1*y2"],
            ["0.1*x1*y1 + 0.05*y2", "0.2*x2*y2"],
        ]
        return BundleExample(
            name=name,
            shape=shape,
            metric=DMetricField(shape, g, h),
            nconn=NConnectionField(shape, N),
            box=_default_box(shape),
            params=p,
        )
    if head == "finsler-randers":
        # Finsler-generated d-metric with the Cartan N-connection
        F = builtin_finsler("randers:1|0|1;0.3*sin(x1)|0.2*cos(x2)")
        shape = F.shape
        box = _default_box(shape, ylo=0.2, yhi=1.5)
        return BundleExample(
            name=name,
            shape=shape,
            metric=FinslerDMetric(F),
            nconn=CartanNConnection(F),
            box=box,
            params=p,
        )
    raise ValueError(f"unknown builtin metric {name!r}")


def builtin_nconnection(name: str, shape: BundleShape) -> NConnectionField:
    """Builtin N-coefficient sets on a given shape."""
    head, _, _arg = name.partition(":")
    if head == "zero":
        return NConnectionField.zero(shape)
    if head == "puregauge":
        # N_i^a = d(phi^a)/dx^i for x-only potentials: N-curvature vanishes
        phi_grads = {
            0: ["0.3*x2", "0.3*x1"],  # phi = 0.3 x1 x2
            1: ["0.8*x1", "0.0"],  # phi = 0.4 x1^2
            2: ["0.2*cos(x1)", "0.1"],  # phi = 0.2 sin(x1) + 0.1 x2
        }
        rows = []
        for a in range(shape.m):
            grads = phi_grads[a % 3]
            rows.append([grads[i % 2] for i in range(shape.n)])
        return NConnectionField(shape, rows)
    if head == "linear":
        # N_i^a = A^a_{bi} y^b with constant A
        rows = []
        for a in range(shape.m):
            row = []
            for i in range(shape.n):
                terms = [
                    f"{0.1 * (a + 1) * (b + 2) * (i + 1):.3f}*y{b + 1}"
                    for b in range(shape.m)
                ]
                row.append("+".join(terms))
            rows.append(row)
        return NConnectionField(shape, rows)
    if head == "generic":
        rows = []
        for a in range(shape.m):
            row = []
            for i in range(shape.n):
                row.append(
                    f"0.{(3 * a + 2 * i) % 7 + 1}*sin(x{i % shape.n + 1})*y{a % shape.m + 1}"
                    f" + 0.{(a + i) % 5 + 1}*x{(i + 1) % shape.n + 1}"
                )
            rows.append(row)
        return NConnectionField(shape, rows)
    raise ValueError(f"unknown builtin N-connection {name!r}")


BUILTIN_METRICS = ("flat", "sphere2xflat", "anisotropic", "finsler-randers")


def sample_points(example: BundleExample, count: int, seed: int) -> np.ndarray:
    """Deterministic sample of points inside the example's box.

    Fiber coordinates are drawn with a random sign and a magnitude inside
    the fiber bounds, keeping samples away from the zero section.
    """
    rng = np.random.default_rng(seed)
    shape = example.shape
    pts = np.empty((count, shape.d))
    for k in range(count):
        for c in range(shape.n):
            lo, hi = example.box[c]
            pts[k, c] = rng.uniform(lo, hi)
        for c in range(shape.n, shape.d):
            lo, hi = example.box[c]
            mag = rng.uniform(lo, hi)
            sign = 1.0 if rng.random() < 0.5 else -1.0
            pts[k, c] = sign * mag
    return pts
