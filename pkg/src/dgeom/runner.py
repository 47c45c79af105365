"""Configuration loading, point sweeps and JSON report assembly."""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .bundle import DegenerateMetricError, DMetricField, NConnectionField, offdiagonal_metric
from .catalog import BundleExample, builtin_metric, builtin_nconnection
from .connection import canonical_dconnection, levi_civita_anholonomic, metric_compatibility_residual
from .curvature import d_curvature, einstein_residual, ricci_scalar
from .dsl import BundleShape, EvalDomainError

__all__ = ["ConfigError", "NumericError", "RunConfig", "run_report", "report_to_json"]

REPORT_VERSION = 1
DEFAULT_COMPUTE = ("metricity", "curvature")


class ConfigError(ValueError):
    """Invalid run configuration."""


class NumericError(ArithmeticError):
    """Numeric degeneracy beyond the configured tolerance."""


@dataclass
class RunConfig:
    """Validated run configuration for a point sweep."""

    shape: BundleShape
    metric: object
    nconn: object
    box: np.ndarray
    connection: str = "canonical"
    count: int = 10
    seed: int = 0
    compute: tuple = DEFAULT_COMPUTE
    kappa: float = 1.0
    sources: dict | None = None
    workers: int = 1
    max_degenerate_fraction: float = 0.2
    echo: dict = field(default_factory=dict)

    @classmethod
    def from_dict(cls, raw: dict) -> "RunConfig":
        if not isinstance(raw, dict):
            raise ConfigError("configuration must be a JSON object")
        metric_spec = raw.get("metric", "flat")
        if isinstance(metric_spec, str):
            try:
                ex = builtin_metric(metric_spec)
            except ValueError as exc:
                raise ConfigError(str(exc)) from exc
            shape, metric, nconn, box = ex.shape, ex.metric, ex.nconn, ex.box
        else:
            shp = raw.get("shape")
            if not shp:
                raise ConfigError("explicit metrics need a 'shape' entry")
            shape = BundleShape(int(shp["n"]), int(shp["m"]))
            metric = DMetricField(shape, metric_spec["g"], metric_spec["h"])
            nconn = NConnectionField.zero(shape)
            from .catalog import _default_box

            box = _default_box(shape)
        n_spec = raw.get("nconnection")
        if n_spec is not None:
            if isinstance(n_spec, str):
                nconn = builtin_nconnection(n_spec, shape)
            else:
                nconn = NConnectionField(shape, n_spec)
        samples = raw.get("samples", {})
        if "box" in samples:
            box = np.asarray(samples["box"], dtype=np.float64)
            if box.shape != (shape.d, 2):
                raise ConfigError(f"sample box must be {shape.d} coordinate ranges")
        connection = raw.get("connection", "canonical")
        if connection not in ("canonical", "levi-civita"):
            raise ConfigError(f"unknown connection selector {connection!r}")
        compute = tuple(raw.get("compute", DEFAULT_COMPUTE))
        known = {"metricity", "curvature", "einstein", "offdiagonal"}
        bad = set(compute) - known
        if bad:
            raise ConfigError(f"unknown compute requests: {sorted(bad)}")
        return cls(
            shape=shape,
            metric=metric,
            nconn=nconn,
            box=box,
            connection=connection,
            count=int(samples.get("count", 10)),
            seed=int(samples.get("seed", 0)),
            compute=compute,
            kappa=float(raw.get("kappa", 1.0)),
            sources=raw.get("sources"),
            workers=int(raw.get("workers", 1)),
            max_degenerate_fraction=float(raw.get("max_degenerate_fraction", 0.2)),
            echo=raw,
        )


def _sample(cfg: RunConfig) -> np.ndarray:
    ex = BundleExample(
        name="run", shape=cfg.shape, metric=cfg.metric, nconn=cfg.nconn, box=cfg.box
    )
    from .catalog import sample_points

    return sample_points(ex, cfg.count, cfg.seed)


def _point_record(cfg: RunConfig, u: np.ndarray) -> dict:
    rec: dict = {"u": [float(x) for x in u]}
    try:
        if cfg.connection == "canonical":
            conn = canonical_dconnection(cfg.metric, cfg.nconn, u)
        else:
            conn = levi_civita_anholonomic(cfg.metric, cfg.nconn, u)
        if "metricity" in cfg.compute:
            rec["metricity"] = metric_compatibility_residual(conn, cfg.metric, cfg.nconn, u)
        if "curvature" in cfg.compute or "einstein" in cfg.compute:
            curv = d_curvature(cfg.connection, cfg.metric, cfg.nconn, u)
            ric = ricci_scalar(curv, cfg.metric, u)
            rec["rhat"] = ric.rhat
            rec["s"] = ric.s
            rec["scalar"] = ric.total
            rec["ricci_asymmetry"] = ric.asymmetry
        if "einstein" in cfg.compute:
            rep = einstein_residual(
                cfg.metric, cfg.nconn, cfg.connection, cfg.kappa, cfg.sources, u
            )
            rec["einstein_max"] = rep.max_abs
        if "offdiagonal" in cfg.compute:
            out = offdiagonal_metric(cfg.metric, cfg.nconn, u)
            rec["offdiagonal_det"] = float(np.linalg.det(out))
    except (DegenerateMetricError, EvalDomainError) as exc:
        rec["degenerate"] = True
        rec["diagnostic"] = str(exc)
    return rec


def run_report(cfg: RunConfig) -> dict:
    """Evaluate the requested quantities on the sample sweep.

    Points that hit a metric degeneracy are recorded with a diagnostic and
    skipped; if their fraction exceeds the configured bound a
    :class:`NumericError` is raised.  The record order is the sample
    order, so reports are reproducible for a fixed seed.
    """
    pts = _sample(cfg)
    if cfg.workers > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            records = list(pool.map(lambda u: _point_record(cfg, u), pts))
    else:
        records = [_point_record(cfg, u) for u in pts]
    degenerate = sum(1 for r in records if r.get("degenerate"))
    if cfg.count and degenerate / cfg.count > cfg.max_degenerate_fraction:
        raise NumericError(
            f"{degenerate}/{cfg.count} sample points degenerate (limit "
            f"{cfg.max_degenerate_fraction:.0%})"
        )
    summary: dict = {"count": cfg.count, "degenerate_points": degenerate}
    for key in ("metricity", "einstein_max", "ricci_asymmetry"):
        vals = [r[key] for r in records if key in r]
        if vals:
            summary[f"max_{key}"] = max(vals)
    for key in ("rhat", "s", "scalar"):
        vals = [r[key] for r in records if key in r]
        if vals:
            summary[f"mean_{key}"] = math.fsum(vals) / len(vals)
    report = {
        "version": REPORT_VERSION,
        "config": cfg.echo,
        "points": records,
        "summary": summary,
    }
    _check_finite(report)
    return report


def _check_finite(obj) -> None:
    if isinstance(obj, dict):
        for v in obj.values():
            _check_finite(v)
    elif isinstance(obj, (list, tuple)):
        for v in obj:
            _check_finite(v)
    elif isinstance(obj, float) and not math.isfinite(obj):
        raise NumericError("non-finite value in report")


def report_to_json(report: dict) -> str:
    """Canonical JSON rendering: sorted keys, stable float formatting."""
    return json.dumps(report, sort_keys=True, indent=2)
