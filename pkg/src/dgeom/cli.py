"""Command line interface.

Subcommands: ``analyze`` (point-sweep reports), ``finsler`` (metric and
connection diagnostics from an F expression), ``star`` (star products on
polynomial literals), ``sw`` (Seiberg-Witten expansion from a JSON
config) and ``verify`` (invariant suites).  Exit codes: 0 success,
1 verification failure, 2 usage or configuration error, 3 parse error,
4 numeric degeneracy.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import __version__
from .dsl import DslError, EvalDomainError
from .runner import ConfigError, NumericError, RunConfig, report_to_json, run_report

EXIT_OK = 0
EXIT_VERIFY = 1
EXIT_CONFIG = 2
EXIT_PARSE = 3
EXIT_NUMERIC = 4


def _build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="dgeom", description=__doc__)
    top.add_argument("--version", action="version", version=f"dgeom {__version__}")
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="run a configured point sweep and emit a JSON report")
    p.add_argument("--config", required=True, help="path to a JSON run configuration")
    p.add_argument("--points", type=int, help="override the sample count")
    p.add_argument("--seed", type=int, help="override the sample seed")
    p.add_argument("--out", help="write the report here instead of stdout")

    p = sub.add_parser("finsler", help="diagnostics for a Finsler function")
    p.add_argument("--f", required=True, help="F expression or builtin id")
    p.add_argument("--n", type=int, default=2, help="base dimension")
    p.add_argument("--points", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")

    p = sub.add_parser("star", help="star products of polynomial literals")
    p.add_argument("--product", required=True, choices=["moyal", "lie", "qplane"])
    p.add_argument("--lhs", required=True)
    p.add_argument("--rhs", required=True)
    p.add_argument("--vars", type=int, help="number of variables (default per product)")
    p.add_argument("--theta", help="comma-separated upper triangle of theta")
    p.add_argument("--structure", help="'su2', 'desitter', or a JSON file with f")
    p.add_argument("--order", type=int, default=2, help="lie product truncation order")
    p.add_argument("--q", help="quantum-plane parameter, e.g. '0.7+0.2j'")
    p.add_argument("--commutator", action="store_true", help="emit f*g - g*f instead")

    p = sub.add_parser("sw", help="first-order Seiberg-Witten expansion")
    p.add_argument("--config", required=True, help="path to a JSON gauge configuration")
    p.add_argument("--out")

    p = sub.add_parser("verify", help="run invariant suites")
    p.add_argument(
        "--suite",
        default="all",
        help="all | bundle | connection | curvature | finsler | spectral | ncalg | gauge",
    )
    return top


def _emit(text: str, out_path: str | None) -> None:
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
            if not text.endswith("\n"):
                fh.write("\n")
    else:
        print(text)


def _cmd_analyze(args) -> int:
    try:
        with open(args.config) as fh:
            raw = json.load(fh)
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except json.JSONDecodeError as exc:
        print(f"error: config is not valid JSON: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.points is not None:
        raw.setdefault("samples", {})["count"] = args.points
    if args.seed is not None:
        raw.setdefault("samples", {})["seed"] = args.seed
    try:
        cfg = RunConfig.from_dict(raw)
    except DslError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (ConfigError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        report = run_report(cfg)
    except NumericError as exc:
        print(f"numeric degeneracy: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    _emit(report_to_json(report), args.out)
    return EXIT_OK


def _cmd_finsler(args) -> int:
    from .finsler import (
        FinslerFunction,
        builtin_finsler,
        cartan_nconnection,
        finsler_metric,
        kahler_form_closure,
    )

    try:
        if any(args.f.startswith(head) for head in ("euclidean", "quartic", "riemann", "randers")):
            F = builtin_finsler(args.f)
        else:
            F = FinslerFunction(args.f, args.n)
    except DslError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    rng = np.random.default_rng(args.seed)
    records = []
    degenerate = 0
    for _ in range(args.points):
        x = rng.uniform(-1, 1, size=F.n)
        y = rng.uniform(0.3, 1.5, size=F.n) * np.where(rng.random(F.n) < 0.5, -1, 1)
        u = np.concatenate([x, y])
        try:
            mp = finsler_metric(F, u)
            rec = {
                "u": [float(v) for v in u],
                "F": F.value(u),
                "gF": [[float(v) for v in row] for row in mp.gF],
                "rank": mp.rank,
                "min_eigenvalue": mp.min_eigenvalue,
                "homogeneity_residual": F.homogeneity_residual(u),
                "cartan_N": [[float(v) for v in row] for row in cartan_nconnection(F, u)],
                "kahler_closure_residual": kahler_form_closure(F, u),
            }
        except EvalDomainError as exc:
            degenerate += 1
            rec = {"u": [float(v) for v in u], "degenerate": True, "diagnostic": str(exc)}
        records.append(rec)
    if degenerate == args.points:
        print("numeric degeneracy: every sample point failed", file=sys.stderr)
        return EXIT_NUMERIC
    out = {
        "version": 1,
        "config": {"f": args.f, "n": F.n, "points": args.points, "seed": args.seed},
        "points": records,
        "summary": {
            "max_homogeneity_residual": max(
                (r.get("homogeneity_residual", 0.0) for r in records), default=0.0
            ),
            "max_kahler_closure_residual": max(
                (r.get("kahler_closure_residual", 0.0) for r in records), default=0.0
            ),
            "degenerate_points": degenerate,
        },
    }
    _emit(json.dumps(out, sort_keys=True, indent=2), args.out)
    return EXIT_OK


def _poly_to_json(p) -> dict:
    return {
        "nvars": p.nvars,
        "terms": [
            {"exponents": list(e), "re": c.real, "im": c.imag}
            for e, c in sorted(p.terms.items())
        ],
    }


def _cmd_star(args) -> int:
    from .gauge import desitter_algebra
    from .ncalg import LieStructure, ThetaMatrix, lie_star, moyal_star, parse_poly, qplane_star

    try:
        if args.product == "moyal":
            if not args.theta:
                print("error: --theta required for the canonical product", file=sys.stderr)
                return EXIT_CONFIG
            vals = [float(v) for v in args.theta.split(",")]
            n = args.vars or int((1 + np.sqrt(1 + 8 * len(vals))) / 2)
            if n * (n - 1) // 2 != len(vals):
                print("error: theta must list the strict upper triangle", file=sys.stderr)
                return EXIT_CONFIG
            th = np.zeros((n, n))
            k = 0
            for i in range(n):
                for j in range(i + 1, n):
                    th[i, j], th[j, i] = vals[k], -vals[k]
                    k += 1
            theta = ThetaMatrix(th)
            f = parse_poly(args.lhs, n)
            g = parse_poly(args.rhs, n)
            out = moyal_star(f, g, theta)
            if args.commutator:
                out = out - moyal_star(g, f, theta)
        elif args.product == "lie":
            if args.structure in (None, "su2"):
                L = LieStructure.su2()
            elif args.structure == "desitter":
                L = desitter_algebra([1, -1, -1, -1, -1], l=1.0).to_lie_structure()
            else:
                with open(args.structure) as fh:
                    L = LieStructure(np.asarray(json.load(fh)["f"], dtype=float))
            n = args.vars or L.dim
            if n != L.dim:
                print("error: variable count must equal the algebra dimension", file=sys.stderr)
                return EXIT_CONFIG
            f = parse_poly(args.lhs, n)
            g = parse_poly(args.rhs, n)
            out = lie_star(f, g, L, args.order)
            if args.commutator:
                out = out - lie_star(g, f, L, args.order)
        else:
            if not args.q:
                print("error: --q required for the quantum plane", file=sys.stderr)
                return EXIT_CONFIG
            q = complex(args.q)
            f = parse_poly(args.lhs, 2)
            g = parse_poly(args.rhs, 2)
            out = qplane_star(f, g, q)
            if args.commutator:
                out = out - qplane_star(g, f, q)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ValueError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    print(json.dumps({"product": args.product, "result": _poly_to_json(out)}, sort_keys=True, indent=2))
    return EXIT_OK


def _cmd_sw(args) -> int:
    from .dsl import BundleShape, parse_field
    from .gauge import GaugeLevel1, closure_check, desitter_algebra, sw_dw_residual, sw_expand
    from .ncalg import LieStructure, ThetaMatrix

    try:
        with open(args.config) as fh:
            raw = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        shp = raw["shape"]
        shape = BundleShape(int(shp["n"]), int(shp["m"]))
        structure = raw.get("structure", "desitter-euclid4")
        if structure == "su2":
            L = LieStructure.su2()
        elif structure == "desitter-lorentz":
            L = desitter_algebra([1, -1, -1, -1, -1], l=raw.get("l", 1.0)).to_lie_structure()
        elif structure == "desitter-euclid4":
            L = desitter_algebra([1, 1, 1, 1, -1], l=raw.get("l", 1.0)).to_lie_structure()
        else:
            L = LieStructure(np.asarray(structure["f"], dtype=float))
        theta = ThetaMatrix(np.asarray(raw["theta"], dtype=float))
        q1 = np.array(
            [[parse_field(src, shape) for src in row] for row in raw["q1"]], dtype=object
        )
        gamma1 = (
            np.array([parse_field(src, shape) for src in raw["gamma1"]], dtype=object)
            if "gamma1" in raw
            else None
        )
        lvl = GaugeLevel1(q1, gamma1)
        u = np.asarray(raw.get("point", [0.0] * shape.d), dtype=float)
    except DslError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (KeyError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    out = sw_expand(lvl, theta, L, u)
    result = {
        "version": 1,
        "config": raw,
        "gamma2": [[float(v) for v in row] for row in out.gamma2],
        "q2": [[[float(v) for v in row] for row in block] for block in out.q2],
    }
    if gamma1 is not None:
        residuals = [float(sw_dw_residual(lvl, theta.scaled(s), L, u)) for s in (1.0, 0.5, 0.25)]
        result["dw_residuals"] = residuals
        if residuals[0] > 1e-14 and residuals[1] > 0 and residuals[2] > 0:
            result["dw_decay_slopes"] = [
                float(np.log2(residuals[0] / residuals[1])),
                float(np.log2(residuals[1] / residuals[2])),
            ]
    _emit(json.dumps(result, sort_keys=True, indent=2), args.out)
    return EXIT_OK


def _cmd_verify(args) -> int:
    from .verify import SUITES, run_suite

    known = set(SUITES) | {"all"}
    if args.suite not in known:
        print(f"error: unknown suite {args.suite!r}; choose from {sorted(known)}", file=sys.stderr)
        return EXIT_CONFIG
    results = run_suite(args.suite)
    failed = [name for name, ok, _ in results if not ok]
    for name, ok, detail in results:
        print(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
    if failed:
        print(f"FAILED: {failed[0]}", file=sys.stderr)
        return EXIT_VERIFY
    print(f"all {len(results)} checks passed")
    return EXIT_OK


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits with 2 on usage errors already
        return int(exc.code or 0)
    handlers = {
        "analyze": _cmd_analyze,
        "finsler": _cmd_finsler,
        "star": _cmd_star,
        "sw": _cmd_sw,
        "verify": _cmd_verify,
    }
    return handlers[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
