"""Command-line surface: graph I/O, analysis subcommands, sweeps and reports.

Single analyses emit JSON; sweeps emit CSV (plus rendered figures next to the
CSV unless disabled).  Exit codes: 0 success, 2 validation failure, 3
computation refusal.  Every error is written as one machine-readable JSON
line on stderr.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .curvature import cd_check, curvature
from .errors import (
    CubeRigidityError,
    InvalidParameter,
    MalformedGraph,
    RefusalError,
    ValidationError,
)
from .graphs import (
    WeightedGraph,
    cartesian_product,
    graph_from_json_dict,
    graph_to_json_dict,
    hypercube,
    perturb,
    vertex_function,
)
from .obata import is_distance_composed, obata_report
from .rigidity import almost_rigidity_report
from .spectral import spectrum
from .sweep import run_sweep, rows_to_csv


@dataclass
class RunConfig:
    """Parsed invocation: one command plus its validated parameters."""

    command: str
    input_paths: list[str] = field(default_factory=list)
    output_path: Optional[str] = None
    K: Optional[float] = None
    N: float = math.inf
    d: Optional[int] = None
    c: float = 1.0
    level: Optional[int] = None
    base_vertex: Optional[str] = None
    sigma_w: list[float] = field(default_factory=list)
    sigma_m: list[float] = field(default_factory=list)
    seed: Optional[int] = None
    seeds: list[int] = field(default_factory=list)
    tolerances: dict[str, float] = field(default_factory=dict)
    function_path: Optional[str] = None
    eigenfunction_index: Optional[int] = None
    jobs: int = 1
    figures: bool = True
    method: str = "auto"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        print(
            json.dumps({"error": "InvalidArguments", "message": message}),
            file=sys.stderr,
        )
        raise SystemExit(2)


def _parse_inf(text: str) -> float:
    if text.strip().lower() in ("inf", "infinity"):
        return math.inf
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number or 'inf', got {text!r}")


def build_parser() -> _Parser:
    parser = _Parser(prog="cube-rigidity", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help_text, inputs=0):
        p = sub.add_parser(name, help=help_text)
        if inputs >= 1:
            p.add_argument("input", help="graph JSON file")
        if inputs >= 2:
            p.add_argument("input2", help="second graph JSON file")
        p.add_argument("--output", "-o", help="output file (default: stdout)")
        return p

    p = add("gen-hypercube", "write the weighted d-cube H_d(c) as graph JSON")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--c", type=float, default=1.0)

    p = add("spectrum", "eigenvalues and m-orthonormal eigenfunctions", inputs=1)

    p = add("curvature", "sharp CD(K,N) constant and its argmin vertex", inputs=1)
    p.add_argument("--N", type=_parse_inf, default=math.inf)

    p = add("cd-check", "verify the CD(K,N) matrix condition at every vertex", inputs=1)
    p.add_argument("--K", type=float, required=True)
    p.add_argument("--N", type=_parse_inf, default=math.inf)

    p = add("rigidity", "hypercube detection, deficit and Frobenius distance", inputs=1)
    p.add_argument("--K", type=float, help="CD constant; defaults to curvature(G)")
    p.add_argument("--d", type=int, help="target dimension; defaults to deg_max")
    p.add_argument(
        "--method",
        choices=("auto", "exact", "isomorphism-restricted"),
        default="auto",
        help="Frobenius search space",
    )

    p = add("obata", "per-base-vertex lift and projection residuals", inputs=1)
    p.add_argument("--K", type=float, help="CD constant; defaults to curvature(G)")
    p.add_argument("--base-vertex", help="single base vertex (default: all)")

    p = add("product", "Cartesian product of two unit-measure graphs", inputs=2)

    p = add("perturb", "multiplicative noise on weights and measures", inputs=1)
    p.add_argument("--sigma-w", type=float, default=0.0)
    p.add_argument("--sigma-m", type=float, default=0.0)
    p.add_argument("--seed", type=int, required=True)

    p = add("sweep", "perturbation grid: CSV report plus figures")
    p.add_argument("--d", type=int, default=3)
    p.add_argument("--c", type=float, default=1.0)
    p.add_argument("--sigma-w", type=float, nargs="+", required=True)
    p.add_argument("--sigma-m", type=float, nargs="+", default=[0.0])
    p.add_argument("--seeds", type=int, nargs="+", required=True)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--no-figures", action="store_true", help="skip figure rendering")

    p = add("distance-composed", "is a function constant on spheres about a vertex?", inputs=1)
    p.add_argument("--base-vertex", required=True)
    p.add_argument("--tol", type=float, default=1e-8)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--function-file", help="JSON object mapping vertex id to value")
    g.add_argument("--eigenfunction", type=int, help="use the i-th eigenfunction")

    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig(command=args.command)
    if getattr(args, "input", None) is not None:
        cfg.input_paths.append(args.input)
    if getattr(args, "input2", None) is not None:
        cfg.input_paths.append(args.input2)
    cfg.output_path = getattr(args, "output", None)
    cfg.K = getattr(args, "K", None)
    cfg.N = getattr(args, "N", math.inf)
    cfg.d = getattr(args, "d", None)
    cfg.c = getattr(args, "c", 1.0)
    cfg.base_vertex = getattr(args, "base_vertex", None)
    cfg.seed = getattr(args, "seed", None)
    cfg.method = getattr(args, "method", "auto")
    cfg.jobs = getattr(args, "jobs", 1)
    cfg.figures = not getattr(args, "no_figures", False)
    cfg.function_path = getattr(args, "function_file", None)
    cfg.eigenfunction_index = getattr(args, "eigenfunction", None)
    if args.command == "distance-composed":
        cfg.tolerances["distance_composed"] = args.tol
    sw = getattr(args, "sigma_w", None)
    sm = getattr(args, "sigma_m", None)
    cfg.sigma_w = list(sw) if isinstance(sw, list) else ([sw] if sw is not None else [])
    cfg.sigma_m = list(sm) if isinstance(sm, list) else ([sm] if sm is not None else [])
    cfg.seeds = list(getattr(args, "seeds", []) or [])
    return cfg


def _load_graph(path: str) -> WeightedGraph:
    try:
        with open(path) as handle:
            obj = json.load(handle)
    except FileNotFoundError:
        raise ValidationError(f"input file not found: {path}")
    except json.JSONDecodeError as exc:
        raise MalformedGraph(f"{path}: not valid JSON ({exc})")
    return graph_from_json_dict(obj)


def _json_default(value):
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    raise TypeError(f"not JSON serializable: {type(value)}")


def _emit(payload: dict, output_path: Optional[str]) -> None:
    text = json.dumps(payload, indent=2, sort_keys=False, default=_json_default) + "\n"
    if output_path:
        Path(output_path).write_text(text)
    else:
        sys.stdout.write(text)


def run(cfg: RunConfig) -> int:
    """Execute one parsed command; raises CubeRigidityError subclasses on failure."""
    if cfg.command == "gen-hypercube":
        G = hypercube(cfg.d, cfg.c)
        _emit(graph_to_json_dict(G), cfg.output_path)
        return 0

    if cfg.command == "product":
        G1 = _load_graph(cfg.input_paths[0])
        G2 = _load_graph(cfg.input_paths[1])
        _emit(graph_to_json_dict(cartesian_product(G1, G2)), cfg.output_path)
        return 0

    if cfg.command == "perturb":
        G = _load_graph(cfg.input_paths[0])
        out = perturb(G, cfg.sigma_w[0], cfg.sigma_m[0], cfg.seed)
        _emit(graph_to_json_dict(out), cfg.output_path)
        return 0

    if cfg.command == "spectrum":
        G = _load_graph(cfg.input_paths[0])
        _emit(spectrum(G).to_json_dict(), cfg.output_path)
        return 0

    if cfg.command == "curvature":
        G = _load_graph(cfg.input_paths[0])
        K, vertex = curvature(G, cfg.N)
        _emit(
            {"K_min": K, "argmin_vertex": vertex, "N": "inf" if math.isinf(cfg.N) else cfg.N},
            cfg.output_path,
        )
        return 0

    if cfg.command == "cd-check":
        G = _load_graph(cfg.input_paths[0])
        report = cd_check(G, cfg.K, cfg.N)
        _emit(
            {
                "holds": report.holds,
                "worst_vertex": report.worst_vertex,
                "min_eigenvalue": report.min_eigenvalue,
                "K": cfg.K,
                "N": "inf" if math.isinf(cfg.N) else cfg.N,
            },
            cfg.output_path,
        )
        return 0

    if cfg.command == "rigidity":
        G = _load_graph(cfg.input_paths[0])
        report = almost_rigidity_report(G, K=cfg.K, d=cfg.d, frobenius_method=cfg.method)
        _emit(report.to_json_dict(), cfg.output_path)
        return 0

    if cfg.command == "obata":
        G = _load_graph(cfg.input_paths[0])
        spectral = spectrum(G)
        K = cfg.K if cfg.K is not None else curvature(G)[0]
        k_source = "given" if cfg.K is not None else "estimated"
        bases = [cfg.base_vertex] if cfg.base_vertex else list(G.vertex_ids)
        records = []
        for x0 in bases:
            try:
                records.append(obata_report(G, spectral, x0, K).to_json_dict())
            except CubeRigidityError as exc:
                records.append(
                    {"base_vertex": x0, "error": exc.code, "message": exc.message}
                )
        _emit({"K": K, "k_source": k_source, "reports": records}, cfg.output_path)
        return 0

    if cfg.command == "sweep":
        rows = run_sweep(
            sigma_ws=cfg.sigma_w,
            seeds=cfg.seeds,
            d=cfg.d,
            c=cfg.c,
            sigma_ms=cfg.sigma_m,
            jobs=cfg.jobs,
        )
        text = rows_to_csv(rows)
        if cfg.output_path:
            Path(cfg.output_path).write_text(text)
            if cfg.figures:
                from .plots import render_sweep_figures

                render_sweep_figures(rows, cfg.output_path)
        else:
            sys.stdout.write(text)
        return 0

    if cfg.command == "distance-composed":
        G = _load_graph(cfg.input_paths[0])
        tol = cfg.tolerances.get("distance_composed", 1e-8)
        if cfg.function_path is not None:
            try:
                with open(cfg.function_path) as handle:
                    mapping = json.load(handle)
            except FileNotFoundError:
                raise ValidationError(f"function file not found: {cfg.function_path}")
            except json.JSONDecodeError as exc:
                raise ValidationError(f"{cfg.function_path}: not valid JSON ({exc})")
            h = vertex_function(G, mapping)
            source = {"function_file": cfg.function_path}
        else:
            spectral = spectrum(G)
            h = spectral.eigenfunction(cfg.eigenfunction_index)
            source = {"eigenfunction": cfg.eigenfunction_index}
        composed = is_distance_composed(G, h, cfg.base_vertex, tol)
        _emit(
            {
                "composed": composed,
                "base_vertex": cfg.base_vertex,
                "tol": tol,
                **source,
            },
            cfg.output_path,
        )
        return 0

    raise InvalidParameter(f"unknown command {cfg.command!r}")


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    cfg = config_from_args(args)
    try:
        return run(cfg)
    except RefusalError as exc:
        print(json.dumps({"error": exc.code, "message": exc.message}), file=sys.stderr)
        return 3
    except ValidationError as exc:
        print(json.dumps({"error": exc.code, "message": exc.message}), file=sys.stderr)
        return 2
    except CubeRigidityError as exc:
        print(json.dumps({"error": exc.code, "message": exc.message}), file=sys.stderr)
        return 2


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
