"""Command-line front end.

Subcommands: dtm (field values), distance (point-to-point metric), geodesic
(distance plus polyline CSV), graph (build and export), experiment (desk
studies), validate (invariant suite). Results go to stdout, diagnostics to
stderr. Exit codes: 0 success, 1 failed validation, 2 bad input.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from fdtm import __version__, csvio
from fdtm.errors import InvalidInputError
from fdtm.graph import (
    Complete,
    EndpointAverageDtm,
    KNearest,
    SampleFermat,
    SubdividedDtm,
    Yao,
    build_graph,
    default_degree,
    edge_count_bound_check,
)
from fdtm.measures import DtmParams, PointCloud, WeightedMeasure, make_empirical
from fdtm.experiments import ExperimentConfig, run_experiment
from fdtm.paths import fdtm_query
from fdtm.dtm import SpatialIndex, dtm_batch
from fdtm.runtime import set_threads
from fdtm.validation import run_validation


def _parse_point(text: str) -> np.ndarray:
    try:
        return np.array([float(v) for v in text.split(",")], dtype=np.float64)
    except ValueError:
        raise InvalidInputError(f"expected comma-separated coordinates, got {text!r}")


def _parse_sizes(text: str) -> tuple[int, ...]:
    """Either 'a,b,c' or a doubling range 'a..b'."""
    try:
        if ".." in text:
            lo, hi = (int(v) for v in text.split("..", 1))
            if lo < 1 or hi < lo:
                raise ValueError
            sizes = []
            n = lo
            while n <= hi:
                sizes.append(n)
                n *= 2
            return tuple(sizes)
        return tuple(int(v) for v in text.split(","))
    except ValueError:
        raise InvalidInputError(f"cannot parse sample sizes from {text!r}")


def _load_cloud(path: str, weighted: bool):
    if weighted:
        pts, w = csvio.read_measure(path)
        return WeightedMeasure(pts, w)
    return PointCloud(csvio.read_cloud(path))


def _topology(args, n: int):
    name = args.graph
    if name == "complete":
        return Complete()
    if name == "knn":
        return KNearest(args.k if args.k else default_degree(n))
    if name == "yao":
        return Yao(args.cones if args.cones else default_degree(n))
    raise InvalidInputError(f"unknown graph topology {name!r}")


def _weight_mode(args, n: int):
    name = args.weights
    if name == "subdiv":
        r = args.subdiv if args.subdiv else max(1, math.ceil(math.log(max(2, n))))
        return SubdividedDtm(r)
    if name == "avg":
        return EndpointAverageDtm()
    if name == "fermat":
        return SampleFermat(args.alpha)
    raise InvalidInputError(f"unknown weight mode {name!r}")


def _add_graph_flags(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--m", type=float, default=0.1)
    sp.add_argument("--p", type=float, default=2.0)
    sp.add_argument("--beta", type=float, default=2.0)
    sp.add_argument("--graph", choices=["complete", "knn", "yao"], default="complete")
    sp.add_argument("--k", type=int, default=None)
    sp.add_argument("--cones", type=int, default=None)
    sp.add_argument("--weights", choices=["subdiv", "avg", "fermat"], default="subdiv")
    sp.add_argument("--subdiv", type=int, default=None)
    sp.add_argument("--alpha", type=float, default=1.1)
    sp.add_argument("--seed", type=int, default=0)


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="fdtm", description=__doc__)
    ap.add_argument("--version", action="version", version=f"fdtm {__version__}")
    ap.add_argument("--threads", type=int, default=None, help="worker threads")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("dtm", help="evaluate the field at query points")
    sp.add_argument("--input", required=True)
    sp.add_argument("--weighted", action="store_true", help="input has a mass column")
    sp.add_argument("--query", action="append", default=None, metavar="X,Y,...")
    sp.add_argument("--queries", default=None, help="CSV of query points")
    sp.add_argument("--m", type=float, default=0.1)
    sp.add_argument("--p", type=float, default=2.0)
    sp.add_argument("--beta", type=float, default=2.0)

    for name in ("distance", "geodesic"):
        sp = sub.add_parser(name, help=f"compute an {name} between two points")
        sp.add_argument("--input", required=True)
        sp.add_argument("--from", dest="src", required=True, metavar="X,Y,...")
        sp.add_argument("--to", dest="dst", required=True, metavar="X,Y,...")
        _add_graph_flags(sp)
        if name == "geodesic":
            sp.add_argument("--output", required=True, help="geodesic CSV path")
        else:
            sp.add_argument("--geodesic-out", default=None, help="optional polyline CSV")

    sp = sub.add_parser("graph", help="build a graph and export it as CSV")
    sp.add_argument("--input", required=True)
    _add_graph_flags(sp)
    sp.add_argument("--output", required=True)

    sp = sub.add_parser("experiment", help="run a desk-scale study")
    sp.add_argument("--name", choices=["circle", "ring", "geodesic"], default=None)
    sp.add_argument("--config", default=None, help="JSON config path")
    sp.add_argument("--n", default=None, help="sizes: 'a,b,c' or doubling 'a..b'")
    sp.add_argument("--reps", type=int, default=None)
    sp.add_argument("--seed", type=int, default=None)
    sp.add_argument("--m", type=float, default=None)
    sp.add_argument("--p", type=float, default=None)
    sp.add_argument("--beta", type=float, default=None)
    sp.add_argument("--alpha", type=float, default=None)
    sp.add_argument("--output", default=None)
    sp.add_argument("--from", dest="src", default="1,0", metavar="X,Y")
    sp.add_argument("--to", dest="dst", default="-1,0", metavar="X,Y")
    sp.add_argument("--grid-resolution", type=int, default=200)

    sp = sub.add_parser("validate", help="run the oracle/property suite")
    sp.add_argument(
        "--inject-weight-perturbation",
        type=float,
        default=0.0,
        help=argparse.SUPPRESS,
    )
    return ap


def _cmd_dtm(args) -> int:
    source = _load_cloud(args.input, args.weighted)
    measure = source if isinstance(source, WeightedMeasure) else make_empirical(source)
    params = DtmParams(m=args.m, p=args.p, beta=args.beta)
    queries = []
    if args.query:
        queries.extend(_parse_point(q) for q in args.query)
    if args.queries:
        queries.extend(csvio.read_cloud(args.queries))
    if not queries:
        raise InvalidInputError("dtm: provide --query or --queries")
    values = dtm_batch(SpatialIndex(measure), np.vstack(queries), params)
    for v in values:
        print(csvio.fmt(v))
    return 0


def _cmd_distance(args, want_polyline: bool) -> int:
    cloud = _load_cloud(args.input, weighted=False)
    measure = make_empirical(cloud)
    x = _parse_point(args.src)
    y = _parse_point(args.dst)
    if x.shape[0] != cloud.dimension or y.shape[0] != cloud.dimension:
        raise InvalidInputError(
            f"query dimension must match the cloud dimension {cloud.dimension}"
        )
    params = DtmParams(m=args.m, p=args.p, beta=args.beta)
    topology = _topology(args, cloud.size)
    weights = _weight_mode(args, cloud.size)
    graph = build_graph(measure, topology, weights, params)
    result = fdtm_query(measure, graph, x, y, params)
    print(csvio.fmt(result.distance))
    out = args.output if want_polyline else args.geodesic_out
    if out:
        csvio.write_geodesic(out, result.distance, result.polyline)
    return 0


def _cmd_graph(args) -> int:
    cloud = _load_cloud(args.input, weighted=False)
    params = DtmParams(m=args.m, p=args.p, beta=args.beta)
    graph = build_graph(
        make_empirical(cloud), _topology(args, cloud.size), _weight_mode(args, cloud.size), params
    )
    csvio.write_graph(args.output, graph.edge_i, graph.edge_j, graph.weights)
    report = edge_count_bound_check(graph)
    print(f"{report.edge_count}")
    if report.quadratic:
        print(
            f"note: complete topology has {report.edge_count} edges "
            f"(quadratic in n={report.vertex_count})",
            file=sys.stderr,
        )
    return 0


def _cmd_experiment(args) -> int:
    cfg: dict = {}
    if args.config:
        with open(args.config, "r", encoding="utf-8") as fh:
            cfg = json.load(fh)

    def pick(flag, key, default):
        if flag is not None:
            return flag
        if key in cfg:
            return cfg[key]
        return default

    name = pick(args.name, "name", None)
    if name is None:
        raise InvalidInputError("experiment: --name (or config 'name') is required")
    sizes = pick(args.n, "n", "128..4096" if name == "circle" else "256..4096")
    if isinstance(sizes, str):
        sizes = _parse_sizes(sizes)
    else:
        sizes = tuple(int(v) for v in sizes)
    if name == "geodesic" and args.n is None and "n" not in cfg:
        sizes = (1024,)
    params = DtmParams(
        m=float(pick(args.m, "m", 0.1)),
        p=float(pick(args.p, "p", 2.0)),
        beta=float(pick(args.beta, "beta", 2.0)),
    )
    default_out = "geodesic_dump" if name == "geodesic" else f"{name}_experiment.csv"
    output = pick(args.output, "output", default_out)
    config = ExperimentConfig(
        experiment=name,
        sample_sizes=sizes,
        repetitions=int(pick(args.reps, "reps", 50)),
        seed=int(pick(args.seed, "seed", 0)),
        params=params,
        fermat_alpha=float(pick(args.alpha, "alpha", 1.1)),
        output_path=output,
    )
    if name == "geodesic":
        from fdtm.experiments import dump_geodesic

        result = dump_geodesic(
            config,
            _parse_point(args.src),
            _parse_point(args.dst),
            grid_resolution=args.grid_resolution,
        )
        print(csvio.fmt(result.distance))
        print(f"# geodesic={result.geodesic_path}", file=sys.stderr)
        print(f"# grid={result.grid_path}", file=sys.stderr)
        return 0
    result = run_experiment(config)
    for row in result.rows:
        print(",".join(csvio.fmt(v) if isinstance(v, float) else str(v) for v in row))
    if hasattr(result, "slope"):
        print(f"# fitted_slope={csvio.fmt(result.slope)}", file=sys.stderr)
    return 0


def _cmd_validate(args) -> int:
    results = run_validation(perturbation=args.inject_weight_perturbation)
    width = max(len(r.name) for r in results)
    ok = True
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        line = f"{r.name:<{width}}  {status}  slack={r.slack:.3e} tol={r.tolerance:.3e}"
        if r.detail:
            line += f"  {r.detail}"
        print(line)
        ok &= r.passed
    return 0 if ok else 1


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    if args.threads is not None:
        set_threads(args.threads)
    try:
        if args.command == "dtm":
            return _cmd_dtm(args)
        if args.command == "distance":
            return _cmd_distance(args, want_polyline=False)
        if args.command == "geodesic":
            return _cmd_distance(args, want_polyline=True)
        if args.command == "graph":
            return _cmd_graph(args)
        if args.command == "experiment":
            return _cmd_experiment(args)
        if args.command == "validate":
            return _cmd_validate(args)
        raise InvalidInputError(f"unknown command {args.command!r}")
    except json.JSONDecodeError as exc:
        print(f"error: invalid JSON config: {exc}", file=sys.stderr)
        return 2
    except (ValueError, FileNotFoundError) as exc:
        # Covers InvalidInputError, UnsupportedError and CsvFormatError.
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
