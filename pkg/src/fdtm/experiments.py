"""Desk-scale studies: circle convergence, ring shortcut robustness, geodesic dumps.

Each experiment is a deterministic function of its config. Repetitions draw
independent reproducible streams keyed by (seed, n, repetition), and the ring
study reuses one base sample for the with/without-shortcut pair so the offset
isolates the shortcut effect. Results are written as CSV with a '#'-prefixed
metadata header echoing the effective configuration.

Defaults use the canonical study settings (m=0.1, p=2, beta=2, alpha=1.1).
The default topology is the Yao spanner with max(6, ceil(log n)) cones: at
desk scale a complete graph at n=4096 cannot be re-weighted hundreds of
times, and the spanner keeps edges in every direction so geodesics that
leave the support stay available. Both topology and weight mode can be
overridden per config.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from fdtm import csvio
from fdtm.errors import InvalidInputError
from fdtm.graph import (
    Complete,
    GraphTopology,
    KNearest,
    SampleFermat,
    SubdividedDtm,
    WeightMode,
    Yao,
    build_graph,
    default_degree,
)
from fdtm.dtm import SpatialIndex, dtm_batch
from fdtm.measures import (
    DtmParams,
    make_empirical,
    sample_circle,
    sample_ring,
)
from fdtm.oracles import circle_fdtm_analytic
from fdtm.paths import fdtm_query, single_source

RING_INNER = 1.0
RING_OUTER = 2.0

_EXPERIMENTS = ("circle", "ring", "geodesic")


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    sample_sizes: tuple[int, ...]
    repetitions: int = 50
    seed: int = 0
    params: DtmParams = field(default_factory=lambda: DtmParams(m=0.1, p=2.0, beta=2.0))
    topology: GraphTopology | None = None
    weights: WeightMode | None = None
    fermat_alpha: float = 1.1
    output_path: str | None = None

    def __post_init__(self):
        if self.experiment not in _EXPERIMENTS:
            raise InvalidInputError(
                f"experiment must be one of {_EXPERIMENTS}, got {self.experiment!r}"
            )
        sizes = tuple(int(n) for n in self.sample_sizes)
        if not sizes:
            raise InvalidInputError("sample_sizes must be non-empty")
        if any(b <= a for a, b in zip(sizes, sizes[1:])):
            raise InvalidInputError("sample_sizes must be strictly increasing")
        if self.repetitions < 1:
            raise InvalidInputError("repetitions must be >= 1")
        if not self.fermat_alpha > 1.0:
            raise InvalidInputError("fermat_alpha must be > 1")
        object.__setattr__(self, "sample_sizes", sizes)


def child_seed(seed: int, *keys: int) -> int:
    """Independent reproducible stream keyed by (seed, *keys)."""
    return int(np.random.SeedSequence([int(seed), *map(int, keys)]).generate_state(1)[0])


def auto_topology(n: int) -> Yao:
    return Yao(default_degree(n))


def auto_subdivisions(n: int) -> int:
    return min(4, max(2, math.ceil(math.log(max(2, n)) / 2.0)))


def auto_weights(n: int) -> SubdividedDtm:
    return SubdividedDtm(auto_subdivisions(n))


def _describe(obj) -> str:
    if obj is None:
        return "auto"
    if isinstance(obj, Complete):
        return "complete"
    if isinstance(obj, KNearest):
        return f"knn({obj.k})"
    if isinstance(obj, Yao):
        return f"yao({obj.cones})"
    if isinstance(obj, SubdividedDtm):
        return f"subdiv({obj.subdivisions})"
    if isinstance(obj, SampleFermat):
        return f"fermat({obj.alpha})"
    return type(obj).__name__.lower()


def _metadata(config: ExperimentConfig, extra: dict | None = None) -> dict:
    from fdtm import __version__

    meta = {
        "version": f"fdtm-{__version__}",
        "experiment": config.experiment,
        "sample_sizes": ",".join(str(n) for n in config.sample_sizes),
        "repetitions": config.repetitions,
        "seed": config.seed,
        "m": csvio.fmt(config.params.m),
        "p": csvio.fmt(config.params.p),
        "beta": csvio.fmt(config.params.beta),
        "topology": _describe(config.topology),
        "weights": _describe(config.weights),
        "fermat_alpha": csvio.fmt(config.fermat_alpha),
    }
    if extra:
        meta.update(extra)
    return meta


@dataclass(frozen=True)
class CircleConvergenceResult:
    rows: list[tuple[int, float, float]]
    slope: float
    reference: float
    output_path: str | None


def run_circle_convergence(config: ExperimentConfig) -> CircleConvergenceResult:
    """Mean absolute error of the empirical metric between antipodal circle
    points against the analytic chord reference, per sample size.

    Also fits the least-squares slope of log(error) against log(n). The error
    metric (mean absolute deviation, antipodal on-circle query points) is
    recorded in the output metadata.
    """
    params = config.params
    reference = circle_fdtm_analytic(math.pi, params)
    x = np.array([1.0, 0.0])
    y = np.array([-1.0, 0.0])

    rows: list[tuple[int, float, float]] = []
    for n in config.sample_sizes:
        topo = config.topology if config.topology is not None else auto_topology(n)
        wmode = config.weights if config.weights is not None else auto_weights(n)
        errs = np.empty(config.repetitions)
        for rep in range(config.repetitions):
            cloud = sample_circle(n, child_seed(config.seed, n, rep))
            measure = make_empirical(cloud)
            graph = build_graph(measure, topo, wmode, params)
            result = fdtm_query(measure, graph, x, y, params)
            errs[rep] = abs(result.distance - reference)
        mean = float(errs.mean())
        sem = float(errs.std(ddof=1) / math.sqrt(len(errs))) if len(errs) > 1 else 0.0
        rows.append((n, mean, sem))

    logs_n = np.log([r[0] for r in rows])
    logs_e = np.log(np.maximum([r[1] for r in rows], 1e-300))
    slope = float(np.polyfit(logs_n, logs_e, 1)[0]) if len(rows) > 1 else 0.0

    if config.output_path:
        meta = _metadata(
            config,
            {
                "error_metric": "mean_abs_error_vs_analytic_chord_reference",
                "query_points": "(1,0) and (-1,0)",
                "analytic_reference": csvio.fmt(reference),
                "fitted_slope": csvio.fmt(slope),
            },
        )
        csvio.write_table(
            config.output_path,
            meta,
            ["n", "mean_abs_error", "std_error"],
            [(n, float(m), float(s)) for n, m, s in rows],
        )
    return CircleConvergenceResult(rows, slope, reference, config.output_path)


@dataclass(frozen=True)
class RingOffsetResult:
    rows: list[tuple[int, float, float]]
    output_path: str | None


def _fermat_on_same_edges(graph, fermat: SampleFermat):
    """Length-power weights on an already-built edge set (topology reuse)."""
    from fdtm.graph import MetricGraph

    delta = graph.points[graph.edge_j] - graph.points[graph.edge_i]
    lengths = np.sqrt((delta**2).sum(axis=1))
    return MetricGraph(
        graph.points,
        graph.edge_i,
        graph.edge_j,
        lengths**fermat.alpha,
        graph.topology,
        fermat,
        None,
    )


def _ring_anchor_vertices(base: np.ndarray) -> tuple[int, int]:
    """Base-sample vertices nearest to the two opposite mid-ring anchors.

    Anchors are chosen among the shared (pre-shortcut) points so the paired
    clouds use identical endpoints.
    """
    mid = 0.5 * (RING_INNER + RING_OUTER)
    a = np.array([mid, 0.0])
    b = np.array([-mid, 0.0])
    va = int(np.argmin(((base - a) ** 2).sum(axis=1)))
    vb = int(np.argmin(((base - b) ** 2).sum(axis=1)))
    return va, vb


def run_ring_offset(config: ExperimentConfig) -> RingOffsetResult:
    """Relative distance offsets caused by a cross-hole shortcut, per n.

    For each repetition the annulus is sampled once; the shortcut variant
    replaces the trailing round(sqrt(n)) points. Distances between two fixed
    diametrically opposite anchor vertices are computed under the field
    weights and under the plain length-power weights on the same topology,
    and the offsets |l - l'| / l are averaged over repetitions.
    """
    params = config.params
    rows: list[tuple[int, float, float]] = []
    for n in config.sample_sizes:
        topo = config.topology if config.topology is not None else auto_topology(n)
        wmode = config.weights if config.weights is not None else auto_weights(n)
        fermat = SampleFermat(config.fermat_alpha)
        count = int(round(math.sqrt(n)))
        off_f = np.empty(config.repetitions)
        off_s = np.empty(config.repetitions)
        for rep in range(config.repetitions):
            seed = child_seed(config.seed, n, rep)
            plain = sample_ring(n, RING_INNER, RING_OUTER, shortcut=False, seed=seed)
            short = sample_ring(n, RING_INNER, RING_OUTER, shortcut=True, seed=seed)
            va, vb = _ring_anchor_vertices(plain.points[: n - count])

            dists = {}
            for tag, cloud in (("plain", plain), ("short", short)):
                g_field = build_graph(cloud, topo, wmode, params)
                g_fermat = _fermat_on_same_edges(g_field, fermat)
                dists[tag] = (
                    float(single_source(g_field, va).dist[vb]),
                    float(single_source(g_fermat, va).dist[vb]),
                )
            l0, lf0 = dists["plain"]
            l1, lf1 = dists["short"]
            off_f[rep] = abs(l0 - l1) / l0
            off_s[rep] = abs(lf0 - lf1) / lf0
        rows.append((n, float(off_f.mean()), float(off_s.mean())))

    if config.output_path:
        meta = _metadata(
            config,
            {
                "ring_inner": csvio.fmt(RING_INNER),
                "ring_outer": csvio.fmt(RING_OUTER),
                "anchors": "nearest shared vertices to (+-1.5, 0)",
            },
        )
        csvio.write_table(
            config.output_path,
            meta,
            ["n", "fdtm_rel_offset", "fermat_rel_offset"],
            rows,
        )
    return RingOffsetResult(rows, config.output_path)


@dataclass(frozen=True)
class GeodesicDumpResult:
    distance: float
    polyline: np.ndarray
    geodesic_path: str
    grid_path: str


def dump_geodesic(
    config: ExperimentConfig,
    x,
    y,
    grid_resolution: int = 200,
) -> GeodesicDumpResult:
    """Write one geodesic polyline CSV plus a field-value grid CSV (2-D only).

    The grid covers the padded bounding box of the sample and the query
    points at exactly grid_resolution x grid_resolution nodes, for plotting
    the field behind the geodesic. The geodesic uses the complete graph up
    to n = 1024 and a dense Yao spanner beyond, unless overridden.
    """
    if grid_resolution < 2:
        raise InvalidInputError("grid_resolution must be >= 2")
    x = np.asarray(x, dtype=np.float64).ravel()
    y = np.asarray(y, dtype=np.float64).ravel()
    if x.shape[0] != 2 or y.shape[0] != 2:
        raise InvalidInputError("dump_geodesic: queries must be 2-D points")
    if not config.output_path:
        raise InvalidInputError("dump_geodesic: config.output_path is required")

    n = config.sample_sizes[-1]
    params = config.params
    cloud = sample_circle(n, child_seed(config.seed, n, 0))
    measure = make_empirical(cloud)
    if config.topology is not None:
        topo = config.topology
    elif n <= 1024:
        topo = Complete()
    else:
        topo = Yao(max(48, default_degree(n)))
    wmode = config.weights if config.weights is not None else auto_weights(n)
    graph = build_graph(measure, topo, wmode, params)
    result = fdtm_query(measure, graph, x, y, params)

    geodesic_path = f"{config.output_path}_geodesic.csv"
    grid_path = f"{config.output_path}_dtm_grid.csv"
    csvio.write_geodesic(geodesic_path, result.distance, result.polyline)

    both = np.vstack([cloud.points, x[None, :], y[None, :]])
    lo = both.min(axis=0)
    hi = both.max(axis=0)
    pad = 0.1 * (hi - lo).max()
    gx = np.linspace(lo[0] - pad, hi[0] + pad, grid_resolution)
    gy = np.linspace(lo[1] - pad, hi[1] + pad, grid_resolution)
    xx, yy = np.meshgrid(gx, gy)
    grid = np.column_stack([xx.ravel(), yy.ravel()])
    values = dtm_batch(SpatialIndex(measure), grid, params)
    meta = _metadata(
        config,
        {
            "grid_resolution": grid_resolution,
            "query_x": ",".join(csvio.fmt(v) for v in x),
            "query_y": ",".join(csvio.fmt(v) for v in y),
            "distance": csvio.fmt(result.distance),
        },
    )
    csvio.write_table(
        grid_path,
        meta,
        ["x", "y", "dtm"],
        [(float(px), float(py), float(v)) for (px, py), v in zip(grid, values)],
    )
    return GeodesicDumpResult(result.distance, result.polyline, geodesic_path, grid_path)


def dump_geodesic_sweep(
    config: ExperimentConfig,
    x,
    y,
    m_values: tuple[float, ...] = (0.2, 0.1, 0.05),
    beta_values: tuple[float, ...] = (1.0, 2.0),
    grid_resolution: int = 200,
) -> list[GeodesicDumpResult]:
    """Geodesic dumps over the m/beta sweep, one file pair per combination."""
    results = []
    for m in m_values:
        for beta in beta_values:
            params = DtmParams(m=m, p=config.params.p, beta=beta)
            sub = replace(
                config,
                params=params,
                output_path=f"{config.output_path}_m{m:g}_beta{beta:g}",
            )
            results.append(dump_geodesic(sub, x, y, grid_resolution))
    return results


def run_experiment(config: ExperimentConfig, x=None, y=None):
    """Dispatch on config.experiment; geodesic dumps need the query points."""
    if config.experiment == "circle":
        return run_circle_convergence(config)
    if config.experiment == "ring":
        return run_ring_offset(config)
    if x is None or y is None:
        raise InvalidInputError("geodesic experiment requires query points")
    return dump_geodesic(config, x, y)
