"""Self-contained invariant checks behind the `validate` CLI command.

Each check computes a measured slack against its tolerance and the suite
passes only if every slack is within bounds. The weight-perturbation hook
exists for fault-injection tests: it corrupts one pairwise distance before
the metric-axiom check so a violated triangle inequality must be detected
and named.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from fdtm.dtm import SpatialIndex, dtm_batch, dtm_segment_integral, dtm_value
from fdtm.graph import Complete, MetricGraph, SubdividedDtm, build_graph
from fdtm.measures import DtmParams, PointCloud, WeightedMeasure, make_empirical, sample_circle
from fdtm.oracles import dtm_profile_integral, exhaustive_shortest, wasserstein_bruteforce
from fdtm.paths import all_pairs_sampled, fdtm_query, single_source


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    slack: float
    tolerance: float
    detail: str = ""


def _random_measure(rng, atoms: int, dim: int) -> WeightedMeasure:
    pts = rng.normal(size=(atoms, dim))
    w = rng.uniform(0.2, 1.0, size=atoms)
    return WeightedMeasure(pts, w / w.sum())


def _check_field_exactness(rng) -> CheckResult:
    worst = 0.0
    for _ in range(20):
        atoms = int(rng.integers(2, 13))
        dim = int(rng.integers(1, 4))
        measure = _random_measure(rng, atoms, dim)
        params = DtmParams(
            m=float(rng.uniform(0.05, 1.0)),
            p=float(rng.choice([1.0, 2.0, 3.0])),
        )
        index = SpatialIndex(measure)
        for _ in range(5):
            x = rng.normal(size=dim)
            got = dtm_value(index, x, params)
            ref = dtm_profile_integral(measure, x, params)
            worst = max(worst, abs(got - ref) / max(abs(ref), 1e-300))
    return CheckResult("field-exactness", worst <= 1e-9, worst, 1e-9)


def _check_lipschitz(rng) -> CheckResult:
    cloud = sample_circle(128, seed=int(rng.integers(0, 2**31)))
    index = SpatialIndex(make_empirical(cloud))
    params = DtmParams(m=0.1, p=2.0)
    xs = rng.normal(size=(2000, 2))
    ys = rng.normal(size=(2000, 2))
    fx = dtm_batch(index, xs, params)
    fy = dtm_batch(index, ys, params)
    gaps = np.sqrt(((xs - ys) ** 2).sum(axis=1))
    worst = float((np.abs(fx - fy) - gaps).max())
    return CheckResult("one-lipschitz", worst <= 1e-9, worst, 1e-9)


def _check_wasserstein_stability(rng) -> CheckResult:
    params = DtmParams(m=0.4, p=2.0)
    worst = -math.inf
    for _ in range(10):
        mu = WeightedMeasure(rng.normal(size=(6, 2)), np.full(6, 1 / 6))
        nu = WeightedMeasure(rng.normal(size=(6, 2)), np.full(6, 1 / 6))
        bound = wasserstein_bruteforce(mu, nu, params.p) / params.m ** (1 / params.p)
        grid = rng.uniform(-3, 3, size=(400, 2))
        gap = np.abs(
            dtm_batch(SpatialIndex(mu), grid, params)
            - dtm_batch(SpatialIndex(nu), grid, params)
        ).max()
        worst = max(worst, float(gap - bound))
    return CheckResult("wasserstein-stability", worst <= 1e-9, worst, 1e-9)


def _random_graph(rng, n: int) -> MetricGraph:
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    keep = [p for p in pairs if rng.uniform() < 0.6]
    if not keep:
        keep = [pairs[0]]
    ei = np.array([p[0] for p in keep])
    ej = np.array([p[1] for p in keep])
    w = rng.uniform(0.1, 2.0, size=len(keep))
    pts = rng.normal(size=(n, 2))
    return MetricGraph(pts, ei, ej, w, Complete(), SubdividedDtm(1), None)


def _check_dijkstra(rng) -> CheckResult:
    worst = 0.0
    for _ in range(100):
        n = int(rng.integers(2, 9))
        g = _random_graph(rng, n)
        s, t = 0, n - 1
        got = single_source(g, s).dist[t]
        ref = exhaustive_shortest(g, s, t)
        if math.isinf(ref) and math.isinf(got):
            continue
        worst = max(worst, abs(got - ref) / max(abs(ref), 1e-300))
    return CheckResult("dijkstra-vs-enumeration", worst <= 1e-12, worst, 1e-12)


def _check_metric_axioms(rng, perturbation: float) -> CheckResult:
    cloud = sample_circle(64, seed=int(rng.integers(0, 2**31)))
    params = DtmParams(m=0.1, p=2.0, beta=2.0)
    graph = build_graph(cloud, Complete(), SubdividedDtm(3), params)
    dist = all_pairs_sampled(graph, range(graph.n_vertices))
    name = "metric-axioms"
    scale = float(dist[np.isfinite(dist)].max())

    sym = float(np.abs(dist - dist.T).max())
    diag = float(np.abs(np.diag(dist)).max())
    if perturbation:
        j = int(np.argmax(dist[0]))
        dist[0, j] *= 1.0 - perturbation
        dist[j, 0] = dist[0, j]

    n = dist.shape[0]
    # Full triangle tensor: T[a, b, c] = d(a,c) - d(a,b) - d(b,c).
    tensor = dist[:, None, :] - dist[:, :, None] - dist[None, :, :]
    violation = float(tensor.max())
    worst = max(sym, diag, violation)
    tol = 1e-9 * max(1.0, scale)
    detail = ""
    if violation > tol:
        a, b, c = np.unravel_index(int(np.argmax(tensor)), tensor.shape)
        detail = (
            f"triangle inequality violated at triple "
            f"({a}, {b}, {c}): d(a,c) > d(a,b) + d(b,c)"
        )
    return CheckResult(name, worst <= tol, worst, tol, detail)


def _check_scaling(rng) -> CheckResult:
    cloud = sample_circle(48, seed=int(rng.integers(0, 2**31)))
    params = DtmParams(m=0.2, p=2.0, beta=2.0)
    measure = make_empirical(cloud)
    graph = build_graph(measure, Complete(), SubdividedDtm(4), params)
    x = np.array([0.9, 0.1])
    y = np.array([-0.8, -0.2])
    base = fdtm_query(measure, graph, x, y, params).distance
    worst = 0.0
    for s in (0.5, 3.0):
        scaled = WeightedMeasure(measure.points * s, measure.masses)
        g2 = build_graph(scaled, Complete(), SubdividedDtm(4), params)
        got = fdtm_query(scaled, g2, x * s, y * s, params).distance
        expect = base * s ** (params.beta + 1.0)
        worst = max(worst, abs(got - expect) / abs(expect))
    return CheckResult("scaling-covariance", worst <= 1e-9, worst, 1e-9)


def _check_geodesic_bound(rng) -> CheckResult:
    params = DtmParams(m=0.25, p=2.0, beta=2.0)
    worst = 0.0
    for _ in range(5):
        cloud = PointCloud(rng.normal(size=(40, 2)))
        measure = make_empirical(cloud)
        graph = build_graph(measure, Complete(), SubdividedDtm(4), params)
        index = SpatialIndex(measure)
        x = rng.normal(size=2)
        y = rng.normal(size=2)
        res = fdtm_query(measure, graph, x, y, params)
        t = (np.arange(64) + 0.5) / 64
        seg = x[None, :] + t[:, None] * (y - x)[None, :]
        top = float(dtm_batch(index, seg, params).max())
        bottom = float(dtm_batch(index, graph.points, params).min())
        gap = float(np.sqrt(((x - y) ** 2).sum()))
        bound = (top / bottom) ** params.beta * gap * 1.05
        worst = max(worst, res.euclidean_length - bound)
    return CheckResult("geodesic-length-bound", worst <= 0.0, worst, 0.0)


def _check_quadrature_contraction(rng) -> CheckResult:
    measure = WeightedMeasure(np.array([[0.3, 0.4]]), np.array([1.0]))
    index = SpatialIndex(measure)
    params = DtmParams(m=1.0, p=2.0, beta=2.0)
    x = np.array([1.0, 0.0])
    y = np.array([-1.0, 0.5])
    worst = -math.inf
    for r in (8, 16):
        lo = dtm_segment_integral(index, x, y, params, r // 2)
        mid = dtm_segment_integral(index, x, y, params, r)
        hi = dtm_segment_integral(index, x, y, params, 2 * r)
        worst = max(worst, abs(hi - mid) - abs(mid - lo))
    return CheckResult("quadrature-contraction", worst <= 1e-9, worst, 1e-9)


def run_validation(perturbation: float = 0.0, seed: int = 20240) -> list[CheckResult]:
    rng = np.random.default_rng(seed)
    return [
        _check_field_exactness(rng),
        _check_lipschitz(rng),
        _check_wasserstein_stability(rng),
        _check_dijkstra(rng),
        _check_metric_axioms(rng, perturbation),
        _check_scaling(rng),
        _check_geodesic_bound(rng),
        _check_quadrature_contraction(rng),
    ]
