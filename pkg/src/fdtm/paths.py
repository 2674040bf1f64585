"""Shortest-path distances and geodesic polylines on metric graphs.

Dijkstra runs with deterministic tie-breaking: the pending vertex with the
smallest (distance, index) pair is settled first, and among equal-distance
predecessors the smallest index wins. Queries between arbitrary points attach
two temporary vertices connected to every graph vertex (and to each other) by
straight edges weighted with the graph's own weight mode, so off-sample
endpoints are handled exactly like sample points.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass

import numpy as np

from fdtm.dtm import SpatialIndex, _dtm_pow_batch
from fdtm.errors import InvalidInputError
from fdtm.graph import (
    EndpointAverageDtm,
    MetricGraph,
    SampleFermat,
    SubdividedDtm,
    _subdivided_weights,
)
from fdtm.measures import DtmParams, WeightedMeasure

_DENSE_MIN_N = 64


@dataclass(frozen=True)
class ShortestPathTree:
    """Distances and predecessors from one source vertex."""

    source: int
    dist: np.ndarray
    pred: np.ndarray

    def path_to(self, v: int) -> list[int] | None:
        """Vertex indices from the source to v, or None if unreachable."""
        if not np.isfinite(self.dist[v]):
            return None
        path = [int(v)]
        while path[-1] != self.source:
            path.append(int(self.pred[path[-1]]))
        path.reverse()
        return path


@dataclass(frozen=True)
class GeodesicResult:
    """A shortest-path value together with the polyline realizing it."""

    distance: float
    polyline: np.ndarray
    euclidean_length: float


def _dijkstra_heap(offsets, nbr, wts, n: int, source: int):
    dist = [np.inf] * n
    pred = [-1] * n
    done = [False] * n
    dist[source] = 0.0
    off = offsets.tolist()
    nbr = nbr.tolist()
    wts = wts.tolist()
    heap = [(0.0, source)]
    while heap:
        d, u = heapq.heappop(heap)
        if done[u]:
            continue
        done[u] = True
        for t in range(off[u], off[u + 1]):
            v = nbr[t]
            nd = d + wts[t]
            if nd < dist[v]:
                dist[v] = nd
                pred[v] = u
                heapq.heappush(heap, (nd, v))
            elif nd == dist[v] and not done[v] and u < pred[v]:
                pred[v] = u
    return np.asarray(dist), np.asarray(pred, dtype=np.int64)


def _dijkstra_dense(dense: np.ndarray, source: int):
    n = dense.shape[0]
    dist = np.full(n, np.inf)
    pred = np.full(n, -1, dtype=np.int64)
    done = np.zeros(n, dtype=bool)
    dist[source] = 0.0
    for _ in range(n):
        u = int(np.argmin(np.where(done, np.inf, dist)))
        if not np.isfinite(dist[u]):
            break
        done[u] = True
        nd = dist[u] + dense[u]
        lt = nd < dist
        eq = (nd == dist) & ~done & (u < pred)
        dist[lt] = nd[lt]
        pred[lt] = u
        pred[eq] = u
    return dist, pred


def _use_dense(n: int, edges: int) -> bool:
    return n >= _DENSE_MIN_N and edges * 8 >= n * n


def single_source(graph: MetricGraph, source: int) -> ShortestPathTree:
    """Exact nonnegative-weight shortest paths from one vertex."""
    n = graph.n_vertices
    if not (0 <= source < n):
        raise InvalidInputError(f"single_source: source {source} out of range [0, {n})")
    if _use_dense(n, graph.edge_count):
        dist, pred = _dijkstra_dense(graph.to_dense(), source)
    else:
        offsets, nbr, wts = graph.adjacency()
        dist, pred = _dijkstra_heap(offsets, nbr, wts, n, source)
    return ShortestPathTree(source, dist, pred)


def all_pairs_sampled(graph: MetricGraph, sources) -> np.ndarray:
    """Distance matrix with one single_source row per requested source."""
    sources = [int(s) for s in sources]
    rows = [single_source(graph, s).dist for s in sources]
    return np.vstack(rows) if rows else np.empty((0, graph.n_vertices))


def _query_edge_weights(
    index: SpatialIndex,
    graph: MetricGraph,
    x: np.ndarray,
    y: np.ndarray,
    params: DtmParams,
) -> tuple[np.ndarray, np.ndarray, float]:
    """Weights from x and y to every vertex, plus the direct x-y edge."""
    pts = graph.points
    n = pts.shape[0]
    mode = graph.weight_mode
    if isinstance(mode, SampleFermat):
        wx = (((pts - x) ** 2).sum(axis=1) ** 0.5) ** mode.alpha
        wy = (((pts - y) ** 2).sum(axis=1) ** 0.5) ** mode.alpha
        wxy = float(((x - y) ** 2).sum() ** 0.5) ** mode.alpha
    elif isinstance(mode, SubdividedDtm):
        xs = np.broadcast_to(x, (n, x.shape[0])).copy()
        ys = np.broadcast_to(y, (n, y.shape[0])).copy()
        wx = _subdivided_weights(index, xs, pts, params, mode.subdivisions)
        wy = _subdivided_weights(index, ys, pts, params, mode.subdivisions)
        wxy = _subdivided_weights(
            index, x[None, :], y[None, :], params, mode.subdivisions
        )[0]
    elif isinstance(mode, EndpointAverageDtm):
        vpow = _dtm_pow_batch(index, pts, params, params.beta)
        qpow = _dtm_pow_batch(index, np.vstack([x, y]), params, params.beta)
        lx = ((pts - x) ** 2).sum(axis=1) ** 0.5
        ly = ((pts - y) ** 2).sum(axis=1) ** 0.5
        wx = lx * 0.5 * (vpow + qpow[0])
        wy = ly * 0.5 * (vpow + qpow[1])
        wxy = float(((x - y) ** 2).sum() ** 0.5) * 0.5 * (qpow[0] + qpow[1])
    else:
        raise InvalidInputError(f"fdtm_query: unknown weight mode {mode!r}")
    return wx, wy, float(wxy)


def fdtm_query(
    measure: WeightedMeasure,
    graph: MetricGraph,
    x,
    y,
    params: DtmParams,
) -> GeodesicResult:
    """Shortest-path distance and geodesic polyline between arbitrary points.

    The graph must have been built over the measure's support. Straight
    segments from the query points to every vertex (and directly between the
    two query points) are always admissible, so the result is finite; when x
    and y are existing vertices it equals the vertex-to-vertex distance.
    """
    x = np.asarray(x, dtype=np.float64).ravel()
    y = np.asarray(y, dtype=np.float64).ravel()
    pts = graph.points
    if x.shape[0] != pts.shape[1] or y.shape[0] != pts.shape[1]:
        raise InvalidInputError(
            f"fdtm_query: query dimension must be {pts.shape[1]}, "
            f"got {x.shape[0]} and {y.shape[0]}"
        )
    if measure.points.shape != pts.shape or not np.array_equal(measure.points, pts):
        raise InvalidInputError("fdtm_query: graph was not built over this measure")
    if graph.params is not None and graph.params != params:
        raise InvalidInputError("fdtm_query: params differ from the graph's params")
    if np.array_equal(x, y):
        return GeodesicResult(0.0, x[None, :].copy(), 0.0)

    n = graph.n_vertices
    index = SpatialIndex(measure)
    wx, wy, wxy = _query_edge_weights(index, graph, x, y, params)
    qx, qy = n, n + 1

    if _use_dense(n + 2, graph.edge_count + 2 * n + 1):
        dense = np.full((n + 2, n + 2), np.inf)
        dense[:n, :n] = graph.to_dense()
        dense[qx, :n] = wx
        dense[:n, qx] = wx
        dense[qy, :n] = wy
        dense[:n, qy] = wy
        dense[qx, qy] = dense[qy, qx] = wxy
        dist, pred = _dijkstra_dense(dense, qx)
    else:
        src = np.concatenate(
            [
                graph.edge_i,
                graph.edge_j,
                np.full(n, qx),
                np.arange(n),
                np.full(n, qy),
                np.arange(n),
                [qx, qy],
            ]
        )
        dst = np.concatenate(
            [
                graph.edge_j,
                graph.edge_i,
                np.arange(n),
                np.full(n, qx),
                np.arange(n),
                np.full(n, qy),
                [qy, qx],
            ]
        )
        ww = np.concatenate([graph.weights, graph.weights, wx, wx, wy, wy, [wxy, wxy]])
        order = np.argsort(src, kind="stable")
        deg = np.bincount(src, minlength=n + 2)
        offsets = np.zeros(n + 3, dtype=np.int64)
        np.cumsum(deg, out=offsets[1:])
        dist, pred = _dijkstra_heap(offsets, dst[order], ww[order], n + 2, qx)

    assert np.isfinite(dist[qy]), "query vertices are always joined by a direct edge"
    chain = [qy]
    while chain[-1] != qx:
        chain.append(int(pred[chain[-1]]))
    chain.reverse()
    coords = [x if v == qx else y if v == qy else pts[v] for v in chain]
    polyline = np.asarray(coords)
    seglen = float(np.sqrt(((polyline[1:] - polyline[:-1]) ** 2).sum(axis=1)).sum())
    return GeodesicResult(float(dist[qy]), polyline, seglen)
