"""Weighted graphs over point clouds whose shortest-path metric estimates
the Fermat distance-to-measure.

Three topologies (complete, symmetrized k-nearest-neighbor, Yao cones) and
three edge-weight modes (subdivided field integral, endpoint average, plain
power of the Euclidean length). Construction is deterministic: nearest
neighbor and cone ties are broken by ascending vertex index, and Yao cones
are anchored at angle zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from fdtm.dtm import SpatialIndex, _dtm_pow_batch, _sq_dist_rows
from fdtm.errors import InvalidInputError, UnsupportedError
from fdtm.measures import DtmParams, PointCloud, WeightedMeasure, make_empirical


@dataclass(frozen=True)
class Complete:
    """All n(n-1)/2 edges."""


@dataclass(frozen=True)
class KNearest:
    """Union-symmetrized k-nearest-neighbor edges."""

    k: int

    def __post_init__(self):
        if self.k < 1:
            raise InvalidInputError(f"KNearest: k must be >= 1, got {self.k}")


@dataclass(frozen=True)
class Yao:
    """Nearest neighbor in each of `cones` angular sectors per vertex (2-D only)."""

    cones: int

    def __post_init__(self):
        if self.cones < 2:
            raise InvalidInputError(f"Yao: cones must be >= 2, got {self.cones}")


GraphTopology = Union[Complete, KNearest, Yao]


@dataclass(frozen=True)
class SubdividedDtm:
    """Edge weight = midpoint-rule integral of the field^beta with r points."""

    subdivisions: int

    def __post_init__(self):
        if self.subdivisions < 1:
            raise InvalidInputError(
                f"SubdividedDtm: subdivisions must be >= 1, got {self.subdivisions}"
            )


@dataclass(frozen=True)
class EndpointAverageDtm:
    """Edge weight = |x-y| * (field(x)^beta + field(y)^beta) / 2."""


@dataclass(frozen=True)
class SampleFermat:
    """Edge weight = |x-y|^alpha, alpha > 1; ignores the field entirely."""

    alpha: float

    def __post_init__(self):
        if not self.alpha > 1.0:
            raise InvalidInputError(f"SampleFermat: alpha must be > 1, got {self.alpha}")


WeightMode = Union[SubdividedDtm, EndpointAverageDtm, SampleFermat]


def default_degree(n: int) -> int:
    """Default neighbor/cone count: max(6, ceil(log n))."""
    return max(6, math.ceil(math.log(max(2, n))))


@dataclass(eq=False)
class MetricGraph:
    """Vertices with undirected weighted edges stored once as (i, j), i < j."""

    points: np.ndarray
    edge_i: np.ndarray
    edge_j: np.ndarray
    weights: np.ndarray
    topology: GraphTopology
    weight_mode: WeightMode
    params: DtmParams | None = None
    _adj: tuple | None = field(default=None, init=False, repr=False)

    def __post_init__(self):
        self.points = np.ascontiguousarray(np.asarray(self.points, dtype=np.float64))
        i = np.asarray(self.edge_i, dtype=np.int64)
        j = np.asarray(self.edge_j, dtype=np.int64)
        w = np.asarray(self.weights, dtype=np.float64)
        if not (i.shape == j.shape == w.shape):
            raise InvalidInputError("MetricGraph: edge arrays must share a shape")
        n = self.points.shape[0]
        if i.size:
            if i.min() < 0 or j.max() >= n:
                raise InvalidInputError("MetricGraph: edge index out of range")
            if np.any(i >= j):
                raise InvalidInputError("MetricGraph: edges must satisfy i < j")
            if not np.all(np.isfinite(w)) or np.any(w < 0):
                raise InvalidInputError("MetricGraph: weights must be finite and >= 0")
            enc = i * n + j
            order = np.argsort(enc, kind="stable")
            if np.any(np.diff(enc[order]) == 0):
                raise InvalidInputError("MetricGraph: duplicate edge")
            i, j, w = i[order], j[order], w[order]
        self.edge_i, self.edge_j, self.weights = i, j, w

    @property
    def n_vertices(self) -> int:
        return self.points.shape[0]

    @property
    def edge_count(self) -> int:
        return self.edge_i.shape[0]

    @property
    def dimension(self) -> int:
        return self.points.shape[1]

    def adjacency(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """CSR-style (offsets, neighbors, weights) over both edge directions."""
        if self._adj is None:
            n = self.n_vertices
            src = np.concatenate([self.edge_i, self.edge_j])
            dst = np.concatenate([self.edge_j, self.edge_i])
            ww = np.concatenate([self.weights, self.weights])
            order = np.argsort(src, kind="stable")
            deg = np.bincount(src, minlength=n)
            offsets = np.zeros(n + 1, dtype=np.int64)
            np.cumsum(deg, out=offsets[1:])
            self._adj = (offsets, dst[order], ww[order])
        return self._adj

    def to_dense(self) -> np.ndarray:
        """Dense symmetric weight matrix with inf off-graph and on the diagonal."""
        n = self.n_vertices
        dense = np.full((n, n), np.inf)
        dense[self.edge_i, self.edge_j] = self.weights
        dense[self.edge_j, self.edge_i] = self.weights
        return dense


def _lex_swap(a: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Reorder endpoint pairs so each row has the lexicographically smaller first."""
    swap = np.zeros(a.shape[0], dtype=bool)
    decided = np.zeros(a.shape[0], dtype=bool)
    for dim in range(a.shape[1]):
        lt = b[:, dim] < a[:, dim]
        gt = b[:, dim] > a[:, dim]
        swap |= lt & ~decided
        decided |= lt | gt
    aa = np.where(swap[:, None], b, a)
    bb = np.where(swap[:, None], a, b)
    return aa, bb


def _complete_edges(n: int) -> tuple[np.ndarray, np.ndarray]:
    i, j = np.triu_indices(n, k=1)
    return i.astype(np.int64), j.astype(np.int64)


def _knn_edges(points: np.ndarray, k: int) -> tuple[np.ndarray, np.ndarray]:
    n = points.shape[0]
    k = min(k, n - 1)
    rows = max(32, 4_000_000 // n)
    enc_parts = []
    for start in range(0, n, rows):
        chunk = points[start : start + rows]
        d2 = _sq_dist_rows(chunk, points)
        d2[np.arange(chunk.shape[0]), np.arange(start, start + chunk.shape[0])] = np.inf
        nearest = np.argsort(d2, axis=1, kind="stable")[:, :k]
        src = np.repeat(np.arange(start, start + chunk.shape[0]), k)
        dst = nearest.ravel()
        lo = np.minimum(src, dst)
        hi = np.maximum(src, dst)
        enc_parts.append(lo * n + hi)
    enc = np.unique(np.concatenate(enc_parts))
    return (enc // n).astype(np.int64), (enc % n).astype(np.int64)


def _yao_edges(points: np.ndarray, cones: int) -> tuple[np.ndarray, np.ndarray]:
    n = points.shape[0]
    width = 2.0 * np.pi / cones
    rows = max(32, 4_000_000 // n)
    enc_parts = []
    for start in range(0, n, rows):
        chunk = points[start : start + rows]
        m = chunk.shape[0]
        dx = points[None, :, 0] - chunk[:, 0:1]
        dy = points[None, :, 1] - chunk[:, 1:2]
        d2 = dx * dx + dy * dy
        d2[np.arange(m), np.arange(start, start + m)] = np.inf
        angles = np.mod(np.arctan2(dy, dx), 2.0 * np.pi)
        bins = np.clip((angles / width).astype(np.int64), 0, cones - 1)
        row_idx = np.arange(m)
        for cone in range(cones):
            masked = np.where(bins == cone, d2, np.inf)
            jmin = np.argmin(masked, axis=1)  # first index wins ties
            ok = np.isfinite(masked[row_idx, jmin])
            src = row_idx[ok] + start
            dst = jmin[ok]
            lo = np.minimum(src, dst)
            hi = np.maximum(src, dst)
            enc_parts.append(lo * n + hi)
    enc = np.unique(np.concatenate(enc_parts))
    return (enc // n).astype(np.int64), (enc % n).astype(np.int64)


def _subdivided_weights(
    index: SpatialIndex,
    a: np.ndarray,
    b: np.ndarray,
    params: DtmParams,
    subdivisions: int,
) -> np.ndarray:
    """Batch midpoint-rule weights, arithmetic identical to dtm_segment_integral."""
    a, b = _lex_swap(a, b)
    r = subdivisions
    t = (np.arange(r) + 0.5) / r
    out = np.empty(a.shape[0])
    chunk = max(256, 2_000_000 // r)
    for start in range(0, a.shape[0], chunk):
        ac = a[start : start + chunk]
        bc = b[start : start + chunk]
        mids = ac[:, None, :] + t[None, :, None] * (bc - ac)[:, None, :]
        vals = _dtm_pow_batch(
            index, mids.reshape(-1, a.shape[1]), params, params.beta
        ).reshape(ac.shape[0], r)
        lengths = np.sqrt(((bc - ac) ** 2).sum(axis=1))
        out[start : start + chunk] = lengths / r * vals.sum(axis=1)
    return out


def build_graph(
    cloud: PointCloud | WeightedMeasure,
    topology: GraphTopology,
    weights: WeightMode,
    params: DtmParams | None = None,
) -> MetricGraph:
    """Build the weighted graph over a cloud (or a weighted measure's support).

    A plain cloud is treated as its uniform empirical measure for the
    field-based weight modes. KNearest clamps k to n-1; Yao requires
    dimension 2.
    """
    if isinstance(cloud, WeightedMeasure):
        measure = cloud
    else:
        measure = make_empirical(cloud)
    pts = measure.points
    n = pts.shape[0]
    if n < 2:
        raise InvalidInputError(f"build_graph: need at least 2 points, got {n}")

    if isinstance(topology, Complete):
        ei, ej = _complete_edges(n)
    elif isinstance(topology, KNearest):
        ei, ej = _knn_edges(pts, topology.k)
    elif isinstance(topology, Yao):
        if pts.shape[1] != 2:
            raise UnsupportedError(
                f"Yao topology requires dimension 2, got dimension {pts.shape[1]}"
            )
        ei, ej = _yao_edges(pts, topology.cones)
    else:
        raise InvalidInputError(f"build_graph: unknown topology {topology!r}")

    a = pts[ei]
    b = pts[ej]
    if isinstance(weights, SampleFermat):
        lengths = np.sqrt(((b - a) ** 2).sum(axis=1))
        w = lengths**weights.alpha
    else:
        if params is None:
            raise InvalidInputError("build_graph: field weight modes require params")
        index = SpatialIndex(measure)
        if isinstance(weights, SubdividedDtm):
            w = _subdivided_weights(index, a, b, params, weights.subdivisions)
        elif isinstance(weights, EndpointAverageDtm):
            vertex_pow = _dtm_pow_batch(index, pts, params, params.beta)
            lengths = np.sqrt(((b - a) ** 2).sum(axis=1))
            w = lengths * 0.5 * (vertex_pow[ei] + vertex_pow[ej])
        else:
            raise InvalidInputError(f"build_graph: unknown weight mode {weights!r}")

    return MetricGraph(pts, ei, ej, w, topology, weights, params)


@dataclass(frozen=True)
class EdgeCountReport:
    """Edge counts against the n * degree sparsity budget."""

    vertex_count: int
    edge_count: int
    degree: int
    bound: int
    within_bound: bool
    quadratic: bool


def edge_count_bound_check(graph: MetricGraph) -> EdgeCountReport:
    """Check a graph's edge count against n times its per-vertex degree.

    Sparse topologies use their own k or cone count as the degree; complete
    graphs are reported against n * ceil(log n) and flagged quadratic.
    """
    n = graph.n_vertices
    topo = graph.topology
    if isinstance(topo, KNearest):
        degree = min(topo.k, n - 1)
        quadratic = False
    elif isinstance(topo, Yao):
        degree = topo.cones
        quadratic = False
    else:
        degree = math.ceil(math.log(max(2, n)))
        quadratic = True
    bound = n * degree
    return EdgeCountReport(
        vertex_count=n,
        edge_count=graph.edge_count,
        degree=degree,
        bound=bound,
        within_bound=graph.edge_count <= bound,
        quadratic=quadratic,
    )
