"""Tests for shortest paths, geodesic queries and their metric properties."""

import math

import numpy as np
import pytest

from fdtm import (
    Complete,
    DtmParams,
    InvalidInputError,
    KNearest,
    PointCloud,
    SampleFermat,
    SpatialIndex,
    SubdividedDtm,
    all_pairs_sampled,
    build_graph,
    dtm_batch,
    dtm_segment_integral,
    fdtm_query,
    make_empirical,
    sample_circle,
    scale_measure,
    single_source,
)
from fdtm.graph import MetricGraph
from fdtm.oracles import exhaustive_shortest
from fdtm.paths import _dijkstra_dense, _dijkstra_heap


def _graph(points, edges, weights) -> MetricGraph:
    ei = np.array([e[0] for e in edges])
    ej = np.array([e[1] for e in edges])
    return MetricGraph(
        np.asarray(points, dtype=float), ei, ej, np.asarray(weights, dtype=float),
        Complete(), SampleFermat(1.5),
    )


class TestSingleSource:
    def test_chain(self):
        g = _graph([[0, 0], [1, 0], [2, 0]], [(0, 1), (1, 2)], [1.0, 1.0])
        tree = single_source(g, 0)
        assert tree.dist.tolist() == [0.0, 1.0, 2.0]
        assert tree.path_to(2) == [0, 1, 2]

    def test_triangle_relaxation(self):
        g = _graph(
            [[0, 0], [1, 0], [2, 0]], [(0, 1), (1, 2), (0, 2)], [1.0, 1.0, 3.0]
        )
        tree = single_source(g, 0)
        assert tree.dist[2] == 2.0
        assert tree.pred[2] == 1

    def test_unreachable_is_inf(self):
        g = _graph([[0, 0], [1, 0], [5, 5]], [(0, 1)], [1.0])
        tree = single_source(g, 0)
        assert math.isinf(tree.dist[2])
        assert tree.path_to(2) is None

    def test_source_out_of_range(self):
        g = _graph([[0, 0], [1, 0]], [(0, 1)], [1.0])
        with pytest.raises(InvalidInputError):
            single_source(g, 5)

    def test_matches_exhaustive_enumeration(self):
        rng = np.random.default_rng(17)
        for _ in range(200):
            n = int(rng.integers(2, 9))
            edges = [
                (i, j)
                for i in range(n)
                for j in range(i + 1, n)
                if rng.uniform() < 0.55
            ] or [(0, 1)]
            w = rng.uniform(0.05, 2.0, size=len(edges))
            g = _graph(rng.normal(size=(n, 2)), edges, w)
            tree = single_source(g, 0)
            for t in range(n):
                ref = exhaustive_shortest(g, 0, t)
                got = tree.dist[t]
                if math.isinf(ref):
                    assert math.isinf(got)
                else:
                    assert got == pytest.approx(ref, rel=1e-12)

    def test_dense_and_heap_agree_exactly(self):
        rng = np.random.default_rng(23)
        for _ in range(30):
            n = int(rng.integers(4, 50))
            edges = [
                (i, j)
                for i in range(n)
                for j in range(i + 1, n)
                if rng.uniform() < 0.4
            ] or [(0, 1)]
            w = rng.choice([0.5, 1.0, 1.5], size=len(edges))  # provoke ties
            g = _graph(rng.normal(size=(n, 2)), edges, w)
            offsets, nbr, wts = g.adjacency()
            d1, p1 = _dijkstra_heap(offsets, nbr, wts, n, 0)
            d2, p2 = _dijkstra_dense(g.to_dense(), 0)
            assert np.array_equal(d1, d2)
            assert np.array_equal(p1, p2)

    def test_tree_edge_consistency(self):
        cloud = sample_circle(80, seed=3)
        g = build_graph(cloud, KNearest(5), SampleFermat(1.2))
        tree = single_source(g, 7)
        offsets, nbr, wts = g.adjacency()
        for i, j, w in zip(g.edge_i, g.edge_j, g.weights):
            if np.isfinite(tree.dist[i]) and np.isfinite(tree.dist[j]):
                assert abs(tree.dist[i] - tree.dist[j]) <= w + 1e-12
        # Following predecessors reproduces the distance.
        for v in range(80):
            path = tree.path_to(v)
            if path is None:
                continue
            total = 0.0
            dense = g.to_dense()
            for a, b in zip(path, path[1:]):
                total += dense[a, b]
            assert total == pytest.approx(tree.dist[v], rel=1e-9)


class TestAllPairs:
    def test_single_row(self):
        g = _graph([[0, 0], [1, 0], [2, 0]], [(0, 1), (1, 2)], [1.0, 2.0])
        mat = all_pairs_sampled(g, [1])
        assert np.array_equal(mat[0], single_source(g, 1).dist)

    def test_metric_axioms_small(self):
        cloud = sample_circle(5, seed=1)
        params = DtmParams(0.4, 2.0, 2.0)
        g = build_graph(cloud, Complete(), SubdividedDtm(8), params)
        mat = all_pairs_sampled(g, range(5))
        assert np.abs(np.diag(mat)).max() == 0.0
        assert np.abs(mat - mat.T).max() == 0.0
        for a in range(5):
            for b in range(5):
                for c in range(5):
                    assert mat[a, c] <= mat[a, b] + mat[b, c] + 1e-9


class TestFdtmQuery:
    def test_reflexive(self):
        cloud = PointCloud([[0.0, 0.0], [1.0, 0.0]])
        measure = make_empirical(cloud)
        params = DtmParams(1.0, 1.0, 1.0)
        g = build_graph(measure, Complete(), SubdividedDtm(10), params)
        res = fdtm_query(measure, g, [0.5, 2.0], [0.5, 2.0], params)
        assert res.distance == 0.0
        assert res.polyline.shape == (1, 2)
        assert res.euclidean_length == 0.0

    def test_two_atom_hand_value(self):
        # Field along the segment between the atoms is identically 1/2.
        cloud = PointCloud([[0.0, 0.0], [1.0, 0.0]])
        measure = make_empirical(cloud)
        params = DtmParams(1.0, 1.0, 1.0)
        g = build_graph(measure, Complete(), SubdividedDtm(1000), params)
        res = fdtm_query(measure, g, [0.0, 0.0], [1.0, 0.0], params)
        assert res.distance == pytest.approx(0.5, abs=1e-3)

    def test_symmetry(self):
        cloud = sample_circle(40, seed=2)
        measure = make_empirical(cloud)
        params = DtmParams(0.2, 2.0, 2.0)
        g = build_graph(measure, Complete(), SubdividedDtm(4), params)
        a = fdtm_query(measure, g, [1.3, 0.0], [-0.2, 0.8], params)
        b = fdtm_query(measure, g, [-0.2, 0.8], [1.3, 0.0], params)
        assert a.distance == b.distance

    def test_vertex_queries_match_graph_distance(self):
        cloud = sample_circle(30, seed=8)
        measure = make_empirical(cloud)
        params = DtmParams(0.2, 2.0, 2.0)
        g = build_graph(measure, Complete(), SubdividedDtm(3), params)
        i, j = 4, 17
        expected = single_source(g, i).dist[j]
        got = fdtm_query(measure, g, cloud.points[i], cloud.points[j], params)
        assert got.distance == pytest.approx(expected, rel=1e-12)

    def test_upper_bounded_by_direct_segment(self):
        rng = np.random.default_rng(19)
        cloud = PointCloud(rng.normal(size=(50, 2)))
        measure = make_empirical(cloud)
        params = DtmParams(0.3, 2.0, 2.0)
        g = build_graph(measure, Complete(), SubdividedDtm(5), params)
        index = SpatialIndex(measure)
        for _ in range(10):
            x, y = rng.normal(size=2), rng.normal(size=2)
            res = fdtm_query(measure, g, x, y, params)
            direct = dtm_segment_integral(index, x, y, params, 5)
            assert res.distance <= direct + 1e-12

    def test_polyline_endpoints_and_length(self):
        cloud = sample_circle(60, seed=12)
        measure = make_empirical(cloud)
        params = DtmParams(0.1, 2.0, 2.0)
        g = build_graph(measure, Complete(), SubdividedDtm(3), params)
        x, y = np.array([1.0, 0.0]), np.array([-1.0, 0.0])
        res = fdtm_query(measure, g, x, y, params)
        assert np.array_equal(res.polyline[0], x)
        assert np.array_equal(res.polyline[-1], y)
        seg = np.sqrt(((res.polyline[1:] - res.polyline[:-1]) ** 2).sum(axis=1)).sum()
        assert res.euclidean_length == pytest.approx(float(seg))

    def test_sparser_graphs_never_shorter(self):
        # Adding edges can only shrink distances: knn(k) >= knn(k+2) >= complete.
        cloud = sample_circle(80, seed=21)
        measure = make_empirical(cloud)
        params = DtmParams(0.15, 2.0, 2.0)
        x, y = np.array([0.9, 0.4]), np.array([-1.0, -0.1])
        dists = []
        for topo in (KNearest(4), KNearest(6), Complete()):
            g = build_graph(measure, topo, SubdividedDtm(3), params)
            dists.append(fdtm_query(measure, g, x, y, params).distance)
        assert dists[0] >= dists[1] - 1e-12
        assert dists[1] >= dists[2] - 1e-12

    def test_geodesic_length_bound(self):
        rng = np.random.default_rng(29)
        params = DtmParams(0.25, 2.0, 2.0)
        for _ in range(10):
            cloud = PointCloud(rng.normal(size=(40, 2)))
            measure = make_empirical(cloud)
            g = build_graph(measure, Complete(), SubdividedDtm(4), params)
            index = SpatialIndex(measure)
            x, y = rng.normal(size=2), rng.normal(size=2)
            res = fdtm_query(measure, g, x, y, params)
            t = (np.arange(64) + 0.5) / 64
            seg = x[None, :] + t[:, None] * (y - x)[None, :]
            top = dtm_batch(index, seg, params).max()
            bottom = dtm_batch(index, g.points, params).min()
            gap = math.sqrt(((x - y) ** 2).sum())
            assert res.euclidean_length <= (top / bottom) ** params.beta * gap * 1.05

    def test_scaling_covariance(self):
        cloud = sample_circle(36, seed=15)
        measure = make_empirical(cloud)
        params = DtmParams(0.2, 2.0, 2.0)
        g = build_graph(measure, Complete(), SubdividedDtm(4), params)
        x, y = np.array([0.8, 0.2]), np.array([-0.9, -0.3])
        base = fdtm_query(measure, g, x, y, params).distance
        for s in (0.5, 3.0):
            scaled = scale_measure(measure, s)
            gs = build_graph(scaled, Complete(), SubdividedDtm(4), params)
            got = fdtm_query(scaled, gs, x * s, y * s, params).distance
            assert got == pytest.approx(base * s ** (params.beta + 1), rel=1e-9)

    def test_dimension_mismatch(self):
        cloud = sample_circle(10, seed=1)
        measure = make_empirical(cloud)
        params = DtmParams(0.5, 2.0, 2.0)
        g = build_graph(measure, Complete(), SubdividedDtm(2), params)
        with pytest.raises(InvalidInputError):
            fdtm_query(measure, g, [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], params)

    def test_wrong_measure_rejected(self):
        cloud = sample_circle(10, seed=1)
        other = make_empirical(sample_circle(10, seed=2))
        params = DtmParams(0.5, 2.0, 2.0)
        g = build_graph(cloud, Complete(), SubdividedDtm(2), params)
        with pytest.raises(InvalidInputError):
            fdtm_query(other, g, [1.0, 0.0], [0.0, 1.0], params)
