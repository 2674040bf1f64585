"""Tests for the brute-force and analytic reference computations."""

import math

import numpy as np
import pytest

from fdtm import (
    Complete,
    DtmParams,
    SampleFermat,
    UnsupportedError,
    WeightedMeasure,
    make_empirical,
    sample_circle,
)
from fdtm.graph import MetricGraph
from fdtm.oracles import (
    OracleReport,
    circle_fdtm_analytic,
    circle_profile,
    _chord_cost,
    dtm_profile_integral,
    exhaustive_shortest,
    high_resolution_edge_weight,
    wasserstein_bruteforce,
)


def _uniform(points):
    pts = np.asarray(points, dtype=float)
    return WeightedMeasure(pts, np.full(len(pts), 1.0 / len(pts)))


class TestOracleReport:
    def test_errors(self):
        rep = OracleReport.compare(1.05, 1.0)
        assert rep.abs_err == pytest.approx(0.05)
        assert rep.rel_err == pytest.approx(0.05)


class TestWasserstein:
    def test_identical_measures(self):
        m = _uniform([[0.0, 0.0], [1.0, 1.0]])
        assert wasserstein_bruteforce(m, m, 2.0) == 0.0

    def test_singletons(self):
        a = _uniform([[0.0, 0.0]])
        b = _uniform([[3.0, 4.0]])
        assert wasserstein_bruteforce(a, b, 1.0) == pytest.approx(5.0)

    def test_hand_case_1d(self):
        a = _uniform([[0.0], [1.0]])
        b = _uniform([[0.1], [0.9]])
        assert wasserstein_bruteforce(a, b, 2.0) == pytest.approx(0.1, rel=1e-12)

    def test_caps_and_uniformity(self):
        big = _uniform(np.random.default_rng(0).normal(size=(8, 2)))
        with pytest.raises(UnsupportedError):
            wasserstein_bruteforce(big, big, 2.0)
        lop = WeightedMeasure([[0.0], [1.0]], [0.3, 0.7])
        with pytest.raises(UnsupportedError):
            wasserstein_bruteforce(lop, _uniform([[0.0], [1.0]]), 2.0)

    def test_metric_axioms_random(self):
        rng = np.random.default_rng(44)
        for _ in range(10):
            ms = [_uniform(rng.normal(size=(4, 2))) for _ in range(3)]
            d01 = wasserstein_bruteforce(ms[0], ms[1], 2.0)
            d10 = wasserstein_bruteforce(ms[1], ms[0], 2.0)
            d02 = wasserstein_bruteforce(ms[0], ms[2], 2.0)
            d12 = wasserstein_bruteforce(ms[1], ms[2], 2.0)
            assert d01 == pytest.approx(d10, rel=1e-12)
            assert d02 <= d01 + d12 + 1e-9


class TestExhaustiveShortest:
    def _graph(self, n, edges, weights):
        ei = np.array([e[0] for e in edges])
        ej = np.array([e[1] for e in edges])
        return MetricGraph(
            np.zeros((n, 2)), ei, ej, np.asarray(weights, float), Complete(), SampleFermat(1.5)
        )

    def test_s_equals_t(self):
        g = self._graph(2, [(0, 1)], [2.0])
        assert exhaustive_shortest(g, 0, 0) == 0.0

    def test_single_edge(self):
        g = self._graph(2, [(0, 1)], [2.5])
        assert exhaustive_shortest(g, 0, 1) == 2.5

    def test_disconnected(self):
        g = self._graph(3, [(0, 1)], [1.0])
        assert math.isinf(exhaustive_shortest(g, 0, 2))

    def test_size_cap(self):
        g = self._graph(9, [(0, 1)], [1.0])
        with pytest.raises(UnsupportedError):
            exhaustive_shortest(g, 0, 1)


class TestCircleReference:
    def test_zero_angle(self):
        assert circle_fdtm_analytic(0.0, DtmParams(0.1, 2.0, 2.0)) == 0.0

    def test_profile_identities(self):
        # At vanishing mass the radius profile goes to 0 on the circle, and
        # the radius capturing arc mass m is the chord 2 sin(pi m / 2).
        m = 0.1
        rho = 1.0
        delta_m = math.sqrt(1 + rho**2 - 2 * rho * math.cos(math.pi * m))
        assert delta_m == pytest.approx(2 * math.sin(math.pi * m / 2), rel=1e-12)
        tiny = circle_profile(1.0, DtmParams(1e-6, 2.0), 400)
        assert float(tiny) < 1e-5

    def test_min_at_most_single_chord(self):
        params = DtmParams(0.1, 2.0, 2.0)
        full = circle_fdtm_analytic(math.pi, params, 400)
        single = _chord_cost(math.pi, params, 400)
        assert full <= single

    def test_symmetry_reduction(self):
        params = DtmParams(0.1, 2.0, 2.0)
        a = circle_fdtm_analytic(math.pi / 2, params, 400)
        b = circle_fdtm_analytic(2 * math.pi - math.pi / 2, params, 400)
        assert a == pytest.approx(b, rel=1e-12)

    def test_quadrature_floor(self):
        with pytest.raises(Exception):
            circle_fdtm_analytic(1.0, DtmParams(0.1, 2.0, 2.0), 10)


class TestHighResolutionWeight:
    def test_zero_segment(self):
        m = _uniform([[0.0, 0.0], [1.0, 0.0]])
        params = DtmParams(0.5, 2.0, 2.0)
        assert high_resolution_edge_weight(m, [0.3, 0.3], [0.3, 0.3], params) == 0.0

    def test_closed_form_single_atom(self):
        # Atom at t0 on the segment: integral of |t-t0|^beta dt in closed form.
        t0, beta = 0.25, 2.0
        m = WeightedMeasure([[t0]], [1.0])
        params = DtmParams(1.0, 2.0, beta)
        exact = (t0 ** (beta + 1) + (1 - t0) ** (beta + 1)) / (beta + 1)
        got = high_resolution_edge_weight(m, [0.0], [1.0], params)
        assert got == pytest.approx(exact, abs=1e-4)

    def test_agrees_with_production_subdivisions(self):
        cloud = sample_circle(64, seed=10)
        measure = make_empirical(cloud)
        params = DtmParams(0.1, 2.0, 2.0)
        rng = np.random.default_rng(2)
        r = max(1, math.ceil(math.log(64)))
        from fdtm.dtm import SpatialIndex, dtm_segment_integral

        index = SpatialIndex(measure)
        for _ in range(10):
            i, j = rng.integers(0, 64, size=2)
            if i == j:
                continue
            x, y = cloud.points[i], cloud.points[j]
            prod = dtm_segment_integral(index, x, y, params, r)
            ref = high_resolution_edge_weight(measure, x, y, params)
            assert prod == pytest.approx(ref, rel=0.05)


class TestProfileOracle:
    def test_single_atom(self):
        m = WeightedMeasure([[0.0, 0.0]], [1.0])
        v = dtm_profile_integral(m, [3.0, 4.0], DtmParams(0.7, 2.0))
        assert v == pytest.approx(5.0, rel=1e-12)

    def test_partial_mass_cut(self):
        # Masses 0.6/0.4 at distances 1 and 2 with m=0.8: only half of the
        # second atom's mass is counted.
        m = WeightedMeasure([[1.0], [-2.0]], [0.6, 0.4])
        v = dtm_profile_integral(m, [0.0], DtmParams(0.8, 1.0))
        assert v == pytest.approx((0.6 * 1.0 + 0.2 * 2.0) / 0.8, rel=1e-12)
