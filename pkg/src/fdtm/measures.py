"""Weighted discrete probability measures and sampled point configurations.

A WeightedMeasure is a finite set of atoms with positive masses summing to
one; every distance-to-measure computation in this package runs on one. The
generators below produce the uniform circle sample, the annulus-with-shortcut
sample, and the two-atoms-plus-densities adversarial pair used by the tests
and the experiment harness. All generators are pure functions of their
arguments, seed included.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from fdtm.errors import InvalidInputError

_MASS_TOL = 1e-12


def _as_points(points, name: str) -> np.ndarray:
    arr = np.ascontiguousarray(np.asarray(points, dtype=np.float64))
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    if arr.ndim != 2:
        raise InvalidInputError(f"{name}: points must be a 2-D array, got ndim={arr.ndim}")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError(f"{name}: points must be finite")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class PointCloud:
    """A finite list of d-dimensional points; duplicates are permitted."""

    points: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "points", _as_points(self.points, "PointCloud"))

    @property
    def size(self) -> int:
        return self.points.shape[0]

    @property
    def dimension(self) -> int:
        return self.points.shape[1]


@dataclass(frozen=True)
class WeightedMeasure:
    """A discrete probability measure: atoms with positive masses summing to 1."""

    points: np.ndarray
    masses: np.ndarray

    def __post_init__(self):
        pts = _as_points(self.points, "WeightedMeasure")
        if pts.shape[0] == 0:
            raise InvalidInputError("WeightedMeasure: point set must be non-empty")
        w = np.ascontiguousarray(np.asarray(self.masses, dtype=np.float64)).ravel()
        if w.shape[0] != pts.shape[0]:
            raise InvalidInputError(
                f"WeightedMeasure: {pts.shape[0]} points but {w.shape[0]} masses"
            )
        if not np.all(np.isfinite(w)) or np.any(w <= 0.0):
            raise InvalidInputError("WeightedMeasure: masses must be positive and finite")
        total = float(w.sum())
        if abs(total - 1.0) > _MASS_TOL * max(1.0, abs(total)):
            raise InvalidInputError(f"WeightedMeasure: masses sum to {total!r}, expected 1")
        w.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "masses", w)

    @property
    def size(self) -> int:
        return self.points.shape[0]

    @property
    def dimension(self) -> int:
        return self.points.shape[1]


@dataclass(frozen=True)
class DtmParams:
    """Parameters of the distance-to-measure and its path metric.

    m is the mass fraction averaged over, p the averaging exponent, beta the
    exponent applied to the field along paths.
    """

    m: float
    p: float = 2.0
    beta: float = 2.0

    def __post_init__(self):
        if not (0.0 < self.m <= 1.0):
            raise InvalidInputError(f"DtmParams: m must be in (0, 1], got {self.m}")
        if self.p < 1.0:
            raise InvalidInputError(f"DtmParams: p must be >= 1, got {self.p}")
        if self.beta < 1.0:
            raise InvalidInputError(f"DtmParams: beta must be >= 1, got {self.beta}")


def make_empirical(cloud: PointCloud) -> WeightedMeasure:
    """Uniform measure on a cloud: each point gets mass 1/n.

    Duplicate points are kept as separate atoms; they aggregate implicitly
    when the measure is evaluated.
    """
    if cloud.size == 0:
        raise InvalidInputError("make_empirical: cloud is empty")
    n = cloud.size
    return WeightedMeasure(cloud.points, np.full(n, 1.0 / n))


def sample_circle(n: int, seed: int) -> PointCloud:
    """n i.i.d. points uniform on the unit circle, deterministic given seed."""
    if n < 1:
        raise InvalidInputError(f"sample_circle: n must be >= 1, got {n}")
    rng = np.random.default_rng(seed)
    theta = rng.uniform(0.0, 2.0 * np.pi, size=n)
    return PointCloud(np.column_stack([np.cos(theta), np.sin(theta)]))


def expected_ring_spacing(n: int, inner_radius: float, outer_radius: float) -> float:
    """Expected nearest-neighbor distance of a uniform annulus sample.

    For intensity n/area in the plane the expected gap is sqrt(area/n)/2.
    """
    area = np.pi * (outer_radius**2 - inner_radius**2)
    return 0.5 * float(np.sqrt(area / n))


def sample_ring(
    n: int,
    inner_radius: float,
    outer_radius: float,
    shortcut: bool = False,
    shortcut_count: int | None = None,
    seed: int = 0,
) -> PointCloud:
    """Uniform annulus sample, optionally with a shortcut across the hole.

    With `shortcut` set, the `shortcut_count` points of largest index
    (default round(sqrt(n))) are replaced by points evenly spaced along the
    diameter segment crossing the hole, jittered by a small uniform offset
    matched to the annulus point spacing. The first n - shortcut_count points
    are identical to the plain sample for the same seed, so paired runs
    isolate the shortcut effect.
    """
    if n < 1:
        raise InvalidInputError(f"sample_ring: n must be >= 1, got {n}")
    if not (0.0 < inner_radius < outer_radius):
        raise InvalidInputError(
            f"sample_ring: need 0 < inner_radius < outer_radius, got {inner_radius}, {outer_radius}"
        )
    rng = np.random.default_rng(seed)
    theta = rng.uniform(0.0, 2.0 * np.pi, size=n)
    # Inverse-CDF radius for a uniform density on the annulus.
    u = rng.uniform(0.0, 1.0, size=n)
    radius = np.sqrt(inner_radius**2 + u * (outer_radius**2 - inner_radius**2))
    pts = np.column_stack([radius * np.cos(theta), radius * np.sin(theta)])

    if shortcut:
        count = int(round(np.sqrt(n))) if shortcut_count is None else int(shortcut_count)
        if count < 1 or count > n:
            raise InvalidInputError(
                f"sample_ring: shortcut_count must be in [1, n], got {count}"
            )
        along = 2.0 * inner_radius / count
        xs = -inner_radius + (np.arange(count) + 0.5) * along
        # Jitter keeps points strictly inside the hole and near the segment.
        amp = min(0.5 * expected_ring_spacing(n, inner_radius, outer_radius), 0.45 * along)
        jitter = rng.uniform(-amp, amp, size=(count, 2))
        pts[n - count :, 0] = xs + jitter[:, 0]
        pts[n - count :, 1] = jitter[:, 1]
    return PointCloud(pts)


def lecam_pair(
    b: float,
    alpha: float,
    r: float,
    epsilon: float,
    m: float,
    atoms_per_density: int,
) -> tuple[WeightedMeasure, WeightedMeasure]:
    """A pair of nearby measures whose path metrics differ by order epsilon.

    The first measure puts mass m*alpha at -r*e2 and m*(1-alpha) at r*e2 plus
    a background component of mass 1-m spread over the segment [3r*e2, 4r*e2].
    The second moves mass m*epsilon**b from the atom at r*e2 onto a short
    bridge below it, with density b*t**(b-1) on offsets t in [0, epsilon].
    Both continuous components are discretized as equal-mass atoms: the
    background evenly spaced, the bridge at inverse-CDF midpoints, which
    preserves total mass exactly.
    """
    if b < 1.0:
        raise InvalidInputError(f"lecam_pair: b must be >= 1, got {b}")
    if not (0.0 < alpha < 1.0):
        raise InvalidInputError(f"lecam_pair: alpha must be in (0, 1), got {alpha}")
    if r <= 0.0:
        raise InvalidInputError(f"lecam_pair: r must be positive, got {r}")
    if not (0.0 < epsilon < (1.0 - alpha) ** (1.0 / b)):
        raise InvalidInputError(
            f"lecam_pair: epsilon must be in (0, (1-alpha)^(1/b)), got {epsilon}"
        )
    if not (0.0 < m <= 1.0):
        raise InvalidInputError(f"lecam_pair: m must be in (0, 1], got {m}")
    if atoms_per_density < 1:
        raise InvalidInputError(
            f"lecam_pair: atoms_per_density must be >= 1, got {atoms_per_density}"
        )

    k = atoms_per_density
    moved = m * epsilon**b

    pts = [(0.0, -r), (0.0, r)]
    w_mu = [m * alpha, m * (1.0 - alpha)]
    if m < 1.0:
        # Background mass 1-m as equal atoms evenly spaced on [3r, 4r] * e2.
        ys = 3.0 * r + (np.arange(k) + 0.5) / k * r
        pts.extend((0.0, float(y)) for y in ys)
        w_mu.extend([(1.0 - m) / k] * k)

    mu = WeightedMeasure(np.array(pts), np.array(w_mu))

    # Bridge atoms at the inverse-CDF midpoints of density b*t^(b-1) on [0, eps].
    q = (np.arange(k) + 0.5) / k
    t = epsilon * q ** (1.0 / b)
    bridge_pts = [(0.0, float(r - epsilon + ti)) for ti in t]

    w_nu = list(w_mu)
    w_nu[1] = m * (1.0 - alpha) - moved
    nu = WeightedMeasure(
        np.array(pts + bridge_pts),
        np.array(w_nu + [moved / k] * k),
    )
    return mu, nu


def scale_measure(mu: WeightedMeasure, s: float) -> WeightedMeasure:
    """Scale every atom position by s > 0; masses are unchanged."""
    if not (s > 0.0) or not np.isfinite(s):
        raise InvalidInputError(f"scale_measure: s must be positive, got {s}")
    return WeightedMeasure(mu.points * s, mu.masses)
