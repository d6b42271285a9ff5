"""A sparse lattice whose points stay pairwise further than 4 apart.

Basis in R^d (d >= 2), with a small stretch delta > 0:

    v1 = (4 + delta) e1
    vi = -(2 + delta/2) e1 + 2*sqrt(3) ei          for i = 2..d

Every nonzero integer combination has length > 4, with the minimum
sqrt((2 + delta/2)^2 + 12) barely above 4, so unit balls centered on
distinct lattice points never meet while the lattice stays as dense as
that constraint allows.  The module provides exact closest-point
queries, the coverage test against the union of unit balls at lattice
sites, and Monte Carlo volume estimation over period-aligned boxes.

Coordinates of a lattice point with coefficients (a1, ..., ad):

    x1 = (2 + delta/2) * (2*a1 - a2 - ... - ad)
    xi = 2*sqrt(3) * ai                            for i = 2..d

so axis 1 holds multiples of s = 2 + delta/2 whose multiplier parity
equals the parity of a2 + ... + ad, and axes 2..d hold even multiples
of sqrt(3).  Rounding a query per axis under that parity coupling is a
constant-time operation; it lands on the covering lattice point
whenever one exists within distance 1, but it is not always the
globally nearest point, so closest-point queries additionally scan the
constant-size candidate window that the rounded distance bounds.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .geometry import Point, UsageError, distance

SQRT3 = math.sqrt(3.0)

CoeffVector = tuple[int, ...]


@dataclass(frozen=True)
class LatticeParams:
    """Dimension and stretch of the lattice; delta must be positive."""

    dim: int
    delta: float = 0.01

    def __post_init__(self) -> None:
        if self.dim < 2:
            raise UsageError(f"lattice dimension must be >= 2, got {self.dim}")
        object.__setattr__(self, "delta", float(self.delta))
        if not (math.isfinite(self.delta) and self.delta > 0):
            raise UsageError(f"delta must be > 0, got {self.delta}")

    @property
    def axis1_unit(self) -> float:
        """Base step s on axis 1; admissible coordinates are s * m."""
        return 2.0 + self.delta / 2.0

    @property
    def axis1_period(self) -> float:
        """Translation period along axis 1 (= v1 length = 2s)."""
        return 4.0 + self.delta

    @property
    def cross_period(self) -> float:
        """Translation period along each axis >= 2 (= 4*sqrt(3))."""
        return 4.0 * SQRT3

    def basis(self) -> list[Point]:
        vecs = []
        for i in range(self.dim):
            coords = [0.0] * self.dim
            if i == 0:
                coords[0] = self.axis1_period
            else:
                coords[0] = -self.axis1_unit
                coords[i] = 2.0 * SQRT3
            vecs.append(Point(tuple(coords)))
        return vecs

    def shift_extents(self) -> tuple[float, ...]:
        """Per-axis ranges a random shift is drawn from."""
        return (self.axis1_period,) + (2.0 * SQRT3,) * (self.dim - 1)


def lattice_point(params: LatticeParams, coeffs: Sequence[int]) -> Point:
    """The lattice point with the given integer coefficients."""
    if len(coeffs) != params.dim:
        raise UsageError(f"expected {params.dim} coefficients, got {len(coeffs)}")
    ints = []
    for a in coeffs:
        if a != int(a):
            raise UsageError(f"coefficients must be integers, got {a!r}")
        ints.append(int(a))
    rest = ints[1:]
    x1 = params.axis1_period * ints[0] - params.axis1_unit * sum(rest)
    return Point((x1,) + tuple(2.0 * SQRT3 * a for a in rest))


def parity_rounded_point(params: LatticeParams, c: Point) -> tuple[Point, CoeffVector]:
    """One-shot per-axis rounding to an admissible lattice point.

    Axes 2..d snap to the nearest even multiple of sqrt(3) (exact
    midpoints round up); axis 1 then snaps to the nearest multiple of
    s = 2 + delta/2 whose multiplier parity matches the other axes'
    coefficient sum (again rounding up at the midpoint).  Constant
    time.  Guaranteed to return the covering lattice point whenever
    the query is within distance 1 of any lattice point; for faraway
    queries a different parity choice can be nearer, so use
    closest_lattice_point for true nearest-point queries.
    """
    if c.dim != params.dim:
        raise UsageError(f"query dim {c.dim} does not match lattice dim {params.dim}")
    rest: list[int] = []
    for x in c.coords[1:]:
        z = math.floor(x / SQRT3)
        rest.append(z // 2 if z % 2 == 0 else (z + 1) // 2)
    k = sum(rest) % 2
    s = params.axis1_unit
    z1 = math.floor(c.coords[0] / s)
    m = z1 if z1 % 2 == k else z1 + 1
    a1 = (m + sum(rest)) // 2
    coeffs = (a1,) + tuple(rest)
    return lattice_point(params, coeffs), coeffs


def closest_lattice_point(params: LatticeParams, c: Point) -> tuple[Point, CoeffVector]:
    """The lattice point nearest to c, with its coefficients.

    Starts from the parity-rounded point, whose distance D bounds the
    answer, then scans every lattice point whose per-axis distances can
    stay within D: a constant-size window for fixed dimension.  Exact
    up to float rounding; ties keep the first candidate in scan order.
    """
    p0, coeffs0 = parity_rounded_point(params, c)
    bound = distance(p0, c) + 1e-9
    s = params.axis1_unit
    axis_ranges = []
    for x in c.coords[1:]:
        step = 2.0 * SQRT3
        lo = math.ceil((x - bound) / step)
        hi = math.floor((x + bound) / step)
        axis_ranges.append(range(lo, hi + 1))
    best_d2 = float("inf")
    best: tuple[Point, CoeffVector] = (p0, coeffs0)
    q = c.coords[0] / s
    for combo in itertools.product(*axis_ranges):
        k = sum(combo) % 2
        m_lo = 2 * math.floor((q - k) / 2) + k
        m = m_lo if abs(q - m_lo) < abs(q - (m_lo + 2)) else m_lo + 2
        a1 = (m + sum(combo)) // 2
        coeffs = (a1,) + combo
        p = lattice_point(params, coeffs)
        d2 = sum((a - b) ** 2 for a, b in zip(p.coords, c.coords))
        if d2 < best_d2:
            best_d2 = d2
            best = (p, coeffs)
    return best


def is_covered(params: LatticeParams, c: Point) -> bool:
    """True iff c lies in some closed unit ball centered at a lattice point."""
    p, _ = closest_lattice_point(params, c)
    return distance(p, c) <= 1.0


def coverage_cells(
    params: LatticeParams, points: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized coverage test for an (n, dim) array of query points.

    Returns (covered, coeffs): a boolean array and an (n, dim) int64
    array of parity-rounded coefficients.  For covered points the
    coefficients identify the unique covering lattice point; for
    uncovered points they are merely the rounded cell.
    """
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[1] != params.dim:
        raise UsageError(f"expected shape (n, {params.dim}), got {pts.shape}")
    s = params.axis1_unit
    z = np.floor(pts[:, 1:] / SQRT3).astype(np.int64)
    a_rest = (z + (z & 1)) >> 1  # even z -> z/2, odd z -> (z+1)/2
    snapped = a_rest.astype(np.float64) * (2.0 * SQRT3)
    k = a_rest.sum(axis=1) & 1
    z1 = np.floor(pts[:, 0] / s).astype(np.int64)
    m = np.where((z1 & 1) == k, z1, z1 + 1)
    x1 = m.astype(np.float64) * s
    d2 = (pts[:, 0] - x1) ** 2 + ((pts[:, 1:] - snapped) ** 2).sum(axis=1)
    covered = d2 <= 1.0
    a1 = (m + a_rest.sum(axis=1)) >> 1
    coeffs = np.column_stack([a1, a_rest])
    return covered, coeffs


def min_pairwise_distance(params: LatticeParams, window: int = 3) -> float:
    """Minimum distance between distinct lattice points with coefficients
    in [-window, window]^dim.

    Pairwise differences of such points are exactly the lattice points
    with coefficients in [-2*window, 2*window]^dim, so the minimum over
    pairs equals the minimum norm over that difference window.
    """
    if window < 1:
        raise UsageError(f"window must be >= 1, got {window}")
    w2 = 2 * window
    d = params.dim
    span = np.arange(-w2, w2 + 1, dtype=np.int64)
    rest_grids = np.meshgrid(*([span] * (d - 1)), indexing="ij")
    rest = np.stack([g.ravel() for g in rest_grids], axis=1)  # ((4w+1)^(d-1), d-1)
    rest_sq = ((rest.astype(np.float64) * (2.0 * SQRT3)) ** 2).sum(axis=1)
    rest_sum = rest.sum(axis=1).astype(np.float64)
    best = math.inf
    for a1 in span:
        x1 = params.axis1_period * float(a1) - params.axis1_unit * rest_sum
        d2 = x1 * x1 + rest_sq
        if a1 == 0:
            origin = int(np.flatnonzero((rest == 0).all(axis=1))[0])
            d2[origin] = np.inf
        best = min(best, float(d2.min()))
    return math.sqrt(best)


@dataclass(frozen=True)
class SampleBox:
    """Axis-aligned box used for volume sampling, one period per axis."""

    origin: Point
    extents: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.extents) != self.origin.dim:
            raise UsageError("extents dimension mismatch")
        object.__setattr__(self, "extents", tuple(float(e) for e in self.extents))
        if not all(e > 0 for e in self.extents):
            raise UsageError("extents must be positive")

    @classmethod
    def aligned(cls, params: LatticeParams, origin: Point) -> "SampleBox":
        """Box at origin with side 4+delta on axis 1 and 2*sqrt(3) elsewhere."""
        if origin.dim != params.dim:
            raise UsageError("origin dimension mismatch")
        return cls(origin=origin, extents=(params.axis1_period,) + (2.0 * SQRT3,) * (params.dim - 1))

    @property
    def volume(self) -> float:
        return math.prod(self.extents)


def mc_volume_fraction(
    params: LatticeParams, box: SampleBox, samples: int, seed: int
) -> tuple[float, float]:
    """Monte Carlo estimate of the covered fraction of an aligned box.

    Draws uniform samples, tests coverage, and returns (fraction,
    binomial standard error).  The box must be period-aligned (one
    fundamental cell), which makes fraction * box.volume an estimate of
    the unit-ball volume regardless of where the box sits.
    """
    if samples < 1:
        raise UsageError(f"samples must be >= 1, got {samples}")
    expected = SampleBox.aligned(params, box.origin).extents
    for axis, (got, want) in enumerate(zip(box.extents, expected)):
        if not math.isclose(got, want, rel_tol=1e-12, abs_tol=1e-12):
            raise UsageError(
                f"box extent {got} on axis {axis} does not match the period {want}"
            )
    rng = np.random.default_rng(seed)
    lo = np.asarray(box.origin.coords, dtype=np.float64)
    pts = rng.uniform(lo, lo + np.asarray(box.extents), size=(samples, params.dim))
    covered, _ = coverage_cells(params, pts)
    fraction = float(covered.mean())
    stderr = math.sqrt(fraction * (1.0 - fraction) / samples)
    return fraction, stderr


def unit_ball_volume(dim: int) -> float:
    """Lebesgue volume of the unit ball in R^dim."""
    if dim < 1:
        raise UsageError(f"dimension must be >= 1, got {dim}")
    return math.pi ** (dim / 2.0) / math.gamma(dim / 2.0 + 1.0)
