"""Geometric primitives and intersection graphs.

Points, closed balls, and axis-aligned boxes in d dimensions, plus the
closed-contact intersection predicates used to derive conflict graphs.
Touching counts as intersecting; callers that need to avoid knife-edge
cases keep their inputs away from exact tangency.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence, Union


class UsageError(ValueError):
    """Raised for malformed or inconsistent caller input."""


@dataclass(frozen=True)
class Point:
    """Immutable point in R^d, d >= 1."""

    coords: tuple[float, ...]

    def __post_init__(self) -> None:
        coords = tuple(float(x) for x in self.coords)
        if len(coords) == 0:
            raise UsageError("point needs at least one coordinate")
        if not all(math.isfinite(x) for x in coords):
            raise UsageError(f"non-finite coordinate in {coords!r}")
        object.__setattr__(self, "coords", coords)

    @property
    def dim(self) -> int:
        return len(self.coords)

    def translated(self, offset: Iterable[float]) -> "Point":
        off = tuple(offset)
        if len(off) != self.dim:
            raise UsageError("offset dimension mismatch")
        return Point(tuple(x + o for x, o in zip(self.coords, off)))

    def __iter__(self):
        return iter(self.coords)


def distance(a: Point, b: Point) -> float:
    """Euclidean distance between two points of equal dimension."""
    if a.dim != b.dim:
        raise UsageError(f"dimension mismatch: {a.dim} vs {b.dim}")
    return math.dist(a.coords, b.coords)


@dataclass(frozen=True)
class Ball:
    """Closed Euclidean ball."""

    center: Point
    radius: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "radius", float(self.radius))
        if not (math.isfinite(self.radius) and self.radius > 0):
            raise UsageError(f"ball radius must be positive, got {self.radius}")

    @property
    def dim(self) -> int:
        return self.center.dim


@dataclass(frozen=True)
class HyperRectangle:
    """Closed axis-aligned box given by strict lower/upper corners."""

    lo: Point
    hi: Point

    def __post_init__(self) -> None:
        if self.lo.dim != self.hi.dim:
            raise UsageError("corner dimension mismatch")
        for axis, (l, u) in enumerate(zip(self.lo.coords, self.hi.coords)):
            if not l < u:
                raise UsageError(
                    f"degenerate box: lo[{axis}]={l} must be < hi[{axis}]={u}"
                )

    @property
    def dim(self) -> int:
        return self.lo.dim

    @property
    def sides(self) -> tuple[float, ...]:
        return tuple(u - l for l, u in zip(self.lo.coords, self.hi.coords))


Shape = Union[Ball, HyperRectangle]


def balls_intersect(a: Ball, b: Ball) -> bool:
    """Closed-contact test: true iff center distance <= radius sum."""
    return distance(a.center, b.center) <= a.radius + b.radius


def rects_intersect(a: HyperRectangle, b: HyperRectangle) -> bool:
    """Closed-contact test: true iff the interval overlap holds on every axis."""
    if a.dim != b.dim:
        raise UsageError(f"dimension mismatch: {a.dim} vs {b.dim}")
    return all(
        al <= bu and bl <= au
        for al, au, bl, bu in zip(a.lo.coords, a.hi.coords, b.lo.coords, b.hi.coords)
    )


@dataclass(frozen=True)
class SizedObject:
    """A shape together with its size metadata.

    width is the radius of the largest ball the shape encloses (ball:
    its radius; box: half the minimum side).  alpha records how fat the
    shape is: width divided by the radius of the smallest enclosing
    ball (1 for balls, min side / diameter for boxes).
    """

    shape: Shape
    width: float
    alpha: float

    def __post_init__(self) -> None:
        expected_w, expected_a = _size_metadata(self.shape)
        if not math.isclose(self.width, expected_w, rel_tol=1e-12, abs_tol=0.0):
            raise UsageError(
                f"width {self.width} inconsistent with shape (expected {expected_w})"
            )
        if not math.isclose(self.alpha, expected_a, rel_tol=1e-12, abs_tol=0.0):
            raise UsageError(
                f"alpha {self.alpha} inconsistent with shape (expected {expected_a})"
            )

    @classmethod
    def of(cls, shape: Shape) -> "SizedObject":
        width, alpha = _size_metadata(shape)
        return cls(shape=shape, width=width, alpha=alpha)

    @property
    def dim(self) -> int:
        return self.shape.dim


def _size_metadata(shape: Shape) -> tuple[float, float]:
    if isinstance(shape, Ball):
        return shape.radius, 1.0
    if isinstance(shape, HyperRectangle):
        sides = shape.sides
        diameter = math.hypot(*sides)
        return min(sides) / 2.0, min(sides) / diameter
    raise UsageError(f"unsupported shape type {type(shape).__name__}")


def objects_intersect(a: SizedObject, b: SizedObject) -> bool:
    """Intersection test for two sized objects of the same shape kind."""
    if isinstance(a.shape, Ball) and isinstance(b.shape, Ball):
        return balls_intersect(a.shape, b.shape)
    if isinstance(a.shape, HyperRectangle) and isinstance(b.shape, HyperRectangle):
        return rects_intersect(a.shape, b.shape)
    raise UsageError("mixed ball/box intersection is not supported")


def intersection_graph(objects: Sequence[SizedObject]) -> list[set[int]]:
    """Symmetric adjacency lists of the pairwise intersection graph.

    All objects must share one dimension and one shape kind.  Vertex i
    is objects[i]; an edge means the closed shapes meet.
    """
    n = len(objects)
    adjacency: list[set[int]] = [set() for _ in range(n)]
    if n == 0:
        return adjacency
    dim = objects[0].dim
    for i, obj in enumerate(objects):
        if obj.dim != dim:
            raise UsageError(f"object {i} has dim {obj.dim}, expected {dim}")
    for i in range(n):
        for j in range(i + 1, n):
            if objects_intersect(objects[i], objects[j]):
                adjacency[i].add(j)
                adjacency[j].add(i)
    return adjacency
