"""Instance sources: worst-case adversaries and seeded random generators.

The star adversary adaptively punishes any deterministic online
algorithm down to the kissing-number ratio; the level-graph family does
the same in expectation against randomized algorithms.  The random
generators produce seeded geometric instances whose predicates stay a
safe margin away from exact tangency.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import NamedTuple, Optional

from .geometry import Ball, HyperRectangle, Point, SizedObject, UsageError
from .online import (
    ArrivalEvent,
    ArrivalSequence,
    OnlineAlgorithm,
    RunResult,
    finalize_run,
)

# Generated instances keep every intersection predicate at least this
# far from flipping, so closed-contact ties never occur.
DEGENERACY_MARGIN = 1e-6

_REDRAW_LIMIT = 1000


class StarOutcome(NamedTuple):
    stream: ArrivalSequence
    result: RunResult
    opt_size: int


def star_adversary(zeta: int, algorithm: OnlineAlgorithm) -> StarOutcome:
    """Adaptive lowest-common-denominator attack with parameter zeta.

    Reveals one isolated vertex.  If the algorithm rejects it, the game
    ends with offline optimum 1 and nothing accepted.  If it accepts,
    zeta pairwise-independent neighbors of that vertex arrive, all
    unacceptable to any algorithm that must stay independent, so the
    optimum is zeta against one acceptance.  The revealed graph always
    has independent kissing number at most zeta.
    """
    if zeta < 1:
        raise UsageError(f"zeta must be >= 1, got {zeta}")
    events = [ArrivalEvent(id=0, neighbors=frozenset())]
    decisions = [bool(algorithm.decide(events[0]))]
    if decisions[0]:
        for i in range(1, zeta + 1):
            ev = ArrivalEvent(id=i, neighbors=frozenset({0}))
            events.append(ev)
            decisions.append(bool(algorithm.decide(ev)))
        opt = zeta
    else:
        opt = 1
    stream = ArrivalSequence(events=tuple(events))
    return StarOutcome(stream=stream, result=finalize_run(events, decisions), opt_size=opt)


def level_graph_gen(zeta: int, seed: Optional[int] = None) -> ArrivalSequence:
    """Randomized hard family with 2*zeta vertices in zeta levels.

    Each level holds a left and a right vertex, revealed in that order.
    Level 1 is edgeless.  For each later level a fair coin picks one
    parent among the previous level's pair; both new vertices connect
    to that parent and to everything the parent already connects to.
    The maximum independent set has at least zeta + 1 vertices, the
    independent kissing number is at most zeta, and greedy first-fit
    accepts exactly the two level-1 vertices.
    """
    if zeta < 1:
        raise UsageError(f"zeta must be >= 1, got {zeta}")
    rng = random.Random(seed)
    events: list[ArrivalEvent] = [
        ArrivalEvent(id=0, neighbors=frozenset()),
        ArrivalEvent(id=1, neighbors=frozenset()),
    ]
    reach: dict[int, frozenset[int]] = {0: frozenset(), 1: frozenset()}
    for level in range(2, zeta + 1):
        left = 2 * (level - 1)
        parent = 2 * (level - 2) + rng.randrange(2)
        ancestors = frozenset({parent}) | reach[parent]
        for vid in (left, left + 1):
            events.append(ArrivalEvent(id=vid, neighbors=ancestors))
            reach[vid] = ancestors
    return ArrivalSequence(events=tuple(events))


def _margin_ok(obj: SizedObject, others: list[SizedObject]) -> bool:
    for other in others:
        a, b = obj.shape, other.shape
        if isinstance(a, Ball) and isinstance(b, Ball):
            gap = abs(
                math.dist(a.center.coords, b.center.coords) - (a.radius + b.radius)
            )
            if gap < DEGENERACY_MARGIN:
                return False
        else:
            for al, au, bl, bu in zip(
                a.lo.coords, a.hi.coords, b.lo.coords, b.hi.coords
            ):
                if abs(al - bu) < DEGENERACY_MARGIN or abs(bl - au) < DEGENERACY_MARGIN:
                    return False
    return True


def _draw_until_clear(draw, accepted: list[SizedObject]) -> SizedObject:
    for _ in range(_REDRAW_LIMIT):
        obj = draw()
        if _margin_ok(obj, accepted):
            return obj
    raise UsageError(
        "could not place an object clear of tangency; the box is too crowded"
    )


def random_balls_gen(
    n: int,
    dim: int,
    box_side: float,
    seed: Optional[int] = None,
    radius_range: tuple[float, float] = (1.0, 1.0),
) -> ArrivalSequence:
    """n balls with centers uniform in [0, box_side]^dim.

    Radii are uniform in radius_range (the default keeps them unit).
    Every pair is kept at least DEGENERACY_MARGIN away from tangency.
    """
    if n < 0:
        raise UsageError(f"n must be >= 0, got {n}")
    if dim < 1:
        raise UsageError(f"dim must be >= 1, got {dim}")
    if box_side <= 0:
        raise UsageError(f"box_side must be positive, got {box_side}")
    lo, hi = float(radius_range[0]), float(radius_range[1])
    if not 0 < lo <= hi:
        raise UsageError(f"bad radius range {radius_range}")
    rng = random.Random(seed)

    def draw() -> SizedObject:
        center = Point(tuple(rng.uniform(0.0, box_side) for _ in range(dim)))
        radius = lo if lo == hi else rng.uniform(lo, hi)
        return SizedObject.of(Ball(center=center, radius=radius))

    objects: list[SizedObject] = []
    for _ in range(n):
        objects.append(_draw_until_clear(draw, objects))
    return ArrivalSequence.from_objects(objects)


def random_rects_gen(
    n: int,
    dim: int,
    m: float,
    box_side: float,
    seed: Optional[int] = None,
) -> ArrivalSequence:
    """n axis-aligned boxes with lower corners uniform in [0, box_side]^dim
    and side lengths uniform in [1, M]."""
    if n < 0:
        raise UsageError(f"n must be >= 0, got {n}")
    if dim < 1:
        raise UsageError(f"dim must be >= 1, got {dim}")
    if box_side <= 0:
        raise UsageError(f"box_side must be positive, got {box_side}")
    if m < 1:
        raise UsageError(f"M must be >= 1, got {m}")
    rng = random.Random(seed)

    def draw() -> SizedObject:
        lo = tuple(rng.uniform(0.0, box_side) for _ in range(dim))
        sides = tuple(rng.uniform(1.0, m) for _ in range(dim))
        hi = tuple(l + s for l, s in zip(lo, sides))
        return SizedObject.of(HyperRectangle(lo=Point(lo), hi=Point(hi)))

    objects: list[SizedObject] = []
    for _ in range(n):
        objects.append(_draw_until_clear(draw, objects))
    return ArrivalSequence.from_objects(objects)


@dataclass(frozen=True)
class AdversaryConfig:
    """Declarative instance source, usable from config files.

    kind is one of "star", "levels", "random_balls", "random_rects".
    Unused fields may stay at their defaults.
    """

    kind: str
    zeta: int = 0
    n: int = 0
    dim: int = 0
    m: float = 0.0
    box_side: float = 0.0
    seed: int = 0
    radius_range: tuple[float, float] = (1.0, 1.0)

    def __post_init__(self) -> None:
        if self.kind not in ("star", "levels", "random_balls", "random_rects"):
            raise UsageError(f"unknown adversary kind {self.kind!r}")
        object.__setattr__(self, "radius_range", tuple(self.radius_range))


def generate_instance(config: AdversaryConfig) -> ArrivalSequence:
    """Build the (non-adaptive) instance a config describes.

    The star adversary is adaptive and cannot be materialized up front;
    ask for it through star_adversary with a live algorithm instead.
    """
    if config.kind == "levels":
        return level_graph_gen(config.zeta, seed=config.seed)
    if config.kind == "random_balls":
        return random_balls_gen(
            config.n,
            config.dim,
            config.box_side,
            seed=config.seed,
            radius_range=config.radius_range,
        )
    if config.kind == "random_rects":
        return random_rects_gen(
            config.n, config.dim, config.m, config.box_side, seed=config.seed
        )
    raise UsageError("the star adversary is adaptive; use star_adversary directly")
