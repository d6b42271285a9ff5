"""Online arrival model and the greedy first-fit baseline.

Vertices arrive one at a time; each arrival reveals its edges to the
vertices already seen, and an algorithm must irrevocably accept or
reject it before the next arrival.  The accepted set must stay
independent in the revealed graph.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Protocol, Sequence

from .geometry import SizedObject, UsageError, intersection_graph


@dataclass(frozen=True)
class ArrivalEvent:
    """One arrival: its id, edges to earlier ids, optional geometry."""

    id: int
    neighbors: frozenset[int]
    payload: Optional[SizedObject] = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "neighbors", frozenset(self.neighbors))


@dataclass(frozen=True)
class ArrivalSequence:
    """A full arrival order with consistent ids and edges.

    Ids are 0..n-1 in arrival order, every edge points backwards, and
    payloads are all present (with one shared dimension) or all absent.
    """

    events: tuple[ArrivalEvent, ...]
    dim: Optional[int] = None

    def __post_init__(self) -> None:
        events = tuple(self.events)
        object.__setattr__(self, "events", events)
        payload_count = 0
        for i, ev in enumerate(events):
            if ev.id != i:
                raise UsageError(f"event {i} has id {ev.id}; ids must be 0..n-1 in order")
            for nb in ev.neighbors:
                if not 0 <= nb < i:
                    raise UsageError(
                        f"event {i} lists neighbor {nb}, which has not arrived yet"
                    )
            if ev.payload is not None:
                payload_count += 1
                if self.dim is not None and ev.payload.dim != self.dim:
                    raise UsageError(
                        f"event {i} payload dim {ev.payload.dim} != sequence dim {self.dim}"
                    )
        if payload_count not in (0, len(events)):
            raise UsageError("payloads must be present on every event or on none")
        if payload_count and self.dim is None:
            object.__setattr__(self, "dim", events[0].payload.dim)

    @classmethod
    def from_objects(cls, objects: Sequence[SizedObject]) -> "ArrivalSequence":
        """Arrival order = list order; edges derived from intersections."""
        adjacency = intersection_graph(objects)
        events = tuple(
            ArrivalEvent(
                id=i,
                neighbors=frozenset(j for j in adjacency[i] if j < i),
                payload=obj,
            )
            for i, obj in enumerate(objects)
        )
        dim = objects[0].dim if objects else None
        return cls(events=events, dim=dim)

    @classmethod
    def from_neighbor_lists(cls, neighbor_lists: Sequence[Iterable[int]]) -> "ArrivalSequence":
        """Abstract sequence from per-vertex lists of earlier neighbors."""
        events = tuple(
            ArrivalEvent(id=i, neighbors=frozenset(nbrs))
            for i, nbrs in enumerate(neighbor_lists)
        )
        return cls(events=events, dim=None)

    def adjacency(self) -> list[set[int]]:
        """Symmetric adjacency lists of the full revealed graph."""
        adj: list[set[int]] = [set() for _ in self.events]
        for ev in self.events:
            for nb in ev.neighbors:
                adj[ev.id].add(nb)
                adj[nb].add(ev.id)
        return adj

    def prefix(self, n: int) -> "ArrivalSequence":
        return ArrivalSequence(events=self.events[:n], dim=self.dim)

    def has_payloads(self) -> bool:
        return bool(self.events) and self.events[0].payload is not None

    def __len__(self) -> int:
        return len(self.events)


@dataclass(frozen=True)
class RunResult:
    """Outcome of one online run."""

    accepted: tuple[int, ...]
    decisions: tuple[bool, ...]
    valid_independent: bool
    valid_irrevocable: bool

    @property
    def size(self) -> int:
        return len(self.accepted)


class OnlineAlgorithm(Protocol):
    def decide(self, event: ArrivalEvent) -> bool: ...


class FirstFit:
    """Accept an arrival iff it conflicts with nothing accepted so far.

    The accepted set is maximal independent in the revealed graph and
    dominates it: every rejected vertex touched an accepted one.
    """

    def __init__(self) -> None:
        self.accepted: set[int] = set()

    def decide(self, event: ArrivalEvent) -> bool:
        if event.neighbors & self.accepted:
            return False
        self.accepted.add(event.id)
        return True


class AcceptAll:
    """Degenerate strategy used as a negative control in validity checks."""

    def decide(self, event: ArrivalEvent) -> bool:
        return True


class RejectAll:
    """Degenerate strategy that rejects every arrival."""

    def decide(self, event: ArrivalEvent) -> bool:
        return False


def finalize_run(
    events: Sequence[ArrivalEvent], decisions: Sequence[bool]
) -> RunResult:
    """Assemble a RunResult and audit it against the revealed edges."""
    if len(events) != len(decisions):
        raise UsageError("one decision per event is required")
    accepted: list[int] = []
    accepted_set: set[int] = set()
    independent = True
    for ev, dec in zip(events, decisions):
        if dec:
            if ev.neighbors & accepted_set:
                independent = False
            accepted.append(ev.id)
            accepted_set.add(ev.id)
    return RunResult(
        accepted=tuple(accepted),
        decisions=tuple(bool(d) for d in decisions),
        valid_independent=independent,
        valid_irrevocable=True,
    )


def run_online(algorithm: OnlineAlgorithm, stream: ArrivalSequence) -> RunResult:
    """Feed the stream to the algorithm once, in order, one decision each."""
    decisions = [bool(algorithm.decide(ev)) for ev in stream.events]
    return finalize_run(stream.events, decisions)


def first_fit(stream: ArrivalSequence) -> RunResult:
    return run_online(FirstFit(), stream)


def empirical_ratio(opt_size: int, result: RunResult) -> float:
    """opt/alg with the conventions: empty vs empty is 1, empty alg vs
    nonempty opt is +inf."""
    if opt_size < 0:
        raise UsageError(f"opt_size must be >= 0, got {opt_size}")
    if result.size == 0:
        return 1.0 if opt_size == 0 else float("inf")
    return opt_size / result.size
