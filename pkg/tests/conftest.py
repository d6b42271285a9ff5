"""Shared test helpers: independent reference implementations.

Everything here is written from first principles, separate from the
package internals, so library bugs cannot hide behind shared code.
"""

from __future__ import annotations

import itertools
import math
import random

import numpy as np
import pytest

from geomis import ArrivalSequence

SQRT3 = math.sqrt(3.0)

_criterion_lines: list[str] = []


def record_criterion(line: str) -> None:
    """Queue an acceptance-criterion verdict for the end-of-run summary."""
    _criterion_lines.append(line)


def pytest_terminal_summary(terminalreporter):
    if _criterion_lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(set(_criterion_lines)):
            terminalreporter.write_line(line)


def gnp_stream(n: int, p: float, rng: random.Random) -> ArrivalSequence:
    """Erdos-Renyi arrival sequence: each backward edge tossed independently."""
    lists = []
    for i in range(n):
        lists.append([j for j in range(i) if rng.random() < p])
    return ArrivalSequence.from_neighbor_lists(lists)


def brute_mis(adjacency: list[set[int]]) -> tuple[int, tuple[int, ...]]:
    """Exhaustive maximum independent set; lexicographically smallest witness.

    Subsets enumerated as bitmasks; only usable for small n.
    """
    n = len(adjacency)
    masks = [0] * n
    for v, nbrs in enumerate(adjacency):
        for u in nbrs:
            masks[v] |= 1 << u
    return _brute_scan(n, masks)


def _brute_scan(n: int, masks: list[int]) -> tuple[int, tuple[int, ...]]:
    best_size = 0
    best_witness: tuple[int, ...] = ()
    for subset in range(1 << n):
        ok = True
        m = subset
        while m:
            v = (m & -m).bit_length() - 1
            m &= m - 1
            if masks[v] & subset:
                ok = False
                break
        if not ok:
            continue
        size = subset.bit_count()
        witness = tuple(i for i in range(n) if (subset >> i) & 1)
        if size > best_size or (size == best_size and witness < best_witness):
            best_size = size
            best_witness = witness
    return best_size, best_witness


def reference_basis(dim: int, delta: float) -> np.ndarray:
    """Row-vector basis built straight from the definition."""
    basis = np.zeros((dim, dim))
    basis[0, 0] = 4.0 + delta
    for i in range(1, dim):
        basis[i, 0] = -(2.0 + delta / 2.0)
        basis[i, i] = 2.0 * SQRT3
    return basis


def window_lattice_points(dim: int, delta: float, window: int) -> np.ndarray:
    """All lattice points with coefficients in [-window, window]^dim."""
    basis = reference_basis(dim, delta)
    span = range(-window, window + 1)
    coeffs = np.array(list(itertools.product(span, repeat=dim)), dtype=np.float64)
    return coeffs @ basis


def brute_min_distances(
    points: np.ndarray, queries: np.ndarray, chunk: int = 400, margin: float = 12.0
) -> np.ndarray:
    """Nearest distance from each query to the given point set.

    Points farther than `margin` from the query bounding box on any axis
    are dropped first; the lattice covering radius is far below 12, so a
    nearest member can never be pruned.
    """
    lo = queries.min(axis=0) - margin
    hi = queries.max(axis=0) + margin
    keep = ((points >= lo) & (points <= hi)).all(axis=1)
    pts = points[keep]
    out = np.empty(len(queries))
    for start in range(0, len(queries), chunk):
        q = queries[start : start + chunk]
        d2 = ((q[:, None, :] - pts[None, :, :]) ** 2).sum(axis=2)
        out[start : start + chunk] = np.sqrt(d2.min(axis=1))
    return out


@pytest.fixture
def k3_stream() -> ArrivalSequence:
    return ArrivalSequence.from_neighbor_lists([[], [0], [0, 1]])
