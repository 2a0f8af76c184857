"""Walecki decompositions of complete graphs and edge-balanced tour populations.

For odd ``n = 2k + 1`` the vertices ``0..2k-1`` sit on a circle with an apex
``2k``. The zig-zag path ``i, i+1, i-1, i+2, i-2, ..., i+k`` (mod 2k), rotated
for ``i = 0..k-1`` and closed through the apex, gives ``k`` edge-disjoint
Hamiltonian cycles that use every edge.

For even ``n = 2k + 2`` there are two apexes ``a = 2k`` and ``b = 2k + 1``.
Each zig-zag path is split at its middle edge; the front half runs from ``a``
to ``b`` and the back half from ``b`` back to ``a``. The dropped middle edges
plus ``{a, b}`` form the leftover perfect matching.
"""
from __future__ import annotations

from dataclasses import dataclass

from .instance import Tour

Edge = tuple[int, int]


def _edge(u: int, v: int) -> Edge:
    return (u, v) if u < v else (v, u)


def zigzag(i: int, k: int) -> list[int]:
    """Walecki zig-zag path on ``Z_{2k}`` starting at ``i``; it ends at ``i + k``."""
    path = [i % (2 * k)]
    for x in range(1, k + 1):
        path.append((i + x) % (2 * k))
        if x < k:
            path.append((i - x) % (2 * k))
    return path


@dataclass(frozen=True)
class HamiltonianDecomposition:
    n: int
    cycles: tuple[Tour, ...]
    leftover_matching: frozenset[Edge] | None = None


def decompose(n: int) -> HamiltonianDecomposition:
    """``floor((n-1)/2)`` edge-disjoint Hamiltonian cycles of ``K_n``.

    Odd ``n``: the cycles cover every edge. Even ``n``: the remaining edges
    form a perfect matching.
    """
    if n < 3:
        raise ValueError(f"n must be >= 3, got {n}")
    if n % 2:
        k = (n - 1) // 2
        apex = 2 * k
        cycles = tuple(Tour(tuple([apex] + zigzag(i, k))) for i in range(k))
        return HamiltonianDecomposition(n, cycles)

    k = (n - 2) // 2
    a, b = 2 * k, 2 * k + 1
    cycles = []
    matching = {_edge(a, b)}
    for i in range(k):
        p = zigzag(i, k)
        cycles.append(Tour(tuple([a] + p[:k] + [b] + p[k:])))
        matching.add(_edge(p[k - 1], p[k]))
    return HamiltonianDecomposition(n, tuple(cycles), frozenset(matching))


@dataclass(frozen=True)
class EvenAuxiliaries:
    """Objects needed to balance edge counts when ``n`` is even.

    ``bridge`` is a tour through every edge of ``matching`` whose other edges
    form ``second_matching``; ``shifted`` decomposes ``K_n`` minus
    ``second_matching``.
    """

    matching: frozenset[Edge]
    second_matching: frozenset[Edge]
    bridge: Tour
    shifted: tuple[Tour, ...]


def even_auxiliaries(n: int) -> EvenAuxiliaries:
    if n < 4 or n % 2:
        raise ValueError(f"auxiliaries exist for even n >= 4, got {n}")
    dec = decompose(n)
    # oriented matching edges in construction order; the order is arbitrary
    k = (n - 2) // 2
    pairs = [(zigzag(i, k)[k - 1], zigzag(i, k)[k]) for i in range(k)]
    pairs.append((2 * k, 2 * k + 1))
    walk = [v for pair in pairs for v in pair]
    bridge = Tour(tuple(walk))
    second = frozenset(bridge.edges - dec.leftover_matching)
    # rotating along the bridge maps matching onto second_matching
    shift = {walk[t]: walk[(t + 1) % n] for t in range(n)}
    shifted = tuple(Tour(tuple(shift[v] for v in c.perm)) for c in dec.cycles)
    return EvenAuxiliaries(dec.leftover_matching, second, bridge, shifted)


def balanced_sequence(n: int) -> list[Tour]:
    """One period of tours after which every edge has been used equally often.

    Odd ``n``: the decomposition itself (each edge once). Even ``n``: the
    decomposition, the bridge tour, then the shifted decomposition (each edge
    twice). Every prefix of the repeated period keeps edge counts within one
    of each other.
    """
    dec = decompose(n)
    if n % 2:
        return list(dec.cycles)
    aux = even_auxiliaries(n)
    return list(dec.cycles) + [aux.bridge] + list(aux.shifted)


def optimal_population(n: int, mu: int) -> list[Tour]:
    """``mu`` tours whose edge counts differ by at most one, hence of maximum gtype."""
    if n < 3:
        raise ValueError(f"n must be >= 3, got {n}")
    if mu < 1:
        raise ValueError(f"mu must be >= 1, got {mu}")
    period = balanced_sequence(n)
    return [period[i % len(period)] for i in range(mu)]


def verify_theorem1(n: int, mu: int) -> tuple[bool, tuple[int, int]]:
    """Check the constructed population's edge-count spread; returns ``(ok, (min, max))``."""
    from .diversity import edge_counts

    counts = edge_counts(optimal_population(n, mu), n)
    lo, hi = int(counts.min()), int(counts.max())
    return hi - lo <= 1, (lo, hi)
