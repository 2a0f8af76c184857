"""Edge-diversity (ED) and pairwise-distance (PD) measures over tour populations.

Both measures are descending-sorted integer vectors minimised in lexicographic
order:

* ED looks at the edge counts ``n(e, P)``: how many tours use each edge.
* PD looks at the pairwise overlaps ``o_XY = |E(X) & E(Y)|``.

Survival selection removes the member whose own fitness vector (its edge
counts, resp. its overlaps with the others) is lexicographically largest;
that member is also a leave-one-out argmin of the population vector.
"""
from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

from . import _kernels as K
from .instance import Tour, edge_id_matrix, n_edges

ED = "ED"
PD = "PD"
MEASURES = (ED, PD)
_MEASURE_CODE = {ED: K.ED, PD: K.PD}

# how survival selection picks among equally bad members
TIE_LAST = "last"
TIE_RANDOM = "random"
TIE_RULES = {TIE_LAST: K.TIE_LAST, TIE_RANDOM: K.TIE_RANDOM}


def measure_code(measure: str) -> int:
    try:
        return _MEASURE_CODE[measure.upper()]
    except (KeyError, AttributeError):
        raise ValueError(f"measure must be one of {MEASURES}, got {measure!r}") from None


class DiversityVector(tuple):
    """Non-negative integers held in descending order, compared lexicographically.

    Ordering comparisons are only defined between vectors of equal length.
    """

    def __new__(cls, values: Iterable[int] = ()):
        return super().__new__(cls, sorted((int(v) for v in values), reverse=True))

    def _check(self, other):
        if not isinstance(other, tuple):
            return NotImplemented
        if len(other) != len(self):
            raise ValueError(
                f"cannot order diversity vectors of lengths {len(self)} and {len(other)}"
            )
        return None

    def __lt__(self, other):
        return self._check(other) or tuple.__lt__(self, other)

    def __le__(self, other):
        return self._check(other) or tuple.__le__(self, other)

    def __gt__(self, other):
        return self._check(other) or tuple.__gt__(self, other)

    def __ge__(self, other):
        return self._check(other) or tuple.__ge__(self, other)

    def __repr__(self):
        return f"DiversityVector({tuple(self)})"


def _as_perm(tour, n: int) -> np.ndarray:
    perm = np.asarray(tour.perm if isinstance(tour, Tour) else tour, dtype=np.int64)
    if perm.shape != (n,) or not np.array_equal(np.sort(perm), np.arange(n)):
        raise ValueError(f"not a tour on {n} vertices: {perm.tolist()}")
    return perm


class Population:
    """Tours plus incrementally maintained edge counts and pairwise overlaps.

    Duplicates are allowed. Storage keeps one spare row so an offspring can be
    staged next to the members without reallocating.
    """

    def __init__(self, tours: Sequence[Tour | Sequence[int]], n: int | None = None):
        tours = list(tours)
        if n is None:
            if not tours:
                raise ValueError("n is required for an empty population")
            n = len(tours[0])
        if n < 3:
            raise ValueError(f"n must be >= 3, got {n}")
        self.n = n
        self.size = 0
        self._alloc(len(tours) + 1)
        self.counts = np.zeros((n, n), dtype=np.int64)
        self.sumsq = 0
        for t in tours:
            self.add(t)

    def _alloc(self, cap: int):
        n = self.n
        perms = np.zeros((cap, n), dtype=np.int64)
        adj = np.zeros((cap, n, 2), dtype=np.int64)
        overlaps = np.zeros((cap, cap), dtype=np.int64)
        if self.size:
            s = self.size
            perms[:s] = self.perms[:s]
            adj[:s] = self.adj[:s]
            overlaps[:s, :s] = self.overlaps[:s, :s]
        self.perms, self.adj, self.overlaps = perms, adj, overlaps

    @property
    def mu(self) -> int:
        return self.size

    def __len__(self):
        return self.size

    def __getitem__(self, i: int) -> Tour:
        return Tour(tuple(self.perms[self._index(i)].tolist()))

    def __iter__(self):
        return (self[i] for i in range(self.size))

    @property
    def tours(self) -> list[Tour]:
        return list(self)

    def _index(self, i: int) -> int:
        if not -self.size <= i < self.size:
            raise IndexError(f"member {i} out of range for population of {self.size}")
        return i % self.size

    def copy(self) -> "Population":
        other = Population.__new__(Population)
        other.n, other.size, other.sumsq = self.n, self.size, self.sumsq
        other.perms = self.perms.copy()
        other.adj = self.adj.copy()
        other.overlaps = self.overlaps.copy()
        other.counts = self.counts.copy()
        return other

    # mutation of membership

    def add(self, tour) -> "Population":
        perm = _as_perm(tour, self.n)
        if self.size + 1 > self.perms.shape[0] - 1:
            self._alloc(2 * self.perms.shape[0])
        i = self.size
        self.size += 1
        self.sumsq += K.add_edges(self.counts, perm, 1)
        K.fill_slot(self.perms, self.adj, self.overlaps, self.size, i, perm)
        return self

    def remove(self, i: int) -> Tour:
        """Delete member ``i``, keeping the order of the others."""
        i = self._index(i)
        gone = self[i]
        self.sumsq += K.add_edges(self.counts, self.perms[i], -1)
        keep = np.r_[0:i, i + 1:self.size]
        s = self.size - 1
        self.perms[:s] = self.perms[keep]
        self.adj[:s] = self.adj[keep]
        self.overlaps[:s, :s] = self.overlaps[np.ix_(keep, keep)]
        self.size = s
        return gone

    def apply_swap(self, i: int, tour) -> "Population":
        """Replace member ``i`` in place, updating both caches incrementally."""
        i = self._index(i)
        perm = _as_perm(tour, self.n)
        self.sumsq += K.swap_member(
            self.perms, self.adj, self.counts, self.overlaps, self.size, i, perm
        )
        return self

    # views

    def edge_counts(self) -> np.ndarray:
        """Edge counts indexed by edge id."""
        iu, ju = np.triu_indices(self.n, k=1)
        return self.counts[iu, ju].copy()

    def overlap_matrix(self) -> np.ndarray:
        """``(mu, mu)`` overlaps; the diagonal is filled with ``n``."""
        o = self.overlaps[: self.size, : self.size].copy()
        np.fill_diagonal(o, self.n)
        return o

    def pair_overlaps(self) -> np.ndarray:
        iu, ju = np.triu_indices(self.size, k=1)
        return self.overlaps[iu, ju]

    def check_caches(self) -> bool:
        """True when the incremental caches equal a from-scratch recount."""
        tours = self.tours
        counts = edge_counts(tours, self.n)
        sets = _edge_sets(tours)
        overlaps = np.array([[len(a & b) for b in sets] for a in sets], dtype=np.int64)
        return (
            np.array_equal(counts, self.edge_counts())
            and np.array_equal(self.counts, self.counts.T)
            and not self.counts.diagonal().any()
            and np.array_equal(overlaps.reshape(self.size, self.size), self.overlap_matrix())
            and int((counts ** 2).sum()) == self.sumsq
        )


# --------------------------------------------------------------------------
# measures


def _edge_sets(tours) -> list[frozenset]:
    return [(t if isinstance(t, Tour) else Tour(tuple(t))).edges for t in tours]


def edge_counts(tours: Sequence[Tour], n: int) -> np.ndarray:
    """``n(e, P)`` for every edge id, counted directly from the edge sets."""
    ids = edge_id_matrix(n)
    counts = np.zeros(n_edges(n), dtype=np.int64)
    for edges in _edge_sets(tours):
        for u, v in edges:
            counts[ids[u, v]] += 1
    return counts


def gtype_pairwise(tours: Sequence[Tour]) -> int:
    """gtype as the double sum of edge-set differences over ordered pairs."""
    sets = _edge_sets(tours)
    return sum(len(a - b) for a in sets for b in sets)


def gtype_from_counts(counts, mu: int, n: int) -> int:
    counts = np.asarray(counts, dtype=np.int64)
    return int(mu * (mu - 1) * n + counts.sum() - (counts ** 2).sum())


def gtype(pop: Population) -> int:
    mu, n = pop.size, pop.n
    # counts.sum() == mu * n
    return mu * (mu - 1) * n + mu * n - pop.sumsq


def optimal_gtype(n: int, mu: int) -> int:
    """Largest gtype of any ``mu`` tours on ``K_n``: edge counts as level as possible."""
    if n < 3:
        raise ValueError(f"n must be >= 3, got {n}")
    if mu < 1:
        raise ValueError(f"mu must be >= 1, got {mu}")
    return mu * (mu - 1) * n + mu * n - min_sum_squares(n, mu)


def min_sum_squares(n: int, mu: int) -> int:
    m = n_edges(n)
    q, r = divmod(mu * n, m)
    return (m - r) * q * q + r * (q + 1) * (q + 1)


def percent_of_optimal(value: int, n: int, mu: int) -> float:
    """``100 * value / optimal_gtype``; a zero optimum (mu = 1 or n = 3) counts as 100%."""
    best = optimal_gtype(n, mu)
    return 100.0 * value / best if best else 100.0


def gtype_percent(pop: Population) -> float:
    return percent_of_optimal(gtype(pop), pop.n, pop.size)


def nd_vector(pop: Population) -> DiversityVector:
    return DiversityVector(pop.edge_counts())


def overlap_vector(pop: Population) -> DiversityVector:
    if pop.size < 2:
        raise ValueError("overlap vector needs at least two tours")
    return DiversityVector(pop.pair_overlaps())


def fitness_ed(pop: Population, i: int) -> DiversityVector:
    """Counts of member ``i``'s own edges, descending."""
    perm = pop.perms[pop._index(i)]
    return DiversityVector(pop.counts[perm, np.roll(perm, -1)])


def fitness_pd(pop: Population, i: int) -> DiversityVector:
    """Overlaps of member ``i`` with every other member, descending."""
    if pop.size < 2:
        raise ValueError("pairwise fitness needs at least two tours")
    i = pop._index(i)
    row = pop.overlaps[i, : pop.size]
    return DiversityVector(np.delete(row, i))


def tie_code(ties: str) -> int:
    try:
        return TIE_RULES[ties]
    except KeyError:
        raise ValueError(f"tie rule must be one of {sorted(TIE_RULES)}, got {ties!r}") from None


def select_removal(pop: Population, measure: str = ED, ties: str = TIE_LAST, rng=None) -> int:
    """Index of the member to drop.

    Ties go to the largest index, or to a uniformly drawn tied member when
    ``ties="random"`` (``rng`` is a seed or ``numpy.random.Generator``).
    """
    if pop.size < 2:
        raise ValueError("selection needs at least two tours")
    code = tie_code(ties)
    if not isinstance(rng, np.random.Generator):
        rng = np.random.default_rng(rng)
    return int(K.select(pop.perms, pop.counts, pop.overlaps, pop.size, measure_code(measure),
                        code, rng))


def div_score(pop: Population) -> float:
    """Mean over tours of the edge distance to the nearest other tour, over ``n``."""
    if pop.size < 2:
        raise ValueError("div needs at least two tours")
    o = pop.overlap_matrix()
    np.fill_diagonal(o, -1)
    nearest = pop.n - o.max(axis=1)
    return float(nearest.sum() / (pop.size * pop.n))


def sigma_score(pop: Population) -> float:
    """Range of pairwise overlaps divided by ``n``."""
    if pop.size < 2:
        raise ValueError("sigma needs at least two tours")
    o = pop.pair_overlaps()
    return float((o.max() - o.min()) / pop.n)


def overlap_spread(pop: Population) -> int:
    o = pop.pair_overlaps()
    return int(o.max() - o.min()) if len(o) else 0
