"""Compiled inner loops shared by Population, mutation and the EA.

State layout (``cap`` rows, the first ``size`` of which are live members):

    perms     (cap, n)     vertex order of each member
    adj       (cap, n, 2)  the two tour neighbours of every vertex
    counts    (n, n)       symmetric edge-count table over live members
    overlaps  (cap, cap)   shared-edge counts, diagonal unused

Every function that changes ``counts`` returns the change of the sum of
squared edge counts, from which gtype follows in O(1).
"""
import numpy as np
from numba import njit

ED = 0
PD = 1

INVERSIONS = 0
RECONNECT = 1

REJECTED = 0
OFFSPRING_REMOVED = 1
OFFSPRING_KEPT = 2

# survival tie rules
TIE_LAST = 0
TIE_RANDOM = 1


@njit(cache=True)
def fill_adjacency(perm, adj_row):
    n = perm.shape[0]
    for t in range(n):
        v = perm[t]
        adj_row[v, 0] = perm[t - 1]
        adj_row[v, 1] = perm[(t + 1) % n]


@njit(cache=True)
def shared_edges(perm, adj_row):
    n = perm.shape[0]
    s = 0
    for t in range(n):
        u = perm[t]
        v = perm[(t + 1) % n]
        if adj_row[u, 0] == v or adj_row[u, 1] == v:
            s += 1
    return s


@njit(cache=True)
def add_edges(counts, perm, delta):
    """Add ``delta`` (+1/-1) to the count of each edge of ``perm``."""
    n = perm.shape[0]
    dsq = 0
    for t in range(n):
        u = perm[t]
        v = perm[(t + 1) % n]
        c = counts[u, v]
        dsq += (c + delta) * (c + delta) - c * c
        counts[u, v] = c + delta
        counts[v, u] = c + delta
    return dsq


@njit(cache=True)
def tour_cost(perm, dist):
    n = perm.shape[0]
    s = 0
    for t in range(n):
        s += dist[perm[t], perm[(t + 1) % n]]
    return s


# --------------------------------------------------------------------------
# mutation


@njit(cache=True)
def sample_inversion(n, rng):
    """Uniform unordered position pair (i, j) whose reversal changes the tour."""
    while True:
        i = rng.integers(0, n)
        j = rng.integers(0, n)
        if i == j:
            continue
        if i > j:
            i, j = j, i
        if j - i + 1 >= n - 1:
            continue
        return i, j


@njit(cache=True)
def reverse(perm, i, j):
    while i < j:
        perm[i], perm[j] = perm[j], perm[i]
        i += 1
        j -= 1


@njit(cache=True)
def reconnect(perm, k, rng):
    """Cut ``k`` tour edges and rejoin the pieces in a random order and orientation."""
    n = perm.shape[0]
    adj = np.empty((n, 2), dtype=np.int64)
    fill_adjacency(perm, adj)
    pos = np.arange(n)
    out = np.empty(n, dtype=np.int64)
    order = np.empty(k - 1, dtype=np.int64)
    flip = np.empty(k - 1, dtype=np.int64)
    while True:
        for a in range(k):
            b = a + rng.integers(0, n - a)
            pos[a], pos[b] = pos[b], pos[a]
        cuts = np.sort(pos[:k])
        start = cuts[k - 1] + 1
        ends = np.empty(k, dtype=np.int64)
        for t in range(k):
            ends[t] = (cuts[t] - start) % n
        rot = np.empty(n, dtype=np.int64)
        for p in range(n):
            rot[p] = perm[(start + p) % n]
        for t in range(k - 1):
            order[t] = t + 1
        for a in range(k - 2, 0, -1):
            b = rng.integers(0, a + 1)
            order[a], order[b] = order[b], order[a]
        for t in range(k - 1):
            flip[t] = rng.integers(0, 2)
        w = 0
        for p in range(ends[0] + 1):
            out[w] = rot[p]
            w += 1
        for t in range(k - 1):
            s = order[t]
            lo = ends[s - 1] + 1
            hi = ends[s]
            if flip[t] == 1:
                for p in range(hi, lo - 1, -1):
                    out[w] = rot[p]
                    w += 1
            else:
                for p in range(lo, hi + 1):
                    out[w] = rot[p]
                    w += 1
        if shared_edges(out, adj) < n:
            perm[:] = out
            return


@njit(cache=True)
def mutate(perm, k, style, rng):
    """In-place k-OPT: ``k-1`` random inversions, or one k-edge reconnection."""
    n = perm.shape[0]
    if n < 4:
        # every Hamiltonian cycle of K3 has the same edge set
        return
    if style == INVERSIONS:
        for _ in range(k - 1):
            i, j = sample_inversion(n, rng)
            reverse(perm, i, j)
    else:
        reconnect(perm, min(k, n), rng)


# --------------------------------------------------------------------------
# population bookkeeping


@njit(cache=True)
def fill_slot(perms, adj, overlaps, size, slot, perm):
    """Write ``perm`` into row ``slot`` and refresh its overlaps with the other live rows."""
    n = perm.shape[0]
    perms[slot, :] = perm
    fill_adjacency(perms[slot], adj[slot])
    for j in range(size):
        if j == slot:
            continue
        o = shared_edges(perms[slot], adj[j])
        overlaps[slot, j] = o
        overlaps[j, slot] = o
    overlaps[slot, slot] = n


@njit(cache=True)
def move_slot(perms, adj, overlaps, size, src, dst):
    """Copy member ``src`` into row ``dst``; overlaps are taken over from ``src``."""
    n = perms.shape[1]
    perms[dst, :] = perms[src, :]
    adj[dst, :, :] = adj[src, :, :]
    for j in range(size):
        if j == dst or j == src:
            continue
        overlaps[dst, j] = overlaps[src, j]
        overlaps[j, dst] = overlaps[src, j]
    overlaps[dst, dst] = n


@njit(cache=True)
def swap_member(perms, adj, counts, overlaps, size, i, perm):
    dsq = add_edges(counts, perms[i], -1)
    dsq += add_edges(counts, perm, 1)
    fill_slot(perms, adj, overlaps, size, i, perm)
    return dsq


# --------------------------------------------------------------------------
# survival selection


@njit(cache=True)
def lex_max_row(hist, ties, rng):
    """Row whose histogram encodes the lexicographically largest descending vector.

    Columns are value buckets; the largest value is the last column. With
    ``TIE_LAST`` ties go to the larger row index; with ``TIE_RANDOM`` a tied
    row is drawn uniformly (reservoir sampling, one draw per extra tie).
    """
    rows, cols = hist.shape
    best = 0
    tied = 1
    for r in range(1, rows):
        cmp = 0
        for c in range(cols - 1, -1, -1):
            if hist[r, c] != hist[best, c]:
                cmp = 1 if hist[r, c] > hist[best, c] else -1
                break
        if cmp > 0:
            best = r
            tied = 1
        elif cmp == 0:
            tied += 1
            if ties == TIE_LAST or rng.integers(0, tied) == 0:
                best = r
    return best


@njit(cache=True)
def select_ed(perms, counts, size, ties, rng):
    n = perms.shape[1]
    hist = np.zeros((size, size + 1), dtype=np.int64)
    for r in range(size):
        for t in range(n):
            hist[r, counts[perms[r, t], perms[r, (t + 1) % n]]] += 1
    return lex_max_row(hist, ties, rng)


@njit(cache=True)
def select_pd(overlaps, size, n, ties, rng):
    hist = np.zeros((size, n + 1), dtype=np.int64)
    for r in range(size):
        for j in range(size):
            if j != r:
                hist[r, overlaps[r, j]] += 1
    return lex_max_row(hist, ties, rng)


@njit(cache=True)
def select(perms, counts, overlaps, size, measure, ties, rng):
    if measure == ED:
        return select_ed(perms, counts, size, ties, rng)
    return select_pd(overlaps, size, perms.shape[1], ties, rng)


@njit(cache=True)
def overlap_spread(overlaps, size):
    lo = 1 << 62
    hi = -1
    for i in range(size):
        for j in range(i + 1, size):
            o = overlaps[i, j]
            if o < lo:
                lo = o
            if o > hi:
                hi = o
    return hi - lo


# --------------------------------------------------------------------------
# (mu+1)-EA


@njit(cache=True)
def step(perms, adj, counts, overlaps, mu, dist, threshold, k, style, measure, ties, rng):
    """One offspring attempt on a population of ``mu`` stored in rows ``0..mu-1``.

    Row ``mu`` is scratch space for the offspring. Returns ``(status, dsq)``.
    """
    parent = rng.integers(0, mu)
    child = perms[mu]
    child[:] = perms[parent]
    mutate(child, k, style, rng)
    if tour_cost(child, dist) > threshold:
        return REJECTED, 0
    dsq = add_edges(counts, child, 1)
    fill_slot(perms, adj, overlaps, mu + 1, mu, child)
    r = select(perms, counts, overlaps, mu + 1, measure, ties, rng)
    dsq += add_edges(counts, perms[r], -1)
    if r == mu:
        return OFFSPRING_REMOVED, dsq
    move_slot(perms, adj, overlaps, mu + 1, mu, r)
    return OFFSPRING_KEPT, dsq


@njit(cache=True)
def evolve(perms, adj, counts, overlaps, mu, dist, threshold, k, style, measure, ties,
           rng, sumsq, max_iters, target_sumsq, need_spread):
    """Iterate :func:`step` until the optimum test passes or the budget is spent.

    Returns ``(iterations, reached_optimum, sumsq)``.
    """
    it = 0
    while True:
        if sumsq == target_sumsq:
            if not need_spread or overlap_spread(overlaps, mu) <= 1:
                return it, True, sumsq
        if it >= max_iters:
            return it, False, sumsq
        _, dsq = step(perms, adj, counts, overlaps, mu, dist, threshold,
                      k, style, measure, ties, rng)
        sumsq += dsq
        it += 1
