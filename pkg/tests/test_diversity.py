import itertools
import math

import numpy as np
import pytest
from conftest import T1, T2, T3, T4, edge, one_based
from hypothesis import given, settings
from hypothesis import strategies as st

from diversetours.decomposition import optimal_population
from diversetours.diversity import (
    ED,
    PD,
    DiversityVector,
    Population,
    div_score,
    edge_counts,
    fitness_ed,
    fitness_pd,
    gtype,
    gtype_from_counts,
    gtype_pairwise,
    gtype_percent,
    min_sum_squares,
    nd_vector,
    optimal_gtype,
    overlap_spread,
    overlap_vector,
    select_removal,
    sigma_score,
)
from diversetours.instance import Tour, edge_id

# --------------------------------------------------------------------------
# from-scratch oracles over plain edge sets


def counts_by_edge(tours, n):
    c = {}
    for t in tours:
        for e in t.edges:
            c[e] = c.get(e, 0) + 1
    return [c.get(e, 0) for e in itertools.combinations(range(n), 2)]


def brute_nd(tours, n):
    return tuple(sorted(counts_by_edge(tours, n), reverse=True))


def brute_dd(tours):
    return tuple(sorted((len(a.edges & b.edges) for a, b in itertools.combinations(tours, 2)),
                        reverse=True))


def leave_one_out_argmin(tours, n, measure):
    key = (lambda ts: brute_nd(ts, n)) if measure == ED else brute_dd
    vals = [key(tours[:j] + tours[j + 1:]) for j in range(len(tours))]
    best = min(vals)
    return {j for j, v in enumerate(vals) if v == best}


def fitness_argmax(pop, measure):
    fit = fitness_ed if measure == ED else fitness_pd
    vals = [tuple(fit(pop, i)) for i in range(pop.size)]
    best = max(vals)
    return {i for i, v in enumerate(vals) if v == best}


def tours_from_pool(rng, n, mu, pool_size):
    pool = [Tour(tuple(rng.permutation(n).tolist())) for _ in range(pool_size)]
    return [pool[i] for i in rng.integers(0, pool_size, mu)]


# --------------------------------------------------------------------------
# worked example


def test_edge_counts_example():
    counts = edge_counts([T1, T2, T3], 5)
    assert counts[edge_id(5, *edge(1, 2))] == 3
    assert counts[edge_id(5, *edge(4, 5))] == 2
    assert counts[edge_id(5, *edge(1, 3))] == 1
    assert counts.sum() == 15


def test_edge_counts_trivial():
    assert edge_counts([], 6).tolist() == [0] * 15
    counts = edge_counts([T1] * 4, 5)
    assert sorted(counts.tolist()) == [0] * 5 + [4] * 5


def test_gtype_example(p1, p2):
    assert gtype(p1) == 18
    assert gtype(p2) == 20
    assert gtype_pairwise([T1, T2, T3]) == 18
    assert gtype_pairwise([T1, T2, T4]) == 20
    assert gtype(Population([T3] * 4)) == 0


def test_optimal_gtype_examples():
    assert optimal_gtype(5, 2) == 10
    assert optimal_gtype(5, 3) == 20
    assert optimal_gtype(7, 4) == gtype(Population(optimal_population(7, 4)))
    # 28 tour edges on 21 slots: 7 edges are used twice
    assert optimal_gtype(7, 4) == 4 * 3 * 7 + 28 - (14 + 7 * 4)


def test_nd_vector_examples(p1):
    assert nd_vector(p1) == (3, 2, 2, 2, 1, 1, 1, 1, 1, 1)
    assert nd_vector(Population([T2] * 4)) == (4,) * 5 + (0,) * 5
    for n, mu in [(7, 5), (8, 3), (9, 11)]:
        v = nd_vector(Population(optimal_population(n, mu)))
        assert v[0] - v[-1] <= 1


def test_overlap_vector_examples(p1, p2):
    assert overlap_vector(p1) == (2, 2, 2)
    assert overlap_vector(p2) == (3, 2, 0)
    assert overlap_vector(Population([T1, T1])) == (5,)


def test_fitness_examples(p1, p2):
    assert fitness_ed(p1, 0) == (3, 2, 2, 1, 1)
    assert fitness_ed(Population([T3]), 0) == (1,) * 5
    assert fitness_ed(Population([T3] * 3), 1) == (3,) * 5
    assert fitness_pd(p2, 0) == (2, 0)
    assert fitness_pd(p2, 2) == (3, 0)
    assert fitness_pd(Population([T4] * 4), 3) == (5, 5, 5)


def test_select_duplicate_pd():
    pop = Population([T1, T2, T4, T2])
    assert select_removal(pop, PD) in (1, 3)
    # ties go to the largest index
    assert select_removal(pop, PD) == 3


def test_random_ties_are_uniform():
    pop = Population([T1, T2, T4, T2, T2])
    rng = np.random.default_rng(0)
    picks = [select_removal(pop, PD, "random", rng) for _ in range(3000)]
    freq = np.bincount(picks, minlength=5) / len(picks)
    assert freq[[0, 2]].sum() == 0
    assert np.allclose(freq[[1, 3, 4]], 1 / 3, atol=0.04)
    with pytest.raises(ValueError):
        select_removal(pop, PD, "first")


def test_select_example_ed():
    tours = [T1, T2, T3, T4]
    pop = Population(tours)
    chosen = select_removal(pop, ED)
    assert chosen in leave_one_out_argmin(tours, 5, ED)
    rest = brute_nd(tours[:chosen] + tours[chosen + 1:], 5)
    for j in range(4):
        assert rest <= brute_nd(tours[:j] + tours[j + 1:], 5)


def test_div_and_sigma_examples(p1, p2):
    assert div_score(p1) == pytest.approx(0.6)
    assert sigma_score(p2) == pytest.approx(0.6)
    assert sigma_score(p1) == 0.0
    same = Population([T2] * 3)
    assert div_score(same) == 0.0
    assert sigma_score(same) == 0.0
    disjoint = Population(optimal_population(7, 3))
    assert div_score(disjoint) == 1.0


def test_apply_swap_examples(p1, p2):
    before = p1.copy()
    p1.apply_swap(2, T3)
    assert np.array_equal(p1.counts, before.counts)
    assert np.array_equal(p1.overlap_matrix(), before.overlap_matrix())
    p1.apply_swap(2, T4)
    assert np.array_equal(p1.counts, p2.counts)
    assert np.array_equal(p1.overlap_matrix(), p2.overlap_matrix())
    assert p1.sumsq == p2.sumsq
    assert p1.check_caches()
    p1.apply_swap(2, T3)
    assert np.array_equal(p1.counts, before.counts)
    assert gtype(p1) == 18


def test_diversity_vector_ordering():
    assert DiversityVector([1, 3, 2]) == (3, 2, 1)
    assert DiversityVector([3, 2, 0]) > DiversityVector([2, 2, 2])
    with pytest.raises(ValueError):
        DiversityVector([1, 2]) < DiversityVector([1, 2, 3])


def test_population_bookkeeping(rng):
    pop = Population([rng.permutation(9) for _ in range(4)], 9)
    assert len(pop) == pop.mu == 4
    assert pop.counts.sum() == 2 * 4 * 9
    removed = pop.remove(1)
    assert pop.size == 3 and pop.check_caches()
    pop.add(removed)
    pop.add(one_based(*range(1, 10)))
    assert pop.size == 5 and pop.check_caches()
    assert pop.overlap_matrix().diagonal().tolist() == [9] * 5
    with pytest.raises(IndexError):
        pop[5]
    with pytest.raises(ValueError):
        pop.add(Tour((0, 1, 2)))


def test_errors_on_tiny_populations():
    single = Population([T1])
    with pytest.raises(ValueError):
        overlap_vector(single)
    with pytest.raises(ValueError):
        select_removal(single)
    with pytest.raises(ValueError):
        div_score(single)
    with pytest.raises(ValueError):
        select_removal(Population([T1, T2]), "XD")


# --------------------------------------------------------------------------
# properties


@settings(max_examples=150, deadline=None)
@given(st.integers(3, 12), st.integers(1, 8), st.integers(0, 2**32 - 1))
def test_gtype_identity_property(n, mu, seed):
    rng = np.random.default_rng(seed)
    tours = [Tour(tuple(rng.permutation(n).tolist())) for _ in range(mu)]
    pop = Population(tours)
    counts = counts_by_edge(tours, n)
    closed = mu * (mu - 1) * n + sum(counts) - sum(c * c for c in counts)
    assert gtype_pairwise(tours) == closed == gtype(pop) == gtype_from_counts(counts, mu, n)
    assert 0 <= gtype(pop) <= optimal_gtype(n, mu) <= mu * (mu - 1) * n
    assert 0 <= gtype_percent(pop) <= 100


@settings(max_examples=120, deadline=None)
@given(st.integers(4, 10), st.integers(2, 7), st.integers(1, 6), st.integers(0, 2**32 - 1))
def test_selection_matches_leave_one_out(n, mu, pool, seed):
    rng = np.random.default_rng(seed)
    tours = tours_from_pool(rng, n, mu + 1, pool)
    pop = Population(tours)
    for measure in (ED, PD):
        expected = leave_one_out_argmin(tours, n, measure)
        assert fitness_argmax(pop, measure) == expected
        assert select_removal(pop, measure) == max(expected)
        assert select_removal(pop, measure, "random", seed) in expected


@settings(max_examples=80, deadline=None)
@given(st.integers(3, 11), st.integers(1, 6), st.integers(0, 2**32 - 1))
def test_swap_and_remove_keep_caches(n, mu, seed):
    rng = np.random.default_rng(seed)
    pop = Population([rng.permutation(n) for _ in range(mu)], n)
    for _ in range(10):
        i = int(rng.integers(pop.size))
        pop.apply_swap(i, rng.permutation(n))
        assert pop.check_caches()
    assert pop.counts.sum() == 2 * mu * n
    assert pop.sumsq >= min_sum_squares(n, mu)


def test_bounds_hold_on_optimal_populations():
    for n in (5, 6, 9, 10):
        for mu in (2, 4, 7):
            pop = Population(optimal_population(n, mu))
            assert gtype(pop) == optimal_gtype(n, mu)
            assert gtype_percent(pop) == 100.0
            assert overlap_spread(pop) >= 0


def test_div_sigma_ranges(rng):
    for _ in range(50):
        n = int(rng.integers(4, 15))
        pop = Population([rng.permutation(n) for _ in range(int(rng.integers(2, 6)))], n)
        assert 0.0 <= div_score(pop) <= 1.0
        assert 0.0 <= sigma_score(pop) <= 1.0
        assert math.isclose(sigma_score(pop), overlap_spread(pop) / n)
