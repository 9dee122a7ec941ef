import random
from itertools import product

import pytest

from app.core.exceptions import InternalConsistencyError
from app.services.matching import (
    OrderedIndexSet,
    best_match,
    brute_force_match_size,
    hall_check,
    is_traversable,
)


def _threshold(av, bv):
    a = OrderedIndexSet.build(range(len(av)), key=lambda i: av[i])
    b = OrderedIndexSet.build(range(len(bv)), key=lambda i: bv[i])
    return a, b, lambda j, i: bv[j] > av[i]


class TestOrderedIndexSet:
    def test_build_sorts_by_key_then_index(self):
        s = OrderedIndexSet.build([0, 1, 2, 3], key=lambda i: [5, 1, 5, 0][i])
        assert s.items == (3, 1, 0, 2)
        assert s.minimum() == 3
        assert 2 in s and 7 not in s

    def test_subset_keeps_order(self):
        s = OrderedIndexSet((4, 2, 9))
        assert s.subset([9, 4]).items == (4, 9)
        assert len(s.subset([])) == 0


class TestBestMatch:
    def test_worked_example(self):
        a, b, rel = _threshold([1, 2, 3], [2, 4])
        result = best_match(a, b, rel)
        assert result.f == ((0, 0), (2, 1))
        assert result.a0.items == (0, 2)
        assert result.ac.items == (1,)
        assert result.b0.items == (0, 1)
        assert result.bc.items == ()
        assert result.mapping == {2: 1, 0: 0}

    def test_empty_sides(self):
        a, b, rel = _threshold([], [1, 2])
        result = best_match(a, b, rel)
        assert result.f == ()
        assert result.bc.items == b.items

    def test_takes_smallest_available_target(self):
        a, b, rel = _threshold([0], [3, 1, 2])
        assert best_match(a, b, rel).f == ((0, 1),)

    @pytest.mark.parametrize(
        "av, bv",
        [
            ([0, 0, 1], [1, 1, 2]),
            ([-2, -1, 0, 0], [-1, 0, 1]),
            ([3, 1, 4, 1, 5], [9, 2, 6, 5]),
            ([2, 2, 2], [2, 3]),
        ],
    )
    def test_greedy_is_maximum_on_threshold_relations(self, av, bv):
        a, b, rel = _threshold(av, bv)
        assert is_traversable(a, b, rel)
        result = best_match(a, b, rel)
        assert len(result.f) == brute_force_match_size(a.items, b.items, rel)
        assert all(rel(j, i) for i, j in result.f)

    def test_non_traversable_detected(self):
        a = OrderedIndexSet((0, 1))
        b = OrderedIndexSet((0, 1))
        table = {(0, 1): True, (0, 0): True, (1, 1): True, (1, 0): False}
        rel = lambda j, i: table[(j, i)]  # noqa: E731
        assert not is_traversable(a, b, rel)
        best_match(a, b, rel)

    def test_non_traversable_rejected_in_debug(self, strict):
        a = OrderedIndexSet((0, 1))
        b = OrderedIndexSet((0, 1))
        rel = lambda j, i: not (j == 1 and i == 0)  # noqa: E731
        with pytest.raises(InternalConsistencyError):
            best_match(a, b, rel)


class TestHall:
    @pytest.mark.parametrize(
        "av, bv",
        [
            ([0, 1], [1, 2]),
            ([0, 1], [2]),
            ([1, 1, 1], [2, 2, 0]),
            ([], [0]),
        ],
    )
    def test_hall_agrees_with_brute_force(self, av, bv):
        a, b, rel = _threshold(av, bv)
        expected = brute_force_match_size(a.items, b.items, rel) == len(a)
        assert hall_check(a, b, rel) is expected


@pytest.mark.slow
def test_greedy_exhaustive_small_threshold_relations():
    values = range(3)
    for n_a, n_b in product(range(4), range(4)):
        for av in product(values, repeat=n_a):
            for bv in product(values, repeat=n_b):
                a, b, rel = _threshold(list(av), list(bv))
                size = brute_force_match_size(a.items, b.items, rel)
                assert len(best_match(a, b, rel).f) == size
                assert hall_check(a, b, rel) is (size == len(a))


@pytest.mark.slow
def test_greedy_on_random_threshold_relations():
    rng = random.Random(20240611)
    for _ in range(10_000):
        av = [rng.randint(-3, 3) for _ in range(rng.randint(0, 6))]
        bv = [rng.randint(-3, 3) for _ in range(rng.randint(0, 6))]
        strict = rng.random() < 0.5
        a = OrderedIndexSet.build(range(len(av)), key=lambda i: av[i])
        b = OrderedIndexSet.build(range(len(bv)), key=lambda i: bv[i])

        def rel(j, i):
            return bv[j] > av[i] if strict else bv[j] >= av[i]

        assert is_traversable(a, b, rel)
        size = brute_force_match_size(a.items, b.items, rel)
        assert len(best_match(a, b, rel).f) == size
        assert hall_check(a, b, rel) is (size == len(a))


def _lexicographic_best(a, b, rel):
    """Exhaustive search: from the top of A down, prefer a match, then the smallest free target."""
    tops = list(reversed(a.items))
    best_key, best = None, None
    for targets in product([None, *b.items], repeat=len(tops)):
        chosen = [t for t in targets if t is not None]
        if len(set(chosen)) != len(chosen):
            continue
        if any(t is not None and not rel(t, i) for i, t in zip(tops, targets)):
            continue
        key = tuple((1, 0) if t is None else (0, b.items.index(t)) for t in targets)
        if best_key is None or key < best_key:
            best_key, best = key, {i: t for i, t in zip(tops, targets) if t is not None}
    return best


class TestPermutations:
    @pytest.mark.parametrize(
        "av, bv",
        [
            ([0, 0, 1, 1], [1, 1, 2]),
            ([-1, -1, -1], [0, 0]),
            ([2, 0, 2, 0], [1, 3, 1, 3]),
        ],
    )
    def test_reordering_equal_elements_keeps_matched_values(self, av, bv):
        a, b, rel = _threshold(av, bv)
        result = best_match(a, b, rel)
        expected = sorted((av[i], bv[j]) for i, j in result.f)
        rng = random.Random(len(av) * 10 + len(bv))
        for _ in range(20):
            pa, pb = av[:], bv[:]
            rng.shuffle(pa)
            rng.shuffle(pb)
            a2, b2, rel2 = _threshold(pa, pb)
            shuffled = best_match(a2, b2, rel2)
            assert sorted((pa[i], pb[j]) for i, j in shuffled.f) == expected
            assert sorted(pa[i] for i in shuffled.ac) == sorted(av[i] for i in result.ac)
            assert sorted(pb[j] for j in shuffled.bc) == sorted(bv[j] for j in result.bc)


@pytest.mark.slow
def test_greedy_matches_lexicographic_oracle_on_random_relations():
    rng = random.Random(7)
    kept = nontrivial = 0
    for _ in range(5_000):
        n_a, n_b = rng.randint(0, 4), rng.randint(0, 4)
        table = {(j, i): rng.random() < 0.5 for j in range(n_b) for i in range(n_a)}
        a = OrderedIndexSet(tuple(range(n_a)))
        b = OrderedIndexSet(tuple(range(n_b)))

        def rel(j, i):
            return table[(j, i)]

        if not is_traversable(a, b, rel):
            continue
        kept += 1
        nontrivial += n_a >= 2 and n_b >= 2
        result = best_match(a, b, rel)
        oracle = _lexicographic_best(a, b, rel)
        assert result.mapping == oracle
        assert result.a0.items == tuple(i for i in a.items if i in oracle)
        assert result.b0.items == tuple(j for j in b.items if j in oracle.values())
        assert result.f == tuple((i, oracle[i]) for i in result.a0.items)
        assert len(result.f) == brute_force_match_size(a.items, b.items, rel)
    assert kept > 1_000
    assert nontrivial > 100
