"""
Best matching functions between totally ordered finite sets.

For a relation ``b ~> a`` between B and A that is traversable,

    a1 >= a2, b1 >= b2, b1 ~> a1, b2 ~> a1, b2 ~> a2  ==>  b1 ~> a2,

elements of A are visited from the top down and each takes the smallest
still unused b related to it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations, permutations
from typing import Callable, Iterable, Iterator, Sequence

from app.config.settings import get_settings
from app.core.exceptions import InternalConsistencyError

# rel(b, a) is True when b ~> a
Relation = Callable[[int, int], bool]


@dataclass(frozen=True, slots=True)
class OrderedIndexSet:
    """Indices sorted ascending by ``key``; ties broken by the index itself."""

    items: tuple[int, ...] = ()

    @classmethod
    def build(cls, indices: Iterable[int], key: Callable[[int], object]) -> OrderedIndexSet:
        return cls(tuple(sorted(indices, key=lambda i: (key(i), i))))

    def __len__(self) -> int:
        return len(self.items)

    def __iter__(self) -> Iterator[int]:
        return iter(self.items)

    def __contains__(self, index: object) -> bool:
        return index in self.items

    def minimum(self) -> int:
        return self.items[0]

    def subset(self, keep: Iterable[int]) -> OrderedIndexSet:
        wanted = set(keep)
        return OrderedIndexSet(tuple(i for i in self.items if i in wanted))


@dataclass(frozen=True, slots=True)
class MatchResult:
    a0: OrderedIndexSet
    b0: OrderedIndexSet
    f: tuple[tuple[int, int], ...]
    ac: OrderedIndexSet
    bc: OrderedIndexSet
    mapping: dict[int, int] = field(default_factory=dict, compare=False)


def is_traversable(a: OrderedIndexSet, b: OrderedIndexSet, rel: Relation) -> bool:
    a_items, b_items = a.items, b.items
    for i2, a2 in enumerate(a_items):
        for a1 in a_items[i2:]:
            for j2, b2 in enumerate(b_items):
                if not (rel(b2, a1) and rel(b2, a2)):
                    continue
                for b1 in b_items[j2:]:
                    if rel(b1, a1) and not rel(b1, a2):
                        return False
    return True


def best_match(a: OrderedIndexSet, b: OrderedIndexSet, rel: Relation) -> MatchResult:
    if get_settings().DEBUG and not is_traversable(a, b, rel):
        raise InternalConsistencyError("best_match: relation is not traversable")

    used: set[int] = set()
    mapping: dict[int, int] = {}
    for item in reversed(a.items):
        for target in b.items:
            if target not in used and rel(target, item):
                mapping[item] = target
                used.add(target)
                break

    a0 = a.subset(mapping)
    b0 = b.subset(used)
    return MatchResult(
        a0=a0,
        b0=b0,
        f=tuple((i, mapping[i]) for i in a0.items),
        ac=a.subset(i for i in a.items if i not in mapping),
        bc=b.subset(i for i in b.items if i not in used),
        mapping=mapping,
    )


def hall_check(a: OrderedIndexSet, b: OrderedIndexSet, rel: Relation) -> bool:
    """Hall's criterion: every A' has at least |A'| related elements of B."""
    for size in range(1, len(a) + 1):
        for subset in combinations(a.items, size):
            neighbours = {j for j in b.items if any(rel(j, i) for i in subset)}
            if len(neighbours) < size:
                return False
    return True


def brute_force_match_size(a: Sequence[int], b: Sequence[int], rel: Relation) -> int:
    """Largest injection contained in the relation, by exhaustive search."""
    best = 0
    for size in range(min(len(a), len(b)), 0, -1):
        for sources in combinations(a, size):
            for targets in permutations(b, size):
                if all(rel(t, s) for s, t in zip(sources, targets)):
                    return size
    return best
