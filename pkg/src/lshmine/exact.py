"""Exact miners: level-wise Apriori and a brute-force enumerator.

Both produce the same answer by construction; the brute-force path exists
so the randomized miners always have an independent ground truth to be
checked against.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

from .dataset import BitVector, ItemsetRecord, TransactionDatabase, support_threshold

BRUTE_FORCE_MAX_ITEMS = 20


@dataclass
class FrequentItemsetSet:
    """Frequent itemsets grouped by level; level l holds l-item records."""

    theta_count: int
    levels: list[list[ItemsetRecord]] = field(default_factory=list)

    def level(self, l: int) -> list[ItemsetRecord]:
        if l < 1 or l > len(self.levels):
            return []
        return self.levels[l - 1]

    def max_level(self) -> int:
        return len(self.levels)

    def all_records(self):
        for records in self.levels:
            yield from records

    def as_dict(self) -> dict[tuple[int, ...], int]:
        return {r.items: r.support for r in self.all_records()}

    def item_tuples(self) -> set[tuple[int, ...]]:
        return {r.items for r in self.all_records()}

    def count(self) -> int:
        return sum(len(records) for records in self.levels)

    def same_itemsets(self, other: "FrequentItemsetSet") -> bool:
        return self.as_dict() == other.as_dict()


@dataclass
class LevelTally:
    """Per-level work counters for a plain Apriori run."""

    level: int
    candidates: int
    frequent: int
    transactions_read: int


@dataclass
class AprioriResult:
    itemsets: FrequentItemsetSet
    tallies: list[LevelTally]


def union_if_compatible(a: tuple[int, ...], b: tuple[int, ...]):
    """Merge two sorted l-item tuples; return the union iff it has l+1 items."""
    target = len(a) + 1
    out = []
    i = j = 0
    while i < len(a) and j < len(b):
        if a[i] == b[j]:
            out.append(a[i])
            i += 1
            j += 1
        elif a[i] < b[j]:
            out.append(a[i])
            i += 1
        else:
            out.append(b[j])
            j += 1
        if len(out) > target:
            return None
    out.extend(a[i:])
    out.extend(b[j:])
    if len(out) != target:
        return None
    return tuple(out)


def join_compatible(level: list[ItemsetRecord]) -> list[tuple[int, ...]]:
    """All deduplicated size-(l+1) unions of compatible pairs, sorted."""
    seen = set()
    for i in range(len(level)):
        for j in range(i + 1, len(level)):
            u = union_if_compatible(level[i].items, level[j].items)
            if u is not None:
                seen.add(u)
    return sorted(seen)


def _frequent_singletons(db: TransactionDatabase, theta_count: int) -> tuple[list[ItemsetRecord], int]:
    records = []
    reads = 0
    for item in db.items():
        col = db.columns[item]
        reads += db.n
        if col.popcount() >= theta_count:
            records.append(ItemsetRecord.from_vector((item,), col))
    return records, reads


def apriori_mine(db: TransactionDatabase, theta: float) -> AprioriResult:
    """Level-wise Apriori: join compatible pairs, verify support, repeat."""
    theta_count = support_threshold(theta, db.n)
    fis = FrequentItemsetSet(theta_count=theta_count)
    tallies: list[LevelTally] = []

    current, reads = _frequent_singletons(db, theta_count)
    tallies.append(LevelTally(1, len(db.items()), len(current), reads))
    if current:
        fis.levels.append(current)

    level = 1
    while current:
        by_items = {r.items: r for r in current}
        candidates: dict[tuple[int, ...], tuple[tuple[int, ...], tuple[int, ...]]] = {}
        items_list = list(by_items)
        for i in range(len(items_list)):
            for j in range(i + 1, len(items_list)):
                u = union_if_compatible(items_list[i], items_list[j])
                if u is not None and u not in candidates:
                    candidates[u] = (items_list[i], items_list[j])

        reads = 0
        nxt = []
        for u in sorted(candidates):
            a, b = candidates[u]
            vec = by_items[a].vector & by_items[b].vector
            reads += db.n
            if vec.popcount() >= theta_count:
                nxt.append(ItemsetRecord.from_vector(u, vec))

        level += 1
        tallies.append(LevelTally(level, len(candidates), len(nxt), reads))
        if nxt:
            fis.levels.append(nxt)
        current = nxt

    return AprioriResult(itemsets=fis, tallies=tallies)


def brute_force_mine(db: TransactionDatabase, theta: float) -> FrequentItemsetSet:
    """Enumerate every non-empty itemset over the occurring items and keep
    the ones meeting the threshold.  Deliberately has no shared logic with
    apriori_mine so it can act as an oracle."""
    if db.m > BRUTE_FORCE_MAX_ITEMS:
        raise ValueError(f"item universe too large for brute force (m={db.m} > {BRUTE_FORCE_MAX_ITEMS})")
    theta_count = support_threshold(theta, db.n)
    fis = FrequentItemsetSet(theta_count=theta_count)
    items = db.items()
    full = (1 << db.n) - 1
    for size in range(1, len(items) + 1):
        records = []
        for comb in combinations(items, size):
            v = full
            for item in comb:
                v &= db.columns[item].value
            support = v.bit_count()
            if support >= theta_count:
                records.append(ItemsetRecord(comb, BitVector(db.n, v), support))
        fis.levels.append(records)
    while fis.levels and not fis.levels[-1]:
        fis.levels.pop()
    return fis
