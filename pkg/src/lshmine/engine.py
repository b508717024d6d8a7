"""Level-wise mining driver: exact joins or LSH-screened joins, plus the
I/O accounting that makes the variants comparable.

Accounting model ("reading a transaction" = touching one bit of a column):
every exact support verification charges n; hashing work is tracked
separately as hash_bits_read.  For each ordered compatible pair whose
union is below threshold, the partner is a false positive if the variant
spent a full verification on it (for MinHash: if the sketch approved it)
and a true negative otherwise; TN + FP then equals twice the number of
unordered compatible pairs with infrequent unions, which is checked
against an exact sweep of the level.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import covering_lsh, hamming_lsh, minhash_lsh
from .dataset import ItemsetRecord, TransactionDatabase, support_threshold
from .exact import FrequentItemsetSet, brute_force_mine, union_if_compatible
from .transform import DegenerateLevel, LevelContext

VARIANTS = ("exact", "hamming", "minhash", "covering")


@dataclass(frozen=True)
class MiningConfig:
    theta: float
    variant: str = "exact"
    epsilon: float | None = None
    delta: float | None = None
    seed: int = 1
    max_level: int | None = None
    covering_early_exit: bool = False
    mask_dim_cap: int = covering_lsh.DEFAULT_MASK_DIM_CAP

    def validate(self):
        if not 0.0 < self.theta < 1.0:
            raise ValueError("theta must be in (0,1)")
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}")
        if self.variant != "exact":
            if self.epsilon is None or self.delta is None:
                raise ValueError(f"variant {self.variant!r} requires epsilon and delta")
            if not 0.0 < self.epsilon < 1.0:
                raise ValueError("epsilon must be in (0,1)")
            if not 0.0 < self.delta < 1.0:
                raise ValueError("delta must be in (0,1)")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")
        if self.max_level is not None and self.max_level < 1:
            raise ValueError("max_level must be at least 1")
        if self.mask_dim_cap < 1:
            raise ValueError("mask_dim_cap must be at least 1")


@dataclass
class LevelStats:
    """Counters for the transition that produced this level."""

    level: int
    frequent_count: int
    candidates: int            # distinct unions Apriori would generate from D_{l-1}
    emitted_candidates: int    # distinct unions this variant actually verified/emitted
    candidate_pairs: int       # compatible ordered-pair count / 2 (join multiset size)
    frequent_pairs: int        # such pairs whose union meets the threshold
    transactions_read: int     # n per exact support verification
    hash_bits_read: int        # phi per hash evaluation
    overhead_hashes: int       # hash evaluations (2 * m_{l-1} when LSH ran)
    true_negatives: int
    false_positives: int
    phi: int                   # per-hash-evaluation cost in transaction units
    savings_estimate: int      # (n - phi) * true_negatives
    lsh_active: bool
    fallback_reason: str | None = None
    misses_vs_oracle: int | None = None


@dataclass
class MiningReport:
    config: MiningConfig
    db_n: int
    db_m: int
    levels: list[LevelStats]
    itemsets: FrequentItemsetSet
    timings: dict[str, float] = field(default_factory=dict)


@dataclass
class PairSweep:
    """Exact view of one level's join: who is compatible with whom and
    which unions are frequent.  Instrumentation only, never charged."""

    candidate_pairs: int
    frequent_pairs: int
    distinct_candidates: int
    negatives: list[set[int]]   # per record index: compatible partners with infrequent union


def _sweep_pairs(records: list[ItemsetRecord], theta_count: int) -> PairSweep:
    m = len(records)
    negatives = [set() for _ in range(m)]
    cpairs = fpairs = 0
    unions = set()
    for i in range(m):
        vi = records[i].vector.value
        for j in range(i + 1, m):
            u = union_if_compatible(records[i].items, records[j].items)
            if u is None:
                continue
            cpairs += 1
            unions.add(u)
            if (vi & records[j].vector.value).bit_count() >= theta_count:
                fpairs += 1
            else:
                negatives[i].add(j)
                negatives[j].add(i)
    return PairSweep(cpairs, fpairs, len(unions), negatives)


def _exact_extend(records: list[ItemsetRecord], theta_count: int, n: int):
    """Dedup join + support scan; returns (next_records, reads, distinct)."""
    by_items = {r.items: r for r in records}
    first_pair: dict[tuple[int, ...], tuple[ItemsetRecord, ItemsetRecord]] = {}
    for i in range(len(records)):
        for j in range(i + 1, len(records)):
            u = union_if_compatible(records[i].items, records[j].items)
            if u is not None and u not in first_pair:
                first_pair[u] = (records[i], records[j])
    reads = 0
    nxt = []
    for u in sorted(first_pair):
        a, b = first_pair[u]
        vec = a.vector & b.vector
        reads += n
        if vec.popcount() >= theta_count:
            nxt.append(ItemsetRecord.from_vector(u, vec))
    return nxt, reads, len(first_pair)


def _map_queries(fn, count: int, workers: int):
    if workers <= 1 or count <= 1:
        return [fn(i) for i in range(count)]
    with ThreadPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, range(count)))


def _classify(sweep: PairSweep, spent: list[set[int]]) -> tuple[int, int]:
    """Split each query's negative partners into FP (verification spent on
    them) and TN, summed over ordered pairs."""
    fp = tn = 0
    for q, negs in enumerate(sweep.negatives):
        hit = len(negs & spent[q])
        fp += hit
        tn += len(negs) - hit
    return tn, fp


def lsh_apriori_mine(db: TransactionDatabase, config: MiningConfig, workers: int = 1) -> MiningReport:
    """Mine frequent itemsets level by level with the configured variant.

    Level 1 is always computed exactly.  For later levels the variant
    proposes join partners per query itemset; Hamming and covering verify
    during the query (so F is just the deduplicated candidates), MinHash
    defers verification to an explicit support scan of its candidates.
    Degenerate levels (alpha == theta) and oversized covering families
    fall back to the exact join for that level.
    """
    config.validate()
    theta_count = support_threshold(config.theta, db.n)
    fis = FrequentItemsetSet(theta_count=theta_count)
    stats: list[LevelStats] = []
    timings: dict[str, float] = {}

    t0 = time.perf_counter()
    current = []
    reads = 0
    for item in db.items():
        col = db.columns[item]
        reads += db.n
        if col.popcount() >= theta_count:
            current.append(ItemsetRecord.from_vector((item,), col))
    timings["level1:scan"] = time.perf_counter() - t0
    stats.append(LevelStats(
        level=1, frequent_count=len(current), candidates=len(db.items()),
        emitted_candidates=len(db.items()), candidate_pairs=0, frequent_pairs=0,
        transactions_read=reads, hash_bits_read=0, overhead_hashes=0,
        true_negatives=0, false_positives=0, phi=0, savings_estimate=0,
        lsh_active=False,
    ))
    if current:
        fis.levels.append(current)

    level = 1
    while current and (config.max_level is None or level < config.max_level):
        nxt, row = _produce_level(db, config, current, level, theta_count, workers, timings)
        stats.append(row)
        if nxt:
            fis.levels.append(nxt)
        current = nxt
        level += 1

    return MiningReport(config=config, db_n=db.n, db_m=db.m, levels=stats,
                        itemsets=fis, timings=timings)


def _produce_level(db, config, current, level, theta_count, workers, timings):
    n = db.n
    m_l = len(current)
    next_level = level + 1
    tag = f"level{next_level}"

    t0 = time.perf_counter()
    sweep = _sweep_pairs(current, theta_count)
    timings[f"{tag}:sweep"] = time.perf_counter() - t0

    def finish(nxt, reads, emitted, tn, fp, phi, lsh_active, fallback=None):
        nxt = sorted(nxt, key=lambda r: r.items)
        return nxt, LevelStats(
            level=next_level, frequent_count=len(nxt), candidates=sweep.distinct_candidates,
            emitted_candidates=emitted, candidate_pairs=sweep.candidate_pairs,
            frequent_pairs=sweep.frequent_pairs, transactions_read=reads,
            hash_bits_read=2 * m_l * phi if lsh_active else 0,
            overhead_hashes=2 * m_l if lsh_active else 0,
            true_negatives=tn, false_positives=fp, phi=phi,
            savings_estimate=(n - phi) * tn,
            lsh_active=lsh_active, fallback_reason=fallback,
        )

    def exact_path(fallback=None):
        t1 = time.perf_counter()
        nxt, reads, distinct = _exact_extend(current, theta_count, n)
        timings[f"{tag}:verify"] = time.perf_counter() - t1
        return finish(nxt, reads, distinct, 0, 0, 0, lsh_active=False, fallback=fallback)

    if config.variant == "exact" or m_l < 2:
        return exact_path()

    ctx = LevelContext(n=n, m_l=m_l, alpha_count=max(r.support for r in current),
                       theta_count=theta_count)
    seed = np.random.SeedSequence([config.seed, next_level])

    if config.variant == "hamming":
        try:
            params = hamming_lsh.derive_params(ctx, config.epsilon, config.delta)
        except DegenerateLevel:
            return exact_path("degenerate_level")
        t1 = time.perf_counter()
        index = hamming_lsh.build_index(current, params, ctx, seed)
        timings[f"{tag}:build"] = time.perf_counter() - t1
        t1 = time.perf_counter()
        results = _map_queries(lambda qi: hamming_lsh.query(index, current[qi], ctx), m_l, workers)
        timings[f"{tag}:query"] = time.perf_counter() - t1
        reads = sum(r.reads for r in results)
        spent = [set(r.verified) for r in results]
        tn, fp = _classify(sweep, spent)
        candidates: dict[tuple[int, ...], ItemsetRecord] = {}
        for qi, res in enumerate(results):
            for idx, rec in zip(res.partner_indices, res.partners):
                u = union_if_compatible(current[qi].items, rec.items)
                if u not in candidates:
                    candidates[u] = ItemsetRecord.from_vector(u, current[qi].vector & rec.vector)
        return finish(list(candidates.values()), reads, len(candidates), tn, fp,
                      params.k * params.L, lsh_active=True)

    if config.variant == "minhash":
        params = minhash_lsh.derive_params(ctx, config.epsilon, config.delta)
        t1 = time.perf_counter()
        sketch = minhash_lsh.build_sketch(current, params, ctx, seed)
        timings[f"{tag}:build"] = time.perf_counter() - t1
        t1 = time.perf_counter()
        results = _map_queries(lambda qi: minhash_lsh.query(sketch, current[qi], params, ctx),
                               m_l, workers)
        timings[f"{tag}:query"] = time.perf_counter() - t1
        spent = [set(r.approved) for r in results]
        tn, fp = _classify(sweep, spent)
        first_pair: dict[tuple[int, ...], tuple[ItemsetRecord, ItemsetRecord]] = {}
        for qi, res in enumerate(results):
            for rec in res.partners:
                u = union_if_compatible(current[qi].items, rec.items)
                if u not in first_pair:
                    first_pair[u] = (current[qi], rec)
        t1 = time.perf_counter()
        reads = 0
        nxt = []
        for u, (a, b) in first_pair.items():
            vec = a.vector & b.vector
            reads += n
            if vec.popcount() >= theta_count:
                nxt.append(ItemsetRecord.from_vector(u, vec))
        timings[f"{tag}:verify"] = time.perf_counter() - t1
        return finish(nxt, reads, len(first_pair), tn, fp, params.rows, lsh_active=True)

    # covering
    try:
        params = covering_lsh.derive_params(ctx, config.epsilon, config.delta,
                                            mask_dim_cap=config.mask_dim_cap)
    except DegenerateLevel:
        return exact_path("degenerate_level")
    except covering_lsh.FamilyTooLarge:
        return exact_path("family_too_large")
    t1 = time.perf_counter()
    family = covering_lsh.build_family(params, seed)
    index = covering_lsh.build_index(current, family, ctx, params)
    timings[f"{tag}:build"] = time.perf_counter() - t1
    t1 = time.perf_counter()
    results = _map_queries(
        lambda qi: covering_lsh.query(index, current[qi], ctx,
                                      early_exit=config.covering_early_exit),
        m_l, workers)
    timings[f"{tag}:query"] = time.perf_counter() - t1
    reads = sum(r.reads for r in results)
    spent = [set(r.verified) for r in results]
    tn, fp = _classify(sweep, spent)
    candidates = {}
    for qi, res in enumerate(results):
        for rec in res.partners:
            u = union_if_compatible(current[qi].items, rec.items)
            if u not in candidates:
                candidates[u] = ItemsetRecord.from_vector(u, current[qi].vector & rec.vector)
    phi = int(math.ceil(math.log(m_l) / params.c)) + 1
    return finish(list(candidates.values()), reads, len(candidates), tn, fp,
                  phi, lsh_active=True)


@dataclass
class ComparisonReport:
    config: MiningConfig
    report: MiningReport
    oracle_count: int
    output_count: int
    missed: list[tuple[tuple[int, ...], int]]
    sub_threshold: list[tuple[tuple[int, ...], int]]
    per_level_misses: dict[int, int]

    @property
    def clean(self) -> bool:
        return not self.missed and not self.sub_threshold


def compare_with_oracle(db: TransactionDatabase, config: MiningConfig,
                        workers: int = 1) -> ComparisonReport:
    """Run the configured variant and diff it against brute force.

    Reports every frequent itemset the variant missed and every emitted
    itemset below threshold (the latter must always be empty: the support
    filter is exact).  Per-level miss counts are attached to the report's
    level rows where those levels were attempted.
    """
    oracle = brute_force_mine(db, config.theta)
    report = lsh_apriori_mine(db, config, workers=workers)
    out = report.itemsets.as_dict()
    oracle_dict = oracle.as_dict()

    missed = sorted((items, supp) for items, supp in oracle_dict.items() if items not in out)
    sub = sorted((items, supp) for items, supp in out.items()
                 if supp < report.itemsets.theta_count)
    per_level: dict[int, int] = {}
    for items, _ in missed:
        per_level[len(items)] = per_level.get(len(items), 0) + 1
    for row in report.levels:
        row.misses_vs_oracle = per_level.get(row.level, 0)
    return ComparisonReport(config=config, report=report,
                            oracle_count=len(oracle_dict), output_count=len(out),
                            missed=missed, sub_threshold=sub, per_level_misses=per_level)


def accounting_check(stats: LevelStats, n: int) -> bool:
    """Verify the level's counters: TN + FP must equal twice the number of
    compatible pairs with infrequent unions, and the savings estimate must
    be (n - phi) * TN.  Vacuously true for levels where no LSH ran."""
    if not stats.lsh_active:
        return True
    identity = (stats.true_negatives + stats.false_positives
                == 2 * (stats.candidate_pairs - stats.frequent_pairs))
    savings = stats.savings_estimate == (n - stats.phi) * stats.true_negatives
    return identity and savings
