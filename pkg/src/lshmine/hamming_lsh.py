"""Bit-sampling LSH over padded vectors.

L hash tables, each keyed by k uniformly sampled bit positions of the
padded vector.  Preprocessing inserts P-padded vectors; queries probe with
Q-padded vectors, verify every new compatible collision against the
database, and give up early once enough inspections found nothing similar.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .dataset import ItemsetRecord, co_support
from .exact import union_if_compatible
from .transform import PREPROCESS, QUERY, DegenerateLevel, LevelContext, padded_bits_array


def _ceil(x: float) -> int:
    # tolerate float noise just below an integer
    return math.ceil(x - 1e-12)


@dataclass(frozen=True)
class HammingLshParams:
    rho: float
    k: int
    L: int
    early_exit_budget: int


def derive_params(ctx: LevelContext, epsilon: float, delta: float) -> HammingLshParams:
    """Choose (rho, k, L) for the level.

    rho = (a-t)/(a-(1-e)t), k = ceil(log_{(1+2a)/(1+2(1-e)t)} m_l),
    L = ceil(m_l^rho * ln(1/delta)), early exit budget ceil(L/delta),
    where a and t are the level's weight and threshold fractions.
    Raises DegenerateLevel when a == t (rho would be 0 and the gap empty).
    """
    if not 0.0 < epsilon <= 1.0:
        raise ValueError("epsilon must be in (0,1]")
    if not 0.0 < delta < 1.0:
        raise ValueError("delta must be in (0,1)")
    if ctx.m_l < 2:
        raise ValueError("need at least two itemsets in the level")
    if ctx.alpha_count == ctx.theta_count:
        raise DegenerateLevel(f"alpha == theta ({ctx.alpha_count}/{ctx.n}) at this level")

    alpha, theta = ctx.alpha, ctx.theta
    low = (1.0 - epsilon) * theta
    rho = (alpha - theta) / (alpha - low)
    k = max(1, _ceil(math.log(ctx.m_l) / math.log((1.0 + 2.0 * alpha) / (1.0 + 2.0 * low))))
    L = max(1, _ceil(ctx.m_l**rho * math.log(1.0 / delta)))
    return HammingLshParams(rho=rho, k=k, L=L, early_exit_budget=_ceil(L / delta))


@dataclass
class HammingIndex:
    params: HammingLshParams
    ctx: LevelContext
    records: list[ItemsetRecord]
    projections: np.ndarray                      # (L, k) sampled positions
    tables: list[dict[bytes, list[int]]]
    seed: object = None

    def bucket_key(self, bits: np.ndarray, table: int) -> bytes:
        return bits[self.projections[table]].tobytes()


def build_index(level: list[ItemsetRecord], params: HammingLshParams, ctx: LevelContext,
                seed, projections: np.ndarray | None = None) -> HammingIndex:
    """Hash every P-padded record into one bucket per table.

    All randomness (the L position sets) is drawn up front from the seed;
    `projections` can be supplied directly to pin the sample in tests.
    """
    if projections is None:
        rng = np.random.default_rng(seed)
        projections = rng.integers(0, ctx.padded_length, size=(params.L, params.k), dtype=np.int64)
    else:
        projections = np.asarray(projections, dtype=np.int64)
        if projections.shape != (params.L, params.k):
            raise ValueError(f"projections must have shape {(params.L, params.k)}")

    index = HammingIndex(params=params, ctx=ctx, records=list(level),
                         projections=projections, tables=[{} for _ in range(params.L)], seed=seed)
    for idx, record in enumerate(level):
        bits = padded_bits_array(record.vector, ctx, PREPROCESS)
        for t in range(params.L):
            key = index.bucket_key(bits, t)
            index.tables[t].setdefault(key, []).append(idx)
    return index


@dataclass
class HammingQueryResult:
    partners: list[ItemsetRecord]                # FI_q, in discovery order
    partner_indices: list[int]
    verified: dict[int, int] = field(default_factory=dict)   # idx -> co_support
    inspections: int = 0
    reads: int = 0
    collision_counts: dict[int, int] = field(default_factory=dict)  # idx -> per-table hits
    early_exit: bool = False


def query(index: HammingIndex, q: ItemsetRecord, ctx: LevelContext) -> HammingQueryResult:
    """Probe the L buckets for Q(q), verify compatible collisions in order,
    and stop early after `early_exit_budget` fruitless inspections.

    Only compatible candidates are verified (and charged n transaction
    reads); incompatible collisions cost nothing.  The early-exit budget
    counts distinct verified candidates, globally across buckets.
    """
    params = index.params
    bits = padded_bits_array(q.vector, ctx, QUERY)
    result = HammingQueryResult(partners=[], partner_indices=[])
    seen: set[int] = set()
    similar_found = False

    for t in range(params.L):
        bucket = index.tables[t].get(index.bucket_key(bits, t))
        if not bucket:
            continue
        for idx in bucket:
            record = index.records[idx]
            if record is q or record.items == q.items:
                continue
            result.collision_counts[idx] = result.collision_counts.get(idx, 0) + 1
            if idx in seen:
                continue
            seen.add(idx)
            if union_if_compatible(q.items, record.items) is None:
                continue
            co = co_support(record.vector, q.vector)
            result.verified[idx] = co
            result.reads += ctx.n
            result.inspections += 1
            if co >= ctx.theta_count:
                result.partners.append(record)
                result.partner_indices.append(idx)
                similar_found = True
            if not similar_found and result.inspections >= params.early_exit_budget:
                result.early_exit = True
                return result
    return result
