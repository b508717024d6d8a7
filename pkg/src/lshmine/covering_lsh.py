"""Covering LSH over padded vectors: Hamming projections with no false
negatives.

A random map phi sends each padded bit position to a (t*theta'+1)-bit
vector; every nonzero v in that space yields a projection mask
a(v)_i = <phi(i), v> over GF(2).  Any two padded vectors within Hamming
distance theta' disagree on at most theta' positions, whose phi-images
span a proper subspace, so some nonzero v is orthogonal to all of them
and the corresponding mask sends both vectors to the same key.  Collisions
are therefore guaranteed for every similar pair, for every phi.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .dataset import ItemsetRecord, co_support
from .exact import union_if_compatible
from .transform import PREPROCESS, QUERY, DegenerateLevel, LevelContext, pad_preprocess, pad_query

DEFAULT_MASK_DIM_CAP = 24


class FamilyTooLarge(Exception):
    """The mask space 2^(t*theta'+1) exceeds the configured cap."""


def _ceil(x: float) -> int:
    return math.ceil(x - 1e-12)


@dataclass(frozen=True)
class CoveringParams:
    n_prime: int            # padded dimension
    theta_prime: int        # Hamming radius equivalent to the support threshold
    t: int
    c: float                # tolerance ratio > 1
    eps_round: float        # rounding residue t - ln(m_l)/(2(a-(1-e)t)n)
    nu: float               # (t+eps_round)/(c*t)
    mask_dim: int           # t*theta_prime + 1
    psi_bound: float        # expected false positives per query: 2^(theta'*eps_round+1) m_l^(1/c)
    early_exit_budget: int  # ceil(psi_bound/delta)


def derive_params(ctx: LevelContext, epsilon: float, delta: float,
                  mask_dim_cap: int = DEFAULT_MASK_DIM_CAP) -> CoveringParams:
    """Parameter table for the covering family at this level.

    theta_prime uses integer counts, 2*(alpha_count - theta_count): supports
    are integers, so this radius captures exactly the pairs at or above the
    threshold.  t floors at 1.  Raises DegenerateLevel when alpha == theta
    (c undefined) and FamilyTooLarge when mask_dim exceeds the cap.
    """
    if not 0.0 < epsilon <= 1.0:
        raise ValueError("epsilon must be in (0,1]")
    if not 0.0 < delta < 1.0:
        raise ValueError("delta must be in (0,1)")
    if ctx.alpha_count == ctx.theta_count:
        raise DegenerateLevel(f"alpha == theta ({ctx.alpha_count}/{ctx.n}) at this level")
    m_l = max(1, ctx.m_l)

    theta_prime = 2 * (ctx.alpha_count - ctx.theta_count)
    gap = 2.0 * (ctx.alpha_count - (1.0 - epsilon) * ctx.theta_count)
    raw = math.log(m_l) / gap
    t = max(1, _ceil(raw))
    eps_round = t - raw
    c = (ctx.alpha_count - (1.0 - epsilon) * ctx.theta_count) / (ctx.alpha_count - ctx.theta_count)
    nu = (t + eps_round) / (c * t)
    mask_dim = t * theta_prime + 1
    psi_bound = 2.0 ** (theta_prime * eps_round + 1) * m_l ** (1.0 / c)
    if mask_dim > mask_dim_cap:
        raise FamilyTooLarge(
            f"covering family too large: mask_dim {mask_dim} > cap {mask_dim_cap}"
        )
    return CoveringParams(
        n_prime=ctx.padded_length, theta_prime=theta_prime, t=t, c=c,
        eps_round=eps_round, nu=nu, mask_dim=mask_dim, psi_bound=psi_bound,
        early_exit_budget=max(1, _ceil(psi_bound / delta)),
    )


@dataclass
class CoveringFamily:
    mask_dim: int
    phi: np.ndarray          # (n_prime,) ints in [0, 2^mask_dim)
    masks: list[int]         # 2^mask_dim - 1 projection masks, n_prime bits each
    seed: object = None


def build_family(params: CoveringParams, seed, phi: np.ndarray | None = None) -> CoveringFamily:
    """Draw phi and materialize the mask a(v) for every nonzero v.

    `phi` can be injected for tests (e.g. the all-zero map to exercise
    total-collision handling).
    """
    if phi is None:
        rng = np.random.default_rng(seed)
        phi = rng.integers(0, 1 << params.mask_dim, size=params.n_prime, dtype=np.int64)
    else:
        phi = np.asarray(phi, dtype=np.int64)
        if phi.shape != (params.n_prime,):
            raise ValueError(f"phi must have shape ({params.n_prime},)")

    n_masks = (1 << params.mask_dim) - 1
    masks: list[int] = []
    chunk = 4096
    for start in range(0, n_masks, chunk):
        block = np.arange(start + 1, min(start + chunk, n_masks) + 1, dtype=np.int64)
        parity = (np.bitwise_count(phi[:, None] & block[None, :]) & 1).astype(np.uint8)
        packed = np.packbits(parity, axis=0, bitorder="little")
        for col in range(packed.shape[1]):
            masks.append(int.from_bytes(packed[:, col].tobytes(), "little"))
    return CoveringFamily(mask_dim=params.mask_dim, phi=phi, masks=masks, seed=seed)


@dataclass
class CoveringIndex:
    params: CoveringParams
    family: CoveringFamily
    ctx: LevelContext
    records: list[ItemsetRecord]
    tables: list[dict[int, list[int]]] = field(default_factory=list)


def build_index(level: list[ItemsetRecord], family: CoveringFamily, ctx: LevelContext,
                params: CoveringParams) -> CoveringIndex:
    """One hash table per mask; the key of record a under mask m is P(a) & m."""
    index = CoveringIndex(params=params, family=family, ctx=ctx, records=list(level),
                          tables=[{} for _ in family.masks])
    padded = [pad_preprocess(r.vector, ctx).bits.value for r in level]
    for t, mask in enumerate(family.masks):
        table = index.tables[t]
        for idx, p in enumerate(padded):
            table.setdefault(p & mask, []).append(idx)
    return index


@dataclass
class CoveringQueryResult:
    partners: list[ItemsetRecord]
    partner_indices: list[int]
    verified: dict[int, int] = field(default_factory=dict)
    inspections: int = 0
    reads: int = 0
    collision_counts: dict[int, int] = field(default_factory=dict)
    early_exit: bool = False


def query(index: CoveringIndex, q: ItemsetRecord, ctx: LevelContext,
          early_exit: bool = False) -> CoveringQueryResult:
    """Probe every mask's bucket for Q(q) and verify compatible collisions.

    With `early_exit` off (the default) every collision is inspected, which
    preserves the no-false-negative guarantee; switching it on applies the
    same fruitless-inspection budget as the Hamming variant.
    """
    params = index.params
    qval = pad_query(q.vector, ctx).bits.value
    result = CoveringQueryResult(partners=[], partner_indices=[])
    seen: set[int] = set()
    similar_found = False

    for t, mask in enumerate(index.family.masks):
        bucket = index.tables[t].get(qval & mask)
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
            if early_exit and not similar_found and result.inspections >= params.early_exit_budget:
                result.early_exit = True
                return result
    return result


def verify_covering(family: CoveringFamily, positions) -> bool:
    """True iff some nonzero v has <phi(i), v> = 0 for every given position.

    Equivalent to rank({phi(i)}) < mask_dim over GF(2), so for at most
    mask_dim - 1 positions this always holds: the covering property.
    """
    basis: list[int] = []
    for i in positions:
        if i < 0 or i >= len(family.phi):
            raise ValueError(f"position {i} out of range for padded dimension {len(family.phi)}")
        row = int(family.phi[i])
        for b in basis:
            row = min(row, row ^ b)
        if row:
            basis.append(row)
            basis.sort(reverse=True)
    return len(basis) < family.mask_dim
