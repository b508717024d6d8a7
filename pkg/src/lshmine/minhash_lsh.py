"""Asymmetric MinHash over padded vectors.

A sketch of `rows` minwise values per itemset estimates the padded Jaccard
similarity; partners whose estimate clears the accept threshold go into
FI_q.  The database itself is never read at query time; the level-wise
driver re-verifies the surviving candidates exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dataset import ItemsetRecord
from .exact import union_if_compatible
from .transform import PREPROCESS, QUERY, LevelContext, padded_one_positions

DEFAULT_ROW_CAP = 2_000_000


@dataclass(frozen=True)
class MinhashParams:
    omega: float              # Jaccard value of a pair exactly at (1-eps)*theta co-support
    eps_mh: float             # estimation tolerance fed to the sketch-size bound
    rows: int                 # sketch rows (the lambda of the size bound)
    accept_threshold: float   # estimated-JS cutoff for adding a partner


def derive_params(ctx: LevelContext, epsilon: float, delta: float,
                  row_cap: int = DEFAULT_ROW_CAP) -> MinhashParams:
    """omega = (1-e)t/(2a-(1-e)t), eps_mh = a*e/(a+(a-t)(1-e)),
    rows = ceil(2/(omega*eps_mh^2) * ln(1/delta)), accept = (1-eps_mh)t/(2a-t).

    alpha == theta degenerates gracefully (eps_mh == epsilon).  Raises when
    the row count would exceed `row_cap`, which happens as epsilon -> 0.
    """
    if not 0.0 < epsilon <= 1.0:
        raise ValueError("epsilon must be in (0,1]")
    if not 0.0 < delta < 1.0:
        raise ValueError("delta must be in (0,1)")
    alpha, theta = ctx.alpha, ctx.theta
    low = (1.0 - epsilon) * theta
    omega = low / (2.0 * alpha - low)
    eps_mh = alpha * epsilon / (alpha + (alpha - theta) * (1.0 - epsilon))
    scale = omega * eps_mh * eps_mh
    if scale <= 0.0:
        raise ValueError("tolerance too small: omega*eps_mh^2 underflowed")
    rows_raw = (2.0 / scale) * math.log(1.0 / delta)
    if not rows_raw <= row_cap:
        raise ValueError(f"tolerance too small: sketch would need {rows_raw:.3g} rows (cap {row_cap})")
    rows = max(1, math.ceil(rows_raw - 1e-12))
    accept = (1.0 - eps_mh) * theta / (2.0 * alpha - theta)
    return MinhashParams(omega=omega, eps_mh=eps_mh, rows=rows, accept_threshold=accept)


@dataclass
class MinhashSketch:
    params: MinhashParams
    ctx: LevelContext
    records: list[ItemsetRecord]
    perms: np.ndarray      # (rows, padded_length) independent permutations
    columns: np.ndarray    # (rows, m_l) minwise values of the P-padded records
    seed: object = None


def build_sketch(level: list[ItemsetRecord], params: MinhashParams, ctx: LevelContext,
                 seed) -> MinhashSketch:
    """Draw `rows` seeded permutations of the padded universe and record the
    minwise value of every P-padded vector under each."""
    rng = np.random.default_rng(seed)
    base = np.tile(np.arange(ctx.padded_length, dtype=np.int64), (params.rows, 1))
    perms = rng.permuted(base, axis=1)
    if level:
        columns = np.stack(
            [perms[:, padded_one_positions(r.vector, ctx, PREPROCESS)].min(axis=1) for r in level],
            axis=1,
        )
    else:
        columns = np.empty((params.rows, 0), dtype=np.int64)
    return MinhashSketch(params=params, ctx=ctx, records=list(level),
                         perms=perms, columns=columns, seed=seed)


def sketch_query_column(sketch: MinhashSketch, q: ItemsetRecord) -> np.ndarray:
    """Minwise values of Q(q) under the sketch's permutations."""
    ones = padded_one_positions(q.vector, sketch.ctx, QUERY)
    return sketch.perms[:, ones].min(axis=1)


def estimate_js(col_a: np.ndarray, col_q: np.ndarray) -> float:
    """Fraction of sketch rows whose minwise values agree."""
    if col_a.shape != col_q.shape:
        raise ValueError("sketch columns must have the same row count")
    return float(np.count_nonzero(col_a == col_q)) / len(col_a)


@dataclass
class MinhashQueryResult:
    partners: list[ItemsetRecord]        # FI_q: compatible, estimate >= accept
    partner_indices: list[int]
    approved: dict[int, float]           # idx -> estimated JS (compatible only)
    rejected: dict[int, float]


def query(sketch: MinhashSketch, q: ItemsetRecord, params: MinhashParams,
          ctx: LevelContext) -> MinhashQueryResult:
    """Sketch-only screening: no database reads happen here."""
    qcol = sketch_query_column(sketch, q)
    matches = np.count_nonzero(sketch.columns == qcol[:, None], axis=0)
    # integer comparison against rows*threshold avoids float-boundary flapping
    need = params.accept_threshold * params.rows - 1e-9
    result = MinhashQueryResult(partners=[], partner_indices=[], approved={}, rejected={})
    for idx, record in enumerate(sketch.records):
        if record is q or record.items == q.items:
            continue
        if union_if_compatible(q.items, record.items) is None:
            continue
        est = float(matches[idx]) / params.rows
        if matches[idx] >= need:
            result.approved[idx] = est
            result.partners.append(record)
            result.partner_indices.append(idx)
        else:
            result.rejected[idx] = est
    return result
