"""Asymmetric padding that turns pair co-support into Hamming distance and
Jaccard similarity.

For a level whose heaviest vector has weight ``alpha_count``, both paddings
bring every vector to weight exactly alpha_count and length n + 2*alpha_count.
With x padded for preprocessing and y padded for querying:

    Ham(P(x), Q(y)) = 2*(alpha_count - co_support(x, y))
    JS(P(x), Q(y))  = co_support(x, y) / (2*alpha_count - co_support(x, y))

so a co-support threshold becomes a distance/similarity threshold the
standard hash families understand.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .dataset import BitVector

PREPROCESS = "preprocess"
QUERY = "query"


class DegenerateLevel(Exception):
    """Signals alpha == theta for a level, where a variant's parameter
    derivation is undefined and the caller must fall back to exact joins."""


@dataclass(frozen=True)
class LevelContext:
    """Per-level constants shared by all padding and hashing decisions."""

    n: int
    m_l: int
    alpha_count: int
    theta_count: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be positive")
        if self.m_l < 0:
            raise ValueError("m_l must be non-negative")
        if not 1 <= self.theta_count <= self.alpha_count <= self.n:
            raise ValueError(
                f"need 1 <= theta_count <= alpha_count <= n, got "
                f"theta_count={self.theta_count} alpha_count={self.alpha_count} n={self.n}"
            )

    @property
    def alpha(self) -> float:
        return self.alpha_count / self.n

    @property
    def theta(self) -> float:
        """Effective threshold fraction: the integer threshold re-normalized."""
        return self.theta_count / self.n

    @property
    def padded_length(self) -> int:
        return self.n + 2 * self.alpha_count


@dataclass(frozen=True)
class PaddedVector:
    bits: BitVector
    role: str


def pad_preprocess(v: BitVector, ctx: LevelContext) -> PaddedVector:
    """P(v) = v || 1^(alpha_count-|v|) || 0^(alpha_count+|v|)."""
    w = v.popcount()
    _check_padding_input(v, ctx, w)
    ones = (1 << (ctx.alpha_count - w)) - 1
    return PaddedVector(BitVector(ctx.padded_length, v.value | (ones << ctx.n)), PREPROCESS)


def pad_query(v: BitVector, ctx: LevelContext) -> PaddedVector:
    """Q(v) = v || 0^alpha_count || 1^(alpha_count-|v|) || 0^|v|."""
    w = v.popcount()
    _check_padding_input(v, ctx, w)
    ones = (1 << (ctx.alpha_count - w)) - 1
    return PaddedVector(BitVector(ctx.padded_length, v.value | (ones << (ctx.n + ctx.alpha_count))), QUERY)


def _check_padding_input(v: BitVector, ctx: LevelContext, weight: int):
    if v.length != ctx.n:
        raise ValueError(f"vector length {v.length} != level n {ctx.n}")
    if weight > ctx.alpha_count:
        raise ValueError(f"popcount {weight} exceeds alpha_count {ctx.alpha_count}")


def padded_hamming(p: PaddedVector, q: PaddedVector) -> int:
    _check_pair(p, q)
    return (p.bits.value ^ q.bits.value).bit_count()


def padded_jaccard(p: PaddedVector, q: PaddedVector) -> Fraction:
    _check_pair(p, q)
    inter = (p.bits.value & q.bits.value).bit_count()
    union = (p.bits.value | q.bits.value).bit_count()
    if union == 0:
        raise ValueError("both padded vectors are all-zero")
    return Fraction(inter, union)


def _check_pair(p: PaddedVector, q: PaddedVector):
    if p.role != PREPROCESS or q.role != QUERY:
        raise ValueError(f"expected (preprocess, query) roles, got ({p.role}, {q.role})")
    if p.bits.length != q.bits.length:
        raise ValueError("padded lengths differ")


def hamming_from_co_support(co: int, ctx: LevelContext) -> int:
    """Closed form of Ham(P(x), Q(y)) in terms of co_support(x, y)."""
    return 2 * (ctx.alpha_count - co)


def jaccard_from_co_support(co: int, ctx: LevelContext) -> Fraction:
    """Closed form of JS(P(x), Q(y)) in terms of co_support(x, y)."""
    return Fraction(co, 2 * ctx.alpha_count - co)


def padded_bits_array(v: BitVector, ctx: LevelContext, role: str) -> np.ndarray:
    """Padded vector as a dense uint8 array (for vectorized bit sampling)."""
    padded = pad_preprocess(v, ctx) if role == PREPROCESS else pad_query(v, ctx)
    return padded.bits.to_uint8()


def padded_one_positions(v: BitVector, ctx: LevelContext, role: str) -> np.ndarray:
    """Indices of set bits in the padded vector (for minwise hashing)."""
    w = v.popcount()
    _check_padding_input(v, ctx, w)
    base = np.array(v.ones(), dtype=np.int64)
    offset = ctx.n if role == PREPROCESS else ctx.n + ctx.alpha_count
    block = np.arange(offset, offset + (ctx.alpha_count - w), dtype=np.int64)
    return np.concatenate([base, block])
