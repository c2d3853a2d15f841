"""Rank reduction ``(rho_0, rho_1, rho_2, rho_3, ...) -> (rho_1, rho_0 rho_2, rho_3, ...)``
and the merge that undoes a rank augmentation."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .perm import DEFAULT_INTERSECTION_LIMIT, Permutation, _mul, _order
from .sggi import GeneratorTuple, NotStringError, dual, is_string, is_string_c_group


class NotApplicable(ValueError):
    pass


def rrt_applicable(t: GeneratorTuple):
    """Return ``(applicable, reason)``.

    Applicable when no two adjacent generators commute and rho_2 rho_3 has
    odd order.
    """
    if t.rank < 4:
        raise ValueError(f"rank reduction needs rank >= 4, got {t.rank}")
    ok, bad = is_string(t)
    if not ok:
        raise NotStringError(f"generators {bad[0]} and {bad[1]} do not commute")
    raw = t.raw
    for i in range(t.rank - 1):
        if _order(_mul(raw[i], raw[i + 1])) <= 2:
            return False, f"adjacent generators {i + t.offset} and {i + 1 + t.offset} commute"
    p = _order(_mul(raw[2], raw[3]))
    if p % 2 == 0:
        return False, f"rho_2 rho_3 has even order {p}"
    return True, f"no adjacent pair commutes and rho_2 rho_3 has odd order {p}"


def _reduced(t: GeneratorTuple) -> GeneratorTuple:
    g = t.gens
    return GeneratorTuple(t.degree, (g[1], g[0] * g[2]) + g[3:], 0)


def reduce(t: GeneratorTuple) -> GeneratorTuple:
    ok, reason = rrt_applicable(t)
    if not ok:
        raise NotApplicable(reason)
    return _reduced(t)


@dataclass(frozen=True)
class ReductionResult:
    applicable: bool
    reason: str
    reduced: GeneratorTuple | None
    is_string_c_group: bool | None
    same_order: bool | None


def reduce_and_verify(t: GeneratorTuple, limit: int = DEFAULT_INTERSECTION_LIMIT) -> ReductionResult:
    ok, reason = rrt_applicable(t)
    if not ok:
        return ReductionResult(False, reason, None, None, None)
    red = _reduced(t)
    rep = is_string_c_group(red, limit)
    return ReductionResult(True, reason, red, rep.is_string_c_group, rep.group_order == t.order())


@dataclass(frozen=True)
class MergeResult:
    merged: GeneratorTuple
    via_dual: bool
    valid: bool  # string C-group generating the full symmetric group


def inverse_merge(t: GeneratorTuple, limit: int = DEFAULT_INTERSECTION_LIMIT) -> MergeResult:
    """Merge a leading transposition back into the third generator.

    ``(s0, s1, s2, s3)`` with ``s0`` a transposition gives ``(s1, s0 s2, s3)``.
    If only the last generator is a transposition the dual is merged instead.
    """
    if t.rank != 4:
        raise ValueError(f"inverse_merge needs rank 4, got {t.rank}")
    ok, bad = is_string(t)
    if not ok:
        raise NotStringError(f"generators {bad[0]} and {bad[1]} do not commute")
    via_dual = False
    if not t.gens[0].is_transposition():
        if not t.gens[-1].is_transposition():
            raise NotApplicable("neither end generator is a transposition")
        t = dual(t)
        via_dual = True
    s0, s1, s2, s3 = t.gens
    merged = GeneratorTuple(t.degree, (s1, s0 * s2, s3), 0)
    rep = is_string_c_group(merged, limit)
    valid = rep.is_string_c_group and rep.group_order == math.factorial(t.degree)
    return MergeResult(merged, via_dual, valid)


def split(t: GeneratorTuple, transposition: Permutation) -> GeneratorTuple:
    """Inverse of the merge: ``(g0, g1, g2) -> (tau, g0, tau g1, g2)``."""
    if t.rank != 3:
        raise ValueError("split needs a rank-3 tuple")
    g0, g1, g2 = t.gens
    return GeneratorTuple(t.degree, (transposition, g0, transposition * g1, g2), -1)


def merge_raw_valid(raw: tuple, n: int, limit: int = DEFAULT_INTERSECTION_LIMIT) -> bool:
    """Merge validity for a raw rank-4 tuple whose first generator is a transposition."""
    s0, s1, s2, s3 = raw
    t = GeneratorTuple._from_raw((s1, _mul(s0, s2), s3))
    rep = is_string_c_group(t, limit)
    return rep.is_string_c_group and rep.group_order == math.factorial(n)
