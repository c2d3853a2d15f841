"""Generator tuples of involutions: string property, duality, the
intersection property and sesqui-extensions."""

from __future__ import annotations

import json
import math
import threading
from dataclasses import dataclass
from typing import Iterable, Sequence

from .perm import (
    DEFAULT_INTERSECTION_LIMIT,
    DegreeMismatch,
    Permutation,
    StabilizerChain,
    _mul,
    _order,
    _is_symmetric_raw,
    _orbits_raw,
    intersection_order,
)


class NotStringError(ValueError):
    pass


@dataclass(frozen=True)
class GeneratorTuple:
    """An ordered tuple of involutions ``(rho_offset, ..., rho_{offset+r-1})``."""

    degree: int
    gens: tuple
    offset: int = 0

    def __post_init__(self):
        gens = tuple(self.gens)
        object.__setattr__(self, "gens", gens)
        for i, g in enumerate(gens):
            if not isinstance(g, Permutation):
                raise TypeError(f"generator {i} is not a Permutation")
            if g.degree != self.degree:
                raise DegreeMismatch(f"generator {i} has degree {g.degree}, expected {self.degree}")
            if not g.is_involution():
                raise ValueError(f"generator {i} ({g!r}) is not a non-identity involution")

    @classmethod
    def from_cycles(cls, cycles: Sequence[Sequence[Sequence[int]]], n: int, offset: int = 0) -> "GeneratorTuple":
        return cls(n, tuple(Permutation.from_cycles(c, n) for c in cycles), offset)

    @classmethod
    def _from_raw(cls, raw: Sequence[tuple], offset: int = 0) -> "GeneratorTuple":
        n = len(raw[0]) if raw else 0
        return cls(n, tuple(Permutation._raw(tuple(g)) for g in raw), offset)

    @property
    def rank(self) -> int:
        return len(self.gens)

    @property
    def labels(self) -> range:
        return range(self.offset, self.offset + self.rank)

    def gen(self, label: int) -> Permutation:
        """Generator by its label, e.g. ``t.gen(-1)`` on an augmented tuple."""
        if label not in self.labels:
            raise KeyError(f"label {label} outside {self.offset}..{self.offset + self.rank - 1}")
        return self.gens[label - self.offset]

    @property
    def raw(self) -> tuple:
        return tuple(g._img for g in self.gens)

    def chain(self) -> StabilizerChain:
        return StabilizerChain(self.gens, self.degree)

    def order(self) -> int:
        return self.chain().order()

    def orbits(self) -> list:
        return [tuple(x + 1 for x in o) for o in _orbits_raw(self.raw, self.degree)]

    def to_record(self) -> dict:
        return {
            "n": self.degree,
            "rank": self.rank,
            "offset": self.offset,
            "generators": [list(g.images) for g in self.gens],
        }

    @classmethod
    def from_record(cls, rec: dict) -> "GeneratorTuple":
        try:
            n = int(rec["n"])
            gens = rec["generators"]
            rank = int(rec.get("rank", len(gens)))
            offset = int(rec.get("offset", 0))
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"malformed representation record: {exc}") from exc
        if rank != len(gens):
            raise ValueError(f"rank {rank} does not match {len(gens)} generators")
        perms = []
        for g in gens:
            if len(g) != n:
                raise ValueError(f"generator of length {len(g)} in a degree-{n} record")
            perms.append(Permutation(g))
        return cls(n, tuple(perms), offset)

    def to_json(self) -> str:
        return dumps_record(self.to_record())

    @classmethod
    def from_json(cls, text: str) -> "GeneratorTuple":
        return cls.from_record(json.loads(text))

    def __repr__(self) -> str:
        gens = ", ".join(repr(g) for g in self.gens)
        off = f", offset={self.offset}" if self.offset else ""
        return f"GeneratorTuple(n={self.degree}, [{gens}]{off})"


def dumps_record(rec: dict) -> str:
    """Canonical single-line JSON for a representation record."""
    ordered = {k: rec[k] for k in ("n", "rank", "offset", "generators") if k in rec}
    ordered.update({k: v for k, v in rec.items() if k not in ordered})
    return json.dumps(ordered, separators=(", ", ": "))


# -- string property ----------------------------------------------------------


def _string_violation(raw: Sequence[tuple]):
    r = len(raw)
    for i in range(r):
        for j in range(i + 2, r):
            if _mul(raw[i], raw[j]) != _mul(raw[j], raw[i]):
                return (i, j)
    return None


def is_string(t: GeneratorTuple):
    """Return ``(ok, witness)``; the witness is the first non-commuting pair of
    labels at distance >= 2."""
    bad = _string_violation(t.raw)
    if bad is None:
        return True, None
    return False, (bad[0] + t.offset, bad[1] + t.offset)


@dataclass(frozen=True)
class SchlafliType:
    entries: tuple

    def __iter__(self):
        return iter(self.entries)

    def __str__(self) -> str:
        return "{" + ",".join(map(str, self.entries)) + "}"


def schlafli(t: GeneratorTuple) -> SchlafliType:
    ok, bad = is_string(t)
    if not ok:
        raise NotStringError(f"generators {bad[0]} and {bad[1]} do not commute")
    raw = t.raw
    return SchlafliType(tuple(_order(_mul(raw[i], raw[i + 1])) for i in range(len(raw) - 1)))


def dual(t: GeneratorTuple) -> GeneratorTuple:
    return GeneratorTuple(t.degree, tuple(reversed(t.gens)), t.offset)


def subtuple(t: GeneratorTuple, keep: Iterable[int]) -> GeneratorTuple:
    """Restrict to the generators whose labels are in ``keep`` (order preserved).

    The result's offset is the smallest kept label, so a contiguous selection
    keeps its labels.
    """
    keep = sorted(set(keep))
    if not keep:
        raise ValueError("keep must be nonempty")
    for k in keep:
        if k not in t.labels:
            raise KeyError(f"label {k} outside {t.offset}..{t.offset + t.rank - 1}")
    return GeneratorTuple(t.degree, tuple(t.gen(k) for k in keep), keep[0])


# -- intersection property ------------------------------------------------------


@dataclass(frozen=True)
class CheckReport:
    string_ok: bool
    ip_ok: bool
    group_order: int
    is_full_symmetric: bool
    failure_witness: dict | None = None

    @property
    def is_string_c_group(self) -> bool:
        return self.string_ok and self.ip_ok

    def to_dict(self) -> dict:
        return {
            "string_ok": self.string_ok,
            "ip_ok": self.ip_ok,
            "group_order": self.group_order,
            "is_full_symmetric": self.is_full_symmetric,
            "failure_witness": self.failure_witness,
        }


class _IPMemo:
    """Memo of intersection-property verdicts keyed by the raw generator tuple.

    Inserts are idempotent, so concurrent writers can only race to store the
    same value.
    """

    def __init__(self, maxsize: int = 1 << 18):
        self._data: dict = {}
        self._lock = threading.Lock()
        self.maxsize = maxsize

    def get(self, key):
        return self._data.get(key)

    def put(self, key, value) -> None:
        with self._lock:
            if len(self._data) >= self.maxsize:
                self._data.clear()
            self._data.setdefault(key, value)

    def clear(self) -> None:
        with self._lock:
            self._data.clear()


_memo = _IPMemo()


def clear_memo() -> None:
    _memo.clear()
    _chains.clear()


def _ip_raw(raw: tuple, limit: int, lo: int = 0):
    """Facet recursion for an sggi; returns ``(ok, witness)``.

    ``lo`` is the position of ``raw[0]`` in the outermost tuple, used only to
    phrase witnesses.
    """
    r = len(raw)
    if r <= 1:
        return True, None
    if r == 2:
        if raw[0] == raw[1]:
            return False, {"kind": "dihedral", "positions": [lo, lo + 1]}
        return True, None
    hit = _memo.get(raw)
    if hit is not None:
        ok, wit = hit
        if wit is not None:
            wit = _shift_witness(wit, lo)
        return ok, wit
    result = _ip_uncached(raw, limit)
    _memo.put(raw, result)
    ok, wit = result
    return ok, (_shift_witness(wit, lo) if wit is not None else None)


def _shift_witness(wit: dict, lo: int) -> dict:
    out = dict(wit)
    for key in ("positions", "I", "J"):
        if key in out:
            out[key] = [p + lo for p in out[key]]
    return out


def _dihedral_elements(a: tuple, b: tuple) -> set:
    """All elements of <a, b> for involutions a, b: powers of ab and their products with a."""
    c = _mul(a, b)
    ident = tuple(range(len(a)))
    out = {ident, a}
    x = c
    while x != ident:
        out.add(x)
        out.add(_mul(x, a))
        x = _mul(x, c)
    return out


class _ChainCache:
    """Bounded cache of stabilizer chains for facet subgroups seen repeatedly."""

    def __init__(self, maxsize: int = 1 << 14):
        self._data: dict = {}
        self.maxsize = maxsize

    def get(self, raw: tuple) -> StabilizerChain:
        ch = self._data.get(raw)
        if ch is None:
            if len(self._data) >= self.maxsize:
                self._data.clear()
            ch = StabilizerChain._from_raw(raw, len(raw[0]))
            self._data[raw] = ch
        return ch

    def clear(self) -> None:
        self._data.clear()


_chains = _ChainCache()


def _ip_uncached(raw: tuple, limit: int):
    r = len(raw)
    ok, wit = _ip_raw(raw[1:], limit, 1)
    if not ok:
        return ok, wit
    ok, wit = _ip_raw(raw[:-1], limit, 0)
    if not ok:
        return ok, wit
    if r == 3:
        # <rho_0, rho_1> & <rho_1, rho_2> = <rho_1>, both sides dihedral
        left = _dihedral_elements(raw[0], raw[1])
        right = _dihedral_elements(raw[1], raw[2])
        inter = len(left & right)
        target = 2
    else:
        if r == 4:
            target = 2 * _order(_mul(raw[1], raw[2]))
        else:
            target = _chains.get(raw[1:-1]).order()
        g0 = _chains.get(raw[1:])
        glast = _chains.get(raw[:-1])
        # [G_0 & G_last : middle] divides both indices
        if math.gcd(g0.order() // target, glast.order() // target) == 1:
            return True, None
        inter = intersection_order(g0, glast, limit=limit, target=target)
    if inter == target:
        return True, None
    return False, {
        "kind": "intersection",
        "I": list(range(1, r)),
        "J": list(range(0, r - 1)),
        # the walk stops once the count passes the target, so this is a lower bound
        "intersection_order_at_least": inter,
        "expected_order": target,
    }


def ip_holds(t: GeneratorTuple, limit: int = DEFAULT_INTERSECTION_LIMIT) -> bool:
    """Intersection property by facet recursion; assumes the string property."""
    return _ip_raw(t.raw, limit)[0]


def is_string_c_group(t: GeneratorTuple, limit: int = DEFAULT_INTERSECTION_LIMIT) -> CheckReport:
    """Decide whether ``t`` is a string C-group representation.

    Raises :class:`IntersectionLimitExceeded` when some intersection would
    need a traversal larger than ``limit``.
    """
    n = t.degree
    chain = t.chain() if t.rank else None
    order = chain.order() if chain is not None else 1
    full = order == math.factorial(n) and n >= 1
    ok, bad = is_string(t)
    if not ok:
        return CheckReport(False, False, order, full, {"kind": "string", "labels": list(bad)})
    ok, wit = _ip_raw(t.raw, limit)
    if wit is not None:
        wit = _label_witness(wit, t.offset)
    return CheckReport(True, ok, order, full, wit)


def _label_witness(wit: dict, offset: int) -> dict:
    out = dict(wit)
    for key in ("positions", "I", "J"):
        if key in out:
            out[key] = [p + offset for p in out[key]]
    return out


def generates_full_symmetric(t: GeneratorTuple) -> bool:
    return _is_full_symmetric_raw(t.raw, t.degree)


def _is_full_symmetric_raw(raw: Sequence[tuple], n: int) -> bool:
    return _is_symmetric_raw(raw, n)


# -- sesqui-extensions -----------------------------------------------------------


def extend_degree(t: GeneratorTuple, n: int) -> GeneratorTuple:
    """The same generators acting on {1..n} with the new points fixed."""
    if n < t.degree:
        raise ValueError(f"cannot shrink degree {t.degree} to {n}")
    gens = tuple(Permutation._raw(g._img + tuple(range(t.degree, n))) for g in t.gens)
    return GeneratorTuple(n, gens, t.offset)


def sesqui_extension(t: GeneratorTuple, k: int, tau: Permutation) -> GeneratorTuple:
    """Multiply ``tau`` onto the generator at position ``k`` (0-based).

    ``tau`` must be an involution of the same degree that commutes with every
    generator and does not lie in the group they generate.
    """
    if tau.degree != t.degree:
        raise DegreeMismatch(f"tau has degree {tau.degree}, tuple has {t.degree}")
    if not tau.is_involution():
        raise ValueError("tau must be a non-identity involution")
    if not 0 <= k < t.rank:
        raise IndexError(f"position {k} outside 0..{t.rank - 1}")
    for i, g in enumerate(t.gens):
        if not g.commutes_with(tau):
            raise ValueError(f"tau does not commute with generator {i}")
    if t.chain().contains(tau):
        raise ValueError("tau lies in the group generated by the tuple")
    gens = list(t.gens)
    gens[k] = gens[k] * tau
    return GeneratorTuple(t.degree, tuple(gens), t.offset)
