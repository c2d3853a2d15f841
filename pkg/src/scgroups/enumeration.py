"""Enumeration of rank 3 and rank 4 string C-group representations of S_n.

Representations are counted up to conjugacy in S_n (labelled CPR graph
isomorphism) and, by default, duality.  One generator position runs over
involution class representatives; everything else is exhaustive and the
remaining duplicates are removed by canonical keys.
"""

from __future__ import annotations

import json
import logging
import math
import os
import sys
import time
from dataclasses import dataclass, field
from functools import lru_cache
from multiprocessing import get_context
from typing import Iterable

import numpy as np

from .cpr import canonical_key_raw, raw_from_key
from .perm import (
    DEFAULT_INTERSECTION_LIMIT,
    IntersectionLimitExceeded,
    Permutation,
    StabilizerChain,
    _inv,
    _is_symmetric_raw,
    _mul,
    _order,
    _orbits_raw,
)
from .rrt import merge_raw_valid
from .sggi import GeneratorTuple, _dihedral_elements, _ip_raw, dumps_record, is_string_c_group, schlafli

log = logging.getLogger(__name__)

DEDUP_ISO = "iso"
DEDUP_DUAL = "iso+duality"


class EnumerationAborted(RuntimeError):
    """A candidate needed an intersection walk larger than the configured limit."""

    def __init__(self, raw: tuple, size: int, limit: int):
        self.tuple = GeneratorTuple._from_raw(raw)
        super().__init__(f"intersection walk of size {size} exceeds limit {limit} at {self.tuple!r}")


@dataclass(frozen=True)
class EnumConfig:
    n: int
    rank: int
    dedup: str = DEDUP_DUAL
    jobs: int = 1
    intersection_limit: int = DEFAULT_INTERSECTION_LIMIT
    include_s6_outer: bool = True
    # conjugates the class representatives; results must not depend on it
    conjugator: tuple | None = None
    progress: bool = False
    checkpoint: str | None = None

    def __post_init__(self):
        if self.rank not in (3, 4):
            raise ValueError(f"rank must be 3 or 4, got {self.rank}")
        if self.n < 3:
            raise ValueError(f"n must be at least 3, got {self.n}")
        if self.n > 255:
            raise ValueError("degrees above 255 are not supported")
        if self.dedup not in (DEDUP_ISO, DEDUP_DUAL):
            raise ValueError(f"unknown dedup mode {self.dedup!r}")
        if self.jobs < 1:
            raise ValueError("jobs must be positive")


# -- involutions ------------------------------------------------------------------


@lru_cache(maxsize=None)
def _involutions_raw(n: int) -> tuple:
    out = []
    img = [None] * n

    def rec():
        try:
            a = img.index(None)
        except ValueError:
            t = tuple(img)
            if any(t[i] != i for i in range(n)):
                out.append(t)
            return
        img[a] = a
        rec()
        for b in range(a + 1, n):
            if img[b] is None:
                img[a], img[b] = b, a
                rec()
                img[b] = None
        img[a] = None

    rec()
    return tuple(sorted(out))


def involutions(n: int) -> list:
    """All involutions of S_n in lexicographic order of their image lists."""
    return [Permutation._raw(g) for g in _involutions_raw(n)]


def involution_class_reps(n: int) -> list:
    """``(1,2)``, ``(1,2)(3,4)``, ... one per conjugacy class of involutions."""
    if n < 2:
        raise ValueError("n must be at least 2")
    return [Permutation.from_cycles([(2 * i + 1, 2 * i + 2) for i in range(k)], n) for k in range(1, n // 2 + 1)]


@lru_cache(maxsize=4)
def _commute_matrix(n: int) -> np.ndarray:
    """``M[i, j]`` is true when involutions i and j commute (diagonal included)."""
    inv = np.array(_involutions_raw(n), dtype=np.int16)
    m = len(inv)
    out = np.zeros((m, m), dtype=bool)
    step = max(1, 4_000_000 // (m * n + 1))
    for lo in range(0, m, step):
        a = inv[lo : lo + step]
        # (a*b)[x] = b[a[x]] and (b*a)[x] = a[b[x]]
        ab = inv[:, a].transpose(1, 0, 2)
        ba = a[:, inv]
        out[lo : lo + step] = (ab == ba).all(axis=2)
    return out


# -- S_6 outer automorphism --------------------------------------------------------


@lru_cache(maxsize=1)
def s6_outer_automorphism() -> dict:
    """An automorphism of S_6 sending transpositions to triple transpositions.

    S_6 acts on the six right cosets of a transitive subgroup isomorphic to
    S_5; that action is not conjugate to the natural one.  The subgroup is
    found by search from ``<(1,2,3,4,5), y>``.  Returns a dict on raw
    0-based image tuples covering all 720 elements.
    """
    import itertools

    n = 6
    x = (1, 2, 3, 4, 0, 5)
    elems = sorted(itertools.permutations(range(n)))
    H = None
    for y in elems:
        gens = [x, y]
        if len(_orbits_raw(gens, n)) != 1:
            continue
        ch = StabilizerChain._from_raw(gens, n)
        if ch.order() == 120:
            H = {tuple(int(v) for v in row) for blk in ch._element_blocks() for row in blk}
            break
    assert H is not None
    coset_of = {}
    reps = []
    for g in elems:
        if g in coset_of:
            continue
        idx = len(reps)
        reps.append(g)
        for h in H:
            coset_of[_mul(h, g)] = idx
    return {g: tuple(coset_of[_mul(c, g)] for c in reps) for g in elems}


def _apply_outer(raw: tuple) -> tuple:
    phi = s6_outer_automorphism()
    return tuple(phi[g] for g in raw)


# -- keys ------------------------------------------------------------------------------


def combined_key(raw: tuple, n: int, dedup: str = DEDUP_DUAL, include_s6_outer: bool = True) -> bytes:
    variants = [raw]
    if n == 6 and include_s6_outer:
        variants.append(_apply_outer(raw))
    if dedup == DEDUP_DUAL:
        variants += [v[::-1] for v in variants]
    return min(canonical_key_raw(v, n) for v in variants)


# -- search kernels ----------------------------------------------------------------------


class _Context:
    def __init__(self, n: int, rank: int, limit: int, conjugator: tuple | None):
        self.n = n
        self.rank = rank
        self.limit = limit
        self.inv = _involutions_raw(n)
        self.index = {g: i for i, g in enumerate(self.inv)}
        self.comm = _commute_matrix(n)
        reps = [tuple(x - 1 for x in p.images) for p in involution_class_reps(n)]
        if conjugator is not None:
            c, ci = conjugator, _inv(conjugator)
            reps = [_mul(_mul(ci, r), c) for r in reps]
        self.reps = [self.index[r] for r in reps]

    def items(self) -> list:
        out = []
        for ri, r in enumerate(self.reps):
            if self.rank == 3:
                # rho_0 must not commute with rho_1, else it is central
                out += [(ri, j) for j in np.nonzero(~self.comm[r])[0].tolist()]
            else:
                out += [(ri, j) for j in np.nonzero(self.comm[r])[0].tolist() if j != r]
        return out


_CTX: _Context | None = None


def _init_worker(n: int, rank: int, limit: int, conjugator) -> None:
    global _CTX
    _CTX = _Context(n, rank, limit, conjugator)


def _transitive_with(labels: list, k: int, g: tuple) -> bool:
    """Does adding ``g`` to a group with orbit labels ``labels`` (k orbits) connect them?"""
    if k == 1:
        return True
    parent = list(range(k))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    comps = k
    for x, y in enumerate(g):
        a, b = find(labels[x]), find(labels[y])
        if a != b:
            parent[a] = b
            comps -= 1
            if comps == 1:
                return True
    return False


def _orbit_labels(gens, n: int):
    orbs = _orbits_raw(gens, n)
    lab = [0] * n
    for i, o in enumerate(orbs):
        for x in o:
            lab[x] = i
    return lab, len(orbs)


def _rank3_item(item) -> list:
    """Valid triples with rho_1 = reps[ri] and rho_0 = inv[j]."""
    ctx = _CTX
    n, inv, comm = ctx.n, ctx.inv, ctx.comm
    r1i = ctx.reps[item[0]]
    r0i = item[1]
    r1, r0 = inv[r1i], inv[r0i]
    lab, k = _orbit_labels((r0, r1), n)
    left = None
    found = []
    # rho_2 commutes with rho_0 and not with rho_1 (else it is central)
    for r2i in np.nonzero(comm[r0i] & ~comm[r1i])[0].tolist():
        r2 = inv[r2i]
        if not _transitive_with(lab, k, r2):
            continue
        g = (r0, r1, r2)
        if not _is_symmetric_raw(g, n):
            continue
        if left is None:
            left = _dihedral_elements(r0, r1)
        if len(left & _dihedral_elements(r1, r2)) == 2:
            found.append(g)
    return found


class _LFacet:
    """Data for the vertex-figure subgroup <rho_1, rho_2, rho_3>, built once per pair."""

    __slots__ = ("ok", "elements", "order", "mid")

    def __init__(self, r1, r2, r3, n, limit):
        self.ok = _ip_raw((r1, r2, r3), limit)[0]
        if not self.ok:
            return
        ch = StabilizerChain._from_raw((r1, r2, r3), n)
        self.order = ch.order()
        if self.order == math.factorial(n):
            # the facet would then equal the middle subgroup
            self.ok = False
            return
        if self.order > limit:
            raise IntersectionLimitExceeded(self.order, limit)
        self.elements = np.concatenate(list(ch._element_blocks()))
        self.mid = 2 * _order(_mul(r1, r2))


def _rank4_ip(L: _LFacet, r0, r1, r2, n: int, limit: int) -> bool:
    """Whether <rho_1,rho_2,rho_3> & <rho_0,rho_1,rho_2> = <rho_1,rho_2>, given both facets are fine."""
    lab, k = _orbit_labels((r0, r1, r2), n)
    E = L.elements
    if k > 1:
        lab = np.array(lab, dtype=np.int16)
        E = E[(lab[E] == lab).all(axis=1)]
    if len(E) == L.mid:
        return True
    K = StabilizerChain._from_raw((r0, r1, r2), n)
    if math.gcd(L.order // L.mid, K.order() // L.mid) == 1:
        return True
    return int(K._contains_batch(E).sum()) == L.mid


def _rank4_item(item) -> list:
    """Valid quadruples with rho_3 = reps[ri] and rho_1 = inv[j]."""
    ctx = _CTX
    n, inv, comm, limit = ctx.n, ctx.inv, ctx.comm, ctx.limit
    r3i = ctx.reps[item[0]]
    r1i = item[1]
    r3, r1 = inv[r3i], inv[r1i]
    found = []
    # rho_2 commuting with rho_3 makes rho_3 central, commuting with rho_1
    # splits the group as a direct product
    for r2i in np.nonzero(~comm[r3i] & ~comm[r1i])[0].tolist():
        r2 = inv[r2i]
        cands = np.nonzero(comm[r3i] & comm[r2i] & ~comm[r1i])[0].tolist()
        if not cands:
            continue
        lab, k = _orbit_labels((r1, r2, r3), n)
        L = None
        right = _dihedral_elements(r1, r2)
        for r0i in cands:
            r0 = inv[r0i]
            if not _transitive_with(lab, k, r0):
                continue
            if L is None:
                try:
                    L = _LFacet(r1, r2, r3, n, limit)
                except IntersectionLimitExceeded as e:
                    raise EnumerationAborted((r0, r1, r2, r3), e.size, e.limit) from None
                if not L.ok:
                    break
            if len(_dihedral_elements(r0, r1) & right) != 2:
                continue
            g = (r0, r1, r2, r3)
            if not _is_symmetric_raw(g, n):
                continue
            if _rank4_ip(L, r0, r1, r2, n, limit):
                found.append(g)
    return found


def _run_item(item) -> tuple:
    fn = _rank3_item if _CTX.rank == 3 else _rank4_item
    return item, fn(item)


# -- database ------------------------------------------------------------------------------


@dataclass
class RepEntry:
    rep: GeneratorTuple
    schlafli: tuple
    # rank 4 only: number of non-isomorphic orientations (the rep and its
    # dual, once if self-dual) that the reduction applies to with a valid result
    rrt: int | None = None
    self_dual: bool | None = None
    merge: bool | None = None  # some end transposition merges into a valid rank 3 rep
    via_dual: bool | None = None


@dataclass
class RepDatabase:
    n: int
    rank: int
    dedup: str
    include_s6_outer: bool
    entries: dict = field(default_factory=dict)  # key -> RepEntry

    def __len__(self) -> int:
        return len(self.entries)

    def keys(self) -> list:
        return sorted(self.entries)

    def add_raw(self, raw: tuple) -> bool:
        key = combined_key(raw, self.n, self.dedup, self.include_s6_outer)
        if key in self.entries:
            return False
        rep = GeneratorTuple._from_raw(raw_from_key(key))
        self.entries[key] = RepEntry(rep, tuple(schlafli(rep)))
        return True

    def reps(self) -> list:
        return [self.entries[k].rep for k in self.keys()]

    def annotate(self, limit: int = DEFAULT_INTERSECTION_LIMIT) -> None:
        """Fill in reduction and merge metadata for rank 4 entries."""
        if self.rank != 4:
            return
        from .rrt import reduce_and_verify

        for key in self.keys():
            e = self.entries[key]
            if e.rrt is not None:
                continue
            t = e.rep
            e.self_dual = combined_key(t.raw, self.n, DEDUP_ISO, self.include_s6_outer) == combined_key(
                t.raw[::-1], self.n, DEDUP_ISO, self.include_s6_outer
            )
            e.rrt = 0
            for s in (t,) if e.self_dual else (t, _dual(t)):
                res = reduce_and_verify(s, limit)
                if res.applicable and res.is_string_c_group and res.same_order:
                    e.rrt += 1
            e.merge = False
            e.via_dual = None
            for via_dual, s in ((False, t), (True, _dual(t))):
                if s.gens[0].is_transposition() and merge_raw_valid(s.raw, s.degree, limit):
                    e.merge = True
                    e.via_dual = via_dual
                    break

    def to_jsonl(self) -> str:
        meta = {
            "type": "metadata",
            "n": self.n,
            "rank": self.rank,
            "dedup": self.dedup,
            "include_s6_outer": self.include_s6_outer,
            "count": len(self),
        }
        lines = [json.dumps(meta, sort_keys=False, separators=(",", ":"))]
        for key in self.keys():
            e = self.entries[key]
            rec = e.rep.to_record()
            rec["key"] = key.hex()
            rec["schlafli"] = list(e.schlafli)
            if e.rrt is not None:
                rec["self_dual"] = e.self_dual
                rec["rrt"] = e.rrt
                rec["merge"] = e.merge
            lines.append(dumps_record(rec))
        return "\n".join(lines) + "\n"


def _dual(t: GeneratorTuple) -> GeneratorTuple:
    return GeneratorTuple(t.degree, t.gens[::-1], 0)


# -- drivers --------------------------------------------------------------------------------


def _load_checkpoint(path: str) -> tuple:
    done = set()
    raws = []
    if not path or not os.path.exists(path):
        return done, raws
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError:
                break  # torn final line from an interrupted run
            done.add(tuple(rec["item"]))
            raws += [tuple(tuple(g) for g in r) for r in rec["found"]]
    return done, raws


def _enumerate(cfg: EnumConfig) -> RepDatabase:
    ctx = _Context(cfg.n, cfg.rank, cfg.intersection_limit, cfg.conjugator)
    items = ctx.items()
    db = RepDatabase(cfg.n, cfg.rank, cfg.dedup, cfg.include_s6_outer)
    done, raws = _load_checkpoint(cfg.checkpoint)
    todo = [it for it in items if it not in done]
    results: dict = {}
    ckpt = open(cfg.checkpoint, "a") if cfg.checkpoint else None
    t0 = time.time()
    try:
        if cfg.jobs == 1:
            global _CTX
            _CTX = ctx
            stream = map(_run_item, todo)
            pool = None
        else:
            pool = get_context("fork" if sys.platform != "win32" else "spawn").Pool(
                cfg.jobs,
                initializer=_init_worker,
                initargs=(cfg.n, cfg.rank, cfg.intersection_limit, cfg.conjugator),
            )
            stream = pool.imap_unordered(_run_item, todo, chunksize=max(1, len(todo) // (cfg.jobs * 64)))
        for count, (item, found) in enumerate(stream, start=1):
            results[item] = found
            if ckpt:
                ckpt.write(json.dumps({"item": list(item), "found": [list(map(list, g)) for g in found]}) + "\n")
                ckpt.flush()
            if cfg.progress and (count % 50 == 0 or count == len(todo)):
                print(
                    f"[n={cfg.n} rank={cfg.rank}] {count}/{len(todo)} work items, {time.time() - t0:.0f}s",
                    file=sys.stderr,
                )
        if pool is not None:
            pool.close()
            pool.join()
    except BaseException:
        if cfg.jobs > 1 and pool is not None:
            pool.terminate()
        raise
    finally:
        if ckpt:
            ckpt.close()
    for raw in raws:
        db.add_raw(raw)
    # merge in item order so representatives never depend on scheduling
    for item in sorted(results):
        for raw in results[item]:
            db.add_raw(raw)
    return db


def enumerate_rank3(cfg: EnumConfig) -> RepDatabase:
    if cfg.rank != 3:
        raise ValueError("enumerate_rank3 needs rank 3")
    return _enumerate(cfg)


def enumerate_rank4(cfg: EnumConfig) -> RepDatabase:
    if cfg.rank != 4:
        raise ValueError("enumerate_rank4 needs rank 4")
    db = _enumerate(cfg)
    db.annotate(cfg.intersection_limit)
    return db


def enumerate_reps(cfg: EnumConfig) -> RepDatabase:
    return enumerate_rank3(cfg) if cfg.rank == 3 else enumerate_rank4(cfg)


def brute_force(n: int, rank: int, dedup: str = DEDUP_DUAL, include_s6_outer: bool = True) -> RepDatabase:
    """Every involution tuple, no symmetry or pruning beyond the string property.

    Only practical for n <= 5 at rank 4 and n <= 6 at rank 3.
    """
    import itertools

    inv = _involutions_raw(n)
    comm = _commute_matrix(n)
    fact = math.factorial(n)
    db = RepDatabase(n, rank, dedup, include_s6_outer)
    for idx in itertools.product(range(len(inv)), repeat=rank):
        if any(not comm[idx[i], idx[j]] for i in range(rank) for j in range(i + 2, rank)):
            continue
        raw = tuple(inv[i] for i in idx)
        if StabilizerChain._from_raw(raw, n).order() != fact:
            continue
        if is_string_c_group(GeneratorTuple._from_raw(raw)).is_string_c_group:
            db.add_raw(raw)
    if rank == 4:
        db.annotate()
    return db


@dataclass(frozen=True)
class Table1Row:
    n: int
    rk3: int
    rk4: int
    rrt: int
    rat: int

    def as_tuple(self) -> tuple:
        return (self.rk3, self.rk4, self.rrt, self.rat)


def table1_row(n: int, jobs: int = 1, limit: int = DEFAULT_INTERSECTION_LIMIT, include_s6_outer: bool = True,
               progress: bool = False) -> tuple:
    """Returns ``(row, rank3 db, rank4 db)``."""
    c3 = EnumConfig(n, 3, jobs=jobs, intersection_limit=limit, include_s6_outer=include_s6_outer, progress=progress)
    c4 = EnumConfig(n, 4, jobs=jobs, intersection_limit=limit, include_s6_outer=include_s6_outer, progress=progress)
    d3 = enumerate_rank3(c3)
    d4 = enumerate_rank4(c4)
    rrt = sum(e.rrt for e in d4.entries.values())
    rat = sum(1 for e in d4.entries.values() if e.merge)
    return Table1Row(n, len(d3), len(d4), rrt, rat), d3, d4


def table1(n_from: int, n_to: int, cfg: EnumConfig | None = None) -> list:
    if not 5 <= n_from <= n_to:
        raise ValueError("need 5 <= n_from <= n_to")
    jobs = cfg.jobs if cfg else 1
    limit = cfg.intersection_limit if cfg else DEFAULT_INTERSECTION_LIMIT
    outer = cfg.include_s6_outer if cfg else True
    progress = cfg.progress if cfg else False
    return [table1_row(n, jobs, limit, outer, progress)[0] for n in range(n_from, n_to + 1)]


def format_table(rows: Iterable[Table1Row]) -> str:
    lines = [f"{'G':<6}{'Rk 3':>6}{'Rk 4':>6}{'RRT':>6}{'RAT':>6}"]
    for r in rows:
        lines.append(f"{'S_' + str(r.n):<6}{r.rk3:>6}{r.rk4:>6}{r.rrt:>6}{r.rat:>6}")
    return "\n".join(lines) + "\n"
