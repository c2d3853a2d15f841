"""Permutations and permutation-group algorithms.

Points are 1-based in every public signature.  Internally a permutation is
a tuple of 0-based images, and composition is left-to-right: ``p * q`` maps
``x`` to ``q(p(x))``.

Group machinery (stabilizer chains, intersection orders, block systems) works
on lists of :class:`Permutation` but the hot loops run on the raw tuples.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np

DEFAULT_INTERSECTION_LIMIT = 10**7


class DegreeMismatch(ValueError):
    pass


class IntersectionLimitExceeded(RuntimeError):
    """The smaller group is larger than the traversal budget."""

    def __init__(self, size: int, limit: int):
        super().__init__(f"smaller group has order {size} > limit {limit}")
        self.size = size
        self.limit = limit


class Permutation:
    """A bijection of {1..n}, stored as 0-based images."""

    __slots__ = ("_img", "_hash")

    def __init__(self, images: Iterable[int]):
        img = tuple(int(x) - 1 for x in images)
        if sorted(img) != list(range(len(img))):
            raise ValueError(f"not a permutation of 1..{len(img)}: {images!r}")
        self._img = img
        self._hash = None

    @classmethod
    def _raw(cls, img: tuple) -> "Permutation":
        p = object.__new__(cls)
        p._img = img
        p._hash = None
        return p

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls._raw(tuple(range(n)))

    @classmethod
    def from_cycles(cls, cycles: Iterable[Sequence[int]], n: int) -> "Permutation":
        img = list(range(n))
        seen = set()
        for cyc in cycles:
            for x in cyc:
                if not 1 <= x <= n:
                    raise ValueError(f"point {x} outside 1..{n}")
                if x in seen:
                    raise ValueError(f"point {x} appears in two cycles")
                seen.add(x)
            for a, b in zip(cyc, list(cyc[1:]) + [cyc[0]]):
                img[a - 1] = b - 1
        return cls._raw(tuple(img))

    @classmethod
    def transposition(cls, a: int, b: int, n: int) -> "Permutation":
        return cls.from_cycles([(a, b)], n)

    @property
    def degree(self) -> int:
        return len(self._img)

    @property
    def images(self) -> tuple:
        return tuple(x + 1 for x in self._img)

    def __call__(self, x: int) -> int:
        return self._img[x - 1] + 1

    def __mul__(self, other: "Permutation") -> "Permutation":
        return compose(self, other)

    def __pow__(self, k: int) -> "Permutation":
        if k < 0:
            return self.inverse() ** (-k)
        result = Permutation.identity(self.degree)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def inverse(self) -> "Permutation":
        return Permutation._raw(_inv(self._img))

    def is_identity(self) -> bool:
        return all(i == x for i, x in enumerate(self._img))

    def is_involution(self) -> bool:
        """True for non-identity elements of order 2."""
        img = self._img
        moved = False
        for i, x in enumerate(img):
            if img[x] != i:
                return False
            if x != i:
                moved = True
        return moved

    def is_transposition(self) -> bool:
        return len(self.support()) == 2

    def support(self) -> tuple:
        return tuple(i + 1 for i, x in enumerate(self._img) if x != i)

    def cycles(self, include_fixed: bool = False) -> list:
        out = []
        seen = [False] * len(self._img)
        for i in range(len(self._img)):
            if seen[i]:
                continue
            cyc = []
            j = i
            while not seen[j]:
                seen[j] = True
                cyc.append(j + 1)
                j = self._img[j]
            if len(cyc) > 1 or include_fixed:
                out.append(tuple(cyc))
        return out

    def order(self) -> int:
        return element_order(self)

    def parity(self) -> str:
        return parity(self)

    def commutes_with(self, other: "Permutation") -> bool:
        return _mul(self._img, other._img) == _mul(other._img, self._img)

    def __eq__(self, other) -> bool:
        return isinstance(other, Permutation) and self._img == other._img

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self._img)
        return self._hash

    def __lt__(self, other: "Permutation") -> bool:
        return self._img < other._img

    def __repr__(self) -> str:
        cyc = self.cycles()
        if not cyc:
            return f"Permutation.identity({self.degree})"
        return "".join("(" + ",".join(map(str, c)) + ")" for c in cyc)


# -- raw helpers (0-based tuples) -------------------------------------------


def _mul(a: tuple, b: tuple) -> tuple:
    return tuple([b[x] for x in a])


def _inv(a: tuple) -> tuple:
    out = [0] * len(a)
    for i, x in enumerate(a):
        out[x] = i
    return tuple(out)


def _is_id(a: tuple) -> bool:
    for i, x in enumerate(a):
        if i != x:
            return False
    return True


def _cycle_lengths(a: tuple) -> list:
    n = len(a)
    seen = [False] * n
    out = []
    for i in range(n):
        if not seen[i]:
            k = 0
            j = i
            while not seen[j]:
                seen[j] = True
                j = a[j]
                k += 1
            out.append(k)
    return out


def _order(a: tuple) -> int:
    m = 1
    for k in _cycle_lengths(a):
        m = m * k // math.gcd(m, k)
    return m


def _raw_gens(gens: Iterable[Permutation], n: int | None = None) -> list:
    out = []
    for g in gens:
        if n is not None and g.degree != n:
            raise DegreeMismatch(f"degree {g.degree} != {n}")
        out.append(g._img)
    return out


def _check_degrees(gens: Sequence[Permutation]) -> int | None:
    if not gens:
        return None
    n = gens[0].degree
    for g in gens:
        if g.degree != n:
            raise DegreeMismatch(f"degrees {n} and {g.degree} differ")
    return n


# -- elementwise operations -------------------------------------------------


def compose(p: Permutation, q: Permutation) -> Permutation:
    """Apply ``p`` first, then ``q``."""
    if p.degree != q.degree:
        raise DegreeMismatch(f"cannot compose degrees {p.degree} and {q.degree}")
    return Permutation._raw(_mul(p._img, q._img))


def element_order(p: Permutation) -> int:
    return _order(p._img)


def parity(p: Permutation) -> str:
    even_cycles = sum(1 for k in _cycle_lengths(p._img) if k % 2 == 0)
    return "odd" if even_cycles % 2 else "even"


# -- orbits -----------------------------------------------------------------


def _orbits_raw(gens: Sequence[tuple], n: int) -> list:
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for g in gens:
        for i, x in enumerate(g):
            if x != i:
                ri, rx = find(i), find(x)
                if ri != rx:
                    if ri < rx:
                        parent[rx] = ri
                    else:
                        parent[ri] = rx
    groups: dict = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return sorted(groups.values(), key=lambda c: c[0])


def orbits(gens: Sequence[Permutation], n: int) -> list:
    """Orbits of ``<gens>`` on {1..n}, each sorted, ordered by minimum."""
    raw = _raw_gens(gens, n)
    return [tuple(x + 1 for x in orb) for orb in _orbits_raw(raw, n)]


def is_transitive(gens: Sequence[Permutation], n: int) -> bool:
    return len(_orbits_raw(_raw_gens(gens, n), n)) == 1


# -- stabilizer chains ------------------------------------------------------


class _Level:
    __slots__ = ("base", "gens", "tinv", "trans", "checked")

    def __init__(self, base: int):
        self.base = base
        self.gens: list = []
        # point -> u^{-1}, where u maps base to point
        self.tinv: dict = {}
        self.trans: dict = {}
        self.checked: set = set()


class StabilizerChain:
    """Base and strong generating set built by deterministic Schreier-Sims.

    Base points are chosen as the smallest point moved by the element that
    forces a new level, so chains are reproducible.
    """

    def __init__(self, gens: Sequence[Permutation] = (), n: int | None = None):
        gens = list(gens)
        if n is None:
            n = _check_degrees(gens)
            if n is None:
                raise ValueError("degree required for an empty generating set")
        self.n = n
        self.generators = tuple(gens)
        self._levels: list = []
        self._build(_raw_gens(gens, n))

    @classmethod
    def _from_raw(cls, raw: Sequence[tuple], n: int) -> "StabilizerChain":
        self = object.__new__(cls)
        self.n = n
        self.generators = tuple(Permutation._raw(g) for g in raw)
        self._levels = []
        self._build(list(raw))
        return self

    # construction

    def _new_level(self, g: tuple) -> None:
        b = next(i for i, x in enumerate(g) if x != i)
        lv = _Level(b)
        ident = tuple(range(self.n))
        lv.tinv[b] = ident
        lv.trans[b] = ident
        self._levels.append(lv)

    def _add_gen(self, i: int, g: tuple) -> None:
        lv = self._levels[i]
        lv.gens.append(g)
        # extend the orbit of the base point
        queue = list(lv.trans)
        trans = lv.trans
        while queue:
            nxt = []
            for p in queue:
                u = trans[p]
                for s in lv.gens:
                    q = s[p]
                    if q not in trans:
                        w = _mul(u, s)
                        trans[q] = w
                        lv.tinv[q] = _inv(w)
                        nxt.append(q)
            queue = nxt

    def _sift_raw(self, g: tuple, start: int = 0):
        levels = self._levels
        for j in range(start, len(levels)):
            lv = levels[j]
            u = lv.tinv.get(g[lv.base])
            if u is None:
                return g, j
            g = _mul(g, u)
        return g, len(levels)

    def _build(self, gens: list) -> None:
        gens = [g for g in gens if not _is_id(g)]
        if not gens:
            return
        # initial base: every generator must move some base point
        for g in gens:
            if all(g[lv.base] == lv.base for lv in self._levels):
                self._new_level(g)
        for g in gens:
            for i, lv in enumerate(self._levels):
                self._add_gen(i, g)
                if g[lv.base] != lv.base:
                    break
        i = len(self._levels) - 1
        while i >= 0:
            lv = self._levels[i]
            restart = False
            for p in list(lv.trans):
                u = lv.trans[p]
                for si, s in enumerate(lv.gens):
                    if (p, si) in lv.checked:
                        continue
                    lv.checked.add((p, si))
                    q = s[p]
                    h = _mul(_mul(u, s), lv.tinv[q])
                    h, j = self._sift_raw(h, i + 1)
                    if _is_id(h):
                        continue
                    if j == len(self._levels):
                        self._new_level(h)
                    for l in range(i + 1, j + 1):
                        self._add_gen(l, h)
                    i = j
                    restart = True
                    break
                if restart:
                    break
            if not restart:
                i -= 1

    # queries

    @property
    def base(self) -> tuple:
        return tuple(lv.base + 1 for lv in self._levels)

    @property
    def transversal_sizes(self) -> tuple:
        return tuple(len(lv.trans) for lv in self._levels)

    def order(self) -> int:
        return math.prod(self.transversal_sizes)

    def contains(self, p: Permutation) -> bool:
        if p.degree != self.n:
            raise DegreeMismatch(f"degree {p.degree} != {self.n}")
        return self._contains_raw(p._img)

    def _contains_raw(self, g: tuple) -> bool:
        h, j = self._sift_raw(g)
        return j == len(self._levels) and _is_id(h)

    def strong_generators(self) -> list:
        seen = []
        for lv in self._levels:
            for g in lv.gens:
                if g not in seen:
                    seen.append(g)
        return [Permutation._raw(g) for g in seen]

    def transversal(self, level: int) -> dict:
        """Point -> coset representative mapping the level's base point there."""
        lv = self._levels[level]
        return {p + 1: Permutation._raw(u) for p, u in lv.trans.items()}

    def elements(self) -> Iterator[Permutation]:
        for block in self._element_blocks():
            for row in block:
                yield Permutation._raw(tuple(int(x) for x in row))

    # batched traversal and sifting

    def _arrays(self):
        cache = getattr(self, "_arr_cache", None)
        if cache is None:
            n = self.n
            cache = []
            for lv in self._levels:
                pts = sorted(lv.trans)
                trans = np.array([lv.trans[p] for p in pts], dtype=np.int16).reshape(-1, n)
                tinv = np.array([lv.tinv[p] for p in pts], dtype=np.int16).reshape(-1, n)
                lookup = np.full(n, -1, dtype=np.int32)
                lookup[pts] = np.arange(len(pts))
                cache.append((lv.base, trans, tinv, lookup))
            self._arr_cache = cache
        return cache

    def _element_blocks(self, block_size: int = 1 << 15) -> Iterator[np.ndarray]:
        """Yield arrays of group elements; each element is u_k * ... * u_0."""
        arrs = self._arrays()
        ident = np.arange(self.n, dtype=np.int16)[None, :]
        if not arrs:
            yield ident
            return
        # suffix sizes: number of elements produced by levels i..end
        sizes = [len(a[1]) for a in arrs]

        def rec(level: int, prefix: np.ndarray):
            # prefix: product of transversal elements of levels deeper than `level`
            # already applied; elements = prefix * u_level * ... * u_0
            if level < 0:
                yield prefix
                return
            trans = arrs[level][1]
            remaining = math.prod(sizes[: level + 1])
            if remaining * len(prefix) <= block_size:
                cur = prefix
                for l in range(level, -1, -1):
                    t = arrs[l][1]
                    # (x * u)[p] = u[x[p]]
                    cur = t[:, cur].transpose(1, 0, 2).reshape(-1, self.n)
                yield cur
                return
            for k in range(len(trans)):
                nxt = trans[k][prefix]
                yield from rec(level - 1, nxt)

        yield from rec(len(arrs) - 1, ident)

    def _contains_batch(self, batch: np.ndarray) -> np.ndarray:
        g = batch
        ok = np.ones(len(g), dtype=bool)
        for base, _trans, tinv, lookup in self._arrays():
            idx = lookup[g[:, base]]
            ok &= idx >= 0
            idx = np.where(idx >= 0, idx, 0)
            # (g * u^{-1})[p] = u^{-1}[g[p]]
            g = tinv[idx[:, None], g]
        ident = np.arange(self.n, dtype=g.dtype)
        return ok & (g == ident).all(axis=1)


def build_chain(gens: Sequence[Permutation], n: int | None = None) -> StabilizerChain:
    return StabilizerChain(gens, n)


def group_order(chain_or_gens, n: int | None = None) -> int:
    if isinstance(chain_or_gens, StabilizerChain):
        return chain_or_gens.order()
    return StabilizerChain(list(chain_or_gens), n).order()


def contains(chain: StabilizerChain, p: Permutation) -> bool:
    return chain.contains(p)


def intersection_order(
    A,
    B,
    limit: int = DEFAULT_INTERSECTION_LIMIT,
    target: int | None = None,
    n: int | None = None,
) -> int:
    """Exact ``|<A> & <B>|`` by walking the smaller group through the larger chain.

    ``A`` and ``B`` are generator lists or prebuilt chains.  With ``target``
    set, the walk stops as soon as the count exceeds it and the partial
    count (already ``> target``) is returned.
    """
    ca = A if isinstance(A, StabilizerChain) else StabilizerChain(list(A), n or _check_degrees(list(B)))
    cb = B if isinstance(B, StabilizerChain) else StabilizerChain(list(B), ca.n)
    if ca.n != cb.n:
        raise DegreeMismatch(f"degrees {ca.n} and {cb.n} differ")
    small, big = (ca, cb) if ca.order() <= cb.order() else (cb, ca)
    size = small.order()
    if size > limit:
        raise IntersectionLimitExceeded(size, limit)
    count = 0
    # small first blocks so that a quick witness aborts early
    blocks = small._element_blocks(block_size=1024) if target is not None else small._element_blocks()
    for block in blocks:
        count += int(big._contains_batch(block).sum())
        if target is not None and count > target:
            break
    return count


def _is_odd(a: tuple) -> bool:
    return sum(k - 1 for k in _cycle_lengths(a)) % 2 == 1


_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47)


def _jordan_prime(a: tuple, n: int) -> int:
    """A prime p such that a power of ``a`` is a single p-cycle usable in
    Jordan's theorem (p = 2, or p <= n - 3), else 0."""
    lengths = _cycle_lengths(a)
    for p in _SMALL_PRIMES:
        if p > n:
            break
        if p != 2 and p > n - 3:
            continue
        hits = [k for k in lengths if k % p == 0]
        if len(hits) == 1 and hits[0] == p:
            return p
    return 0


def _is_primitive_raw(gens: Sequence[tuple], n: int) -> bool:
    pts = list(range(n))
    for b in range(1, n):
        if len(_block_partition(gens, pts, 0, b)) > 1:
            return False
    return True


def _is_symmetric_raw(gens: Sequence[tuple], n: int) -> bool:
    """Exact test that ``gens`` generate the full symmetric group on n points.

    Fast path: a primitive group holding a transposition, or holding a
    p-cycle with p <= n - 3 and an odd element, is S_n (Jordan).  Anything
    undecided falls back to the stabilizer chain order.
    """
    if n <= 1:
        return True
    if len(_orbits_raw(gens, n)) != 1:
        return False
    if n >= 3 and not any(_is_odd(g) for g in gens):
        return False
    if n <= 4:
        return StabilizerChain._from_raw(gens, n).order() == math.factorial(n)
    if not _is_primitive_raw(gens, n):
        return False
    words = list(gens)
    r = len(gens)
    for i in range(r):
        for j in range(r):
            if i != j:
                words.append(_mul(gens[i], gens[j]))
    for i in range(r):
        for j in range(r):
            for k in range(r):
                if i != j and j != k:
                    words.append(_mul(_mul(gens[i], gens[j]), gens[k]))
    for w in words:
        if _jordan_prime(w, n):
            return True
    return StabilizerChain._from_raw(gens, n).order() == math.factorial(n)


def is_full_symmetric_group(gens: Sequence[Permutation], n: int) -> bool:
    return _is_symmetric_raw(_raw_gens(gens, n), n)


def closure(gens: Sequence[Permutation], n: int | None = None, max_size: int | None = None) -> set:
    """Brute-force element set of ``<gens>`` (breadth-first)."""
    if n is None:
        n = _check_degrees(list(gens))
    raw = _raw_gens(gens, n)
    ident = tuple(range(n))
    seen = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for x in frontier:
            for g in raw:
                y = _mul(x, g)
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
                    if max_size is not None and len(seen) > max_size:
                        raise OverflowError(f"closure exceeds {max_size} elements")
        frontier = nxt
    return {Permutation._raw(x) for x in seen}


# -- block systems ----------------------------------------------------------


@dataclass(frozen=True)
class BlockSystem:
    orbit: tuple
    blocks: tuple

    def __post_init__(self):
        flat = [x for b in self.blocks for x in b]
        if sorted(flat) != sorted(self.orbit) or len(set(flat)) != len(flat):
            raise ValueError("blocks must partition the orbit")
        if len({len(b) for b in self.blocks}) > 1:
            raise ValueError("blocks must have equal size")

    @property
    def block_size(self) -> int:
        return len(self.blocks[0])

    @property
    def nontrivial(self) -> bool:
        return 1 < self.block_size < len(self.orbit)

    def block_of(self, x: int) -> tuple:
        for b in self.blocks:
            if x in b:
                return b
        raise KeyError(x)

    def is_stable_under(self, gens: Sequence[Permutation]) -> bool:
        blocks = {frozenset(b) for b in self.blocks}
        for g in gens:
            for b in self.blocks:
                if frozenset(g(x) for x in b) not in blocks:
                    return False
        return True


def _block_partition(gens: Sequence[tuple], orbit: Sequence[int], a: int, b: int) -> list:
    # Atkinson: whenever two classes merge, the images of the merging pair must merge
    parent = {x: x for x in orbit}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    pending = [(a, b)]
    while pending:
        x, y = pending.pop()
        rx, ry = find(x), find(y)
        if rx == ry:
            continue
        parent[ry] = rx
        # the classes of x and y merged; their images must merge too
        for g in gens:
            pending.append((g[x], g[y]))
    classes: dict = {}
    for x in orbit:
        classes.setdefault(find(x), []).append(x)
    return sorted((sorted(c) for c in classes.values()), key=lambda c: c[0])


def minimal_block(gens: Sequence[Permutation], orbit: Sequence[int], a: int, b: int) -> tuple:
    """Smallest block of imprimitivity containing ``a`` and ``b``."""
    orbit_set = set(orbit)
    if a not in orbit_set or b not in orbit_set:
        raise ValueError(f"points {a}, {b} must lie in the orbit")
    if a == b:
        raise ValueError("a and b must differ")
    raw = [g._img for g in gens]
    parts = _block_partition(raw, [x - 1 for x in orbit], a - 1, b - 1)
    for c in parts:
        if a - 1 in c:
            return tuple(x + 1 for x in c)
    raise AssertionError("unreachable")


def _check_transitive(raw: Sequence[tuple], orbit: Sequence[int]) -> None:
    orb = set(orbit)
    start = orbit[0]
    seen = {start}
    stack = [start]
    while stack:
        x = stack.pop()
        for g in raw:
            y = g[x]
            if y not in orb:
                raise ValueError("orbit is not invariant under the generators")
            if y not in seen:
                seen.add(y)
                stack.append(y)
    if seen != orb:
        raise ValueError("generators are not transitive on the orbit")


def is_primitive_on(gens: Sequence[Permutation], orbit: Sequence[int]):
    """Return ``(primitive, witness)``; the witness is a nontrivial BlockSystem or None."""
    orbit = sorted(orbit)
    raw = [g._img for g in gens]
    orb0 = [x - 1 for x in orbit]
    _check_transitive(raw, orb0)
    if len(orb0) <= 2:
        return True, None
    a = orb0[0]
    for b in orb0[1:]:
        parts = _block_partition(raw, orb0, a, b)
        if len(parts) > 1:
            blocks = tuple(tuple(x + 1 for x in c) for c in parts)
            return False, BlockSystem(tuple(orbit), blocks)
    return True, None


def block_systems(gens: Sequence[Permutation], orbit: Sequence[int]) -> list:
    """Nontrivial block systems generated by a pair ``{min(orbit), b}``.

    Every minimal nontrivial system is among them; coarser systems whose
    block through min(orbit) is not generated by a single pair are not.
    """
    orbit = sorted(orbit)
    raw = [g._img for g in gens]
    orb0 = [x - 1 for x in orbit]
    _check_transitive(raw, orb0)
    out = []
    seen = set()
    a = orb0[0]
    for b in orb0[1:]:
        parts = _block_partition(raw, orb0, a, b)
        if len(parts) > 1:
            blocks = tuple(tuple(x + 1 for x in c) for c in parts)
            if blocks not in seen:
                seen.add(blocks)
                out.append(BlockSystem(tuple(orbit), blocks))
    return out
