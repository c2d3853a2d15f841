"""Permutation representation (CPR) graphs.

Edges are stored with internal labels ``0..rank-1``; ``offset`` is added back
for display and for every public label argument, so an augmented tuple's
``-1`` label only exists at the surface.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Sequence

from .perm import Permutation, _orbits_raw
from .sggi import GeneratorTuple

CanonicalKey = bytes


class MatchingError(ValueError):
    """Two edges with the same label share a vertex."""


class CprSyntaxError(ValueError):
    def __init__(self, line: int, msg: str):
        super().__init__(f"line {line}: {msg}")
        self.line = line


@dataclass(frozen=True)
class CprGraph:
    n: int
    rank: int
    offset: int
    edges: tuple  # sorted (u, v, internal_label), 1-based vertices, u < v

    @classmethod
    def from_edges(cls, n: int, rank: int, offset: int, edges: Iterable[Sequence[int]]) -> "CprGraph":
        """Build from ``(u, v, label)`` triples using public labels."""
        internal = []
        used: dict = {}
        for u, v, label in edges:
            u, v, label = int(u), int(v), int(label)
            if not offset <= label < offset + rank:
                raise ValueError(f"label {label} outside {offset}..{offset + rank - 1}")
            for x in (u, v):
                if not 1 <= x <= n:
                    raise ValueError(f"vertex {x} outside 1..{n}")
            if u == v:
                raise ValueError(f"loop at vertex {u}")
            lab = label - offset
            for x in (u, v):
                if (x, lab) in used:
                    raise MatchingError(f"vertex {x} has two edges labelled {label}")
                used[(x, lab)] = True
            internal.append((min(u, v), max(u, v), lab))
        return cls(n, rank, offset, tuple(sorted(internal)))

    def labelled_edges(self) -> list:
        return [(u, v, lab + self.offset) for u, v, lab in self.edges]

    @property
    def labels(self) -> range:
        return range(self.offset, self.offset + self.rank)

    def raw(self) -> tuple:
        imgs = [list(range(self.n)) for _ in range(self.rank)]
        for u, v, lab in self.edges:
            imgs[lab][u - 1] = v - 1
            imgs[lab][v - 1] = u - 1
        return tuple(tuple(g) for g in imgs)

    def label_reversed(self) -> "CprGraph":
        r = self.rank
        return CprGraph(self.n, r, self.offset, tuple(sorted((u, v, r - 1 - lab) for u, v, lab in self.edges)))

    def is_connected(self) -> bool:
        return len(_orbits_raw(self.raw(), self.n)) <= 1


def from_tuple(t: GeneratorTuple) -> CprGraph:
    edges = []
    for lab, g in enumerate(t.raw):
        for x, y in enumerate(g):
            if x < y:
                edges.append((x + 1, y + 1, lab))
    return CprGraph(t.degree, t.rank, t.offset, tuple(sorted(edges)))


def to_tuple(g: CprGraph) -> GeneratorTuple:
    seen = set()
    for u, v, lab in g.edges:
        for x in (u, v):
            if (x, lab) in seen:
                raise MatchingError(f"vertex {x} has two edges labelled {lab + g.offset}")
            seen.add((x, lab))
    return GeneratorTuple(g.n, tuple(Permutation._raw(img) for img in g.raw()), g.offset)


def components(g: CprGraph, labels: Iterable[int]) -> list:
    """Connected components of the spanning subgraph on the given public labels."""
    labels = set(labels)
    for lab in labels:
        if lab not in g.labels:
            raise ValueError(f"unknown label {lab}")
    raw = g.raw()
    sel = [raw[lab - g.offset] for lab in sorted(labels)]
    return [tuple(x + 1 for x in c) for c in _orbits_raw(sel, g.n)]


SINGLE_VERTEX = "single-vertex"
SINGLE_EDGE = "single-edge"
DOUBLE_EDGE = "double-edge"
ALTERNATING_SQUARE = "alternating-square"
INVALID = "INVALID"


def classify_noncommuting_pair(g: CprGraph, i: int, j: int) -> list:
    """Shape of each component of the ``{i, j}``-subgraph, for ``|i - j| >= 2``.

    Returns ``(component, tag)`` pairs.  The four legal shapes are exactly the
    components on which the two involutions commute; anything else is INVALID.
    """
    if abs(i - j) < 2:
        raise ValueError("labels must be at distance at least 2")
    out = []
    raw = g.raw()
    gi, gj = raw[i - g.offset], raw[j - g.offset]
    for comp in _orbits_raw([gi, gj], g.n):
        m = len(comp)
        ne = sum(1 for x in comp if gi[x] > x) + sum(1 for x in comp if gj[x] > x)
        if m == 1:
            tag = SINGLE_VERTEX
        elif m == 2:
            tag = DOUBLE_EDGE if ne == 2 else SINGLE_EDGE
        elif m == 4 and ne == 4:
            tag = ALTERNATING_SQUARE
        else:
            tag = INVALID
        out.append((tuple(x + 1 for x in comp), tag))
    return out


# -- canonical form -------------------------------------------------------------


def _component_code(raw: Sequence[tuple], comp: Sequence[int]) -> tuple:
    """Minimum over roots of the breadth-first relabelled adjacency code.

    Each label class is a partial matching, so a root fixes the whole
    numbering of a connected component; no further tie-breaking is needed.
    Roots are restricted to the vertices whose per-label degree vector is
    smallest, which is invariant under relabelling.
    """
    sig = {v: tuple(g[v] == v for g in raw) for v in comp}
    top = max(sig.values())
    best = None
    for root in comp:
        if sig[root] != top:
            continue
        pos = {root: 0}
        order = [root]
        i = 0
        while i < len(order):
            v = order[i]
            i += 1
            for g in raw:
                w = g[v]
                if w not in pos:
                    pos[w] = len(order)
                    order.append(w)
        code = tuple(pos[g[v]] for v in order for g in raw)
        if best is None or code < best:
            best = code
    return best


def canonical_key_raw(raw: Sequence[tuple], n: int) -> bytes:
    r = len(raw)
    parts = []
    for comp in _orbits_raw(raw, n):
        parts.append((len(comp), _component_code(raw, comp)))
    parts.sort()
    out = bytearray([n, r])
    for size, code in parts:
        out.append(size)
        out.extend(code)
    return bytes(out)


def raw_from_key(key: bytes) -> tuple:
    """Decode a key back into the canonically relabelled generators (0-based)."""
    n, r = key[0], key[1]
    imgs = [[0] * n for _ in range(r)]
    i = 2
    start = 0
    while i < len(key):
        size = key[i]
        code = key[i + 1 : i + 1 + size * r]
        for v in range(size):
            for lab in range(r):
                imgs[lab][start + v] = start + code[v * r + lab]
        start += size
        i += 1 + size * r
    return tuple(tuple(g) for g in imgs)


def canonical_key(g: CprGraph) -> CanonicalKey:
    return canonical_key_raw(g.raw(), g.n)


def iso(g1: CprGraph, g2: CprGraph) -> bool:
    return g1.rank == g2.rank and canonical_key(g1) == canonical_key(g2)


# -- text and DOT -----------------------------------------------------------------

_HEADER = re.compile(r"^cpr\s+(-?\d+)\s+(-?\d+)\s+(-?\d+)$")


def parse_text(s: str) -> CprGraph:
    header = None
    edges = []
    for lineno, line in enumerate(s.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if header is None:
            m = _HEADER.match(body)
            if not m:
                raise CprSyntaxError(lineno, f"expected 'cpr <n> <rank> <offset>', got {body!r}")
            header = tuple(int(x) for x in m.groups())
            if header[0] < 1 or header[1] < 0:
                raise CprSyntaxError(lineno, "n must be positive and rank non-negative")
            continue
        fields = body.split()
        if len(fields) != 3:
            raise CprSyntaxError(lineno, f"expected '<u> <v> <label>', got {body!r}")
        try:
            u, v, lab = (int(x) for x in fields)
        except ValueError:
            raise CprSyntaxError(lineno, f"non-integer field in {body!r}") from None
        n, rank, offset = header
        if not offset <= lab < offset + rank:
            raise CprSyntaxError(lineno, f"label {lab} outside {offset}..{offset + rank - 1}")
        if not (1 <= u <= n and 1 <= v <= n) or u == v:
            raise CprSyntaxError(lineno, f"bad edge {u}-{v}")
        edges.append((u, v, lab))
    if header is None:
        raise CprSyntaxError(1, "missing 'cpr' header")
    n, rank, offset = header
    return CprGraph.from_edges(n, rank, offset, edges)


def emit_text(g: CprGraph) -> str:
    lines = [f"cpr {g.n} {g.rank} {g.offset}"]
    lines += [f"{u} {v} {lab}" for u, v, lab in g.labelled_edges()]
    return "\n".join(lines) + "\n"


def emit_dot(g: CprGraph, name: str = "cpr") -> str:
    lines = [f"graph {name} {{"]
    lines += [f"  {v};" for v in range(1, g.n + 1)]
    lines += [f'  {u} -- {v} [label="{lab}"];' for u, v, lab in g.labelled_edges()]
    lines.append("}")
    return "\n".join(lines) + "\n"
