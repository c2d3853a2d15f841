"""Rank augmentation from 3 to 4 for representations of S_n.

A 1-edge {a, b} of the CPR graph that touches no 2-edge is relabelled -1:
rho_{-1} = (a, b) and rho_1 = rho~_1 (a, b).  :func:`check_hypotheses`
evaluates the sufficient conditions under which the result is again a
string C-group, case by case, with block-system witnesses.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .perm import (
    DEFAULT_INTERSECTION_LIMIT,
    Permutation,
    _is_odd,
    _mul,
    _orbits_raw,
    is_primitive_on,
)
from .sggi import GeneratorTuple, generates_full_symmetric, is_string, is_string_c_group


class PreconditionError(ValueError):
    pass


@dataclass(frozen=True)
class HypothesisReport:
    candidate_edge: tuple
    rho1_not_transposition: bool
    orbit_bound_ok: bool
    case: int | None  # size of the Gamma_2-orbit through the edge, when 4, 5 or 6
    parity_ok: bool | None
    imprimitivity_ok: bool | None
    theorem_applies: bool
    suborbits: tuple = ()  # Gamma_{-1,2}-orbits
    gamma2_orbit: tuple = ()
    shape: str = "other"
    # Gamma_{-1}-orbit -> BlockSystem witness (None when primitive)
    block_witnesses: dict = field(default_factory=dict)

    @property
    def failed(self) -> list:
        """Names of the hypotheses that fail, in evaluation order."""
        out = []
        if not self.rho1_not_transposition:
            out.append("rho1_transposition")
        if not self.orbit_bound_ok:
            out.append("orbit_bound")
        if self.case is None:
            out.append("case")
        if self.imprimitivity_ok is False:
            out.append("imprimitivity")
        if self.parity_ok is False:
            out.append("parity")
        return out

    def explain(self) -> list:
        a, b = self.candidate_edge
        mark = {True: "pass", False: "FAIL", None: "n/a"}
        sizes = sorted((len(o) for o in self.suborbits), reverse=True)
        lines = [
            f"edge {{{a},{b}}}: rho~_1 not a transposition: {mark[self.rho1_not_transposition]}",
            f"edge {{{a},{b}}}: Gamma_{{-1,2}} orbits of size <= 3: {mark[self.orbit_bound_ok]} (sizes {sizes})",
            f"edge {{{a},{b}}}: Gamma_2 orbit through the edge has size {len(self.gamma2_orbit)}"
            f" -> case {self.case if self.case else 'none'} (shape {self.shape})",
        ]
        if self.imprimitivity_ok is not None:
            lines.append(f"edge {{{a},{b}}}: Gamma_{{-1}} imprimitive where required: {mark[self.imprimitivity_ok]}")
            for orbit, bs in self.block_witnesses.items():
                if bs is None:
                    lines.append(f"    orbit {list(orbit)}: primitive")
                else:
                    lines.append(f"    orbit {list(orbit)}: blocks {[list(b) for b in bs.blocks]}")
        if self.parity_ok is not None:
            lines.append(f"edge {{{a},{b}}}: rho_0, rho_1, rho_2 all even: {mark[self.parity_ok]}")
        lines.append(f"edge {{{a},{b}}}: theorem applies: {'yes' if self.theorem_applies else 'no'}")
        return lines

    def to_dict(self) -> dict:
        return {
            "candidate_edge": list(self.candidate_edge),
            "rho1_not_transposition": self.rho1_not_transposition,
            "orbit_bound_ok": self.orbit_bound_ok,
            "case": self.case,
            "parity_ok": self.parity_ok,
            "imprimitivity_ok": self.imprimitivity_ok,
            "theorem_applies": self.theorem_applies,
            "shape": self.shape,
            "failed": self.failed,
            "block_witnesses": {
                ",".join(map(str, o)): (None if bs is None else [list(b) for b in bs.blocks])
                for o, bs in self.block_witnesses.items()
            },
        }


def _require(t: GeneratorTuple) -> None:
    if t.rank != 3:
        raise PreconditionError(f"rank augmentation starts from rank 3, got {t.rank}")
    if t.degree < 5:
        raise PreconditionError(f"degree must be at least 5, got {t.degree}")
    ok, bad = is_string(t)
    if not ok:
        raise PreconditionError(f"generators {bad[0]} and {bad[1]} do not commute")
    if not generates_full_symmetric(t):
        raise PreconditionError("generators do not generate the full symmetric group")


def candidate_edges(t: GeneratorTuple) -> list:
    """The 2-cycles {a, b} of rho~_1 with both points fixed by rho_2."""
    _require(t)
    r1, r2 = t.raw[1], t.raw[2]
    if len(t.gens[1].support()) == 2:
        raise PreconditionError("rho~_1 is a transposition")
    return [(a + 1, b + 1) for a, b in enumerate(r1) if a < b and r2[a] == a and r2[b] == b]


def _split_raw(raw: tuple, a: int, b: int) -> tuple:
    """0-based (rho_{-1}, rho_0, rho_1, rho_2) for the edge {a, b}."""
    n = len(raw[0])
    tau = list(range(n))
    tau[a], tau[b] = b, a
    tau = tuple(tau)
    return (tau, raw[0], _mul(tau, raw[1]), raw[2])


def augment(t: GeneratorTuple, edge) -> GeneratorTuple:
    a, b = sorted(edge)
    if (a, b) not in candidate_edges(t):
        raise PreconditionError(f"{{{a},{b}}} is not a candidate edge")
    return GeneratorTuple._from_raw(_split_raw(t.raw, a - 1, b - 1), offset=-1)


_SHAPES = {
    (-1, 0, 1): "path4",
    (0, -1, 0, 1): "path5",
    (1, 0, -1, 0, 1): "path6",
}


def _path_shape(aug_raw: tuple, comp: list) -> str:
    """Label sequence of the {-1,0,1}-component if it is a simple path."""
    gens = aug_raw[:3]  # labels -1, 0, 1
    deg = {v: sum(1 for g in gens if g[v] != v) for v in comp}
    if any(d > 2 for d in deg.values()):
        return "other"
    ends = [v for v in comp if deg[v] == 1]
    if len(ends) != 2:
        return "other"
    seq = []
    prev, v = None, ends[0]
    while True:
        step = None
        for lab, g in enumerate(gens):
            w = g[v]
            if w != v and w != prev:
                step = (lab - 1, w)
                break
        if step is None:
            break
        seq.append(step[0])
        prev, v = v, step[1]
    if len(seq) != len(comp) - 1:
        return "other"
    for cand in (tuple(seq), tuple(reversed(seq))):
        if cand in _SHAPES:
            return _SHAPES[cand]
    return "other"


def _check_raw(raw: tuple, a: int, b: int, n: int) -> HypothesisReport:
    aug = _split_raw(raw, a, b)
    tau, r0, r1, r2 = aug
    rho1_ok = sum(1 for i, x in enumerate(raw[1]) if x != i) > 2
    sub = _orbits_raw((r0, r1), n)
    bound_ok = all(len(o) <= 3 for o in sub)
    g2_orb = next(o for o in _orbits_raw((tau, r0, r1), n) if a in o)
    case = len(g2_orb) if len(g2_orb) in (4, 5, 6) else None
    shape = _path_shape(aug, g2_orb)

    parity_ok = None
    imprim_ok = None
    witnesses: dict = {}
    if case in (4, 5):
        imprim_ok = True
        triples = [set(o) for o in sub if len(o) == 3]
        gens = [Permutation._raw(g) for g in (r0, r1, r2)]
        for orb in _orbits_raw((r0, r1, r2), n):
            inside = [tr for tr in triples if tr <= set(orb)]
            if len(inside) <= 1:
                continue
            prim, bs = is_primitive_on(gens, [x + 1 for x in orb])
            witnesses[tuple(x + 1 for x in orb)] = bs
            if prim:
                imprim_ok = False
    if case == 5:
        parity_ok = not any(_is_odd(g) for g in (r0, r1, r2))

    applies = rho1_ok and bound_ok and case is not None
    if case in (4, 5):
        applies = applies and bool(imprim_ok)
    if case == 5:
        applies = applies and bool(parity_ok)
    return HypothesisReport(
        candidate_edge=(a + 1, b + 1),
        rho1_not_transposition=rho1_ok,
        orbit_bound_ok=bound_ok,
        case=case,
        parity_ok=parity_ok,
        imprimitivity_ok=imprim_ok,
        theorem_applies=applies,
        suborbits=tuple(tuple(x + 1 for x in o) for o in sub),
        gamma2_orbit=tuple(x + 1 for x in g2_orb),
        shape=shape,
        block_witnesses=witnesses,
    )


def check_hypotheses(t: GeneratorTuple, edge) -> HypothesisReport:
    a, b = sorted(edge)
    if t.rank != 3:
        raise PreconditionError(f"rank augmentation starts from rank 3, got {t.rank}")
    r1, r2 = t.raw[1], t.raw[2]
    if r1[a - 1] != b - 1 or r2[a - 1] != a - 1 or r2[b - 1] != b - 1:
        raise PreconditionError(f"{{{a},{b}}} is not a 1-edge avoiding every 2-edge")
    return _check_raw(t.raw, a - 1, b - 1, t.degree)


@dataclass(frozen=True)
class Augmentation:
    edge: tuple
    report: HypothesisReport
    augmented: GeneratorTuple
    verified: bool | None


def augment_all(t: GeneratorTuple, verify: bool = False, limit: int = DEFAULT_INTERSECTION_LIMIT) -> list:
    out = []
    for edge in candidate_edges(t):
        a, b = edge
        report = _check_raw(t.raw, a - 1, b - 1, t.degree)
        aug = GeneratorTuple._from_raw(_split_raw(t.raw, a - 1, b - 1), offset=-1)
        verified = None
        if verify:
            rep = is_string_c_group(aug, limit)
            verified = rep.is_string_c_group and rep.group_order == math.factorial(t.degree)
        out.append(Augmentation(edge, report, aug, verified))
    return out
