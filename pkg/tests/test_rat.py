import json
import math
import random

import pytest

from conftest import S9, S10, S13, T, load_fixture, rank3_up_to_conjugacy, table_data
from scgroups.perm import Permutation, StabilizerChain, _mul, _orbits_raw, block_systems
from scgroups.rat import (
    PreconditionError,
    augment,
    augment_all,
    candidate_edges,
    check_hypotheses,
)
from scgroups.sggi import (
    GeneratorTuple,
    generates_full_symmetric,
    ip_holds,
    is_string,
    is_string_c_group,
)

EXAMPLES = [
    (S9, (1, 2), "s9_augmented.json"),
    (S10, (2, 3), "s10_augmented.json"),
    (S13, (2, 3), "s13_augmented.json"),
]


def restricted_order(gens, orbit):
    """Order of the group induced on an invariant set."""
    pos = {x: i for i, x in enumerate(orbit)}
    sub = [Permutation([pos[g(x)] + 1 for x in orbit]) for g in gens]
    return StabilizerChain(sub, len(orbit)).order()


class TestCandidates:
    def test_s9(self):
        assert candidate_edges(S9) == [(1, 2)]

    def test_examples(self):
        assert candidate_edges(S10) == [(2, 3)]
        assert candidate_edges(S13) == [(2, 3)]

    def test_rho2_moves_everything(self):
        t = T([[(5, 6)], [(2, 3), (4, 5)], [(1, 2), (3, 4), (5, 6)]], 6)
        assert is_string_c_group(t).is_string_c_group and generates_full_symmetric(t)
        assert candidate_edges(t) == []
        assert augment_all(t) == []

    def test_transposition_rejected(self):
        t = T([[(2, 3), (4, 5)], [(1, 2)], [(2, 4), (3, 5)]], 5)
        assert is_string_c_group(t).is_string_c_group and generates_full_symmetric(t)
        with pytest.raises(PreconditionError, match="transposition"):
            candidate_edges(t)

    def test_rank_and_degree(self):
        with pytest.raises(PreconditionError):
            candidate_edges(T([[(1, 2)], [(2, 3)], [(3, 4)], [(4, 5)]], 5))
        with pytest.raises(PreconditionError):
            candidate_edges(T([[(1, 2)], [(2, 3)], [(3, 4)]], 4))

    def test_requires_full_symmetric(self):
        t = T([[(1, 2), (3, 4)], [(2, 3), (4, 5)], [(1, 2), (4, 5)]], 5)
        assert not generates_full_symmetric(t)
        with pytest.raises(PreconditionError):
            candidate_edges(t)

    def test_not_a_candidate(self):
        with pytest.raises(PreconditionError):
            augment(S9, (3, 4))
        with pytest.raises(PreconditionError):
            check_hypotheses(S9, (3, 4))


class TestAugment:
    @pytest.mark.parametrize("t,edge,name", EXAMPLES, ids=["s9", "s10", "s13"])
    def test_matches_fixture(self, t, edge, name):
        aug = augment(t, edge)
        assert aug == load_fixture(name)
        assert aug.offset == -1
        assert aug.gen(-1) == Permutation.transposition(*edge, t.degree)
        assert aug.gen(-1) * aug.gen(1) == t.gens[1]

    def test_s9_generators(self):
        aug = augment(S9, (1, 2))
        assert aug.gen(1) == T([[(3, 4), (5, 6)]], 9).gens[0]
        assert aug.gen(0) == S9.gens[0] and aug.gen(2) == S9.gens[2]

    @pytest.mark.parametrize("t,edge,name", EXAMPLES, ids=["s9", "s10", "s13"])
    def test_fails_ip(self, t, edge, name):
        aug = augment(t, edge)
        assert is_string(aug)[0]
        assert generates_full_symmetric(aug)
        assert not ip_holds(aug)

    def test_structure_on_enumerated(self):
        count = 0
        for n in (5, 6, 7):
            for t in rank3_up_to_conjugacy(n).reps():
                if t.gens[1].is_transposition():
                    continue
                for a, b in candidate_edges(t):
                    aug = augment(t, (a, b))
                    count += 1
                    assert is_string(aug)[0]
                    assert generates_full_symmetric(aug)
                    # the (-1)-edge touches no 1- or 2-edge
                    for lab in (1, 2):
                        g = aug.gen(lab)
                        assert g(a) == a and g(b) == b
        assert count >= 10

    def test_s5_has_a_valid_augmentation(self):
        _, d3, _ = table_data(5)
        assert len(d3) == 4
        verified = []
        for t in d3.reps():
            if t.gens[1].is_transposition():
                continue
            verified += [a.verified for a in augment_all(t, verify=True)]
        assert any(verified)


class TestHypotheses:
    def test_s9(self):
        r = check_hypotheses(S9, (1, 2))
        assert r.rho1_not_transposition and r.orbit_bound_ok
        assert r.case == 4 and r.shape == "path4"
        triples = sorted(o for o in r.suborbits if len(o) == 3)
        assert triples == [(2, 3, 4), (5, 6, 9)]
        ((orbit, witness),) = r.block_witnesses.items()
        assert set(triples[0]) | set(triples[1]) <= set(orbit)
        assert witness is None
        assert r.imprimitivity_ok is False and r.parity_ok is None
        assert not r.theorem_applies and r.failed == ["imprimitivity"]

    def test_s9_gamma_minus1_is_s8(self):
        aug = augment(S9, (1, 2))
        gens = [aug.gen(lab) for lab in (0, 1, 2)]
        assert StabilizerChain(gens, 9).order() == math.factorial(8)

    def test_s10(self):
        r = check_hypotheses(S10, (2, 3))
        assert r.case == 5 and r.shape == "path5"
        assert r.imprimitivity_ok is True
        ((orbit, witness),) = r.block_witnesses.items()
        assert orbit == (3, 4, 5, 6, 7, 8, 9, 10)
        assert sorted(witness.blocks) == [(3, 10), (4, 9), (5, 8), (6, 7)]
        assert r.parity_ok is False
        assert not r.theorem_applies and r.failed == ["parity"]

    def test_s13(self):
        r = check_hypotheses(S13, (2, 3))
        assert r.case == 5
        assert r.parity_ok is True
        assert r.imprimitivity_ok is False
        (orbit,) = r.block_witnesses
        assert len(orbit) == 11
        aug = augment(S13, (2, 3))
        assert restricted_order([aug.gen(lab) for lab in (0, 1, 2)], orbit) == math.factorial(11)
        assert not r.theorem_applies and r.failed == ["imprimitivity"]

    @pytest.mark.parametrize("t,edge,name", EXAMPLES, ids=["s9", "s10", "s13"])
    def test_augment_all_reports_unverified(self, t, edge, name):
        (a,) = augment_all(t, verify=True)
        assert a.edge == edge and a.verified is False
        assert not a.report.theorem_applies
        assert a.augmented == load_fixture(name)

    def test_explain_and_dict(self):
        r = check_hypotheses(S10, (2, 3))
        lines = r.explain()
        assert any("FAIL" in line and "even" in line for line in lines)
        assert any("[3, 10]" in line for line in lines)
        assert lines[-1].endswith("theorem applies: no")
        d = json.loads(json.dumps(r.to_dict()))
        assert d["case"] == 5 and d["failed"] == ["parity"]
        assert d["block_witnesses"]["3,4,5,6,7,8,9,10"] == [[3, 10], [4, 9], [5, 8], [6, 7]]

    def test_applies_implies_conditions(self):
        for n in (5, 6, 7):
            for t in rank3_up_to_conjugacy(n).reps():
                if t.gens[1].is_transposition():
                    continue
                for a in augment_all(t):
                    r = a.report
                    if r.theorem_applies:
                        assert r.rho1_not_transposition and r.orbit_bound_ok and r.case in (4, 5, 6)
                        assert r.failed == []
                    if r.orbit_bound_ok:
                        assert r.case in (4, 5, 6)
                        assert r.shape == f"path{r.case}"


def theorem_setting(rng, n):
    """A rank-3 string C-group rep of S_n in the augmentation setting, with its edge.

    <rho_0, rho_1> is drawn with orbits of size <= 3 directly, then an edge
    {a, b} of points fixed by rho_1 is merged back in to form rho~_1.
    """
    pts = list(range(n))
    rng.shuffle(pts)
    r0, r1 = list(range(n)), list(range(n))
    i = 0
    while i < n:
        k = rng.choice((1, 2, 3))
        blk = pts[i : i + k]
        i += k
        if len(blk) == 2:
            x, y = blk
            kind = rng.choice(("0", "1", "01"))
            if "0" in kind:
                r0[x], r0[y] = y, x
            if "1" in kind:
                r1[x], r1[y] = y, x
        elif len(blk) == 3:
            x, y, z = blk
            first, second = (r0, r1) if rng.random() < 0.5 else (r1, r0)
            first[x], first[y] = y, x
            second[y], second[z] = z, y
    r0, r1 = tuple(r0), tuple(r1)
    fixed = [x for x in range(n) if r1[x] == x]
    if len(fixed) < 2 or r0 == tuple(range(n)):
        return None
    a, b = sorted(rng.sample(fixed, 2))
    tau = list(range(n))
    tau[a], tau[b] = b, a
    r1_tilde = _mul(tuple(tau), r1)
    # rho_2: an involution commuting with rho_0 and fixing a, b
    free = [x for x in range(n) if x not in (a, b)]
    for _ in range(40):
        r2 = list(range(n))
        pool = free[:]
        rng.shuffle(pool)
        for j in range(rng.randint(1, len(pool) // 2)):
            x, y = pool[2 * j], pool[2 * j + 1]
            r2[x], r2[y] = y, x
        r2 = tuple(r2)
        if r2 != r0 and _mul(r0, r2) == _mul(r2, r0):
            break
    else:
        return None
    t = GeneratorTuple._from_raw((r0, r1_tilde, r2))
    if t.gens[1].is_transposition() or not generates_full_symmetric(t):
        return None
    if not is_string_c_group(t).is_string_c_group:
        return None
    return t, (a + 1, b + 1)


def lemma_violations(t, edge):
    """Check both parts of the triplet-splitting lemma on every block system found."""
    r = check_hypotheses(t, edge)
    aug = augment(t, edge)
    n = t.degree
    gens = [aug.gen(lab) for lab in (0, 1, 2)]
    triples = [set(o) for o in r.suborbits if len(o) == 3]
    o_m1 = next(set(o) for o in r.suborbits if edge[0] in o or edge[1] in o)
    bad, checked = [], 0
    for orb in _orbits_raw(aug.raw[1:], n):
        orb = [x + 1 for x in orb]
        for bs in block_systems(gens, orb):
            if not bs.nontrivial:
                continue
            checked += 1
            inside = [tr for tr in triples if tr <= set(orb)]
            if not all(len({bs.block_of(x) for x in tr}) == 3 for tr in inside):
                bad.append(("split", orb, bs))
            if o_m1 <= set(orb):
                mine = {bs.block_of(x) for x in o_m1}
                if len(o_m1) != 3 or not any({bs.block_of(x) for x in tr} == mine for tr in inside if tr != o_m1):
                    bad.append(("same-blocks", orb, bs))
    return checked, bad


class TestImprimitivityLemma:
    def test_random_settings(self):
        rng = random.Random(4242)
        checked = 0
        for _ in range(20000):
            if checked >= 200:
                break
            got = theorem_setting(rng, rng.choice((6, 7, 8, 9)))
            if got is None:
                continue
            c, bad = lemma_violations(*got)
            assert bad == [], (got, bad)
            checked += c
        assert checked >= 200

    @pytest.mark.parametrize("t,edge", [(S10, (2, 3))], ids=["s10"])
    def test_example_witness(self, t, edge):
        checked, bad = lemma_violations(t, edge)
        assert checked >= 1 and bad == []
