import functools
import itertools
import os
import random

import pytest

from scgroups.enumeration import DEDUP_ISO, EnumConfig, enumerate_rank3, table1_row
from scgroups.perm import Permutation, closure
from scgroups.sggi import GeneratorTuple

FIXTURES = os.path.join(os.path.dirname(__file__), "..", "fixtures")

# Filled by test_acceptance.py, printed after the run.
ACCEPTANCE: dict = {}


def fixture_path(name: str) -> str:
    return os.path.normpath(os.path.join(FIXTURES, name))


def load_fixture(name: str) -> GeneratorTuple:
    with open(fixture_path(name)) as fh:
        return GeneratorTuple.from_json(fh.read())


S9 = GeneratorTuple.from_cycles([[(2, 3), (6, 9), (7, 8)], [(1, 2), (3, 4), (5, 6)], [(4, 5), (6, 7), (8, 9)]], 9)
S10 = GeneratorTuple.from_cycles(
    [[(1, 2), (3, 4), (9, 10)], [(2, 3), (4, 5), (6, 7), (8, 9)], [(5, 6), (7, 8)]], 10
)
S13 = GeneratorTuple.from_cycles(
    [
        [(1, 2), (3, 4), (7, 9), (8, 10)],
        [(2, 3), (4, 5), (6, 7), (10, 11), (12, 13)],
        [(5, 6), (7, 8), (9, 10), (11, 12)],
    ],
    13,
)


@functools.lru_cache(maxsize=None)
def table_data(n: int):
    """(row, rank 3 db, rank 4 db) with the default conventions, cached per session."""
    return table1_row(n)


@functools.lru_cache(maxsize=None)
def rank3_up_to_conjugacy(n: int):
    """Rank 3 reps up to conjugacy only: every orientation, no outer automorphism."""
    return enumerate_rank3(EnumConfig(n, 3, dedup=DEDUP_ISO, include_s6_outer=False))


def random_perm(rng: random.Random, n: int) -> Permutation:
    img = list(range(1, n + 1))
    rng.shuffle(img)
    return Permutation(img)


def conjugate(t: GeneratorTuple, s: Permutation) -> GeneratorTuple:
    si = s.inverse()
    return GeneratorTuple(t.degree, tuple(si * g * s for g in t.gens), t.offset)


def T(cycles, n, offset=0):
    return GeneratorTuple.from_cycles(cycles, n, offset)


def P(cycles, n):
    return Permutation.from_cycles(cycles, n)


def random_involution(rng, n, k=None):
    pts = list(range(1, n + 1))
    rng.shuffle(pts)
    k = k if k is not None else rng.randint(1, n // 2)
    return P([(pts[2 * i], pts[2 * i + 1]) for i in range(k)], n)


def random_sggi(rng, n, rank, tries=200):
    """Random involution tuple with the string property (None if none found quickly)."""
    for _ in range(tries):
        gens = []
        for i in range(rank):
            for _ in range(50):
                g = random_involution(rng, n)
                if all(g.commutes_with(h) for h in gens[: max(0, i - 1)]):
                    gens.append(g)
                    break
            else:
                break
        if len(gens) == rank:
            return GeneratorTuple(n, tuple(gens))
    return None


def brute_force_ip(t, max_size=45000):
    """<I> & <J> = <I & J> for every pair of label subsets, by closure."""
    r, n = t.rank, t.degree
    groups = {}
    for k in range(r + 1):
        for sub in itertools.combinations(range(r), k):
            gens = [t.gens[i] for i in sub]
            groups[frozenset(sub)] = closure(gens, n, max_size=max_size) if gens else {Permutation.identity(n)}
    for I, J in itertools.product(groups, repeat=2):
        if groups[I] & groups[J] != groups[I & J]:
            return False
    return True


def small_orbit_pair(rng, n):
    """Two involutions whose joint orbits are unions of the rank-2 shapes on <= 3 points."""
    pts = list(range(1, n + 1))
    rng.shuffle(pts)
    a, b = [], []
    i = 0
    while i < n:
        k = rng.choice((1, 2, 3))
        blk = pts[i : i + k]
        i += k
        if len(blk) == 2:
            kind = rng.choice(("a", "b", "ab"))
            if "a" in kind:
                a.append(tuple(blk))
            if "b" in kind:
                b.append(tuple(blk))
        elif len(blk) == 3:
            x, y, z = blk
            first, second = (a, b) if rng.random() < 0.5 else (b, a)
            first.append((x, y))
            second.append((y, z))
    if not a or not b:
        return None
    t = GeneratorTuple(n, (P(a, n), P(b, n)))
    return t if t.gens[0] != t.gens[1] else None


@pytest.fixture
def rng():
    return random.Random(20240611)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE):
        ok, text = ACCEPTANCE[key]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  criterion {key}: {text}")


