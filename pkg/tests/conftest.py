"""Shared helpers: independent integer arithmetic and random complexes with
known homology."""

from __future__ import annotations

import functools
import itertools
import math
import random
from collections import Counter

import pytest

from morse_lefschetz.chain_core import GradedComplex, ZMatrix
from morse_lefschetz.fixtures import gen_fixture
from morse_lefschetz.pl_engine.extract import extract_morse_data


def matmul(a, b):
    return [[sum(a[i][k] * b[k][j] for k in range(len(b))) for j in range(len(b[0]) if b else 0)]
            for i in range(len(a))]


def leibniz_det(a) -> int:
    """Determinant by cofactor expansion (small matrices only)."""
    n = len(a)
    if n == 0:
        return 1
    if n == 1:
        return a[0][0]
    total = 0
    for j in range(n):
        if a[0][j]:
            minor = [row[:j] + row[j + 1:] for row in a[1:]]
            total += (-1) ** j * a[0][j] * leibniz_det(minor)
    return total


def minor_gcd(a, i: int) -> int:
    """gcd of all i×i minors."""
    m, n = len(a), len(a[0]) if a else 0
    g = 0
    for rows in itertools.combinations(range(m), i):
        for cols in itertools.combinations(range(n), i):
            g = math.gcd(g, leibniz_det([[a[r][c] for c in cols] for r in rows]))
    return g


def _factor(n: int) -> Counter:
    out, p = Counter(), 2
    while p * p <= n:
        while n % p == 0:
            out[p] += 1
            n //= p
        p += 1
    if n > 1:
        out[n] += 1
    return out


def invariant_factors_of_cyclics(orders) -> tuple[int, ...]:
    """ℤ/a ⊕ ℤ/b ⊕ ... in divisor-chain form via prime-power decomposition."""
    powers: dict[int, list[int]] = {}
    for o in orders:
        for p, e in _factor(abs(o)).items():
            powers.setdefault(p, []).append(p ** e)
    width = max((len(v) for v in powers.values()), default=0)
    out = [1] * width
    for p, v in powers.items():
        v.sort(reverse=True)
        for i, q in enumerate(v):
            out[width - 1 - i] *= q
    return tuple(out)


def random_unimodular(rng: random.Random, n: int, steps: int = 8):
    """A random unimodular matrix together with its inverse."""
    P = [[int(i == j) for j in range(n)] for i in range(n)]
    Q = [row[:] for row in P]
    for _ in range(steps if n > 1 else 0):
        i, j = rng.sample(range(n), 2)
        c = rng.choice([-2, -1, 1, 2])
        # P <- E P with E = I + c e_ij ; Q <- Q E^{-1}
        P[i] = [x + c * y for x, y in zip(P[i], P[j])]
        for row in Q:
            row[j] -= c * row[i]
    for i in range(n):
        if rng.random() < 0.3:
            P[i] = [-x for x in P[i]]
            for row in Q:
                row[i] = -row[i]
    return P, Q


def random_complex(rng: random.Random, top: int = 3):
    """Random based complex in degrees 0..top plus its expected homology.

    Built as a sum of free generators and elementary pieces ``a -> c·b``,
    then conjugated by random unimodular changes of basis per degree.
    """
    gens: dict[int, list[str]] = {k: [] for k in range(top + 1)}
    entries = []
    betti = Counter()
    torsion: dict[int, list[int]] = {}
    for _ in range(rng.randint(1, 7)):
        k = rng.randint(0, top)
        if k > 0 and rng.random() < 0.6:
            c = rng.choice([1, 1, 2, 3, 4, -2, 6])
            a, b = f"a{len(gens[k])}_{k}", f"b{len(gens[k - 1])}_{k - 1}"
            gens[k].append(a)
            gens[k - 1].append(b)
            entries.append((k, a, b, c))
            if abs(c) > 1:
                torsion.setdefault(k - 1, []).append(c)
        else:
            gens[k].append(f"f{len(gens[k])}_{k}")
            betti[k] += 1
    C = GradedComplex.from_entries(gens, entries)
    # change of basis: d'_k = P_{k-1} d_k P_k^{-1}
    Ps = {k: random_unimodular(rng, len(gens[k])) for k in gens}
    diff = {}
    for k in range(1, top + 1):
        if not gens[k] or not gens[k - 1]:
            continue
        d = C.d(k).to_dense()
        diff[k] = ZMatrix.from_dense(matmul(matmul(Ps[k - 1][0], d), Ps[k][1]), len(gens[k]))
    expected = {k: (betti[k], invariant_factors_of_cyclics(torsion.get(k, [])))
                for k in range(top + 1)}
    return GradedComplex(gens, diff), expected


@functools.lru_cache(maxsize=None)
def named_extraction(name: str, seed: int = 0):
    mesh, fld = gen_fixture(name)
    return extract_morse_data(mesh, fld, seed)


@pytest.fixture(scope="session")
def disk1():
    return named_extraction("DISK1")


# --- acceptance lines ---------------------------------------------------------

ACCEPTANCE: list[str] = []


def record(criterion: str, ok: bool, detail: str = "") -> bool:
    """Log one pass/fail line for the acceptance summary."""
    line = f"[{'PASS' if ok else 'FAIL'}] {criterion}" + (f"  ({detail})" if detail else "")
    ACCEPTANCE.append(line)
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE:
            terminalreporter.write_line(line)
