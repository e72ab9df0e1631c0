"""Acceptance gate: one PASS/FAIL line per criterion.

The lines are collected in ``conftest.ACCEPTANCE`` and printed in the
pytest terminal summary. Running this file directly prints them too.
"""

from __future__ import annotations

import dataclasses
import json
import functools
import random
import time
from fractions import Fraction

import pytest

from conftest import leibniz_det, matmul, minor_gcd, record
from morse_lefschetz.chain_core import homology, smith_normal_form
from morse_lefschetz.duality import NotOrientable, verify_duality
from morse_lefschetz.fixtures import NAMED, FixtureSpec, gen_fixture, random_spec
from morse_lefschetz.morse_model import (build_absolute_complex, build_boundary_complex,
                                         build_relative_complex, hat_extension, verify_theorem1)
from morse_lefschetz.oracle import (boundary_homology, les_of_pair, relative_homology,
                                    simplicial_homology)
from morse_lefschetz.pl_engine.extract import euler_audit, extract_morse_data, tangent_block_violations
from morse_lefschetz.report import AnalyzeConfig, analyze_mesh

BASE = ["DISK1", "ANN1", "MOB1", "G2B1"]
VARIANT_SEED = 1
FIXTURES = BASE + [f"{n}@{VARIANT_SEED}" for n in BASE]
ORIENTED = [n for n in FIXTURES if not n.startswith("MOB1")]
TIME_LIMIT = 5.0
LARGE = [FixtureSpec("disk", 64), FixtureSpec("annulus", 64), FixtureSpec("mobius", 64),
         FixtureSpec("genus", 64, genus=2, holes=1)]
N_RANDOM_MESHES = 200


def spec_of(name: str) -> FixtureSpec:
    base, _, seed = name.partition("@")
    spec = NAMED[base]
    return dataclasses.replace(spec, field_seed=int(seed)) if seed else spec


@functools.lru_cache(maxsize=None)
def extraction(name: str):
    return extract_morse_data(*gen_fixture(spec_of(name)))


def homology_matches(spec: FixtureSpec) -> tuple[bool, float, str]:
    """Morse homology of the three complexes against the simplicial oracle."""
    t0 = time.perf_counter()
    mesh, fld = gen_fixture(spec)
    d = extract_morse_data(mesh, fld).data
    pairs = {
        "absolute": (build_absolute_complex(d), simplicial_homology(mesh)),
        "relative": (build_relative_complex(d), relative_homology(mesh)),
        "boundary": (build_boundary_complex(d), boundary_homology(mesh)),
    }
    bad = [k for k, (C, want) in pairs.items() if homology(C).group != want]
    return not bad, time.perf_counter() - t0, ",".join(bad)


# --- 1. homology correctness ---------------------------------------------------

def test_criterion_1_homology():
    ok, notes = True, []
    for name in FIXTURES:
        match, secs, bad = homology_matches(spec_of(name))
        ok &= match and secs < TIME_LIMIT
        notes.append(f"{name} {secs:.2f}s" + (f" mismatch {bad}" if bad else ""))
    mob = relative_homology(gen_fixture("MOB1")[0])
    torsion_ok = mob.betti(1) == 0 and list(mob.torsion(1)) == [2]
    mob_morse = homology(build_relative_complex(extraction("MOB1").data)).group
    torsion_ok &= mob_morse == mob
    for spec in LARGE:
        match, secs, bad = homology_matches(spec)
        ok &= match and secs < TIME_LIMIT
        notes.append(f"{spec.name} {secs:.2f}s" + (f" mismatch {bad}" if bad else ""))
    record("1 homology correctness", ok and torsion_ok,
           "; ".join(notes) + f"; MOB1 relative H1 = {mob_morse.describe(1)}")
    assert ok and torsion_ok, notes


# --- 2. hat extension ------------------------------------------------------------

def theorem1_of(name: str):
    x = extraction(name)
    return verify_theorem1(x.data, hat_extension(x.data), les_of_pair(x.mesh))


def disk_specifics() -> list[str]:
    d = extraction("DISK1").data
    ext = hat_extension(d)
    C = ext.complex
    problems = []
    if [C.rank(k) for k in range(3)] != [1, 1, 1]:
        problems.append(f"generator ranks {[C.rank(k) for k in range(3)]}")
    else:
        (x,) = [p.id for p in d.plus]
        if C.gens(1) != [x] or abs(C.entry(2, x, x + "^")) != 1:
            problems.append("∂x̂ is not ±x")
    rep = verify_theorem1(d, ext)
    delta = rep.connecting_map or {}
    if [abs(v) for m in delta.values() for r in m for v in r] != [1]:
        problems.append(f"connecting map {delta}")
    return problems


def test_criterion_2_hat_extension():
    failing = [n for n in FIXTURES if not theorem1_of(n).passed]
    disk = disk_specifics()
    ok = not failing and not disk
    record("2 exact sequence and hat extension", ok,
           f"{len(FIXTURES) - len(failing)}/{len(FIXTURES)} fixtures"
           + (f"; failing {failing}" if failing else "") + (f"; DISK1 {disk}" if disk else ""))
    assert ok


# --- 3. duality --------------------------------------------------------------------

def test_criterion_3_duality():
    problems = []
    for name in ORIENTED:
        rep = verify_duality(extraction(name))
        if not (rep.eta_exact and rep.gamma_quasi_iso and rep.natural
                and not rep.descent_failures and rep.unimodular):
            problems.append(name)
    g2 = verify_duality(extraction("G2B1"))
    b1 = [b for b in g2.blocks if b.degree == 1]
    form_ok = len(b1) == 1 and len(b1[0].matrix) == 4 and abs(b1[0].determinant) == 1
    refused = []
    for name in ("MOB1", f"MOB1@{VARIANT_SEED}"):
        try:
            verify_duality(extraction(name))
        except NotOrientable:
            refused.append(name)
    mob_ok = len(refused) == 2 and all(theorem1_of(n).passed for n in refused) \
        and all(homology_matches(spec_of(n))[0] for n in refused)
    ok = not problems and form_ok and mob_ok
    record("3 duality and pairing", ok,
           f"{len(ORIENTED) - len(problems)}/{len(ORIENTED)} oriented fixtures; "
           f"G2B1 degree-1 det {b1[0].determinant if b1 else None}; Möbius refused {refused}")
    assert ok, problems


# --- 4. geometric recount ------------------------------------------------------------

def test_criterion_4_geometric():
    results = {n: verify_duality(extraction(n), cross_check=True).geometric for n in ("DISK1", "ANN1")}
    ok = all(g is not None and g.agrees for g in results.values())
    record("4 geometric cross-check", ok,
           "; ".join(f"{n} signs {g.degree_signs}" for n, g in results.items()))
    assert ok


# --- 5. structural invariants over random meshes ------------------------------------------

def squares_to_zero(C) -> bool:
    """∂∘∂ = 0, multiplied out densely outside the package."""
    for k in C.degrees:
        if C.rank(k + 1) and C.rank(k) and C.rank(k - 1):
            prod = matmul(C.d(k).to_dense(), C.d(k + 1).to_dense())
            if any(v for row in prod for v in row):
                return False
    return True


@functools.lru_cache(maxsize=1)
def random_sweep():
    rng = random.Random(20240607)
    rows = []
    for _ in range(N_RANDOM_MESHES):
        spec = random_spec(rng)
        mesh, fld = gen_fixture(spec)
        x = extract_morse_data(mesh, fld)
        d = x.data
        five = [build_absolute_complex(d), build_relative_complex(d), build_boundary_complex(d),
                hat_extension(d).complex, x.tangent_complex]
        again = extract_morse_data(*gen_fixture(spec)).data.dumps()
        rows.append({
            "spec": spec.name,
            "d2": all(squares_to_zero(C) for C in five),
            "euler": all(euler_audit(d, mesh).values()),
            "remark": not any(d.remark_violations().values()),
            "tangent": tangent_block_violations(x) == [],
            "deterministic": d.dumps() == again,
        })
    return rows


def _sweep_line(key: str, label: str) -> bool:
    rows = random_sweep()
    bad = [r["spec"] for r in rows if not r[key]]
    record(f"5 {label}", not bad, f"{len(rows) - len(bad)}/{len(rows)} random meshes"
           + (f"; e.g. {bad[:3]}" if bad else ""))
    return not bad


def test_criterion_5_boundary_squared():
    assert _sweep_line("d2", "∂²=0 on the five complexes")


def test_criterion_5_euler_audit():
    assert _sweep_line("euler", "Euler audits")


@pytest.mark.xfail(strict=True, reason="vanishing blocks do not hold for every generic field; "
                                       "see the decisions ledger")
def test_criterion_5_remark_zero_blocks():
    assert _sweep_line("remark", "vanishing blocks of the two Morse complexes")


def test_criterion_5_tangent_block():
    assert _sweep_line("tangent", "tangent boundary block equals the boundary complex")


def test_criterion_5_determinism():
    ok = _sweep_line("deterministic", "determinism of extracted data")
    cfg = AnalyzeConfig(cross_check=True)
    reports = []
    for _ in range(2):
        reports.append(json.dumps(analyze_mesh(*gen_fixture(spec_of("G2B1@1")), cfg), indent=2))
    same = reports[0] == reports[1]
    record("5 determinism of full reports", same, "G2B1@1 twice")
    assert ok and same


# --- 6. Smith normal form ---------------------------------------------------------------

def det_fraction(a) -> Fraction:
    """Determinant by rational Gaussian elimination."""
    m = [[Fraction(v) for v in row] for row in a]
    n, det = len(m), Fraction(1)
    for c in range(n):
        p = next((r for r in range(c, n) if m[r][c]), None)
        if p is None:
            return Fraction(0)
        if p != c:
            m[c], m[p] = m[p], m[c]
            det = -det
        det *= m[c][c]
        for r in range(c + 1, n):
            f = m[r][c] / m[c][c]
            if f:
                m[r] = [x - f * y for x, y in zip(m[r], m[c])]
    return det


def smith_ok(a) -> bool:
    U, D, V = smith_normal_form(a)
    u, dd, v = U.to_dense(), D.to_dense(), V.to_dense()
    if matmul(matmul(u, a), v) != dd:
        return False
    if abs(det_fraction(u)) != 1 or abs(det_fraction(v)) != 1:
        return False
    diag = [dd[i][i] for i in range(min(len(a), len(a[0])))]
    off = any(dd[i][j] for i in range(len(dd)) for j in range(len(dd[0])) if i != j)
    chain = all(x >= 0 for x in diag) and all(
        (diag[i + 1] % diag[i] == 0) if diag[i] else not diag[i + 1] for i in range(len(diag) - 1))
    return not off and chain


def divisors_match(a) -> bool:
    """d_1 ... d_i = gcd of the i×i minors."""
    _, D, _ = smith_normal_form(a)
    dd = D.to_dense()
    prod = 1
    for i in range(1, min(len(a), len(a[0])) + 1):
        prod *= dd[i - 1][i - 1]
        if prod != minor_gcd(a, i):
            return False
    return True


def random_matrix(rng, max_side):
    m, n = rng.randint(1, max_side), rng.randint(1, max_side)
    zero_bias = rng.random() * 0.6
    return [[0 if rng.random() < zero_bias else rng.randint(-9, 9) for _ in range(n)] for _ in range(m)]


def test_criterion_6_smith_normal_form():
    rng = random.Random(6)
    big = [random_matrix(rng, 12) for _ in range(1000)]
    bad_big = sum(not smith_ok(a) for a in big)
    small = [random_matrix(rng, 4) for _ in range(300)]
    bad_small = sum(not divisors_match(a) for a in small)
    # the minors route must itself agree with cofactor determinants on squares
    square = [a for a in small if len(a) == len(a[0])]
    det_ok = all(abs(leibniz_det(a)) == minor_gcd(a, len(a)) for a in square)
    ok = bad_big == 0 and bad_small == 0 and det_ok
    record("6 Smith normal form", ok,
           f"{1000 - bad_big}/1000 re-multiplied up to 12×12; "
           f"{300 - bad_small}/300 minor gcds up to 4×4")
    assert ok


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-q"]))
