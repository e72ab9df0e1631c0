from __future__ import annotations

import pytest

from morse_lefschetz.chain_core import GradedAbelianGroup
from morse_lefschetz.fixtures import FixtureSpec, build_mesh, gen_fixture
from morse_lefschetz.oracle import (boundary_homology, euler_checks, les_of_pair, relative_homology,
                                    simplicial_complex, simplicial_homology)

H = GradedAbelianGroup.from_dict
Z = (1, ())

EXPECTED = {
    "DISK1": {"full": H({0: Z}), "relative": H({2: Z}), "boundary": H({0: Z, 1: Z})},
    "ANN1": {"full": H({0: Z, 1: Z}), "relative": H({1: Z, 2: Z}),
             "boundary": H({0: (2, ()), 1: (2, ())})},
    "MOB1": {"full": H({0: Z, 1: Z}), "relative": H({1: (0, (2,))}), "boundary": H({0: Z, 1: Z})},
}


# Ranks over Q are taken modulo a large prime: surface homology only has
# 2-torsion, so no elementary divisor is divisible by it.
BIG_PRIME = 1_000_003


def rank_mod(m, p: int) -> int:
    """Rank over GF(p) by sparse Gaussian elimination."""
    rows = [{j: x % p for j, x in enumerate(r) if x % p} for r in m]
    pivots: dict[int, dict[int, int]] = {}
    for row in rows:
        while row:
            c = min(row)
            if c not in pivots:
                inv = pow(row[c], -1, p)
                pivots[c] = {j: v * inv % p for j, v in row.items()}
                break
            f = row[c]
            for j, v in pivots[c].items():
                x = (row.get(j, 0) - f * v) % p
                if x:
                    row[j] = x
                else:
                    row.pop(j, None)
    return len(pivots)


def betti_by_elimination(C, p: int = BIG_PRIME) -> list[int]:
    out = []
    for k in (0, 1, 2):
        rk = rank_mod(C.d(k).to_dense(), p) if C.rank(k) and C.rank(k - 1) else 0
        rk1 = rank_mod(C.d(k + 1).to_dense(), p) if C.rank(k + 1) and C.rank(k) else 0
        out.append(C.rank(k) - rk - rk1)
    return out


@pytest.mark.parametrize("name", sorted(EXPECTED))
def test_named_fixture_homology(name):
    mesh, _ = gen_fixture(name)
    want = EXPECTED[name]
    assert simplicial_homology(mesh) == want["full"]
    assert relative_homology(mesh) == want["relative"]
    assert boundary_homology(mesh) == want["boundary"]


@pytest.mark.parametrize("name", ["DISK1", "ANN1", "MOB1", "G2B1"])
@pytest.mark.parametrize("part", ["full", "relative", "boundary"])
def test_homology_against_field_ranks(name, part):
    mesh, _ = gen_fixture(name)
    C = simplicial_complex(mesh, part)
    G = {"full": simplicial_homology, "relative": relative_homology,
         "boundary": boundary_homology}[part](mesh)
    assert betti_by_elimination(C) == [G.betti(k) for k in (0, 1, 2)]
    # over GF(2), every Z/2^a summand in degree k adds to degrees k and k+1
    two = [sum(1 for t in G.torsion(k) if t % 2 == 0) for k in (0, 1, 2)]
    want = [G.betti(k) + two[k] + (two[k - 1] if k else 0) for k in (0, 1, 2)]
    assert betti_by_elimination(C, 2) == want


def test_genus_two_one_hole():
    mesh, _ = gen_fixture("G2B1")
    assert simplicial_homology(mesh) == H({0: Z, 1: (4, ())})
    assert relative_homology(mesh) == H({1: (4, ()), 2: Z})


def test_pair_les_examples():
    disk = les_of_pair(gen_fixture("DISK1")[0])
    assert disk.is_exact()
    assert [abs(v) for r in disk.delta[2].to_dense() for v in r] == [1]
    ann = les_of_pair(gen_fixture("ANN1")[0])
    assert ann.is_exact() and ann.map_ranks()["i1"] == 1
    mob = les_of_pair(gen_fixture("MOB1")[0])
    assert mob.is_exact()
    assert [abs(v) for r in mob.i_star[1].to_dense() for v in r] == [2]


@pytest.mark.parametrize("spec", [FixtureSpec("disk", 5), FixtureSpec("annulus", 4),
                                  FixtureSpec("mobius", 5), FixtureSpec("genus", 3, 1, 2)])
def test_invariant_under_subdivision(spec):
    mesh = build_mesh(spec)
    fine = mesh.subdivide()
    for fn in (simplicial_homology, relative_homology, boundary_homology):
        assert fn(fine) == fn(mesh)
    assert all(euler_checks(mesh).values()) and all(euler_checks(fine).values())


def test_euler_characteristic_from_face_counts():
    for name in ("DISK1", "ANN1", "MOB1", "G2B1"):
        mesh, _ = gen_fixture(name)
        v, e, f = (len(mesh.cells(k)) for k in (0, 1, 2))
        assert mesh.euler_characteristic() == v - e + f
        assert simplicial_homology(mesh).euler_characteristic() == v - e + f
