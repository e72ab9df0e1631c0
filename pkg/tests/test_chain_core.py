from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import leibniz_det, matmul, minor_gcd, random_complex, random_unimodular
from morse_lefschetz.chain_core import (ChainMap, GradedAbelianGroup, GradedComplex,
                                        InvalidComplex, NotAChainMap, ShortExactSequence,
                                        TwistNotCompatible, ZMatrix, check_exactness, homology,
                                        induced_map_on_homology, is_quasi_isomorphism,
                                        long_exact_sequence, mapping_cone, reduce_greedy,
                                        smith_normal_form, solve, twisted_sum,
                                        validate_chain_map)
from morse_lefschetz.chain_core.snf import determinant, kernel_basis

small_ints = st.integers(min_value=-9, max_value=9)


def matrices(max_side=5):
    return st.integers(1, max_side).flatmap(
        lambda m: st.integers(1, max_side).flatmap(
            lambda n: st.lists(st.lists(small_ints, min_size=n, max_size=n), min_size=m, max_size=m)))


def check_snf(a):
    U, D, V = smith_normal_form(a)
    u, d, v = U.to_dense(), D.to_dense(), V.to_dense()
    assert matmul(matmul(u, a), v) == d
    assert abs(leibniz_det(u)) == 1 and abs(leibniz_det(v)) == 1
    diag = [d[i][i] for i in range(min(len(d), len(d[0])))]
    for i, row in enumerate(d):
        for j, x in enumerate(row):
            assert i == j or x == 0
    assert all(x >= 0 for x in diag)
    for x, y in zip(diag, diag[1:]):
        assert (x == 0 and y == 0) or (x != 0 and y % x == 0)
    return diag


# --- Smith normal form -------------------------------------------------------

def test_snf_small_examples():
    assert check_snf([[1, 0, 0], [0, 1, 0], [0, 0, 1]]) == [1, 1, 1]
    assert check_snf([[2]]) == [2]
    assert check_snf([[2, 4], [6, 8]]) == [2, 4]


@settings(max_examples=150, deadline=None)
@given(matrices(4))
def test_snf_divisors_match_minor_gcds(a):
    diag = check_snf(a)
    prod = 1
    for i, d in enumerate(diag, start=1):
        prod *= d
        assert prod == minor_gcd(a, i)


@settings(max_examples=100, deadline=None)
@given(matrices(8))
def test_snf_is_deterministic(a):
    first = [m.to_dense() for m in smith_normal_form(a)]
    again = [m.to_dense() for m in smith_normal_form([row[:] for row in a])]
    assert first == again


@settings(max_examples=100, deadline=None)
@given(st.lists(st.lists(small_ints, min_size=5, max_size=5), min_size=5, max_size=5))
def test_bareiss_matches_cofactor_expansion(a):
    assert determinant(a) == leibniz_det(a)


def test_snf_handles_huge_entries():
    big = 10 ** 40
    diag = check_snf([[big, 2 * big], [3 * big, 5 * big + 1]])
    assert diag[0] * diag[1] == abs(leibniz_det([[big, 2 * big], [3 * big, 5 * big + 1]]))


@settings(max_examples=80, deadline=None)
@given(matrices(6), st.lists(small_ints, min_size=6, max_size=6))
def test_solve_and_kernel(a, x):
    n = len(a[0])
    x = x[:n]
    b = [sum(r[j] * x[j] for j in range(n)) for r in a]
    y = solve(a, b)
    assert y is not None
    assert [sum(r[j] * y[j] for j in range(n)) for r in a] == b
    for v in kernel_basis(a):
        assert all(sum(r[j] * v[j] for j in range(n)) == 0 for r in a)


def test_solve_reports_no_integer_solution():
    assert solve([[2]], [1]) is None


# --- homology ------------------------------------------------------------------

def _complex(basis, entries):
    return GradedComplex.from_entries(basis, entries)


def test_homology_small_examples():
    circle = _complex({0: ["v"], 1: ["e"]}, [])
    assert homology(circle).group == GradedAbelianGroup.from_dict({0: (1, ()), 1: (1, ())})
    interval = _complex({0: ["v0", "v1"], 1: ["e"]}, [(1, "e", "v1", 1), (1, "e", "v0", -1)])
    assert homology(interval).group == GradedAbelianGroup.from_dict({0: (1, ())})
    rp = _complex({0: ["v"], 1: ["e"]}, [(1, "e", "v", 2)])
    assert homology(rp).group == GradedAbelianGroup.from_dict({0: (0, (2,))})


def test_homology_rejects_non_complex():
    bad = _complex({0: ["v"], 1: ["e"], 2: ["t"]}, [(1, "e", "v", 1), (2, "t", "e", 1)])
    with pytest.raises(InvalidComplex):
        homology(bad)


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10 ** 9))
def test_homology_of_random_complexes(seed):
    C, expected = random_complex(random.Random(seed))
    assert C.is_valid()
    H = homology(C)
    assert H.group == GradedAbelianGroup.from_dict(expected)
    assert H.group.euler_characteristic() == C.euler_characteristic()
    for k in C.degrees:
        for g in H.generators(k):
            assert not C.d(k).apply(g)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10 ** 9))
def test_homology_invariant_under_signed_permutation(seed):
    rng = random.Random(seed)
    C, _ = random_complex(rng)
    perm = {k: rng.sample(C.gens(k), len(C.gens(k))) for k in C.degrees}
    signs = {x: rng.choice([1, -1]) for k in C.degrees for x in C.gens(k)}
    entries = [(k, C.gens(k)[j], C.gens(k - 1)[i], signs[C.gens(k)[j]] * signs[C.gens(k - 1)[i]] * v)
               for k in C.degrees for i, j, v in C.d(k).entries()]
    D = GradedComplex.from_entries(perm, entries)
    assert homology(D).group == homology(C).group


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10 ** 9))
def test_greedy_reduction_is_a_homotopy_equivalence(seed):
    C, _ = random_complex(random.Random(seed))
    red = reduce_greedy(C, track_homotopy=True)
    assert validate_chain_map(red.incl) and validate_chain_map(red.proj)
    # proj ∘ incl = id on the reduced complex
    pi = red.proj.compose(red.incl)
    for k in red.reduced.degrees:
        assert pi.at(k) == ZMatrix.identity(red.reduced.rank(k))
    assert is_quasi_isomorphism(red.incl)


# --- chain maps ----------------------------------------------------------------

def test_zero_and_identity_maps_are_chain_maps():
    C, _ = random_complex(random.Random(3))
    assert validate_chain_map(ChainMap.zero(C, C))
    assert validate_chain_map(ChainMap.identity(C))
    assert is_quasi_isomorphism(ChainMap.identity(C))
    for k, m in induced_map_on_homology(ChainMap.identity(C)).items():
        assert m == ZMatrix.identity(m.nrows)


def test_broken_chain_map_is_detected():
    interval = _complex({0: ["v0", "v1"], 1: ["e"]}, [(1, "e", "v1", 1), (1, "e", "v0", -1)])
    m = ChainMap(interval, interval, {0: ZMatrix.identity(2), 1: ZMatrix.zeros(1, 1)})
    assert not validate_chain_map(m)
    with pytest.raises(NotAChainMap):
        induced_map_on_homology(m)


def test_summand_with_acyclic_complement_is_quasi_iso():
    A = _complex({0: ["p"]}, [])
    B = _complex({0: ["p", "q"], 1: ["e"]}, [(1, "e", "q", 1)])
    assert is_quasi_isomorphism(ChainMap.by_labels(A, B))
    assert not is_quasi_isomorphism(ChainMap.zero(A, B))


def test_mapping_cone_of_identity_is_acyclic():
    C, _ = random_complex(random.Random(11))
    assert not homology(mapping_cone(ChainMap.identity(C))).group.groups


# --- exact sequences ---------------------------------------------------------

def test_identity_zero_sequence_is_exact():
    C, _ = random_complex(random.Random(5))
    Z = GradedComplex({k: [] for k in C.degrees})
    s = ShortExactSequence(ChainMap.identity(C), ChainMap.zero(C, Z))
    assert check_exactness(s)
    assert long_exact_sequence(s).is_exact()


def test_corrupted_twist_breaks_exactness():
    sub = _complex({0: ["m"], 1: ["x"]}, [])
    quot = _complex({2: ["y"]}, [])
    tot, s = twisted_sum(sub, quot, {2: ZMatrix.from_dense([[1]])})
    assert check_exactness(s)
    assert homology(tot).group == GradedAbelianGroup.from_dict({0: (1, ())})
    bad = ShortExactSequence(s.sub, ChainMap(tot, quot, {}))
    assert not check_exactness(bad)


def test_incompatible_twist_rejected():
    sub = _complex({0: ["m"], 1: ["x"]}, [(1, "x", "m", 1)])
    quot = _complex({1: ["a"], 2: ["b"]}, [])
    with pytest.raises(TwistNotCompatible):
        twisted_sum(sub, quot, {2: ZMatrix.from_dense([[1]])})


def test_twist_zero_is_direct_sum():
    A, _ = random_complex(random.Random(1))
    B, _ = random_complex(random.Random(2))
    B = B.relabel({x: "q" + x for k in B.degrees for x in B.gens(k)})
    tot, s = twisted_sum(A, B, {})
    gA, gB, gT = (homology(X).group for X in (A, B, tot))
    for k in tot.degrees:
        assert gT.betti(k) == gA.betti(k) + gB.betti(k)


def _acyclic_with_twist(rng, sub):
    """An acyclic quotient q_k -> q_{k-1} (unit pieces) and a random compatible twist."""
    basis, entries = {}, []
    for k in range(1, 3):
        a, b = f"u{k}", f"w{k - 1}"
        basis.setdefault(k, []).append(a)
        basis.setdefault(k - 1, []).append(b)
        entries.append((k, a, b, 1))
    quot = GradedComplex.from_entries(basis, entries)
    # φ = d_sub∘h - h∘d_quot from a random degree-0 map h: quot -> sub
    h = {k: ZMatrix.from_dense([[rng.randint(-2, 2) for _ in quot.gens(k)] for _ in sub.gens(k)],
                               quot.rank(k)) if sub.rank(k) else ZMatrix(0, quot.rank(k))
         for k in quot.degrees}
    phi = {}
    for k in range(0, 4):
        hk = h.get(k, ZMatrix(sub.rank(k), quot.rank(k)))
        hk1 = h.get(k - 1, ZMatrix(sub.rank(k - 1), quot.rank(k - 1)))
        phi[k] = sub.d(k) @ hk + (hk1 @ quot.d(k)).scale(-1)
    return quot, phi


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10 ** 9))
def test_twisted_sum_les_is_exact(seed):
    rng = random.Random(seed)
    sub, _ = random_complex(rng, top=2)
    quot, phi = _acyclic_with_twist(rng, sub)
    tot, s = twisted_sum(sub, quot, phi)
    assert check_exactness(s)
    les = long_exact_sequence(s)
    assert les.is_exact()
    assert homology(tot).group == homology(sub).group


def test_dual_complex_is_a_complex_with_transposed_homology_rank():
    rng = random.Random(9)
    for _ in range(20):
        C, _ = random_complex(rng)
        D = C.dual(3)
        assert D.is_valid()
        for j in D.degrees:
            assert D.rank(j) == C.rank(3 - j)
        assert homology(D).group.euler_characteristic() == -C.euler_characteristic()


def test_unimodular_helper_gives_inverse_pairs():
    rng = random.Random(0)
    for n in range(1, 6):
        P, Q = random_unimodular(rng, n)
        assert matmul(P, Q) == [[int(i == j) for j in range(n)] for i in range(n)]
