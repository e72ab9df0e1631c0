"""Critical points with boundary types, the absolute / relative / boundary
Morse complexes, and the hat extension that turns the boundary complex into
a subcomplex with the relative complex as quotient.

Grading rules:

* absolute complex: interior points at their index, ``-`` boundary points at
  their boundary index;
* relative complex: interior points at their index, ``+`` boundary points at
  boundary index + 1;
* boundary complex: all boundary points at their boundary index.

Orbit counts are stored as sparse ``(source, target) -> count`` maps keyed by
critical point ids.  A hatted generator is written ``id^``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Iterable

from .chain_core import (ChainMap, GradedComplex, InvalidComplex, LongExactSequence,
                         ShortExactSequence, TwistNotCompatible, ZMatrix, exactness_failures,
                         homology, is_quasi_isomorphism, long_exact_sequence, reduce_by_pairs,
                         twisted_sum)
from .chain_core.snf import solve

SCHEMA_VERSION = 1

Counts = dict[tuple[str, str], int]


class NotAComplex(InvalidComplex):
    pass


class BirthPairMissing(ValueError):
    pass


class InvalidMorseData(ValueError):
    pass


def hat_id(pid: str) -> str:
    return pid + "^"


@dataclass(frozen=True)
class CriticalPoint:
    id: str
    locus: str                  # interior | boundary
    index: int
    btype: str | None = None    # "+" | "-" for boundary points
    cell: tuple | None = None

    def __post_init__(self) -> None:
        if self.locus not in ("interior", "boundary"):
            raise InvalidMorseData(f"{self.id}: unknown locus {self.locus!r}")
        if (self.locus == "boundary") != (self.btype in ("+", "-")):
            raise InvalidMorseData(f"{self.id}: boundary type must be given exactly for boundary points")
        if self.index < 0:
            raise InvalidMorseData(f"{self.id}: negative index")

    @property
    def is_plus(self) -> bool:
        return self.btype == "+"

    @property
    def is_minus(self) -> bool:
        return self.btype == "-"


OrientationAssignment = dict[str, int]


@dataclass
class MorseData:
    """Combinatorial Morse data of a manifold with boundary."""

    n: int
    points: list[CriticalPoint]
    N_minus: Counts = field(default_factory=dict)
    N_plus: Counts = field(default_factory=dict)
    N_boundary: Counts = field(default_factory=dict)
    Phi: Counts = field(default_factory=dict)
    eps_minus: OrientationAssignment = field(default_factory=dict)
    eps_plus: OrientationAssignment = field(default_factory=dict)
    oriented: bool = True
    phi_complete: bool = True

    def __post_init__(self) -> None:
        self._by_id = {}
        for p in self.points:
            if p.id in self._by_id:
                raise InvalidMorseData(f"duplicate critical point id {p.id!r}")
            top = self.n if p.locus == "interior" else self.n - 1
            if p.index > top:
                raise InvalidMorseData(f"{p.id}: index {p.index} exceeds {top}")
            self._by_id[p.id] = p

    def point(self, pid: str) -> CriticalPoint:
        return self._by_id[pid]

    @property
    def interior(self) -> list[CriticalPoint]:
        return [p for p in self.points if p.locus == "interior"]

    @property
    def boundary(self) -> list[CriticalPoint]:
        return [p for p in self.points if p.locus == "boundary"]

    @property
    def plus(self) -> list[CriticalPoint]:
        return [p for p in self.points if p.is_plus]

    @property
    def minus(self) -> list[CriticalPoint]:
        return [p for p in self.points if p.is_minus]

    # -- invariants -------------------------------------------------------
    def remark_violations(self) -> dict[str, list[tuple[str, str, int]]]:
        """Entries that the vanishing conditions forbid (empty lists when they hold)."""
        out = {"minus_into_interior": [], "interior_into_plus": []}
        for (s, t), v in sorted(self.N_minus.items()):
            if v and self.point(s).is_minus and self.point(t).locus == "interior":
                out["minus_into_interior"].append((s, t, v))
        for (s, t), v in sorted(self.N_plus.items()):
            if v and self.point(s).locus == "interior" and self.point(t).is_plus:
                out["interior_into_plus"].append((s, t, v))
        return out

    def boundary_agreement_violations(self) -> list[tuple[str, str]]:
        """Pairs of ``-`` points where N⁻ and N∂ disagree.

        The equality is only expected without ``+`` points: otherwise an
        absolute flow line may leave the boundary through a pushed-in ``+``
        point and come back, so the check returns [] in that case.
        """
        if self.plus:
            return []
        bad = []
        mins = {p.id for p in self.minus}
        keys = {k for k in set(self.N_minus) | set(self.N_boundary) if k[0] in mins and k[1] in mins}
        for k in sorted(keys):
            if self.N_minus.get(k, 0) != self.N_boundary.get(k, 0):
                bad.append(k)
        return bad

    def birth_pair_violations(self) -> list[str]:
        return [p.id for p in self.plus if self.Phi.get((hat_id(p.id), p.id), 0) not in (1, -1)]

    def validate(self, strict_remark: bool = False) -> "MorseData":
        for name, counts in (("N_minus", self.N_minus), ("N_plus", self.N_plus),
                             ("N_boundary", self.N_boundary)):
            for s, t in counts:
                if s not in self._by_id or t not in self._by_id:
                    raise InvalidMorseData(f"{name} refers to an unknown point in {(s, t)}")
        if self.phi_complete and self.birth_pair_violations():
            raise BirthPairMissing(f"no unit birth-pair entry for {self.birth_pair_violations()[0]}")
        bad = self.boundary_agreement_violations()
        if bad:
            raise InvalidMorseData(f"N⁻ and N∂ disagree on {bad[0]}")
        if strict_remark:
            for key, entries in self.remark_violations().items():
                if entries:
                    raise InvalidMorseData(f"{key}: forbidden entry {entries[0]}")
        return self

    # -- serialization ----------------------------------------------------
    def to_json(self) -> dict[str, Any]:
        def trip(c: Counts) -> list[list]:
            return [[s, t, v] for (s, t), v in sorted(c.items()) if v]

        return {
            "schema_version": SCHEMA_VERSION,
            "n": self.n,
            "points": [{"id": p.id, "locus": p.locus, "index": p.index,
                        **({"btype": p.btype} if p.btype else {}),
                        **({"cell": list(p.cell)} if p.cell is not None else {})}
                       for p in self.points],
            "N_minus": trip(self.N_minus),
            "N_plus": trip(self.N_plus),
            "N_boundary": trip(self.N_boundary),
            "Phi": trip(self.Phi),
            "eps_minus": dict(sorted(self.eps_minus.items())),
            "eps_plus": dict(sorted(self.eps_plus.items())),
            "oriented": self.oriented,
            "phi_complete": self.phi_complete,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_json(cls, obj: dict[str, Any]) -> "MorseData":
        try:
            pts = [CriticalPoint(p["id"], p["locus"], int(p["index"]), p.get("btype"),
                                 tuple(p["cell"]) if "cell" in p else None)
                   for p in obj["points"]]

            def counts(key: str) -> Counts:
                out: Counts = {}
                for s, t, v in obj.get(key, []):
                    out[(str(s), str(t))] = out.get((str(s), str(t)), 0) + int(v)
                return out

            return cls(int(obj["n"]), pts, counts("N_minus"), counts("N_plus"),
                       counts("N_boundary"), counts("Phi"),
                       {k: int(v) for k, v in obj.get("eps_minus", {}).items()},
                       {k: int(v) for k, v in obj.get("eps_plus", {}).items()},
                       bool(obj.get("oriented", True)), bool(obj.get("phi_complete", True)))
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, InvalidMorseData):
                raise
            raise InvalidMorseData(f"malformed Morse data: {exc}") from exc


# -- complexes ------------------------------------------------------------------

def _assemble(gens: list[tuple[int, str]], counts: Counts, eps: OrientationAssignment,
              what: str) -> GradedComplex:
    basis: dict[int, list[str]] = {}
    deg = {}
    for k, g in gens:
        basis.setdefault(k, []).append(g)
        deg[g] = k
    entries = []
    for (s, t), v in sorted(counts.items()):
        if not v or s not in deg or t not in deg:
            continue
        if deg[t] != deg[s] - 1:
            raise InvalidMorseData(f"{what}: count {s} -> {t} does not lower the degree by one")
        entries.append((deg[s], s, t, v * eps.get(s, 1) * eps.get(t, 1)))
    C = GradedComplex.from_entries(basis, entries)
    try:
        return C.validate()
    except InvalidComplex as exc:
        raise NotAComplex(f"{what}: {exc}") from exc


def absolute_generators(d: MorseData) -> list[tuple[int, str]]:
    return [(p.index, p.id) for p in d.points if p.locus == "interior" or p.is_minus]


def relative_generators(d: MorseData) -> list[tuple[int, str]]:
    return [(p.index + (1 if p.is_plus else 0), p.id) for p in d.points
            if p.locus == "interior" or p.is_plus]


def boundary_generators(d: MorseData) -> list[tuple[int, str]]:
    return [(p.index, p.id) for p in d.boundary]


def build_absolute_complex(d: MorseData, eps: OrientationAssignment | None = None) -> GradedComplex:
    """C⁻: interior points and ``-`` boundary points, differential from N⁻."""
    return _assemble(absolute_generators(d), d.N_minus, d.eps_minus if eps is None else eps,
                     "absolute complex")


def build_relative_complex(d: MorseData, eps: OrientationAssignment | None = None) -> GradedComplex:
    """C⁺: interior points and ``+`` boundary points shifted up by one, differential from N⁺."""
    return _assemble(relative_generators(d), d.N_plus, d.eps_plus if eps is None else eps,
                     "relative complex")


def build_boundary_complex(d: MorseData) -> GradedComplex:
    """Morse complex of the restriction to the boundary, differential from N∂."""
    return _assemble(boundary_generators(d), d.N_boundary, {}, "boundary complex")


# -- hat extension --------------------------------------------------------------

@dataclass
class HatExtension:
    complex: GradedComplex        # Ĉ
    ses: ShortExactSequence       # 0 -> C∂ -> Ĉ -> Q -> 0, Q = C⁺ with x written x^
    j: ChainMap                   # Q -> C⁺ (relabelling, ε⁺ signs)
    phi: dict[int, ZMatrix]
    solved_entries: Counts = field(default_factory=dict)

    @property
    def quotient(self) -> GradedComplex:
        return self.ses.C


def _hat_quotient(d: MorseData) -> GradedComplex:
    """C⁺ with raw counts and every ``+`` point x renamed to its hat."""
    ren = {p.id: hat_id(p.id) for p in d.plus}
    gens = [(k, ren.get(g, g)) for k, g in relative_generators(d)]
    counts = {(ren.get(s, s), ren.get(t, t)): v for (s, t), v in d.N_plus.items()}
    return _assemble(gens, counts, {}, "relative complex")


def _solve_phi(d: MorseData, sub: GradedComplex, quot: GradedComplex) -> Counts:
    """Fill the unspecified twist entries so that d∂ φ + φ d⁺ = 0 (integer solve)."""
    ks = sorted(set(sub.degrees) | set(quot.degrees))
    unknown = []
    for k in ks:
        for q in quot.gens(k):
            for b in sub.gens(k - 1):
                if (q, b) not in d.Phi:
                    unknown.append((k, q, b))
    if not unknown:
        return {}
    col = {(q, b): i for i, (_, q, b) in enumerate(unknown)}
    rows: dict[tuple[int, str, str], dict[int, int]] = {}
    rhs: dict[tuple[int, str, str], int] = {}

    def phi_term(key: tuple[int, str, str], q: str, b: str, coeff: int) -> None:
        if not coeff:
            return
        if (q, b) in d.Phi:
            rhs[key] = rhs.get(key, 0) - coeff * d.Phi[(q, b)]
        elif (q, b) in col:
            r = rows.setdefault(key, {})
            r[col[(q, b)]] = r.get(col[(q, b)], 0) + coeff

    for k in ks:
        for q in quot.gens(k):
            for b2 in sub.gens(k - 2):
                key = (k, q, b2)
                # (d∂ φ)(q)[b2] = sum_b d∂(b)[b2] φ(q)[b]
                for b in sub.gens(k - 1):
                    phi_term(key, q, b, sub.entry(k - 1, b2, b))
                # (φ d⁺)(q)[b2] = sum_q2 d⁺(q)[q2] φ(q2)[b2]
                for q2 in quot.gens(k - 1):
                    phi_term(key, q2, b2, quot.entry(k, q2, q))
    keys = sorted(set(rows) | set(rhs))
    A = ZMatrix(len(keys), len(unknown))
    bvec = []
    for i, key in enumerate(keys):
        for j, v in rows.get(key, {}).items():
            if v:
                A[i, j] = v
        bvec.append(rhs.get(key, 0))
    sol = solve(A, bvec) if keys else [0] * len(unknown)
    if sol is None:
        k = keys[0][0] if keys else 0
        raise TwistNotCompatible(k, "no integer twist completes the given entries")
    return {(q, b): v for (_, q, b), v in zip(unknown, sol) if v}


def hat_extension(d: MorseData) -> HatExtension:
    """Ĉ as the twisted sum of C∂ and C⁺ (hats in place of ``+`` points)."""
    bad = d.birth_pair_violations()
    if bad:
        raise BirthPairMissing(f"+ point {bad[0]} has no unit birth-pair entry")
    sub = build_boundary_complex(d)
    quot = _hat_quotient(d)
    solved = {} if d.phi_complete else _solve_phi(d, sub, quot)
    phi_counts = {**d.Phi, **solved}
    phi: dict[int, ZMatrix] = {}
    for k in quot.degrees:
        m = ZMatrix(sub.rank(k - 1), quot.rank(k))
        for j, q in enumerate(quot.gens(k)):
            for i, b in enumerate(sub.gens(k - 1)):
                v = phi_counts.get((q, b), 0)
                if v:
                    m[i, j] = v
        phi[k] = m
    for (q, b), v in phi_counts.items():
        if v and not any(quot.has(k, q) and sub.has(k - 1, b) for k in quot.degrees):
            raise TwistNotCompatible(-1, f"twist entry {q} -> {b} does not lower the degree by one")
    total, ses = twisted_sum(sub, quot, phi)
    Cplus = build_relative_complex(d)
    back = {hat_id(p.id): p.id for p in d.plus}
    signs = {g: d.eps_plus.get(back.get(g, g), 1) for k in quot.degrees for g in quot.gens(k)}
    j = ChainMap.by_labels(quot, Cplus, back, signs)
    return HatExtension(total, ses, j, phi, solved)


# -- theorem 1 checks -----------------------------------------------------------

def _same_up_to_order(A: GradedComplex, B: GradedComplex) -> bool:
    ks = set(A.degrees) | set(B.degrees)
    for k in ks:
        if sorted(A.gens(k)) != sorted(B.gens(k)):
            return False
    for k in ks:
        for s in A.gens(k):
            for t in A.gens(k - 1):
                if A.entry(k, t, s) != B.entry(k, t, s):
                    return False
    return True


def _permutation(source: GradedComplex, target: GradedComplex) -> ChainMap:
    return ChainMap.by_labels(source, target)


def birth_pair_comparison(d: MorseData, ext: HatExtension) -> ChainMap | None:
    """Chain map C⁻ -> Ĉ obtained by cancelling every birth pair {x, x̂} in Ĉ.

    Returns None when the cancelled complex is not C⁻ itself (possible for
    hand-authored data).
    """
    C = ext.complex
    pairs = []
    for p in d.plus:
        pairs.append((p.index, p.id, hat_id(p.id)))
    red = reduce_by_pairs(C, pairs)
    raw_minus = build_absolute_complex(d, eps={})
    if not _same_up_to_order(red.reduced, raw_minus):
        return None
    perm = _permutation(raw_minus, red.reduced)
    signs = ChainMap.by_labels(build_absolute_complex(d), raw_minus, signs=d.eps_minus)
    return red.incl.compose(perm).compose(signs)


def _ranks_equal(a: dict[str, int], b: dict[str, int]) -> bool:
    return all(a.get(k, 0) == b.get(k, 0) for k in set(a) | set(b))


@dataclass
class Theorem1Report:
    generator_count: bool
    exact: bool
    exact_failures: list[tuple[int, str]]
    homology_hat: str
    homology_minus: str
    homology_equal: bool
    comparison: str               # "chain map" | "homology-equal" | "none"
    les_exact: bool | None
    les_ranks: dict[str, int] | None
    oracle_ranks: dict[str, int] | None = None
    connecting_map: dict[int, list[list[int]]] | None = None

    @property
    def les_match(self) -> bool | None:
        if self.oracle_ranks is None or self.les_ranks is None:
            return None
        return _ranks_equal(self.les_ranks, self.oracle_ranks)

    @property
    def passed(self) -> bool:
        return (self.generator_count and self.exact and self.homology_equal
                and bool(self.les_exact) and self.les_match is not False)

    def to_json(self) -> dict[str, Any]:
        return {
            "generator_count": self.generator_count,
            "exact": self.exact,
            "exact_failures": [[k, r] for k, r in self.exact_failures],
            "homology_hat": self.homology_hat,
            "homology_minus": self.homology_minus,
            "homology_equal": self.homology_equal,
            "comparison": self.comparison,
            "les_exact": self.les_exact,
            "les_ranks": dict(sorted(self.les_ranks.items())) if self.les_ranks else self.les_ranks,
            "oracle_ranks": dict(sorted(self.oracle_ranks.items())) if self.oracle_ranks else None,
            "les_match": self.les_match,
            "passed": self.passed,
        }


def verify_theorem1(d: MorseData, ext: HatExtension | None = None,
                    oracle: LongExactSequence | None = None) -> Theorem1Report:
    """Exactness of 0 -> C∂ -> Ĉ -> C⁺ -> 0, H(Ĉ) = H(C⁻), and the derived LES."""
    ext = ext or hat_extension(d)
    Cminus = build_absolute_complex(d)
    count_ok = ext.complex.size() == Cminus.size() + 2 * len(d.plus)
    fails = exactness_failures(ext.ses)
    h_hat = homology(ext.complex).group
    h_minus = homology(Cminus).group
    comparison = "none"
    if h_hat == h_minus:
        comparison = "homology-equal"
        m = birth_pair_comparison(d, ext)
        if m is not None and is_quasi_isomorphism(m):
            comparison = "chain map"
    les_exact, ranks, delta = None, None, None
    if not fails:
        les = long_exact_sequence(ext.ses)
        les_exact = les.is_exact()
        ranks = les.map_ranks()
        delta = {k: m.to_dense() for k, m in les.delta.items() if m.nrows and m.ncols}
    oranks = oracle.map_ranks() if oracle is not None else None
    return Theorem1Report(count_ok, not fails, fails, str(h_hat), str(h_minus), h_hat == h_minus,
                          comparison, les_exact, ranks, oranks, delta)
