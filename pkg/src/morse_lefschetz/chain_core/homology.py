"""Integral homology with explicit generators and coordinates."""

from __future__ import annotations

from dataclasses import dataclass, field

from .complex import ChainMap, GradedComplex, InvalidComplex, NotAChainMap, mapping_cone
from .matrix import ZMatrix
from .reduce import Reduction, reduce_greedy
from .snf import inverse_unimodular, kernel_basis, smith_dense, solve_many


@dataclass(frozen=True)
class GradedAbelianGroup:
    """Per degree: free rank and torsion divisors d1 | d2 | ... (each > 1)."""

    groups: tuple[tuple[int, int, tuple[int, ...]], ...]

    @classmethod
    def from_dict(cls, d: dict[int, tuple[int, tuple[int, ...]]]) -> "GradedAbelianGroup":
        items = []
        for k in sorted(d):
            b, tors = d[k]
            tors = tuple(sorted(t for t in tors if t > 1))
            if b or tors:
                items.append((k, b, tors))
        return cls(tuple(items))

    def betti(self, k: int) -> int:
        return next((b for kk, b, _ in self.groups if kk == k), 0)

    def torsion(self, k: int) -> tuple[int, ...]:
        return next((t for kk, _, t in self.groups if kk == k), ())

    def betti_numbers(self, lo: int, hi: int) -> tuple[int, ...]:
        return tuple(self.betti(k) for k in range(lo, hi + 1))

    def euler_characteristic(self) -> int:
        return sum((-1) ** k * b for k, b, _ in self.groups)

    def to_json(self) -> dict[str, dict]:
        return {str(k): {"rank": b, "torsion": list(t)} for k, b, t in self.groups}

    def describe(self, k: int) -> str:
        parts = []
        b = self.betti(k)
        if b:
            parts.append("Z" if b == 1 else f"Z^{b}")
        parts += [f"Z/{t}" for t in self.torsion(k)]
        return " + ".join(parts) if parts else "0"

    def __str__(self) -> str:
        if not self.groups:
            return "0"
        return ", ".join(f"H{k}={self.describe(k)}" for k, _, _ in self.groups)


@dataclass
class _DegreeData:
    zbasis: list[list[int]]          # kernel basis in reduced-complex coordinates
    P: list[list[int]]               # change of coordinates for the kernel lattice
    divisors: list[int]              # divisor per generator (0 = free)
    generators: list[dict[int, int]]  # in the original complex basis
    gen_rows: list[int]              # row of P belonging to each generator


@dataclass
class Homology:
    """Homology of a complex with canonical generators.

    Generators in degree k are ordered torsion first (by divisor), then free.
    ``coordinates`` expresses a cycle in terms of them; torsion coordinates
    are reduced modulo their divisor.
    """

    complex: GradedComplex
    group: GradedAbelianGroup
    reduction: Reduction
    data: dict[int, _DegreeData] = field(default_factory=dict)

    def generators(self, k: int) -> list[dict[int, int]]:
        d = self.data.get(k)
        return d.generators if d else []

    def divisors(self, k: int) -> list[int]:
        d = self.data.get(k)
        return d.divisors if d else []

    def ngens(self, k: int) -> int:
        return len(self.divisors(k))

    def free_indices(self, k: int) -> list[int]:
        return [i for i, d in enumerate(self.divisors(k)) if d == 0]

    def coordinates(self, k: int, chain: dict[int, int]) -> list[int]:
        """Homology coordinates of a cycle of C_k."""
        dd = self.data.get(k)
        C = self.complex
        if chain and C.d(k).apply(chain):
            raise InvalidComplex(f"chain in degree {k} is not a cycle")
        if dd is None:
            return []
        red = self.reduction.proj.apply(k, chain)
        n = self.reduction.reduced.rank(k)
        vec = [0] * n
        for i, v in red.items():
            vec[i] = v
        zt = [[zb[i] for zb in dd.zbasis] for i in range(n)]
        (a,) = solve_many(zt, [vec]) if dd.zbasis else ([],)
        if a is None:
            raise InvalidComplex("cycle not in the kernel lattice")  # pragma: no cover
        coords = [sum(dd.P[i][j] * a[j] for j in range(len(a))) for i in range(len(a))]
        out = []
        for idx, dv in zip(dd.gen_rows, dd.divisors):
            c = coords[idx]
            out.append(c % dv if dv else c)
        return out


def homology(C: GradedComplex) -> Homology:
    """Homology of ``C`` (validated first) with generators and coordinates."""
    C.validate()
    red = reduce_greedy(C)
    R = red.reduced
    data: dict[int, _DegreeData] = {}
    groups: dict[int, tuple[int, tuple[int, ...]]] = {}
    for k in R.degrees:
        n = R.rank(k)
        if n == 0:
            continue
        zb = kernel_basis(R.d(k))
        z = len(zb)
        if z == 0:
            continue
        zt = [[v[i] for v in zb] for i in range(n)]
        dnext = R.d(k + 1)
        cols = [[dnext[i, j] for i in range(n)] for j in range(R.rank(k + 1))]
        sols = solve_many(zt, cols) if cols else []
        B = [[s[i] for s in sols] for i in range(z)]  # z x m
        U, D, _ = smith_dense(B, z, len(cols))
        diag = [D[i][i] if i < len(cols) else 0 for i in range(z)]
        Pinv = inverse_unimodular(U)
        rows, divs = [], []
        tors = sorted((i for i in range(z) if diag[i] > 1), key=lambda i: (diag[i], i))
        free = [i for i in range(z) if diag[i] == 0]
        for i in tors:
            rows.append(i)
            divs.append(diag[i])
        for i in free:
            rows.append(i)
            divs.append(0)
        gens = []
        for i in rows:
            vec_z = [Pinv[r][i] for r in range(z)]
            rvec = {t: sum(zb[j][t] * vec_z[j] for j in range(z)) for t in range(n)}
            rvec = {t: v for t, v in rvec.items() if v}
            gens.append(red.incl.apply(k, rvec))
        data[k] = _DegreeData(zb, U, divs, gens, rows)
        groups[k] = (len(free), tuple(diag[i] for i in tors))
    return Homology(C, GradedAbelianGroup.from_dict(groups), red, data)


def induced_map_on_homology(m: ChainMap, hs: Homology | None = None,
                            ht: Homology | None = None) -> dict[int, ZMatrix]:
    """Matrices of ``m_*`` on homology generators (rows: target, cols: source)."""
    if m.first_violation() is not None:
        raise NotAChainMap(f"chain condition fails in degree {m.first_violation()}")
    hs = hs or homology(m.source)
    ht = ht or homology(m.target)
    out = {}
    for k in sorted(set(m.source.degrees) | set(m.target.degrees)):
        cols = []
        for g in hs.generators(k):
            img = m.apply(k, g)
            cols.append(ht.coordinates(k, img))
        mat = ZMatrix(ht.ngens(k), hs.ngens(k))
        for j, c in enumerate(cols):
            for i, v in enumerate(c):
                if v:
                    mat[i, j] = v
        out[k] = mat
    return out


def is_quasi_isomorphism(m: ChainMap) -> bool:
    """True iff the mapping cone of ``m`` is acyclic."""
    if m.first_violation() is not None:
        raise NotAChainMap(f"chain condition fails in degree {m.first_violation()}")
    return not homology(mapping_cone(m)).group.groups
