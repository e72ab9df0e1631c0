"""Short exact sequences of complexes, their long exact homology sequences,
and twisted sums (extensions built from a degree -1 twist)."""

from __future__ import annotations

from dataclasses import dataclass, field

from .complex import ChainMap, GradedComplex, InvalidComplex, Label
from .homology import Homology, homology, induced_map_on_homology
from .matrix import ZMatrix
from .snf import hnf_columns, invariant_factors, kernel_basis, rank, solve


class NotExact(ValueError):
    pass


class TwistNotCompatible(ValueError):
    def __init__(self, degree: int, msg: str = ""):
        super().__init__(msg or f"twist condition d∘φ + φ∘d = 0 fails in degree {degree}")
        self.degree = degree


@dataclass
class ShortExactSequence:
    """0 -> A --sub--> B --quot--> C -> 0 (exactness is checked, not assumed)."""

    sub: ChainMap
    quot: ChainMap

    @property
    def A(self) -> GradedComplex:
        return self.sub.source

    @property
    def B(self) -> GradedComplex:
        return self.sub.target

    @property
    def C(self) -> GradedComplex:
        return self.quot.target


def _coordinate_columns(m: ZMatrix) -> dict[int, tuple[int, int]] | None:
    """If every column has at most one ±1 entry and rows are hit at most once,
    return ``{col: (row, sign)}``; else None."""
    out = {}
    seen = set()
    for j, col in m.cols.items():
        if len(col) != 1:
            return None
        (i, v), = col.items()
        if v not in (1, -1) or i in seen:
            return None
        seen.add(i)
        out[j] = (i, v)
    return out


def preimage(m: ZMatrix, vec: dict[int, int]) -> dict[int, int] | None:
    """Some integer x with ``m x = vec`` (None if there is none)."""
    coord = _coordinate_columns(m)
    if coord is not None:
        inv = {i: (j, s) for j, (i, s) in coord.items()}
        x = {}
        for i, v in vec.items():
            if i not in inv:
                return None
            j, s = inv[i]
            x[j] = s * v
        return x
    b = [0] * m.nrows
    for i, v in vec.items():
        b[i] = v
    sol = solve(m, b)
    if sol is None:
        return None
    return {j: v for j, v in enumerate(sol) if v}


def exactness_failures(s: ShortExactSequence) -> list[tuple[int, str]]:
    """Degreewise check of injectivity, surjectivity and im(sub) = ker(quot) over Z."""
    fails = []
    ks = sorted(set(s.A.degrees) | set(s.B.degrees) | set(s.C.degrees))
    for k in ks:
        i, q = s.sub.at(k), s.quot.at(k)
        nA, nB, nC = s.A.rank(k), s.B.rank(k), s.C.rank(k)
        ci, cq = _coordinate_columns(i), _coordinate_columns(q)
        if ci is not None and cq is not None and len(ci) == nA and len(cq) == nC and \
                len({r for r, _ in cq.values()}) == nC:
            hit = {r for r, _ in ci.values()}
            killed = set(range(nB)) - set(cq)
            if hit != killed:
                fails.append((k, "image of sub differs from kernel of quot"))
            continue
        if rank(i) != nA:
            fails.append((k, "sub is not injective"))
            continue
        facs = invariant_factors(q)
        if len(facs) != nC or any(f != 1 for f in facs):
            fails.append((k, "quot is not surjective over Z"))
            continue
        if not (q @ i).is_zero():
            fails.append((k, "quot ∘ sub != 0"))
            continue
        for v in kernel_basis(q):
            if preimage(i, {t: x for t, x in enumerate(v) if x}) is None:
                fails.append((k, "kernel of quot strictly larger than image of sub"))
                break
    return fails


def check_exactness(s: ShortExactSequence) -> bool:
    return not exactness_failures(s)


# -- long exact sequence ----------------------------------------------------

def _relations(divs: list[int]) -> list[list[int]]:
    g = len(divs)
    return [[d if r == i else 0 for r in range(g)] for i, d in enumerate(divs) if d]


def _span_hnf(cols: list[list[int]], g: int) -> list[list[int]]:
    cols = [c for c in cols if any(c)]
    return hnf_columns(cols, g) if g else []


def _slot_exact(alpha: ZMatrix, beta: ZMatrix, divs_mid: list[int], divs_out: list[int]) -> bool:
    """im(alpha) = ker(beta) inside H_mid = Z^g / relations."""
    g = len(divs_mid)
    if g == 0:
        return True
    rel_mid = _relations(divs_mid)
    img = [[alpha[r, j] for r in range(g)] for j in range(alpha.ncols)] + rel_mid
    # ker beta: v with beta v in span(rel_out)
    rel_out = _relations(divs_out)
    go = len(divs_out)
    if go == 0:
        ker = [[int(r == j) for r in range(g)] for j in range(g)]
    else:
        big = ZMatrix(go, g + len(rel_out))
        for j in range(g):
            for r in range(go):
                big[r, j] = beta[r, j]
        for t, rel in enumerate(rel_out):
            for r in range(go):
                big[r, g + t] = rel[r]
        ker = [v[:g] for v in kernel_basis(big)] + rel_mid
    return _span_hnf(img, g) == _span_hnf(ker, g)


@dataclass
class LongExactSequence:
    """Maps of ... -> H_k(A) -> H_k(B) -> H_k(C) -> H_{k-1}(A) -> ... on generators."""

    hA: Homology
    hB: Homology
    hC: Homology
    i_star: dict[int, ZMatrix]
    q_star: dict[int, ZMatrix]
    delta: dict[int, ZMatrix]   # delta[k]: H_k(C) -> H_{k-1}(A)
    degrees: list[int] = field(default_factory=list)

    def _zero(self, rows: int, cols: int) -> ZMatrix:
        return ZMatrix(rows, cols)

    def slot_failures(self) -> list[str]:
        out = []
        for k in self.degrees:
            gA, gB, gC = self.hA.divisors(k), self.hB.divisors(k), self.hC.divisors(k)
            gA1 = self.hA.divisors(k - 1)
            d_in = self.delta.get(k + 1, self._zero(len(gA), self.hC.ngens(k + 1)))
            if not _slot_exact(d_in, self.i_star[k], gA, gB):
                out.append(f"H_{k}(sub)")
            if not _slot_exact(self.i_star[k], self.q_star[k], gB, gC):
                out.append(f"H_{k}(mid)")
            if not _slot_exact(self.q_star[k], self.delta[k], gC, gA1):
                out.append(f"H_{k}(quot)")
        return out

    def is_exact(self) -> bool:
        return not self.slot_failures()

    def connecting_ranks(self) -> dict[int, int]:
        """Rank (over Q) of each connecting map, torsion rows/cols dropped."""
        out = {}
        for k, m in self.delta.items():
            rows = self.hA.free_indices(k - 1)
            cols = self.hC.free_indices(k)
            out[k] = rank(m.submatrix(rows, cols)) if rows and cols else 0
        return out

    def map_ranks(self) -> dict[str, int]:
        out = {}
        for name, maps, src, tgt, shift in (("i", self.i_star, self.hA, self.hB, 0),
                                            ("q", self.q_star, self.hB, self.hC, 0),
                                            ("delta", self.delta, self.hC, self.hA, -1)):
            for k, m in maps.items():
                rows, cols = tgt.free_indices(k + shift), src.free_indices(k)
                out[f"{name}{k}"] = rank(m.submatrix(rows, cols)) if rows and cols else 0
        return out


def long_exact_sequence(s: ShortExactSequence, hA: Homology | None = None,
                        hB: Homology | None = None, hC: Homology | None = None) -> LongExactSequence:
    """Snake lemma: induced maps and connecting homomorphisms by zig-zag."""
    fails = exactness_failures(s)
    if fails:
        raise NotExact(f"sequence not exact in degree {fails[0][0]}: {fails[0][1]}")
    hA = hA or homology(s.A)
    hB = hB or homology(s.B)
    hC = hC or homology(s.C)
    i_star = induced_map_on_homology(s.sub, hA, hB)
    q_star = induced_map_on_homology(s.quot, hB, hC)
    ks = sorted(set(s.A.degrees) | set(s.B.degrees) | set(s.C.degrees))
    delta = {}
    for k in ks:
        m = ZMatrix(hA.ngens(k - 1), hC.ngens(k))
        for j, z in enumerate(hC.generators(k)):
            y = preimage(s.quot.at(k), z)
            if y is None:  # pragma: no cover - excluded by exactness
                raise NotExact(f"cannot lift in degree {k}")
            x = s.B.d(k).apply(y)
            w = preimage(s.sub.at(k - 1), x) if x else {}
            if w is None:  # pragma: no cover
                raise NotExact(f"boundary of lift not in sub, degree {k}")
            for r, v in enumerate(hA.coordinates(k - 1, w)):
                if v:
                    m[r, j] = v
        delta[k] = m
    for k in ks:
        i_star.setdefault(k, ZMatrix(hB.ngens(k), hA.ngens(k)))
        q_star.setdefault(k, ZMatrix(hC.ngens(k), hB.ngens(k)))
    return LongExactSequence(hA, hB, hC, i_star, q_star, delta, ks)


# -- twisted sums -------------------------------------------------------------

def twisted_sum(sub: GradedComplex, quot: GradedComplex, phi: dict[int, ZMatrix]
                ) -> tuple[GradedComplex, ShortExactSequence]:
    """Complex on sub ⊔ quot with differential [[d_sub, φ], [0, d_quot]].

    ``phi[k]`` maps quot_k to sub_{k-1}; requires d_sub∘φ = -φ∘d_quot.
    """
    ks = sorted(set(sub.degrees) | set(quot.degrees))

    def ph(k: int) -> ZMatrix:
        m = phi.get(k)
        return m if m is not None else ZMatrix(sub.rank(k - 1), quot.rank(k))

    for k in ks:
        if ph(k).shape != (sub.rank(k - 1), quot.rank(k)):
            raise TwistNotCompatible(k, f"twist in degree {k} has shape {ph(k).shape}")
    for k in ks:
        lhs = sub.d(k - 1) @ ph(k) + ph(k - 1) @ quot.d(k)
        if not lhs.is_zero():
            raise TwistNotCompatible(k)
    basis = {}
    for k in ks:
        labs = sub.gens(k) + quot.gens(k)
        if len(set(labs)) != len(labs):
            raise InvalidComplex(f"sub and quot share labels in degree {k}")
        basis[k] = labs
    diff = {}
    for k in ks:
        diff[k] = ZMatrix.block([[sub.d(k), ph(k)],
                                 [ZMatrix(quot.rank(k - 1), sub.rank(k)), quot.d(k)]])
    tot = GradedComplex(basis, diff).validate()
    inc, pr = {}, {}
    for k in ks:
        a, c = sub.rank(k), quot.rank(k)
        inc[k] = ZMatrix(a + c, a, {j: {j: 1} for j in range(a)})
        pr[k] = ZMatrix(c, a + c, {a + j: {j: 1} for j in range(c)})
    return tot, ShortExactSequence(ChainMap(sub, tot, inc), ChainMap(tot, quot, pr))


def label_sequence(sub: GradedComplex, mid: GradedComplex, quot: GradedComplex,
                   quot_labels: dict[Label, Label] | None = None,
                   quot_signs: dict[Label, int] | None = None) -> ShortExactSequence:
    """SES whose maps identify generators by label (``quot_labels`` maps mid -> quot)."""
    return ShortExactSequence(ChainMap.by_labels(sub, mid),
                              ChainMap.by_labels(mid, quot, quot_labels, quot_signs))
