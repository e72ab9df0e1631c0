"""Finitely generated free graded chain complexes over Z and maps between them."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Hashable, Iterable, Mapping, Sequence

from .matrix import ZMatrix

Label = Hashable


class InvalidComplex(ValueError):
    """Raised when d∘d != 0 or matrix shapes do not match the bases."""


class NotAChainMap(ValueError):
    pass


@dataclass
class GradedComplex:
    """Free Z-complex with labelled bases.

    ``diff[k]`` maps degree-k chains to degree-(k-1) chains and has shape
    ``(len(basis[k-1]), len(basis[k]))``.  Missing degrees are zero.
    """

    basis: dict[int, list[Label]]
    diff: dict[int, ZMatrix] = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.basis = {k: list(v) for k, v in self.basis.items()}
        self._index = {k: {lab: i for i, lab in enumerate(v)} for k, v in self.basis.items()}
        for k, v in self._index.items():
            if len(v) != len(self.basis[k]):
                raise InvalidComplex(f"duplicate labels in degree {k}")

    # shape ----------------------------------------------------------------
    @property
    def degrees(self) -> range:
        ks = [k for k, v in self.basis.items()]
        if not ks:
            return range(0)
        return range(min(ks), max(ks) + 1)

    def rank(self, k: int) -> int:
        return len(self.basis.get(k, ()))

    def gens(self, k: int) -> list[Label]:
        return self.basis.get(k, [])

    def index(self, k: int, label: Label) -> int:
        return self._index[k][label]

    def has(self, k: int, label: Label) -> bool:
        return label in self._index.get(k, {})

    def d(self, k: int) -> ZMatrix:
        m = self.diff.get(k)
        if m is None:
            return ZMatrix(self.rank(k - 1), self.rank(k))
        return m

    def size(self) -> int:
        return sum(len(v) for v in self.basis.values())

    def euler_characteristic(self) -> int:
        return sum((-1) ** k * len(v) for k, v in self.basis.items())

    def entry(self, k: int, target: Label, source: Label) -> int:
        """Coefficient of ``target`` in the differential of ``source`` (degree k)."""
        return self.d(k)[self.index(k - 1, target), self.index(k, source)]

    # checks ---------------------------------------------------------------
    def validate(self) -> "GradedComplex":
        for k, m in self.diff.items():
            if m.shape != (self.rank(k - 1), self.rank(k)):
                raise InvalidComplex(
                    f"differential in degree {k} has shape {m.shape}, "
                    f"expected {(self.rank(k - 1), self.rank(k))}")
        for k in self.degrees:
            if self.rank(k) == 0 or self.rank(k - 2) == 0:
                continue
            dd = self.d(k - 1) @ self.d(k)
            if not dd.is_zero():
                i, j, v = next(dd.entries())
                raise InvalidComplex(
                    f"d∘d != 0 in degree {k}: entry ({self.basis[k - 2][i]!r}, "
                    f"{self.basis[k][j]!r}) = {v}")
        return self

    def is_valid(self) -> bool:
        try:
            self.validate()
        except InvalidComplex:
            return False
        return True

    # constructors ---------------------------------------------------------
    @classmethod
    def from_entries(cls, basis: Mapping[int, Sequence[Label]],
                     entries: Iterable[tuple[int, Label, Label, int]]) -> "GradedComplex":
        """Build from ``(degree, source, target, coeff)`` triplets (source in degree)."""
        basis = {k: list(v) for k, v in basis.items()}
        index = {k: {lab: i for i, lab in enumerate(v)} for k, v in basis.items()}
        diff: dict[int, ZMatrix] = {}
        for k, src, tgt, c in entries:
            if not c:
                continue
            m = diff.setdefault(k, ZMatrix(len(basis.get(k - 1, ())), len(basis[k])))
            i, j = index[k - 1][tgt], index[k][src]
            m[i, j] = m[i, j] + c
        return cls(basis, diff)

    def relabel(self, mapping: Mapping[Label, Label]) -> "GradedComplex":
        basis = {k: [mapping.get(x, x) for x in v] for k, v in self.basis.items()}
        return GradedComplex(basis, {k: m.copy() for k, m in self.diff.items()})

    def conjugate(self, signs: Mapping[Label, int]) -> "GradedComplex":
        """Change basis by ``x -> signs[x] * x``: d' = S d S."""
        diff = {}
        for k, m in self.diff.items():
            rs = [signs.get(x, 1) for x in self.gens(k - 1)]
            cs = [signs.get(x, 1) for x in self.gens(k)]
            diff[k] = m.scale_rows(rs).scale_cols(cs)
        return GradedComplex(self.basis, diff)

    def shifted(self, s: int) -> "GradedComplex":
        return GradedComplex({k + s: v for k, v in self.basis.items()},
                             {k + s: m.copy() for k, m in self.diff.items()})

    def same_as(self, other: "GradedComplex") -> bool:
        """Equal as based complexes (labels, order, matrices)."""
        ks = set(self.degrees) | set(other.degrees)
        for k in ks:
            if self.gens(k) != other.gens(k):
                return False
            if self.d(k) != other.d(k):
                return False
        return True

    def dual(self, n: int) -> "GradedComplex":
        """Cochain complex regraded as a chain complex: degree j <- C_{n-j}.

        The differential in degree j is the transpose of d_k, k = n - j + 1,
        times ``(-1)**k``.  With this sign a degree-flip pairing satisfies
        <d a, b> = (-1)**k <a, d b> for a in degree k.
        """
        basis = {n - k: list(v) for k, v in self.basis.items()}
        diff = {}
        for j in range(min(basis) + 1 if basis else 0, max(basis) + 1 if basis else 0):
            k = n - j + 1
            diff[j] = self.d(k).T.scale((-1) ** k)
        return GradedComplex(basis, diff)

    def __repr__(self) -> str:
        ranks = {k: self.rank(k) for k in self.degrees}
        return f"GradedComplex(ranks={ranks})"


@dataclass
class ChainMap:
    source: GradedComplex
    target: GradedComplex
    mat: dict[int, ZMatrix] = field(default_factory=dict)

    def at(self, k: int) -> ZMatrix:
        m = self.mat.get(k)
        if m is None:
            return ZMatrix(self.target.rank(k), self.source.rank(k))
        return m

    def degrees(self) -> list[int]:
        return sorted(set(self.source.degrees) | set(self.target.degrees))

    def check_shapes(self) -> None:
        for k, m in self.mat.items():
            if m.shape != (self.target.rank(k), self.source.rank(k)):
                raise NotAChainMap(f"degree {k}: shape {m.shape} incompatible with complexes")

    def first_violation(self) -> int | None:
        self.check_shapes()
        for k in self.degrees():
            lhs = self.target.d(k) @ self.at(k)
            rhs = self.at(k - 1) @ self.source.d(k)
            if lhs != rhs:
                return k
        return None

    def apply(self, k: int, vec: dict[int, int]) -> dict[int, int]:
        return self.at(k).apply(vec)

    def compose(self, inner: "ChainMap") -> "ChainMap":
        """``self ∘ inner``."""
        ks = set(inner.mat) | set(self.mat)
        return ChainMap(inner.source, self.target, {k: self.at(k) @ inner.at(k) for k in ks})

    @classmethod
    def identity(cls, c: GradedComplex) -> "ChainMap":
        return cls(c, c, {k: ZMatrix.identity(c.rank(k)) for k in c.degrees})

    @classmethod
    def zero(cls, s: GradedComplex, t: GradedComplex) -> "ChainMap":
        return cls(s, t, {})

    @classmethod
    def by_labels(cls, source: GradedComplex, target: GradedComplex,
                  mapping: Mapping[Label, Label] | None = None,
                  signs: Mapping[Label, int] | None = None) -> "ChainMap":
        """Map sending each source generator to ``±`` the target generator of the same
        (or mapped) label; unmatched generators go to zero."""
        mapping = mapping or {}
        signs = signs or {}
        mat = {}
        for k in source.degrees:
            m = ZMatrix(target.rank(k), source.rank(k))
            for j, lab in enumerate(source.gens(k)):
                t = mapping.get(lab, lab)
                if target.has(k, t):
                    m[target.index(k, t), j] = signs.get(lab, 1)
            mat[k] = m
        return cls(source, target, mat)


def validate_chain_map(m: ChainMap) -> bool:
    """True iff ``target.d ∘ m == m ∘ source.d`` in every degree."""
    try:
        return m.first_violation() is None
    except NotAChainMap:
        return False


def mapping_cone(m: ChainMap) -> GradedComplex:
    """Cone(m)_k = source_{k-1} ⊕ target_k with d(s, t) = (-d s, m s + d t)."""
    S, T = m.source, m.target
    ks = set(S.degrees) | set(T.degrees)
    lo = min(ks) if ks else 0
    hi = (max(ks) + 1) if ks else 0
    basis = {}
    for k in range(lo, hi + 1):
        basis[k] = [("s", x) for x in S.gens(k - 1)] + [("t", x) for x in T.gens(k)]
    diff = {}
    for k in range(lo + 1, hi + 1):
        top = [S.d(k - 1).scale(-1), ZMatrix(S.rank(k - 2), T.rank(k))]
        bot = [m.at(k - 1), T.d(k)]
        diff[k] = ZMatrix.block([top, bot])
    return GradedComplex(basis, diff)
