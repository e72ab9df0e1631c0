"""Sparse integer matrices with exact (arbitrary precision) entries."""

from __future__ import annotations

from typing import Iterable, Iterator, Sequence


class ZMatrix:
    """Column-major sparse matrix over the integers.

    Only nonzero entries are stored; ``cols[j]`` maps row index to value.
    Entries are plain Python ints, so no overflow can occur.
    """

    __slots__ = ("nrows", "ncols", "cols")

    def __init__(self, nrows: int, ncols: int, cols: dict[int, dict[int, int]] | None = None):
        self.nrows = nrows
        self.ncols = ncols
        self.cols: dict[int, dict[int, int]] = {}
        if cols:
            for j, col in cols.items():
                clean = {i: int(v) for i, v in col.items() if v}
                if clean:
                    self.cols[j] = clean

    # construction ---------------------------------------------------------
    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> "ZMatrix":
        return cls(nrows, ncols)

    @classmethod
    def identity(cls, n: int) -> "ZMatrix":
        return cls(n, n, {i: {i: 1} for i in range(n)})

    @classmethod
    def diagonal(cls, entries: Sequence[int]) -> "ZMatrix":
        n = len(entries)
        return cls(n, n, {i: {i: e} for i, e in enumerate(entries) if e})

    @classmethod
    def from_dense(cls, rows: Sequence[Sequence[int]], ncols: int | None = None) -> "ZMatrix":
        nrows = len(rows)
        if ncols is None:
            ncols = len(rows[0]) if nrows else 0
        m = cls(nrows, ncols)
        for i, row in enumerate(rows):
            if len(row) != ncols:
                raise ValueError("ragged matrix")
            for j, v in enumerate(row):
                if v:
                    m.cols.setdefault(j, {})[i] = int(v)
        return m

    @classmethod
    def from_columns(cls, nrows: int, columns: Sequence[dict[int, int]]) -> "ZMatrix":
        return cls(nrows, len(columns), {j: c for j, c in enumerate(columns)})

    @classmethod
    def coerce(cls, a: "ZMatrix | Sequence[Sequence[int]]") -> "ZMatrix":
        return a if isinstance(a, ZMatrix) else cls.from_dense(a)

    # access ---------------------------------------------------------------
    @property
    def shape(self) -> tuple[int, int]:
        return (self.nrows, self.ncols)

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return self.cols.get(j, {}).get(i, 0)

    def __setitem__(self, ij: tuple[int, int], value: int) -> None:
        i, j = ij
        if value:
            self.cols.setdefault(j, {})[i] = int(value)
        else:
            col = self.cols.get(j)
            if col is not None:
                col.pop(i, None)
                if not col:
                    del self.cols[j]

    def col(self, j: int) -> dict[int, int]:
        return self.cols.get(j, {})

    def row(self, i: int) -> dict[int, int]:
        return {j: c[i] for j, c in self.cols.items() if i in c}

    def entries(self) -> Iterator[tuple[int, int, int]]:
        for j in sorted(self.cols):
            col = self.cols[j]
            for i in sorted(col):
                yield i, j, col[i]

    @property
    def nnz(self) -> int:
        return sum(len(c) for c in self.cols.values())

    def is_zero(self) -> bool:
        return not self.cols

    def to_dense(self) -> list[list[int]]:
        out = [[0] * self.ncols for _ in range(self.nrows)]
        for j, col in self.cols.items():
            for i, v in col.items():
                out[i][j] = v
        return out

    def copy(self) -> "ZMatrix":
        return ZMatrix(self.nrows, self.ncols, {j: dict(c) for j, c in self.cols.items()})

    # arithmetic -----------------------------------------------------------
    @property
    def T(self) -> "ZMatrix":
        out: dict[int, dict[int, int]] = {}
        for j, col in self.cols.items():
            for i, v in col.items():
                out.setdefault(i, {})[j] = v
        return ZMatrix(self.ncols, self.nrows, out)

    def __matmul__(self, other: "ZMatrix") -> "ZMatrix":
        if self.ncols != other.nrows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        out: dict[int, dict[int, int]] = {}
        for j, ocol in other.cols.items():
            acc: dict[int, int] = {}
            for k, v in ocol.items():
                scol = self.cols.get(k)
                if not scol:
                    continue
                for i, w in scol.items():
                    acc[i] = acc.get(i, 0) + w * v
            acc = {i: v for i, v in acc.items() if v}
            if acc:
                out[j] = acc
        return ZMatrix(self.nrows, other.ncols, out)

    def apply(self, vec: dict[int, int]) -> dict[int, int]:
        """Multiply by a sparse column vector given as ``{index: value}``."""
        acc: dict[int, int] = {}
        for k, v in vec.items():
            for i, w in self.cols.get(k, {}).items():
                acc[i] = acc.get(i, 0) + w * v
        return {i: v for i, v in acc.items() if v}

    def _combine(self, other: "ZMatrix", sign: int) -> "ZMatrix":
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")
        out = {j: dict(c) for j, c in self.cols.items()}
        for j, col in other.cols.items():
            tgt = out.setdefault(j, {})
            for i, v in col.items():
                tgt[i] = tgt.get(i, 0) + sign * v
        return ZMatrix(self.nrows, self.ncols, out)

    def __add__(self, other: "ZMatrix") -> "ZMatrix":
        return self._combine(other, 1)

    def __sub__(self, other: "ZMatrix") -> "ZMatrix":
        return self._combine(other, -1)

    def __neg__(self) -> "ZMatrix":
        return ZMatrix(self.nrows, self.ncols, {j: {i: -v for i, v in c.items()} for j, c in self.cols.items()})

    def scale(self, k: int) -> "ZMatrix":
        return ZMatrix(self.nrows, self.ncols, {j: {i: k * v for i, v in c.items()} for j, c in self.cols.items()})

    def scale_rows(self, signs: Sequence[int]) -> "ZMatrix":
        return ZMatrix(self.nrows, self.ncols,
                       {j: {i: signs[i] * v for i, v in c.items()} for j, c in self.cols.items()})

    def scale_cols(self, signs: Sequence[int]) -> "ZMatrix":
        return ZMatrix(self.nrows, self.ncols,
                       {j: {i: signs[j] * v for i, v in c.items()} for j, c in self.cols.items()})

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "ZMatrix":
        rpos = {r: k for k, r in enumerate(rows)}
        out: dict[int, dict[int, int]] = {}
        for jj, j in enumerate(cols):
            col = self.cols.get(j)
            if not col:
                continue
            sub = {rpos[i]: v for i, v in col.items() if i in rpos}
            if sub:
                out[jj] = sub
        return ZMatrix(len(rows), len(cols), out)

    @classmethod
    def block(cls, blocks: Sequence[Sequence["ZMatrix"]]) -> "ZMatrix":
        """Assemble a block matrix; every block row must share heights."""
        heights = [row[0].nrows for row in blocks]
        widths = [m.ncols for m in blocks[0]]
        out: dict[int, dict[int, int]] = {}
        r0 = 0
        for bi, row in enumerate(blocks):
            c0 = 0
            for bj, m in enumerate(row):
                if m.nrows != heights[bi] or m.ncols != widths[bj]:
                    raise ValueError("inconsistent block shapes")
                for j, col in m.cols.items():
                    tgt = out.setdefault(c0 + j, {})
                    for i, v in col.items():
                        tgt[r0 + i] = v
                c0 += widths[bj]
            r0 += heights[bi]
        return cls(sum(heights), sum(widths), out)

    # comparison -----------------------------------------------------------
    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ZMatrix):
            return NotImplemented
        return self.shape == other.shape and self.cols == other.cols

    def __hash__(self) -> int:  # pragma: no cover - matrices are mutable
        raise TypeError("ZMatrix is unhashable")

    def __repr__(self) -> str:
        if self.nrows * self.ncols <= 64:
            return f"ZMatrix({self.to_dense()})"
        return f"ZMatrix<{self.nrows}x{self.ncols}, nnz={self.nnz}>"


def vec_add(acc: dict, vec: dict, coeff: int = 1) -> None:
    """In-place ``acc += coeff * vec`` for sparse vectors, dropping zeros."""
    for k, v in vec.items():
        nv = acc.get(k, 0) + coeff * v
        if nv:
            acc[k] = nv
        else:
            acc.pop(k, None)


def dense_vector(vec: dict[int, int], n: int) -> list[int]:
    out = [0] * n
    for i, v in vec.items():
        out[i] = v
    return out


def as_sparse(values: Iterable[int]) -> dict[int, int]:
    return {i: int(v) for i, v in enumerate(values) if v}
