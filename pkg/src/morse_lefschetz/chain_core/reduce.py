"""Gaussian elimination of chain complexes (algebraic Morse reduction).

Cancelling a pair ``(a, b)`` with ``<d b, a> = ±1`` yields a smaller
complex together with explicit chain equivalences.  Applied to the pairs of
an acyclic matching this produces the Morse complex of that matching; with
greedily chosen unit pivots it is a fast exact preprocessing step for
homology.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Iterable, Sequence

from .complex import ChainMap, GradedComplex, Label
from .matrix import ZMatrix, vec_add


class ReductionError(ValueError):
    """A requested pair does not have a unit incidence at cancellation time."""


@dataclass
class Reduction:
    """Result of cancelling pairs in ``original``.

    ``incl``: reduced -> original, ``proj``: original -> reduced, with
    ``proj ∘ incl = id`` and ``id - incl ∘ proj = d h + h d``.
    """

    original: GradedComplex
    reduced: GradedComplex
    incl: ChainMap
    proj: ChainMap
    homotopy: dict[int, ZMatrix] | None = None


class _Workspace:
    def __init__(self, C: GradedComplex, track_homotopy: bool):
        self.C = C
        self.degs = list(C.degrees)
        self.alive = {k: set(range(C.rank(k))) for k in self.degs}
        # col[k][j] = d_k(j) as {i: v}; row[k][i] = {j: v} for the same matrix
        self.col: dict[int, dict[int, dict[int, int]]] = {}
        self.row: dict[int, dict[int, dict[int, int]]] = {}
        for k in self.degs:
            m = C.d(k)
            self.col[k] = {j: dict(c) for j, c in m.cols.items()}
            r: dict[int, dict[int, int]] = {}
            for j, c in m.cols.items():
                for i, v in c.items():
                    r.setdefault(i, {})[j] = v
            self.row[k] = r
        # G(cur) as original chain; F row: F(orig)[cur] for orig
        self.G = {k: {j: {j: 1} for j in range(C.rank(k))} for k in self.degs}
        self.F = {k: {j: {j: 1} for j in range(C.rank(k))} for k in self.degs}
        self.H: dict[int, dict[int, dict[int, int]]] | None = (
            {k: {} for k in self.degs} if track_homotopy else None)
        # Without a homotopy, G and F updates are recorded as terms pointing
        # at already-cancelled cells and expanded only for survivors.
        self.lazy = not track_homotopy
        self.Gt: dict[int, dict[int, list[tuple[int, int]]]] = {k: {} for k in self.degs}
        self.Ft: dict[int, dict[int, list[tuple[int, int]]]] = {k: {} for k in self.degs}
        self.when: dict[tuple[int, int], int] = {}

    def coeff(self, k1: int, b: int, a: int) -> int:
        return self.col.get(k1, {}).get(b, {}).get(a, 0)

    def _set(self, k: int, i: int, j: int, v: int) -> None:
        col = self.col[k].setdefault(j, {})
        row = self.row[k].setdefault(i, {})
        if v:
            col[i] = v
            row[j] = v
        else:
            col.pop(i, None)
            row.pop(j, None)
        if not col:
            self.col[k].pop(j, None)
        if not row:
            self.row[k].pop(i, None)

    def _drop_col(self, k: int, j: int) -> None:
        for i in list(self.col.get(k, {}).get(j, {})):
            self._set(k, i, j, 0)

    def _drop_row(self, k: int, i: int) -> None:
        for j in list(self.row.get(k, {}).get(i, {})):
            self._set(k, i, j, 0)

    def cancel(self, k: int, a: int, b: int) -> None:
        """Cancel a in degree k against b in degree k+1."""
        k1 = k + 1
        p = self.coeff(k1, b, a)
        if p not in (1, -1):
            raise ReductionError(
                f"pair ({self.C.gens(k)[a]!r}, {self.C.gens(k1)[b]!r}) has incidence {p}")
        db = dict(self.col[k1][b])
        # d'(y) = d(y) - d(y)[a] * p * d(b)   (p = 1/p for units)
        for y, dya in list(self.row[k1].get(a, {}).items()):
            if y == b:
                continue
            c = dya * p
            for z, v in db.items():
                self._set(k1, z, y, self.col[k1].get(y, {}).get(z, 0) - c * v)
            if self.lazy:
                self.Gt[k1].setdefault(y, []).append((-c, b))
            else:
                vec_add(self.G[k1][y], self.G[k1][b], -c)
        # homotopy h += G h_step F, h_step(a) = p * b
        if self.H is not None:
            gb = self.G[k1][b]
            for u, fu in self.F[k].get(a, {}).items():
                vec_add(self.H[k].setdefault(u, {}), gb, fu * p)
        # projection: f(a) = -p * sum_z d(b)[z] z
        if self.lazy:
            for z, v in db.items():
                if z != a:
                    self.Ft[k].setdefault(z, []).append((-p * v, a))
            self.when[(k, a)] = self.when[(k1, b)] = len(self.when)
        else:
            fa = self.F[k].pop(a, {})
            for z, v in db.items():
                if z != a:
                    vec_add(self.F[k].setdefault(z, {}), fa, -p * v)
        self.F[k1].pop(b, None)
        # remove a and b from the complex
        self._drop_col(k1, b)
        self._drop_row(k1, a)
        self._drop_col(k, a)
        if k1 + 1 in self.col:
            self._drop_row(k1 + 1, b)
        if not self.lazy:
            self.G[k].pop(a, None)
            self.G[k1].pop(b, None)
        self.alive[k].discard(a)
        self.alive[k1].discard(b)

    def _expand(self, terms: dict[int, list[tuple[int, int]]], k: int, start: int) -> dict[int, int]:
        # terms only point at cells cancelled earlier, so sweeping in
        # decreasing cancel time visits every cell after all its contributors
        weight = {start: 1}
        heap = [(-self.when.get((k, start), len(self.when)), start)]
        seen = set()
        while heap:
            _, n = heapq.heappop(heap)
            if n in seen:
                continue
            seen.add(n)
            w = weight[n]
            if not w:
                continue
            for c, ref in terms.get(n, ()):
                if ref not in weight:
                    heapq.heappush(heap, (-self.when[(k, ref)], ref))
                weight[ref] = weight.get(ref, 0) + c * w
        return {n: w for n, w in weight.items() if w}

    def result(self, C: GradedComplex) -> Reduction:
        if self.lazy:
            for k in self.degs:
                for j in self.alive[k]:
                    self.G[k][j] = self._expand(self.Gt[k], k, j)
                    self.F[k][j] = self._expand(self.Ft[k], k, j)
        order = {k: sorted(self.alive[k]) for k in self.degs}
        pos = {k: {j: t for t, j in enumerate(order[k])} for k in self.degs}
        basis = {k: [C.gens(k)[j] for j in order[k]] for k in self.degs}
        diff = {}
        for k in self.degs:
            m = ZMatrix(len(order.get(k - 1, [])), len(order[k]))
            for j in order[k]:
                for i, v in self.col[k].get(j, {}).items():
                    m.cols.setdefault(pos[k][j], {})[pos[k - 1][i]] = v
            diff[k] = m
        R = GradedComplex(basis, diff)
        incl, proj = {}, {}
        for k in self.degs:
            g = ZMatrix(C.rank(k), len(order[k]))
            for t, j in enumerate(order[k]):
                if self.G[k][j]:
                    g.cols[t] = dict(self.G[k][j])
            incl[k] = g
            f = ZMatrix(len(order[k]), C.rank(k))
            for j in order[k]:
                for u, v in self.F[k].get(j, {}).items():
                    f.cols.setdefault(u, {})[pos[k][j]] = v
            proj[k] = f
        hom = None
        if self.H is not None:
            hom = {}
            for k in self.degs:
                h = ZMatrix(C.rank(k + 1), C.rank(k))
                for u, vec in self.H[k].items():
                    vec = {i: v for i, v in vec.items() if v}
                    if vec:
                        h.cols[u] = vec
                hom[k] = h
        return Reduction(C, R, ChainMap(R, C, incl), ChainMap(C, R, proj), hom)


def reduce_by_pairs(C: GradedComplex, pairs: Iterable[tuple[int, Label, Label]],
                    track_homotopy: bool = False) -> Reduction:
    """Cancel the given ``(k, a, b)`` pairs, ``a`` in degree k and ``b`` in k+1.

    For an acyclic matching the result is the Morse complex of the matching;
    order of cancellation does not change it.
    """
    ws = _Workspace(C, track_homotopy)
    for k, a, b in pairs:
        ws.cancel(k, C.index(k, a), C.index(k + 1, b))
    return ws.result(C)


def _markowitz(ws: _Workspace, k1: int, b: int, a: int) -> int:
    return (len(ws.col[k1][b]) - 1) * (len(ws.row[k1][a]) - 1)


def reduce_greedy(C: GradedComplex, track_homotopy: bool = False) -> Reduction:
    """Cancel unit entries until none is left (deterministic pivot order).

    Pivots that create no fill-in (a face with a single coface, or a cell
    with a single face) are taken in repeated sweeps; when none is left the
    unit pivot of least Markowitz cost is cancelled and sweeping resumes.
    """
    ws = _Workspace(C, track_homotopy)
    degs = [k1 for k1 in sorted(ws.degs, reverse=True) if k1 - 1 in ws.alive]
    while True:
        progressed = False
        for k1 in degs:
            for b in sorted(ws.col[k1]):
                col = ws.col[k1].get(b)
                if not col:
                    continue
                for a in sorted(col):
                    if col[a] in (1, -1) and _markowitz(ws, k1, b, a) == 0:
                        ws.cancel(k1 - 1, a, b)
                        progressed = True
                        break
        if progressed:
            continue
        best = None
        for k1 in degs:
            for b, col in ws.col[k1].items():
                for a, v in col.items():
                    if v in (1, -1):
                        key = (_markowitz(ws, k1, b, a), k1, b, a)
                        if best is None or key < best:
                            best = key
        if best is None:
            break
        _, k1, b, a = best
        ws.cancel(k1 - 1, a, b)
    return ws.result(C)


def pairs_from_labels(pairs: Sequence[tuple[Label, Label]], C: GradedComplex) -> list[tuple[int, Label, Label]]:
    """Attach degrees to ``(lower, upper)`` label pairs by looking them up in C."""
    where = {}
    for k in C.degrees:
        for x in C.gens(k):
            where[x] = k
    out = []
    for a, b in pairs:
        k = where[a]
        if where.get(b) != k + 1:
            raise ReductionError(f"{a!r} and {b!r} are not in adjacent degrees")
        out.append((k, a, b))
    return out
