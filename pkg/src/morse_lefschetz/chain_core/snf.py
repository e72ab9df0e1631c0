"""Smith and Hermite normal forms, integer kernels and integer linear solves.

All routines work on dense lists of Python ints internally.  They are
deterministic: the same input always produces the same transforms.
"""

from __future__ import annotations

from typing import Sequence

from .matrix import ZMatrix

Dense = list[list[int]]


def _dense(a: ZMatrix | Sequence[Sequence[int]]) -> tuple[Dense, int, int]:
    if isinstance(a, ZMatrix):
        return a.to_dense(), a.nrows, a.ncols
    rows = [list(map(int, r)) for r in a]
    return rows, len(rows), (len(rows[0]) if rows else 0)


def _eye(n: int) -> Dense:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def smith_dense(a: Dense, m: int, n: int) -> tuple[Dense, Dense, Dense]:
    """Return ``(U, D, V)`` with ``U a V = D`` in Smith form (d1 | d2 | ...)."""
    A = [row[:] for row in a]
    U = _eye(m)
    V = _eye(n)

    def swap_rows(i: int, j: int) -> None:
        A[i], A[j] = A[j], A[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i: int, j: int) -> None:
        for row in A:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]

    def add_row(src: int, dst: int, c: int) -> None:
        # row[dst] += c * row[src]
        ra, rd = A[src], A[dst]
        for k in range(n):
            if ra[k]:
                rd[k] += c * ra[k]
        ua, ud = U[src], U[dst]
        for k in range(m):
            if ua[k]:
                ud[k] += c * ua[k]

    def add_col(src: int, dst: int, c: int) -> None:
        for row in A:
            if row[src]:
                row[dst] += c * row[src]
        for row in V:
            if row[src]:
                row[dst] += c * row[src]

    t = 0
    while t < min(m, n):
        best = None
        for i in range(t, m):
            row = A[i]
            for j in range(t, n):
                v = row[j]
                if v and (best is None or abs(v) < best[0]):
                    best = (abs(v), i, j)
                    if best[0] == 1:
                        break
            if best is not None and best[0] == 1:
                break
        if best is None:
            break
        _, i0, j0 = best
        if i0 != t:
            swap_rows(t, i0)
        if j0 != t:
            swap_cols(t, j0)

        while True:
            p = A[t][t]
            dirty = False
            for i in range(t + 1, m):
                if A[i][t]:
                    add_row(t, i, -(A[i][t] // p))
                    if A[i][t]:
                        swap_rows(t, i)
                        dirty = True
                        break
            if dirty:
                continue
            p = A[t][t]
            for j in range(t + 1, n):
                if A[t][j]:
                    add_col(t, j, -(A[t][j] // p))
                    if A[t][j]:
                        swap_cols(t, j)
                        dirty = True
                        break
            if dirty:
                continue
            p = A[t][t]
            bad = None
            for i in range(t + 1, m):
                row = A[i]
                for j in range(t + 1, n):
                    if row[j] % p:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            add_row(bad, t, 1)
        if A[t][t] < 0:
            A[t] = [-v for v in A[t]]
            U[t] = [-v for v in U[t]]
        t += 1
    return U, A, V


def smith_normal_form(a: ZMatrix | Sequence[Sequence[int]]) -> tuple[ZMatrix, ZMatrix, ZMatrix]:
    """Smith decomposition ``U @ A @ V == D`` with unimodular ``U`` and ``V``.

    >>> U, D, V = smith_normal_form([[2, 4], [6, 8]])
    >>> D.to_dense()
    [[2, 0], [0, 4]]
    """
    dense, m, n = _dense(a)
    U, D, V = smith_dense(dense, m, n)
    return ZMatrix.from_dense(U, m), ZMatrix.from_dense(D, n), ZMatrix.from_dense(V, n)


def invariant_factors(a: ZMatrix | Sequence[Sequence[int]]) -> list[int]:
    """Nonzero diagonal of the Smith form."""
    dense, m, n = _dense(a)
    _, D, _ = smith_dense(dense, m, n)
    return [D[i][i] for i in range(min(m, n)) if D[i][i]]


def rank(a: ZMatrix | Sequence[Sequence[int]]) -> int:
    """Rank over the rationals (fraction-free elimination)."""
    rows, m, n = _dense(a)
    rows = [r[:] for r in rows if any(r)]
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, len(rows)) if rows[i][c]), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        p = rows[r][c]
        for i in range(r + 1, len(rows)):
            q = rows[i][c]
            if q:
                rows[i] = [p * x - q * y for x, y in zip(rows[i], rows[r])]
        r += 1
    return r


def hnf_columns(cols: Sequence[Sequence[int]], n: int) -> list[list[int]]:
    """Column-style Hermite normal form of the lattice spanned by ``cols``.

    ``cols`` are n-vectors.  The result is the canonical basis: echelon
    in increasing pivot rows, positive pivots, and entries to the right of
    each pivot (in later columns' pivot rows) reduced into ``[0, pivot)``.
    """
    rows = [list(map(int, c)) for c in cols]  # work with vectors as rows
    out: list[list[int]] = []
    r = 0
    for piv_idx in range(n):
        live = [i for i in range(r, len(rows)) if rows[i][piv_idx]]
        if not live:
            continue
        # Euclid on the column piv_idx among the live vectors
        while True:
            live = [i for i in range(r, len(rows)) if rows[i][piv_idx]]
            if len(live) <= 1:
                break
            best = min(live, key=lambda i: (abs(rows[i][piv_idx]), i))
            for i in live:
                if i != best:
                    q = rows[i][piv_idx] // rows[best][piv_idx]
                    rows[i] = [x - q * y for x, y in zip(rows[i], rows[best])]
        i0 = live[0]
        rows[r], rows[i0] = rows[i0], rows[r]
        if rows[r][piv_idx] < 0:
            rows[r] = [-x for x in rows[r]]
        p = rows[r][piv_idx]
        for i in range(r):
            q = rows[i][piv_idx] // p
            if q:
                rows[i] = [x - q * y for x, y in zip(rows[i], rows[r])]
        r += 1
    out = [row for row in rows[:r]]
    return out


def kernel_basis(a: ZMatrix | Sequence[Sequence[int]]) -> list[list[int]]:
    """Z-basis of ``{x : A x = 0}`` as a list of n-vectors in canonical HNF."""
    dense, m, n = _dense(a)
    if n == 0:
        return []
    _, D, V = smith_dense(dense, m, n)
    r = sum(1 for i in range(min(m, n)) if D[i][i])
    basis = [[V[i][j] for i in range(n)] for j in range(r, n)]
    return hnf_columns(basis, n)


def solve(a: ZMatrix | Sequence[Sequence[int]], b: Sequence[int]) -> list[int] | None:
    """An integer solution of ``A x = b``, or ``None`` when none exists.

    Free variables are set to zero, so the answer is deterministic.
    """
    dense, m, n = _dense(a)
    U, D, V = smith_dense(dense, m, n)
    c = [sum(U[i][k] * b[k] for k in range(m) if b[k]) for i in range(m)]
    y = [0] * n
    for i in range(m):
        d = D[i][i] if i < n else 0
        if d:
            if c[i] % d:
                return None
            y[i] = c[i] // d
        elif c[i]:
            return None
    return [sum(V[i][j] * y[j] for j in range(n) if y[j]) for i in range(n)]


def solve_many(a: ZMatrix | Sequence[Sequence[int]], bs: Sequence[Sequence[int]]) -> list[list[int] | None]:
    """``solve`` for several right-hand sides, sharing one decomposition."""
    dense, m, n = _dense(a)
    U, D, V = smith_dense(dense, m, n)
    out: list[list[int] | None] = []
    for b in bs:
        c = [sum(U[i][k] * b[k] for k in range(m) if b[k]) for i in range(m)]
        y = [0] * n
        ok = True
        for i in range(m):
            d = D[i][i] if i < n else 0
            if d:
                if c[i] % d:
                    ok = False
                    break
                y[i] = c[i] // d
            elif c[i]:
                ok = False
                break
        out.append([sum(V[i][j] * y[j] for j in range(n) if y[j]) for i in range(n)] if ok else None)
    return out


def determinant(a: Sequence[Sequence[int]]) -> int:
    """Exact determinant (Bareiss fraction-free elimination)."""
    M = [list(map(int, r)) for r in a]
    n = len(M)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if M[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if M[i][k]), None)
            if swap is None:
                return 0
            M[k], M[swap] = M[swap], M[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) // prev
        prev = M[k][k]
    return sign * M[n - 1][n - 1]


def inverse_unimodular(a: Sequence[Sequence[int]]) -> Dense:
    """Inverse of a unimodular integer matrix."""
    n = len(a)
    U, D, V = smith_dense([list(r) for r in a], n, n)
    if any(D[i][i] != 1 for i in range(n)):
        raise ValueError("matrix is not unimodular")
    # U a V = I  =>  a^-1 = V U
    return [[sum(V[i][k] * U[k][j] for k in range(n)) for j in range(n)] for i in range(n)]
