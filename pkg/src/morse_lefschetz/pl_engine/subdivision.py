"""Barycentric subdivision and the dual-block collapse.

A cell of the subdivision is a flag ``(s0, s1, ...)`` of mesh cells with
strictly increasing dimension; its vertices are the barycentres of the
``si`` and it is oriented in flag order.  The dual block of a cell ``s``
not in ∂M is the union of flags starting at ``s``.

``block_gradient`` collapses the subdivision onto the union of these
blocks: flags starting on ∂M (a collar of the boundary) are matched
among themselves, and inside every block all flags but one are matched.
The surviving flag is the block's representative.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from ..chain_core import ChainMap, GradedComplex, ZMatrix
from .gradient import DiscreteGradient
from .mesh import Cell, SurfaceMesh, faces

Flag = tuple[Cell, ...]


def _cofaces(mesh: SurfaceMesh) -> dict[Cell, list[Cell]]:
    up: dict[Cell, list[Cell]] = {}
    for k in (1, 2):
        for c in mesh.cells(k):
            for _, f in faces(c):
                up.setdefault(f, []).append(c)
    return up


def _above(mesh: SurfaceMesh) -> dict[Cell, list[Cell]]:
    """Every cell strictly containing each cell."""
    out: dict[Cell, list[Cell]] = {}
    for t in mesh.cells(2):
        for _, e in faces(t):
            out.setdefault(e, []).append(t)
    for k in (1, 2):
        for c in mesh.cells(k):
            for v in c:
                out.setdefault((v,), []).append(c)
    return out


def _flags(mesh: SurfaceMesh) -> dict[int, list[Flag]]:
    above = _above(mesh)
    out: dict[int, list[Flag]] = {0: [], 1: [], 2: []}
    for k in (0, 1, 2):
        for c in mesh.cells(k):
            out[0].append((c,))
            for u in above.get(c, []):
                out[1].append((c, u))
                for w in above.get(u, []):
                    out[2].append((c, u, w))
    return {k: sorted(v) for k, v in out.items()}


def subdivision_complex(mesh: SurfaceMesh) -> GradedComplex:
    """Simplicial chains of the barycentric subdivision."""
    flags = _flags(mesh)
    entries = []
    for k in (1, 2):
        for fl in flags[k]:
            for i in range(len(fl)):
                entries.append((k, fl, fl[:i] + fl[i + 1:], (-1) ** i))
    return GradedComplex.from_entries(flags, entries).validate()


def subdivision_map(mesh: SurfaceMesh, source: GradedComplex, target: GradedComplex) -> ChainMap:
    """Chain map C(K) -> C(sd K): a simplex goes to the signed sum of its flags.

    Built recursively as ``S(s) = (-1)^dim(s) · cone(S(∂s), ŝ)`` with the
    barycentre ŝ appended last, which keeps flag order.
    """
    memo: dict[Cell, dict[Flag, int]] = {}

    def S(c: Cell) -> dict[Flag, int]:
        if c in memo:
            return memo[c]
        if len(c) == 1:
            out = {(c,): 1}
        else:
            out = {}
            sgn = (-1) ** (len(c) - 1)
            for s, f in faces(c):
                for fl, v in S(f).items():
                    key = fl + (c,)
                    out[key] = out.get(key, 0) + sgn * s * v
            out = {k: v for k, v in out.items() if v}
        memo[c] = out
        return out

    mat = {}
    for k in source.degrees:
        m = ZMatrix(target.rank(k), source.rank(k))
        for j, c in enumerate(source.gens(k)):
            for fl, v in S(c).items():
                m[target.index(k, fl), j] = v
        mat[k] = m
    return ChainMap(source, target, mat)


@dataclass
class BlockCollapse:
    """Gradient on the subdivision plus the representative flag of each block."""

    gradient: DiscreteGradient
    representative: dict[Cell, Flag]   # block centre (mesh cell) -> critical flag
    seed: int


def _star_sequence(mesh: SurfaceMesh, v: int) -> list[Cell]:
    """Edges and triangles around v in link order: e0, t1, e1, t2, ..."""
    ring = mesh.link[v]
    closed = v not in mesh.boundary_vertices
    seq: list[Cell] = []
    for i, s in enumerate(ring):
        if i > 0:
            seq.append(tuple(sorted((v, ring[i - 1], s))))
        seq.append(tuple(sorted((v, s))))
    if closed:
        seq.append(tuple(sorted((v, ring[-1], ring[0]))))
    return seq


def _chain_pairs(v: Cell, seq: list[Cell]) -> list[tuple[Flag, Flag]]:
    """Collapse the flags at v along ``seq``: v̂ with (v, x0), then each
    (v, x_i) with the triangle flag it shares with x_{i-1}."""
    pairs = [((v,), (v, seq[0]))]
    for i in range(1, len(seq)):
        a, b = sorted((seq[i - 1], seq[i]), key=len)
        pairs.append(((v, seq[i]), (v, a, b)))
    return pairs


def block_gradient(mesh: SurfaceMesh, sd: GradedComplex, seed: int = 0,
                   forced: Flag | None = None) -> BlockCollapse:
    """Collapse sd K onto the dual blocks of the cells off ∂M.

    ``seed`` picks which triangle side stays critical in an edge block and
    where the sweep starts around an interior vertex.  ``forced`` unpairs
    the pair containing a given flag (a fault-injection hook for the
    transversality check); the result is then no longer a block collapse.
    """
    rng = random.Random(seed)
    pairs: list[tuple[Flag, Flag]] = []
    rep: dict[Cell, Flag] = {}
    up = _cofaces(mesh)
    for e in sorted(mesh.boundary_edges):
        pairs.append(((e,), (e, up[e][0])))
    for b in sorted(mesh.boundary_vertices):
        pairs += _chain_pairs((b,), _star_sequence(mesh, b))
    for t in mesh.cells(2):
        rep[t] = (t,)
    for e in mesh.cells(1):
        if e in mesh.boundary_edges:
            continue
        t1, t2 = sorted(up[e])
        if seed and rng.random() < 0.5:
            t1, t2 = t2, t1
        pairs.append(((e,), (e, t1)))
        rep[e] = (e, t2)
    for v in mesh.interior_vertices:
        seq = _star_sequence(mesh, v)
        if seed:
            r = 2 * rng.randrange(len(seq) // 2)
            seq = seq[r:] + seq[:r]
        pairs += _chain_pairs((v,), seq)
        a, b = sorted((seq[-1], seq[0]), key=len)
        rep[(v,)] = ((v,), a, b)
    if forced is not None:
        pairs = [p for p in pairs if forced not in p]
    g = DiscreteGradient("block", sd, pairs).check_acyclic()
    return BlockCollapse(g, rep, seed)


def block_orientation(mesh: SurfaceMesh, c: Cell, flag: Flag) -> int:
    """Sign of the representative flag against the block orientation.

    The block of ``c`` is oriented so that (orientation of c) followed by
    (orientation of the block) is the orientation of M.
    """
    if len(c) == 3:
        return mesh.tri_sign[c]
    if len(c) == 2:
        a, b = c
        cyc = mesh.oriented_cycle(flag[1])
        i = cyc.index(a)
        return 1 if cyc[(i + 1) % 3] == b else -1
    v = c[0]
    e, t = flag[1], flag[2]
    w = e[0] if e[1] == v else e[1]
    cyc = mesh.oriented_cycle(t)
    i = cyc.index(v)
    return 1 if cyc[(i + 1) % 3] == w else -1
