"""Triangulated compact surfaces with boundary: parsing and validation."""

from __future__ import annotations

import json
from collections import defaultdict, deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

Cell = tuple[int, ...]


class ParseError(ValueError):
    pass


class NotManifold(ValueError):
    pass


def cell(*vs: int) -> Cell:
    return tuple(sorted(vs))


def faces(c: Cell) -> list[tuple[int, Cell]]:
    """Facets of a simplex with their incidence signs (canonical orientation)."""
    if len(c) == 1:
        return []
    return [((-1) ** i, c[:i] + c[i + 1:]) for i in range(len(c))]


@dataclass
class SurfaceMesh:
    """A triangulated compact surface, possibly with boundary.

    Cells are sorted vertex tuples.  ``tri_sign[t]`` is +1 when the
    orientation of M agrees with the increasing-vertex orientation of ``t``
    (only when the surface is orientable).
    """

    n_vertices: int
    triangles: list[tuple[int, int, int]]
    coords: list[tuple[float, ...]] | None = None
    edges: list[Cell] = field(init=False)
    tris: list[Cell] = field(init=False)
    edge_tris: dict[Cell, list[Cell]] = field(init=False)
    boundary_edges: set[Cell] = field(init=False)
    boundary_vertices: set[int] = field(init=False)
    boundary_loops: list[list[int]] = field(init=False)
    link: dict[int, list[int]] = field(init=False)
    orientable: bool = field(init=False)
    tri_sign: dict[Cell, int] = field(init=False)

    def __post_init__(self) -> None:
        self._build()

    # -- construction -------------------------------------------------------
    def _build(self) -> None:
        n = self.n_vertices
        seen = set()
        tris = []
        for t in self.triangles:
            if len(t) != 3 or len(set(t)) != 3:
                raise NotManifold(f"degenerate triangle {t}")
            if any(v < 0 or v >= n for v in t):
                raise NotManifold(f"triangle {t} references a missing vertex")
            c = cell(*t)
            if c in seen:
                raise NotManifold(f"duplicate triangle {c}")
            seen.add(c)
            tris.append(c)
        self.tris = tris
        et: dict[Cell, list[Cell]] = defaultdict(list)
        for t in tris:
            for _, e in faces(t):
                et[e].append(t)
        for e, ts in et.items():
            if len(ts) > 2:
                raise NotManifold(f"edge {e} lies in {len(ts)} triangles")
        self.edge_tris = dict(et)
        self.edges = sorted(et)
        self.boundary_edges = {e for e, ts in et.items() if len(ts) == 1}
        self.boundary_vertices = {v for e in self.boundary_edges for v in e}
        used = {v for t in tris for v in t}
        if len(used) != n:
            missing = sorted(set(range(n)) - used)
            raise NotManifold(f"isolated vertices {missing[:5]}")
        self._build_links()
        self._build_loops()
        self._orient()

    def _build_links(self) -> None:
        adj: dict[int, dict[int, list[int]]] = defaultdict(lambda: defaultdict(list))
        for t in self.tris:
            for v in t:
                a, b = [w for w in t if w != v]
                adj[v][a].append(b)
                adj[v][b].append(a)
        self.link = {}
        for v in range(self.n_vertices):
            g = adj[v]
            ends = [w for w, nb in g.items() if len(nb) == 1]
            if any(len(nb) > 2 for nb in g.values()):
                raise NotManifold(f"link of vertex {v} is not a path or cycle")
            boundary = v in self.boundary_vertices
            if boundary and len(ends) != 2:
                raise NotManifold(f"link of boundary vertex {v} is not a single path")
            if not boundary and ends:
                raise NotManifold(f"link of interior vertex {v} is not a cycle")
            start = min(ends) if boundary else min(g)
            seq = [start]
            prev = None
            cur = start
            while True:
                nxt = [w for w in g[cur] if w != prev]
                if boundary and not nxt:
                    break
                if not boundary:
                    nxt = [w for w in g[cur] if w != prev] if prev is not None else [min(g[cur])]
                w = nxt[0]
                if not boundary and w == start:
                    break
                prev, cur = cur, w
                seq.append(w)
                if len(seq) > len(g):
                    raise NotManifold(f"link of vertex {v} is not connected")
            if len(seq) != len(g):
                raise NotManifold(f"link of vertex {v} is not connected")
            self.link[v] = seq

    def _build_loops(self) -> None:
        nb: dict[int, list[int]] = defaultdict(list)
        for a, b in self.boundary_edges:
            nb[a].append(b)
            nb[b].append(a)
        left = set(self.boundary_vertices)
        loops = []
        while left:
            s = min(left)
            loop = [s]
            prev, cur = None, s
            while True:
                nxt = [w for w in sorted(nb[cur]) if w != prev]
                w = nxt[0]
                if w == s:
                    break
                loop.append(w)
                prev, cur = cur, w
            left -= set(loop)
            loops.append(loop)
        self.boundary_loops = loops

    def _orient(self) -> None:
        sign: dict[Cell, int] = {}
        ok = True
        for start_t in self.triangles:
            root = cell(*start_t)
            if root in sign:
                continue
            sign[root] = _perm_sign(start_t)
            queue = deque([root])
            while queue:
                t = queue.popleft()
                for inc, e in faces(t):
                    for u in self.edge_tris[e]:
                        if u == t:
                            continue
                        inc_u = next(s for s, f in faces(u) if f == e)
                        want = -sign[t] * inc * inc_u
                        if u not in sign:
                            sign[u] = want
                            queue.append(u)
                        elif sign[u] != want:
                            ok = False
        self.orientable = ok
        self.tri_sign = sign if ok else {}

    # -- queries ------------------------------------------------------------
    @property
    def interior_vertices(self) -> list[int]:
        return [v for v in range(self.n_vertices) if v not in self.boundary_vertices]

    def cells(self, dim: int) -> list[Cell]:
        if dim == 0:
            return [(v,) for v in range(self.n_vertices)]
        if dim == 1:
            return list(self.edges)
        if dim == 2:
            return sorted(self.tris)
        return []

    def in_boundary(self, c: Cell) -> bool:
        if len(c) == 1:
            return c[0] in self.boundary_vertices
        if len(c) == 2:
            return c in self.boundary_edges
        return False

    def euler_characteristic(self) -> int:
        return self.n_vertices - len(self.edges) + len(self.tris)

    def boundary_euler_characteristic(self) -> int:
        return len(self.boundary_vertices) - len(self.boundary_edges)

    def connected_components(self) -> int:
        parent = list(range(self.n_vertices))

        def find(x: int) -> int:
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for a, b in self.edges:
            parent[find(a)] = find(b)
        return len({find(v) for v in range(self.n_vertices)})

    def oriented_cycle(self, t: Cell) -> tuple[int, int, int]:
        """Vertices of ``t`` in the cyclic order given by the orientation of M."""
        if not self.orientable:
            raise ValueError("mesh is not orientable")
        a, b, c = t
        return (a, b, c) if self.tri_sign[t] > 0 else (a, c, b)

    def flipped(self) -> "SurfaceMesh":
        """Same surface with the opposite orientation."""
        return SurfaceMesh(self.n_vertices, [(a, c, b) for a, b, c in self.triangles], self.coords)

    def subdivide(self) -> "SurfaceMesh":
        """1-to-4 refinement (midpoint on every edge), orientation preserved."""
        mid = {e: self.n_vertices + i for i, e in enumerate(self.edges)}
        tris = []
        for a, b, c in self.triangles:
            ab, bc, ca = mid[cell(a, b)], mid[cell(b, c)], mid[cell(c, a)]
            tris += [(a, ab, ca), (ab, b, bc), (ca, bc, c), (ab, bc, ca)]
        coords = None
        if self.coords is not None:
            coords = list(self.coords) + [
                tuple((x + y) / 2 for x, y in zip(self.coords[e[0]], self.coords[e[1]]))
                for e in self.edges]
        return SurfaceMesh(self.n_vertices + len(self.edges), tris, coords)

    def to_off(self) -> str:
        coords = self.coords or [(float(v), 0.0, 0.0) for v in range(self.n_vertices)]
        lines = ["OFF", f"{self.n_vertices} {len(self.triangles)} {len(self.edges)}"]
        for p in coords:
            p = tuple(p) + (0.0,) * (3 - len(p))
            lines.append(" ".join(repr(float(x)) for x in p[:3]))
        for t in self.triangles:
            lines.append("3 " + " ".join(str(v) for v in t))
        return "\n".join(lines) + "\n"

    def to_json(self) -> dict:
        return {"vertices": self.n_vertices if self.coords is None else [list(p) for p in self.coords],
                "triangles": [list(t) for t in self.triangles]}


def _perm_sign(t: Sequence[int]) -> int:
    a, b, c = t
    inv = (a > b) + (a > c) + (b > c)
    return -1 if inv % 2 else 1


def parse_off(text: str) -> SurfaceMesh:
    toks = []
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            toks.append(line)
    if not toks:
        raise ParseError("empty OFF file")
    head = toks[0].split()
    if head[0] != "OFF":
        raise ParseError("missing OFF header")
    rest = head[1:]
    body = toks[1:]
    if not rest:
        if not body:
            raise ParseError("missing counts line")
        rest = body[0].split()
        body = body[1:]
    try:
        nv, nf = int(rest[0]), int(rest[1])
    except (ValueError, IndexError) as exc:
        raise ParseError("bad counts line") from exc
    if len(body) < nv + nf:
        raise ParseError("file truncated")
    coords = []
    try:
        for line in body[:nv]:
            coords.append(tuple(float(x) for x in line.split()[:3]))
        tris = []
        for line in body[nv:nv + nf]:
            parts = [int(x) for x in line.split()]
            if parts[0] != 3 or len(parts) < 4:
                raise ParseError("only triangular faces are supported")
            tris.append(tuple(parts[1:4]))
    except ValueError as exc:
        raise ParseError(str(exc)) from exc
    return SurfaceMesh(nv, tris, coords)


def parse_mesh_json(obj: dict) -> SurfaceMesh:
    try:
        verts = obj["vertices"]
        tris = [tuple(int(v) for v in t) for t in obj["triangles"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"bad mesh object: {exc}") from exc
    if isinstance(verts, int):
        return SurfaceMesh(verts, tris)
    coords = [tuple(float(x) for x in p) for p in verts]
    return SurfaceMesh(len(coords), tris, coords)


def load_mesh(data: bytes | str, fmt: str = "off") -> SurfaceMesh:
    """Parse an OFF file or a JSON bundle (``{"mesh": {...}, ...}`` or a bare mesh)."""
    text = data.decode("utf-8") if isinstance(data, bytes) else data
    if fmt == "off":
        return parse_off(text)
    if fmt == "json":
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(str(exc)) from exc
        mesh = parse_mesh_json(obj.get("mesh", obj))
        if obj.get("orientation", 1) == -1:
            mesh = mesh.flipped()
        return mesh
    raise ParseError(f"unknown mesh format {fmt!r}")


def parse_rational(s: str) -> Fraction:
    try:
        return Fraction(s.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"not an exact rational: {s!r}") from exc
