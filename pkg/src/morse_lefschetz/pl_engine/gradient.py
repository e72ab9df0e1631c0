"""Lower-star discrete gradients on surfaces with boundary.

The tangent gradient is built vertex by vertex from lower stars.  Boundary
cells are only ever matched with boundary cells, so its restriction to
∂M is a gradient there.  Boundary critical cells are typed:

* an f_∂-minimum (critical boundary vertex) is ``-`` when its whole lower
  link is empty and ``+`` otherwise; its *hat* is the interior edge towards
  the lowest lower neighbour, left critical by the tangent gradient;
* an f_∂-maximum (critical boundary edge) is ``+`` when the whole link of
  its vertex is lower; its hat is the last triangle of the sweep, critical.

The absolute flavor additionally matches every ``+`` cell with its hat, the
relative flavor keeps only the interior cells (hats become the generators
of the shifted boundary criticals).
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field, replace
from typing import Hashable

from ..chain_core import GradedComplex, ZMatrix
from .field import ScalarField
from .mesh import Cell, SurfaceMesh, cell

Label = Hashable


class AcyclicityViolation(RuntimeError):
    pass


class NoAdmissibleCofacet(ValueError):
    pass


class DegenerateBoundaryVertex(ValueError):
    pass


def cell_id(c: Label) -> str:
    """Stable string id of a cell: ``v3``, ``e3-7``, ``t1-4-9``; dual cells get a ``*``."""
    if isinstance(c, tuple) and c and c[0] == "*":
        return "*" + cell_id(c[1])
    return "vet"[len(c) - 1] + "-".join(str(v) for v in c)


@dataclass(frozen=True)
class BoundaryCritical:
    cell: Label
    index: int       # Morse index of f restricted to the boundary
    btype: str       # "+" or "-"
    hat: Label | None = None


@dataclass(frozen=True)
class VertexClass:
    vertex: int
    locus: str        # interior | boundary
    kind: str         # min | regular | saddle | max
    index: int | None
    multiplicity: int = 1
    btype: str | None = None
    detached: int = 0  # extra interior critical edges at a boundary vertex


@dataclass
class DiscreteGradient:
    """Acyclic matching on the cells of a based complex.

    ``pairs`` holds ``(lower, upper)`` label pairs; ``boundary`` records the
    typed boundary critical cells (keyed by the cell that carries the
    generator in this flavor).
    """

    flavor: str
    complex: GradedComplex
    pairs: list[tuple[Label, Label]]
    boundary: dict[Label, BoundaryCritical] = field(default_factory=dict)
    source: "DiscreteGradient | None" = None
    _dim: dict[Label, int] = field(init=False, repr=False)
    _partner: dict[Label, Label] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        self._dim = {x: k for k in self.complex.degrees for x in self.complex.gens(k)}
        self._partner = {}
        for a, b in self.pairs:
            if a in self._partner or b in self._partner:
                raise ValueError(f"cell matched twice in pair ({a!r}, {b!r})")
            if self._dim.get(b) != self._dim.get(a, -9) + 1:
                raise ValueError(f"pair ({a!r}, {b!r}) is not in adjacent dimensions")
            if not self.complex.entry(self._dim[b], a, b):
                raise ValueError(f"{a!r} is not a face of {b!r}")
            self._partner[a] = b
            self._partner[b] = a

    def dim(self, c: Label) -> int:
        return self._dim[c]

    def partner(self, c: Label) -> Label | None:
        return self._partner.get(c)

    def matched_up(self, c: Label) -> Label | None:
        p = self._partner.get(c)
        return p if p is not None and self._dim[p] > self._dim[c] else None

    def critical(self, k: int | None = None) -> list[Label]:
        ks = [k] if k is not None else list(self.complex.degrees)
        return [x for kk in ks for x in self.complex.gens(kk) if x not in self._partner]

    def morse_pairs(self) -> list[tuple[int, Label, Label]]:
        return [(self._dim[a], a, b) for a, b in self.pairs]

    def facets(self, c: Label) -> dict[Label, int]:
        k = self._dim[c]
        if self.complex.rank(k - 1) == 0:
            return {}
        col = self.complex.d(k).col(self.complex.index(k, c))
        gens = self.complex.gens(k - 1)
        return {gens[i]: v for i, v in col.items()}

    # -- acyclicity ---------------------------------------------------------
    def topological_order(self, k: int) -> dict[Label, int]:
        """Order of the degree-k cells matched upward along V-paths (sources first).

        Raises AcyclicityViolation when a closed V-path exists.
        """
        succ: dict[Label, list[Label]] = {}
        for a in self.complex.gens(k):
            b = self.matched_up(a)
            if b is None:
                continue
            succ[a] = [f for f in self.facets(b) if f != a and self.matched_up(f) is not None]
        indeg = {a: 0 for a in succ}
        for a, out in succ.items():
            for f in out:
                indeg[f] += 1
        ready = [a for a in self.complex.gens(k) if a in indeg and indeg[a] == 0]
        ready.reverse()
        order: dict[Label, int] = {}
        while ready:
            a = ready.pop()
            order[a] = len(order)
            for f in succ[a]:
                indeg[f] -= 1
                if indeg[f] == 0:
                    ready.append(f)
        if len(order) != len(succ):
            bad = next(a for a in succ if a not in order)
            raise AcyclicityViolation(f"closed V-path through {bad!r} ({self.flavor} gradient)")
        return order

    def check_acyclic(self) -> "DiscreteGradient":
        for k in self.complex.degrees:
            self.topological_order(k)
        return self

    def is_acyclic(self) -> bool:
        try:
            self.check_acyclic()
        except AcyclicityViolation:
            return False
        return True


# -- lower stars ----------------------------------------------------------------

def _runs(low: list[bool]) -> list[list[int]]:
    """Maximal runs of True in a linear sequence, as index lists."""
    out, cur = [], []
    for i, x in enumerate(low):
        if x:
            cur.append(i)
        elif cur:
            out.append(cur)
            cur = []
    if cur:
        out.append(cur)
    return out


@dataclass
class _StarBuilder:
    mesh: SurfaceMesh
    rank: list[int]
    pairs: list[tuple[Cell, Cell]] = field(default_factory=list)
    critical: list[Cell] = field(default_factory=list)
    boundary: dict[Cell, BoundaryCritical] = field(default_factory=dict)
    hats: set[Cell] = field(default_factory=set)
    classes: list[VertexClass] = field(default_factory=list)

    def sweep(self, v: int, seq: list[int], run: list[int], root: int) -> None:
        """Pair the edges v-seq[i] of a run with triangles, moving away from ``root``."""
        pos = run.index(root)
        for t in range(pos + 1, len(run)):
            i, j = run[t - 1], run[t]
            self.pairs.append((cell(v, seq[j]), cell(v, seq[i], seq[j])))
        for t in range(pos - 1, -1, -1):
            i, j = run[t], run[t + 1]
            self.pairs.append((cell(v, seq[i]), cell(v, seq[i], seq[j])))

    def lowest(self, seq: list[int], idx: list[int]) -> int:
        return min(idx, key=lambda i: self.rank[seq[i]])

    def interior(self, v: int) -> None:
        seq = self.mesh.link[v]
        r = self.rank
        low = [r[w] < r[v] for w in seq]
        if not any(low):
            self.critical.append((v,))
            self.classes.append(VertexClass(v, "interior", "min", 0))
            return
        if all(low):
            start = self.lowest(seq, list(range(len(seq))))
            c = seq[start:] + seq[:start]
            self.pairs.append(((v,), cell(v, c[0])))
            for i in range(1, len(c)):
                self.pairs.append((cell(v, c[i]), cell(v, c[i - 1], c[i])))
            self.critical.append(cell(v, c[-1], c[0]))
            self.classes.append(VertexClass(v, "interior", "max", 2))
            return
        first_high = low.index(False)
        seq = seq[first_high:] + seq[:first_high]
        low = low[first_high:] + low[:first_high]
        runs = _runs(low)
        roots = [self.lowest(seq, run) for run in runs]
        g = min(roots, key=lambda i: r[seq[i]])
        self.pairs.append(((v,), cell(v, seq[g])))
        for run, root in zip(runs, roots):
            if root != g:
                self.critical.append(cell(v, seq[root]))
            self.sweep(v, seq, run, root)
        if len(runs) == 1:
            self.classes.append(VertexClass(v, "interior", "regular", None))
        else:
            self.classes.append(VertexClass(v, "interior", "saddle", 1, len(runs) - 1))

    def boundary_vertex(self, v: int) -> None:
        seq = self.mesh.link[v]
        r = self.rank
        n = len(seq)
        low = [r[w] < r[v] for w in seq]
        a, b = seq[0], seq[-1]
        la, lb = low[0], low[-1]
        whole = all(low)
        runs = _runs(low)
        anchored = [run for run in runs if run[0] == 0 or run[-1] == n - 1]
        free = [run for run in runs if run not in anchored]
        if whole:
            p_first = r[a] < r[b]
            lo_end, hi_end = (a, b) if p_first else (b, a)
            self.pairs.append(((v,), cell(v, lo_end)))
            e2 = cell(v, hi_end)
            self.critical.append(e2)
            idx = list(range(n)) if p_first else list(range(n - 1, -1, -1))
            for t in range(1, n - 1):
                i, j = idx[t - 1], idx[t]
                self.pairs.append((cell(v, seq[j]), cell(v, seq[i], seq[j])))
            hat = cell(v, seq[idx[-2]], seq[idx[-1]])
            self.critical.append(hat)
            self.hats.add(hat)
            self.boundary[e2] = BoundaryCritical(e2, 1, "+", hat)
            self.classes.append(VertexClass(v, "boundary", "max", 1, btype="+"))
            return
        kind, hat = "regular", None
        if not la and not lb:
            self.critical.append((v,))
            kind = "min"
        elif la != lb:
            self.pairs.append(((v,), cell(v, a if la else b)))
        else:
            lo_end, hi_end = (a, b) if r[a] < r[b] else (b, a)
            self.pairs.append(((v,), cell(v, lo_end)))
            e2 = cell(v, hi_end)
            self.critical.append(e2)
            self.boundary[e2] = BoundaryCritical(e2, 1, "-")
            kind = "max"
        for run in anchored:
            self.sweep(v, seq, run, 0 if run[0] == 0 else n - 1)
        roots = [self.lowest(seq, run) for run in free]
        if kind == "min":
            if roots:
                g = min(roots, key=lambda i: r[seq[i]])
                hat = cell(v, seq[g])
                self.hats.add(hat)
            self.boundary[(v,)] = BoundaryCritical((v,), 0, "+" if roots else "-", hat)
        for run, root in zip(free, roots):
            self.critical.append(cell(v, seq[root]))
            self.sweep(v, seq, run, root)
        extra = len(roots) - (1 if kind == "min" and roots else 0)
        btype = self.boundary[(v,)].btype if kind == "min" else ("-" if kind == "max" else None)
        self.classes.append(VertexClass(v, "boundary", kind, {"min": 0, "max": 1}.get(kind),
                                        1, btype, extra))


def _lower_stars(mesh: SurfaceMesh, fieldv: ScalarField) -> _StarBuilder:
    if len(fieldv) != mesh.n_vertices:
        raise ValueError("field size does not match the mesh")
    if not fieldv.is_injective():
        raise ValueError("field is not injective; call ensure_generic first")
    sb = _StarBuilder(mesh, fieldv.order())
    for v in range(mesh.n_vertices):
        if v in mesh.boundary_vertices:
            sb.boundary_vertex(v)
        else:
            sb.interior(v)
    return sb


def classify_critical_vertices(mesh: SurfaceMesh, fieldv: ScalarField,
                               strict: bool = False) -> list[VertexClass]:
    """Per-vertex classification from lower links (regular vertices omitted).

    Boundary vertices whose interior lower link has components not attached
    to the boundary (beyond the one a ``+`` minimum needs) carry extra
    interior saddle-type critical edges; ``strict`` turns that into
    DegenerateBoundaryVertex instead.
    """
    sb = _lower_stars(mesh, fieldv)
    out = []
    for vc in sb.classes:
        if strict and vc.detached:
            raise DegenerateBoundaryVertex(
                f"boundary vertex {vc.vertex} has {vc.detached} detached lower arcs")
        if vc.kind != "regular" or vc.detached:
            out.append(vc)
    return out


def build_tangent_gradient(mesh: SurfaceMesh, fieldv: ScalarField) -> DiscreteGradient:
    """Lower-star gradient matching boundary cells among themselves only."""
    from ..oracle import simplicial_complex

    sb = _lower_stars(mesh, fieldv)
    C = simplicial_complex(mesh, "full")
    g = DiscreteGradient("tangent", C, sb.pairs, dict(sb.boundary))
    crit = set(g.critical())
    if crit != set(sb.critical) or len(sb.critical) != len(crit):
        raise AcyclicityViolation("lower-star construction left cells unassigned")  # pragma: no cover
    for a, b in sb.pairs:
        if mesh.in_boundary(a) != mesh.in_boundary(b):
            raise AcyclicityViolation(f"pair ({a}, {b}) crosses the boundary")  # pragma: no cover
    for x, bc in g.boundary.items():
        if bc.hat is not None and bc.hat not in crit:
            raise NoAdmissibleCofacet(f"hat of {x} is not critical")  # pragma: no cover
    return g.check_acyclic()


def hats(g: DiscreteGradient) -> dict[Label, Label]:
    """Map ``+`` boundary critical cell -> its hat cell."""
    return {x: bc.hat for x, bc in g.boundary.items() if bc.btype == "+"}


# -- flavors --------------------------------------------------------------------

def _dual_label(c: Label) -> Label:
    return ("*", c)


def _swap(btype: str) -> str:
    return "-" if btype == "+" else "+"


def restrict_to_boundary(t: DiscreteGradient, mesh: SurfaceMesh) -> DiscreteGradient:
    """The tangent gradient seen on the boundary subcomplex (gradient of f_∂)."""
    from ..oracle import simplicial_complex

    pairs = [(a, b) for a, b in t.pairs if mesh.in_boundary(b)]
    g = DiscreteGradient("boundary", simplicial_complex(mesh, "boundary"), pairs, dict(t.boundary))
    return g.check_acyclic()


def specialize_gradient(t: DiscreteGradient, flavor: str, mesh: SurfaceMesh) -> DiscreteGradient:
    """Absolute, relative or reversed gradient derived from the tangent one."""
    from ..oracle import simplicial_complex

    if t.flavor != "tangent":
        raise ValueError(f"expected a tangent gradient, got {t.flavor}")
    plus = hats(t)
    for x, h in plus.items():
        if h is None or t.partner(h) is not None:
            raise NoAdmissibleCofacet(f"+ cell {x} has no free interior cofacet")
    if flavor == "absolute":
        pairs = list(t.pairs) + [(x, plus[x]) for x in sorted(plus)]
        g = DiscreteGradient("absolute", t.complex, pairs, dict(t.boundary))
    elif flavor == "relative":
        pairs = [(a, b) for a, b in t.pairs if not mesh.in_boundary(a)]
        bd = {bc.hat: bc for bc in t.boundary.values() if bc.btype == "+"}
        g = DiscreteGradient("relative", simplicial_complex(mesh, "relative"), pairs, bd)
    elif flavor == "reversed":
        return reverse_gradient(specialize_gradient(t, "relative", mesh))
    else:
        raise ValueError(f"unknown flavor {flavor!r}")
    return g.check_acyclic()


def reverse_gradient(g: DiscreteGradient, n: int = 2) -> DiscreteGradient:
    """Same matching read on the dual blocks (the gradient of -f).

    Cells become their dual blocks, dimensions flip k -> n - k, every pair
    is read backwards and boundary types swap.  Reversing twice gives back
    the original gradient.
    """
    if g.flavor == "reversed" and g.source is not None:
        return g.source
    D = g.complex.dual(n)
    D = D.relabel({x: _dual_label(x) for k in D.degrees for x in D.gens(k)})
    pairs = [(_dual_label(b), _dual_label(a)) for a, b in g.pairs]
    bd = {_dual_label(x): replace(bc, cell=_dual_label(bc.cell), btype=_swap(bc.btype),
                                  index=n - 1 - bc.index)
          for x, bc in g.boundary.items()}
    return DiscreteGradient("reversed", D, pairs, bd, source=g).check_acyclic()
