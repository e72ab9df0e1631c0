"""Exact rational vertex fields and genericity enforcement."""

from __future__ import annotations

import csv
import io
import random
from dataclasses import dataclass
from fractions import Fraction

from .mesh import ParseError, SurfaceMesh, parse_rational


@dataclass(frozen=True)
class ScalarField:
    values: tuple[Fraction, ...]

    @classmethod
    def from_values(cls, vals) -> "ScalarField":
        return cls(tuple(Fraction(v) for v in vals))

    def __len__(self) -> int:
        return len(self.values)

    def __getitem__(self, v: int) -> Fraction:
        return self.values[v]

    def is_injective(self) -> bool:
        return len(set(self.values)) == len(self.values)

    def order(self) -> list[int]:
        """Rank of every vertex (0 = lowest); ties broken by vertex id."""
        idx = sorted(range(len(self.values)), key=lambda v: (self.values[v], v))
        rank = [0] * len(idx)
        for r, v in enumerate(idx):
            rank[v] = r
        return rank

    def negated(self) -> "ScalarField":
        return ScalarField(tuple(-x for x in self.values))

    def to_csv(self) -> str:
        return "".join(f"{v},{x}\n" for v, x in enumerate(self.values))

    def to_json(self) -> dict[str, str]:
        return {str(v): str(x) for v, x in enumerate(self.values)}


def parse_field_csv(text: str, n_vertices: int) -> ScalarField:
    vals: dict[int, Fraction] = {}
    for row in csv.reader(io.StringIO(text)):
        if not row or not "".join(row).strip() or row[0].lstrip().startswith("#"):
            continue
        if len(row) != 2:
            raise ParseError(f"expected 'vertex_id,value', got {row!r}")
        try:
            v = int(row[0])
        except ValueError as exc:
            raise ParseError(f"bad vertex id {row[0]!r}") from exc
        if not 0 <= v < n_vertices:
            raise ParseError(f"vertex id {v} out of range")
        if v in vals:
            raise ParseError(f"vertex {v} given twice")
        vals[v] = parse_rational(row[1])
    if len(vals) != n_vertices:
        raise ParseError(f"field covers {len(vals)} of {n_vertices} vertices")
    return ScalarField(tuple(vals[v] for v in range(n_vertices)))


def parse_field_json(obj, n_vertices: int) -> ScalarField:
    if isinstance(obj, list):
        items = dict(enumerate(obj))
    elif isinstance(obj, dict):
        try:
            items = {int(k): v for k, v in obj.items()}
        except ValueError as exc:
            raise ParseError("field keys must be vertex ids") from exc
    else:
        raise ParseError("field must be a list or an object")
    if sorted(items) != list(range(n_vertices)):
        raise ParseError(f"field does not cover vertices 0..{n_vertices - 1}")
    return ScalarField(tuple(parse_rational(str(items[v])) for v in range(n_vertices)))


def ensure_generic(field: ScalarField, mesh: SurfaceMesh | None = None, seed: int = 0) -> ScalarField:
    """Make the field injective by perturbing tied values.

    Ties are broken by vertex id (lower id gets the smaller value), or by a
    seeded shuffle of the tied group when ``seed`` is nonzero.  Perturbations
    are smaller than half of every gap between distinct values, so the order
    of untied vertices is unchanged.
    """
    if mesh is not None and len(field) != mesh.n_vertices:
        raise ParseError("field size does not match the mesh")
    if field.is_injective():
        return field
    vals = field.values
    distinct = sorted(set(vals))
    gaps = [b - a for a, b in zip(distinct, distinct[1:])]
    groups: dict[Fraction, list[int]] = {}
    for v, x in enumerate(vals):
        groups.setdefault(x, []).append(v)
    biggest = max(len(g) for g in groups.values())
    eps = (min(gaps) if gaps else Fraction(1)) / (2 * biggest)
    rng = random.Random(seed)
    out = list(vals)
    for x in distinct:
        g = groups[x]
        if len(g) == 1:
            continue
        if seed:
            rng.shuffle(g)
        for pos, v in enumerate(g):
            out[v] = x + pos * eps
    return ScalarField(tuple(out))
