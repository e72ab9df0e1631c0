"""Deterministic fixture surfaces and default fields.

Shapes are built from rings of vertices in the plane (disk, annulus), a
strip with a twisted gluing (Möbius band) and a subdivided 4g-gon with the
usual a b a⁻¹ b⁻¹ gluing plus punctures (genus g, b boundary loops).  The
default field is a tilted height ``1000 x + 7 y`` of the first-occurrence
plane coordinates, rounded to exact decimals.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction

from .pl_engine.field import ScalarField, ensure_generic
from .pl_engine.mesh import SurfaceMesh


class BadParameters(ValueError):
    pass


@dataclass(frozen=True)
class FixtureSpec:
    shape: str
    resolution: int
    genus: int = 0
    holes: int = 1
    field_seed: int | None = None   # None: tilted height field

    @property
    def name(self) -> str:
        base = f"{self.shape}{self.resolution}" if self.shape != "genus" else \
            f"genus{self.genus}_{self.holes}_{self.resolution}"
        return base if self.field_seed is None else f"{base}_r{self.field_seed}"


NAMED = {
    "DISK1": FixtureSpec("disk", 8),
    "ANN1": FixtureSpec("annulus", 8),
    "MOB1": FixtureSpec("mobius", 8),
    "G2B1": FixtureSpec("genus", 3, genus=2, holes=1),
}


def _ring(r: float, m: int, phase: float = 0.0) -> list[tuple[float, float]]:
    return [(r * math.cos(2 * math.pi * i / m + phase), r * math.sin(2 * math.pi * i / m + phase))
            for i in range(m)]


def _band(inner: list[int], outer: list[int], closed: bool = True) -> list[tuple[int, int, int]]:
    """Triangulate between two parallel vertex rows of equal length."""
    m = len(inner)
    out = []
    for i in range(m if closed else m - 1):
        j = (i + 1) % m
        out.append((inner[i], outer[j], inner[j]))
        out.append((inner[i], outer[i], outer[j]))
    return out


def disk(m: int, rings: int = 2) -> SurfaceMesh:
    """Center vertex plus ``rings`` concentric rings of m vertices."""
    if m < 3 or rings < 1:
        raise BadParameters("disk needs resolution >= 3")
    coords = [(0.0, 0.0)]
    ids = []
    for k in range(1, rings + 1):
        start = len(coords)
        coords += _ring(k / rings, m, math.pi * (k % 2) / m)
        ids.append(list(range(start, start + m)))
    r1 = ids[0]
    tris = [(0, r1[(i + 1) % m], r1[i]) for i in range(m)]
    for k in range(rings - 1):
        tris += _band(ids[k], ids[k + 1])
    return SurfaceMesh(len(coords), tris, coords)


def annulus(m: int) -> SurfaceMesh:
    if m < 3:
        raise BadParameters("annulus needs resolution >= 3")
    coords = _ring(1.0, m, 0.1) + _ring(1.5, m, 0.1 + math.pi / m) + _ring(2.0, m, 0.1)
    rings = [list(range(k * m, (k + 1) * m)) for k in range(3)]
    tris = _band(rings[0], rings[1]) + _band(rings[1], rings[2])
    return SurfaceMesh(len(coords), tris, coords)


def mobius(m: int) -> SurfaceMesh:
    """Strip of m columns and 3 rows, last column glued to the first upside down."""
    if m < 3:
        raise BadParameters("mobius needs resolution >= 3")
    h = 2

    def vid(i: int, j: int) -> int:
        return 3 * i + j if i < m else h - j
    coords = []
    for i in range(m):
        u = 2 * math.pi * i / m
        for j in range(h + 1):
            v = (j - 1) * 0.5
            coords.append(((1 + v * math.cos(u / 2)) * math.cos(u),
                           (1 + v * math.cos(u / 2)) * math.sin(u),
                           v * math.sin(u / 2)))
    tris = []
    for i in range(m):
        for j in range(h):
            a, b = vid(i, j), vid(i, j + 1)
            c, d = vid(i + 1, j), vid(i + 1, j + 1)
            tris.append((a, c, d))
            tris.append((a, d, b))
    return SurfaceMesh(len(coords), tris, coords)


def genus(g: int, b: int, m: int = 3) -> SurfaceMesh:
    """Closed genus-g surface with b open disks removed (b >= 1)."""
    if g < 0 or b < 1 or m < 3:
        raise BadParameters("genus surface needs g >= 0, b >= 1, resolution >= 3")
    if g == 0:
        return _puncture(disk(3 * m, rings=3), b - 1)
    sides = 4 * g
    n_outer = sides * m
    # word a1 b1 a1^-1 b1^-1 ...: side s is (letter, direction)
    word = []
    for t in range(g):
        word += [(2 * t, 1), (2 * t + 1, 1), (2 * t, -1), (2 * t + 1, -1)]
    corner = 0
    poly = _ring(1.0, n_outer, math.pi / sides)
    coords: list[tuple[float, float]] = [poly[0]]
    letter_pts: dict[int, list[int]] = {}
    outer_ids = []
    for s, (letter, direction) in enumerate(word):
        if letter not in letter_pts:
            ids = []
            for q in range(1, m):
                coords.append(poly[s * m + q])
                ids.append(len(coords) - 1)
            letter_pts[letter] = ids
        pts = letter_pts[letter] if direction == 1 else letter_pts[letter][::-1]
        outer_ids += [corner] + pts
    rings = [outer_ids]
    for r in (0.75, 0.5, 0.25):
        start = len(coords)
        coords += _ring(r, n_outer, math.pi / sides + math.pi * (len(rings) % 2) / n_outer)
        rings.append(list(range(start, start + n_outer)))
    tris = []
    for k in range(3):
        tris += _band(rings[k + 1], rings[k])
    base = SurfaceMesh(len(coords), tris, coords)
    return _puncture(base, b - 1)


def _puncture(mesh: SurfaceMesh, extra: int) -> SurfaceMesh:
    """Remove ``extra`` vertex-disjoint triangles whose vertices are all interior."""
    if extra == 0:
        return mesh
    cands = []
    for t in mesh.triangles:
        if any(v in mesh.boundary_vertices for v in t):
            continue
        cands.append(t)
    chosen: list[tuple[int, int, int]] = []
    used: set[int] = set()
    for t in cands:
        if len(chosen) == extra:
            break
        if used & set(t):
            continue
        chosen.append(t)
        used |= set(t)
    if len(chosen) < extra:
        raise BadParameters("resolution too small for the requested number of boundary loops")
    keep = [t for t in mesh.triangles if t not in chosen]
    return SurfaceMesh(mesh.n_vertices, keep, mesh.coords)


def build_mesh(spec: FixtureSpec) -> SurfaceMesh:
    if spec.shape == "disk":
        return disk(spec.resolution)
    if spec.shape == "annulus":
        return annulus(spec.resolution)
    if spec.shape == "mobius":
        return mobius(spec.resolution)
    if spec.shape == "genus":
        return genus(spec.genus, spec.holes, spec.resolution)
    raise BadParameters(f"unknown shape {spec.shape!r}")


def height_field(mesh: SurfaceMesh) -> ScalarField:
    coords = mesh.coords or [(float(v), 0.0) for v in range(mesh.n_vertices)]
    vals = [Fraction(round((1000 * p[0] + 7 * p[1]) * 10**6), 10**6) for p in coords]
    return ensure_generic(ScalarField(tuple(vals)), mesh)


def random_field(mesh: SurfaceMesh, seed: int) -> ScalarField:
    rng = random.Random(seed)
    vals = [Fraction(rng.randrange(10**6), 1000) for _ in range(mesh.n_vertices)]
    return ensure_generic(ScalarField(tuple(vals)), mesh)


def gen_fixture(spec: FixtureSpec | str) -> tuple[SurfaceMesh, ScalarField]:
    if isinstance(spec, str):
        if spec not in NAMED:
            raise BadParameters(f"unknown fixture {spec!r}")
        spec = NAMED[spec]
    mesh = build_mesh(spec)
    fld = height_field(mesh) if spec.field_seed is None else random_field(mesh, spec.field_seed)
    return mesh, fld


def random_spec(rng: random.Random) -> FixtureSpec:
    """A small random fixture with a random field (for property tests)."""
    shape = rng.choice(["disk", "annulus", "mobius", "genus"])
    if shape == "genus":
        return FixtureSpec("genus", 3, genus=rng.choice([0, 1]), holes=rng.randint(1, 3),
                           field_seed=rng.randrange(10**6))
    return FixtureSpec(shape, rng.randint(3, 7), field_seed=rng.randrange(10**6))
