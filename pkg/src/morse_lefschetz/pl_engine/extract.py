"""Assemble Morse data from a mesh and a field."""

from __future__ import annotations

from dataclasses import dataclass

from ..chain_core import GradedComplex
from ..morse_model import CriticalPoint, MorseData, hat_id
from .field import ScalarField, ensure_generic
from .gradient import (DiscreteGradient, Label, build_tangent_gradient, cell_id, hats,
                       restrict_to_boundary, specialize_gradient)
from .mesh import SurfaceMesh
from .vpaths import morse_complex


class EulerAuditFailure(AssertionError):
    pass


@dataclass
class Extraction:
    """Morse data plus the gradients it was read from."""

    mesh: SurfaceMesh
    field: ScalarField
    data: MorseData
    tangent: DiscreteGradient
    absolute: DiscreteGradient
    relative: DiscreteGradient
    boundary: DiscreteGradient
    tangent_complex: GradedComplex      # Morse complex of the tangent gradient (cell labels)
    ids: dict[Label, str]               # generator cell -> critical point id (hats -> "x^")


def _counts(M: GradedComplex, ids: dict[Label, str]) -> dict[tuple[str, str], int]:
    out = {}
    for k in M.degrees:
        for i, j, v in M.d(k).entries():
            out[(ids[M.gens(k)[j]], ids[M.gens(k - 1)[i]])] = v
    return out


def tangent_block_violations(x: Extraction) -> list[str]:
    """Boundary generators of the tangent complex must bound only boundary
    generators, with the counts of the boundary complex."""
    d, T = x.data, x.tangent_complex
    bd = {p.id for p in d.boundary}
    bad = []
    for k in T.degrees:
        for i, j, v in T.d(k).entries():
            s, t = x.ids[T.gens(k)[j]], x.ids[T.gens(k - 1)[i]]
            if s in bd and t not in bd:
                bad.append(f"boundary {s} bounds interior {t}")
            elif s in bd and d.N_boundary.get((s, t), 0) != v:
                bad.append(f"count {s} -> {t} differs from the boundary complex")
    for (s, t), v in d.N_boundary.items():
        k = d.point(s).index
        if T.entry(k, d.point(t).cell, d.point(s).cell) != v:
            bad.append(f"count {s} -> {t} missing from the tangent complex")
    return bad


def euler_audit(d: MorseData, mesh: SurfaceMesh) -> dict[str, bool]:
    from ..morse_model import build_absolute_complex, build_boundary_complex, build_relative_complex

    chi, chi_b = mesh.euler_characteristic(), mesh.boundary_euler_characteristic()
    return {
        "absolute": build_absolute_complex(d).euler_characteristic() == chi,
        "relative": build_relative_complex(d).euler_characteristic() == chi - chi_b,
        "boundary": build_boundary_complex(d).euler_characteristic() == chi_b,
    }


def extract_morse_data(mesh: SurfaceMesh, fieldv: ScalarField, seed: int = 0) -> Extraction:
    """Critical points, orbit counts of the three gradient flavors and the twist."""
    f = ensure_generic(fieldv, mesh, seed)
    T = build_tangent_gradient(mesh, f)
    A = specialize_gradient(T, "absolute", mesh)
    R = specialize_gradient(T, "relative", mesh)
    B = restrict_to_boundary(T, mesh)
    hat_of = hats(T)
    hat_cells = {h: x for x, h in hat_of.items()}
    ids: dict[Label, str] = {}
    points = []
    for c in T.critical():
        if c in hat_cells:
            continue
        bc = T.boundary.get(c)
        ids[c] = cell_id(c)
        if bc is None:
            points.append(CriticalPoint(ids[c], "interior", len(c) - 1, cell=c))
        else:
            points.append(CriticalPoint(ids[c], "boundary", bc.index, bc.btype, cell=c))
    for h, x in hat_cells.items():
        ids[h] = hat_id(ids[x])
    TC = morse_complex(T)
    plus_ids = {ids[x]: ids[h] for x, h in hat_of.items()}
    rel_ids = {c: ids[c] for c in ids}
    for h, x in hat_cells.items():
        rel_ids[h] = ids[x]
    n_minus = _counts(morse_complex(A), ids)
    n_plus = _counts(morse_complex(R), rel_ids)
    n_bd = _counts(morse_complex(B), ids)
    bd_ids = {p.id for p in points if p.locus == "boundary"}
    phi = {(s, t): v for (s, t), v in _counts(TC, ids).items() if t in bd_ids and s not in bd_ids}
    gens = sorted(ids[c] for c in ids)
    eps = {g: 1 for g in gens if g not in plus_ids.values()}
    d = MorseData(2, points, n_minus, n_plus, n_bd, phi, dict(eps), dict(eps), mesh.orientable)
    d.validate()
    audit = euler_audit(d, mesh)
    if not all(audit.values()):
        raise EulerAuditFailure(f"Euler audit failed: {audit}")
    x = Extraction(mesh, f, d, T, A, R, B, TC, ids)
    bad = tangent_block_violations(x)
    if bad:
        raise EulerAuditFailure(bad[0])  # pragma: no cover - internal guard
    return x
