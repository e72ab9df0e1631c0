"""Ground truth from the triangulation itself: simplicial homology of M,
(M, ∂M) and ∂M, and the long exact sequence of the pair.

Nothing here uses gradients or critical points.  Simplices are oriented by
increasing vertex id.
"""

from __future__ import annotations

from .chain_core import (GradedAbelianGroup, GradedComplex, LongExactSequence, ZMatrix,
                         homology, label_sequence, long_exact_sequence)
from .pl_engine.mesh import Cell, SurfaceMesh, faces


def _complex_on(cells: dict[int, list[Cell]]) -> GradedComplex:
    index = {k: {c: i for i, c in enumerate(v)} for k, v in cells.items()}
    diff = {}
    for k in (1, 2):
        m = ZMatrix(len(cells[k - 1]), len(cells[k]))
        for j, c in enumerate(cells[k]):
            for s, f in faces(c):
                i = index[k - 1].get(f)
                if i is not None:
                    m[i, j] = s
        diff[k] = m
    return GradedComplex(cells, diff)


def simplicial_complex(mesh: SurfaceMesh, part: str = "full") -> GradedComplex:
    """Simplicial chains of M ("full"), of ∂M ("boundary") or of M/∂M ("relative")."""
    allc = {k: mesh.cells(k) for k in (0, 1, 2)}
    if part == "full":
        cells = allc
    elif part == "boundary":
        cells = {k: [c for c in allc[k] if mesh.in_boundary(c)] for k in (0, 1, 2)}
    elif part == "relative":
        cells = {k: [c for c in allc[k] if not mesh.in_boundary(c)] for k in (0, 1, 2)}
    else:
        raise ValueError(f"unknown part {part!r}")
    return _complex_on(cells)


def simplicial_homology(mesh: SurfaceMesh) -> GradedAbelianGroup:
    return homology(simplicial_complex(mesh, "full")).group


def relative_homology(mesh: SurfaceMesh) -> GradedAbelianGroup:
    return homology(simplicial_complex(mesh, "relative")).group


def boundary_homology(mesh: SurfaceMesh) -> GradedAbelianGroup:
    return homology(simplicial_complex(mesh, "boundary")).group


def les_of_pair(mesh: SurfaceMesh) -> LongExactSequence:
    """LES of 0 -> C(∂M) -> C(M) -> C(M, ∂M) -> 0."""
    ses = label_sequence(simplicial_complex(mesh, "boundary"), simplicial_complex(mesh, "full"),
                         simplicial_complex(mesh, "relative"))
    return long_exact_sequence(ses)


def euler_checks(mesh: SurfaceMesh) -> dict[str, bool]:
    """Face-count Euler characteristics against the homology-derived ones."""
    chi = mesh.euler_characteristic()
    chi_b = mesh.boundary_euler_characteristic()
    return {
        "M": simplicial_homology(mesh).euler_characteristic() == chi,
        "boundary": boundary_homology(mesh).euler_characteristic() == chi_b,
        "relative": relative_homology(mesh).euler_characteristic() == chi - chi_b,
    }
