"""Morse complexes of discrete gradients, two ways.

``count_vpaths`` pushes the boundary of each critical cell down the
gradient flow, summing signed V-path weights.  ``chain_equivalences``
cancels the matched pairs by Gaussian elimination and returns the
inclusion/projection between Morse and cell chains.  The two routes are
independent and must agree entry for entry.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Mapping

from ..chain_core import ChainMap, GradedComplex, ZMatrix, reduce_by_pairs
from .gradient import DiscreteGradient, Label


def flow(g: DiscreteGradient, k: int, chain: Mapping[Label, int],
         order: dict[Label, int] | None = None) -> dict[Label, int]:
    """Push a degree-k chain along V-paths until only critical cells remain.

    A cell matched upward with ``b`` is replaced by ``-[b:a]^-1 (∂b - [b:a] a)``;
    cells matched downward are dropped.
    """
    if order is None:
        order = g.topological_order(k)
    c = {x: v for x, v in chain.items() if v}
    heap = [(order[x], x) for x in c if x in order]
    heapq.heapify(heap)
    seen = set()
    while heap:
        _, a = heapq.heappop(heap)
        if a in seen:
            continue
        seen.add(a)
        lam = c.pop(a, 0)
        if not lam:
            continue
        b = g.matched_up(a)
        fb = g.facets(b)
        p = fb[a]
        for f, v in fb.items():
            if f == a:
                continue
            nv = c.get(f, 0) - lam * p * v
            if nv:
                c[f] = nv
            else:
                c.pop(f, None)
            if f in order and f not in seen:
                heapq.heappush(heap, (order[f], f))
    return {x: v for x, v in c.items() if g.partner(x) is None}


def count_vpaths(g: DiscreteGradient, eps: Mapping[Label, int] | None = None) -> dict[int, ZMatrix]:
    """Morse differential ``d[k]``: critical (k) -> critical (k-1), by V-path counting."""
    eps = eps or {}
    out = {}
    for k in g.complex.degrees:
        src = g.critical(k)
        tgt = g.critical(k - 1)
        pos = {x: i for i, x in enumerate(tgt)}
        m = ZMatrix(len(tgt), len(src))
        if tgt:
            order = g.topological_order(k - 1)
            for j, b in enumerate(src):
                for x, v in flow(g, k - 1, g.facets(b), order).items():
                    m[pos[x], j] = v * eps.get(x, 1) * eps.get(b, 1)
        out[k] = m
    return out


def morse_complex(g: DiscreteGradient, eps: Mapping[Label, int] | None = None) -> GradedComplex:
    """Morse complex on the critical cells, differential from V-path counts."""
    basis = {k: g.critical(k) for k in g.complex.degrees}
    return GradedComplex(basis, count_vpaths(g, eps)).validate()


@dataclass
class MorseEquivalence:
    morse: GradedComplex
    inclusion: ChainMap    # Morse -> cells
    projection: ChainMap   # cells -> Morse
    homotopy: dict[int, ZMatrix]


def chain_equivalences(g: DiscreteGradient) -> MorseEquivalence:
    """Chain equivalences between the Morse complex and the cell complex of ``g``.

    ``projection ∘ inclusion = id`` and ``id - inclusion ∘ projection = d h + h d``.
    """
    red = reduce_by_pairs(g.complex, g.morse_pairs(), track_homotopy=True)
    return MorseEquivalence(red.reduced, red.incl, red.proj, red.homotopy or {})
