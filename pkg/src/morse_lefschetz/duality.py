"""Lefschetz-type duality between the absolute and relative Morse complexes.

The relative complex C⁺ of f and the absolute complex of -f are dual:
the unstable blocks of ``+`` generators are the descending regions read
backwards.  Here the reversed gradient is run on the dual-block complex
of the subdivision, whose cells carry a geometric orientation (cell
orientation followed by block orientation gives the orientation of M).

* ``eta_dual`` checks that the reversed Morse complex C_rev is the dual of
  C⁺ entry for entry, once the ``+`` orientations are turned into block
  orientations (``orientation_perp``).
* ``comparison_map`` is the chain map Γ: C⁻ -> C_rev obtained by pushing
  absolute Morse chains through the subdivision onto the blocks and then
  down the reversed gradient.
* ``pairing_matrices`` gives σ_k(a, b) = <η a, Γ b>; ``homology_pairing``
  evaluates it on homology generators.
* ``geometric_pairing`` recounts σ independently as signed intersections
  of descending chains with ascending block chains.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Mapping

from .chain_core import (ChainMap, GradedComplex, NotAChainMap, ZMatrix, homology,
                         induced_map_on_homology, is_quasi_isomorphism)
from .chain_core.snf import determinant
from .morse_model import build_absolute_complex, build_relative_complex
from .pl_engine.extract import Extraction
from .pl_engine.gradient import DiscreteGradient, Label, hats
from .pl_engine.mesh import Cell
from .pl_engine.subdivision import (BlockCollapse, Flag, block_gradient, block_orientation,
                                    subdivision_complex, subdivision_map)
from .pl_engine.vpaths import MorseEquivalence, chain_equivalences, morse_complex


class NotOrientable(ValueError):
    pass


class EtaMismatch(AssertionError):
    pass


class NotQuasiIso(ValueError):
    pass


class DescentViolated(AssertionError):
    pass


class TransversalityFailure(RuntimeError):
    """Descending and ascending chains share a subdivision cell; the block
    collapse must be re-run with another seed."""


def dual_id(pid: str) -> str:
    return "*" + pid


@dataclass
class DualityContext:
    extraction: Extraction
    plus: GradedComplex                 # C⁺ on point ids, ε⁺ applied
    minus: GradedComplex                # C⁻ on point ids, ε⁻ applied
    plus_cell: dict[str, Cell]          # C⁺ id -> critical cell of the relative gradient
    minus_cell: dict[str, Cell]         # C⁻ id -> critical cell of the absolute gradient
    eps_perp: dict[str, int]
    sd: GradedComplex
    collapse: BlockCollapse
    blocks: MorseEquivalence            # Morse complex of the collapse, labels ("*", cell)
    reversed: DiscreteGradient          # reversed relative gradient on the block complex
    rev_raw: MorseEquivalence
    rev: GradedComplex                  # C_rev on "*id" labels, ε^⊥ applied

    @property
    def n(self) -> int:
        return self.extraction.data.n


def orientation_perp(eps_plus: Mapping[str, int], cells: Mapping[str, Cell],
                     x: Extraction, collapse: BlockCollapse) -> dict[str, int]:
    """ε^⊥: orientation of each unstable block against its reference flag.

    The block of a generator a carried by cell s is oriented so that
    (ε⁺(a)·orientation of s) followed by the block gives the orientation of
    M; the reference orientation is that of the block's representative flag.
    """
    mesh = x.mesh
    if not mesh.orientable or not x.data.oriented:
        raise NotOrientable("duality needs an oriented surface")
    out = {}
    for a, s in cells.items():
        out[a] = eps_plus.get(a, 1) * block_orientation(mesh, s, collapse.representative[s])
    return out


def _relabel_target(m: ChainMap, target: GradedComplex) -> ChainMap:
    return ChainMap(m.source, target, m.mat)


def _block_complex(collapse: BlockCollapse) -> MorseEquivalence:
    eq = chain_equivalences(collapse.gradient)
    inv = {fl: ("*", c) for c, fl in collapse.representative.items()}
    stray = [c for c in collapse.gradient.critical() if c not in inv]
    if stray:
        raise TransversalityFailure(f"critical flag {stray[0]!r} is not a block representative")
    morse = eq.morse.relabel(inv)
    return MorseEquivalence(morse, ChainMap(morse, eq.inclusion.target, eq.inclusion.mat),
                            _relabel_target(eq.projection, morse), eq.homotopy)


def duality_context(x: Extraction) -> DualityContext:
    d = x.data
    if not d.oriented or not x.mesh.orientable:
        raise NotOrientable("duality needs an oriented surface")
    plus, minus = build_relative_complex(d), build_absolute_complex(d)
    hat_of = hats(x.tangent)
    plus_cell, minus_cell = {}, {}
    for p in d.points:
        if p.locus == "interior" or p.is_minus:
            minus_cell[p.id] = p.cell
        if p.locus == "interior":
            plus_cell[p.id] = p.cell
        elif p.is_plus:
            plus_cell[p.id] = hat_of[p.cell]
    sd = subdivision_complex(x.mesh)
    collapse = block_gradient(x.mesh, sd)
    eps_perp = orientation_perp(d.eps_plus, plus_cell, x, collapse)
    blocks = _block_complex(collapse)
    pairs = [(("*", b), ("*", a)) for a, b in x.relative.pairs]
    rg = DiscreteGradient("reversed", blocks.morse, pairs).check_acyclic()
    rev_raw = chain_equivalences(rg)
    if not rev_raw.morse.same_as(morse_complex(rg)):
        raise EtaMismatch("V-path and elimination routes disagree on the reversed gradient")
    names = {("*", s): dual_id(a) for a, s in plus_cell.items()}
    rev = rev_raw.morse.relabel(names).conjugate({dual_id(a): e for a, e in eps_perp.items()})
    return DualityContext(x, plus, minus, plus_cell, minus_cell, eps_perp, sd, collapse,
                          blocks, rg, rev_raw, rev)


# -- η ----------------------------------------------------------------------------

def eta_dual(ctx: DualityContext) -> dict[str, str]:
    """The basis bijection a -> *a, checked against the differentials.

    Every entry of the C⁺ differential must reappear in C_rev, transposed
    in the flipped degree with sign (-1)^k (k the C⁺ degree of the source).
    Raises EtaMismatch at the first disagreement.
    """
    P, R, n = ctx.plus, ctx.rev, ctx.n
    for k in P.degrees:
        want = sorted(dual_id(a) for a in P.gens(k))
        if sorted(R.gens(n - k)) != want:
            raise EtaMismatch(f"degree {k}: generators of C⁺ and C_rev do not correspond")
    for k in P.degrees:
        for a in P.gens(k):
            for b in P.gens(k - 1):
                lhs = P.entry(k, b, a) * (-1) ** k
                rhs = R.entry(n - k + 1, dual_id(a), dual_id(b))
                if lhs != rhs:
                    raise EtaMismatch(f"<∂⁺{a}, {b}> = {P.entry(k, b, a)} but the reversed "
                                      f"count *{b} -> *{a} is {rhs}")
    return {a: dual_id(a) for k in P.degrees for a in P.gens(k)}


# -- Γ ----------------------------------------------------------------------------

def comparison_map(ctx: DualityContext, check: bool = True) -> ChainMap:
    """Γ: C⁻ -> C_rev through the subdivision.

    C⁻ -> absolute Morse chains -> simplicial chains of K -> flags of sd K
    -> block complex -> reversed Morse complex.
    """
    x = ctx.extraction
    absq = chain_equivalences(x.absolute)
    to_cells = ChainMap.by_labels(ctx.minus, absq.morse, ctx.minus_cell, x.data.eps_minus)
    sub = subdivision_map(x.mesh, absq.inclusion.target, ctx.sd)
    names = {("*", s): dual_id(a) for a, s in ctx.plus_cell.items()}
    signs = {("*", s): ctx.eps_perp[a] for a, s in ctx.plus_cell.items()}
    finish = ChainMap.by_labels(ctx.rev_raw.morse, ctx.rev, names, signs)
    g = finish.compose(ctx.rev_raw.projection).compose(ctx.blocks.projection).compose(sub)
    g = g.compose(absq.inclusion).compose(to_cells)
    g = ChainMap(ctx.minus, ctx.rev, {k: g.at(k) for k in ctx.minus.degrees})
    if check:
        bad = g.first_violation()
        if bad is not None:
            raise NotAChainMap(f"Γ fails the chain condition in degree {bad}")
        if not is_quasi_isomorphism(g):
            raise NotQuasiIso("Γ is a chain map but not a quasi-isomorphism")
    return g


def naturality_check(ctx: DualityContext, gamma: ChainMap) -> bool:
    """The two routes C⁻ -> chains of sd K agree on homology.

    Route one subdivides the absolute inclusion; route two applies Γ and
    then includes C_rev back through the reversed gradient and the blocks.
    """
    x = ctx.extraction
    absq = chain_equivalences(x.absolute)
    to_cells = ChainMap.by_labels(ctx.minus, absq.morse, ctx.minus_cell, x.data.eps_minus)
    sub = subdivision_map(x.mesh, absq.inclusion.target, ctx.sd)
    direct = sub.compose(absq.inclusion).compose(to_cells)
    back = {dual_id(a): ("*", s) for a, s in ctx.plus_cell.items()}
    signs = {dual_id(a): e for a, e in ctx.eps_perp.items()}
    undo = ChainMap.by_labels(ctx.rev, ctx.rev_raw.morse, back, signs)
    via = ctx.blocks.inclusion.compose(ctx.rev_raw.inclusion).compose(undo).compose(gamma)
    via = ChainMap(ctx.minus, ctx.sd, {k: via.at(k) for k in ctx.minus.degrees})
    direct = ChainMap(ctx.minus, ctx.sd, {k: direct.at(k) for k in ctx.minus.degrees})
    hs, ht = homology(ctx.minus), homology(ctx.sd)
    a = induced_map_on_homology(direct, hs, ht)
    b = induced_map_on_homology(via, hs, ht)
    return all(a[k] == b[k] for k in a)


# -- pairing ----------------------------------------------------------------------

def pairing_matrices(ctx: DualityContext, gamma: ChainMap) -> dict[int, ZMatrix]:
    """σ_k with rows C⁺_k and columns C⁻_{n-k}: σ(a, b) = coefficient of *a in Γ b."""
    n, out = ctx.n, {}
    for k in range(n + 1):
        rows, cols = ctx.plus.gens(k), ctx.minus.gens(n - k)
        m = ZMatrix(len(rows), len(cols))
        G = gamma.at(n - k)
        for i, a in enumerate(rows):
            r = ctx.rev.index(n - k, dual_id(a))
            for j, v in G.row(r).items():
                m[i, j] = v
        out[k] = m
    return out


def descent_failures(ctx: DualityContext, sigma: Mapping[int, ZMatrix]) -> list[str]:
    """Where σ(∂⁺a, b) != (-1)^k σ(a, ∂⁻b) for a in degree k."""
    n, bad = ctx.n, []
    for k in range(1, n + 1):
        lhs = ctx.plus.d(k).T @ sigma[k - 1]
        rhs = (sigma[k] @ ctx.minus.d(n - k + 1)).scale((-1) ** k)
        if lhs != rhs:
            diff = lhs - rhs
            i, j, _ = next(diff.entries())
            bad.append(f"degree {k}: a={ctx.plus.gens(k)[i]}, b={ctx.minus.gens(n - k + 1)[j]}")
    return bad


@dataclass
class PairingBlock:
    degree: int                     # degree in C⁺
    matrix: list[list[int]]         # rows: free H_k(C⁺) generators, cols: free H_{n-k}(C⁻)
    determinant: int | None         # None when not square

    @property
    def unimodular(self) -> bool:
        return self.determinant is not None and abs(self.determinant) == 1


def homology_pairing(ctx: DualityContext, sigma: Mapping[int, ZMatrix]) -> list[PairingBlock]:
    """σ evaluated on free homology generators of C⁺ and C⁻, degree by degree."""
    n = ctx.n
    hp, hm = homology(ctx.plus), homology(ctx.minus)
    out = []
    for k in range(n + 1):
        gp = [hp.generators(k)[i] for i in hp.free_indices(k)]
        gm = [hm.generators(n - k)[i] for i in hm.free_indices(n - k)]
        if not gp and not gm:
            continue
        S = sigma[k]
        mat = [[sum(u * S[i, j] * w for i, u in a.items() for j, w in b.items()) for b in gm]
               for a in gp]
        det = determinant(mat) if len(gp) == len(gm) else None
        out.append(PairingBlock(k, mat, det))
    return out


# -- geometric recount ---------------------------------------------------------------

def _support(chain: Mapping[int, int], gens: list[Label]) -> set[Label]:
    return {gens[i] for i, v in chain.items() if v}


def geometric_pairing(ctx: DualityContext, seed: int = 0,
                      fault: Flag | None = None) -> dict[int, ZMatrix]:
    """σ' as signed intersections, without the reversed gradient or η.

    The descending chain of a ∈ C⁺_k is its relative Morse inclusion (a
    chain of mesh cells); the ascending chain of b ∈ C⁻_{n-k} is its
    absolute inclusion pushed onto the dual blocks by a block collapse of
    the subdivision.  A cell s meets its own block once, with sign +1 for
    the oriented block; a block representative differs from the oriented
    block by ``block_orientation``.  ``fault`` unpairs one flag of the
    collapse (testing hook).
    """
    x, n = ctx.extraction, ctx.n
    coll = block_gradient(x.mesh, ctx.sd, seed, forced=fault)
    reps = set(coll.representative.values())
    rel_crit = set(x.relative.critical())
    for fl in coll.gradient.critical():
        if fl not in reps and fl[-1] in rel_crit:
            raise TransversalityFailure(f"collapse seed {seed} leaves {fl!r} critical inside "
                                        f"the critical cell {fl[-1]!r}")
    beq = chain_equivalences(coll.gradient)
    flag_of = {s: fl for s, fl in coll.representative.items()}
    omega = {s: block_orientation(x.mesh, s, fl) for s, fl in flag_of.items()}
    req = chain_equivalences(x.relative)
    aeq = chain_equivalences(x.absolute)
    sub_abs = subdivision_map(x.mesh, aeq.inclusion.target, ctx.sd)
    sub_rel = subdivision_map(x.mesh, req.inclusion.target, ctx.sd)
    out = {}
    for k in range(n + 1):
        rows, cols = ctx.plus.gens(k), ctx.minus.gens(n - k)
        m = ZMatrix(len(rows), len(cols))
        rel_gens = req.inclusion.target.gens(k)
        desc = []
        for a in rows:
            j = req.morse.index(k, ctx.plus_cell[a])
            chain = req.inclusion.apply(k, {j: x.data.eps_plus.get(a, 1)})
            desc.append({rel_gens[i]: v for i, v in chain.items() if v})
        for jb, b in enumerate(cols):
            jm = aeq.morse.index(n - k, ctx.minus_cell[b])
            cells = aeq.inclusion.apply(n - k, {jm: x.data.eps_minus.get(b, 1)})
            flags = sub_abs.apply(n - k, cells)
            pushed = beq.projection.apply(n - k, flags)
            on_blocks = {beq.morse.gens(n - k)[i]: v for i, v in pushed.items() if v}
            if k == n - k:
                up = _support(beq.inclusion.apply(n - k, pushed), ctx.sd.gens(n - k))
            for ia, a in enumerate(rows):
                if k == n - k:
                    jr = req.morse.index(k, ctx.plus_cell[a])
                    down = sub_rel.apply(k, req.inclusion.apply(k, {jr: 1}))
                    shared = up & _support(down, ctx.sd.gens(k))
                    if shared:
                        raise TransversalityFailure(
                            f"ascending chain of {b} and descending chain of {a} share "
                            f"{sorted(shared)[0]!r} (collapse seed {seed})")
                v = sum(c * omega[s] * on_blocks.get(flag_of[s], 0) for s, c in desc[ia].items())
                if v:
                    m[ia, jb] = v
        out[k] = m
    return out


@dataclass
class GeometricCheck:
    seeds_tried: list[int]
    failures: list[str]                 # transversality messages of abandoned seeds
    degree_signs: dict[int, int]        # homology pairing of σ' = sign · that of σ (0: no sign)
    chain_level_equal: dict[int, bool]  # σ' == σ as matrices (seed-dependent)
    descent_ok: bool

    @property
    def agrees(self) -> bool:
        return self.descent_ok and all(s != 0 for s in self.degree_signs.values())

    def to_json(self) -> dict[str, Any]:
        return {"seeds_tried": self.seeds_tried, "failures": self.failures,
                "degree_signs": {str(k): v for k, v in sorted(self.degree_signs.items())},
                "chain_level_equal": {str(k): v for k, v in sorted(self.chain_level_equal.items())},
                "descent_ok": self.descent_ok, "agrees": self.agrees}


def _degree_sign(a: list[list[int]], b: list[list[int]]) -> int:
    if a == b:
        return 1
    if a == [[-v for v in row] for row in b]:
        return -1
    return 0


def geometric_pairing_check(ctx: DualityContext, sigma: Mapping[int, ZMatrix], seed: int = 0,
                            retries: int = 3,
                            faults: Mapping[int, Flag] | None = None) -> GeometricCheck:
    """Compare σ with the intersection count σ', reseeding the collapse on
    transversality failures.  ``faults`` maps a seed to a flag unpaired
    for that seed only.

    Different collapses push the ascending chains differently, so σ' is
    compared with σ on homology generators; chain-level equality is
    reported alongside.
    """
    faults = faults or {}
    tried, msgs = [], []
    for s in range(seed, seed + retries + 1):
        tried.append(s)
        try:
            geo = geometric_pairing(ctx, s, faults.get(s))
        except TransversalityFailure as exc:
            msgs.append(str(exc))
            continue
        hs = {b.degree: b.matrix for b in homology_pairing(ctx, sigma)}
        hg = {b.degree: b.matrix for b in homology_pairing(ctx, geo)}
        signs = {k: _degree_sign(hg.get(k, []), hs[k]) for k in hs}
        chain = {k: geo[k] == sigma[k] for k in sigma}
        return GeometricCheck(tried, msgs, signs, chain, not descent_failures(ctx, geo))
    raise TransversalityFailure(f"no transversal collapse after seeds {tried}: {msgs[-1]}")


# -- report ---------------------------------------------------------------------------

@dataclass
class DualityReport:
    eta_exact: bool
    eta_error: str | None
    gamma_chain_map: bool
    gamma_quasi_iso: bool
    descent_failures: list[str]
    blocks: list[PairingBlock]
    natural: bool = True
    geometric: GeometricCheck | None = None
    sigma: dict[int, ZMatrix] = field(default_factory=dict, repr=False)

    @property
    def unimodular(self) -> bool:
        return bool(self.blocks) and all(b.unimodular for b in self.blocks)

    @property
    def passed(self) -> bool:
        ok = (self.eta_exact and self.gamma_chain_map and self.gamma_quasi_iso and self.natural
              and not self.descent_failures and self.unimodular)
        return ok and (self.geometric is None or self.geometric.agrees)

    def to_json(self) -> dict[str, Any]:
        return {
            "eta_exact": self.eta_exact,
            "eta_error": self.eta_error,
            "gamma_chain_map": self.gamma_chain_map,
            "gamma_quasi_iso": self.gamma_quasi_iso,
            "naturality": self.natural,
            "descent_ok": not self.descent_failures,
            "descent_failures": self.descent_failures,
            "pairing": [{"degree": b.degree, "matrix": b.matrix, "determinant": b.determinant,
                         "unimodular": b.unimodular} for b in self.blocks],
            "unimodular": self.unimodular,
            "geometric": self.geometric.to_json() if self.geometric else None,
            "passed": self.passed,
        }


def verify_duality(x: Extraction, cross_check: bool = False, seed: int = 0,
                   strict: bool = False) -> DualityReport:
    """Run η, Γ, descent and the homology pairing; optionally the recount.

    With ``strict`` the first failing check raises (EtaMismatch,
    NotAChainMap, NotQuasiIso, DescentViolated); otherwise failures are
    recorded in the report.
    """
    ctx = duality_context(x)
    eta_err = None
    try:
        eta_dual(ctx)
    except EtaMismatch as exc:
        if strict:
            raise
        eta_err = str(exc)
    gamma = comparison_map(ctx, check=False)
    chain_ok = gamma.first_violation() is None
    if strict and not chain_ok:
        raise NotAChainMap(f"Γ fails the chain condition in degree {gamma.first_violation()}")
    qiso = chain_ok and is_quasi_isomorphism(gamma)
    if strict and not qiso:
        raise NotQuasiIso("Γ is not a quasi-isomorphism")
    sigma = pairing_matrices(ctx, gamma)
    bad = descent_failures(ctx, sigma)
    if strict and bad:
        raise DescentViolated(bad[0])
    blocks = homology_pairing(ctx, sigma)
    natural = chain_ok and naturality_check(ctx, gamma)
    geo = geometric_pairing_check(ctx, sigma, seed) if cross_check else None
    return DualityReport(eta_err is None, eta_err, chain_ok, qiso, bad, blocks, natural, geo, sigma)


def reextract_check(x: Extraction, ctx: DualityContext | None = None, seed: int = 0) -> dict[str, Any]:
    """Cross-check C_rev against the absolute complex extracted from -f.

    The two complexes come from different gradients, so only homology and
    the swapped boundary census are compared: + points of f sit where the
    − points of -f are.
    """
    from .pl_engine.extract import extract_morse_data

    ctx = ctx or duality_context(x)
    y = extract_morse_data(x.mesh, x.field.negated(), seed)
    h_rev = homology(ctx.rev).group
    h_neg = homology(build_absolute_complex(y.data)).group
    def site(ext: Extraction, c: Cell) -> int:
        # boundary extrema sit at a vertex; maxima are carried by an edge
        return max(c, key=lambda v: ext.field.values[v])

    plus_f = sorted(site(x, p.cell) for p in x.data.plus)
    minus_neg = sorted(site(y, p.cell) for p in y.data.minus)
    return {"homology_rev": str(h_rev), "homology_minus_of_negated": str(h_neg),
            "homology_match": h_rev == h_neg,
            "plus_points": plus_f, "minus_points_of_negated": minus_neg,
            "type_swap": plus_f == minus_neg}
