"""Bounded complexes of representations and their endomorphism dg algebras.

A complex of representations carries named blocks in every term; the Hom
complex between two such complexes gets its basis from the block-pair Hom
spaces, labeled in the h/e/p convention for closure-representation blocks
("H1" -> "E2" gives he_12, and so on), with the source term degree kept on
every label so that labels can be disambiguated with a superscript.

Sign convention throughout: d(f) = d_Y . f - (-1)^|f| f . d_X.  The mapping
cone and shift conventions live in chain_complex.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from .chain_complex import ChainComplex, ChainMap, is_acyclic, mapping_cone
from .dg import DgAlgebra
from .exact_linalg import CoeffRing, ExactMatrix, PresolvedSolver
from .quiver_rep import (
    Quiver,
    RepMorphism,
    Representation,
    hom_space,
    validate_representation,
)


class ComplexOfReps:
    """Bounded cochain complex of representations with block bookkeeping."""

    def __init__(self, quiver: Quiver, ring: CoeffRing,
                 terms: Dict[int, Representation],
                 differentials: Dict[int, RepMorphism]):
        self.quiver = quiver
        self.ring = ring
        self.terms = {q: t for q, t in terms.items() if not t.is_zero()}
        self.differentials = {q: d for q, d in differentials.items()
                              if not d.is_zero()}

    def degrees(self) -> List[int]:
        return sorted(self.terms)

    def term(self, q: int) -> Optional[Representation]:
        return self.terms.get(q)

    def differential(self, q: int) -> Optional[RepMorphism]:
        return self.differentials.get(q)

    def stalk_complex(self, v: str) -> ChainComplex:
        ranks = {q: t.rank(v) for q, t in self.terms.items()}
        diffs = {}
        for q, d in self.differentials.items():
            m = d.component(v)
            if m.rows and m.cols:
                diffs[q] = m
        return ChainComplex(self.ring, ranks, diffs)


def validate_complex_of_reps(X: ComplexOfReps) -> list:
    problems = []
    for q, d in X.differentials.items():
        src, tgt = X.term(q), X.term(q + 1)
        if src is None or tgt is None:
            problems.append(f"differential at degree {q} touches a zero term")
            continue
        if d.source is not src or d.target is not tgt:
            problems.append(f"differential at degree {q} has wrong endpoints")
            continue
        problems.extend(f"degree {q}: {p}" for p in d.validate())
    for q in X.degrees():
        d0 = X.differential(q)
        d1 = X.differential(q + 1)
        if d0 is not None and d1 is not None:
            if not d1.compose(d0).is_zero():
                problems.append(f"d.d != 0 at degree {q}")
    for q, t in X.terms.items():
        bad = validate_representation(t)
        problems.extend(f"term {q}: {p}" for p in bad)
    return problems


def shift_complex_of_reps(X: ComplexOfReps, k: int) -> ComplexOfReps:
    """X[k]^q = X^(q+k) with differentials scaled by (-1)^k."""
    terms = {q - k: t for q, t in X.terms.items()}
    diffs = {}
    for q, d in X.differentials.items():
        diffs[q - k] = d if k % 2 == 0 else d.scale(-1)
    return ComplexOfReps(X.quiver, X.ring, terms, diffs)


@dataclass
class ResolutionReport:
    ok: bool
    failures: List[dict]

    def __bool__(self):
        return self.ok


def validate_resolution(J: ComplexOfReps,
                        targets: Dict[int, Tuple[Representation, RepMorphism]]
                        ) -> ResolutionReport:
    """Is the augmentation (targets, placed per degree) -> J a quasi-iso
    on every vertex stalk?

    targets maps a placement degree to (representation, morphism into
    J^degree); the target complex carries zero differentials.  Exactness is
    checked stalkwise over the ring, reporting each failing (vertex,
    degree).
    """
    failures = []
    problems = validate_complex_of_reps(J)
    if problems:
        return ResolutionReport(False, [{"structural": p} for p in problems])
    for q, (rep, morph) in targets.items():
        term = J.term(q)
        if term is None or morph.source is not rep or morph.target is not term:
            failures.append({"structural":
                             f"augmentation at degree {q} has bad endpoints"})
            continue
        bad = morph.validate()
        failures.extend({"structural": f"degree {q}: {p}"} for p in bad)
        nxt = J.differential(q)
        if nxt is not None and not nxt.compose(morph).is_zero():
            failures.append({"structural":
                             f"d . augmentation != 0 at degree {q}"})
    if failures:
        return ResolutionReport(False, failures)
    for v in J.quiver.vertices:
        target_ranks = {q: rep.rank(v) for q, (rep, _) in targets.items()}
        t_complex = ChainComplex(J.ring, target_ranks, {})
        comps = {}
        for q, (rep, morph) in targets.items():
            m = morph.component(v)
            if m.rows and m.cols:
                comps[q] = m
        phi = ChainMap(t_complex, J.stalk_complex(v), comps)
        cone = mapping_cone(phi)
        if not is_acyclic(cone):
            from .chain_complex import cone_report

            rep = cone_report(cone)
            bad_degrees = [q for q, r in rep.items()
                           if r["betti"] or r["torsion"]]
            failures.append({"vertex": v, "degrees": bad_degrees})
    return ResolutionReport(not failures, failures)


# ---------------------------------------------------------------------------
# labels
# ---------------------------------------------------------------------------

_BLOCK_RE = re.compile(r"^([HEP])(\d+)$")


@dataclass(frozen=True)
class HomLabel:
    """Label of a block-pair Hom generator, with its source term degree."""

    kind: str          # "h" | "e" | "p" | "he" | "hp" | "ep" | "gen"
    indices: tuple
    p: int             # source term degree

    def base(self) -> str:
        k = self.kind
        if k in ("h", "e", "p"):
            return f"{k}{self.indices[0]}"
        if k in ("he", "hp"):
            j, i = self.indices
            sep = "" if j < 10 and i < 10 else ","
            return f"{k}_{j}{sep}{i}"
        if k == "ep":
            i, kk = self.indices
            sep = "" if i < 10 and kk < 10 else ","
            return f"e_{i}{sep}{kk}"
        return "gen_" + "_".join(str(x) for x in self.indices)

    def render(self, ambiguous: bool = False) -> str:
        s = self.base()
        return f"{s}^({self.p})" if ambiguous else s

    def matches(self, kind: str, indices: tuple,
                p: Optional[int] = None) -> bool:
        return (self.kind == kind and self.indices == tuple(indices)
                and (p is None or self.p == p))


def _label_for(src_name: str, dst_name: str, k: int, p: int) -> HomLabel:
    ms, md = _BLOCK_RE.match(src_name or ""), _BLOCK_RE.match(dst_name or "")
    if ms and md and k == 0:
        ks, i_s = ms.group(1), int(ms.group(2))
        kd, i_d = md.group(1), int(md.group(2))
        if ks == kd and i_s == i_d:
            return HomLabel(ks.lower(), (i_s,), p)
        if ks == "H" and kd == "E":
            return HomLabel("he", (i_s, i_d), p)
        if ks == "H" and kd == "P":
            return HomLabel("hp", (i_s, i_d), p)
        if ks == "E" and kd == "P":
            return HomLabel("ep", (i_s, i_d), p)
    return HomLabel("gen", (src_name, dst_name, k), p)


# ---------------------------------------------------------------------------
# hom complexes
# ---------------------------------------------------------------------------


@dataclass
class HomBasisElement:
    p: int              # source term degree
    src_block: int
    dst_block: int
    k: int              # index inside the block-pair hom basis
    morphism: RepMorphism   # block source rep -> block target rep
    label: HomLabel


class _PairCache:
    """Hom bases and solvers per (source block rep, target block rep)."""

    def __init__(self):
        self._gens: Dict[tuple, list] = {}
        self._solvers: Dict[tuple, PresolvedSolver] = {}

    def gens(self, a: Representation, b: Representation) -> list:
        key = (id(a), id(b))
        if key not in self._gens:
            self._gens[key] = hom_space(a, b)
        return self._gens[key]

    def coords(self, a: Representation, b: Representation,
               g: RepMorphism) -> Optional[list]:
        gens = self.gens(a, b)
        if not gens:
            return [] if g.is_zero() else None
        key = (id(a), id(b))
        solver = self._solvers.get(key)
        if solver is None:
            import numpy as np

            flats = [m.flatten() for m in gens]
            mat = np.empty((len(flats[0]), len(flats)), dtype=object)
            for j, f in enumerate(flats):
                mat[:, j] = f
            solver = PresolvedSolver(ExactMatrix(a.ring, mat))
            self._solvers[key] = solver
        return solver.solve(g.flatten())


def _block_components(d: RepMorphism) -> Dict[Tuple[int, int], RepMorphism]:
    """Decompose a morphism of direct sums into nonzero block morphisms."""
    src, dst = d.source, d.target
    out = {}
    for bi, (bname, brep) in enumerate(dst.blocks):
        for ai, (aname, arep) in enumerate(src.blocks):
            comps = {}
            nonzero = False
            for v in src.quiver.vertices:
                if not arep.rank(v) or not brep.rank(v):
                    continue
                roff = dst.block_offsets(v)
                coff = src.block_offsets(v)
                full = d.component(v)
                sub = full.submatrix(
                    range(roff[bi], roff[bi + 1]),
                    range(coff[ai], coff[ai + 1]))
                comps[v] = sub
                if not sub.is_zero():
                    nonzero = True
            if nonzero:
                out[(ai, bi)] = RepMorphism(arep, brep, comps)
    return out


class HomComplex:
    """Hom(X, Y) as a ChainComplex plus the labeled block basis behind it."""

    def __init__(self, X: ComplexOfReps, Y: ComplexOfReps):
        if X.quiver.vertices != Y.quiver.vertices or \
                X.quiver.arrows != Y.quiver.arrows:
            raise ValueError("complexes live on different quivers")
        self.X, self.Y = X, Y
        self.ring = X.ring
        self.pairs = _PairCache()
        xdeg, ydeg = X.degrees(), Y.degrees()
        self.basis: Dict[int, List[HomBasisElement]] = {}
        if xdeg and ydeg:
            for m in range(ydeg[0] - xdeg[-1], ydeg[-1] - xdeg[0] + 1):
                basis = self._degree_basis(m)
                if basis:
                    self.basis[m] = basis
        self._index: Dict[int, Dict[tuple, int]] = {
            m: {(e.p, e.src_block, e.dst_block, e.k): i
                for i, e in enumerate(bs)}
            for m, bs in self.basis.items()
        }
        self._dblocks_X = {q: _block_components(d)
                           for q, d in X.differentials.items()}
        self._dblocks_Y = {q: _block_components(d)
                           for q, d in Y.differentials.items()}
        self.complex = self._build_complex()

    # -- basis ------------------------------------------------------------

    def _degree_basis(self, m: int) -> List[HomBasisElement]:
        out = []
        for p in self.X.degrees():
            xt = self.X.term(p)
            yt = self.Y.term(p + m)
            if xt is None or yt is None:
                continue
            for ai, (aname, arep) in enumerate(xt.blocks):
                for bi, (bname, brep) in enumerate(yt.blocks):
                    for k, gen in enumerate(self.pairs.gens(arep, brep)):
                        out.append(HomBasisElement(
                            p, ai, bi, k, gen,
                            _label_for(aname, bname, k, p)))
        return out

    def rank(self, m: int) -> int:
        return len(self.basis.get(m, []))

    def ranks(self) -> Dict[int, int]:
        return {m: len(b) for m, b in sorted(self.basis.items())}

    def labels(self, m: int) -> List[HomLabel]:
        return [e.label for e in self.basis.get(m, [])]

    def rendered_labels(self, m: int) -> List[str]:
        """Superscripted exactly where (kind, indices) repeats in degree m."""
        labels = self.labels(m)
        counts: Dict[tuple, int] = {}
        for l in labels:
            counts[(l.kind, l.indices)] = counts.get((l.kind, l.indices), 0) + 1
        return [l.render(counts[(l.kind, l.indices)] > 1) for l in labels]

    def find(self, m: int, kind: str, indices: tuple,
             p: Optional[int] = None) -> int:
        hits = [i for i, e in enumerate(self.basis.get(m, []))
                if e.label.matches(kind, indices, p)]
        if len(hits) != 1:
            raise KeyError(f"label ({kind}, {indices}, p={p}) matches "
                           f"{len(hits)} basis elements in degree {m}")
        return hits[0]

    def element(self, m: int, terms: Sequence[Tuple[str, tuple, Optional[int], object]]):
        """Sparse element of degree m from (kind, indices, p, coeff) terms."""
        coeffs: Dict[int, object] = {}
        for kind, indices, p, c in terms:
            coeffs[self.find(m, kind, indices, p)] = self.ring.element(c)
        return (m, coeffs)

    # -- differential -------------------------------------------------------

    def _coords_of(self, m: int, p: int, src_block: int, dst_block: int,
                   g: RepMorphism) -> Dict[int, object]:
        """Coordinates of a block morphism inside the degree-m basis."""
        xt = self.X.term(p)
        yt = self.Y.term(p + m)
        arep = xt.blocks[src_block][1]
        brep = yt.blocks[dst_block][1]
        co = self.pairs.coords(arep, brep, g)
        if co is None:
            raise AssertionError("morphism escaped the Hom lattice")
        out = {}
        for k, c in enumerate(co):
            if c != 0:
                out[self._index[m][(p, src_block, dst_block, k)]] = c
        return out

    def _build_complex(self) -> ChainComplex:
        ranks = self.ranks()
        diffs = {}
        for m, basis in self.basis.items():
            tgt = self.basis.get(m + 1)
            if not tgt:
                continue
            mat = ExactMatrix.zeros(len(tgt), len(basis), self.ring)
            sign = -1 if m % 2 else 1
            for j, e in enumerate(basis):
                col: Dict[int, object] = {}
                # d_Y . f : target blocks reachable from e.dst_block
                for (ai, bi), blk in self._dblocks_Y.get(e.p + m, {}).items():
                    if ai != e.dst_block:
                        continue
                    comp = blk.compose(e.morphism)
                    if not comp.is_zero():
                        for idx, c in self._coords_of(
                                m + 1, e.p, e.src_block, bi, comp).items():
                            col[idx] = col.get(idx, 0) + c
                # -(-1)^m f . d_X : source blocks mapping into e.src_block
                for (ai, bi), blk in self._dblocks_X.get(e.p - 1, {}).items():
                    if bi != e.src_block:
                        continue
                    comp = e.morphism.compose(blk)
                    if not comp.is_zero():
                        for idx, c in self._coords_of(
                                m + 1, e.p - 1, ai, e.dst_block,
                                comp).items():
                            col[idx] = col.get(idx, 0) - sign * c
                for i, c in col.items():
                    if c != 0:
                        mat.data[i, j] = self.ring.element(c)
            diffs[m] = mat
        labels = {m: self.rendered_labels(m) for m in self.basis}
        return ChainComplex(self.ring, ranks, diffs, labels)

    def differential_table(self, m: int) -> List[Tuple[str, Dict[str, object]]]:
        """Rows (label, {target label: coefficient}) of d on degree m."""
        names = self.rendered_labels(m)
        tgt_names = self.rendered_labels(m + 1)
        d = self.complex.d(m)
        rows = []
        for j, name in enumerate(names):
            img = {}
            for i in range(d.rows):
                if d[i, j] != 0:
                    img[tgt_names[i]] = d[i, j]
            rows.append((name, img))
        return rows


def hom_complex(X: ComplexOfReps, Y: ComplexOfReps) -> HomComplex:
    return HomComplex(X, Y)


# ---------------------------------------------------------------------------
# endomorphism dg algebras
# ---------------------------------------------------------------------------


class EndAlgebra(DgAlgebra):
    """End(X) with the labeled Hom basis kept alongside the dg structure."""

    def __init__(self, hom: HomComplex):
        self.hom = hom
        cc = hom.complex
        ring = hom.ring
        unit: Dict[int, object] = {}
        for p in hom.X.degrees():
            xt = hom.X.term(p)
            for ai, (aname, arep) in enumerate(xt.blocks):
                ident = RepMorphism(arep, arep, {
                    v: ExactMatrix.identity(arep.rank(v), ring)
                    for v in arep.support()})
                for idx, c in hom._coords_of(0, p, ai, ai, ident).items():
                    unit[idx] = unit.get(idx, 0) + c
        by_src: Dict[Tuple[int, int, int],
                     List[Tuple[int, HomBasisElement]]] = {}
        for m, basis in hom.basis.items():
            for i, e in enumerate(basis):
                by_src.setdefault((m, e.p, e.src_block), []).append((i, e))
        mult: Dict[Tuple[int, int], Dict[Tuple[int, int], dict]] = {}
        for m2, basis2 in hom.basis.items():
            for j, g in enumerate(basis2):
                # candidates f with f.p == g.p + m2 and matching block
                for m1 in hom.basis:
                    if (m1 + m2) not in hom.basis:
                        continue
                    cands = by_src.get((m1, g.p + m2, g.dst_block))
                    if not cands:
                        continue
                    for i, f in cands:
                        comp = f.morphism.compose(g.morphism)
                        if comp.is_zero():
                            continue
                        entry = hom._coords_of(
                            m1 + m2, g.p, g.src_block, f.dst_block, comp)
                        if entry:
                            mult.setdefault((m1, m2), {})[(i, j)] = entry
        labels = {m: hom.rendered_labels(m) for m in hom.basis}
        super().__init__(ring, dict(cc.ranks), labels, unit,
                         dict(cc.differentials), mult)

    def basis_index(self, m: int, kind: str, indices: tuple,
                    p: Optional[int] = None) -> int:
        return self.hom.find(m, kind, indices, p)

    def element(self, m, terms):
        return self.hom.element(m, terms)


def end_dg_algebra(X: ComplexOfReps) -> EndAlgebra:
    """End(X): underlying complex Hom(X, X), product = composition."""
    problems = validate_complex_of_reps(X)
    if problems:
        raise ValueError("invalid complex: " + "; ".join(problems))
    return EndAlgebra(hom_complex(X, X))
