"""Stratification posets, their quivers, and representations with free stalks.

The quiver of a poset keeps only the Hasse covering arrows; identifying all
parallel paths makes a representation the same thing as a functor from the
poset to free modules, so validation reduces to comparing composite matrices
along parallel arrow paths.  Hom spaces are kernels of the commuting-square
linear system, Ext groups come from evaluation-cover projective resolutions.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from .chain_complex import ChainComplex, cohomology
from .exact_linalg import (
    CoeffRing,
    ExactMatrix,
    PresolvedSolver,
    ZZ,
    kernel_basis,
    invariant_factors,
)


class StratPoset:
    """Finite poset of strata with a declared closure order.

    The acyclicity of the stratification is a user assertion, recorded but
    never verified (that would need topology, not combinatorics).
    """

    def __init__(self, strata: Sequence[Tuple[str, int]],
                 covers: Sequence[Tuple[str, str]],
                 acyclicity_asserted: bool = False):
        names = [s for s, _ in strata]
        if len(set(names)) != len(names):
            raise ValueError("duplicate stratum names")
        self.strata = list(names)
        self.dim = dict(strata)
        self.acyclicity_asserted = acyclicity_asserted
        idx = {s: i for i, s in enumerate(names)}
        for a, b in covers:
            if a not in idx or b not in idx:
                raise ValueError(f"cover ({a}, {b}) uses unknown stratum")
        n = len(names)
        # reflexive-transitive closure of the declared covers
        leq = [[False] * n for _ in range(n)]
        for i in range(n):
            leq[i][i] = True
        for a, b in covers:
            leq[idx[a]][idx[b]] = True
        changed = True
        while changed:
            changed = False
            for i in range(n):
                for j in range(n):
                    if leq[i][j] and i != j:
                        for k in range(n):
                            if leq[j][k] and not leq[i][k]:
                                leq[i][k] = True
                                changed = True
        for i in range(n):
            for j in range(n):
                if i != j and leq[i][j] and leq[j][i]:
                    raise ValueError(
                        f"closure order is not antisymmetric: "
                        f"{names[i]} and {names[j]} are comparable both ways")
        self._idx = idx
        self._leq = leq

    def leq(self, a: str, b: str) -> bool:
        return self._leq[self._idx[a]][self._idx[b]]

    def hasse_covers(self) -> List[Tuple[str, str]]:
        """Covering pairs (a, b): a < b with nothing strictly between."""
        out = []
        for a in self.strata:
            for b in self.strata:
                if a == b or not self.leq(a, b):
                    continue
                if any(c not in (a, b) and self.leq(a, c) and self.leq(c, b)
                       for c in self.strata):
                    continue
                out.append((a, b))
        return out

    def up_set(self, a: str) -> List[str]:
        return [b for b in self.strata if self.leq(a, b)]

    def down_set(self, a: str) -> List[str]:
        return [b for b in self.strata if self.leq(b, a)]


class Quiver:
    """Hasse diagram of a poset, with all parallel paths identified."""

    def __init__(self, poset: StratPoset):
        self.poset = poset
        self.vertices = list(poset.strata)
        self.arrows = poset.hasse_covers()
        self._out: Dict[str, List[str]] = {v: [] for v in self.vertices}
        self._in: Dict[str, List[str]] = {v: [] for v in self.vertices}
        for a, b in self.arrows:
            self._out[a].append(b)
            self._in[b].append(a)

    def arrows_from(self, v: str) -> List[str]:
        return self._out[v]

    def arrows_into(self, v: str) -> List[str]:
        return self._in[v]

    def paths(self, src: str, dst: str) -> List[List[str]]:
        """All directed Hasse paths src -> ... -> dst."""
        if src == dst:
            return [[src]]
        out = []
        for mid in self._out[src]:
            if self.poset.leq(mid, dst):
                for tail in self.paths(mid, dst):
                    out.append([src] + tail)
        return out


def build_quiver(poset: StratPoset) -> Quiver:
    return Quiver(poset)


class Representation:
    """Functor from the poset to free modules: stalk ranks + arrow matrices.

    `blocks`, when present, records a direct-sum decomposition as a list of
    (name, component representation); downstream code uses it to label Hom
    bases.
    """

    def __init__(self, quiver: Quiver, ring: CoeffRing,
                 stalk_rank: Dict[str, int],
                 arrow_map: Dict[Tuple[str, str], ExactMatrix],
                 blocks: Optional[List[Tuple[str, "Representation"]]] = None):
        self.quiver = quiver
        self.ring = ring
        self.stalk_rank = {v: stalk_rank.get(v, 0) for v in quiver.vertices}
        self.arrow_map = dict(arrow_map)
        self.blocks = blocks if blocks is not None else [("", self)]

    def rank(self, v: str) -> int:
        return self.stalk_rank[v]

    def arrow(self, a: str, b: str) -> ExactMatrix:
        m = self.arrow_map.get((a, b))
        if m is None:
            return ExactMatrix.zeros(self.rank(b), self.rank(a), self.ring)
        return m

    def path_matrix(self, path: Sequence[str]) -> ExactMatrix:
        m = ExactMatrix.identity(self.rank(path[0]), self.ring)
        for a, b in zip(path, path[1:]):
            m = self.arrow(a, b) @ m
        return m

    def total_rank(self) -> int:
        return sum(self.stalk_rank.values())

    def support(self) -> List[str]:
        return [v for v in self.quiver.vertices if self.rank(v)]

    def block_offsets(self, v: str) -> List[int]:
        offs = [0]
        for _, rep in self.blocks:
            offs.append(offs[-1] + rep.rank(v))
        return offs

    def is_zero(self) -> bool:
        return self.total_rank() == 0


def validate_representation(V: Representation) -> list:
    """Shape errors plus every parallel-path commutativity failure."""
    problems = []
    q = V.quiver
    for (a, b), m in V.arrow_map.items():
        if (a, b) not in q.arrows and not m.is_zero():
            problems.append(f"map on non-arrow ({a}, {b})")
        elif m.shape != (V.rank(b), V.rank(a)):
            problems.append(f"arrow ({a}, {b}) matrix has shape {m.shape}, "
                            f"expected {(V.rank(b), V.rank(a))}")
    if problems:
        return problems
    for src in q.vertices:
        for dst in q.vertices:
            if src == dst or not q.poset.leq(src, dst):
                continue
            paths = q.paths(src, dst)
            if len(paths) < 2:
                continue
            base = V.path_matrix(paths[0])
            for p in paths[1:]:
                if V.path_matrix(p) != base:
                    problems.append(
                        f"parallel paths {paths[0]} and {p} disagree")
                    break
    return problems


class RepMorphism:
    """Per-vertex matrices commuting with every arrow map."""

    def __init__(self, source: Representation, target: Representation,
                 components: Dict[str, ExactMatrix]):
        self.source = source
        self.target = target
        self.components = {v: m for v, m in components.items()
                           if m.rows and m.cols}

    def component(self, v: str) -> ExactMatrix:
        m = self.components.get(v)
        if m is None:
            return ExactMatrix.zeros(self.target.rank(v), self.source.rank(v),
                                     self.source.ring)
        return m

    def validate(self) -> list:
        problems = []
        for v, m in self.components.items():
            want = (self.target.rank(v), self.source.rank(v))
            if m.shape != want:
                problems.append(f"component at {v} has shape {m.shape}, "
                                f"expected {want}")
        if problems:
            return problems
        for a, b in self.source.quiver.arrows:
            lhs = self.component(b) @ self.source.arrow(a, b)
            rhs = self.target.arrow(a, b) @ self.component(a)
            if not (lhs - rhs).is_zero():
                problems.append(f"square at arrow ({a}, {b}) does not commute")
        return problems

    def compose(self, other: "RepMorphism") -> "RepMorphism":
        comps = {}
        for v, g in other.components.items():
            f = self.components.get(v)
            if f is None:
                continue
            m = f @ g
            if m.rows and m.cols and not m.is_zero():
                comps[v] = m
        return RepMorphism(other.source, self.target, comps)

    def __add__(self, other: "RepMorphism") -> "RepMorphism":
        comps = {}
        for v in set(self.components) | set(other.components):
            comps[v] = self.component(v) + other.component(v)
        return RepMorphism(self.source, self.target, comps)

    def __neg__(self) -> "RepMorphism":
        return RepMorphism(self.source, self.target,
                           {v: -m for v, m in self.components.items()})

    def scale(self, c) -> "RepMorphism":
        return RepMorphism(self.source, self.target,
                           {v: m.scale(c) for v, m in self.components.items()})

    def is_zero(self) -> bool:
        return all(m.is_zero() for m in self.components.values())

    def flatten(self) -> list:
        """Entries in a fixed (vertex, row, col) order, for linear algebra."""
        out = []
        for v in self.source.quiver.vertices:
            r, c = self.target.rank(v), self.source.rank(v)
            if r and c:
                out.extend(self.component(v).entries)
        return out


def _hom_entry_index(V: Representation, W: Representation):
    """Column index map for the flattened Hom unknowns f_v[i, j]."""
    index = {}
    count = 0
    for v in V.quiver.vertices:
        r, c = W.rank(v), V.rank(v)
        for i in range(r):
            for j in range(c):
                index[(v, i, j)] = count
                count += 1
    return index, count


def hom_space(V: Representation, W: Representation) -> List[RepMorphism]:
    """Basis of the morphism lattice Hom(V, W).

    Solves the commuting-square system exactly; over the integers the basis
    spans the full lattice of integral morphisms.  Each basis morphism is
    normalized so its first nonzero stalk entry is positive (and equal to 1
    over the rationals).
    """
    if V.quiver is not W.quiver:
        if V.quiver.vertices != W.quiver.vertices or \
                V.quiver.arrows != W.quiver.arrows:
            raise ValueError("representations live on different quivers")
    ring = V.ring
    if not any(V.rank(v) and W.rank(v) for v in V.quiver.vertices):
        return []
    index, ncols = _hom_entry_index(V, W)
    if ncols == 0:
        return []
    zero = ring.element(0)
    rows = []
    for a, b in V.quiver.arrows:
        va, wa = V.arrow(a, b), W.arrow(a, b)
        # f_b . V_ab = W_ab . f_a, one equation per (i, j)
        for i in range(W.rank(b)):
            for j in range(V.rank(a)):
                row = [zero] * ncols
                nonzero = False
                for k in range(V.rank(b)):
                    x = va[k, j]
                    if x != 0:
                        row[index[(b, i, k)]] += x
                        nonzero = True
                for k in range(W.rank(a)):
                    x = wa[i, k]
                    if x != 0:
                        row[index[(a, k, j)]] -= x
                        nonzero = True
                if nonzero and any(x != 0 for x in row):
                    rows.append(row)
    if rows:
        import numpy as np

        arr = np.empty((len(rows), ncols), dtype=object)
        for i, row in enumerate(rows):
            arr[i, :] = row
        system = ExactMatrix.wrap(ring, arr)
    else:
        system = ExactMatrix.zeros(0, ncols, ring)
    basis = kernel_basis(system)
    out = []
    for jcol in range(basis.cols):
        col = basis.col(jcol)
        lead = next(x for x in col if x != 0)
        if ring.is_field:
            col = [x / lead for x in col]
        elif lead < 0:
            col = [-x for x in col]
        comps = {}
        for v in V.quiver.vertices:
            r, c = W.rank(v), V.rank(v)
            if r and c:
                m = ExactMatrix.zeros(r, c, ring)
                for i in range(r):
                    for j in range(c):
                        m.data[i, j] = col[index[(v, i, j)]]
                comps[v] = m
        out.append(RepMorphism(V, W, comps))
    return out


def zero_rep(quiver: Quiver, ring: CoeffRing) -> Representation:
    return Representation(quiver, ring, {}, {}, blocks=[])


def direct_sum(reps: Sequence[Representation],
               names: Optional[Sequence[str]] = None,
               quiver: Optional[Quiver] = None,
               ring: Optional[CoeffRing] = None) -> Representation:
    """Stalkwise direct sum, retaining the block decomposition."""
    reps = list(reps)
    if not reps:
        if quiver is None or ring is None:
            raise ValueError("empty direct sum needs an explicit quiver/ring")
        return zero_rep(quiver, ring)
    quiver = reps[0].quiver
    ring = reps[0].ring
    if names is None:
        names = [f"s{k}" for k in range(len(reps))]
    stalks = {v: sum(r.rank(v) for r in reps) for v in quiver.vertices}
    arrows = {}
    for a, b in quiver.arrows:
        rb, ra = stalks[b], stalks[a]
        if not rb or not ra:
            continue
        m = ExactMatrix.zeros(rb, ra, ring)
        ro = co = 0
        for rep in reps:
            blk = rep.arrow(a, b)
            for i in range(blk.rows):
                for j in range(blk.cols):
                    m.data[ro + i, co + j] = blk[i, j]
            ro += rep.rank(b)
            co += rep.rank(a)
        arrows[(a, b)] = m
    blocks = list(zip(names, reps))
    return Representation(quiver, ring, stalks, arrows, blocks=blocks)


def indecomposable_projective(quiver: Quiver, x: str,
                              ring: CoeffRing = ZZ) -> Representation:
    """P_x: stalk R at every vertex reachable from x, identity arrows."""
    if x not in quiver.poset._idx:
        raise ValueError(f"unknown vertex {x!r}")
    support = set(quiver.poset.up_set(x))
    stalks = {v: 1 for v in support}
    arrows = {}
    one = ExactMatrix.identity(1, ring)
    for a, b in quiver.arrows:
        if a in support and b in support:
            arrows[(a, b)] = one
    return Representation(quiver, ring, stalks, arrows)


def closure_rep(quiver: Quiver, s: str, ring: CoeffRing = ZZ) -> Representation:
    """I_s: rank 1 on the down-set of s (its closure), identity arrows."""
    if s not in quiver.poset._idx:
        raise ValueError(f"unknown vertex {s!r}")
    support = set(quiver.poset.down_set(s))
    one = ExactMatrix.identity(1, ring)
    arrows = {(a, b): one for a, b in quiver.arrows
              if a in support and b in support}
    return Representation(quiver, ring, {v: 1 for v in support}, arrows)


@dataclass
class ProjectiveResolution:
    """... -> Q_1 -> Q_0 --aug--> V with each Q_i a sum of projectives."""

    target: Representation
    terms: List[Representation]          # Q_0, Q_1, ...
    maps: List[RepMorphism]              # maps[i]: Q_[i+1] -> Q_i
    augmentation: RepMorphism            # Q_0 -> V

    def length(self) -> int:
        return len(self.terms) - 1


def _evaluation_cover(V: Representation):
    """Surjection from a sum of projectives onto V, plus section data."""
    quiver, ring = V.quiver, V.ring
    pieces = []
    piece_info = []  # (vertex x, basis index k)
    for x in quiver.vertices:
        for k in range(V.rank(x)):
            pieces.append(indecomposable_projective(quiver, x, ring))
            piece_info.append((x, k))
    cover = direct_sum(pieces, names=[f"P[{x}:{k}]" for x, k in piece_info],
                       quiver=quiver, ring=ring)
    comps = {}
    for v in quiver.vertices:
        rv = V.rank(v)
        cv = cover.rank(v)
        if not rv or not cv:
            continue
        m = ExactMatrix.zeros(rv, cv, ring)
        col = 0
        for (x, k), piece in zip(piece_info, pieces):
            if piece.rank(v):
                # generator of P_x at v maps to the image of e_k in V(v)
                path = V.quiver.paths(x, v)
                vec = V.path_matrix(path[0]) if path else \
                    ExactMatrix.identity(rv, ring)
                for i in range(rv):
                    m.data[i, col] = vec[i, k]
                col += 1
        comps[v] = m
    return cover, RepMorphism(cover, V, comps)


def _kernel_rep(f: RepMorphism) -> Tuple[Representation, RepMorphism]:
    """Kernel of f with induced arrow maps, plus its inclusion."""
    V = f.source
    quiver, ring = V.quiver, V.ring
    bases = {}
    for v in quiver.vertices:
        if V.rank(v):
            bases[v] = kernel_basis(f.component(v))
    stalks = {v: b.cols for v, b in bases.items()}
    solvers = {v: PresolvedSolver(b) for v, b in bases.items() if b.cols}
    arrows = {}
    for a, b in quiver.arrows:
        ka, kb = stalks.get(a, 0), stalks.get(b, 0)
        if not ka or not kb:
            continue
        m = ExactMatrix.zeros(kb, ka, ring)
        va = V.arrow(a, b)
        for j in range(ka):
            img = va.matvec(bases[a].col(j))
            coords = solvers[b].solve(img)
            if coords is None:
                raise AssertionError("kernel not arrow-stable")
            for i in range(kb):
                m.data[i, j] = coords[i]
        arrows[(a, b)] = m
    K = Representation(quiver, ring, stalks, arrows)
    incl = RepMorphism(K, V, {v: bases[v] for v in bases if bases[v].cols})
    return K, incl


def projective_resolution(V: Representation,
                          max_len: Optional[int] = None) -> ProjectiveResolution:
    """Iterated evaluation covers until the kernel vanishes.

    Not minimal, but each kernel vanishes on one more layer of the poset,
    so termination is bounded by the poset height; exceeding max_len is a
    hard error rather than a silent truncation.
    """
    if max_len is None:
        max_len = len(V.quiver.vertices) + 2
    terms: List[Representation] = []
    maps: List[RepMorphism] = []
    cover, aug = _evaluation_cover(V)
    terms.append(cover)
    current = (cover, aug)
    for _ in range(max_len + 1):
        K, incl = _kernel_rep(current[1])
        if K.is_zero():
            return ProjectiveResolution(V, terms, maps, aug)
        cover, onto = _evaluation_cover(K)
        terms.append(cover)
        maps.append(incl.compose(onto))
        current = (cover, onto)
    raise ValueError(f"resolution did not terminate within {max_len} steps")


def resolution_is_exact(res: ProjectiveResolution) -> bool:
    """Stalkwise exactness of ... -> Q_1 -> Q_0 -> V -> 0 over the ring."""
    V = res.target
    for v in V.quiver.vertices:
        mats = [res.augmentation.component(v)]
        mats.extend(m.component(v) for m in res.maps)
        # surjectivity of the augmentation stalk
        aug = mats[0]
        if V.rank(v):
            factors = invariant_factors(aug)
            if len(factors) < V.rank(v) or any(f != 1 for f in factors):
                return False
        for d_out, d_in in zip(mats, mats[1:]):
            if not (d_out @ d_in).is_zero():
                return False
            ker = kernel_basis(d_out)
            solver = PresolvedSolver(d_in)
            for j in range(ker.cols):
                if solver.solve(ker.col(j)) is None:
                    return False
        last = mats[-1]
        if last.cols and kernel_basis(last).cols:
            return False
    return True


@dataclass
class InjectiveCoresolution:
    """V --aug--> T_0 -> T_1 -> ... with each T_i a sum of closure reps."""

    target: Representation
    terms: List[Representation]
    maps: List[RepMorphism]             # maps[i]: T_i -> T_(i+1)
    augmentation: RepMorphism           # V -> T_0


def _coevaluation_embedding(V: Representation):
    """Split embedding of V into a sum of closure representations."""
    quiver, ring = V.quiver, V.ring
    pieces = []
    names = []
    info = []
    for y in quiver.vertices:
        for k in range(V.rank(y)):
            pieces.append(closure_rep(quiver, y, ring))
            names.append(y if V.rank(y) == 1 else f"{y}.{k}")
            info.append((y, k))
    term = direct_sum(pieces, names=names, quiver=quiver, ring=ring)
    comps = {}
    for x in quiver.vertices:
        rows, cols = term.rank(x), V.rank(x)
        if not rows or not cols:
            continue
        m = ExactMatrix.zeros(rows, cols, ring)
        at = 0
        for (y, k), piece in zip(info, pieces):
            if piece.rank(x):
                paths = quiver.paths(x, y)
                row = V.path_matrix(paths[0])  # V(x) -> V(y)
                for j in range(cols):
                    m.data[at, j] = row[k, j]
                at += 1
        comps[x] = m
    return term, RepMorphism(V, term, comps)


def _cokernel_rep(f: RepMorphism):
    """Cokernel of a stalkwise split injection, with its projection."""
    from .exact_linalg import ColumnLattice

    W = f.target
    quiver, ring = W.quiver, W.ring
    lattices = {}
    keep = {}
    for v in quiver.vertices:
        if not W.rank(v):
            continue
        lat = ColumnLattice(ring)
        comp = f.component(v)
        for j in range(comp.cols):
            lat.add({i: comp[i, j] for i in range(comp.rows)
                     if comp[i, j] != 0})
        for pv in lat.pivot_values():
            if not ring.is_field and pv not in (1, -1):
                raise ValueError("cokernel has torsion; the embedding "
                                 "was not stalkwise split")
        lattices[v] = lat
        pivots = set(lat.pivot_rows())
        keep[v] = [i for i in range(W.rank(v)) if i not in pivots]

    def project(v, vec):
        lat = lattices.get(v)
        work = {i: x for i, x in enumerate(vec) if x != 0}
        if lat:
            for pr, cvec, _ in lat.cols:
                c = work.get(pr)
                if not c:
                    continue
                p = cvec[pr]
                q = c / p if ring.is_field else c // p
                for kk, vv in cvec.items():
                    w = work.get(kk, 0) - q * vv
                    if w == 0:
                        work.pop(kk, None)
                    else:
                        work[kk] = w
        pos = {i: k for k, i in enumerate(keep.get(v, []))}
        return {pos[i]: c for i, c in work.items()}

    stalks = {v: len(keep.get(v, [])) for v in quiver.vertices}
    arrows = {}
    for a, b in quiver.arrows:
        ra, rb = stalks.get(a, 0), stalks.get(b, 0)
        if not ra or not rb:
            continue
        m = ExactMatrix.zeros(rb, ra, ring)
        wab = W.arrow(a, b)
        for j, i_src in enumerate(keep[a]):
            img = wab.col(i_src)
            for i, c in project(b, img).items():
                m.data[i, j] = c
        arrows[(a, b)] = m
    C = Representation(quiver, ring, stalks, arrows)
    comps = {}
    for v in quiver.vertices:
        if not W.rank(v) or not stalks.get(v, 0):
            continue
        m = ExactMatrix.zeros(stalks[v], W.rank(v), ring)
        for j in range(W.rank(v)):
            col = [ring.element(0)] * W.rank(v)
            col[j] = ring.element(1)
            for i, c in project(v, col).items():
                m.data[i, j] = c
        comps[v] = m
    return C, RepMorphism(W, C, comps)


def injective_coresolution(V: Representation,
                           max_len: Optional[int] = None
                           ) -> InjectiveCoresolution:
    """Iterated coevaluation embeddings until the cokernel vanishes.

    Dual to projective_resolution: cokernels vanish on one more layer of
    the poset, measured from the maximal vertices, per step.
    """
    if max_len is None:
        max_len = len(V.quiver.vertices) + 2
    term, aug = _coevaluation_embedding(V)
    terms = [term]
    maps: List[RepMorphism] = []
    emb = aug
    for _ in range(max_len + 1):
        C, proj = _cokernel_rep(emb)
        if C.is_zero():
            return InjectiveCoresolution(V, terms, maps, aug)
        nxt, emb2 = _coevaluation_embedding(C)
        terms.append(nxt)
        maps.append(emb2.compose(proj))
        emb = emb2
    raise ValueError(f"coresolution did not terminate within {max_len} steps")


def hom_complex_against(res: ProjectiveResolution,
                        W: Representation) -> ChainComplex:
    """Cochain complex Hom(Q_q, W) in degree q, differential f -> f . d."""
    ring = W.ring
    bases = [hom_space(Q, W) for Q in res.terms]
    ranks = {q: len(b) for q, b in enumerate(bases)}
    diffs = {}
    for q, d in enumerate(res.maps):
        src_basis, dst_basis = bases[q], bases[q + 1]
        if not src_basis or not dst_basis:
            continue
        flat = ExactMatrix(ring, _stack_flat(dst_basis, ring))
        solver = PresolvedSolver(flat)
        cols = []
        for f in src_basis:
            g = f.compose(d)
            coords = solver.solve(g.flatten())
            if coords is None:
                raise AssertionError("composite escaped the Hom lattice")
            cols.append(coords)
        m = ExactMatrix.zeros(len(dst_basis), len(src_basis), ring)
        for j, c in enumerate(cols):
            for i, x in enumerate(c):
                m.data[i, j] = x
        diffs[q] = m
    return ChainComplex(ring, ranks, diffs)


def _stack_flat(morphisms: Sequence[RepMorphism], ring) -> "np.ndarray":
    import numpy as np

    flats = [m.flatten() for m in morphisms]
    n = len(flats[0])
    a = np.empty((n, len(flats)), dtype=object)
    for j, f in enumerate(flats):
        a[:, j] = f
    return a


def ext(V: Representation, W: Representation, q: int,
        resolution: Optional[ProjectiveResolution] = None) -> Tuple[int, list]:
    """(betti, torsion) of Ext^q(V, W) via a projective resolution of V."""
    if q < 0:
        raise ValueError("ext degree must be nonnegative")
    res = resolution if resolution is not None else projective_resolution(V)
    if q > res.length():
        return (0, [])
    cc = hom_complex_against(res, W)
    h = cohomology(cc)
    return (h.betti(q), h.torsion(q))
