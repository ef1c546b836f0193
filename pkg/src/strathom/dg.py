"""Finitely generated dg algebras with explicit structure constants.

An algebra stores a graded labeled basis, a unit, a degree +1 differential
per degree, and sparse structure constants per degree pair.  Elements are
(degree, {basis index: coefficient}) pairs.  Sub-algebras, two-sided ideals
and quotients all work with exact lattice membership over the PID, not with
rational span membership, so every verified identity holds integrally.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from .chain_complex import (
    ChainComplex,
    ChainMap,
    CohomologyProfile,
    cohomology,
    is_quasi_iso,
    QuasiIsoReport,
)
from .exact_linalg import (
    CoeffRing,
    ColumnLattice,
    ExactMatrix,
    inverse,
)

Element = Tuple[int, Dict[int, object]]  # (degree, sparse coefficients)


def _vadd(dst: dict, src: dict, c=1):
    for k, v in src.items():
        w = dst.get(k, 0) + c * v
        if w == 0:
            dst.pop(k, None)
        else:
            dst[k] = w


def _sparse_from_list(xs) -> dict:
    return {i: x for i, x in enumerate(xs) if x != 0}


def _dense(coeffs: dict, n: int, ring: CoeffRing) -> list:
    out = [ring.element(0)] * n
    for i, c in coeffs.items():
        out[i] = ring.element(c)
    return out


class DgAlgebra:
    """Graded algebra with labeled basis, structure constants and d."""

    def __init__(self, ring: CoeffRing, dims: Dict[int, int],
                 labels: Dict[int, list], unit: Dict[int, object],
                 diff: Dict[int, ExactMatrix],
                 mult: Dict[Tuple[int, int], Dict[Tuple[int, int], dict]]):
        self.ring = ring
        self.dims = {q: n for q, n in dims.items() if n}
        self.labels = labels
        self.unit = dict(unit)
        self.diff = {q: d for q, d in diff.items() if d.rows and d.cols}
        self.mult = mult
        self._complex: Optional[ChainComplex] = None

    # -- structure access -------------------------------------------------

    def dim(self, q: int) -> int:
        return self.dims.get(q, 0)

    def degrees(self) -> List[int]:
        return sorted(self.dims)

    def total_dim(self) -> int:
        return sum(self.dims.values())

    def label(self, q: int, i: int):
        ls = self.labels.get(q)
        return ls[i] if ls and i < len(ls) else f"a{q}[{i}]"

    def complex(self) -> ChainComplex:
        if self._complex is None:
            self._complex = ChainComplex(self.ring, dict(self.dims),
                                         dict(self.diff), dict(self.labels))
        return self._complex

    def has_zero_differential(self) -> bool:
        return all(d.is_zero() for d in self.diff.values())

    # -- element operations ------------------------------------------------

    def basis_element(self, q: int, i: int) -> Element:
        return (q, {i: self.ring.element(1)})

    def unit_element(self) -> Element:
        return (0, dict(self.unit))

    def mult_entry(self, q1: int, q2: int, i: int, j: int) -> dict:
        table = self.mult.get((q1, q2))
        if not table:
            return {}
        return table.get((i, j), {})

    def multiply(self, x: Element, y: Element) -> Element:
        q1, c1 = x
        q2, c2 = y
        out: dict = {}
        table = self.mult.get((q1, q2))
        if table:
            if len(c1) * len(c2) > len(table):
                # dense operands: walking the sparse table is cheaper
                for (i, j), prod in table.items():
                    a = c1.get(i)
                    if not a:
                        continue
                    b = c2.get(j)
                    if b:
                        _vadd(out, prod, a * b)
            else:
                for i, a in c1.items():
                    for j, b in c2.items():
                        prod = table.get((i, j))
                        if prod:
                            _vadd(out, prod, a * b)
        return (q1 + q2, out)

    def d_element(self, x: Element) -> Element:
        q, c = x
        d = self.diff.get(q)
        out: dict = {}
        if d is not None and c:
            vec = d.matvec(_dense(c, self.dim(q), self.ring))
            out = _sparse_from_list(vec)
        return (q + 1, out)

    def element_equal(self, x: Element, y: Element) -> bool:
        return x[0] == y[0] and x[1] == y[1]


def algebra_from_products(ring: CoeffRing, basis: Sequence[Tuple[int, str]],
                          unit_terms: Dict[str, object],
                          differentials: Dict[str, Dict[str, object]],
                          products: Dict[Tuple[str, str], Dict[str, object]]
                          ) -> DgAlgebra:
    """Assemble a DgAlgebra from named basis data.

    basis: (degree, label) pairs; unit/differential/product data refer to
    labels.  Anything unspecified is zero.
    """
    dims: Dict[int, int] = {}
    where: Dict[str, Tuple[int, int]] = {}
    labels: Dict[int, list] = {}
    for deg, lab in basis:
        i = dims.get(deg, 0)
        dims[deg] = i + 1
        labels.setdefault(deg, []).append(lab)
        if lab in where:
            raise ValueError(f"duplicate basis label {lab!r}")
        where[lab] = (deg, i)
    unit = {where[lab][1]: ring.element(c) for lab, c in unit_terms.items()}
    diff = {}
    dcols: Dict[int, Dict[int, dict]] = {}
    for lab, image in differentials.items():
        q, j = where[lab]
        col = dcols.setdefault(q, {})
        col[j] = {}
        for tl, c in image.items():
            tq, ti = where[tl]
            if tq != q + 1:
                raise ValueError(f"d({lab}) term {tl} has degree {tq}, "
                                 f"expected {q + 1}")
            col[j][ti] = ring.element(c)
    for q, cols in dcols.items():
        m = ExactMatrix.zeros(dims.get(q + 1, 0), dims[q], ring)
        for j, col in cols.items():
            for i, c in col.items():
                m.data[i, j] = c
        diff[q] = m
    mult: Dict[Tuple[int, int], Dict[Tuple[int, int], dict]] = {}
    for (la, lb), image in products.items():
        (qa, ia), (qb, ib) = where[la], where[lb]
        entry = {}
        for tl, c in image.items():
            tq, ti = where[tl]
            if tq != qa + qb:
                raise ValueError(f"{la}*{lb} term {tl} has degree {tq}, "
                                 f"expected {qa + qb}")
            entry[ti] = ring.element(c)
        if entry:
            mult.setdefault((qa, qb), {})[(ia, ib)] = entry
    return DgAlgebra(ring, dims, labels, unit, diff, mult)


def validate_dg_algebra(A: DgAlgebra) -> list:
    """d^2, Leibniz, associativity, unit laws and degree bookkeeping.

    Associativity is checked on every triple that can be nonzero: both
    orders of bracketing vanish outright unless one of the two inner
    products is nonzero, so iterating over nonzero pairs times the basis
    is exhaustive.
    """
    problems = []
    ring = A.ring
    for q, d in A.diff.items():
        if d.shape != (A.dim(q + 1), A.dim(q)):
            problems.append(f"differential at degree {q} has shape {d.shape}, "
                            f"expected {(A.dim(q + 1), A.dim(q))}")
    if problems:
        return problems
    for q in A.degrees():
        d0, d1 = A.diff.get(q), A.diff.get(q + 1)
        if d0 is not None and d1 is not None and not (d1 @ d0).is_zero():
            problems.append(f"d.d != 0 at degree {q}")
    for (q1, q2), table in A.mult.items():
        for (i, j), prod in table.items():
            if i >= A.dim(q1) or j >= A.dim(q2):
                problems.append(f"structure constant at bad index "
                                f"({q1},{q2},{i},{j})")
            elif any(k >= A.dim(q1 + q2) for k in prod):
                problems.append(f"product of ({q1},{i}) and ({q2},{j}) "
                                f"lands outside degree {q1 + q2}")
    if problems:
        return problems
    # unit: a cycle and a two-sided identity
    du = A.d_element(A.unit_element())
    if du[1]:
        problems.append("unit is not a cycle")
    one = A.unit_element()
    for q in A.degrees():
        for i in range(A.dim(q)):
            b = A.basis_element(q, i)
            if not A.element_equal(A.multiply(one, b), b):
                problems.append(f"1*b != b for {A.label(q, i)}")
            if not A.element_equal(A.multiply(b, one), b):
                problems.append(f"b*1 != b for {A.label(q, i)}")
    # Leibniz on all basis pairs
    for q1 in A.degrees():
        sign = -1 if q1 % 2 else 1
        for q2 in A.degrees():
            for i in range(A.dim(q1)):
                a = A.basis_element(q1, i)
                da = A.d_element(a)
                for j in range(A.dim(q2)):
                    b = A.basis_element(q2, j)
                    lhs = A.d_element(A.multiply(a, b))
                    rhs = A.multiply(da, b)
                    rhs2 = A.multiply(a, A.d_element(b))
                    acc = dict(rhs[1])
                    _vadd(acc, rhs2[1], sign)
                    if lhs[1] != acc:
                        problems.append(
                            f"Leibniz fails on ({A.label(q1, i)}, "
                            f"{A.label(q2, j)})")
    # associativity over potentially nonzero triples
    nonzero_pairs = []
    for (q1, q2), table in A.mult.items():
        for (i, j), prod in table.items():
            if prod:
                nonzero_pairs.append((q1, i, q2, j))
    seen = set()
    for (q1, i, q2, j) in nonzero_pairs:
        ab = A.multiply(A.basis_element(q1, i), A.basis_element(q2, j))
        for q3 in A.degrees():
            for k in range(A.dim(q3)):
                key = (q1, i, q2, j, q3, k)
                if key in seen:
                    continue
                seen.add(key)
                lhs = A.multiply(ab, A.basis_element(q3, k))
                rhs = A.multiply(
                    A.basis_element(q1, i),
                    A.multiply(A.basis_element(q2, j), A.basis_element(q3, k)))
                if not A.element_equal(lhs, rhs):
                    problems.append(
                        f"associativity fails on ({A.label(q1, i)}, "
                        f"{A.label(q2, j)}, {A.label(q3, k)})")
    for (q2, j, q3, k) in nonzero_pairs:
        bc = A.multiply(A.basis_element(q2, j), A.basis_element(q3, k))
        for q1 in A.degrees():
            for i in range(A.dim(q1)):
                key = (q1, i, q2, j, q3, k)
                if key in seen:
                    continue
                seen.add(key)
                lhs = A.multiply(
                    A.multiply(A.basis_element(q1, i),
                               A.basis_element(q2, j)),
                    A.basis_element(q3, k))
                rhs = A.multiply(A.basis_element(q1, i), bc)
                if not A.element_equal(lhs, rhs):
                    problems.append(
                        f"associativity fails on ({A.label(q1, i)}, "
                        f"{A.label(q2, j)}, {A.label(q3, k)})")
    return problems


class DgMorphism:
    """Degree-wise linear map of dg algebras."""

    def __init__(self, source: DgAlgebra, target: DgAlgebra,
                 components: Dict[int, ExactMatrix], name: str = ""):
        self.source = source
        self.target = target
        self.components = {q: m for q, m in components.items()
                           if m.rows and m.cols}
        self.name = name
        self._cols: Dict[int, list] = {}

    def component(self, q: int) -> ExactMatrix:
        m = self.components.get(q)
        if m is None:
            return ExactMatrix.zeros(self.target.dim(q), self.source.dim(q),
                                     self.source.ring)
        return m

    def _column(self, q: int, j: int) -> dict:
        cols = self._cols.get(q)
        if cols is None:
            m = self.components.get(q)
            n = self.source.dim(q)
            if m is None:
                cols = [{}] * n
            else:
                cols = [{i: m[i, j] for i in range(m.rows) if m[i, j] != 0}
                        for j in range(n)]
            self._cols[q] = cols
        return cols[j]

    def apply(self, x: Element) -> Element:
        q, c = x
        out: dict = {}
        for j, a in c.items():
            _vadd(out, self._column(q, j), a)
        return (q, out)

    def chain_map(self) -> ChainMap:
        return ChainMap(self.source.complex(), self.target.complex(),
                        dict(self.components))

    def validate(self) -> list:
        problems = []
        for q, m in self.components.items():
            want = (self.target.dim(q), self.source.dim(q))
            if m.shape != want:
                problems.append(f"component at degree {q} has shape "
                                f"{m.shape}, expected {want}")
        if problems:
            return problems
        problems.extend(self.chain_map().validate())
        A, B = self.source, self.target
        fu = self.apply(A.unit_element())
        if fu[1] != B.unit_element()[1]:
            problems.append("unit is not preserved")
        images = {q: [self.apply((q, {i: A.ring.element(1)}))[1]
                      for i in range(A.dim(q))] for q in A.degrees()}
        for q1 in A.degrees():
            for q2 in A.degrees():
                table = A.mult.get((q1, q2), {})
                q3 = q1 + q2
                for i in range(A.dim(q1)):
                    fa = (q1, images[q1][i])
                    for j in range(A.dim(q2)):
                        ab = table.get((i, j))
                        lhs = self.apply((q3, ab))[1] if ab else {}
                        rhs = B.multiply(fa, (q2, images[q2][j]))[1]
                        if lhs != rhs:
                            problems.append(
                                f"not multiplicative on ({A.label(q1, i)}, "
                                f"{A.label(q2, j)})")
        return problems

    def compose(self, other: "DgMorphism") -> "DgMorphism":
        comps = {}
        for q in set(self.source.degrees()) | set(other.source.degrees()):
            m = self.component(q) @ other.component(q)
            if m.rows and m.cols:
                comps[q] = m
        return DgMorphism(other.source, self.target, comps)


def is_quasi_iso_dg(f: DgMorphism) -> QuasiIsoReport:
    """Cone acyclicity of the underlying chain map."""
    return is_quasi_iso(f.chain_map())


def identity_dg_morphism(A: DgAlgebra) -> DgMorphism:
    comps = {q: ExactMatrix.identity(A.dim(q), A.ring) for q in A.degrees()}
    return DgMorphism(A, A, comps, name="id")


# ---------------------------------------------------------------------------
# cohomology algebra
# ---------------------------------------------------------------------------


def cohomology_algebra(A: DgAlgebra, verify_section: bool = True,
                       seed: int = 7):
    """(H with zero differential, per-degree section of H-basis to cocycles).

    The product on H multiplies section representatives and reduces back to
    cohomology coordinates.  Requires torsion-free cohomology; with a second
    randomly perturbed section the structure constants are recomputed and
    compared, re-verifying well-definedness.
    """
    profile = cohomology(A.complex())
    for q, mod in profile.modules.items():
        if mod.torsion:
            raise ValueError(
                "torsion cohomology: multiplicative reduction unsupported "
                f"(degree {q}, torsion {mod.torsion})")
    section = {q: mod.lift for q, mod in profile.modules.items() if mod.betti}
    dims = {q: mod.betti for q, mod in profile.modules.items() if mod.betti}

    def structure_constants(sect):
        mult: Dict[Tuple[int, int], Dict[Tuple[int, int], dict]] = {}
        for q1, l1 in sect.items():
            cols1 = [_sparse_from_list(l1.col(i)) for i in range(l1.cols)]
            for q2, l2 in sect.items():
                target = profile.modules.get(q1 + q2)
                cols2 = [_sparse_from_list(l2.col(j)) for j in range(l2.cols)]
                table = {}
                for i, ci in enumerate(cols1):
                    xi = (q1, ci)
                    for j, cj in enumerate(cols2):
                        prod = A.multiply(xi, (q2, cj))
                        if not prod[1]:
                            continue
                        if target is None:
                            raise AssertionError(
                                "product of cocycles in empty degree")
                        # products of cocycles are cocycles, so the free
                        # part projects exactly
                        entry = target.project_sparse(prod[1])
                        if entry:
                            table[(i, j)] = entry
                if table:
                    mult[(q1, q2)] = table
        return mult

    mult = structure_constants(section)
    if verify_section:
        import random

        rng = random.Random(seed)
        perturbed = {}
        for q, l in section.items():
            im = A.diff.get(q - 1)
            if im is None or not im.cols:
                perturbed[q] = l
                continue
            cols = []
            for i in range(l.cols):
                noise = [rng.randint(-2, 2) for _ in range(im.cols)]
                if A.ring.is_field:
                    noise = [A.ring.element(x) for x in noise]
                bump = im.matvec(noise)
                cols.append([a + b for a, b in zip(l.col(i), bump)])
            pm = ExactMatrix.zeros(l.rows, l.cols, A.ring)
            for j, c in enumerate(cols):
                for i, x in enumerate(c):
                    pm.data[i, j] = x
            perturbed[q] = pm
        if structure_constants(perturbed) != mult:
            raise AssertionError(
                "cohomology product depends on the section choice")

    unit_dense = _dense(A.unit_element()[1], A.dim(0), A.ring)
    free, _ = profile.modules[0].coordinates(unit_dense)
    unit = _sparse_from_list(free)
    labels = {q: [f"[{q}:{i}]" for i in range(n)] for q, n in dims.items()}
    H = DgAlgebra(A.ring, dims, labels, unit, {}, mult)
    return H, section


# ---------------------------------------------------------------------------
# sub-algebras, ideals, quotients
# ---------------------------------------------------------------------------


def subalgebra_from_span(A: DgAlgebra, elements: Sequence[Element],
                         labels: Optional[Sequence] = None,
                         name: str = ""):
    """Sub-dg-algebra on the given homogeneous spanning set.

    The span is reduced to a basis (redundant spanning elements are
    dropped); the lattice must contain the unit and be closed under the
    differential and under multiplication, with exact membership over the
    ring.  Returns the algebra in the kept basis plus the inclusion.
    `labels`, when given, is aligned with `elements`.
    """
    lattices: Dict[int, ColumnLattice] = {}
    per_degree: Dict[int, List[int]] = {}
    for pos, (q, coeffs) in enumerate(elements):
        if not coeffs:
            continue
        lat = lattices.setdefault(q, ColumnLattice(A.ring))
        if lat.add(dict(coeffs), coord_key=pos):
            per_degree.setdefault(q, []).append(pos)
    for q, positions in per_degree.items():
        if len(positions) != lattices[q].rank:
            raise ValueError(
                f"spanning set at degree {q} is not a lattice basis after "
                "reduction; provide an independent set")
    index_of = {}
    dims = {}
    for q, positions in per_degree.items():
        dims[q] = len(positions)
        for k, pos in enumerate(positions):
            index_of[pos] = (q, k)

    def coords_in_span(q: int, coeffs: dict, what: str) -> dict:
        if not coeffs:
            return {}
        lat = lattices.get(q)
        co = lat.coordinates(coeffs) if lat else None
        if co is None:
            raise ValueError(f"span not closed under {what}")
        return {index_of[pos][1]: c for pos, c in co.items()}

    unit = coords_in_span(0, A.unit_element()[1],
                          "unit membership (sub-algebra must contain 1)")
    diff = {}
    for q, positions in sorted(per_degree.items()):
        if (q + 1) not in per_degree:
            for pos in positions:
                img = A.d_element(elements[pos])
                if img[1]:
                    raise ValueError(
                        f"span not closed under differential at degree {q}")
            continue
        m = ExactMatrix.zeros(dims[q + 1], dims[q], A.ring)
        for j, pos in enumerate(positions):
            img = A.d_element(elements[pos])
            try:
                co = coords_in_span(q + 1, img[1], "differential")
            except ValueError:
                raise ValueError(
                    f"span not closed under differential at degree {q}, "
                    f"element #{pos}")
            for i, c in co.items():
                m.data[i, j] = c
        diff[q] = m
    mult: Dict[Tuple[int, int], Dict[Tuple[int, int], dict]] = {}
    for q1, pos1 in per_degree.items():
        for q2, pos2 in per_degree.items():
            table = {}
            for i, p1 in enumerate(pos1):
                for j, p2 in enumerate(pos2):
                    prod = A.multiply(elements[p1], elements[p2])
                    if not prod[1]:
                        continue
                    try:
                        co = coords_in_span(q1 + q2, prod[1], "multiplication")
                    except ValueError:
                        raise ValueError(
                            "span not closed under multiplication: product "
                            f"of elements #{p1} and #{p2} escapes")
                    if co:
                        table[(i, j)] = co
            if table:
                mult[(q1, q2)] = table
    if labels is None:
        label_map = {q: [f"u{q}[{k}]" for k in range(n)]
                     for q, n in dims.items()}
    else:
        label_map = {q: [labels[pos] for pos in positions]
                     for q, positions in per_degree.items()}
    sub = DgAlgebra(A.ring, dims, label_map, unit, diff, mult)
    comps = {}
    for q, positions in per_degree.items():
        m = ExactMatrix.zeros(A.dim(q), len(positions), A.ring)
        for j, pos in enumerate(positions):
            for i, c in elements[pos][1].items():
                m.data[i, j] = c
        comps[q] = m
    incl = DgMorphism(sub, A, comps, name=name or "inclusion")
    return sub, incl


@dataclass
class DgIdeal:
    """Two-sided dg ideal of a DgAlgebra, presented by per-degree lattices."""

    algebra: DgAlgebra
    lattices: Dict[int, ColumnLattice]
    input_spanned_ideal: bool

    def rank(self, q: int) -> int:
        lat = self.lattices.get(q)
        return lat.rank if lat else 0

    def ranks(self) -> Dict[int, int]:
        return {q: lat.rank for q, lat in sorted(self.lattices.items())
                if lat.rank}

    def basis_matrix(self, q: int) -> ExactMatrix:
        lat = self.lattices.get(q)
        U = self.algebra
        if lat is None or not lat.rank:
            return ExactMatrix.zeros(U.dim(q), 0, U.ring)
        m = ExactMatrix.zeros(U.dim(q), lat.rank, U.ring)
        for j, vec in enumerate(lat.basis_vectors()):
            for i, c in vec.items():
                m.data[i, j] = c
        return m

    def restricted_complex(self) -> ChainComplex:
        """The ideal as a subcomplex, in its echelon bases."""
        U = self.algebra
        ranks = {q: lat.rank for q, lat in self.lattices.items()}
        diffs = {}
        for q, lat in self.lattices.items():
            if not lat.rank:
                continue
            tgt = self.lattices.get(q + 1)
            cols = []
            for vec in lat.basis_vectors():
                img = U.d_element((q, vec))
                if not img[1]:
                    cols.append({})
                    continue
                co = tgt.echelon_coordinates(img[1]) if tgt else None
                if co is None:
                    raise AssertionError("ideal differential escaped")
                cols.append(co)
            m = ExactMatrix.zeros(tgt.rank if tgt else 0, lat.rank, U.ring)
            for j, co in enumerate(cols):
                for i, c in co.items():
                    m.data[i, j] = c
            if m.rows and m.cols:
                diffs[q] = m
        return ChainComplex(U.ring, ranks, diffs)

    def contains(self, x: Element) -> bool:
        q, coeffs = x
        if not coeffs:
            return True
        lat = self.lattices.get(q)
        return bool(lat) and lat.contains(coeffs)


def ideal_from_span(U: DgAlgebra, elements: Sequence[Element]) -> DgIdeal:
    """Two-sided dg ideal generated by the given homogeneous elements.

    Closes the span under two-sided multiplication by the basis of U and
    reports whether the input already spanned the ideal; closure under the
    differential is verified afterwards and failure is an error.
    """
    lattices: Dict[int, ColumnLattice] = {}
    initial: Dict[int, ColumnLattice] = {}
    for q, coeffs in elements:
        if coeffs:
            lattices.setdefault(q, ColumnLattice(U.ring)).add(dict(coeffs))
            initial.setdefault(q, ColumnLattice(U.ring)).add(dict(coeffs))
    grew_any = False
    changed = True
    while changed:
        changed = False
        for q in list(lattices):
            lat = lattices[q]
            for vec in list(lat.basis_vectors()):
                x = (q, vec)
                for qb in U.degrees():
                    for i in range(U.dim(qb)):
                        b = U.basis_element(qb, i)
                        for prod in (U.multiply(b, x), U.multiply(x, b)):
                            pq, pc = prod
                            if not pc:
                                continue
                            plat = lattices.setdefault(
                                pq, ColumnLattice(U.ring))
                            if plat.add(dict(pc)):
                                changed = True
                                grew_any = True
    lattices = {q: lat for q, lat in lattices.items() if lat.rank}
    ideal = DgIdeal(U, lattices, input_spanned_ideal=not grew_any)
    for q, lat in lattices.items():
        tgt = lattices.get(q + 1)
        for vec in lat.basis_vectors():
            img = U.d_element((q, vec))
            if img[1] and (tgt is None or not tgt.contains(img[1])):
                raise ValueError("not closed under differential")
    return ideal


def quotient(U: DgAlgebra, I: DgIdeal):
    """(U/I, projection).

    Needs a free complement in every degree (over ZZ: all ideal pivot
    values must be units, which is exactly quotient torsion-freeness);
    the quotient basis is the set of ambient basis directions away from the
    ideal pivots, so quotient labels are inherited.
    """
    if I.algebra is not U:
        raise ValueError("ideal does not belong to this algebra")
    ring = U.ring
    pivots: Dict[int, dict] = {}
    for q, lat in I.lattices.items():
        for pr, pv in zip(lat.pivot_rows(), lat.pivot_values()):
            if not ring.is_field and pv not in (1, -1):
                raise ValueError(
                    f"quotient has torsion at degree {q}: pivot {pv}")
        pivots[q] = dict(zip(lat.pivot_rows(), lat.pivot_values()))
    keep: Dict[int, List[int]] = {}
    dims = {}
    for q in U.degrees():
        pv = pivots.get(q, {})
        keep[q] = [i for i in range(U.dim(q)) if i not in pv]
        if keep[q]:
            dims[q] = len(keep[q])

    def project(q: int, coeffs: dict) -> dict:
        lat = I.lattices.get(q)
        vec = {i: ring.element(c) for i, c in coeffs.items() if c != 0}
        if lat:
            for pr, cvec, _ in lat.cols:
                c = vec.get(pr)
                if not c:
                    continue
                p = cvec[pr]
                qq = c / p if ring.is_field else c // p
                for k, v in cvec.items():
                    w = vec.get(k, 0) - qq * v
                    if w == 0:
                        vec.pop(k, None)
                    else:
                        vec[k] = w
        pos = {i: k for k, i in enumerate(keep[q])}
        return {pos[i]: c for i, c in vec.items()}

    unit = project(0, U.unit_element()[1])
    if not unit:
        raise ValueError("quotient kills the unit")

    def lift(q: int, k: int) -> Element:
        return (q, {keep[q][k]: ring.element(1)})

    diff = {}
    for q in sorted(dims):
        if (q + 1) not in dims:
            continue
        m = ExactMatrix.zeros(dims[q + 1], dims[q], ring)
        for j in range(dims[q]):
            img = U.d_element(lift(q, j))
            for i, c in project(q + 1, img[1]).items():
                m.data[i, j] = c
        if not m.is_zero():
            diff[q] = m
    mult: Dict[Tuple[int, int], Dict[Tuple[int, int], dict]] = {}
    for q1 in dims:
        for q2 in dims:
            table = {}
            for i in range(dims[q1]):
                xi = lift(q1, i)
                for j in range(dims[q2]):
                    prod = U.multiply(xi, lift(q2, j))
                    co = project(q1 + q2, prod[1]) if prod[1] else {}
                    if co:
                        table[(i, j)] = co
            if table:
                mult[(q1, q2)] = table
    labels = {q: [U.label(q, i) for i in I_keep]
              for q, I_keep in keep.items() if I_keep}
    Q = DgAlgebra(ring, dims, labels, unit, diff, mult)
    comps = {}
    for q, n in dims.items():
        m = ExactMatrix.zeros(n, U.dim(q), ring)
        for j in range(U.dim(q)):
            for i, c in project(q, {j: ring.element(1)}).items():
                m.data[i, j] = c
        comps[q] = m
    proj = DgMorphism(U, Q, comps, name="projection")
    return Q, proj


# ---------------------------------------------------------------------------
# formality chains
# ---------------------------------------------------------------------------


@dataclass
class FormalityChain:
    """Zig-zag A_0 <-...-> A_k; the terminal algebra has zero differential."""

    algebras: List[DgAlgebra]
    arrows: List[Tuple[DgMorphism, str]]  # direction: "forward" | "backward"


@dataclass
class ChainVerdict:
    ok: bool
    arrow_reports: List[dict]
    notes: List[str]
    identification: Optional[Dict[int, ExactMatrix]] = None

    def __bool__(self):
        return self.ok


def _induced_on_cohomology(f: DgMorphism, src_prof: CohomologyProfile,
                           tgt_prof: CohomologyProfile) -> Dict[int, ExactMatrix]:
    out = {}
    ring = f.source.ring
    for q, mod in src_prof.modules.items():
        tmod = tgt_prof.modules.get(q)
        bsrc = mod.betti
        btgt = tmod.betti if tmod else 0
        if not bsrc and not btgt:
            continue
        if not btgt:
            out[q] = ExactMatrix.zeros(0, bsrc, ring)
            continue
        # chain maps send cocycles to cocycles: project the mapped lifts
        out[q] = tmod.projection_matrix() @ (f.component(q) @ mod.lift)
    return out


def verify_formality_chain(chain: FormalityChain) -> ChainVerdict:
    """Every arrow a valid quasi-isomorphism of dg algebras, terminal
    differential zero, and the composed identification of H(A_0) with the
    terminal algebra is a graded-algebra isomorphism."""
    notes = []
    reports = []
    algebras = chain.algebras
    ok = True
    if len(chain.arrows) != len(algebras) - 1:
        return ChainVerdict(False, [], ["arrow count does not match algebras"])
    for idx, (f, direction) in enumerate(chain.arrows):
        a, b = algebras[idx], algebras[idx + 1]
        if direction == "forward":
            src, tgt = a, b
        elif direction == "backward":
            src, tgt = b, a
        else:
            return ChainVerdict(False, [], [f"bad direction {direction!r}"])
        rep = {"index": idx, "direction": direction}
        if f.source is not src or f.target is not tgt:
            rep["structural"] = "morphism endpoints do not match the chain"
            rep["valid"] = rep["quasi_iso"] = False
            reports.append(rep)
            ok = False
            continue
        problems = f.validate()
        rep["valid"] = not problems
        if problems:
            rep["problems"] = problems[:5]
            ok = False
        qi = is_quasi_iso_dg(f)
        rep["quasi_iso"] = qi.ok
        if not qi.ok:
            ok = False
        reports.append(rep)
    terminal = algebras[-1]
    if not terminal.has_zero_differential():
        notes.append("terminal algebra has a nonzero differential")
        ok = False
    identification = None
    if ok:
        try:
            profiles = [cohomology(A.complex()) for A in algebras]
            for prof in profiles:
                for mod in prof.modules.values():
                    if mod.torsion:
                        raise ValueError("torsion cohomology in the chain")
            total: Optional[Dict[int, ExactMatrix]] = None
            for idx, (f, direction) in enumerate(chain.arrows):
                if direction == "forward":
                    step = _induced_on_cohomology(
                        f, profiles[idx], profiles[idx + 1])
                else:
                    step = _induced_on_cohomology(
                        f, profiles[idx + 1], profiles[idx])
                    step = {q: inverse(m) for q, m in step.items()}
                if total is None:
                    total = step
                else:
                    total = {q: step[q] @ m for q, m in total.items()}
            if total is None:  # chain with a single algebra
                total = {q: ExactMatrix.identity(mod.betti, terminal.ring)
                         for q, mod in profiles[0].modules.items()
                         if mod.betti}
            # identify H(terminal) with terminal itself (zero differential)
            tprof = profiles[-1]
            tfix = {}
            for q, mod in tprof.modules.items():
                if mod.betti:
                    tfix[q] = inverse(mod.lift) if mod.lift.rows == mod.lift.cols \
                        else mod.lift
            identification = {}
            for q, m in (total or {}).items():
                t = tfix.get(q)
                identification[q] = (t @ m) if t is not None and \
                    t.cols == m.rows else m
            # the identification must carry the product of H(A_0) to the
            # product of the terminal algebra
            H0, _ = cohomology_algebra(algebras[0])
            cols = {q: [_sparse_from_list(m.col(j)) for j in range(m.cols)]
                    for q, m in identification.items()}
            for q1 in H0.degrees():
                for q2 in H0.degrees():
                    q3 = q1 + q2
                    if q3 not in identification and terminal.dim(q3) == 0:
                        continue
                    for i in range(H0.dim(q1)):
                        xi = cols[q1][i]
                        for j in range(H0.dim(q2)):
                            prod = H0.mult_entry(q1, q2, i, j)
                            lhs: dict = {}
                            if q3 in identification:
                                for k, ck in prod.items():
                                    _vadd(lhs, cols[q3][k], ck)
                            rhs = terminal.multiply(
                                (q1, xi), (q2, cols[q2][j]))
                            if lhs != rhs[1]:
                                notes.append(
                                    "identification is not multiplicative "
                                    f"at degrees ({q1}, {q2})")
                                ok = False
        except ValueError as exc:
            notes.append(f"identification failed: {exc}")
            ok = False
    return ChainVerdict(ok, reports, notes, identification)


# ---------------------------------------------------------------------------
# bimodules and quasi-equivalence
# ---------------------------------------------------------------------------


class DgBimodule:
    """A-B-dg-bimodule with explicit action structure constants."""

    def __init__(self, left: DgAlgebra, right: DgAlgebra,
                 dims: Dict[int, int], diff: Dict[int, ExactMatrix],
                 left_action: Dict[Tuple[int, int], Dict[Tuple[int, int], dict]],
                 right_action: Dict[Tuple[int, int], Dict[Tuple[int, int], dict]],
                 labels: Optional[Dict[int, list]] = None):
        self.left = left
        self.right = right
        self.ring = left.ring
        self.dims = {q: n for q, n in dims.items() if n}
        self.diff = {q: d for q, d in diff.items() if d.rows and d.cols}
        self.left_action = left_action
        self.right_action = right_action
        self.labels = labels or {}
        self._complex: Optional[ChainComplex] = None

    def dim(self, q: int) -> int:
        return self.dims.get(q, 0)

    def degrees(self) -> List[int]:
        return sorted(self.dims)

    def complex(self) -> ChainComplex:
        if self._complex is None:
            self._complex = ChainComplex(self.ring, dict(self.dims),
                                         dict(self.diff), dict(self.labels))
        return self._complex

    def d_element(self, x: Element) -> Element:
        q, c = x
        d = self.diff.get(q)
        if d is None or not c:
            return (q + 1, {})
        return (q + 1, _sparse_from_list(
            d.matvec(_dense(c, self.dim(q), self.ring))))

    def act_left(self, a: Element, m: Element) -> Element:
        qa, ca = a
        qm, cm = m
        out: dict = {}
        table = self.left_action.get((qa, qm))
        if table:
            for i, x in ca.items():
                for j, y in cm.items():
                    prod = table.get((i, j))
                    if prod:
                        _vadd(out, prod, x * y)
        return (qa + qm, out)

    def act_right(self, m: Element, b: Element) -> Element:
        qm, cm = m
        qb, cb = b
        out: dict = {}
        table = self.right_action.get((qm, qb))
        if table:
            for i, x in cm.items():
                for j, y in cb.items():
                    prod = table.get((i, j))
                    if prod:
                        _vadd(out, prod, x * y)
        return (qm + qb, out)


def bimodule_from_algebra(A: DgAlgebra, right_embedding: DgMorphism) -> DgBimodule:
    """A as an (A, B)-bimodule: left = multiplication, right through B -> A."""
    B = right_embedding.source
    if right_embedding.target is not A:
        raise ValueError("embedding must land in the algebra itself")
    left_action = A.mult
    right_action: Dict[Tuple[int, int], Dict[Tuple[int, int], dict]] = {}
    for qm in A.degrees():
        for qb in B.degrees():
            table = {}
            for j in range(B.dim(qb)):
                eb = right_embedding.apply(B.basis_element(qb, j))
                for i in range(A.dim(qm)):
                    prod = A.multiply(A.basis_element(qm, i), eb)
                    if prod[1]:
                        table[(i, j)] = prod[1]
            if table:
                right_action[(qm, qb)] = table
    return DgBimodule(A, B, dict(A.dims), dict(A.diff),
                      left_action, right_action, dict(A.labels))


def validate_dg_bimodule(M: DgBimodule) -> list:
    """Leibniz for both actions, associativity, commuting actions, units."""
    problems = []
    A, B = M.left, M.right
    for q in M.degrees():
        d0, d1 = M.diff.get(q), M.diff.get(q + 1)
        if d0 is not None and d1 is not None and not (d1 @ d0).is_zero():
            problems.append(f"d.d != 0 at degree {q}")

    def elements(alg_dims):
        return [(q, i) for q in sorted(alg_dims) for i in range(alg_dims[q])]

    one_a = A.unit_element()
    one_b = B.unit_element()
    for qm, i in elements(M.dims):
        m = (qm, {i: M.ring.element(1)})
        if M.act_left(one_a, m)[1] != m[1]:
            problems.append(f"1*m != m at ({qm},{i})")
        if M.act_right(m, one_b)[1] != m[1]:
            problems.append(f"m*1 != m at ({qm},{i})")
    for qa, i in elements(A.dims):
        a = A.basis_element(qa, i)
        da = A.d_element(a)
        sign = -1 if qa % 2 else 1
        for qm, j in elements(M.dims):
            m = (qm, {j: M.ring.element(1)})
            lhs = M.d_element(M.act_left(a, m))
            acc = dict(M.act_left(da, m)[1])
            _vadd(acc, M.act_left(a, M.d_element(m))[1], sign)
            if lhs[1] != acc:
                problems.append(f"left Leibniz fails at a=({qa},{i}), "
                                f"m=({qm},{j})")
    for qm, i in elements(M.dims):
        m = (qm, {i: M.ring.element(1)})
        dm = M.d_element(m)
        sign = -1 if qm % 2 else 1
        for qb, j in elements(B.dims):
            b = B.basis_element(qb, j)
            lhs = M.d_element(M.act_right(m, b))
            acc = dict(M.act_right(dm, b)[1])
            _vadd(acc, M.act_right(m, B.d_element(b))[1], sign)
            if lhs[1] != acc:
                problems.append(f"right Leibniz fails at m=({qm},{i}), "
                                f"b=({qb},{j})")
    for qa, i in elements(A.dims):
        a = A.basis_element(qa, i)
        for qm, j in elements(M.dims):
            m = (qm, {j: M.ring.element(1)})
            for qb, k in elements(B.dims):
                b = B.basis_element(qb, k)
                lhs = M.act_right(M.act_left(a, m), b)
                rhs = M.act_left(a, M.act_right(m, b))
                if lhs[1] != rhs[1]:
                    problems.append(
                        f"actions do not commute at ({qa},{i}),({qm},{j}),"
                        f"({qb},{k})")
    for qa, i in elements(A.dims):
        a1 = A.basis_element(qa, i)
        for qa2, i2 in elements(A.dims):
            a12 = A.multiply(a1, A.basis_element(qa2, i2))
            for qm, j in elements(M.dims):
                m = (qm, {j: M.ring.element(1)})
                lhs = M.act_left(a12, m)
                rhs = M.act_left(a1, M.act_left(
                    A.basis_element(qa2, i2), m))
                if lhs[1] != rhs[1]:
                    problems.append(
                        f"left action not associative at ({qa},{i}),"
                        f"({qa2},{i2}),({qm},{j})")
    for qm, j in elements(M.dims):
        m = (qm, {j: M.ring.element(1)})
        for qb, k in elements(B.dims):
            b1 = B.basis_element(qb, k)
            mb1 = M.act_right(m, b1)
            for qb2, k2 in elements(B.dims):
                b2 = B.basis_element(qb2, k2)
                lhs = M.act_right(mb1, b2)
                rhs = M.act_right(m, B.multiply(b1, b2))
                if lhs[1] != rhs[1]:
                    problems.append(
                        f"right action not associative at ({qm},{j}),"
                        f"({qb},{k}),({qb2},{k2})")
    return problems


def verify_quasi_equivalence(A: DgAlgebra, B: DgAlgebra, M: DgBimodule,
                             c: Element):
    """Is c a degree-0 cycle whose action maps are quasi-isomorphisms?

    Checks d(c) = 0 and that a -> a.c and b -> c.b are chain maps inducing
    isomorphisms on all cohomology (mapping-cone acyclicity on both sides).
    """
    report = {}
    if c[0] != 0:
        return False, {"reason": f"cycle must have degree 0, got {c[0]}"}
    if M.d_element(c)[1]:
        return False, {"reason": "c is not a cycle"}

    def action_map(alg: DgAlgebra, side: str) -> ChainMap:
        comps = {}
        for q in alg.degrees():
            m = ExactMatrix.zeros(M.dim(q), alg.dim(q), M.ring)
            for j in range(alg.dim(q)):
                x = alg.basis_element(q, j)
                img = M.act_left(x, c) if side == "left" else M.act_right(c, x)
                for i, v in img[1].items():
                    m.data[i, j] = v
            if m.rows and m.cols:
                comps[q] = m
        return ChainMap(alg.complex(), M.complex(), comps)

    left = action_map(A, "left")
    right = action_map(B, "right")
    bad = left.validate() + right.validate()
    if bad:
        return False, {"reason": "action maps are not chain maps",
                       "problems": bad[:5]}
    lq = is_quasi_iso(left)
    rq = is_quasi_iso(right)
    report["left_quasi_iso"] = lq.ok
    report["right_quasi_iso"] = rq.ok
    return (lq.ok and rq.ok), report
