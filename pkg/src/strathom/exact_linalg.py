"""Exact dense linear algebra over the integers and the rationals.

Everything downstream (complexes, quiver representations, dg algebras) is
built on the primitives in this module: Smith normal form with unimodular
transforms, saturated kernel lattices, exact solving, and presentations of
subquotient modules ker/im.

Matrices are dense numpy arrays.  Integer matrices use Python ints (object
dtype) so there is no fixed-width overflow; as a fast path, Smith reduction
runs on int64 arrays with explicit growth bounds and restarts on object
dtype if a bound is ever at risk.  Rational entries are `fractions.Fraction`
values, which normalize on every operation.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np


class CoeffRing:
    """Coefficient ring: arbitrary-precision integers or exact rationals."""

    __slots__ = ("kind",)

    def __init__(self, kind: str):
        if kind not in ("integers", "rationals"):
            raise ValueError(f"unknown coefficient ring {kind!r}")
        self.kind = kind

    @property
    def is_field(self) -> bool:
        return self.kind == "rationals"

    def element(self, x):
        """Coerce x into the ring, normalizing rationals."""
        if self.kind == "integers":
            if isinstance(x, Fraction):
                if x.denominator != 1:
                    raise ValueError(f"{x} is not an integer")
                return int(x)
            return int(x)
        return Fraction(x)

    def __repr__(self):
        return "ZZ" if self.kind == "integers" else "QQ"

    def __eq__(self, other):
        return isinstance(other, CoeffRing) and self.kind == other.kind

    def __hash__(self):
        return hash(self.kind)


ZZ = CoeffRing("integers")
QQ = CoeffRing("rationals")


def _as_object_array(rows: int, cols: int, data) -> np.ndarray:
    a = np.empty((rows, cols), dtype=object)
    if rows and cols:
        a[:, :] = data
    return a


class ExactMatrix:
    """Immutable dense matrix over a CoeffRing.

    The wrapped array has dtype=object with int or Fraction entries.  All
    arithmetic is exact; operations return new matrices.  Products of
    small-integer matrices run through int64 numpy kernels when a bound on
    the result proves no overflow is possible.
    """

    __slots__ = ("ring", "data", "_i64")

    def __init__(self, ring: CoeffRing, data: np.ndarray):
        self.ring = ring
        self.data = data
        self._i64 = None

    def _int64_view(self):
        """(int64 array, max abs) when entries fit, else False; cached."""
        if self._i64 is None:
            if self.ring.is_field or self.rows == 0 or self.cols == 0:
                self._i64 = False
            else:
                try:
                    a = self.data.astype(np.int64)
                    self._i64 = (a, int(abs(a).max()))
                except (OverflowError, TypeError, ValueError):
                    self._i64 = False
        return self._i64

    # -- constructors ---------------------------------------------------

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence], ring: CoeffRing = ZZ,
                  cols: Optional[int] = None) -> "ExactMatrix":
        nrows = len(rows)
        ncols = len(rows[0]) if nrows else (cols if cols is not None else 0)
        a = np.empty((nrows, ncols), dtype=object)
        for i, row in enumerate(rows):
            if len(row) != ncols:
                raise ValueError("ragged rows")
            for j, x in enumerate(row):
                a[i, j] = ring.element(x)
        return cls(ring, a)

    @classmethod
    def zeros(cls, rows: int, cols: int, ring: CoeffRing = ZZ) -> "ExactMatrix":
        a = _as_object_array(rows, cols, ring.element(0))
        return cls(ring, a)

    @classmethod
    def identity(cls, n: int, ring: CoeffRing = ZZ) -> "ExactMatrix":
        m = cls.zeros(n, n, ring)
        one = ring.element(1)
        for i in range(n):
            m.data[i, i] = one
        return m

    @classmethod
    def column(cls, entries: Sequence, ring: CoeffRing = ZZ) -> "ExactMatrix":
        return cls.from_rows([[x] for x in entries], ring, cols=1)

    # -- shape / access -------------------------------------------------

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]

    @property
    def entries(self) -> list:
        """Entries in row-major order."""
        return list(self.data.reshape(-1))

    def __getitem__(self, ij):
        return self.data[ij]

    def col(self, j: int) -> list:
        return list(self.data[:, j])

    def tolist(self) -> list:
        return [list(r) for r in self.data]

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "ExactMatrix":
        return ExactMatrix(self.ring, self.data[np.ix_(rows, cols)].copy()
                           if len(rows) and len(cols)
                           else _as_object_array(len(rows), len(cols), 0))

    def take_cols(self, cols: Sequence[int]) -> "ExactMatrix":
        a = np.empty((self.rows, len(cols)), dtype=object)
        for k, j in enumerate(cols):
            a[:, k] = self.data[:, j]
        return ExactMatrix(self.ring, a)

    def take_rows(self, rows: Sequence[int]) -> "ExactMatrix":
        a = np.empty((len(rows), self.cols), dtype=object)
        for k, i in enumerate(rows):
            a[k, :] = self.data[i, :]
        return ExactMatrix(self.ring, a)

    @classmethod
    def wrap(cls, ring: CoeffRing, data: np.ndarray) -> "ExactMatrix":
        """Adopt an object array whose entries are already ring elements."""
        return cls(ring, data)

    # -- arithmetic ------------------------------------------------------

    def _check_ring(self, other: "ExactMatrix"):
        if self.ring != other.ring:
            raise ValueError("mixed coefficient rings")

    def __matmul__(self, other: "ExactMatrix") -> "ExactMatrix":
        self._check_ring(other)
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        if self.rows == 0 or other.cols == 0 or self.cols == 0:
            return ExactMatrix.zeros(self.rows, other.cols, self.ring)
        fa, fb = self._int64_view(), other._int64_view()
        if fa and fb and fa[1] * fb[1] * self.cols < 2 ** 62:
            return ExactMatrix(self.ring, fa[0].dot(fb[0]).astype(object))
        return ExactMatrix(self.ring, self.data.dot(other.data))

    def __add__(self, other: "ExactMatrix") -> "ExactMatrix":
        self._check_ring(other)
        return ExactMatrix(self.ring, self.data + other.data)

    def __sub__(self, other: "ExactMatrix") -> "ExactMatrix":
        self._check_ring(other)
        return ExactMatrix(self.ring, self.data - other.data)

    def __neg__(self) -> "ExactMatrix":
        return ExactMatrix(self.ring, -self.data)

    def scale(self, c) -> "ExactMatrix":
        c = self.ring.element(c)
        return ExactMatrix(self.ring, self.data * c)

    def transpose(self) -> "ExactMatrix":
        return ExactMatrix(self.ring, self.data.T.copy())

    def matvec(self, v: Sequence) -> list:
        if self.cols != len(v):
            raise ValueError("shape mismatch in matvec")
        if self.rows == 0:
            return []
        if self.cols == 0:
            return [self.ring.element(0)] * self.rows
        fa = self._int64_view()
        if fa:
            try:
                vv = np.array(v, dtype=np.int64)
                vmax = int(abs(vv).max())
                if fa[1] * vmax * self.cols < 2 ** 62:
                    return [int(x) for x in fa[0].dot(vv)]
            except (OverflowError, TypeError, ValueError):
                pass
        vv = np.empty(len(v), dtype=object)
        vv[:] = v
        return list(self.data.dot(vv))

    # -- predicates -------------------------------------------------------

    @property
    def shape(self):
        return self.data.shape

    def is_zero(self) -> bool:
        return self.rows == 0 or self.cols == 0 or not (self.data != 0).any()

    def __eq__(self, other):
        return (isinstance(other, ExactMatrix)
                and self.ring == other.ring
                and self.shape == other.shape
                and (self.rows == 0 or self.cols == 0
                     or bool((self.data == other.data).all())))

    def __repr__(self):
        return f"ExactMatrix({self.ring}, {self.tolist()})"

    @staticmethod
    def hstack(mats: Sequence["ExactMatrix"], rows: Optional[int] = None,
               ring: CoeffRing = ZZ) -> "ExactMatrix":
        mats = list(mats)
        if not mats:
            return ExactMatrix.zeros(rows or 0, 0, ring)
        r = mats[0].rows
        total = sum(m.cols for m in mats)
        a = np.empty((r, total), dtype=object)
        at = 0
        for m in mats:
            if m.rows != r:
                raise ValueError("hstack row mismatch")
            a[:, at:at + m.cols] = m.data
            at += m.cols
        return ExactMatrix(mats[0].ring, a)

    @staticmethod
    def vstack(mats: Sequence["ExactMatrix"], cols: Optional[int] = None,
               ring: CoeffRing = ZZ) -> "ExactMatrix":
        mats = list(mats)
        if not mats:
            return ExactMatrix.zeros(0, cols or 0, ring)
        c = mats[0].cols
        total = sum(m.rows for m in mats)
        a = np.empty((total, c), dtype=object)
        at = 0
        for m in mats:
            if m.cols != c:
                raise ValueError("vstack col mismatch")
            a[at:at + m.rows, :] = m.data
            at += m.rows
        return ExactMatrix(mats[0].ring, a)


@dataclass(frozen=True)
class SnfResult:
    """Smith decomposition D = U @ M @ V with U, V unimodular."""

    U: ExactMatrix
    D: ExactMatrix
    V: ExactMatrix

    def diagonal(self) -> list:
        n = min(self.D.rows, self.D.cols)
        return [self.D[i, i] for i in range(n)]

    @property
    def rank(self) -> int:
        return sum(1 for d in self.diagonal() if d != 0)

    def torsion(self) -> list:
        return [d for d in self.diagonal() if d != 0 and d != 1]


class _Overflow(Exception):
    pass


_INT64_SAFE = 2 ** 61


def _guard(*vals):
    for v in vals:
        if v >= _INT64_SAFE:
            raise _Overflow


def _snf_core(a: np.ndarray, field: bool, transforms: bool):
    """In-place Smith reduction of a; returns (U, V, diag) or (None, None, diag).

    a may be int64 (raises _Overflow when entry growth gets near the limit)
    or object dtype.  The transforms are always kept in object dtype since
    their entries outgrow the working matrix.  Pivoting selects an entry of
    minimal nonzero absolute value, which keeps intermediate entries small,
    and row/column updates touch only the rows/columns with nonzero
    quotients (most, for the incidence-like matrices this package meets).
    """
    m, n = a.shape
    guarded = a.dtype != object
    if transforms:
        U = ExactMatrix.identity(m, ZZ).data
        V = ExactMatrix.identity(n, ZZ).data
    else:
        U = V = None
    t = 0
    while t < min(m, n):
        sub = a[t:, t:]
        nz = sub != 0
        if not nz.any():
            break
        # minimal |entry| pivot; any +-1 wins immediately
        absd = abs(sub)
        ones = nz & (absd == 1)
        if ones.any():
            i, j = np.unravel_index(int(np.argmax(ones)), ones.shape)
        else:
            big = absd.max() + 1
            masked = np.where(nz, absd, big)
            i, j = np.unravel_index(int(np.argmin(masked)), masked.shape)
        i += t
        j += t
        if i != t:
            a[[t, i], :] = a[[i, t], :]
            if transforms:
                U[[t, i], :] = U[[i, t], :]
        if j != t:
            a[:, [t, j]] = a[:, [j, t]]
            if transforms:
                V[:, [t, j]] = V[:, [j, t]]
        if a[t, t] < 0:
            a[t, :] = -a[t, :]
            if transforms:
                U[t, :] = -U[t, :]
        p = a[t, t]
        if field and p != 1:
            inv = 1 / p
            a[t, :] = a[t, :] * inv
            if transforms:
                U[t, :] = U[t, :] * inv
            p = a[t, t]

        col = a[t + 1:, t]
        if (col != 0).any():
            q = col.copy() if field else col // p
            nzq = np.nonzero(q)[0]
            if len(nzq):
                qq = q[nzq]
                ridx = nzq + (t + 1)
                if guarded:
                    _guard(int(abs(qq).max()) * max(int(abs(a[t, t:]).max()), 1)
                           + int(abs(a).max()))
                a[ridx, t:] -= qq[:, None] * a[t, t:][None, :]
                if transforms:
                    qo = qq.astype(object) if guarded else qq
                    U[ridx, :] -= qo[:, None] * U[t, :][None, :]
            if (a[t + 1:, t] != 0).any():
                continue  # remainders < pivot; re-pick pivot
        row = a[t, t + 1:]
        if (row != 0).any():
            q = row.copy() if field else row // p
            nzq = np.nonzero(q)[0]
            if len(nzq):
                qq = q[nzq]
                cidx = nzq + (t + 1)
                if guarded:
                    _guard(int(abs(qq).max()) * max(int(abs(a[t:, t]).max()), 1)
                           + int(abs(a).max()))
                a[t:, cidx] -= a[t:, t][:, None] * qq[None, :]
                if transforms:
                    qo = qq.astype(object) if guarded else qq
                    V[:, cidx] -= V[:, t][:, None] * qo[None, :]
            if (a[t, t + 1:] != 0).any():
                continue
        if not field:
            # pivot must divide the remaining block for the divisor chain
            rest = a[t + 1:, t + 1:]
            if rest.size and p != 1:
                rem = rest % p
                bad = rem != 0
                if bad.any():
                    i = t + 1 + int(np.argmax(bad.any(axis=1)))
                    if guarded:
                        _guard(int(abs(a[t, t:]).max()) + int(abs(a[i, t:]).max()))
                    a[t, t:] += a[i, t:]
                    if transforms:
                        U[t, :] += U[i, :]
                    continue
        t += 1
    diag = [a[i, i] for i in range(min(m, n))]
    return U, V, diag


def _prepare_int64(M: ExactMatrix) -> Optional[np.ndarray]:
    if M.ring.is_field:
        return None
    try:
        a = M.data.astype(np.int64)
    except (OverflowError, TypeError):
        return None
    if a.size and abs(a).max() >= 2 ** 40:
        return None
    return a


def _snf_any(M: ExactMatrix, transforms: bool):
    """Run Smith reduction, preferring the int64 fast path over ZZ."""
    field = M.ring.is_field
    if not field:
        a = _prepare_int64(M)
        if a is not None:
            try:
                U, V, diag = _snf_core(a, False, transforms)
                return (ExactMatrix(ZZ, U) if transforms else None,
                        ExactMatrix(ZZ, V) if transforms else None,
                        ExactMatrix(ZZ, a.astype(object)),
                        [int(d) for d in diag])
            except _Overflow:
                pass
    a = np.empty(M.shape, dtype=object)
    a[:, :] = M.data
    U, V, diag = _snf_core(a, field, transforms)
    ring = M.ring
    return (ExactMatrix(ring, U) if transforms else None,
            ExactMatrix(ring, V) if transforms else None,
            ExactMatrix(ring, a), diag)


def smith_normal_form(M: ExactMatrix) -> SnfResult:
    """Smith normal form over ZZ: D = U M V, d_1 | d_2 | ..., d_i >= 0."""
    if M.ring.is_field:
        raise ValueError("smith_normal_form requires integer coefficients")
    U, V, D, _ = _snf_any(M, transforms=True)
    return SnfResult(U=U, D=D, V=V)


def invariant_factors(M: ExactMatrix) -> list:
    """Nonzero diagonal of the Smith form (no transforms; fast path)."""
    _, _, _, diag = _snf_any(M, transforms=False)
    return [d for d in diag if d != 0]


def rank(M: ExactMatrix) -> int:
    return len(invariant_factors(M))


def kernel_basis(M: ExactMatrix) -> ExactMatrix:
    """Basis of {x : Mx = 0} as matrix columns.

    Over ZZ the columns generate the full kernel lattice (saturated), via
    the trailing columns of the Smith transform V.
    """
    if M.cols == 0:
        return ExactMatrix.zeros(0, 0, M.ring)
    if M.rows == 0:
        return ExactMatrix.identity(M.cols, M.ring)
    _, V, _, diag = _snf_any(M, transforms=True)
    r = sum(1 for d in diag if d != 0)
    return V.take_cols(range(r, M.cols))


class PresolvedSolver:
    """Reusable exact solver for Mx = b built on one Smith decomposition."""

    def __init__(self, M: ExactMatrix):
        self.M = M
        self.ring = M.ring
        if M.rows and M.cols:
            U, V, D, diag = _snf_any(M, transforms=True)
            self.U, self.V = U, V
            self.diag = diag
        else:
            self.U = ExactMatrix.identity(M.rows, M.ring)
            self.V = ExactMatrix.identity(M.cols, M.ring)
            self.diag = []
        self.rank = sum(1 for d in self.diag if d != 0)

    def solve(self, b: Sequence) -> Optional[list]:
        """Coefficients x with Mx = b, or None if b is not in the image."""
        if len(b) != self.M.rows:
            raise ValueError("rhs length mismatch")
        c = self.U.matvec(b)
        zero = self.ring.element(0)
        y = [zero] * self.M.cols
        for i, ci in enumerate(c):
            if i < len(self.diag) and self.diag[i] != 0:
                d = self.diag[i]
                if self.ring.is_field:
                    y[i] = ci / d
                else:
                    q, r = divmod(ci, d)
                    if r != 0:
                        return None
                    y[i] = q
            elif ci != 0:
                return None
        return self.V.matvec(y)


def solve_in_image(M: ExactMatrix, b: Sequence) -> Optional[list]:
    """Solve Mx = b exactly; None means b is not in the image (not an error)."""
    return PresolvedSolver(M).solve(b)


def inverse(M: ExactMatrix) -> ExactMatrix:
    """Exact inverse; over ZZ requires M unimodular.

    With D = U M V the inverse is V D^-1 U, which only needs the one
    decomposition.
    """
    if M.rows != M.cols:
        raise ValueError("inverse of non-square matrix")
    if M.rows == 0:
        return ExactMatrix.zeros(0, 0, M.ring)
    U, V, _, diag = _snf_any(M, transforms=True)
    if len(diag) < M.rows or any(d == 0 for d in diag):
        raise ValueError("matrix is not invertible over the ring")
    if not M.ring.is_field and any(d not in (1, -1) for d in diag):
        raise ValueError("matrix is not invertible over the ring")
    scaled = V.data.copy()
    for j, d in enumerate(diag):
        if d != 1:
            if M.ring.is_field:
                scaled[:, j] = scaled[:, j] * (1 / d)
            else:
                scaled[:, j] = scaled[:, j] * d  # d = -1
    return ExactMatrix(M.ring, scaled) @ U


def determinant(M: ExactMatrix):
    """Exact determinant (fraction-free Bareiss over ZZ)."""
    if M.rows != M.cols:
        raise ValueError("determinant of non-square matrix")
    n = M.rows
    if n == 0:
        return M.ring.element(1)
    a = [[x for x in row] for row in M.tolist()]
    sign = 1
    prev = M.ring.element(1)
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return M.ring.element(0)
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = a[i][j] * a[k][k] - a[i][k] * a[k][j]
                if M.ring.is_field:
                    a[i][j] = num / prev
                else:
                    a[i][j] = num // prev
        prev = a[k][k]
    return M.ring.element(sign) * a[n - 1][n - 1]


class SubquotientModule:
    """Presentation of span(kernel_gens) / span(image_gens).

    betti/torsion are the module invariants; `lift` holds cocycle
    representatives of a basis of the free part, as ambient columns.
    """

    def __init__(self, ring: CoeffRing, kernel_basis_mat: ExactMatrix,
                 rel_snf: SnfResult):
        self.ring = ring
        self._K = kernel_basis_mat
        self._Usolve = PresolvedSolver(kernel_basis_mat)
        diag = rel_snf.diagonal()
        k = kernel_basis_mat.cols
        self._r = sum(1 for d in diag if d != 0)
        self._diag = diag
        self._U = rel_snf.U
        self._Uinv = inverse(rel_snf.U) if k else ExactMatrix.zeros(0, 0, ring)
        self.betti = k - self._r
        self.torsion = [d for d in diag[:self._r] if d != 1]
        free_cols = self._Uinv.take_cols(range(self._r, k))
        self.lift = self._K @ free_cols
        self._proj: Optional[ExactMatrix] = None

    @property
    def is_zero(self) -> bool:
        return self.betti == 0 and not self.torsion

    def coordinates(self, x: Sequence):
        """Free-part and torsion coordinates of the class of x.

        Raises ValueError("not a cocycle") when x is outside the kernel span.
        """
        c = self._Usolve.solve(x)
        if c is None:
            raise ValueError("not a cocycle")
        y = self._U.matvec(c)
        free = y[self._r:]
        tors = [y[i] % self._diag[i]
                for i in range(self._r) if self._diag[i] != 1]
        return free, tors

    def is_boundary(self, x: Sequence) -> bool:
        free, tors = self.coordinates(x)
        return all(c == 0 for c in free) and all(c == 0 for c in tors)

    def projection_matrix(self) -> ExactMatrix:
        """Matrix sending an ambient cocycle to its free-part coordinates.

        Exists when the kernel basis spans a saturated lattice (always the
        case for kernels of integer matrices); applying it to a vector
        outside the kernel span is undefined, so callers must know their
        input is a cocycle.
        """
        if self._proj is None:
            s = self._Usolve
            rk = s.rank
            if rk < self._K.cols or any(d != 1 for d in s.diag[:rk]):
                raise ValueError("kernel basis is not saturated; "
                                 "no exact projection matrix")
            solve_mat = s.V.take_cols(range(rk)) @ s.U.take_rows(range(rk))
            free_rows = self._U.take_rows(range(self._r, self._K.cols))
            self._proj = free_rows @ solve_mat
        return self._proj

    def project_sparse(self, coeffs: dict) -> dict:
        """Free-part coordinates of a sparse ambient cocycle."""
        if self.betti == 0:
            return {}
        P = self.projection_matrix().data
        acc = None
        for i, c in coeffs.items():
            col = P[:, i] * c
            acc = col if acc is None else acc + col
        if acc is None:
            return {}
        return {i: v for i, v in enumerate(acc) if v != 0}


def subquotient(kernel_gens: ExactMatrix, image_gens: ExactMatrix) -> SubquotientModule:
    """Invariants and representatives of span(kernel_gens)/span(image_gens)."""
    ring = kernel_gens.ring
    solver = PresolvedSolver(kernel_gens)
    k = kernel_gens.cols
    relmat = None
    if k and image_gens.cols and solver.rank == k and \
            all(d == 1 for d in solver.diag[:k]):
        # saturated kernel basis: solve all columns with one product, then
        # confirm containment exactly
        smat = solver.V.take_cols(range(k)) @ solver.U.take_rows(range(k))
        cand = smat @ image_gens
        if kernel_gens @ cand == image_gens:
            relmat = cand
        else:
            raise ValueError("image not contained in kernel")
    if relmat is None:
        rel = np.empty((k, image_gens.cols), dtype=object)
        for j in range(image_gens.cols):
            c = solver.solve(image_gens.col(j))
            if c is None:
                raise ValueError("image not contained in kernel")
            rel[:, j] = c if k else []
        relmat = ExactMatrix(ring, rel)
    if ring.is_field:
        U, V, D, _ = _snf_any(relmat, transforms=True)
        rel_snf = SnfResult(U=U, D=D, V=V)
    else:
        rel_snf = smith_normal_form(relmat)
    return SubquotientModule(ring, kernel_gens, rel_snf)


def coordinates_in_subquotient(x: Sequence, sq: SubquotientModule):
    return sq.coordinates(x)


def _xgcd(a: int, b: int):
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


def _vec_axpy(dst: dict, src: dict, c):
    if c == 0:
        return
    for k, v in src.items():
        w = dst.get(k, 0) + c * v
        if w == 0:
            dst.pop(k, None)
        else:
            dst[k] = w


class ColumnLattice:
    """Column span over the ring in echelon form, with membership queries.

    Vectors are sparse dicts {row: value}.  Each inserted generator carries a
    coordinate dict so that membership queries can report coordinates in the
    original generators.  Over ZZ membership means exact lattice membership,
    not rational span membership.
    """

    def __init__(self, ring: CoeffRing):
        self.ring = ring
        self.cols: list = []  # (pivot_row, vec dict, coords dict), sorted
        self.ngens = 0

    @staticmethod
    def from_matrix(M: ExactMatrix) -> "ColumnLattice":
        lat = ColumnLattice(M.ring)
        for j in range(M.cols):
            lat.add({i: M[i, j] for i in range(M.rows) if M[i, j] != 0})
        return lat

    @property
    def rank(self) -> int:
        return len(self.cols)

    def _reduce(self, vec: dict, coords: dict, need_exact: bool):
        """Reduce vec against the echelon columns; mutates vec/coords.

        Returns False if an exact-division step fails (ZZ only) while
        need_exact is set.
        """
        field = self.ring.is_field
        for pr, cvec, ccoords in self.cols:
            c = vec.get(pr)
            if not c:
                continue
            p = cvec[pr]
            if field:
                q = c / p
            else:
                q, r = divmod(c, p)
                if r != 0:
                    if need_exact:
                        return False
                    continue
            _vec_axpy(vec, cvec, -q)
            _vec_axpy(coords, ccoords, q)
        return True

    def add(self, vec: dict, coord_key=None) -> bool:
        """Insert a generator; returns True when the lattice grew.

        Each stored column keeps coordinates expressing it as a combination
        of the original generators, so coordinate queries stay exact.
        """
        key = coord_key if coord_key is not None else self.ngens
        self.ngens += 1
        vec = {k: self.ring.element(v) for k, v in vec.items() if v != 0}
        coords = {key: self.ring.element(1)}  # vec == sum coords[g] * gen_g
        grew = False
        field = self.ring.is_field
        while vec:
            pr = min(vec)
            idx = None
            for s, (r0, _, _) in enumerate(self.cols):
                if r0 == pr:
                    idx = s
                    break
                if r0 > pr:
                    break
            if idx is None:
                pos = 0
                while pos < len(self.cols) and self.cols[pos][0] < pr:
                    pos += 1
                self.cols.insert(pos, (pr, vec, coords))
                return True
            r0, cvec, ccoords = self.cols[idx]
            p = cvec[pr]
            c = vec[pr]
            if field:
                q = c / p
                _vec_axpy(vec, cvec, -q)
                _vec_axpy(coords, ccoords, -q)
                continue
            q, r = divmod(c, p)
            if r == 0:
                _vec_axpy(vec, cvec, -q)
                _vec_axpy(coords, ccoords, -q)
                continue
            # combine columns so the pivot becomes gcd(p, c); the 2x2 change
            # of generators [[x, y], [-c/g, p/g]] has determinant 1
            g, x, y = _xgcd(p, c)
            newvec = {}
            _vec_axpy(newvec, cvec, x)
            _vec_axpy(newvec, vec, y)
            newco = {}
            _vec_axpy(newco, ccoords, x)
            _vec_axpy(newco, coords, y)
            restvec = {}
            _vec_axpy(restvec, vec, p // g)
            _vec_axpy(restvec, cvec, -(c // g))
            restco = {}
            _vec_axpy(restco, coords, p // g)
            _vec_axpy(restco, ccoords, -(c // g))
            self.cols[idx] = (pr, newvec, newco)
            vec, coords = restvec, restco
            grew = True
        return grew

    def contains(self, vec: dict) -> bool:
        return self.coordinates(vec) is not None

    def coordinates(self, vec: dict) -> Optional[dict]:
        """Coordinates of vec in the original generators, or None."""
        v = {k: self.ring.element(x) for k, x in vec.items() if x != 0}
        coords: dict = {}
        if not self._reduce(v, coords, need_exact=True):
            return None
        if v:
            return None
        return coords

    def echelon_coordinates(self, vec: dict) -> Optional[dict]:
        """Coordinates of vec in the echelon basis columns, or None."""
        v = {k: self.ring.element(x) for k, x in vec.items() if x != 0}
        out: dict = {}
        field = self.ring.is_field
        for idx, (pr, cvec, _) in enumerate(self.cols):
            c = v.get(pr)
            if not c:
                continue
            p = cvec[pr]
            if field:
                q = c / p
            else:
                q, r = divmod(c, p)
                if r != 0:
                    return None
            out[idx] = q
            _vec_axpy(v, cvec, -q)
        return out if not v else None

    def lattice_equals(self, other: "ColumnLattice") -> bool:
        if self.rank != other.rank:
            return False
        return (all(other.contains(c[1]) for c in self.cols)
                and all(self.contains(c[1]) for c in other.cols))

    def pivot_rows(self) -> list:
        return [c[0] for c in self.cols]

    def pivot_values(self) -> list:
        return [c[1][c[0]] for c in self.cols]

    def basis_vectors(self) -> list:
        return [dict(c[1]) for c in self.cols]
