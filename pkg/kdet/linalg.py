"""
Matrices over the supported rings and Smith-style normal forms.

All matrix routines go through a single diagonalization ``snf`` producing
invertible U, V with U*A*V = D. Over Euclidean rings it is the usual Smith
normal form; over chain rings the pivot of minimal valuation divides the
whole remaining block, so one pass suffices.
"""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass
from typing import Any, Callable, List, Optional, Sequence, Tuple

from kdet.errors import DomainError, NotInvertibleError
from kdet.rings import Ring

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Matrix:
    """An immutable rows x cols matrix of raw ring values."""

    ring: Ring
    rows: int
    cols: int
    entries: Tuple[Tuple[Any, ...], ...]

    # ==================== CONSTRUCTORS ====================

    @classmethod
    def from_rows(cls, ring: Ring, rows: Sequence[Sequence[Any]], cols: Optional[int] = None) -> "Matrix":
        entries = tuple(tuple(row) for row in rows)
        if cols is None:
            cols = len(entries[0]) if entries else 0
        for row in entries:
            if len(row) != cols:
                raise DomainError(f"ragged matrix: expected {cols} columns, got {len(row)}")
        return cls(ring, len(entries), cols, entries)

    @classmethod
    def from_ints(cls, ring: Ring, rows: Sequence[Sequence[int]], cols: Optional[int] = None) -> "Matrix":
        return cls.from_rows(ring, [[ring.from_int(x) for x in row] for row in rows], cols)

    @classmethod
    def zeros(cls, ring: Ring, rows: int, cols: int) -> "Matrix":
        return cls(ring, rows, cols, tuple(tuple(ring.zero for _ in range(cols)) for _ in range(rows)))

    @classmethod
    def identity(cls, ring: Ring, n: int) -> "Matrix":
        return cls(ring, n, n, tuple(
            tuple(ring.one if i == j else ring.zero for j in range(n)) for i in range(n)
        ))

    @classmethod
    def diagonal(cls, ring: Ring, values: Sequence[Any]) -> "Matrix":
        n = len(values)
        return cls(ring, n, n, tuple(
            tuple(values[i] if i == j else ring.zero for j in range(n)) for i in range(n)
        ))

    # ==================== ACCESS ====================

    def __getitem__(self, index: Tuple[int, int]) -> Any:
        i, j = index
        return self.entries[i][j]

    @property
    def shape(self) -> Tuple[int, int]:
        return self.rows, self.cols

    def is_zero(self) -> bool:
        return all(self.ring.is_zero(x) for row in self.entries for x in row)

    def is_square(self) -> bool:
        return self.rows == self.cols

    def column(self, j: int) -> List[Any]:
        return [self.entries[i][j] for i in range(self.rows)]

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "Matrix":
        return Matrix(self.ring, len(rows), len(cols), tuple(
            tuple(self.entries[i][j] for j in cols) for i in rows
        ))

    def columns(self, start: int, stop: Optional[int] = None) -> "Matrix":
        stop = self.cols if stop is None else stop
        return self.submatrix(range(self.rows), range(start, stop))

    # ==================== ARITHMETIC ====================

    def _check_same(self, other: "Matrix") -> None:
        if self.shape != other.shape or self.ring != other.ring:
            raise DomainError(f"shape mismatch: {self.rows}x{self.cols} vs {other.rows}x{other.cols}")

    def __add__(self, other: "Matrix") -> "Matrix":
        self._check_same(other)
        add = self.ring.add
        return Matrix(self.ring, self.rows, self.cols, tuple(
            tuple(add(a, b) for a, b in zip(ra, rb)) for ra, rb in zip(self.entries, other.entries)
        ))

    def __neg__(self) -> "Matrix":
        return self.map(self.ring.neg)

    def __sub__(self, other: "Matrix") -> "Matrix":
        return self + (-other)

    def __matmul__(self, other: "Matrix") -> "Matrix":
        if self.cols != other.rows:
            raise DomainError(f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}")
        ring = self.ring
        out = []
        for i in range(self.rows):
            row = []
            for j in range(other.cols):
                acc = ring.zero
                for k in range(self.cols):
                    a = self.entries[i][k]
                    if not ring.is_zero(a):
                        acc = ring.add(acc, ring.mul(a, other.entries[k][j]))
                row.append(acc)
            out.append(tuple(row))
        return Matrix(ring, self.rows, other.cols, tuple(out))

    def scale(self, c: Any) -> "Matrix":
        return self.map(lambda x: self.ring.mul(c, x))

    def map(self, fn: Callable[[Any], Any], ring: Optional[Ring] = None) -> "Matrix":
        return Matrix(ring or self.ring, self.rows, self.cols, tuple(
            tuple(fn(x) for x in row) for row in self.entries
        ))

    # ==================== TEXT ====================

    def format(self) -> str:
        if self.rows == 0 or self.cols == 0:
            return f"[]{self.rows}x{self.cols}"
        fmt = self.ring.format
        return "[" + ",".join("[" + ",".join(fmt(x) for x in row) + "]" for row in self.entries) + "]"

    def __str__(self) -> str:
        return self.format()


# ==================== BLOCK OPERATIONS ====================

def hstack(ring: Ring, blocks: Sequence[Matrix], rows: Optional[int] = None) -> Matrix:
    if rows is None:
        rows = blocks[0].rows if blocks else 0
    for b in blocks:
        if b.rows != rows:
            raise DomainError(f"hstack row mismatch: {b.rows} vs {rows}")
    cols = sum(b.cols for b in blocks)
    entries = tuple(
        tuple(x for b in blocks for x in b.entries[i]) for i in range(rows)
    )
    return Matrix(ring, rows, cols, entries)


def vstack(ring: Ring, blocks: Sequence[Matrix], cols: Optional[int] = None) -> Matrix:
    if cols is None:
        cols = blocks[0].cols if blocks else 0
    for b in blocks:
        if b.cols != cols:
            raise DomainError(f"vstack column mismatch: {b.cols} vs {cols}")
    entries = tuple(row for b in blocks for row in b.entries)
    return Matrix(ring, len(entries), cols, entries)


def block_diag(ring: Ring, blocks: Sequence[Matrix]) -> Matrix:
    total_cols = sum(b.cols for b in blocks)
    rows = []
    offset = 0
    for b in blocks:
        for row in b.entries:
            rows.append(
                (ring.zero,) * offset + tuple(row) + (ring.zero,) * (total_cols - offset - b.cols)
            )
        offset += b.cols
    return Matrix(ring, len(rows), total_cols, tuple(rows))


def block(ring: Ring, grid: Sequence[Sequence[Matrix]], row_sizes: Sequence[int], col_sizes: Sequence[int]) -> Matrix:
    """Assemble a block matrix; block sizes are explicit so empty blocks are allowed."""
    bands = [hstack(ring, list(band), rows=r) for band, r in zip(grid, row_sizes)]
    return vstack(ring, bands, cols=sum(col_sizes))


# ==================== NORMAL FORM ====================

@dataclass(frozen=True)
class SnfData:
    """U*A*V = D with D diagonal, U and V invertible and their determinants."""

    U: Matrix
    D: Matrix
    V: Matrix
    det_u: Any
    det_v: Any

    @property
    def diagonal(self) -> List[Any]:
        n = min(self.D.rows, self.D.cols)
        return [self.D.entries[i][i] for i in range(n)]

    @property
    def rank(self) -> int:
        ring = self.D.ring
        return sum(1 for d in self.diagonal if not ring.is_zero(d))


class _Work:
    """Mutable working copy of A with accumulated transforms."""

    def __init__(self, a: Matrix):
        ring = a.ring
        self.ring = ring
        self.m = a.rows
        self.n = a.cols
        self.a = [list(row) for row in a.entries]
        self.u = [[ring.one if i == j else ring.zero for j in range(self.m)] for i in range(self.m)]
        self.v = [[ring.one if i == j else ring.zero for j in range(self.n)] for i in range(self.n)]
        self.det_u = ring.one
        self.det_v = ring.one

    def swap_rows(self, i: int, j: int) -> None:
        if i == j:
            return
        self.a[i], self.a[j] = self.a[j], self.a[i]
        self.u[i], self.u[j] = self.u[j], self.u[i]
        self.det_u = self.ring.neg(self.det_u)

    def swap_cols(self, i: int, j: int) -> None:
        if i == j:
            return
        for row in self.a:
            row[i], row[j] = row[j], row[i]
        for row in self.v:
            row[i], row[j] = row[j], row[i]
        self.det_v = self.ring.neg(self.det_v)

    def add_row(self, target: int, source: int, c: Any) -> None:
        """row[target] += c * row[source]"""
        ring = self.ring
        for mat in (self.a, self.u):
            src = mat[source]
            dst = mat[target]
            for k in range(len(dst)):
                dst[k] = ring.add(dst[k], ring.mul(c, src[k]))

    def add_col(self, target: int, source: int, c: Any) -> None:
        """col[target] += c * col[source]"""
        ring = self.ring
        for mat in (self.a, self.v):
            for row in mat:
                row[target] = ring.add(row[target], ring.mul(c, row[source]))

    def scale_row(self, i: int, unit: Any) -> None:
        ring = self.ring
        self.a[i] = [ring.mul(unit, x) for x in self.a[i]]
        self.u[i] = [ring.mul(unit, x) for x in self.u[i]]
        self.det_u = ring.mul(self.det_u, unit)


def snf(a: Matrix, tie_break: Optional[random.Random] = None) -> SnfData:
    """Diagonalize ``a`` by invertible row and column operations.

    The pivot is a nonzero entry of minimal size; ties go to the first entry in
    row-major order unless ``tie_break`` is given. The diagonal is normalized so
    that it is a divisibility chain of canonical associates.
    """
    ring = a.ring
    w = _Work(a)
    steps = min(w.m, w.n)
    for t in range(steps):
        while True:
            pivot = _choose_pivot(w, t, tie_break)
            if pivot is None:
                break
            pi, pj = pivot
            w.swap_rows(t, pi)
            w.swap_cols(t, pj)
            p = w.a[t][t]
            clean = True
            for i in range(t + 1, w.m):
                x = w.a[i][t]
                if ring.is_zero(x):
                    continue
                q, r = ring.quo_rem(x, p)
                w.add_row(i, t, ring.neg(q))
                if not ring.is_zero(r):
                    clean = False
            for j in range(t + 1, w.n):
                x = w.a[t][j]
                if ring.is_zero(x):
                    continue
                q, r = ring.quo_rem(x, p)
                w.add_col(j, t, ring.neg(q))
                if not ring.is_zero(r):
                    clean = False
            if not clean:
                continue
            offender = _find_non_multiple(w, t)
            if offender is None:
                break
            w.add_row(t, offender, ring.one)
        if pivot is None:
            break
    for i in range(steps):
        d = w.a[i][i]
        if ring.is_zero(d):
            continue
        unit, _ = ring.normal_part(d)
        w.scale_row(i, ring.inverse(unit))
    data = SnfData(
        U=Matrix.from_rows(ring, w.u, w.m),
        D=Matrix.from_rows(ring, w.a, w.n),
        V=Matrix.from_rows(ring, w.v, w.n),
        det_u=w.det_u,
        det_v=w.det_v,
    )
    logger.debug("snf %dx%d over %s: diagonal %s", w.m, w.n, ring.name,
                 [ring.format(d) for d in data.diagonal])
    return data


def _choose_pivot(w: _Work, t: int, tie_break: Optional[random.Random]) -> Optional[Tuple[int, int]]:
    ring = w.ring
    best = None
    candidates: List[Tuple[int, int]] = []
    for i in range(t, w.m):
        for j in range(t, w.n):
            s = ring.size(w.a[i][j])
            if s is None:
                continue
            if best is None or s < best:
                best = s
                candidates = [(i, j)]
            elif s == best:
                candidates.append((i, j))
    if not candidates:
        return None
    if tie_break is None:
        return candidates[0]
    return tie_break.choice(candidates)


def _find_non_multiple(w: _Work, t: int) -> Optional[int]:
    ring = w.ring
    p = w.a[t][t]
    for i in range(t + 1, w.m):
        for j in range(t + 1, w.n):
            if not ring.divides(p, w.a[i][j]):
                return i
    return None


# ==================== DERIVED OPERATIONS ====================

def det(a: Matrix) -> Any:
    """Determinant of a square matrix; the 0x0 determinant is 1."""
    if not a.is_square():
        raise DomainError(f"determinant of non-square {a.rows}x{a.cols} matrix")
    ring = a.ring
    if a.rows == 0:
        return ring.one
    data = snf(a)
    value = ring.one
    for d in data.diagonal:
        value = ring.mul(value, d)
    if ring.is_zero(value):
        return value
    return ring.mul(value, ring.mul(ring.inverse(data.det_u), ring.inverse(data.det_v)))


def is_invertible(a: Matrix) -> bool:
    return a.is_square() and a.ring.is_unit(det(a))


def solve(a: Matrix, b: Matrix) -> Optional[Matrix]:
    """Some X with A*X = B, or None when no solution exists."""
    if a.rows != b.rows:
        raise DomainError(f"solve: {a.rows} equations but right-hand side has {b.rows} rows")
    ring = a.ring
    data = snf(a)
    c = data.U @ b
    diag = data.diagonal
    y_rows = []
    for i in range(a.cols):
        if i < len(diag) and not ring.is_zero(diag[i]):
            row = []
            for x in c.entries[i]:
                if not ring.divides(diag[i], x):
                    return None
                row.append(ring.exact_div(x, diag[i]))
            y_rows.append(tuple(row))
        else:
            y_rows.append(tuple(ring.zero for _ in range(b.cols)))
    for i in range(a.rows):
        if i >= a.cols or ring.is_zero(diag[i]):
            if any(not ring.is_zero(x) for x in c.entries[i]):
                return None
    y = Matrix(ring, a.cols, b.cols, tuple(y_rows))
    return data.V @ y


def kernel(a: Matrix) -> Matrix:
    """Generators of {x : A*x = 0} as columns."""
    ring = a.ring
    data = snf(a)
    diag = data.diagonal
    gens = []
    for j in range(a.cols):
        col = data.V.column(j)
        if j >= len(diag) or ring.is_zero(diag[j]):
            gens.append(col)
            continue
        ann = ring.annihilator(diag[j])
        if not ring.is_zero(ann):
            gens.append([ring.mul(ann, x) for x in col])
    return Matrix(ring, a.cols, len(gens), tuple(
        tuple(g[i] for g in gens) for i in range(a.cols)
    ))


def inverse(a: Matrix) -> Matrix:
    if not a.is_square():
        raise NotInvertibleError(f"non-square {a.rows}x{a.cols} matrix has no inverse")
    if not a.ring.is_unit(det(a)):
        raise NotInvertibleError(f"matrix {a.format()} is not invertible over {a.ring.name}")
    x = solve(a, Matrix.identity(a.ring, a.rows))
    if x is None:
        raise NotInvertibleError(f"matrix {a.format()} is not invertible over {a.ring.name}")
    return x


def rank_over_field(a: Matrix) -> int:
    if not a.ring.is_field:
        raise DomainError(f"rank is only defined here over fields, not {a.ring.name}")
    return snf(a).rank
