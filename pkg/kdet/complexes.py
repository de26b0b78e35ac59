"""
Bounded cochain complexes of finite free modules, chain maps and homotopies.

Convention: d has degree +1, C[k]^n = C^(n+k) with differential (-1)^k d, and
cone(a)^n = A^(n+1) + B^n with differential [[-d_A, 0], [a, d_B]].
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from kdet.errors import (
    DomainError,
    InvalidChainMapError,
    InvalidComplexError,
    InvalidSesError,
)
from kdet.linalg import Matrix, block, inverse, is_invertible, kernel, snf, solve
from kdet.rings import Ring, extension_map

logger = logging.getLogger(__name__)


# ==================== COMPLEXES ====================

@dataclass(frozen=True)
class Complex:
    """Free modules R^(ranks[k]) in degrees lo + k with differentials between them.

    ``diffs[k]`` is d^(lo+k): C^(lo+k) -> C^(lo+k+1). Outside the stored range
    every module is zero. Use :meth:`build` to construct from degree maps.
    """

    ring: Ring
    lo: int
    ranks: Tuple[int, ...]
    diffs: Tuple[Matrix, ...]

    @classmethod
    def build(cls, ring: Ring, ranks: Dict[int, int], diffs: Optional[Dict[int, Matrix]] = None) -> "Complex":
        diffs = diffs or {}
        nonzero = sorted(i for i, r in ranks.items() if r > 0)
        if not nonzero:
            return cls(ring, 0, (), ())
        lo, hi = nonzero[0], nonzero[-1]
        rank_of = lambda i: ranks.get(i, 0)
        for i, m in diffs.items():
            if m.shape != (rank_of(i + 1), rank_of(i)):
                raise InvalidComplexError(
                    f"d^{i} has shape {m.rows}x{m.cols}, expected {rank_of(i + 1)}x{rank_of(i)}",
                    degree=i,
                )
        cx = cls(
            ring,
            lo,
            tuple(rank_of(i) for i in range(lo, hi + 1)),
            tuple(diffs.get(i, Matrix.zeros(ring, rank_of(i + 1), rank_of(i))) for i in range(lo, hi)),
        )
        cx.validate()
        return cx

    @classmethod
    def zero(cls, ring: Ring) -> "Complex":
        return cls(ring, 0, (), ())

    @classmethod
    def concentrated(cls, ring: Ring, degree: int, rank: int = 1) -> "Complex":
        return cls.build(ring, {degree: rank})

    @classmethod
    def two_term(cls, ring: Ring, lo: int, d: Matrix) -> "Complex":
        """The complex R^cols -> R^rows in degrees lo, lo+1."""
        return cls.build(ring, {lo: d.cols, lo + 1: d.rows}, {lo: d})

    @property
    def hi(self) -> int:
        return self.lo + len(self.ranks) - 1

    @property
    def degrees(self) -> range:
        return range(self.lo, self.hi + 1)

    def is_zero_complex(self) -> bool:
        return not self.ranks

    def rank(self, i: int) -> int:
        if self.lo <= i <= self.hi:
            return self.ranks[i - self.lo]
        return 0

    def d(self, i: int) -> Matrix:
        if self.lo <= i < self.hi:
            return self.diffs[i - self.lo]
        return Matrix.zeros(self.ring, self.rank(i + 1), self.rank(i))

    def validate(self) -> None:
        for i in self.degrees:
            composite = self.d(i + 1) @ self.d(i)
            if not composite.is_zero():
                raise InvalidComplexError(f"d^{i + 1} * d^{i} is not zero", degree=i)

    @property
    def euler_characteristic(self) -> int:
        return sum((-1) ** (i % 2) * self.rank(i) for i in self.degrees)

    def shift(self, k: int) -> "Complex":
        """C[k]: degree n holds C^(n+k), differential (-1)^k d."""
        if self.is_zero_complex():
            return self
        sign = -1 if k % 2 else 1
        diffs = tuple(m.scale(self.ring.from_int(sign)) for m in self.diffs)
        return Complex(self.ring, self.lo - k, self.ranks, diffs)

    def base_change(self, target: Ring) -> "Complex":
        phi = extension_map(self.ring, target)
        return Complex(target, self.lo, self.ranks, tuple(m.map(phi, target) for m in self.diffs))

    def identity(self) -> "ChainMap":
        return ChainMap.identity(self)


def union_degrees(*complexes: Complex) -> range:
    nonempty = [c for c in complexes if not c.is_zero_complex()]
    if not nonempty:
        return range(0)
    return range(min(c.lo for c in nonempty), max(c.hi for c in nonempty) + 1)


# ==================== CHAIN MAPS ====================

@dataclass(frozen=True)
class ChainMap:
    """Degreewise matrices f^i: A^i -> B^i; missing degrees are zero."""

    source: Complex
    target: Complex
    comps: Dict[int, Matrix] = field(default_factory=dict, hash=False)

    def component(self, i: int) -> Matrix:
        if i in self.comps:
            return self.comps[i]
        return Matrix.zeros(self.source.ring, self.target.rank(i), self.source.rank(i))

    @property
    def degrees(self) -> range:
        return union_degrees(self.source, self.target)

    @classmethod
    def identity(cls, c: Complex) -> "ChainMap":
        return cls(c, c, {i: Matrix.identity(c.ring, c.rank(i)) for i in c.degrees})

    @classmethod
    def zero(cls, source: Complex, target: Complex) -> "ChainMap":
        return cls(source, target, {})

    @classmethod
    def build(cls, source: Complex, target: Complex, comps: Dict[int, Matrix]) -> "ChainMap":
        for i, m in comps.items():
            if m.shape != (target.rank(i), source.rank(i)):
                raise InvalidChainMapError(
                    f"component at {i} has shape {m.rows}x{m.cols}, "
                    f"expected {target.rank(i)}x{source.rank(i)}"
                )
        f = cls(source, target, dict(comps))
        f.validate()
        return f

    def validate(self) -> None:
        for i in self.degrees:
            lhs = self.target.d(i) @ self.component(i)
            rhs = self.component(i + 1) @ self.source.d(i)
            if lhs != rhs:
                raise InvalidChainMapError(f"map does not commute with differentials at degree {i}")

    def compose(self, first: "ChainMap") -> "ChainMap":
        """self after first."""
        if first.target != self.source:
            raise InvalidChainMapError("composition of chain maps with mismatched complexes")
        degrees = union_degrees(first.source, self.target)
        return ChainMap(first.source, self.target, {
            i: self.component(i) @ first.component(i) for i in degrees
        })

    def _pointwise(self, other: "ChainMap", op) -> "ChainMap":
        if self.source != other.source or self.target != other.target:
            raise InvalidChainMapError("chain maps have different source or target")
        return ChainMap(self.source, self.target, {
            i: op(self.component(i), other.component(i)) for i in self.degrees
        })

    def __add__(self, other: "ChainMap") -> "ChainMap":
        return self._pointwise(other, lambda a, b: a + b)

    def __sub__(self, other: "ChainMap") -> "ChainMap":
        return self._pointwise(other, lambda a, b: a - b)

    def __neg__(self) -> "ChainMap":
        return ChainMap(self.source, self.target, {i: -m for i, m in self.comps.items()})

    def shift(self, k: int) -> "ChainMap":
        return ChainMap(self.source.shift(k), self.target.shift(k), {
            i - k: m for i, m in self.comps.items()
        })

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ChainMap):
            return NotImplemented
        if self.source != other.source or self.target != other.target:
            return False
        return all(self.component(i) == other.component(i) for i in self.degrees)

    def __hash__(self) -> int:
        return hash((self.source, self.target))

    def is_degreewise_iso(self) -> bool:
        return all(
            self.source.rank(i) == self.target.rank(i) and is_invertible(self.component(i))
            for i in self.degrees
        )

    def inverse(self) -> "ChainMap":
        """Inverse of a degreewise isomorphism."""
        return ChainMap(self.target, self.source, {
            i: inverse(self.component(i)) for i in self.degrees
        })


@dataclass(frozen=True)
class Homotopy:
    """Degree -1 maps h^i: A^i -> B^(i-1)."""

    source: Complex
    target: Complex
    comps: Dict[int, Matrix] = field(default_factory=dict, hash=False)

    def component(self, i: int) -> Matrix:
        if i in self.comps:
            return self.comps[i]
        return Matrix.zeros(self.source.ring, self.target.rank(i - 1), self.source.rank(i))

    def boundary(self) -> ChainMap:
        """The null-homotopic map d h + h d."""
        degrees = union_degrees(self.source, self.target)
        return ChainMap(self.source, self.target, {
            i: self.target.d(i - 1) @ self.component(i) + self.component(i + 1) @ self.source.d(i)
            for i in degrees
        })

    def verify(self, f: ChainMap, g: ChainMap) -> bool:
        """True when f - g = d h + h d."""
        return (f - g) == self.boundary()

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Homotopy):
            return NotImplemented
        degrees = union_degrees(self.source, self.target)
        return all(self.component(i) == other.component(i) for i in range(degrees.start, degrees.stop + 1))

    def __hash__(self) -> int:
        return hash((self.source, self.target))


# ==================== CONSTRUCTIONS ====================

@dataclass(frozen=True)
class Cone:
    """cone(a) together with its canonical maps B -> cone(a) -> A[1]."""

    map: ChainMap
    complex: Complex
    inclusion: ChainMap
    projection: ChainMap


def cone(a: ChainMap) -> Cone:
    src, tgt = a.source, a.target
    ring = src.ring
    window = union_degrees(src.shift(1), tgt)
    ranks = {n: src.rank(n + 1) + tgt.rank(n) for n in window}
    diffs = {}
    for n in window:
        if n + 1 not in window:
            continue
        diffs[n] = block(
            ring,
            [[-src.d(n + 1), Matrix.zeros(ring, src.rank(n + 2), tgt.rank(n))],
             [a.component(n + 1), tgt.d(n)]],
            [src.rank(n + 2), tgt.rank(n + 1)],
            [src.rank(n + 1), tgt.rank(n)],
        )
    cx = Complex.build(ring, ranks, diffs)
    incl = {}
    proj = {}
    for n in window:
        incl[n] = block(
            ring,
            [[Matrix.zeros(ring, src.rank(n + 1), tgt.rank(n))], [Matrix.identity(ring, tgt.rank(n))]],
            [src.rank(n + 1), tgt.rank(n)],
            [tgt.rank(n)],
        )
        proj[n] = block(
            ring,
            [[Matrix.identity(ring, src.rank(n + 1)), Matrix.zeros(ring, src.rank(n + 1), tgt.rank(n))]],
            [src.rank(n + 1)],
            [src.rank(n + 1), tgt.rank(n)],
        )
    return Cone(a, cx, ChainMap(tgt, cx, incl), ChainMap(cx, src.shift(1), proj))


def direct_sum(a: Complex, b: Complex) -> "ShortExactSequence":
    """A + B with its split short exact sequence A -> A + B -> B."""
    ring = a.ring
    window = union_degrees(a, b)
    ranks = {n: a.rank(n) + b.rank(n) for n in window}
    diffs = {
        n: block(
            ring,
            [[a.d(n), Matrix.zeros(ring, a.rank(n + 1), b.rank(n))],
             [Matrix.zeros(ring, b.rank(n + 1), a.rank(n)), b.d(n)]],
            [a.rank(n + 1), b.rank(n + 1)],
            [a.rank(n), b.rank(n)],
        )
        for n in window
    }
    total = Complex.build(ring, ranks, diffs)
    incl, proj, split = {}, {}, {}
    for n in window:
        incl[n] = block(ring, [[Matrix.identity(ring, a.rank(n))], [Matrix.zeros(ring, b.rank(n), a.rank(n))]],
                        [a.rank(n), b.rank(n)], [a.rank(n)])
        proj[n] = block(ring, [[Matrix.zeros(ring, b.rank(n), a.rank(n)), Matrix.identity(ring, b.rank(n))]],
                        [b.rank(n)], [a.rank(n), b.rank(n)])
        split[n] = block(ring, [[Matrix.zeros(ring, a.rank(n), b.rank(n))], [Matrix.identity(ring, b.rank(n))]],
                         [a.rank(n), b.rank(n)], [b.rank(n)])
    return ShortExactSequence(ChainMap(a, total, incl), ChainMap(total, b, proj), split)


# ==================== SHORT EXACT SEQUENCES ====================

@dataclass(frozen=True)
class ShortExactSequence:
    """0 -> A -i-> B -p-> C -> 0, degreewise split by sigma^n: C^n -> B^n."""

    i: ChainMap
    p: ChainMap
    splitting: Dict[int, Matrix] = field(default_factory=dict, hash=False)

    @property
    def sub(self) -> Complex:
        return self.i.source

    @property
    def middle(self) -> Complex:
        return self.i.target

    @property
    def quotient(self) -> Complex:
        return self.p.target

    @classmethod
    def build(cls, i: ChainMap, p: ChainMap, splitting: Optional[Dict[int, Matrix]] = None) -> "ShortExactSequence":
        """Validate the maps; when no splitting is given one is solved for."""
        if i.target != p.source:
            raise InvalidSesError("i and p do not share the middle complex")
        try:
            i.validate()
            p.validate()
        except InvalidChainMapError as exc:
            raise InvalidSesError(str(exc)) from exc
        ring = i.source.ring
        splitting = dict(splitting or {})
        for n in union_degrees(i.source, i.target, p.target):
            if n in splitting:
                continue
            sigma = solve(p.component(n), Matrix.identity(ring, p.target.rank(n)))
            if sigma is None:
                raise InvalidSesError(f"p is not surjective in degree {n}")
            splitting[n] = sigma
        ses = cls(i, p, splitting)
        ses.validate()
        return ses

    def section(self, n: int) -> Matrix:
        if n in self.splitting:
            return self.splitting[n]
        return Matrix.zeros(self.sub.ring, self.middle.rank(n), self.quotient.rank(n))

    def validate(self) -> None:
        ring = self.sub.ring
        for n in union_degrees(self.sub, self.middle, self.quotient):
            i_n, p_n, s_n = self.i.component(n), self.p.component(n), self.section(n)
            if not (p_n @ i_n).is_zero():
                raise InvalidSesError(f"p * i is not zero in degree {n}")
            if p_n @ s_n != Matrix.identity(ring, self.quotient.rank(n)):
                raise InvalidSesError(f"splitting is not a section of p in degree {n}")
            basis = self.basis_matrix(n)
            if not is_invertible(basis):
                raise InvalidSesError(f"[i | sigma] is not invertible in degree {n}")

    def basis_matrix(self, n: int) -> Matrix:
        """The square matrix [i^n | sigma^n] of B^n."""
        return block(
            self.sub.ring,
            [[self.i.component(n), self.section(n)]],
            [self.middle.rank(n)],
            [self.sub.rank(n), self.quotient.rank(n)],
        )

    def connecting_map(self) -> ChainMap:
        """w: C -> A[1], the negative of theta with i theta = d_B sigma - sigma d_C."""
        a, b, c = self.sub, self.middle, self.quotient
        comps = {}
        for n in union_degrees(a.shift(1), c):
            rhs = b.d(n) @ self.section(n) - self.section(n + 1) @ c.d(n)
            theta = solve(self.i.component(n + 1), rhs)
            if theta is None:
                raise InvalidSesError(f"connecting map is undefined in degree {n}")
            comps[n] = -theta
        return ChainMap(c, a.shift(1), comps)


def cone_sequence(a: ChainMap) -> ShortExactSequence:
    """0 -> B -> cone(a) -> A[1] -> 0 with the canonical splitting."""
    cn = cone(a)
    ring = a.source.ring
    split = {}
    for n in union_degrees(cn.complex):
        split[n] = block(
            ring,
            [[Matrix.identity(ring, a.source.rank(n + 1))],
             [Matrix.zeros(ring, a.target.rank(n), a.source.rank(n + 1))]],
            [a.source.rank(n + 1), a.target.rank(n)],
            [a.source.rank(n + 1)],
        )
    return ShortExactSequence(cn.inclusion, cn.projection, split)


def stupid_truncation(c: Complex, n: int) -> Complex:
    """sigma>=n C: the modules of C in degrees >= n with the same differentials."""
    keep = [i for i in c.degrees if i >= n]
    return Complex.build(c.ring, {i: c.rank(i) for i in keep}, {i: c.d(i) for i in keep})


def stupid_filtration_sequence(c: Complex, n: int) -> ShortExactSequence:
    """0 -> sigma>=n+1 C -> sigma>=n C -> C^n[-n] -> 0, split by the identity in degree n."""
    ring = c.ring
    sub, middle = stupid_truncation(c, n + 1), stupid_truncation(c, n)
    top = Complex.concentrated(ring, n, c.rank(n))
    incl = ChainMap(sub, middle, {i: Matrix.identity(ring, c.rank(i)) for i in sub.degrees})
    proj = ChainMap(middle, top, {i: Matrix.identity(ring, c.rank(i)) for i in top.degrees})
    return ShortExactSequence.build(incl, proj, dict(proj.comps))


# ==================== COHOMOLOGY ====================

@dataclass(frozen=True)
class CohomologyGroup:
    """H^i as R^free + sum R/(t) with generators as columns in C^i coordinates."""

    ring: Ring
    degree: int
    free_rank: int
    torsion: Tuple
    generators: Matrix

    def is_zero(self) -> bool:
        return self.free_rank == 0 and not self.torsion

    def describe(self) -> str:
        parts = []
        name = self.ring.name
        if self.free_rank == 1:
            parts.append(name)
        elif self.free_rank > 1:
            parts.append(f"{name}^{self.free_rank}")
        parts.extend(f"{name}/({self.ring.format(t)})" for t in self.torsion)
        return " + ".join(parts) if parts else "0"


def cohomology(c: Complex, i: int) -> CohomologyGroup:
    ring = c.ring
    k = kernel(c.d(i))
    if k.cols == 0:
        return CohomologyGroup(ring, i, 0, (), k)
    m = solve(k, c.d(i - 1))
    if m is None:
        raise InvalidComplexError(f"image of d^{i - 1} is not contained in the cycles", degree=i)
    rel = kernel(k)
    relations = block(ring, [[m, rel]], [k.cols], [m.cols, rel.cols])
    data = snf(relations)
    diag = data.diagonal
    basis = k @ inverse(data.U)
    torsion, torsion_cols, free_cols = [], [], []
    for j in range(k.cols):
        d = diag[j] if j < len(diag) else ring.zero
        if ring.is_zero(d):
            free_cols.append(j)
        elif not ring.is_unit(d):
            torsion.append(d)
            torsion_cols.append(j)
    gens = basis.submatrix(range(basis.rows), torsion_cols + free_cols)
    return CohomologyGroup(ring, i, len(free_cols), tuple(torsion), gens)


def cohomology_all(c: Complex) -> List[CohomologyGroup]:
    return [cohomology(c, i) for i in c.degrees]


def is_acyclic(c: Complex) -> bool:
    for i in c.degrees:
        k = kernel(c.d(i))
        if k.cols and solve(c.d(i - 1), k) is None:
            logger.debug("cohomology survives in degree %d", i)
            return False
    return True


def is_qis(f: ChainMap) -> bool:
    return is_acyclic(cone(f).complex)


def cohomology_complex(c: Complex) -> Tuple[Complex, ChainMap]:
    """Over a field: H(C) with zero differential and the inclusion of chosen cycles."""
    if not c.ring.is_field:
        raise DomainError(f"cohomology inclusion needs a field, not {c.ring.name}")
    groups = {i: cohomology(c, i) for i in c.degrees}
    h = Complex.build(c.ring, {i: g.free_rank for i, g in groups.items()})
    incl = {i: g.generators for i, g in groups.items() if g.free_rank}
    return h, ChainMap(h, c, incl)


# ==================== LINEAR SEARCH ====================

class LinearSystem:
    """Equations sum_k P_k X_k Q_k = E in unknown matrix blocks X_k.

    All equations are flattened row-major into a single matrix equation and
    solved exactly, since homotopy components in adjacent degrees are coupled.
    """

    def __init__(self, ring: Ring):
        self.ring = ring
        self.shapes: Dict[object, Tuple[int, int]] = {}
        self.offsets: Dict[object, int] = {}
        self.size = 0
        self.equations: List[Tuple[List[Tuple[Matrix, object, Matrix]], Matrix]] = []

    def unknown(self, key: object, rows: int, cols: int) -> object:
        self.shapes[key] = (rows, cols)
        self.offsets[key] = self.size
        self.size += rows * cols
        return key

    def equation(self, terms: Sequence[Tuple[Matrix, object, Matrix]], rhs: Matrix) -> None:
        kept = [(p, key, q) for p, key, q in terms if key in self.shapes]
        self.equations.append((kept, rhs))

    def solve(self) -> Optional[Dict[object, Matrix]]:
        ring = self.ring
        n_rows = sum(rhs.rows * rhs.cols for _, rhs in self.equations)
        coeff = [[ring.zero] * self.size for _ in range(n_rows)]
        values = []
        base = 0
        for terms, rhs in self.equations:
            a, b = rhs.rows, rhs.cols
            for p, key, q in terms:
                rows, cols = self.shapes[key]
                offset = self.offsets[key]
                for r in range(a):
                    for s in range(b):
                        line = coeff[base + r * b + s]
                        for i in range(rows):
                            pri = p.entries[r][i]
                            if ring.is_zero(pri):
                                continue
                            for j in range(cols):
                                qjs = q.entries[j][s]
                                if ring.is_zero(qjs):
                                    continue
                                idx = offset + i * cols + j
                                line[idx] = ring.add(line[idx], ring.mul(pri, qjs))
            values.extend(x for row in rhs.entries for x in row)
            base += a * b
        system = Matrix(ring, n_rows, self.size, tuple(tuple(row) for row in coeff))
        target = Matrix(ring, n_rows, 1, tuple((x,) for x in values))
        x = solve(system, target)
        if x is None:
            return None
        result = {}
        for key, (rows, cols) in self.shapes.items():
            offset = self.offsets[key]
            result[key] = Matrix(ring, rows, cols, tuple(
                tuple(x.entries[offset + i * cols + j][0] for j in range(cols)) for i in range(rows)
            ))
        return result


def _identity(c: Complex, i: int) -> Matrix:
    return Matrix.identity(c.ring, c.rank(i))


def _homotopy_window(a: Complex, b: Complex) -> range:
    window = union_degrees(a, b)
    return range(window.start, window.stop + 1)


def find_null_homotopy(f: ChainMap) -> Optional[Homotopy]:
    """Some h with f = d h + h d, or None when f is not null-homotopic."""
    a, b = f.source, f.target
    system = LinearSystem(a.ring)
    for i in _homotopy_window(a, b):
        system.unknown(("h", i), b.rank(i - 1), a.rank(i))
    for i in union_degrees(a, b):
        system.equation(
            [(b.d(i - 1), ("h", i), _identity(a, i)), (_identity(b, i), ("h", i + 1), a.d(i))],
            f.component(i),
        )
    solution = system.solve()
    if solution is None:
        return None
    return Homotopy(a, b, {key[1]: m for key, m in solution.items()})


def homotopy_between(f: ChainMap, g: ChainMap) -> Optional[Homotopy]:
    """Some h with f - g = d h + h d."""
    return find_null_homotopy(f - g)


@dataclass(frozen=True)
class HomotopyEquivalence:
    forward: ChainMap
    backward: ChainMap
    source_homotopy: Homotopy
    target_homotopy: Homotopy


def is_homotopy_equivalence(f: ChainMap) -> Optional[HomotopyEquivalence]:
    """Search for g with g f ~ id and f g ~ id; the system is linear in (g, h1, h2)."""
    a, b = f.source, f.target
    ring = a.ring
    neg = ring.from_int(-1)
    system = LinearSystem(ring)
    window = union_degrees(a, b)
    for i in window:
        system.unknown(("g", i), a.rank(i), b.rank(i))
    for i in _homotopy_window(a, b):
        system.unknown(("h1", i), a.rank(i - 1), a.rank(i))
        system.unknown(("h2", i), b.rank(i - 1), b.rank(i))
    for i in window:
        system.equation(
            [(a.d(i), ("g", i), _identity(b, i)), (_identity(a, i + 1).scale(neg), ("g", i + 1), b.d(i))],
            Matrix.zeros(ring, a.rank(i + 1), b.rank(i)),
        )
        system.equation(
            [(_identity(a, i), ("g", i), f.component(i)),
             (a.d(i - 1).scale(neg), ("h1", i), _identity(a, i)),
             (_identity(a, i).scale(neg), ("h1", i + 1), a.d(i))],
            _identity(a, i),
        )
        system.equation(
            [(f.component(i), ("g", i), _identity(b, i)),
             (b.d(i - 1).scale(neg), ("h2", i), _identity(b, i)),
             (_identity(b, i).scale(neg), ("h2", i + 1), b.d(i))],
            _identity(b, i),
        )
    solution = system.solve()
    if solution is None:
        return None
    pick = lambda tag: {key[1]: m for key, m in solution.items() if key[0] == tag}
    return HomotopyEquivalence(
        f, ChainMap(b, a, pick("g")), Homotopy(a, a, pick("h1")), Homotopy(b, b, pick("h2"))
    )


def lift_through_qis(s: ChainMap, b: ChainMap) -> Optional[Tuple[ChainMap, Homotopy]]:
    """For s: X -> Y and b: P -> Y find a: P -> X and h with s a - b = d h + h d."""
    x, y, p = s.source, s.target, b.source
    if b.target != y:
        raise InvalidChainMapError("lift target does not match the quasi-isomorphism target")
    ring = x.ring
    neg = ring.from_int(-1)
    system = LinearSystem(ring)
    window = union_degrees(x, y, p)
    for i in window:
        system.unknown(("a", i), x.rank(i), p.rank(i))
    for i in range(window.start, window.stop + 1):
        system.unknown(("h", i), y.rank(i - 1), p.rank(i))
    for i in window:
        system.equation(
            [(x.d(i), ("a", i), _identity(p, i)), (_identity(x, i + 1).scale(neg), ("a", i + 1), p.d(i))],
            Matrix.zeros(ring, x.rank(i + 1), p.rank(i)),
        )
        system.equation(
            [(s.component(i), ("a", i), _identity(p, i)),
             (y.d(i - 1).scale(neg), ("h", i), _identity(p, i)),
             (_identity(y, i).scale(neg), ("h", i + 1), p.d(i))],
            b.component(i),
        )
    solution = system.solve()
    if solution is None:
        return None
    lift = ChainMap(p, x, {key[1]: m for key, m in solution.items() if key[0] == "a"})
    homotopy = Homotopy(p, y, {key[1]: m for key, m in solution.items() if key[0] == "h"})
    return lift, homotopy


def resolve_presentation(ring: Ring, presentation: Matrix) -> Complex:
    """A two-term free resolution R^r -> R^n of coker(presentation), in degrees -1, 0."""
    if not ring.is_regular:
        raise DomainError(f"{ring.name} has modules of infinite projective dimension")
    data = snf(presentation)
    image = (presentation @ data.V).columns(0, data.rank)
    return Complex.build(ring, {-1: image.cols, 0: presentation.rows}, {-1: image})
