"""
The determinant functor with values in graded lines.

Lines are trivialized by the standard bases of the free modules, so an object
is just its degree and a morphism is a unit of the ring.
"""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass
from typing import Any, Dict, Optional, Tuple

from kdet import conventions
from kdet.complexes import (
    ChainMap,
    Complex,
    ShortExactSequence,
    cohomology_complex,
    cone,
    is_acyclic,
    stupid_filtration_sequence,
)
from kdet.errors import DomainError, NotAcyclicError, NotQuasiIsomorphismError
from kdet.linalg import Matrix, block, det, inverse, kernel, rank_over_field, snf, solve
from kdet.rings import Ring

logger = logging.getLogger(__name__)


# ==================== GRADED LINES ====================

@dataclass(frozen=True)
class GradedLineObj:
    degree: int

    def tensor(self, other: "GradedLineObj") -> "GradedLineObj":
        return GradedLineObj(self.degree + other.degree)

    def inverse(self) -> "GradedLineObj":
        return GradedLineObj(-self.degree)


@dataclass(frozen=True)
class GLMor:
    """An automorphism of the line of the given degree, multiplication by ``unit``."""

    ring: Ring
    degree: int
    unit: Any

    def compose(self, other: "GLMor") -> "GLMor":
        if self.degree != other.degree:
            raise DomainError(f"cannot compose morphisms of degrees {self.degree} and {other.degree}")
        return GLMor(self.ring, self.degree, self.ring.mul(self.unit, other.unit))

    def tensor(self, other: "GLMor") -> "GLMor":
        return GLMor(self.ring, self.degree + other.degree, self.ring.mul(self.unit, other.unit))

    def inverse(self) -> "GLMor":
        return GLMor(self.ring, self.degree, self.ring.inverse(self.unit))

    @classmethod
    def symmetry(cls, ring: Ring, m: int, n: int) -> "GLMor":
        return cls(ring, m + n, ring.from_int(conventions.koszul_sign(m, n)))

    def format(self) -> str:
        return self.ring.format(self.unit)


def det_obj(c: Complex) -> GradedLineObj:
    return GradedLineObj(c.euler_characteristic)


# ==================== TORSION ====================

def _complement(z: Matrix, rng: Optional[random.Random]) -> Optional[Matrix]:
    """Columns l with [z | l] invertible, or None when span(z) is not a free summand."""
    ring = z.ring
    n, k = z.rows, z.cols
    if k == 0:
        return Matrix.identity(ring, n)
    data = snf(z, rng)
    if data.rank != k or any(not ring.is_unit(d) for d in data.diagonal):
        return None
    return inverse(data.U).columns(k, n)


def torsion_acyclic(c: Complex, rng: Optional[random.Random] = None) -> Any:
    """Torsion of an acyclic complex from compatible splittings C^i = Z^i + L^i.

    Degreewise, z^i = d l^(i-1) spans the cycles and l^i is any complement; the
    value is prod det[z^i | l^i]^((-1)^(i+1)) and does not depend on the choices.
    """
    ring = c.ring
    if not is_acyclic(c):
        raise NotAcyclicError("complex is not acyclic")
    value = ring.one
    z = Matrix.zeros(ring, c.rank(c.lo), 0)
    for i in c.degrees:
        l = _complement(z, rng)
        if l is None:
            raise NotAcyclicError(f"cycles in degree {i} are not a free direct summand")
        basis = block(ring, [[z, l]], [c.rank(i)], [z.cols, l.cols])
        factor = det(basis)
        if (i + 1) % 2 == 0:
            value = ring.mul(value, factor)
        else:
            value = ring.mul(value, ring.inverse(factor))
        z = c.d(i) @ l
    if conventions.TORSION_ORIENTATION == -1:
        value = ring.inverse(value)
    return value


def det_qis(a: ChainMap, rng: Optional[random.Random] = None) -> GLMor:
    """Determinant of a quasi-isomorphism through the torsion of its cone."""
    ring = a.source.ring
    cn = cone(a).complex
    if not is_acyclic(cn):
        raise NotQuasiIsomorphismError("chain map is not a quasi-isomorphism")
    tau = torsion_acyclic(cn, rng)
    sign = ring.from_int(conventions.neighbour_rank_sign(a.source))
    unit = ring.mul(sign, ring.inverse(tau))
    return GLMor(ring, a.source.euler_characteristic, unit)


def degreewise_det(a: ChainMap) -> Any:
    """prod det(a^i)^((-1)^i) for a degreewise isomorphism."""
    ring = a.source.ring
    value = ring.one
    for i in a.degrees:
        d = det(a.component(i))
        value = ring.mul(value, d if i % 2 == 0 else ring.inverse(d))
    return value


def det_ses(ses: ShortExactSequence) -> Any:
    """Scalar of det B -> det A (x) det C in the standard trivializations."""
    ses.validate()
    ring = ses.sub.ring
    value = ring.from_int(conventions.SES_LEDGER_SIGN)
    for n in ses.middle.degrees:
        d = det(ses.basis_matrix(n))
        value = ring.mul(value, d if n % 2 == 0 else ring.inverse(d))
    return value


# ==================== EULER ISOMORPHISM ====================

@dataclass(frozen=True)
class CohomologyBases:
    """Chosen bases of H^i(C) over a field, as cycles in C^i."""

    bases: Dict[int, Matrix]

    def betti(self) -> Dict[int, int]:
        return {i: m.cols for i, m in self.bases.items()}


def default_cohomology_bases(c: Complex) -> CohomologyBases:
    if not c.ring.is_field:
        raise DomainError(f"cohomology bases are only chosen over fields, not {c.ring.name}")
    _, incl = cohomology_complex(c)
    return CohomologyBases({i: incl.component(i) for i in c.degrees})


def _bases_or_default(c: Complex, bases: Optional[CohomologyBases]) -> CohomologyBases:
    if bases is not None:
        return bases
    return default_cohomology_bases(c)


def _basis_of(c: Complex, bases: CohomologyBases, i: int) -> Matrix:
    return bases.bases.get(i, Matrix.zeros(c.ring, c.rank(i), 0))


def euler_iso_split(c: Complex, bases: Optional[CohomologyBases] = None,
                    rng: Optional[random.Random] = None) -> Any:
    """C^i = B^i + H^i + L^i with B^i = d L^(i-1); prod det[b | h | l]^((-1)^(i+1))."""
    ring = c.ring
    if not ring.is_field:
        raise DomainError(f"euler_iso needs a field, not {ring.name}")
    bases = _bases_or_default(c, bases)
    value = ring.one
    b = Matrix.zeros(ring, c.rank(c.lo), 0)
    for i in c.degrees:
        h = _basis_of(c, bases, i)
        zh = block(ring, [[b, h]], [c.rank(i)], [b.cols, h.cols])
        l = _complement(zh, rng)
        if l is None:
            raise DomainError(f"cohomology basis in degree {i} is not independent of the boundaries")
        full = block(ring, [[zh, l]], [c.rank(i)], [zh.cols, l.cols])
        factor = det(full)
        if ring.is_zero(factor):
            raise DomainError(f"cohomology basis in degree {i} does not complete to a basis")
        value = ring.mul(value, factor if (i + 1) % 2 == 0 else ring.inverse(factor))
        b = c.d(i) @ l
    return value


def _cycle_basis(c: Complex, bases: CohomologyBases, n: int) -> Matrix:
    """[b | h] spanning Z^n, with b a basis of the boundaries read off the SNF of d^(n-1).

    Both neighbouring steps of the filtration must see the same b, so no tie-break here.
    """
    ring = c.ring
    h = _basis_of(c, bases, n)
    if c.rank(n) == 0:
        return h
    if not (c.d(n) @ h).is_zero():
        raise DomainError(f"cohomology basis in degree {n} is not made of cycles")
    data = snf(c.d(n - 1))
    pivots = [j for j, d in enumerate(data.diagonal) if not ring.is_zero(d)]
    b = inverse(data.U).submatrix(range(c.rank(n)), pivots)
    z = block(ring, [[b, h]], [c.rank(n)], [b.cols, h.cols])
    if rank_over_field(z) != z.cols or z.cols != kernel(c.d(n)).cols:
        raise DomainError(f"cohomology basis in degree {n} does not complete the boundaries to the cycles")
    return z


def cohomology_sequence(c: Complex, bases: CohomologyBases, n: int) -> Complex:
    """Long exact cohomology sequence of the stupid filtration step at n.

    0 -> Z^n -> C^n -> Z^(n+1) -> H^(n+1)(C) -> 0 in degrees 0..3, written in the
    cycle bases [b | h]; it is acyclic.
    """
    ring = c.ring
    here = _cycle_basis(c, bases, n)
    nxt = _cycle_basis(c, bases, n + 1)
    h_next = _basis_of(c, bases, n + 1).cols
    b_next = nxt.cols - h_next
    coords = solve(nxt, c.d(n))
    if coords is None:
        raise DomainError(f"d^{n} does not land in the cycles of degree {n + 1}")
    proj = block(
        ring,
        [[Matrix.zeros(ring, h_next, b_next), Matrix.identity(ring, h_next)]],
        [h_next],
        [b_next, h_next],
    )
    return Complex.build(
        ring,
        {0: here.cols, 1: c.rank(n), 2: nxt.cols, 3: h_next},
        {0: here, 1: coords, 2: proj},
    )


def euler_iso_truncation(c: Complex, bases: Optional[CohomologyBases] = None,
                         rng: Optional[random.Random] = None) -> Any:
    """Through the stupid filtration, from the top degree down.

    Each step 0 -> sigma>=n+1 C -> sigma>=n C -> C^n[-n] -> 0 contributes its
    det_ses, the determinant of the identity of C^n[-n] (its own cohomology) and
    the torsion of the long exact cohomology sequence, raised to (-1)^(n+1).
    """
    ring = c.ring
    if not ring.is_field:
        raise DomainError(f"euler_iso needs a field, not {ring.name}")
    bases = _bases_or_default(c, bases)
    value = ring.one
    for n in reversed(c.degrees):
        seq = stupid_filtration_sequence(c, n)
        piece = det_qis(ChainMap.identity(seq.quotient), rng)
        value = ring.mul(value, ring.mul(det_ses(seq), ring.inverse(piece.unit)))
        tau = torsion_acyclic(cohomology_sequence(c, bases, n), rng)
        if conventions.TORSION_ORIENTATION == -1:
            tau = ring.inverse(tau)
        value = ring.mul(value, tau if (n + 1) % 2 == 0 else ring.inverse(tau))
    return value


def euler_iso(c: Complex, bases: Optional[CohomologyBases] = None,
              rng: Optional[random.Random] = None) -> Tuple[Any, Any]:
    """Both routes; callers assert that they agree."""
    split = euler_iso_split(c, bases, rng)
    truncated = euler_iso_truncation(c, bases, rng)
    logger.debug("euler_iso over %s: split=%s truncation=%s", c.ring.name,
                 c.ring.format(split), c.ring.format(truncated))
    return split, truncated


def canonical_unit_structure(ring: Ring, h: int) -> Any:
    if h < 0:
        raise DomainError(f"rank must be nonnegative, got {h}")
    return ring.from_int(conventions.canonical_unit_sign(h))


def parity_betti(betti: Dict[int, int]) -> Tuple[int, int]:
    even = sum(b for i, b in betti.items() if i % 2 == 0)
    odd = sum(b for i, b in betti.items() if i % 2 != 0)
    return even, odd
