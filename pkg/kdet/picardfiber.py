"""
Relative K_0 through the fiber of base change on graded lines.

For every supported pair R -> S the rank map on K_0 is an isomorphism, so the
relative group is S^x / im(R^x) and classes are kept in a unique normal form:
a sparse prime-exponent vector with the sign and the primes invertible in R
removed.
"""

from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple

from sympy import factorint

from kdet.complexes import Complex
from kdet.detfunctor import det_obj
from kdet.errors import DomainError, NotAUnitError, NotInvertibleError, UnsupportedPairError
from kdet.linalg import Matrix, det
from kdet.rings import (
    FactoredRational,
    Integers,
    IntegersInverted,
    Rationals,
    Ring,
    UnitGroup,
    extension_map,
    ring_unit_sample,
)

logger = logging.getLogger(__name__)


# ==================== PAIRS ====================

@dataclass(frozen=True)
class RelPair:
    """A flat ring map R -> S with S regular."""

    source: Ring
    target: Ring

    def __post_init__(self):
        s, t = self.source, self.target
        if s == t:
            if not s.is_regular:
                raise UnsupportedPairError(f"identity pair needs a regular ring, {s.name} is not")
            return
        if isinstance(s, Integers) and isinstance(t, (Rationals, IntegersInverted)):
            return
        if isinstance(s, IntegersInverted) and isinstance(t, Rationals):
            return
        raise UnsupportedPairError(f"unsupported ring pair {s.name}:{t.name}")

    @property
    def name(self) -> str:
        return f"{self.source.name}:{self.target.name}"

    @property
    def is_identity(self) -> bool:
        return self.source == self.target

    @property
    def killed_primes(self) -> Tuple[int, ...]:
        """Primes that are units of R, hence trivial in the relative group."""
        if isinstance(self.source, IntegersInverted):
            return self.source.primes
        return ()

    @property
    def vector_primes(self) -> Optional[Tuple[int, ...]]:
        """Index set of the exponent vector for (Z, Z[1/m]); None for rational targets."""
        if isinstance(self.target, IntegersInverted) and not self.is_identity:
            return self.target.primes
        return None

    def in_source_units(self, alpha: Any) -> bool:
        """Whether a unit of S lies in the image of R^x."""
        if self.is_identity:
            return self.target.is_unit(alpha)
        if isinstance(self.source, Integers):
            return alpha in (Fraction(1), Fraction(-1))
        return self.source.unit_inverse(alpha) is not None

    def base_change(self):
        return extension_map(self.source, self.target)


# ==================== CLASSES ====================

@dataclass(frozen=True)
class RelK0Class:
    pair: RelPair
    exponents: Tuple[Tuple[int, int], ...] = ()

    @classmethod
    def trivial(cls, pair: RelPair) -> "RelK0Class":
        return cls(pair, ())

    def is_trivial(self) -> bool:
        return not self.exponents

    def __mul__(self, other: "RelK0Class") -> "RelK0Class":
        if self.pair != other.pair:
            raise DomainError(f"classes of {self.pair.name} and {other.pair.name} do not combine")
        product = FactoredRational(1, self.exponents) * FactoredRational(1, other.exponents)
        return RelK0Class(self.pair, product.exponents)

    def inverse(self) -> "RelK0Class":
        return RelK0Class(self.pair, tuple((p, -e) for p, e in self.exponents))

    def vector(self) -> Tuple[int, ...]:
        primes = self.pair.vector_primes or ()
        exps = dict(self.exponents)
        return tuple(exps.get(p, 0) for p in primes)

    def to_fraction(self) -> Fraction:
        return FactoredRational(1, self.exponents).to_fraction()

    def render(self) -> str:
        if self.pair.vector_primes is not None:
            return "(" + ", ".join(str(e) for e in self.vector()) + ")"
        return str(self.to_fraction())


def normal_form(pair: RelPair, delta: Any) -> RelK0Class:
    """Class of a unit of S modulo the image of R^x."""
    target = pair.target
    if not target.is_unit(delta):
        raise NotAUnitError(f"{target.format(delta)} is not a unit of {target.name}")
    if pair.is_identity:
        return RelK0Class.trivial(pair)
    reduced = FactoredRational.from_fraction(Fraction(delta)).without(pair.killed_primes)
    return RelK0Class(pair, reduced.exponents)


# ==================== FIBER OBJECTS ====================

@dataclass(frozen=True)
class FiberObj:
    """A graded line X over R with a unit structure delta on its base change."""

    pair: RelPair
    degree: int
    delta: Any

    def tensor(self, other: "FiberObj") -> "FiberObj":
        if self.pair != other.pair:
            raise DomainError("fiber objects over different pairs")
        return FiberObj(self.pair, self.degree + other.degree, self.pair.target.mul(self.delta, other.delta))


def class_of(obj: FiberObj) -> RelK0Class:
    if obj.degree != 0:
        raise DomainError(f"only degree-0 lines carry unit structures, got degree {obj.degree}")
    return normal_form(obj.pair, obj.delta)


def boundary(alpha: Any, pair: RelPair) -> RelK0Class:
    """The connecting map from S^x to the relative group."""
    return class_of(FiberObj(pair, 0, alpha))


def fiber_map(obj: FiberObj, kappa: Any) -> FiberObj:
    """Rescale the unit structure by a unit kappa of S."""
    target = obj.pair.target
    if not target.is_unit(kappa):
        raise NotAUnitError(f"{target.format(kappa)} is not a unit of {target.name}")
    return FiberObj(obj.pair, obj.degree, target.mul(obj.delta, kappa))


@dataclass(frozen=True)
class SwanGenerator:
    """(P, a, Q) with P = R^rank_p, Q = R^rank_q and a: P_S -> Q_S."""

    rank_p: int
    rank_q: int
    a: Matrix


def swan_eta(g: SwanGenerator, pair: RelPair) -> RelK0Class:
    if g.rank_p != g.rank_q or g.a.shape != (g.rank_q, g.rank_p):
        raise NotInvertibleError(
            f"generator map is {g.a.rows}x{g.a.cols} between ranks {g.rank_p} and {g.rank_q}"
        )
    value = det(g.a)
    if not pair.target.is_unit(value):
        raise NotInvertibleError(f"generator map {g.a.format()} is not invertible over {pair.target.name}")
    return normal_form(pair, value)


# ==================== QUOTIENTS ====================

@dataclass(frozen=True)
class QuotientReport:
    ring: Ring
    group_order: int
    group_invariants: Tuple[int, ...]
    relations: Tuple[Any, ...]
    subgroup_order: int
    quotient_order: int
    quotient_invariants: Tuple[int, ...]
    collapsed_pairs: Tuple[Tuple[Any, Any], ...]
    injective: bool


def _generated_subgroup(ring: Ring, gens: Sequence[Any]) -> frozenset:
    seen = {ring.one}
    queue = deque([ring.one])
    while queue:
        x = queue.popleft()
        for g in gens:
            y = ring.mul(x, g)
            if y not in seen:
                seen.add(y)
                queue.append(y)
    return frozenset(seen)


def invariant_factors(order: int, torsion_count) -> Tuple[int, ...]:
    """Invariant factors of a finite abelian group.

    ``torsion_count(n)`` must return the number of elements killed by n.
    """
    partitions: Dict[int, List[int]] = {}
    for p, e in factorint(order).items():
        p, e = int(p), int(e)
        previous = 1
        sizes = []
        for j in range(1, e + 1):
            current = torsion_count(p ** j)
            step = 0
            ratio = current // previous
            while ratio > 1:
                ratio //= p
                step += 1
            sizes.append(step)
            previous = current
        # sizes[j-1] = number of cyclic factors of order >= p^j
        parts = []
        for j, count in enumerate(sizes, start=1):
            nxt = sizes[j] if j < len(sizes) else 0
            parts.extend([j] * (count - nxt))
        partitions[p] = sorted(parts, reverse=True)
    length = max((len(v) for v in partitions.values()), default=0)
    factors = []
    for k in range(length):
        d = 1
        for p, parts in partitions.items():
            if k < len(parts):
                d *= p ** parts[k]
        factors.append(d)
    return tuple(sorted(factors))


def quotient_units(group: UnitGroup, relations: Sequence[Any]) -> QuotientReport:
    """Quotient of a finite unit group by the subgroup generated by relation ratios."""
    ring = group.ring
    elements = group.elements
    if not elements:
        raise DomainError(f"unit group of {ring.name} is not finite")
    for r in relations:
        if r not in elements:
            raise NotAUnitError(f"relation {ring.format(r)} is not in the unit group of {ring.name}")
    order = len(elements)
    sub = _generated_subgroup(ring, list(relations))
    quotient_order = order // len(sub)

    def group_count(n: int) -> int:
        return sum(1 for x in elements if ring.power(x, n) == ring.one)

    def quotient_count(n: int) -> int:
        killed = sum(1 for x in elements if ring.power(x, n) in sub)
        return killed // len(sub)

    collapsed = tuple(
        sorted({(ring.one, r) for r in relations if r != ring.one}, key=lambda pr: ring.format(pr[1]))
    )
    report = QuotientReport(
        ring=ring,
        group_order=order,
        group_invariants=invariant_factors(order, group_count),
        relations=tuple(relations),
        subgroup_order=len(sub),
        quotient_order=quotient_order,
        quotient_invariants=invariant_factors(quotient_order, quotient_count) if quotient_order > 1 else (),
        collapsed_pairs=collapsed,
        injective=len(sub) == 1,
    )
    logger.info("quotient of %s^x by %d relations has order %d", ring.name, len(relations), quotient_order)
    return report


# ==================== EXACT SEQUENCE ====================

@dataclass(frozen=True)
class ExactSequenceCheck:
    pair: RelPair
    fiber_pi1: Tuple[Any, ...]
    boundary_kills_image: bool
    boundary_kernel_is_image: bool
    classes_have_degree_zero: bool
    checked: int

    @property
    def passed(self) -> bool:
        return self.boundary_kills_image and self.boundary_kernel_is_image and self.classes_have_degree_zero


def check_exact_sequence(pair: RelPair, bound: int = 30) -> ExactSequenceCheck:
    """Check 0 -> pi1(F) -> R^x -> S^x -> K0(R,S) -> K0(R) on units of small height."""
    source, target = pair.source, pair.target
    phi = pair.base_change()
    source_units = ring_unit_sample(source, bound)
    target_units = ring_unit_sample(target, bound)

    fiber_pi1 = tuple(u for u in source_units if phi(u) == target.one)
    kills_image = all(boundary(phi(u), pair).is_trivial() for u in source_units)
    kernel_is_image = all(
        boundary(alpha, pair).is_trivial() == pair.in_source_units(alpha) for alpha in target_units
    )
    degree_zero = True
    for k, alpha in enumerate(target_units):
        # R^r -0-> R^r in degrees 0, 1 carries a unit structure alpha on its base change
        carrier = Complex.build(source, {0: k % 3 + 1, 1: k % 3 + 1})
        obj = FiberObj(pair, det_obj(carrier).degree, alpha)
        degree_zero = degree_zero and obj.degree == 0 and class_of(obj) == boundary(alpha, pair)
    logger.debug("exact sequence check for %s over %d units", pair.name, len(target_units))
    return ExactSequenceCheck(
        pair=pair,
        fiber_pi1=fiber_pi1,
        boundary_kills_image=kills_image,
        boundary_kernel_is_image=kernel_is_image,
        classes_have_degree_zero=degree_zero,
        checked=len(target_units),
    )
