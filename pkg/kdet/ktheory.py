"""
Relations from isomorphisms of triangles, the dual-number collapse certificate
and Euler characteristics.
"""

from __future__ import annotations

import itertools
import logging
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Any, Dict, Iterator, List, Optional, Tuple

from sympy import isprime

from kdet import conventions
from kdet.complexes import (
    ChainMap,
    Complex,
    Homotopy,
    ShortExactSequence,
    cone_sequence,
    direct_sum,
    find_null_homotopy,
    is_homotopy_equivalence,
    is_qis,
    union_degrees,
)
from kdet.config import get_settings
from kdet.detfunctor import (
    CohomologyBases,
    default_cohomology_bases,
    degreewise_det,
    det_qis,
    det_ses,
    euler_iso,
    parity_betti,
)
from kdet.errors import (
    DomainError,
    HomotopyMismatchError,
    NotInvertibleError,
    NotQuasiIsomorphismError,
    RingError,
    SearchTooLargeError,
)
from kdet.linalg import Matrix, block_diag, det, inverse, kernel
from kdet.picardfiber import FiberObj, QuotientReport, RelK0Class, RelPair, class_of, quotient_units
from kdet.rings import DualNumbers, Ring, enumerate_units, expected_unit_count, ring_unit_sample

logger = logging.getLogger(__name__)


# ==================== SCENARIOS ====================

@dataclass(frozen=True)
class TriangleIsoScenario:
    """Maps a, b, c between two short exact sequences, commuting up to homotopy.

    h1, h2, h3 witness the squares b i1 ~ i2 a, c p1 ~ p2 b and
    a[1] w1 ~ w2 c; a missing witness means the square commutes strictly.
    """

    delta1: ShortExactSequence
    delta2: ShortExactSequence
    a: ChainMap
    b: ChainMap
    c: ChainMap
    h1: Optional[Homotopy] = None
    h2: Optional[Homotopy] = None
    h3: Optional[Homotopy] = None

    def squares(self) -> List[Tuple[str, ChainMap, ChainMap]]:
        d1, d2 = self.delta1, self.delta2
        return [
            ("first", self.b.compose(d1.i), d2.i.compose(self.a)),
            ("second", self.c.compose(d1.p), d2.p.compose(self.b)),
            ("third", self.a.shift(1).compose(d1.connecting_map()), d2.connecting_map().compose(self.c)),
        ]

    def verify(self) -> None:
        for name, f in (("a", self.a), ("b", self.b), ("c", self.c)):
            f.validate()
            if not is_qis(f):
                raise NotQuasiIsomorphismError(f"slot {name} is not a quasi-isomorphism")
        witnesses = (self.h1, self.h2, self.h3)
        for (name, lhs, rhs), h in zip(self.squares(), witnesses):
            if h is None:
                if lhs != rhs:
                    raise HomotopyMismatchError(f"{name} square does not commute")
            elif not h.verify(lhs, rhs):
                raise HomotopyMismatchError(f"{name} square is not witnessed by the given homotopy")


def find_witnesses(delta1: ShortExactSequence, delta2: ShortExactSequence,
                   a: ChainMap, b: ChainMap, c: ChainMap) -> TriangleIsoScenario:
    """Solve for homotopies of the three squares; strict squares get no witness."""
    draft = TriangleIsoScenario(delta1, delta2, a, b, c)
    found = []
    for name, lhs, rhs in draft.squares():
        if lhs == rhs:
            found.append(None)
            continue
        h = find_null_homotopy(lhs - rhs)
        if h is None:
            raise HomotopyMismatchError(f"{name} square does not commute up to homotopy")
        found.append(h)
    return TriangleIsoScenario(delta1, delta2, a, b, c, *found)


@dataclass(frozen=True)
class HarvestedRelation:
    ring: Ring
    ratio: Any
    provenance: str

    def format(self) -> str:
        return self.ring.format(self.ratio)


def harvest(scn: TriangleIsoScenario) -> HarvestedRelation:
    """The unit comparing the two composites attached to an isomorphism of triangles."""
    scn.verify()
    ring = scn.a.source.ring
    num = ring.mul(ring.mul(det_qis(scn.a).unit, det_qis(scn.c).unit), det_ses(scn.delta1))
    den = ring.mul(det_ses(scn.delta2), det_qis(scn.b).unit)
    ratio = ring.mul(num, ring.inverse(den))
    return HarvestedRelation(ring, ratio, "scenario")


def express_power(ring: Ring, value: Any, generator: Any, order: int) -> Optional[int]:
    """Smallest |k| (negative first) with generator^k = value."""
    for k in range(1, order + 1):
        for exp in (-k, k):
            if ring.power(generator, exp) == value:
                return exp
    if value == ring.one:
        return 0
    return None


# ==================== ENUMERATION ====================

def general_linear(ring: Ring, n: int) -> List[Matrix]:
    """All invertible n x n matrices over a finite ring, in lexicographic order."""
    elements = list(ring.elements())
    found = []
    for values in itertools.product(elements, repeat=n * n):
        m = Matrix.from_rows(ring, [values[r * n:(r + 1) * n] for r in range(n)], n)
        if ring.is_unit(det(m)):
            found.append(m)
    return found


def all_matrices(ring: Ring, rows: int, cols: int) -> Iterator[Matrix]:
    elements = list(ring.elements())
    for values in itertools.product(elements, repeat=rows * cols):
        yield Matrix.from_rows(ring, [values[r * cols:(r + 1) * cols] for r in range(rows)], cols)


def _null_homotopic(f: ChainMap) -> bool:
    if all(f.component(i).is_zero() for i in f.degrees):
        return True
    return find_null_homotopy(f) is not None


def _cone_automorphisms(ring: Ring, cx: Complex) -> List[ChainMap]:
    per_degree = [general_linear(ring, cx.rank(n)) for n in cx.degrees]
    autos = []
    for choice in itertools.product(*per_degree):
        f = ChainMap(cx, cx, dict(zip(cx.degrees, choice)))
        try:
            f.validate()
        except DomainError:
            continue
        autos.append(f)
    return autos


@dataclass(frozen=True)
class _Family:
    ring: Ring
    rank_a: int
    deg_a: int
    rank_b: int
    deg_b: int

    def estimate(self) -> int:
        q = sum(1 for _ in self.ring.elements())
        maps = q ** (self.rank_a * self.rank_b) if self.deg_a == self.deg_b else 1
        gl = lambda n: q ** (n * n)
        cone_ranks = {}
        for deg, r in ((self.deg_a - 1, self.rank_a), (self.deg_b, self.rank_b)):
            cone_ranks[deg] = cone_ranks.get(deg, 0) + r
        cone_count = 1
        for r in cone_ranks.values():
            cone_count *= gl(r)
        return maps * gl(self.rank_a) * gl(self.rank_b) * cone_count


def _families(ring: Ring, max_rank: int, lo: int, hi: int) -> List[_Family]:
    families = []
    for deg_a, deg_b in itertools.product(range(lo, hi + 1), repeat=2):
        for rank_a in range(1, max_rank):
            for rank_b in range(1, max_rank - rank_a + 1):
                families.append(_Family(ring, rank_a, deg_a, rank_b, deg_b))
    return families


def _family_relations(family: _Family) -> Tuple[int, List[HarvestedRelation]]:
    """Harvest every cone-triangle automorphism scenario of one family.

    All slot maps are degreewise automorphisms, so their determinants are the
    alternating products of degreewise determinants.
    """
    ring = family.ring
    a_cx = Complex.concentrated(ring, family.deg_a, family.rank_a)
    b_cx = Complex.concentrated(ring, family.deg_b, family.rank_b)
    if family.deg_a == family.deg_b:
        maps = [ChainMap(a_cx, b_cx, {family.deg_a: m})
                for m in all_matrices(ring, family.rank_b, family.rank_a)]
    else:
        maps = [ChainMap.zero(a_cx, b_cx)]
    auto_b = [ChainMap(b_cx, b_cx, {family.deg_b: g}) for g in general_linear(ring, family.rank_b)]
    auto_a = [ChainMap(a_cx, a_cx, {family.deg_a: g}) for g in general_linear(ring, family.rank_a)]
    auto_shifted = [g.shift(1) for g in auto_a]
    det_b = [degreewise_det(g) for g in auto_b]
    det_c = [degreewise_det(g) for g in auto_shifted]

    count = 0
    relations = []
    for f in maps:
        ses = cone_sequence(f)
        w = ses.connecting_map()
        autos = _cone_automorphisms(ring, ses.middle)
        det_mid = [degreewise_det(g) for g in autos]
        first: Dict[Tuple[int, int], bool] = {}
        second: Dict[Tuple[int, int], bool] = {}
        for ia, a in enumerate(auto_b):
            for ic, c in enumerate(auto_shifted):
                third = a.shift(1).compose(w) - w.compose(c)
                if not _null_homotopic(third):
                    count += len(autos)
                    continue
                for ib, b in enumerate(autos):
                    count += 1
                    if (ia, ib) not in first:
                        first[(ia, ib)] = _null_homotopic(b.compose(ses.i) - ses.i.compose(a))
                    if not first[(ia, ib)]:
                        continue
                    if (ib, ic) not in second:
                        second[(ib, ic)] = _null_homotopic(c.compose(ses.p) - ses.p.compose(b))
                    if not second[(ib, ic)]:
                        continue
                    ratio = ring.mul(ring.mul(det_b[ia], det_c[ic]), ring.inverse(det_mid[ib]))
                    if ratio != ring.one:
                        relations.append(HarvestedRelation(ring, ratio, _provenance(family, f, a, b, c)))
    return count, relations


def _provenance(family: _Family, f: ChainMap, a: ChainMap, b: ChainMap, c: ChainMap) -> str:
    comps = lambda g: ";".join(g.component(n).format() for n in g.degrees)
    return (
        f"A=R^{family.rank_a}@{family.deg_a} B=R^{family.rank_b}@{family.deg_b} "
        f"f={comps(f) or '0'} a={comps(a)} b={comps(b)} c={comps(c)}"
    )


def enumerate_relations(ring: Ring, max_rank: int, degrees: Tuple[int, int],
                        workers: Optional[int] = None,
                        max_scenarios: Optional[int] = None) -> List[HarvestedRelation]:
    """Nontrivial ratios from cone triangles of two nonzero single-module complexes.

    One relation is kept per distinct ratio, the one with the smallest provenance.
    """
    if not ring.is_finite:
        raise RingError(f"enumeration needs a finite ring, not {ring.name}")
    settings = get_settings()
    workers = workers or settings.enumerate_workers
    max_scenarios = max_scenarios or settings.max_scenarios
    lo, hi = degrees
    families = _families(ring, max_rank, lo, hi)
    estimate = sum(fam.estimate() for fam in families)
    if estimate > max_scenarios:
        raise SearchTooLargeError(
            f"search over {ring.name} with rank <= {max_rank} would visit up to {estimate} scenarios"
        )
    if workers > 1 and len(families) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_family_relations, families))
    else:
        results = [_family_relations(fam) for fam in families]
    total = sum(n for n, _ in results)
    best: Dict[Any, HarvestedRelation] = {}
    for _, rels in results:
        for rel in rels:
            kept = best.get(rel.ratio)
            if kept is None or rel.provenance < kept.provenance:
                best[rel.ratio] = rel
    logger.info("enumerated %d scenarios over %s, %d distinct ratios", total, ring.name, len(best))
    return sorted(best.values(), key=lambda rel: (rel.format(), rel.provenance))


# ==================== RANDOM SCENARIOS ====================

def random_matrix(ring: Ring, rows: int, cols: int, rng: random.Random) -> Matrix:
    """Entries drawn from the images of -2..2."""
    return Matrix.from_rows(ring, [
        [ring.from_int(rng.randint(-2, 2)) for _ in range(cols)] for _ in range(rows)
    ], cols)


def random_invertible(ring: Ring, n: int, rng: random.Random) -> Matrix:
    """A random unit diagonal followed by random elementary column operations."""
    units = ring_unit_sample(ring, 1)
    m = Matrix.diagonal(ring, [rng.choice(units) for _ in range(n)])
    for _ in range(2 * n):
        i, j = rng.randrange(n), rng.randrange(n)
        if i == j:
            continue
        rows = [[ring.one if r == s else ring.zero for s in range(n)] for r in range(n)]
        rows[i][j] = ring.from_int(rng.randint(-2, 2))
        m = m @ Matrix.from_rows(ring, rows, n)
    return m


def random_complex(ring: Ring, rng: random.Random, max_rank: int = 2,
                   degrees: Tuple[int, int] = (0, 1)) -> Complex:
    """A nonzero complex with d^n = ker(d^(n+1)) * X, built from the top degree down."""
    lo, hi = degrees
    while True:
        ranks = {n: rng.randint(0, max_rank) for n in range(lo, hi + 1)}
        if any(ranks.values()):
            break
    diffs = {}
    for n in range(hi - 1, lo - 1, -1):
        above = diffs.get(n + 1, Matrix.zeros(ring, ranks.get(n + 2, 0), ranks[n + 1]))
        k = kernel(above)
        diffs[n] = k @ random_matrix(ring, k.cols, ranks[n], rng)
    return Complex.build(ring, ranks, diffs)


def random_homotopy(source: Complex, target: Complex, rng: random.Random) -> Homotopy:
    ring = source.ring
    window = union_degrees(source, target)
    return Homotopy(source, target, {
        i: random_matrix(ring, target.rank(i - 1), source.rank(i), rng)
        for i in range(window.start, window.stop + 1)
    })


def transport(c: Complex, rng: random.Random) -> ChainMap:
    """A chain isomorphism C -> C' given by random invertible matrices in each degree."""
    ring = c.ring
    g = {n: random_invertible(ring, c.rank(n), rng) for n in c.degrees}
    diffs = {n: g[n + 1] @ c.d(n) @ inverse(g[n]) for n in c.degrees if n + 1 in g}
    moved = Complex.build(ring, {n: c.rank(n) for n in c.degrees}, diffs)
    return ChainMap(c, moved, g)


def random_scenario(ring: Ring, rng: random.Random, max_rank: int = 2) -> TriangleIsoScenario:
    """Cone triangles of f: A -> B and of v f u^-1, compared by (v, diag(u, v), u[1]).

    Every slot is then moved by a random null-homotopic map, so the squares only
    commute up to homotopy and the witnesses have to be solved for.
    """
    a_cx = random_complex(ring, rng, max_rank)
    b_cx = a_cx if rng.random() < 0.5 else random_complex(ring, rng, max_rank)
    f = random_homotopy(a_cx, b_cx, rng).boundary()
    if b_cx == a_cx:
        f = f + ChainMap(a_cx, a_cx, {
            n: Matrix.identity(ring, a_cx.rank(n)).scale(ring.from_int(rng.randint(-2, 2)))
            for n in a_cx.degrees
        })
    u, v = transport(a_cx, rng), transport(b_cx, rng)
    moved = v.compose(f).compose(u.inverse())
    delta1, delta2 = cone_sequence(f), cone_sequence(moved)
    b = ChainMap(delta1.middle, delta2.middle, {
        n: block_diag(ring, [u.component(n + 1), v.component(n)]) for n in delta1.middle.degrees
    })
    a = v + random_homotopy(v.source, v.target, rng).boundary()
    b = b + random_homotopy(b.source, b.target, rng).boundary()
    c = u.shift(1)
    c = c + random_homotopy(c.source, c.target, rng).boundary()
    return find_witnesses(delta1, delta2, a, b, c)


def sample_relations(ring: Ring, count: int, rng: random.Random,
                     max_rank: int = 2) -> List[HarvestedRelation]:
    """Harvest ``count`` random scenarios; every ratio is expected to be 1."""
    relations = []
    for k in range(count):
        relation = harvest(random_scenario(ring, rng, max_rank))
        relations.append(HarvestedRelation(ring, relation.ratio, f"random scenario {k}"))
        logger.debug("random scenario %d over %s: ratio %s", k, ring.name, relation.format())
    nontrivial = sum(1 for rel in relations if rel.ratio != ring.one)
    logger.info("sampled %d scenarios over %s, %d nontrivial ratios", count, ring.name, nontrivial)
    return relations


# ==================== COLLAPSE CERTIFICATE ====================

def collapse_scenario(ring: DualNumbers) -> TriangleIsoScenario:
    """0 -> B -> cone(e) -> A[1] -> 0 with (1+e)^-1 on B and identities elsewhere."""
    a_cx = Complex.concentrated(ring, 0)
    b_cx = Complex.concentrated(ring, 0)
    f = ChainMap(a_cx, b_cx, {0: Matrix.from_rows(ring, [[ring.epsilon]])})
    ses = cone_sequence(f)
    generator = (1, 1)
    a = ChainMap(b_cx, b_cx, {0: Matrix.from_rows(ring, [[ring.inverse(generator)]])})
    b = ChainMap.identity(ses.middle)
    c = ChainMap.identity(ses.quotient)
    return find_witnesses(ses, ses, a, b, c)


@dataclass(frozen=True)
class CollapseCertificate:
    prime: int
    ring: DualNumbers
    unit_group_order: int
    generator: Any
    generator_order: int
    scenario: TriangleIsoScenario
    relation: HarvestedRelation
    ratio_exponent: int
    quotient: QuotientReport
    acyclic_cone_iff_iso: bool

    @property
    def generator_is_nontrivial(self) -> bool:
        return self.generator != self.ring.one

    @property
    def non_injective(self) -> bool:
        return not self.quotient.injective

    @property
    def k1_not_isomorphic(self) -> bool:
        return self.quotient.quotient_order < self.unit_group_order

    @property
    def homotopy(self) -> Matrix:
        h = self.scenario.h1
        if h is None:
            return Matrix.zeros(self.ring, 0, 0)
        return h.component(0)

    def ratio_text(self) -> str:
        return f"({self.ring.format(self.generator)})^{self.ratio_exponent}"

    def verify(self) -> bool:
        """Re-check every witness from scratch."""
        ring = self.ring
        try:
            self.scenario.verify()
        except DomainError as exc:
            logger.info("certificate witness failed: %s", exc)
            return False
        units = enumerate_units(ring)
        checks = [
            len(units.elements) == self.unit_group_order == expected_unit_count(ring),
            units.element_order(self.generator) == self.generator_order == self.prime,
            harvest(self.scenario).ratio == self.relation.ratio,
            ring.power(self.generator, self.ratio_exponent) == self.relation.ratio,
            self.quotient.quotient_order * self.quotient.subgroup_order == self.unit_group_order,
            self.acyclic_cone_iff_iso == _cone_acyclic_and_invertible(ring, self.generator),
        ]
        return all(checks)


def _cone_acyclic_and_invertible(ring: Ring, unit: Any) -> bool:
    cx = Complex.concentrated(ring, 0)
    f = ChainMap(cx, cx, {0: Matrix.from_rows(ring, [[unit]])})
    return is_qis(f) and is_homotopy_equivalence(f) is not None


def collapse_certificate(p: int) -> CollapseCertificate:
    if not isprime(p):
        raise RingError(f"collapse certificate needs a prime, got {p}")
    ring = DualNumbers(p)
    units = enumerate_units(ring)
    generator = (1, 1)
    scenario = collapse_scenario(ring)
    relation = harvest(scenario)
    relation = HarvestedRelation(
        ring, relation.ratio,
        "cone triangle of e with (1+e)^-1 on B; 1+e on B gives the inverse ratio and the same subgroup",
    )
    order = units.element_order(generator)
    exponent = express_power(ring, relation.ratio, generator, order)
    cert = CollapseCertificate(
        prime=p,
        ring=ring,
        unit_group_order=len(units.elements),
        generator=generator,
        generator_order=order,
        scenario=scenario,
        relation=relation,
        ratio_exponent=exponent,
        quotient=quotient_units(units, [relation.ratio]),
        acyclic_cone_iff_iso=_cone_acyclic_and_invertible(ring, generator),
    )
    logger.info("collapse certificate for p=%d: quotient order %d", p, cert.quotient.quotient_order)
    return cert


# ==================== EULER CHARACTERISTICS ====================

def chi_k0(c: Complex) -> int:
    return c.euler_characteristic


@dataclass(frozen=True)
class ChiRelResult:
    pair: RelPair
    h: int
    delta: Any
    split_route: Any
    truncation_route: Any
    rel_class: RelK0Class


def chi_rel(c: Complex, pair: RelPair, t: Optional[Matrix] = None,
            bases: Optional[CohomologyBases] = None,
            rng: Optional[random.Random] = None) -> ChiRelResult:
    """Relative Euler characteristic of C with the trivialization t: H^ev -> H^od over S.

    ``rng`` only reorders pivots in the eliminations; the class does not depend on it.
    """
    target = pair.target
    if not target.is_field:
        raise DomainError(f"relative Euler characteristic needs a field target, not {target.name}")
    if c.euler_characteristic != 0:
        raise DomainError(f"Euler characteristic is {c.euler_characteristic}, must be 0")
    cs = c.base_change(target)
    bases = bases or default_cohomology_bases(cs)
    betti = bases.betti()
    h_ev, h_od = parity_betti(betti)
    if h_ev != h_od:
        raise DomainError(f"even cohomology has dimension {h_ev}, odd has {h_od}")
    h = h_ev
    if t is None:
        t = Matrix.zeros(target, 0, 0)
    if t.shape != (h, h):
        raise DomainError(f"trivialization must be {h}x{h}, got {t.rows}x{t.cols}")
    det_t = det(t)
    if not target.is_unit(det_t):
        raise NotInvertibleError(f"trivialization {t.format()} is singular")
    split, truncated = euler_iso(cs, bases, rng)
    if split != truncated:
        raise DomainError(
            f"Euler isomorphism routes disagree: {target.format(split)} vs {target.format(truncated)}"
        )
    delta = split
    delta = target.mul(delta, target.from_int(conventions.parity_split_sign(betti)))
    delta = target.mul(delta, det_t)
    delta = target.mul(delta, target.from_int(conventions.canonical_unit_sign(h)))
    rel_class = class_of(FiberObj(pair, c.euler_characteristic, delta))
    return ChiRelResult(pair, h, delta, split, truncated, rel_class)


@dataclass(frozen=True)
class AdditivityReport:
    left: RelK0Class
    right: RelK0Class

    @property
    def holds(self) -> bool:
        return self.left == self.right


def chi_rel_additivity_check(c1: Complex, c2: Complex, pair: RelPair,
                             t1: Optional[Matrix] = None,
                             t2: Optional[Matrix] = None) -> AdditivityReport:
    """chi_rel(C1 + C2, t1 + t2) against chi_rel(C1, t1) * chi_rel(C2, t2)."""
    target = pair.target
    t1 = t1 if t1 is not None else Matrix.zeros(target, 0, 0)
    t2 = t2 if t2 is not None else Matrix.zeros(target, 0, 0)
    first = chi_rel(c1, pair, t1)
    second = chi_rel(c2, pair, t2)
    total = direct_sum(c1, c2).middle
    b1 = default_cohomology_bases(c1.base_change(target))
    b2 = default_cohomology_bases(c2.base_change(target))
    joined = {}
    for i in total.degrees:
        h1 = b1.bases.get(i, Matrix.zeros(target, c1.rank(i), 0))
        h2 = b2.bases.get(i, Matrix.zeros(target, c2.rank(i), 0))
        joined[i] = block_diag(target, [h1, h2])
    combined = chi_rel(total, pair, block_diag(target, [t1, t2]), CohomologyBases(joined))
    return AdditivityReport(combined.rel_class, first.rel_class * second.rel_class)

