import random

import pytest

from kdet import conventions
from kdet.complexes import (
    ChainMap,
    Complex,
    ShortExactSequence,
    cohomology_complex,
    cone,
    cone_sequence,
    direct_sum,
    is_acyclic,
    stupid_filtration_sequence,
)
from kdet.detfunctor import (
    CohomologyBases,
    GLMor,
    GradedLineObj,
    canonical_unit_structure,
    cohomology_sequence,
    default_cohomology_bases,
    degreewise_det,
    det_obj,
    det_qis,
    det_ses,
    euler_iso,
    euler_iso_split,
    euler_iso_truncation,
    torsion_acyclic,
)
from kdet.errors import DomainError, InvalidSesError, NotAcyclicError, NotQuasiIsomorphismError
from kdet.ktheory import random_complex, random_homotopy, transport
from kdet.linalg import Matrix, det
from kdet.rings import DualNumbers, PrimeField, Rationals


def _random_matrix(ring, rows, cols, rng):
    elements = list(ring.elements()) if ring.is_finite else [ring.from_int(x) for x in range(-4, 5)]
    return Matrix.from_rows(ring, [[rng.choice(elements) for _ in range(cols)] for _ in range(rows)], cols)


def _random_invertible(ring, n, rng):
    while True:
        m = _random_matrix(ring, n, n, rng)
        if ring.is_unit(det(m)):
            return m


def _random_two_term(ring, rng):
    lo = rng.choice([-1, 0, 1])
    d = _random_matrix(ring, rng.randint(1, 3), rng.randint(1, 3), rng)
    return Complex.two_term(ring, lo, d)


# ==================== GRADED LINES ====================

def test_graded_line_objects(zz):
    assert det_obj(Complex.concentrated(zz, 0, 3)) == GradedLineObj(3)
    assert det_obj(Complex.build(zz, {0: 2, 1: 2})) == GradedLineObj(0)
    cx = Complex.concentrated(zz, 2, 1)
    assert det_obj(cx.shift(1)) == det_obj(cx).inverse()


def test_graded_line_morphisms(qq):
    f = GLMor(qq, 1, qq.from_int(3))
    assert f.compose(f.inverse()).unit == 1
    assert f.tensor(f).degree == 2
    assert GLMor.symmetry(qq, 1, 1).unit == -1
    assert GLMor.symmetry(qq, 2, 3).unit == 1
    with pytest.raises(DomainError):
        f.compose(GLMor(qq, 0, qq.one))


# ==================== TORSION ====================

def test_torsion_of_zero_complex(zz):
    assert torsion_acyclic(Complex.zero(zz)) == 1


def test_torsion_of_unit_differential(dual3, zz):
    u = (1, 1)
    cx = Complex.two_term(dual3, 0, Matrix.from_rows(dual3, [[u]]))
    assert torsion_acyclic(cx) == dual3.power(u, conventions.TORSION_ORIENTATION)
    assert torsion_acyclic(Complex.two_term(zz, 0, Matrix.from_ints(zz, [[1]]))) == 1


def test_torsion_flips_with_shift(qq):
    cx = Complex.two_term(qq, 0, Matrix.from_ints(qq, [[5]]))
    assert torsion_acyclic(cx) == 5
    assert torsion_acyclic(cx.shift(1)) == qq.from_int(-1) / 5


def test_torsion_needs_acyclic(zz):
    with pytest.raises(NotAcyclicError):
        torsion_acyclic(Complex.two_term(zz, 0, Matrix.from_ints(zz, [[5]])))


@pytest.mark.parametrize("ring", [PrimeField(3), DualNumbers(3), Rationals()])
def test_torsion_does_not_depend_on_complements(ring):
    rng = random.Random(11)
    for _ in range(5):
        base = _random_two_term(ring, rng)
        cx = cone(ChainMap.identity(base)).complex
        values = {torsion_acyclic(cx, random.Random(seed)) for seed in range(6)}
        assert values == {ring.from_int(conventions.neighbour_rank_sign(base))}


# ==================== DETERMINANTS OF MAPS ====================

def test_det_of_identity_is_one(rng):
    for ring in (PrimeField(5), DualNumbers(3), Rationals()):
        for _ in range(5):
            cx = _random_two_term(ring, rng)
            assert det_qis(ChainMap.identity(cx)).unit == ring.one


def test_det_of_unit_on_free_module(dual3):
    r0 = Complex.concentrated(dual3, 0)
    f = ChainMap(r0, r0, {0: Matrix.from_rows(dual3, [[(1, 1)]])})
    assert det_qis(f).unit == (1, 1)


def test_det_of_degreewise_iso_is_alternating_product(rng):
    for ring in (PrimeField(3), DualNumbers(3), DualNumbers(2)):
        for _ in range(6):
            ranks = {i: rng.randint(0, 2) for i in (-1, 0, 1)}
            cx = Complex.build(ring, ranks)
            f = ChainMap(cx, cx, {i: _random_invertible(ring, cx.rank(i), rng) for i in cx.degrees})
            assert det_qis(f).unit == degreewise_det(f)


def test_det_of_map_between_acyclic_complexes(qq):
    cx = Complex.two_term(qq, 0, Matrix.from_ints(qq, [[5]]))
    assert det_qis(ChainMap.zero(cx, Complex.zero(qq))).unit == 5


def test_det_is_multiplicative_on_automorphisms(rng):
    ring = DualNumbers(3)
    cx = Complex.build(ring, {0: 2, 1: 1})
    for _ in range(5):
        f = ChainMap(cx, cx, {0: _random_invertible(ring, 2, rng), 1: _random_invertible(ring, 1, rng)})
        g = ChainMap(cx, cx, {0: _random_invertible(ring, 2, rng), 1: _random_invertible(ring, 1, rng)})
        assert det_qis(g.compose(f)).unit == ring.mul(det_qis(g).unit, det_qis(f).unit)


def test_det_needs_quasi_isomorphism(f2):
    r0 = Complex.concentrated(f2, 0)
    with pytest.raises(NotQuasiIsomorphismError):
        det_qis(ChainMap.zero(r0, r0))


@pytest.mark.parametrize("ring", [PrimeField(2), DualNumbers(3), Rationals()])
def test_det_is_invariant_under_homotopy(ring):
    rng = random.Random(21)
    for _ in range(30):
        cx = random_complex(ring, rng, max_rank=2, degrees=(-1, 1))
        f = transport(cx, rng)
        moved = f + random_homotopy(f.source, f.target, rng).boundary()
        assert det_qis(moved).unit == det_qis(f).unit


@pytest.mark.parametrize("ring", [PrimeField(2), PrimeField(3), Rationals()])
def test_det_is_functorial_through_cohomology(ring):
    rng = random.Random(22)
    for _ in range(40):
        cx = random_complex(ring, rng, max_rank=2, degrees=(0, 2))
        h, incl = cohomology_complex(cx)
        g = transport(cx, rng)
        g = g + random_homotopy(g.source, g.target, rng).boundary()
        composite = g.compose(incl)
        assert det_qis(composite).unit == ring.mul(det_qis(g).unit, det_qis(incl).unit)
        assert det_qis(composite).degree == det_obj(h).degree


# ==================== SHORT EXACT SEQUENCES ====================

def test_det_of_canonical_direct_sum_is_one(zz):
    ses = direct_sum(Complex.two_term(zz, 0, Matrix.from_ints(zz, [[5]])), Complex.concentrated(zz, 1, 2))
    assert det_ses(ses) == 1


def test_det_ses_does_not_depend_on_splitting(f2, rng):
    for _ in range(6):
        a = _random_two_term(f2, rng)
        c = _random_two_term(f2, rng)
        ses = direct_sum(a, c)
        shifted = {}
        for n in ses.middle.degrees:
            k = _random_matrix(f2, a.rank(n), c.rank(n), rng)
            shifted[n] = ses.section(n) + ses.i.component(n) @ k
        other = ShortExactSequence(ses.i, ses.p, shifted)
        other.validate()
        assert det_ses(other) == det_ses(ses)


def test_det_ses_rejects_non_unit_inclusion(zz):
    a = Complex.concentrated(zz, 0)
    b = Complex.concentrated(zz, 0, 2)
    ses = ShortExactSequence(
        ChainMap(a, b, {0: Matrix.from_ints(zz, [[2], [0]])}),
        ChainMap(b, a, {0: Matrix.from_ints(zz, [[0, 1]])}),
        {0: Matrix.from_ints(zz, [[0], [1]])},
    )
    with pytest.raises(InvalidSesError):
        det_ses(ses)


def test_torsion_is_multiplicative_on_sequences(rng):
    ring = Rationals()
    for _ in range(5):
        a = cone(ChainMap.identity(_random_two_term(ring, rng))).complex
        c = cone(ChainMap.identity(_random_two_term(ring, rng))).complex
        ses = direct_sum(a, c)
        expected = ring.mul(ring.mul(torsion_acyclic(a), torsion_acyclic(c)), ring.inverse(det_ses(ses)))
        expected = ring.mul(expected, ring.from_int(conventions.torsion_ses_sign(a, c)))
        assert torsion_acyclic(ses.middle) == expected


@pytest.mark.parametrize("ring", [PrimeField(3), Rationals()])
def test_torsion_is_multiplicative_on_cone_sequences(ring):
    rng = random.Random(23)
    for _ in range(20):
        a = cone(ChainMap.identity(_random_two_term(ring, rng))).complex
        b = cone(ChainMap.identity(_random_two_term(ring, rng))).complex
        f = random_homotopy(a, b, rng).boundary()
        ses = cone_sequence(f)
        expected = ring.mul(torsion_acyclic(ses.sub), torsion_acyclic(ses.quotient))
        expected = ring.mul(expected, ring.inverse(det_ses(ses)))
        expected = ring.mul(expected, ring.from_int(conventions.torsion_ses_sign(ses.sub, ses.quotient)))
        assert torsion_acyclic(ses.middle) == expected


def test_stupid_filtration_sequences_are_canonical(qq):
    rng = random.Random(24)
    for _ in range(10):
        cx = random_complex(qq, rng, max_rank=2, degrees=(-1, 2))
        for n in cx.degrees:
            ses = stupid_filtration_sequence(cx, n)
            assert det_ses(ses) == 1
            assert det_qis(ChainMap.identity(ses.quotient)).unit == 1


# ==================== EULER ISOMORPHISM ====================

def test_euler_iso_with_zero_differential(qq):
    cx = Complex.build(qq, {0: 1, 1: 2, 2: 1})
    assert euler_iso(cx) == (1, 1)


def test_euler_iso_of_acyclic_complex_is_torsion(qq):
    cx = Complex.two_term(qq, 0, Matrix.from_ints(qq, [[5]]))
    split, truncated = euler_iso(cx)
    assert split == truncated == torsion_acyclic(cx)


def test_euler_iso_routes_agree_on_example(qq):
    cx = Complex.two_term(qq, 0, Matrix.from_ints(qq, [[1, 0], [0, 0]]))
    split, truncated = euler_iso(cx)
    assert split == truncated


@pytest.mark.parametrize("ring", [PrimeField(3), PrimeField(5), Rationals()])
def test_euler_iso_routes_agree(ring):
    rng = random.Random(5)
    for _ in range(10):
        cx = _random_two_term(ring, rng)
        assert euler_iso_split(cx) == euler_iso_truncation(cx)


def test_euler_iso_with_chosen_bases(qq):
    cx = Complex.build(qq, {0: 1, 1: 1})
    bases = CohomologyBases({0: Matrix.from_ints(qq, [[2]]), 1: Matrix.from_ints(qq, [[3]])})
    split = euler_iso_split(cx, bases)
    assert split == euler_iso_truncation(cx, bases)
    assert split == qq.from_int(3) / 2


@pytest.mark.parametrize("ring", [PrimeField(2), PrimeField(3), Rationals()])
def test_euler_iso_routes_agree_on_longer_complexes(ring):
    rng = random.Random(25)
    checked = 0
    while checked < 100:
        cx = random_complex(ring, rng, max_rank=3, degrees=(0, rng.randint(1, 3)))
        if sum(cx.rank(i) for i in cx.degrees) > 6:
            continue
        split, truncated = euler_iso(cx)
        assert split == truncated
        assert euler_iso(cx, rng=random.Random(checked)) == (split, truncated)
        checked += 1


def test_cohomology_sequences_are_acyclic(qq):
    rng = random.Random(26)
    for _ in range(20):
        cx = random_complex(qq, rng, max_rank=2, degrees=(0, 2))
        bases = default_cohomology_bases(cx)
        for n in cx.degrees:
            les = cohomology_sequence(cx, bases, n)
            assert is_acyclic(les)
            assert les.rank(1) == cx.rank(n)


def test_euler_iso_rejects_bases_that_are_not_cycles(qq):
    cx = Complex.two_term(qq, 0, Matrix.from_ints(qq, [[1, 0], [0, 0]]))
    bad = CohomologyBases({0: Matrix.from_ints(qq, [[1], [0]]), 1: Matrix.from_ints(qq, [[0], [1]])})
    with pytest.raises(DomainError):
        euler_iso_truncation(cx, bad)
    boundary = CohomologyBases({0: Matrix.from_ints(qq, [[0], [1]]), 1: Matrix.from_ints(qq, [[1], [0]])})
    with pytest.raises(DomainError):
        euler_iso_truncation(cx, boundary)


def test_euler_iso_needs_field(zz):
    with pytest.raises(DomainError):
        euler_iso(Complex.concentrated(zz, 0))
    with pytest.raises(DomainError):
        default_cohomology_bases(Complex.concentrated(zz, 0))


def test_canonical_unit_structure(qq):
    assert canonical_unit_structure(qq, 0) == 1
    for h in range(1, 6):
        s = canonical_unit_structure(qq, h)
        assert s in (1, -1) and s * s == 1
    with pytest.raises(DomainError):
        canonical_unit_structure(qq, -1)
