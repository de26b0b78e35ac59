from fractions import Fraction
import random

import pytest

from kdet.complexes import Complex
from kdet.errors import DomainError, NotAUnitError, NotInvertibleError, UnsupportedPairError
from kdet.ktheory import chi_rel
from kdet.linalg import Matrix, det
from kdet.picardfiber import (
    FiberObj,
    RelK0Class,
    RelPair,
    SwanGenerator,
    boundary,
    check_exact_sequence,
    class_of,
    fiber_map,
    invariant_factors,
    normal_form,
    quotient_units,
    swan_eta,
)
from kdet.rings import DualNumbers, Integers, IntegersInverted, PrimeField, Rationals, enumerate_units, unit_group


@pytest.fixture
def z_q():
    return RelPair(Integers(), Rationals())


@pytest.fixture
def z_z6():
    return RelPair(Integers(), IntegersInverted(6))


# ==================== PAIRS ====================

def test_supported_pairs():
    assert RelPair(Integers(), Rationals()).name == "Z:Q"
    assert RelPair(IntegersInverted(2), Rationals()).killed_primes == (2,)
    assert RelPair(PrimeField(5), PrimeField(5)).is_identity


@pytest.mark.parametrize("source, target", [
    (Rationals(), Integers()),
    (DualNumbers(3), DualNumbers(3)),
    (PrimeField(3), Rationals()),
])
def test_unsupported_pairs(source, target):
    with pytest.raises(UnsupportedPairError):
        RelPair(source, target)


# ==================== CLASSES ====================

def test_class_of_trivial_unit_structure(z_q):
    assert class_of(FiberObj(z_q, 0, Fraction(1))).is_trivial()


def test_sign_is_killed_over_integers(z_q):
    cls = class_of(FiberObj(z_q, 0, Fraction(-10, 3)))
    assert cls.to_fraction() == Fraction(10, 3)
    assert cls.render() == "10/3"


def test_exponent_vector_for_inverted_integers(z_z6):
    cls = class_of(FiberObj(z_z6, 0, Fraction(4, 9)))
    assert cls.vector() == (2, -2)
    assert cls.render() == "(2, -2)"


def test_killed_primes_drop_out():
    pair = RelPair(IntegersInverted(2), Rationals())
    assert normal_form(pair, Fraction(12, 7)).to_fraction() == Fraction(3, 7)


def test_class_needs_degree_zero(z_q):
    with pytest.raises(DomainError):
        class_of(FiberObj(z_q, 1, Fraction(2)))


def test_class_needs_a_unit(z_z6):
    with pytest.raises(NotAUnitError):
        normal_form(z_z6, Fraction(5))


def test_identity_pair_is_trivial():
    pair = RelPair(Rationals(), Rationals())
    assert normal_form(pair, Fraction(7, 2)).is_trivial()


def test_classes_form_a_group(z_q):
    a = normal_form(z_q, Fraction(7, 2))
    b = normal_form(z_q, Fraction(-4, 21))
    assert (a * b).to_fraction() == Fraction(2, 3)
    assert (a * a.inverse()).is_trivial()
    assert a * RelK0Class.trivial(z_q) == a


def test_classes_of_different_pairs_do_not_combine(z_q, z_z6):
    with pytest.raises(DomainError):
        normal_form(z_q, Fraction(2)) * normal_form(z_z6, Fraction(2))


def test_tensor_multiplies_unit_structures(z_q):
    x = FiberObj(z_q, 0, Fraction(2))
    y = FiberObj(z_q, 0, Fraction(5, 3))
    assert class_of(x.tensor(y)) == class_of(x) * class_of(y)


def test_fiber_map_rescales(z_q):
    x = fiber_map(FiberObj(z_q, 0, Fraction(2)), Fraction(3))
    assert class_of(x).to_fraction() == 6
    with pytest.raises(NotAUnitError):
        fiber_map(x, Fraction(0))


# ==================== BOUNDARY ====================

def test_boundary_examples(z_q):
    assert boundary(Fraction(1), z_q).is_trivial()
    assert boundary(Fraction(-1), z_q).is_trivial()
    assert boundary(Fraction(7, 2), z_q).render() == "7/2"


def test_swan_generators(qq):
    pair = RelPair(Integers(), Rationals())
    g = SwanGenerator(2, 2, Matrix.diagonal(qq, [qq.from_int(5), qq.from_int(3)]))
    assert swan_eta(g, pair).render() == "15"
    assert swan_eta(SwanGenerator(2, 2, Matrix.identity(qq, 2)), pair).is_trivial()
    with pytest.raises(NotInvertibleError):
        swan_eta(SwanGenerator(1, 1, Matrix.zeros(qq, 1, 1)), pair)
    with pytest.raises(NotInvertibleError):
        swan_eta(SwanGenerator(1, 2, Matrix.zeros(qq, 2, 1)), pair)


# ==================== QUOTIENTS ====================

def test_quotient_of_dual_units_by_one_plus_epsilon(dual3):
    report = quotient_units(enumerate_units(dual3), [(1, 1)])
    assert report.group_order == 6
    assert report.subgroup_order == 3
    assert report.quotient_order == 2
    assert report.quotient_invariants == (2,)
    assert not report.injective
    assert report.collapsed_pairs == ((dual3.one, (1, 1)),)


def test_quotient_without_relations_is_the_group(dual3):
    report = quotient_units(enumerate_units(dual3), [])
    assert report.quotient_order == 6
    assert report.quotient_invariants == report.group_invariants == (6,)
    assert report.injective


def test_quotient_of_cyclic_field_units():
    report = quotient_units(enumerate_units(PrimeField(5)), [2])
    assert report.quotient_order == 1
    assert report.quotient_invariants == ()


def test_quotient_of_integer_signs():
    report = quotient_units(unit_group(Integers()), [-1])
    assert report.quotient_order == 1


def test_quotient_rejects_non_units(dual3):
    with pytest.raises(NotAUnitError):
        quotient_units(enumerate_units(dual3), [dual3.epsilon])


def test_quotient_needs_finite_group(qq):
    with pytest.raises(DomainError):
        quotient_units(unit_group(qq), [])


def test_invariant_factors_of_non_cyclic_groups():
    units = enumerate_units(DualNumbers(5))
    ring = units.ring
    count = lambda n: sum(1 for x in units.elements if ring.power(x, n) == ring.one)
    assert invariant_factors(20, count) == (20,)
    klein = [(0, 0), (1, 0), (0, 1), (1, 1)]
    count_klein = lambda n: 4 if n % 2 == 0 else 1
    assert invariant_factors(len(klein), count_klein) == (2, 2)


# ==================== EXACT SEQUENCE ====================

@pytest.mark.parametrize("pair", [
    RelPair(Integers(), Rationals()),
    RelPair(Integers(), IntegersInverted(6)),
    RelPair(IntegersInverted(2), Rationals()),
    RelPair(PrimeField(7), PrimeField(7)),
])
def test_exact_sequence_holds(pair):
    check = check_exact_sequence(pair, bound=12)
    assert check.passed
    assert check.checked > 0


def test_fiber_has_no_loops_over_integers(z_q):
    assert check_exact_sequence(z_q, bound=10).fiber_pi1 == (1,)


@pytest.mark.parametrize("pair", [
    RelPair(IntegersInverted(6), Rationals()),
    RelPair(IntegersInverted(2), Rationals()),
])
def test_exact_sequence_with_wide_unit_samples(pair):
    check = check_exact_sequence(pair, bound=30)
    assert check.boundary_kernel_is_image
    assert check.passed


def test_exact_sequence_classes_come_from_degree_zero_lines(z_q):
    check = check_exact_sequence(z_q, bound=6)
    assert check.classes_have_degree_zero
    with pytest.raises(DomainError):
        class_of(FiberObj(z_q, 1, Fraction(2)))


# ==================== SWAN GENERATORS AND CHI_REL ====================

def _random_nonsingular(rng, n):
    qq = Rationals()
    while True:
        rows = [[rng.randint(-4, 4) for _ in range(n)] for _ in range(n)]
        if det(Matrix.from_ints(qq, rows)) != 0:
            return rows


def test_swan_eta_is_multiplicative_under_composition(z_q):
    qq = z_q.target
    rng = random.Random(7)
    for _ in range(50):
        n = rng.randint(1, 3)
        a = Matrix.from_ints(qq, _random_nonsingular(rng, n))
        b = Matrix.from_ints(qq, _random_nonsingular(rng, n))
        composite = swan_eta(SwanGenerator(n, n, b @ a), z_q)
        assert composite == swan_eta(SwanGenerator(n, n, a), z_q) * swan_eta(SwanGenerator(n, n, b), z_q)


def test_chi_rel_of_two_term_complex_matches_swan_eta(z_q):
    zz, qq = z_q.source, z_q.target
    rng = random.Random(8)
    for _ in range(30):
        n = rng.randint(1, 3)
        rows = _random_nonsingular(rng, n)
        eta = swan_eta(SwanGenerator(n, n, Matrix.from_ints(qq, rows)), z_q)
        for lo in (0, 2):
            assert chi_rel(Complex.two_term(zz, lo, Matrix.from_ints(zz, rows)), z_q).rel_class == eta
        assert chi_rel(Complex.two_term(zz, 1, Matrix.from_ints(zz, rows)), z_q).rel_class == eta.inverse()
