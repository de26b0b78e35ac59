from fractions import Fraction

import pytest

from kdet.complexes import (
    ChainMap,
    Complex,
    Homotopy,
    ShortExactSequence,
    cohomology,
    cohomology_all,
    cohomology_complex,
    cone,
    cone_sequence,
    direct_sum,
    find_null_homotopy,
    homotopy_between,
    is_acyclic,
    is_homotopy_equivalence,
    is_qis,
    lift_through_qis,
    resolve_presentation,
    stupid_filtration_sequence,
    stupid_truncation,
)
from kdet.errors import DomainError, InvalidChainMapError, InvalidComplexError, InvalidSesError
from kdet.ktheory import all_matrices
from kdet.linalg import Matrix
from kdet.rings import DualNumbers, IntegersInverted, PrimeField, Rationals


def _torsion(ring, n):
    return Complex.two_term(ring, 0, Matrix.from_ints(ring, [[n]]))


def _scalar(ring, cx, value, degree=0):
    return ChainMap(cx, cx, {degree: Matrix.from_rows(ring, [[value]])})


# ==================== COMPLEXES ====================

def test_validate_accepts_basic_complexes(zz):
    assert Complex.zero(zz).is_zero_complex()
    cx = _torsion(zz, 5)
    assert (cx.lo, cx.hi) == (0, 1)
    assert cx.d(0) == Matrix.from_ints(zz, [[5]])


def test_validate_reports_failing_degree(zz):
    one = Matrix.from_ints(zz, [[1]])
    with pytest.raises(InvalidComplexError) as info:
        Complex.build(zz, {0: 1, 1: 1, 2: 1}, {0: one, 1: one})
    assert info.value.degree == 0


def test_build_rejects_wrong_shapes(zz):
    with pytest.raises(InvalidComplexError):
        Complex.build(zz, {0: 2, 1: 1}, {0: Matrix.from_ints(zz, [[1]])})


def test_shift(zz):
    assert Complex.zero(zz).shift(3).is_zero_complex()
    shifted = _torsion(zz, 5).shift(1)
    assert (shifted.lo, shifted.hi) == (-1, 0)
    assert shifted.d(-1) == Matrix.from_ints(zz, [[-5]])
    assert shifted.shift(-1) == _torsion(zz, 5)


def test_euler_characteristic_and_shift(zz):
    cx = Complex.build(zz, {0: 2, 1: 2})
    assert cx.euler_characteristic == 0
    assert Complex.concentrated(zz, 0, 3).euler_characteristic == 3
    assert Complex.concentrated(zz, 0, 3).shift(1).euler_characteristic == -3


def test_base_change_to_rationals(zz):
    cx = _torsion(zz, 5).base_change(Rationals())
    assert cx.d(0) == Matrix.from_ints(Rationals(), [[5]])
    assert is_acyclic(cx)
    assert Complex.zero(zz).base_change(Rationals()).is_zero_complex()


def test_base_change_to_inverted_integers(zz):
    ring = IntegersInverted(2)
    h1 = cohomology(_torsion(zz, 6).base_change(ring), 1)
    assert h1.free_rank == 0
    assert h1.torsion == (Fraction(3),)


# ==================== CHAIN MAPS ====================

def test_chain_map_must_commute(zz):
    cx = _torsion(zz, 5)
    with pytest.raises(InvalidChainMapError):
        ChainMap.build(cx, cx, {0: Matrix.from_ints(zz, [[2]]), 1: Matrix.from_ints(zz, [[3]])})
    f = ChainMap.build(cx, cx, {0: Matrix.from_ints(zz, [[2]]), 1: Matrix.from_ints(zz, [[2]])})
    assert f.compose(f) == ChainMap.build(cx, cx, {0: Matrix.from_ints(zz, [[4]]), 1: Matrix.from_ints(zz, [[4]])})


def test_degreewise_iso_inverse(dual3):
    cx = Complex.concentrated(dual3, 0)
    u = _scalar(dual3, cx, (1, 1))
    assert u.is_degreewise_iso()
    assert u.compose(u.inverse()) == ChainMap.identity(cx)


# ==================== CONES ====================

def test_cone_of_epsilon(dual3):
    r0 = Complex.concentrated(dual3, 0)
    cn = cone(_scalar(dual3, r0, dual3.epsilon))
    assert (cn.complex.lo, cn.complex.hi) == (-1, 0)
    assert cn.complex.d(-1) == Matrix.from_rows(dual3, [[dual3.epsilon]])
    cn.inclusion.validate()
    cn.projection.validate()


def test_cone_of_map_from_zero_is_target(zz):
    cx = _torsion(zz, 5)
    assert cone(ChainMap.zero(Complex.zero(zz), cx)).complex == cx


def test_cone_sequence_is_split_exact(zz, dual3):
    for ring, value in ((zz, 3), (dual3, dual3.epsilon)):
        r0 = Complex.concentrated(ring, 0)
        ses = cone_sequence(_scalar(ring, r0, value))
        ses.validate()
        assert ses.quotient == r0.shift(1)


def test_connecting_map_of_cone_sequence_recovers_map(dual3):
    r0 = Complex.concentrated(dual3, 0)
    ses = cone_sequence(_scalar(dual3, r0, dual3.epsilon))
    w = ses.connecting_map()
    w.validate()
    assert w.component(-1) == Matrix.from_rows(dual3, [[dual3.neg(dual3.epsilon)]])


def test_direct_sum_sequence(zz):
    ses = direct_sum(_torsion(zz, 5), Complex.concentrated(zz, 1, 2))
    ses.validate()
    assert ses.middle.rank(1) == 3
    assert ses.middle.euler_characteristic == -2


def test_ses_build_solves_splitting(zz):
    ses = direct_sum(_torsion(zz, 2), _torsion(zz, 3))
    rebuilt = ShortExactSequence.build(ses.i, ses.p)
    assert rebuilt.middle == ses.middle


def test_ses_rejects_non_split_inclusion(zz):
    a = Complex.concentrated(zz, 0)
    b = Complex.concentrated(zz, 0, 2)
    i = ChainMap(a, b, {0: Matrix.from_ints(zz, [[2], [0]])})
    p = ChainMap(b, a, {0: Matrix.from_ints(zz, [[0, 1]])})
    with pytest.raises(InvalidSesError):
        ShortExactSequence.build(i, p)


def test_stupid_truncation(zz):
    cx = Complex.build(zz, {0: 1, 1: 2, 2: 1}, {
        0: Matrix.from_ints(zz, [[1], [0]]),
        1: Matrix.from_ints(zz, [[0, 3]]),
    })
    top = stupid_truncation(cx, 1)
    assert (top.lo, top.hi) == (1, 2)
    assert top.d(1) == cx.d(1)
    assert stupid_truncation(cx, 0) == cx
    assert stupid_truncation(cx, 3).is_zero_complex()


def test_stupid_filtration_sequence_splits_off_one_degree(zz):
    cx = Complex.build(zz, {0: 1, 1: 2, 2: 1}, {
        0: Matrix.from_ints(zz, [[1], [0]]),
        1: Matrix.from_ints(zz, [[0, 3]]),
    })
    ses = stupid_filtration_sequence(cx, 1)
    ses.validate()
    assert ses.sub == stupid_truncation(cx, 2)
    assert ses.middle == stupid_truncation(cx, 1)
    assert ses.quotient == Complex.concentrated(zz, 1, 2)
    assert ses.basis_matrix(1) == Matrix.identity(zz, 2)
    last = stupid_filtration_sequence(cx, 2)
    assert last.sub.is_zero_complex() and last.quotient.rank(2) == 1


# ==================== COHOMOLOGY ====================

def test_cohomology_of_diagonal_torsion(zz):
    cx = Complex.two_term(zz, 0, Matrix.diagonal(zz, [5, 3]))
    h0, h1 = cohomology_all(cx)
    assert h0.is_zero()
    assert h1.free_rank == 0
    assert h1.torsion == (15,)
    assert h1.describe() == "Z/(15)"


def test_cohomology_with_zero_differential(zz):
    cx = Complex.build(zz, {0: 2, 1: 1})
    assert cohomology(cx, 0).free_rank == 2
    assert cohomology(cx, 1).describe() == "Z"


def test_cohomology_of_cone_of_epsilon(dual3):
    r0 = Complex.concentrated(dual3, 0)
    cx = cone(_scalar(dual3, r0, dual3.epsilon)).complex
    h_minus, h_zero = cohomology(cx, -1), cohomology(cx, 0)
    assert h_minus.torsion == (dual3.epsilon,)
    assert h_minus.generators == Matrix.from_rows(dual3, [[dual3.epsilon]])
    assert h_zero.torsion == (dual3.epsilon,)
    assert h_zero.generators == Matrix.identity(dual3, 1)
    assert not is_acyclic(cx)


def test_cohomology_complex_over_field(qq):
    cx = Complex.two_term(qq, 0, Matrix.from_ints(qq, [[1, 0], [0, 0]]))
    h, incl = cohomology_complex(cx)
    assert (h.rank(0), h.rank(1)) == (1, 1)
    incl.validate()
    assert is_qis(incl)


def test_cohomology_complex_needs_field(zz):
    with pytest.raises(DomainError):
        cohomology_complex(_torsion(zz, 5))


# ==================== HOMOTOPIES ====================

def test_homotopy_between_equal_maps_is_zero(zz):
    f = ChainMap.identity(_torsion(zz, 5))
    h = homotopy_between(f, f)
    assert h is not None
    assert all(h.component(i).is_zero() for i in range(-1, 3))


def test_homotopy_for_second_square(dual3):
    r0 = Complex.concentrated(dual3, 0)
    cn = cone(_scalar(dual3, r0, dual3.epsilon))
    incl = cn.inclusion
    twisted = incl.compose(_scalar(dual3, r0, (1, 1)))
    h = homotopy_between(twisted, incl)
    assert h is not None
    assert h.component(0) == Matrix.identity(dual3, 1)
    assert h.verify(twisted, incl)


def test_identity_and_zero_are_not_homotopic(f2):
    r0 = Complex.concentrated(f2, 0)
    assert homotopy_between(ChainMap.identity(r0), ChainMap.zero(r0, r0)) is None


def test_identity_of_acyclic_complex_is_null_homotopic(qq):
    cx = _torsion(qq, 5)
    h = find_null_homotopy(ChainMap.identity(cx))
    assert h is not None
    assert h.boundary() == ChainMap.identity(cx)


def test_explicit_homotopy_boundary(zz):
    cx = _torsion(zz, 5)
    h = Homotopy(cx, cx, {1: Matrix.from_ints(zz, [[1]])})
    boundary = h.boundary()
    assert boundary.component(0) == Matrix.from_ints(zz, [[5]])
    assert boundary.component(1) == Matrix.from_ints(zz, [[5]])


# ==================== QUASI-ISOMORPHISMS ====================

def test_is_qis_examples(dual3, f2):
    r0 = Complex.concentrated(dual3, 0)
    assert is_qis(ChainMap.identity(r0))
    assert is_qis(_scalar(dual3, r0, (1, 1)))
    f0 = Complex.concentrated(f2, 0)
    assert not is_qis(ChainMap.zero(f0, f0))


def test_qis_between_acyclic_complexes(qq):
    cx = _torsion(qq, 5)
    assert is_qis(ChainMap.zero(cx, Complex.zero(qq)))


def test_homotopy_equivalence_of_unit(dual3):
    r0 = Complex.concentrated(dual3, 0)
    eq = is_homotopy_equivalence(_scalar(dual3, r0, (1, 1)))
    assert eq is not None
    assert eq.backward.component(0) == Matrix.from_rows(dual3, [[(1, 2)]])


def test_non_qis_has_no_homotopy_inverse(dual3):
    r0 = Complex.concentrated(dual3, 0)
    assert is_homotopy_equivalence(_scalar(dual3, r0, dual3.epsilon)) is None


@pytest.mark.parametrize("ring, unit", [(PrimeField(2), 1), (DualNumbers(3), (1, 1))])
def test_lift_through_qis(ring, unit):
    x = Complex.concentrated(ring, 0)
    s = direct_sum(x, cone(ChainMap.identity(x)).complex).i
    assert is_qis(s)
    b = s.compose(_scalar(ring, x, unit))
    lifted = lift_through_qis(s, b)
    assert lifted is not None
    a, h = lifted
    a.validate()
    assert h.verify(s.compose(a), b)
    assert a.component(0) == Matrix.from_rows(ring, [[unit]])


def test_resolve_presentation(zz):
    cx = resolve_presentation(zz, Matrix.from_ints(zz, [[2, 4], [0, 0]]))
    assert (cx.lo, cx.hi) == (-1, 0)
    h0 = cohomology(cx, 0)
    assert h0.free_rank == 1 and h0.torsion == (2,)
    assert cohomology(cx, -1).is_zero()


def test_resolve_presentation_needs_regular_ring(dual3):
    with pytest.raises(DomainError):
        resolve_presentation(dual3, Matrix.from_rows(dual3, [[dual3.epsilon]]))


# ==================== BRUTE FORCE OVER F2 ====================

@pytest.mark.parametrize("d", [[[1]], [[0]], [[1, 1]], [[1], [0]], [[0, 0]]])
def test_homotopy_search_matches_brute_force(f2, d):
    cx = Complex.two_term(f2, 0, Matrix.from_ints(f2, d))
    maps = []
    for m0 in all_matrices(f2, cx.rank(0), cx.rank(0)):
        for m1 in all_matrices(f2, cx.rank(1), cx.rank(1)):
            f = ChainMap(cx, cx, {0: m0, 1: m1})
            try:
                f.validate()
            except InvalidChainMapError:
                continue
            maps.append(f)
    boundaries = {
        Homotopy(cx, cx, {1: h}).boundary()
        for h in all_matrices(f2, cx.rank(0), cx.rank(1))
    }
    identity = ChainMap.identity(cx)
    for f in maps:
        assert (find_null_homotopy(f) is not None) == (f in boundaries)
        has_inverse = any(
            g.compose(f) - identity in boundaries and f.compose(g) - identity in boundaries for g in maps
        )
        assert is_qis(f) == has_inverse
