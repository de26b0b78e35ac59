"""
Sign conventions shared by the determinant computations.

Every sign is returned as a Python int in {1, -1}; callers lift it into the
ring with ``ring.from_int``. Only relations among these signs are checked by
the test suite, the absolute choices are fixed here once.
"""

from typing import Dict

from kdet.complexes import Complex, union_degrees

# torsion of [R --u--> R] in degrees 0, 1 is u ** TORSION_ORIENTATION
TORSION_ORIENTATION = 1

# det_ses carries no extra reordering sign
SES_LEDGER_SIGN = 1


def _sign(exponent: int) -> int:
    return -1 if exponent % 2 else 1


def koszul_sign(m: int, n: int) -> int:
    """Symmetry L_m (x) L_n -> L_n (x) L_m of graded lines."""
    return _sign(m * n)


def neighbour_rank_sign(c: Complex) -> int:
    """(-1)^(sum r_n r_(n+1)), the torsion of the cone of the identity of C."""
    return _sign(sum(c.rank(n) * c.rank(n + 1) for n in c.degrees))


def canonical_unit_sign(h: int) -> int:
    """Evaluation sign of det(M[0]) (x) det(M[1]) for M of rank h."""
    return _sign(h * (h - 1) // 2)


def parity_split_sign(betti: Dict[int, int]) -> int:
    """Sign of regrouping det H(C) into even part then odd part."""
    total = 0
    for i, bi in betti.items():
        if i % 2 == 0:
            continue
        for j, bj in betti.items():
            if j > i and j % 2 == 0:
                total += bi * bj
    return _sign(total)


def cycle_rank(c: Complex, n: int) -> int:
    """Rank of Z^n for an acyclic complex, from the ranks below n."""
    if c.is_zero_complex():
        return 0
    return sum(_sign(n - 1 - j) * c.rank(j) for j in range(c.lo, n))


def torsion_ses_sign(sub: Complex, quotient: Complex) -> int:
    """Reordering sign in tau(B) = tau(A) tau(C) det_ses^-1 for acyclic A, C."""
    window = union_degrees(sub, quotient)
    degrees = range(window.start, window.stop + 1)
    return _sign(sum(cycle_rank(sub, n + 1) * cycle_rank(quotient, n) for n in degrees))

