"""
Exact arithmetic for the supported concrete commutative rings.

Every ring is an immutable, hashable value object. Ring elements are stored as
raw canonical Python values so that equality is syntactic:

    Z, Z/p^k, F_p      int (residues in [0, p^k))
    Q, Z[1/m]          fractions.Fraction in lowest terms
    F_p[e]             tuple (a, b) meaning a + b*e, both residues mod p

The :class:`Element` wrapper pairs a value with its ring for the public API.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from typing import Any, Callable, Iterator, List, Optional, Tuple

from sympy import factorint, isprime, totient

from kdet.errors import NotAUnitError, ParseError, RingError, UnsupportedPairError

_INT_RE = re.compile(r"^\s*([+-]?\d+)\s*$")
_FRAC_RE = re.compile(r"^\s*([+-]?\d+)\s*/\s*([+-]?\d+)\s*$")
_DUAL_RE = re.compile(
    r"^\s*(?P<a>[+-]?\d+)?\s*(?:(?P<sign>[+-])?\s*(?:(?P<b>\d+)\s*\*\s*)?e)?\s*$"
)


class RingTag(str, Enum):
    INT = "Z"
    RAT = "Q"
    INT_INV = "Z[1/m]"
    PRIME_FIELD = "F<p>"
    LOCAL_Z = "Z/<p>^<k>"
    DUAL_NUM = "F<p>[e]"


class Ring:
    """Interface shared by all supported rings.

    ``size`` is the Euclidean-style measure used for pivoting: absolute value
    over Z, the m-coprime part over Z[1/m], the valuation over chain rings and
    0 over fields. ``None`` is reserved for zero.
    """

    tag: RingTag

    # ---- identity -------------------------------------------------------
    @property
    def name(self) -> str:
        raise NotImplementedError

    @property
    def zero(self) -> Any:
        return self.from_int(0)

    @property
    def one(self) -> Any:
        return self.from_int(1)

    def from_int(self, n: int) -> Any:
        raise NotImplementedError

    # ---- arithmetic -----------------------------------------------------
    def add(self, a: Any, b: Any) -> Any:
        raise NotImplementedError

    def neg(self, a: Any) -> Any:
        raise NotImplementedError

    def mul(self, a: Any, b: Any) -> Any:
        raise NotImplementedError

    def sub(self, a: Any, b: Any) -> Any:
        return self.add(a, self.neg(b))

    def is_zero(self, a: Any) -> bool:
        return a == self.zero

    def power(self, a: Any, n: int) -> Any:
        if n < 0:
            return self.power(self.inverse(a), -n)
        result = self.one
        for _ in range(n):
            result = self.mul(result, a)
        return result

    # ---- units ----------------------------------------------------------
    def unit_inverse(self, a: Any) -> Optional[Any]:
        """Inverse of ``a`` when it is a unit, else None."""
        raise NotImplementedError

    def is_unit(self, a: Any) -> bool:
        return self.unit_inverse(a) is not None

    def inverse(self, a: Any) -> Any:
        inv = self.unit_inverse(a)
        if inv is None:
            raise NotAUnitError(f"{self.format(a)} is not a unit of {self.name}")
        return inv

    # ---- divisibility ---------------------------------------------------
    @property
    def is_field(self) -> bool:
        return False

    @property
    def is_regular(self) -> bool:
        return True

    @property
    def is_finite(self) -> bool:
        return False

    def size(self, a: Any) -> Optional[int]:
        raise NotImplementedError

    def divides(self, b: Any, a: Any) -> bool:
        raise NotImplementedError

    def exact_div(self, a: Any, b: Any) -> Any:
        """Some q with q*b = a; requires ``divides(b, a)``."""
        raise NotImplementedError

    def quo_rem(self, a: Any, b: Any) -> Tuple[Any, Any]:
        """q, r with a = q*b + r and r = 0 or size(r) < size(b)."""
        if self.divides(b, a):
            return self.exact_div(a, b), self.zero
        return self.zero, a

    def normal_part(self, a: Any) -> Tuple[Any, Any]:
        """Split a nonzero ``a`` as unit * normalized associate."""
        raise NotImplementedError

    def annihilator(self, a: Any) -> Any:
        """Generator of the annihilator ideal of ``a`` (zero in domains)."""
        return self.zero

    # ---- text -----------------------------------------------------------
    def parse(self, text: str) -> Any:
        raise NotImplementedError

    def format(self, a: Any) -> str:
        return str(a)

    def elements(self) -> Iterator[Any]:
        raise RingError(f"{self.name} is infinite")

    def element(self, value: Any) -> "Element":
        return Element(self, value)

    def _parse_rational(self, text: str) -> Any:
        match = _FRAC_RE.match(text)
        if match is None:
            match = _INT_RE.match(text)
            if match is None:
                raise ParseError(f"malformed element {text!r} for ring {self.name}")
            return self.from_int(int(match.group(1)))
        num, den = int(match.group(1)), int(match.group(2))
        if den == 0:
            raise ParseError(f"zero denominator in {text!r}")
        frac = Fraction(num, den)
        inv = self.unit_inverse(self.from_int(frac.denominator))
        if inv is None:
            raise ParseError(f"denominator {frac.denominator} is not invertible in {self.name}")
        return self.mul(self.from_int(frac.numerator), inv)


@dataclass(frozen=True)
class Integers(Ring):
    tag: RingTag = field(default=RingTag.INT, init=False)

    @property
    def name(self) -> str:
        return "Z"

    def from_int(self, n: int) -> int:
        return int(n)

    def add(self, a, b):
        return a + b

    def neg(self, a):
        return -a

    def mul(self, a, b):
        return a * b

    def unit_inverse(self, a):
        return a if a in (1, -1) else None

    def size(self, a):
        return None if a == 0 else abs(a)

    def divides(self, b, a):
        if b == 0:
            return a == 0
        return a % b == 0

    def exact_div(self, a, b):
        return 0 if a == 0 else a // b

    def quo_rem(self, a, b):
        q, r = divmod(a, b)
        return q, r

    def normal_part(self, a):
        return (1, a) if a > 0 else (-1, -a)

    def parse(self, text):
        return self._parse_rational(text)


@dataclass(frozen=True)
class Rationals(Ring):
    tag: RingTag = field(default=RingTag.RAT, init=False)

    @property
    def name(self) -> str:
        return "Q"

    @property
    def is_field(self) -> bool:
        return True

    def from_int(self, n: int) -> Fraction:
        return Fraction(n)

    def add(self, a, b):
        return a + b

    def neg(self, a):
        return -a

    def mul(self, a, b):
        return a * b

    def unit_inverse(self, a):
        return None if a == 0 else 1 / a

    def size(self, a):
        return None if a == 0 else 0

    def divides(self, b, a):
        return b != 0 or a == 0

    def exact_div(self, a, b):
        return a / b if b != 0 else Fraction(0)

    def normal_part(self, a):
        return a, Fraction(1)

    def parse(self, text):
        return self._parse_rational(text)

    def format(self, a):
        return str(a)


@dataclass(frozen=True)
class IntegersInverted(Ring):
    """Z[1/m], carried inside Q with membership checks on denominators."""

    m: int = 2
    tag: RingTag = field(default=RingTag.INT_INV, init=False)

    def __post_init__(self):
        if self.m < 2:
            raise RingError(f"Z[1/m] needs m >= 2, got {self.m}")

    @property
    def name(self) -> str:
        return f"Z[1/{self.m}]"

    @property
    def primes(self) -> Tuple[int, ...]:
        return _prime_support(self.m)

    def contains(self, q: Fraction) -> bool:
        return _strip_primes(q.denominator, self.primes) == 1

    def from_int(self, n: int) -> Fraction:
        return Fraction(n)

    def add(self, a, b):
        return a + b

    def neg(self, a):
        return -a

    def mul(self, a, b):
        return a * b

    def coprime_part(self, a: Fraction) -> int:
        return _strip_primes(abs(a.numerator), self.primes)

    def unit_inverse(self, a):
        if a == 0 or not self.contains(a) or self.coprime_part(a) != 1:
            return None
        return 1 / a

    def size(self, a):
        return None if a == 0 else self.coprime_part(a)

    def divides(self, b, a):
        if b == 0:
            return a == 0
        return self.coprime_part(a) % self.coprime_part(b) == 0 if a != 0 else True

    def exact_div(self, a, b):
        return a / b if b != 0 else Fraction(0)

    def normal_part(self, a):
        n = self.coprime_part(a)
        return a / n, Fraction(n)

    def quo_rem(self, a, b):
        if self.divides(b, a):
            return self.exact_div(a, b), Fraction(0)
        unit, n = self.normal_part(b)
        scaled = a / unit
        # n is coprime to m, so the m-smooth denominator is invertible mod n
        s = (scaled.numerator * pow(scaled.denominator, -1, int(n))) % int(n)
        q = (scaled - s) / n
        return q, s * unit

    def parse(self, text):
        value = self._parse_rational(text)
        if not self.contains(value):
            raise ParseError(f"{text!r} is not an element of {self.name}")
        return value


@dataclass(frozen=True)
class PrimeField(Ring):
    p: int = 2
    tag: RingTag = field(default=RingTag.PRIME_FIELD, init=False)

    def __post_init__(self):
        if not isprime(self.p):
            raise RingError(f"F_p needs a prime p, got {self.p}")

    @property
    def name(self) -> str:
        return f"F{self.p}"

    @property
    def is_field(self) -> bool:
        return True

    @property
    def is_finite(self) -> bool:
        return True

    def from_int(self, n: int) -> int:
        return n % self.p

    def add(self, a, b):
        return (a + b) % self.p

    def neg(self, a):
        return (-a) % self.p

    def mul(self, a, b):
        return (a * b) % self.p

    def unit_inverse(self, a):
        return None if a == 0 else pow(a, -1, self.p)

    def size(self, a):
        return None if a == 0 else 0

    def divides(self, b, a):
        return b != 0 or a == 0

    def exact_div(self, a, b):
        return 0 if a == 0 else (a * pow(b, -1, self.p)) % self.p

    def normal_part(self, a):
        return a, 1

    def parse(self, text):
        return self._parse_rational(text)

    def elements(self):
        return iter(range(self.p))


@dataclass(frozen=True)
class IntegersModPrimePower(Ring):
    """Z/p^k, a commutative chain ring with uniformizer p."""

    p: int = 2
    k: int = 1
    tag: RingTag = field(default=RingTag.LOCAL_Z, init=False)

    def __post_init__(self):
        if not isprime(self.p) or self.k < 1:
            raise RingError(f"Z/p^k needs a prime p and k >= 1, got p={self.p}, k={self.k}")

    @property
    def modulus(self) -> int:
        return self.p ** self.k

    @property
    def name(self) -> str:
        return f"Z/{self.p}^{self.k}"

    @property
    def is_field(self) -> bool:
        return self.k == 1

    @property
    def is_regular(self) -> bool:
        return self.k == 1

    @property
    def is_finite(self) -> bool:
        return True

    def from_int(self, n: int) -> int:
        return n % self.modulus

    def add(self, a, b):
        return (a + b) % self.modulus

    def neg(self, a):
        return (-a) % self.modulus

    def mul(self, a, b):
        return (a * b) % self.modulus

    def valuation(self, a: int) -> Optional[int]:
        if a == 0:
            return None
        v = 0
        while a % self.p == 0:
            a //= self.p
            v += 1
        return v

    def unit_inverse(self, a):
        return None if a % self.p == 0 else pow(a, -1, self.modulus)

    def size(self, a):
        return self.valuation(a)

    def divides(self, b, a):
        if a == 0:
            return True
        if b == 0:
            return False
        return self.valuation(b) <= self.valuation(a)

    def exact_div(self, a, b):
        if a == 0:
            return 0
        vb = self.valuation(b)
        va = self.valuation(a)
        ub = b // self.p ** vb
        ua = a // self.p ** va
        return (self.p ** (va - vb) * ua * pow(ub, -1, self.modulus)) % self.modulus

    def normal_part(self, a):
        v = self.valuation(a)
        return (a // self.p ** v) % self.modulus, self.p ** v

    def annihilator(self, a):
        if a == 0:
            return 1
        return self.p ** (self.k - self.valuation(a)) % self.modulus

    def parse(self, text):
        return self._parse_rational(text)

    def elements(self):
        return iter(range(self.modulus))


@dataclass(frozen=True)
class DualNumbers(Ring):
    """F_p[e]/(e^2), a commutative chain ring with uniformizer e."""

    p: int = 2
    tag: RingTag = field(default=RingTag.DUAL_NUM, init=False)

    def __post_init__(self):
        if not isprime(self.p):
            raise RingError(f"F_p[e] needs a prime p, got {self.p}")

    @property
    def name(self) -> str:
        return f"F{self.p}[e]"

    @property
    def is_regular(self) -> bool:
        return False

    @property
    def is_finite(self) -> bool:
        return True

    @property
    def epsilon(self) -> Tuple[int, int]:
        return (0, 1)

    def from_int(self, n: int) -> Tuple[int, int]:
        return (n % self.p, 0)

    def add(self, a, b):
        return ((a[0] + b[0]) % self.p, (a[1] + b[1]) % self.p)

    def neg(self, a):
        return ((-a[0]) % self.p, (-a[1]) % self.p)

    def mul(self, a, b):
        return ((a[0] * b[0]) % self.p, (a[0] * b[1] + a[1] * b[0]) % self.p)

    def valuation(self, a) -> Optional[int]:
        if a[0] != 0:
            return 0
        return 1 if a[1] != 0 else None

    def unit_inverse(self, a):
        if a[0] == 0:
            return None
        inv = pow(a[0], -1, self.p)
        # (a + be)^-1 = a^-1 - b a^-2 e
        return (inv, (-a[1] * inv * inv) % self.p)

    def size(self, a):
        return self.valuation(a)

    def divides(self, b, a):
        if a == (0, 0):
            return True
        if b == (0, 0):
            return False
        return self.valuation(b) <= self.valuation(a)

    def exact_div(self, a, b):
        if a == (0, 0):
            return (0, 0)
        if b[0] != 0:
            return self.mul(a, self.unit_inverse(b))
        return ((a[1] * pow(b[1], -1, self.p)) % self.p, 0)

    def normal_part(self, a):
        if a[0] != 0:
            return a, (1, 0)
        return (a[1], 0), (0, 1)

    def annihilator(self, a):
        v = self.valuation(a)
        if v is None:
            return (1, 0)
        return (0, 0) if v == 0 else (0, 1)

    def parse(self, text):
        if "e" not in text:
            return self._parse_rational(text)
        match = _DUAL_RE.match(text)
        if match is None:
            raise ParseError(f"malformed element {text!r} for ring {self.name}")
        a = int(match.group("a") or 0)
        b = int(match.group("b") or 1)
        if match.group("sign") == "-":
            b = -b
        return (a % self.p, b % self.p)

    def format(self, a):
        if a[1] == 0:
            return str(a[0])
        return f"{a[0]}+{a[1]}*e"

    def elements(self):
        return iter(itertools.product(range(self.p), repeat=2))


# ==================== ELEMENTS ====================

@dataclass(frozen=True)
class Element:
    """A canonical ring value together with its ring."""

    ring: Ring
    value: Any

    def _coerce(self, other: Any) -> Any:
        if isinstance(other, Element):
            if other.ring != self.ring:
                raise RingError(f"cannot combine {self.ring.name} and {other.ring.name}")
            return other.value
        if isinstance(other, int):
            return self.ring.from_int(other)
        return other

    def __add__(self, other):
        return Element(self.ring, self.ring.add(self.value, self._coerce(other)))

    def __sub__(self, other):
        return Element(self.ring, self.ring.sub(self.value, self._coerce(other)))

    def __mul__(self, other):
        return Element(self.ring, self.ring.mul(self.value, self._coerce(other)))

    def __neg__(self):
        return Element(self.ring, self.ring.neg(self.value))

    def __pow__(self, n: int):
        return Element(self.ring, self.ring.power(self.value, n))

    def inverse(self) -> "Element":
        return Element(self.ring, self.ring.inverse(self.value))

    def is_unit(self) -> bool:
        return self.ring.is_unit(self.value)

    def __str__(self) -> str:
        return self.ring.format(self.value)


def parse_element(ring: Ring, text: str) -> Element:
    """Parse ``text`` with the ring's grammar into a canonical element."""
    return Element(ring, ring.parse(text))


def is_unit(ring: Ring, a: Element) -> Tuple[bool, Optional[Element]]:
    """Decide whether ``a`` is a unit; return its inverse when it is."""
    inv = ring.unit_inverse(a.value)
    return (inv is not None, None if inv is None else Element(ring, inv))


# ==================== RING IDS ====================

_RING_RE = [
    (re.compile(r"^Z$"), lambda m: Integers()),
    (re.compile(r"^Q$"), lambda m: Rationals()),
    (re.compile(r"^Z\[1/(\d+)\]$"), lambda m: IntegersInverted(int(m.group(1)))),
    (re.compile(r"^F(\d+)$"), lambda m: PrimeField(int(m.group(1)))),
    (re.compile(r"^F(\d+)\[e\]$"), lambda m: DualNumbers(int(m.group(1)))),
    (re.compile(r"^Z/(\d+)\^(\d+)$"), lambda m: IntegersModPrimePower(int(m.group(1)), int(m.group(2)))),
    (re.compile(r"^Z/(\d+)$"), lambda m: _mod_ring(int(m.group(1)))),
]


def _mod_ring(n: int) -> Ring:
    factors = factorint(n)
    if len(factors) != 1:
        raise RingError(f"Z/{n} is not a prime-power residue ring")
    (p, k), = factors.items()
    return IntegersModPrimePower(int(p), int(k))


def parse_ring(text: str) -> Ring:
    """Parse a ring tag such as ``Z``, ``Z[1/6]``, ``F3``, ``Z/3^2`` or ``F3[e]``."""
    text = text.strip()
    for pattern, build in _RING_RE:
        match = pattern.match(text)
        if match:
            try:
                return build(match)
            except RingError as exc:
                raise ParseError(str(exc)) from exc
    raise ParseError(f"unknown ring {text!r}")


# ==================== RING HOMOMORPHISMS ====================

def extension_map(source: Ring, target: Ring) -> Callable[[Any], Any]:
    """The structure map R -> S for a supported flat pair (or an identity pair)."""
    if source == target:
        return lambda a: a
    if isinstance(source, Integers) and isinstance(target, (Rationals, IntegersInverted)):
        return lambda a: Fraction(a)
    if isinstance(source, IntegersInverted) and isinstance(target, Rationals):
        return lambda a: a
    raise UnsupportedPairError(f"unsupported ring pair {source.name} -> {target.name}")


# ==================== UNIT GROUPS ====================

class UnitGroupKind(str, Enum):
    FINITE = "finite-enumerated"
    SIGN = "sign-only"
    SIGN_AND_PRIMES = "sign-and-primes"
    FACTORED_RATIONAL = "factored-rational"


@dataclass(frozen=True)
class UnitGroup:
    """The unit group of a ring; finite groups carry the full element list."""

    ring: Ring
    kind: UnitGroupKind
    elements: Tuple[Any, ...] = ()

    @property
    def order(self) -> int:
        if self.kind not in (UnitGroupKind.FINITE, UnitGroupKind.SIGN):
            raise RingError(f"unit group of {self.ring.name} is infinite")
        return len(self.elements)

    def element_order(self, u: Any) -> int:
        ring = self.ring
        if not ring.is_unit(u):
            raise RingError(f"{ring.format(u)} is not a unit")
        if not ring.is_finite:
            if u == ring.one:
                return 1
            if u == ring.neg(ring.one):
                return 2
            raise RingError(f"{ring.format(u)} has infinite order")
        x, n = u, 1
        while x != ring.one:
            x = ring.mul(x, u)
            n += 1
        return n

    def contains(self, u: Any) -> bool:
        return self.ring.is_unit(u)


@lru_cache(maxsize=None)
def unit_group(ring: Ring) -> UnitGroup:
    """The unit group with its representation kind; finite rings are enumerated."""
    if ring.is_finite:
        return enumerate_units(ring)
    if isinstance(ring, Integers):
        return UnitGroup(ring, UnitGroupKind.SIGN, (1, -1))
    if isinstance(ring, IntegersInverted):
        return UnitGroup(ring, UnitGroupKind.SIGN_AND_PRIMES)
    return UnitGroup(ring, UnitGroupKind.FACTORED_RATIONAL)


def enumerate_units(ring: Ring) -> UnitGroup:
    """All units of a finite ring, in the ring's canonical element order."""
    if not ring.is_finite:
        raise RingError(f"{ring.name} is infinite; its units cannot be enumerated")
    units = tuple(a for a in ring.elements() if ring.is_unit(a))
    return UnitGroup(ring, UnitGroupKind.FINITE, units)


def expected_unit_count(ring: Ring) -> int:
    """|R^x| from closed formulas, for cross-checking enumeration."""
    if isinstance(ring, PrimeField):
        return ring.p - 1
    if isinstance(ring, IntegersModPrimePower):
        return int(totient(ring.modulus))
    if isinstance(ring, DualNumbers):
        return ring.p * (ring.p - 1)
    raise RingError(f"{ring.name} is infinite")


# ==================== FACTORED RATIONALS ====================

@dataclass(frozen=True)
class FactoredRational:
    """A nonzero rational as a sign and a sparse, sorted prime-exponent vector."""

    sign: int
    exponents: Tuple[Tuple[int, int], ...] = ()

    @classmethod
    def from_fraction(cls, q: Fraction) -> "FactoredRational":
        if q == 0:
            raise RingError("zero has no factored form")
        exps = {}
        for p, e in factorint(abs(q.numerator)).items():
            exps[int(p)] = exps.get(int(p), 0) + int(e)
        for p, e in factorint(q.denominator).items():
            exps[int(p)] = exps.get(int(p), 0) - int(e)
        return cls(1 if q > 0 else -1, _clean(exps))

    def to_fraction(self) -> Fraction:
        value = Fraction(self.sign)
        for p, e in self.exponents:
            value *= Fraction(p) ** e
        return value

    def __mul__(self, other: "FactoredRational") -> "FactoredRational":
        exps = dict(self.exponents)
        for p, e in other.exponents:
            exps[p] = exps.get(p, 0) + e
        return FactoredRational(self.sign * other.sign, _clean(exps))

    def inverse(self) -> "FactoredRational":
        return FactoredRational(self.sign, tuple((p, -e) for p, e in self.exponents))

    def without(self, primes: Tuple[int, ...], drop_sign: bool = True) -> "FactoredRational":
        """Image in the quotient by {±1} and by the given primes."""
        kept = tuple((p, e) for p, e in self.exponents if p not in primes)
        return FactoredRational(1 if drop_sign else self.sign, kept)

    def exponent(self, p: int) -> int:
        return dict(self.exponents).get(p, 0)


def _clean(exps: dict) -> Tuple[Tuple[int, int], ...]:
    return tuple(sorted((p, e) for p, e in exps.items() if e != 0))


@lru_cache(maxsize=None)
def _prime_support(n: int) -> Tuple[int, ...]:
    return tuple(sorted(int(p) for p in factorint(n)))


def _strip_primes(n: int, primes: Tuple[int, ...]) -> int:
    for p in primes:
        while n % p == 0 and n != 0:
            n //= p
    return n


def ring_unit_sample(ring: Ring, bound: int) -> List[Any]:
    """Units of small height: all units for finite rings, ±a/b with a, b <= bound otherwise."""
    if ring.is_finite:
        return list(enumerate_units(ring).elements)
    if isinstance(ring, Integers):
        return [1, -1]
    seen = set()
    for a in range(1, bound + 1):
        for b in range(1, bound + 1):
            q = Fraction(a, b)
            if ring.unit_inverse(q) is None:
                continue
            seen.add(q)
            seen.add(-q)
    return sorted(seen)
