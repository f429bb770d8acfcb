"""Exact arithmetic in prime fields F_p and extension fields F_{p^m}.

Elements are coordinate vectors in the power basis of a fixed irreducible
modulus. Internally every element is also addressed by an integer index,
``sum(c_i * p**i)``, which is what the matrix and code modules store in numpy
arrays. Index order is the enumeration order: ``0, 1, x, x+1, ...``.
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

FIELD_ORDER_CAP = 1 << 16
_TABLE_CAP = 256


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    i = 3
    while i * i <= n:
        if n % i == 0:
            return False
        i += 2
    return True


# -- polynomials over F_p, coefficient lists low degree first -----------------

def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_mod(a: list[int], b: list[int], p: int) -> list[int]:
    a = _trim([c % p for c in a])
    b = _trim([c % p for c in b])
    inv_lead = pow(b[-1], p - 2, p)
    while len(a) >= len(b):
        shift = len(a) - len(b)
        factor = a[-1] * inv_lead % p
        for i, c in enumerate(b):
            a[i + shift] = (a[i + shift] - factor * c) % p
        _trim(a)
    return a


def _monic_polys(p: int, degree: int):
    """Monic polynomials of the given degree, ordered by the index of their lower part."""
    for idx in range(p ** degree):
        low = [(idx // p ** i) % p for i in range(degree)]
        yield low + [1]


def is_irreducible(poly: list[int], p: int) -> bool:
    """Trial division by every monic polynomial of degree 1..deg/2."""
    poly = _trim([c % p for c in poly])
    deg = len(poly) - 1
    if deg < 1:
        return False
    for d in range(1, deg // 2 + 1):
        for cand in _monic_polys(p, d):
            if not _poly_mod(poly, cand, p):
                return False
    return True


@dataclass(frozen=True)
class FieldSpec:
    """The field F_{p^m}; ``modulus`` lists all m+1 coefficients, low degree first."""

    p: int
    m: int = 1
    modulus: tuple[int, ...] | None = None

    @property
    def q(self) -> int:
        return self.p ** self.m

    @property
    def is_prime_field(self) -> bool:
        return self.m == 1

    def __repr__(self) -> str:
        if self.m == 1:
            return f"GF({self.p})"
        return f"GF({self.p}^{self.m})"

    # -- integer-index arithmetic --------------------------------------------

    def digits(self, a: int) -> tuple[int, ...]:
        p = self.p
        return tuple((a // p ** i) % p for i in range(self.m))

    def index(self, coeffs) -> int:
        p = self.p
        return sum((int(c) % p) * p ** i for i, c in enumerate(coeffs))

    def from_int(self, k: int) -> int:
        """Image of the integer k under Z -> F."""
        return int(k) % self.p

    def add(self, a: int, b: int) -> int:
        if self.m == 1:
            return (a + b) % self.p
        if self.p == 2:
            return a ^ b
        return self.index(x + y for x, y in zip(self.digits(a), self.digits(b)))

    def neg(self, a: int) -> int:
        if self.m == 1:
            return -a % self.p
        return self.index(-x for x in self.digits(a))

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if self.m == 1:
            return a * b % self.p
        if a == 0 or b == 0:
            return 0
        return _ext_mul(self, a, b)

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero in " + repr(self))
        if self.m == 1:
            return pow(a, self.p - 2, self.p)
        return self.pow(a, self.q - 2)

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, e: int) -> int:
        if e < 0:
            return self.pow(self.inv(a), -e)
        result, base = 1, a
        while e:
            if e & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            e >>= 1
        return result

    def is_zero(self, a: int) -> bool:
        return a == 0

    zero = 0
    one = 1

    def elements(self) -> range:
        return range(self.q)

    def render(self, a: int) -> str:
        return "[" + ",".join(str(c) for c in self.digits(a)) + "]"

    def parse(self, text: str) -> int:
        body = text.strip()
        if not (body.startswith("[") and body.endswith("]")):
            raise ValueError(f"malformed field element {text!r}")
        coeffs = [int(c) for c in body[1:-1].split(",") if c.strip()]
        if len(coeffs) != self.m or any(not 0 <= c < self.p for c in coeffs):
            raise ValueError(f"{text!r} is not an element of {self!r}")
        return self.index(coeffs)

    # -- vectorised helpers ----------------------------------------------------

    def tables(self) -> tuple[np.ndarray, np.ndarray]:
        """Addition and multiplication tables (only for small extension fields)."""
        return _tables(self)

    def to_dict(self) -> dict:
        d = {"p": self.p, "m": self.m}
        if self.modulus is not None:
            d["modulus"] = list(self.modulus)
        return d

    @staticmethod
    def from_dict(d: dict) -> "FieldSpec":
        spec = make_field(int(d["p"]), int(d.get("m", 1)))
        if d.get("modulus") is not None and tuple(d["modulus"]) != spec.modulus:
            raise ValueError("field modulus differs from the canonical choice")
        return spec


def _ext_mul(F: FieldSpec, a: int, b: int) -> int:
    p, m = F.p, F.m
    x, y = F.digits(a), F.digits(b)
    prod = [0] * (2 * m - 1)
    for i, xi in enumerate(x):
        if xi:
            for j, yj in enumerate(y):
                prod[i + j] = (prod[i + j] + xi * yj) % p
    mod = F.modulus
    for top in range(2 * m - 2, m - 1, -1):
        c = prod[top]
        if c:
            for i in range(m + 1):
                prod[top - m + i] = (prod[top - m + i] - c * mod[i]) % p
    return F.index(prod[:m])


@functools.lru_cache(maxsize=None)
def _tables(F: FieldSpec) -> tuple[np.ndarray, np.ndarray]:
    if F.q > _TABLE_CAP:
        raise ValueError(f"tables are only built for fields of order <= {_TABLE_CAP}")
    q = F.q
    add = np.empty((q, q), dtype=np.int64)
    mul = np.empty((q, q), dtype=np.int64)
    for a in range(q):
        for b in range(q):
            add[a, b] = F.add(a, b)
            mul[a, b] = F.mul(a, b)
    add.setflags(write=False)
    mul.setflags(write=False)
    return add, mul


@functools.lru_cache(maxsize=None)
def make_field(p: int, m: int = 1) -> FieldSpec:
    """Build F_{p^m} with the smallest monic irreducible modulus of degree m.

    Candidates are ordered by the index of their lower coefficients, the same
    order used for field elements.
    """
    if not isinstance(p, int) or not is_prime(p):
        raise ValueError(f"characteristic {p!r} is not prime")
    if m < 1:
        raise ValueError("extension degree must be at least 1")
    if p ** m > FIELD_ORDER_CAP:
        raise ValueError(f"field order {p}^{m} exceeds the cap {FIELD_ORDER_CAP}")
    if m == 1:
        return FieldSpec(p, 1, None)
    for cand in _monic_polys(p, m):
        if is_irreducible(cand, p):
            return FieldSpec(p, m, tuple(cand))
    raise AssertionError("no irreducible polynomial found")  # pragma: no cover


# -- public element type --------------------------------------------------------

@dataclass(frozen=True)
class Felem:
    """An element of a FieldSpec, stored as power-basis coordinates."""

    field: FieldSpec
    coeffs: tuple[int, ...]

    def __post_init__(self):
        if len(self.coeffs) != self.field.m:
            raise ValueError("coefficient vector has the wrong length")
        if any(not 0 <= c < self.field.p for c in self.coeffs):
            raise ValueError("coefficients must lie in [0, p)")

    @classmethod
    def of(cls, field: FieldSpec, value) -> "Felem":
        """Build from an index, an int residue, or a coefficient sequence."""
        if isinstance(value, int):
            return cls(field, field.digits(value % field.q))
        return cls(field, tuple(int(c) % field.p for c in value))

    @property
    def index(self) -> int:
        return self.field.index(self.coeffs)

    def _wrap(self, idx: int) -> "Felem":
        return Felem(self.field, self.field.digits(idx))

    def _coerce(self, other) -> int:
        if isinstance(other, Felem):
            if other.field != self.field:
                raise ValueError("elements belong to different fields")
            return other.index
        return self.field.from_int(other)

    def __add__(self, other):
        return self._wrap(self.field.add(self.index, self._coerce(other)))

    __radd__ = __add__

    def __sub__(self, other):
        return self._wrap(self.field.sub(self.index, self._coerce(other)))

    def __rsub__(self, other):
        return self._wrap(self.field.sub(self._coerce(other), self.index))

    def __mul__(self, other):
        return self._wrap(self.field.mul(self.index, self._coerce(other)))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self._wrap(self.field.div(self.index, self._coerce(other)))

    def __neg__(self):
        return self._wrap(self.field.neg(self.index))

    def __pow__(self, e: int):
        return self._wrap(self.field.pow(self.index, e))

    def __bool__(self) -> bool:
        return any(self.coeffs)

    def __str__(self) -> str:
        return self.field.render(self.index)

    def __repr__(self) -> str:
        return f"Felem({self.field!r}, {str(self)})"


def ff_add(a: Felem, b: Felem) -> Felem:
    return a + b


def ff_mul(a: Felem, b: Felem) -> Felem:
    return a * b


def ff_inv(a: Felem) -> Felem:
    if not a:
        raise ZeroDivisionError("inverse of zero")
    return a._wrap(a.field.inv(a.index))


def enumerate_elements(F: FieldSpec) -> list[Felem]:
    """All q elements, zero first, in index order."""
    return [Felem(F, F.digits(i)) for i in range(F.q)]


def enumerate_vectors(F: FieldSpec, length: int):
    """All vectors of F^length as index tuples; first coordinate most significant."""
    return itertools.product(range(F.q), repeat=length)


# -- the rationals, used as the exact stand-in for R -----------------------------

class Rationals:
    """Exact arithmetic over Q with the same interface as FieldSpec."""

    zero = Fraction(0)
    one = Fraction(1)
    p = 0

    def from_int(self, k) -> Fraction:
        return Fraction(k)

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def neg(self, a):
        return -a

    def mul(self, a, b):
        return a * b

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        return 1 / Fraction(a)

    def div(self, a, b):
        return Fraction(a) / b

    def is_zero(self, a) -> bool:
        return a == 0

    def render(self, a) -> str:
        a = Fraction(a)
        return f"{a.numerator}/{a.denominator}"

    def parse(self, text) -> Fraction:
        return Fraction(str(text))

    def __repr__(self) -> str:
        return "QQ"

    def __reduce__(self):
        return "QQ"


QQ = Rationals()
REAL = QQ
