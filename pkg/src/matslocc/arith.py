"""Exact scalars (Gaussian rationals) and prime fields containing a square root of -1.

Every amplitude and matrix entry in the package is a :class:`GaussianRational`,
``re + im*i`` with ``re`` and ``im`` stored as :class:`fractions.Fraction`.
Randomized rank tests work in ``F_p`` with ``p = 1 (mod 4)``, where ``i`` maps
to a fixed root ``r`` of ``x^2 + 1``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np
from sympy import isprime

from matslocc.errors import ConfigError, DenominatorDivisibleByP, ParseError

Rational = Fraction

# Largest prime below 2**31 that is 1 mod 4 (2**31 - 1 itself is 3 mod 4).
DEFAULT_PRIME = 2147483629
# Elements must stay below 2**31 so products fit in int64 during elimination.
MAX_PRIME = 2**31

_RAT = r"[+-]?\d+(?:/\d+)?"
_SCALAR_RE = re.compile(
    rf"^(?:(?P<re>{_RAT})(?:(?P<sign>[+-])(?P<im>\d+(?:/\d+)?)\*i|(?P<isign>[+-])i)?"
    rf"|(?P<pure>{_RAT})\*i|(?P<unit>[+-]?)i)$"
)


class GaussianRational:
    """Immutable complex number with rational real and imaginary parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        object.__setattr__(self, "re", Fraction(re))
        object.__setattr__(self, "im", Fraction(im))

    def __setattr__(self, name, value):
        raise AttributeError("GaussianRational is immutable")

    @classmethod
    def coerce(cls, x) -> GaussianRational:
        if isinstance(x, GaussianRational):
            return x
        if isinstance(x, (int, Fraction)):
            return cls(x)
        if isinstance(x, str):
            return parse_scalar(x)
        raise TypeError(f"cannot interpret {x!r} as a Gaussian rational")

    def is_real(self) -> bool:
        return self.im == 0

    def conjugate(self) -> GaussianRational:
        return GaussianRational(self.re, -self.im)

    def norm(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def __add__(self, other):
        o = _coerce_or_none(other)
        if o is None:
            return NotImplemented
        return GaussianRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = _coerce_or_none(other)
        if o is None:
            return NotImplemented
        return GaussianRational(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = _coerce_or_none(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = _coerce_or_none(other)
        if o is None:
            return NotImplemented
        if self.im == 0 and o.im == 0:
            return GaussianRational(self.re * o.re)
        return GaussianRational(
            self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = _coerce_or_none(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = _coerce_or_none(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def inverse(self) -> GaussianRational:
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("inverse of zero")
        return GaussianRational(self.re / n, -self.im / n)

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __pos__(self):
        return self

    def __bool__(self):
        return self.re != 0 or self.im != 0

    def __eq__(self, other):
        o = _coerce_or_none(other)
        if o is None:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __str__(self):
        return format_scalar(self)

    def __repr__(self):
        return f"GaussianRational('{format_scalar(self)}')"


def _coerce_or_none(x):
    if isinstance(x, GaussianRational):
        return x
    if isinstance(x, (int, Fraction)):
        return GaussianRational(x)
    return None


ZERO = GaussianRational(0)
ONE = GaussianRational(1)
I = GaussianRational(0, 1)


def _format_rational(x: Fraction) -> str:
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def format_scalar(x: GaussianRational) -> str:
    """Canonical text form: ``a``, ``a/b``, or ``a/b+c/d*i`` (``a`` always present)."""
    if x.im == 0:
        return _format_rational(x.re)
    sign = "-" if x.im < 0 else "+"
    return f"{_format_rational(x.re)}{sign}{_format_rational(abs(x.im))}*i"


def parse_scalar(text: str) -> GaussianRational:
    s = text.strip().replace(" ", "")
    m = _SCALAR_RE.match(s)
    if m is None:
        raise ParseError(f"malformed scalar {text!r}")
    try:
        if m.group("re") is not None:
            re_part = Fraction(m.group("re"))
            if m.group("im") is not None:
                im_part = Fraction(m.group("im"))
                if m.group("sign") == "-":
                    im_part = -im_part
            elif m.group("isign") is not None:
                im_part = Fraction(-1 if m.group("isign") == "-" else 1)
            else:
                im_part = Fraction(0)
            return GaussianRational(re_part, im_part)
        if m.group("pure") is not None:
            return GaussianRational(0, Fraction(m.group("pure")))
        return GaussianRational(0, -1 if m.group("unit") == "-" else 1)
    except ZeroDivisionError:
        raise ParseError(f"zero denominator in scalar {text!r}") from None


@dataclass(frozen=True)
class PrimeField:
    """``F_p`` with ``p = 1 (mod 4)`` and a fixed square root of -1."""

    modulus: int
    sqrt_minus_one: int

    def __post_init__(self):
        p, r = self.modulus, self.sqrt_minus_one
        if not isprime(p) or p % 4 != 1:
            raise ConfigError(f"modulus {p} is not a prime congruent to 1 mod 4")
        if (r * r + 1) % p != 0 or not 0 <= r < p:
            raise ConfigError(f"{r} is not a square root of -1 modulo {p}")

    @classmethod
    def for_prime(cls, p: int) -> PrimeField:
        return _field_for(int(p))

    def reduce(self, x: GaussianRational) -> int:
        return reduce_mod(x, self)

    def inv(self, a: int) -> int:
        return pow(a, -1, self.modulus)


@lru_cache(maxsize=None)
def _field_for(p: int) -> PrimeField:
    if p >= MAX_PRIME:
        raise ConfigError(f"prime {p} must be below 2**31")
    if not isprime(p) or p % 4 != 1:
        raise ConfigError(f"modulus {p} is not a prime congruent to 1 mod 4")
    g = 2
    # Euler's criterion: g is a non-residue iff g^((p-1)/2) = -1.
    while pow(g, (p - 1) // 2, p) != p - 1:
        g += 1
    r = pow(g, (p - 1) // 4, p)
    # both r and p - r square to -1; keep the smaller one as the canonical root
    return PrimeField(p, min(r, p - r))


def default_field() -> PrimeField:
    return PrimeField.for_prime(DEFAULT_PRIME)


def next_field_below(F: PrimeField) -> PrimeField:
    """The field for the next smaller prime that is 1 mod 4."""
    p = F.modulus - 4
    while p > 4 and not isprime(p):
        p -= 4
    if p <= 4:
        raise ConfigError("no smaller prime congruent to 1 mod 4")
    return PrimeField.for_prime(p)


def reduce_mod(x: GaussianRational, F: PrimeField) -> int:
    """Image of ``x`` under the ring map ``i -> sqrt_minus_one`` into ``F_p``."""
    p = F.modulus
    re_, im_ = x.re, x.im
    if re_.denominator % p == 0 or im_.denominator % p == 0:
        raise DenominatorDivisibleByP(f"{format_scalar(x)} has a denominator divisible by {p}")
    a = re_.numerator * pow(re_.denominator, -1, p) if re_.denominator != 1 else re_.numerator
    if im_ == 0:
        return a % p
    b = im_.numerator * pow(im_.denominator, -1, p) if im_.denominator != 1 else im_.numerator
    return (a + F.sqrt_minus_one * b) % p


def trial_stream(seed: int, index: int, prefix: tuple[int, ...] = ()) -> np.random.Generator:
    """Independent generator for trial ``index`` under the sub-stream ``prefix``.

    With an empty prefix this equals ``SeedSequence(seed).spawn(n)[index]``.
    """
    if seed < 0:
        raise ConfigError("seed must be non-negative")
    key = tuple(prefix) + (index,)
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=key)))


def random_field_element(F: PrimeField, rng: np.random.Generator) -> int:
    return int(rng.integers(0, F.modulus))


def random_field_vector(F: PrimeField, rng: np.random.Generator, n: int) -> np.ndarray:
    return rng.integers(0, F.modulus, size=n, dtype=np.int64)
