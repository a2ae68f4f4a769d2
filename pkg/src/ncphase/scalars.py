"""Coefficient backends.

Two kinds of scalars are used throughout the package:

* ``exact``: :class:`CRational`, a complex number whose real and imaginary
  parts are arbitrary-precision rationals.
* ``float``: Python's built-in :class:`complex` (a pair of binary64 floats).
"""

from __future__ import annotations

import math
import numbers
from fractions import Fraction

try:
    from gmpy2 import mpq as _Q
except ImportError:  # pragma: no cover
    _Q = Fraction

EXACT = "exact"
FLOAT = "float"
BACKENDS = (EXACT, FLOAT)

_RATIONAL_TYPES = (int, Fraction, type(_Q(0)))


class NonRationalError(TypeError):
    """A value without an exact rational representation reached the exact backend."""


def to_rational(value):
    """Convert ``value`` to an exact rational, refusing binary floats."""
    if isinstance(value, bool):
        return _Q(int(value))
    if isinstance(value, _RATIONAL_TYPES):
        return _Q(value)
    if isinstance(value, str):
        return _Q(Fraction(value))
    if isinstance(value, numbers.Rational):
        return _Q(int(value.numerator), int(value.denominator))
    raise NonRationalError(f"{value!r} is not an exact rational")


def is_rational(value) -> bool:
    try:
        to_rational(value)
    except (NonRationalError, ValueError):
        return False
    return True


class CRational:
    """Complex number with exact rational real and imaginary parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = to_rational(re)
        self.im = to_rational(im)

    @classmethod
    def _raw(cls, re, im):
        obj = object.__new__(cls)
        obj.re = re
        obj.im = im
        return obj

    @classmethod
    def coerce(cls, value) -> "CRational":
        if isinstance(value, CRational):
            return value
        if isinstance(value, complex):
            raise NonRationalError(f"{value!r} is a binary float")
        return cls._raw(to_rational(value), _Q(0))

    def __add__(self, other):
        if isinstance(other, CRational):
            return CRational._raw(self.re + other.re, self.im + other.im)
        if isinstance(other, _RATIONAL_TYPES):
            return CRational._raw(self.re + other, self.im)
        return NotImplemented

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, CRational):
            return CRational._raw(self.re - other.re, self.im - other.im)
        if isinstance(other, _RATIONAL_TYPES):
            return CRational._raw(self.re - other, self.im)
        return NotImplemented

    def __rsub__(self, other):
        if isinstance(other, _RATIONAL_TYPES):
            return CRational._raw(other - self.re, -self.im)
        return NotImplemented

    def __mul__(self, other):
        if isinstance(other, CRational):
            a, b, c, d = self.re, self.im, other.re, other.im
            if not b:
                return CRational._raw(a * c, a * d)
            if not d:
                return CRational._raw(a * c, b * c)
            return CRational._raw(a * c - b * d, a * d + b * c)
        if isinstance(other, _RATIONAL_TYPES):
            return CRational._raw(self.re * other, self.im * other)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, _RATIONAL_TYPES):
            q = _Q(other)
            return CRational._raw(self.re / q, self.im / q)
        if isinstance(other, CRational):
            return self * other.inverse()
        return NotImplemented

    def __rtruediv__(self, other):
        if isinstance(other, _RATIONAL_TYPES):
            return self.inverse() * _Q(other)
        return NotImplemented

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        result = CRational._raw(_Q(1), _Q(0))
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def inverse(self) -> "CRational":
        den = self.re * self.re + self.im * self.im
        if not den:
            raise ZeroDivisionError("CRational division by zero")
        return CRational._raw(self.re / den, -self.im / den)

    def __neg__(self):
        return CRational._raw(-self.re, -self.im)

    def __pos__(self):
        return self

    def conjugate(self) -> "CRational":
        return CRational._raw(self.re, -self.im)

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, other):
        if isinstance(other, CRational):
            return self.re == other.re and self.im == other.im
        if isinstance(other, _RATIONAL_TYPES):
            return self.im == 0 and self.re == other
        if isinstance(other, complex):
            return False
        return NotImplemented

    def __hash__(self):
        return hash((self.re, self.im))

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __abs__(self):
        return math.hypot(float(self.re), float(self.im))

    def norm_inf(self):
        """max(|re|, |im|), exact."""
        return max(abs(self.re), abs(self.im))

    def __repr__(self):
        if not self.im:
            return f"CRational({self.re})"
        return f"CRational({self.re}, {self.im})"

    def __str__(self):
        if not self.im:
            return str(self.re)
        if not self.re:
            return f"{self.im}i"
        sign = "+" if self.im > 0 else "-"
        return f"({self.re}{sign}{abs(self.im)}i)"


I = CRational(0, 1)
ZERO = CRational(0)
ONE = CRational(1)


def coerce(value, backend: str):
    """Cast ``value`` into the scalar type of ``backend``."""
    if backend == EXACT:
        return CRational.coerce(value)
    if backend == FLOAT:
        return complex(value)
    raise ValueError(f"unknown backend {backend!r}")


def magnitude(value) -> float:
    """Size of a scalar used for tolerances and norms."""
    if isinstance(value, CRational):
        return float(value.norm_inf())
    return abs(value)


def exact_magnitude(value):
    if isinstance(value, CRational):
        return value.norm_inf()
    return abs(value)


def imag_unit(backend: str):
    return I if backend == EXACT else 1j
