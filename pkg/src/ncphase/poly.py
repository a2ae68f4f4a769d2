"""Phase-space function types: deformation parameters, polynomials in
``(x1, x2, p1, p2)`` and Gaussian-times-polynomial functions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from types import MappingProxyType
from typing import Mapping, Sequence

import numpy as np

from .errors import (
    BackendMismatchError,
    ConfigurationError,
    NonFiniteError,
    SingularTransformError,
)
from .scalars import (
    EXACT,
    FLOAT,
    CRational,
    NonRationalError,
    coerce,
    exact_magnitude,
    is_rational,
    magnitude,
    to_rational,
)

VARIABLES = ("x1", "x2", "p1", "p2")
NVARS = 4
ZERO_EXP = (0, 0, 0, 0)

# Float-backend cleanup: coefficients below this fraction of the largest one are dropped.
CHOP = 1e-13

# Antisymmetric matrix pairing x1 with x2 and p1 with p2.
EPSILON = ((0, 1), (-1, 0))


def var_index(var) -> int:
    if isinstance(var, int):
        if not 0 <= var < NVARS:
            raise IndexError(f"variable index {var} out of range")
        return var
    try:
        return VARIABLES.index(var)
    except ValueError:
        raise KeyError(f"unknown phase-space variable {var!r}") from None


@dataclass(frozen=True)
class DeformationParams:
    """Noncommutativity parameters: ``[x1,x2] = i mu``, ``[p1,p2] = i nu``,
    ``[x_i,p_j] = i hbar delta_ij``."""

    hbar: object = 1
    mu: object = 0
    nu: object = 0

    def __post_init__(self):
        for name in ("hbar", "mu", "nu"):
            value = getattr(self, name)
            if isinstance(value, complex) or not math.isfinite(float(value)):
                raise ConfigurationError(f"{name} must be a finite real number, got {value!r}")
        if self.hbar <= 0:
            raise ConfigurationError(f"hbar > 0 required, got hbar={self.hbar}")
        if not self.hbar * self.hbar > self.mu * self.nu:
            raise ConfigurationError(
                f"hbar^2 > mu*nu required, got hbar^2={self.hbar * self.hbar} "
                f"and mu*nu={self.mu * self.nu}"
            )

    @property
    def epsilon(self):
        return EPSILON

    @property
    def is_rational(self) -> bool:
        return all(is_rational(v) for v in (self.hbar, self.mu, self.nu))

    def values(self, backend: str):
        """``(hbar, mu, nu)`` as scalars of ``backend``."""
        if backend == EXACT:
            return tuple(to_rational(v) for v in (self.hbar, self.mu, self.nu))
        return tuple(float(v) for v in (self.hbar, self.mu, self.nu))


@dataclass(frozen=True)
class PhasePoint:
    x1: float
    x2: float
    p1: float
    p2: float

    def __post_init__(self):
        for name in VARIABLES:
            value = getattr(self, name)
            if not np.all(np.isfinite(np.asarray(value, dtype=complex))):
                raise NonFiniteError(f"phase point coordinate {name}={value!r} is not finite")

    def __iter__(self):
        return iter((self.x1, self.x2, self.p1, self.p2))

    def as_tuple(self):
        return (self.x1, self.x2, self.p1, self.p2)


def _as_coords(pt):
    if isinstance(pt, PhasePoint):
        return pt.as_tuple()
    coords = tuple(pt)
    if len(coords) != NVARS:
        raise ValueError(f"expected 4 phase-space coordinates, got {len(coords)}")
    return coords


def _falling(n: int, k: int) -> int:
    out = 1
    for j in range(k):
        out *= n - j
    return out


class PhasePoly:
    """Polynomial in ``(x1, x2, p1, p2)``.

    Stored as a mapping from exponent 4-tuples to coefficients of one
    backend. Values are immutable; all arithmetic returns new objects.
    """

    __slots__ = ("_terms", "backend")

    def __init__(self, terms: Mapping | None = None, backend: str = EXACT):
        if backend not in (EXACT, FLOAT):
            raise ValueError(f"unknown backend {backend!r}")
        clean = {}
        for mono, c in (terms or {}).items():
            mono = tuple(int(e) for e in mono)
            if len(mono) != NVARS or min(mono) < 0:
                raise ValueError(f"invalid exponent tuple {mono!r}")
            c = coerce(c, backend)
            clean[mono] = clean.get(mono, 0) + c
        self.backend = backend
        self._terms = _cleanup(clean, backend)

    @classmethod
    def _wrap(cls, terms: dict, backend: str) -> "PhasePoly":
        obj = object.__new__(cls)
        obj.backend = backend
        obj._terms = _cleanup(terms, backend)
        return obj

    # constructors -------------------------------------------------------

    @classmethod
    def zero(cls, backend: str = EXACT) -> "PhasePoly":
        return cls._wrap({}, backend)

    @classmethod
    def const(cls, value, backend: str = EXACT) -> "PhasePoly":
        return cls._wrap({ZERO_EXP: coerce(value, backend)}, backend)

    @classmethod
    def var(cls, name, backend: str = EXACT) -> "PhasePoly":
        mono = [0] * NVARS
        mono[var_index(name)] = 1
        return cls._wrap({tuple(mono): coerce(1, backend)}, backend)

    @classmethod
    def coordinates(cls, backend: str = EXACT):
        """The four coordinate polynomials ``x1, x2, p1, p2``."""
        return tuple(cls.var(i, backend) for i in range(NVARS))

    @classmethod
    def linear(cls, coeffs: Sequence, constant=0, backend: str = EXACT) -> "PhasePoly":
        terms = {ZERO_EXP: constant}
        for i, c in enumerate(coeffs):
            mono = [0] * NVARS
            mono[i] = 1
            terms[tuple(mono)] = c
        return cls(terms, backend)

    # inspection ---------------------------------------------------------

    @property
    def terms(self) -> Mapping:
        return MappingProxyType(self._terms)

    def items(self):
        return self._terms.items()

    def coeff(self, mono) -> object:
        return self._terms.get(tuple(mono), coerce(0, self.backend))

    def __len__(self):
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    @property
    def degree(self) -> int:
        """Maximum total degree; -1 for the zero polynomial."""
        return max((sum(m) for m in self._terms), default=-1)

    def norm_inf(self):
        """Largest coefficient size (``max(|re|,|im|)`` exactly for the exact backend)."""
        return max((exact_magnitude(c) for c in self._terms.values()), default=0)

    def variables(self):
        used = set()
        for mono in self._terms:
            used.update(i for i, e in enumerate(mono) if e)
        return tuple(VARIABLES[i] for i in sorted(used))

    # conversions --------------------------------------------------------

    def to_float(self) -> "PhasePoly":
        if self.backend == FLOAT:
            return self
        return PhasePoly._wrap({m: complex(c) for m, c in self._terms.items()}, FLOAT)

    def to_backend(self, backend: str) -> "PhasePoly":
        if backend == self.backend:
            return self
        if backend == FLOAT:
            return self.to_float()
        return PhasePoly(self._terms, EXACT)

    def conj(self) -> "PhasePoly":
        return PhasePoly._wrap({m: c.conjugate() for m, c in self._terms.items()}, self.backend)

    def real_part(self) -> "PhasePoly":
        if self.backend == EXACT:
            return PhasePoly._wrap({m: CRational._raw(c.re, c.im * 0) for m, c in self._terms.items()}, EXACT)
        return PhasePoly._wrap({m: complex(c.real, 0.0) for m, c in self._terms.items()}, FLOAT)

    # arithmetic ---------------------------------------------------------

    def _lift(self, other) -> "PhasePoly":
        if isinstance(other, PhasePoly):
            if other.backend != self.backend:
                raise BackendMismatchError(f"cannot combine {self.backend} and {other.backend} polynomials")
            return other
        return PhasePoly.const(other, self.backend)

    def __add__(self, other):
        if isinstance(other, GaussLagFn):
            return NotImplemented
        other = self._lift(other)
        out = dict(self._terms)
        for m, c in other._terms.items():
            out[m] = out[m] + c if m in out else c
        return PhasePoly._wrap(out, self.backend)

    __radd__ = __add__

    def __neg__(self):
        return PhasePoly._wrap({m: -c for m, c in self._terms.items()}, self.backend)

    def __sub__(self, other):
        if isinstance(other, GaussLagFn):
            return NotImplemented
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def scale(self, s) -> "PhasePoly":
        s = coerce(s, self.backend)
        if not s:
            return PhasePoly.zero(self.backend)
        return PhasePoly._wrap({m: c * s for m, c in self._terms.items()}, self.backend)

    def __mul__(self, other):
        if isinstance(other, GaussLagFn):
            return NotImplemented
        if not isinstance(other, PhasePoly):
            return self.scale(other)
        other = self._lift(other)
        out = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                m = (m1[0] + m2[0], m1[1] + m2[1], m1[2] + m2[2], m1[3] + m2[3])
                c = c1 * c2
                out[m] = out[m] + c if m in out else c
        return PhasePoly._wrap(out, self.backend)

    def __rmul__(self, other):
        return self.scale(other)

    def __truediv__(self, other):
        if isinstance(other, (PhasePoly, GaussLagFn)):
            return NotImplemented
        if self.backend == EXACT:
            return self.scale(CRational.coerce(other).inverse())
        return self.scale(1.0 / complex(other))

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("PhasePoly powers need a non-negative integer exponent")
        result = PhasePoly.const(1, self.backend)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def mul_monomial(self, mono, c) -> "PhasePoly":
        return PhasePoly._wrap(
            {tuple(a + b for a, b in zip(m, mono)): v * c for m, v in self._terms.items()},
            self.backend,
        )

    def __eq__(self, other):
        if isinstance(other, PhasePoly):
            return self.backend == other.backend and self._terms == other._terms
        if isinstance(other, GaussLagFn):
            return NotImplemented
        try:
            return self == PhasePoly.const(other, self.backend)
        except (NonRationalError, TypeError, ValueError):
            return NotImplemented

    __hash__ = None

    def isclose(self, other, rtol: float = 1e-10) -> bool:
        """Coefficient-wise comparison relative to the larger of the two norms."""
        diff = (self.to_float() - other.to_float()).norm_inf()
        scale = max(float(self.norm_inf()), float(other.norm_inf()), 1e-300)
        return diff <= rtol * scale

    # calculus -----------------------------------------------------------

    def derivative(self, var, order: int = 1) -> "PhasePoly":
        i = var_index(var)
        out = {}
        for m, c in self._terms.items():
            e = m[i]
            if e < order:
                continue
            mm = list(m)
            mm[i] = e - order
            out[tuple(mm)] = c * _falling(e, order)
        return PhasePoly._wrap(out, self.backend)

    def derivative_multi(self, orders: Sequence[int]) -> "PhasePoly":
        """Mixed partial derivative ``d^orders`` (one order per variable)."""
        out = {}
        for m, c in self._terms.items():
            if any(e < k for e, k in zip(m, orders)):
                continue
            f = 1
            for e, k in zip(m, orders):
                f *= _falling(e, k)
            out[tuple(e - k for e, k in zip(m, orders))] = c * f
        return PhasePoly._wrap(out, self.backend)

    # evaluation ---------------------------------------------------------

    def __call__(self, *args):
        coords = _as_coords(args[0]) if len(args) == 1 else args
        return self.evaluate(coords)

    def evaluate(self, pt):
        coords = _as_coords(pt)
        if self.backend == EXACT and all(is_rational(v) for v in coords):
            vals = [to_rational(v) for v in coords]
            total = CRational(0)
            for m, c in self._terms.items():
                mon = 1
                for v, e in zip(vals, m):
                    if e:
                        mon *= v**e
                total = total + c * mon
            return total
        arrays = [np.asarray(v, dtype=complex) for v in coords]
        with np.errstate(over="ignore", invalid="ignore"):
            total = np.zeros(np.broadcast(*arrays).shape, dtype=complex)
            for m, c in self._terms.items():
                mon = complex(c)
                for v, e in zip(arrays, m):
                    if e:
                        mon = mon * v**e
                total = total + mon
        if not np.all(np.isfinite(total)):
            raise NonFiniteError("polynomial evaluation overflowed")
        return total[()] if total.ndim == 0 else total

    # display ------------------------------------------------------------

    def __repr__(self):
        return f"PhasePoly({self}, backend={self.backend!r})"

    def __str__(self):
        if not self._terms:
            return "0"
        parts = []
        for m in sorted(self._terms, key=lambda m: (sum(m), tuple(-e for e in m))):
            c = self._terms[m]
            mono = "*".join(
                VARIABLES[i] + (f"^{e}" if e > 1 else "") for i, e in enumerate(m) if e
            )
            parts.append(f"{c}*{mono}" if mono else f"{c}")
        return " + ".join(parts)


def _cleanup(terms: dict, backend: str) -> dict:
    if backend == EXACT:
        return {m: c for m, c in terms.items() if c}
    if not terms:
        return terms
    top = max(abs(c) for c in terms.values())
    if top == 0:
        return {}
    if not math.isfinite(top):
        raise NonFiniteError("non-finite polynomial coefficient")
    cut = CHOP * top
    return {m: c for m, c in terms.items() if abs(c) > cut}


class GaussLagFn:
    """Function ``exp(q) * p`` with ``q`` of degree at most two."""

    __slots__ = ("exponent", "prefactor")

    def __init__(self, exponent: PhasePoly, prefactor: PhasePoly | None = None):
        if exponent.degree > 2:
            raise ValueError(f"exponent must have degree <= 2, got degree {exponent.degree}")
        if prefactor is None:
            prefactor = PhasePoly.const(1, exponent.backend)
        if prefactor.backend != exponent.backend:
            raise BackendMismatchError("exponent and prefactor use different backends")
        self.exponent = exponent
        self.prefactor = prefactor

    @property
    def backend(self) -> str:
        return self.exponent.backend

    def __repr__(self):
        return f"GaussLagFn(exp({self.exponent}) * ({self.prefactor}))"

    def with_prefactor(self, prefactor: PhasePoly) -> "GaussLagFn":
        return GaussLagFn(self.exponent, prefactor)

    def _same_exponent(self, other: "GaussLagFn"):
        if other.backend != self.backend:
            raise BackendMismatchError(f"cannot combine {self.backend} and {other.backend} functions")
        if self.exponent == other.exponent:
            return
        if self.backend == FLOAT and self.exponent.isclose(other.exponent, 1e-12):
            return
        raise ValueError("GaussLagFn sums require identical exponents")

    def __add__(self, other):
        if not isinstance(other, GaussLagFn):
            return NotImplemented
        self._same_exponent(other)
        return self.with_prefactor(self.prefactor + other.prefactor)

    def __sub__(self, other):
        if not isinstance(other, GaussLagFn):
            return NotImplemented
        self._same_exponent(other)
        return self.with_prefactor(self.prefactor - other.prefactor)

    def __neg__(self):
        return self.with_prefactor(-self.prefactor)

    def __mul__(self, other):
        if isinstance(other, GaussLagFn):
            if other.backend != self.backend:
                raise BackendMismatchError("cannot multiply functions from different backends")
            return GaussLagFn(self.exponent + other.exponent, self.prefactor * other.prefactor)
        return self.with_prefactor(self.prefactor * other)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, GaussLagFn):
            return NotImplemented
        return self.exponent == other.exponent and self.prefactor == other.prefactor

    __hash__ = None

    def derivative(self, var) -> "GaussLagFn":
        i = var_index(var)
        p, q = self.prefactor, self.exponent
        return self.with_prefactor(p.derivative(i) + p * q.derivative(i))

    def to_float(self) -> "GaussLagFn":
        return GaussLagFn(self.exponent.to_float(), self.prefactor.to_float())

    def __call__(self, *args):
        coords = _as_coords(args[0]) if len(args) == 1 else args
        return gausslag_eval(self, coords)


def poly_eval(f: PhasePoly, pt):
    """Value of ``f`` at ``pt`` (a :class:`PhasePoint` or 4 coordinates)."""
    return f.evaluate(pt)


def gausslag_eval(w: GaussLagFn, pt):
    """Value of ``exp(q) * p`` at ``pt``; arrays broadcast."""
    coords = _as_coords(pt)
    q = np.asarray(w.exponent.to_float().evaluate(coords), dtype=complex)
    if not np.all(np.isfinite(q)):
        raise NonFiniteError("exponent is not finite at the requested point")
    p = np.asarray(w.prefactor.to_float().evaluate(coords), dtype=complex)
    with np.errstate(over="ignore", invalid="ignore"):
        val = np.exp(q) * p
    if not np.all(np.isfinite(val)):
        raise NonFiniteError("exp(q) * p overflowed")
    return val[()] if val.ndim == 0 else val


def _matrix_entries(M, backend):
    rows = [list(r) for r in M]
    if len(rows) != NVARS or any(len(r) != NVARS for r in rows):
        raise ValueError("substitution matrix must be 4x4")
    if backend == EXACT:
        try:
            return [[to_rational(v) for v in r] for r in rows]
        except NonRationalError as exc:
            raise NonRationalError(
                "exact-backend substitution requires rational matrix entries"
            ) from exc
    return [[complex(v) for v in r] for r in rows]


def _exact_det(M) -> Fraction:
    a = [[Fraction(int(v.numerator), int(v.denominator)) for v in row] for row in M]
    n = len(a)
    det = Fraction(1)
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col]), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
            det = -det
        det *= a[col][col]
        for r in range(col + 1, n):
            f = a[r][col] / a[col][col]
            if f:
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return det


def _check_invertible(M, backend):
    if backend == EXACT:
        if _exact_det(M) == 0:
            raise SingularTransformError("substitution matrix is singular")
        return
    arr = np.array(M, dtype=complex)
    if not np.all(np.isfinite(arr)) or np.linalg.cond(arr) > 1e13:
        raise SingularTransformError("substitution matrix is singular or ill-conditioned")


def substitute_linear(f, M, shift=None):
    """Compose ``f`` with the affine map ``xi -> M xi + shift``.

    Works on :class:`PhasePoly` and :class:`GaussLagFn`; the result has the
    same kind and backend. Row ``i`` of ``M`` gives variable ``i`` in terms
    of the new variables.
    """
    if isinstance(f, GaussLagFn):
        return GaussLagFn(
            substitute_linear(f.exponent, M, shift),
            substitute_linear(f.prefactor, M, shift),
        )
    backend = f.backend
    rows = _matrix_entries(M, backend)
    _check_invertible(rows, backend)
    shift = [0] * NVARS if shift is None else list(shift)
    if len(shift) != NVARS:
        raise ValueError("shift must have 4 entries")
    images = [PhasePoly.linear(rows[i], shift[i], backend) for i in range(NVARS)]
    powers = [[PhasePoly.const(1, backend)] for _ in range(NVARS)]

    def power(i, e):
        cache = powers[i]
        while len(cache) <= e:
            cache.append(cache[-1] * images[i])
        return cache[e]

    out = PhasePoly.zero(backend)
    acc = {}
    for m, c in f.items():
        term = PhasePoly.const(c, backend)
        for i, e in enumerate(m):
            if e:
                term = term * power(i, e)
        for mm, cc in term.items():
            acc[mm] = acc[mm] + cc if mm in acc else cc
    out = PhasePoly._wrap(acc, backend)
    return out


def grid_normalize(values: np.ndarray, cell_volume: float) -> np.ndarray:
    """Divide grid samples by their Riemann sum (for plotting only)."""
    total = np.sum(values) * cell_volume
    if total == 0 or not np.isfinite(total):
        raise NonFiniteError("grid sum is zero or non-finite; cannot normalize")
    return values / total
