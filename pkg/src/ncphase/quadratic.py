"""Hamiltonians that are sums of two squared linear forms.

For ``H = (a.x + b.p)^2 + (c.x + d.p)^2`` the star-genvalue problem reduces
to a one-variable problem in ``H`` with the constant

    k = (a.d - b.c) hbar + (a^c) mu + (b^d) nu,

giving Wigner functions ``exp(-H/k) L_n(2H/k)`` and levels ``(2n+1) k``.
"""

from __future__ import annotations

import cmath
import logging
from dataclasses import dataclass, field
from typing import Dict, Tuple

import numpy as np

from .errors import DegenerateHamiltonianError
from .poly import DeformationParams, GaussLagFn, PhasePoly, _as_coords
from .scalars import EXACT, FLOAT, is_rational, to_rational

log = logging.getLogger(__name__)

Vec2 = Tuple[object, object]


def _vec(v) -> tuple:
    v = tuple(v)
    if len(v) != 2:
        raise ValueError(f"coefficient vectors have two entries, got {v!r}")
    return v


@dataclass(frozen=True)
class PerfectSquareHamiltonian:
    """``H = (a.x + b.p)^2 + (c.x + d.p)^2`` with real 2-vectors a, b, c, d."""

    a: Vec2 = (0, 0)
    b: Vec2 = (0, 0)
    c: Vec2 = (0, 0)
    d: Vec2 = (0, 0)

    def __post_init__(self):
        for name in "abcd":
            object.__setattr__(self, name, _vec(getattr(self, name)))

    @property
    def is_rational(self) -> bool:
        return all(is_rational(v) for vec in (self.a, self.b, self.c, self.d) for v in vec)

    def linear_forms(self, backend: str = EXACT):
        """The two linear forms ``A = a.x + b.p`` and ``B = c.x + d.p``."""
        A = PhasePoly.linear((*self.a, *self.b), backend=backend)
        B = PhasePoly.linear((*self.c, *self.d), backend=backend)
        return A, B

    def to_poly(self, backend: str = EXACT) -> PhasePoly:
        A, B = self.linear_forms(backend)
        return A * A + B * B

    def swapped(self) -> "PerfectSquareHamiltonian":
        """Same polynomial with the two squares exchanged (negates k)."""
        return PerfectSquareHamiltonian(self.c, self.d, self.a, self.b)

    def evaluate(self, pt):
        x1, x2, p1, p2 = (np.asarray(v, dtype=float) for v in _as_coords(pt))
        A = float(self.a[0]) * x1 + float(self.a[1]) * x2 + float(self.b[0]) * p1 + float(self.b[1]) * p2
        B = float(self.c[0]) * x1 + float(self.c[1]) * x2 + float(self.d[0]) * p1 + float(self.d[1]) * p2
        return A * A + B * B


def _wedge(u, v):
    return u[0] * v[1] - u[1] * v[0]


def k_of(h: PerfectSquareHamiltonian, params: DeformationParams):
    """``(a.d - b.c) hbar + (a^c) mu + (b^d) nu``.

    Exact rational when every input is rational, float otherwise. May be
    zero; callers check.
    """
    if h.is_rational and params.is_rational:
        a, b, c, d = ([to_rational(v) for v in vec] for vec in (h.a, h.b, h.c, h.d))
        hbar, mu, nu = params.values(EXACT)
    else:
        a, b, c, d = ([float(v) for v in vec] for vec in (h.a, h.b, h.c, h.d))
        hbar, mu, nu = params.values(FLOAT)
    dot_ad = a[0] * d[0] + a[1] * d[1]
    dot_bc = b[0] * c[0] + b[1] * c[1]
    return (dot_ad - dot_bc) * hbar + _wedge(a, c) * mu + _wedge(b, d) * nu


def normalized(h: PerfectSquareHamiltonian, params: DeformationParams):
    """Return ``(h', k)`` with ``k > 0``, swapping the squares if needed."""
    k = k_of(h, params)
    if k == 0:
        raise DegenerateHamiltonianError(
            "k = 0: the two linear forms star-commute, no discrete spectrum"
        )
    if k < 0:
        log.info("k = %s < 0; exchanging the two squares so that k > 0", k)
        return h.swapped(), -k
    return h, k


def laguerre(n: int, z):
    """Laguerre polynomial ``L_n(z)`` by the three-term recurrence.

    ``z`` may be a number, a numpy array or a :class:`PhasePoly`.
    """
    if n < 0:
        raise ValueError("laguerre needs n >= 0")
    prev = 1 + 0 * z
    if n == 0:
        return prev
    cur = 1 - z
    for j in range(1, n):
        prev, cur = cur, ((2 * j + 1 - z) * cur - j * prev) / (j + 1)
    return cur


def wigner_n(h: PerfectSquareHamiltonian, params: DeformationParams, n: int, backend: str = EXACT) -> GaussLagFn:
    """Unnormalized Wigner function ``exp(-H/k) L_n(2H/k)``."""
    if n < 0:
        raise ValueError("wigner_n needs n >= 0")
    h, k = normalized(h, params)
    if backend == FLOAT:
        k = float(k)
    H = h.to_poly(backend)
    z = H.scale(2) / k
    return GaussLagFn(-(H / k), laguerre(n, z))


@dataclass(frozen=True)
class SpectralData:
    k: object
    levels: Dict[int, object] = field(default_factory=dict)

    def __getitem__(self, n):
        return self.levels[n]


def spectrum(h: PerfectSquareHamiltonian, params: DeformationParams, n_max: int) -> SpectralData:
    """Levels ``E_n = (2n+1) k`` for ``n = 0..n_max`` (``k`` made positive)."""
    _, k = normalized(h, params)
    return SpectralData(k, {n: (2 * n + 1) * k for n in range(n_max + 1)})


def fourier_dirichlet_sum(h: PerfectSquareHamiltonian, params: DeformationParams, t, n_terms: int, pt):
    """Partial sum ``sum_{n<N} 2(-1)^n exp(-i k t (2n+1)/hbar) exp(-H/k) L_n(2H/k)``.

    Pointwise evaluation; ``t`` may be complex (``t = -i tau`` converges for
    ``tau > 0``).
    """
    h, k = normalized(h, params)
    k = float(k)
    hbar = float(params.hbar)
    H = np.asarray(h.evaluate(pt), dtype=float)
    z = 2 * H / k
    envelope = np.exp(-H / k)
    phase = cmath.exp(-1j * k * complex(t) / hbar)
    step = phase * phase
    total = np.zeros_like(z, dtype=complex)
    L_prev, L_cur = np.zeros_like(z), np.ones_like(z)
    coef = 2 * phase
    for n in range(n_terms):
        total = total + coef * envelope * L_cur
        L_prev, L_cur = L_cur, ((2 * n + 1 - z) * L_cur - n * L_prev) / (n + 1)
        coef = -coef * step
    return total[()] if total.ndim == 0 else total
