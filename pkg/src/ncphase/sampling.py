"""Seeded random generators for property checks."""

from __future__ import annotations

import random
from fractions import Fraction
from itertools import product

from .poly import DeformationParams, PhasePoly
from .quadratic import PerfectSquareHamiltonian, k_of
from .scalars import EXACT

MONOMIALS_DEG3 = [m for m in product(range(4), repeat=4) if sum(m) <= 3]


def random_fraction(rng: random.Random, num: int = 5, den: int = 4) -> Fraction:
    return Fraction(rng.randint(-num, num), rng.randint(1, den))


def random_poly(rng: random.Random, max_degree: int = 3, n_terms: int = 4, complex_coeffs=True, backend=EXACT) -> PhasePoly:
    """Sparse polynomial with random support among monomials of degree <= max_degree."""
    monos = [m for m in product(range(max_degree + 1), repeat=4) if sum(m) <= max_degree]
    terms = {}
    for mono in rng.sample(monos, min(n_terms, len(monos))):
        re = random_fraction(rng)
        im = random_fraction(rng) if complex_coeffs else 0
        terms[mono] = (re, im)
    if backend == EXACT:
        from .scalars import CRational

        return PhasePoly({m: CRational(*c) for m, c in terms.items()}, EXACT)
    return PhasePoly({m: complex(float(c[0]), float(c[1])) for m, c in terms.items()}, backend)


def random_params(rng: random.Random) -> DeformationParams:
    """Rational (hbar, mu, nu) with hbar^2 > mu*nu."""
    while True:
        hbar = Fraction(rng.randint(1, 6), rng.randint(1, 3))
        mu, nu = random_fraction(rng, 3, 4), random_fraction(rng, 3, 4)
        if hbar * hbar > mu * nu:
            return DeformationParams(hbar, mu, nu)


def random_hamiltonian(rng: random.Random, params: DeformationParams) -> PerfectSquareHamiltonian:
    """Rational perfect-square Hamiltonian with k != 0."""
    while True:
        vecs = [(random_fraction(rng, 3, 3), random_fraction(rng, 3, 3)) for _ in range(4)]
        h = PerfectSquareHamiltonian(*vecs)
        if k_of(h, params) != 0:
            return h
