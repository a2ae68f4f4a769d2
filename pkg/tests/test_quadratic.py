import logging
import math
import random
from fractions import Fraction

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings, strategies as st

from ncphase.errors import DegenerateHamiltonianError
from ncphase.poly import DeformationParams, GaussLagFn, PhasePoly, gausslag_eval
from ncphase.quadratic import (
    PerfectSquareHamiltonian,
    fourier_dirichlet_sum,
    k_of,
    laguerre,
    normalized,
    spectrum,
    wigner_n,
)
from ncphase.sampling import random_hamiltonian, random_params
from ncphase.scalars import EXACT, FLOAT
from ncphase.star import ClosedStarExp, StarContext, star, star_exp_series

OSC = PerfectSquareHamiltonian((1, 0), (0, 0), (0, 0), (1, 0))
MU, NU = Fraction(2, 7), Fraction(-3, 5)
P = DeformationParams(1, MU, NU)


def test_k_examples():
    assert k_of(OSC, DeformationParams(1)) == 1
    assert k_of(PerfectSquareHamiltonian(a=(1, 0), c=(0, 1)), P) == MU
    assert k_of(PerfectSquareHamiltonian(b=(1, 0), d=(0, 1)), P) == NU
    assert isinstance(k_of(OSC, DeformationParams(1.0, 0.1, 0.2)), float)


def test_laguerre_examples():
    assert laguerre(0, 17.5) == 1
    assert laguerre(1, 3) == -2
    assert laguerre(2, 2) == -1


def test_laguerre_against_sympy():
    z = sp.Symbol("z")
    for n in range(13):
        ref = sp.laguerre(n, z)
        for zv in (Fraction(1, 3), Fraction(-5, 2), Fraction(7)):
            assert laguerre(n, zv) == ref.subs(z, sp.Rational(zv.numerator, zv.denominator))


def test_laguerre_generating_function():
    s, z = sp.symbols("s z")
    gen = sp.exp(-z * s / (1 - s)) / (1 - s)
    ser = sp.series(gen, s, 0, 7).removeO()
    for n in range(7):
        assert sp.expand(ser.coeff(s, n) - sp.laguerre(n, z)) == 0
        assert laguerre(n, Fraction(2, 3)) == ser.coeff(s, n).subs(z, sp.Rational(2, 3))


def test_laguerre_recurrence_large_n():
    rng = np.random.default_rng(0)
    zs = rng.uniform(0, 10, 100)
    L = [laguerre(n, zs) for n in range(52)]
    for n in range(1, 51):
        res = (n + 1) * L[n + 1] - (2 * n + 1 - zs) * L[n] + n * L[n - 1]
        assert np.max(np.abs(res)) <= 1e-9 * max(1.0, np.max(np.abs(L[n])))


def test_laguerre_on_polynomials():
    H = OSC.to_poly()
    assert laguerre(2, H) == PhasePoly.const(1) - H * 2 + H * H * Fraction(1, 2)


def test_wigner_examples():
    params = DeformationParams(1)
    W0 = wigner_n(OSC, params, 0)
    H = OSC.to_poly()
    assert W0.exponent == -H and W0.prefactor == PhasePoly.const(1)
    W1 = wigner_n(OSC, params, 1)
    assert W1.prefactor == PhasePoly.const(1) - H * 2
    ctx = StarContext(params)
    assert star(ctx, H, W1) == W1 * 3
    assert star(ctx, W1, H) == W1 * 3


def test_swap_leaves_wigner_unchanged(caplog):
    h = PerfectSquareHamiltonian((1, 2), (0, 1), (3, 0), (1, 1))
    with caplog.at_level(logging.INFO):
        for n in range(3):
            assert wigner_n(h, P, n) == wigner_n(h.swapped(), P, n)
    assert k_of(h, P) == -k_of(h.swapped(), P)
    assert any("exchanging" in r.message for r in caplog.records)


def test_negative_k_normalized():
    h = PerfectSquareHamiltonian(a=(0, 0), b=(1, 0), c=(1, 0), d=(0, 0))  # k = -hbar
    h2, k = normalized(h, DeformationParams(2))
    assert k == 2 and k_of(h2, DeformationParams(2)) == 2


def test_spectrum():
    sd = spectrum(OSC, DeformationParams(1), 3)
    assert sd.k == 1 and [sd[n] for n in range(4)] == [1, 3, 5, 7]
    assert sd[2] == 5
    with pytest.raises(DegenerateHamiltonianError):
        spectrum(PerfectSquareHamiltonian(a=(1, 0), c=(0, 1)), DeformationParams(1), 2)
    with pytest.raises(DegenerateHamiltonianError):
        wigner_n(PerfectSquareHamiltonian(a=(1, 0), c=(0, 1)), DeformationParams(1), 0)


def test_hamiltonian_is_sum_of_squares():
    h = PerfectSquareHamiltonian((1.5, -2), (0.3, 0), (0, 1), (2, -1))
    rng = np.random.default_rng(2)
    pts = rng.normal(size=(4, 50))
    vals = h.evaluate(pts)
    assert np.all(vals >= 0)
    assert np.allclose(h.to_poly(FLOAT)(*pts).real, vals, rtol=1e-13)
    assert h.to_poly(FLOAT).degree == 2


@settings(max_examples=8, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(0, 4))
def test_genvalue_property(seed, n):
    rng = random.Random(seed)
    params = random_params(rng)
    h = random_hamiltonian(rng, params)
    _, k = normalized(h, params)
    ctx = StarContext(params)
    W = wigner_n(h, params, n)
    H = h.to_poly()
    assert star(ctx, H, W) == W * ((2 * n + 1) * k)
    assert star(ctx, W, H) == W * ((2 * n + 1) * k)


def test_fourier_dirichlet_wick_rotated():
    params = DeformationParams(1)
    for tau, tol in ((0.5, 1e-6), (1.0, 1e-12)):
        val = fourier_dirichlet_sum(OSC, params, -1j * tau, 25, (1.0, 0, 0, 0))
        assert abs(val - math.exp(-math.tanh(tau)) / math.cosh(tau)) < tol


def test_fourier_dirichlet_general_hamiltonian():
    params = DeformationParams(1, 0.3, -0.4)
    h = PerfectSquareHamiltonian((1, 0.2), (0, 0.5), (0.1, 1), (0.7, 0))
    rng = np.random.default_rng(5)
    pts = rng.uniform(-1, 1, size=(4, 20))
    closed = ClosedStarExp(h, params, -0.8j)(pts)
    series = fourier_dirichlet_sum(h, params, -0.8j, 40, pts)
    assert np.max(np.abs(closed - series)) < 1e-8


def test_series_meets_expansion():
    # the star-exponential power series and the expansion in W_n agree inside
    # the series' disk of convergence
    params = DeformationParams(1)
    ctx = StarContext(params, FLOAT)
    tau = 0.4
    series = star_exp_series(ctx, OSC.to_poly(FLOAT), -1j * tau, 40)
    pts = [(0.3, 0, 0.5, 0), (1.0, 0, -0.2, 0), (0, 0, 0, 0)]
    for pt in pts:
        fd = fourier_dirichlet_sum(OSC, params, -1j * tau, 40, pt)
        assert abs(complex(series(*pt)) - fd) < 1e-9


def test_wigner_float_evaluation_matches_formula():
    params = DeformationParams(1, 0.25, 0.5)
    h = PerfectSquareHamiltonian((1, 0.5), (0, 0.2), (0.3, 0), (0.9, 0.1))
    k = k_of(h, params)
    W = wigner_n(h, params, 3, FLOAT)
    pt = (0.2, -0.3, 0.4, 0.1)
    Hv = h.evaluate(pt)
    z = 2 * Hv / abs(k)
    L3 = 1 - 3 * z + 1.5 * z**2 - z**3 / 6
    assert gausslag_eval(W, pt).real == pytest.approx(math.exp(-Hv / abs(k)) * L3, rel=1e-12)
