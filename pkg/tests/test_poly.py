import math
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ncphase.errors import (
    BackendMismatchError,
    ConfigurationError,
    NonFiniteError,
    SingularTransformError,
)
from ncphase.poly import (
    DeformationParams,
    GaussLagFn,
    PhasePoint,
    PhasePoly,
    gausslag_eval,
    grid_normalize,
    poly_eval,
    substitute_linear,
)
from ncphase.sampling import random_poly
from ncphase.scalars import EXACT, FLOAT, CRational

x1, x2, p1, p2 = PhasePoly.coordinates()


def test_poly_eval_examples():
    assert poly_eval(x1 * p1, PhasePoint(2, 0, 3, 0)) == 6
    assert poly_eval(PhasePoly.zero(), PhasePoint(1, 2, 3, 4)) == 0
    assert poly_eval(x1**2 + p2**2, PhasePoint(1, 5, 7, 2)) == 5


def test_eval_is_exact_at_rational_points():
    f = x1 * Fraction(1, 3) + p2 * p2
    assert f(Fraction(1, 2), 0, 0, Fraction(1, 3)) == CRational(Fraction(1, 6) + Fraction(1, 9))


def test_eval_vectorizes():
    f = (x1 * x1 + p1).to_float()
    xs = np.linspace(-1, 1, 5)
    vals = f(xs, 0, 2.0, 0)
    assert np.allclose(vals, xs**2 + 2)


def test_eval_overflow_is_reported():
    f = (x1**40).to_float()
    with pytest.raises(NonFiniteError):
        f(1e300, 0, 0, 0)


def test_phase_point_rejects_non_finite():
    with pytest.raises(NonFiniteError):
        PhasePoint(math.inf, 0, 0, 0)


def test_no_zero_coefficients_stored():
    f = x1 - x1 + p1 * 0
    assert f.is_zero() and f.degree == -1
    g = (x1 + x2) * (x1 - x2)
    assert set(g.terms) == {(2, 0, 0, 0), (0, 2, 0, 0)}


def test_float_chop():
    f = PhasePoly({(1, 0, 0, 0): 1.0, (0, 1, 0, 0): 1e-15}, FLOAT)
    assert list(f.terms) == [(1, 0, 0, 0)]


def test_backend_mismatch():
    with pytest.raises(BackendMismatchError):
        x1 + x1.to_float()


def test_derivatives():
    f = x1**3 * p2 + x2
    assert f.derivative("x1") == x1**2 * p2 * 3
    assert f.derivative("x1", 3) == p2 * 6
    assert f.derivative_multi((1, 0, 0, 1)) == x1**2 * 3


def test_deformation_params_validation():
    with pytest.raises(ConfigurationError):
        DeformationParams(0)
    with pytest.raises(ConfigurationError):
        DeformationParams(1, 2, 1)
    with pytest.raises(ConfigurationError):
        DeformationParams(1, math.nan, 0)
    assert DeformationParams(1, Fraction(1, 2), -3).is_rational
    assert not DeformationParams(1.5).is_rational


def test_gausslag_examples():
    w = GaussLagFn(-(x1 * x1))
    assert gausslag_eval(w, PhasePoint(0, 0, 0, 0)) == pytest.approx(1)
    w = GaussLagFn(PhasePoly.zero(), x1 + p1)
    assert gausslag_eval(w, PhasePoint(1, 0, 2, 0)) == pytest.approx(3)
    w = GaussLagFn(-(x1 * x1 + p1 * p1))
    assert gausslag_eval(w, PhasePoint(1, 0, 1, 0)) == pytest.approx(0.1353352832366127, rel=1e-12)


def test_gausslag_rejects_cubic_exponent():
    with pytest.raises(ValueError):
        GaussLagFn(x1**3)


def test_gausslag_derivative_and_product():
    q = -(x1 * x1)
    w = GaussLagFn(q, p1)
    d = w.derivative("x1")
    assert d.exponent == q and d.prefactor == x1 * p1 * -2
    prod = w * GaussLagFn(-(p1 * p1), x2)
    assert prod.exponent == q - p1 * p1
    assert prod.prefactor == p1 * x2
    assert (w * x2).prefactor == p1 * x2


def test_gausslag_eval_consistent_with_parts():
    rng = np.random.default_rng(1)
    q = (-(x1 * x1) - p2 * p2 * Fraction(1, 2) + x1 * p1 * Fraction(1, 4)).to_float()
    p = (x1 * x2 + p1 - 3).to_float()
    pts = rng.normal(size=(4, 30))
    w = GaussLagFn(q, p)
    expected = np.exp(q(*pts)) * p(*pts)
    assert np.allclose(gausslag_eval(w, pts), expected, rtol=1e-14)


def test_substitute_identity():
    f = x1 * p2 + x2**2 - 7
    assert substitute_linear(f, np.eye(4, dtype=int)) == f


def test_substitute_rotation_by_half_pi():
    # rotation of both pairs by pi/2: x1 -> -x2
    M = [[0, -1, 0, 0], [1, 0, 0, 0], [0, 0, 0, -1], [0, 0, 1, 0]]
    g = substitute_linear(x1, M)
    assert g == -x2
    rng = np.random.default_rng(3)
    Mf = np.array(M, dtype=float)
    for _ in range(5):
        pt = rng.normal(size=4)
        assert complex(g.to_float()(*pt)) == pytest.approx(complex(x1.to_float()(*(Mf @ pt))))


def test_substitute_round_trip_exact():
    c, s = Fraction(3, 5), Fraction(4, 5)
    M = [[c, -s, 0, 0], [s, c, 0, 0], [0, 0, c, -s], [0, 0, s, c]]
    Minv = [[c, s, 0, 0], [-s, c, 0, 0], [0, 0, c, s], [0, 0, -s, c]]
    rng = random.Random(0)
    for _ in range(10):
        f = random_poly(rng, 4, 6)
        assert substitute_linear(substitute_linear(f, M), Minv) == f
        assert substitute_linear(f, M).degree == f.degree


def test_substitute_gausslag_keeps_class():
    alpha = 0.7
    c, s = math.cos(alpha / 2), math.sin(alpha / 2)
    M = np.array([[c, -s, 0, 0], [s, c, 0, 0], [0, 0, c, -s], [0, 0, s, c]])
    w = GaussLagFn((-(x1 * x1) - p2 * p2).to_float(), (x1 * p1).to_float())
    v = substitute_linear(w, M)
    assert isinstance(v, GaussLagFn) and v.exponent.degree <= 2
    pt = np.array([0.1, -0.4, 0.3, 0.9])
    assert gausslag_eval(v, pt) == pytest.approx(gausslag_eval(w, M @ pt), rel=1e-13)


def test_substitute_with_shift():
    assert substitute_linear(x1 * p1, np.eye(4, dtype=int), [1, 0, 2, 0]) == (x1 + 1) * (p1 + 2)


def test_singular_substitution():
    with pytest.raises(SingularTransformError):
        substitute_linear(x1, [[1, 0, 0, 0], [1, 0, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]])
    with pytest.raises(SingularTransformError):
        substitute_linear(x1.to_float(), np.zeros((4, 4)))


def test_grid_normalize():
    vals = np.array([[1.0, 3.0], [2.0, 2.0]])
    out = grid_normalize(vals, 0.5)
    assert np.sum(out) * 0.5 == pytest.approx(1)
    with pytest.raises(NonFiniteError):
        grid_normalize(np.zeros(3), 1.0)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_ring_axioms_exact(seed):
    rng = random.Random(seed)
    f, g, h = (random_poly(rng, 4, 5) for _ in range(3))
    assert (f + g) * h == f * h + g * h
    assert (f * g) * h == f * (g * h)
    assert f * g == g * f


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_float_mirror_of_exact(seed):
    rng = random.Random(seed)
    f, g = random_poly(rng, 3, 4), random_poly(rng, 3, 4)
    assert (f * g).to_float().isclose(f.to_float() * g.to_float(), rtol=1e-13)
