"""Two coupled harmonic oscillators on the noncommutative phase space.

Pipeline: physical Hamiltonian in (X, P) -> equal-mass rescaling (x, p) ->
rotation by half the mixing angle (y, q) -> split of the decoupled
Hamiltonian into two star-commuting perfect squares H1 + H2 -> spectra,
Wigner states and time evolution. Everything here runs on the float
backend since square roots and angles enter.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .errors import (
    BranchSelectionError,
    ConfigurationError,
    DegenerateHamiltonianError,
    NcPhaseError,
    UnstablePotentialError,
)
from .poly import DeformationParams, GaussLagFn, PhasePoly, substitute_linear
from .quadratic import PerfectSquareHamiltonian, k_of, laguerre
from .scalars import FLOAT
from .star import ClosedStarExp

# beta2 below this fraction of beta1 is treated as zero (a + b undetermined).
BETA_DEGENERATE = 1e-14
_CHECK_RTOL = 1e-10


@dataclass(frozen=True)
class CoupledOscillatorSpec:
    """``H0 = P1^2/(2 m1) + P2^2/(2 m2) + (C1 X1^2 + C2 X2^2 + C3 X1 X2)/2``."""

    m1: float = 1.0
    m2: float = 1.0
    C1: float = 1.0
    C2: float = 1.0
    C3: float = 0.0

    def __post_init__(self):
        for name in ("m1", "m2", "C1", "C2", "C3"):
            if not math.isfinite(float(getattr(self, name))):
                raise ConfigurationError(f"{name} must be finite")
        if not (self.m1 > 0 and self.m2 > 0):
            raise ConfigurationError(f"masses must be positive, got m1={self.m1}, m2={self.m2}")

    def hamiltonian(self) -> PhasePoly:
        X1, X2, P1, P2 = PhasePoly.coordinates(FLOAT)
        return (
            P1 * P1 / (2 * self.m1)
            + P2 * P2 / (2 * self.m2)
            + (X1 * X1 * self.C1 + X2 * X2 * self.C2 + X1 * X2 * self.C3) * 0.5
        )


@dataclass(frozen=True)
class Rescaled:
    m: float
    c1: float
    c2: float
    c3: float
    matrix: np.ndarray  # (X, P) -> (x, p)

    def hamiltonian(self) -> PhasePoly:
        x1, x2, p1, p2 = PhasePoly.coordinates(FLOAT)
        return (p1 * p1 + p2 * p2) / (2 * self.m) + (
            x1 * x1 * self.c1 + x2 * x2 * self.c2 + x1 * x2 * self.c3
        ) * 0.5


def rescale(spec: CoupledOscillatorSpec) -> Rescaled:
    """Equal-mass rescaling; conjugate pairs get reciprocal factors."""
    m1, m2 = float(spec.m1), float(spec.m2)
    if not (m1 > 0 and m2 > 0):
        raise ConfigurationError("masses must be positive")
    r = (m1 / m2) ** 0.25
    matrix = np.diag([r, 1 / r, 1 / r, r])
    return Rescaled(
        m=math.sqrt(m1 * m2),
        c1=float(spec.C1) * math.sqrt(m2 / m1),
        c2=float(spec.C2) * math.sqrt(m1 / m2),
        c3=float(spec.C3),
        matrix=matrix,
    )


def mixing_angle(c1: float, c2: float, c3: float) -> float:
    """Angle alpha with ``tan(alpha) = c3/(c2 - c1)`` that also puts the
    larger potential coefficient on ``y1``.

    Returns 0 when ``c1 == c2`` and ``c3 == 0`` (any angle works).
    """
    if c3 == 0 and c1 == c2:
        return 0.0
    alpha = math.atan2(-c3, c1 - c2)
    if alpha == -math.pi:
        alpha = math.pi
    return alpha


def rotation_matrix(alpha: float) -> np.ndarray:
    """4x4 map ``(x, p) -> (y, q)``: both pairs rotated by ``alpha/2``."""
    c, s = math.cos(alpha / 2), math.sin(alpha / 2)
    R = np.array([[c, -s], [s, c]])
    out = np.zeros((4, 4))
    out[:2, :2] = R
    out[2:, 2:] = R
    return out


def normal_params(c1: float, c2: float, c3: float) -> Tuple[float, float]:
    """``(K, eta)`` of the decoupled potential ``K/2 (e^{2eta} y1^2 + e^{-2eta} y2^2)``."""
    disc = 4 * c1 * c2 - c3 * c3
    if not disc > 0 or c1 <= 0:
        raise UnstablePotentialError(
            f"need 4*c1*c2 > c3^2 with c1, c2 > 0; got c1={c1}, c2={c2}, c3={c3}"
        )
    root = math.sqrt(disc)
    K = 0.5 * root
    e2eta = (c1 + c2 + math.hypot(c1 - c2, c3)) / root
    return K, 0.5 * math.log(e2eta)


def normal_hamiltonian(m: float, K: float, eta: float) -> PhasePoly:
    """``(q1^2 + q2^2)/(2m) + K/2 (e^{2eta} y1^2 + e^{-2eta} y2^2)`` over (y1, y2, q1, q2)."""
    y1, y2, q1, q2 = PhasePoly.coordinates(FLOAT)
    return (q1 * q1 + q2 * q2) / (2 * m) + (
        y1 * y1 * math.exp(2 * eta) + y2 * y2 * math.exp(-2 * eta)
    ) * (K / 2)


def _radicals(K, m, eta, params: DeformationParams):
    hbar, mu, nu = (float(v) for v in (params.hbar, params.mu, params.nu))
    root = hbar * math.sqrt(K * m)
    plus, minus = 2 * math.cosh(eta), 2 * math.sinh(eta)
    return root * plus, K * m * mu - nu, root * minus, -(K * m * mu + nu)


def betas_deltas(K: float, m: float, eta: float, params: DeformationParams):
    """``(beta1, beta2, Delta1, Delta2)``.

    ``Delta2`` is ``inf`` when ``eta = 0`` and ``K m mu + nu != 0`` (its
    defining ratio has a vanishing denominator); the betas are always finite.
    """
    if not (K > 0 and m > 0):
        raise ConfigurationError("K and m must be positive")
    s1, c1, s2, c2 = _radicals(K, m, eta, params)
    beta1 = math.hypot(s1, c1)
    beta2 = math.hypot(s2, c2)
    delta1 = (c1 / s1) ** 2
    if s2 != 0:
        delta2 = (c2 / s2) ** 2
    else:
        delta2 = 0.0 if c2 == 0 else math.inf
    # factored form cross-check
    if not math.isclose(beta1, s1 * math.sqrt(1 + delta1), rel_tol=1e-12):
        raise NcPhaseError("beta1 radical and factored forms disagree")
    if math.isfinite(delta2) and not math.isclose(beta2, s2 * math.sqrt(1 + delta2), rel_tol=1e-12, abs_tol=1e-300):
        raise NcPhaseError("beta2 radical and factored forms disagree")
    return beta1, beta2, delta1, delta2


def decomposition_angles(K: float, m: float, eta: float, params: DeformationParams) -> Tuple[float, float]:
    """Angles ``(a, b)`` at which H1 and H2 star-commute.

    ``a - b`` and ``a + b`` come from two-argument arctangents of the
    sine/cosine pairs, so all four sine and cosine conditions hold (not just
    the tangents). When ``beta2 = 0`` the sum is free and ``a = pi`` is used.
    """
    hbar, mu, nu = float(params.hbar), float(params.mu), float(params.nu)
    if not hbar * hbar > mu * nu:
        raise ConfigurationError(f"hbar^2 > mu*nu required (hbar={hbar}, mu={mu}, nu={nu})")
    s1, c1, s2, c2 = _radicals(K, m, eta, params)
    beta1, beta2 = math.hypot(s1, c1), math.hypot(s2, c2)
    diff = math.atan2(s1, c1)
    if beta2 <= BETA_DEGENERATE * beta1:
        a = math.pi
        b = a - diff
    else:
        total = math.atan2(s2, c2)
        a, b = (total + diff) / 2, (total - diff) / 2
    checks = [(math.sin(a - b), s1 / beta1), (math.cos(a - b), c1 / beta1)]
    if beta2 > BETA_DEGENERATE * beta1:
        checks += [(math.sin(a + b), s2 / beta2), (math.cos(a + b), c2 / beta2)]
    if any(abs(u - v) > 1e-12 for u, v in checks):
        raise BranchSelectionError(f"no branch satisfies the angle conditions (a={a}, b={b})")
    return a, b


def build_decomposition(K: float, m: float, eta: float, a: float, b: float):
    """The two perfect-square parts over (y1, y2, q1, q2); they sum to the
    decoupled Hamiltonian for every ``a, b``."""
    sk = math.sqrt(K / 2)
    inv = 1 / math.sqrt(2 * m)
    up, down = math.exp(eta), math.exp(-eta)
    H1 = PerfectSquareHamiltonian(
        a=(up * sk * math.sin(a), 0.0),
        b=(0.0, inv * math.cos(a)),
        c=(0.0, down * sk * math.sin(b)),
        d=(inv * math.cos(b), 0.0),
    )
    H2 = PerfectSquareHamiltonian(
        a=(up * sk * math.cos(a), 0.0),
        b=(0.0, -inv * math.sin(a)),
        c=(0.0, down * sk * math.cos(b)),
        d=(-inv * math.sin(b), 0.0),
    )
    return H1, H2


def k_from_angles(K: float, m: float, eta: float, a: float, b: float, params: DeformationParams):
    """``(k1, k2)`` written out in terms of the angles ``a, b``."""
    hbar, mu, nu = float(params.hbar), float(params.mu), float(params.nu)
    pre = hbar * math.sqrt(K) / (2 * math.sqrt(m))
    up, down = math.exp(eta), math.exp(-eta)
    sa, ca, sb, cb = math.sin(a), math.cos(a), math.sin(b), math.cos(b)
    k1 = pre * (up * sa * cb - down * sb * ca) + K * mu / 2 * sa * sb - nu / (2 * m) * ca * cb
    k2 = pre * (down * sa * cb - up * sb * ca) + K * mu / 2 * ca * cb - nu / (2 * m) * sa * sb
    return k1, k2


def k1k2(beta1: float, beta2: float, m: float) -> Tuple[float, float]:
    if not beta1 >= beta2 >= 0:
        raise ConfigurationError(f"need beta1 >= beta2 >= 0, got {beta1}, {beta2}")
    return (beta1 + beta2) / (4 * m), (beta1 - beta2) / (4 * m)


@dataclass(frozen=True)
class OscillatorSolution:
    spec: CoupledOscillatorSpec
    params: DeformationParams
    m: float
    c1: float
    c2: float
    c3: float
    alpha: float
    K: float
    eta: float
    a: float
    b: float
    beta1: float
    beta2: float
    Delta1: float
    Delta2: float
    k1: float
    k2: float
    omega: float
    H1: PerfectSquareHamiltonian
    H2: PerfectSquareHamiltonian
    forward: np.ndarray  # (X, P) -> (y, q)
    inverse: np.ndarray  # (y, q) -> (X, P)

    @property
    def hbar(self) -> float:
        return float(self.params.hbar)

    def hamiltonian(self) -> PhasePoly:
        """Decoupled Hamiltonian over (y1, y2, q1, q2)."""
        return normal_hamiltonian(self.m, self.K, self.eta)

    def to_normal(self, X):
        """Map original coordinates ``(X1, X2, P1, P2)`` to ``(y1, y2, q1, q2)``."""
        return tuple(np.tensordot(self.forward, np.asarray(X, dtype=float), axes=1))

    def to_original(self, Y):
        return tuple(np.tensordot(self.inverse, np.asarray(Y, dtype=float), axes=1))


def solve(spec: CoupledOscillatorSpec, params: DeformationParams) -> OscillatorSolution:
    """Run the whole pipeline for one oscillator and deformation."""
    hbar, mu, nu = float(params.hbar), float(params.mu), float(params.nu)
    if not hbar * hbar > mu * nu:
        raise ConfigurationError(f"hbar^2 > mu*nu required (hbar={hbar}, mu={mu}, nu={nu})")
    rs = rescale(spec)
    K, eta = normal_params(rs.c1, rs.c2, rs.c3)
    alpha = mixing_angle(rs.c1, rs.c2, rs.c3)
    a, b = decomposition_angles(K, rs.m, eta, params)
    beta1, beta2, d1, d2 = betas_deltas(K, rs.m, eta, params)
    k1, k2 = k1k2(beta1, beta2, rs.m)
    if not k2 > 0:
        raise DegenerateHamiltonianError(f"k2 = {k2} is not positive")
    H1, H2 = build_decomposition(K, rs.m, eta, a, b)
    forward = rotation_matrix(alpha) @ rs.matrix
    return OscillatorSolution(
        spec=spec,
        params=params,
        m=rs.m,
        c1=rs.c1,
        c2=rs.c2,
        c3=rs.c3,
        alpha=alpha,
        K=K,
        eta=eta,
        a=a,
        b=b,
        beta1=beta1,
        beta2=beta2,
        Delta1=d1,
        Delta2=d2,
        k1=k1,
        k2=k2,
        omega=math.sqrt(K / rs.m),
        H1=H1,
        H2=H2,
        forward=forward,
        inverse=np.linalg.inv(forward),
    )


def energy(sol: OscillatorSolution, n1: int, n2: int) -> float:
    """Level ``(2 n1 + 1) k1 + (2 n2 + 1) k2``, cross-checked against the
    beta form and (when ``Delta2`` is finite) the ``sqrt(1 + Delta)`` form."""
    if n1 < 0 or n2 < 0:
        raise ValueError("quantum numbers must be non-negative")
    E = (2 * n1 + 1) * sol.k1 + (2 * n2 + 1) * sol.k2
    forms = [((n1 + n2 + 1) * sol.beta1 + (n1 - n2) * sol.beta2) / (2 * sol.m)]
    if math.isfinite(sol.Delta2):
        forms.append(
            sol.hbar
            * sol.omega
            / 2
            * (
                (n1 + n2 + 1) * 2 * math.cosh(sol.eta) * math.sqrt(1 + sol.Delta1)
                + (n1 - n2) * 2 * math.sinh(sol.eta) * math.sqrt(1 + sol.Delta2)
            )
        )
    for other in forms:
        if not math.isclose(E, other, rel_tol=_CHECK_RTOL, abs_tol=1e-300):
            raise NcPhaseError(f"energy forms disagree: {E!r} vs {other!r}")
    return E


def energy_commutative(sol: OscillatorSolution, n1: int, n2: int) -> float:
    """Level of the same oscillator with ``mu = nu = 0``."""
    return sol.hbar * sol.omega * (math.exp(sol.eta) * (n1 + 0.5) + math.exp(-sol.eta) * (n2 + 0.5))


def energy_perturbative(sol: OscillatorSolution, n1: int, n2: int) -> float:
    """First-order expansion in ``Delta1, Delta2`` (small mu, nu)."""
    if not math.isfinite(sol.Delta2):
        raise DegenerateHamiltonianError("expansion undefined: Delta2 is infinite (eta = 0)")
    plus, minus = 2 * math.cosh(sol.eta), 2 * math.sinh(sol.eta)
    return sol.hbar * sol.omega * (
        math.exp(sol.eta) * (n1 + 0.5)
        + math.exp(-sol.eta) * (n2 + 0.5)
        + (n1 + n2 + 1) / 4 * plus * sol.Delta1
        + (n1 - n2) / 4 * minus * sol.Delta2
    )


@dataclass(frozen=True)
class WignerState:
    n1: int
    n2: int
    w: GaussLagFn  # over (y1, y2, q1, q2)
    energy: float


def wigner_state(sol: OscillatorSolution, n1: int, n2: int) -> WignerState:
    """Product of the two Wigner functions (ordinary product)."""
    if not (sol.k1 > 0 and sol.k2 > 0):
        raise DegenerateHamiltonianError("k1 and k2 must be positive")
    P1 = sol.H1.to_poly(FLOAT)
    P2 = sol.H2.to_poly(FLOAT)
    exponent = -(P1 / sol.k1) - P2 / sol.k2
    prefactor = laguerre(n1, P1.scale(2 / sol.k1)) * laguerre(n2, P2.scale(2 / sol.k2))
    return WignerState(n1, n2, GaussLagFn(exponent, prefactor), energy(sol, n1, n2))


def to_original_coords(state: WignerState, sol: OscillatorSolution) -> GaussLagFn:
    """The state's Wigner function written in ``(X1, X2, P1, P2)``."""
    return substitute_linear(state.w, sol.forward)


def to_normal_coords(w: GaussLagFn, sol: OscillatorSolution) -> GaussLagFn:
    """Inverse of :func:`to_original_coords`."""
    return substitute_linear(w, sol.inverse)


class TimeEvolution:
    """Closed-form star exponential ``Exp1 * Exp2`` over (y, q) at fixed ``t``."""

    def __init__(self, sol: OscillatorSolution, t):
        self.t = complex(t)
        self.factors = (
            ClosedStarExp(sol.H1, sol.params, t, k=sol.k1, label="k1"),
            ClosedStarExp(sol.H2, sol.params, t, k=sol.k2, label="k2"),
        )

    def __call__(self, *args):
        f1, f2 = self.factors
        return f1(*args) * f2(*args)


def time_evolution(sol: OscillatorSolution, t) -> TimeEvolution:
    return TimeEvolution(sol, t)


def fourier_dirichlet_coupled(sol: OscillatorSolution, t, n_terms: int, pt):
    """Double partial sum over ``(n1, n2) < n_terms`` of
    ``4 (-1)^(n1+n2) exp(-i E t/hbar) W_{n1 n2}`` at points ``pt``.

    The ``2 (-1)^n`` per factor are the expansion weights of each
    unnormalized Wigner function.
    """
    h1 = np.asarray(sol.H1.evaluate(pt), dtype=float)
    h2 = np.asarray(sol.H2.evaluate(pt), dtype=float)
    z1, z2 = 2 * h1 / sol.k1, 2 * h2 / sol.k2
    envelope = np.exp(-h1 / sol.k1 - h2 / sol.k2)
    L1 = [laguerre(n, z1) for n in range(n_terms)]
    L2 = [laguerre(n, z2) for n in range(n_terms)]
    t = complex(t)
    total = np.zeros(np.broadcast(z1, z2).shape, dtype=complex)
    for n1 in range(n_terms):
        for n2 in range(n_terms):
            E = energy(sol, n1, n2)
            weight = 4 * (-1) ** (n1 + n2) * cmath.exp(-1j * E * t / sol.hbar)
            total = total + weight * envelope * L1[n1] * L2[n2]
    return total[()] if total.ndim == 0 else total
