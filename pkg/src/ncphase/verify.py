"""Identity checks driven by ``ncphase verify`` and the acceptance tests.

Each suite returns a list of :class:`Check` records. Exact-backend checks
use tolerance 0 (the residual must vanish identically); float checks use a
relative tolerance.
"""

from __future__ import annotations

import math
import random
from dataclasses import asdict, dataclass
from fractions import Fraction

import numpy as np

from . import oscillators as osc
from .poly import DeformationParams, PhasePoly, substitute_linear
from .quadratic import PerfectSquareHamiltonian, fourier_dirichlet_sum, k_of, normalized, wigner_n
from .sampling import random_hamiltonian, random_params, random_poly
from .scalars import EXACT, FLOAT, CRational
from .star import ClosedStarExp, StarContext, moyal_bracket, star, verify_operator_reduction

SUITES = ("algebra", "genvalue", "oscillator", "evolution")


@dataclass
class Check:
    identity: str
    anchor: str
    residual: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.residual <= self.tolerance

    def to_dict(self):
        out = asdict(self)
        out["passed"] = self.passed
        return out


def _residual(poly, scale=1.0) -> float:
    """Largest coefficient of ``poly`` relative to ``scale``."""
    return float(poly.norm_inf()) / max(float(scale), 1e-300)


def _worst(name, anchor, residuals, tol):
    return Check(name, anchor, max(residuals, default=0.0), tol)


# algebra ---------------------------------------------------------------


def coordinate_relations(ctx: StarContext):
    """The six star commutators among x1, x2, p1, p2 minus their targets."""
    hbar, mu, nu = ctx.params.values(ctx.backend)
    i = CRational(0, 1) if ctx.backend == EXACT else 1j
    x1, x2, p1, p2 = PhasePoly.coordinates(ctx.backend)
    pairs = [
        ("[x1,x2]", x1, x2, i * mu),
        ("[p1,p2]", p1, p2, i * nu),
        ("[x1,p1]", x1, p1, i * hbar),
        ("[x2,p2]", x2, p2, i * hbar),
        ("[x1,p2]", x1, p2, 0),
        ("[x2,p1]", x2, p1, 0),
    ]
    return [(name, moyal_bracket(ctx, f, g) - target) for name, f, g, target in pairs]


def rotation_345(backend=EXACT):
    """Rotation by the angle with cos = 4/5, sin = 3/5 applied to both pairs."""
    c, s = Fraction(4, 5), Fraction(3, 5)
    return [[c, -s, 0, 0], [s, c, 0, 0], [0, 0, c, -s], [0, 0, s, c]]


def algebra_suite(params: DeformationParams, backend=EXACT, samples=200, seed=0, tolerance=1e-10):
    ctx = StarContext(params, backend, tolerance)
    tol = 0.0 if backend == EXACT else tolerance
    rng = random.Random(seed)
    checks = []
    for name, res in coordinate_relations(ctx):
        checks.append(Check(f"{name} star commutator", "coordinate commutation relations", _residual(res), tol))

    def rand(real=False):
        return random_poly(rng, 3, 4, complex_coeffs=not real, backend=backend)

    assoc, conj, jacobi, rot = [], [], [], []
    R = rotation_345()
    for _ in range(samples):
        f, g, h = rand(), rand(), rand()
        lhs = star(ctx, star(ctx, f, g), h)
        rhs = star(ctx, f, star(ctx, g, h))
        assoc.append(_residual(lhs - rhs, 1 if backend == EXACT else lhs.norm_inf()))
    for _ in range(max(1, samples // 4)):
        f, g = rand(real=True), rand(real=True)
        fg = star(ctx, f, g)
        conj.append(_residual(fg.conj() - star(ctx, g.conj(), f.conj()), 1 if backend == EXACT else fg.norm_inf()))
        f, g, h = rand(), rand(), rand()
        jac = (
            moyal_bracket(ctx, f, moyal_bracket(ctx, g, h))
            + moyal_bracket(ctx, g, moyal_bracket(ctx, h, f))
            + moyal_bracket(ctx, h, moyal_bracket(ctx, f, g))
        )
        jacobi.append(_residual(jac, 1 if backend == EXACT else max(float(p.norm_inf()) for p in (f, g, h)) ** 3))
        if backend == EXACT:
            f, g = rand(), rand()
            lhs = star(ctx, substitute_linear(f, R), substitute_linear(g, R))
            rhs = substitute_linear(star(ctx, f, g), R)
            rot.append(_residual(lhs - rhs))
    checks.append(_worst(f"associativity over {samples} random triples", "associativity", assoc, tol))
    checks.append(_worst("conj(f*g) = conj(g)*conj(f)", "complex conjugation", conj, tol))
    checks.append(_worst("Jacobi identity", "Moyal bracket", jacobi, tol))
    if rot:
        checks.append(_worst("rotation commutes with star", "rotation invariance", rot, tol))
    return checks


# genvalue --------------------------------------------------------------


def genvalue_suite(params: DeformationParams | None = None, samples=20, n_max=5, seed=0, backend=EXACT, tolerance=1e-10):
    """Operator reduction and star-genvalue identities on random rational
    perfect-square Hamiltonians (random deformation if ``params`` is None)."""
    rng = random.Random(seed)
    tol = 0.0 if backend == EXACT else tolerance
    reduction, left, right = [], [], []
    for _ in range(samples):
        p = params if params is not None else random_params(rng)
        ctx = StarContext(p, backend, tolerance)
        h = random_hamiltonian(rng, p)
        H = h.to_poly(backend)
        for G in ([1], [0, 1], [0, 0, 1], [0, 0, 0, 1]):
            r = verify_operator_reduction(ctx, h, G)
            reduction.append(float(r) if backend == EXACT else float(r) / max(1.0, float(H.norm_inf()) ** (len(G))))
        _, k = normalized(h, p)
        for n in range(n_max + 1):
            W = wigner_n(h, p, n, backend)
            E = (2 * n + 1) * (k if backend == EXACT else float(k))
            scale = 1 if backend == EXACT else W.prefactor.norm_inf() * max(1.0, float(H.norm_inf()))
            left.append(_residual((star(ctx, H, W) - W * E).prefactor, scale))
            right.append(_residual((star(ctx, W, H) - W * E).prefactor, scale))
    return [
        _worst("H*G(H) = (H - k^2 d_H - k^2 H d_H^2) G(H), G in {1,H,H^2,H^3}", "one-variable reduction", reduction, tol),
        _worst(f"H*W_n = (2n+1) k W_n, n <= {n_max}", "star-genvalue equation", left, tol),
        _worst(f"W_n*H = (2n+1) k W_n, n <= {n_max}", "star-genvalue equation", right, tol),
    ]


# oscillator ------------------------------------------------------------


def decomposition_residuals(sol: osc.OscillatorSolution, ctx: StarContext):
    A, B = sol.H1.to_poly(FLOAT), sol.H2.to_poly(FLOAT)
    scale = float(A.norm_inf()) * float(B.norm_inf())
    return (
        _residual(moyal_bracket(ctx, A, B), scale),
        _residual(star(ctx, A, B) - A * B, scale),
    )


def state_genvalue_residual(sol, ctx, n1, n2):
    state = osc.wigner_state(sol, n1, n2)
    H = sol.hamiltonian()
    W = state.w
    res = max(
        _residual((star(ctx, H, W) - W * state.energy).prefactor, W.prefactor.norm_inf()),
        _residual((star(ctx, W, H) - W * state.energy).prefactor, W.prefactor.norm_inf()),
    )
    return res


def part_genvalue_residual(h: PerfectSquareHamiltonian, k: float, ctx, n):
    W = wigner_n(h, ctx.params, n, FLOAT)
    H = h.to_poly(FLOAT)
    E = (2 * n + 1) * k
    return max(
        _residual((star(ctx, H, W) - W * E).prefactor, W.prefactor.norm_inf()),
        _residual((star(ctx, W, H) - W * E).prefactor, W.prefactor.norm_inf()),
    )


def _linear_images(M):
    return [PhasePoly.linear(list(row), backend=FLOAT) for row in np.asarray(M, dtype=float)]


def transformed_relations(ctx: StarContext, M):
    """Star commutators of the image coordinates ``M xi`` minus their targets."""
    y1, y2, q1, q2 = _linear_images(M)
    hbar, mu, nu = ctx.params.values(FLOAT)
    targets = [
        (y1, y2, 1j * mu),
        (q1, q2, 1j * nu),
        (y1, q1, 1j * hbar),
        (y2, q2, 1j * hbar),
        (y1, q2, 0),
        (y2, q1, 0),
    ]
    worst = 0.0
    for f, g, t in targets:
        br = moyal_bracket(ctx, f, g)
        if br.degree > 0:
            return math.inf
        worst = max(worst, abs(complex(br.coeff((0, 0, 0, 0))) - t))
    return worst


def oscillator_suite(spec: osc.CoupledOscillatorSpec, params: DeformationParams, tolerance=1e-10, n_max=2, seed=0):
    sol = osc.solve(spec, params)
    ctx = StarContext(params, FLOAT, tolerance)
    rng = random.Random(seed)
    checks = []
    target = sol.hamiltonian()
    sums = []
    for _ in range(100):
        a, b = rng.uniform(-math.pi, math.pi), rng.uniform(-math.pi, math.pi)
        H1, H2 = osc.build_decomposition(sol.K, sol.m, sol.eta, a, b)
        sums.append(_residual(H1.to_poly(FLOAT) + H2.to_poly(FLOAT) - target, target.norm_inf()))
    checks.append(_worst("H1 + H2 = decoupled Hamiltonian for random (a, b)", "decomposition sum", sums, 1e-12))
    bracket, ordinary = decomposition_residuals(sol, ctx)
    checks.append(Check("[H1, H2] star commutator vanishes", "decomposition angles", bracket, tolerance))
    checks.append(Check("H1*H2 = H1 H2", "decomposition angles", ordinary, tolerance))
    k1a, k2a = osc.k_from_angles(sol.K, sol.m, sol.eta, sol.a, sol.b, params)
    k1b, k2b = float(k_of(sol.H1, params)), float(k_of(sol.H2, params))
    checks.append(Check("k1: beta form = angle form = k of H1", "k1, k2", max(abs(sol.k1 - k1a), abs(sol.k1 - k1b)) / sol.k1, tolerance))
    checks.append(Check("k2: beta form = angle form = k of H2", "k1, k2", max(abs(sol.k2 - k2a), abs(sol.k2 - k2b)) / sol.k2, tolerance))
    hbar, mu, nu = params.values(FLOAT)
    lhs = sol.beta1**2 - sol.beta2**2
    rhs = 4 * sol.K * sol.m * (hbar * hbar - mu * nu)
    checks.append(Check("beta1^2 - beta2^2 = 4 K m (hbar^2 - mu nu)", "betas", abs(lhs - rhs) / abs(rhs), tolerance))
    back = substitute_linear(target, sol.forward)
    original = spec.hamiltonian()
    checks.append(Check("rescale + rotate maps H0 to the decoupled form", "normal form", _residual(back - original, original.norm_inf()), tolerance))
    checks.append(Check("transformed coordinates keep the commutation relations", "coordinate chain", transformed_relations(ctx, sol.forward), tolerance))
    parts = []
    for n in range(n_max + 1):
        parts.append(part_genvalue_residual(sol.H1, sol.k1, ctx, n))
        parts.append(part_genvalue_residual(sol.H2, sol.k2, ctx, n))
    checks.append(_worst(f"H_i*W_n = (2n+1) k_i W_n for each part, n <= {n_max}", "star-genvalue equation", parts, tolerance))
    states = [state_genvalue_residual(sol, ctx, n1, n2) for n1 in range(n_max + 1) for n2 in range(n_max + 1)]
    checks.append(_worst(f"H*W_(n1 n2) = E W_(n1 n2), n1, n2 <= {n_max}", "product Wigner states", states, tolerance))
    spectra = []
    for n1 in range(n_max + 1):
        for n2 in range(n_max + 1):
            E = osc.energy(sol, n1, n2)
            spectra.append(abs(E - ((2 * n1 + 1) * k1b + (2 * n2 + 1) * k2b)) / E)
    checks.append(_worst("energy = sum of (2n+1) k_i with k_i of each part", "spectrum", spectra, tolerance))
    return checks


# evolution -------------------------------------------------------------


def interior_points(count=10, half_width=1.0, fixed=(0.3, -0.2)):
    """``count x count`` grid over (y1, q2) with y2, q1 held fixed."""
    axis = np.linspace(-half_width, half_width, count)
    g1, g2 = np.meshgrid(axis, axis, indexing="ij")
    y2 = np.full_like(g1, fixed[0])
    q1 = np.full_like(g1, fixed[1])
    return (g1.ravel(), y2.ravel(), q1.ravel(), g2.ravel())


def evolution_suite(spec: osc.CoupledOscillatorSpec, params: DeformationParams, taus=(0.5,), n_terms=25, tolerance=1e-6):
    checks = []
    unit = PerfectSquareHamiltonian((1, 0), (0, 0), (0, 0), (1, 0))
    unit_params = DeformationParams(1)
    pts = interior_points()
    for tau in taus:
        closed = ClosedStarExp(unit, unit_params, -1j * tau)(pts)
        series = fourier_dirichlet_sum(unit, unit_params, -1j * tau, n_terms, pts)
        checks.append(Check(f"single oscillator, tau={tau}: partial sums vs closed form", "Fourier-Dirichlet expansion", float(np.max(np.abs(closed - series))), tolerance))
    sol = osc.solve(spec, params)
    for tau in taus:
        closed = osc.time_evolution(sol, -1j * tau)(pts)
        series = osc.fourier_dirichlet_coupled(sol, -1j * tau, n_terms, pts)
        checks.append(Check(f"coupled, tau={tau}: {n_terms}x{n_terms} partial sums vs closed product", "Fourier-Dirichlet expansion", float(np.max(np.abs(closed - series))), tolerance))
    return checks
