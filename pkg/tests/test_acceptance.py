"""Acceptance criteria 1-8.

Each criterion is a function returning ``(passed, detail)``. Under pytest
every criterion is its own test and the PASS/FAIL lines are printed in the
terminal summary; ``python tests/test_acceptance.py`` prints them directly.
"""

import math
import random
import time
from fractions import Fraction

import numpy as np
import pytest

from ncphase import oscillators as osc
from ncphase.poly import DeformationParams, PhasePoly, gausslag_eval
from ncphase.quadratic import normalized, wigner_n
from ncphase.sampling import random_hamiltonian, random_params, random_poly
from ncphase.scalars import FLOAT, CRational
from ncphase.star import StarContext, moyal_bracket, star, verify_operator_reduction
from ncphase.verify import interior_points, part_genvalue_residual, state_genvalue_residual

RESULTS = {}

EVOLUTION_SPEC = osc.CoupledOscillatorSpec(1, 1, 9, 8, 2)
EVOLUTION_PARAMS = DeformationParams(1.0, 0.3, -0.2)


def random_spec(rng):
    m1, m2 = rng.uniform(0.5, 2), rng.uniform(0.5, 2)
    C1, C2 = rng.uniform(0.5, 5), rng.uniform(0.5, 5)
    C3 = rng.uniform(-0.95, 0.95) * 2 * math.sqrt(C1 * C2)
    return osc.CoupledOscillatorSpec(m1, m2, C1, C2, C3)


def random_deformation(rng, hbar=1.0):
    while True:
        mu, nu = rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5)
        if hbar * hbar > mu * nu:
            return DeformationParams(hbar, mu, nu)


def criterion_1():
    start = time.perf_counter()
    params = DeformationParams(Fraction(3, 2), Fraction(1, 3), Fraction(-2, 5))
    ctx = StarContext(params)
    hbar, mu, nu = params.values("exact")
    i = CRational(0, 1)
    x1, x2, p1, p2 = PhasePoly.coordinates()
    relations = [
        moyal_bracket(ctx, x1, x2) - i * mu,
        moyal_bracket(ctx, p1, p2) - i * nu,
        moyal_bracket(ctx, x1, p1) - i * hbar,
        moyal_bracket(ctx, x2, p2) - i * hbar,
        moyal_bracket(ctx, x1, p2),
        moyal_bracket(ctx, x2, p1),
    ]
    worst_rel = max(r.norm_inf() for r in relations)
    rng = random.Random(2024)
    worst_assoc = 0
    for _ in range(1000):
        f, g, h = (random_poly(rng, 3, 4) for _ in range(3))
        worst_assoc = max(worst_assoc, (star(ctx, star(ctx, f, g), h) - star(ctx, f, star(ctx, g, h))).norm_inf())
    elapsed = time.perf_counter() - start
    ok = worst_rel == 0 and worst_assoc == 0 and elapsed < 10
    return ok, f"relations residual {worst_rel}, associativity residual {worst_assoc} over 1000 triples, {elapsed:.2f} s"


def criterion_2():
    rng = random.Random(7)
    worst = 0
    for _ in range(100):
        params = random_params(rng)
        ctx = StarContext(params)
        h = random_hamiltonian(rng, params)
        for G in ([1], [0, 1], [0, 0, 1], [0, 0, 0, 1]):
            worst = max(worst, verify_operator_reduction(ctx, h, G))
    return worst == 0, f"max residual {worst} over 100 Hamiltonians x 4 G"


def criterion_3():
    rng = random.Random(11)
    exact_worst = 0
    for _ in range(50):
        params = random_params(rng)
        ctx = StarContext(params)
        h = random_hamiltonian(rng, params)
        _, k = normalized(h, params)
        H = h.to_poly()
        for n in range(6):
            W = wigner_n(h, params, n)
            E = (2 * n + 1) * k
            exact_worst = max(exact_worst, (star(ctx, H, W) - W * E).prefactor.norm_inf())
            exact_worst = max(exact_worst, (star(ctx, W, H) - W * E).prefactor.norm_inf())
    frng = random.Random(12)
    float_worst = 0.0
    for _ in range(5):
        params = random_deformation(frng)
        sol = osc.solve(random_spec(frng), params)
        ctx = StarContext(params, FLOAT)
        for n in range(4):
            float_worst = max(float_worst, part_genvalue_residual(sol.H1, sol.k1, ctx, n), part_genvalue_residual(sol.H2, sol.k2, ctx, n))
        for n1 in range(3):
            for n2 in range(3):
                float_worst = max(float_worst, state_genvalue_residual(sol, ctx, n1, n2))
    ok = exact_worst == 0 and float_worst < 1e-10
    return ok, f"exact residual {exact_worst} (50 H, n<=5); float relative residual {float_worst:.2e}"


def criterion_4():
    rng = random.Random(13)
    worst_bracket = worst_product = 0.0
    for _ in range(50):
        params = random_deformation(rng)
        sol = osc.solve(random_spec(rng), params)
        ctx = StarContext(params, FLOAT)
        A, B = sol.H1.to_poly(FLOAT), sol.H2.to_poly(FLOAT)
        scale = max(1.0, A.norm_inf() * B.norm_inf())
        worst_bracket = max(worst_bracket, moyal_bracket(ctx, A, B).norm_inf() / scale)
        worst_product = max(worst_product, (star(ctx, A, B) - A * B).norm_inf() / scale)
    ok = worst_bracket < 1e-10 and worst_product < 1e-10
    return ok, f"[H1,H2] {worst_bracket:.2e}, H1*H2 - H1H2 {worst_product:.2e} over 50 specs"


def _reference_constants(spec):
    m = math.sqrt(spec.m1 * spec.m2)
    c1 = spec.C1 * math.sqrt(spec.m2 / spec.m1)
    c2 = spec.C2 * math.sqrt(spec.m1 / spec.m2)
    c3 = spec.C3
    root = math.sqrt(4 * c1 * c2 - c3 * c3)
    K = root / 2
    eta = 0.5 * math.log((c1 + c2 + math.sqrt((c1 - c2) ** 2 + c3 * c3)) / root)
    return m, K, eta


def criterion_5():
    rng = random.Random(17)
    hbar = 1.3
    spec_err = exp_err = 0.0
    for _ in range(5):
        spec = random_spec(rng)
        sol = osc.solve(spec, DeformationParams(hbar))
        m, K, eta = _reference_constants(spec)
        omega = math.sqrt(K / m)
        for n1 in range(6):
            for n2 in range(6):
                ref = hbar * omega * (math.exp(eta) * (n1 + 0.5) + math.exp(-eta) * (n2 + 0.5))
                spec_err = max(spec_err, abs(osc.energy(sol, n1, n2) - ref) / ref)
        y1, y2, q1, q2 = PhasePoly.coordinates(FLOAT)
        r, e = math.sqrt(K * m), math.exp(eta)
        expected = -(q1 * q1 / e + q2 * q2 * e) / (hbar * r) - (y1 * y1 * e + y2 * y2 / e) * (r / hbar)
        got = osc.wigner_state(sol, 0, 0).w.exponent
        exp_err = max(exp_err, (got - expected).norm_inf() / expected.norm_inf())
    theta_err = 0.0
    unit = osc.CoupledOscillatorSpec(1, 1, 1, 1, 0)
    for theta in (0.1, 0.5, 1.0):
        hb = 1.0
        sol = osc.solve(unit, DeformationParams(hb, theta, -theta))
        root = math.sqrt(hb * hb + theta * theta)
        theta_err = max(theta_err, abs(sol.k1 - root / 2) / (root / 2), abs(sol.k2 - root / 2) / (root / 2))
        for n1 in range(6):
            for n2 in range(6):
                ref = (n1 + n2 + 1) * root
                theta_err = max(theta_err, abs(osc.energy(sol, n1, n2) - ref) / ref)
    ok = spec_err < 1e-12 and exp_err < 1e-12 and theta_err < 1e-12
    return ok, f"commutative spectrum {spec_err:.1e}, exponent {exp_err:.1e}; theta case {theta_err:.1e}"


def criterion_6():
    spec = osc.CoupledOscillatorSpec(1.3, 0.7, 9, 8, 2)
    eps = np.array([1e-1, 1e-2, 1e-3])
    slopes = []
    for n1, n2 in ((0, 0), (1, 2), (3, 1)):
        errs = []
        for e in eps:
            sol = osc.solve(spec, DeformationParams(1.0, 0.5 * e, -0.3 * e))
            errs.append(abs(osc.energy(sol, n1, n2) - osc.energy_perturbative(sol, n1, n2)))
        slopes.append(np.polyfit(np.log10(eps), np.log10(errs), 1)[0])
    ok = all(abs(s - 4) <= 0.2 for s in slopes)
    return ok, "log-log slopes " + ", ".join(f"{s:.3f}" for s in slopes)


def criterion_7():
    start = time.perf_counter()
    sol = osc.solve(EVOLUTION_SPEC, EVOLUTION_PARAMS)
    pts = interior_points(10)
    worst = {}
    for tau in (0.3, 0.5, 1.0):
        closed = osc.time_evolution(sol, -1j * tau)(pts)
        series = osc.fourier_dirichlet_coupled(sol, -1j * tau, 25, pts)
        worst[tau] = float(np.max(np.abs(closed - series)))
    elapsed = time.perf_counter() - start
    ok = all(v < 1e-6 for v in worst.values()) and elapsed < 60
    return ok, ", ".join(f"tau={t}: {v:.1e}" for t, v in worst.items()) + f", {elapsed:.2f} s"


def criterion_8():
    rng = np.random.default_rng(19)
    prng = random.Random(19)
    worst = 0.0
    for _ in range(4):
        params = random_deformation(prng)
        sol = osc.solve(random_spec(prng), params)
        state = osc.wigner_state(sol, int(rng.integers(0, 3)), int(rng.integers(0, 3)))
        w_orig = osc.to_original_coords(state, sol)
        back = osc.to_normal_coords(w_orig, sol)
        for _ in range(25):
            X = rng.uniform(-1, 1, 4)
            Y = np.asarray(sol.to_normal(X))
            ref = gausslag_eval(state.w, Y)
            worst = max(worst, abs(gausslag_eval(w_orig, X) - ref) / max(1.0, abs(ref)))
            worst = max(worst, abs(gausslag_eval(back, Y) - ref) / max(1.0, abs(ref)))
    return worst < 1e-12, f"max deviation {worst:.1e} at 100 random points"


CRITERIA = {
    1: ("exact star algebra", criterion_1),
    2: ("operator reduction", criterion_2),
    3: ("star-genvalue equation", criterion_3),
    4: ("decomposition identities", criterion_4),
    5: ("special-case regressions", criterion_5),
    6: ("perturbative shift", criterion_6),
    7: ("evolution consistency", criterion_7),
    8: ("coordinate round trip", criterion_8),
}


def line(n, ok, detail):
    return f"AC{n} {'PASS' if ok else 'FAIL'} {CRITERIA[n][0]}: {detail}"


@pytest.mark.parametrize("n", sorted(CRITERIA))
def test_acceptance(n):
    ok, detail = CRITERIA[n][1]()
    RESULTS[n] = line(n, ok, detail)
    print(RESULTS[n])
    assert ok, RESULTS[n]


if __name__ == "__main__":
    for n, (_, fn) in sorted(CRITERIA.items()):
        print(line(n, *fn()), flush=True)
