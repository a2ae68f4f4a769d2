"""Generalized star product on the noncommutative phase space.

The product is the exponential bidifferential operator

    f * g = f exp( sum_ab w_ab <d_a d_b> ) g,     w = (i/2) Pi

with ``Pi`` pairing ``x_i`` with ``p_i`` (hbar), ``x1`` with ``x2`` (mu) and
``p1`` with ``p2`` (nu). When one side is a polynomial of degree ``d`` the
series terminates after ``d`` derivative pairs, so it is summed exactly.
"""

from __future__ import annotations

import cmath
import numbers
from dataclasses import dataclass, field
from functools import cached_property
from math import factorial

import numpy as np

from .errors import (
    BackendMismatchError,
    CausticError,
    ConfigurationError,
    DegenerateHamiltonianError,
    UnsupportedProductError,
)
from .poly import NVARS, ZERO_EXP, DeformationParams, GaussLagFn, PhasePoly, _falling, _as_coords
from .quadratic import PerfectSquareHamiltonian, k_of
from .scalars import BACKENDS, EXACT, FLOAT, CRational, _Q, coerce, imag_unit

_X1, _X2, _P1, _P2 = range(NVARS)


@dataclass(frozen=True)
class StarContext:
    params: DeformationParams
    backend: str = EXACT
    tolerance: float = 1e-10
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if self.backend not in BACKENDS:
            raise ConfigurationError(f"unknown backend {self.backend!r}")
        if self.backend == FLOAT and not self.tolerance > 0:
            raise ConfigurationError("float backend needs a positive tolerance")
        if self.backend == EXACT and not self.params.is_rational:
            raise ConfigurationError("exact backend needs rational hbar, mu, nu")

    @cached_property
    def pairing(self):
        """The 4x4 matrix ``w_ab`` multiplying ``<d_a d_b>`` in the exponent."""
        hbar, mu, nu = self.params.values(self.backend)
        half_i = imag_unit(self.backend) / 2
        zero = coerce(0, self.backend)
        w = [[zero] * NVARS for _ in range(NVARS)]
        for a, b, s in ((_X1, _P1, hbar), (_X2, _P2, hbar), (_X1, _X2, mu), (_P1, _P2, nu)):
            w[a][b] = half_i * s
            w[b][a] = -(half_i * s)
        return w

    @cached_property
    def _entries(self):
        return tuple(
            (a, b, self.pairing[a][b])
            for a in range(NVARS)
            for b in range(NVARS)
            if self.pairing[a][b]
        )

    def lift(self, f):
        if isinstance(f, (PhasePoly, GaussLagFn)):
            if f.backend != self.backend:
                raise BackendMismatchError(
                    f"{f.backend}-backend argument used with a {self.backend} context"
                )
            return f
        if isinstance(f, (numbers.Number, CRational)):
            return PhasePoly.const(f, self.backend)
        raise TypeError(f"cannot star-multiply {type(f).__name__}")

    def is_zero(self, f, scale=1.0) -> bool:
        """Exact zero test, or a tolerance test relative to ``scale`` (float)."""
        poly = f.prefactor if isinstance(f, GaussLagFn) else f
        if self.backend == EXACT:
            return poly.is_zero()
        return float(poly.norm_inf()) <= self.tolerance * max(float(scale), 1e-300)

    # pairing enumeration ------------------------------------------------

    def pairings(self, left_budget, right_budget):
        """All derivative-pair assignments within the budgets.

        Yields ``(L, R, weight)`` where ``L``/``R`` count derivatives on the
        left/right factor per variable and ``weight = prod w^k / k!``. A
        budget of ``None`` is unbounded (the non-polynomial side).
        """
        key = (left_budget, right_budget)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        entries = self._entries
        out = []
        L = [0] * NVARS
        R = [0] * NVARS
        one = coerce(1, self.backend)

        def rec(idx, weight):
            if idx == len(entries):
                out.append((tuple(L), tuple(R), weight))
                return
            a, b, w = entries[idx]
            k = 0
            wk = weight
            while True:
                rec(idx + 1, wk)
                if left_budget is not None and L[a] >= left_budget[a]:
                    break
                if right_budget is not None and R[b] >= right_budget[b]:
                    break
                k += 1
                L[a] += 1
                R[b] += 1
                wk = wk * w / k
            L[a] -= k
            R[b] -= k

        if left_budget is None and right_budget is None:
            raise UnsupportedProductError("at least one factor must be a polynomial")
        rec(0, one)
        out = tuple(out)
        self._cache[key] = out
        return out

    def monomial_product(self, m1, m2):
        """``x^m1 * x^m2`` as a tuple of ``(monomial, coefficient)``."""
        key = ("mono", m1, m2)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        acc = {}
        for L, R, w in self.pairings(m1, m2):
            f = 1
            for e, k in zip(m1, L):
                f *= _falling(e, k)
            for e, k in zip(m2, R):
                f *= _falling(e, k)
            mono = tuple(e1 - l + e2 - r for e1, l, e2, r in zip(m1, L, m2, R))
            c = w * f
            acc[mono] = acc[mono] + c if mono in acc else c
        out = tuple((m, c) for m, c in acc.items() if c)
        self._cache[key] = out
        return out


def _derivatives(g: GaussLagFn):
    """Memoized mixed partials of ``g``, returned as prefactor polynomials."""
    q = g.exponent
    dq = [q.derivative(i) for i in range(NVARS)]
    memo = {ZERO_EXP: g.prefactor}

    def get(R):
        hit = memo.get(R)
        if hit is not None:
            return hit
        i = next(j for j, r in enumerate(R) if r)
        lower = list(R)
        lower[i] -= 1
        d = get(tuple(lower))
        out = d.derivative(i) + d * dq[i]
        memo[R] = out
        return out

    return get


def _poly_star_poly(ctx, f: PhasePoly, g: PhasePoly) -> PhasePoly:
    acc = {}
    for m1, c1 in f.items():
        for m2, c2 in g.items():
            cc = c1 * c2
            for mono, w in ctx.monomial_product(m1, m2):
                v = cc * w
                acc[mono] = acc[mono] + v if mono in acc else v
    return PhasePoly._wrap(acc, ctx.backend)


def _accumulate(acc, poly, shift_mono, c):
    for m, v in poly.items():
        mono = (m[0] + shift_mono[0], m[1] + shift_mono[1], m[2] + shift_mono[2], m[3] + shift_mono[3])
        v = v * c
        acc[mono] = acc[mono] + v if mono in acc else v


def _poly_star_gauss(ctx, f: PhasePoly, g: GaussLagFn) -> GaussLagFn:
    deriv = _derivatives(g)
    acc = {}
    for m1, c1 in f.items():
        for L, R, w in ctx.pairings(m1, None):
            fall = 1
            for e, k in zip(m1, L):
                fall *= _falling(e, k)
            rest = tuple(e - k for e, k in zip(m1, L))
            _accumulate(acc, deriv(R), rest, c1 * w * fall)
    return g.with_prefactor(PhasePoly._wrap(acc, ctx.backend))


def _gauss_star_poly(ctx, g: GaussLagFn, f: PhasePoly) -> GaussLagFn:
    deriv = _derivatives(g)
    acc = {}
    for m2, c2 in f.items():
        for L, R, w in ctx.pairings(None, m2):
            fall = 1
            for e, k in zip(m2, R):
                fall *= _falling(e, k)
            rest = tuple(e - k for e, k in zip(m2, R))
            _accumulate(acc, deriv(L), rest, c2 * w * fall)
    return g.with_prefactor(PhasePoly._wrap(acc, ctx.backend))


# Exact fast path -------------------------------------------------------
#
# Every pairing weight is i^n times a real rational, so exact products of
# real-coefficient inputs can run on plain rationals with the i^n parity
# routed into a separate imaginary accumulator.


_ZERO_Q = _Q(0)


def _real_pairings(ctx, left_budget, right_budget):
    """Pairings within both budgets as ``(L, R, w, imag)`` with the weight
    ``i^n * w`` split into a real rational ``w`` and the parity of ``n``."""
    key = ("real", left_budget, right_budget)
    hit = ctx._cache.get(key)
    if hit is not None:
        return hit
    # every pairing weight is i times a real rational
    entries = [(a, b, w.im) for a, b, w in ctx._entries]
    out = []
    L = [0] * NVARS
    R = [0] * NVARS

    def rec(idx, weight, n):
        if idx == len(entries):
            sign = -1 if (n // 2) % 2 else 1
            out.append((tuple(L), tuple(R), weight * sign, bool(n % 2)))
            return
        a, b, w = entries[idx]
        k = 0
        wk = weight
        while True:
            rec(idx + 1, wk, n + k)
            if left_budget is not None and L[a] >= left_budget[a]:
                break
            if right_budget is not None and R[b] >= right_budget[b]:
                break
            k += 1
            L[a] += 1
            R[b] += 1
            wk = wk * w / k
        L[a] -= k
        R[b] -= k

    rec(0, _Q(1), 0)
    hit = ctx._cache[key] = tuple(out)
    return hit


def _split(poly: PhasePoly):
    re, im = {}, {}
    for m, c in poly.items():
        if c.re:
            re[m] = c.re
        if c.im:
            im[m] = c.im
    return re, im


def _rmul(d1: dict, d2: dict) -> dict:
    out = {}
    for m1, c1 in d1.items():
        for m2, c2 in d2.items():
            m = (m1[0] + m2[0], m1[1] + m2[1], m1[2] + m2[2], m1[3] + m2[3])
            v = c1 * c2
            out[m] = out[m] + v if m in out else v
    return out


def _rderiv(d: dict, i: int) -> dict:
    out = {}
    for m, c in d.items():
        e = m[i]
        if e:
            mm = list(m)
            mm[i] = e - 1
            out[tuple(mm)] = c * e
    return out


def _radd_into(acc: dict, d: dict):
    for m, v in d.items():
        acc[m] = acc[m] + v if m in acc else v


def _rderivatives(q: dict, p: dict):
    dq = [_rderiv(q, i) for i in range(NVARS)]
    memo = {ZERO_EXP: p}

    def get(R):
        hit = memo.get(R)
        if hit is not None:
            return hit
        i = next(j for j, r in enumerate(R) if r)
        lower = list(R)
        lower[i] -= 1
        d = get(tuple(lower))
        out = _rderiv(d, i)
        _radd_into(out, _rmul(d, dq[i]))
        memo[R] = out
        return out

    return get


def _real_monomial_product(ctx, m1, m2):
    """``x^m1 * x^m2`` as ``(real_terms, imag_terms)`` of ``(monomial, rational)``.

    Uncached; :func:`_exact_poly_poly` keeps the per-context table.
    """
    re, im = {}, {}
    for L, R, w, imag in _real_pairings(ctx, m1, m2):
        f = 1
        for e, k in zip(m1, L):
            if k:
                f *= _falling(e, k)
        for e, k in zip(m2, R):
            if k:
                f *= _falling(e, k)
        mono = (m1[0] - L[0] + m2[0] - R[0], m1[1] - L[1] + m2[1] - R[1], m1[2] - L[2] + m2[2] - R[2], m1[3] - L[3] + m2[3] - R[3])
        acc = im if imag else re
        c = w * f
        acc[mono] = acc[mono] + c if mono in acc else c
    return tuple((m, c) for m, c in re.items() if c), tuple((m, c) for m, c in im.items() if c)


def _exact_poly_poly(ctx, f: PhasePoly, g: PhasePoly) -> PhasePoly:
    """Exact polynomial star product in one pass over monomial pairs."""
    re, im = {}, {}
    table = ctx._cache.get("rmono")
    if table is None:
        table = ctx._cache["rmono"] = {}
    gitems = [(m, c.re, c.im) for m, c in g.items()]
    for m1, c1 in f.items():
        a, b = c1.re, c1.im
        row = table.get(m1)
        if row is None:
            row = table[m1] = {}
        for m2, c, d in gitems:
            # (a + ib)(c + id)
            cr = a * c - b * d
            ci = a * d + b * c
            tables = row.get(m2)
            if tables is None:
                tables = row[m2] = _real_monomial_product(ctx, m1, m2)
            terms_re, terms_im = tables
            for m, w in terms_re:
                if cr:
                    v = cr * w
                    re[m] = re[m] + v if m in re else v
                if ci:
                    v = ci * w
                    im[m] = im[m] + v if m in im else v
            # weight i*w: (cr + i ci) i w = -ci w + i cr w
            for m, w in terms_im:
                if ci:
                    v = ci * w
                    re[m] = re[m] - v if m in re else -v
                if cr:
                    v = cr * w
                    im[m] = im[m] + v if m in im else v
    out = {}
    for m in re.keys() | im.keys():
        r, i = re.get(m, _ZERO_Q), im.get(m, _ZERO_Q)
        if r or i:
            out[m] = CRational._raw(r, i)
    return PhasePoly._wrap(out, EXACT)


def _kernel_poly_gauss(ctx, f: dict, deriv, poly_left: bool):
    re, im = {}, {}
    for m1, c1 in f.items():
        budgets = (m1, None) if poly_left else (None, m1)
        for L, R, w, imag in _real_pairings(ctx, *budgets):
            own, other = (L, R) if poly_left else (R, L)
            fall = 1
            for e, k in zip(m1, own):
                if k:
                    fall *= _falling(e, k)
            rest = (m1[0] - own[0], m1[1] - own[1], m1[2] - own[2], m1[3] - own[3])
            coef = c1 * w * fall
            acc = im if imag else re
            for m, v in deriv(other).items():
                mm = (m[0] + rest[0], m[1] + rest[1], m[2] + rest[2], m[3] + rest[3])
                v = v * coef
                acc[mm] = acc[mm] + v if mm in acc else v
    return re, im


def _combine(parts) -> PhasePoly:
    """Sum of ``i^p (re + i im)`` over ``(p, (re, im))``."""
    re_acc, im_acc = {}, {}
    for p, (re, im) in parts:
        p %= 4
        # i^p (re + i im): route each real dict with its sign
        routes = {
            0: ((re_acc, re, 1), (im_acc, im, 1)),
            1: ((re_acc, im, -1), (im_acc, re, 1)),
            2: ((re_acc, re, -1), (im_acc, im, -1)),
            3: ((re_acc, im, 1), (im_acc, re, -1)),
        }[p]
        for acc, d, sign in routes:
            for m, v in d.items():
                if sign < 0:
                    v = -v
                acc[m] = acc[m] + v if m in acc else v
    out = {}
    for m in re_acc.keys() | im_acc.keys():
        r, i = re_acc.get(m, 0), im_acc.get(m, 0)
        if r or i:
            out[m] = CRational(r, i)
    return PhasePoly._wrap(out, EXACT)


def _exact_product(ctx, f, g):
    """Exact star product through the real kernels; ``None`` if the
    Gaussian exponent is not real."""
    if isinstance(f, PhasePoly) and isinstance(g, PhasePoly):
        return _exact_poly_poly(ctx, f, g)
    poly_left = isinstance(f, PhasePoly)
    poly, gauss = (f, g) if poly_left else (g, f)
    q_re, q_im = _split(gauss.exponent)
    if q_im:
        return None
    left = _split(poly)
    right = tuple(_rderivatives(q_re, p) if p else None for p in _split(gauss.prefactor))
    parts = []
    for pa, a in enumerate(left):
        if not a:
            continue
        for pb, deriv in enumerate(right):
            if deriv:
                parts.append((pa + pb, _kernel_poly_gauss(ctx, a, deriv, poly_left)))
    return gauss.with_prefactor(_combine(parts))


def star(ctx: StarContext, f, g):
    """Star product ``f * g``; at least one factor must be a :class:`PhasePoly`."""
    f, g = ctx.lift(f), ctx.lift(g)
    if isinstance(f, GaussLagFn) and isinstance(g, GaussLagFn):
        raise UnsupportedProductError("star product of two GaussLagFn values is not representable")
    if ctx.backend == EXACT:
        out = _exact_product(ctx, f, g)
        if out is not None:
            return out
    if isinstance(f, PhasePoly) and isinstance(g, PhasePoly):
        return _poly_star_poly(ctx, f, g)
    if isinstance(f, PhasePoly):
        return _poly_star_gauss(ctx, f, g)
    if isinstance(g, PhasePoly):
        return _gauss_star_poly(ctx, f, g)
    raise UnsupportedProductError("star product of two GaussLagFn values is not representable")


def moyal_bracket(ctx: StarContext, f, g):
    """``[f, g] = f*g - g*f``."""
    return star(ctx, f, g) - star(ctx, g, f)


def star_power(ctx: StarContext, h: PhasePoly, n: int) -> PhasePoly:
    if n < 0:
        raise ValueError("star_power needs n >= 0")
    h = ctx.lift(h)
    out = PhasePoly.const(1, ctx.backend)
    for _ in range(n):
        out = star(ctx, h, out)
    return out


def star_exp_taylor(ctx: StarContext, h: PhasePoly, N: int):
    """Taylor coefficients in ``t`` of the star exponential, orders ``0..N``.

    The coefficient of ``t^n`` is ``(1/n!) (1/(i hbar))^n (h*)^n``.
    """
    if N < 0:
        raise ValueError("N must be >= 0")
    h = ctx.lift(h)
    hbar = ctx.params.values(ctx.backend)[0]
    step = coerce(1, ctx.backend) / (imag_unit(ctx.backend) * hbar)
    coeffs = [PhasePoly.const(1, ctx.backend)]
    power = coeffs[0]
    for n in range(1, N + 1):
        power = star(ctx, h, power)
        coeffs.append(power.scale(step**n / factorial(n)))
    return coeffs


def star_exp_series(ctx: StarContext, h: PhasePoly, t, N: int) -> PhasePoly:
    """Partial sum ``sum_{n<=N} (1/n!) (t/(i hbar))^n (h*)^n``."""
    t = coerce(t, ctx.backend)
    out = PhasePoly.zero(ctx.backend)
    tn = coerce(1, ctx.backend)
    for c in star_exp_taylor(ctx, h, N):
        out = out + c.scale(tn)
        tn = tn * t
    return out


class ClosedStarExp:
    """Closed-form star exponential of a perfect-square Hamiltonian at fixed ``t``.

    Evaluates ``sec(k t/hbar) exp((H/(i k)) tan(k t/hbar))`` at phase points.
    ``t`` may be complex; ``t = -i tau`` gives the Wick-rotated form.
    """

    def __init__(self, h: PerfectSquareHamiltonian, params: DeformationParams, t, k=None, label="k"):
        k = float(k_of(h, params) if k is None else k)
        if k == 0:
            raise DegenerateHamiltonianError("closed-form exponential needs k != 0")
        hbar = float(params.hbar)
        self.k = k
        self.t = complex(t)
        self.hamiltonian = h.to_poly(FLOAT)
        u = k * self.t / hbar
        cos_u = cmath.cos(u)
        if abs(cos_u) < 1e-12:
            raise CausticError(
                f"caustic: cos({label} t / hbar) = 0 at t={t} with {label}={k!r}", k=k, label=label
            )
        self.prefactor = 1 / cos_u
        self.rate = cmath.tan(u) / (1j * k)

    def __call__(self, *args):
        coords = _as_coords(args[0]) if len(args) == 1 else args
        H = self.hamiltonian.evaluate(coords)
        return self.prefactor * np.exp(H * self.rate)


def star_exp_closed(h: PerfectSquareHamiltonian, ctx: StarContext, t) -> ClosedStarExp:
    return ClosedStarExp(h, ctx.params, t)


def univariate_compose(coeffs, H: PhasePoly) -> PhasePoly:
    """``G(H)`` for ``G = sum coeffs[j] z^j`` using ordinary products."""
    out = PhasePoly.zero(H.backend)
    for c in reversed(list(coeffs)):
        out = out * H + PhasePoly.const(c, H.backend)
    return out


def _univariate_derivative(coeffs):
    return [j * c for j, c in enumerate(coeffs)][1:]


def verify_operator_reduction(ctx: StarContext, h: PerfectSquareHamiltonian, G):
    """Residual between ``H * G(H)`` and ``(H - k^2 d_H - k^2 H d_H^2) G(H)``.

    The left side goes through the star engine, the right side through
    one-variable differentiation. Returns the largest coefficient of the
    difference (exact zero in the exact backend when the identity holds).
    """
    backend = ctx.backend
    H = h.to_poly(backend)
    k = k_of(h, ctx.params)
    if backend == EXACT:
        k = CRational.coerce(k)
    G = [coerce(c, backend) for c in G]
    G1 = _univariate_derivative(G)
    G2 = _univariate_derivative(G1)
    lhs = star(ctx, H, univariate_compose(G, H))
    k2 = k * k
    rhs = H * univariate_compose(G, H) - univariate_compose(G1, H).scale(k2) - (
        H * univariate_compose(G2, H)
    ).scale(k2)
    return (lhs - rhs).norm_inf()
