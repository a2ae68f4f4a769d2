"""Reference computations that share no code with the package.

The star product here is the bidifferential exponential expanded term by
term with sympy: order n sums over all length-n sequences of index pairs.
"""

from math import factorial
from itertools import product

import sympy as sp

X = sp.symbols("x1 x2 p1 p2")


def omega(hbar, mu, nu):
    """``(i/2) Pi`` with Pi the antisymmetric bracket matrix."""
    hbar, mu, nu = (sp.nsimplify(v) for v in (hbar, mu, nu))
    P = sp.zeros(4, 4)
    P[0, 2], P[1, 3] = hbar, hbar
    P[0, 1], P[2, 3] = mu, nu
    P = P - P.T
    return sp.I / 2 * P


def to_sympy(obj):
    if hasattr(obj, "exponent"):
        return sp.exp(to_sympy(obj.exponent)) * to_sympy(obj.prefactor)
    poly = obj
    expr = sp.Integer(0)
    for mono, c in poly.items():
        term = _num(c)
        for v, e in zip(X, mono):
            term *= v**e
        expr += term
    return sp.expand(expr)


def _num(c):
    if hasattr(c, "re"):
        return _rat(c.re) + sp.I * _rat(c.im)
    if isinstance(c, complex):
        return sp.Float(c.real) + sp.I * sp.Float(c.imag)
    return _rat(c)


def _rat(v):
    return sp.Rational(int(v.numerator), int(v.denominator))


def _degree(e):
    return sp.Poly(e, *X).total_degree() if e.is_polynomial(*X) else None


def star(f, g, hbar=1, mu=0, nu=0):
    """``f * g``; at least one factor must be a polynomial."""
    w = omega(hbar, mu, nu)
    pairs = [(a, b) for a in range(4) for b in range(4) if w[a, b] != 0]
    deg = min(d for d in (_degree(f), _degree(g)) if d is not None)
    total = f * g
    for n in range(1, deg + 1):
        acc = sp.Integer(0)
        for seq in product(pairs, repeat=n):
            weight = sp.Integer(1)
            df, dg = f, g
            for a, b in seq:
                weight *= w[a, b]
                df = sp.diff(df, X[a])
                dg = sp.diff(dg, X[b])
                if df == 0 or dg == 0:
                    break
            else:
                acc += weight * df * dg
        total += acc / factorial(n)
    return sp.expand(total)


def closed_exp_series(H, k, hbar, N):
    """Taylor coefficients in t of ``sec(kt/hbar) exp((H/(ik)) tan(kt/hbar))``."""
    t = sp.Symbol("t")
    k, hbar = sp.nsimplify(k), sp.nsimplify(hbar)
    expr = sp.sec(k * t / hbar) * sp.exp(H / (sp.I * k) * sp.tan(k * t / hbar))
    ser = sp.series(expr, t, 0, N + 1).removeO()
    return [sp.expand(ser.coeff(t, n)) for n in range(N + 1)]
