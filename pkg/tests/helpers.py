"""Independent oracles and hypothesis strategies shared by the test modules.

The oracles deliberately avoid the package's own kernels: series are expanded
through sympy, and small-divisor minima are recomputed with ``Fraction``
pairs in a plain double loop.
"""

from __future__ import annotations

import itertools
import random
from fractions import Fraction

import sympy
from hypothesis import strategies as st

from germlin import EXACT, ExactComplex, GermMap, LinearMap, PowerSeries, germ_compose, germ_inverse

#: pass/fail lines collected by the acceptance module, echoed in the summary
ACCEPTANCE_LINES: list[str] = []

# --- sympy round trip -------------------------------------------------------


def symbols(n):
    return sympy.symbols(f"z1:{n + 1}")


def to_sympy(p: PowerSeries, syms):
    expr = sympy.Integer(0)
    for k, c in p.items():
        coef = sympy.Rational(int(c.re.numerator), int(c.re.denominator)) + sympy.I * sympy.Rational(
            int(c.im.numerator), int(c.im.denominator)
        )
        expr += coef * sympy.Mul(*[s**e for s, e in zip(syms, k)])
    return expr


def from_sympy(expr, syms, N: int) -> dict:
    """Coefficients of a polynomial expression up to total degree ``N``."""
    out = {}
    poly = sympy.Poly(sympy.expand(expr), *syms)
    for k, c in poly.terms():
        if sum(k) > N:
            continue
        re, im = c.as_real_imag()
        value = ExactComplex(Fraction(int(re.p), int(re.q)), Fraction(int(im.p), int(im.q)))
        if value:
            out[tuple(k)] = value
    return out


def naive_compose(p: PowerSeries, G, N: int) -> dict:
    """Full substitution in sympy followed by truncation."""
    syms = symbols(p.n)
    subs = {s: to_sympy(g, symbols(g.n)) for s, g in zip(syms, G)}
    return from_sympy(to_sympy(p, syms).xreplace(subs), symbols(G[0].n), N)


def coeffs(p: PowerSeries) -> dict:
    return dict(p.items())


# --- Fraction-based omega~ brute force ---------------------------------------


def cmul(a, b):
    return (a[0] * b[0] - a[1] * b[1], a[0] * b[1] + a[1] * b[0])


def cpow(a, e):
    out = (Fraction(1), Fraction(0))
    for _ in range(e):
        out = cmul(out, a)
    return out


def brute_omega_sq(values, m: int, exclude: str = "pair"):
    """``omega~(m)**2`` by a double loop over every ``(k, j)``; ``None`` if undefined."""
    n = len(values)
    tables = [[cpow(v, e) for e in range(m + 1)] for v in values]
    best = None
    for k in itertools.product(range(m + 1), repeat=n):
        if not 2 <= sum(k) <= m:
            continue
        pk = (Fraction(1), Fraction(0))
        for p in range(n):
            pk = cmul(pk, tables[p][k[p]])
        sizes = [(pk[0] - v[0]) ** 2 + (pk[1] - v[1]) ** 2 for v in values]
        if exclude == "index" and any(q == 0 for q in sizes):
            continue
        for q in sizes:
            if q != 0 and (best is None or q < best):
                best = q
    return best


# --- random inputs -----------------------------------------------------------


def small_rational(rng: random.Random, lo=-3, hi=3, den=4) -> Fraction:
    return Fraction(rng.randint(lo, hi), rng.randint(1, den))


def random_series(rng: random.Random, n: int, N: int, min_deg=0, density=0.5, complex_coeffs=True):
    terms = {}
    for d in range(min_deg, N + 1):
        for k in itertools.product(range(d + 1), repeat=n):
            if sum(k) != d or rng.random() > density:
                continue
            im = small_rational(rng) if complex_coeffs else 0
            terms[k] = ExactComplex(small_rational(rng), im)
    return PowerSeries(n, N, terms, EXACT)


def random_germ(rng: random.Random, n: int, N: int, max_deg=None, diagonal=None):
    """Random germ with invertible linear part (diagonal when ``diagonal`` is given)."""
    max_deg = N if max_deg is None else max_deg
    while True:
        if diagonal is not None:
            lin = LinearMap.diag([ExactComplex(v) if not isinstance(v, ExactComplex) else v for v in diagonal])
        else:
            lin = LinearMap([[ExactComplex(small_rational(rng)) for _ in range(n)] for _ in range(n)])
        if lin.is_invertible():
            break
    comps = []
    for j, row in enumerate(lin.apply([PowerSeries.variable(i, n, N) for i in range(n)])):
        comps.append(row + random_series(rng, n, min(max_deg, N), min_deg=2).with_order(N))
    return GermMap(comps)


def tangent_to_identity(rng: random.Random, n: int, N: int, max_deg=3, s=None):
    """``z + h(z)`` with ``h`` of degrees ``2..max_deg``.

    With a split ``s`` the x-part of ``h`` has ``ord_x >= 2`` and the y-part
    ``ord_x >= 1``, the shape that preserves the osculating form.
    """
    comps = []
    for j in range(n):
        h = random_series(rng, n, max_deg, min_deg=2, complex_coeffs=False)
        if s is not None:
            need = 2 if j < s else 1
            h = PowerSeries(n, max_deg, {k: c for k, c in h.items() if sum(k[:s]) >= need})
        comps.append(PowerSeries.variable(j, n, N) + h.with_order(N))
    return GermMap(comps)


def conjugate_linear(phi: GermMap, values, N: int) -> GermMap:
    """``phi o diag(values) o phi^-1`` to order ``N``."""
    lin = GermMap.from_linear(LinearMap.diag([ExactComplex(v) for v in values]), N)
    return germ_compose(phi, germ_compose(lin, germ_inverse(phi, N), N), N)


@st.composite
def seeds(draw):
    return random.Random(draw(st.integers(0, 2**32 - 1)))
