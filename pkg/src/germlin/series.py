"""Truncated multivariate power series over complex scalars.

A :class:`PowerSeries` in ``n`` variables with truncation degree ``order``
stores only nonzero coefficients, keyed by exponent tuples (multi-indices),
in graded-lexicographic order. Every operation truncates eagerly.
"""

from __future__ import annotations

import math
from itertools import combinations_with_replacement
from typing import Iterable, Iterator, Mapping, Sequence

from .scalars import EXACT, Backend, abs2, is_zero, magnitude

__all__ = [
    "INFINITE",
    "MultiIndex",
    "PowerSeries",
    "degree",
    "graded_lex_key",
    "monomials",
    "ps_add",
    "ps_mul",
    "ps_compose",
    "ps_compose_many",
    "ord_x",
]

MultiIndex = tuple

#: ``ord_x`` of the zero series.
INFINITE = math.inf


def degree(k: Sequence[int]) -> int:
    return sum(k)


def graded_lex_key(k: Sequence[int]):
    """Sort key: total degree first, then x1-heavy monomials first."""
    return (sum(k), tuple(-e for e in k))


def monomials(n: int, d: int) -> Iterator[tuple[int, ...]]:
    """All multi-indices in ``n`` variables of total degree ``d``, graded-lex."""
    if n < 1:
        raise ValueError("need at least one variable")
    if d < 0:
        return
    # combinations_with_replacement yields variable choices in lex order
    for combo in combinations_with_replacement(range(n), d):
        k = [0] * n
        for i in combo:
            k[i] += 1
        yield tuple(k)


def _add_index(a, b):
    return tuple([x + y for x, y in zip(a, b)])


class PowerSeries:
    """Immutable truncated power series in ``n`` variables.

    Parameters
    ----------
    n : int
        Number of variables.
    order : int
        Truncation degree; coefficients of higher degree are discarded.
    coeffs : mapping, optional
        Multi-index to scalar. Scalars must belong to ``backend``; zero
        coefficients are dropped.
    backend : Backend
        Coefficient backend, shared by all operands of an operation.
    """

    __slots__ = ("n", "order", "backend", "_coeffs")

    def __init__(self, n: int, order: int, coeffs: Mapping | None = None, backend: Backend = EXACT):
        if n < 0:
            raise ValueError("variable count must be nonnegative")
        if order < 0:
            raise ValueError("truncation degree must be nonnegative")
        clean = {}
        for k, c in (coeffs or {}).items():
            k = tuple(int(e) for e in k)
            if len(k) != n or any(e < 0 for e in k):
                raise ValueError(f"bad multi-index {k} for {n} variables")
            if sum(k) > order:
                continue
            if not backend.owns(c):
                c = backend.convert(c)
            if not is_zero(c):
                clean[k] = c
        self.n = n
        self.order = order
        self.backend = backend
        self._coeffs = dict(sorted(clean.items(), key=lambda kv: graded_lex_key(kv[0])))

    @classmethod
    def _raw(cls, n, order, backend, coeffs: dict):
        # trusted path: indices valid and within order; prunes zeros and sorts
        obj = object.__new__(cls)
        obj.n = n
        obj.order = order
        obj.backend = backend
        obj._coeffs = dict(
            sorted(
                ((k, c) for k, c in coeffs.items() if not is_zero(c)),
                key=lambda kv: graded_lex_key(kv[0]),
            )
        )
        return obj

    # constructors
    @classmethod
    def zero(cls, n: int, order: int, backend: Backend = EXACT):
        return cls._raw(n, order, backend, {})

    @classmethod
    def constant(cls, value, n: int, order: int, backend: Backend = EXACT):
        return cls(n, order, {(0,) * n: value}, backend)

    @classmethod
    def variable(cls, i: int, n: int, order: int, backend: Backend = EXACT):
        """The coordinate function ``z_i`` (0-based ``i``)."""
        if not 0 <= i < n:
            raise ValueError(f"variable index {i} out of range for n={n}")
        k = tuple(1 if p == i else 0 for p in range(n))
        return cls(n, order, {k: backend.one}, backend)

    # access
    def coeff(self, k):
        return self._coeffs.get(tuple(k), self.backend.zero)

    def __getitem__(self, k):
        return self.coeff(k)

    def items(self):
        return self._coeffs.items()

    def indices(self):
        return self._coeffs.keys()

    def __iter__(self):
        return iter(self._coeffs)

    def __len__(self):
        return len(self._coeffs)

    def is_zero(self) -> bool:
        return not self._coeffs

    def homogeneous_part(self, d: int) -> "PowerSeries":
        return PowerSeries._raw(
            self.n, self.order, self.backend, {k: c for k, c in self._coeffs.items() if sum(k) == d}
        )

    def truncate(self, order: int) -> "PowerSeries":
        order = min(order, self.order)
        return PowerSeries._raw(
            self.n, order, self.backend, {k: c for k, c in self._coeffs.items() if sum(k) <= order}
        )

    def with_order(self, order: int) -> "PowerSeries":
        """Same coefficients with a new truncation degree (higher ones dropped)."""
        return PowerSeries._raw(
            self.n, order, self.backend, {k: c for k, c in self._coeffs.items() if sum(k) <= order}
        )

    def valuation(self):
        """Lowest total degree present (``INFINITE`` for the zero series)."""
        if not self._coeffs:
            return INFINITE
        return min(sum(k) for k in self._coeffs)

    def max_abs(self):
        """Largest coefficient modulus (0 for the zero series)."""
        if not self._coeffs:
            return 0
        return magnitude(max(self._coeffs.values(), key=abs2))

    # arithmetic
    def _check(self, other: "PowerSeries"):
        if not isinstance(other, PowerSeries):
            raise TypeError(f"expected PowerSeries, got {type(other).__name__}")
        if other.n != self.n:
            raise ValueError(f"dimension mismatch: {self.n} vs {other.n} variables")
        if other.backend != self.backend:
            raise TypeError(f"backend mismatch: {self.backend} vs {other.backend}")

    def __add__(self, other):
        if not isinstance(other, PowerSeries):
            return self + PowerSeries.constant(other, self.n, self.order, self.backend)
        return ps_add(self, other)

    __radd__ = __add__

    def __neg__(self):
        return PowerSeries._raw(self.n, self.order, self.backend, {k: -c for k, c in self._coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, PowerSeries):
            return ps_mul(self, other)
        other = self.backend.convert(other)
        return PowerSeries._raw(self.n, self.order, self.backend, {k: c * other for k, c in self._coeffs.items()})

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            raise ValueError("negative powers are not supported")
        result = PowerSeries.constant(self.backend.one, self.n, self.order, self.backend)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def __eq__(self, other):
        if not isinstance(other, PowerSeries):
            return NotImplemented
        return (
            self.n == other.n
            and self.order == other.order
            and self.backend == other.backend
            and self._coeffs == other._coeffs
        )

    def __hash__(self):
        return hash((self.n, self.order, tuple(self._coeffs.items())))

    def __repr__(self):
        return f"PowerSeries(n={self.n}, order={self.order}, {self.to_string()})"

    def to_string(self, names: Sequence[str] | None = None) -> str:
        """Human-readable rendering, monomials in graded-lex order."""
        if not self._coeffs:
            return "0"
        names = names or [f"z{i + 1}" for i in range(self.n)]
        parts = []
        for k, c in self._coeffs.items():
            mono = "*".join(
                name if e == 1 else f"{name}^{e}" for name, e in zip(names, k) if e
            )
            text = str(c) if self.backend.exact else _fmt_float(c)
            if not mono:
                parts.append(text)
            elif c == 1:
                parts.append(mono)
            else:
                parts.append(f"{text}*{mono}")
        return " + ".join(parts)


def _fmt_float(c) -> str:
    c = complex(c)
    if c.imag == 0:
        return f"{c.real:.6g}"
    return f"({c.real:.6g}{c.imag:+.6g}i)"


def ps_add(a: PowerSeries, b: PowerSeries) -> PowerSeries:
    """Coefficientwise sum, truncated at ``min(a.order, b.order)``."""
    a._check(b)
    order = min(a.order, b.order)
    out = {k: c for k, c in a._coeffs.items() if sum(k) <= order}
    for k, c in b._coeffs.items():
        if sum(k) > order:
            continue
        if k in out:
            out[k] = out[k] + c
        else:
            out[k] = c
    return PowerSeries._raw(a.n, order, a.backend, out)


def _mul_terms(a: dict, b: dict, limit: int) -> dict:
    # degree-sorted right operand lets the inner loop stop early
    b_list = sorted(((sum(k), k, c) for k, c in b.items()), key=lambda t: t[0])
    out = {}
    for ka, ca in a.items():
        room = limit - sum(ka)
        if room < 0:
            continue
        for db, kb, cb in b_list:
            if db > room:
                break
            k = _add_index(ka, kb)
            prod = ca * cb
            prev = out.get(k)
            out[k] = prod if prev is None else prev + prod
    return out


def ps_mul(a: PowerSeries, b: PowerSeries) -> PowerSeries:
    """Cauchy product with all terms above ``min(a.order, b.order)`` dropped."""
    a._check(b)
    order = min(a.order, b.order)
    return PowerSeries._raw(a.n, order, a.backend, _mul_terms(a._coeffs, b._coeffs, order))


def ps_compose_many(ps: Sequence[PowerSeries], G: Sequence[PowerSeries], N: int) -> list[PowerSeries]:
    """Substitute ``G`` into every series of ``ps``, sharing monomial products.

    Each monomial ``G^k`` is built once from ``G^(k - e_i) * G_i`` (``i`` the
    first nonzero exponent) and reused across all series and monomials.
    """
    if not G:
        raise ValueError("substitution tuple is empty")
    m = G[0].n
    backend = G[0].backend
    for g in G:
        if g.n != m:
            raise ValueError("substituted series have different variable counts")
        if g.backend != backend:
            raise TypeError("backend mismatch in substitution")
        if not is_zero(g.coeff((0,) * m)):
            raise ValueError("substituted series must have zero constant term")
    for p in ps:
        if p.n != len(G):
            raise ValueError(f"dimension mismatch: series in {p.n} variables, {len(G)} substitutes")
        if p.backend != backend:
            raise TypeError("backend mismatch in substitution")
    order = min([N] + [g.order for g in G] + [p.order for p in ps])
    n = len(G)
    gterms = [{k: c for k, c in g._coeffs.items() if sum(k) <= order} for g in G]
    one = {(0,) * m: backend.one}
    cache: dict[tuple, dict] = {(0,) * n: one}

    def power(k):
        hit = cache.get(k)
        if hit is not None:
            return hit
        i = next(p for p, e in enumerate(k) if e)
        prev = list(k)
        prev[i] -= 1
        val = _mul_terms(power(tuple(prev)), gterms[i], order)
        cache[k] = val
        return val

    results = []
    for p in ps:
        acc: dict = {}
        for k, c in p._coeffs.items():
            if sum(k) > order:
                continue
            for kk, v in power(k).items():
                term = c * v
                prev = acc.get(kk)
                acc[kk] = term if prev is None else prev + term
        results.append(PowerSeries._raw(m, order, backend, acc))
    return results


def ps_compose(p: PowerSeries, G: Sequence[PowerSeries], N: int) -> PowerSeries:
    """``p(G_1, ..., G_n)`` truncated at degree ``N``.

    Every ``G_i`` must have zero constant term. The result is also capped by
    the truncation degrees of ``p`` and ``G``, beyond which it is unknown.
    """
    return ps_compose_many([p], G, N)[0]


def ord_x(p: PowerSeries, s: int):
    """Order of vanishing in the first ``s`` variables.

    This is the largest ``m`` with ``p`` in the ideal ``<x_1, ..., x_s>^m``,
    i.e. the smallest x-degree of a stored monomial; ``INFINITE`` for zero.
    """
    if not 1 <= s <= p.n:
        raise ValueError(f"split s={s} out of range 1..{p.n}")
    if p.is_zero():
        return INFINITE
    return min(sum(k[:s]) for k in p.indices())


def identity_tuple(n: int, order: int, backend: Backend = EXACT) -> list[PowerSeries]:
    return [PowerSeries.variable(i, n, order, backend) for i in range(n)]


def from_terms(n: int, order: int, terms: Iterable[tuple[Sequence[int], object]], backend: Backend = EXACT) -> PowerSeries:
    """Build a series from ``(k, c)`` pairs, summing repeated indices."""
    out: dict = {}
    for k, c in terms:
        k = tuple(k)
        c = backend.convert(c) if not backend.owns(c) else c
        out[k] = out[k] + c if k in out else c
    return PowerSeries(n, order, out, backend)
