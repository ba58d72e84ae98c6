"""Coordinate-level osculating conditions in adapted coordinates ``z = (x, y)``.

The first ``s`` variables are ``x``; the invariant manifold is ``M = {x = 0}``.

* osc: every x-component is ``sum_p a_ip x_p + fhat_i`` with ``ord_x(fhat_i) >= 2``.
* osc3: osc, and every y-component is linear plus a remainder with
  ``ord_x >= 1``; equivalently the restriction to ``M`` is linear.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .errors import ManifoldNotInvariant
from .germ import GermMap
from .scalars import backend_of
from .series import PowerSeries, ord_x

__all__ = [
    "Witness",
    "OscCheck",
    "SplitGerm",
    "split_germ",
    "check_osc",
    "check_osc3",
    "restrict_to_M",
]


@dataclass(frozen=True)
class Witness:
    """Offending monomial: germ ``h`` and ``component`` are 1-based."""

    h: int
    component: int
    k: tuple
    coefficient: object
    reason: str

    def as_record(self) -> dict:
        c = self.coefficient
        return {
            "h": self.h,
            "component": self.component,
            "k": list(self.k),
            "coefficient": list(backend_of(c).format(c)),
            "reason": self.reason,
        }


@dataclass(frozen=True)
class OscCheck:
    ok: bool
    witnesses: list = field(default_factory=list)

    def __bool__(self):
        return self.ok

    def as_record(self) -> dict:
        return {"ok": self.ok, "witnesses": [w.as_record() for w in self.witnesses]}


@dataclass(frozen=True)
class SplitGerm:
    """A germ decomposed along the split.

    ``x_linear[i]`` holds ``a_i1..a_is``; ``x_remainders[i]`` is the rest of
    x-component ``i``. ``y_linear[j]`` is the full degree-1 row of
    y-component ``j`` and ``y_remainders[j]`` its nonlinear part.
    """

    germ: GermMap
    s: int
    x_linear: tuple
    x_remainders: tuple
    y_linear: tuple
    y_remainders: tuple

    def recompose(self) -> GermMap:
        g = self.germ
        n = g.n
        comps = []
        for row, rem in zip(self.x_linear, self.x_remainders):
            lin = {_unit(p, n): a for p, a in enumerate(row)}
            comps.append(PowerSeries(n, g.order, lin, g.backend) + rem)
        for row, rem in zip(self.y_linear, self.y_remainders):
            lin = {_unit(p, n): a for p, a in enumerate(row)}
            comps.append(PowerSeries(n, g.order, lin, g.backend) + rem)
        return GermMap(comps, check_invertible=False)


def _unit(p: int, n: int) -> tuple:
    return tuple(1 if i == p else 0 for i in range(n))


def _check_split(germ: GermMap, s: int):
    if not 1 <= s <= germ.n:
        raise ValueError(f"split s={s} out of range 1..{germ.n}")


def split_germ(germ: GermMap, s: int) -> SplitGerm:
    _check_split(germ, s)
    n = germ.n
    L = germ.linear
    x_lin, x_rem, y_lin, y_rem = [], [], [], []
    for i in range(s):
        row = tuple(L[i, p] for p in range(s))
        comp = germ.components[i]
        rem = {k: c for k, c in comp.items() if not (sum(k) == 1 and sum(k[:s]) == 1)}
        x_lin.append(row)
        x_rem.append(PowerSeries(n, germ.order, rem, germ.backend))
    for j in range(s, n):
        comp = germ.components[j]
        y_lin.append(tuple(L[j, p] for p in range(n)))
        y_rem.append(PowerSeries(n, germ.order, {k: c for k, c in comp.items() if sum(k) >= 2}, germ.backend))
    return SplitGerm(germ, s, tuple(x_lin), tuple(x_rem), tuple(y_lin), tuple(y_rem))


def _osc_witnesses(h: int, germ: GermMap, s: int, N: int) -> list[Witness]:
    out = []
    for i in range(s):
        for k, c in germ.components[i].items():
            d = sum(k)
            if d > N:
                continue
            xdeg = sum(k[:s])
            if d == 1 and xdeg == 0:
                out.append(Witness(h, i + 1, k, c, "x-component linear term in y"))
            elif d >= 2 and xdeg < 2:
                out.append(Witness(h, i + 1, k, c, f"ord_x of x-remainder is {xdeg} < 2"))
    return out


def _osc3_extra_witnesses(h: int, germ: GermMap, s: int, N: int) -> list[Witness]:
    out = []
    for j in range(s, germ.n):
        for k, c in germ.components[j].items():
            d = sum(k)
            if 2 <= d <= N and sum(k[:s]) == 0:
                out.append(Witness(h, j + 1, k, c, "y-remainder has ord_x 0 (restriction to M is nonlinear)"))
    return out


def check_osc(germs: Sequence[GermMap], s: int, N: int | None = None) -> OscCheck:
    """Osculating form: x-components are linear in ``x`` plus ``ord_x >= 2`` terms."""
    witnesses = []
    for h, g in enumerate(germs, 1):
        _check_split(g, s)
        witnesses += _osc_witnesses(h, g, s, g.order if N is None else N)
    return OscCheck(not witnesses, witnesses)


def check_osc3(germs: Sequence[GermMap], s: int, N: int | None = None) -> OscCheck:
    """Osculating form plus linear restriction to ``M = {x = 0}``."""
    witnesses = []
    for h, g in enumerate(germs, 1):
        _check_split(g, s)
        M = g.order if N is None else N
        witnesses += _osc_witnesses(h, g, s, M)
        witnesses += _osc3_extra_witnesses(h, g, s, M)
    return OscCheck(not witnesses, witnesses)


def restrict_to_M(f: GermMap, s: int) -> GermMap:
    """``f|_M`` as a germ in the ``r = n - s`` variables ``y``.

    Raises :class:`ManifoldNotInvariant` when an x-component has a pure-y
    monomial, since then ``f`` does not map ``{x = 0}`` into itself.
    """
    _check_split(f, s)
    n = f.n
    if s == n:
        raise ValueError("M = {x=0} is the origin when s = n; nothing to restrict")
    for i in range(s):
        comp = f.components[i]
        if not comp.is_zero() and ord_x(comp, s) < 1:
            k, c = next((k, c) for k, c in comp.items() if sum(k[:s]) == 0)
            raise ManifoldNotInvariant(i + 1, k, c)
    r = n - s
    comps = []
    for j in range(s, n):
        terms = {k[s:]: c for k, c in f.components[j].items() if sum(k[:s]) == 0}
        comps.append(PowerSeries(r, f.order, terms, f.backend))
    return GermMap(comps)

