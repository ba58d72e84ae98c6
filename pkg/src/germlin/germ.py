"""Germs of biholomorphisms fixing the origin, as truncated series maps.

Components are indexed from 0 internally; residual records and error
messages number components from 1, matching coordinate notation.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

from .errors import NonDiagonalLinearPart, NonInvertibleLinearPart, ZeroEigenvalue
from .resonance import Spectrum
from .scalars import EXACT, FLOATING, Backend, abs2, backend_of, is_zero, magnitude
from .series import PowerSeries, identity_tuple, ps_compose_many

__all__ = [
    "LinearMap",
    "GermMap",
    "Residual",
    "germ_compose",
    "germ_inverse",
    "conjugate",
    "commutation_residual",
    "is_linear_to_order",
    "assert_diagonal",
]


def _infer_backend(values) -> Backend:
    for v in values:
        try:
            return backend_of(v)
        except TypeError:
            if isinstance(v, (float, complex)):
                return FLOATING
    return EXACT


class LinearMap:
    """Square matrix of scalars acting on column vectors: ``z' = A z``.

    Singular matrices are representable (so that degenerate linear parts can
    be diagnosed); :class:`GermMap` is what insists on invertibility.
    """

    __slots__ = ("rows", "backend")

    def __init__(self, rows: Sequence[Sequence], backend: Backend | None = None):
        rows = [list(r) for r in rows]
        n = len(rows)
        if n == 0 or any(len(r) != n for r in rows):
            raise ValueError("linear map must be a nonempty square matrix")
        if backend is None:
            backend = _infer_backend([x for r in rows for x in r])
        self.backend = backend
        self.rows = tuple(
            tuple(x if backend.owns(x) else backend.convert(x) for x in r) for r in rows
        )

    @classmethod
    def identity(cls, n: int, backend: Backend = EXACT):
        return cls.diag([1] * n, backend)

    @classmethod
    def diag(cls, values: Sequence, backend: Backend | None = None):
        n = len(values)
        if backend is None:
            backend = _infer_backend(values)
        zero = backend.zero
        return cls([[values[i] if i == j else zero for j in range(n)] for i in range(n)], backend)

    @property
    def n(self) -> int:
        return len(self.rows)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def __eq__(self, other):
        return isinstance(other, LinearMap) and self.rows == other.rows and self.backend == other.backend

    def __hash__(self):
        return hash(self.rows)

    def __repr__(self):
        return f"LinearMap({[[str(x) for x in r] for r in self.rows]})"

    def __matmul__(self, other: "LinearMap") -> "LinearMap":
        if other.n != self.n:
            raise ValueError("dimension mismatch")
        n = self.n
        zero = self.backend.zero
        out = []
        for i in range(n):
            row = []
            for j in range(n):
                acc = zero
                for p in range(n):
                    acc = acc + self.rows[i][p] * other.rows[p][j]
                row.append(acc)
            out.append(row)
        return LinearMap(out, self.backend)

    def _eliminate(self, rhs):
        """Gaussian elimination; returns (det, solution rows or None)."""
        n = self.n
        a = [list(r) + list(x) for r, x in zip(self.rows, rhs)]
        det = self.backend.one
        for col in range(n):
            if self.backend.exact:
                piv = next((i for i in range(col, n) if a[i][col]), None)
            else:
                piv = max(range(col, n), key=lambda i: abs(a[i][col]))
                if is_zero(a[piv][col]):
                    piv = None
            if piv is None:
                return self.backend.zero, None
            if piv != col:
                a[col], a[piv] = a[piv], a[col]
                det = -det
            p = a[col][col]
            det = det * p
            a[col] = [x / p for x in a[col]]
            for i in range(n):
                if i != col and a[i][col]:
                    factor = a[i][col]
                    a[i] = [x - factor * y for x, y in zip(a[i], a[col])]
        return det, [r[n:] for r in a]

    def det(self):
        return self._eliminate([[] for _ in range(self.n)])[0]

    def is_invertible(self) -> bool:
        return not is_zero(self.det())

    def inverse(self) -> "LinearMap":
        n = self.n
        eye = [[self.backend.one if i == j else self.backend.zero for j in range(n)] for i in range(n)]
        det, sol = self._eliminate(eye)
        if sol is None or is_zero(det):
            raise NonInvertibleLinearPart(det)
        return LinearMap(sol, self.backend)

    def is_diagonal(self) -> bool:
        return all(is_zero(self.rows[i][j]) for i in range(self.n) for j in range(self.n) if i != j)

    def diagonal(self) -> tuple:
        return tuple(self.rows[i][i] for i in range(self.n))

    def apply(self, vector: Sequence[PowerSeries]) -> list[PowerSeries]:
        """Linear combination ``sum_p A[i][p] * vector[p]`` for each row ``i``."""
        out = []
        for row in self.rows:
            acc = None
            for a, v in zip(row, vector):
                if is_zero(a):
                    continue
                term = v * a
                acc = term if acc is None else acc + term
            if acc is None:
                acc = PowerSeries.zero(vector[0].n, vector[0].order, self.backend)
            out.append(acc)
        return out


@dataclass(frozen=True)
class Residual:
    """Worst coefficient found by a residual scan.

    ``component`` is 1-based; both it and ``index`` are ``None`` when the
    residual is zero.
    """

    value: object
    component: int | None = None
    index: tuple | None = None

    def __float__(self):
        return float(self.value)

    def as_record(self) -> dict:
        value = self.value
        if hasattr(value, "denominator") and value.denominator == 1:
            value = int(value)
        elif not isinstance(value, int):
            value = float(value)
        return {
            "value": value,
            "component": self.component,
            "k": list(self.index) if self.index is not None else None,
        }


def _worst(series: Sequence[PowerSeries], min_deg: int = 0, max_deg: int | None = None) -> Residual:
    best = None
    for j, p in enumerate(series):
        for k, c in p.items():
            d = sum(k)
            if d < min_deg or (max_deg is not None and d > max_deg):
                continue
            a = abs2(c)
            if best is None or a > best[0]:
                best = (a, j, k, c)
    if best is None:
        return Residual(0)
    return Residual(magnitude(best[3]), best[1] + 1, best[2])


class GermMap:
    """Germ of a biholomorphism of C^n fixing the origin, truncated at ``order``.

    ``linear`` is read off the degree-1 coefficients: ``linear[j][i]`` is the
    coefficient of ``z_i`` in component ``j``.
    """

    __slots__ = ("components", "n", "order", "backend", "linear")

    def __init__(self, components: Sequence[PowerSeries], *, check_invertible: bool = True):
        components = tuple(components)
        if not components:
            raise ValueError("a germ needs at least one component")
        n = len(components)
        order = components[0].order
        backend = components[0].backend
        for j, c in enumerate(components, 1):
            if c.n != n:
                raise ValueError(f"component {j} has {c.n} variables, expected {n}")
            if c.order != order:
                raise ValueError("components have different truncation degrees")
            if c.backend != backend:
                raise TypeError("components mix backends")
            if not is_zero(c.coeff((0,) * n)):
                raise ValueError(f"component {j} has a nonzero constant term; germs must fix the origin")
        if order < 1:
            raise ValueError("germ truncation degree must be at least 1")
        self.components = components
        self.n = n
        self.order = order
        self.backend = backend
        unit = [tuple(1 if p == i else 0 for p in range(n)) for i in range(n)]
        self.linear = LinearMap([[c.coeff(unit[i]) for i in range(n)] for c in components], backend)
        if check_invertible and not self.linear.is_invertible():
            raise NonInvertibleLinearPart(self.linear.det())

    @classmethod
    def from_linear(cls, linear: LinearMap, order: int) -> "GermMap":
        z = identity_tuple(linear.n, order, linear.backend)
        return cls(linear.apply(z))

    @classmethod
    def identity(cls, n: int, order: int, backend: Backend = EXACT) -> "GermMap":
        return cls(identity_tuple(n, order, backend))

    @classmethod
    def from_dicts(cls, comps: Sequence[Mapping], order: int, backend: Backend = EXACT, n: int | None = None) -> "GermMap":
        """Build from per-component ``{multi-index: value}`` dicts."""
        if n is None:
            n = len(comps)
        return cls([PowerSeries(n, order, c, backend) for c in comps])

    def __getitem__(self, j: int) -> PowerSeries:
        return self.components[j]

    def __iter__(self):
        return iter(self.components)

    def __len__(self):
        return self.n

    def __eq__(self, other):
        return isinstance(other, GermMap) and self.components == other.components

    def __hash__(self):
        return hash(self.components)

    def __repr__(self):
        body = "; ".join(c.to_string() for c in self.components)
        return f"GermMap(n={self.n}, order={self.order}, [{body}])"

    def truncate(self, N: int) -> "GermMap":
        return GermMap([c.truncate(N) for c in self.components], check_invertible=False)

    def linear_part(self) -> "GermMap":
        return GermMap.from_linear(self.linear, self.order)

    def nonlinear_part(self) -> list[PowerSeries]:
        """Components with their degree-1 terms removed."""
        return [
            PowerSeries._raw(c.n, c.order, c.backend, {k: v for k, v in c.items() if sum(k) >= 2})
            for c in self.components
        ]

    def max_abs(self):
        return max((c.max_abs() for c in self.components), key=float)


def _check_pair(f: GermMap, g: GermMap):
    if f.n != g.n:
        raise ValueError(f"dimension mismatch: {f.n} vs {g.n}")
    if f.backend != g.backend:
        raise TypeError(f"backend mismatch: {f.backend} vs {g.backend}")


def germ_compose(f: GermMap, g: GermMap, N: int | None = None) -> GermMap:
    """``f o g`` truncated at ``N`` (default: the smaller truncation degree)."""
    _check_pair(f, g)
    if N is None:
        N = min(f.order, g.order)
    return GermMap(ps_compose_many(f.components, g.components, N), check_invertible=False)


def germ_inverse(f: GermMap, N: int | None = None) -> GermMap:
    """Compositional inverse to order ``N``.

    Graded fixed point ``g <- L^-1 (z - Q(g))`` with ``Q = f - L``: each
    pass fixes one more degree, so ``N - 1`` passes after ``g = L^-1 z``.
    """
    if N is None:
        N = f.order
    N = min(N, f.order)
    Linv = f.linear.inverse()
    Q = f.nonlinear_part()
    z = identity_tuple(f.n, N, f.backend)
    g = Linv.apply(z)
    for t in range(N - 1):
        target = t + 2
        QG = ps_compose_many(Q, g, target)
        g = Linv.apply([zi - q.with_order(N) for zi, q in zip(z, QG)])
    return GermMap(g)


def conjugate(f: GermMap, psi: GermMap, N: int | None = None) -> GermMap:
    """``psi^-1 o f o psi`` to order ``N``."""
    _check_pair(f, psi)
    if N is None:
        N = min(f.order, psi.order)
    inner = germ_compose(f, psi, N)
    return germ_compose(germ_inverse(psi, N), inner, N)


def _difference(a: GermMap, b: GermMap) -> list[PowerSeries]:
    return [x - y for x, y in zip(a.components, b.components)]


def commutation_residual(f: GermMap, g: GermMap, N: int | None = None) -> Residual:
    """Largest coefficient of ``f o g - g o f`` up to degree ``N``."""
    _check_pair(f, g)
    if N is None:
        N = min(f.order, g.order)
    return _worst(_difference(germ_compose(f, g, N), germ_compose(g, f, N)), max_deg=N)


def is_linear_to_order(f: GermMap, N: int | None = None, tol=0) -> tuple[bool, Residual]:
    """True when every coefficient of degree ``2..N`` has modulus ``<= tol``."""
    if N is None:
        N = f.order
    worst = _worst(f.components, min_deg=2, max_deg=N)
    return worst.value <= tol, worst


def assert_diagonal(f, s: int | None = None) -> Spectrum:
    """Spectrum of a literally diagonal linear part (of a germ or a LinearMap)."""
    L = f.linear if isinstance(f, GermMap) else f
    for i in range(L.n):
        for j in range(L.n):
            if i != j and not is_zero(L[i, j]):
                raise NonDiagonalLinearPart(i + 1, j + 1, L[i, j])
    for i, v in enumerate(L.diagonal(), 1):
        if is_zero(v):
            raise ZeroEigenvalue(i)
    return Spectrum(L.diagonal(), s)
