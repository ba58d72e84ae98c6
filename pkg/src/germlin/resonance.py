"""Resonances of a spectrum and the level-s classification.

A resonance is a pair ``(k, j)`` with ``|k| >= 2`` and ``lambda^k == lambda_j``.
For a spectrum split as ``(lambda_1..lambda_s, mu_1..mu_r)`` the spectrum has
only level-s resonances when every resonance targeting the lambda-block has
exactly one unit of x-degree and a trivial mu-product (set K1), and every
resonance targeting the mu-block involves no x-variable at all (set K2).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Sequence

from .scalars import EXACT, FLOATING, Backend, ExactComplex, backend_of, is_zero, magnitude
from .series import graded_lex_key, monomials

__all__ = [
    "DEFAULT_EPS_RES",
    "Spectrum",
    "make_spectrum",
    "ResonancePair",
    "ResonanceReport",
    "power_shells",
    "enumerate_resonances",
    "classify_level_s",
    "in_K1",
    "in_K2",
]

DEFAULT_EPS_RES = 1e-10


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues ``(lambda_1..lambda_s, mu_1..mu_r)`` with the split ``s``."""

    values: tuple
    s: int | None = None

    def __post_init__(self):
        values = tuple(self.values)
        if not values:
            raise ValueError("spectrum must have at least one eigenvalue")
        backend = backend_of(values[0])
        for v in values:
            if backend_of(v) != backend:
                raise TypeError("spectrum mixes backends")
        for i, v in enumerate(values, 1):
            if is_zero(v):
                raise ValueError(f"eigenvalue {i} is zero")
        s = len(values) if self.s is None else int(self.s)
        if not 1 <= s <= len(values):
            raise ValueError(f"split s={s} out of range 1..{len(values)}")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "s", s)

    @property
    def n(self) -> int:
        return len(self.values)

    @property
    def r(self) -> int:
        return self.n - self.s

    @property
    def lambdas(self) -> tuple:
        return self.values[: self.s]

    @property
    def mus(self) -> tuple:
        return self.values[self.s :]

    @property
    def backend(self) -> Backend:
        return backend_of(self.values[0])

    def with_split(self, s: int) -> "Spectrum":
        return Spectrum(self.values, s)

    def __str__(self):
        return "(" + ", ".join(str(v) for v in self.values) + f"; s={self.s})"


def make_spectrum(values: Sequence, s: int | None = None, backend: Backend | None = None) -> Spectrum:
    """Build a spectrum from plain numbers.

    Without an explicit backend, ints, Fractions and rational strings give an
    exact spectrum; any float or complex gives a floating one.
    """
    if backend is None:
        floating = any(isinstance(v, (float, complex)) for v in values)
        backend = FLOATING if floating else EXACT
    converted = []
    for v in values:
        if backend.owns(v):
            converted.append(v)
        elif isinstance(v, str):
            converted.append(backend.scalar(v))
        elif backend.exact and isinstance(v, ExactComplex):
            converted.append(v)
        else:
            converted.append(backend.convert(v))
    return Spectrum(tuple(converted), s)


def power_shells(values: Sequence, d_max: int) -> Iterator[tuple[int, dict]]:
    """Yield ``(d, {k: values^k})`` for ``d = 1..d_max``.

    Each power is one multiplication away from a degree ``d - 1`` power, and
    only the previous shell is kept in memory.
    """
    n = len(values)
    one = values[0] ** 0 if isinstance(values[0], ExactComplex) else values[0] * 0 + 1
    shell = {(0,) * n: one}
    for d in range(1, d_max + 1):
        nxt = {}
        for k in monomials(n, d):
            i = next(p for p, e in enumerate(k) if e)
            prev = k[:i] + (k[i] - 1,) + k[i + 1 :]
            nxt[k] = shell[prev] * values[i]
        yield d, nxt
        shell = nxt


def _vanishes(delta, eps_res: float) -> bool:
    if isinstance(delta, ExactComplex):
        return not delta
    return abs(delta) <= eps_res


def _mu_power(spectrum: Spectrum, k) -> object:
    result = spectrum.backend.one
    for mu, e in zip(spectrum.mus, k[spectrum.s :]):
        if e:
            result = result * mu**e
    return result


def in_K1(k: Sequence[int], spectrum: Spectrum, eps_res: float = DEFAULT_EPS_RES) -> bool:
    """Membership in K1: x-degree exactly 1 and ``mu^(k'') == 1``."""
    k = tuple(k)
    if sum(k) < 2:
        raise ValueError("K1 membership is defined for |k| >= 2")
    if sum(k[: spectrum.s]) != 1:
        return False
    return _vanishes(_mu_power(spectrum, k) - spectrum.backend.one, eps_res)


def in_K2(k: Sequence[int], spectrum: Spectrum, eps_res: float = DEFAULT_EPS_RES) -> tuple[bool, int | None]:
    """Membership in K2 and the first witnessing ``j`` (1-based in the mu-block)."""
    k = tuple(k)
    if sum(k) < 2:
        raise ValueError("K2 membership is defined for |k| >= 2")
    if spectrum.r == 0 or any(k[: spectrum.s]):
        return False, None
    value = _mu_power(spectrum, k)
    for j, mu in enumerate(spectrum.mus, 1):
        if _vanishes(value - mu, eps_res):
            return True, j
    return False, None


@dataclass(frozen=True)
class ResonancePair:
    """Resonance ``lambda^k = lambda_j``; ``j`` is 1-based over all n coordinates.

    ``near`` marks floating pairs detected within ``eps_res`` but not exactly.
    """

    k: tuple
    j: int
    cls: str
    residual: object
    near: bool = False

    def as_record(self) -> dict:
        return {
            "k": list(self.k),
            "j": self.j,
            "class": self.cls,
            "residual": _plain(self.residual),
            "near": self.near,
        }


def _plain(x):
    if isinstance(x, (int, float)):
        return x
    try:
        if x.denominator == 1:
            return int(x)
    except AttributeError:
        pass
    return float(x)


def _classify(k, j, spectrum, eps_res) -> str:
    if j <= spectrum.s:
        return "K1" if in_K1(k, spectrum, eps_res) else "OTHER"
    return "K2" if in_K2(k, spectrum, eps_res)[0] else "OTHER"


def enumerate_resonances(spectrum: Spectrum, N: int, eps_res: float = DEFAULT_EPS_RES) -> list[ResonancePair]:
    """All resonant pairs with ``2 <= |k| <= N``, classified against the split.

    Floating near-resonances (``0 < |delta| <= eps_res``) are included and
    flagged ``near``. The list is sorted by degree, graded-lex ``k``, then ``j``.
    """
    if N < 2:
        raise ValueError("degree bound must be at least 2")
    pairs = []
    for d, shell in power_shells(spectrum.values, N):
        if d < 2:
            continue
        for k, pk in shell.items():
            for j, lam in enumerate(spectrum.values, 1):
                delta = pk - lam
                if _vanishes(delta, eps_res):
                    near = not spectrum.backend.exact and abs(delta) > 0
                    pairs.append(
                        ResonancePair(k, j, _classify(k, j, spectrum, eps_res), magnitude(delta), near)
                    )
    pairs.sort(key=lambda p: (graded_lex_key(p.k), p.j))
    return pairs


@dataclass(frozen=True)
class ResonanceReport:
    """Level-s verdict up to degree ``N`` with witnesses in both directions.

    ``violations`` are resonances outside K1/K2 (or with the wrong target
    block); ``missing`` lists K1/K2 members whose resonance identity failed.
    """

    spectrum: Spectrum
    N: int
    eps_res: float
    pairs: list
    violations: list
    k1_members: list = field(default_factory=list)
    k2_members: list = field(default_factory=list)
    missing: list = field(default_factory=list)

    @property
    def level_s_ok(self) -> bool:
        return not self.violations and not self.missing

    def as_record(self) -> dict:
        return {
            "N": self.N,
            "s": self.spectrum.s,
            "level_s_ok": self.level_s_ok,
            "pairs": [p.as_record() for p in self.pairs],
            "violations": [p.as_record() for p in self.violations],
            "missing": [{"k": list(k), "j": j} for k, j in self.missing],
        }


def classify_level_s(spectrum: Spectrum, N: int, eps_res: float = DEFAULT_EPS_RES) -> ResonanceReport:
    """Decide "only level-s resonances" for all ``|k| <= N``.

    Forward: every resonance must be of class K1 or K2. Reverse: every K1
    member must resonate with its x-coordinate and every K2 member with its
    witnessing mu, so that both sides of the equivalence are checked.
    """
    pairs = enumerate_resonances(spectrum, N, eps_res)
    found = {(p.k, p.j) for p in pairs}
    violations = [p for p in pairs if p.cls == "OTHER"]
    k1, k2, missing = [], [], []
    s = spectrum.s
    for d in range(2, N + 1):
        for k in monomials(spectrum.n, d):
            xdeg = sum(k[:s])
            if xdeg == 1 and in_K1(k, spectrum, eps_res):
                p = next(i for i, e in enumerate(k[:s]) if e) + 1
                k1.append(k)
                if (k, p) not in found:
                    missing.append((k, p))
            elif xdeg == 0:
                ok, j = in_K2(k, spectrum, eps_res)
                if ok:
                    k2.append((k, j))
                    if (k, s + j) not in found:
                        missing.append((k, s + j))
    return ResonanceReport(spectrum, N, eps_res, pairs, violations, k1, k2, missing)
