"""Small-divisor diagnostics for the reduced Brjuno condition.

``omega~(m)`` is the smallest modulus ``|lambda^k - lambda_j|`` over
non-resonant pairs with ``2 <= |k| <= m``. The partial sums

    S_nu = sum_{mu <= nu} p_mu^-1 * log(1 / omega~(p_{mu+1}))

are reported as finite data only; no convergence verdict is ever issued.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

from .errors import AllPairsResonant
from .resonance import DEFAULT_EPS_RES, Spectrum, power_shells
from .scalars import _MPQ, log_magnitude, sqrt_magnitude

__all__ = [
    "DIAGNOSTIC_LABEL",
    "BrjunoReport",
    "omega_tilde",
    "omega_table",
    "brjuno_partial_sums",
    "geometric_sequence",
]

DIAGNOSTIC_LABEL = "diagnostic only: finite partial data, no convergence claim"

_EXCLUDE_MODES = ("pair", "index")


def _scan(spectrum: Spectrum, m_max: int, eps_res: float, exclude: str) -> list:
    """Running minimum per degree ``m = 2..m_max``.

    Exact spectra track the squared modulus (exact rational); floating ones
    track ``abs`` directly. ``None`` marks degrees with no admissible pair.
    """
    if exclude not in _EXCLUDE_MODES:
        raise ValueError(f"exclude must be one of {_EXCLUDE_MODES}")
    if m_max < 2:
        raise ValueError("omega~ is defined for m >= 2")
    exact = spectrum.backend.exact
    values = spectrum.values
    best = None
    out = []
    for d, shell in power_shells(values, m_max):
        if d < 2:
            continue
        for pk in shell.values():
            if exact:
                sizes = [(pk - lam).abs2() for lam in values]
                resonant = [not q for q in sizes]
            else:
                sizes = [abs(pk - lam) for lam in values]
                resonant = [q <= eps_res for q in sizes]
            if exclude == "index" and any(resonant):
                continue
            for q, res in zip(sizes, resonant):
                if not res and (best is None or q < best):
                    best = q
        out.append(best)
    return out


def _finish(raw, exact: bool, squared: bool):
    if not exact:
        return raw * raw if squared else raw
    return raw if squared else sqrt_magnitude(raw)


def omega_table(
    spectrum: Spectrum,
    m_max: int,
    eps_res: float = DEFAULT_EPS_RES,
    exclude: str = "pair",
    squared: bool = False,
) -> list[tuple[int, object]]:
    """``[(m, omega~(m)) for m in 2..m_max]`` in one pass over degree shells."""
    raw = _scan(spectrum, m_max, eps_res, exclude)
    table = []
    for m, value in enumerate(raw, 2):
        if value is None:
            raise AllPairsResonant(m)
        table.append((m, _finish(value, spectrum.backend.exact, squared)))
    return table


def omega_tilde(
    spectrum: Spectrum,
    m: int,
    eps_res: float = DEFAULT_EPS_RES,
    exclude: str = "pair",
    squared: bool = False,
):
    """Smallest non-resonant divisor modulus up to degree ``m``.

    Parameters
    ----------
    spectrum : Spectrum
        Eigenvalues; the split does not affect the value.
    m : int
        Degree bound, at least 2.
    eps_res : float
        Resonance threshold for floating spectra (ignored when exact).
    exclude : {"pair", "index"}
        ``"pair"`` drops only the resonant pairs ``(k, j)``; ``"index"``
        drops every ``k`` that is resonant for some ``j``.
    squared : bool
        Return ``omega~(m)**2``, which stays rational on the exact backend.

    Returns
    -------
    magnitude
        An ``mpq`` when the exact value is rational, else a float.

    Raises
    ------
    AllPairsResonant
        No admissible pair exists with ``|k| <= m``.
    """
    raw = _scan(spectrum, m, eps_res, exclude)[-1]
    if raw is None:
        raise AllPairsResonant(m)
    return _finish(raw, spectrum.backend.exact, squared)


def geometric_sequence(length: int) -> list[int]:
    return [2**nu for nu in range(length)]


@dataclass(frozen=True)
class BrjunoReport:
    omega_table: list
    sequence: list
    partial_sums: list
    terms: list
    nondecreasing: list
    exclude: str = "pair"
    label: str = field(default=DIAGNOSTIC_LABEL)

    def as_record(self) -> dict:
        def num(x):
            if isinstance(x, (int, float)):
                return x
            if getattr(x, "denominator", None) == 1:
                return int(x)
            return float(x)

        return {
            "label": self.label,
            "exclude": self.exclude,
            "omega_table": [{"m": m, "omega_tilde": num(w)} for m, w in self.omega_table],
            "partial_sums": [
                {"nu": nu, "p_nu": p, "term": t, "partial_sum": s, "nondecreasing": flag}
                for nu, (p, t, s, flag) in enumerate(
                    zip(self.sequence, self.terms, self.partial_sums, self.nondecreasing)
                )
            ],
        }


def _neg_log(value) -> float:
    # + 0.0 turns -log(1) = -0.0 into a plain zero
    if isinstance(value, _MPQ):
        return -log_magnitude(value * value) + 0.0
    return -math.log(float(value)) + 0.0


def brjuno_partial_sums(
    spectrum: Spectrum,
    nu_max: int,
    sequence: str | Sequence[int] = "geometric2",
    eps_res: float = DEFAULT_EPS_RES,
    exclude: str = "pair",
) -> BrjunoReport:
    """Partial sums ``S_0..S_nu_max`` of the reduced Brjuno series.

    ``sequence`` is ``"geometric2"`` (``p_nu = 2**nu``) or an explicit
    strictly increasing list starting at 1 with at least ``nu_max + 2``
    entries, since ``S_nu`` reads ``omega~(p_{nu+1})``.
    """
    if nu_max < 0:
        raise ValueError("nu_max must be nonnegative")
    if sequence == "geometric2":
        p = geometric_sequence(nu_max + 2)
    elif isinstance(sequence, str):
        raise ValueError(f"unknown sequence {sequence!r}")
    else:
        p = [int(x) for x in sequence]
        if not p or p[0] != 1:
            raise ValueError("sequence must start with p_0 = 1")
        if any(b <= a for a, b in zip(p, p[1:])):
            raise ValueError("sequence must be strictly increasing")
        if len(p) < nu_max + 2:
            raise ValueError(f"sequence needs at least {nu_max + 2} entries for nu_max={nu_max}")
        p = p[: nu_max + 2]
    table = omega_table(spectrum, p[-1], eps_res, exclude)
    lookup = dict(table)
    sums, terms, flags = [], [], []
    total = 0.0
    for nu in range(nu_max + 1):
        term = _neg_log(lookup[p[nu + 1]]) / p[nu]
        total += term
        terms.append(term)
        sums.append(total)
        flags.append(term >= 0)
    return BrjunoReport(table, p[: nu_max + 1], sums, terms, flags, exclude)
