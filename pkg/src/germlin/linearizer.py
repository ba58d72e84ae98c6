"""Order-by-order linearization of a germ and of commuting families.

The conjugacy ``f o psi = psi o Lambda`` is solved one degree at a time. With
``psi_<d`` already known (linearizing ``f`` through degree ``d - 1``), the
degree-``d`` coefficients ``g`` of ``psi_<d^-1 o f o psi_<d`` equal those of
``Q o psi_<d`` (``Q`` the nonlinear part of ``f``), and each one is removed by

    psi[j, k] = g[j, k] / (lambda^k - lambda_j)

unless ``(k, j)`` is resonant, in which case ``g[j, k]`` has to vanish and
``psi[j, k]`` is set to 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .brjuno import omega_table
from .errors import (
    AllPairsResonant,
    CommutationViolation,
    GermlinError,
    HypothesisViolation,
    ResonantObstruction,
    SmallDivisorUnderflow,
    TheoremResidualExceeded,
)
from .germ import (
    GermMap,
    LinearMap,
    Residual,
    _worst,
    assert_diagonal,
    commutation_residual,
    germ_compose,
    germ_inverse,
    is_linear_to_order,
)
from .normal_form import check_osc3
from .resonance import DEFAULT_EPS_RES, ResonanceReport, Spectrum, classify_level_s, power_shells
from .scalars import abs2, is_zero, magnitude
from .series import INFINITE, PowerSeries, ord_x, ps_compose_many

__all__ = [
    "DEFAULT_TOL_LIN",
    "STRUCTURAL_TOL",
    "DivisorLog",
    "LinearizationResult",
    "solve_homological",
    "quasi_brjuno_linearize",
    "simultaneous_linearize",
    "verify_linearization",
    "default_tolerance",
]

DEFAULT_TOL_LIN = 1e-9
STRUCTURAL_TOL = 1e-9
UNDERFLOW_FACTOR = 1e3


def default_tolerance(germ: GermMap):
    return 0 if germ.backend.exact else DEFAULT_TOL_LIN


@dataclass(frozen=True)
class DivisorLog:
    """Smallest divisor actually divided by, with its location (1-based ``j``)."""

    value: object = None
    component: int | None = None
    k: tuple | None = None
    divisions: int = 0

    def as_record(self) -> dict:
        return {
            "min_divisor": None if self.value is None else float(self.value),
            "component": self.component,
            "k": None if self.k is None else list(self.k),
            "divisions": self.divisions,
        }


@dataclass(frozen=True)
class LinearizationResult:
    psi: GermMap
    conjugated: list
    residuals: list
    divisor_log: DivisorLog
    structure_flags: dict
    spectrum: Spectrum
    linearization_residual: Residual
    resonance: ResonanceReport | None = None
    omega: list | None = None
    commutation: list = field(default_factory=list)

    @property
    def psi_inverse(self) -> GermMap:
        return germ_inverse(self.psi)


def _structural_scale(f: GermMap) -> float:
    return max(1.0, float(f.max_abs()))


def _homological(f: GermMap, spectrum: Spectrum, N: int, eps_res: float):
    n, backend = f.n, f.backend
    if N > f.order:
        raise ValueError(f"N={N} exceeds the germ's truncation degree {f.order}")
    if N < 1:
        raise ValueError("N must be at least 1")
    diag = assert_diagonal(f).values
    if diag != spectrum.values:
        raise ValueError("spectrum does not match the diagonal of the linear part")
    scale = _structural_scale(f)
    struct_tol = STRUCTURAL_TOL * scale
    underflow = UNDERFLOW_FACTOR * backend.epsilon * scale
    Q = [q.truncate(N) for q in f.nonlinear_part()]
    lam = spectrum.values
    psi = [{tuple(1 if p == j else 0 for p in range(n)): backend.one} for j in range(n)]
    best = None
    divisions = 0
    for d, shell in power_shells(lam, N):
        if d < 2:
            continue
        current = [PowerSeries._raw(n, d, backend, dict(c)) for c in psi]
        g = ps_compose_many(Q, current, d)
        for j in range(n):
            gj = g[j]
            for k, pk in shell.items():
                c = gj.coeff(k)
                delta = pk - lam[j]
                if backend.exact:
                    resonant = not delta
                else:
                    resonant = abs(delta) <= eps_res
                if resonant:
                    if backend.exact:
                        obstructed = bool(c)
                    else:
                        obstructed = abs(c) > struct_tol
                    if obstructed:
                        raise ResonantObstruction(j + 1, k, c)
                    continue
                if not backend.exact and abs(delta) < underflow:
                    raise SmallDivisorUnderflow(j + 1, k, delta)
                if is_zero(c):
                    continue
                psi[j][k] = c / delta
                divisions += 1
                size = abs2(delta)
                if best is None or size < best[0]:
                    best = (size, j, k, delta)
    comps = [PowerSeries(n, f.order, c, backend) for c in psi]
    log = DivisorLog() if best is None else DivisorLog(magnitude(best[3]), best[1] + 1, best[2], divisions)
    return GermMap(comps).truncate(N) if N < f.order else GermMap(comps), log


def solve_homological(
    f: GermMap, spectrum: Spectrum, N: int | None = None, eps_res: float = DEFAULT_EPS_RES
) -> GermMap:
    """Tangent-to-identity ``psi`` with ``psi^-1 o f o psi`` linear to order ``N``.

    Resonant coefficients of ``psi`` are zero. Raises
    :class:`ResonantObstruction` when a resonant coefficient of the partially
    conjugated germ does not vanish, and :class:`SmallDivisorUnderflow`
    (floating only) when a non-resonant divisor is too small to trust.
    """
    if N is None:
        N = f.order
    return _homological(f, spectrum, N, eps_res)[0]


def _target_linear(target, n: int, backend) -> LinearMap:
    if isinstance(target, Spectrum):
        return LinearMap.diag(list(target.values), backend)
    if isinstance(target, GermMap):
        return target.linear
    if isinstance(target, LinearMap):
        return target
    return LinearMap.diag(list(target), backend)


def verify_linearization(f: GermMap, psi: GermMap, target, N: int | None = None) -> Residual:
    """Largest coefficient of ``f o psi - psi o L`` up to degree ``N``.

    ``target`` gives ``L``: a :class:`Spectrum` (diagonal), a
    :class:`LinearMap`, or a germ whose linear part is used.
    """
    if f.n != psi.n:
        raise ValueError(f"dimension mismatch: germ has {f.n} variables, psi has {psi.n}")
    if N is None:
        N = min(f.order, psi.order)
    L = _target_linear(target, f.n, f.backend)
    if L.n != f.n:
        raise ValueError("target linear map has the wrong size")
    lhs = germ_compose(f, psi, N)
    rhs = germ_compose(psi, GermMap.from_linear(L, psi.order), N)
    return _worst([a - b for a, b in zip(lhs.components, rhs.components)], max_deg=N)


def _structure(psi: GermMap, s: int) -> dict:
    nonlinear = psi.nonlinear_part()
    x_ord = min((ord_x(p, s) for p in nonlinear[:s]), default=INFINITE)
    y_ord = min((ord_x(p, s) for p in nonlinear[s:]), default=INFINITE)
    return {
        "ord_u_psi1": None if x_ord == INFINITE else int(x_ord),
        "ord_u_psi2": None if y_ord == INFINITE else int(y_ord),
        "ok": x_ord >= 2 and y_ord >= 1,
    }


def _level_s_or_raise(spectrum: Spectrum, N: int, eps_res: float) -> ResonanceReport:
    report = classify_level_s(spectrum, max(N, 2), eps_res)
    if report.violations:
        v = report.violations[0]
        raise HypothesisViolation(
            "level-s",
            f"resonance k={v.k} -> j={v.j} is outside K1/K2 for s={spectrum.s}",
            witness=(v.k, v.j),
        )
    if report.missing:
        k, j = report.missing[0]
        raise HypothesisViolation(
            "level-s", f"K1/K2 member k={k} does not resonate with coordinate {j}", witness=(k, j)
        )
    return report


def _osc3_or_raise(germs, s, N):
    check = check_osc3(germs, s, N)
    if not check.ok:
        w = check.witnesses[0]
        raise HypothesisViolation(
            "osc3",
            f"germ {w.h}, component {w.component}, monomial {w.k}: {w.reason}",
            witness=check.witnesses,
        )


def _linearize_first(f, s, N, eps_res):
    spectrum = assert_diagonal(f, s)
    report = _level_s_or_raise(spectrum, N, eps_res)
    _osc3_or_raise([f], s, N)
    psi, divlog = _homological(f, spectrum, N, eps_res)
    flags = _structure(psi, s)
    if not flags["ok"]:
        raise GermlinError(
            f"internal: linearizer lost its structure (ord_u psi1={flags['ord_u_psi1']}, "
            f"ord_u psi2={flags['ord_u_psi2']})"
        )
    try:
        omega = omega_table(spectrum, max(N, 2), eps_res)
    except AllPairsResonant:
        omega = None
    return spectrum, report, psi, divlog, flags, omega


def quasi_brjuno_linearize(
    f: GermMap,
    s: int,
    N: int | None = None,
    eps_res: float = DEFAULT_EPS_RES,
    tol=None,
) -> LinearizationResult:
    """Linearize one germ whose spectrum has only level-s resonances.

    Preconditions checked up to ``N``: diagonal linear part, level-s
    resonances, and the osc3 form. Brjuno data are attached as diagnostics.
    """
    if N is None:
        N = f.order
    if tol is None:
        tol = default_tolerance(f)
    spectrum, report, psi, divlog, flags, omega = _linearize_first(f, s, N, eps_res)
    conj = germ_compose(germ_inverse(psi, N), germ_compose(f, psi, N), N)
    ok, worst = is_linear_to_order(conj, N, tol)
    if not ok:
        raise TheoremResidualExceeded(1, worst, tol)
    lin_res = verify_linearization(f, psi, spectrum, N)
    return LinearizationResult(psi, [conj], [worst], divlog, flags, spectrum, lin_res, report, omega)


def simultaneous_linearize(
    germs: Sequence[GermMap],
    s: int,
    N: int | None = None,
    tol=None,
    eps_res: float = DEFAULT_EPS_RES,
) -> LinearizationResult:
    """Linearize ``f_1, ..., f_m`` with the single ``psi`` computed from ``f_1``.

    Checks that ``f_1`` commutes with every ``f_h`` to order ``N`` (within
    ``tol``), that ``f_1`` meets the single-germ preconditions and that the
    whole family is in osc3 form. Every conjugate must then come out linear;
    if one does not, :class:`TheoremResidualExceeded` is raised.
    """
    germs = list(germs)
    if len(germs) < 2:
        raise ValueError("simultaneous linearization needs at least two germs")
    f1 = germs[0]
    for g in germs[1:]:
        if g.n != f1.n:
            raise ValueError("germs have different dimensions")
        if g.backend != f1.backend:
            raise TypeError("germs mix backends")
    if N is None:
        N = min(g.order for g in germs)
    if tol is None:
        tol = default_tolerance(f1)
    commutation = []
    for h, g in enumerate(germs[1:], 2):
        res = commutation_residual(f1, g, N)
        commutation.append(res)
        if res.value > tol:
            raise CommutationViolation(h, res)
    _osc3_or_raise(germs, s, N)
    spectrum, report, psi, divlog, flags, omega = _linearize_first(f1, s, N, eps_res)
    psi_inv = germ_inverse(psi, N)
    conjugated, residuals = [], []
    for h, g in enumerate(germs, 1):
        conj = germ_compose(psi_inv, germ_compose(g, psi, N), N)
        ok, worst = is_linear_to_order(conj, N, tol)
        if not ok:
            raise TheoremResidualExceeded(h, worst, tol)
        conjugated.append(conj)
        residuals.append(worst)
    lin_res = verify_linearization(f1, psi, spectrum, N)
    return LinearizationResult(
        psi, conjugated, residuals, divlog, flags, spectrum, lin_res, report, omega, commutation
    )
