"""Exception types. Coordinate and germ numbers in messages are 1-based."""

from __future__ import annotations


class GermlinError(Exception):
    """Base class for all errors raised by the engine."""


class HypothesisViolation(GermlinError):
    """A precondition of the linearization theorems does not hold.

    ``hypothesis`` names the failed condition (``"diagonal"``, ``"level-s"``,
    ``"osc3"``, ``"commutation"``, ...); ``witness`` carries the evidence.
    """

    def __init__(self, hypothesis: str, message: str, witness=None):
        super().__init__(f"{hypothesis}: {message}")
        self.hypothesis = hypothesis
        self.witness = witness


class NonDiagonalLinearPart(HypothesisViolation):
    def __init__(self, row: int, col: int, value):
        super().__init__(
            "diagonal",
            f"linear part has off-diagonal entry {value} at ({row}, {col}); "
            "pre-conjugate to coordinates where it is diagonal",
            witness=(row, col, value),
        )


class ZeroEigenvalue(HypothesisViolation):
    def __init__(self, index: int):
        super().__init__("diagonal", f"eigenvalue {index} is zero", witness=index)


class NonInvertibleLinearPart(HypothesisViolation):
    def __init__(self, det):
        super().__init__("invertible", f"linear part is singular (det = {det})", witness=det)


class ManifoldNotInvariant(HypothesisViolation):
    def __init__(self, component: int, k, coefficient):
        super().__init__(
            "invariant-manifold",
            f"x-component {component} has monomial {tuple(k)} (coefficient {coefficient}) "
            "not vanishing on {x=0}",
            witness=(component, tuple(k), coefficient),
        )


class CommutationViolation(HypothesisViolation):
    def __init__(self, h: int, residual):
        super().__init__(
            "commutation",
            f"germ 1 does not commute with germ {h} (residual {residual.value} at "
            f"component {residual.component}, index {residual.index})",
            witness=residual,
        )
        self.h = h
        self.residual = residual


class ResonantObstruction(GermlinError):
    """A resonant coefficient survives: no linearizer with zero resonant part."""

    def __init__(self, j: int, k, coefficient):
        super().__init__(
            f"resonant coefficient {coefficient} at component {j}, index {tuple(k)} "
            "cannot be removed"
        )
        self.j = j
        self.k = tuple(k)
        self.coefficient = coefficient
        self.witness = {"component": j, "k": list(self.k), "coefficient": str(coefficient)}


class SmallDivisorUnderflow(GermlinError):
    def __init__(self, j: int, k, delta):
        super().__init__(
            f"divisor |lambda^k - lambda_j| = {abs(delta):.3e} at component {j}, index "
            f"{tuple(k)} is below the safe threshold; use the exact backend"
        )
        self.j = j
        self.k = tuple(k)
        self.delta = delta
        self.witness = {"component": j, "k": list(self.k), "divisor": float(abs(delta))}


class TheoremResidualExceeded(GermlinError):
    def __init__(self, h: int, residual, tol):
        super().__init__(
            f"conjugate of germ {h} is not linear within tol={tol}: coefficient of size "
            f"{residual.value} at component {residual.component}, index {residual.index}"
        )
        self.h = h
        self.residual = residual
        self.tol = tol
        self.witness = residual


class AllPairsResonant(GermlinError):
    def __init__(self, m: int):
        super().__init__(f"every pair (k, j) with 2 <= |k| <= {m} is resonant; omega~({m}) is undefined")
        self.m = m


class SchemaError(GermlinError, ValueError):
    """Malformed germ file or literal."""
