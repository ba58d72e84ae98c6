"""Order-N simultaneous linearization of commuting holomorphic germs.

Exact (Gaussian rational) and floating backends share one truncated power
series kernel; on top of it sit resonance classification, small-divisor
diagnostics, osculating-form checks and the linearizer itself.
"""

from .brjuno import BrjunoReport, brjuno_partial_sums, omega_table, omega_tilde
from .errors import (
    AllPairsResonant,
    CommutationViolation,
    GermlinError,
    HypothesisViolation,
    ManifoldNotInvariant,
    NonDiagonalLinearPart,
    NonInvertibleLinearPart,
    ResonantObstruction,
    SchemaError,
    SmallDivisorUnderflow,
    TheoremResidualExceeded,
    ZeroEigenvalue,
)
from .germ import (
    GermMap,
    LinearMap,
    Residual,
    assert_diagonal,
    commutation_residual,
    conjugate,
    germ_compose,
    germ_inverse,
    is_linear_to_order,
)
from .linearizer import (
    LinearizationResult,
    quasi_brjuno_linearize,
    simultaneous_linearize,
    solve_homological,
    verify_linearization,
)
from .normal_form import check_osc, check_osc3, restrict_to_M, split_germ
from .resonance import Spectrum, classify_level_s, enumerate_resonances, in_K1, in_K2
from .scalars import EXACT, FLOATING, Backend, ExactComplex, zero_tolerance
from .series import PowerSeries, ord_x, ps_compose, ps_mul

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
