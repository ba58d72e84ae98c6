"""Complex coefficient scalars with an exact and a floating backend.

Exact scalars are Gaussian rationals (:class:`ExactComplex`, backed by
``gmpy2.mpq``). Floating scalars are plain Python ``complex`` at 53 bits, or
``mpmath`` ``mpc`` values from a private context at higher precision.
"""

from __future__ import annotations

import contextlib
import contextvars
import functools
import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

import gmpy2
import mpmath
from gmpy2 import mpq

_MPQ = type(mpq())
_MPZ = type(gmpy2.mpz())
# every MPContext derives its own mpc class from this base
_MPC = mpmath.ctx_mp_python._mpc

__all__ = [
    "ExactComplex",
    "Backend",
    "EXACT",
    "FLOATING",
    "parse_rational",
    "is_zero",
    "abs2",
    "magnitude",
    "backend_of",
    "get_eps_zero",
    "zero_tolerance",
]

DEFAULT_EPS_ZERO = 1e-12

_eps_zero: contextvars.ContextVar[float] = contextvars.ContextVar(
    "germlin_eps_zero", default=DEFAULT_EPS_ZERO
)


def get_eps_zero() -> float:
    """Current zero-test tolerance for floating coefficients."""
    return _eps_zero.get()


@contextlib.contextmanager
def zero_tolerance(eps: float):
    """Temporarily change the floating zero-test tolerance."""
    if not eps > 0:
        raise ValueError("eps_zero must be positive")
    token = _eps_zero.set(float(eps))
    try:
        yield
    finally:
        _eps_zero.reset(token)


def parse_rational(value) -> mpq:
    """Parse an int, Fraction, mpq or a ``"p/q"`` / decimal string exactly.

    Floats are refused: they would silently carry binary rounding into the
    exact backend.
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not scalars")
    if isinstance(value, (int, _MPQ, _MPZ)):
        return mpq(value)
    if isinstance(value, Fraction):
        return mpq(value.numerator, value.denominator)
    if isinstance(value, str):
        text = value.strip()
        try:
            return mpq(Fraction(text))
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"not a rational literal: {value!r}") from exc
    if isinstance(value, Rational):
        return mpq(value.numerator, value.denominator)
    raise TypeError(f"cannot use {type(value).__name__} as an exact rational")


class ExactComplex:
    """Gaussian rational ``re + i*im`` with exact arithmetic."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = parse_rational(re)
        self.im = parse_rational(im)

    @classmethod
    def _make(cls, re, im):
        obj = object.__new__(cls)
        obj.re = re
        obj.im = im
        return obj

    @staticmethod
    def _coerce(other):
        if isinstance(other, ExactComplex):
            return other
        if isinstance(other, (float, complex)) or not isinstance(
            other, (int, Rational, _MPQ, _MPZ)
        ):
            raise TypeError(
                f"cannot mix exact scalars with {type(other).__name__}; "
                "convert explicitly with Backend.convert"
            )
        return ExactComplex._make(parse_rational(other), mpq(0))

    def __add__(self, other):
        o = self._coerce(other)
        return ExactComplex._make(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        return ExactComplex._make(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        o = self._coerce(other)
        if not self.im and not o.im:
            return ExactComplex._make(self.re * o.re, mpq(0))
        return ExactComplex._make(
            self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if not o.im:
            if not o.re:
                raise ZeroDivisionError("exact complex division by zero")
            return ExactComplex._make(self.re / o.re, self.im / o.re)
        d = o.re * o.re + o.im * o.im
        return ExactComplex._make(
            (self.re * o.re + self.im * o.im) / d, (self.im * o.re - self.re * o.im) / d
        )

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    def __neg__(self):
        return ExactComplex._make(-self.re, -self.im)

    def __pos__(self):
        return self

    def __pow__(self, exponent: int):
        if not isinstance(exponent, int):
            raise TypeError("only integer powers are supported")
        if exponent < 0:
            return ExactComplex._make(mpq(1), mpq(0)) / (self ** (-exponent))
        result = ExactComplex._make(mpq(1), mpq(0))
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def conjugate(self):
        return ExactComplex._make(self.re, -self.im)

    def abs2(self) -> mpq:
        return self.re * self.re + self.im * self.im

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, other):
        if isinstance(other, ExactComplex):
            return self.re == other.re and self.im == other.im
        if isinstance(other, (int, Rational, _MPQ)) and not isinstance(other, bool):
            return self.im == 0 and self.re == other
        return NotImplemented

    def __hash__(self):
        if not self.im:
            return hash(self.re)
        return hash((self.re, self.im))

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        return f"ExactComplex({str(self.re)!r}, {str(self.im)!r})"

    def __str__(self):
        if not self.im:
            return str(self.re)
        if not self.re:
            return f"{self.im}i"
        sign = "-" if self.im < 0 else "+"
        return f"({self.re}{sign}{abs(self.im)}i)"


@functools.lru_cache(maxsize=None)
def _mp_context(precision: int):
    ctx = mpmath.MPContext()
    ctx.prec = precision
    return ctx


@dataclass(frozen=True)
class Backend:
    """Coefficient backend: ``exact`` or ``floating`` at ``precision`` bits."""

    kind: str = "exact"
    precision: int = 53

    def __post_init__(self):
        if self.kind not in ("exact", "floating"):
            raise ValueError(f"unknown backend {self.kind!r}")
        if self.kind == "floating" and self.precision < 53:
            raise ValueError("floating precision must be at least 53 bits")

    @property
    def exact(self) -> bool:
        return self.kind == "exact"

    @property
    def epsilon(self) -> float:
        """Unit roundoff scale of the backend (0 for exact)."""
        return 0.0 if self.exact else 2.0 ** (1 - self.precision)

    @property
    def _ctx(self):
        return _mp_context(self.precision)

    def scalar(self, re=0, im=0):
        if self.exact:
            return ExactComplex(re, im)
        re_f = _to_real(re, self)
        im_f = _to_real(im, self)
        if self.precision == 53:
            return complex(re_f, im_f)
        return self._ctx.mpc(re_f, im_f)

    @property
    def zero(self):
        return self.scalar(0, 0)

    @property
    def one(self):
        return self.scalar(1, 0)

    def convert(self, value):
        """Bring a number into this backend; floating to exact is refused."""
        if self.exact:
            if isinstance(value, ExactComplex):
                return value
            return ExactComplex._coerce(value)
        if isinstance(value, ExactComplex):
            return self.scalar(Fraction(int(value.re.numerator), int(value.re.denominator)),
                               Fraction(int(value.im.numerator), int(value.im.denominator)))
        if self.precision == 53:
            return complex(value)
        return self._ctx.mpc(value)

    def owns(self, value) -> bool:
        if self.exact:
            return isinstance(value, ExactComplex)
        if self.precision == 53:
            return isinstance(value, complex)
        return isinstance(value, _MPC) and value.context is self._ctx

    def format(self, value) -> tuple[str, str]:
        """Render a scalar as ``(re, im)`` strings that parse back identically."""
        if self.exact:
            return str(value.re), str(value.im)
        if self.precision == 53:
            return format(value.real, ".17g"), format(value.imag, ".17g")
        digits = int(math.ceil(self.precision * math.log10(2))) + 2
        return (
            mpmath.nstr(value.real, digits, strip_zeros=False),
            mpmath.nstr(value.imag, digits, strip_zeros=False),
        )

    def __str__(self):
        if self.exact:
            return "exact"
        return "floating" if self.precision == 53 else f"floating[{self.precision}]"


def _to_real(value, backend: Backend):
    if isinstance(value, str):
        text = value.strip()
        if "/" in text:
            value = Fraction(text)
        elif backend.precision > 53:
            return backend._ctx.mpf(text)
        else:
            return float(text)
    if isinstance(value, (Fraction, _MPQ)):
        if backend.precision > 53:
            return backend._ctx.mpf(int(value.numerator)) / int(value.denominator)
        return float(Fraction(int(value.numerator), int(value.denominator)))
    if backend.precision > 53:
        return backend._ctx.mpf(value)
    return float(value)


EXACT = Backend("exact")
FLOATING = Backend("floating", 53)


def backend_of(value) -> Backend:
    if isinstance(value, ExactComplex):
        return EXACT
    if isinstance(value, complex):
        return FLOATING
    if isinstance(value, _MPC):
        return Backend("floating", value.context.prec)
    raise TypeError(f"{type(value).__name__} is not a backend scalar")


def is_zero(value, eps: float | None = None) -> bool:
    """Zero test: exact equality, or ``|value| <= eps`` for floating scalars."""
    if isinstance(value, ExactComplex):
        return not value.re and not value.im
    if eps is None:
        eps = _eps_zero.get()
    return abs(value) <= eps


def abs2(value):
    """Squared modulus; exact (``mpq``) on the exact backend."""
    if isinstance(value, ExactComplex):
        return value.abs2()
    return abs(value) ** 2


def sqrt_magnitude(q):
    """Square root of a nonnegative exact rational, exact when it is a square."""
    q = mpq(q)
    num, den = q.numerator, q.denominator
    if gmpy2.is_square(num) and gmpy2.is_square(den):
        return mpq(gmpy2.isqrt(num), gmpy2.isqrt(den))
    return math.sqrt(q)


def magnitude(value):
    """Modulus ``|value|``.

    Exact scalars give an ``mpq`` when the modulus is rational (always the
    case for real or purely imaginary values) and a float otherwise.
    """
    if isinstance(value, ExactComplex):
        if not value.im:
            return abs(value.re)
        if not value.re:
            return abs(value.im)
        return sqrt_magnitude(value.abs2())
    return abs(value)


def log_magnitude(value_abs2) -> float:
    """``log |z|`` from a squared modulus, safe for huge or tiny rationals."""
    if isinstance(value_abs2, _MPQ):
        num, den = value_abs2.numerator, value_abs2.denominator
        return 0.5 * (math.log(int(num)) - math.log(int(den)))
    return 0.5 * math.log(float(value_abs2))
