"""Closed-form exponents and constant bounds for the real Hardy--Littlewood inequalities.

``p`` is a float throughout; ``math.inf`` stands for the Bohnenblust--Hille
case and every formula handles it through an explicit limit rather than a
large finite stand-in.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import DomainError

__all__ = [
    "HLParams",
    "Exponent",
    "STEP2_CONSTANT",
    "hl_exponent",
    "dual_exponent",
    "lower_bound_001",
    "lower_bound_step4",
    "upper_const_known",
    "gamma",
]

# Literal upper bound for the bilinear seed norm at p = 4; kept exact.
STEP2_CONSTANT = Fraction(174, 100)

# power of two in the m >= 14 real branch, kept as the exact rational
_REAL_BRANCH_EXPONENT = Fraction(446381, 55440)


@dataclass(frozen=True)
class HLParams:
    """Arity ``m`` and exponent ``p`` of a Hardy--Littlewood inequality.

    ``p`` may be ``math.inf``. Construction validates ``m >= 2`` and
    ``p >= 2m``.
    """

    m: int
    p: float

    def __post_init__(self):
        if isinstance(self.m, bool) or int(self.m) != self.m:
            raise DomainError(f"m must be an integer, got {self.m!r}")
        object.__setattr__(self, "m", int(self.m))
        p = float(self.p)
        if math.isnan(p):
            raise DomainError("p must not be NaN")
        object.__setattr__(self, "p", p)
        if self.m < 2:
            raise DomainError(f"m must be >= 2, got {self.m}")
        if p < 2 * self.m:
            raise DomainError(f"p must be >= 2m = {2 * self.m}, got {p:g}")

    @property
    def is_infinite(self) -> bool:
        return math.isinf(self.p)


@dataclass(frozen=True)
class Exponent:
    rho: float
    dual_rho: float


def dual_exponent(q: float) -> float:
    """Conjugate exponent ``q / (q - 1)``; the conjugate of infinity is 1."""
    q = float(q)
    if math.isnan(q) or q <= 1:
        raise DomainError(f"dual exponent needs q > 1, got {q!r}")
    if math.isinf(q):
        return 1.0
    return q / (q - 1.0)


def hl_exponent(params: HLParams) -> Exponent:
    """The mixed-sum exponent ``2mp / (mp + p - 2m)`` and its conjugate."""
    m, p = params.m, params.p
    if params.is_infinite:
        rho = 2 * m / (m + 1)
    else:
        rho = 2 * m * p / (m * p + p - 2 * m)
    return Exponent(rho=rho, dual_rho=dual_exponent(rho) if rho > 1 else math.inf)


def lower_bound_001(params: HLParams) -> float:
    """``2^((mp + 2m - 2m^2 - p) / (mp))``; equal to 1 at ``p = 2m``.

    For ``p = inf`` this is the Bohnenblust--Hille bound ``2^(1 - 1/m)``.
    """
    m, p = params.m, params.p
    if params.is_infinite:
        return 2.0 ** (1.0 - 1.0 / m)
    # integer-valued numerator is exactly 0 at p = 2m
    return 2.0 ** ((m * p + 2 * m - 2 * m * m - p) / (m * p))


def lower_bound_step4(params: HLParams) -> float:
    """``2^((mp + (6 - 4 log2 1.74) m - 2m^2 - p) / (mp))`` for finite ``p >= 4``.

    This value rests on the real-scalar interpolation hypothesis for every
    ``p > 4``; at ``p = 4`` it reduces to ``2 / 1.74``. It is accepted for every
    finite ``p >= 2m``, not only the extreme case.
    """
    m, p = params.m, params.p
    if params.is_infinite:
        raise DomainError("step-4 bound is defined for finite p only")
    log_c = math.log2(float(STEP2_CONSTANT))
    return 2.0 ** ((m * p + (6 - 4 * log_c) * m - 2 * m * m - p) / (m * p))


def upper_const_known(params: HLParams, field: str = "real") -> float:
    """Known closed-form upper bound for ``C_{m,p}`` over the real or complex field.

    The real branch switches at ``m = 14`` to the Gamma-product form. At
    ``p = inf`` the limit (a Bohnenblust--Hille constant bound) is returned.
    """
    m, p = params.m, params.p
    if params.is_infinite:
        # p -> inf: the first factor's exponent vanishes, the second's tends to 1
        outer, inner = 0.0, 1.0
    else:
        outer = 2 * m * (m - 1) / p
        inner = (p - 2 * m) / p
    if field == "complex":
        prod = 1.0
        for j in range(2, m + 1):
            prod *= gamma(2.0 - 1.0 / j) ** (j / (2.0 - 2.0 * j))
        return (2.0 / math.sqrt(math.pi)) ** outer * prod**inner
    if field != "real":
        raise DomainError(f"field must be 'real' or 'complex', got {field!r}")
    if m >= 14:
        prod = 2.0 ** (float(_REAL_BRANCH_EXPONENT) - m / 2.0)
        for j in range(14, m + 1):
            prod *= (gamma(1.5 - 1.0 / j) / math.sqrt(math.pi)) ** (j / (2.0 - 2.0 * j))
    else:
        prod = 2.0 ** sum(1.0 / (2 * j - 2) for j in range(2, m + 1))
    return math.sqrt(2.0) ** outer * prod**inner


# Lanczos approximation, g = 7, nine terms (Godfrey's coefficients).
_LANCZOS_G = 7.0
_LANCZOS_COEFFS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)


def gamma(x: float) -> float:
    """Gamma function for positive real ``x``."""
    x = float(x)
    if not x > 0:
        raise DomainError(f"gamma is implemented for x > 0, got {x!r}")
    if x < 0.5:
        # reflection keeps the series argument in its accurate range
        return math.pi / (math.sin(math.pi * x) * gamma(1.0 - x))
    if x > 20.0:
        # Recurrence from a moderate argument limits exp/pow error growth.
        n = int(x - 10.0)
        base = x - n
        out = gamma(base)
        for k in range(n):
            out *= base + k
        return out
    z = x - 1.0
    acc = _LANCZOS_COEFFS[0]
    for i in range(1, len(_LANCZOS_COEFFS)):
        acc += _LANCZOS_COEFFS[i] / (z + i)
    t = z + _LANCZOS_G + 0.5
    return math.sqrt(2.0 * math.pi) * t ** (z + 0.5) * math.exp(-t) * acc
