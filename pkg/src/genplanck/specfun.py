"""
Special functions used across the package.

Bose integrals ``int_0^y x^s / (e^x - 1) dx``, the Debye function
``D(y) = 3/y^3 * int_0^y x^3/(e^x - 1) dx`` with its derivative, the gamma
function and the dimensionless peak of the n-dimensional Planck spectrum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import lambertw

from .errors import DegenerateCaseError, DomainError
from .quadrature import DEFAULT_SPEC, QuadratureSpec, integrate

__all__ = [
    "BoseIntegralResult", "gamma", "bose_integrand", "bose_integral",
    "incomplete_bose_integral", "bose_cutoff", "debye_function",
    "debye_function_derivative", "planck_peak",
]

# below this x the integrand uses its Taylor series
SMALL_X = 1e-4
# the infinite range is truncated where x^s e^-x falls under this
TAIL_FLOOR = 1e-30

# Debye-function series: D(y) = sum_n c_n y^n with c_n = 3 B_n / (n! (n+3)),
# valid for y < 2 pi; used for y < _DEBYE_SERIES_MAX.
_DEBYE_COEFFS = {
    0: 1.0,
    1: -3.0 / 8.0,
    2: 1.0 / 20.0,
    4: -1.0 / 1680.0,
    6: 1.0 / 90720.0,
    8: -1.0 / 4435200.0,
    10: 3.0 * (5.0 / 66.0) / (math.factorial(10) * 13),
}
_DEBYE_SERIES_MAX = 0.1


@dataclass(frozen=True)
class BoseIntegralResult:
    value: float
    error_estimate: float

    def __float__(self):
        return self.value


def gamma(x: float) -> float:
    """Euler gamma function for real ``x > 0``."""
    x = float(x)
    if not x > 0:
        raise DomainError(f"gamma requires x > 0, got {x}")
    return math.gamma(x)


def bose_integrand(x, s: float):
    """``x**s / (e**x - 1)``, with the small-x series substituted below 1e-4."""
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    small = x < SMALL_X
    xs = x[small]
    # x/(e^x - 1) = 1 - x/2 + x^2/12 - ...
    out[small] = xs ** (s - 1) * (1.0 - xs / 2.0 + xs * xs / 12.0)
    xl = x[~small]
    with np.errstate(over="ignore"):
        out[~small] = xl ** s / np.expm1(xl)
    return out


def bose_cutoff(s: float) -> float:
    """Upper limit standing in for infinity: at least 60, integrand < 1e-30."""
    x = 60.0
    log_floor = math.log(TAIL_FLOOR)
    while s * math.log(x) - x > log_floor:
        x += 5.0
    return x


def _check_order(s):
    s = float(s)
    if not s >= 1:
        raise DomainError(f"integrand order must be >= 1, got {s}")
    return s


def _bose_panels(upper: float) -> list[float]:
    return [p for p in (SMALL_X, 1.0, 4.0, 12.0, 30.0) if p < upper]


def bose_integral(s: float,
                  spec: QuadratureSpec = DEFAULT_SPEC) -> BoseIntegralResult:
    """
    Complete Bose integral ``int_0^inf x^s / (e^x - 1) dx``.

    Equals ``Gamma(s+1) * zeta(s+1)``; for ``s = 3`` this is ``pi^4/15``.
    """
    s = _check_order(s)
    upper = bose_cutoff(s)
    value, err = integrate(lambda x: bose_integrand(x, s), 0.0, upper, spec,
                           breakpoints=_bose_panels(upper))
    return BoseIntegralResult(value, err)


def incomplete_bose_integral(s: float, y: float,
                             spec: QuadratureSpec = DEFAULT_SPEC
                             ) -> BoseIntegralResult:
    """
    Incomplete Bose integral ``int_0^y x^s / (e^x - 1) dx``.

    For ``y`` beyond :func:`bose_cutoff` the remainder is below the tail
    floor and the integral is taken up to the cutoff only.
    """
    s = _check_order(s)
    y = float(y)
    if not y >= 0:
        raise DomainError(f"upper limit must be >= 0, got {y}")
    upper = min(y, bose_cutoff(s))
    if upper == 0.0:
        return BoseIntegralResult(0.0, 0.0)
    value, err = integrate(lambda x: bose_integrand(x, s), 0.0, upper, spec,
                           breakpoints=_bose_panels(upper))
    return BoseIntegralResult(value, err)


def _check_y(y):
    y = float(y)
    if not y > 0:
        raise DomainError(f"Debye function requires y > 0, got {y}")
    return y


def debye_function(y: float, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """
    Debye function ``D(y) = 3/y^3 * int_0^y x^3/(e^x - 1) dx``.

    ``D`` falls from 1 at ``y -> 0`` to ``(pi^4/5) / y^3`` for large ``y``.
    """
    y = _check_y(y)
    if y < _DEBYE_SERIES_MAX:
        return sum(c * y ** n for n, c in _DEBYE_COEFFS.items())
    return 3.0 * incomplete_bose_integral(3, y, spec).value / y ** 3


def debye_function_derivative(y: float,
                              spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """
    Derivative ``dD/dy`` of :func:`debye_function`.

    Uses ``D'(y) = -3 D(y)/y + 3/(e^y - 1)``, or the differentiated series
    for small ``y`` where that difference cancels badly.  ``D'(0) = -3/8``.
    """
    y = _check_y(y)
    if y < _DEBYE_SERIES_MAX:
        return sum(n * c * y ** (n - 1)
                   for n, c in _DEBYE_COEFFS.items() if n > 0)
    tail = 0.0 if y > 700.0 else 3.0 / math.expm1(y)
    return -3.0 * debye_function(y, spec) / y + tail


def planck_peak(n: int) -> float:
    """
    Dimensionless peak ``x* = hbar*omega/kT`` of the n-dimensional Planck
    spectrum, i.e. the positive root of ``x = n (1 - exp(-x))``.

    The root is ``n + W0(-n e^-n)`` (principal Lambert W), polished with
    Newton steps.  For ``n = 1`` no positive root exists and
    :class:`DegenerateCaseError` is raised.
    """
    if isinstance(n, bool) or int(n) != n:
        raise DomainError(f"dimension must be an integer, got {n!r}")
    n = int(n)
    if n < 1:
        raise DomainError(f"dimension must be >= 1, got {n}")
    if n == 1:
        raise DegenerateCaseError(
            "x = 1 - exp(-x) has no positive root; the 1-D spectrum "
            "peaks at omega = 0")
    x = n + float(lambertw(-n * math.exp(-n), 0).real)
    for _ in range(3):
        f = x - n * (1.0 - math.exp(-x))
        fp = 1.0 - n * math.exp(-x)
        x -= f / fp
    return x
