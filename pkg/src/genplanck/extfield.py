"""
Planck law for a blackbody exposed to an external field.

The field opens two extra transition channels between the levels, with
rates ``C_mn = P * A_mn`` (down) and ``C_nm = Q(ω) * A_mn`` (up).  Solving
the rate balance replaces the Bose-Einstein occupancy by

    (1 + P - Q(ω) e^x) / (e^x - 1),        x = hbar ω / kT,

with ``P`` constant and ``Q(ω) = R exp(-S ω)``.  The density may turn
negative for some fields; that is reported by :func:`scan_field_diagnostics`
and never clamped.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DivergenceError, DomainError
from .quadrature import DEFAULT_SPEC, QuadratureSpec, integrate
from .radiation import (EXP_LIMIT, SI, EinsteinCoefficients, LevelPopulations,
                        PhysicalConstants, SpectralGrid, _check_transition,
                        _out, _positive, bose_occupancy, mode_density_3d)
from .specfun import bose_integral

__all__ = [
    "ExternalField", "FieldDiagnostics", "q_of_omega",
    "generalized_occupancy", "generalized_spectral_density",
    "field_correction_density", "relative_correction",
    "equilibrium_residual_with_field", "scan_field_diagnostics",
    "generalized_total_energy", "q_correction_integral",
]


@dataclass(frozen=True)
class ExternalField:
    """
    Field parameters: constant ``P = p_coeff`` and ``Q(ω) = R exp(-S ω)``.

    ``q_decay`` (S) carries units of inverse angular frequency so that
    ``S * ω`` is dimensionless.  The default instance is the zero field.
    """

    p_coeff: float = 0.0
    q_amplitude: float = 0.0
    q_decay: float = 0.0

    def __post_init__(self):
        for name in ("p_coeff", "q_amplitude", "q_decay"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise DomainError(f"{name} must be finite")
            object.__setattr__(self, name, value)
        if self.q_amplitude < 0:
            raise DomainError("q_amplitude (R) must be >= 0")
        if self.q_decay < 0:
            raise DomainError("q_decay (S) must be >= 0")

    @property
    def is_zero(self) -> bool:
        return self.p_coeff == 0 and self.q_amplitude == 0

    @property
    def energy_finite(self) -> bool:
        return self.q_decay > 0 or self.q_amplitude == 0

    def q(self, omega):
        return q_of_omega(self, omega)


ZERO_FIELD = ExternalField()


@dataclass(frozen=True)
class FieldDiagnostics:
    first_negative_omega: Optional[float]
    energy_finite: bool
    max_relative_correction: float


def q_of_omega(field: ExternalField, omega):
    """``R exp(-S ω)``."""
    omega = np.asarray(omega, dtype=float)
    if np.any(omega < 0):
        raise DomainError("omega must be >= 0")
    if field.q_amplitude == 0:
        return _out(np.zeros_like(omega))
    return _out(field.q_amplitude * np.exp(-field.q_decay * omega))


def generalized_occupancy(x, p: float, q):
    """
    Field-modified occupancy ``(1 + p - q e^x) / (e^x - 1)``.

    Computed as ``(1 + p)/(e^x - 1) - q/(1 - e^-x)``, which needs no
    overflow guard; for ``x > 700`` the first term is exactly 0 and the
    result tends to ``-q``.
    """
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise DomainError("x must be > 0")
    be = (1.0 + p) * bose_occupancy(x)
    q = np.asarray(q, dtype=float)
    if not np.any(q):
        return _out(be - np.zeros_like(x))
    return _out(be - q / -np.expm1(-x))


def generalized_spectral_density(omega, t, field: ExternalField = ZERO_FIELD,
                                 consts: PhysicalConstants = SI):
    """
    Generalized spectral energy density ``hbar ω³/(π² c³) * occupancy``.

    For the zero field this reproduces :func:`planck_spectral_density`
    bit for bit.
    """
    _positive("omega", omega)
    _positive("temperature", t)
    omega = np.asarray(omega, dtype=float)
    occ = generalized_occupancy(consts.x(omega, t), field.p_coeff,
                                q_of_omega(field, omega))
    return _out(mode_density_3d(omega, consts) * (consts.hbar * omega * occ))


def field_correction_density(omega, t, field: ExternalField,
                             consts: PhysicalConstants = SI):
    """Field term added to the Planck density: ``hbar ω³/(π² c³) (P - Q e^x)/(e^x - 1)``."""
    _positive("omega", omega)
    _positive("temperature", t)
    omega = np.asarray(omega, dtype=float)
    x = consts.x(omega, t)
    q = np.asarray(q_of_omega(field, omega))
    term = field.p_coeff * bose_occupancy(x) - q / -np.expm1(-x)
    return _out(mode_density_3d(omega, consts) * (consts.hbar * omega * term))


def relative_correction(omega, t, field: ExternalField,
                        consts: PhysicalConstants = SI):
    """
    ``rho_gen / rho_planck - 1 = P - R exp(x - S ω)``.

    NaN where ``x > 700``: the Planck density has underflowed there.
    """
    omega = np.asarray(omega, dtype=float)
    x = consts.x(omega, t)
    with np.errstate(over="ignore"):
        qe = (field.q_amplitude * np.exp(x - field.q_decay * omega)
              if field.q_amplitude else np.zeros_like(x))
    rel = np.where(x > EXP_LIMIT, np.nan, field.p_coeff - qe)
    return _out(rel)


def equilibrium_residual_with_field(coeffs: EinsteinCoefficients,
                                    pops: LevelPopulations, rho: float,
                                    field: ExternalField,
                                    consts: PhysicalConstants = SI) -> float:
    """
    Net downward rate including the field channels::

        N_m A + N_m ρ B + N_m C_mn - N_n ρ B - N_n C_nm

    with ``C_mn = P A`` and ``C_nm = Q(ω) A``.  Vanishes when ``rho`` is
    the generalized density.
    """
    _check_transition(coeffs, pops, consts)
    a = coeffs.a_mn
    c_mn = field.p_coeff * a
    c_nm = float(q_of_omega(field, coeffs.omega)) * a
    return (pops.n_upper * a
            + pops.n_upper * rho * coeffs.b_mn
            + pops.n_upper * c_mn
            - pops.n_lower * rho * coeffs.b_nm
            - pops.n_lower * c_nm)


def scan_field_diagnostics(field: ExternalField, t: float, grid: SpectralGrid,
                           consts: PhysicalConstants = SI) -> FieldDiagnostics:
    """Scan a grid for negative density and the largest deviation from Planck."""
    omega = grid.omegas()
    rho = np.asarray(generalized_spectral_density(omega, t, field, consts))
    negative = np.flatnonzero(rho < 0)
    first = float(omega[negative[0]]) if negative.size else None
    rel = np.abs(np.asarray(relative_correction(omega, t, field, consts)))
    rel = rel[np.isfinite(rel)]
    max_rel = float(rel.max()) if rel.size else 0.0
    return FieldDiagnostics(first, field.energy_finite, max_rel)


def _q_cutoff(a: float) -> float:
    # x where x^3 exp(-a x) has fallen 1e-30 below max(1, its peak)
    log_floor = math.log(1e-30) + 3.0 * max(0.0, math.log(3.0 / a) - 1.0)
    x = max(60.0, 3.0 / a)
    while 3.0 * math.log(x) - a * x > log_floor:
        x *= 1.25
    return x


def q_correction_integral(decay: float, upper: Optional[float] = None,
                          spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """
    ``int_0^upper x^3 exp(-a x) / (1 - e^-x) dx`` with ``a = S kT/hbar``.

    With ``upper=None`` the range is infinite, which needs ``a > 0``; the
    value is then ``6 * zeta(4, a)`` (Hurwitz zeta).
    """
    a = float(decay)
    if a < 0:
        raise DomainError("decay must be >= 0")
    if upper is None:
        if a == 0:
            raise DivergenceError("Q-term integral diverges unless S > 0")
        upper = _q_cutoff(a)
    elif upper < 0:
        raise DomainError("upper limit must be >= 0")
    if upper == 0:
        return 0.0

    def integrand(x):
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(x > 0, x / -np.expm1(-x), 1.0)
        return x * x * ratio * np.exp(-a * x)

    marks = [1.0] + ([k / a for k in (1.0, 3.0, 10.0, 30.0)] if a else [])
    value, _ = integrate(integrand, 0.0, upper, spec,
                         breakpoints=[m for m in marks if m < upper])
    return value


def generalized_total_energy(t: float, field: ExternalField = ZERO_FIELD,
                             consts: PhysicalConstants = SI,
                             spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """
    Energy per volume of the generalized spectrum, integrated over all ω.

    The integral splits into ``(1 + P)`` times the Bose-Einstein part and
    the Q part, each done by quadrature in ``x = hbar ω/kT``.

    Raises
    ------
    DivergenceError
        For ``S = 0`` with ``R > 0``; the Q part then grows like ``x^3``.
    """
    _positive("temperature", t)
    if not field.energy_finite:
        raise DivergenceError(
            "generalized energy diverges for S = 0 with R > 0")
    kt = consts.k_boltzmann * t
    norm = kt ** 4 / (math.pi ** 2 * consts.hbar ** 3 * consts.c ** 3)
    value = (1.0 + field.p_coeff) * bose_integral(3, spec).value
    if field.q_amplitude:
        a = field.q_decay * kt / consts.hbar
        value -= field.q_amplitude * q_correction_integral(a, spec=spec)
    return value * norm
