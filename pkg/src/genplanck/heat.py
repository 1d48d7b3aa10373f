"""
Lattice thermodynamics: Einstein and Debye solids.

Internal energies exclude the zero-point term.  Temperatures characteristic
of each model are ``T_E = hbar ω_E / k`` and ``T_D = hbar ω_D / k``.  The
field-generalized Debye energy swaps the Bose-Einstein occupancy for
:func:`genplanck.extfield.generalized_occupancy` and leaves the phonon mode
density untouched.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, DomainError
from .extfield import ZERO_FIELD, ExternalField, q_correction_integral
from .quadrature import DEFAULT_SPEC, QuadratureSpec, integrate
from .radiation import SI, EXP_LIMIT, PhysicalConstants, _out, bose_occupancy
from .specfun import (debye_function, debye_function_derivative,
                      incomplete_bose_integral)

__all__ = [
    "EinsteinSolid", "DebyeSolid", "oscillator_mean_energy",
    "einstein_internal_energy", "einstein_heat_capacity",
    "einstein_heat_capacity_low_t", "einstein_internal_energy_low_t",
    "debye_solid_from_material", "debye_solid_from_temperature",
    "phonon_mode_density", "debye_mode_count", "debye_internal_energy",
    "debye_internal_energy_reduced", "debye_heat_capacity",
    "debye_low_t_heat_capacity", "debye_low_t_energy_coefficient",
    "generalized_phonon_internal_energy", "generalized_phonon_heat_capacity",
]


def _check_t(t):
    if not np.all(np.asarray(t) > 0):
        raise DomainError("temperature must be > 0")


def oscillator_mean_energy(epsilon, t, consts: PhysicalConstants = SI):
    """Mean thermal energy ``ε / (exp(ε/kT) - 1)`` of an oscillator with quantum ε."""
    _check_t(t)
    epsilon = np.asarray(epsilon, dtype=float)
    if np.any(epsilon <= 0):
        raise DomainError("epsilon must be > 0")
    return _out(epsilon * bose_occupancy(epsilon / (consts.k_boltzmann * t)))


@dataclass(frozen=True)
class EinsteinSolid:
    omega_e: float
    n_oscillators: float = 1.0

    def __post_init__(self):
        if not self.omega_e > 0:
            raise DomainError("omega_e must be > 0")
        if not self.n_oscillators >= 1:
            raise DomainError("n_oscillators must be >= 1")

    def temperature(self, consts: PhysicalConstants = SI) -> float:
        """Einstein temperature ``hbar ω_E / k``."""
        return consts.hbar * self.omega_e / consts.k_boltzmann


def einstein_internal_energy(solid: EinsteinSolid, t,
                             consts: PhysicalConstants = SI):
    """``U = 3N hbar ω_E / (exp(hbar ω_E/kT) - 1)``."""
    return _out(3.0 * solid.n_oscillators * np.asarray(
        oscillator_mean_energy(consts.hbar * solid.omega_e, t, consts)))


def einstein_heat_capacity(solid: EinsteinSolid, t,
                           consts: PhysicalConstants = SI):
    """
    Einstein heat capacity ``3Nk x² e^x / (e^x - 1)²``, ``x = hbar ω_E/kT``.

    Written as ``x² / ((e^x - 1)(1 - e^-x))``; exactly 0 for ``x > 700``.
    """
    _check_t(t)
    x = np.asarray(consts.hbar * solid.omega_e
                   / (consts.k_boltzmann * np.asarray(t, dtype=float)))
    with np.errstate(over="ignore"):
        xc = np.minimum(x, EXP_LIMIT)
        shape = np.where(x > EXP_LIMIT, 0.0,
                         xc * xc / (np.expm1(xc) * -np.expm1(-xc)))
    return _out(3.0 * solid.n_oscillators * consts.k_boltzmann * shape)


def einstein_heat_capacity_low_t(solid: EinsteinSolid, t,
                                 consts: PhysicalConstants = SI):
    """Low-temperature asymptote ``3Nk x² e^-x`` of the Einstein heat capacity."""
    _check_t(t)
    x = np.asarray(consts.hbar * solid.omega_e
                   / (consts.k_boltzmann * np.asarray(t, dtype=float)))
    return _out(3.0 * solid.n_oscillators * consts.k_boltzmann
                * x * x * np.exp(-x))


def einstein_internal_energy_low_t(solid: EinsteinSolid, t,
                                   consts: PhysicalConstants = SI):
    """Boltzmann-tail energy ``3N hbar ω_E exp(-hbar ω_E/kT)``."""
    _check_t(t)
    eps = consts.hbar * solid.omega_e
    return _out(3.0 * solid.n_oscillators * eps
                * np.exp(-eps / (consts.k_boltzmann * np.asarray(t, dtype=float))))


@dataclass(frozen=True)
class DebyeSolid:
    """
    Isotropic Debye continuum.

    Build it with :func:`debye_solid_from_material` or
    :func:`debye_solid_from_temperature`; the derived fields ``c_eff``,
    ``omega_d`` and ``t_d`` are filled in there.
    """

    n_density: float
    v_t: float
    v_l: float
    volume: float
    c_eff: float
    omega_d: float
    t_d: float

    @property
    def n_oscillators(self) -> float:
        return self.n_density * self.volume

    @property
    def inverse_speed_sum(self) -> float:
        """``2/v_t³ + 1/v_l³``."""
        return 2.0 / self.v_t ** 3 + 1.0 / self.v_l ** 3


def phonon_mode_density(omega, solid: DebyeSolid):
    """Phonon modes per angular frequency, ``V/(2π²) (2/v_t³ + 1/v_l³) ω²``."""
    omega = np.asarray(omega, dtype=float)
    return _out(solid.volume / (2.0 * math.pi ** 2) * solid.inverse_speed_sum
                * omega ** 2)


def debye_mode_count(solid: DebyeSolid,
                     spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """Number of phonon modes below ``ω_D``, by quadrature; should be 3N."""
    wd = solid.omega_d
    # integrate in u = ω/ω_D, normalized by 3N
    scale = 3.0 * solid.n_oscillators
    value, _ = integrate(
        lambda u: np.asarray(phonon_mode_density(u * wd, solid)) * wd / scale,
        0.0, 1.0, spec)
    return value * scale


def debye_solid_from_material(n_density: float, v_t: float, v_l: float,
                              volume: float = 1.0,
                              consts: PhysicalConstants = SI,
                              check_tol: float = 1e-10) -> DebyeSolid:
    """
    Debye solid from oscillator density N/V and sound speeds.

    The effective speed solves ``3/c³ = 2/v_t³ + 1/v_l³``, the cutoff is
    ``ω_D³ = 18π² (N/V) / (2/v_t³ + 1/v_l³)`` and ``T_D = hbar ω_D / k``.
    The mode count below ``ω_D`` is checked against 3N to ``check_tol``.
    """
    for name, value in (("n_density", n_density), ("v_t", v_t),
                        ("v_l", v_l), ("volume", volume)):
        if not (value > 0 and math.isfinite(value)):
            raise DomainError(f"{name} must be positive and finite")
    inv = 2.0 / v_t ** 3 + 1.0 / v_l ** 3
    c_eff = (3.0 / inv) ** (1.0 / 3.0)
    omega_d = (18.0 * math.pi ** 2 * n_density / inv) ** (1.0 / 3.0)
    t_d = consts.hbar * omega_d / consts.k_boltzmann
    solid = DebyeSolid(float(n_density), float(v_t), float(v_l),
                       float(volume), c_eff, omega_d, t_d)
    count = debye_mode_count(solid)
    if abs(count / (3.0 * solid.n_oscillators) - 1.0) > check_tol:
        raise ConvergenceError(
            f"mode count {count!r} differs from 3N = {3 * solid.n_oscillators!r}")
    return solid


def debye_solid_from_temperature(t_d: float, n_oscillators: float = 1.0,
                                 consts: PhysicalConstants = SI,
                                 volume: float = 1.0) -> DebyeSolid:
    """
    Debye solid with prescribed ``T_D`` and N.

    Heat capacities depend on these two only; the sound speed is set to the
    value that reproduces ``T_D`` at the given volume (``v_t = v_l``).
    """
    if not (t_d > 0 and n_oscillators > 0 and volume > 0):
        raise DomainError("t_d, n_oscillators and volume must be > 0")
    n_density = n_oscillators / volume
    omega_d = consts.k_boltzmann * t_d / consts.hbar
    speed = omega_d / (6.0 * math.pi ** 2 * n_density) ** (1.0 / 3.0)
    return debye_solid_from_material(n_density, speed, speed, volume, consts)


def _debye_prefactor(solid: DebyeSolid, t: float,
                     consts: PhysicalConstants) -> float:
    # 3V (kT)^4 / (2 π² c³ hbar³)
    kt = consts.k_boltzmann * t
    return (3.0 * solid.volume * kt ** 4
            / (2.0 * math.pi ** 2 * solid.c_eff ** 3 * consts.hbar ** 3))


def debye_internal_energy(solid: DebyeSolid, t: float,
                          consts: PhysicalConstants = SI,
                          spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """Debye energy ``3V(kT)⁴/(2π² c³ hbar³) ∫_0^{T_D/T} x³/(e^x-1) dx``."""
    _check_t(t)
    y = solid.t_d / t
    return (_debye_prefactor(solid, t, consts)
            * incomplete_bose_integral(3, y, spec).value)


def debye_internal_energy_reduced(solid: DebyeSolid, t: float,
                                  consts: PhysicalConstants = SI,
                                  spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """Same energy in Debye-function form, ``3NkT D(T_D/T)``."""
    _check_t(t)
    return (3.0 * solid.n_oscillators * consts.k_boltzmann * t
            * debye_function(solid.t_d / t, spec))


def debye_heat_capacity(solid: DebyeSolid, t: float,
                        consts: PhysicalConstants = SI,
                        spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """
    Debye heat capacity ``3Nk [D(y) - y D'(y)]`` at ``y = T_D/T``.

    ``D'`` is ``dD/dy``; the bracket equals ``dU/dT / 3Nk``.
    """
    _check_t(t)
    y = solid.t_d / t
    bracket = debye_function(y, spec) - y * debye_function_derivative(y, spec)
    return 3.0 * solid.n_oscillators * consts.k_boltzmann * bracket


def debye_low_t_energy_coefficient(solid: DebyeSolid,
                                   consts: PhysicalConstants = SI) -> float:
    """α in the low-temperature law ``U = α T⁴``: ``π² k⁴ V / (10 c³ hbar³)``."""
    return (math.pi ** 2 * consts.k_boltzmann ** 4 * solid.volume
            / (10.0 * solid.c_eff ** 3 * consts.hbar ** 3))


def debye_low_t_heat_capacity(solid: DebyeSolid, t,
                              consts: PhysicalConstants = SI):
    """T³ law ``(12π⁴/5) N k (T/T_D)³``."""
    t = np.asarray(t, dtype=float)
    return _out(12.0 * math.pi ** 4 / 5.0 * solid.n_oscillators
                * consts.k_boltzmann * (t / solid.t_d) ** 3)


def generalized_phonon_internal_energy(solid: DebyeSolid, t: float,
                                       field: ExternalField = ZERO_FIELD,
                                       consts: PhysicalConstants = SI,
                                       spec: QuadratureSpec = DEFAULT_SPEC
                                       ) -> float:
    """
    Debye energy with the field-modified occupancy.

    ``∫_0^{ω_D} G(ω) hbar ω [(1+P)/(e^x-1) - Q(ω)/(1-e^-x)] dω``, split into
    ``(1+P)`` times the ordinary Debye integral and a separate Q integral.
    """
    _check_t(t)
    y = solid.t_d / t
    value = (1.0 + field.p_coeff) * incomplete_bose_integral(3, y, spec).value
    if field.q_amplitude:
        a = field.q_decay * consts.k_boltzmann * t / consts.hbar
        value -= field.q_amplitude * q_correction_integral(a, y, spec)
    return _debye_prefactor(solid, t, consts) * value


def generalized_phonon_heat_capacity(solid: DebyeSolid, t: float,
                                     field: ExternalField = ZERO_FIELD,
                                     consts: PhysicalConstants = SI,
                                     spec: QuadratureSpec = DEFAULT_SPEC
                                     ) -> float:
    """
    ``dU/dT`` of :func:`generalized_phonon_internal_energy` by central
    differences, step ``max(1e-6 T, T * eps^(1/3))``.  The field is held
    fixed while T varies.
    """
    _check_t(t)
    h = max(1e-6 * t, t * np.finfo(float).eps ** (1.0 / 3.0))
    up = generalized_phonon_internal_energy(solid, t + h, field, consts, spec)
    down = generalized_phonon_internal_energy(solid, t - h, field, consts, spec)
    return float((up - down) / (2.0 * h))
