"""
Blackbody radiation in three and n dimensions.

Spectral densities here are energies per unit (n-)volume per unit angular
frequency.  Every function takes a :class:`PhysicalConstants` so SI and
natural units (hbar = k = c = 1) can be mixed freely in one process.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DomainError
from .quadrature import DEFAULT_SPEC, QuadratureSpec, integrate
from .specfun import bose_cutoff, gamma

__all__ = [
    "UnitMode", "PhysicalConstants", "SI", "NATURAL", "Spacing",
    "SpectralGrid", "SpectralDensity", "EinsteinCoefficients",
    "LevelPopulations", "bose_occupancy", "mean_photon_energy",
    "mode_density_3d", "mode_density_nd", "planck_spectral_density",
    "planck_spectral_density_nd", "spectral_density", "einstein_b_from_a",
    "detailed_balance_residual", "total_energy_density",
    "stefan_boltzmann_energy_density", "default_grid",
]

# exponent beyond which exp() is treated as overflowed
EXP_LIMIT = 700.0


class UnitMode(str, enum.Enum):
    SI = "si"
    NATURAL = "natural"


@dataclass(frozen=True)
class PhysicalConstants:
    """hbar [J s], Boltzmann k [J/K], c [m/s] and the unit convention."""

    hbar: float = 1.054571817e-34
    k_boltzmann: float = 1.380649e-23
    c: float = 2.99792458e8
    mode: UnitMode = UnitMode.SI

    def __post_init__(self):
        object.__setattr__(self, "mode", UnitMode(self.mode))
        for name in ("hbar", "k_boltzmann", "c"):
            if not getattr(self, name) > 0:
                raise DomainError(f"{name} must be positive")
        if self.mode is UnitMode.NATURAL and (
                self.hbar, self.k_boltzmann, self.c) != (1.0, 1.0, 1.0):
            raise DomainError("natural units require hbar = k = c = 1")

    @classmethod
    def si(cls) -> "PhysicalConstants":
        return cls()

    @classmethod
    def natural(cls) -> "PhysicalConstants":
        return cls(1.0, 1.0, 1.0, UnitMode.NATURAL)

    @classmethod
    def for_mode(cls, mode) -> "PhysicalConstants":
        return cls.natural() if UnitMode(mode) is UnitMode.NATURAL else cls.si()

    def x(self, omega, t):
        """Dimensionless ``hbar*omega / (k*T)``."""
        return self.hbar * np.asarray(omega, dtype=float) / (
            self.k_boltzmann * t)


SI = PhysicalConstants.si()
NATURAL = PhysicalConstants.natural()


def _out(a):
    a = np.asarray(a, dtype=float)
    return float(a) if a.ndim == 0 else a


def _positive(name, value):
    if not np.all(np.asarray(value) > 0):
        raise DomainError(f"{name} must be > 0")


def bose_occupancy(x):
    """``1 / (e^x - 1)``; exactly 0 once ``x`` exceeds 700."""
    x = np.asarray(x, dtype=float)
    with np.errstate(over="ignore", divide="ignore"):
        occ = np.where(x > EXP_LIMIT, 0.0, 1.0 / np.expm1(np.minimum(x, EXP_LIMIT)))
    return _out(occ)


def mean_photon_energy(omega, t, consts: PhysicalConstants = SI):
    """Mean energy of a mode, ``hbar*omega / (exp(hbar*omega/kT) - 1)``."""
    _positive("omega", omega)
    _positive("temperature", t)
    omega = np.asarray(omega, dtype=float)
    return _out(consts.hbar * omega * bose_occupancy(consts.x(omega, t)))


def mode_density_3d(omega, consts: PhysicalConstants = SI):
    """Electromagnetic modes per volume per angular frequency, ω²/(π²c³)."""
    omega = np.asarray(omega, dtype=float)
    if np.any(omega < 0):
        raise DomainError("omega must be >= 0")
    return _out(omega ** 2 / (math.pi ** 2 * consts.c ** 3))


def _nd_prefactor(n: int, consts: PhysicalConstants) -> float:
    # 2 polarizations * 1/2^(n-1) * 1/Gamma(n/2) * 1/pi^(n/2) * 1/c^n
    return 2.0 / (2.0 ** (n - 1) * gamma(n / 2.0) * math.pi ** (n / 2.0)
                  * consts.c ** n)


def _check_dim(n):
    if isinstance(n, bool) or int(n) != n or n < 1:
        raise DomainError(f"dimension must be an integer >= 1, got {n!r}")
    return int(n)


def mode_density_nd(omega, n: int, consts: PhysicalConstants = SI):
    """
    Modes per n-volume per angular frequency in n dimensions.

    Two polarizations are counted for every ``n``.  At ``n = 3`` this is
    :func:`mode_density_3d`.
    """
    n = _check_dim(n)
    omega = np.asarray(omega, dtype=float)
    if np.any(omega < 0):
        raise DomainError("omega must be >= 0")
    return _out(_nd_prefactor(n, consts) * omega ** (n - 1))


def planck_spectral_density(omega, t, consts: PhysicalConstants = SI):
    """
    Planck spectral energy density ``hbar ω³/(π² c³) / (exp(hbar ω/kT) - 1)``.

    Evaluated as mode density times mean photon energy.
    """
    return _out(mode_density_3d(omega, consts)
                * mean_photon_energy(omega, t, consts))


def planck_spectral_density_nd(omega, t, n: int,
                               consts: PhysicalConstants = SI):
    """Planck spectral density of an n-dimensional cavity."""
    return _out(mode_density_nd(omega, n, consts)
                * mean_photon_energy(omega, t, consts))


class Spacing(str, enum.Enum):
    LINEAR = "linear"
    LOG = "log"


@dataclass(frozen=True)
class SpectralGrid:
    omega_min: float
    omega_max: float
    points: int = 512
    spacing: Spacing = Spacing.LOG

    def __post_init__(self):
        object.__setattr__(self, "spacing", Spacing(self.spacing))
        if not 0 < self.omega_min < self.omega_max:
            raise DomainError("need 0 < omega_min < omega_max")
        if int(self.points) != self.points or self.points < 2:
            raise DomainError("a grid needs at least 2 points")

    def omegas(self) -> np.ndarray:
        if self.spacing is Spacing.LOG:
            return np.geomspace(self.omega_min, self.omega_max, int(self.points))
        return np.linspace(self.omega_min, self.omega_max, int(self.points))


def default_grid(t: float, consts: PhysicalConstants = SI,
                 points: int = 512) -> SpectralGrid:
    """Log grid spanning ``hbar*omega/kT`` from 1e-3 to 50."""
    scale = consts.k_boltzmann * t / consts.hbar
    return SpectralGrid(1e-3 * scale, 50.0 * scale, points, Spacing.LOG)


@dataclass(frozen=True)
class SpectralDensity:
    """Sampled spectrum ``rho(omega)`` with the state that produced it."""

    omega: np.ndarray
    rho: np.ndarray
    dimension: int
    temperature: float
    field_tag: Optional[object] = None

    def __post_init__(self):
        if self.omega.shape != self.rho.shape:
            raise DomainError("omega and rho must have equal length")
        if np.any(np.diff(self.omega) <= 0):
            raise DomainError("omega must be strictly increasing")
        if not np.all(np.isfinite(self.rho)):
            raise DomainError("rho must be finite")


def spectral_density(grid: SpectralGrid, t: float, n: int = 3,
                     consts: PhysicalConstants = SI) -> SpectralDensity:
    omega = grid.omegas()
    if n == 3:
        rho = planck_spectral_density(omega, t, consts)
    else:
        rho = planck_spectral_density_nd(omega, t, n, consts)
    return SpectralDensity(omega, np.asarray(rho), n, float(t))


@dataclass(frozen=True)
class EinsteinCoefficients:
    """Spontaneous rate ``a_mn`` and the stimulated coefficients for ω."""

    a_mn: float
    b_mn: float
    b_nm: float
    omega: float

    def __post_init__(self):
        if not self.a_mn > 0:
            raise DomainError("a_mn must be > 0")
        if self.b_mn != self.b_nm:
            raise DomainError("stimulated coefficients must be equal")


def einstein_b_from_a(a_mn: float, omega: float,
                      consts: PhysicalConstants = SI) -> EinsteinCoefficients:
    """``B_mn = B_nm = π² c³ / (hbar ω³) * A_mn``."""
    if not (a_mn > 0 and omega > 0):
        raise DomainError("a_mn and omega must be > 0")
    b = math.pi ** 2 * consts.c ** 3 / (consts.hbar * omega ** 3) * a_mn
    return EinsteinCoefficients(float(a_mn), b, b, float(omega))


@dataclass(frozen=True)
class LevelPopulations:
    """Occupations of the upper (m) and lower (n) level of a transition."""

    n_upper: float
    n_lower: float
    e_upper: float
    e_lower: float
    temperature: float

    def __post_init__(self):
        if not (self.n_upper > 0 and self.n_lower > 0):
            raise DomainError("populations must be > 0")
        if not self.e_upper > self.e_lower:
            raise DomainError("e_upper must exceed e_lower")

    @classmethod
    def thermal(cls, omega: float, t: float, consts: PhysicalConstants = SI,
                e_lower: float = 0.0, prefactor: float = 1.0):
        """Maxwell populations ``D exp(-E/kT)`` with ``E_m - E_n = hbar ω``.

        ``prefactor`` is the normalization ``D``; it cancels from every
        rate balance.
        """
        e_upper = e_lower + consts.hbar * omega
        kt = consts.k_boltzmann * t
        # measure energies from e_lower so the ratio is exactly exp(-x)
        n_lower = prefactor
        n_upper = prefactor * math.exp(-(e_upper - e_lower) / kt)
        return cls(n_upper, n_lower, e_upper, e_lower, float(t))


def _check_transition(coeffs: EinsteinCoefficients, pops: LevelPopulations,
                      consts: PhysicalConstants):
    gap = pops.e_upper - pops.e_lower
    photon = consts.hbar * coeffs.omega
    if abs(gap - photon) > 1e-9 * photon:
        raise DomainError("level gap does not match hbar*omega")


def detailed_balance_residual(coeffs: EinsteinCoefficients,
                              pops: LevelPopulations, rho: float,
                              consts: PhysicalConstants = SI) -> float:
    """
    Net downward rate ``N_m A + N_m ρ B_mn - N_n ρ B_nm`` (hbar ω dropped).

    Zero when ``rho`` is the Planck density at the population temperature,
    positive for weaker fields and negative for stronger ones.
    """
    _check_transition(coeffs, pops, consts)
    return (pops.n_upper * coeffs.a_mn
            + pops.n_upper * rho * coeffs.b_mn
            - pops.n_lower * rho * coeffs.b_nm)


def stefan_boltzmann_energy_density(t: float,
                                    consts: PhysicalConstants = SI) -> float:
    """Closed-form photon energy density ``π² k⁴ T⁴ / (15 hbar³ c³)``."""
    return (math.pi ** 2 * consts.k_boltzmann ** 4 * t ** 4
            / (15.0 * consts.hbar ** 3 * consts.c ** 3))


def total_energy_density(t: float, n: int = 3,
                         consts: PhysicalConstants = SI,
                         spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """
    Energy per n-volume, the integral of the n-dimensional density over ω.

    The density is integrated in ``x = hbar ω/kT``, normalized by
    ``(kT)^(n+1) / (hbar c)^n`` so the quadrature tolerances are
    dimensionless.
    """
    n = _check_dim(n)
    _positive("temperature", t)
    omega_scale = consts.k_boltzmann * t / consts.hbar
    norm = (consts.k_boltzmann * t) ** (n + 1) / (consts.hbar * consts.c) ** n

    def integrand(x):
        out = np.zeros_like(x)
        pos = x > 0
        rho = planck_spectral_density_nd(x[pos] * omega_scale, t, n, consts)
        out[pos] = rho * omega_scale / norm
        return out

    upper = bose_cutoff(n)
    value, _ = integrate(integrand, 0.0, upper, spec,
                         breakpoints=[p for p in (1.0, 4.0, 12.0, 30.0)
                                      if p < upper])
    return value * norm
