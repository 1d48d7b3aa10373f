"""
Measured spectra: container, axis-convention conversions and CSV I/O.

CSV layout::

    # abscissa_kind: wavelength|frequency|angular
    # ordinate_kind: per_lambda|per_nu|per_omega
    # units: si|natural
    abscissa,value[,sigma]
    ...

Comment lines are optional (defaults: angular, per_omega, si).  Rows may be
in any order; they are sorted by abscissa on load.
"""

from __future__ import annotations

import csv
import enum
import io
import math
import os
from dataclasses import dataclass, replace
from typing import Optional, Union

import numpy as np

from .errors import DomainError
from .radiation import PhysicalConstants, UnitMode

__all__ = [
    "AbscissaKind", "OrdinateKind", "SpectrumDataset", "DatasetError",
    "convert_to_canonical", "convert_from_canonical", "read_spectrum_csv",
    "write_spectrum_csv", "format_float",
]


class DatasetError(DomainError):
    """Malformed spectrum data or CSV input."""


class AbscissaKind(str, enum.Enum):
    ANGULAR = "angular"
    FREQUENCY = "frequency"
    WAVELENGTH = "wavelength"


class OrdinateKind(str, enum.Enum):
    PER_OMEGA = "per_omega"
    PER_NU = "per_nu"
    PER_LAMBDA = "per_lambda"


@dataclass(frozen=True)
class SpectrumDataset:
    """Spectrum samples ``(abscissa, value, sigma)`` and their conventions."""

    abscissa: np.ndarray
    value: np.ndarray
    sigma: Optional[np.ndarray] = None
    abscissa_kind: AbscissaKind = AbscissaKind.ANGULAR
    ordinate_kind: OrdinateKind = OrdinateKind.PER_OMEGA
    source_label: str = ""
    units: UnitMode = UnitMode.SI

    def __post_init__(self):
        x = np.asarray(self.abscissa, dtype=float)
        v = np.asarray(self.value, dtype=float)
        object.__setattr__(self, "abscissa", x)
        object.__setattr__(self, "value", v)
        object.__setattr__(self, "abscissa_kind", AbscissaKind(self.abscissa_kind))
        object.__setattr__(self, "ordinate_kind", OrdinateKind(self.ordinate_kind))
        object.__setattr__(self, "units", UnitMode(self.units))
        if x.ndim != 1 or x.shape != v.shape:
            raise DatasetError("abscissa and value must be 1-D of equal length")
        if np.any(np.diff(x) <= 0):
            raise DatasetError("abscissa must be strictly increasing")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(v))):
            raise DatasetError("abscissa and values must be finite")
        if self.sigma is not None:
            s = np.asarray(self.sigma, dtype=float)
            object.__setattr__(self, "sigma", s)
            if s.shape != v.shape:
                raise DatasetError("sigma must match value length")
            if not np.all(s > 0):
                raise DatasetError("sigma must be > 0")

    def __len__(self):
        return self.value.size

    @property
    def is_canonical(self) -> bool:
        return (self.abscissa_kind is AbscissaKind.ANGULAR
                and self.ordinate_kind is OrdinateKind.PER_OMEGA)

    @classmethod
    def from_unsorted(cls, abscissa, value, sigma=None, **kwargs):
        order = np.argsort(np.asarray(abscissa, dtype=float), kind="stable")
        abscissa = np.asarray(abscissa, dtype=float)[order]
        value = np.asarray(value, dtype=float)[order]
        if sigma is not None:
            sigma = np.asarray(sigma, dtype=float)[order]
        return cls(abscissa, value, sigma, **kwargs)


def _omega_from(abscissa, kind: AbscissaKind, consts: PhysicalConstants):
    if np.any(abscissa <= 0):
        raise DatasetError(f"{kind.value} abscissa must be > 0")
    if kind is AbscissaKind.ANGULAR:
        return abscissa.copy()
    if kind is AbscissaKind.FREQUENCY:
        return 2.0 * math.pi * abscissa
    return 2.0 * math.pi * consts.c / abscissa


def _abscissa_from(omega, kind: AbscissaKind, consts: PhysicalConstants):
    if kind is AbscissaKind.ANGULAR:
        return omega.copy()
    if kind is AbscissaKind.FREQUENCY:
        return omega / (2.0 * math.pi)
    return 2.0 * math.pi * consts.c / omega


def _per_omega_factor(omega, kind: OrdinateKind, consts: PhysicalConstants):
    """Factor f with rho_kind = f * rho_omega at each ω."""
    if kind is OrdinateKind.PER_OMEGA:
        return np.ones_like(omega)
    if kind is OrdinateKind.PER_NU:
        return np.full_like(omega, 2.0 * math.pi)
    # |dω/dλ| = 2πc/λ²
    lam = 2.0 * math.pi * consts.c / omega
    return 2.0 * math.pi * consts.c / lam ** 2


def convert_to_canonical(ds: SpectrumDataset,
                         consts: Optional[PhysicalConstants] = None
                         ) -> SpectrumDataset:
    """
    Re-express a spectrum as energy density per unit angular frequency on
    an increasing ω axis.

    ``rho_nu = 2π rho_omega`` and ``rho_lambda = (2πc/λ²) rho_omega`` with
    ``ω = 2πc/λ``.  Sigmas transform like the values.
    """
    consts = consts or PhysicalConstants.for_mode(ds.units)
    if ds.is_canonical:
        return ds
    omega = _omega_from(ds.abscissa, ds.abscissa_kind, consts)
    factor = _per_omega_factor(omega, ds.ordinate_kind, consts)
    value = ds.value / factor
    sigma = None if ds.sigma is None else ds.sigma / factor
    return SpectrumDataset.from_unsorted(
        omega, value, sigma, source_label=ds.source_label, units=ds.units)


def convert_from_canonical(ds: SpectrumDataset, abscissa_kind, ordinate_kind,
                           consts: Optional[PhysicalConstants] = None
                           ) -> SpectrumDataset:
    """Inverse of :func:`convert_to_canonical`."""
    consts = consts or PhysicalConstants.for_mode(ds.units)
    if not ds.is_canonical:
        raise DatasetError("input must be canonical (angular, per_omega)")
    abscissa_kind = AbscissaKind(abscissa_kind)
    ordinate_kind = OrdinateKind(ordinate_kind)
    if np.any(ds.abscissa <= 0):
        raise DatasetError("angular frequency must be > 0")
    factor = _per_omega_factor(ds.abscissa, ordinate_kind, consts)
    x = _abscissa_from(ds.abscissa, abscissa_kind, consts)
    return SpectrumDataset.from_unsorted(
        x, ds.value * factor, None if ds.sigma is None else ds.sigma * factor,
        abscissa_kind=abscissa_kind, ordinate_kind=ordinate_kind,
        source_label=ds.source_label, units=ds.units)


_META_KEYS = {
    "abscissa_kind": AbscissaKind,
    "ordinate_kind": OrdinateKind,
    "units": UnitMode,
}


def read_spectrum_csv(source: Union[str, os.PathLike, io.TextIOBase],
                      source_label: Optional[str] = None) -> SpectrumDataset:
    """
    Parse the spectrum CSV format.

    ``source`` is a path or an open text stream.  Errors carry the 1-based
    line number of the offending line.
    """
    if isinstance(source, (str, os.PathLike)):
        label = source_label or os.fspath(source)
        with open(source, encoding="utf-8", newline="") as fh:
            text = fh.read()
    else:
        label = source_label or getattr(source, "name", "<stream>")
        text = source.read()

    meta = {}
    header = None
    rows = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped:
            continue
        if stripped.startswith("#"):
            body = stripped[1:].strip()
            if ":" in body:
                key, _, val = body.partition(":")
                key = key.strip().lower()
                if key in _META_KEYS:
                    try:
                        meta[key] = _META_KEYS[key](val.strip().lower())
                    except ValueError:
                        raise DatasetError(
                            f"line {lineno}: bad {key} {val.strip()!r}") from None
            continue
        fields = [f.strip() for f in next(csv.reader([stripped]))]
        if header is None:
            if fields[:2] != ["abscissa", "value"] or len(fields) > 3 or (
                    len(fields) == 3 and fields[2] != "sigma"):
                raise DatasetError(
                    f"line {lineno}: expected header 'abscissa,value[,sigma]', "
                    f"got {stripped!r}")
            header = fields
            continue
        if len(fields) != len(header):
            raise DatasetError(
                f"line {lineno}: expected {len(header)} fields, got {len(fields)}")
        try:
            nums = [float(f) for f in fields]
        except ValueError:
            raise DatasetError(f"line {lineno}: non-numeric field in {stripped!r}") from None
        if not all(math.isfinite(n) for n in nums):
            raise DatasetError(f"line {lineno}: non-finite value")
        if len(nums) == 3 and not nums[2] > 0:
            raise DatasetError(f"line {lineno}: sigma must be > 0")
        rows.append((lineno, nums))

    if header is None:
        raise DatasetError("missing header line 'abscissa,value[,sigma]'")
    if not rows:
        raise DatasetError("no data rows")
    data = np.array([r[1] for r in rows])
    order = np.argsort(data[:, 0], kind="stable")
    xs = data[order, 0]
    dup = np.flatnonzero(np.diff(xs) == 0)
    if dup.size:
        raise DatasetError(
            f"line {rows[order[dup[0] + 1]][0]}: duplicate abscissa {xs[dup[0]]!r}")
    sigma = data[order, 2] if data.shape[1] == 3 else None
    return SpectrumDataset(xs, data[order, 1], sigma, source_label=label, **meta)


def format_float(x: float) -> str:
    """Shortest text that parses back to exactly ``x``."""
    return repr(float(x))


def write_spectrum_csv(ds: SpectrumDataset, target=None) -> str:
    """Serialize ``ds`` in the CSV format; also writes to ``target`` if given."""
    out = io.StringIO()
    out.write(f"# abscissa_kind: {ds.abscissa_kind.value}\n")
    out.write(f"# ordinate_kind: {ds.ordinate_kind.value}\n")
    out.write(f"# units: {ds.units.value}\n")
    if ds.sigma is None:
        out.write("abscissa,value\n")
        for x, v in zip(ds.abscissa, ds.value):
            out.write(f"{format_float(x)},{format_float(v)}\n")
    else:
        out.write("abscissa,value,sigma\n")
        for x, v, s in zip(ds.abscissa, ds.value, ds.sigma):
            out.write(f"{format_float(x)},{format_float(v)},{format_float(s)}\n")
    text = out.getvalue()
    if target is not None:
        with open(target, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    return text


def with_values(ds: SpectrumDataset, value, sigma=None) -> SpectrumDataset:
    return replace(ds, value=np.asarray(value, dtype=float), sigma=sigma)
