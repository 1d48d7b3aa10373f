"""
Command-line interface.

Every subcommand prints one table (CSV) or document (JSON) on stdout.
Both formats carry a provenance block echoing the fully resolved inputs,
including an ``argv`` list that reproduces the run.

Exit codes: 0 success (an unconverged fit is still a success), 1 invalid
input, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import sys
from typing import Dict, List, Optional, Sequence

import numpy as np

from . import __version__
from .dataset import DatasetError, format_float, read_spectrum_csv
from .errors import ConvergenceError, DivergenceError, DomainError
from .extfield import (ExternalField, generalized_spectral_density,
                       generalized_total_energy, relative_correction,
                       scan_field_diagnostics)
from .fitting import (PARAMETERS, deviation_report, fit_generalized,
                      fit_planck, default_bounds)
from .heat import (EinsteinSolid, debye_heat_capacity,
                   debye_solid_from_material, debye_solid_from_temperature,
                   einstein_heat_capacity, generalized_phonon_heat_capacity)
from .radiation import (PhysicalConstants, SpectralGrid,
                        planck_spectral_density, planck_spectral_density_nd)
from .specfun import (bose_integral, debye_function,
                      debye_function_derivative, incomplete_bose_integral,
                      planck_peak)


class InputError(Exception):
    """Invalid command-line input (exit code 1)."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


# ---------------------------------------------------------------- output

def _json_value(v):
    if isinstance(v, (np.floating, float)):
        v = float(v)
        return v if math.isfinite(v) else None
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, np.ndarray):
        return [_json_value(x) for x in v.tolist()]
    if isinstance(v, dict):
        return {k: _json_value(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_json_value(x) for x in v]
    return v


def _csv_cell(v):
    if v is None:
        return ""
    if isinstance(v, (float, np.floating)):
        return format_float(v)
    return str(v)


def _render(fmt: str, columns: Dict[str, Sequence], provenance: dict,
            extra: Optional[dict] = None) -> str:
    extra = extra or {}
    if fmt == "json":
        doc = {"provenance": provenance,
               "columns": {k: list(v) for k, v in columns.items()}}
        doc.update(extra)
        return json.dumps(_json_value(doc), indent=2) + "\n"
    out = io.StringIO()
    for key, value in provenance.items():
        out.write(f"# {key}: {json.dumps(_json_value(value))}\n")
    for key, value in extra.items():
        out.write(f"# {key}: {json.dumps(_json_value(value))}\n")
    names = list(columns)
    out.write(",".join(names) + "\n")
    for row in zip(*(columns[n] for n in names)):
        out.write(",".join(_csv_cell(v) for v in row) + "\n")
    return out.getvalue()


def _provenance(command: str, args: argparse.Namespace,
                resolved: dict) -> dict:
    """Echo of the resolved inputs plus an argv that reproduces them."""
    argv = [command]
    for key, value in resolved.items():
        flag = "--" + key.replace("_", "-")
        if isinstance(value, bool):
            if value:
                argv.append(flag)
        elif value is not None:
            argv += [flag, format_float(value) if isinstance(value, float)
                     else str(value)]
    prov = {"command": command, "version": __version__}
    prov.update(resolved)
    prov["argv"] = argv
    return prov


# ---------------------------------------------------------------- checks

def _positive(args, *names):
    for name in names:
        value = getattr(args, name)
        if value is not None and not (value > 0 and math.isfinite(value)):
            raise InputError(f"--{name.replace('_', '-')} must be > 0, got {value}")


def _nonnegative(args, *names):
    for name in names:
        value = getattr(args, name)
        if value is not None and not (value >= 0 and math.isfinite(value)):
            raise InputError(f"--{name.replace('_', '-')} must be >= 0, got {value}")


def _consts(args) -> PhysicalConstants:
    return PhysicalConstants.for_mode(args.units)


def _omega_grid(args, consts) -> SpectralGrid:
    scale = consts.k_boltzmann * args.temperature / consts.hbar
    if args.omega_min is None:
        args.omega_min = 1e-3 * scale
    if args.omega_max is None:
        args.omega_max = 50.0 * scale
    _positive(args, "omega_min", "omega_max")
    if not args.omega_min < args.omega_max:
        raise InputError("--omega-min must be below --omega-max")
    if args.points < 2:
        raise InputError("--points must be >= 2")
    return SpectralGrid(args.omega_min, args.omega_max, args.points, args.grid)


def _field(args) -> ExternalField:
    _nonnegative(args, "q_amplitude", "q_decay")
    if not math.isfinite(args.p_const):
        raise InputError("--p-const must be finite")
    return ExternalField(args.p_const, args.q_amplitude, args.q_decay)


# ---------------------------------------------------------------- commands

def cmd_spectrum(args) -> str:
    _positive(args, "temperature")
    if args.dim < 1:
        raise InputError(f"--dim must be >= 1, got {args.dim}")
    consts = _consts(args)
    grid = _omega_grid(args, consts)
    omega = grid.omegas()
    if args.dim == 3 and not args.nd_path:
        rho = planck_spectral_density(omega, args.temperature, consts)
    else:
        rho = planck_spectral_density_nd(omega, args.temperature, args.dim, consts)
    resolved = dict(temperature=args.temperature, dim=args.dim,
                    omega_min=args.omega_min, omega_max=args.omega_max,
                    points=args.points, grid=args.grid, units=args.units,
                    nd_path=args.nd_path, output=args.output)
    return _render(args.output, {"omega": omega, "rho": np.asarray(rho)},
                   _provenance("spectrum", args, resolved))


def cmd_gen_spectrum(args) -> str:
    _positive(args, "temperature")
    consts = _consts(args)
    field = _field(args)
    grid = _omega_grid(args, consts)
    omega = grid.omegas()
    t = args.temperature
    rho_gen = np.asarray(generalized_spectral_density(omega, t, field, consts))
    rho_pl = np.asarray(planck_spectral_density(omega, t, consts))
    rel = np.asarray(relative_correction(omega, t, field, consts))
    extra = {}
    if args.diagnose:
        diag = scan_field_diagnostics(field, t, grid, consts)
        extra["diagnostics"] = {
            "first_negative_omega": diag.first_negative_omega,
            "energy_finite": diag.energy_finite,
            "max_relative_correction": diag.max_relative_correction,
        }
    if args.integrate:
        extra["total_energy_density"] = generalized_total_energy(t, field, consts)
    resolved = dict(temperature=t, p_const=args.p_const,
                    q_amplitude=args.q_amplitude, q_decay=args.q_decay,
                    omega_min=args.omega_min, omega_max=args.omega_max,
                    points=args.points, grid=args.grid, units=args.units,
                    diagnose=args.diagnose, integrate=args.integrate,
                    output=args.output)
    columns = {"omega": omega, "rho_gen": rho_gen, "rho_planck": rho_pl,
               "relative_correction": rel}
    return _render(args.output, columns,
                   _provenance("gen-spectrum", args, resolved), extra)


def _temperatures(args) -> np.ndarray:
    _positive(args, "t_min", "t_max")
    if args.t_min is None or args.t_max is None:
        raise InputError("--t-min and --t-max are required")
    if args.t_min > args.t_max or (args.t_min == args.t_max and args.points != 1):
        raise InputError("--t-min must be below --t-max")
    if args.points < 1:
        raise InputError("--points must be >= 1")
    if args.points == 1:
        return np.array([args.t_min])
    if args.t_grid == "log":
        return np.geomspace(args.t_min, args.t_max, args.points)
    return np.linspace(args.t_min, args.t_max, args.points)


def cmd_heat(args) -> str:
    consts = _consts(args)
    temps = _temperatures(args)
    resolved = dict(model=args.model)
    derived = {}
    if args.model == "einstein":
        if args.omega_e is None:
            raise InputError("--model einstein needs --omega-e")
        _positive(args, "omega_e", "n")
        n = args.n if args.n is not None else 1.0
        solid = EinsteinSolid(args.omega_e, n)
        cv = np.asarray(einstein_heat_capacity(solid, temps, consts))
        resolved.update(omega_e=args.omega_e, n=n)
        derived["t_e"] = solid.temperature(consts)
    else:
        material = [args.n_density, args.vt, args.vl]
        if args.debye_temp is not None:
            if any(v is not None for v in material):
                raise InputError(
                    "give either --debye-temp/--n or --n-density/--vt/--vl/--volume")
            _positive(args, "debye_temp", "n")
            n = args.n if args.n is not None else 1.0
            solid = debye_solid_from_temperature(args.debye_temp, n, consts)
            resolved.update(debye_temp=args.debye_temp, n=n)
        elif all(v is not None for v in material):
            if args.n is not None:
                raise InputError("--n conflicts with --n-density/--volume")
            _positive(args, "n_density", "vt", "vl", "volume")
            volume = args.volume if args.volume is not None else 1.0
            solid = debye_solid_from_material(args.n_density, args.vt, args.vl,
                                              volume, consts)
            resolved.update(n_density=args.n_density, vt=args.vt, vl=args.vl,
                            volume=volume)
        else:
            raise InputError(
                f"--model {args.model} needs --debye-temp or all of "
                "--n-density, --vt, --vl")
        derived.update(omega_d=solid.omega_d, t_d=solid.t_d, c_eff=solid.c_eff)
        if args.model == "debye":
            cv = np.array([debye_heat_capacity(solid, t, consts) for t in temps])
        else:
            field = _field(args)
            resolved.update(p_const=args.p_const, q_amplitude=args.q_amplitude,
                            q_decay=args.q_decay)
            cv = np.array([generalized_phonon_heat_capacity(solid, t, field, consts)
                           for t in temps])
    n_osc = solid.n_oscillators
    reduced = cv / (3.0 * n_osc * consts.k_boltzmann)
    resolved.update(t_min=args.t_min, t_max=args.t_max, points=args.points,
                    t_grid=args.t_grid, units=args.units, output=args.output)
    prov = _provenance("heat", args, resolved)
    prov["derived"] = derived
    return _render(args.output, {"temperature": temps, "heat_capacity": cv,
                                 "reduced_heat_capacity": reduced}, prov)


def _parse_pairs(text: Optional[str], flag: str) -> Dict[str, str]:
    if not text:
        return {}
    out = {}
    for item in text.split(","):
        key, sep, value = item.partition("=")
        key = key.strip()
        if not sep or key not in PARAMETERS:
            raise InputError(f"{flag}: bad entry {item!r}")
        out[key] = value.strip()
    return out


def cmd_fit(args) -> str:
    try:
        ds = read_spectrum_csv(args.input)
    except OSError as exc:
        raise InputError(f"--input: {exc}") from None
    if args.units is not None:
        ds = type(ds)(ds.abscissa, ds.value, ds.sigma, ds.abscissa_kind,
                      ds.ordinate_kind, ds.source_label, args.units)
    consts = PhysicalConstants.for_mode(ds.units)
    try:
        fixed = {k: float(v) for k, v in _parse_pairs(args.fix, "--fix").items()}
        bounds = {}
        for k, v in _parse_pairs(args.bounds, "--bounds").items():
            lo, sep, hi = v.partition(":")
            if not sep:
                raise InputError(f"--bounds: expected lo:hi for {k}")
            bounds[k] = (float(lo), float(hi))
    except ValueError as exc:
        raise InputError(f"bad number: {exc}") from None

    if args.model == "planck":
        if fixed:
            raise InputError("--fix applies to --model generalized only")
        t_bounds = bounds.pop("T", None) or default_bounds(ds, consts)["T"]
        if bounds:
            raise InputError("--model planck accepts bounds for T only")
        result = fit_planck(ds, t_bounds, consts)
    else:
        result = fit_generalized(ds, bounds, fixed, consts, seed=args.seed)

    doc = result.to_dict()
    if result.converged:
        report = deviation_report(ds, result, consts)
        doc["residual_summary"] = report.to_dict()
    else:
        doc["residual_summary"] = None
    resolved = dict(input=args.input, model=args.model, fix=args.fix,
                    bounds=args.bounds, seed=args.seed, units=args.units,
                    output="json")
    doc["provenance"] = _provenance("fit", args, resolved)
    doc["provenance"]["source_label"] = ds.source_label
    return json.dumps(_json_value(doc), indent=2) + "\n"


def cmd_integrate(args) -> str:
    if not args.order >= 1:
        raise InputError(f"--order must be >= 1, got {args.order}")
    if args.upper is None:
        res = bose_integral(args.order)
    else:
        _nonnegative(args, "upper")
        res = incomplete_bose_integral(args.order, args.upper)
    resolved = dict(order=args.order, upper=args.upper, output=args.output)
    return _render(args.output, {"value": [res.value],
                                 "error_estimate": [res.error_estimate]},
                   _provenance("integrate", args, resolved))


def cmd_peak(args) -> str:
    x = planck_peak(args.dim)
    resolved = dict(dim=args.dim, output=args.output)
    return _render(args.output, {"x_peak": [x], "error_estimate": [1e-10]},
                   _provenance("peak", args, resolved))


def cmd_debye_fn(args) -> str:
    _positive(args, "y")
    resolved = dict(y=args.y, output=args.output)
    return _render(args.output, {"y": [args.y], "value": [debye_function(args.y)],
                                 "derivative": [debye_function_derivative(args.y)]},
                   _provenance("debye-fn", args, resolved))


# ---------------------------------------------------------------- parser

def _add_output(p, choices=("csv", "json")):
    p.add_argument("--output", choices=choices, default=choices[0],
                   help="output format (default %(default)s)")


def _add_units(p, default="si"):
    p.add_argument("--units", choices=("si", "natural"), default=default,
                   help="si (CODATA) or natural (hbar = k = c = 1)")


def _add_grid(p):
    p.add_argument("--omega-min", type=float, help="lowest angular frequency")
    p.add_argument("--omega-max", type=float, help="highest angular frequency")
    p.add_argument("--points", type=int, default=512)
    p.add_argument("--grid", choices=("linear", "log"), default="log")


def _add_field(p):
    p.add_argument("--p-const", type=float, default=0.0, help="constant P (beta)")
    p.add_argument("--q-amplitude", type=float, default=0.0, help="R in Q = R exp(-S w)")
    p.add_argument("--q-decay", type=float, default=0.0, help="S in Q = R exp(-S w)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="genplanck",
                     description="Blackbody spectra, lattice heat capacities "
                                 "and spectral fits.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True,
                                parser_class=_Parser)

    p = sub.add_parser("spectrum", help="Planck spectral density table")
    p.add_argument("--temperature", type=float, required=True)
    p.add_argument("--dim", type=int, default=3)
    p.add_argument("--nd-path", action="store_true",
                   help="use the n-dimensional formula even for --dim 3")
    _add_grid(p)
    _add_units(p)
    _add_output(p)
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("gen-spectrum", help="field-generalized spectral density")
    p.add_argument("--temperature", type=float, required=True)
    _add_field(p)
    p.add_argument("--diagnose", action="store_true",
                   help="append negativity / finiteness diagnostics")
    p.add_argument("--integrate", action="store_true",
                   help="append the total energy density")
    _add_grid(p)
    _add_units(p)
    _add_output(p)
    p.set_defaults(func=cmd_gen_spectrum)

    p = sub.add_parser("heat", help="heat capacity versus temperature")
    p.add_argument("--model", choices=("einstein", "debye", "debye-generalized"),
                   required=True)
    p.add_argument("--omega-e", type=float, help="Einstein frequency")
    p.add_argument("--n", type=float, help="number of oscillators")
    p.add_argument("--n-density", type=float, help="oscillators per volume")
    p.add_argument("--vt", type=float, help="transverse sound speed")
    p.add_argument("--vl", type=float, help="longitudinal sound speed")
    p.add_argument("--volume", type=float, help="volume (default 1)")
    p.add_argument("--debye-temp", type=float, help="Debye temperature")
    p.add_argument("--t-min", type=float)
    p.add_argument("--t-max", type=float)
    p.add_argument("--points", type=int, default=50)
    p.add_argument("--t-grid", choices=("linear", "log"), default="log")
    _add_field(p)
    _add_units(p)
    _add_output(p)
    p.set_defaults(func=cmd_heat)

    p = sub.add_parser("fit", help="fit a spectrum CSV")
    p.add_argument("--input", required=True, help="spectrum CSV file")
    p.add_argument("--model", choices=("planck", "generalized"), default="planck")
    p.add_argument("--fix", help="e.g. beta=0,R=0")
    p.add_argument("--bounds", help="e.g. T=0.5:2,S=0:10")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--units", choices=("si", "natural"),
                   help="override the units given in the CSV")
    _add_output(p, choices=("json",))
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("integrate", help="Bose integral of order s")
    p.add_argument("--order", type=float, required=True)
    p.add_argument("--upper", type=float, help="finite upper limit")
    _add_output(p)
    p.set_defaults(func=cmd_integrate)

    p = sub.add_parser("peak", help="dimensionless spectral peak")
    p.add_argument("--dim", type=int, required=True)
    _add_output(p)
    p.set_defaults(func=cmd_peak)

    p = sub.add_parser("debye-fn", help="Debye function and derivative")
    p.add_argument("--y", type=float, required=True)
    _add_output(p)
    p.set_defaults(func=cmd_debye_fn)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        text = args.func(args)
    except (InputError, DatasetError) as exc:
        print(f"genplanck {args.command}: error: {exc}", file=sys.stderr)
        return 1
    except (ConvergenceError, DivergenceError) as exc:
        print(f"genplanck {args.command}: numerical failure: {exc}", file=sys.stderr)
        return 2
    except DomainError as exc:
        print(f"genplanck {args.command}: error: {exc}", file=sys.stderr)
        return 1
    sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
