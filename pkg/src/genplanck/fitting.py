"""
Least-squares fits of the Planck and field-generalized Planck models.

The optimizer is a bounded Levenberg-Marquardt iteration with a
forward-difference Jacobian.  Each fit is restarted from a fixed set of
starting points and the lowest-cost run wins (ties go to the earlier
start), so results depend only on the inputs and the seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from typing import Callable, Dict, Mapping, Optional, Sequence, Tuple

import numpy as np
from scipy.stats import qmc

from .dataset import SpectrumDataset, convert_to_canonical
from .errors import DomainError
from .extfield import ExternalField, generalized_spectral_density
from .radiation import PhysicalConstants, planck_spectral_density

__all__ = [
    "PARAMETERS", "FitResult", "DeviationReport", "FitError", "fit_planck",
    "fit_generalized", "deviation_report", "default_bounds", "model_values",
    "levenberg_marquardt", "LMOutcome",
]

PARAMETERS = ("T", "beta", "R", "S")

XTOL = 1e-10
FTOL = 1e-12
JAC_STEP = 1e-7
MAX_ITER = 500
PLANCK_STARTS = 8
GENERALIZED_STARTS = 16


class FitError(DomainError):
    """Invalid fit request."""


@dataclass
class FitResult:
    model: str
    parameters: Dict[str, float]
    standard_errors: Optional[Dict[str, float]]
    chi_square: float
    degrees_of_freedom: int
    converged: bool
    iterations: int
    residuals: np.ndarray
    fixed: Dict[str, float] = dc_field(default_factory=dict)
    bounds: Dict[str, Tuple[float, float]] = dc_field(default_factory=dict)
    degenerate: bool = False
    start_index: int = 0

    def field(self) -> ExternalField:
        p = self.parameters
        return ExternalField(p.get("beta", 0.0), p.get("R", 0.0), p.get("S", 0.0))

    def to_dict(self) -> dict:
        return {
            "model": self.model,
            "parameters": dict(self.parameters),
            "standard_errors": (None if self.standard_errors is None
                                else dict(self.standard_errors)),
            "chi_square": self.chi_square,
            "degrees_of_freedom": self.degrees_of_freedom,
            "converged": self.converged,
            "iterations": self.iterations,
            "degenerate": self.degenerate,
            "fixed": dict(self.fixed),
            "bounds": {k: list(v) for k, v in self.bounds.items()},
            "start_index": self.start_index,
        }


@dataclass
class LMOutcome:
    x: np.ndarray
    cost: float
    converged: bool
    iterations: int


def _forward_jacobian(fun, x, r0, lo, hi):
    jac = np.empty((r0.size, x.size))
    for j in range(x.size):
        h = JAC_STEP * max(abs(x[j]), 1e-2 * (hi[j] - lo[j]))
        if x[j] + h > hi[j]:
            h = -h
        xh = x.copy()
        xh[j] += h
        jac[:, j] = (fun(xh) - r0) / h
    return jac


def levenberg_marquardt(fun: Callable[[np.ndarray], np.ndarray],
                        x0: Sequence[float], lo: Sequence[float],
                        hi: Sequence[float], max_iter: int = MAX_ITER
                        ) -> LMOutcome:
    """
    Minimize ``0.5 * |fun(x)|^2`` subject to ``lo <= x <= hi``.

    Variables sitting on a bound with the gradient pointing outward are
    frozen for that step; trial points are clipped into the box.  Stops when
    the largest relative parameter change drops below 1e-10, the relative
    cost decrease below 1e-12, or the cost reaches 0.  A damping blow-up
    (no downhill step at any damping) also counts as convergence: the point
    is stationary to working precision.
    """
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    x = np.clip(np.asarray(x0, dtype=float), lo, hi)
    r = fun(x)
    cost = 0.5 * float(r @ r)
    lam = 1e-3
    width = hi - lo
    for it in range(1, max_iter + 1):
        if cost == 0.0:
            return LMOutcome(x, cost, True, it - 1)
        jac = _forward_jacobian(fun, x, r, lo, hi)
        g = jac.T @ r
        a = jac.T @ jac
        free = ~(((x <= lo) & (g > 0)) | ((x >= hi) & (g < 0)))
        if not free.any():
            return LMOutcome(x, cost, True, it)
        af = a[np.ix_(free, free)]
        gf = g[free]
        diag = np.diag(af).copy()
        diag = np.maximum(diag, 1e-12 * max(diag.max(), 1e-300))
        while True:
            try:
                step = np.linalg.solve(af + lam * np.diag(diag), -gf)
            except np.linalg.LinAlgError:
                step = np.linalg.lstsq(af + lam * np.diag(diag), -gf,
                                       rcond=None)[0]
            trial = x.copy()
            trial[free] += step
            trial = np.clip(trial, lo, hi)
            r_new = fun(trial)
            cost_new = 0.5 * float(r_new @ r_new)
            if np.isfinite(cost_new) and cost_new < cost:
                break
            lam *= 4.0
            if lam > 1e16:
                return LMOutcome(x, cost, True, it)
        dx = np.abs(trial - x) / np.maximum(np.abs(x), 1e-8 * width)
        decrease = (cost - cost_new) / cost
        x, r, cost = trial, r_new, cost_new
        lam = max(lam / 3.0, 1e-12)
        if dx.max() < XTOL or decrease < FTOL:
            return LMOutcome(x, cost, True, it)
    return LMOutcome(x, cost, False, max_iter)


def model_values(omega, params: Mapping[str, float], model: str,
                 consts: PhysicalConstants) -> np.ndarray:
    """Forward model on the canonical axis for a full parameter map."""
    t = params["T"]
    if model == "planck":
        return np.asarray(planck_spectral_density(omega, t, consts))
    field = ExternalField(params.get("beta", 0.0), params.get("R", 0.0),
                          params.get("S", 0.0))
    return np.asarray(generalized_spectral_density(omega, t, field, consts))


def default_bounds(ds: SpectrumDataset,
                   consts: PhysicalConstants) -> Dict[str, Tuple[float, float]]:
    """
    Generic search box derived from the data's frequency span.

    T spans the temperatures whose spectral peak (x = 2.82) lands anywhere
    from 1/100 of the lowest to 100 times the highest sampled ω.
    """
    omega = convert_to_canonical(ds, consts).abscissa
    to_t = consts.hbar / (2.821439372 * consts.k_boltzmann)
    return {
        "T": (omega[0] * to_t / 100.0, omega[-1] * to_t * 100.0),
        "beta": (-0.9, 10.0),
        "R": (0.0, 10.0),
        "S": (0.0, 20.0 / float(np.median(omega))),
    }


def _weighted(ds: SpectrumDataset):
    sigma = ds.sigma if ds.sigma is not None else np.ones_like(ds.value)
    return ds.value, sigma


def _run(ds: SpectrumDataset, model: str, free: Sequence[str],
         fixed: Mapping[str, float], bounds: Mapping[str, Tuple[float, float]],
         starts: np.ndarray, consts: PhysicalConstants) -> FitResult:
    """Multi-start driver over internal coordinates (log T, others linear)."""
    omega = ds.abscissa
    value, sigma = _weighted(ds)
    log_idx = [i for i, name in enumerate(free) if name == "T"]

    def to_params(u):
        p = dict(fixed)
        for i, name in enumerate(free):
            p[name] = math.exp(u[i]) if i in log_idx else float(u[i])
        return p

    def residual(u):
        return (model_values(omega, to_params(u), model, consts) - value) / sigma

    lo = np.array([math.log(bounds[n][0]) if n == "T" else bounds[n][0]
                   for n in free])
    hi = np.array([math.log(bounds[n][1]) if n == "T" else bounds[n][1]
                   for n in free])

    best = None
    best_index = 0
    total_iter = 0
    for k, u0 in enumerate(starts):
        out = levenberg_marquardt(residual, u0, lo, hi)
        total_iter += out.iterations
        # strict < keeps the earliest start on ties
        if best is None or out.cost < best.cost:
            best, best_index = out, k

    params = to_params(best.x)
    for name in free:
        lo_b, hi_b = bounds[name]
        params[name] = min(max(params[name], lo_b), hi_b)
    model_at_best = model_values(omega, params, model, consts)
    raw = value - model_at_best
    chi2 = float(np.sum((raw / sigma) ** 2))
    dof = omega.size - len(free)

    degenerate = not np.any(value)
    errors = None
    converged = best.converged and not degenerate
    if converged:
        errors = _standard_errors(ds, params, free, model, consts, chi2, dof,
                                  bounds)
    return FitResult(model, params, errors, chi2, dof, converged, total_iter,
                     raw, dict(fixed), {n: tuple(bounds[n]) for n in free},
                     degenerate, best_index)


def _standard_errors(ds, params, free, model, consts, chi2, dof, bounds):
    omega = ds.abscissa
    _, sigma = _weighted(ds)
    base = model_values(omega, params, model, consts) / sigma
    jac = np.empty((omega.size, len(free)))
    for j, name in enumerate(free):
        lo_b, hi_b = bounds[name]
        h = JAC_STEP * max(abs(params[name]), 1e-2 * (hi_b - lo_b))
        if params[name] + h > hi_b:
            h = -h
        shifted = dict(params)
        shifted[name] = params[name] + h
        jac[:, j] = (model_values(omega, shifted, model, consts) / sigma - base) / h
    cov = np.linalg.pinv(jac.T @ jac)
    if ds.sigma is None:
        cov = cov * (chi2 / dof if dof > 0 else 0.0)
    return {name: float(math.sqrt(max(cov[j, j], 0.0)))
            for j, name in enumerate(free)}


def _prepare(ds: SpectrumDataset, consts: Optional[PhysicalConstants],
             min_points: int):
    consts = consts or PhysicalConstants.for_mode(ds.units)
    canon = convert_to_canonical(ds, consts)
    if len(canon) < min_points:
        raise FitError(f"need at least {min_points} samples, got {len(canon)}")
    return canon, consts


def _check_t_bounds(t_bounds):
    lo, hi = (float(b) for b in t_bounds)
    if not (0 < lo < hi and math.isfinite(hi)):
        raise FitError(f"temperature bounds must satisfy 0 < lo < hi, got {t_bounds}")
    return lo, hi


def fit_planck(ds: SpectrumDataset, t_bounds: Tuple[float, float],
               consts: Optional[PhysicalConstants] = None) -> FitResult:
    """
    Fit the Planck density to ``ds`` for the temperature alone.

    Eight starting temperatures are spread log-uniformly over ``t_bounds``.
    An all-zero spectrum carries no information: the result is flagged
    ``degenerate`` and not converged.
    """
    canon, consts = _prepare(ds, consts, 3)
    lo, hi = _check_t_bounds(t_bounds)
    fractions = (np.arange(PLANCK_STARTS) + 0.5) / PLANCK_STARTS
    starts = (math.log(lo) + fractions * (math.log(hi) - math.log(lo)))[:, None]
    return _run(canon, "planck", ["T"], {}, {"T": (lo, hi)}, starts, consts)


def fit_generalized(ds: SpectrumDataset,
                    bounds: Optional[Mapping[str, Tuple[float, float]]] = None,
                    fixed: Optional[Mapping[str, float]] = None,
                    consts: Optional[PhysicalConstants] = None,
                    seed: int = 0) -> FitResult:
    """
    Fit ``(T, beta, R, S)`` of the field-generalized density.

    Parameters
    ----------
    bounds : mapping, optional
        ``name -> (lo, hi)``; missing names use :func:`default_bounds`.
    fixed : mapping, optional
        Parameters held at given values and excluded from the fit.
    seed : int
        Seed of the Latin-hypercube design of the 16 starting points.

    Raises
    ------
    FitError
        On unknown names, empty or non-finite boxes, or boxes allowing
        ``R < 0`` or ``S < 0`` (the latter makes the model diverge).
    """
    fixed = {k: float(v) for k, v in (fixed or {}).items()}
    bounds = {k: (float(v[0]), float(v[1])) for k, v in (bounds or {}).items()}
    for name in list(fixed) + list(bounds):
        if name not in PARAMETERS:
            raise FitError(f"unknown parameter {name!r}")
    if "T" in fixed:
        raise FitError("the temperature cannot be fixed")
    free = [n for n in PARAMETERS if n not in fixed]
    canon, consts = _prepare(ds, consts, max(3, len(free) + 1))
    box = default_bounds(canon, consts)
    box.update(bounds)
    for name in free:
        lo, hi = box[name]
        if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
            raise FitError(f"bounds for {name} must be finite with lo < hi")
    _check_t_bounds(box["T"])

    def lowest(name):
        return fixed[name] if name in fixed else box[name][0]

    def highest(name):
        return fixed[name] if name in fixed else box[name][1]

    if lowest("S") < 0 and highest("R") > 0:
        raise FitError("bounds allow S < 0 with R > 0: the model diverges")
    if lowest("R") < 0 or lowest("S") < 0:
        raise FitError("R and S must be >= 0")

    sample = qmc.LatinHypercube(d=len(free), seed=seed).random(GENERALIZED_STARTS)
    lo_u = np.array([math.log(box[n][0]) if n == "T" else box[n][0] for n in free])
    hi_u = np.array([math.log(box[n][1]) if n == "T" else box[n][1] for n in free])
    starts = lo_u + sample * (hi_u - lo_u)
    return _run(canon, "generalized", free, fixed, box, starts, consts)


@dataclass(frozen=True)
class DeviationReport:
    relative_residuals: np.ndarray
    max_abs_relative_residual: float
    rms_relative_residual: float

    def to_dict(self) -> dict:
        return {
            "max_abs_relative_residual": self.max_abs_relative_residual,
            "rms_relative_residual": self.rms_relative_residual,
        }


def deviation_report(ds: SpectrumDataset, fit: FitResult,
                     consts: Optional[PhysicalConstants] = None) -> DeviationReport:
    """Per-sample ``(data - model)/model`` against a converged fit, with max and RMS."""
    if not fit.converged:
        raise FitError("deviation report needs a converged fit")
    consts = consts or PhysicalConstants.for_mode(ds.units)
    canon = convert_to_canonical(ds, consts)
    model = model_values(canon.abscissa, fit.parameters, fit.model, consts)
    rel = (canon.value - model) / model
    return DeviationReport(rel, float(np.max(np.abs(rel))),
                           float(math.sqrt(np.mean(rel ** 2))))
