"""
Globally adaptive Gauss-Kronrod quadrature on finite intervals.

The 15-point Kronrod rule is paired with its embedded 7-point Gauss rule;
the difference between the two is used as a (pessimistic) error estimate
for each panel.  The panel with the largest estimate is bisected until the
summed estimate drops below ``max(abs_tol, rel_tol * |integral|)``.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np

from .errors import ConvergenceError, DomainError

# Kronrod abscissae (positive half, descending) and weights, QUADPACK qk15.
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
# Gauss weights for the nodes _XGK[1], _XGK[3], _XGK[5], _XGK[7].
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

# full symmetric node set on [-1, 1] and matching weights
NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
KRONROD_WEIGHTS = np.concatenate([_WGK[:-1], _WGK[::-1]])
GAUSS_WEIGHTS = np.zeros(15)
_gauss_pos = [1, 3, 5]
for _i, _k in enumerate(_gauss_pos):
    GAUSS_WEIGHTS[_k] = _WG[_i]
    GAUSS_WEIGHTS[14 - _k] = _WG[_i]
GAUSS_WEIGHTS[7] = _WG[3]


@dataclass(frozen=True)
class QuadratureSpec:
    """Tolerances and work limit for :func:`integrate`."""

    rel_tol: float = 1e-10
    abs_tol: float = 1e-14
    max_subdivisions: int = 2000

    def __post_init__(self):
        if not self.rel_tol > 0:
            raise DomainError(f"rel_tol must be > 0, got {self.rel_tol}")
        if not self.abs_tol >= 0:
            raise DomainError(f"abs_tol must be >= 0, got {self.abs_tol}")
        if int(self.max_subdivisions) < 1:
            raise DomainError(
                f"max_subdivisions must be >= 1, got {self.max_subdivisions}")


DEFAULT_SPEC = QuadratureSpec()


def _gk15(f, lo: np.ndarray, hi: np.ndarray):
    """Apply the rule to a batch of panels; returns (values, errors)."""
    center = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    x = center[:, None] + half[:, None] * NODES[None, :]
    fx = np.asarray(f(x.ravel()), dtype=float).reshape(x.shape)
    if not np.all(np.isfinite(fx)):
        raise ConvergenceError("integrand returned a non-finite value")
    kron = half * (fx @ KRONROD_WEIGHTS)
    gauss = half * (fx @ GAUSS_WEIGHTS)
    return kron, np.abs(kron - gauss)


def integrate(f: Callable[[np.ndarray], np.ndarray], a: float, b: float,
              spec: QuadratureSpec = DEFAULT_SPEC,
              breakpoints: Iterable[float] = ()) -> tuple[float, float]:
    """
    Integrate a vectorized function over ``[a, b]``.

    Parameters
    ----------
    f : callable
        Takes a 1-D float array, returns an array of the same shape.
    a, b : float
        Finite integration limits, ``a <= b``.
    spec : QuadratureSpec
        Tolerances and the maximum number of panels.
    breakpoints : iterable of float
        Extra points inside ``(a, b)`` used to seed the initial panels.

    Returns
    -------
    value, error_estimate : float

    Raises
    ------
    ConvergenceError
        If the tolerance is not met once ``spec.max_subdivisions`` panels
        are in use.
    """
    a = float(a)
    b = float(b)
    if not (math.isfinite(a) and math.isfinite(b)):
        raise DomainError("integration limits must be finite")
    if b < a:
        raise DomainError(f"need a <= b, got a={a}, b={b}")
    if a == b:
        return 0.0, 0.0

    edges = sorted({a, b, *(float(p) for p in breakpoints if a < p < b)})
    lo = np.array(edges[:-1])
    hi = np.array(edges[1:])
    vals, errs = _gk15(f, lo, hi)

    # max-heap on error; index breaks ties deterministically
    heap = [(-e, i, l, h, v) for i, (l, h, v, e)
            in enumerate(zip(lo, hi, vals, errs))]
    heapq.heapify(heap)
    counter = len(heap)
    total = float(np.sum(vals))
    err_total = float(np.sum(errs))

    while True:
        if err_total <= max(spec.abs_tol, spec.rel_tol * abs(total)):
            break
        if len(heap) >= spec.max_subdivisions:
            raise ConvergenceError(
                f"tolerance not met with {len(heap)} subdivisions "
                f"(estimate {err_total:.3g}, integral {total:.6g})")
        neg_e, _, l, h, v = heapq.heappop(heap)
        m = 0.5 * (l + h)
        if not (l < m < h):
            raise ConvergenceError(
                f"panel at {l!r} cannot be subdivided further")
        new_v, new_e = _gk15(f, np.array([l, m]), np.array([m, h]))
        total += float(new_v[0] + new_v[1]) - v
        err_total += float(new_e[0] + new_e[1]) + neg_e
        heapq.heappush(heap, (-new_e[0], counter, l, m, new_v[0]))
        heapq.heappush(heap, (-new_e[1], counter + 1, m, h, new_v[1]))
        counter += 2

    # drift-free final sums, independent of the refinement order
    panels = sorted(heap, key=lambda item: item[2])
    value = math.fsum(item[4] for item in panels)
    error = math.fsum(-item[0] for item in panels)
    return value, error
