"""Kernel evaluation and local regression weight construction.

Weights come in three modes:

* ``local_constant`` -- plain Nadaraya-Watson kernel weights, always
  nonnegative.
* ``local_linear`` -- slope-adjusted weights ``K_i * (1 - beta_hat * (x - x_i))``
  where ``beta_hat = sum(K_i (x - x_i)) / sum(K_i (x - x_i)^2)``.  These may
  be negative, which is exactly what lets the estimator extrapolate past the
  data hull instead of flattening out.
* ``hansen`` -- local linear weights with every negative weight zeroed
  (the adjustment of Hansen), trading extrapolation for guaranteed
  nonnegativity.

Weights are returned unnormalized; consumers divide by ``sum(w)`` so that
step and smoothed distribution estimators can share one weight vector.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.special import ndtr

from .errors import DegenerateWeights, NearSingularNormalization

KERNEL_FAMILIES = ("gaussian", "epanechnikov", "rectangular")

WEIGHT_MODES = ("local_constant", "local_linear", "hansen")

_GAUSS_NORM = 1.0 / math.sqrt(2.0 * math.pi)

#: |sum(w)| below this fraction of sum(|w|) counts as cancelled mass.
NEAR_SINGULAR_RTOL = 1e-12


def kernel_eval(family: str, u):
    """Evaluate the kernel ``K(u)``.

    Parameters
    ----------
    family : str
        One of ``"gaussian"``, ``"epanechnikov"``, ``"rectangular"``.
    u : float or ndarray
        Scaled distance(s).

    Returns
    -------
    float or ndarray
        ``K(u)``, nonnegative, integrating to one over the real line.
    """
    u = np.asarray(u, dtype=float)
    if family == "gaussian":
        out = _GAUSS_NORM * np.exp(-0.5 * u * u)
    elif family == "epanechnikov":
        out = np.where(np.abs(u) <= 1.0, 0.75 * (1.0 - u * u), 0.0)
    elif family == "rectangular":
        out = np.where(np.abs(u) < 0.5, 1.0, 0.0)
    else:
        raise ValueError(f"unknown kernel family: {family!r}")
    if out.ndim == 0:
        return float(out)
    return out


@dataclass(frozen=True)
class WeightVector:
    """Unnormalized local regression weights at one evaluation point.

    Attributes
    ----------
    weights : ndarray
        One weight per sample point, finite, not all zero.
    mode : str
        Weight mode used to build them.
    x_eval : float
        Evaluation point in regressor units.
    beta_hat : float or None
        Slope scaling of the local linear fit; ``None`` in
        ``local_constant`` mode.
    """

    weights: np.ndarray
    mode: str
    x_eval: float
    beta_hat: float | None = None

    def normalized(self) -> np.ndarray:
        """Weights divided by their sum (guarded against cancelled mass)."""
        return self.weights / weight_sum(self.weights)


def weight_sum(w: np.ndarray) -> float:
    """Sum of weights, raising when the mass cancels.

    Raises
    ------
    NearSingularNormalization
        When ``|sum(w)| < 1e-12 * sum(|w|)``.
    """
    total = float(np.sum(w))
    abs_total = float(np.sum(np.abs(w)))
    if abs_total == 0.0 or abs(total) < NEAR_SINGULAR_RTOL * abs_total:
        raise NearSingularNormalization(
            f"weight mass cancels: sum={total:.3e}, sum|w|={abs_total:.3e}"
        )
    return total


def local_weights(
    x_eval: float,
    xs: np.ndarray,
    h: float,
    family: str = "gaussian",
    mode: str = "local_linear",
) -> WeightVector:
    """Build kernel regression weights at ``x_eval``.

    Parameters
    ----------
    x_eval : float
        Point at which the local fit is anchored.
    xs : ndarray
        Design points, any order, duplicates allowed.
    h : float
        Bandwidth in regressor units, > 0.
    family : str
        Kernel family name.
    mode : str
        ``"local_constant"``, ``"local_linear"`` or ``"hansen"``.

    Returns
    -------
    WeightVector
        Unnormalized weights aligned with ``xs``.

    Raises
    ------
    DegenerateWeights
        If no sample point carries kernel mass, or (linear modes) if every
        in-window design point coincides with ``x_eval`` so the slope is
        undefined.
    NearSingularNormalization
        If the signed weight mass cancels almost exactly.
    """
    if h <= 0.0:
        raise ValueError(f"bandwidth must be positive, got {h}")
    if mode not in WEIGHT_MODES:
        raise ValueError(f"unknown weight mode: {mode!r}")
    xs = np.asarray(xs, dtype=float)
    d = x_eval - xs
    kt = kernel_eval(family, d / h) / h

    if mode == "local_constant":
        if not np.any(kt > 0.0):
            raise DegenerateWeights(
                f"no sample mass within bandwidth {h} of x={x_eval}"
            )
        weight_sum(kt)
        return WeightVector(kt, mode, float(x_eval), None)

    if not np.any(kt > 0.0):
        raise DegenerateWeights(
            f"no sample mass within bandwidth {h} of x={x_eval}"
        )
    s2 = float(np.sum(kt * d * d))
    if s2 <= 0.0:
        raise DegenerateWeights(
            "slope undefined: all in-window design points equal "
            f"x={x_eval}"
        )
    beta = float(np.sum(kt * d)) / s2
    w = kt * (1.0 - beta * d)
    # d constant across all mass makes every weight exactly zero
    if not np.any(w != 0.0):
        raise DegenerateWeights(
            f"every local linear weight vanishes at x={x_eval}: all "
            "in-window design points sit at one offset"
        )
    if mode == "hansen":
        w = np.where(beta * d > 1.0, 0.0, w)
        if not np.any(w > 0.0):
            raise DegenerateWeights(
                f"every weight zeroed by the nonnegativity cut at x={x_eval}"
            )
    weight_sum(w)
    return WeightVector(w, mode, float(x_eval), beta)


@dataclass(frozen=True)
class SmoothingKernelPair:
    """A smooth CDF and its density, used to smooth response-axis steps."""

    cdf: Callable[[np.ndarray], np.ndarray]
    pdf: Callable[[np.ndarray], np.ndarray]


def _normal_pdf(z):
    z = np.asarray(z, dtype=float)
    return _GAUSS_NORM * np.exp(-0.5 * z * z)


def smoothing_pair() -> SmoothingKernelPair:
    """Return the response-axis smoothing pair (standard normal CDF/density)."""
    return SmoothingKernelPair(cdf=ndtr, pdf=_normal_pdf)
