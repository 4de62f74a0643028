"""Conditional mean and distribution estimators built on local weights.

The centerpiece is the monotone-corrected local linear distribution
estimator.  The raw local linear smoothed CDF

    F(y | x) = sum_i w_i * Lambda((y - Y_i) / h0) / sum_i w_i

uses signed weights, so it can dip below zero, exceed one, or decrease in
``y``.  Two corrections repair it into a genuine distribution function:

* :func:`monotone_cdf` -- evaluate the raw CDF on a grid, take the running
  maximum (floored at zero) left to right, and rescale so the last grid
  point equals one.
* :func:`monotone_density` -- evaluate the raw density on a grid, clip
  negative values to zero, renormalize to unit area, and integrate
  cumulatively for the CDF.

Both return a :class:`DistributionEstimate` flagged ``monotone=True``.

Window semantics: callers that hold out a target observation delete it from
the sample before calling; ``window="one_sided_left"`` additionally restricts
the fit to design points strictly below the evaluation point, which is the
boundary / extrapolation regime.  Bandwidths are supplied in observation
counts and converted internally as ``h = b / n`` with ``n`` the size of the
sample as passed (before any window filtering).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np
from scipy.integrate import cumulative_trapezoid, trapezoid
from scipy.special import ndtr

from .errors import DegenerateGrid, DegenerateWeights, OutOfGridRange
from .kernels import (
    KERNEL_FAMILIES,
    WEIGHT_MODES,
    local_weights,
    weight_sum,
)

WINDOW_MODES = ("two_sided_exclude_target", "one_sided_left")

PREDICT_METHODS = ("LC", "LL", "LLH", "LLM")

DEFAULT_GRID_COUNT = 2001

#: Default grid pads the response range by this many secondary bandwidths.
GRID_PAD_H0 = 5.0

_GAUSS_NORM = 1.0 / math.sqrt(2.0 * math.pi)


@dataclass(frozen=True)
class RegressionSample:
    """Paired regressor/response observations.

    Arrays are coerced to 1-D float vectors of equal length with finite
    entries; anything else raises ``ValueError``.  Design points may repeat
    and need not be sorted.
    """

    xs: np.ndarray
    ys: np.ndarray

    def __post_init__(self):
        xs = np.asarray(self.xs, dtype=float)
        ys = np.asarray(self.ys, dtype=float)
        if xs.ndim != 1 or ys.ndim != 1:
            raise ValueError("xs and ys must be one-dimensional")
        if xs.size != ys.size:
            raise ValueError(
                f"length mismatch: {xs.size} design points, {ys.size} responses"
            )
        if xs.size == 0:
            raise ValueError("sample is empty")
        if not (np.all(np.isfinite(xs)) and np.all(np.isfinite(ys))):
            raise ValueError("sample contains non-finite values")
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "ys", ys)

    @property
    def n(self) -> int:
        return self.xs.size

    def without_index(self, i: int) -> "RegressionSample":
        """Copy of the sample with observation ``i`` deleted."""
        return RegressionSample(np.delete(self.xs, i), np.delete(self.ys, i))


@dataclass(frozen=True)
class GridSpec:
    """Ascending evaluation grid on the response axis.

    ``step`` is the target spacing; the realized grid uses
    ``round((hi - lo) / step)`` equal steps so it starts at ``lo`` and ends
    exactly at ``hi``.
    """

    lo: float
    hi: float
    step: float

    def __post_init__(self):
        if not (self.lo < self.hi):
            raise ValueError(f"grid needs lo < hi, got [{self.lo}, {self.hi}]")
        if self.step <= 0.0:
            raise ValueError(f"grid step must be positive, got {self.step}")
        if (self.hi - self.lo) / self.step > 1e6:
            raise ValueError("grid would exceed 1e6 points")

    @classmethod
    def from_count(cls, lo: float, hi: float, count: int) -> "GridSpec":
        if count < 2:
            raise ValueError("grid needs at least 2 points")
        return cls(lo, hi, (hi - lo) / (count - 1))

    def points(self) -> np.ndarray:
        n_steps = max(1, int(round((self.hi - self.lo) / self.step)))
        return np.linspace(self.lo, self.hi, n_steps + 1)


def default_grid(ys: np.ndarray, h0: float, count: int = DEFAULT_GRID_COUNT) -> GridSpec:
    """Grid covering the responses padded by ``GRID_PAD_H0 * h0`` each side."""
    lo = float(np.min(ys)) - GRID_PAD_H0 * h0
    hi = float(np.max(ys)) + GRID_PAD_H0 * h0
    return GridSpec.from_count(lo, hi, count)


@dataclass(frozen=True)
class EstimatorConfig:
    """Everything a distribution fit needs besides the data.

    Attributes
    ----------
    b : float
        Primary bandwidth in observation counts (`h = b / n`).
    h0 : float or None
        Response-axis smoothing bandwidth; ``None`` derives ``(b / n) ** 2``.
    family : str
        Kernel family for the regressor axis.
    mode : str
        Weight mode (``local_constant`` / ``local_linear`` / ``hansen``).
    window : str
        ``two_sided_exclude_target`` or ``one_sided_left``.
    grid : GridSpec or None
        Response grid; ``None`` derives one from the data via
        :func:`default_grid`.
    grid_count : int
        Point count used when the grid is derived.
    """

    b: float
    h0: Optional[float] = None
    family: str = "gaussian"
    mode: str = "local_linear"
    window: str = "two_sided_exclude_target"
    grid: Optional[GridSpec] = None
    grid_count: int = DEFAULT_GRID_COUNT

    def __post_init__(self):
        if self.b <= 0.0:
            raise ValueError(f"bandwidth b must be positive, got {self.b}")
        if self.h0 is not None and self.h0 <= 0.0:
            raise ValueError(f"h0 must be positive, got {self.h0}")
        if self.family not in KERNEL_FAMILIES:
            raise ValueError(f"unknown kernel family: {self.family!r}")
        if self.mode not in WEIGHT_MODES:
            raise ValueError(f"unknown weight mode: {self.mode!r}")
        if self.window not in WINDOW_MODES:
            raise ValueError(f"unknown window mode: {self.window!r}")
        if self.grid_count < 2:
            raise ValueError("grid_count must be at least 2")

    def resolve_h0(self, n: int) -> float:
        """Secondary bandwidth, defaulting to ``(b / n) ** 2``."""
        if self.h0 is not None:
            return self.h0
        return (self.b / n) ** 2


@dataclass(frozen=True)
class DistributionEstimate:
    """A conditional distribution evaluated on a response grid.

    ``monotone=True`` certifies a corrected estimate: CDF nondecreasing,
    starting at or above zero and ending at one.  Raw smoothed curves carry
    ``monotone=False`` even when they happen to be nondecreasing.
    """

    grid: np.ndarray
    cdf: np.ndarray
    x_eval: float
    monotone: bool
    density: Optional[np.ndarray] = None

    def cdf_at(self, y) -> np.ndarray:
        """CDF at arbitrary ``y`` by linear interpolation, clamped outside."""
        return np.interp(y, self.grid, self.cdf)


# ---------------------------------------------------------------------------
# internal building blocks (shared with the simulation harness and bootstrap)
# ---------------------------------------------------------------------------


def _windowed(sample: RegressionSample, x: float, cfg: EstimatorConfig):
    """Apply the window filter; return (xs, ys, h) for the local fit."""
    xs, ys = sample.xs, sample.ys
    h = cfg.b / sample.n
    if cfg.window == "one_sided_left":
        keep = xs < x
        if not np.any(keep):
            raise DegenerateWeights(
                f"no design points strictly left of x={x}"
            )
        xs, ys = xs[keep], ys[keep]
    return xs, ys, h


def _fit_weights(sample, x, cfg, mode):
    xs, ys, h = _windowed(sample, x, cfg)
    wv = local_weights(x, xs, h, cfg.family, mode)
    return wv.weights, ys


def _smooth_cdf_matrix(ys, grid, h0):
    """ndtr((grid - Y_i) / h0), shape (n, len(grid))."""
    return ndtr((grid[None, :] - ys[:, None]) / h0)


def _smooth_pdf_matrix(ys, grid, h0):
    z = (grid[None, :] - ys[:, None]) / h0
    return _GAUSS_NORM * np.exp(-0.5 * z * z)


def _running_max_cdf(raw: np.ndarray) -> np.ndarray:
    """Running maximum floored at zero, rescaled to end at one."""
    g2 = np.maximum.accumulate(np.maximum(raw, 0.0))
    level = g2[-1]
    if level <= 0.0:
        raise DegenerateGrid(
            "corrected CDF never rises above zero on the grid"
        )
    return g2 / level


def _clip_density(raw_density: np.ndarray, grid: np.ndarray):
    """Clip negatives, renormalize to unit area, integrate for the CDF."""
    clipped = np.maximum(raw_density, 0.0)
    total = trapezoid(clipped, grid)
    if total <= 0.0:
        raise DegenerateGrid("clipped density carries no mass on the grid")
    density = clipped / total
    cdf = cumulative_trapezoid(density, grid, initial=0.0)
    return density, cdf


def _resolve_grid(ys, cfg, n):
    if cfg.grid is not None:
        return cfg.grid.points()
    return default_grid(ys, cfg.resolve_h0(n), cfg.grid_count).points()


# ---------------------------------------------------------------------------
# point estimators
# ---------------------------------------------------------------------------


def nw_mean(sample: RegressionSample, x: float, cfg: EstimatorConfig) -> float:
    """Nadaraya-Watson (local constant) conditional mean at ``x``."""
    w, ys = _fit_weights(sample, x, cfg, "local_constant")
    return float((w / weight_sum(w)) @ ys)


def ll_mean(sample: RegressionSample, x: float, cfg: EstimatorConfig) -> float:
    """Local linear conditional mean at ``x``.

    Uses slope-adjusted weights; with ``cfg.mode == "hansen"`` the negative
    weights are zeroed first.  Reproduces affine responses exactly and keeps
    extrapolating beyond the data hull (unlike the local constant fit).
    """
    mode = "hansen" if cfg.mode == "hansen" else "local_linear"
    w, ys = _fit_weights(sample, x, cfg, mode)
    # normalizing first keeps single-surviving-weight cases exact
    return float((w / weight_sum(w)) @ ys)


def cdf_step(sample: RegressionSample, x: float, y: float, cfg: EstimatorConfig) -> float:
    """Weighted step CDF ``sum(w * 1{Y <= y}) / sum(w)`` at one ``y``.

    With signed local linear weights the value may fall outside ``[0, 1]``;
    it is returned as computed.
    """
    w, ys = _fit_weights(sample, x, cfg, cfg.mode)
    return float(w @ (ys <= y) / weight_sum(w))


def cdf_smooth(sample: RegressionSample, x: float, y: float, cfg: EstimatorConfig) -> float:
    """Smoothed CDF ``sum(w * Lambda((y - Y) / h0)) / sum(w)`` at one ``y``."""
    w, ys = _fit_weights(sample, x, cfg, cfg.mode)
    h0 = cfg.resolve_h0(sample.n)
    return float(w @ ndtr((y - ys) / h0) / weight_sum(w))


def ll_density(
    sample: RegressionSample,
    x: float,
    cfg: EstimatorConfig,
    grid: Optional[GridSpec] = None,
) -> np.ndarray:
    """Raw local linear density on the grid (may be negative).

    ``(1 / h0) * sum(w_j * lambda((y - Y_j) / h0)) / sum(w_j)`` evaluated at
    every grid point.  Requires ``cfg.mode == "local_linear"``.
    """
    if cfg.mode != "local_linear":
        raise ValueError("ll_density requires mode='local_linear'")
    w, ys = _fit_weights(sample, x, cfg, "local_linear")
    h0 = cfg.resolve_h0(sample.n)
    pts = grid.points() if grid is not None else _resolve_grid(ys, cfg, sample.n)
    pdf_mat = _smooth_pdf_matrix(ys, pts, h0)
    return (w @ pdf_mat) / (weight_sum(w) * h0)


# ---------------------------------------------------------------------------
# distribution estimators
# ---------------------------------------------------------------------------


def smooth_cdf_estimate(
    sample: RegressionSample, x: float, cfg: EstimatorConfig
) -> DistributionEstimate:
    """Uncorrected smoothed CDF curve on the grid, any weight mode.

    Local constant and hansen curves are nondecreasing by construction but
    are still flagged ``monotone=False`` because they end slightly below one
    on a finite grid; local linear curves can be genuinely non-monotone.
    """
    w, ys = _fit_weights(sample, x, cfg, cfg.mode)
    h0 = cfg.resolve_h0(sample.n)
    pts = _resolve_grid(ys, cfg, sample.n)
    raw = (w @ _smooth_cdf_matrix(ys, pts, h0)) / weight_sum(w)
    return DistributionEstimate(pts, raw, float(x), monotone=False)


def monotone_cdf(
    sample: RegressionSample, x: float, cfg: EstimatorConfig
) -> DistributionEstimate:
    """Monotone-corrected local linear CDF (running-max construction).

    Evaluates the raw smoothed local linear CDF on the grid, subtracts its
    lower limit (zero for a CDF-shaped smoother), takes the running maximum
    floored at zero, and rescales by the value at the last grid point.
    """
    if cfg.mode != "local_linear":
        raise ValueError("monotone_cdf requires mode='local_linear'")
    raw = smooth_cdf_estimate(sample, x, cfg)
    cdf = _running_max_cdf(raw.cdf)
    return DistributionEstimate(raw.grid, cdf, float(x), monotone=True)


def monotone_density(
    sample: RegressionSample, x: float, cfg: EstimatorConfig
) -> DistributionEstimate:
    """Monotone-corrected local linear CDF via its clipped density.

    Clips the raw local linear density at zero, renormalizes it to unit
    area (trapezoidal rule), and integrates cumulatively; the resulting CDF
    ends at one by construction and the density field is populated.
    """
    if cfg.mode != "local_linear":
        raise ValueError("monotone_density requires mode='local_linear'")
    w, ys = _fit_weights(sample, x, cfg, "local_linear")
    h0 = cfg.resolve_h0(sample.n)
    pts = _resolve_grid(ys, cfg, sample.n)
    raw = (w @ _smooth_pdf_matrix(ys, pts, h0)) / (weight_sum(w) * h0)
    density, cdf = _clip_density(raw, pts)
    return DistributionEstimate(pts, cdf, float(x), monotone=True, density=density)


def quantile(est: DistributionEstimate, u: float) -> float:
    """Smallest grid point whose CDF reaches ``u`` (no sub-grid interpolation).

    Works for any estimate with a nondecreasing CDF, which includes the
    uncorrected local constant and hansen curves.

    Raises
    ------
    OutOfGridRange
        If ``u`` exceeds the CDF value at the last grid point.
    """
    if not (0.0 < u < 1.0):
        raise ValueError(f"quantile level must be in (0, 1), got {u}")
    idx = int(np.searchsorted(est.cdf, u, side="left"))
    if idx >= est.cdf.size:
        raise OutOfGridRange(
            f"level {u} exceeds CDF maximum {est.cdf[-1]:.6g} on the grid"
        )
    return float(est.grid[idx])


def point_predict(
    sample: RegressionSample, x: float, cfg: EstimatorConfig, method: str
) -> float:
    """Point prediction of the response at ``x`` by the named method.

    ``LC`` and ``LLH`` use the normalized weighted mean (the mean of the
    smoothed distribution under a symmetric mean-zero smoother), ``LL`` the
    signed-weight mean, and ``LLM`` the mean of the monotone-corrected
    density, integrated over the grid.
    """
    if method == "LC":
        return nw_mean(sample, x, cfg)
    if method == "LL":
        return ll_mean(sample, x, replace(cfg, mode="local_linear"))
    if method == "LLH":
        return ll_mean(sample, x, replace(cfg, mode="hansen"))
    if method == "LLM":
        est = monotone_density(sample, x, replace(cfg, mode="local_linear"))
        return float(trapezoid(est.grid * est.density, est.grid))
    raise ValueError(f"unknown prediction method: {method!r}")
