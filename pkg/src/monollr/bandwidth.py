"""Local leave-one-out bandwidth selection.

The criterion is predictive: for the ``m`` design points nearest the
evaluation point, each response is predicted from the sample with that
observation deleted, and candidate bandwidths are ranked by the accumulated
squared prediction error

    Err(b) = sum_k (Yhat_{g(k)} - Y_{g(k)})^2

where ``g(1..m)`` indexes the neighbors.  Localizing the criterion keeps the
choice relevant to the region actually being estimated (a boundary, say)
instead of averaging over the whole design.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional, Sequence

import numpy as np

from .errors import AllCandidatesInfeasible, EstimationError
from .estimators import (
    PREDICT_METHODS,
    WINDOW_MODES,
    EstimatorConfig,
    RegressionSample,
    point_predict,
)


def secondary_bandwidth(b: float, n: int) -> float:
    """Response-axis bandwidth rule ``h0 = (b / n) ** 2``."""
    return (b / n) ** 2


def default_neighborhood_size(n: int) -> int:
    """Default ``m``: max(20, ceil(0.05 n)), capped at ``n - 1``."""
    return min(max(20, math.ceil(0.05 * n)), n - 1)


@dataclass(frozen=True)
class CvConfig:
    """Cross-validation settings.

    ``m=None`` resolves to :func:`default_neighborhood_size` at run time.
    """

    candidates: Sequence[float]
    method: str = "LL"
    m: Optional[int] = None
    window: str = "two_sided_exclude_target"

    def __post_init__(self):
        cands = tuple(float(b) for b in self.candidates)
        if not cands:
            raise ValueError("candidate list is empty")
        if any(b <= 0.0 for b in cands):
            raise ValueError("candidate bandwidths must be positive")
        object.__setattr__(self, "candidates", cands)
        if self.method not in PREDICT_METHODS:
            raise ValueError(f"unknown prediction method: {self.method!r}")
        if self.m is not None and self.m < 1:
            raise ValueError("m must be at least 1")
        if self.window not in WINDOW_MODES:
            raise ValueError(f"unknown window mode: {self.window!r}")


@dataclass(frozen=True)
class CvResult:
    """Outcome of a bandwidth search.

    ``err_by_b`` maps each candidate to its accumulated error, or ``None``
    when any delete-one fit failed; those candidates also appear in
    ``infeasible``.
    """

    best_b: float
    err_by_b: dict
    infeasible: frozenset


def _nearest_indices(xs: np.ndarray, x: float, m: int) -> np.ndarray:
    # primary key: distance to x; ties broken by lower index
    order = np.lexsort((np.arange(xs.size), np.abs(xs - x)))
    return order[:m]


def select_bandwidth(
    sample: RegressionSample,
    x: float,
    cv: CvConfig,
    cfg: EstimatorConfig,
) -> CvResult:
    """Pick the candidate bandwidth minimizing local delete-one error.

    Parameters
    ----------
    sample : RegressionSample
        Full data; each neighbor is deleted only for its own prediction.
    x : float
        Point the neighborhood is centered on.
    cv : CvConfig
        Candidates, prediction method, neighborhood size, window mode.
    cfg : EstimatorConfig
        Template for the per-candidate fits; ``b`` is replaced by each
        candidate, ``window`` by ``cv.window``, and a ``h0=None`` template
        keeps the ``(b / n) ** 2`` rule per candidate.

    Returns
    -------
    CvResult
        Errors per candidate and the argmin; ties go to the smallest
        bandwidth.

    Raises
    ------
    AllCandidatesInfeasible
        When every candidate raised an estimation error for some neighbor.
    """
    n = sample.n
    if n < 2:
        raise ValueError("cross-validation needs at least 2 observations")
    m = cv.m if cv.m is not None else default_neighborhood_size(n)
    if m > n - 1:
        raise ValueError(f"m={m} leaves no data after delete-one (n={n})")
    neighbors = _nearest_indices(sample.xs, x, m)

    err_by_b: dict = {}
    infeasible = set()
    for b in cv.candidates:
        cfg_b = replace(cfg, b=b, window=cv.window)
        err = 0.0
        try:
            for g in neighbors:
                sub = sample.without_index(int(g))
                pred = point_predict(sub, float(sample.xs[g]), cfg_b, cv.method)
                err += (pred - float(sample.ys[g])) ** 2
        except EstimationError:
            err_by_b[b] = None
            infeasible.add(b)
            continue
        err_by_b[b] = err

    feasible = [(err, b) for b, err in err_by_b.items() if err is not None]
    if not feasible:
        raise AllCandidatesInfeasible(
            f"all {len(cv.candidates)} candidate bandwidths failed at x={x}"
        )
    best_err, best_b = min(feasible)
    return CvResult(best_b=best_b, err_by_b=err_by_b, infeasible=frozenset(infeasible))
