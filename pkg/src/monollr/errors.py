"""Exception types raised by estimation routines.

All estimator failures derive from :class:`EstimationError` so callers can
catch the whole family with one handler while still distinguishing the
specific degeneracy when they need to.
"""


class EstimationError(Exception):
    """Base class for all estimation failures."""


class DegenerateWeights(EstimationError):
    """No usable sample mass at the evaluation point.

    Raised when every kernel weight vanishes (empty window) or when the
    local linear slope is undefined because all in-window design points
    coincide with the evaluation point.
    """


class NearSingularNormalization(EstimationError):
    """Weight mass cancels: |sum(w)| < 1e-12 * sum(|w|).

    Local linear weights can be negative; when positive and negative mass
    cancel almost exactly, normalized estimates blow up and are meaningless.
    """


class DegenerateGrid(EstimationError):
    """The evaluation grid carries no usable distribution mass.

    Raised when the running-max corrected CDF never rises above zero, or
    when the clipped density sums to zero over the grid.
    """


class OutOfGridRange(EstimationError):
    """A requested quantile level exceeds the CDF value at the last grid point."""


class AllCandidatesInfeasible(EstimationError):
    """Every candidate bandwidth failed during cross-validation."""
