"""Exception types shared across the package."""


class CtgraphError(Exception):
    """Base class for all package-specific errors."""


class NonFiniteError(CtgraphError):
    """A state or loss became NaN/Inf (divergent dynamics or too-large step)."""


class TimeOrderError(CtgraphError):
    """Requested time points are not strictly increasing."""


class DivergedError(CtgraphError):
    """Validation loss exceeded 10x its initial value during a fit."""


class MissingWeightsError(CtgraphError):
    """Adaptive penalty requested without an adaptive weight matrix."""


class BadDimensionError(CtgraphError):
    """System dimension outside the supported range."""


class TruthMismatchError(CtgraphError):
    """Stored ground-truth adjacency disagrees with the sensitivity oracle."""


class TooFewPointsError(CtgraphError):
    """Not enough observations to fit a cubic smoothing spline."""


class OutOfRangeError(CtgraphError):
    """Evaluation point lies outside the spline's knot range."""


class ShapeMismatchError(CtgraphError):
    """Predicted and true graphs have different shapes."""


class DegenerateTruthError(CtgraphError):
    """Truth labels contain no positives or no negatives."""
