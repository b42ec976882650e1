"""Exception hierarchy shared by all hypack modules."""


class HypackError(Exception):
    """Base class for every error raised by hypack."""


# --- combinatorics -------------------------------------------------------


class ComplexError(HypackError):
    """The input does not describe a valid polygonal cell complex."""


class DegenerateFace(ComplexError):
    pass


class MultiEdge(ComplexError):
    pass


class OverusedEdge(ComplexError):
    pass


class LowDegreeVertex(ComplexError):
    pass


class IsolatedVertex(ComplexError):
    pass


class IndexOutOfRange(ComplexError, IndexError):
    pass


class EmptySubset(HypackError, ValueError):
    pass


# --- numerics ------------------------------------------------------------


class DomainError(HypackError, ValueError):
    """An argument lies outside the domain of a hyperbolic-trig quantity."""


class TooFewVertices(HypackError, ValueError):
    pass


class ConvergenceFailure(HypackError):
    pass


class NumericalDegeneracy(HypackError):
    pass


class NonpositiveTarget(HypackError, ValueError):
    pass


# --- solvers -------------------------------------------------------------


class InvalidOptions(HypackError, ValueError):
    pass


class SolveFailed(HypackError):
    """A solver stopped without converging; ``report`` holds the last state."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class LineSearchStall(SolveFailed):
    pass


class LinearSolveFailure(SolveFailed):
    pass


class ConvergenceFitError(HypackError):
    pass


class InsufficientSamples(ConvergenceFitError):
    pass


class NonDecayingTrajectory(ConvergenceFitError):
    pass


# --- command line --------------------------------------------------------


class ProblemFileError(HypackError, ValueError):
    """Malformed problem file; the message names the offending line or field."""


class FaceIndexOutOfRange(HypackError, IndexError):
    pass


class UnsolvedState(SolveFailed):
    """No curvature state is available to draw."""
