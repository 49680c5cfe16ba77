"""Exception types raised across the package."""


class FrameError(Exception):
    """Base class for every error raised by cstarframes."""


class SpecMismatch(FrameError, ValueError):
    """Operands live in algebras with different block structures."""


class SpaceMismatch(FrameError, ValueError):
    """Operands live in different module spaces."""


class Singular(FrameError, ArithmeticError):
    """An element or operator failed the invertibility threshold."""


class NotInSpan(FrameError, ValueError):
    """An ambient matrix is not in the span of a module basis."""


class InvalidSpace(FrameError, ValueError):
    """A module space violates one of the Hilbert module axioms."""


class DegreeCapExceeded(FrameError, ValueError):
    pass


class OutOfDomain(FrameError, ValueError):
    """A parameter value lies outside every interval and atom."""


class NotAFrame(FrameError):
    """The lower frame bound is not positive."""


class KernelViolation(FrameError):
    """The pencil has a direction where the Gram form vanishes but the frame form does not."""


class NotDual(FrameError):
    pass


class HypothesisFails(FrameError):
    """The characteristic-function hypothesis does not hold.

    ``location`` names the first place where it was violated.
    """

    def __init__(self, message, location=None):
        super().__init__(message)
        self.location = location


class ZeroVector(FrameError):
    pass


class NotApplicable(FrameError):
    pass


class NotACoefficient(FrameError):
    pass


class PreconditionFailed(FrameError):
    pass


class DescriptorError(FrameError):
    """A descriptor file could not be parsed; ``context`` locates the problem."""

    def __init__(self, message, context=None):
        super().__init__(f"{context}: {message}" if context else message)
        self.context = context
