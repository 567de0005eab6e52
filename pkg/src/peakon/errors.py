"""Exception hierarchy shared by all peakon modules."""


class PeakonError(Exception):
    """Base class for every error raised by this package."""


class OutOfDomain(PeakonError, ValueError):
    """Positions are not strictly decreasing, or values are non-finite."""


class WrongArity(PeakonError, ValueError):
    """Operation called with an unsupported number of peaks."""


class SingularMatrix(PeakonError, ArithmeticError):
    """Metric inverse failed its residual check (too close to a collision)."""


class StepTooLarge(PeakonError, ValueError):
    """Finite-difference step is not small compared to the peak gaps."""


class ExponentOverflow(PeakonError, OverflowError):
    """Positions large enough that raw exponentials would overflow."""


class DegeneratePlane(PeakonError, ValueError):
    """The two vectors spanning a plane are (numerically) parallel."""


class NotPositiveDefinite(PeakonError, ValueError):
    """A matrix required to be SPD is not."""


class NotColliding(PeakonError, ValueError):
    """Collision-time bound requested for a state outside the colliding sector."""


class Degenerate(PeakonError, ArithmeticError):
    """A quantity that must be strictly positive vanished."""


class OnBoundary(PeakonError, ValueError):
    """Some momentum is exactly zero, so the state is a lower-order peakon."""


class GeodesicLeftDomain(PeakonError):
    """A geodesic reached the collision set before the requested time.

    The partial trajectory is kept on ``trajectory``.
    """

    def __init__(self, message, trajectory=None):
        super().__init__(message)
        self.trajectory = trajectory
