"""Exception hierarchy shared by all modules."""


class MomentProblemError(Exception):
    """Base class for every error raised by :mod:`polymoment`."""


class DegreeError(MomentProblemError, ValueError):
    """Polynomial degree does not satisfy an operation's precondition."""


class ConvergenceError(MomentProblemError, ArithmeticError):
    """An iterative numerical method failed to converge."""


class PathError(MomentProblemError, ValueError):
    """A path plan violates its invariants (repeated waypoints, bad guard)."""


class PathTooClose(MomentProblemError, ArithmeticError):
    """Step control could not keep tracked fiber points separated."""


class MatchError(MomentProblemError, ArithmeticError):
    """Nearest-point matching between two fibers was ambiguous."""


class BasePointCollision(MomentProblemError, ValueError):
    """The monodromy base point coincides with P(a) or P(b)."""


class StructureError(MomentProblemError, ValueError):
    """Combinatorial data is inconsistent (cactus not a tree, missing marks)."""


class RadiusError(MomentProblemError, ValueError):
    """A Puiseux series is evaluated inside its estimated validity radius."""


class SolverError(MomentProblemError, ArithmeticError):
    """A linear system is too ill-conditioned to certify a solution."""


class ParseError(MomentProblemError, ValueError):
    """Malformed textual input (polynomial, endpoint expression, cycles)."""
