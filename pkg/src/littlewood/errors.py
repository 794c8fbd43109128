"""Exception hierarchy shared by all littlewood modules."""


class LittlewoodError(Exception):
    """Base class for every error raised by this package."""


class ParallelLines(LittlewoodError):
    """Two axes are (numerically) parallel, so the skew-line distance formula does not apply."""


class DegenerateDirection(LittlewoodError):
    """A decoded direction vector is zero."""


class UnknownVariable(LittlewoodError, KeyError):
    pass


class DimensionMismatch(LittlewoodError, ValueError):
    pass


class DegenerateLifting(LittlewoodError):
    """Lifting values are too close to a tie for strict mixed-cell inequalities."""


class SingularCell(LittlewoodError):
    pass


class StepSizeUnderflow(LittlewoodError):
    pass


class Diverged(LittlewoodError):
    pass


class SingularJacobian(LittlewoodError, ArithmeticError):
    pass


class MaxIterations(LittlewoodError):
    pass
