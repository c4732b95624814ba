"""Exception types shared across the package."""


class SingularMatrixError(Exception):
    """A matrix is singular to working precision.

    Raised when an LU pivot falls below the relative tolerance; carries the
    index of the failing pivot so callers can report where elimination broke
    down.
    """

    def __init__(self, message, pivot_index=None):
        super().__init__(message)
        self.pivot_index = pivot_index


class ConvergenceError(Exception):
    """An iteration hit its step budget before the stopping rule fired.

    The partial per-iteration report is attached so callers can still inspect
    (or persist) whatever progress was made.
    """

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class MMParseError(ValueError):
    """A MatrixMarket file is malformed; carries the 1-based line number."""

    def __init__(self, message, line_no=None):
        if line_no is not None:
            message = "line %d: %s" % (line_no, message)
        super().__init__(message)
        self.line_no = line_no


class CountMismatchError(Exception):
    """Instrumented operation counts disagree with the analytic cost model."""
