"""Exception hierarchy.

Every error raised by the package derives from :class:`FqregError`.  Errors
raised inside :func:`fqreg.quadtest.run_test` carry the pipeline stage in
which they occurred on the ``stage`` attribute.
"""


class FqregError(Exception):
    """Base class for all package errors."""

    stage = None

    def __str__(self):
        msg = super().__str__()
        if self.stage:
            return f"[{self.stage}] {msg}"
        return msg


class InvalidArgumentError(FqregError, ValueError):
    pass


class GridMismatchError(FqregError, ValueError):
    pass


class OutOfRangeError(FqregError, ValueError):
    pass


class SingularDesignError(FqregError, ArithmeticError):
    """Normal-equations matrix is numerically rank deficient.

    Attributes
    ----------
    column : int
        Zero-based index of the design column whose pivot collapsed.
    """

    def __init__(self, msg, column=None):
        super().__init__(msg)
        self.column = column


class ComponentDegenerateError(FqregError, ValueError):
    pass


class PerfectFitError(FqregError, ArithmeticError):
    """Residual variance is zero (to rounding), so the statistic is undefined.

    The offending fit, when available, is attached as ``fit``.
    """

    def __init__(self, msg, fit=None):
        super().__init__(msg)
        self.fit = fit


class ParseError(FqregError, ValueError):
    def __init__(self, msg, line=None):
        if line is not None:
            msg = f"line {line}: {msg}"
        super().__init__(msg)
        self.line = line


class IterationError(FqregError):
    """A Monte Carlo replication failed; ``iteration`` is its index."""

    def __init__(self, msg, iteration=None):
        super().__init__(msg)
        self.iteration = iteration
