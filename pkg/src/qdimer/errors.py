"""Exception types shared across the package."""


class QdimerError(Exception):
    """Base class for all package errors."""


class ValidationError(QdimerError):
    """Invalid physical or numerical parameters."""


class UndefinedAngleError(QdimerError):
    """Bloch vector has no y-z component; the angle is not defined."""


class NumericalError(QdimerError):
    """Numerical failure during propagation (norm collapse, zero-probability branch)."""


class CflError(QdimerError):
    """Grid time step violates the CFL stability bound."""


class BoundaryIndeterminateError(QdimerError):
    """A fixed point has marginal eigenvalues; the point sits on a phase boundary."""


class EmptyHistogramError(QdimerError):
    """Histogram or slice contains no samples."""


class ShapeMismatchError(QdimerError):
    """Operands have incompatible bin layouts."""


class ParseError(QdimerError):
    """Malformed input file; carries line number and offending content."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
