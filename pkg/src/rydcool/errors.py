"""Exception hierarchy.

The CLI maps each family onto an exit code, so every error raised by the
library belongs to exactly one of the three categories below.
"""


class RydcoolError(Exception):
    """Base class for all package errors."""

    category = "error"
    exit_code = 1


class SchemaError(RydcoolError, ValueError):
    """Malformed scenario document or unit annotation."""

    category = "schema"
    exit_code = 2

    def __init__(self, message, line=None, column=None, field=None):
        self.line = line
        self.column = column
        self.field = field
        where = []
        if field is not None:
            where.append(f"field '{field}'")
        if line is not None:
            where.append(f"line {line}, column {column}")
        if where:
            message = f"{message} ({'; '.join(where)})"
        super().__init__(message)


class DomainError(RydcoolError, ValueError):
    """Inputs outside the physical domain of a formula."""

    category = "physics-domain"
    exit_code = 3


class ResonanceError(DomainError):
    """Zero energy defect: the perturbative vdW expansion does not exist."""


class NumericalError(RydcoolError, ArithmeticError):
    """A numerical procedure failed (no bracket, unstable form, ...)."""

    category = "numerical"
    exit_code = 4


class InstabilityError(NumericalError):
    """Quadratic form is not positive definite; evolution is refused."""
