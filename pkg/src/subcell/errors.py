"""Exception types raised by the reconstruction library."""


class InvalidShapeError(ValueError):
    """A shape description is degenerate or malformed."""


class NumericDegeneracyError(ArithmeticError):
    """A kernel could not produce a trustworthy value (e.g. root isolation failed)."""


class ConfinementError(RuntimeError):
    """No oriented stencil confines the interface within the search cap."""


class SchemeInstabilityError(RuntimeError):
    """A finite volume update produced averages outside [0, 1] beyond roundoff."""

    def __init__(self, message, cells=None, worst=None):
        super().__init__(message)
        self.cells = cells or []
        self.worst = worst
