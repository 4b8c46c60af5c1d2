"""Exception types shared across the package."""


class ValidationError(ValueError):
    """A parameter is outside the admissible domain (bad order, chi, grid, ...)."""


class NumericalError(RuntimeError):
    """A numerical procedure failed: singular system, non-convergent iteration."""
