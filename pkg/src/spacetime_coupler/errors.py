"""Exception types shared across the package."""


class ValidationError(ValueError):
    """Raised when an input object or configuration violates its invariants."""


class NumericalError(RuntimeError):
    """Raised when a solver fails for numerical reasons (singular system,
    non-convergence, step-size guard violation, ...)."""


class ConvergenceError(NumericalError):
    """Raised when iterative refinement exhausts its budget without converging."""
