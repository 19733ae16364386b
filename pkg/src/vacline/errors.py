"""Exception types shared across modules."""

from __future__ import annotations


class NumericalError(RuntimeError):
    """Quadrature, fit or convergence failed to reach the requested accuracy."""

    def __init__(self, message: str, achieved: float | None = None):
        super().__init__(message if achieved is None else f"{message} (achieved {achieved:.3g})")
        self.achieved = achieved


class PreconditionError(ValueError):
    """Inputs are valid but outside the regime an operation is defined for."""
