"""
Created on : Monday, 19th October 2026 9:02:14 am
Author: chiral-vdw contributors
-----
Exception hierarchy shared by the numerical kernels and the command line front end.
"""

from typing import Any


class VdwError(Exception):
    """Base class for every failure raised by the vdw package."""


class ConfigError(VdwError, ValueError):
    """Invalid or missing configuration; `key` names the offending entry."""

    def __init__(self, message: str, key: str | None = None):
        super().__init__(message)
        self.key = key


class NumericalError(VdwError, ArithmeticError):
    """A numerical operation failed at a specific point."""

    def __init__(self, message: str, operation: str, point: Any = None):
        super().__init__(message)
        self.operation = operation
        self.point = point


class ConvergenceError(NumericalError):
    """Quadrature refinement ran out of levels before the error estimate settled."""

    def __init__(
        self, message: str, operation: str, estimate: Any, error: float, levels: int
    ):
        super().__init__(message, operation)
        self.estimate = estimate
        self.error = error
        self.levels = levels


class NonFiniteError(NumericalError):
    """An integrand, stencil or tensor produced NaN or infinity."""

    def __init__(self, message: str, operation: str, node: Any):
        super().__init__(message, operation, point=node)
        self.node = node


class SingularGeometryError(NumericalError, ValueError):
    """Coincident molecules, a molecule on a plate, or on the wrong side of it."""


class ImaginaryResidueError(NumericalError):
    """A tensor that must be real at imaginary frequency kept an imaginary part."""

    def __init__(self, message: str, operation: str, point: Any, residue: float):
        super().__init__(message, operation, point=point)
        self.residue = residue
