"""Exception hierarchy shared by the library and the CLI."""
from __future__ import annotations

from typing import Optional


class KleinGordonError(Exception):
    """Base class for every error raised by kgalerkin."""


class DomainError(KleinGordonError, ValueError):
    """A parameter lies outside the domain where the quantity is defined."""


class ResolutionError(KleinGordonError, ValueError):
    """A sampling grid is too coarse for the requested number of modes."""


class NoSuchBranchError(KleinGordonError, LookupError):
    """The requested stationary branch does not exist for this lambda."""


class InputFormatError(KleinGordonError, ValueError):
    """Malformed coefficient list, field file or state file."""


class DivergenceError(KleinGordonError, ArithmeticError):
    """Time integration left the finite / bounded region."""

    def __init__(self, message: str, tau: Optional[float] = None, step: Optional[int] = None):
        super().__init__(message)
        self.tau = tau
        self.step = step
