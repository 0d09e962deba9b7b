"""Exception types shared across the package.

Domain violations (bad parameters) raise :class:`DomainError`; numerical
failures that carry a best estimate raise subclasses of
:class:`NumericalError` so callers can distinguish "you asked for something
invalid" from "the requested accuracy was not reached".
"""

from __future__ import annotations


class RootboundError(Exception):
    """Base class for all package-specific errors."""


class DomainError(RootboundError, ValueError):
    """A parameter lies outside an operation's mathematical domain."""


class NumericalError(RootboundError, RuntimeError):
    """Base class for runtime numerical failures."""


class ToleranceNotMetError(NumericalError):
    """Quadrature could not reach the requested tolerance.

    Carries the best estimate and the achieved error bound so callers can
    decide whether the partial result is still usable.
    """

    def __init__(self, message: str, estimate: complex, achieved: float) -> None:
        super().__init__(f"{message} (best estimate {estimate!r}, achieved error {achieved:.3e})")
        self.estimate = estimate
        self.achieved = achieved


class TruncationTailError(NumericalError):
    """The inversion contour was truncated before the transform decayed.

    Raised when |M(a+iH)| * y^(a-1) / pi exceeds the configured tail
    tolerance; remedy is a larger half-height H.
    """

    def __init__(self, message: str, tail_bound: float, tail_tol: float) -> None:
        super().__init__(f"{message} (tail bound {tail_bound:.3e} > tail_tol {tail_tol:.3e})")
        self.tail_bound = tail_bound
        self.tail_tol = tail_tol


class NormalizationError(NumericalError):
    """An inverted density integrates to something too far from 1."""

    def __init__(self, mass: float) -> None:
        super().__init__(f"density mass {mass:.6f} outside [0.99, 1.01]")
        self.mass = mass


class NearIntegerParameterError(NumericalError):
    """The Kummer connection formula is degenerate: second parameter is
    within 1e-6 of an integer and no alternative evaluation path applies."""


class ConsistencyError(NumericalError):
    """Two independent evaluation routes disagree beyond tolerance."""
