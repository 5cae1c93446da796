"""
Exception hierarchy for the mixing simulator.

Everything derives from ValueError so callers that only know about bad
inputs keep working. run.py maps the three families onto exit codes:
ScenarioValidationError -> 1, PhysicsDomainError -> 2, ConfigIOError -> 3.
"""

from __future__ import annotations


class PhysicsDomainError(ValueError):
    """Inputs are well-formed but outside the physical model's domain."""


class DomainError(PhysicsDomainError):
    """Argument outside the domain of a conversion or formula."""


class ComputationError(PhysicsDomainError):
    """Arithmetic produced a non-finite value or a consistency check failed."""


class EvanescentModeError(PhysicsDomainError):
    """A mode has n^2 <= 0, so it does not propagate."""

    def __init__(self, n_squared: float, y: float | None = None) -> None:
        self.n_squared = n_squared
        self.y = y
        where = "" if y is None else f" at y = {y:.6g} m"
        super().__init__(f"Evanescent mode: n^2 = {n_squared:.6g}{where}")


class CausticError(PhysicsDomainError):
    """The ray turns around before reaching the requested coordinate."""

    def __init__(self, y_turn: float, message: str | None = None) -> None:
        self.y_turn = y_turn
        super().__init__(
            message or f"Ray turning point (caustic) at y = {y_turn:.12g} m"
        )


class DegenerateProfileError(PhysicsDomainError):
    """Profile has no gradient, or an intensity profile has no half-max crossing."""


class QuadratureError(PhysicsDomainError):
    """Adaptive quadrature did not reach the requested tolerance."""

    def __init__(self, estimate: float, abserr: float, tolerance: float) -> None:
        self.estimate = estimate
        self.abserr = abserr
        self.tolerance = tolerance
        super().__init__(
            f"Quadrature did not converge: estimate {estimate:.17g}, "
            f"error {abserr:.3g} > tolerance {tolerance:.3g}"
        )


class IntegrationError(PhysicsDomainError):
    """ODE integrator failed (step-size underflow or similar)."""


class UndefinedGeometricFactorError(PhysicsDomainError):
    """f_G = (B1/B0) L requested with B0 = 0."""


class EnumerationLimitError(PhysicsDomainError):
    """Exact 2^N enumeration requested beyond the memory guard."""


class FitError(PhysicsDomainError):
    """Power-law fit has degenerate checkpoints."""


class ScenarioValidationError(ValueError):
    """Scenario config violates one or more type invariants."""

    def __init__(self, findings: list[str]) -> None:
        self.findings = list(findings)
        joined = "; ".join(self.findings)
        super().__init__(f"{len(self.findings)} validation finding(s): {joined}")


class ConfigIOError(ValueError):
    """Config file is missing, unreadable or not valid JSON/YAML."""
