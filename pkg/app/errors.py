"""
Exception hierarchy for the AoT scheduler.
"""


class AotError(Exception):
    """Base class of every error raised by this package."""


class InstanceValidationError(AotError, ValueError):
    def __init__(self, violations: list[str]):
        self.violations = list(violations)
        super().__init__("Invalid instance: " + "; ".join(self.violations))


class CompletionLogError(AotError, ValueError):
    pass


class NegativeVolumeError(AotError, ValueError):
    pass


class NonPositiveGainError(AotError, ValueError):
    pass


class UnsupportedOrderError(AotError, ValueError):
    def __init__(self, m: int):
        self.m = m
        super().__init__(f"Closed-form offloading requires monomial order m = 3, got m = {m}")


class InfeasibleError(AotError):
    """Raised when no schedule fits the energy budget within the horizon."""


class InfeasiblePlanError(InfeasibleError):
    pass


class InfeasibleInstanceError(InfeasibleError):
    pass


class NodeLimitExceededError(AotError):
    pass


class UnknownStrategyError(AotError, ValueError):
    pass


class MissingStrategyError(AotError, KeyError):
    pass


class KeyValueFormatError(AotError, ValueError):
    pass
