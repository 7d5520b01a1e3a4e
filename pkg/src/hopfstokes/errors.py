"""Exception hierarchy shared by every stage of the pipeline."""


class StokesError(Exception):
    """Base class; every failure of a rigorous check derives from it."""

    exit_code = 1


class DomainError(StokesError, ArithmeticError):
    """An operation was asked to act outside its domain (e.g. 1/[−1, 1])."""

    exit_code = 3


class ThresholdError(StokesError):
    """A gate condition (L ≤ 1/2, A < 1/2, ...) could not be verified."""

    exit_code = 3

    def __init__(self, message, gate=None):
        super().__init__(message)
        self.gate = gate


class SearchExhausted(ThresholdError):
    """No grid point verified a threshold condition within the iteration budget."""


class NotApplicable(StokesError):
    """The refined estimate was requested for a problem that does not support it."""

    exit_code = 3


class IntegrationError(StokesError):
    exit_code = 4


class WrappingFailure(IntegrationError):
    """Enclosure width exceeded the configured cap, or no step size validated."""


class NoCrossing(IntegrationError):
    """The time budget ran out before the section {s1 = 0} was reached."""


class BolzanoFailure(StokesError):
    """One of the three strict shooting inequalities did not verify."""

    exit_code = 3

    def __init__(self, message, comparison=None):
        super().__init__(message)
        self.comparison = comparison
