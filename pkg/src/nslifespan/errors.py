"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of a formula."""


class InfeasibleExponentError(DomainError):
    """An exponent constraint (Beta-function positivity, Young admissibility,
    weight matching) rules the requested configuration out. The message names
    the violated constraint; nothing is clamped silently."""


class UnavailableBoundError(ValueError):
    """A bound was requested that needs a norm the caller did not supply."""
