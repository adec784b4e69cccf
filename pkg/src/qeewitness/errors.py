"""Exception types shared across the package."""


class ValidationError(ValueError):
    """Input violates a documented precondition."""


class CapacityError(ValidationError):
    """A dense construction would exceed the configured dimension cap."""


class NumericalError(ArithmeticError):
    """A numerical routine failed or an oracle check did not hold."""
