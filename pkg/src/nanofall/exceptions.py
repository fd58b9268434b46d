class DomainError(ValueError):
    """An input lies outside the domain where a quantity is defined."""


class NumericalError(ArithmeticError):
    """Integration or root finding failed to deliver a valid result."""

    def __init__(self, message, time=None, trajectory=None):
        super().__init__(message)
        self.time = time
        self.trajectory = trajectory
