"""Exception types raised by the library."""


class DomainError(ValueError):
    """An argument lies outside the domain of the function."""


class DegenerateCaseError(DomainError):
    """The requested quantity does not exist for these inputs."""


class ConvergenceError(ArithmeticError):
    """A numerical procedure failed to reach its tolerance."""


class DivergenceError(ArithmeticError):
    """An integral does not converge for the given parameters."""
