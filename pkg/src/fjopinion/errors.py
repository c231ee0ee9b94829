"""Exception types shared across the package."""


class GraphInputError(ValueError):
    """Malformed or rejected input data (edge lists, opinion files, configs)."""


class SizeGuardError(RuntimeError):
    """An operation was refused because the instance exceeds its size guard."""


class NumericalError(RuntimeError):
    """A numerical contract was violated (non-convergence, failed cross-check)."""
