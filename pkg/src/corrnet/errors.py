"""Exception hierarchy shared by all corrnet modules."""


class CorrnetError(Exception):
    """Base class for library errors."""


class DataError(CorrnetError, ValueError):
    """Input data is malformed or does not meet an operation's preconditions."""


class NumericalError(CorrnetError, ArithmeticError):
    """A numerical routine failed (non-convergence, division by zero distance)."""
