"""Exception hierarchy shared by the whole package.

ValidationError maps to CLI exit code 2, NumericalError to exit code 3.
"""


class LeglabError(Exception):
    pass


class ValidationError(LeglabError):
    """Bad input data: degenerate curves, mismatched sizes, domain exits."""


class DegenerateInputError(ValidationError):
    pass


class NonInjectiveProjectionError(ValidationError):
    pass


class DomainExitError(ValidationError):
    pass


class NumericalError(LeglabError):
    """A numeric procedure failed: genericity, bracketing, unattainable target."""


class GenericityError(NumericalError):
    pass


class RangeError(NumericalError):
    """Root-finding target outside the attainable monotone range."""
