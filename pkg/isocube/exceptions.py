class IsoCubeError(Exception):
    """Base class for all errors raised by isocube.

    Arguments
    ---------
    msg : str
        A description of the problem.
    source : str
        The operation that raised the error.
    """

    msg: str
    source: str
    exit_code: int = 2

    def __init__(self, msg: str, source: str) -> None:
        self.msg = msg
        self.source = source

        super().__init__(msg, source)

    def __str__(self):
        return f"Originating in {self.source} | {self.msg}"


class InputError(IsoCubeError):
    """Error raised when an argument is malformed or out of range."""


class SetFormatError(InputError):
    """Error raised when a set or function file cannot be decoded."""


class KeyNotFoundError(InputError):
    """Error raised when a key is not found in the options dictionary."""

    key: str

    def __init__(self, key: str, source: str) -> None:
        self.key = key

        super().__init__(f"Key '{self.key}' not found", source)


class DomainError(IsoCubeError):
    """Error raised when a quantity is undefined for the given input."""


class OutOfScopeError(DomainError):
    """Error raised when the hypotheses of the checked statement are not met."""


class CapabilityError(IsoCubeError):
    """Error raised when exhaustive work would exceed a dimension cap."""

    exit_code = 3


class GenerationError(IsoCubeError):
    """Error raised when a random set cannot be generated."""
