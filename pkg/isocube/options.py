import functools
from typing import Generic, Optional, TypeVar

from confectioner import mix
from confectioner.templating import get_dotted_key

from .exceptions import KeyNotFoundError
from .types import JSON, Options

A = TypeVar("A", covariant=True, bound=JSON)


class _Missing:
    def __repr__(self) -> str:
        return "MISSING"


MISSING = _Missing()


class Option(Generic[A]):
    """A single user-provided configuration value.

    Options are the only way tunables reach the library code. They take a
    dotted key, which is used to retrieve the value from a nested options
    dictionary. If the key does not exist, the default is used.

    Arguments
    ----------
    key : str
        The dotted key to retrieve, e.g. :code:`ISOCUBE.DECOMPOSE.KAPPA0`.
    default : A, optional
        The value to use when the key is absent.
    doc : str
        The docstring for the option.


    Example Usage
    -------------
    >>> from isocube.options import Option
    >>> kappa0 = Option('ISOCUBE.DECOMPOSE.KAPPA0', 0.125)
    >>> kappa0()
    0.125
    >>> kappa0({'ISOCUBE': {'DECOMPOSE': {'KAPPA0': 0.25}}})
    0.25
    """

    key: str

    def __init__(self, key: str, default=MISSING, doc: str = "") -> None:
        self.key = key
        self._default = default

        self.__doc__ = doc

    def evaluate(self, options: Options) -> A:
        """Retrieve the key from the options dictionary, falling back to the default."""
        try:
            return get_dotted_key(self.key, options)
        except KeyError:
            if self._default is MISSING:
                raise KeyNotFoundError(self.key, repr(self))
            return self._default  # type: ignore [return-value]

    def __call__(self, options: Optional[Options] = None) -> A:
        return self.evaluate(options or {})

    def __repr__(self) -> str:
        return (
            f"Option({self.key!r}, default={self._default!r})"
            if self._default is not MISSING
            else f"Option({self.key!r})"
        )


def mix_options(*layers: Optional[Options]) -> Options:
    """Combine option layers; later layers take precedence over earlier ones."""
    return functools.reduce(
        lambda mixed, layer: mix(mixed, layer),  # type: ignore [arg-type]
        (layer for layer in layers if layer),
        {},
    )


TOLERANCE: Option[float] = Option(
    "ISOCUBE.TOLERANCE", 1e-9, doc="Slack allowed on every inequality check."
)
SUBCUBE_TOLERANCE: Option[float] = Option(
    "ISOCUBE.SUBCUBE_TOLERANCE",
    1e-12,
    doc="Largest excess a subcube may report.",
)
RETRY_BUDGET: Option[int] = Option(
    "ISOCUBE.GENERATE.RETRY_BUDGET",
    1000,
    doc="Rejection-sampling attempts per planted cube.",
)
MIN_CODIMENSION: Option[int] = Option("ISOCUBE.GENERATE.MIN_CODIMENSION", 2)
MAX_CODIMENSION: Option[Optional[int]] = Option(
    "ISOCUBE.GENERATE.MAX_CODIMENSION",
    None,
    doc="Largest planted codimension; n // 2 when unset.",
)
EXHAUSTIVE_MAX_DIM: Option[int] = Option(
    "ISOCUBE.ISOPERIMETRY.EXHAUSTIVE_MAX_DIM",
    14,
    doc="Largest dimension for the exhaustive best-subcube search.",
)
ORACLE_MAX_DIM: Option[int] = Option("ISOCUBE.ISOPERIMETRY.ORACLE_MAX_DIM", 4)
EPS0: Option[float] = Option(
    "ISOCUBE.ELLIS.EPS0",
    0.05,
    doc="Excess threshold below which the subcube stability bound is asserted.",
)
KAPPA0: Option[float] = Option(
    "ISOCUBE.DECOMPOSE.KAPPA0",
    0.125,
    doc="Excess at or below which a node tries a single subcube.",
)
DROP_FRAC: Option[float] = Option(
    "ISOCUBE.DECOMPOSE.DROP_FRAC",
    0.5,
    doc="Fraction of the node budget the lighter half may consume when dropped.",
)
EXH_DIM: Option[int] = Option(
    "ISOCUBE.DECOMPOSE.EXH_DIM",
    12,
    doc="Largest node dimension searched exhaustively for a subcube.",
)
BOUND_CONSTANT: Option[float] = Option("ISOCUBE.DECOMPOSE.BOUND_CONSTANT", 1.0)
SUITE_MIN_DIM: Option[int] = Option("ISOCUBE.SUITE.MIN_DIM", 4)
WORKERS: Option[int] = Option("ISOCUBE.SUITE.WORKERS", 1)
REPORT_TIMING: Option[bool] = Option("ISOCUBE.REPORT.TIMING", False)
LOGGING_DISABLED: Option[bool] = Option("ISOCUBE.LOGGING.DISABLED", False)
