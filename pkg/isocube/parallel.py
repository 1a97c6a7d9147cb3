import concurrent.futures
import threading
from typing import Callable, Generic, List, Sequence, TypeVar

from . import runtime
from .runtime import Request
from .types import Options

T = TypeVar("T")
A = TypeVar("A")


class ShardRequest(Request[List[A]], Generic[T, A]):
    """A request to map a function over independent trial inputs.

    Handlers may evaluate the items in any order and on any number of
    workers, but must return the results in input order.

    Arguments
    ---------
    function : Callable[[T], A]
        The per-item computation. Must not depend on shared mutable state.
    items : Sequence[T]
        The inputs.
    options : Options
        The options in effect for the caller.
    """

    function: Callable[[T], A]
    items: Sequence[T]
    options: Options

    def __init__(
        self, function: Callable[[T], A], items: Sequence[T], options: Options
    ) -> None:
        self.function = function
        self.items = items
        self.options = options


@ShardRequest.handle
def _serial_handler(request: ShardRequest) -> list:
    return [request.function(item) for item in request.items]


def _thread_pool_handler(count: int) -> Callable[[ShardRequest], list]:
    def handler(request: ShardRequest) -> list:
        parent = threading.current_thread()
        started: List[threading.Thread] = []

        def start() -> None:
            started.append(threading.current_thread())
            runtime.inherit(parent)

        try:
            with concurrent.futures.ThreadPoolExecutor(
                max_workers=count, initializer=start
            ) as pool:
                return list(pool.map(request.function, request.items))
        finally:
            for thread in started:
                runtime.release(thread)

    return handler


def shard_map(
    function: Callable[[T], A], items: Sequence[T], options: Options
) -> List[A]:
    """Map ``function`` over ``items`` through the current runtime."""
    return ShardRequest(function, items, options).run()


def workers(count: int) -> runtime.Runtime:
    """Return a runtime that shards trials across ``count`` threads.

    Example Usage
    -------------
    >>> import isocube.parallel
    >>> with isocube.parallel.workers(4):
    ...     isocube.parallel.shard_map(abs, [-1, 2, -3], {})
    [1, 2, 3]
    """
    if count <= 1:
        return runtime.handle(ShardRequest, _serial_handler)
    return runtime.handle(ShardRequest, _thread_pool_handler(count))
