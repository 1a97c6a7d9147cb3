from typing import List, Mapping, Sequence, Tuple, Union

JSONScalar = Union[str, int, float, bool, None]
JSON = Union[JSONScalar, Mapping[str, "JSON"], List["JSON"]]
Options = Mapping[str, JSON]

Vertex = int
"""Vertex index; coordinate i in 1..n is bit (i - 1)."""

Coordinates = Sequence[int]
"""A collection of 1-based coordinates."""

Assignment = Mapping[int, int]
"""A partial point: coordinate -> bit."""

FixedPattern = Tuple[Tuple[int, int], ...]
"""Sorted ((coordinate, bit), ...) pairs describing a subcube."""
