"""Exact subsets of the n-cube.

A :class:`CubeSet` is a boolean membership table over vertex indices
``0 .. 2**n - 1``. Coordinate ``i`` (1-based) of the vertex ``v`` is bit
``i - 1`` of ``v``, so flipping coordinate ``i`` is ``v ^ (1 << (i - 1))``.

The table can also be viewed as a ``(2,) * n`` grid whose axis ``k`` is
coordinate ``k + 1``; sections and marginals are slices and sums over that
grid.
"""

import dataclasses
import itertools
import json
import pathlib
import sys
from typing import Dict, Iterator, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from . import logging
from .exceptions import CapabilityError, GenerationError, InputError, SetFormatError
from .options import MAX_CODIMENSION, MIN_CODIMENSION, RETRY_BUDGET
from .types import JSON, Assignment, Coordinates, FixedPattern, Options

MAX_DIMENSION = 24
"""Largest supported dimension; the membership table has at most 16M entries."""

ENUMERATION_MAX_DIMENSION = 4
"""Largest dimension whose subsets can be enumerated one by one."""


class CubeSet:
    """An immutable subset of the vertices of Q_n.

    Arguments
    ---------
    n : int
        The dimension, ``0 <= n <= 24``.
    members : np.ndarray
        Boolean membership table of length ``2**n``.
    """

    __slots__ = ("n", "members", "size")

    n: int
    members: np.ndarray
    size: int

    def __init__(self, n: int, members: np.ndarray) -> None:
        _check_dimension(n, "CubeSet")
        table = np.array(members, dtype=bool).reshape(-1)
        if table.shape != (1 << n,):
            raise InputError(
                f"membership table has {table.size} entries, expected {1 << n}",
                "CubeSet",
            )
        table.flags.writeable = False
        self.n = n
        self.members = table
        self.size = int(np.count_nonzero(table))

    @classmethod
    def from_grid(cls, grid: np.ndarray) -> "CubeSet":
        """Build a set from a grid whose axis ``k`` is coordinate ``k + 1``."""
        return cls(grid.ndim, np.ascontiguousarray(grid.T).reshape(-1))

    @property
    def grid(self) -> np.ndarray:
        """Read-only ``(2,) * n`` view; axis ``k`` is coordinate ``k + 1``."""
        return self.members.reshape((2,) * self.n).T

    @property
    def density(self) -> float:
        return self.size / (1 << self.n)

    @property
    def is_empty(self) -> bool:
        return self.size == 0

    @property
    def is_full(self) -> bool:
        return self.size == 1 << self.n

    def vertices(self) -> np.ndarray:
        """The member vertex indices in ascending order."""
        return np.flatnonzero(self.members)

    def complement(self) -> "CubeSet":
        return CubeSet(self.n, ~self.members)

    def to_bits_hex(self) -> str:
        """Little-endian hex encoding of the membership table."""
        return np.packbits(self.members, bitorder="little").tobytes().hex()

    @classmethod
    def from_bits_hex(cls, n: int, bits_hex: str) -> "CubeSet":
        _check_dimension(n, "CubeSet.from_bits_hex")
        try:
            raw = bytes.fromhex(bits_hex)
        except ValueError as e:
            raise SetFormatError(f"invalid hex string: {e}", "CubeSet.from_bits_hex")
        expected = max(1, (1 << n) // 8)
        if len(raw) != expected:
            raise SetFormatError(
                f"bits_hex holds {len(raw)} bytes, expected {expected} for n={n}",
                "CubeSet.from_bits_hex",
            )
        bits = np.unpackbits(np.frombuffer(raw, dtype=np.uint8), bitorder="little")
        if bits[1 << n :].any():
            raise SetFormatError(
                "bits_hex sets bits beyond 2**n", "CubeSet.from_bits_hex"
            )
        return cls(n, bits[: 1 << n].astype(bool))

    def __contains__(self, vertex: object) -> bool:
        return (
            isinstance(vertex, (int, np.integer))
            and 0 <= vertex < (1 << self.n)
            and bool(self.members[vertex])
        )

    def __len__(self) -> int:
        return self.size

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CubeSet):
            return NotImplemented
        return self.n == other.n and bool(np.array_equal(self.members, other.members))

    def __hash__(self) -> int:
        return hash((self.n, self.members.tobytes()))

    def __repr__(self) -> str:
        if self.size <= 8:
            return f"CubeSet(n={self.n}, vertices={self.vertices().tolist()})"
        return f"CubeSet(n={self.n}, size={self.size})"


@dataclasses.dataclass(frozen=True)
class SubCube:
    """The set of vertices agreeing with a pattern on a fixed coordinate set.

    Arguments
    ---------
    n : int
        The ambient dimension.
    fixed : FixedPattern
        ``((coordinate, bit), ...)``; normalized to ascending coordinates.
    """

    n: int
    fixed: FixedPattern = ()

    def __post_init__(self) -> None:
        _check_dimension(self.n, "SubCube")
        pattern = tuple(sorted((int(c), int(b)) for c, b in self.fixed))
        coordinates = [c for c, _ in pattern]
        if len(set(coordinates)) != len(coordinates):
            raise InputError(f"coordinate fixed twice in {pattern}", "SubCube")
        for coordinate, bit in pattern:
            if not 1 <= coordinate <= self.n or bit not in (0, 1):
                raise InputError(
                    f"invalid fixed pair ({coordinate}, {bit}) for n={self.n}",
                    "SubCube",
                )
        object.__setattr__(self, "fixed", pattern)

    @classmethod
    def from_assignment(cls, n: int, assignment: Assignment) -> "SubCube":
        return cls(n, tuple(assignment.items()))

    @property
    def codimension(self) -> int:
        return len(self.fixed)

    @property
    def size(self) -> int:
        return 1 << (self.n - self.codimension)

    @property
    def coordinates(self) -> Tuple[int, ...]:
        return tuple(c for c, _ in self.fixed)

    @property
    def pattern(self) -> Tuple[int, ...]:
        return tuple(b for _, b in self.fixed)

    @property
    def mask(self) -> int:
        return sum(1 << (c - 1) for c in self.coordinates)

    @property
    def value(self) -> int:
        return sum(b << (c - 1) for c, b in self.fixed)

    def sort_key(self) -> Tuple[int, Tuple[int, ...], Tuple[int, ...]]:
        """Smaller codimension first, then lexicographic (T, z0)."""
        return self.codimension, self.coordinates, self.pattern

    def contains(self, vertex: int) -> bool:
        return vertex & self.mask == self.value

    def disjoint(self, other: "SubCube") -> bool:
        """Disjoint iff the cubes disagree on some commonly fixed coordinate."""
        mine = dict(self.fixed)
        return any(mine.get(c, b) != b for c, b in other.fixed)

    def lift(self, coordinate: int, bit: int) -> "SubCube":
        """Embed into Q_(n+1) by inserting a new coordinate fixed to ``bit``.

        Coordinates at or above ``coordinate`` shift up by one.
        """
        shifted = tuple((c + 1 if c >= coordinate else c, b) for c, b in self.fixed)
        return SubCube(self.n + 1, shifted + ((coordinate, bit),))

    def members(self) -> CubeSet:
        return subcube_members(self)

    def to_json(self) -> Dict[str, JSON]:
        return {"fixed": [[c, b] for c, b in self.fixed]}

    @classmethod
    def from_json(cls, n: int, data: Mapping[str, JSON]) -> "SubCube":
        try:
            pairs = tuple((int(c), int(b)) for c, b in data["fixed"])  # type: ignore
        except (KeyError, TypeError, ValueError) as e:
            raise SetFormatError(
                f"malformed subcube {data!r}: {e}", "SubCube.from_json"
            )
        return cls(n, pairs)

    def __repr__(self) -> str:
        fixed = ", ".join(f"x{c}={b}" for c, b in self.fixed)
        return f"SubCube(n={self.n}, {{{fixed}}})"


@dataclasses.dataclass(frozen=True)
class GeneratorSpec:
    """Parameters of a reproducible random set.

    Arguments
    ---------
    kind : str
        One of ``cube-union``, ``noisy-cube``, ``density-random``,
        ``harper-segment``.
    n : int
        The dimension.
    cubes : int, optional
        Number of planted cubes (``cube-union``; ``noisy-cube`` plants one).
    noise : float
        Probability of flipping each vertex (``cube-union``, ``noisy-cube``).
    density : float, optional
        Membership probability (``density-random``).
    count : int, optional
        Segment length (``harper-segment``).
    seed : int
        Seed of the 64-bit generator.
    planted : Sequence[SubCube], optional
        Explicit cubes to use instead of random placement.
    """

    kind: str
    n: int
    cubes: Optional[int] = None
    noise: float = 0.0
    density: Optional[float] = None
    count: Optional[int] = None
    seed: int = 0
    planted: Optional[Tuple[SubCube, ...]] = None

    KINDS = ("cube-union", "noisy-cube", "density-random", "harper-segment")

    def validate(self) -> None:
        """Check that exactly the parameters the kind needs are present."""
        source = "GeneratorSpec"
        if self.kind not in self.KINDS:
            raise InputError(f"unknown generator kind {self.kind!r}", source)
        _check_dimension(self.n, source)
        if not 0 <= self.seed < 1 << 64:
            raise InputError(f"seed {self.seed} is not a 64-bit integer", source)
        if not 0.0 <= self.noise <= 1.0:
            raise InputError(f"noise rate {self.noise} outside [0, 1]", source)

        union = self.kind in ("cube-union", "noisy-cube")
        needs = {
            "cubes": self.kind == "cube-union" and self.planted is None,
            "density": self.kind == "density-random",
            "count": self.kind == "harper-segment",
        }
        for name, required in needs.items():
            present = getattr(self, name) is not None
            if required and not present:
                raise InputError(f"{self.kind} requires {name}", source)
            if present and not required and not (name == "cubes" and union):
                raise InputError(f"{self.kind} does not take {name}", source)
        if self.noise and not union:
            raise InputError(f"{self.kind} does not take a noise rate", source)
        if self.planted is not None and not union:
            raise InputError(f"{self.kind} does not take planted cubes", source)
        if self.density is not None and not 0.0 <= self.density <= 1.0:
            raise InputError(f"density {self.density} outside [0, 1]", source)
        if self.cubes is not None and self.cubes < 0:
            raise InputError(f"negative cube count {self.cubes}", source)


def make_set(n: int, vertices: Sequence[int]) -> CubeSet:
    """Build a set from vertex indices; duplicates are allowed.

    Example Usage
    -------------
    >>> make_set(3, [0, 3])
    CubeSet(n=3, vertices=[0, 3])
    """
    _check_dimension(n, "make_set")
    members = np.zeros(1 << n, dtype=bool)
    for vertex in vertices:
        if not 0 <= vertex < 1 << n:
            raise InputError(
                f"vertex index {vertex} outside [0, {1 << n}) for n={n}", "make_set"
            )
        members[vertex] = True
    return CubeSet(n, members)


def subcube_members(cube: SubCube) -> CubeSet:
    index = np.arange(1 << cube.n)
    return CubeSet(cube.n, (index & cube.mask) == cube.value)


def harper_segment(n: int, m: int) -> CubeSet:
    """The initial segment ``{0, ..., m - 1}`` of the binary ordering."""
    _check_dimension(n, "harper_segment")
    if not 0 <= m <= 1 << n:
        raise InputError(f"segment length {m} outside [0, {1 << n}]", "harper_segment")
    return CubeSet(n, np.arange(1 << n) < m)


def is_subcube(a: CubeSet) -> Optional[SubCube]:
    """Return the subcube equal to ``a``, or None if ``a`` is not a subcube."""
    if a.is_empty:
        return None
    vertices = a.vertices()
    fixed = []
    for k in range(a.n):
        ones = int(np.count_nonzero((vertices >> k) & 1))
        if ones == 0:
            fixed.append((k + 1, 0))
        elif ones == a.size:
            fixed.append((k + 1, 1))
    if a.size != 1 << (a.n - len(fixed)):
        return None
    return SubCube(a.n, tuple(fixed))


def section(a: CubeSet, i_coords: Coordinates, y: Assignment) -> CubeSet:
    """The y-section of ``a``: points z of {0,1}^I with y∘z in ``a``.

    The result is indexed by the coordinates of I in ascending order.
    """
    i_set = _check_coordinates(a.n, i_coords, "section")
    if i_set & set(y):
        raise InputError(
            f"section coordinates {sorted(i_set & set(y))} are also assigned",
            "section",
        )
    if i_set | set(y) != set(range(1, a.n + 1)):
        raise InputError("I and the domain of y must cover [n]", "section")
    for coordinate, bit in y.items():
        if bit not in (0, 1):
            raise InputError(f"y assigns {bit!r} to x{coordinate}", "section")
    index = tuple(
        slice(None) if k in i_set else y[k] for k in range(1, a.n + 1)
    )
    return CubeSet.from_grid(np.asarray(a.grid[index]))


def fibre_table(a: CubeSet, i_coords: Coordinates) -> np.ndarray:
    """All I-sections of ``a`` at once.

    Row ``y`` is the membership table of the section over the assignment
    encoded by ``y`` (the k-th coordinate of J in ascending order is bit k),
    and the columns use the same convention for the coordinates of I.
    """
    i_sorted = sorted(_check_coordinates(a.n, i_coords, "fibre_table"))
    j_sorted = complement_coordinates(a.n, i_sorted)
    order = [j - 1 for j in reversed(j_sorted)] + [i - 1 for i in reversed(i_sorted)]
    return np.transpose(a.grid, order).reshape(1 << len(j_sorted), 1 << len(i_sorted))


def complement_coordinates(n: int, coords: Coordinates) -> List[int]:
    chosen = set(coords)
    return [k for k in range(1, n + 1) if k not in chosen]


def encode_assignment(coords: Coordinates, assignment: Assignment) -> int:
    """Encode a point of {0,1}^coords; the k-th coordinate (ascending) is bit k."""
    return sum(assignment[c] << k for k, c in enumerate(sorted(coords)))


def decode_assignment(coords: Coordinates, index: int) -> Dict[int, int]:
    return {c: (index >> k) & 1 for k, c in enumerate(sorted(coords))}


def all_subsets(n: int) -> Iterator[CubeSet]:
    """Every subset of Q_n, ordered by the integer whose bit v marks vertex v."""
    if n > ENUMERATION_MAX_DIMENSION:
        raise CapabilityError(
            f"cannot enumerate all subsets of Q_{n}; "
            f"exhaustive mode is limited to n <= {ENUMERATION_MAX_DIMENSION}",
            "all_subsets",
        )
    _check_dimension(n, "all_subsets")
    table = subset_table(n)
    for row in table:
        yield CubeSet(n, row)


def subset_table(n: int) -> np.ndarray:
    """A ``(2**2**n, 2**n)`` boolean matrix; row s is the subset encoded by s."""
    masks = np.arange(1 << (1 << n), dtype=np.int64)
    return ((masks[:, None] >> np.arange(1 << n)) & 1).astype(bool)


def all_subcubes(n: int) -> Iterator[SubCube]:
    """Every one of the 3**n subcubes of Q_n."""
    for choice in itertools.product((None, 0, 1), repeat=n):
        fixed = tuple((k + 1, b) for k, b in enumerate(choice) if b is not None)
        yield SubCube(n, fixed)


def union_of(n: int, cubes: Sequence[SubCube]) -> CubeSet:
    index = np.arange(1 << n)
    members = np.zeros(1 << n, dtype=bool)
    for cube in cubes:
        members |= (index & cube.mask) == cube.value
    return CubeSet(n, members)


def generate(
    spec: GeneratorSpec, options: Optional[Options] = None
) -> Tuple[CubeSet, List[SubCube]]:
    """Generate a set (and any planted cubes) deterministically from ``spec``.

    Raises
    ------
    GenerationError
        If disjoint cube placement exhausts the retry budget.
    """
    options = options or {}
    spec.validate()
    rng = np.random.default_rng(spec.seed)

    if spec.kind == "harper-segment":
        return harper_segment(spec.n, spec.count), []  # type: ignore [arg-type]

    if spec.kind == "density-random":
        return CubeSet(spec.n, rng.random(1 << spec.n) < spec.density), []

    if spec.planted is not None:
        planted = list(spec.planted)
        for first, second in itertools.combinations(planted, 2):
            if not first.disjoint(second):
                raise InputError(
                    f"planted cubes {first} and {second} overlap", "generate"
                )
    else:
        count = 1 if spec.kind == "noisy-cube" and spec.cubes is None else spec.cubes
        planted = _place_disjoint_cubes(spec.n, count or 0, rng, options)

    union = union_of(spec.n, planted)
    flips = rng.random(1 << spec.n) < spec.noise
    return CubeSet(spec.n, union.members ^ flips), planted


def _place_disjoint_cubes(
    n: int, count: int, rng: np.random.Generator, options: Options
) -> List[SubCube]:
    budget = RETRY_BUDGET(options)
    low = min(max(MIN_CODIMENSION(options), 0), n)
    high = MAX_CODIMENSION(options)
    high = min(n, n // 2 if high is None else high)
    high = max(high, low)

    placed: List[SubCube] = []
    for _ in range(count):
        for attempt in range(budget):
            t = int(rng.integers(low, high + 1))
            coords = np.sort(rng.choice(n, size=t, replace=False)) + 1
            bits = rng.integers(0, 2, size=t)
            candidate = SubCube(n, tuple(zip(coords.tolist(), bits.tolist())))
            if all(candidate.disjoint(cube) for cube in placed):
                placed.append(candidate)
                break
            logging.DEBUG(
                __name__,
                f"cube {len(placed) + 1}: placement attempt {attempt + 1} overlapped",
                options,
            )
        else:
            raise GenerationError(
                f"could not place cube {len(placed) + 1} of {count} disjointly "
                f"after {budget} attempts",
                "generate",
            )
    return placed


def set_to_json(a: CubeSet) -> Dict[str, JSON]:
    return {
        "n": a.n,
        "vertices": a.vertices().tolist(),
        "bits_hex": a.to_bits_hex(),
    }


def set_from_json(data: Mapping[str, JSON]) -> CubeSet:
    """Decode the set file format; ``vertices`` wins when both encodings agree."""
    source = "set_from_json"
    n = data.get("n")
    if not isinstance(n, int) or isinstance(n, bool):
        raise SetFormatError("set file needs an integer 'n'", source)
    from_vertices = from_bits = None
    if "vertices" in data:
        vertices = data["vertices"]
        if not isinstance(vertices, list) or not all(
            isinstance(v, int) and not isinstance(v, bool) for v in vertices
        ):
            raise SetFormatError("'vertices' must be a list of integers", source)
        from_vertices = make_set(n, vertices)  # type: ignore [arg-type]
    if "bits_hex" in data:
        if not isinstance(data["bits_hex"], str):
            raise SetFormatError("'bits_hex' must be a string", source)
        from_bits = CubeSet.from_bits_hex(n, data["bits_hex"])
    if from_vertices is None and from_bits is None:
        raise SetFormatError("set file needs 'vertices' or 'bits_hex'", source)
    both = from_vertices is not None and from_bits is not None
    if both and from_vertices != from_bits:
        raise SetFormatError(
            "'vertices' and 'bits_hex' describe different sets", source
        )
    return from_vertices if from_vertices is not None else from_bits  # type: ignore


def load_set(path: Union[str, pathlib.Path]) -> CubeSet:
    """Read a set file; ``-`` reads standard input."""
    return set_from_json(read_json(path, "load_set"))  # type: ignore [arg-type]


def dump_set(a: CubeSet, path: Union[str, pathlib.Path]) -> None:
    """Write a set file; ``-`` writes standard output."""
    write_text(path, json.dumps(set_to_json(a)) + "\n", "dump_set")


def read_json(path: Union[str, pathlib.Path], source: str) -> JSON:
    try:
        text = sys.stdin.read() if str(path) == "-" else pathlib.Path(path).read_text()
        return json.loads(text)
    except OSError as e:
        raise InputError(f"cannot read {path}: {e}", source)
    except json.JSONDecodeError as e:
        raise SetFormatError(f"{path} is not valid JSON: {e}", source)


def write_text(path: Union[str, pathlib.Path], text: str, source: str) -> None:
    try:
        if str(path) == "-":
            sys.stdout.write(text)
        else:
            pathlib.Path(path).write_text(text)
    except OSError as e:
        raise InputError(f"cannot write {path}: {e}", source)


def _check_dimension(n: int, source: str) -> None:
    if not isinstance(n, (int, np.integer)) or not 0 <= n <= MAX_DIMENSION:
        raise InputError(f"dimension {n!r} outside [0, {MAX_DIMENSION}]", source)


def _check_coordinates(n: int, coords: Coordinates, source: str) -> set:
    chosen = set(int(c) for c in coords)
    if len(chosen) != len(list(coords)):
        raise InputError(f"repeated coordinate in {list(coords)}", source)
    bad = sorted(c for c in chosen if not 1 <= c <= n)
    if bad:
        raise InputError(f"coordinates {bad} outside [1, {n}]", source)
    return chosen
