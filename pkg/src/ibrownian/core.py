"""Shared state types for interacting-particle computations.

The package works with three views of the same data:

* ``Configuration`` -- an unordered finite point multiset in R^d,
* ``LabeledState``  -- the same points with a deterministic ordering attached,
* CSV files         -- one row per point, columns ``x[,y[,z]]``, header mandatory.

Orderings are value-ascending (1d only) or modulus-ascending (any dimension,
ties broken by lexicographic coordinate order, then input position).  Every
stochastic routine takes an ``RngStream`` so that draws depend only on
``(seed, stream_id)`` and never on evaluation order or worker count.
"""

from __future__ import annotations

import enum
import io
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "Family",
    "LabelScheme",
    "ModelSpec",
    "Configuration",
    "LabeledState",
    "RngStream",
    "SingularConfigurationError",
    "DomainError",
    "StepFailureError",
    "label",
    "delabel",
    "save_configurations",
    "load_configurations",
]


class SingularConfigurationError(ValueError):
    """Two points closer than the minimum resolvable separation."""


class DomainError(ValueError):
    """A coordinate violates the state space of the model (e.g. x <= 0)."""


class StepFailureError(RuntimeError):
    """Integrator could not complete a step within its substep budget."""


class Family(str, enum.Enum):
    """Supported particle families."""

    AIRY = "airy"
    GINIBRE = "ginibre"
    BESSEL = "bessel"
    SQUARE_BESSEL = "square_bessel"
    SQRT_SQUARE_BESSEL = "sqrt_square_bessel"
    LENNARD_JONES = "lennard_jones"
    RIESZ = "riesz"


_BESSEL_FAMILIES = frozenset(
    {Family.BESSEL, Family.SQUARE_BESSEL, Family.SQRT_SQUARE_BESSEL}
)
_FAMILY_DIMENSION = {
    Family.AIRY: 1,
    Family.GINIBRE: 2,
    Family.BESSEL: 1,
    Family.SQUARE_BESSEL: 1,
    Family.SQRT_SQUARE_BESSEL: 1,
    Family.LENNARD_JONES: 3,
    Family.RIESZ: 3,
}


class LabelScheme(str, enum.Enum):
    ASCENDING_VALUE = "ascending_value"
    ASCENDING_MODULUS = "ascending_modulus"


@dataclass(frozen=True)
class ModelSpec:
    """Immutable description of one finite particle system.

    ``alpha`` is required for the Bessel-type families (and must be >= 1),
    ``riesz_a`` only for the Riesz family (an integer exceeding the ambient
    dimension 3).  ``free_c``/``free_theta`` parameterize the confining
    potential c*|x|^2 / n^theta used by the Lennard-Jones and Riesz systems.
    ``beta`` must be positive; matrix-kernel validation additionally needs
    beta in {1, 2, 4} and the Ginibre family is intrinsically beta = 2.
    """

    family: Family
    n_particles: int
    beta: float = 2.0
    alpha: float | None = None
    riesz_a: int | None = None
    free_c: float = 0.5
    free_theta: float = 1.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "family", Family(self.family))
        if self.n_particles < 1:
            raise ValueError("n_particles must be >= 1")
        if not (self.beta > 0):
            raise ValueError("beta must be > 0")
        if self.family is Family.GINIBRE and self.beta != 2:
            raise ValueError("the Ginibre system is defined for beta = 2 only")
        if self.family in _BESSEL_FAMILIES:
            if self.alpha is None:
                raise ValueError(f"alpha is required for family {self.family.value}")
            if not (self.alpha >= 1):
                raise ValueError("alpha must be >= 1")
        elif self.alpha is not None:
            raise ValueError(f"alpha is not a parameter of family {self.family.value}")
        if self.family is Family.RIESZ:
            if self.riesz_a is None:
                raise ValueError("riesz_a is required for the Riesz family")
            if int(self.riesz_a) != self.riesz_a or self.riesz_a <= self.dimension:
                raise ValueError("riesz_a must be an integer > 3")
        elif self.riesz_a is not None:
            raise ValueError("riesz_a only applies to the Riesz family")
        if self.free_theta < 0:
            raise ValueError("free_theta must be >= 0")

    @property
    def dimension(self) -> int:
        return _FAMILY_DIMENSION[self.family]

    @property
    def nonnegative_domain(self) -> bool:
        """True when the state space is [0, inf) per coordinate."""
        return self.family in _BESSEL_FAMILIES


def _as_points(points, dimension: int | None = None) -> np.ndarray:
    arr = np.asarray(points, dtype=float)
    if arr.size == 0:
        arr = arr.reshape(0, dimension or 1)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2:
        raise ValueError("points must be a (n,) or (n, d) array")
    if dimension is not None and arr.shape[1] != dimension:
        raise ValueError(f"expected dimension {dimension}, got {arr.shape[1]}")
    if arr.shape[1] not in (1, 2, 3):
        raise ValueError("only dimensions 1, 2, 3 are supported")
    if not np.all(np.isfinite(arr)):
        raise ValueError("points must be finite")
    return arr


@dataclass(frozen=True, eq=False)
class Configuration:
    """Finite unordered point multiset.  ``points`` has shape (n, d)."""

    points: np.ndarray

    def __init__(self, points, dimension: int | None = None):
        arr = _as_points(points, dimension)
        arr.setflags(write=False)
        object.__setattr__(self, "points", arr)

    def __len__(self) -> int:
        return self.points.shape[0]

    @property
    def dimension(self) -> int:
        return self.points.shape[1]

    def moduli(self) -> np.ndarray:
        return np.sqrt(np.sum(self.points**2, axis=1))

    def same_multiset(self, other: "Configuration", tol: float = 0.0) -> bool:
        """Multiset equality, insensitive to point order."""
        if len(self) != len(other) or self.dimension != other.dimension:
            return False
        a = _canonical_order(self.points)
        b = _canonical_order(other.points)
        return bool(np.allclose(a, b, rtol=0.0, atol=tol))


@dataclass(frozen=True, eq=False)
class LabeledState:
    """Ordered view of a configuration under a fixed label scheme."""

    points: np.ndarray
    scheme: LabelScheme

    def __init__(self, points, scheme: LabelScheme, dimension: int | None = None):
        arr = _as_points(points, dimension)
        arr.setflags(write=False)
        object.__setattr__(self, "points", arr)
        object.__setattr__(self, "scheme", LabelScheme(scheme))

    def __len__(self) -> int:
        return self.points.shape[0]

    @property
    def dimension(self) -> int:
        return self.points.shape[1]


def _canonical_order(arr: np.ndarray) -> np.ndarray:
    """Sort rows lexicographically (for multiset comparison)."""
    if arr.shape[0] == 0:
        return arr
    keys = tuple(arr[:, j] for j in range(arr.shape[1] - 1, -1, -1))
    return arr[np.lexsort(keys)]


def label(config: Configuration, scheme: LabelScheme) -> LabeledState:
    """Order a configuration deterministically.

    ``ASCENDING_VALUE`` sorts 1d points by value.  ``ASCENDING_MODULUS``
    sorts by |x|, breaking ties by lexicographic coordinate order and then
    by input position, so the result is unique for any input ordering of
    equal points.
    """
    scheme = LabelScheme(scheme)
    pts = config.points
    n = pts.shape[0]
    if n == 0:
        return LabeledState(pts, scheme, dimension=pts.shape[1])
    if scheme is LabelScheme.ASCENDING_VALUE:
        if pts.shape[1] != 1:
            raise ValueError("value-ascending labels are defined for 1d points only")
        order = np.lexsort((np.arange(n), pts[:, 0]))
    else:
        moduli = np.sqrt(np.sum(pts**2, axis=1))
        coord_keys = tuple(pts[:, j] for j in range(pts.shape[1] - 1, -1, -1))
        order = np.lexsort((np.arange(n),) + coord_keys + (moduli,))
    return LabeledState(pts[order], scheme)


def delabel(state: LabeledState) -> Configuration:
    """Forget the ordering; inverse of ``label`` on multisets."""
    return Configuration(state.points)


@dataclass(frozen=True)
class RngStream:
    """Deterministic random stream keyed by (seed, stream_id).

    Two streams with different ids are statistically independent; the same
    key always reproduces the same draws regardless of thread or call order.
    ``generator(*subkeys)`` derives further independent child streams (used
    e.g. per path and per recording interval by the integrator).
    """

    seed: int
    stream_id: int = 0

    def generator(self, *subkeys: int) -> np.random.Generator:
        ss = np.random.SeedSequence(
            entropy=int(self.seed), spawn_key=(int(self.stream_id), *map(int, subkeys))
        )
        return np.random.default_rng(ss)

    def child(self, *subkeys: int) -> "RngStream":
        """Stream addressing a sub-computation; flattened into spawn keys."""
        return _ChildStream(self.seed, self.stream_id, tuple(map(int, subkeys)))


@dataclass(frozen=True)
class _ChildStream(RngStream):
    subkeys: tuple[int, ...] = field(default_factory=tuple)

    def __init__(self, seed: int, stream_id: int, subkeys: tuple[int, ...]):
        object.__setattr__(self, "seed", seed)
        object.__setattr__(self, "stream_id", stream_id)
        object.__setattr__(self, "subkeys", subkeys)

    def generator(self, *subkeys: int) -> np.random.Generator:
        ss = np.random.SeedSequence(
            entropy=int(self.seed),
            spawn_key=(int(self.stream_id), *self.subkeys, *map(int, subkeys)),
        )
        return np.random.default_rng(ss)

    def child(self, *subkeys: int) -> "RngStream":
        return _ChildStream(
            self.seed, self.stream_id, self.subkeys + tuple(map(int, subkeys))
        )


_HEADERS = {1: ["x"], 2: ["x", "y"], 3: ["x", "y", "z"]}


def _write_block(buf: io.StringIO, config: Configuration) -> None:
    buf.write(",".join(_HEADERS[config.dimension]))
    buf.write("\n")
    for row in config.points:
        buf.write(",".join(f"{v:.17g}" for v in row))
        buf.write("\n")


def save_configurations(path, configs) -> None:
    """Write configurations as CSV blocks separated by blank lines.

    Each block carries its own mandatory header line (``x``, ``x,y`` or
    ``x,y,z``).  A single configuration produces a plain one-block CSV.
    """
    configs = list(configs)
    buf = io.StringIO()
    for k, config in enumerate(configs):
        if k:
            buf.write("\n")
        _write_block(buf, config)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(buf.getvalue())


def load_configurations(path) -> list[Configuration]:
    """Read one or more blank-line-separated configuration CSV blocks."""
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    configs: list[Configuration] = []
    for block in text.split("\n\n"):
        lines = [ln.strip() for ln in block.strip().splitlines() if ln.strip()]
        if not lines:
            continue
        header = [c.strip() for c in lines[0].split(",")]
        dim = len(header)
        if dim not in _HEADERS or header != _HEADERS[dim]:
            raise ValueError(f"bad configuration header: {lines[0]!r}")
        rows = [[float(v) for v in ln.split(",")] for ln in lines[1:]]
        arr = np.array(rows, dtype=float).reshape(len(rows), dim)
        configs.append(Configuration(arr, dimension=dim))
    return configs
