"""Split-diffuse placement of k-dimensional points onto an integer grid."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Hashable, Sequence

import numpy as np

from . import _kernels


class ValidationError(ValueError):
    """Invalid input to a placement or evaluation call."""


class DimensionMismatchError(ValidationError):
    pass


class LayoutMismatchError(ValidationError):
    pass


class NonFiniteCoordinateError(ValidationError):
    pass


class DuplicateIdError(ValidationError):
    pass


@dataclass(frozen=True, eq=False)
class PointCloud:
    """Ordered points with unique ids. ``coords`` has shape (n, k)."""

    ids: tuple
    coords: np.ndarray

    def __post_init__(self):
        coords = np.array(self.coords, dtype=np.float64, copy=True)
        if coords.ndim == 1:
            coords = coords[:, None]
        if coords.ndim != 2 or coords.shape[1] < 1:
            raise DimensionMismatchError(f"coords must be (n, k) with k >= 1, got shape {coords.shape}")
        ids = tuple(self.ids)
        if len(ids) != coords.shape[0]:
            raise DimensionMismatchError(f"{len(ids)} ids for {coords.shape[0]} points")
        if len(set(ids)) != len(ids):
            raise DuplicateIdError("point ids must be unique")
        bad = np.flatnonzero(~np.isfinite(coords).all(axis=1))
        if bad.size:
            raise NonFiniteCoordinateError(f"non-finite coordinate for point {ids[bad[0]]!r} (row {bad[0]})")
        coords.setflags(write=False)
        object.__setattr__(self, "ids", ids)
        object.__setattr__(self, "coords", coords)

    @classmethod
    def from_array(cls, coords, ids: Sequence[Hashable] | None = None) -> "PointCloud":
        coords = np.asarray(coords, dtype=np.float64)
        if coords.ndim == 1:
            coords = coords[:, None]
        if ids is None:
            ids = range(coords.shape[0])
        return cls(tuple(ids), coords)

    @property
    def n(self) -> int:
        return self.coords.shape[0]

    @property
    def k(self) -> int:
        return self.coords.shape[1]

    def __len__(self):
        return self.n

    def __eq__(self, other):
        if not isinstance(other, PointCloud):
            return NotImplemented
        return self.ids == other.ids and np.array_equal(self.coords, other.coords)


@dataclass(frozen=True, eq=False)
class GridAssignment:
    """Map from point id to integer grid cell, for a layout of given extents."""

    ids: tuple
    cells: np.ndarray
    extents: tuple

    def __post_init__(self):
        cells = np.array(self.cells, dtype=np.int64, copy=True)
        if cells.ndim == 1:
            cells = cells[:, None]
        cells.setflags(write=False)
        object.__setattr__(self, "ids", tuple(self.ids))
        object.__setattr__(self, "cells", cells)
        object.__setattr__(self, "extents", tuple(int(e) for e in self.extents))

    @property
    def k(self) -> int:
        return len(self.extents)

    def __getitem__(self, point_id) -> tuple:
        return tuple(int(v) for v in self.cells[self.ids.index(point_id)])

    def as_dict(self) -> dict:
        return {pid: tuple(int(v) for v in row) for pid, row in zip(self.ids, self.cells)}

    def is_bijective(self) -> bool:
        ext = np.asarray(self.extents)
        if self.cells.shape != (len(self.ids), len(ext)) or len(self.ids) != math.prod(self.extents):
            return False
        if ((self.cells < 0) | (self.cells >= ext)).any():
            return False
        flat = np.ravel_multi_index(self.cells.T, self.extents) if len(self.ids) else np.empty(0, int)
        return np.unique(flat).size == flat.size

    def reordered(self, ids: Sequence) -> "GridAssignment":
        pos = {pid: i for i, pid in enumerate(self.ids)}
        return GridAssignment(tuple(ids), self.cells[[pos[p] for p in ids]], self.extents)

    def __eq__(self, other):
        if not isinstance(other, GridAssignment):
            return NotImplemented
        return self.extents == other.extents and self.as_dict() == other.as_dict()


@dataclass(frozen=True)
class SplitStrategy:
    """How the split dimension is chosen at each recursion node.

    ``tie_break`` lists dimensions from most to least preferred and defaults
    to last-dimension-first (y before x in 2-D). ``start_dimension`` applies
    to iterative mode and defaults to the last dimension.
    """

    mode: str = "greedy"
    tie_break: tuple | None = None
    start_dimension: int | None = None

    def __post_init__(self):
        if self.mode not in ("greedy", "iterative"):
            raise ValidationError(f"unknown split mode {self.mode!r}")
        if self.tie_break is not None:
            object.__setattr__(self, "tie_break", tuple(int(d) for d in self.tie_break))

    def preference(self, k: int) -> np.ndarray:
        if self.tie_break is None:
            return np.arange(k - 1, -1, -1, dtype=np.int64)
        prefs = np.asarray(self.tie_break, dtype=np.int64)
        if sorted(prefs.tolist()) != list(range(k)):
            raise ValidationError(f"tie_break {self.tie_break} is not a permutation of range({k})")
        return prefs

    def start(self, k: int) -> int:
        s = k - 1 if self.start_dimension is None else int(self.start_dimension)
        if not 0 <= s < k:
            raise ValidationError(f"start_dimension {s} out of range for k={k}")
        return s

    def mode_code(self) -> int:
        return _kernels.GREEDY if self.mode == "greedy" else _kernels.ITERATIVE


GREEDY = SplitStrategy("greedy")
ITERATIVE = SplitStrategy("iterative")


def choose_split_dimension(remaining: Sequence[int], strategy: SplitStrategy = GREEDY, depth: int = 0) -> int:
    g = np.asarray(remaining, dtype=np.int64)
    if (g <= 1).all():
        raise ValidationError("no splittable dimension: all remaining extents are 1")
    k = len(g)
    return int(
        _kernels.numpy_impl.choose_dimension(
            g, strategy.mode_code(), strategy.preference(k), strategy.start(k), depth
        )
    )


def sort_key(point: Sequence[float], dimension: int, position: int = 0) -> tuple:
    """Total-order key used when sorting points along ``dimension``.

    Coordinate in ``dimension`` first, then the other coordinates in
    ascending dimension order, then the input position.
    """
    if not 0 <= dimension < len(point):
        raise ValidationError(f"dimension {dimension} out of range for a {len(point)}-d point")
    rest = tuple(point[d] for d in range(len(point)) if d != dimension)
    return (point[dimension],) + rest + (position,)


def dimension_ranks(coords: np.ndarray) -> np.ndarray:
    """Rank of every point along every dimension under :func:`sort_key`.

    Returns a (k, n) int64 array; each row is a permutation of ``range(n)``.
    """
    coords = np.asarray(coords, dtype=np.float64)
    n, k = coords.shape
    ranks = np.empty((k, n), dtype=np.int64)
    pos = np.arange(n)
    for d in range(k):
        others = [coords[:, o] for o in range(k) if o != d]
        # lexsort: last key is primary
        order = np.lexsort([pos] + others[::-1] + [coords[:, d]])
        ranks[d, order] = pos
    return ranks


def validate_layout(extents: Sequence[int], n: int, k: int) -> tuple:
    ext = tuple(int(e) for e in extents)
    if len(ext) != k:
        raise DimensionMismatchError(f"layout has {len(ext)} dimensions but points have {k}")
    if any(e < 1 for e in ext):
        raise LayoutMismatchError(f"layout extents must be >= 1, got {ext}")
    if math.prod(ext) != n:
        raise LayoutMismatchError(f"layout {'x'.join(map(str, ext))} has {math.prod(ext)} cells for {n} points")
    return ext


def place(coords: np.ndarray, extents: Sequence[int], strategy: SplitStrategy = GREEDY, backend: str | None = None) -> np.ndarray:
    """Array-level placement: (n, k) coordinates -> (n, k) int64 cells.

    Does not re-check finiteness; use :func:`split_diffuse` for validated input.
    """
    coords = np.asarray(coords, dtype=np.float64)
    n, k = coords.shape
    ext = validate_layout(extents, n, k)
    impl = _kernels if backend is None else _kernels.backend(backend)
    return impl.split_diffuse(
        dimension_ranks(coords),
        np.asarray(ext, dtype=np.int64),
        strategy.mode_code(),
        strategy.preference(k),
        strategy.start(k),
    )


def split_diffuse(cloud: PointCloud, layout: Sequence[int], strategy: SplitStrategy = GREEDY) -> GridAssignment:
    """Place ``cloud`` bijectively onto the grid ``layout``.

    Points are split recursively at the median of the chosen dimension; the
    lower ``floor(g_a/2)`` slab goes to the low-index half. Larger coordinates
    always map to larger or equal grid indices along the split dimension.
    """
    if not isinstance(cloud, PointCloud):
        cloud = PointCloud.from_array(cloud)
    cells = place(cloud.coords, layout, strategy)
    return GridAssignment(cloud.ids, cells, tuple(layout))


def suggest_layout(n: int, k: int = 2) -> tuple:
    """Most nearly cubic factorisation of ``n`` into ``k`` extents, largest last."""
    if n < 1 or k < 1:
        raise ValidationError("n and k must be positive")
    if k == 1:
        return (n,)
    best = None
    for a in range(1, int(round(n ** (1.0 / k))) + 2):
        if n % a:
            continue
        rest = suggest_layout(n // a, k - 1)
        cand = tuple(sorted((a,) + rest))
        score = max(cand) / min(cand)
        if best is None or score < best[0]:
            best = (score, cand)
    return best[1]


def max_depth(extents: Sequence[int]) -> int:
    return sum(math.ceil(math.log2(e)) for e in extents if e > 1)
