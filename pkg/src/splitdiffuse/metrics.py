"""Topology-preservation error of a grid assignment.

Every unordered pair of points contributes one constraint per dimension. A
type-I constraint holds when the sign of the coordinate difference equals the
sign of the grid-index difference; a type-II constraint holds unless the two
signs are strictly opposite.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from math import comb

import numpy as np

from . import _kernels
from .core import GridAssignment, PointCloud, ValidationError


@dataclass(frozen=True)
class ErrorReport:
    n: int
    k: int
    violations_1: tuple
    violations_2: tuple

    @property
    def pairs(self) -> int:
        return comb(self.n, 2)

    @property
    def total_constraints(self) -> int:
        return self.pairs * self.k

    @property
    def satisfied_1(self) -> tuple:
        return tuple(self.pairs - v for v in self.violations_1)

    @property
    def satisfied_2(self) -> tuple:
        return tuple(self.pairs - v for v in self.violations_2)

    def _ratio(self, count, denom):
        return count / denom if denom else 0.0

    @property
    def err_1(self) -> float:
        return self._ratio(sum(self.violations_1), self.total_constraints)

    @property
    def err_2(self) -> float:
        return self._ratio(sum(self.violations_2), self.total_constraints)

    @property
    def err_1_exact(self) -> Fraction:
        return Fraction(sum(self.violations_1), self.total_constraints or 1)

    @property
    def err_1_per_dim(self) -> tuple:
        return tuple(self._ratio(v, self.pairs) for v in self.violations_1)

    @property
    def err_2_per_dim(self) -> tuple:
        return tuple(self._ratio(v, self.pairs) for v in self.violations_2)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "k": self.k,
            "total_constraints": self.total_constraints,
            "violations_1": list(self.violations_1),
            "violations_2": list(self.violations_2),
            "satisfied_1": list(self.satisfied_1),
            "err_1": self.err_1,
            "err_2": self.err_2,
            "err_1_per_dim": list(self.err_1_per_dim),
            "err_2_per_dim": list(self.err_2_per_dim),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def count_violations(coords, cells, backend: str | None = None) -> ErrorReport:
    """Array-level evaluation; ``coords`` (n, k) float, ``cells`` (n, k) int."""
    coords = np.ascontiguousarray(coords, dtype=np.float64)
    cells = np.ascontiguousarray(cells, dtype=np.int64)
    if coords.shape != cells.shape:
        raise ValidationError(f"coords {coords.shape} and cells {cells.shape} differ in shape")
    impl = _kernels if backend is None else _kernels.backend(backend)
    v1, v2 = impl.pair_violations(coords, cells)
    n, k = coords.shape
    return ErrorReport(n, k, tuple(int(v) for v in v1), tuple(int(v) for v in v2))


def evaluate(cloud: PointCloud, assignment: GridAssignment) -> ErrorReport:
    if set(cloud.ids) != set(assignment.ids) or len(cloud.ids) != len(assignment.ids):
        raise ValidationError("assignment ids do not match the point cloud ids")
    if cloud.k != assignment.k:
        raise ValidationError(f"cloud is {cloud.k}-d but assignment is {assignment.k}-d")
    if assignment.ids != cloud.ids:
        assignment = assignment.reordered(cloud.ids)
    return count_violations(cloud.coords, assignment.cells)


def check_bound(report: ErrorReport, k: int | None = None) -> bool:
    """True iff err_1 <= (k-1)/k, compared exactly on integer counts."""
    k = report.k if k is None else k
    return sum(report.violations_1) * k <= (k - 1) * report.total_constraints


def violated_pairs(coords, cells, kind: int = 1) -> np.ndarray:
    """Rows (i, j, dim) with i < j for every violated constraint of ``kind``."""
    coords = np.asarray(coords, dtype=np.float64)
    cells = np.asarray(cells, dtype=np.int64)
    n, k = coords.shape
    i, j = np.triu_indices(n, 1)
    out = []
    for l in range(k):
        dp = np.sign(coords[j, l] - coords[i, l])
        ds = np.sign(cells[j, l] - cells[i, l])
        bad = dp != ds if kind == 1 else dp * ds < 0
        out.append(np.column_stack([i[bad], j[bad], np.full(bad.sum(), l)]))
    return np.concatenate(out).astype(np.int64) if out else np.empty((0, 3), np.int64)
