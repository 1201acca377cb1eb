"""Vitali and Hardy-Krause variation of functions tabulated on grids.

A :class:`GridFunction` holds values at every point of a rectangular grid
over ``[a, b]``. For tabulated data the Vitali supremum over rectangle
partitions is attained by the partition into minimal grid cells: merging
cells can only shrink the sum of absolute increments (triangle inequality).
Continuous functions are approached with :func:`refinement_ladder`, whose
values are nondecreasing lower bounds.
"""
from __future__ import annotations

import csv
import io
import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import InvalidArgumentError, ResourceLimitError

__all__ = [
    "GridFunction",
    "VariationReport",
    "LadderResult",
    "rect_increment",
    "vitali_variation",
    "face_restriction",
    "hk_variation",
    "refinement_ladder",
    "MAX_HK_DIM",
]

MAX_HK_DIM = 12


@dataclass(frozen=True, eq=False)
class GridFunction:
    axes: tuple[np.ndarray, ...]
    values: np.ndarray

    def __post_init__(self):
        axes = tuple(np.array(a, dtype=np.float64) for a in self.axes)
        values = np.array(self.values, dtype=np.float64)
        if not axes:
            raise InvalidArgumentError("grid needs at least one axis")
        for i, a in enumerate(axes):
            if a.ndim != 1 or a.size < 2:
                raise InvalidArgumentError(f"axis {i} needs at least 2 points")
            if np.any(np.diff(a) <= 0):
                raise InvalidArgumentError(f"axis {i} must be strictly increasing")
        if values.shape != tuple(a.size for a in axes):
            raise InvalidArgumentError(
                f"values shape {values.shape} does not match axes {tuple(a.size for a in axes)}"
            )
        object.__setattr__(self, "axes", axes)
        object.__setattr__(self, "values", values)

    @property
    def k(self) -> int:
        return len(self.axes)

    @classmethod
    def tabulate(cls, func: Callable, axes: Sequence[Sequence[float]]) -> "GridFunction":
        """Evaluate a vectorized ``func(*coords)`` on the product of ``axes``."""
        axes = [np.asarray(a, dtype=np.float64) for a in axes]
        mesh = np.meshgrid(*axes, indexing="ij")
        return cls(axes, np.broadcast_to(func(*mesh), mesh[0].shape))

    @classmethod
    def uniform(cls, func: Callable, lower, upper, points: int) -> "GridFunction":
        lower, upper = np.atleast_1d(lower), np.atleast_1d(upper)
        return cls.tabulate(func, [np.linspace(a, b, points) for a, b in zip(lower, upper)])

    @classmethod
    def from_csv(cls, text: str) -> "GridFunction":
        """Read long-format CSV: coordinate columns then a final value column.

        A header row is optional. Every grid point must appear exactly once.
        """
        rows = [r for r in csv.reader(io.StringIO(text)) if r and any(c.strip() for c in r)]
        if not rows:
            raise InvalidArgumentError("empty grid CSV")
        try:
            [float(c) for c in rows[0]]
        except ValueError:
            rows = rows[1:]
        try:
            data = np.array([[float(c) for c in r] for r in rows], dtype=np.float64)
        except ValueError as exc:
            raise InvalidArgumentError(f"malformed grid CSV: {exc}") from None
        if data.ndim != 2 or data.shape[1] < 2:
            raise InvalidArgumentError("grid CSV needs coordinate columns and a value column")
        coords, vals = data[:, :-1], data[:, -1]
        axes = [np.unique(coords[:, i]) for i in range(coords.shape[1])]
        shape = tuple(a.size for a in axes)
        if math.prod(shape) != len(vals):
            raise InvalidArgumentError("grid CSV does not cover a full rectangular grid")
        idx = tuple(np.searchsorted(a, coords[:, i]) for i, a in enumerate(axes))
        values = np.full(shape, np.nan)
        values[idx] = vals
        if np.isnan(values).any():
            raise InvalidArgumentError("grid CSV has duplicate or missing grid points")
        return cls(axes, values)

    def to_csv(self) -> str:
        names = ["x", "y", "z"][: self.k] if self.k <= 3 else [f"x{i + 1}" for i in range(self.k)]
        out = [",".join(names + ["value"])]
        for idx in itertools.product(*(range(a.size) for a in self.axes)):
            coords = [repr(float(self.axes[i][j])) for i, j in enumerate(idx)]
            out.append(",".join(coords + [repr(float(self.values[idx]))]))
        return "\n".join(out) + "\n"


@dataclass(frozen=True)
class VariationReport:
    vitali: float
    hk: float | None = None
    per_face: dict[tuple[int, ...], float] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "vitali": self.vitali,
            "hk": self.hk,
            "per_face": {",".join(str(i + 1) for i in face): v for face, v in self.per_face.items()},
        }


def _grid_index(axis: np.ndarray, value: float, dim: int) -> int:
    j = int(np.searchsorted(axis, value))
    if j >= axis.size or axis[j] != value:
        raise InvalidArgumentError(f"corner coordinate {value!r} is not on axis {dim}")
    return j


def rect_increment(f: GridFunction, lower, upper) -> float:
    """Alternating corner sum ``Delta_R f`` over the rectangle ``[lower, upper]``.

    Corners must be grid points with ``lower <= upper`` componentwise. A corner
    takes ``lower_i`` on the coordinates in ``I`` and ``upper_i`` elsewhere, with
    sign ``(-1)**|I|``.
    """
    lower, upper = np.atleast_1d(lower), np.atleast_1d(upper)
    if lower.size != f.k or upper.size != f.k:
        raise InvalidArgumentError(f"corners must have {f.k} coordinates")
    if np.any(lower > upper):
        raise InvalidArgumentError("rectangle corners must satisfy lower <= upper")
    lo = [_grid_index(a, c, i) for i, (a, c) in enumerate(zip(f.axes, lower))]
    hi = [_grid_index(a, d, i) for i, (a, d) in enumerate(zip(f.axes, upper))]
    terms = []
    for mask in itertools.product((False, True), repeat=f.k):
        idx = tuple(l if m else h for m, l, h in zip(mask, lo, hi))
        terms.append((-1) ** sum(mask) * f.values[idx])
    return math.fsum(terms)


def cell_increments(f: GridFunction) -> np.ndarray:
    """``Delta_R f`` for every minimal cell, as an array of shape ``n_i - 1``."""
    d = f.values
    for axis in range(f.k):
        d = np.diff(d, axis=axis)
    return d


def vitali_variation(f: GridFunction) -> float:
    return math.fsum(np.abs(cell_increments(f)).ravel().tolist())


def face_restriction(f: GridFunction, face) -> GridFunction:
    """Restrict ``f`` to the coordinates in ``face`` (0-based), pinning the rest to ``b_i``."""
    face = tuple(sorted(set(int(i) for i in face)))
    if not face:
        raise InvalidArgumentError("face index set must be nonempty")
    if face[0] < 0 or face[-1] >= f.k:
        raise InvalidArgumentError(f"face indices must lie in 0..{f.k - 1}")
    idx = tuple(slice(None) if i in face else -1 for i in range(f.k))
    return GridFunction([f.axes[i] for i in face], f.values[idx])


def hk_variation(f: GridFunction) -> VariationReport:
    """Hardy-Krause variation: the sum of Vitali variations over all nonempty faces."""
    if f.k > MAX_HK_DIM:
        raise ResourceLimitError(f"dimension {f.k} exceeds {MAX_HK_DIM} (2**k - 1 faces)")
    per_face = {}
    for size in range(1, f.k + 1):
        for face in itertools.combinations(range(f.k), size):
            per_face[face] = vitali_variation(face_restriction(f, face))
    full = tuple(range(f.k))
    return VariationReport(per_face[full], math.fsum(per_face.values()), per_face)


@dataclass(frozen=True)
class LadderResult:
    points: tuple[int, ...]
    vitali: tuple[float, ...]
    hk: tuple[float, ...] | None
    converged: bool

    @property
    def gap(self) -> float:
        seq = self.hk if self.hk is not None else self.vitali
        return seq[-1] - seq[-2] if len(seq) > 1 else math.inf


def refinement_ladder(func: Callable, lower, upper, levels=range(4, 10), rtol: float = 1e-3,
                      hk: bool = False) -> LadderResult:
    """Variation of a continuous ``func`` on uniform grids of ``2**j + 1`` points per axis.

    Dyadic grids are nested, so the sequence is nondecreasing. Stops once
    successive values differ by less than ``rtol`` relative.
    """
    pts, vit, hks = [], [], []
    converged = False
    for j in levels:
        g = GridFunction.uniform(func, lower, upper, 2**j + 1)
        if hk:
            rep = hk_variation(g)
            vit.append(rep.vitali)
            hks.append(rep.hk)
        else:
            vit.append(vitali_variation(g))
        pts.append(2**j + 1)
        seq = hks if hk else vit
        if len(seq) > 1 and abs(seq[-1] - seq[-2]) <= rtol * abs(seq[-1]):
            converged = True
            break
    return LadderResult(tuple(pts), tuple(vit), tuple(hks) if hk else None, converged)
