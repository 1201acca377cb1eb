"""Histogram estimator of the lag-k bivariate distribution function.

``U_n(s, t) = 1/(n-k) * #{i <= n-k : X_i <= s, X_{i+k} <= t}``
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError
from .generators import as_array

__all__ = ["JointDFEstimate", "joint_df_point", "joint_df_grid"]


@dataclass(frozen=True, eq=False)
class JointDFEstimate:
    k: int
    grid_s: np.ndarray
    grid_t: np.ndarray
    values: np.ndarray
    n: int

    def to_csv(self) -> str:
        rows = ["s,t,value"]
        for i, s in enumerate(self.grid_s):
            for j, t in enumerate(self.grid_t):
                rows.append(f"{float(s)!r},{float(t)!r},{float(self.values[i, j])!r}")
        return "\n".join(rows) + "\n"


def _pairs(sample, k):
    x = as_array(sample)
    n = x.size
    if isinstance(k, bool) or int(k) != k or not 1 <= k <= n - 1:
        raise InvalidArgumentError(f"lag must be an integer in [1, {n - 1}], got {k!r}")
    k = int(k)
    return x[:-k], x[k:], n, k


def joint_df_point(sample, k: int, s: float, t: float) -> float:
    lead, lagged, n, k = _pairs(sample, k)
    return np.count_nonzero((lead <= s) & (lagged <= t)) / (n - k)


def _check_grid(grid, name):
    g = np.asarray(grid, dtype=np.float64)
    if g.ndim != 1 or g.size == 0:
        raise InvalidArgumentError(f"{name} must be a nonempty 1-D grid")
    if np.any(np.diff(g) <= 0):
        raise InvalidArgumentError(f"{name} must be strictly increasing")
    return g


def joint_df_grid(sample, k: int, grid_s, grid_t) -> JointDFEstimate:
    """Evaluate the estimator on the product grid with one pass over the pairs.

    Each pair is binned at the first grid index whose coordinate covers it;
    a 2-D cumulative sum of the bin counts then gives every grid value.
    """
    lead, lagged, n, k = _pairs(sample, k)
    gs = _check_grid(grid_s, "grid_s")
    gt = _check_grid(grid_t, "grid_t")
    # X <= g[p] iff p >= searchsorted(g, X, 'left'); index len(g) means never
    a = np.searchsorted(gs, lead, side="left")
    b = np.searchsorted(gt, lagged, side="left")
    counts = np.zeros((gs.size + 1, gt.size + 1), dtype=np.int64)
    np.add.at(counts, (a, b), 1)
    cum = counts.cumsum(axis=0).cumsum(axis=1)[: gs.size, : gt.size]
    return JointDFEstimate(k, gs, gt, cum / (n - k), n)
