"""U-statistics of degree 2 and of general finite degree.

All pairwise paths accumulate kernel terms with :func:`math.fsum`, which
returns the correctly rounded exact sum. The result is therefore
independent of the order in which terms are produced.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import InvalidArgumentError, ResourceLimitError
from .generators import as_array
from .kernels import HDecomposition, Kernel2

__all__ = [
    "UStatResult",
    "u_stat_degree2",
    "gini_fast",
    "u_stat_general",
    "h_projection_terms",
    "MAX_SUBSETS",
]

MAX_SUBSETS = 10**7
_CHUNK = 1 << 16


@dataclass(frozen=True)
class UStatResult:
    value: float
    n: int
    degree: int
    kernel: str

    def __float__(self):
        return self.value


def _pair_terms(kernel, x: np.ndarray):
    for i in range(x.size - 1):
        yield np.atleast_1d(kernel(x[i], x[i + 1:])).tolist()


def _pair_sum(kernel, x: np.ndarray) -> float:
    return math.fsum(itertools.chain.from_iterable(_pair_terms(kernel, x)))


def u_stat_degree2(kernel: Kernel2, sample) -> UStatResult:
    """Average of ``kernel`` over all pairs ``i < j``."""
    x = as_array(sample)
    n = x.size
    if n < 2:
        raise InvalidArgumentError(f"need n >= 2 observations, got {n}")
    total = _pair_sum(kernel, x)
    return UStatResult(total / math.comb(n, 2), n, 2, getattr(kernel, "descriptor", "custom"))


def gini_fast(sample) -> UStatResult:
    """Gini's mean difference from order statistics in O(n log n).

    ``2/(n(n-1)) * sum_i (2i - n - 1) x_(i)`` over the sorted sample.
    """
    x = as_array(sample)
    n = x.size
    if n < 2:
        raise InvalidArgumentError(f"need n >= 2 observations, got {n}")
    xs = np.sort(x)
    weights = 2.0 * np.arange(1, n + 1) - n - 1
    total = math.fsum((weights * xs).tolist())
    return UStatResult(total / math.comb(n, 2), n, 2, "|x-y|")


def gini_values(x: np.ndarray) -> float:
    """Unchecked float version of :func:`gini_fast` for hot loops."""
    n = x.size
    xs = np.sort(x)
    weights = 2.0 * np.arange(1, n + 1) - n - 1
    return math.fsum((weights * xs).tolist()) / math.comb(n, 2)


def u_stat_general(kernel_k: Callable[[np.ndarray], np.ndarray], sample, k: int,
                   descriptor: str = "custom") -> UStatResult:
    """Average of a symmetric ``k``-ary kernel over all increasing index tuples.

    ``kernel_k`` receives an array of shape ``(m, k)``, one subset per row in
    lexicographic order, and returns ``m`` values.
    """
    x = as_array(sample)
    n = x.size
    if k < 2:
        raise InvalidArgumentError(f"degree must be >= 2, got {k}")
    if k > n:
        raise InvalidArgumentError(f"degree {k} exceeds sample size {n}")
    count = math.comb(n, k)
    if count > MAX_SUBSETS:
        raise ResourceLimitError(f"C({n},{k}) = {count} subsets exceeds budget {MAX_SUBSETS}")
    combos = itertools.combinations(range(n), k)

    def chunks():
        while True:
            block = list(itertools.islice(combos, _CHUNK))
            if not block:
                return
            idx = np.asarray(block, dtype=np.intp)
            yield np.atleast_1d(kernel_k(x[idx])).tolist()

    total = math.fsum(itertools.chain.from_iterable(chunks()))
    return UStatResult(total / count, n, k, descriptor)


def h_projection_terms(decomp: HDecomposition, sample) -> tuple[float, float]:
    """Sample H-decomposition terms ``(H1, H2)``.

    ``H1 = mean h1(X_j)`` and ``H2`` is the degree-2 U-statistic of ``h2``;
    ``theta + 2*H1 + H2`` reproduces the U-statistic of the kernel.
    """
    x = as_array(sample)
    n = x.size
    if n < 2:
        raise InvalidArgumentError(f"need n >= 2 observations, got {n}")
    h1 = math.fsum(np.atleast_1d(decomp.h1(x)).tolist()) / n
    h2 = _pair_sum(decomp.h2, x) / math.comb(n, 2)
    return h1, h2
