"""Block estimator of the long-run standard deviation of a linear statistic.

For a series ``Y_1..Y_n`` and block length ``l``::

    B_n = 1/(n - l + 1) * sum_{j=0}^{n-l} |S_j(l) - l * mean(Y)| / sqrt(l)

with ``S_j(l) = Y_{j+1} + ... + Y_{j+l}``. ``B_n`` is consistent for
``sigma * sqrt(2/pi)``, so ``sqrt(pi/2) * B_n`` estimates the long-run
standard deviation ``sigma``.

The plug-in variant applies ``B_n`` to ``Y_i = rho1_hat(X_i)``, the empirical
Gini projection at the sample points.
"""
from __future__ import annotations

import enum
import math
from fractions import Fraction
from dataclasses import asdict, dataclass

import numpy as np

from .errors import InvalidArgumentError
from .generators import as_array
from .kernels import rho1_empirical_all

__all__ = [
    "Variant",
    "BlockRange",
    "BlockEstimate",
    "block_length",
    "b_n",
    "b_n_hat",
    "sigma_u_hat",
    "SQRT_HALF_PI",
]

SQRT_HALF_PI = math.sqrt(math.pi / 2.0)


class Variant(str, enum.Enum):
    ORACLE = "oracle"
    PLUG_IN = "plug-in"


class BlockRange(str, enum.Enum):
    # j = 0..n-l, divisor n-l+1
    LEMMA = "lemma"
    # j = 1..n-l with the same divisor, as printed for the simulations
    SIMULATION = "simulation"


@dataclass(frozen=True)
class BlockEstimate:
    ell: int
    b_n: float
    sigma_hat: float
    n: int
    variant: Variant

    def to_dict(self) -> dict:
        d = asdict(self)
        d["variant"] = self.variant.value
        return d


def block_length(n: int, exponent: float = 0.6) -> int:
    """``floor(n**exponent)`` clamped to ``[1, n - 1]``."""
    if n < 2:
        raise InvalidArgumentError(f"n must be >= 2, got {n}")
    if not 0.0 < exponent < 1.0:
        raise InvalidArgumentError(f"exponent must lie in (0, 1), got {exponent}")
    ell = _floor_power(n, exponent)
    return min(max(ell, 1), n - 1)


def _floor_power(n: int, exponent: float) -> int:
    # exact for rational exponents p/q: largest L with L**q <= n**p
    frac = Fraction(exponent).limit_denominator(1000)
    if abs(float(frac) - exponent) > 1e-12:
        return math.floor(n**exponent)
    p, q = frac.numerator, frac.denominator
    target = n**p
    ell = math.floor(n**exponent)
    while ell**q > target:
        ell -= 1
    while (ell + 1) ** q <= target:
        ell += 1
    return ell


def _block_stat(y: np.ndarray, ell: int, block_range: BlockRange) -> float:
    n = y.size
    centered = y - y.mean()
    cs = np.concatenate(([0.0], np.cumsum(centered)))
    sums = cs[ell:] - cs[:-ell]
    if block_range is BlockRange.SIMULATION:
        sums = sums[1:]
    return float(np.abs(sums).sum()) / math.sqrt(ell) / (n - ell + 1)


def _check(n: int, ell: int):
    if n < 2:
        raise InvalidArgumentError(f"series needs n >= 2 values, got {n}")
    if isinstance(ell, bool) or int(ell) != ell or not 1 <= ell <= n:
        raise InvalidArgumentError(f"block length must be an integer in [1, {n}], got {ell!r}")


def b_n(series, ell: int, block_range: BlockRange | str = BlockRange.LEMMA,
        variant: Variant = Variant.ORACLE) -> BlockEstimate:
    """Block estimate for an already transformed series ``Y``."""
    y = np.asarray(series, dtype=np.float64)
    _check(y.size, ell)
    bn = _block_stat(y, int(ell), BlockRange(block_range))
    return BlockEstimate(int(ell), bn, SQRT_HALF_PI * bn, y.size, Variant(variant))


def b_n_hat(sample, ell: int, block_range: BlockRange | str = BlockRange.LEMMA) -> BlockEstimate:
    """Plug-in block estimate with ``Y_i = (1/n) sum_j |X_j - X_i|``."""
    x = as_array(sample)
    _check(x.size, ell)
    return b_n(rho1_empirical_all(x), ell, block_range, Variant.PLUG_IN)


def sigma_u_hat(sample, exponent: float = 0.6,
                block_range: BlockRange | str = BlockRange.LEMMA) -> BlockEstimate:
    """Plug-in estimate of ``sigma_U`` with the default block length ``floor(n**0.6)``."""
    x = as_array(sample)
    if x.size < 4:
        raise InvalidArgumentError(f"need n >= 4 observations, got {x.size}")
    return b_n_hat(x, block_length(x.size, exponent), block_range)
