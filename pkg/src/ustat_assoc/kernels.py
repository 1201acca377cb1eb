"""Degree-2 kernels, first projections and the Hoeffding decomposition.

For a symmetric kernel ``rho`` and marginal law ``F``::

    theta   = E rho(X, X')
    rho1(x) = E rho(x, X')
    h1(x)   = rho1(x) - theta
    h2(x,y) = rho(x, y) - rho1(x) - rho1(y) + theta

so that ``rho(x, y) = theta + h1(x) + h1(y) + h2(x, y)`` identically.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import integrate, special

from .errors import InvalidArgumentError, UnsupportedOperationError
from .generators import Sample, as_array

__all__ = [
    "Kernel2",
    "Marginal",
    "EmpiricalMarginal",
    "HDecomposition",
    "gini_kernel",
    "rho1_exact",
    "rho1_empirical",
    "rho1_empirical_all",
    "h_decompose",
    "marginal_pdf",
    "integrate_marginal",
    "gini_second_moment",
]

_SQRT_2PI = math.sqrt(2.0 * math.pi)

# quadrature windows; the mass outside them is below double precision
_EXP_SUPPORT = (0.0, 40.0)
_NORMAL_SUPPORT = (-10.0, 10.0)
_QUAD_EPSABS = 1e-9


@dataclass(frozen=True)
class Kernel2:
    """Symmetric kernel of two real arguments, vectorized over numpy arrays."""

    func: Callable[[np.ndarray, np.ndarray], np.ndarray]
    descriptor: str

    def __call__(self, x, y):
        return self.func(x, y)

    @property
    def is_gini(self) -> bool:
        return self.descriptor == _GINI.descriptor


def _abs_diff(x, y):
    return np.abs(np.subtract(x, y))


_GINI = Kernel2(_abs_diff, "|x-y|")


def gini_kernel() -> Kernel2:
    """The kernel ``(x, y) -> |x - y|``."""
    return _GINI


class Marginal(str, enum.Enum):
    EXP1 = "Exp1"
    STD_NORMAL = "StdNormal"


@dataclass(frozen=True, eq=False)
class EmpiricalMarginal:
    """Empirical measure of an observed sample."""

    sample: Sample

    @property
    def values(self) -> np.ndarray:
        return self.sample.values


def _phi(x):
    return np.exp(-0.5 * np.square(x)) / _SQRT_2PI


def _Phi(x):
    return special.ndtr(x)


def marginal_pdf(marginal: Marginal):
    marginal = Marginal(marginal)
    if marginal is Marginal.EXP1:
        return lambda x: np.where(np.asarray(x) >= 0, np.exp(-np.abs(x)), 0.0)
    return _phi


def integrate_marginal(g: Callable[[float], float], marginal: Marginal, points=None) -> float:
    """``E g(X)`` under an exact marginal by adaptive quadrature."""
    marginal = Marginal(marginal)
    lo, hi = _EXP_SUPPORT if marginal is Marginal.EXP1 else _NORMAL_SUPPORT
    pdf = marginal_pdf(marginal)
    pts = None
    if points is not None:
        pts = sorted(p for p in np.atleast_1d(points) if lo < p < hi) or None
    value, _ = integrate.quad(
        lambda t: g(t) * float(pdf(t)), lo, hi, points=pts, epsabs=_QUAD_EPSABS * 1e-3,
        epsrel=1e-12, limit=400,
    )
    return value


def rho1_exact(marginal: Marginal, x):
    """First projection of the Gini kernel, ``E|x - X|``, under an exact marginal.

    Exp1: ``x - 1 + 2 exp(-x)`` for ``x >= 0``.
    StdNormal: ``2 phi(x) + x (2 Phi(x) - 1)``.
    """
    marginal = Marginal(marginal)
    x = np.asarray(x, dtype=np.float64)
    if marginal is Marginal.EXP1:
        if np.any(x < 0):
            raise InvalidArgumentError("Exp1 projection is defined for x >= 0")
        out = x - 1.0 + 2.0 * np.exp(-x)
    else:
        out = 2.0 * _phi(x) + x * (2.0 * _Phi(x) - 1.0)
    return out[()] if out.ndim == 0 else out


def _sorted_prefix(values: np.ndarray):
    xs = np.sort(values)
    prefix = np.concatenate(([0.0], np.cumsum(xs)))
    return xs, prefix


def _abs_dev_sums(xs: np.ndarray, prefix: np.ndarray, x) -> np.ndarray:
    # sum_j |X_j - x| = x (2r - n) - 2 prefix(r) + total, r = #{X_j <= x}
    x = np.asarray(x, dtype=np.float64)
    n = xs.size
    r = np.searchsorted(xs, x, side="right")
    return x * (2 * r - n) - 2.0 * prefix[r] + prefix[n]


def rho1_empirical(sample, x):
    """``(1/n) sum_j |X_j - x|`` at one or many points ``x``."""
    values = as_array(sample)
    if values.size == 0:
        raise InvalidArgumentError("empirical projection needs a nonempty sample")
    xs, prefix = _sorted_prefix(values)
    out = _abs_dev_sums(xs, prefix, x) / values.size
    return out[()] if np.ndim(out) == 0 else out


def rho1_empirical_all(sample) -> np.ndarray:
    """Empirical projection at every sample point, in O(n log n).

    The self term ``|X_i - X_i| = 0`` is included.
    """
    values = as_array(sample)
    return rho1_empirical(values, values)


def abs_deviation_sums(values: np.ndarray, x) -> np.ndarray:
    """``sum_j |values_j - x|`` for each entry of ``x`` using one sort."""
    xs, prefix = _sorted_prefix(np.asarray(values, dtype=np.float64))
    return _abs_dev_sums(xs, prefix, x)


@dataclass(frozen=True, eq=False)
class HDecomposition:
    """The four Hoeffding components of a degree-2 kernel under a marginal."""

    kernel: Kernel2
    theta: float
    rho1: Callable
    marginal: Marginal | EmpiricalMarginal

    def h1(self, x):
        return self.rho1(x) - self.theta

    def h2(self, x, y):
        return self.kernel(x, y) - self.rho1(x) - self.rho1(y) + self.theta


def _exact_theta(marginal: Marginal) -> float:
    return 1.0 if marginal is Marginal.EXP1 else 2.0 / math.sqrt(math.pi)


def h_decompose(kernel: Kernel2, marginal, rho1: Callable | None = None) -> HDecomposition:
    """Hoeffding decomposition of ``kernel`` under ``marginal``.

    ``marginal`` is a :class:`Marginal`, or a :class:`Sample` /
    :class:`EmpiricalMarginal` for the empirical law. For exact marginals the
    Gini kernel uses closed forms; any other kernel needs a caller-supplied
    ``rho1``, and ``theta`` is then obtained by quadrature of ``rho1``.

    Empirical ``theta`` is the V-statistic ``n**-2 sum_{i,j} rho(X_i, X_j)``.
    """
    if isinstance(marginal, Sample):
        marginal = EmpiricalMarginal(marginal)
    if isinstance(marginal, EmpiricalMarginal):
        values = marginal.values
        if values.size == 0:
            raise InvalidArgumentError("empirical marginal needs a nonempty sample")
        if kernel.is_gini:
            xs, prefix = _sorted_prefix(values)
            n = values.size

            def emp_rho1(x, _xs=xs, _p=prefix, _n=n):
                out = _abs_dev_sums(_xs, _p, x) / _n
                return out[()] if np.ndim(out) == 0 else out
        else:
            def emp_rho1(x, _v=values):
                x = np.asarray(x, dtype=np.float64)
                out = np.mean(kernel(x[..., None], _v), axis=-1)
                return out[()] if out.ndim == 0 else out
        theta = math.fsum(np.atleast_1d(emp_rho1(values))) / values.size
        return HDecomposition(kernel, theta, emp_rho1, marginal)

    try:
        marginal = Marginal(marginal)
    except ValueError:
        raise InvalidArgumentError(f"unknown marginal {marginal!r}") from None
    if rho1 is not None:
        theta = integrate_marginal(lambda t: float(rho1(t)), marginal)
        return HDecomposition(kernel, theta, rho1, marginal)
    if not kernel.is_gini:
        raise UnsupportedOperationError(
            f"no closed-form projection for kernel {kernel.descriptor!r} under {marginal.value}; "
            "pass rho1 explicitly or use an empirical marginal"
        )
    return HDecomposition(
        kernel, _exact_theta(marginal), lambda x, _m=marginal: rho1_exact(_m, x), marginal
    )


def gini_second_moment(marginal: Marginal) -> float:
    """``E|X - Y||X - Z|`` for i.i.d. ``X, Y, Z``, i.e. ``E rho1(X)**2``."""
    marginal = Marginal(marginal)
    return integrate_marginal(lambda t: float(rho1_exact(marginal, t)) ** 2, marginal)
