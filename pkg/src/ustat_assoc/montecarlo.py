"""Replication studies for Gini's mean difference on associated sequences.

Each replication ``i`` draws its sample from ``derive_seed(master_seed, i)``,
computes the Gini statistic ``g_i`` and the plug-in block estimate
``B_hat(i)``, and returns both. Workers handle contiguous index ranges and
results are folded in index order, so summaries are bit-identical for any
worker count.
"""
from __future__ import annotations

import csv
import functools
import io
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields
from typing import Iterable, NamedTuple, Sequence

import numpy as np
from scipy import integrate, special, stats

from .errors import InvalidArgumentError, RequiresOracleError
from .generators import Family, GeneratorScheme, derive_seed, generate, marginal_theta
from .kernels import Marginal, abs_deviation_sums, gini_second_moment, rho1_empirical_all, rho1_exact
from .ustat import gini_values
from .variance import SQRT_HALF_PI, BlockRange, b_n, block_length

__all__ = [
    "Z_0025",
    "TABLE_TWO_SIGMA_U",
    "SummaryStats",
    "ReplicationSummary",
    "CLTDiagnostic",
    "SupDeviationPoint",
    "summary_stats",
    "coverage_probability",
    "two_sigma_u_quadrature",
    "long_run_two_sigma_u",
    "resolve_two_sigma_u",
    "empirical_lag_cov",
    "replicate",
    "run_table",
    "clt_diagnostic",
    "sup_deviation_series",
    "summaries_to_csv",
]

Z_0025 = 1.959964

# 2 sigma_U for the exponential schemes, keyed by window length
TABLE_TWO_SIGMA_U = {2: 1.393864, 3: 1.639871, 10: 2.897561}


class SummaryStats(NamedTuple):
    mean: float
    emse: float
    median: float
    skewness: float
    kurtosis: float


def summary_stats(values) -> SummaryStats:
    """Mean, ``r - 1`` variance, median, moment skewness and (non-excess) kurtosis.

    Skewness and kurtosis are 0 when the second central moment vanishes.
    """
    v = np.asarray(values, dtype=np.float64)
    r = v.size
    if r < 2:
        raise InvalidArgumentError(f"need r >= 2 values, got {r}")
    mean = math.fsum(v.tolist()) / r
    d = v - mean
    m2 = float(np.mean(d**2))
    emse = float(np.sum(d**2)) / (r - 1)
    if m2 == 0.0:
        skew = kurt = 0.0
    else:
        skew = float(np.mean(d**3)) / m2**1.5
        kurt = float(np.mean(d**4)) / m2**2
    return SummaryStats(mean, emse, float(np.median(v)), skew, kurt)


def coverage_probability(g_values, b_bar: float, n: int, z: float = Z_0025,
                         corrected: bool = True) -> float:
    """Fraction of ``g_i`` strictly inside ``g_bar +/- h``.

    ``h = 2 sqrt(pi/2) b_bar z / sqrt(n)``; with ``corrected=False`` the
    ``sqrt(pi/2)`` factor is dropped.
    """
    g = np.asarray(g_values, dtype=np.float64)
    if g.size < 1:
        raise InvalidArgumentError("need at least one replication")
    scale = SQRT_HALF_PI if corrected else 1.0
    half = 2.0 * scale * b_bar * z / math.sqrt(n)
    centre = math.fsum(g.tolist()) / g.size
    return float(np.count_nonzero(np.abs(g - centre) < half)) / g.size


# ---------------------------------------------------------------------------
# long-run scale 2 sigma_U

def _folded_normal_mean(mu, tau):
    return tau * math.sqrt(2.0 / math.pi) * np.exp(-0.5 * (mu / tau) ** 2) + mu * (
        1.0 - 2.0 * special.ndtr(-mu / tau)
    )


def _normal_lag_moment(corr: float) -> float:
    # E rho1(X1) rho1(X2) for standard bivariate normal with correlation corr
    tau = math.sqrt(2.0 - corr * corr)

    def integrand(x):
        cond = _folded_normal_mean(corr * x, tau)
        return float(rho1_exact(Marginal.STD_NORMAL, x) * cond) * math.exp(-0.5 * x * x)

    val, _ = integrate.quad(integrand, -12.0, 12.0, epsabs=1e-13, epsrel=1e-12, limit=400)
    return val / math.sqrt(2.0 * math.pi)


def _exp_lag_moment(m: int, lag: int) -> float:
    # windows share m - lag draws; X = min(A, M) with A the private minimum
    rate_a, rate_m = lag / m, (m - lag) / m

    def cond_mean(y):
        head, _ = integrate.quad(
            lambda t: float(rho1_exact(Marginal.EXP1, t)) * rate_a * math.exp(-rate_a * t),
            0.0, y, epsabs=1e-14, epsrel=1e-12, limit=200,
        )
        return head + float(rho1_exact(Marginal.EXP1, y)) * math.exp(-rate_a * y)

    val, _ = integrate.quad(
        lambda y: cond_mean(y) ** 2 * rate_m * math.exp(-rate_m * y),
        0.0, np.inf, epsabs=1e-13, epsrel=1e-12, limit=400,
    )
    return val


@functools.lru_cache(maxsize=None)
def two_sigma_u_quadrature(scheme: GeneratorScheme) -> float:
    """Exact ``2 sigma_U`` for the Gini kernel by one-dimensional quadrature.

    Both schemes are ``(m-1)``-dependent, so
    ``sigma_U**2 = Var rho1(X_1) + 2 sum_{j=1}^{m-1} Cov(rho1(X_1), rho1(X_{1+j}))``.
    """
    m = scheme.m
    if scheme.family is Family.EXP_MIN:
        marginal, lag_moment = Marginal.EXP1, lambda j: _exp_lag_moment(m, j)
    else:
        marginal, lag_moment = Marginal.STD_NORMAL, lambda j: _normal_lag_moment((m - j) / m)
    theta = marginal_theta(scheme)
    var = gini_second_moment(marginal) - theta**2
    cov = [lag_moment(j) - theta**2 for j in range(1, m)]
    return 2.0 * math.sqrt(var + 2.0 * math.fsum(cov))


def _schedule_key(scheme: GeneratorScheme):
    return (scheme.family.value, scheme.m)


@functools.lru_cache(maxsize=32)
def _long_run_cached(family: str, m: int, n: int, max_lag: int, seed: int) -> float:
    scheme = GeneratorScheme(Family(family), m)
    x = generate(scheme, n, seed).values
    marginal = Marginal.EXP1 if scheme.family is Family.EXP_MIN else Marginal.STD_NORMAL
    y = rho1_exact(marginal, x)
    y = y - y.mean()
    acov = [float(np.dot(y[: n - j], y[j:])) / n for j in range(max_lag + 1)]
    return 2.0 * math.sqrt(acov[0] + 2.0 * math.fsum(acov[1:]))


def long_run_two_sigma_u(scheme: GeneratorScheme, n: int = 10**6, max_lag: int = 50,
                         seed: int = 20240601) -> float:
    """Monte Carlo ``2 sigma_U``: lag-window sum of autocovariances of ``rho1(X_j)``."""
    if max_lag < 0 or max_lag >= n:
        raise InvalidArgumentError("max_lag must lie in [0, n)")
    return _long_run_cached(*_schedule_key(scheme), int(n), int(max_lag), int(seed))


def resolve_two_sigma_u(scheme: GeneratorScheme, oracle: str = "auto") -> float:
    """Look up or compute ``2 sigma_U``.

    ``oracle`` is ``"table"`` (published values, exponential m in {2, 3, 10}),
    ``"quadrature"``, ``"long-run"``, or ``"auto"`` (table, else quadrature).
    """
    table = TABLE_TWO_SIGMA_U.get(scheme.m) if scheme.family is Family.EXP_MIN else None
    if oracle in ("auto", "table"):
        if table is not None:
            return table
        if oracle == "table":
            raise RequiresOracleError(
                f"no published 2*sigma_U for {scheme.name}; use oracle='quadrature' or 'long-run'"
            )
        return two_sigma_u_quadrature(scheme)
    if oracle == "quadrature":
        return two_sigma_u_quadrature(scheme)
    if oracle == "long-run":
        return long_run_two_sigma_u(scheme)
    raise InvalidArgumentError(f"unknown oracle {oracle!r}")


def empirical_lag_cov(scheme: GeneratorScheme, lag: int, n: int = 10**6, seed: int = 1,
                      transform=None) -> float:
    """Sample ``Cov(T(X_1), T(X_{1+lag}))`` from one long series."""
    x = generate(scheme, n + lag, seed).values
    if transform is not None:
        x = np.asarray(transform(x), dtype=np.float64)
    a, b = x[: x.size - lag], x[lag:]
    return float(np.mean((a - a.mean()) * (b - b.mean())))


# ---------------------------------------------------------------------------
# replication engine

def _replicate_range(scheme, n, master_seed, start, stop, ell, block_range):
    g = np.empty(stop - start)
    b = np.empty(stop - start)
    block_range = BlockRange(block_range)
    for out, i in enumerate(range(start, stop)):
        x = generate(scheme, n, derive_seed(master_seed, i)).values
        g[out] = gini_values(x)
        b[out] = b_n(rho1_empirical_all(x), ell, block_range).b_n
    return g, b


def _default_workers() -> int:
    try:
        return len(os.sched_getaffinity(0))
    except AttributeError:
        return os.cpu_count() or 1


def replicate(scheme: GeneratorScheme, n: int, r: int, master_seed: int, *,
              workers: int | None = 1, exponent: float = 0.6,
              block_range: BlockRange | str = BlockRange.LEMMA) -> tuple[np.ndarray, np.ndarray]:
    """Gini values and plug-in block estimates for ``r`` replications, in index order."""
    if r < 1:
        raise InvalidArgumentError(f"need r >= 1 replications, got {r}")
    if n < 4:
        raise InvalidArgumentError(f"need n >= 4, got {n}")
    ell = block_length(n, exponent)
    block_range = BlockRange(block_range).value
    workers = _default_workers() if workers is None else max(1, int(workers))
    if workers == 1 or r < 2 * workers:
        return _replicate_range(scheme, n, master_seed, 0, r, ell, block_range)
    bounds = np.linspace(0, r, 4 * workers + 1).astype(int)
    jobs = [(int(a), int(c)) for a, c in zip(bounds[:-1], bounds[1:]) if c > a]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = [
            pool.submit(_replicate_range, scheme, n, master_seed, a, c, ell, block_range)
            for a, c in jobs
        ]
        parts = [f.result() for f in futures]
    return np.concatenate([p[0] for p in parts]), np.concatenate([p[1] for p in parts])


@dataclass(frozen=True)
class ReplicationSummary:
    """One column of the simulation tables (one scheme and sample size)."""

    scheme: str
    m: int
    n: int
    r: int
    g_bar: float
    emse_g: float
    cp_g: float
    median_g: float
    skewness_g: float
    kurtosis_g: float
    b_bar: float
    emse_b: float
    two_sigma_hat: float
    emse_two_sigma: float
    two_sigma_u: float | None
    bias: float | None

    def to_dict(self) -> dict:
        return asdict(self)


def run_table(scheme: GeneratorScheme, n: int, r: int, master_seed: int, *,
              workers: int | None = 1, exponent: float = 0.6,
              block_range: BlockRange | str = BlockRange.LEMMA,
              two_sigma_u: float | None = None, oracle: str = "auto") -> ReplicationSummary:
    """Replicate the scheme ``r`` times at size ``n`` and summarise.

    ``bias`` compares ``2 sqrt(pi/2) mean(B_hat)`` with ``2 sigma_U``, taken
    from ``two_sigma_u`` when given, else from :func:`resolve_two_sigma_u`.
    """
    if r < 2:
        raise InvalidArgumentError(f"need r >= 2 replications, got {r}")
    g, b = replicate(scheme, n, r, master_seed, workers=workers, exponent=exponent,
                     block_range=block_range)
    gs = summary_stats(g)
    b_bar = math.fsum(b.tolist()) / r
    emse_b = float(np.var(b, ddof=1))
    two_sigma_hat = 2.0 * SQRT_HALF_PI * b_bar
    if two_sigma_u is None:
        try:
            two_sigma_u = resolve_two_sigma_u(scheme, oracle)
        except RequiresOracleError:
            two_sigma_u = None
    return ReplicationSummary(
        scheme=scheme.name,
        m=scheme.m,
        n=n,
        r=r,
        g_bar=gs.mean,
        emse_g=gs.emse,
        cp_g=coverage_probability(g, b_bar, n),
        median_g=gs.median,
        skewness_g=gs.skewness,
        kurtosis_g=gs.kurtosis,
        b_bar=b_bar,
        emse_b=emse_b,
        two_sigma_hat=two_sigma_hat,
        emse_two_sigma=(2.0 * SQRT_HALF_PI) ** 2 * emse_b,
        two_sigma_u=two_sigma_u,
        bias=None if two_sigma_u is None else abs(two_sigma_hat - two_sigma_u),
    )


def summaries_to_csv(rows: Iterable[ReplicationSummary]) -> str:
    names = [f.name for f in fields(ReplicationSummary)]
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(names)
    for row in rows:
        writer.writerow(["" if v is None else (repr(v) if isinstance(v, float) else v)
                         for v in (getattr(row, k) for k in names)])
    return buf.getvalue()


# ---------------------------------------------------------------------------
# limit-theorem diagnostics

@dataclass(frozen=True, eq=False)
class CLTDiagnostic:
    z: np.ndarray
    skewness: float
    kurtosis: float
    ks_distance: float
    theta: float
    two_sigma_u: float
    n: int

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "r": int(self.z.size),
            "theta": self.theta,
            "two_sigma_u": self.two_sigma_u,
            "mean_z": float(np.mean(self.z)),
            "skewness": self.skewness,
            "kurtosis": self.kurtosis,
            "ks_distance": self.ks_distance,
        }


def standardize(g, theta: float, two_sigma_u: float, n: int) -> np.ndarray:
    return math.sqrt(n) * (np.asarray(g, dtype=np.float64) - theta) / two_sigma_u


def clt_diagnostic(scheme: GeneratorScheme, n: int, r: int, master_seed: int, *,
                   workers: int | None = 1, two_sigma_u: float | None = None,
                   oracle: str = "auto") -> CLTDiagnostic:
    """Standardized Gini values ``sqrt(n)(g_i - theta)/(2 sigma_U)`` and normality summaries.

    Raises :class:`RequiresOracleError` when ``oracle='table'`` and no
    published scale exists for the scheme.
    """
    if two_sigma_u is None:
        two_sigma_u = resolve_two_sigma_u(scheme, oracle)
    g, _ = replicate(scheme, n, r, master_seed, workers=workers)
    theta = marginal_theta(scheme)
    z = standardize(g, theta, two_sigma_u, n)
    s = summary_stats(z)
    ks = float(stats.kstest(z, "norm").statistic)
    return CLTDiagnostic(z, s.skewness, s.kurtosis, ks, theta, two_sigma_u, n)


@dataclass(frozen=True)
class SupDeviationPoint:
    n: int
    statistic: float
    u: float
    p: float


def sup_deviation(x: np.ndarray, scheme: GeneratorScheme, u: float = 1.1, p: float = 0.85,
                  grid_size: int = 1000) -> float:
    """``max_x |sum_j (|X_j - x| - rho1(x))| / n**(1 + u/2 - p)`` over a uniform grid.

    The grid spans the sample range with ``grid_size`` points.
    """
    if grid_size < 2:
        raise InvalidArgumentError("grid_size must be >= 2")
    n = x.size
    marginal = Marginal.EXP1 if scheme.family is Family.EXP_MIN else Marginal.STD_NORMAL
    grid = np.linspace(x.min(), x.max(), grid_size)
    dev = abs_deviation_sums(x, grid) - n * rho1_exact(marginal, grid)
    return float(np.max(np.abs(dev))) / n ** (1.0 + u / 2.0 - p)


def sup_deviation_series(scheme: GeneratorScheme, n_list: Sequence[int], u: float = 1.1,
                         p: float = 0.85, grid_size: int = 1000,
                         master_seed: int = 0) -> list[SupDeviationPoint]:
    """Sup-deviation statistic along one sample path at each size in ``n_list``.

    One series of length ``max(n_list)`` is drawn and each point uses its
    first ``n`` values.
    """
    if not u > 1.0:
        raise InvalidArgumentError(f"u must exceed 1, got {u}")
    if not 0.0 < p < 1.0:
        raise InvalidArgumentError(f"p must lie in (0, 1), got {p}")
    n_list = [int(n) for n in n_list]
    if not n_list or min(n_list) < 2:
        raise InvalidArgumentError("n_list needs sizes >= 2")
    path = generate(scheme, max(n_list), master_seed).values
    return [SupDeviationPoint(n, sup_deviation(path[:n], scheme, u, p, grid_size), u, p)
            for n in n_list]


def _progress(msg: str):
    print(msg, file=sys.stderr, flush=True)
