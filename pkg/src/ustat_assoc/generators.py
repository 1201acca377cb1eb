"""Stationary associated sequences with standard marginals.

Two window constructions over an i.i.d. stream ``Y_1, ..., Y_{n+m-1}``:

* ``EXP_MIN``: ``X_j = min(Y_j, ..., Y_{j+m-1})`` with ``Y ~ Exp`` of mean ``m``,
  so that every ``X_j`` is standard exponential.
* ``NORMAL_SUM``: ``X_j = Y_j + ... + Y_{j+m-1}`` with ``Y ~ N(0, 1/m)``,
  so that every ``X_j`` is standard normal.

Overlapping windows make the sequence associated (nondecreasing functions of
independent variables) and ``(m - 1)``-dependent.

Random streams are drawn from numpy's counter-based ``Philox`` bit generator
keyed by a ``SeedSequence`` built from the 64-bit seed. Replication seeds are
derived with :func:`derive_seed`, which depends only on the master seed and
the replication index, so results do not depend on the order or the process
in which replications run.
"""
from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .errors import InvalidArgumentError

__all__ = [
    "Family",
    "GeneratorScheme",
    "Sample",
    "SCHEMES",
    "scheme_from_label",
    "generate",
    "derive_seed",
    "marginal_theta",
    "marginal_cdf",
    "analytic_lag_cov",
]

_SEED_MASK = (1 << 64) - 1


class Family(str, enum.Enum):
    EXP_MIN = "ExpMin"
    NORMAL_SUM = "NormalSum"


@dataclass(frozen=True)
class GeneratorScheme:
    """Recipe for a stationary associated sequence."""

    family: Family
    m: int
    label: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        if isinstance(self.m, bool) or int(self.m) != self.m or self.m < 1:
            raise InvalidArgumentError(f"window length m must be an integer >= 1, got {self.m!r}")
        object.__setattr__(self, "m", int(self.m))

    @property
    def name(self) -> str:
        return self.label or f"{self.family.value}(m={self.m})"


SCHEMES: dict[str, GeneratorScheme] = {
    "S1": GeneratorScheme(Family.EXP_MIN, 2, "S1"),
    "S2": GeneratorScheme(Family.EXP_MIN, 3, "S2"),
    "S3": GeneratorScheme(Family.EXP_MIN, 10, "S3"),
    "S4": GeneratorScheme(Family.NORMAL_SUM, 2, "S4"),
    "S5": GeneratorScheme(Family.NORMAL_SUM, 3, "S5"),
    "S6": GeneratorScheme(Family.NORMAL_SUM, 10, "S6"),
}


def scheme_from_label(label: str) -> GeneratorScheme:
    try:
        return SCHEMES[label.upper()]
    except KeyError:
        raise InvalidArgumentError(
            f"unknown scheme label {label!r}; expected one of {', '.join(SCHEMES)}"
        ) from None


@dataclass(frozen=True, eq=False)
class Sample:
    """One realized series together with the recipe and seed that produced it."""

    values: np.ndarray
    scheme: GeneratorScheme | None = None
    seed: int | None = None
    n: int = field(init=False)

    def __post_init__(self):
        values = np.array(self.values, dtype=np.float64)
        if values.ndim != 1:
            raise InvalidArgumentError("sample values must be one-dimensional")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "n", values.size)

    def __len__(self):
        return self.n

    def __array__(self, dtype=None, copy=None):
        return self.values if dtype is None else self.values.astype(dtype)

    def to_csv(self) -> str:
        lines = ["x"] + [repr(float(v)) for v in self.values]
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        return json.dumps(
            {
                "scheme": self.scheme.family.value if self.scheme else None,
                "label": self.scheme.label if self.scheme else None,
                "m": self.scheme.m if self.scheme else None,
                "n": self.n,
                "seed": self.seed,
                "values": [float(v) for v in self.values],
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "Sample":
        data = json.loads(text)
        scheme = None
        if data.get("scheme") is not None:
            scheme = GeneratorScheme(Family(data["scheme"]), data["m"], data.get("label"))
        sample = cls(data["values"], scheme, data.get("seed"))
        if "n" in data and data["n"] != sample.n:
            raise InvalidArgumentError(f"n={data['n']} does not match {sample.n} values")
        return sample

    @classmethod
    def from_csv(cls, text: str) -> "Sample":
        rows = [r.strip() for r in text.splitlines() if r.strip()]
        if rows and rows[0].lower() == "x":
            rows = rows[1:]
        try:
            return cls([float(r.split(",")[0]) for r in rows])
        except ValueError as exc:
            raise InvalidArgumentError(f"malformed sample CSV: {exc}") from None


def as_array(sample) -> np.ndarray:
    """Return the values of a :class:`Sample` or array-like as a float array."""
    if isinstance(sample, Sample):
        return sample.values
    return np.asarray(sample, dtype=np.float64)


def derive_seed(master_seed: int, index: int) -> int:
    """64-bit child seed for replication ``index`` of ``master_seed``."""
    ss = np.random.SeedSequence(int(master_seed) & _SEED_MASK, spawn_key=(int(index),))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(int(seed) & _SEED_MASK)))


def generate(scheme: GeneratorScheme, n: int, seed: int) -> Sample:
    """Draw ``n`` consecutive values of the scheme's sequence.

    Deterministic in ``(scheme, n, seed)``.
    """
    if n < 2:
        raise InvalidArgumentError(f"n must be >= 2, got {n}")
    m = scheme.m
    rng = _rng(seed)
    if scheme.family is Family.EXP_MIN:
        y = rng.exponential(scale=float(m), size=n + m - 1)
        x = y if m == 1 else sliding_window_view(y, m).min(axis=1)
    else:
        y = rng.normal(0.0, math.sqrt(1.0 / m), size=n + m - 1)
        x = y if m == 1 else sliding_window_view(y, m).sum(axis=1)
    return Sample(x, scheme, int(seed) & _SEED_MASK)


def marginal_theta(scheme: GeneratorScheme) -> float:
    """Mean difference ``E|X - X'|`` of the standard marginal."""
    if scheme.family is Family.EXP_MIN:
        return 1.0
    return 2.0 / math.sqrt(math.pi)


def marginal_cdf(scheme: GeneratorScheme):
    from scipy import stats

    if scheme.family is Family.EXP_MIN:
        return stats.expon.cdf
    return stats.norm.cdf


def analytic_lag_cov(scheme: GeneratorScheme, lag: int) -> float | None:
    """``Cov(X_1, X_{1+lag})``, or ``None`` where no closed form is adopted.

    ExpMin at lags ``0 < lag < m`` returns ``None``.
    """
    if lag < 0:
        raise InvalidArgumentError(f"lag must be >= 0, got {lag}")
    m = scheme.m
    if lag == 0:
        return 1.0
    if lag >= m:
        return 0.0
    if scheme.family is Family.NORMAL_SUM:
        return (m - lag) / m
    return None
