import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ustat_assoc import (
    SCHEMES,
    InvalidArgumentError,
    Sample,
    b_n,
    b_n_hat,
    block_length,
    generate,
    sigma_u_hat,
)
from ustat_assoc.generators import derive_seed
from ustat_assoc.kernels import rho1_empirical_all
from ustat_assoc.variance import SQRT_HALF_PI, BlockRange, Variant


def direct_b_n(y, ell, start=0):
    """Eq.-by-eq. evaluation with explicit block loops."""
    n = len(y)
    ybar = sum(y) / n
    terms = [abs(sum(y[j:j + ell]) - ell * ybar) / math.sqrt(ell) for j in range(start, n - ell + 1)]
    return sum(terms) / (n - ell + 1)


@pytest.mark.parametrize("n, ell", [(100, 15), (1000, 63), (2, 1), (32, 8), (243, 27), (500, 41)])
def test_block_length(n, ell):
    assert block_length(n) == ell


def test_block_length_other_exponents():
    assert block_length(100, 0.5) == 10
    assert block_length(10, 0.999) == 9
    with pytest.raises(InvalidArgumentError):
        block_length(100, 1.0)
    with pytest.raises(InvalidArgumentError):
        block_length(1)


def test_b_n_examples():
    assert b_n([2.0] * 10, 3).b_n == 0.0
    est = b_n([0.0, 0.0, 3.0], 1)
    assert est.b_n == pytest.approx(4 / 3, abs=1e-15)
    assert est.sigma_hat == SQRT_HALF_PI * est.b_n
    assert (est.ell, est.n, est.variant) == (1, 3, Variant.ORACLE)


def test_b_n_matches_direct_loops(rng):
    for _ in range(100):
        n = int(rng.integers(2, 80))
        y = rng.normal(size=n)
        ell = int(rng.integers(1, n + 1))
        assert b_n(y, ell).b_n == pytest.approx(direct_b_n(y.tolist(), ell), rel=1e-11, abs=1e-13)
        assert b_n(y, ell, BlockRange.SIMULATION).b_n == pytest.approx(
            direct_b_n(y.tolist(), ell, start=1), rel=1e-11, abs=1e-13)


@pytest.mark.parametrize("ell", [0, 4, 2.5])
def test_b_n_rejects_block_length(ell):
    with pytest.raises(InvalidArgumentError):
        b_n([1.0, 2.0, 3.0], ell)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(-100, 100), min_size=2, max_size=60), st.floats(-50, 50),
       st.floats(-10, 10), st.data())
def test_b_n_shift_and_scale(values, shift, scale, data):
    y = np.array(values)
    ell = data.draw(st.integers(1, y.size))
    base = b_n(y, ell).b_n
    assert base >= 0
    assert b_n(y + shift, ell).b_n == pytest.approx(base, rel=1e-9, abs=1e-9)
    assert b_n(scale * y, ell).b_n == pytest.approx(abs(scale) * base, rel=1e-9, abs=1e-9)


def test_b_n_hat_examples():
    assert b_n_hat(Sample([0.0, 2.0]), 1).b_n == 0.0
    assert b_n_hat(Sample([0.0, 2.0]), 2).b_n == 0.0
    assert np.allclose(rho1_empirical_all([1, 2, 4]), [4 / 3, 1, 5 / 3])
    est = b_n_hat([1.0, 2.0, 4.0], 1)
    assert est.b_n == pytest.approx(2 / 9, abs=1e-15)
    assert est.variant is Variant.PLUG_IN


def test_prefix_projection_matches_double_loop(rng):
    worst = 0.0
    for _ in range(1000):
        x = rng.exponential(size=rng.integers(1, 120)) * rng.uniform(0.1, 10)
        direct = np.abs(x[:, None] - x[None, :]).mean(axis=1)
        worst = max(worst, np.max(np.abs(rho1_empirical_all(x) - direct)))
    assert worst < 1e-10


def test_sigma_u_hat():
    assert sigma_u_hat(Sample([3.0] * 20)).sigma_hat == 0.0
    x = generate(SCHEMES["S1"], 1000, 5)
    est = sigma_u_hat(x)
    assert est.ell == 63
    assert est.sigma_hat == pytest.approx(SQRT_HALF_PI * b_n_hat(x, 63).b_n, rel=0)
    with pytest.raises(InvalidArgumentError):
        sigma_u_hat([1.0, 2.0, 3.0])


def test_oracle_variant_iid_normal():
    rng = np.random.default_rng(77)
    n = 10**4
    ell = block_length(n)
    vals = [b_n(rng.standard_normal(n), ell).sigma_hat for _ in range(300)]
    assert abs(np.mean(vals) - 1.0) < 0.05


def test_plug_in_mean_increases_with_n():
    means = []
    for n in (50, 200, 1000):
        v = [sigma_u_hat(generate(SCHEMES["S1"], n, derive_seed(8, i))).sigma_hat for i in range(2000)]
        means.append(2 * np.mean(v))
    assert means[0] < means[1] < means[2] < 1.393864
