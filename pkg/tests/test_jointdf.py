import numpy as np
import pytest

from ustat_assoc import (
    Family,
    GeneratorScheme,
    InvalidArgumentError,
    generate,
    joint_df_grid,
    joint_df_point,
)


def ecdf(values, s):
    return np.count_nonzero(values <= s) / values.size


def test_point_examples():
    x = [1.0, 2.0, 3.0]
    assert joint_df_point(x, 1, 3.0, 3.0) == 1.0
    assert joint_df_point(x, 1, 0.5, 10.0) == 0.0
    assert joint_df_point(x, 1, 2.0, 2.0) == 0.5
    assert joint_df_point(x, 2, 1.0, 3.0) == 1.0


@pytest.mark.parametrize("k", [0, 3, -1])
def test_lag_range(k):
    with pytest.raises(InvalidArgumentError):
        joint_df_point([1.0, 2.0, 3.0], k, 0.0, 0.0)


def test_grid_validation():
    with pytest.raises(InvalidArgumentError):
        joint_df_grid([1.0, 2.0, 3.0], 1, [1.0, 0.0], [0.0])


def test_single_cell_grid():
    x = generate(GeneratorScheme(Family.NORMAL_SUM, 2), 200, 1).values
    est = joint_df_grid(x, 3, [0.1], [-0.2])
    assert est.values.shape == (1, 1)
    assert est.values[0, 0] == joint_df_point(x, 3, 0.1, -0.2)


def test_grid_equals_pointwise(rng):
    for _ in range(30):
        # integer data forces ties with the grid
        x = rng.integers(0, 8, size=rng.integers(2, 60)).astype(float)
        k = int(rng.integers(1, x.size))
        gs = np.unique(rng.integers(-1, 9, size=6)).astype(float)
        gt = np.unique(rng.normal(4, 3, size=5))
        est = joint_df_grid(x, k, gs, gt)
        pointwise = np.array([[joint_df_point(x, k, s, t) for t in gt] for s in gs])
        assert np.array_equal(est.values, pointwise)


def test_monotone_and_bounded(rng):
    x = rng.normal(size=500)
    g = np.linspace(-3, 3, 25)
    v = joint_df_grid(x, 2, g, g).values
    assert v.min() >= 0 and v.max() <= 1
    assert np.all(np.diff(v, axis=0) >= 0) and np.all(np.diff(v, axis=1) >= 0)
    assert joint_df_grid(x, 2, [np.inf], [np.inf]).values[0, 0] == 1.0


def test_marginalization(rng):
    x = rng.exponential(size=300)
    k = 4
    gs = np.linspace(0, 3, 13)
    est = joint_df_grid(x, k, gs, [np.inf])
    assert np.array_equal(est.values[:, 0], [ecdf(x[:-k], s) for s in gs])


def test_iid_pairs_factorize():
    x = generate(GeneratorScheme(Family.EXP_MIN, 1), 10**5, 3).values
    med = np.median(x)
    qs = np.quantile(x, [0.25, 0.5, 0.75])
    est = joint_df_grid(x, 1, qs, qs)
    lead, lagged = x[:-1], x[1:]
    for i, s in enumerate(qs):
        for j, t in enumerate(qs):
            assert abs(est.values[i, j] - ecdf(lead, s) * ecdf(lagged, t)) < 0.01
    assert abs(joint_df_point(x, 1, med, med) - 0.25) < 0.01


def test_association_gives_positive_quadrant_dependence():
    x = generate(GeneratorScheme(Family.NORMAL_SUM, 2), 10**5, 4).values
    joint = joint_df_point(x, 1, 0.0, 0.0)
    assert joint - ecdf(x[:-1], 0.0) * ecdf(x[1:], 0.0) > 0
    # bivariate normal orthant probability with correlation 1/2 is 1/3
    assert abs(joint - 1 / 3) < 0.01


def test_csv_output():
    est = joint_df_grid([1.0, 2.0, 3.0], 1, [1.5, 2.5], [2.0])
    lines = est.to_csv().splitlines()
    assert lines == ["s,t,value", "1.5,2.0,0.5", "2.5,2.0,0.5"]
