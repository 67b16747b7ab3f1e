import math

import numpy as np
import pytest
from scipy.special import ndtri
from scipy.stats import rankdata

from npnsearch import normal_quantile, npn_transform, truncation_delta
from npnsearch.errors import DegenerateColumnError, InsufficientDataError

# Reference output for the column [1..5], frozen from an independent
# ECDF + scipy-quantile computation (ranks r/n, truncation, norm.ppf,
# affine rescale to the input's sample mean and variance).
COLUMN_12345_EXPECTED = [
    1.0058145629313595,
    2.043569376424932,
    2.937411760989668,
    3.9751665744832403,
    5.038037725170801,
]


def test_normal_quantile_matches_scipy():
    p = np.concatenate([
        np.array([1e-12, 1e-8, 1e-4, 0.02425, 0.5, 0.97575, 1 - 1e-4, 1 - 1e-9]),
        np.linspace(0.001, 0.999, 4001),
    ])
    ours = normal_quantile(p)
    assert np.abs(ours - ndtri(p)).max() < 1e-9


def test_normal_quantile_scalar_and_domain():
    assert normal_quantile(0.5) == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(ValueError):
        normal_quantile(0.0)
    with pytest.raises(ValueError):
        normal_quantile(1.0)


def test_truncation_delta_value():
    n = 1000
    assert truncation_delta(n) == pytest.approx(
        1.0 / (4.0 * n**0.25 * math.sqrt(math.pi * math.log(n))))


def test_transform_fixed_point_column():
    # values already of the form quantile(truncated i/n), rescaled: unchanged
    n = 40
    delta = truncation_delta(n)
    base = ndtri(np.clip(np.arange(1, n + 1) / n, delta, 1 - delta))
    col = 3.0 + 2.5 * base
    out = npn_transform(col.reshape(-1, 1))
    assert np.abs(out[:, 0] - col).max() < 1e-9


def test_transform_column_12345_against_reference():
    out = npn_transform(np.array([[1.0], [2.0], [3.0], [4.0], [5.0]]))
    assert np.allclose(out[:, 0], COLUMN_12345_EXPECTED, atol=1e-12)


def test_transform_invariant_under_monotone_maps():
    rng = np.random.default_rng(0)
    x = rng.gamma(2.0, 5.0, size=(400, 3))
    direct = npn_transform(x)
    warped = npn_transform(np.exp(x / 10.0))
    # the transform sees only ranks, so a strictly monotone warp changes
    # nothing but each column's retained moments
    for j in range(3):
        assert (rankdata(direct[:, j]) == rankdata(warped[:, j])).all()
        a = (direct[:, j] - direct[:, j].mean()) / direct[:, j].std()
        b = (warped[:, j] - warped[:, j].mean()) / warped[:, j].std()
        assert np.allclose(a, b, atol=1e-9)


def test_transform_retains_mean_and_variance():
    rng = np.random.default_rng(1)
    x = rng.gamma(2.0, 5.0, size=(500, 4)) * 100.0
    out = npn_transform(x)
    scale = np.abs(x).max()
    assert np.abs(out.mean(0) - x.mean(0)).max() < 1e-9 * scale
    assert np.abs(out.var(0, ddof=1) / x.var(0, ddof=1) - 1.0).max() < 1e-9


def test_transform_is_idempotent_up_to_tolerance():
    rng = np.random.default_rng(2)
    x = rng.standard_normal((300, 2)) ** 3
    once = npn_transform(x)
    twice = npn_transform(once)
    assert np.abs(twice - once).max() < 1e-6


def test_transform_gaussianizes_gamma_skewness():
    rng = np.random.default_rng(3)
    x = rng.gamma(2.0, 5.0, size=(5000, 1))
    out = npn_transform(x)[:, 0]
    centered = out - out.mean()
    skew = (centered**3).mean() / (centered**2).mean() ** 1.5
    raw_centered = x[:, 0] - x.mean()
    raw_skew = (raw_centered**3).mean() / (raw_centered**2).mean() ** 1.5
    assert raw_skew > 1.0  # the input really is skewed
    assert -0.1 < skew < 0.1


def test_transform_column_independence_of_order():
    rng = np.random.default_rng(4)
    x = rng.standard_normal((100, 5))
    out = npn_transform(x)
    flipped = npn_transform(x[:, ::-1])
    assert np.allclose(out, flipped[:, ::-1])


def test_transform_handles_ties_via_average_ranks():
    col = np.array([1.0, 1.0, 2.0, 3.0])
    out = npn_transform(col.reshape(-1, 1))[:, 0]
    assert out[0] == out[1]
    assert out[1] < out[2] < out[3]


def test_transform_errors():
    with pytest.raises(DegenerateColumnError):
        npn_transform(np.ones((10, 1)))
    with pytest.raises(InsufficientDataError):
        npn_transform(np.array([[1.0, 2.0]]))
    with pytest.raises(ValueError):
        npn_transform(np.array([[1.0], [np.inf]]))
