import numpy as np
import pytest

from npnsearch import (
    Dag,
    SemModel,
    dataset_from_text,
    dataset_to_text,
    parameterize,
    sample_disturbance,
    sample_disturbances,
    simulate,
)
from npnsearch.errors import SimulationOverflowError


# -- parameterize ------------------------------------------------------------

def test_parameterize_edgeless():
    model = parameterize(Dag(3), "G", "L", seed=0)
    assert model.coefficients == {}


def test_parameterize_is_deterministic():
    dag = Dag(5, [(0, 1), (1, 2), (0, 3), (3, 4)])
    a = parameterize(dag, "NG1", "NL1", seed=42)
    b = parameterize(dag, "NG1", "NL1", seed=42)
    assert a.coefficients == b.coefficients
    assert a.disturbance == "NG1" and a.connection == "NL1"


def test_parameterize_coefficients_uniform():
    # 10^4 coefficients: all inside (-1, 1), mean near 0
    dag = Dag(200, [(i, j) for i in range(100) for j in range(100, 200)])
    model = parameterize(dag, "G", "L", seed=9)
    coeffs = np.array(list(model.coefficients.values()))
    assert coeffs.size == 10_000
    assert (coeffs > -1.0).all() and (coeffs < 1.0).all()
    assert abs(coeffs.mean()) < 0.03


def test_model_validates_kinds_and_coverage():
    dag = Dag(2, [(0, 1)])
    with pytest.raises(ValueError):
        SemModel(dag, {(0, 1): 0.5}, "weird", "L")
    with pytest.raises(ValueError):
        SemModel(dag, {}, "G", "L")


# -- disturbances ----------------------------------------------------------------

def test_gaussian_disturbance_moments():
    rng = np.random.default_rng(0)
    draws = sample_disturbances("G", rng, 100_000)
    assert -0.02 < draws.mean() < 0.02
    assert 0.97 < draws.var() < 1.03


def test_gamma_disturbance_moments():
    # shape 2, scale 5: mean 10, variance 50
    rng = np.random.default_rng(1)
    draws = sample_disturbances("NG1", rng, 100_000)
    assert 9.8 < draws.mean() < 10.2
    assert 48.0 < draws.var() < 52.0
    assert (draws > 0).all()


def test_mixture_disturbance_moments_and_bimodality():
    # components N(-1, .5) and N(+1, .5): mean 0, variance 0.5 + 1 = 1.5
    rng = np.random.default_rng(2)
    draws = sample_disturbances("NG2", rng, 100_000)
    assert -0.05 < draws.mean() < 0.05
    assert 1.44 < draws.var() < 1.56
    hist, _ = np.histogram(draws, bins=np.linspace(-3, 3, 61))
    center = hist[28:32].mean()
    peaks = max(hist[18:22].mean(), hist[38:42].mean())
    assert center < 0.8 * peaks  # dip between the modes


def test_scalar_draw_and_unknown_kind():
    rng = np.random.default_rng(3)
    value = sample_disturbance("G", rng)
    assert isinstance(value, float)
    with pytest.raises(ValueError):
        sample_disturbance("NG3", rng)


# -- simulate ----------------------------------------------------------------------

def test_simulate_edgeless_columns_independent():
    model = parameterize(Dag(3), "G", "L", seed=4)
    data = simulate(model, 5000, seed=5)
    assert data.shape == (5000, 3)
    assert np.abs(data.mean(0)).max() < 0.06
    corr = np.corrcoef(data, rowvar=False)
    assert np.abs(corr - np.eye(3)).max() < 0.05


def test_simulate_linear_edge_variance():
    # Y = 0.9 X + e: Var(Y) = 0.81 + 1 = 1.81
    dag = Dag(2, [(0, 1)])
    model = SemModel(dag, {(0, 1): 0.9}, "G", "L")
    data = simulate(model, 100_000, seed=6)
    assert 1.75 < data[:, 1].var(ddof=1) < 1.87


def test_simulate_sine_of_gamma_decorrelates():
    # sin over the wide gamma support wipes out linear correlation; this is
    # the mechanism behind the all-zero recovery condition
    dag = Dag(2, [(0, 1)])
    model = SemModel(dag, {(0, 1): 0.8}, "NG1", "NL2")
    data = simulate(model, 100_000, seed=7)
    corr = np.corrcoef(data[:, 0], data[:, 1])[0, 1]
    assert abs(corr) < 0.02


def test_simulate_deterministic_under_seed():
    dag = Dag(4, [(0, 1), (1, 2), (2, 3)])
    model = parameterize(dag, "NG2", "NL1", seed=8)
    a = simulate(model, 100, seed=9)
    b = simulate(model, 100, seed=9)
    assert (a == b).all()
    c = simulate(model, 100, seed=10)
    assert not (a == c).all()


def test_simulate_matches_path_tracing_covariance():
    # linear/Gaussian: Sigma = (I - A^T)^-1 (I - A^T)^-T with A[p, c] = coef
    dag = Dag(5, [(0, 1), (0, 2), (1, 3), (2, 3), (3, 4)])
    model = parameterize(dag, "G", "L", seed=11)
    n = 200_000
    data = simulate(model, n, seed=12)
    a = np.zeros((5, 5))
    for (p, c), coef in model.coefficients.items():
        a[p, c] = coef
    inv = np.linalg.inv(np.eye(5) - a.T)
    sigma = inv @ inv.T
    sample = np.cov(data, rowvar=False)
    # three standard errors, with Var(s_ij) approx (s_ii s_jj + s_ij^2)/n
    se = np.sqrt((np.outer(np.diag(sigma), np.diag(sigma)) + sigma**2) / n)
    assert (np.abs(sample - sigma) < 3.0 * se + 1e-9).all()


def test_simulate_overflow_raises():
    # a long NL1 chain with big coefficients explodes past float range
    depth = 40
    dag = Dag(depth, [(i, i + 1) for i in range(depth - 1)])
    model = SemModel(dag, {e: 0.99 for e in dag.edges}, "NG1", "NL1")
    with pytest.raises(SimulationOverflowError):
        simulate(model, 50, seed=13)


# -- dataset text format -----------------------------------------------------------

def test_dataset_roundtrip_and_header():
    rng = np.random.default_rng(14)
    data = rng.standard_normal((7, 3))
    text = dataset_to_text(data)
    assert text.splitlines()[0] == "X1\tX2\tX3"
    back = dataset_from_text(text)
    assert (back == data).all()
