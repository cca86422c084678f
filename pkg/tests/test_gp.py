import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from boo import gp
from boo.kernel import MaternParams, cross_covariance, gram
from boo.validation import dense_posterior, random_dataset


def _data(n=8, dim=2, seed=0):
    rng = np.random.default_rng(seed)
    return gp.ObservationSet(rng.uniform(size=(n, dim)), rng.normal(size=n))


# -- confidence schedule ------------------------------------------------------

def test_beta_frozen():
    assert gp.beta(1, 0.05) == pytest.approx(8.373159513169362, rel=1e-15)
    assert gp.beta(200, 0.05) == pytest.approx(40.163063712457586, rel=1e-15)
    assert gp.beta(7, 0.1) == pytest.approx(2 * math.log(math.pi**2 * 343 / 0.3), rel=1e-15)


@pytest.mark.parametrize("p, eta", [(0, 0.05), (3, 0.0), (3, 1.0), (3, -0.2)])
def test_beta_rejects(p, eta):
    with pytest.raises(ValueError):
        gp.beta(p, eta)


@given(p=st.integers(1, 10_000), eta=st.floats(1e-4, 0.99))
def test_beta_increasing_in_p(p, eta):
    assert gp.beta(p + 1, eta) > gp.beta(p, eta)


# -- posterior ----------------------------------------------------------------

@pytest.mark.parametrize("seed", range(10))
def test_posterior_matches_dense_solve(seed):
    params, data, Xq = random_dataset(np.random.default_rng(seed))
    mean, std = gp.fit(params, data).predict(Xq)
    ref_mean, ref_var = dense_posterior(params, data, Xq)
    np.testing.assert_allclose(mean, ref_mean, atol=1e-8 * (1 + np.abs(ref_mean).max()))
    np.testing.assert_allclose(std**2, np.maximum(ref_var, 0), atol=1e-8 * params.variance)


@pytest.mark.parametrize("seed", range(10))
def test_noiseless_interpolation(seed):
    params, data, _ = random_dataset(np.random.default_rng(100 + seed))
    mean, std = gp.fit(params, data).predict(data.points)
    np.testing.assert_allclose(mean, data.values, atol=1e-6 * (1 + np.abs(data.values).max()))
    assert std.max() <= 1e-4


def test_prior_model():
    model = gp.fit(MaternParams(2.5, 0.2, 3.0), gp.ObservationSet.empty(2))
    mean, std = model.predict(np.array([[0.1, 0.2], [0.9, 0.4]]))
    assert np.array_equal(mean, [0.0, 0.0])
    np.testing.assert_allclose(std, math.sqrt(3.0))


def test_single_point_closed_form():
    # one observation: mu = k(x, x0) y0 / s2, var = s2 - k^2 / s2
    p = MaternParams(2.5, 0.5, 2.0)
    data = gp.ObservationSet(np.array([[0.3]]), np.array([1.5]))
    k = float(cross_covariance(p, data.points, np.array([[0.7]]))[0, 0])
    mu, sd = gp.predict(gp.fit(p, data), [0.7])
    assert mu == pytest.approx(k * 1.5 / 2.0, rel=1e-10)
    assert sd**2 == pytest.approx(2.0 - k * k / 2.0, rel=1e-10)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 10_000))
def test_variance_shrinks_when_data_is_added(seed):
    rng = np.random.default_rng(seed)
    p = MaternParams(6.0, 0.3, 1.0)
    X = rng.uniform(size=(9, 2))
    Xq = rng.uniform(size=(25, 2))
    small = gp.fit(p, gp.ObservationSet(X[:8], rng.normal(size=8)))
    big = small.extend(X[8], 0.3)
    v_small, v_big = small.raw_variance(Xq), big.raw_variance(Xq)
    assert np.all(v_big <= v_small + 1e-10)
    assert np.all(big.predict(Xq)[1] >= 0)


def test_extend_equals_refit():
    p = MaternParams(6.0, 0.25, 1.3)
    data = _data(12, 3, seed=4)
    model = gp.fit(p, gp.ObservationSet.empty(3))
    for x, y in zip(data.points, data.values):
        model = model.extend(x, y)
    ref = gp.fit(p, data)
    Xq = np.random.default_rng(9).uniform(size=(30, 3))
    np.testing.assert_allclose(model.gram, gram(p, data.points))
    for a, b in zip(model.predict(Xq), ref.predict(Xq)):
        np.testing.assert_allclose(a, b, rtol=1e-10, atol=1e-12)


def test_ucb_lcb_width():
    p = MaternParams(2.5, 0.3, 1.0)
    model = gp.fit(p, _data(6, 2))
    conf = gp.ConfidenceParams(0.05, 4)
    x = np.array([0.42, 0.17])
    mu, sd = gp.predict(model, x)
    assert gp.ucb(model, x, conf) - gp.lcb(model, x, conf) == pytest.approx(2 * math.sqrt(conf.beta) * sd)
    assert gp.ucb(model, x, conf) == pytest.approx(mu + math.sqrt(gp.beta(4, 0.05)) * sd)
    batch = gp.ucb(model, np.array([x, x]), conf)
    assert batch.shape == (2,) and batch[0] == pytest.approx(gp.ucb(model, x, conf))


def test_dimension_mismatch():
    model = gp.fit(MaternParams(2.5), _data(4, 2))
    with pytest.raises(ValueError, match="dimension mismatch"):
        model.predict(np.zeros((1, 3)))


def test_duplicate_points_rejected():
    with pytest.raises(ValueError, match="pairwise distinct"):
        gp.ObservationSet(np.array([[0.1, 0.2], [0.1, 0.2]]), np.array([1.0, 2.0]))
    with pytest.raises(ValueError, match="points but"):
        gp.ObservationSet(np.zeros((2, 1)), np.zeros(3))


def test_ill_conditioned_names_the_nearest_pair():
    # a Matern Gram matrix plus the maximum jitter is always positive definite in
    # exact arithmetic, so the failure path is driven with an indefinite matrix
    X = np.array([[0.1, 0.1], [0.9, 0.2], [0.5, 0.5], [0.5, 0.5 + 1e-9]])
    K = np.eye(4)
    K[2, 3] = K[3, 2] = 1.5
    with pytest.raises(gp.IllConditionedGramError, match="#2 .* and #3 .* distance 1.000e-09"):
        gp._cholesky(K, 1.0, X)


def test_jitter_starts_small():
    model = gp.fit(MaternParams(2.5, 0.1, 2.0), _data(5, 2))
    assert model.jitter == pytest.approx(gp.JITTER_START * 2.0)


# -- likelihood and hyperparameters -------------------------------------------

def _dense_lml(params, data):
    K = gram(params, data.points)
    _, logdet = np.linalg.slogdet(K + gp.fit(params, data).jitter * np.eye(len(data)))
    y = data.values
    return -0.5 * y @ np.linalg.solve(K, y) - 0.5 * logdet - 0.5 * len(y) * math.log(2 * math.pi)


@pytest.mark.parametrize("seed", range(5))
def test_lml_matches_dense_formula(seed):
    params, data, _ = random_dataset(np.random.default_rng(200 + seed), n_max=20)
    assert gp.log_marginal_likelihood(params, data) == pytest.approx(_dense_lml(params, data), rel=1e-7, abs=1e-7)


def test_lml_needs_data():
    with pytest.raises(ValueError):
        gp.log_marginal_likelihood(MaternParams(2.5), gp.ObservationSet.empty(1))


def test_grid_mle_is_the_grid_argmax():
    data = _data(15, 2, seed=7)
    grid = gp.default_grid(data.values, 2)
    best = gp.fit_hyperparameters(data, 5.5, grid)
    scores = []
    for ls, var in grid:
        try:
            scores.append(gp.log_marginal_likelihood(MaternParams(5.5, ls, var), data))
        except gp.IllConditionedGramError:
            scores.append(-math.inf)
    ls, var = grid[int(np.argmax(scores))]
    assert (best.lengthscale, best.variance) == (ls, var)


def test_tiny_signal_picks_smallest_variance():
    rng = np.random.default_rng(3)
    X = rng.uniform(size=(10, 1))
    data = gp.ObservationSet(X, 1e-3 * np.sin(3 * X[:, 0]))
    grid = [(0.2, v) for v in (1e-6, 1e-2, 1.0, 100.0)]
    assert gp.fit_hyperparameters(data, 2.5, grid).variance == 1e-6


def test_fit_hyperparameters_rejects():
    with pytest.raises(ValueError, match="empty data"):
        gp.fit_hyperparameters(gp.ObservationSet.empty(2), 2.5, [(0.1, 1.0)])
    with pytest.raises(ValueError, match="grid is empty"):
        gp.fit_hyperparameters(_data(), 2.5, [])
