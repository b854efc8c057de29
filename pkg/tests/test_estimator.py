"""Tests for the Lavrentiev recursion, the spectral path and model evaluation."""

import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy.linalg import solve

from src.estimator.lavrentiev import (
    factorize,
    fit_iterated_lavrentiev,
    lavrentiev_iterates,
    lavrentiev_step,
)
from src.estimator.model import RatioModel, evaluate, evaluate_batch, load_model, save_model
from src.estimator.spectral import fit_model, fit_spectral, spectral_decomposition
from src.experiment.sampling import sample_normal
from src.kernels.functions import kernel_matrix
from src.kernels.gram import GramSystem, assemble_gram
from src.kernels.samples import SampleSet
from src.regularization.schemes import iterated_lavrentiev, lavrentiev, spectral_cutoff
from src.selection.grid import LambdaGrid
from src.utils.errors import InputError, NumericalError

GRID_LAMBDAS = LambdaGrid().with_predecessor


def _direct_solve(gram, lam):
    return solve(gram.n * lam * np.eye(gram.n) + gram.k_matrix, gram.f_bar, assume_a="pos")


def test_scalar_fit(kernel):
    xp, xq = SampleSet([0.0], "p"), SampleSet([0.0], "q")
    gram = assemble_gram(kernel, xp, xq)
    model = fit_iterated_lavrentiev(gram, xp, xq, kernel, lam=1.0, k=1)
    assert_allclose(model.values_at_xp, [2.0 / 3.0], rtol=1e-14)
    assert_allclose(evaluate(model, 0.0), 2.0 / 3.0, rtol=1e-12)


@pytest.mark.parametrize("seed", range(20))
def test_k1_equals_closed_form(make_system, kernel, seed):
    xp, xq, gram = make_system(n=25, m=20, seed=seed)
    lam = float(GRID_LAMBDAS[seed % len(GRID_LAMBDAS)])
    model = fit_iterated_lavrentiev(gram, xp, xq, kernel, lam, 1)
    assert_allclose(model.values_at_xp, _direct_solve(gram, lam), rtol=1e-10, atol=1e-12)


@pytest.mark.parametrize("k", [1, 2, 3, 5, 10])
def test_mu_coeff_is_k_over_lambda(system, kernel, k):
    xp, xq, gram = system
    lam = 0.3
    model = fit_iterated_lavrentiev(gram, xp, xq, kernel, lam, k)
    assert model.mu_coeff == pytest.approx(k / lam, rel=1e-14)
    assert model.scheme == iterated_lavrentiev(lam, k)


@pytest.mark.parametrize("k", [1, 3, 10])
def test_evaluate_reproduces_values_at_xp(system, kernel, k):
    xp, xq, gram = system
    model = fit_iterated_lavrentiev(gram, xp, xq, kernel, 0.2, k)
    assert_allclose(evaluate_batch(model, xp.points), model.values_at_xp, rtol=1e-8)
    for i in (0, 7, 29):
        assert evaluate(model, xp.points[i]) == pytest.approx(model.values_at_xp[i], rel=1e-8)


def test_residual_telescoping(system):
    _, _, gram = system
    lam, k = 0.25, 5
    factor = factorize(gram, lam)
    iterates = lavrentiev_iterates(gram, lam, k, factor=factor)
    assert len(iterates) == k

    recomputed = lavrentiev_step(factor, gram, lam, iterates[-2])
    assert_allclose(recomputed, iterates[-1], rtol=1e-12)

    delta = iterates[-1] - iterates[-2]
    rhs = gram.n * lam * (iterates[-2] - iterates[-3])
    assert_allclose(delta, solve(gram.n * lam * np.eye(gram.n) + gram.k_matrix, rhs), rtol=1e-8, atol=1e-12)


def test_linear_in_right_hand_side(system, kernel):
    xp, xq, gram = system
    scaled = GramSystem(gram.k_matrix, 3.5 * gram.f_bar, gram.n, gram.m)

    a = fit_iterated_lavrentiev(gram, xp, xq, kernel, 0.4, 3)
    b = fit_iterated_lavrentiev(scaled, xp, xq, kernel, 0.4, 3)
    assert_allclose(b.values_at_xp, 3.5 * a.values_at_xp, rtol=1e-12)
    assert_allclose(b.alpha, 3.5 * a.alpha, rtol=1e-12)


def test_p_equals_q_concentrates_near_one(kernel):
    xp = sample_normal(0.0, 1.0, 500, seed=11, measure_tag="p")
    xq = sample_normal(0.0, 1.0, 500, seed=12, measure_tag="q")
    gram = assemble_gram(kernel, xp, xq)
    model = fit_iterated_lavrentiev(gram, xp, xq, kernel, 0.1, 2)
    assert abs(model.values_at_xp.mean() - 1.0) < 0.25


def test_fit_rejects_bad_parameters(system, kernel):
    xp, xq, gram = system
    with pytest.raises(InputError):
        fit_iterated_lavrentiev(gram, xp, xq, kernel, 0.0, 1)
    with pytest.raises(InputError):
        fit_iterated_lavrentiev(gram, xp, xq, kernel, 0.1, 0)
    with pytest.raises(InputError):
        fit_iterated_lavrentiev(gram, SampleSet(xp.points[:3], "p"), xq, kernel, 0.1, 1)


def test_factorization_failure_carries_lambda():
    # indefinite "Gram" matrix
    gram = GramSystem(np.array([[1.0, 3.0], [3.0, 1.0]]), np.ones(2), 2, 2)
    with pytest.raises(NumericalError) as info:
        factorize(gram, 0.1)
    assert info.value.lam == 0.1
    assert info.value.min_eig < 0


# =========================
# Spectral path
# =========================

@pytest.mark.parametrize("seed", range(5))
@pytest.mark.parametrize("k", [1, 2, 3, 5, 10])
def test_spectral_path_matches_recursion(make_system, kernel, seed, k):
    xp, xq, gram = make_system(n=40, seed=100 + seed)
    decomposition = spectral_decomposition(gram)
    probes = np.random.default_rng(seed).uniform(-3.0, 7.0, size=(10, 1))

    for lam in (0.9, 0.6, 0.35, 0.2, 0.1):
        rec = fit_iterated_lavrentiev(gram, xp, xq, kernel, lam, k)
        spec = fit_spectral(gram, xp, xq, kernel, iterated_lavrentiev(lam, k), decomposition)

        assert_allclose(spec.values_at_xp, rec.values_at_xp, rtol=1e-8, atol=1e-8)
        assert spec.mu_coeff == pytest.approx(rec.mu_coeff, rel=1e-12)
        assert_allclose(evaluate_batch(spec, probes), evaluate_batch(rec, probes), rtol=1e-8, atol=1e-8)


def test_spectral_cutoff_below_spectrum_inverts(kernel):
    xp = SampleSet([-1.0, 0.5, 2.0], "p")
    xq = SampleSet([0.0, 1.0], "q")
    gram = assemble_gram(kernel, xp, xq)
    t, _ = spectral_decomposition(gram)

    model = fit_spectral(gram, xp, xq, kernel, spectral_cutoff(0.5 * t.min()))
    expected = solve(gram.k_matrix / gram.n, gram.f_bar / gram.n)
    assert_allclose(model.values_at_xp, expected, rtol=1e-8)


def test_spectral_cutoff_above_spectrum_is_zero(system, kernel):
    xp, xq, gram = system
    t, _ = spectral_decomposition(gram)
    model = fit_spectral(gram, xp, xq, kernel, spectral_cutoff(2.0 * t.max()))
    assert np.all(model.values_at_xp == 0.0)
    assert model.mu_coeff == 0.0


def test_fit_model_dispatch(system, kernel):
    xp, xq, gram = system
    assert fit_model(gram, xp, xq, kernel, lavrentiev(0.3)).mu_coeff == pytest.approx(1 / 0.3)
    assert fit_model(gram, xp, xq, kernel, spectral_cutoff(0.3)).scheme.kind == "spectral_cutoff"


# =========================
# Evaluation and persistence
# =========================

def test_mean_embedding_term_alone(system, kernel):
    xp, xq, _ = system
    model = RatioModel(
        scheme=lavrentiev(1.0),
        kernel=kernel,
        xp_points=xp.points,
        xq_points=xq.points,
        alpha=np.zeros(xp.size),
        mu_coeff=1.0,
        values_at_xp=np.zeros(xp.size),
    )
    x = np.array([[0.7]])
    assert_allclose(evaluate_batch(model, x), kernel_matrix(kernel, x, xq.points).mean(axis=1))


def test_evaluate_batch_edge_cases(system, kernel):
    xp, xq, gram = system
    model = fit_iterated_lavrentiev(gram, xp, xq, kernel, 0.3, 2)

    assert evaluate_batch(model, []).shape == (0,)
    assert evaluate_batch(model, [[1.5]])[0] == evaluate(model, 1.5)
    with pytest.raises(InputError):
        evaluate(model, [1.0, 2.0])


def test_model_json_round_trip(system, kernel, tmp_path):
    xp, xq, gram = system
    model = fit_iterated_lavrentiev(gram, xp, xq, kernel, 0.3, 3)
    path = tmp_path / "model.json"
    save_model(model, path)
    loaded = load_model(path)

    probes = np.linspace(-2.0, 6.0, 17)
    assert_allclose(evaluate_batch(loaded, probes), evaluate_batch(model, probes), rtol=1e-12)
    assert loaded.scheme == model.scheme
    assert loaded.kernel == model.kernel


def test_load_model_missing_file(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_model(tmp_path / "missing.json")
