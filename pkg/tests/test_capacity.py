"""Tests for Christoffel functions, effective dimension and lambda_*."""

import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from src.capacity.christoffel import christoffel, christoffel_batch, default_probe_grid, n_inf_estimate
from src.capacity.profile import (
    capacity_profile,
    effective_dimension,
    effective_dimension_from_spectrum,
    export_profile_csv,
    find_lambda_star,
)
from src.io.exporter import read_csv
from src.kernels.gram import GramSystem, assemble_gram
from src.kernels.samples import SampleSet
from src.selection.grid import LambdaGrid
from src.utils.errors import InputError

LADDER = [0.01, 0.05, 0.1, 0.5, 1.0, 5.0]


@pytest.fixture
def scalar_system(kernel):
    xp = SampleSet([0.0], "p")
    xq = SampleSet([0.0], "q")
    return xp, assemble_gram(kernel, xp, xq)


def test_christoffel_scalar_case(scalar_system, kernel):
    xp, gram = scalar_system
    assert christoffel(gram, kernel, xp, 2.0, 0.0) == pytest.approx(0.5, rel=1e-14)
    for lam in LADDER:
        assert christoffel(gram, kernel, xp, lam, 0.0) == pytest.approx(2.0 / (lam + 2.0), rel=1e-12)


def test_christoffel_large_lambda_limit(system, kernel):
    xp, _, gram = system
    lam = 1e12
    values = christoffel_batch(gram, kernel, xp, lam, np.array([[0.0], [3.0], [10.0]]))
    assert_allclose(values, 2.0 / lam, rtol=1e-6)


def test_christoffel_decreases_in_lambda(system, kernel):
    xp, _, gram = system
    probes = np.linspace(-4.0, 8.0, 25)
    curves = np.array([christoffel_batch(gram, kernel, xp, lam, probes) for lam in LADDER])
    assert np.all(np.diff(curves, axis=0) < 0)


def test_christoffel_operator_norm_bound(system, kernel):
    xp, _, gram = system
    probes = default_probe_grid(xp)
    for lam in LADDER:
        values = christoffel_batch(gram, kernel, xp, lam, probes)
        assert np.all(values >= 0)
        assert np.all(values * lam <= kernel.offset + 1.0 + 1e-12)


def test_christoffel_rejects_non_positive_lambda(system, kernel):
    xp, _, gram = system
    with pytest.raises(InputError):
        christoffel(gram, kernel, xp, 0.0, 0.0)


def test_effective_dimension_closed_form():
    assert effective_dimension_from_spectrum([1.0, 0.1], 0.1) == pytest.approx(1.0 / 1.1 + 0.5, rel=1e-14)
    assert effective_dimension_from_spectrum([1.0, 0.1], 0.1) == pytest.approx(1.40909, abs=1e-5)


def test_effective_dimension_large_lambda(system):
    _, _, gram = system
    lam = 1e9
    trace = np.trace(gram.k_matrix) / gram.n
    assert effective_dimension(gram, lam) == pytest.approx(trace / lam, rel=1e-6)


def test_effective_dimension_bounds(system):
    _, _, gram = system
    for lam in LADDER:
        value = effective_dimension(gram, lam)
        assert 0 <= value <= gram.n


def test_mean_christoffel_equals_effective_dimension(system, kernel):
    xp, _, gram = system
    for lam in (0.05, 0.1, 0.5):
        mean_c = christoffel_batch(gram, kernel, xp, lam, xp.points).mean()
        assert mean_c == pytest.approx(effective_dimension(gram, lam), rel=1e-8)


def test_balance_map_strictly_decreasing(system):
    _, _, gram = system
    lams = np.geomspace(1e-4, 2.0, 40)
    ratio = np.array([effective_dimension(gram, lam) / lam for lam in lams])
    assert np.all(np.diff(ratio) < 0)


def test_n_inf_on_sample_equals_max(system, kernel):
    xp, _, gram = system
    lam = 0.2
    on_sample = christoffel_batch(gram, kernel, xp, lam, xp.points).max()
    assert n_inf_estimate(gram, kernel, xp, lam, xp.points) == pytest.approx(on_sample, rel=1e-14)

    superset = n_inf_estimate(gram, kernel, xp, lam, default_probe_grid(xp))
    assert superset >= on_sample


def test_n_inf_scalar_case(scalar_system, kernel):
    xp, gram = scalar_system
    lam = 0.5
    probes = np.linspace(-3.0, 3.0, 13)
    expected = max(christoffel(gram, kernel, xp, lam, x) for x in probes)
    assert n_inf_estimate(gram, kernel, xp, lam, probes) == pytest.approx(expected, rel=1e-12)


def test_n_inf_rejects_empty_probes(system, kernel):
    xp, _, gram = system
    with pytest.raises(InputError):
        n_inf_estimate(gram, kernel, xp, 0.1, [])


def test_default_probe_grid_covers_inflated_box(system):
    xp, _, _ = system
    grid = default_probe_grid(xp, size=50, inflate=0.2)
    lo, hi = xp.points.min(), xp.points.max()
    span = hi - lo
    assert grid.shape == (50, 1)
    assert grid.min() == pytest.approx(lo - 0.2 * span)
    assert grid.max() == pytest.approx(hi + 0.2 * span)


# =========================
# lambda_*
# =========================

def test_lambda_star_scalar_case():
    gram = GramSystem(np.array([[1.0]]), np.array([1.0]), 1, 1)
    assert find_lambda_star(gram) == pytest.approx((math.sqrt(5.0) - 1.0) / 2.0, rel=1e-6)


def test_lambda_star_contract(system):
    _, _, gram = system
    lam_star = find_lambda_star(gram)
    assert abs(effective_dimension(gram, lam_star) / lam_star - gram.n) <= 1e-4 * gram.n


def test_lambda_star_below_default_grid(make_system):
    _, _, gram = make_system(n=100, seed=3, mu_q=2.0)
    assert find_lambda_star(gram) < 0.1


def test_lambda_star_invalid_bracket(system):
    _, _, gram = system
    with pytest.raises(InputError) as info:
        find_lambda_star(gram, bracket=(1.0, 2.0))
    assert "lo_value" in info.value.context and "hi_value" in info.value.context

    with pytest.raises(InputError):
        find_lambda_star(gram, bracket=(2.0, 1.0))


# =========================
# Profile
# =========================

def test_capacity_profile_invariants(system, kernel, tmp_path):
    xp, _, gram = system
    grid = LambdaGrid()
    profile = capacity_profile(gram, kernel, xp, grid.with_predecessor[::-1])

    assert np.all(np.diff(profile.lambdas) < 0)
    assert np.all(profile.n_eff <= gram.n)
    # lambdas decrease along the profile, so n_eff must not decrease
    assert np.all(np.diff(profile.n_eff) >= 0)
    assert np.all(profile.n_inf >= profile.n_eff - 1e-10)
    assert profile.lambda_star is not None

    path = tmp_path / "capacity.csv"
    export_profile_csv(profile, path)
    rows = read_csv(path)
    assert len(rows) == grid.w + 1
    assert list(rows[0].keys()) == ["lambda", "n_eff", "n_inf"]
    assert_allclose([float(r["n_eff"]) for r in rows], profile.n_eff, rtol=0)


def test_capacity_profile_without_lambda_star(system, kernel):
    xp, _, gram = system
    profile = capacity_profile(gram, kernel, xp, [0.5, 0.1], bracket=(1.0, 2.0))
    assert profile.lambda_star is None
    assert profile.to_dict()["lambda_star"] is None
