"""Tests for kernels, sample sets and Gram assembly."""

import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from src.kernels.functions import (
    KernelSpec,
    eval_kernel,
    kappa0,
    kernel_matrix,
    register_kernel,
    symmetric_kernel_matrix,
)
from src.kernels.gram import assemble_gram
from src.kernels.samples import SampleSet
from src.utils.errors import InputError


def test_eval_kernel_at_coincident_points(kernel):
    assert eval_kernel(kernel, 0.0, 0.0) == 2.0


def test_eval_kernel_tail_tends_to_offset(kernel):
    value = eval_kernel(kernel, 0.0, 50.0)
    assert 1.0 <= value < 1.0 + 1e-12


def test_eval_kernel_at_sqrt_two(kernel):
    assert_allclose(eval_kernel(kernel, 0.0, math.sqrt(2.0)), 1.0 + math.exp(-1.0), rtol=1e-14)
    assert_allclose(eval_kernel(kernel, 0.0, math.sqrt(2.0)), 1.3678794, atol=1e-7)


def test_eval_kernel_is_symmetric(kernel):
    x, y = np.array([0.3, -1.2]), np.array([2.0, 0.5])
    assert eval_kernel(kernel, x, y) == eval_kernel(kernel, y, x)


def test_eval_kernel_dimension_mismatch(kernel):
    with pytest.raises(InputError):
        eval_kernel(kernel, [0.0, 1.0], [0.0])


def test_gaussian_family_has_zero_offset():
    spec = KernelSpec.gaussian()
    assert eval_kernel(spec, 1.0, 1.0) == 1.0
    with pytest.raises(InputError):
        KernelSpec(family="gaussian", offset=1.0)


def test_bandwidth_must_be_positive():
    with pytest.raises(InputError):
        KernelSpec(bandwidth=0.0)
    with pytest.raises(InputError):
        KernelSpec(offset=-0.5)


def test_bandwidth_scales_distance():
    spec = KernelSpec(bandwidth=2.0)
    assert_allclose(eval_kernel(spec, 0.0, 2.0), 1.0 + math.exp(-0.5), rtol=1e-14)


def test_kappa0_matches_diagonal(kernel):
    rng = np.random.default_rng(3)
    xs = rng.normal(size=(200, 2)) * 10
    diag = np.array([eval_kernel(kernel, x, x) for x in xs])
    assert diag.max() == kernel.offset + 1.0
    assert_allclose(kappa0(kernel) ** 2, kernel.offset + 1.0)


def test_custom_kernel_registry():
    register_kernel("linear_plus_one", lambda x, y: 1.0 + float(x @ y))
    spec = KernelSpec(family="custom_ref", ref="linear_plus_one")

    xs = np.array([[0.0], [1.0], [2.0]])
    K = symmetric_kernel_matrix(spec, xs)
    assert_allclose(K, 1.0 + xs @ xs.T)
    assert kappa0(spec) is None

    with pytest.raises(InputError):
        KernelSpec(family="custom_ref", ref="not-registered")


def test_kernel_matrix_matches_pointwise(kernel):
    rng = np.random.default_rng(0)
    xs, ys = rng.normal(size=(5, 3)), rng.normal(size=(4, 3))
    K = kernel_matrix(kernel, xs, ys)
    expected = np.array([[eval_kernel(kernel, a, b) for b in ys] for a in xs])
    assert_allclose(K, expected, rtol=1e-12)


# =========================
# SampleSet
# =========================

def test_sample_set_reshapes_scalars():
    s = SampleSet([1.0, 2.0, 3.0])
    assert s.points.shape == (3, 1)
    assert s.size == 3 and s.dim == 1 and len(s) == 3


def test_sample_set_rejects_empty():
    with pytest.raises(InputError):
        SampleSet(np.zeros((0, 1)))


def test_sample_set_rejects_bad_tag():
    with pytest.raises(InputError):
        SampleSet([1.0], measure_tag="r")


def test_sample_set_is_read_only():
    s = SampleSet([1.0, 2.0])
    with pytest.raises(ValueError):
        s.points[0, 0] = 5.0


# =========================
# Gram assembly
# =========================

def test_assemble_single_coincident_point(kernel):
    gram = assemble_gram(kernel, SampleSet([0.0], "p"), SampleSet([0.0], "q"))
    assert_allclose(gram.k_matrix, [[2.0]])
    assert_allclose(gram.f_bar, [2.0])
    assert gram.n == 1 and gram.m == 1


def test_assemble_f_bar_two_points(kernel):
    xp = SampleSet([0.0, math.sqrt(2.0)], "p")
    xq = SampleSet([0.0], "q")
    gram = assemble_gram(kernel, xp, xq)
    assert_allclose(gram.f_bar, [4.0, 2.0 * (1.0 + math.exp(-1.0))], rtol=1e-14)
    assert_allclose(gram.f_bar[1], 2.7357588, atol=1e-7)


def test_gram_is_exactly_symmetric(system):
    _, _, gram = system
    assert np.array_equal(gram.k_matrix, gram.k_matrix.T)


def test_gram_diagonal_and_f_bar_bounds(system, kernel):
    _, _, gram = system
    assert np.all(np.diag(gram.k_matrix) == kernel.offset + 1.0)
    assert np.all(gram.f_bar >= 0)
    assert np.all(gram.f_bar <= gram.n * (kernel.offset + 1.0))


@pytest.mark.parametrize("seed", range(5))
def test_gram_is_psd(kernel, seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 51))
    xp = SampleSet(rng.normal(size=(n, 2)), "p")
    xq = SampleSet(rng.normal(size=(7, 2)), "q")
    gram = assemble_gram(kernel, xp, xq)
    assert gram.min_eigenvalue() >= -gram.tol_psd
    assert gram.check_psd()


def test_f_bar_invariant_under_duplicated_xq(system, kernel):
    xp, xq, gram = system
    doubled = SampleSet(np.vstack([xq.points, xq.points]), "q")
    assert_allclose(assemble_gram(kernel, xp, doubled).f_bar, gram.f_bar, rtol=1e-12)


def test_assemble_checks_tags_and_dimension(kernel):
    with pytest.raises(InputError):
        assemble_gram(kernel, SampleSet([0.0], "q"), SampleSet([0.0], "q"))
    with pytest.raises(InputError):
        assemble_gram(kernel, SampleSet([[0.0, 1.0]], "p"), SampleSet([0.0], "q"))
