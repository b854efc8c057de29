"""Shared fixtures."""

import pytest

from src.experiment.sampling import STREAM_P, STREAM_Q, derive_seed, sample_normal
from src.io.samples import write_samples_csv
from src.kernels.functions import KernelSpec
from src.kernels.gram import assemble_gram


@pytest.fixture
def kernel():
    return KernelSpec()


@pytest.fixture
def make_system(kernel):
    """Builds (xp, xq, gram) from the Gaussian study setup."""

    def _make(n=30, m=None, seed=7, mu_q=3.0):
        m = n if m is None else m
        xp = sample_normal(2.0, 5.0, n, seed=derive_seed(seed, 0, mu_q, STREAM_P), measure_tag="p")
        xq = sample_normal(mu_q, 0.5, m, seed=derive_seed(seed, 0, mu_q, STREAM_Q), measure_tag="q")
        return xp, xq, assemble_gram(kernel, xp, xq)

    return _make


@pytest.fixture
def system(make_system):
    return make_system()


@pytest.fixture
def sample_files(tmp_path, make_system):
    """X_p and X_q written as CSV files with a header row."""

    xp, xq, _ = make_system(n=12, m=10)
    xp_path, xq_path = tmp_path / "xp.csv", tmp_path / "xq.csv"
    write_samples_csv(xp, xp_path)
    write_samples_csv(xq, xq_path)
    return xp_path, xq_path
