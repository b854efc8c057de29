# src/experiment/sampling.py

"""
Reproducible Gaussian draws.

Generator: numpy PCG64 via `np.random.default_rng(seed)`.
Cell seeds: `np.random.SeedSequence([base, replication, bits(mu_q), stream])`,
bits(mu_q) being the IEEE-754 bit pattern of mu_q; the first 64-bit word
of the generated state is the seed.
"""

import numpy as np

from src.kernels.samples import SampleSet
from src.utils.errors import InputError

STREAM_P = 0
STREAM_Q = 1


def derive_seed(base: int, replication: int, mu_q: float = 0.0, stream: int = 0) -> int:
    if base < 0 or replication < 0:
        raise InputError(f"seeds must be non-negative, got base={base}, replication={replication}", flag="seed")

    mu_bits = int(np.array(float(mu_q), dtype=np.float64).view(np.uint64))
    ss = np.random.SeedSequence([int(base), int(replication), mu_bits, int(stream)])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def sample_normal(mu: float, var: float, count: int, seed: int, measure_tag: str = "p") -> SampleSet:
    if not var > 0:
        raise InputError(f"variance must be > 0, got {var}", flag="var")
    if count < 1:
        raise InputError(f"count must be >= 1, got {count}", flag="n")

    rng = np.random.default_rng(seed)
    points = rng.normal(loc=mu, scale=np.sqrt(var), size=(int(count), 1))
    return SampleSet(points=points, measure_tag=measure_tag, seed=seed)
