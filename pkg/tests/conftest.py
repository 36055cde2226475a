import numpy as np
import pytest

from carmkit import _kernels


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    # compile (or no-op) every kernel once so timed tests measure the
    # algorithms, not the JIT; numba caches the result on disk afterwards
    base = _kernels.sieve_primes(40)
    _kernels.lpf_range(1, 100, base)
    _kernels.carmichael_segment(3, 101, base[1:])
    res = np.array([7, 11], dtype=np.int64)
    inv = np.array([pow(7, -1, 20), pow(11, -1, 20)], dtype=np.int64)
    _kernels.dp_reach(res, inv, 20, 2, True, 1)
    _kernels.dp_reach(res, inv, 20, 2, False, 1)
    _kernels.all_subset_products(res, 20)
