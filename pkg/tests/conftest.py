import numpy as np
import pytest

from lllsim.operators import TrilinearKernelTable, build_kernel_table

_TABLES: dict[int, TrilinearKernelTable] = {}


@pytest.fixture
def kernel_table():
    """Factory for kernel tables, cached across the whole session."""

    def get(truncation: int) -> TrilinearKernelTable:
        if truncation not in _TABLES:
            _TABLES[truncation] = build_kernel_table(truncation)
        return _TABLES[truncation]

    return get


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
