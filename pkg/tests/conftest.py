"""Session-wide test setup."""
import pytest

from pommer import kernels


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    # pay the JIT cost once, before anything measures wall-clock time
    kernels.warmup()
