import pytest

from primelab.sieve import arith_tables


@pytest.fixture(scope="session")
def tables_1e6():
    """Shared mu/phi/omega tables up to 10^6 (built once per session)."""
    return arith_tables(10**6)
